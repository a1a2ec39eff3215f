"""Three-road example: private signals let all but one agent learn the good
road, which public signals cannot do without triggering congestion."""
import sys
from fractions import Fraction as F

from scg_signal import (
    ExplicitScheme,
    check_obedience,
    evaluate_public_scheme,
    figure1_private_scheme,
    full_info_scheme,
    gen_figure1,
    solve_optimal_private,
    solve_optimal_public,
)
from scg_signal.private import scheme_cost

N = int(sys.argv[1]) if len(sys.argv) > 1 else 5
inst = gen_figure1(N, F(1, 100), 2)

print(f"N = {N}")
print(f"full information:       {evaluate_public_scheme(inst, full_info_scheme(inst))}")
_, public = solve_optimal_public(inst)
print(f"optimal public:         {public}")
scheme = ExplicitScheme(figure1_private_scheme(inst))
print(f"reveal-to-all-but-one:  {scheme_cost(inst, scheme)}  "
      f"(obedient: {not check_obedience(inst, scheme)})")
_, private = solve_optimal_private(inst)
print(f"optimal private:        {private}")
