"""Table 1 instance: equilibria at a few posteriors, then the optimal public
and private schemes next to the full- and no-information baselines."""
from fractions import Fraction as F

from scg_signal import (
    best_nash,
    evaluate_public_scheme,
    expected_cost_functions,
    full_info_scheme,
    gen_table1,
    no_info_scheme,
    solve_optimal_private,
    solve_optimal_public,
)

inst = gen_table1()
print("best pure NE cost at a posterior")
for p in [(1, 0), (0, 1), (F(3, 5), F(2, 5)), (F(2, 5), F(3, 5))]:
    res = best_nash(inst, expected_cost_functions(inst, p))
    print(f"  p={tuple(str(v) for v in p)}  config={res.config}  cost={res.cost}")

scheme, public = solve_optimal_public(inst, backend="exact")
print(f"\noptimal public scheme (value {public}):")
for s in scheme:
    print(f"  prob {s.probability}  posterior {tuple(str(v) for v in s.posterior)}  -> {s.config}")

_, private = solve_optimal_private(inst, backend="exact")
print(f"optimal private value: {private}")
print(f"full information: {evaluate_public_scheme(inst, full_info_scheme(inst))}")
print(f"no information:   {evaluate_public_scheme(inst, no_info_scheme(inst))}")
