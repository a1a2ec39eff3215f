"""Optimal public and private signaling in singleton congestion games with an
uncertain state of nature."""
from importlib import resources as _resources

from .core import (
    Instance,
    config_of_profile,
    enumerate_configurations,
    expected_cost_functions,
    make_instance,
    potential,
    social_cost,
    validate_instance,
)
from .equilibrium import (
    NashResult,
    Signature,
    best_nash,
    best_response_dynamics,
    find_obeying_assignment,
    is_pure_ne,
    signature_of,
    worst_nash,
)
from .errors import *  # noqa: F401,F403
from .flow import BipartiteFlowProblem, FlowDecomposition, decompose_fractional_flow, max_flow
from .instances import (
    GraphSpec,
    coloring_scheme,
    cycle_graph,
    figure1_private_scheme,
    gen_figure1,
    gen_hardness,
    gen_random,
    gen_table1,
)
from .lpsolve import LPSpec, LPSolution, solve_lp
from .private import (
    ExplicitScheme,
    PrivateSampler,
    ReducedForm,
    check_obedience,
    check_reduced_feasibility,
    explicit_from_reduced,
    induced_reduced_form,
    sample_private,
    solve_bce_exponential,
    solve_optimal_ce,
    solve_optimal_private,
)
from .public import (
    PublicScheme,
    best_weighted_posterior,
    evaluate_public_scheme,
    full_info_scheme,
    no_info_scheme,
    per_profile_lp,
    per_signature_lp,
    solve_optimal_public,
)
from .serialization import read_instance, read_scheme, write_instance, write_scheme

__version__ = "0.1.0"


def table1_fixture_path():
    """Path of the bundled Table 1 instance document."""
    return _resources.files(__name__).joinpath("data/table1.json")
