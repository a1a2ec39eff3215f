"""Instance generators: the paper's fixtures, the coloring hardness
construction with its color-revealing scheme, and seeded random families."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import Instance, as_number, make_instance
from .errors import ClassSizeMismatch, GraphInvariantViolated, InvalidParams, NonIntegerAgentCount
from .public import PublicScheme, scheme_from_emissions, validate_public_scheme

TABLE1_COSTS = (
    ((1, 1, 10), (9, 10, 10)),
    ((1, 1, 4), (5, 5, 10)),
)


def gen_table1(prior=(Fraction(1, 2), Fraction(1, 2))) -> Instance:
    """Three agents, two resources, two states with the Table 1 cost rows."""
    return make_instance(3, TABLE1_COSTS, prior, resources=("r1", "r2"),
                         state_names=("theta1", "theta2"), name="table1")


def gen_figure1(N: int = 5, eps=Fraction(1, 100), H=2) -> Instance:
    """The introduction's three-road example.

    The good road of each state is free until all N agents use it (cost 1 at
    N); in the other state it costs ``H`` flat.  The safe road costs
    ``1 + eps`` in both states.
    """
    if not isinstance(N, int) or N < 2:
        raise InvalidParams(f"figure1 needs an integer N >= 2, got {N!r}")
    eps, H = as_number(eps), as_number(H)
    if eps <= 0:
        raise InvalidParams(f"eps must be positive, got {eps}")
    if H < 2:
        raise InvalidParams(f"wrong-state cost H must be at least 2, got {H}")
    good = tuple([0] * (N - 1) + [1])
    flat = tuple([H] * N)
    safe = tuple([1 + eps] * N)
    costs = ((good, flat, safe), (flat, good, safe))
    return make_instance(N, costs, (Fraction(1, 2), Fraction(1, 2)),
                         resources=("top", "bottom", "safe"),
                         state_names=("top_good", "bottom_good"), name=f"figure1_N{N}")


def figure1_private_scheme(inst: Instance) -> list:
    """Explicit private scheme for :func:`gen_figure1`: one uniformly chosen
    agent is told nothing and sent to the safe road, everybody else learns
    the state and takes the good road.

    Returned as ``scheme[theta] = [(profile, prob), ...]``.
    """
    N = inst.num_agents
    out = []
    for good in (0, 1):
        out.append([
            (tuple(2 if i == j else good for i in range(N)), Fraction(1, N))
            for j in range(N)
        ])
    return out


@dataclass(frozen=True)
class GraphSpec:
    """Simple undirected graph on vertices ``0..num_vertices-1``."""

    num_vertices: int
    edges: tuple
    coloring: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(
            (min(u, v), max(u, v)) for u, v in self.edges)))
        if self.coloring is not None:
            object.__setattr__(self, "coloring", tuple(self.coloring))

    def neighbors(self, v: int) -> set:
        return {b if a == v else a for a, b in self.edges if v in (a, b)}

    @classmethod
    def from_edge_list(cls, text: str) -> "GraphSpec":
        """Parse ``u v`` lines; an optional ``n <count>`` line fixes the vertex
        count (otherwise max index + 1).  ``#`` starts a comment."""
        edges, count = [], None
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "n":
                count = int(parts[1])
            else:
                edges.append((int(parts[0]), int(parts[1])))
        if count is None:
            count = 1 + max((max(e) for e in edges), default=-1)
        return cls(count, tuple(edges))


def cycle_graph(n: int) -> GraphSpec:
    return GraphSpec(n, tuple((v, (v + 1) % n) for v in range(n)))


def validate_graph(graph: GraphSpec) -> None:
    R = graph.num_vertices
    if R < 1:
        raise GraphInvariantViolated("graph has no vertices")
    seen = set()
    for u, v in graph.edges:
        if not (0 <= u < R and 0 <= v < R):
            raise GraphInvariantViolated(f"edge ({u}, {v}) leaves the vertex range")
        if u == v:
            raise GraphInvariantViolated(f"self-loop at vertex {u}")
        if (u, v) in seen:
            raise GraphInvariantViolated(f"duplicate edge ({u}, {v})")
        seen.add((u, v))
    for v in range(R):
        if R > 1 and len(graph.neighbors(v)) == R - 1:
            raise GraphInvariantViolated(f"vertex {v} is adjacent to every other vertex")
    if graph.coloring is not None:
        if len(graph.coloring) != R:
            raise GraphInvariantViolated("coloring must give one entry per vertex")
        for u, v in graph.edges:
            if graph.coloring[u] is not None and graph.coloring[u] == graph.coloring[v]:
                raise GraphInvariantViolated(f"edge ({u}, {v}) joins two vertices of color {graph.coloring[u]}")


def gen_hardness(graph: GraphSpec, q: int, k: int = 1, eps=0) -> Instance:
    """Public-signaling hardness instance built from ``graph``.

    Resource 0 is the backup (cost 1); resource ``v + 1`` is vertex ``v``.  In
    state ``theta`` (a vertex) the resource of ``theta`` is good with cost
    1 - 1/n^2, its neighbours are bad (cost 3), all others normal (cost 1).
    There are N = (1 - eps) R / q agents.  ``k`` only parameterises the
    coloring gap of the source problem and does not enter the costs.
    """
    validate_graph(graph)
    if q < 1 or k < 1:
        raise InvalidParams(f"q and k must be positive, got q={q}, k={k}")
    R = graph.num_vertices
    eps = Fraction(repr(eps)) if isinstance(eps, float) else as_number(eps)
    N = (1 - eps) * R / q
    if N.denominator != 1 or N < 1:
        raise NonIntegerAgentCount(f"(1 - eps) R / q = {N} is not a positive integer")
    N = int(N)
    good = tuple(1 - Fraction(1, n * n) for n in range(1, N + 1))
    costs = []
    for theta in range(R):
        adj = graph.neighbors(theta)
        table = [(Fraction(1),) * N]
        for v in range(R):
            if v == theta:
                table.append(good)
            elif v in adj:
                table.append((Fraction(3),) * N)
            else:
                table.append((Fraction(1),) * N)
        costs.append(tuple(table))
    prior = tuple(Fraction(1, R) for _ in range(R))
    return make_instance(
        N, costs, prior,
        resources=("backup",) + tuple(f"v{v}" for v in range(R)),
        state_names=tuple(f"v{v}" for v in range(R)),
        name=f"hardness_R{R}_q{q}",
    )


def coloring_scheme(inst: Instance, graph: GraphSpec, coloring: Sequence) -> PublicScheme:
    """Signal the color of the realized vertex (signal 0 for uncolored ones).

    ``coloring[v]`` is a color in ``1..q`` or ``None``.  Every color class
    must hold exactly N vertices; the empty signal 0 is omitted when every
    vertex is colored.
    """
    R, N = graph.num_vertices, inst.num_agents
    if len(coloring) != R or inst.num_states != R:
        raise ClassSizeMismatch("coloring and instance disagree on the vertex count")
    validate_graph(GraphSpec(R, graph.edges, tuple(coloring)))
    colors = sorted({c for c in coloring if c is not None})
    for c in colors:
        size = sum(1 for v in coloring if v == c)
        if size != N:
            raise ClassSizeMismatch(f"color class {c} has {size} vertices, expected N = {N}")
    labels = ([None] if any(c is None for c in coloring) else []) + colors
    emissions = [
        tuple(Fraction(int(coloring[t] == lab)) for t in range(R)) for lab in labels
    ]
    scheme = scheme_from_emissions(inst, emissions)
    validate_public_scheme(inst, scheme)
    return scheme


def gen_random(N: int, R: int, num_states: int, seed: int, asymmetric: bool = False,
               max_cost: int = 10) -> Instance:
    """Seeded random instance with sorted integer costs in ``[0, max_cost]``
    and a Dirichlet(1) prior rounded to a rational with denominator 1000."""
    for label, v in (("N", N), ("R", R), ("num_states", num_states)):
        if not isinstance(v, int) or v < 1:
            raise InvalidParams(f"{label} must be a positive integer, got {v!r}")
    rng = np.random.default_rng(seed)
    costs = [
        [tuple(int(c) for c in np.sort(rng.integers(0, max_cost + 1, size=N))) for _ in range(R)]
        for _ in range(num_states)
    ]
    prior = _rational_simplex_point(rng.dirichlet(np.ones(num_states)), 1000)
    if asymmetric:
        action_sets = []
        for _ in range(N):
            mask = rng.random(R) < 0.6
            if not mask.any():
                mask[rng.integers(R)] = True
            action_sets.append(tuple(int(r) for r in np.flatnonzero(mask)))
    else:
        action_sets = None
    return make_instance(N, costs, prior, action_sets=action_sets,
                         name=f"random_N{N}_R{R}_S{num_states}_seed{seed}")


def _rational_simplex_point(p, denom: int) -> tuple:
    """Round ``p`` to positive multiples of ``1/denom`` summing exactly to 1."""
    k = len(p)
    units = np.maximum(1, np.floor(np.asarray(p) * (denom - k)).astype(int) + 1)
    units[int(np.argmax(units))] += denom - int(units.sum())
    return tuple(Fraction(int(u), denom) for u in units)
