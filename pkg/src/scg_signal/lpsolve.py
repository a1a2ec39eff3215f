"""Uniform linear-program interface.

Two interchangeable backends sit behind :func:`solve_lp`:

* ``"highs"`` -- scipy's HiGHS dual simplex, float arithmetic, sparse input;
* ``"exact"`` -- a dense two-phase simplex over :class:`~fractions.Fraction`
  with Bland's rule.  Slow, but its answers are exact, which makes it the
  second opinion for every LP built in this package.

All problems are minimisations::

    min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x_j >= 0 for j in nonneg
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import NumericalFailure

FEASIBILITY_TOL = 1e-7
_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LPSpec:
    """A minimisation LP.  Matrices may be dense arrays, scipy sparse matrices
    or (for the exact backend) nested lists of rationals.  ``nonneg`` defaults
    to all variables non-negative."""

    c: object
    A_ub: object = None
    b_ub: object = None
    A_eq: object = None
    b_eq: object = None
    nonneg: object = None

    @property
    def num_vars(self) -> int:
        return len(self.c)

    def nonneg_mask(self) -> np.ndarray:
        if self.nonneg is None:
            return np.ones(self.num_vars, dtype=bool)
        return np.asarray(self.nonneg, dtype=bool)


@dataclass
class LPSolution:
    status: Status
    x: object = None
    objective: object = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class LPBuilder:
    """Accumulates sparse rows; builds a CSR-backed spec for HiGHS or a dense
    rational spec for the exact backend."""

    def __init__(self, num_vars: int, exact: bool = False):
        self.num_vars = num_vars
        self.exact = exact
        zero = Fraction(0) if exact else 0.0
        self.c = [zero] * num_vars
        self._ub, self._b_ub = [], []
        self._eq, self._b_eq = [], []
        self.nonneg = None

    def add_ub(self, coeffs: dict, rhs=0):
        self._ub.append(coeffs)
        self._b_ub.append(rhs)

    def add_eq(self, coeffs: dict, rhs=0):
        self._eq.append(coeffs)
        self._b_eq.append(rhs)

    def _matrix(self, rows):
        if not rows:
            return None
        if self.exact:
            dense = [[Fraction(0)] * self.num_vars for _ in rows]
            for k, coeffs in enumerate(rows):
                for j, v in coeffs.items():
                    dense[k][j] += v
            return dense
        data, ri, ci = [], [], []
        for k, coeffs in enumerate(rows):
            for j, v in coeffs.items():
                if v:
                    data.append(float(v))
                    ri.append(k)
                    ci.append(j)
        return sp.csr_matrix((data, (ri, ci)), shape=(len(rows), self.num_vars))

    def build(self) -> LPSpec:
        conv = _to_fraction if self.exact else float
        return LPSpec(
            c=[conv(v) for v in self.c],
            A_ub=self._matrix(self._ub), b_ub=[conv(v) for v in self._b_ub] or None,
            A_eq=self._matrix(self._eq), b_eq=[conv(v) for v in self._b_eq] or None,
            nonneg=self.nonneg,
        )


def _rows(matrix):
    if matrix is None:
        return 0
    return matrix.shape[0] if hasattr(matrix, "shape") else len(matrix)


def _check_dims(spec: LPSpec):
    n = spec.num_vars
    for name, A, b in (("ub", spec.A_ub, spec.b_ub), ("eq", spec.A_eq, spec.b_eq)):
        if A is None:
            continue
        ncols = A.shape[1] if hasattr(A, "shape") else (len(A[0]) if len(A) else n)
        if ncols != n or _rows(A) != len(b):
            raise ValueError(f"A_{name} has inconsistent dimensions")
    if spec.nonneg is not None and len(spec.nonneg) != n:
        raise ValueError("nonneg mask length differs from the variable count")


def max_residual(spec: LPSpec, x) -> float:
    """Largest constraint violation of ``x``, computed independently of any
    backend."""
    x = np.asarray([float(v) for v in x])
    worst = 0.0
    if spec.A_ub is not None and _rows(spec.A_ub):
        A = spec.A_ub if sp.issparse(spec.A_ub) else np.asarray(spec.A_ub, dtype=float)
        worst = max(worst, float(np.max(A @ x - np.asarray(spec.b_ub, dtype=float), initial=0.0)))
    if spec.A_eq is not None and _rows(spec.A_eq):
        A = spec.A_eq if sp.issparse(spec.A_eq) else np.asarray(spec.A_eq, dtype=float)
        worst = max(worst, float(np.max(np.abs(A @ x - np.asarray(spec.b_eq, dtype=float)), initial=0.0)))
    mask = spec.nonneg_mask()
    if mask.any():
        worst = max(worst, float(np.max(-x[mask], initial=0.0)))
    return worst


def solve_lp(spec: LPSpec, backend: str = "highs") -> LPSolution:
    """Solve ``spec``; raises :class:`NumericalFailure` rather than returning
    an unreliable optimum."""
    _check_dims(spec)
    if backend == "highs":
        sol = _solve_highs(spec)
    elif backend == "exact":
        sol = _solve_exact(spec)
    else:
        raise ValueError(f"unknown LP backend {backend!r}")
    if sol.optimal:
        resid = max_residual(spec, sol.x)
        if resid > FEASIBILITY_TOL:
            raise NumericalFailure(f"{backend} returned a point violating constraints by {resid:.3g}")
    return sol


def _solve_highs(spec: LPSpec) -> LPSolution:
    mask = spec.nonneg_mask()
    bounds = [(0, None) if m else (None, None) for m in mask]

    def mat(A):
        if A is None or _rows(A) == 0:
            return None
        return A if sp.issparse(A) else np.asarray(A, dtype=float)

    def vec(b):
        return None if b is None or len(b) == 0 else np.asarray(b, dtype=float)

    res = linprog(
        np.asarray(spec.c, dtype=float),
        A_ub=mat(spec.A_ub), b_ub=vec(spec.b_ub),
        A_eq=mat(spec.A_eq), b_eq=vec(spec.b_eq),
        bounds=bounds, method="highs-ds", options=_HIGHS_OPTIONS,
    )
    if res.status == 0:
        return LPSolution(Status.OPTIMAL, np.asarray(res.x), float(res.fun))
    if res.status == 2:
        return LPSolution(Status.INFEASIBLE)
    if res.status == 3:
        return LPSolution(Status.UNBOUNDED)
    raise NumericalFailure(f"HiGHS stopped with status {res.status}: {res.message}")


# -- exact backend -----------------------------------------------------------

def _dense_fraction_rows(A, n):
    if A is None:
        return []
    if sp.issparse(A):
        A = A.toarray()
    out = []
    for row in A:
        out.append([_to_fraction(v) for v in row])
        if len(out[-1]) != n:
            raise ValueError("row length mismatch")
    return out


def _to_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    # shortest round-tripping decimal, so 0.1 becomes 1/10
    return Fraction(repr(float(v)))


def _solve_exact(spec: LPSpec) -> LPSolution:
    n = spec.num_vars
    c = [_to_fraction(v) for v in spec.c]
    ub = _dense_fraction_rows(spec.A_ub, n)
    eq = _dense_fraction_rows(spec.A_eq, n)
    b_ub = [_to_fraction(v) for v in (spec.b_ub if spec.b_ub is not None else [])]
    b_eq = [_to_fraction(v) for v in (spec.b_eq if spec.b_eq is not None else [])]
    mask = spec.nonneg_mask()

    # column map: each free variable becomes x+ - x-
    cols = []
    for j in range(n):
        cols.append((j, 1))
        if not mask[j]:
            cols.append((j, -1))
    n_struct = len(cols)
    n_slack = len(ub)
    width = n_struct + n_slack

    rows, rhs = [], []
    for k, row in enumerate(ub):
        r = [row[j] * s for j, s in cols] + [Fraction(0)] * n_slack
        r[n_struct + k] = Fraction(1)
        rows.append(r)
        rhs.append(b_ub[k])
    for k, row in enumerate(eq):
        rows.append([row[j] * s for j, s in cols] + [Fraction(0)] * n_slack)
        rhs.append(b_eq[k])
    cost = [c[j] * s for j, s in cols] + [Fraction(0)] * n_slack

    status, z = _two_phase(rows, rhs, cost, width)
    if status is not Status.OPTIMAL:
        return LPSolution(status)
    x = [Fraction(0)] * n
    for (j, s), v in zip(cols, z[:n_struct]):
        x[j] += s * v
    obj = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPSolution(Status.OPTIMAL, x, obj)


def _two_phase(rows, rhs, cost, width):
    """min cost.z s.t. rows z = rhs, z >= 0 over Fractions."""
    m = len(rows)
    rows = [list(r) for r in rows]
    rhs = list(rhs)
    for k in range(m):
        if rhs[k] < 0:
            rows[k] = [-v for v in rows[k]]
            rhs[k] = -rhs[k]

    # phase 1: artificial per row
    T = [rows[k] + [Fraction(int(j == k)) for j in range(m)] + [rhs[k]] for k in range(m)]
    basis = [width + k for k in range(m)]
    total = width + m
    phase1 = [Fraction(0)] * width + [Fraction(1)] * m
    _simplex(T, basis, phase1, total)
    infeas = sum((T[k][-1] for k in range(m) if basis[k] >= width), Fraction(0))
    if infeas > 0:
        return Status.INFEASIBLE, None

    # drive remaining (zero-valued) artificials out of the basis
    keep = []
    for k in range(m):
        if basis[k] >= width:
            pivot_col = next((j for j in range(width) if T[k][j] != 0), None)
            if pivot_col is None:
                continue  # redundant row
            _pivot(T, k, pivot_col)
            basis[k] = pivot_col
        keep.append(k)
    T = [T[k][:width] + [T[k][-1]] for k in keep]
    basis = [basis[k] for k in keep]

    status = _simplex(T, basis, cost, width)
    if status is Status.UNBOUNDED:
        return status, None
    z = [Fraction(0)] * width
    for k, j in enumerate(basis):
        z[j] = T[k][-1]
    return Status.OPTIMAL, z


def _pivot(T, r, c):
    piv = T[r][c]
    if piv != 1:
        T[r] = [v / piv for v in T[r]]
    row = T[r]
    for k in range(len(T)):
        if k != r and T[k][c] != 0:
            f = T[k][c]
            T[k] = [a - f * b for a, b in zip(T[k], row)]


def _simplex(T, basis, cost, ncols):
    """Bland's-rule primal simplex on tableau ``T`` (last column = rhs)."""
    m = len(T)
    while True:
        # reduced costs: cost_j - c_B . column_j
        cb = [cost[b] for b in basis]
        enter = None
        for j in range(ncols):
            if j in basis:
                continue
            d = cost[j] - sum((cb[k] * T[k][j] for k in range(m) if T[k][j]), Fraction(0))
            if d < 0:
                enter = j
                break
        if enter is None:
            return Status.OPTIMAL
        leave, best = None, None
        for k in range(m):
            a = T[k][enter]
            if a > 0:
                ratio = T[k][-1] / a
                if best is None or ratio < best or (ratio == best and basis[k] < basis[leave]):
                    leave, best = k, ratio
        if leave is None:
            return Status.UNBOUNDED
        _pivot(T, leave, enter)
        basis[leave] = enter
