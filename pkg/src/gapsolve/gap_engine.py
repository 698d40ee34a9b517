"""Eigenvalues in a spectral gap of a symmetric block operator.

A :class:`BlockOperator` holds the coordinate blocks of a symmetric form
``a`` split along ``F = F+ (+) F-``::

    A_full = [[App, Apm], [Apm^T, Amm]],   S_full = diag(Sp, Sm)

For a shift ``E`` above ``lambda0`` (the top of the ``(Amm, Sm)`` spectrum)
the lower block is eliminated:

    L_E = (E Sm - Amm)^-1 Apm^T              graph map F+ -> F-
    M_E = App - E Sp + Apm L_E                Schur complement, q_E in coords
    N_E = Sp + L_E^T Sm L_E                   squared norm on the graph

and the levels ``l_k(E)`` are the generalized eigenvalues of ``(M_E, N_E)``.
The k-th gap eigenvalue ``lambda_k`` is the unique zero of ``l_k``, found by
the fixed-point map ``E -> E + l_k(E)``, which converges quadratically.

All indices ``k`` are 1-based.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import matrix_kernel as mk
from .errors import (
    DimensionMismatch,
    KTooLarge,
    NoGap,
    NotPositiveDefinite,
    ShiftBelowLambda0,
    SingularShift,
)

log = logging.getLogger(__name__)

GAP_EPS = 1e-10
TOL = 1e-12
CHECK_TOL = 1e-10
MULT_TOL = 1e-8
MAXIT = 100


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """Symmetric block operator with SPD overlaps on each half of the splitting.

    ``Amm`` carries ``-b``: the pair ``(-Amm, Sm)`` is the lower-block form.
    """

    App: np.ndarray
    Apm: np.ndarray
    Amm: np.ndarray
    Sp: np.ndarray
    Sm: np.ndarray

    def __post_init__(self):
        app = mk.as_sym(self.App)
        amm = mk.as_sym(self.Amm)
        sp = mk.as_sym(self.Sp)
        sm = mk.as_sym(self.Sm)
        apm = np.asarray(self.Apm, dtype=float).reshape(app.shape[0], amm.shape[0])
        if sp.shape != app.shape or sm.shape != amm.shape:
            raise DimensionMismatch("overlap blocks do not match operator blocks")
        mk.cholesky(sp)
        mk.cholesky(sm)
        for name, arr in (("App", app), ("Apm", apm), ("Amm", amm), ("Sp", sp), ("Sm", sm)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_plus(self) -> int:
        return self.App.shape[0]

    @property
    def n_minus(self) -> int:
        return self.Amm.shape[0]

    @property
    def scale(self) -> float:
        """Magnitude used to make every tolerance relative."""
        return max(
            np.max(np.abs(self.App)), np.max(np.abs(self.Amm)),
            np.max(np.abs(self.Apm)) if self.Apm.size else 0.0, 1.0,
        )

    def full(self) -> tuple[np.ndarray, np.ndarray]:
        """Assembled ``(A_full, S_full)``."""
        a = np.block([[self.App, self.Apm], [self.Apm.T, self.Amm]])
        s = linalg.block_diag(self.Sp, self.Sm)
        return a, s


@dataclass(frozen=True)
class SchurPair:
    E: float
    M: np.ndarray
    N: np.ndarray
    L: np.ndarray


@dataclass
class SolveTrace:
    k: int
    iterates: list[tuple[float, float]] = field(default_factory=list)
    converged: bool = False
    lam: float = float("nan")
    multiplicity: int = 0
    beyond_gap_edge: bool = False
    bisection_steps: int = 0

    @property
    def iterations(self) -> int:
        return max(len(self.iterates) - 1, 0)

    @property
    def residual(self) -> float:
        return abs(self.iterates[-1][1]) if self.iterates else float("nan")

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "iterates": [{"E": e, "level": l} for e, l in self.iterates],
            "converged": self.converged,
            "lambda": self.lam,
            "multiplicity": self.multiplicity,
            "beyond_gap_edge": self.beyond_gap_edge,
            "bisection_steps": self.bisection_steps,
        }


def lambda0(op: BlockOperator) -> float:
    """Top of the lower block: largest generalized eigenvalue of ``(Amm, Sm)``."""
    n = op.n_minus
    return float(mk._geig(op.Amm, op.Sm, subset=(n - 1, n - 1), vectors=False).values[0])


def _lower_factor(op: BlockOperator, E: float) -> mk.SpdFactor:
    try:
        return mk.SpdFactor(mk._chol(E * op.Sm - op.Amm))
    except NotPositiveDefinite:
        raise ShiftBelowLambda0(f"E={E!r} is not above lambda0 of the lower block") from None


def graph_map(op: BlockOperator, E: float) -> np.ndarray:
    """``L_E = (E Sm - Amm)^-1 Apm^T`` as an ``n- x n+`` matrix."""
    return mk.solve_spd(_lower_factor(op, E), op.Apm.T)


def schur_pair(op: BlockOperator, E: float) -> SchurPair:
    E = float(E)
    lmap = graph_map(op, E)
    m = op.App - E * op.Sp + op.Apm @ lmap
    n = op.Sp + lmap.T @ op.Sm @ lmap
    m = 0.5 * (m + m.T)
    n = 0.5 * (n + n.T)
    return SchurPair(E, m, n, lmap)


def levels(op: BlockOperator, E: float, kmax: int) -> np.ndarray:
    """The ``kmax`` smallest levels ``l_1(E) <= ... <= l_kmax(E)``."""
    if kmax < 1 or kmax > op.n_plus:
        raise KTooLarge(f"kmax={kmax} outside 1..{op.n_plus}")
    sp = schur_pair(op, E)
    return mk._geig(sp.M, sp.N, subset=(0, kmax - 1), vectors=False).values


def level(op: BlockOperator, E: float, k: int) -> float:
    if k < 1 or k > op.n_plus:
        raise KTooLarge(f"k={k} outside 1..{op.n_plus}")
    sp = schur_pair(op, E)
    return float(mk._geig(sp.M, sp.N, subset=(k - 1, k - 1), vectors=False).values[0])


def default_e0(op: BlockOperator, lam0: float | None = None, gap_edge: float | None = None) -> float:
    """Starting shift: a tenth of the way into the gap, or ``lambda0 + 0.01 scale``."""
    if lam0 is None:
        lam0 = lambda0(op)
    if gap_edge is not None and gap_edge > lam0:
        return lam0 + 0.1 * (gap_edge - lam0)
    return lam0 + 0.01 * op.scale


def minmax_iterate(
    op: BlockOperator,
    k: int,
    E0: float | None = None,
    tol: float | None = None,
    maxit: int = MAXIT,
    gap_edge: float | None = None,
    mult_tol: float | None = None,
) -> SolveTrace:
    """Solve ``l_k(lambda) = 0`` by ``E <- E + l_k(E)``.

    Every evaluated shift tightens a bracket ``(lo, hi)`` with ``l_k(lo) > 0 >
    l_k(hi)``. A fixed-point step leaving the bracket (roundoff overshoot, or a
    large negative level from a start above ``lambda_k``) is replaced by a
    bisection step. ``tol`` and ``mult_tol`` default to multiples of
    ``op.scale``.
    """
    if k < 1 or k > op.n_plus:
        raise KTooLarge(f"k={k} outside 1..{op.n_plus}")
    scale = op.scale
    tol = TOL * scale if tol is None else tol
    mult_tol = MULT_TOL * scale if mult_tol is None else mult_tol
    lam0 = lambda0(op)
    floor = lam0 + GAP_EPS * scale
    if E0 is None:
        E0 = default_e0(op, lam0, gap_edge)
    if not E0 > floor:
        raise ShiftBelowLambda0(f"E0={E0!r} is not above lambda0={lam0!r}")

    trace = SolveTrace(k=k)
    lo, hi = floor, math.inf
    E = float(E0)
    for _ in range(maxit + 1):
        lk = level(op, E, k)
        trace.iterates.append((E, lk))
        if abs(lk) <= tol:
            trace.converged = True
            break
        if lk > 0:
            lo = max(lo, E)
        else:
            hi = min(hi, E)
            if lo == floor:
                lo = _search_positive(op, k, floor, E, trace)
        nxt = E + lk
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
            trace.bisection_steps += 1
        if nxt == E:
            break
        E = nxt

    trace.lam = trace.iterates[-1][0]
    if not trace.converged:
        log.warning("k=%d: no convergence after %d steps (|l_k|=%.3e)", k, maxit, trace.residual)
    kk = min(op.n_plus, k + 8)
    trace.multiplicity = multiplicity(op, trace.lam, mult_tol, kmax=kk)
    trace.beyond_gap_edge = gap_edge is not None and trace.lam > gap_edge
    return trace


def _search_positive(op, k, floor, E_hi, trace) -> float:
    """Walk down toward ``lambda0`` until ``l_k`` turns positive.

    Raises NoGap when it stays negative all the way to ``floor``: then
    ``lambda_k <= lambda0`` and the gap assumption fails at index k.
    """
    E = E_hi
    try:
        for _ in range(60):
            E = floor + 0.125 * (E - floor)
            lk = level(op, E, k)
            if lk > 0:
                return E
            if E - floor <= GAP_EPS * op.scale:
                break
        if level(op, floor, k) > 0:
            return floor
    except NotPositiveDefinite:
        # L_E blows up near lambda0 and N_E stops being numerically definite;
        # the level was still negative at the last shift that could be evaluated
        pass
    raise NoGap(f"l_{k}(E) < 0 for every tested E > lambda0; no gap eigenvalue at index {k}")


def multiplicity(op: BlockOperator, lam: float, mult_tol: float | None = None, kmax: int | None = None) -> int:
    """Number of levels ``l_j(lam)`` with ``|l_j| <= mult_tol``."""
    mult_tol = MULT_TOL * op.scale if mult_tol is None else mult_tol
    kmax = op.n_plus if kmax is None else kmax
    ls = levels(op, lam, kmax)
    return int(np.sum(np.abs(ls) <= mult_tol))


def verify_gap(op: BlockOperator, k0: int, E0: float, check_tol: float | None = None) -> bool:
    """True iff ``l_k0(E0) >= -check_tol``, which certifies ``lambda_k0 >= E0``."""
    check_tol = CHECK_TOL * op.scale if check_tol is None else check_tol
    return level(op, E0, k0) >= -check_tol


def quadratic_forms(op: BlockOperator, E: float, xp: np.ndarray, ym: np.ndarray) -> dict:
    """Evaluate the pieces of the decomposition of ``a - E ||.||^2`` at ``X = (xp, ym)``."""
    sp = schur_pair(op, E)
    full = (xp @ (op.App - E * op.Sp) @ xp + 2.0 * xp @ op.Apm @ ym
            + ym @ (op.Amm - E * op.Sm) @ ym)
    z = ym - sp.L @ xp
    q = xp @ sp.M @ xp
    b = z @ (E * op.Sm - op.Amm) @ z
    return {"form": float(full), "q": float(q), "b": float(b)}


def decomposition_residual(op: BlockOperator, E: float, trials: int = 20, seed: int = 0) -> float:
    """Max of ``|<X,(A-E)X> - q_E(x+ + L x+) + b_E(y- - L x+)|`` over random ``X``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        xp = rng.standard_normal(op.n_plus)
        ym = rng.standard_normal(op.n_minus)
        f = quadratic_forms(op, E, xp, ym)
        worst = max(worst, abs(f["form"] - f["q"] + f["b"]))
    return worst


def graph_map_identity_residual(op: BlockOperator, E: float, Eprime: float) -> float:
    """``max|L_E' - L_E - (E - E') (E' Sm - Amm)^-1 Sm L_E|``."""
    le = graph_map(op, E)
    lep = graph_map(op, Eprime)
    corr = mk.solve_spd(_lower_factor(op, Eprime), op.Sm @ le)
    return float(np.max(np.abs(lep - le - (E - Eprime) * corr)))


def resolvent_formula_residual(op: BlockOperator, E: float) -> float:
    """Compare ``(A_full - E)^-1`` with ``T_E^-1 Pi_E - (B + E)^-1 Lambda_-``.

    Requires orthonormal coordinates (``Sp = Sm = I``). ``T_E`` is built in
    the coordinates of the basis ``G = [I; L_E]`` of the graph as the
    compression of ``diag(App - E, E - Amm)``, independently of ``M_E``.
    """
    npl, nmi = op.n_plus, op.n_minus
    if not (np.allclose(op.Sp, np.eye(npl), atol=1e-13) and np.allclose(op.Sm, np.eye(nmi), atol=1e-13)):
        raise ValueError("resolvent_formula_residual needs Sp = Sm = I; call orthonormalize first")
    a_full, _ = op.full()
    dim = npl + nmi
    try:
        direct = linalg.solve(a_full - E * np.eye(dim), np.eye(dim), assume_a="sym")
    except linalg.LinAlgError:
        raise SingularShift(f"E={E!r} is an eigenvalue of the full matrix") from None
    lmap = graph_map(op, E)
    g = np.vstack([np.eye(npl), lmap])
    gram = g.T @ g
    k_op = linalg.block_diag(op.App - E * np.eye(npl), E * np.eye(nmi) - op.Amm)
    gkg = g.T @ k_op @ g
    t_coords = linalg.solve(gram, gkg)
    if np.linalg.cond(t_coords) > 1e14:
        raise SingularShift(f"T_E is singular at E={E!r}")
    # Pi_E f = G gram^-1 G^T f ; T_E^-1 (G d) = G t_coords^-1 d
    formula = g @ linalg.solve(t_coords, linalg.solve(gram, g.T))
    pm = np.vstack([np.zeros((npl, nmi)), np.eye(nmi)])
    formula -= pm @ linalg.solve(E * np.eye(nmi) - op.Amm, pm.T)
    return float(np.max(np.abs(direct - formula)))


def orthonormalize(op: BlockOperator) -> BlockOperator:
    """Congruent operator with ``Sp = Sm = I`` (blocks transformed by ``L^-1 . L^-T``)."""
    lp = mk.cholesky(op.Sp).lower
    lm = mk.cholesky(op.Sm).lower

    def congr(left, mat, right):
        tmp = linalg.solve_triangular(left, mat, lower=True)
        return linalg.solve_triangular(right, tmp.T, lower=True).T

    app = congr(lp, op.App, lp)
    amm = congr(lm, op.Amm, lm)
    apm = congr(lp, op.Apm, lm)
    return BlockOperator(
        0.5 * (app + app.T), apm, 0.5 * (amm + amm.T), np.eye(op.n_plus), np.eye(op.n_minus)
    )


def toy_laplacian_block(n: int, length: float) -> BlockOperator:
    """``diag(-Laplacian, Laplacian)`` on ``(0, length)`` with Dirichlet ends, ``n`` interior points."""
    if n < 1:
        raise ValueError("n must be >= 1")
    h = length / (n + 1)
    t = (np.diag(np.full(n, 2.0)) - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / h**2
    return BlockOperator(t, np.zeros((n, n)), -t, np.eye(n), np.eye(n))
