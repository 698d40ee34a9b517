"""Radial Dirac-Coulomb channels on a B-spline Galerkin basis.

Units are hbar = m = c = 1, so the free gap is (-1, 1). For a channel with
relativistic quantum number ``kappa`` the radial operator acting on the
large/small components ``(P, Q)`` is::

    [ 1 + V           -d/dr + kappa/r ]
    [ d/dr + kappa/r  -1 + V          ]

Both components are expanded on the same spline set (no kinetic balance).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.interpolate import BSpline

from . import gap_engine as ge
from . import matrix_kernel as mk
from .errors import DegenerateSplit, InvalidConfig, InvalidQuantumNumbers, QuadratureFailure

SPLIT_TOL = 1e-8


@dataclass(frozen=True)
class PotentialTerm:
    kind: Literal["coulomb", "yukawa", "constant"]
    strength: float
    mu: float = 0.0

    def __post_init__(self):
        if self.kind not in ("coulomb", "yukawa", "constant"):
            raise InvalidConfig(f"unknown potential kind {self.kind!r}")
        if self.kind == "yukawa" and not self.mu > 0:
            raise InvalidConfig("yukawa term needs mu > 0")

    def __call__(self, r: np.ndarray) -> np.ndarray:
        if self.kind == "coulomb":
            return self.strength / r
        if self.kind == "yukawa":
            return self.strength * np.exp(-self.mu * r) / r
        return np.full_like(r, self.strength)


@dataclass(frozen=True)
class BasisConfig:
    order: int = 7
    n_intervals: int = 40
    rmax: float = 60.0
    grading: float = 1.15


@dataclass(frozen=True, eq=False)
class BSplineBasis:
    """Splines of ``order`` (degree ``order - 1``) vanishing at 0 and ``rmax``."""

    order: int
    breakpoints: np.ndarray
    knots: np.ndarray

    @property
    def nfun(self) -> int:
        return len(self.knots) - self.order - 2

    @property
    def rmax(self) -> float:
        return float(self.breakpoints[-1])

    def _spline(self, deriv: int = 0) -> BSpline:
        nb = len(self.knots) - self.order
        spl = BSpline(self.knots, np.eye(nb)[:, 1:-1], self.order - 1, extrapolate=False)
        return spl.derivative(deriv) if deriv else spl

    def evaluate(self, r, deriv: int = 0) -> np.ndarray:
        """Values (or derivatives) of all retained functions, shape ``(len(r), nfun)``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = self._spline(deriv)(r)
        return np.nan_to_num(out, nan=0.0)

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes/weights, ``order + 4`` per interval; first interval halved."""
        x, w = np.polynomial.legendre.leggauss(self.order + 4)
        bp = self.breakpoints
        edges = np.concatenate([[bp[0], 0.5 * (bp[0] + bp[1])], bp[1:]])
        a, b = edges[:-1], edges[1:]
        half = 0.5 * (b - a)
        nodes = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
        weights = half[:, None] * w[None, :]
        return nodes.ravel(), weights.ravel()


def build_basis(order: int = 7, n_intervals: int = 40, rmax: float = 60.0,
                grading_ratio: float = 1.15) -> BSplineBasis:
    if order < 2 or n_intervals < 1 or not rmax > 0 or not grading_ratio >= 1:
        raise InvalidConfig(
            f"bad basis config: order={order}, n_intervals={n_intervals}, rmax={rmax}, "
            f"grading_ratio={grading_ratio}"
        )
    i = np.arange(n_intervals + 1)
    if grading_ratio == 1.0:
        bp = rmax * i / n_intervals
    else:
        g = float(grading_ratio)
        bp = rmax * (g**i - 1.0) / (g**n_intervals - 1.0)
    bp[0], bp[-1] = 0.0, rmax
    knots = np.concatenate([np.full(order - 1, 0.0), bp, np.full(order - 1, rmax)])
    return BSplineBasis(order, bp, knots)


def default_rmax(e_guess: float) -> float:
    """``30 / sqrt(1 - E^2)`` capped at 200: covers the exponential tail of a bound state."""
    return min(30.0 / math.sqrt(max(1.0 - e_guess**2, 1e-12)), 200.0)


@dataclass(frozen=True)
class ChannelSpec:
    kappa: int
    potential: tuple[PotentialTerm, ...] = ()
    basis: BasisConfig = field(default_factory=BasisConfig)
    splitting: Literal["talman", "free_projector"] = "talman"

    def __post_init__(self):
        if int(self.kappa) != self.kappa or self.kappa == 0:
            raise InvalidConfig("kappa must be a nonzero integer")
        if self.splitting not in ("talman", "free_projector"):
            raise InvalidConfig(f"unknown splitting {self.splitting!r}")
        object.__setattr__(self, "potential", tuple(self.potential))
        attraction = -sum(t.strength for t in self.potential if t.kind == "coulomb" and t.strength < 0)
        if attraction > 1.0:
            warnings.warn(
                f"total Coulomb attraction {attraction:g} exceeds 1; outside the range where the gap "
                "eigenvalues are characterized", stacklevel=2,
            )

    def make_basis(self) -> BSplineBasis:
        b = self.basis
        return build_basis(b.order, b.n_intervals, b.rmax, b.grading)


@dataclass(frozen=True)
class ChannelMatrices:
    """Radial Galerkin matrices: overlap, potential, and the ``-d/dr + kappa/r`` coupling."""

    S: np.ndarray
    V: np.ndarray
    D: np.ndarray


def channel_matrices(kappa: int, potential: Sequence[PotentialTerm], basis: BSplineBasis) -> ChannelMatrices:
    r, w = basis.quadrature()
    b = basis.evaluate(r)
    db = basis.evaluate(r, deriv=1)
    vr = np.zeros_like(r)
    for term in potential:
        vr = vr + term(r)
    bw = b * w[:, None]
    s = bw.T @ b
    v = (bw * vr[:, None]).T @ b
    d = bw.T @ (-db + (kappa / r)[:, None] * b)
    for name, m in (("overlap", s), ("potential", v), ("coupling", d)):
        if not np.all(np.isfinite(m)):
            raise QuadratureFailure(f"non-finite {name} integral")
    return ChannelMatrices(0.5 * (s + s.T), 0.5 * (v + v.T), d)


def assemble_channel(spec: ChannelSpec, basis: BSplineBasis | None = None) -> ge.BlockOperator:
    """Talman splitting: upper block on P, lower block on Q."""
    if spec.splitting != "talman":
        raise InvalidConfig("assemble_channel handles the talman splitting; use assemble_free_projector")
    basis = spec.make_basis() if basis is None else basis
    cm = channel_matrices(spec.kappa, spec.potential, basis)
    return ge.BlockOperator(cm.S + cm.V, cm.D, -cm.S + cm.V, cm.S, cm.S)


def full_pencil(spec: ChannelSpec, basis: BSplineBasis | None = None, free: bool = False):
    """The full symmetric pencil ``(A_full, S_full)`` of the channel (``free=True`` drops V)."""
    basis = spec.make_basis() if basis is None else basis
    cm = channel_matrices(spec.kappa, () if free else spec.potential, basis)
    a = np.block([[cm.S + cm.V, cm.D], [cm.D.T, -cm.S + cm.V]])
    z = np.zeros_like(cm.S)
    s = np.block([[cm.S, z], [z, cm.S]])
    return a, s


def assemble_free_projector(spec: ChannelSpec, basis: BSplineBasis | None = None) -> ge.BlockOperator:
    """Split along the positive/negative spectral subspaces of the discrete free operator."""
    basis = spec.make_basis() if basis is None else basis
    h0, s_full = full_pencil(spec, basis, free=True)
    a_full, _ = full_pencil(spec, basis)
    eig = mk.sym_generalized_eig(h0, s_full)
    if np.any(np.abs(eig.values) < 1.0 - SPLIT_TOL):
        bad = eig.values[np.abs(eig.values) < 1.0 - SPLIT_TOL]
        raise DegenerateSplit(f"free eigenvalues inside the gap: {bad}")
    up = eig.vectors[:, eig.values > 0]
    um = eig.vectors[:, eig.values < 0]
    return ge.BlockOperator(
        up.T @ a_full @ up, up.T @ a_full @ um, um.T @ a_full @ um,
        np.eye(up.shape[1]), np.eye(um.shape[1]),
    )


def assemble(spec: ChannelSpec, basis: BSplineBasis | None = None) -> ge.BlockOperator:
    if spec.splitting == "talman":
        return assemble_channel(spec, basis)
    return assemble_free_projector(spec, basis)


def exact_energy(nu: float, kappa: int, n: int) -> float:
    """Closed-form point-nucleus Dirac-Coulomb energy (Sommerfeld), rest mass included."""
    ak = abs(kappa)
    if not (0 < nu <= ak) or kappa == 0 or n < ak or (kappa > 0 and n == ak):
        raise InvalidQuantumNumbers(f"nu={nu}, kappa={kappa}, n={n}")
    denom = n - ak + math.sqrt(kappa * kappa - nu * nu)
    if denom == 0.0:
        # nu = |kappa| ground state: the level has fallen to zero
        return 0.0
    return (1.0 + nu * nu / denom**2) ** -0.5


def exact_level(nu: float, kappa: int, k: int) -> float:
    """The k-th gap eigenvalue of the channel, i.e. principal number ``n = k + |kappa| - 1`` (``+1`` if kappa > 0)."""
    n = k + abs(kappa) - 1 + (1 if kappa > 0 else 0)
    return exact_energy(nu, kappa, n)


def coulomb_spec(nu: float, kappa: int, basis: BasisConfig | None = None,
                 splitting: str = "talman") -> ChannelSpec:
    return ChannelSpec(kappa, (PotentialTerm("coulomb", -nu),), basis or BasisConfig(), splitting)


def hardy_dirac_min(nu: float, kappa: int, basis: BasisConfig | BSplineBasis | None = None) -> float:
    """Smallest generalized eigenvalue of the Schur pair at ``E = 0`` for ``V = -nu/r``.

    This is the Galerkin restriction of a nonnegative form, so it should not
    drop below zero beyond roundoff.
    """
    if not 0 < nu <= 1:
        raise InvalidConfig("hardy_dirac_min needs 0 < nu <= 1")
    if isinstance(basis, BSplineBasis):
        spec, bobj = coulomb_spec(nu, kappa), basis
    else:
        spec = coulomb_spec(nu, kappa, basis)
        bobj = spec.make_basis()
    op = assemble_channel(spec, bobj)
    sp = ge.schur_pair(op, 0.0)
    return float(mk.sym_generalized_eig(sp.M, sp.N, subset=(0, 0)).values[0])


def lambda0_channel(spec: ChannelSpec, basis: BSplineBasis | None = None) -> float:
    return ge.lambda0(assemble(spec, basis))


def oracle_nu(spec: ChannelSpec) -> float | None:
    """Coupling ``nu`` when the potential is a single attractive Coulomb term, else None."""
    if len(spec.potential) == 1 and spec.potential[0].kind == "coulomb" and spec.potential[0].strength < 0:
        return -spec.potential[0].strength
    return None


def convergence_study(spec: ChannelSpec, k: int, sizes: Sequence[int], tol: float = 1e-12,
                      gap_edge: float = 1.0) -> list[dict]:
    """Solve for ``lambda_k`` with ``n_intervals`` taken from ``sizes``.

    Rows carry ``size, lambda, exact, error, iterations``. A basis with no gap
    eigenvalue at index k reports ``lambda`` as NaN and ``status="no_gap"``;
    one whose level sits at or above ``gap_edge`` reports ``status="beyond_gap_edge"``.
    """
    if list(sizes) != sorted(set(sizes)):
        raise InvalidConfig("sizes must be strictly increasing")
    nu = oracle_nu(spec)
    exact = None
    if nu is not None:
        try:
            exact = exact_level(nu, spec.kappa, k)
        except InvalidQuantumNumbers:
            exact = None
    rows = []
    for size in sizes:
        cfg = BasisConfig(spec.basis.order, size, spec.basis.rmax, spec.basis.grading)
        sub = ChannelSpec(spec.kappa, spec.potential, cfg, spec.splitting)
        op = assemble(sub)
        row = {"size": size, "lambda": float("nan"), "exact": exact, "error": None,
               "iterations": 0, "status": "ok"}
        try:
            tr = ge.minmax_iterate(op, k, tol=tol, gap_edge=gap_edge)
        except ge.NoGap:
            row["status"] = "no_gap"
        else:
            row.update({"lambda": tr.lam, "iterations": tr.iterations})
            if tr.beyond_gap_edge:
                row["status"] = "beyond_gap_edge"
            if exact is not None:
                row["error"] = abs(tr.lam - exact)
        rows.append(row)
    return rows
