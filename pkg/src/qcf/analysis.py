"""Diagonal dominance, existence boxes and contraction regions.

A region is a box ``(r_L, r_U)`` of lattice spacings together with the range
of conjugate loads

    Phi_lo = eta(r_L) + 4 eta(2 r_L) - 2 eta(2 r_U)
    Phi_hi = eta(r_U) + 4 eta(2 r_U) - 2 eta(2 r_L)

for which the force-based equations have a unique solution in the box
(existence), or for which the ghost-force iteration maps the box into itself
as a contraction.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .chain import ChainGeometry
from .errors import EmptyRegion
from .potential import LennardJones, PairPotential, default_radii
from .solvers import jacobian

LJ = LennardJones()

# Next-nearest-neighbor weights in the sufficient conditions.
EXISTENCE_NNN_CONSTANT = 12  # eta'(r_U) + 12 eta'(2 r_L) >= 0
CONTRACTION_NNN_CONSTANT = 13  # eta'(r_U) + 13 eta'(2 r_L) > 0
CONTRACTION_DIAG_CONSTANT = 5  # denominator eta'(r_U) - 5 |eta'(2 r_L)|
CONTRACTION_OFFDIAG_CONSTANT = 8  # numerator 8 |eta'(2 r_L)|

# For LJ, |eta'(2r)| <= 84 / (256 r^8), which turns both conditions into
# explicit lower bounds on r_L.
LJ_NNN_BOUND = 84.0 / 256.0
LJ_EXISTENCE_COEFFICIENT = EXISTENCE_NNN_CONSTANT * LJ_NNN_BOUND  # = 63/16

EXISTENCE = "Existence12"
CONTRACTION = "Contraction13"


@dataclass(frozen=True)
class RegionCertificate:
    r_L: float
    r_U: float
    phi_lo: float
    phi_hi: float
    margin: float  # eta'(r_U) + C eta'(2 r_L) with C = 12 or 13
    theorem: str

    @property
    def symmetric_bound(self) -> float:
        """Half-width ``c`` of the largest interval ``(-c, c)`` inside ``(Phi_lo, Phi_hi)``."""
        return min(-self.phi_lo, self.phi_hi)

    def contains_box(self, lo: float, hi: float) -> bool:
        return self.r_L <= lo and hi <= self.r_U

    def to_dict(self) -> dict:
        d = asdict(self)
        d["symmetric_bound"] = self.symmetric_bound
        return d


@dataclass(frozen=True)
class ContractionEstimate:
    bound: float
    gamma: float | None = None


def phi_bounds(r_L: float, r_U: float, p: PairPotential = LJ) -> tuple[float, float]:
    lo = p.eta(r_L) + 4 * p.eta(2 * r_L) - 2 * p.eta(2 * r_U)
    hi = p.eta(r_U) + 4 * p.eta(2 * r_U) - 2 * p.eta(2 * r_L)
    return float(lo), float(hi)


def nnn_margin(r_L: float, r_U: float, constant: float, p: PairPotential = LJ) -> float:
    return float(p.eta_prime(r_U) + constant * p.eta_prime(2 * r_L))


def contraction_bound(r_L: float, r_U: float, p: PairPotential = LJ) -> float:
    """``8 |eta'(2 r_L)| / (eta'(r_U) - 5 |eta'(2 r_L)|)``; inf if the denominator is not positive."""
    s = abs(float(p.eta_prime(2 * r_L)))
    den = float(p.eta_prime(r_U)) - CONTRACTION_DIAG_CONSTANT * s
    if den <= 0:
        return float("inf")
    return CONTRACTION_OFFDIAG_CONSTANT * s / den


def diag_dominance_margin(g: ChainGeometry, r, variant: str = "Fhat", p: PairPotential = LJ) -> float:
    """``min_i (A_ii - sum_{j != i} |A_ij|)`` for ``A = D psi``; positive means dominant."""
    return matrix_margin(jacobian(g, r, variant, p))


def matrix_margin(A) -> float:
    A = np.asarray(A, dtype=float)
    d = np.diag(A)
    off = np.sum(np.abs(A), axis=1) - np.abs(d)
    return float(np.min(d - off))


def _certificate(r_L, r_U, theorem, p) -> RegionCertificate:
    lo, hi = phi_bounds(r_L, r_U, p)
    c = EXISTENCE_NNN_CONSTANT if theorem == EXISTENCE else CONTRACTION_NNN_CONSTANT
    return RegionCertificate(r_L=float(r_L), r_U=float(r_U), phi_lo=lo, phi_hi=hi,
                             margin=nnn_margin(r_L, r_U, c, p), theorem=theorem)


def _check_r_U(r_U: float, radii) -> None:
    if not radii.half_r2 < r_U < radii.a1:
        raise EmptyRegion(f"r_U={r_U} must lie in ({radii.half_r2:.6g}, {radii.a1:.6g})")


def lj_existence_lower(r_U: float, p: PairPotential = LJ) -> float:
    radii = default_radii(p)
    return max(radii.half_r2, (LJ_EXISTENCE_COEFFICIENT / p.eta_prime(r_U)) ** 0.125)


def lj_existence_region(r_U: float | None = None, p: PairPotential = LJ) -> RegionCertificate:
    """Existence box for LJ with ``r_L = max(r2/2, (63 / (16 eta'(r_U)))^(1/8))``.

    Without ``r_U`` the value maximizing the symmetric load bound is used.
    """
    radii = default_radii(p)
    if r_U is None:
        r_U = optimal_existence_r_U(p)
    _check_r_U(r_U, radii)
    r_L = lj_existence_lower(r_U, p)
    if r_L >= r_U:
        raise EmptyRegion(f"r_L={r_L:.6g} >= r_U={r_U:.6g}")
    return _certificate(r_L, r_U, EXISTENCE, p)


def lj_contraction_lower(r_U: float, gamma: float, p: PairPotential = LJ) -> float:
    radii = default_radii(p)
    coef = LJ_NNN_BOUND * (CONTRACTION_DIAG_CONSTANT + CONTRACTION_OFFDIAG_CONSTANT / gamma)
    return max(radii.half_r2, (coef / p.eta_prime(r_U)) ** 0.125)


def _best_r_U(lower, radii, p) -> float:
    """r_U maximizing the symmetric load bound for a given r_L(r_U) rule."""

    def balance(r_U):
        lo, hi = phi_bounds(lower(r_U), r_U, p)
        return hi + lo  # zero where -Phi_lo == Phi_hi

    def neg_c(r_U):
        r_L = lower(r_U)
        if r_L >= r_U:
            return np.inf
        lo, hi = phi_bounds(r_L, r_U, p)
        return -min(-lo, hi)

    grid = np.linspace(radii.half_r2, radii.a1, 2001)[1:-1]
    vals = np.array([neg_c(x) for x in grid])
    k = int(np.argmin(vals))
    if not np.isfinite(vals[k]):
        raise EmptyRegion("no admissible r_U")
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    # -Phi_lo falls and Phi_hi rises with r_U, so the optimum is where they balance
    fa, fb = balance(a), balance(b)
    if np.sign(fa) != np.sign(fb) and np.isfinite(neg_c(a)) and np.isfinite(neg_c(b)):
        return float(brentq(balance, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    res = minimize_scalar(neg_c, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
    return float(res.x)


def optimal_existence_r_U(p: PairPotential = LJ) -> float:
    radii = default_radii(p)
    return _best_r_U(lambda u: lj_existence_lower(u, p), radii, p)


def lj_contraction_region(gamma: float, r_U: float | None = None,
                          p: PairPotential = LJ) -> tuple[RegionCertificate, ContractionEstimate]:
    """Contraction box for the ghost-force iteration with bound at most ``gamma``.

    ``r_L`` follows from ``eta'(r_U) >= (5 + 8/gamma) |eta'(2 r_L)|`` with the
    LJ estimate ``|eta'(2 r)| <= 84 / (256 r^8)``.  Without ``r_U`` the value
    maximizing the symmetric load bound is used.
    """
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    radii = default_radii(p)
    if r_U is None:
        r_U = _best_r_U(lambda u: lj_contraction_lower(u, gamma, p), radii, p)
    _check_r_U(r_U, radii)
    r_L = lj_contraction_lower(r_U, gamma, p)
    if r_L >= r_U:
        raise EmptyRegion(f"r_L={r_L:.6g} >= r_U={r_U:.6g}")
    cert = _certificate(r_L, r_U, CONTRACTION, p)
    return cert, ContractionEstimate(bound=contraction_bound(r_L, r_U, p), gamma=gamma)


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    margin: float


def verify_certificate(g: ChainGeometry | None, cert: RegionCertificate, Phi=None,
                       p: PairPotential = LJ) -> list[HypothesisCheck]:
    """Check every hypothesis of the certificate numerically, with margins.

    ``g`` is accepted for symmetry with the other operations; the hypotheses
    do not depend on the geometry beyond the length of ``Phi``.
    """
    radii = default_radii(p)
    checks = [
        HypothesisCheck("r_L > r2/2", cert.r_L > radii.half_r2, cert.r_L - radii.half_r2),
        HypothesisCheck("r_L < r_U", cert.r_L < cert.r_U, cert.r_U - cert.r_L),
    ]
    m12 = nnn_margin(cert.r_L, cert.r_U, EXISTENCE_NNN_CONSTANT, p)
    checks.append(HypothesisCheck("eta'(r_U) + 12 eta'(2 r_L) >= 0", m12 >= 0, m12))
    if cert.theorem == CONTRACTION:
        m13 = nnn_margin(cert.r_L, cert.r_U, CONTRACTION_NNN_CONSTANT, p)
        checks.append(HypothesisCheck("eta'(r_U) + 13 eta'(2 r_L) > 0", m13 > 0, m13))
    lo, hi = phi_bounds(cert.r_L, cert.r_U, p)
    checks.append(HypothesisCheck("Phi_lo < Phi_hi", lo < hi, hi - lo))
    if Phi is not None:
        Phi = np.asarray(Phi, dtype=float)
        if g is not None and Phi.shape != (g.n_strain,):
            raise ValueError(f"Phi must have length {g.n_strain}")
        checks.append(HypothesisCheck("Phi > Phi_lo", bool(np.all(Phi > lo)), float(np.min(Phi) - lo)))
        checks.append(HypothesisCheck("Phi < Phi_hi", bool(np.all(Phi < hi)), float(hi - np.max(Phi))))
    return checks


def all_passed(checks) -> bool:
    return all(c.passed for c in checks)


def region_sweep(kind: str, r_U_values, gamma: float = 0.5, p: PairPotential = LJ) -> list[dict]:
    """One row per ``r_U``; empty regions are flagged rather than raised."""
    rows = []
    for r_U in r_U_values:
        row = {"r_U": float(r_U), "r_L": float("nan"), "phi_lo": float("nan"),
               "phi_hi": float("nan"), "bound": float("nan"), "empty": False}
        try:
            if kind == "existence":
                cert = lj_existence_region(r_U, p)
            elif kind == "contraction":
                cert, _ = lj_contraction_region(gamma, r_U, p)
            else:
                raise ValueError(f"unknown region kind {kind!r}")
        except EmptyRegion:
            row["empty"] = True
        else:
            row.update(r_L=cert.r_L, phi_lo=cert.phi_lo, phi_hi=cert.phi_hi,
                       bound=contraction_bound(cert.r_L, cert.r_U, p))
        rows.append(row)
    return rows


def boundary_exclusion(g: ChainGeometry, cert: RegionCertificate, Phi, rng, n_points: int = 200,
                       ts=(0.0, 0.25, 0.5, 0.75, 1.0), p: PairPotential = LJ) -> float:
    """Smallest signed face value of the homotopy on sampled boundary points.

    For each sample one coordinate is pinned at ``r_U`` (or ``r_L``) and the
    rest are drawn from the box; the returned value is the minimum of
    ``h_j`` on upper faces and ``-h_j`` on lower faces, which is positive when
    the boundary is excluded.
    """
    from .solvers import homotopy_residual

    worst = np.inf
    n = g.n_strain
    for k in range(n_points):
        r = rng.uniform(cert.r_L, cert.r_U, size=n)
        j = int(rng.integers(n))
        upper = bool(k % 2)
        r[j] = cert.r_U if upper else cert.r_L
        for t in ts:
            h = homotopy_residual(g, r, t, Phi, p)[j]
            worst = min(worst, h if upper else -h)
    return float(worst)
