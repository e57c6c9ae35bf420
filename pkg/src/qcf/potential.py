"""Pair potentials, the derived uniform-chain energy density, and critical radii.

A potential supplies the pair energy ``phi(r)`` together with the derivatives
``eta = phi'``, ``eta' = phi''`` and ``eta'' = phi'''``.  Everything the
quasicontinuum models need is built from these four functions.  The derived
quantities

    phi_hat(r)       = phi(r) + phi(2r)
    eta_hat(r)       = eta(r) + 2 eta(2r)
    eta_hat_prime(r) = eta'(r) + 4 eta'(2r)

are the energy per atom of an infinite uniform chain and its derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NoBracket, OrderingViolated

# Sampling window for the assumption predicates; the potential is never
# evaluated closer to the origin than this by any solver.
ASSUMPTION_EPS = 0.3
ASSUMPTION_RMAX = 3.0
ASSUMPTION_SAMPLES = 100

ROOT_XTOL = 1e-15


def _check_positive(r):
    if np.any(np.asarray(r) <= 0):
        raise DomainError(f"pair separation must be positive, got {r!r}")


class PairPotential:
    """Abstract two-body potential.

    Subclasses implement :meth:`phi`, :meth:`eta`, :meth:`eta_prime` and
    :meth:`eta_second`; all of them must accept floats and numpy arrays.
    """

    name = "abstract"
    # bracket hints used by :func:`critical_radii` when none are given
    default_brackets: dict[str, tuple[float, float]] = {}

    def phi(self, r):
        raise NotImplementedError

    def eta(self, r):
        raise NotImplementedError

    def eta_prime(self, r):
        raise NotImplementedError

    def eta_second(self, r):
        raise NotImplementedError

    def phi_hat(self, r):
        return self.phi(r) + self.phi(2 * r)

    def eta_hat(self, r):
        return self.eta(r) + 2 * self.eta(2 * r)

    def eta_hat_prime(self, r):
        return self.eta_prime(r) + 4 * self.eta_prime(2 * r)


@dataclass(frozen=True)
class LennardJones(PairPotential):
    """Normalized Lennard-Jones potential ``phi(r) = r**-12 - 2 r**-6``.

    The well minimum sits at ``r = 1`` with depth ``-1``.
    """

    name = "lennard-jones"
    default_brackets = {
        "r1": (0.9, 1.3),
        "r2": (1.0, 1.5),
        "a0": (0.9, 1.3),
        "a1": (0.9, 1.3),
    }

    def phi(self, r):
        _check_positive(r)
        return r**-12 - 2 * r**-6

    def eta(self, r):
        _check_positive(r)
        return -12 * r**-13 + 12 * r**-7

    def eta_prime(self, r):
        _check_positive(r)
        return 156 * r**-14 - 84 * r**-8

    def eta_second(self, r):
        _check_positive(r)
        return -2184 * r**-15 + 672 * r**-9


def lennard_jones() -> LennardJones:
    return LennardJones()


def eta_hat_at(p: PairPotential, r: float) -> float:
    """Uniform-chain conjugate force ``eta(r) + 2 eta(2r)``."""
    _check_positive(r)
    return p.eta_hat(r)


@dataclass(frozen=True)
class CriticalRadii:
    """Characteristic lengths of a potential.

    Attributes
    ----------
    r1 : inflection point of ``phi`` (zero of ``eta'``)
    r2 : zero of ``eta''``
    a0 : zero of ``eta_hat``; the stress-free uniform spacing
    a1 : zero of ``eta_hat'``; tensile stability limit of the local model
    """

    r1: float
    r2: float
    a0: float
    a1: float

    @property
    def half_r2(self) -> float:
        return 0.5 * self.r2


def find_root(f: Callable[[float], float], lo: float, hi: float, xtol: float = ROOT_XTOL) -> float:
    """Bracketed root of a scalar function (bisection safeguarded secant/IQI)."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NoBracket(f"no sign change on [{lo}, {hi}]: f={flo:.3g}, {fhi:.3g}")
    return brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


def _sign_pattern_ok(f, lo, hi, crossing, below, n=ASSUMPTION_SAMPLES):
    """Sampled check that ``f`` has sign ``below`` on (lo, crossing) and the
    opposite sign on (crossing, hi)."""
    left = np.linspace(lo, crossing, n + 2)[1:-1]
    right = np.linspace(crossing, hi, n + 2)[1:-1]
    return bool(np.all(below * f(left) > 0) and np.all(-below * f(right) > 0))


def check_assumptions(p: PairPotential, radii: CriticalRadii,
                      eps: float = ASSUMPTION_EPS, rmax: float = ASSUMPTION_RMAX) -> dict[str, bool]:
    """Evaluate the sign and ordering assumptions as sampled predicates."""
    r1, r2, a0, a1 = radii.r1, radii.r2, radii.a0, radii.a1
    return {
        "eta_prime_sign": _sign_pattern_ok(p.eta_prime, eps, rmax, r1, +1),
        "eta_second_sign": _sign_pattern_ok(p.eta_second, eps, rmax, r2, -1),
        "eta_hat_sign": _sign_pattern_ok(p.eta_hat, eps, rmax, a0, -1),
        "eta_hat_prime_sign": _sign_pattern_ok(p.eta_hat_prime, eps, rmax, a1, +1),
        "ordering_a4": 0 < a0 < r1 < r2 < 2 * a0,
        "ordering_a5": a0 < a1,
    }


def critical_radii(p: PairPotential, brackets: dict[str, tuple[float, float]] | None = None) -> CriticalRadii:
    """Locate r1, r2, a0 and a1 by bracketed root finding.

    ``brackets`` maps any of ``"r1", "r2", "a0", "a1"`` to an interval; missing
    entries fall back to ``p.default_brackets``.  The assumptions are checked
    eagerly and :class:`OrderingViolated` is raised if any of them fails.
    """
    hints = dict(p.default_brackets)
    hints.update(brackets or {})
    missing = {"r1", "r2", "a0", "a1"} - hints.keys()
    if missing:
        raise NoBracket(f"no bracket hint for {sorted(missing)}")

    radii = CriticalRadii(
        r1=find_root(p.eta_prime, *hints["r1"]),
        r2=find_root(p.eta_second, *hints["r2"]),
        a0=find_root(p.eta_hat, *hints["a0"]),
        a1=find_root(p.eta_hat_prime, *hints["a1"]),
    )
    failed = [k for k, ok in check_assumptions(p, radii).items() if not ok]
    if failed:
        raise OrderingViolated(f"potential {p.name!r} fails assumptions: {', '.join(failed)}")
    return radii


@lru_cache(maxsize=16)
def default_radii(p: PairPotential) -> CriticalRadii:
    """:func:`critical_radii` with default brackets, memoized per potential."""
    return critical_radii(p)
