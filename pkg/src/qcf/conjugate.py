"""Forces conjugate to the interval lengths ``R_j = nu_j r_j``.

``psi_j`` is the running sum of representative-atom forces from the left end,
so the equilibrium equations ``F_j + f_j = 0`` become ``psi_j = Phi_j``.
Sign convention: ``psi`` is the negative of the usual conjugate force (it is
``+dE/dR_j`` for the conservative models).

Each conjugate force is stored for ``j = -N..N`` together with the top value
``psi_{N+1}``; ``psi_{-N-1} = 0`` always.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._terms import TermTable
from .chain import ChainGeometry, check_strain
from .potential import LennardJones, PairPotential

LJ = LennardJones()

VARIANTS = ("E", "F", "Fhat", "G", "Ghat", "L")


@dataclass(frozen=True)
class ConjugateForce:
    values: np.ndarray  # psi_j, j = -N..N
    top: float  # psi_{N+1}
    variant: str

    def extended(self) -> np.ndarray:
        """``psi_{-N-1}..psi_{N+1}`` including both boundary values."""
        return np.concatenate(([0.0], self.values, [self.top]))

    def differences(self) -> np.ndarray:
        """``psi_j - psi_{j-1}`` for ``j = -N..N+1``: the z-space forces."""
        return np.diff(self.extended())


def _atomistic_conjugate(t: TermTable, row: int, j: int, left=1.0, right=1.0) -> None:
    """``eta(r_j) + left*eta(r_j + r_{j-1}) + right*eta(r_j + r_{j+1})``."""
    t.eta(row, 1, j)
    t.eta2(row, left, j, j - 1)
    t.eta2(row, right, j, j + 1)


def _bracket(t: TermTable, row: int, sign: float, m: int) -> None:
    """Nonlocal interface term ``2 eta(2 r_m) - eta(r_m + r_{m-1}) - eta(r_m + r_{m+1})``."""
    t.eta2(row, 2 * sign, m, m)
    t.eta2(row, -sign, m, m - 1)
    t.eta2(row, -sign, m, m + 1)


@lru_cache(maxsize=64)
def psi_e_table(N: int, K: int) -> TermTable:
    t = TermTable(N, -N, N + 1)
    for j in range(-N, N + 1):
        if j <= -K - 2:
            t.eta_hat(j, 1, j)
        elif j == -K - 1:
            t.eta_hat(j, 1, j)
            t.eta2(j, 0.5, j, j + 1)
        elif j == -K:
            _atomistic_conjugate(t, j, j, 0.5, 0.5)
            t.eta2(j, 1, j, j)
        elif j == -K + 1:
            _atomistic_conjugate(t, j, j, 0.5, 1.0)
        elif j <= K - 2:
            _atomistic_conjugate(t, j, j)
        elif j == K - 1:
            _atomistic_conjugate(t, j, j, 1.0, 0.5)
        elif j == K:
            _atomistic_conjugate(t, j, j, 0.5, 0.5)
            t.eta2(j, 1, j, j)
        elif j == K + 1:
            t.eta_hat(j, 1, j)
            t.eta2(j, 0.5, j, j - 1)
        else:
            t.eta_hat(j, 1, j)
    return t.freeze()


@lru_cache(maxsize=64)
def psi_f_table(N: int, K: int) -> TermTable:
    t = TermTable(N, -N, N + 1)
    for j in range(-N, N + 2):
        if j <= -K:
            t.eta_hat(j, 1, j)
        elif j <= K:
            _atomistic_conjugate(t, j, j)
            _bracket(t, j, +1, -K)
        elif j <= N:
            t.eta_hat(j, 1, j)
            _bracket(t, j, +1, -K)
            _bracket(t, j, -1, K)
        else:
            _bracket(t, j, +1, -K)
            _bracket(t, j, -1, K)
    return t.freeze()


@lru_cache(maxsize=64)
def psi_f_hat_table(N: int, K: int) -> TermTable:
    t = TermTable(N, -N, N + 1)
    for j in range(-N, N + 1):
        if -K + 1 <= j <= K - 1:
            _atomistic_conjugate(t, j, j)
            _bracket(t, j, +1, K)
        else:
            t.eta_hat(j, 1, j)
    return t.freeze()


@lru_cache(maxsize=64)
def psi_g_hat_table(N: int, K: int) -> TermTable:
    """Nonlocal part ``psi_hat^F - psi^E``, row by row."""
    t = TermTable(N, -N, N + 1)
    t.eta2(-K - 1, -0.5, -K, -K - 1)

    t.eta2(-K, 1, -K, -K)
    t.eta2(-K, -0.5, -K, -K + 1)
    t.eta2(-K, -0.5, -K, -K - 1)

    # Uses the right-interface bracket, so the identity psi_hat^F = psi^E + psi_hat^G
    # holds for every r, not only when the two interface brackets agree.
    _bracket(t, -K + 1, +1, K)
    t.eta2(-K + 1, 0.5, -K, -K + 1)

    for j in range(-K + 2, K - 1):
        _bracket(t, j, +1, K)

    t.eta2(K - 1, 2, K, K)
    t.eta2(K - 1, -0.5, K, K - 1)
    t.eta2(K - 1, -1, K, K + 1)

    t.eta2(K, 1, K, K)
    t.eta2(K, -0.5, K, K - 1)
    t.eta2(K, -0.5, K, K + 1)

    t.eta2(K + 1, -0.5, K, K + 1)
    return t.freeze()


@lru_cache(maxsize=64)
def psi_local_table(N: int) -> TermTable:
    t = TermTable(N, -N, N + 1)
    for j in range(-N, N + 1):
        t.eta_hat(j, 1, j)
    return t.freeze()


def _wrap(table: TermTable, p: PairPotential, r: np.ndarray, variant: str) -> ConjugateForce:
    v = table.evaluate(p.eta, r)
    return ConjugateForce(values=v[:-1], top=float(v[-1]), variant=variant)


def psi_e(g: ChainGeometry, r, p: PairPotential = LJ) -> ConjugateForce:
    """Conjugate force of the energy-based QC model (``dE^QC/dR_j``)."""
    r = check_strain(g, r)
    return _wrap(psi_e_table(g.N, g.K), p, r, "E")


def psi_f(g: ChainGeometry, r, p: PairPotential = LJ) -> ConjugateForce:
    """Running sums of the force-based QC forces; ``top`` is the QCF resultant."""
    r = check_strain(g, r)
    return _wrap(psi_f_table(g.N, g.K), p, r, "F")


def psi_f_hat(g: ChainGeometry, r, p: PairPotential = LJ) -> ConjugateForce:
    """Symmetric form of :func:`psi_f`, equal to it whenever the resultant vanishes."""
    r = check_strain(g, r)
    return _wrap(psi_f_hat_table(g.N, g.K), p, r, "Fhat")


def psi_g(g: ChainGeometry, r, p: PairPotential = LJ) -> ConjugateForce:
    """Running sums of the ghost-force correction (``psi^F - psi^E``)."""
    f, e = psi_f(g, r, p), psi_e(g, r, p)
    return ConjugateForce(values=f.values - e.values, top=f.top - e.top, variant="G")


def psi_g_hat(g: ChainGeometry, r, p: PairPotential = LJ) -> ConjugateForce:
    r = check_strain(g, r)
    return _wrap(psi_g_hat_table(g.N, g.K), p, r, "Ghat")


def psi_local(g: ChainGeometry, r, p: PairPotential = LJ) -> ConjugateForce:
    """Decoupled local model ``eta_hat(r_j)``."""
    r = check_strain(g, r)
    return _wrap(psi_local_table(g.N), p, r, "L")


def interface_bracket(r, m: int, N: int, p: PairPotential = LJ) -> float:
    """``2 eta(2 r_m) - eta(r_m + r_{m-1}) - eta(r_m + r_{m+1})``."""
    r = np.asarray(r, dtype=float)
    rm, rl, rr = r[m + N], r[m - 1 + N], r[m + 1 + N]
    return float(2 * p.eta(2 * rm) - p.eta(rm + rl) - p.eta(rm + rr))


def check_no_resultant(g: ChainGeometry, r, p: PairPotential = LJ) -> float:
    """Net QCF force ``sum_j F^QCF_j = psi^F_{N+1}``; zero e.g. for symmetric r."""
    return psi_f(g, r, p).top


def table_for(g: ChainGeometry, variant: str) -> TermTable:
    N, K = g.N, g.K
    tables = {
        "E": lambda: psi_e_table(N, K),
        "F": lambda: psi_f_table(N, K),
        "Fhat": lambda: psi_f_hat_table(N, K),
        "Ghat": lambda: psi_g_hat_table(N, K),
        "L": lambda: psi_local_table(N),
    }
    if variant not in tables:
        raise ValueError(f"unknown conjugate variant {variant!r}; expected one of {sorted(tables)}")
    return tables[variant]()


def evaluate(g: ChainGeometry, r, variant: str, p: PairPotential = LJ) -> np.ndarray:
    """``psi_{-N..N}`` of the given variant as a plain array."""
    r = check_strain(g, r)
    return table_for(g, variant).evaluate(p.eta, r)[:-1]


def is_symmetric(v, tol: float = 0.0) -> bool:
    v = np.asarray(v)
    return bool(np.max(np.abs(v - v[::-1])) <= tol)
