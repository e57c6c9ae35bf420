"""Energies and forces of the atomistic and quasicontinuum models.

Forces are evaluated from closed-form strain expressions.  Each force table
below is written row by row; the z-space force ``F_j = -dE/dz_j`` follows
from the chain rule ``dr_l/dz_j = (delta_{l,j-1} - delta_{l,j}) / nu_l``.
"""

from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np

from ._terms import TermTable
from .chain import ChainGeometry, check_strain, interpolate_positions, strain_from_positions
from .errors import NonPositiveStrain, NotIncreasing
from .potential import LennardJones, PairPotential

LJ = LennardJones()


class ModelKind(enum.Enum):
    ATOMISTIC = "atomistic"
    CONSTRAINED = "constrained"
    LOCAL = "local"
    QCE = "qce"
    QCF = "qcf"


# ---------------------------------------------------------------------------
# energies


def _check_increasing(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if not np.all(np.diff(y) > 0):
        raise NotIncreasing("positions must be strictly increasing")
    return y


def energy_atomistic(y, p: PairPotential = LJ) -> float:
    """Total nearest plus next-nearest pair energy of a chain at positions y."""
    y = _check_increasing(y)
    e = np.sum(p.phi(y[1:] - y[:-1]))
    if y.size > 2:
        e += np.sum(p.phi(y[2:] - y[:-2]))
    return float(e)


def atom_energies(y, p: PairPotential = LJ) -> np.ndarray:
    """Per-atom partition: half of every bond is assigned to each end atom."""
    y = _check_increasing(y)
    e = np.zeros(y.size)
    nn = 0.5 * p.phi(y[1:] - y[:-1])
    e[:-1] += nn
    e[1:] += nn
    if y.size > 2:
        nnn = 0.5 * p.phi(y[2:] - y[:-2])
        e[:-2] += nnn
        e[2:] += nnn
    return e


def interfacial_energy(r_prev: float, r_next: float, p: PairPotential = LJ) -> float:
    """``S_j``: correction for the next-nearest bond straddling a representative atom."""
    return float(-0.5 * p.phi(2 * r_prev) + p.phi(r_prev + r_next) - 0.5 * p.phi(2 * r_next))


def energy_constrained(g: ChainGeometry, z, p: PairPotential = LJ) -> float:
    """Constrained atomistic energy by the interval/interface partition."""
    r = strain_from_positions(g, z)
    bulk = np.sum(g.nu_array * p.phi_hat(r))
    surface = -0.5 * p.phi(2 * r[0]) - 0.5 * p.phi(2 * r[-1])
    interfaces = np.sum(-0.5 * p.phi(2 * r[:-1]) + p.phi(r[:-1] + r[1:]) - 0.5 * p.phi(2 * r[1:]))
    return float(bulk + surface + interfaces)


def energy_constrained_direct(g: ChainGeometry, z, p: PairPotential = LJ) -> float:
    """Constrained energy summed over all interpolated atoms."""
    return energy_atomistic(interpolate_positions(g, z), p)


def energy_local(g: ChainGeometry, z, p: PairPotential = LJ) -> float:
    r = strain_from_positions(g, z)
    return float(np.sum(g.nu_array * p.phi_hat(r)))


def energy_qce(g: ChainGeometry, z, p: PairPotential = LJ) -> float:
    """Energy-based QC energy: local site energies outside ``-K+1..K``,
    atomistic site energies inside."""
    r = strain_from_positions(g, z)
    N, K = g.N, g.K
    nu = g.nu_array

    def weighted_phi_hat(j):
        return nu[j + N] * p.phi_hat(r[j + N]) if -N <= j <= N else 0.0

    def local_site(j):
        return 0.5 * (weighted_phi_hat(j) + weighted_phi_hat(j - 1))

    # nu = 1 around the atomistic region, so atoms and repatoms coincide there
    def atom_site(j):
        return 0.5 * (p.phi(r[j + N]) + p.phi(r[j + N] + r[j + 1 + N])
                      + p.phi(r[j - 1 + N]) + p.phi(r[j - 1 + N] + r[j - 2 + N]))

    e = sum(local_site(j) for j in range(-N, -K + 1))
    e += sum(atom_site(j) for j in range(-K + 1, K + 1))
    e += sum(local_site(j) for j in range(K + 1, N + 2))
    return float(e)


# ---------------------------------------------------------------------------
# force tables


def _atomistic_row(t: TermTable, row: int, j: int) -> None:
    t.eta(row, 1, j)
    t.eta2(row, 1, j, j + 1)
    t.eta(row, -1, j - 1)
    t.eta2(row, -1, j - 1, j - 2)


def _local_row(t: TermTable, row: int, j: int) -> None:
    t.eta_hat(row, 1, j)
    t.eta_hat(row, -1, j - 1)


@lru_cache(maxsize=64)
def atomistic_table(M: int) -> TermTable:
    t = TermTable(M, -M, M + 1)
    for i in range(-M, M + 2):
        _atomistic_row(t, i, i)
    return t.freeze()


@lru_cache(maxsize=64)
def local_table(N: int) -> TermTable:
    t = TermTable(N, -N, N + 1)
    for j in range(-N, N + 2):
        _local_row(t, j, j)
    return t.freeze()


@lru_cache(maxsize=64)
def constrained_table(g: ChainGeometry) -> TermTable:
    N = g.N
    t = TermTable(N, -N, N + 1)

    def conjugate(row, sign, j):
        inv = 1.0 / g.nu_at(j)
        t.eta_hat(row, sign, j)
        t.eta2(row, sign * inv, j - 1, j)
        t.eta2(row, sign * inv, j, j + 1)
        t.eta2(row, -2 * sign * inv, j, j)

    for j in range(-N, N + 2):
        conjugate(j, +1, j)
        conjugate(j, -1, j - 1)
    return t.freeze()


@lru_cache(maxsize=64)
def qce_table(N: int, K: int) -> TermTable:
    t = TermTable(N, -N, N + 1)
    for j in range(-N, N + 2):
        if j <= -K - 2:
            _local_row(t, j, j)
        elif j == -K - 1:
            _local_row(t, j, j)
            t.eta2(j, 0.5, -K - 1, -K)
        elif j == -K:
            _local_row(t, j, j)
            t.eta2(j, -1, -K, -K)
            t.eta2(j, 0.5, -K, -K + 1)
        elif j == -K + 1:
            _atomistic_row(t, j, j)
            t.eta2(j, -1, -K, -K)
            t.eta2(j, 0.5, -K - 1, -K)
        elif j == -K + 2:
            _atomistic_row(t, j, j)
            t.eta2(j, 0.5, -K, -K + 1)
        elif j <= K - 2:
            _atomistic_row(t, j, j)
        elif j == K - 1:
            _atomistic_row(t, j, j)
            t.eta2(j, -0.5, K - 1, K)
        elif j == K:
            _atomistic_row(t, j, j)
            t.eta2(j, 1, K, K)
            t.eta2(j, -0.5, K, K + 1)
        elif j == K + 1:
            _local_row(t, j, j)
            t.eta2(j, 1, K, K)
            t.eta2(j, -0.5, K - 1, K)
        elif j == K + 2:
            _local_row(t, j, j)
            t.eta2(j, -0.5, K, K + 1)
        else:
            _local_row(t, j, j)
    return t.freeze()


@lru_cache(maxsize=64)
def qcf_table(N: int, K: int) -> TermTable:
    t = TermTable(N, -N, N + 1)
    for j in range(-N, N + 2):
        if j == -N:
            t.eta_hat(j, 1, -N)
        elif j <= -K:
            _local_row(t, j, j)
        elif j <= K:
            _atomistic_row(t, j, j)
        elif j <= N:
            _local_row(t, j, j)
        else:
            t.eta_hat(j, -1, N)
    return t.freeze()


@lru_cache(maxsize=64)
def ghost_table(N: int, K: int) -> TermTable:
    t = TermTable(N, -N, N + 1)
    t.eta2(-K - 1, -0.5, -K - 1, -K)
    t.eta2(-K, 1, -K, -K)
    t.eta2(-K, -0.5, -K, -K + 1)
    t.eta2(-K + 1, 1, -K, -K)
    t.eta2(-K + 1, -0.5, -K - 1, -K)
    t.eta2(-K + 2, -0.5, -K, -K + 1)
    t.eta2(K - 1, 0.5, K - 1, K)
    t.eta2(K, -1, K, K)
    t.eta2(K, 0.5, K, K + 1)
    t.eta2(K + 1, -1, K, K)
    t.eta2(K + 1, 0.5, K - 1, K)
    t.eta2(K + 2, 0.5, K, K + 1)
    return t.freeze()


# ---------------------------------------------------------------------------
# forces


def force_atomistic(r, p: PairPotential = LJ) -> np.ndarray:
    """Atomistic forces ``F_i``, ``i = -M..M+1``, for spacings ``r_{-M..M}``."""
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or r.size % 2 != 1:
        raise ValueError("atomistic strain must have odd length 2M+1")
    if not np.all(r > 0):
        raise NonPositiveStrain("all lattice spacings must be positive")
    return atomistic_table(r.size // 2).evaluate(p.eta, r)


def force_constrained(g: ChainGeometry, r, p: PairPotential = LJ) -> np.ndarray:
    r = check_strain(g, r)
    return constrained_table(g).evaluate(p.eta, r)


def force_local(g: ChainGeometry, r, p: PairPotential = LJ) -> np.ndarray:
    r = check_strain(g, r)
    return local_table(g.N).evaluate(p.eta, r)


def force_qce(g: ChainGeometry, r, p: PairPotential = LJ) -> np.ndarray:
    r = check_strain(g, r)
    return qce_table(g.N, g.K).evaluate(p.eta, r)


def force_qcf(g: ChainGeometry, r, p: PairPotential = LJ) -> np.ndarray:
    """Force-based QC: every representative atom feels the force of its own model."""
    r = check_strain(g, r)
    return qcf_table(g.N, g.K).evaluate(p.eta, r)


def force_ghost(g: ChainGeometry, r, p: PairPotential = LJ) -> np.ndarray:
    """Ghost-force correction ``F^QCF - F^QCE``; supported on ``K-2 < |j| < K+3``."""
    r = check_strain(g, r)
    return ghost_table(g.N, g.K).evaluate(p.eta, r)


_FORCES = {
    ModelKind.CONSTRAINED: force_constrained,
    ModelKind.LOCAL: force_local,
    ModelKind.QCE: force_qce,
    ModelKind.QCF: force_qcf,
}

_ENERGIES = {
    ModelKind.CONSTRAINED: energy_constrained,
    ModelKind.LOCAL: energy_local,
    ModelKind.QCE: energy_qce,
}


def force(kind: ModelKind, g: ChainGeometry, r, p: PairPotential = LJ) -> np.ndarray:
    """Dispatch on model kind.  The atomistic model uses ``r`` alone."""
    kind = ModelKind(kind)
    if kind is ModelKind.ATOMISTIC:
        return force_atomistic(r, p)
    return _FORCES[kind](g, r, p)


def energy(kind: ModelKind, g: ChainGeometry, z, p: PairPotential = LJ) -> float:
    """Energy of a conservative model; ``z`` are atomistic positions for ATOMISTIC."""
    kind = ModelKind(kind)
    if kind is ModelKind.ATOMISTIC:
        return energy_atomistic(z, p)
    if kind is ModelKind.QCF:
        raise ValueError("the force-based QC forces are not conservative; there is no energy")
    return _ENERGIES[kind](g, z, p)


def nonconservativity_witness(g: ChainGeometry, r, p: PairPotential = LJ) -> tuple[float, float]:
    """Mixed partials ``(dF_K/dz_{K+1}, dF_{K+1}/dz_K)`` of the QCF forces.

    A conservative force field would make the two equal; they differ by
    ``4 eta'(2 r_K)``.
    """
    r = check_strain(g, r)
    rK = r[g.K + g.N]
    return float(p.eta_prime(rK)), float(p.eta_prime(rK) + 4 * p.eta_prime(2 * rK))
