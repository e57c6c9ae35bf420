"""Representative-atom geometry, interpolation and external-load aggregation.

Vectors follow the centered numbering of the model.  A strain ``r`` holds
``r_j`` for ``j = -N..N`` at array position ``j + N``; representative
positions ``z_j`` and forces ``F_j`` run over ``j = -N..N+1`` (also stored at
``j + N``); atomistic positions ``y_i`` run over ``i = -M..M+1`` (stored at
``i + M``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidGeometry, NonPositiveStrain, NotIncreasing, ResultantNonzero

RESULTANT_TOL = 1e-10


class Centered:
    """Read-only vector addressed by centered index, with a fill value outside.

    >>> v = Centered([1.0, 2.0, 3.0], lo=-1)
    >>> v[-1], v[1], v[2]
    (1.0, 3.0, 0.0)
    """

    def __init__(self, values, lo: int, fill=0.0):
        self.values = values
        self.lo = lo
        self.hi = lo + len(values) - 1
        self.fill = fill

    def __contains__(self, j: int) -> bool:
        return self.lo <= j <= self.hi

    def __getitem__(self, j: int):
        if self.lo <= j <= self.hi:
            return self.values[j - self.lo]
        return self.fill

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ChainGeometry:
    """Layout of representative atoms.

    ``N`` gives ``2N+1`` intervals between the ``2N+2`` representative atoms,
    ``K`` marks the atomistic sites ``-K+1..K`` and ``nu[j + N]`` is the number
    of atomic spacings in interval ``j``.
    """

    N: int
    K: int
    nu: tuple[int, ...] = field(default=())

    def __post_init__(self):
        N, K = self.N, self.K
        nu = tuple(int(v) for v in self.nu) if len(self.nu) else (1,) * (2 * N + 1)
        object.__setattr__(self, "nu", nu)
        if K < 3:
            raise InvalidGeometry(f"K must be at least 3, got {K}")
        if N < K + 2:
            raise InvalidGeometry(f"need K < N - 1, got N={N}, K={K}")
        if len(nu) != 2 * N + 1:
            raise InvalidGeometry(f"nu must have {2 * N + 1} entries, got {len(nu)}")
        if any(v < 1 for v in nu):
            raise InvalidGeometry("every nu_j must be a positive integer")
        if any(nu[j + N] != 1 for j in range(-K - 1, K + 2)):
            raise InvalidGeometry(f"nu_j must equal 1 for j = {-K - 1}..{K + 1}")
        if sum(nu) % 2 != 1:
            raise InvalidGeometry("sum of nu must be odd (2M+1 atomic spacings)")

    @classmethod
    def uniform(cls, N: int, K: int, coarsening: int = 1) -> "ChainGeometry":
        """Geometry with ``nu_j = coarsening`` outside the interface band."""
        nu = [1 if abs(j) <= K + 1 else coarsening for j in range(-N, N + 1)]
        return cls(N, K, tuple(nu))

    @property
    def M(self) -> int:
        return (sum(self.nu) - 1) // 2

    @property
    def n_strain(self) -> int:
        return 2 * self.N + 1

    @property
    def indices(self) -> range:
        """Strain indices ``-N..N``."""
        return range(-self.N, self.N + 1)

    @property
    def nu_array(self) -> np.ndarray:
        return np.asarray(self.nu, dtype=float)

    @property
    def ell(self) -> np.ndarray:
        """Atomistic index ``l_j`` of each representative atom, ``j = -N..N+1``."""
        return -self.M + np.concatenate(([0], np.cumsum(self.nu)))

    def nu_at(self, j: int) -> int:
        """``nu_j`` with the boundary convention ``nu_j = 1`` outside ``-N..N``."""
        return self.nu[j + self.N] if -self.N <= j <= self.N else 1


@dataclass(frozen=True)
class Load:
    """External dead loads at the three levels of description.

    ``f_tilde`` (``i = -M..M+1``), ``f`` (``j = -N..N+1``) and the conjugate
    potential ``Phi`` (``j = -N..N``).
    """

    f_tilde: np.ndarray | None
    f: np.ndarray
    Phi: np.ndarray


def check_strain(g: ChainGeometry, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (g.n_strain,):
        raise ValueError(f"strain must have length {g.n_strain}, got shape {r.shape}")
    if not np.all(r > 0):
        raise NonPositiveStrain("all lattice spacings must be positive")
    return r


def interpolate_positions(g: ChainGeometry, z) -> np.ndarray:
    """Linearly interpolate atomistic positions between representative atoms."""
    z = np.asarray(z, dtype=float)
    if z.shape != (2 * g.N + 2,):
        raise ValueError(f"z must have length {2 * g.N + 2}")
    if not np.all(np.diff(z) > 0):
        raise NotIncreasing("representative positions must be strictly increasing")
    y = np.empty(2 * g.M + 2)
    pos = 0
    for k, nu in enumerate(g.nu):
        i = np.arange(nu)
        y[pos:pos + nu] = ((nu - i) / nu) * z[k] + (i / nu) * z[k + 1]
        pos += nu
    y[-1] = z[-1]
    return y


def strain_from_positions(g: ChainGeometry, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape != (2 * g.N + 2,):
        raise ValueError(f"z must have length {2 * g.N + 2}")
    r = np.diff(z) / g.nu_array
    if not np.all(r > 0):
        raise NonPositiveStrain("representative positions must be strictly increasing")
    return r


def positions_from_strain(g: ChainGeometry, r, anchor: float = 0.0) -> np.ndarray:
    """Inverse of :func:`strain_from_positions` with ``z_{-N} = anchor``."""
    r = check_strain(g, r)
    return anchor + np.concatenate(([0.0], np.cumsum(g.nu_array * r)))


def conjugate_potential(f) -> np.ndarray:
    """``Phi_j = -sum_{i<=j} f_i`` for ``j = -N..N`` (``Phi_{N+1}`` dropped).

    For balanced loads ``Phi_j = sum_{i>j} f_i`` as well; the right half is
    summed from the right end so that anti-symmetric loads give a bit-for-bit
    symmetric ``Phi``.
    """
    f = np.asarray(f, dtype=float)
    if abs(f.sum()) > RESULTANT_TOL:
        return -np.cumsum(f)[:-1]
    n = f.size // 2  # f has 2N+2 entries
    left = -np.cumsum(f[:n])
    right = np.cumsum(f[::-1][:n - 1])[::-1]
    return np.concatenate((left, right))


def forces_from_potential(Phi) -> np.ndarray:
    """``f_j = -(Phi_j - Phi_{j-1})`` with ``Phi_{-N-1} = Phi_{N+1} = 0``."""
    Phi = np.concatenate(([0.0], np.asarray(Phi, dtype=float), [0.0]))
    return -np.diff(Phi)


def aggregate_loads(g: ChainGeometry, f_tilde: Sequence[float], require_balance: bool = True) -> Load:
    """Hat-function aggregation of atomistic loads onto representative atoms."""
    f_tilde = np.asarray(f_tilde, dtype=float)
    M, N = g.M, g.N
    if f_tilde.shape != (2 * M + 2,):
        raise ValueError(f"f_tilde must have length {2 * M + 2}, got {f_tilde.shape}")
    ft = Centered(f_tilde, lo=-M)
    ell = g.ell
    f = np.zeros(2 * N + 2)
    for j in range(-N, N + 2):
        lj = int(ell[j + N])
        nl, nr = g.nu_at(j - 1), g.nu_at(j)
        # the two one-sided sums are added last so mirrored loads aggregate to
        # exactly mirrored forces
        left = sum((nl - i) / nl * ft[lj - i] for i in range(1, nl + 1))
        right = sum((nr - i) / nr * ft[lj + i] for i in range(1, nr + 1))
        f[j + N] = ft[lj] + (left + right)
    resultant = f.sum()
    if require_balance and abs(resultant) > RESULTANT_TOL:
        raise ResultantNonzero(f"external loads have resultant {resultant:.3e}")
    return Load(f_tilde=f_tilde, f=f, Phi=conjugate_potential(f))


def load_from_potential(Phi) -> Load:
    """Build a load directly from a conjugate potential ``Phi_{-N..N}``."""
    Phi = np.asarray(Phi, dtype=float)
    return Load(f_tilde=None, f=forces_from_potential(Phi), Phi=Phi.copy())


def tension_load(g: ChainGeometry, T: float) -> Load:
    """Equal and opposite end loads: ``-T`` on the first atom, ``+T`` on the last."""
    f_tilde = np.zeros(2 * g.M + 2)
    f_tilde[0], f_tilde[-1] = -T, T
    return aggregate_loads(g, f_tilde)
