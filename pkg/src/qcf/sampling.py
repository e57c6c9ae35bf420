"""Random instances for property tests and sweeps.

The solvers are deterministic; only these helpers draw random numbers.  The
seed comes from ``QCF_SEED`` when set.
"""

from __future__ import annotations

import os

import numpy as np

from .chain import ChainGeometry

DEFAULT_SEED = 20240601


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get("QCF_SEED")
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"QCF_SEED must be an integer, got {raw!r}") from None


def rng(seed: int | None = None) -> np.random.Generator:
    return np.random.default_rng(seed_from_env() if seed is None else seed)


def symmetrize(half) -> np.ndarray:
    """``[h_N, ..., h_1, h_0, h_1, ..., h_N]`` from ``h_0..h_N``."""
    half = np.asarray(half, dtype=float)
    return np.concatenate((half[:0:-1], half))


def symmetric_vector(g: ChainGeometry, lo: float, hi: float, gen: np.random.Generator) -> np.ndarray:
    """Random symmetric vector of length ``2N+1`` with entries in the open interval (lo, hi)."""
    return symmetrize(gen.uniform(lo, hi, size=g.N + 1))


def random_geometry(gen: np.random.Generator, n_max: int = 10, nu_max: int = 4, k_min: int = 3) -> ChainGeometry:
    """Random legal geometry with ``N <= n_max`` and ``nu_j <= nu_max``."""
    while True:
        N = int(gen.integers(k_min + 2, n_max + 1))
        K = int(gen.integers(k_min, N - 1))
        nu = [1 if abs(j) <= K + 1 else int(gen.integers(1, nu_max + 1)) for j in range(-N, N + 1)]
        if sum(nu) % 2 == 1:
            return ChainGeometry(N, K, tuple(nu))


def random_positions(g: ChainGeometry, gen: np.random.Generator, lo: float = 0.9, hi: float = 1.2) -> np.ndarray:
    """Increasing representative positions whose spacings lie in (lo, hi)."""
    r = gen.uniform(lo, hi, size=g.n_strain)
    return np.concatenate(([0.0], np.cumsum(g.nu_array * r)))
