"""Sparse "sum of eta terms" tables.

Every force and conjugate force in the 1D next-nearest-neighbor models is a
linear combination of ``eta(r_a)`` (nearest-neighbor bonds) and
``eta(r_a + r_b)`` (next-nearest-neighbor bonds; ``a == b`` gives
``eta(2 r_a)``).  A :class:`TermTable` stores such a combination per output
row, and evaluates both the vector and its Jacobian with respect to ``r``.

The out-of-range convention lives here and only here: a term that references
a strain index outside ``-n..n`` is dropped, i.e. contributes zero.
"""

from __future__ import annotations

import numpy as np

NEAREST = -1


class TermTable:
    def __init__(self, n: int, row_lo: int, row_hi: int):
        self.n = n
        self.row_lo = row_lo
        self.n_rows = row_hi - row_lo + 1
        self._rows: list[int] = []
        self._coef: list[float] = []
        self._a: list[int] = []
        self._b: list[int] = []

    def _in_range(self, j: int) -> bool:
        return -self.n <= j <= self.n

    def eta(self, row: int, coef: float, a: int) -> None:
        """Add ``coef * eta(r_a)`` to ``row``."""
        if self._in_range(a):
            self._push(row, coef, a, None)

    def eta2(self, row: int, coef: float, a: int, b: int) -> None:
        """Add ``coef * eta(r_a + r_b)`` to ``row``."""
        if self._in_range(a) and self._in_range(b):
            self._push(row, coef, a, b)

    def eta_hat(self, row: int, coef: float, a: int) -> None:
        """Add ``coef * (eta(r_a) + 2 eta(2 r_a))``."""
        self.eta(row, coef, a)
        self.eta2(row, 2 * coef, a, a)

    def _push(self, row, coef, a, b):
        self._rows.append(row - self.row_lo)
        self._coef.append(float(coef))
        self._a.append(a + self.n)
        self._b.append(NEAREST if b is None else b + self.n)

    def freeze(self) -> "TermTable":
        self.rows = np.asarray(self._rows, dtype=np.intp)
        self.coef = np.asarray(self._coef, dtype=float)
        self.a = np.asarray(self._a, dtype=np.intp)
        self.b = np.asarray(self._b, dtype=np.intp)
        self.pair = self.b != NEAREST
        return self

    def _arguments(self, r: np.ndarray) -> np.ndarray:
        s = r[self.a].copy()
        s[self.pair] += r[self.b[self.pair]]
        return s

    def evaluate(self, eta, r: np.ndarray) -> np.ndarray:
        vals = self.coef * eta(self._arguments(r))
        return np.bincount(self.rows, weights=vals, minlength=self.n_rows)

    def jacobian(self, eta_prime, r: np.ndarray) -> np.ndarray:
        d = self.coef * eta_prime(self._arguments(r))
        J = np.zeros((self.n_rows, r.size))
        np.add.at(J, (self.rows, self.a), d)
        np.add.at(J, (self.rows[self.pair], self.b[self.pair]), d[self.pair])
        return J
