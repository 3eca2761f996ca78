"""Tensor Chebyshev basis on a box, with exact partial derivatives up to order 4."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


def chebyshev_table(xi: np.ndarray, degree: int, max_order: int) -> np.ndarray:
    """T_k^{(d)}(xi) for k <= degree, d <= max_order; shape (max_order+1, len(xi), degree+1)."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros((max_order + 1, xi.size, degree + 1))
    out[0, :, 0] = 1.0
    if degree >= 1:
        out[0, :, 1] = xi
        if max_order >= 1:
            out[1, :, 1] = 1.0
    for k in range(1, degree):
        for d in range(max_order + 1):
            val = 2.0 * xi * out[d, :, k] - out[d, :, k - 1]
            if d:
                val += 2.0 * d * out[d - 1, :, k]
            out[d, :, k + 1] = val
    return out


@dataclass(frozen=True)
class ChebyshevBasis:
    """Products T_i(xi_1) T_j(xi_2) ... with the box mapped affinely onto [-1, 1]^n.

    With ``total=True`` only multi-indices of total degree <= ``degree`` are kept.
    """

    lower: tuple
    upper: tuple
    degree: int
    total: bool = True

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def indices(self) -> np.ndarray:
        idx = [
            m for m in itertools.product(range(self.degree + 1), repeat=self.dim)
            if not self.total or sum(m) <= self.degree
        ]
        return np.array(idx, dtype=int)

    @property
    def size(self) -> int:
        return len(self.indices)

    def _scaled(self, x):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        return (2.0 * np.asarray(x, dtype=float) - lo - hi) / (hi - lo), 2.0 / (hi - lo)

    def tables(self, x, max_order: int):
        xi, jac = self._scaled(np.atleast_2d(x))
        return [
            chebyshev_table(xi[:, ax], self.degree, max_order) * jac[ax] ** np.arange(max_order + 1)[:, None, None]
            for ax in range(self.dim)
        ]

    def partial(self, tables, alpha) -> np.ndarray:
        """d^alpha of every basis function, shape (m, size); alpha = derivative count per axis."""
        idx = self.indices
        out = None
        for ax, d in enumerate(alpha):
            col = tables[ax][d][:, idx[:, ax]]
            out = col if out is None else out * col
        return out

    def derivatives(self, x, order: int) -> np.ndarray:
        """Full derivative tensor of the given order: shape (m, size) + (n,) * order."""
        n = self.dim
        tab = self.tables(x, order)
        m = tab[0].shape[1]
        out = np.empty((m, self.size) + (n,) * order)
        cache = {}
        for combo in itertools.product(range(n), repeat=order):
            alpha = tuple(combo.count(ax) for ax in range(n))
            if alpha not in cache:
                cache[alpha] = self.partial(tab, alpha)
            out[(slice(None), slice(None)) + combo] = cache[alpha]
        return out
