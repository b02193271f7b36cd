"""Measurement operators for GAMP.

GAMP needs four products per iteration: ``A x``, ``A^T s`` and the same two
with every entry of ``A`` squared. Dense matrices provide all four exactly.
The row-sampled orthonormal DCT has no cheap elementwise access, so its
squared products use the uniform-variance approximation ``|A_mn|^2 ~ 1/n``.
"""
from __future__ import annotations

import numpy as np
from scipy import fft


class LinearOperator:
    """Base class. Subclasses set ``m``, ``n`` and ``kind``."""

    m: int
    n: int
    kind: str

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    def _check(self, v, size, name, nonneg=False) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (size,):
            raise ValueError(f"{name}: expected vector of length {size}, got shape {v.shape}")
        if nonneg and np.any(v < 0):
            raise ValueError(f"{name}: entries must be nonnegative")
        return v

    def forward(self, x) -> np.ndarray:
        return self._forward(self._check(x, self.n, "forward"))

    def adjoint(self, s) -> np.ndarray:
        return self._adjoint(self._check(s, self.m, "adjoint"))

    def squared_forward(self, mu) -> np.ndarray:
        return self._squared_forward(self._check(mu, self.n, "squared_forward", nonneg=True))

    def squared_adjoint(self, mu) -> np.ndarray:
        return self._squared_adjoint(self._check(mu, self.m, "squared_adjoint", nonneg=True))

    # the unchecked versions are what the GAMP loop calls
    def _forward(self, x):
        raise NotImplementedError

    def _adjoint(self, s):
        raise NotImplementedError

    def _squared_forward(self, mu):
        raise NotImplementedError

    def _squared_adjoint(self, mu):
        raise NotImplementedError

    def frobenius_sq(self) -> float:
        raise NotImplementedError

    def to_dense(self) -> np.ndarray:
        """Materialize the matrix (tests and small problems only)."""
        raise NotImplementedError


class DenseOperator(LinearOperator):
    kind = "dense"

    def __init__(self, A):
        A = np.array(A, dtype=float)
        if A.ndim != 2:
            raise ValueError("dense operator needs a 2-D array")
        A.setflags(write=False)
        self.A = A
        self.m, self.n = A.shape
        self._A2 = None

    @property
    def A2(self) -> np.ndarray:
        if self._A2 is None:
            A2 = self.A * self.A
            A2.setflags(write=False)
            self._A2 = A2
        return self._A2

    def _forward(self, x):
        return self.A @ x

    def _adjoint(self, s):
        return self.A.T @ s

    def _squared_forward(self, mu):
        return self.A2 @ mu

    def _squared_adjoint(self, mu):
        return self.A2.T @ mu

    def frobenius_sq(self) -> float:
        return float(np.sum(self.A2))

    def to_dense(self):
        return self.A.copy()

    def __repr__(self):
        return f"DenseOperator(m={self.m}, n={self.n})"


class RowSampledDCT(LinearOperator):
    """Rows ``rows`` of the n-point orthonormal DCT-II matrix."""

    kind = "row-sampled-orthotransform"

    def __init__(self, n: int, rows):
        rows = np.asarray(rows, dtype=np.intp)
        if rows.ndim != 1 or rows.size == 0:
            raise ValueError("rows must be a non-empty 1-D index array")
        if rows.min() < 0 or rows.max() >= n:
            raise ValueError("row index out of range")
        if np.unique(rows).size != rows.size:
            raise ValueError("row indices must be distinct")
        rows.setflags(write=False)
        self.rows = rows
        self.n = int(n)
        self.m = int(rows.size)

    def _forward(self, x):
        return fft.dct(x, type=2, norm="ortho")[self.rows]

    def _adjoint(self, s):
        full = np.zeros(self.n)
        full[self.rows] = s
        return fft.idct(full, type=2, norm="ortho")

    # uniform-variance approximation: every |A_mn|^2 replaced by 1/n
    def _squared_forward(self, mu):
        return np.full(self.m, mu.sum() / self.n)

    def _squared_adjoint(self, mu):
        return np.full(self.n, mu.sum() / self.n)

    def frobenius_sq(self) -> float:
        return float(self.m)

    def to_dense(self):
        return fft.dct(np.eye(self.n), type=2, norm="ortho", axis=0)[self.rows]

    def __repr__(self):
        return f"RowSampledDCT(m={self.m}, n={self.n})"
