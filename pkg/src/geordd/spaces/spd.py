"""Symmetric positive-definite matrix outcomes under four geodesic metrics.

All four metrics are pullbacks of the Frobenius metric through a matrix map,
so every variant is handled by the Hilbert-embedding machinery:

- ``frobenius``:      Psi(A) = A
- ``power``:          Psi(A) = A^p           (spectral power, default p = 0.5)
- ``log_euclidean``:  Psi(A) = log(A)        (spectral logarithm)
- ``log_cholesky``:   Psi(A) = strict lower part of the Cholesky factor plus
                      the elementwise log of its diagonal

Geodesics interpolate linearly in the embedding; transport adds the embedded
displacement and projects back when the result leaves the image set.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvariantViolation, InverseInfeasible
from .base import HilbertSpace

__all__ = ["SpdSpace", "SPD_VARIANTS"]

SPD_VARIANTS = ("frobenius", "power", "log_euclidean", "log_cholesky")


def _sym(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + np.swapaxes(mat, -1, -2))


def _sym_apply(mat: np.ndarray, fn) -> np.ndarray:
    """Apply a scalar function to the eigenvalues of a symmetric matrix."""
    lam, vec = np.linalg.eigh(_sym(mat))
    out = (vec * fn(lam)[..., None, :]) @ np.swapaxes(vec, -1, -2)
    return _sym(out)


class SpdSpace(HilbertSpace):
    """SPD matrices of a fixed size under a chosen geodesic metric.

    Parameters
    ----------
    size : matrix dimension m (payload is m x m).
    variant : one of ``frobenius``, ``power``, ``log_euclidean``,
        ``log_cholesky``.
    power : exponent for the power metric (ignored otherwise).
    eps_pd : positive-definiteness floor for validation and projection.
    """

    tag = "spd"

    def __init__(
        self,
        size: int,
        variant: str = "frobenius",
        power: float = 0.5,
        eps_pd: float = 1e-10,
    ):
        if size < 1:
            raise ValueError("size must be >= 1")
        variant = variant.lower().replace("-", "_")
        if variant not in SPD_VARIANTS:
            raise ValueError(f"unknown SPD variant {variant!r}; choose from {SPD_VARIANTS}")
        if variant == "power" and power <= 0:
            raise ValueError("power exponent must be positive")
        self._m = int(size)
        self._variant = variant
        self._power = float(power)
        self._eps = float(eps_pd)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self._m, self._m)

    @property
    def variant(self) -> str:
        return self._variant

    @property
    def power(self) -> float:
        return self._power

    @property
    def eps_pd(self) -> float:
        return self._eps

    def _key(self):
        return (self._m, self._variant, self._power, self._eps)

    # -- validation ---------------------------------------------------------------

    def _validate(self, arr):
        scale = max(1.0, float(np.abs(arr).max()))
        if np.abs(arr - arr.T).max() > 1e-10 * scale:
            raise InvariantViolation("matrix must be symmetric")
        sym = _sym(arr)
        lam_min = float(np.linalg.eigvalsh(sym).min())
        if lam_min < self._eps - 1e-12 * scale:
            raise InvariantViolation(
                f"smallest eigenvalue {lam_min!r} is below the floor {self._eps!r}"
            )
        return sym

    # -- embedding ------------------------------------------------------------------

    def _embed(self, arr):
        if self._variant == "frobenius":
            return arr.ravel().copy()
        if self._variant == "power":
            return _sym_apply(arr, lambda lam: lam**self._power).ravel()
        if self._variant == "log_euclidean":
            return _sym_apply(arr, np.log).ravel()
        # log_cholesky
        chol = np.linalg.cholesky(arr)
        out = np.tril(chol, -1)
        idx = np.arange(self._m)
        out[idx, idx] = np.log(np.diag(chol))
        return out.ravel()

    def embed_many(self, objs):
        if len(objs) == 0:
            return np.empty((0, self.embedding_dim))
        for o in objs:
            self._check_member(o)
        stack = np.stack([o.data for o in objs])
        n = stack.shape[0]
        if self._variant == "frobenius":
            return stack.reshape(n, -1).copy()
        if self._variant == "power":
            return _sym_apply(stack, lambda lam: lam**self._power).reshape(n, -1)
        if self._variant == "log_euclidean":
            return _sym_apply(stack, np.log).reshape(n, -1)
        chol = np.linalg.cholesky(stack)
        out = np.tril(chol, -1)
        idx = np.arange(self._m)
        out[:, idx, idx] = np.log(chol[:, idx, idx])
        return out.reshape(n, -1)

    # -- inverse and projection -------------------------------------------------------

    def _image_floor(self) -> float:
        # smallest admissible eigenvalue in the embedding domain
        if self._variant == "frobenius":
            return self._eps
        if self._variant == "power":
            return self._eps**self._power
        return -np.inf

    def _inverse(self, v):
        mat = v.reshape(self._m, self._m)
        scale = max(1.0, float(np.abs(mat).max()))
        if self._variant == "log_cholesky":
            upper = np.triu(mat, 1)
            if np.abs(upper).max() > 1e-8 * scale:
                raise InverseInfeasible(
                    "vector is not lower-triangular in the Log-Cholesky domain; "
                    "pass project=True to project first"
                )
            low = np.tril(mat, -1)
            idx = np.arange(self._m)
            low[idx, idx] = np.exp(mat[idx, idx])
            return low @ low.T
        if np.abs(mat - mat.T).max() > 1e-8 * scale:
            raise InverseInfeasible(
                "vector is not symmetric in the embedding domain; "
                "pass project=True to project first"
            )
        sym = _sym(mat)
        floor = self._image_floor()
        if floor > -np.inf:
            lam_min = float(np.linalg.eigvalsh(sym).min())
            if lam_min < floor - 1e-12 * scale:
                raise InverseInfeasible(
                    f"smallest eigenvalue {lam_min!r} is below the image floor "
                    f"{floor!r}; pass project=True to project first"
                )
            sym = _sym_apply(sym, lambda lam: np.maximum(lam, floor))
        if self._variant == "frobenius":
            return sym
        if self._variant == "power":
            return _sym_apply(sym, lambda lam: lam ** (1.0 / self._power))
        return _sym_apply(sym, np.exp)  # log_euclidean

    def project_embedding(self, v):
        mat = np.asarray(v, dtype=float).reshape(self._m, self._m)
        if self._variant == "log_cholesky":
            return np.tril(mat).ravel()
        sym = _sym(mat)
        floor = self._image_floor()
        if floor > -np.inf:
            sym = _sym_apply(sym, lambda lam: np.maximum(lam, floor))
        return sym.ravel()
