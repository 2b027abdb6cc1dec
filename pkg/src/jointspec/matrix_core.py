"""Dense complex matrix primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the single entry point that validates shape and finiteness. Eigen, Schur
and singular value decompositions are delegated to LAPACK (through
``scipy.linalg``) and wrapped in :class:`FactorizationResult`, which records
the measured backward error of the factorization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, SingularMatrix

#: sigma_min <= SINGULAR_RTOL * sigma_max counts as singular.
SINGULAR_RTOL = 1e-12


def as_matrix(data, square: bool = True) -> np.ndarray:
    """Return ``data`` as a finite 2-D ``complex128`` array.

    Raises
    ------
    DimensionMismatch
        If the input is not two-dimensional, is empty, or (with
        ``square=True``) is not square.
    ValueError
        If any entry is NaN or infinite.
    """
    M = np.asarray(data, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] == 0 or M.shape[1] == 0:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains NaN or Inf entries")
    return M


def dagger(M: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(M, -1, -2))


def frobenius_norm(M) -> float:
    M = np.asarray(M)
    return float(np.sqrt(np.sum(M.real**2 + M.imag**2)))


def singular_values(M) -> np.ndarray:
    return sla.svdvals(as_matrix(M, square=False))


def operator_norm(M) -> float:
    """Largest singular value of ``M``."""
    return float(singular_values(M)[0])


def _check_nonsingular(s: np.ndarray) -> None:
    if s[-1] <= SINGULAR_RTOL * s[0]:
        raise SingularMatrix(
            f"smallest singular value {s[-1]:.3e} is below {SINGULAR_RTOL:g} x {s[0]:.3e}"
        )


def condition_number(M) -> float:
    """Spectral condition number ``sigma_max / sigma_min``.

    Raises :class:`SingularMatrix` when ``sigma_min <= 1e-12 * sigma_max``.
    """
    s = singular_values(as_matrix(M))
    _check_nonsingular(s)
    return float(s[0] / s[-1])


def inverse(M) -> np.ndarray:
    M = as_matrix(M)
    _check_nonsingular(sla.svdvals(M))
    return sla.inv(M)


def solve(A, B) -> np.ndarray:
    """Return ``A^{-1} B`` with the same singularity guard as :func:`inverse`."""
    A = as_matrix(A)
    _check_nonsingular(sla.svdvals(A))
    return sla.solve(A, np.asarray(B, dtype=np.complex128))


def commutator_norm(A, B) -> float:
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"cannot commute shapes {A.shape} and {B.shape}")
    return frobenius_norm(A @ B - B @ A)


def normality_defect(M) -> float:
    M = as_matrix(M)
    Mh = dagger(M)
    return frobenius_norm(M @ Mh - Mh @ M)


def unitarity_defect(U) -> float:
    U = np.asarray(U)
    return frobenius_norm(dagger(U) @ U - np.eye(U.shape[1]))


@dataclass(frozen=True)
class FactorizationResult:
    """``input ~= left_factor @ core @ right_factor``.

    ``kind`` is ``"eigen"`` (right factor is the inverse of the eigenvector
    matrix), ``"schur"`` (unitary left, upper-triangular core, right is the
    adjoint of left) or ``"svd"`` (unitary factors, nonnegative diagonal core).
    """

    kind: str
    left_factor: np.ndarray
    core: np.ndarray
    right_factor: np.ndarray
    backward_error: float

    def reconstruct(self) -> np.ndarray:
        return self.left_factor @ self.core @ self.right_factor


def _result(kind, M, left, core, right) -> FactorizationResult:
    err = frobenius_norm(left @ core @ right - M)
    return FactorizationResult(kind, left, core, right, err)


def eigen(M) -> FactorizationResult:
    M = as_matrix(M)
    w, V = sla.eig(M)
    return _result("eigen", M, V, np.diag(w), sla.inv(V))


def schur(M) -> FactorizationResult:
    M = as_matrix(M)
    T, Z = sla.schur(M, output="complex")
    return _result("schur", M, Z, T, dagger(Z))


def svd(M) -> FactorizationResult:
    M = as_matrix(M, square=False)
    U, s, Vh = sla.svd(M)
    core = np.zeros(M.shape, dtype=np.complex128)
    core[: len(s), : len(s)] = np.diag(s)
    return _result("svd", M, U, core, Vh)
