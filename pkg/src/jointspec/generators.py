"""Seeded constructors for commuting tuples and their perturbations.

Randomness comes from numpy's PCG64 bit generator. Each constructor draws
from its own stream, ``SeedSequence([seed, stream_id])``, so a given
``GeneratorConfig`` always reproduces the same matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla

from .joint_spectrum import MatrixTuple
from .matrix_core import dagger, unitarity_defect

STREAM_NORMAL = 1
STREAM_DIAGONALIZABLE = 2
STREAM_PERTURB = 3


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    m: int
    seed: int = 0
    eigenvalue_min_modulus: float = 0.1
    eigenvalue_box: float = 2.0
    perturbation_scale: float = 0.0
    max_condition: float = 1e3

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"n and m must be positive, got n={self.n}, m={self.m}")
        if not 0 < self.eigenvalue_min_modulus < self.eigenvalue_box:
            raise ValueError("need 0 < eigenvalue_min_modulus < eigenvalue_box")
        if self.perturbation_scale < 0:
            raise ValueError("perturbation_scale must be nonnegative")
        if self.max_condition < 1:
            raise ValueError("max_condition must be at least 1")

    def with_seed(self, seed: int) -> "GeneratorConfig":
        return replace(self, seed=seed)


def make_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed) & (2**64 - 1), stream])))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with phase fix."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_eigenvalues(shape, cfg: GeneratorConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniform in the square ``[-box, box]^2``, rejecting the disk of radius ``min_modulus``."""
    box = cfg.eigenvalue_box
    out = np.empty(shape, dtype=np.complex128)
    flat = out.reshape(-1)
    for i in range(flat.size):
        while True:
            z = complex(rng.uniform(-box, box), rng.uniform(-box, box))
            if abs(z) >= cfg.eigenvalue_min_modulus:
                flat[i] = z
                break
    return out


def _conjugated(S, diagonals, S_inv):
    return np.stack([(S * d) @ S_inv for d in diagonals])


def random_commuting_normal_tuple(cfg: GeneratorConfig) -> MatrixTuple:
    """``A^(k) = U D^(k) U^*`` for one Haar unitary ``U`` and random diagonals."""
    rng = make_rng(cfg.seed, STREAM_NORMAL)
    U = random_unitary(cfg.n, rng)
    D = random_eigenvalues((cfg.m, cfg.n), cfg, rng)
    return MatrixTuple(_conjugated(U, D, dagger(U)), basis=U, diagonals=D)


def random_commuting_diagonalizable_tuple(cfg: GeneratorConfig):
    """``A^(k) = S D^(k) S^-1`` with ``cond(S) <= cfg.max_condition``.

    ``S = U diag(s) V`` with Haar ``U``, ``V`` and singular values spread
    log-uniformly between 1 and a target condition number drawn
    log-uniformly from ``[1, max_condition)``. Returns ``(tuple, S)``.
    """
    rng = make_rng(cfg.seed, STREAM_DIAGONALIZABLE)
    n = cfg.n
    U = random_unitary(n, rng)
    V = random_unitary(n, rng)
    kappa = cfg.max_condition ** rng.uniform(0.0, 1.0) * (1 - 1e-9)
    kappa = max(kappa, 1.0)
    if n > 1:
        inner = np.sort(rng.uniform(0.0, 1.0, n - 2))[::-1] if n > 2 else np.empty(0)
        expo = np.concatenate([[1.0], inner, [0.0]])
    else:
        expo = np.array([0.0])
    s = kappa ** expo
    S = (U * s) @ V
    S_inv = dagger(V) @ (dagger(U) / s[:, None])
    D = random_eigenvalues((cfg.m, n), cfg, rng)
    return MatrixTuple(_conjugated(S, D, S_inv), basis=S, diagonals=D), S


def _skew_hermitian(n, rng):
    K = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    K = (K - dagger(K)) / 2
    nrm = np.linalg.norm(K)
    return K / nrm if nrm > 0 else K


def _disk(shape, rng):
    r = np.sqrt(rng.uniform(0.0, 1.0, shape))
    return r * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, shape))


def _parlett(T, fdiag):
    """Upper-triangular ``F`` commuting with ``T`` and with diagonal ``fdiag``.

    This is ``p(T)`` for the polynomial interpolating ``fdiag`` at the
    (distinct) diagonal entries of ``T``.
    """
    n = T.shape[0]
    F = np.diag(np.asarray(fdiag, dtype=np.complex128))
    for p in range(1, n):
        for i in range(n - p):
            j = i + p
            num = T[i, j] * (F[j, j] - F[i, i])
            for k in range(i + 1, j):
                num += T[i, k] * F[k, j] - F[i, k] * T[k, j]
            F[i, j] = num / (T[j, j] - T[i, i])
    return F


def perturb_within_class(A: MatrixTuple, cfg: GeneratorConfig, cls: str = "normal") -> MatrixTuple:
    """Nearby commuting tuple ``B`` of the requested class.

    ``A`` must carry its construction basis (``A.basis``, ``A.diagonals``).

    * ``normal``: eigenbasis ``U exp(s K)`` (``K`` skew-Hermitian, unit norm) and
      eigenvalues shifted by at most ``s``; requires a unitary basis.
    * ``diagonalizable``: basis ``S exp(s G)`` with a unit-norm complex ``G``.
    * ``arbitrary_commuting`` (alias ``arbitrary``): polynomials in one upper
      triangular ``T`` whose strictly upper part has scale ``s``, conjugated by
      the rotated basis; generally neither normal nor diagonalizable.
    """
    if A.basis is None or A.diagonals is None:
        raise ValueError("perturb_within_class needs a tuple built by this module (basis metadata missing)")
    s = cfg.perturbation_scale
    rng = make_rng(cfg.seed, STREAM_PERTURB)
    n, m = A.n, A.m
    D = A.diagonals + s * _disk((m, n), rng)
    if cls == "diagonalizable":
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        G /= np.linalg.norm(G)
        S = A.basis @ sla.expm(s * G)
        return MatrixTuple(_conjugated(S, D, sla.inv(S)), basis=S, diagonals=D)
    W = A.basis @ sla.expm(s * _skew_hermitian(n, rng))
    if cls == "normal":
        if unitarity_defect(A.basis) > 1e-10:
            raise ValueError("class 'normal' needs a tuple with a unitary eigenbasis")
        return MatrixTuple(_conjugated(W, D, dagger(W)), basis=W, diagonals=D)
    if cls in ("arbitrary_commuting", "arbitrary"):
        nodes = np.arange(1, n + 1, dtype=np.complex128)
        T = np.diag(nodes) + s * np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), 1)
        W_inv = sla.inv(W)
        return MatrixTuple(np.stack([W @ _parlett(T, D[k]) @ W_inv for k in range(m)]))
    raise ValueError(f"unknown perturbation class {cls!r}")


def cyclic_shift(n: int) -> np.ndarray:
    """Ones on the superdiagonal and in the bottom-left corner."""
    C = np.eye(n, k=1, dtype=np.complex128)
    C[n - 1, 0] = 1.0
    return C


def nilpotent_shift(n: int) -> np.ndarray:
    return np.eye(n, k=1, dtype=np.complex128)


def extremal_shift_example(n: int, m: int):
    """``A^(k) = k C_n`` and ``B^(k) = k N_n`` for ``k = 1..m``.

    The pair attains equality in the constant-``n`` bound.
    """
    if n < 2 or m < 1:
        raise ValueError(f"need n >= 2 and m >= 1, got n={n}, m={m}")
    C, N = cyclic_shift(n), nilpotent_shift(n)
    A = MatrixTuple([k * C for k in range(1, m + 1)])
    B = MatrixTuple([k * N for k in range(1, m + 1)])
    return A, B
