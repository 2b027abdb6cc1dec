"""Clifford algebra R_(m) and operators on C^n (x) R_(m).

Basis blades ``e_S`` are encoded as bitmasks: bit ``j-1`` is set when
generator ``e_j`` belongs to ``S``, so ``e_phi`` is mask ``0``. Generators
anticommute and square to ``-1``. Containers store only nonzero terms, keyed
by mask.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from . import kernels
from .errors import CapacityExceeded, DimensionMismatch, GeneratorCountMismatch
from .matrix_core import frobenius_norm

DEFAULT_MATERIALIZE_LIMIT = 4096


@dataclass(frozen=True, order=True)
class BasisBlade:
    m: int
    mask: int

    def __post_init__(self):
        if self.m < 0 or not 0 <= self.mask < (1 << self.m):
            raise ValueError(f"mask {self.mask} is not a blade of R_({self.m})")

    @classmethod
    def from_generators(cls, m: int, *generators: int) -> "BasisBlade":
        """Blade ``e_{s1} e_{s2} ...`` for distinct 1-based generator indices."""
        mask = 0
        for g in generators:
            if not 1 <= g <= m:
                raise ValueError(f"generator {g} outside 1..{m}")
            if mask >> (g - 1) & 1:
                raise ValueError(f"generator {g} repeated")
            mask |= 1 << (g - 1)
        return cls(m, mask)

    @property
    def generators(self) -> Tuple[int, ...]:
        return tuple(j + 1 for j in range(self.m) if self.mask >> j & 1)

    @property
    def grade(self) -> int:
        return bin(self.mask).count("1")

    def __str__(self):
        if self.mask == 0:
            return "e_phi"
        return "e_" + "".join(str(g) for g in self.generators)


def blade_product(S: BasisBlade, T: BasisBlade) -> Tuple[int, BasisBlade]:
    """Return ``(sign, R)`` with ``e_S e_T = sign * e_R``."""
    if S.m != T.m:
        raise GeneratorCountMismatch(f"blades of R_({S.m}) and R_({T.m})")
    return kernels.blade_sign(S.mask, T.mask), BasisBlade(S.m, S.mask ^ T.mask)


def _check_m(a, b):
    if a.m != b.m:
        raise GeneratorCountMismatch(f"R_({a.m}) vs R_({b.m})")


@dataclass(frozen=True)
class CliffordElement:
    """Real multivector ``sum_S alpha_S e_S``."""

    m: int
    coeffs: Dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mask, c in self.coeffs.items():
            mask = mask.mask if isinstance(mask, BasisBlade) else int(mask)
            if not 0 <= mask < (1 << self.m):
                raise ValueError(f"mask {mask} is not a blade of R_({self.m})")
            if c != 0:
                clean[mask] = float(c)
        object.__setattr__(self, "coeffs", clean)

    def __getitem__(self, mask) -> float:
        mask = mask.mask if isinstance(mask, BasisBlade) else mask
        return self.coeffs.get(mask, 0.0)

    def __mul__(self, other: "CliffordElement") -> "CliffordElement":
        _check_m(self, other)
        out: Dict[int, float] = {}
        for S, a in self.coeffs.items():
            for T, b in other.coeffs.items():
                R = S ^ T
                out[R] = out.get(R, 0.0) + kernels.blade_sign(S, T) * a * b
        return CliffordElement(self.m, out)


def element_inner_product(a: CliffordElement, b: CliffordElement) -> float:
    _check_m(a, b)
    return sum(c * b[S] for S, c in a.coeffs.items())


@dataclass(frozen=True)
class CliffordVector:
    """Element ``sum_S x_S (x) e_S`` of C^n (x) R_(m)."""

    n: int
    m: int
    components: Dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mask, x in self.components.items():
            mask = mask.mask if isinstance(mask, BasisBlade) else int(mask)
            if not 0 <= mask < (1 << self.m):
                raise ValueError(f"mask {mask} is not a blade of R_({self.m})")
            x = np.asarray(x, dtype=np.complex128)
            if x.shape != (self.n,):
                raise DimensionMismatch(f"component at mask {mask} has shape {x.shape}, expected ({self.n},)")
            if np.any(x):
                clean[mask] = x
        object.__setattr__(self, "components", clean)

    def to_array(self) -> np.ndarray:
        """Coordinates in the basis ``x_r (x) e_T`` ordered by ``T * n + r``."""
        out = np.zeros((1 << self.m) * self.n, dtype=np.complex128)
        for T, x in self.components.items():
            out[T * self.n:(T + 1) * self.n] = x
        return out

    @classmethod
    def from_array(cls, n: int, m: int, data) -> "CliffordVector":
        data = np.asarray(data, dtype=np.complex128).reshape(1 << m, n)
        return cls(n, m, {T: data[T] for T in range(1 << m)})

    def norm(self) -> float:
        return float(np.sqrt(sum(np.vdot(x, x).real for x in self.components.values())))


def vector_inner_product(x: CliffordVector, y: CliffordVector) -> complex:
    """``sum_S <x_S, y_S>``, conjugate-linear in ``x``."""
    _check_m(x, y)
    if x.n != y.n:
        raise DimensionMismatch(f"n = {x.n} vs {y.n}")
    return complex(sum(np.vdot(v, y.components[S]) for S, v in x.components.items() if S in y.components))


@dataclass(frozen=True)
class CliffordOperator:
    """Element ``sum_S A_S (x) e_S`` of M_n (x) R_(m)."""

    n: int
    m: int
    blocks: Dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mask, A in self.blocks.items():
            mask = mask.mask if isinstance(mask, BasisBlade) else int(mask)
            if not 0 <= mask < (1 << self.m):
                raise ValueError(f"mask {mask} is not a blade of R_({self.m})")
            A = np.asarray(A, dtype=np.complex128)
            if A.shape != (self.n, self.n):
                raise DimensionMismatch(f"block at mask {mask} has shape {A.shape}")
            if np.any(A):
                clean[mask] = clean.get(mask, 0) + A
        object.__setattr__(self, "blocks", clean)

    @classmethod
    def tensor(cls, P, blade: BasisBlade) -> "CliffordOperator":
        """The simple tensor ``P (x) e_S``."""
        P = np.asarray(P, dtype=np.complex128)
        return cls(P.shape[0], blade.m, {blade.mask: P})

    @classmethod
    def identity(cls, n: int, m: int) -> "CliffordOperator":
        return cls(n, m, {0: np.eye(n, dtype=np.complex128)})


def operator_apply(A: CliffordOperator, x: CliffordVector) -> CliffordVector:
    if A.m != x.m:
        raise DimensionMismatch(f"operator on R_({A.m}) applied to vector in R_({x.m})")
    if A.n != x.n:
        raise DimensionMismatch(f"operator of size {A.n} applied to vector of length {x.n}")
    out: Dict[int, np.ndarray] = {}
    for S, block in A.blocks.items():
        for T, v in x.components.items():
            R = S ^ T
            term = kernels.blade_sign(S, T) * (block @ v)
            out[R] = out[R] + term if R in out else term
    return CliffordVector(A.n, A.m, out)


def cliff(A) -> CliffordOperator:
    """``i * sum_j A^(j) (x) e_j`` for a matrix tuple (or a stack of matrices)."""
    mats = getattr(A, "matrices", A)
    mats = np.asarray(mats, dtype=np.complex128)
    m, n = mats.shape[0], mats.shape[1]
    return CliffordOperator(n, m, {1 << j: 1j * mats[j] for j in range(m)})


def materialize(A: CliffordOperator, limit: int = DEFAULT_MATERIALIZE_LIMIT) -> np.ndarray:
    """Dense ``(2^m n) x (2^m n)`` matrix of ``A``; blade blocks in increasing mask order."""
    size = (1 << A.m) * A.n
    if size > limit:
        raise CapacityExceeded(f"materialized size 2^{A.m} * {A.n} = {size} exceeds limit {limit}")
    if not A.blocks:
        return np.zeros((size, size), dtype=np.complex128)
    masks = np.fromiter(A.blocks.keys(), dtype=np.int64)
    blocks = np.stack(list(A.blocks.values()))
    return kernels.materialize(masks, blocks, A.m, A.n)


def clifford_frobenius_norm(A: CliffordOperator, limit: int = DEFAULT_MATERIALIZE_LIMIT) -> float:
    """Frobenius norm of the materialized operator."""
    return frobenius_norm(materialize(A, limit))


def structured_frobenius_norm(A: CliffordOperator) -> float:
    """Same value as :func:`clifford_frobenius_norm` without materializing.

    Each block appears with sign +-1 in exactly ``2^m`` positions of the
    dense matrix.
    """
    return float(np.sqrt((1 << A.m) * sum(frobenius_norm(B) ** 2 for B in A.blocks.values())))


def tuple_frobenius_identity(A) -> float:
    """``sqrt(2^m * sum_k ||A^(k)||_F^2)``, the closed form of ``||Cliff(A)||_F``."""
    mats = np.asarray(getattr(A, "matrices", A))
    return float(np.sqrt((1 << mats.shape[0]) * sum(frobenius_norm(M) ** 2 for M in mats)))


def clifford_trace(A: CliffordOperator) -> complex:
    """Trace of ``A`` on C^n (x) R_(m): only the ``e_phi`` block contributes."""
    scalar = A.blocks.get(0)
    if scalar is None:
        return 0j
    return complex((1 << A.m) * np.trace(scalar))
