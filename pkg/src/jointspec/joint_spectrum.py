"""Commuting matrix tuples and their joint spectra.

Joint eigenvalues are obtained from a random real combination
``H = sum_k c_k A^(k)`` of the tuple: a basis that diagonalizes (or, for
:func:`common_schur`, triangularizes) ``H`` does the same to every member
once ``H`` separates the joint eigenvalues. When the combination leaves
clusters of nearly equal eigenvalues, the tuple is compressed onto each
cluster and the procedure recurses with a fresh combination.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from . import kernels
from .errors import (
    DiagonalizationFailed,
    DimensionMismatch,
    KindMismatch,
    MatchingNotFound,
    NonsingularityFailed,
    NotCommuting,
    NotDiagonalizable,
    NotDoublyStochastic,
    NotNormal,
)
from .matrix_core import (
    SINGULAR_RTOL,
    as_matrix,
    commutator_norm,
    dagger,
    frobenius_norm,
    normality_defect,
    unitarity_defect,
)

MAX_RETRIES = 20


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds; every value is relative to the data's scale."""

    commutation: float = 1e-8
    normality: float = 1e-8
    diagonalization: float = 1e-7
    cluster: float = 1e-8
    singular: float = SINGULAR_RTOL
    max_eigvec_condition: float = 1e10
    birkhoff_cutoff: float = 1e-10
    birkhoff_residue: float = 1e-8
    verification: float = 1e-8

    def to_dict(self):
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class MatrixTuple:
    """An m-tuple of n x n complex matrices.

    ``basis`` and ``diagonals`` are optional construction metadata left by the
    generators (a transform ``S`` with ``A^(k) = S diag(diagonals[k]) S^-1``).
    """

    __slots__ = ("matrices", "basis", "diagonals")

    def __init__(self, matrices, basis=None, diagonals=None):
        mats = [as_matrix(M) for M in matrices]
        if not mats:
            raise DimensionMismatch("a matrix tuple needs at least one matrix")
        n = mats[0].shape[0]
        if any(M.shape != (n, n) for M in mats):
            raise DimensionMismatch(f"tuple members have shapes {[M.shape for M in mats]}")
        stack = np.stack(mats)
        stack.setflags(write=False)
        object.__setattr__(self, "matrices", stack)
        if basis is not None:
            basis = np.array(basis, dtype=np.complex128)
            basis.setflags(write=False)
        if diagonals is not None:
            diagonals = np.array(diagonals, dtype=np.complex128)
            diagonals.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "diagonals", diagonals)

    def __setattr__(self, name, value):
        raise AttributeError("MatrixTuple is immutable")

    @property
    def m(self) -> int:
        return self.matrices.shape[0]

    @property
    def n(self) -> int:
        return self.matrices.shape[1]

    def __len__(self):
        return self.m

    def __iter__(self):
        return iter(self.matrices)

    def __getitem__(self, k):
        return self.matrices[k]

    def __sub__(self, other: "MatrixTuple") -> "MatrixTuple":
        if self.matrices.shape != other.matrices.shape:
            raise DimensionMismatch(f"{self.matrices.shape} vs {other.matrices.shape}")
        return MatrixTuple(self.matrices - other.matrices)

    def __add__(self, other: "MatrixTuple") -> "MatrixTuple":
        if self.matrices.shape != other.matrices.shape:
            raise DimensionMismatch(f"{self.matrices.shape} vs {other.matrices.shape}")
        return MatrixTuple(self.matrices + other.matrices)

    def scaled(self, c) -> "MatrixTuple":
        return MatrixTuple(c * self.matrices)

    def norms(self) -> np.ndarray:
        return np.array([frobenius_norm(M) for M in self.matrices])

    def __repr__(self):
        return f"MatrixTuple(m={self.m}, n={self.n})"


def as_tuple(A) -> MatrixTuple:
    return A if isinstance(A, MatrixTuple) else MatrixTuple(A)


# ---------------------------------------------------------------- hypotheses


@dataclass
class HypothesisReport:
    """Diagnostics for one tuple. ``None`` verdicts were not requested."""

    n: int
    m: int
    max_commutator: float
    commutator_tolerance: float
    commuting: bool
    max_normality_defect: float
    normal: Optional[bool]
    min_singular_value: float
    min_relative_singular_value: float
    nonsingular: Optional[bool]
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self):
        return asdict(self)

    def enforce(self, label: str = "tuple"):
        """Raise the error matching the first failed check."""
        if not self.commuting:
            raise NotCommuting(f"{label}: {self.failures[0]}")
        if self.normal is False:
            raise NotNormal(f"{label}: normality check failed (max defect {self.max_normality_defect:.3e})")
        if self.nonsingular is False:
            raise NonsingularityFailed(
                f"{label}: nonsingularity check failed (min relative singular value "
                f"{self.min_relative_singular_value:.3e})"
            )


def check_hypotheses(A, require_normal=False, require_nonsingular=False,
                     tolerances: Tolerances = DEFAULT_TOLERANCES) -> HypothesisReport:
    A = as_tuple(A)
    norms = A.norms()
    scale = float(norms.max())
    comm_tol = tolerances.commutation * scale * scale
    max_comm = 0.0
    worst_pair = None
    for k in range(A.m):
        for l in range(k + 1, A.m):
            c = commutator_norm(A[k], A[l])
            if c > max_comm:
                max_comm, worst_pair = c, (k + 1, l + 1)
    failures = []
    commuting = max_comm <= comm_tol
    if not commuting:
        failures.append(f"commutation check failed: ||[A{worst_pair[0]}, A{worst_pair[1]}]||_F = "
                        f"{max_comm:.3e} > {comm_tol:.3e}")

    defects = np.array([normality_defect(M) for M in A])
    normal = None
    if require_normal:
        bad = [k + 1 for k in range(A.m) if defects[k] > tolerances.normality * norms[k] ** 2]
        normal = not bad
        if bad:
            failures.append(f"normality check failed for member(s) {bad}")

    svals = [sla.svdvals(M) for M in A]
    min_sv = float(min(s[-1] for s in svals))
    rel = [s[-1] / s[0] if s[0] > 0 else 0.0 for s in svals]
    nonsingular = None
    if require_nonsingular:
        bad = [k + 1 for k in range(A.m) if rel[k] <= tolerances.singular]
        nonsingular = not bad
        if bad:
            failures.append(f"nonsingularity check failed for member(s) {bad}")
    return HypothesisReport(
        n=A.n, m=A.m, max_commutator=max_comm, commutator_tolerance=comm_tol, commuting=commuting,
        max_normality_defect=float(defects.max()), normal=normal,
        min_singular_value=min_sv, min_relative_singular_value=float(min(rel)), nonsingular=nonsingular,
        failures=failures,
    )


# ---------------------------------------------------------------- spectra


def canonical_order(eigenvalues: np.ndarray) -> np.ndarray:
    """Row order sorting joint eigenvalues lexicographically by (re, im) per coordinate.

    Keys are rounded to 1e-9 of each coordinate's scale so that rounding
    noise cannot decide between values that agree to working accuracy.
    """
    ev = np.asarray(eigenvalues)
    scales = np.maximum(np.abs(ev).max(axis=0), 1e-300) if ev.size else np.ones(ev.shape[1])
    keys = []
    for j in range(ev.shape[0]):
        key = []
        for k in range(ev.shape[1]):
            z = ev[j, k] / scales[k]
            key.append(round(z.real, 9) + 0.0)
            key.append(round(z.imag, 9) + 0.0)
        keys.append(tuple(key))
    return np.array(sorted(range(ev.shape[0]), key=lambda j: keys[j]), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class JointSpectrum:
    """Joint eigenvalues ``eigenvalues[j] = (alpha_j^(1), ..., alpha_j^(m))``.

    ``transform`` has the joint eigenvectors as columns, so
    ``transform^-1 A^(k) transform = diag(eigenvalues[:, k])``.
    """

    eigenvalues: np.ndarray
    transform: np.ndarray
    transform_kind: str
    residual: float

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def m(self) -> int:
        return self.eigenvalues.shape[1]

    @cached_property
    def projectors(self) -> np.ndarray:
        """Rank-one orthogonal projectors ``u_j u_j^*`` (unitary kind only)."""
        if self.transform_kind != "unitary":
            raise KindMismatch("spectral projectors are only defined for unitary transforms")
        U = self.transform
        return np.einsum("ij,kj->jik", U, U.conj())

    @cached_property
    def inverse_transform(self) -> np.ndarray:
        if self.transform_kind == "unitary":
            return dagger(self.transform)
        return sla.inv(self.transform)


def _strict_lower(D):
    return np.tril(D, -1)


def _offdiag_norms(D):
    return np.array([frobenius_norm(Dk - np.diag(np.diag(Dk))) for Dk in D])


def _clusters(w, threshold) -> List[np.ndarray]:
    """Single-linkage clusters of the complex values ``w``."""
    n = len(w)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(w[i] - w[j]) <= threshold:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.array(g) for g in groups.values()]


class _Budget:
    def __init__(self, retries):
        self.left = retries

    def spend(self):
        if self.left <= 0:
            raise DiagonalizationFailed(f"no diagonalizing basis after {MAX_RETRIES} random combinations")
        self.left -= 1


def _unitary_basis(mats, tol_abs, rng, budget, cluster_rtol):
    m, n, _ = mats.shape
    if n == 1:
        return np.eye(1, dtype=np.complex128)
    scale = max(max(frobenius_norm(M) for M in mats), 1e-300)
    while True:
        budget.spend()
        c = rng.uniform(-1.0, 1.0, size=m)
        T, Z = sla.schur(np.tensordot(c, mats, axes=1), output="complex")
        D = dagger(Z) @ mats @ Z
        if np.all(_offdiag_norms(D) <= tol_abs):
            return Z
        groups = _clusters(np.diag(T), cluster_rtol * scale)
        if len(groups) == 1 or all(len(g) == 1 for g in groups):
            continue
        for g in groups:
            if len(g) > 1:
                sub = D[:, g][:, :, g]
                Z[:, g] = Z[:, g] @ _unitary_basis(sub, tol_abs, rng, budget, cluster_rtol)
        D = dagger(Z) @ mats @ Z
        if np.all(_offdiag_norms(D) <= tol_abs):
            return Z


def _finish(mats, transform, kind, residual_fn):
    Tinv = dagger(transform) if kind == "unitary" else sla.inv(transform)
    D = Tinv @ mats @ transform
    eig = np.stack([np.diag(Dk) for Dk in D], axis=1)
    order = canonical_order(eig)
    return JointSpectrum(
        eigenvalues=eig[order],
        transform=transform[:, order],
        transform_kind=kind,
        residual=float(residual_fn(D).max()),
    )


def simultaneous_diagonalize(A, seed=0, tolerances: Tolerances = DEFAULT_TOLERANCES) -> JointSpectrum:
    """Unitary joint eigenbasis of a commuting tuple of normal matrices.

    ``seed`` may be an integer or a ``numpy.random.Generator``; it drives the
    random combinations and makes the result reproducible.
    """
    A = as_tuple(A)
    report = check_hypotheses(A, require_normal=True, tolerances=tolerances)
    report.enforce("tuple")
    tol_abs = tolerances.diagonalization * np.maximum(A.norms(), 1e-300)
    Z = _unitary_basis(np.array(A.matrices), tol_abs, _rng(seed), _Budget(MAX_RETRIES), tolerances.cluster)
    spec = _finish(A.matrices, Z, "unitary", _offdiag_norms)
    if unitarity_defect(spec.transform) > 1e-10:
        raise DiagonalizationFailed(f"transform deviates from unitary by {unitarity_defect(spec.transform):.3e}")
    return spec


def _normalize_columns(V):
    return V / np.linalg.norm(V, axis=0, keepdims=True)


def _general_basis(mats, tol_abs, rng, budget, tols: Tolerances):
    m, n, _ = mats.shape
    if n == 1:
        return np.eye(1, dtype=np.complex128)
    scale = max(max(frobenius_norm(M) for M in mats), 1e-300)
    ill_conditioned = 0
    while True:
        budget.spend()
        c = rng.uniform(-1.0, 1.0, size=m)
        w, V = sla.eig(np.tensordot(c, mats, axes=1))
        V = _normalize_columns(V)
        s = sla.svdvals(V)
        if s[-1] * tols.max_eigvec_condition < s[0]:
            ill_conditioned += 1
            if ill_conditioned >= 3:
                raise NotDiagonalizable(
                    f"eigenvector matrix condition number {s[0] / max(s[-1], 1e-300):.3e} "
                    f"exceeds {tols.max_eigvec_condition:g}"
                )
            continue
        D = np.linalg.solve(V, mats @ V)
        if np.all(_offdiag_norms(D) <= tol_abs):
            return V
        groups = _clusters(w, tols.cluster * scale)
        if len(groups) == 1 or all(len(g) == 1 for g in groups):
            continue
        for g in groups:
            if len(g) > 1:
                sub = D[:, g][:, :, g]
                V[:, g] = V[:, g] @ _general_basis(sub, tol_abs, rng, budget, tols)
        V = _normalize_columns(V)
        D = np.linalg.solve(V, mats @ V)
        if np.all(_offdiag_norms(D) <= tol_abs):
            return V


def diagonalize_general(A, seed=0, tolerances: Tolerances = DEFAULT_TOLERANCES) -> JointSpectrum:
    """Joint eigenbasis of a commuting tuple of diagonalizable matrices.

    The transform has unit-norm columns. Defective tuples raise
    :class:`NotDiagonalizable` once the eigenvector matrix condition number
    exceeds ``tolerances.max_eigvec_condition``.
    """
    A = as_tuple(A)
    report = check_hypotheses(A, tolerances=tolerances)
    report.enforce("tuple")
    tol_abs = tolerances.diagonalization * np.maximum(A.norms(), 1e-300)
    V = _general_basis(np.array(A.matrices), tol_abs, _rng(seed), _Budget(MAX_RETRIES), tolerances)
    s = sla.svdvals(V)
    if s[-1] * tolerances.max_eigvec_condition < s[0]:
        raise NotDiagonalizable(f"eigenvector matrix condition number {s[0] / s[-1]:.3e}")
    return _finish(A.matrices, V, "general", _offdiag_norms)


@dataclass(frozen=True, eq=False)
class TriangularForm:
    """Common Schur form ``transform^* B^(k) transform = triangular[k]`` (upper).

    ``eigenvalues`` are the diagonals, rows in canonical order;
    ``order[j]`` is the diagonal position of row ``j``.
    """

    eigenvalues: np.ndarray
    transform: np.ndarray
    triangular: np.ndarray
    order: np.ndarray
    residual: float


def _lower_norms(D):
    return np.array([frobenius_norm(_strict_lower(Dk)) for Dk in D])


def _common_eigenvector(mats, null_rtol):
    n = mats.shape[1]
    W = np.eye(n, dtype=np.complex128)
    for M in mats:
        R = dagger(W) @ M @ W
        lam = sla.eigvals(R)[0]
        _, s, Vh = sla.svd(R - lam * np.eye(R.shape[0]))
        thr = null_rtol * max(frobenius_norm(M), 1e-300)
        keep = max(1, int(np.sum(s <= thr)))
        W = W @ dagger(Vh[-keep:])
    return W[:, 0] / np.linalg.norm(W[:, 0])


def _deflation_basis(mats, null_rtol):
    """Common triangularizing basis built one common eigenvector at a time."""
    n = mats.shape[1]
    if n == 1:
        return np.eye(1, dtype=np.complex128)
    x = _common_eigenvector(mats, null_rtol)
    Q, _ = np.linalg.qr(np.column_stack([x, np.eye(n, dtype=np.complex128)]))
    Q = Q[:, :n]
    sub = (dagger(Q) @ mats @ Q)[:, 1:, 1:]
    Z = np.eye(n, dtype=np.complex128)
    Z[1:, 1:] = _deflation_basis(sub, null_rtol)
    return Q @ Z


def common_schur(B, seed=0, tolerances: Tolerances = DEFAULT_TOLERANCES) -> TriangularForm:
    """Unitary basis in which every member of a commuting tuple is upper triangular."""
    B = as_tuple(B)
    check_hypotheses(B, tolerances=tolerances).enforce("tuple")
    mats = np.array(B.matrices)
    tol_abs = tolerances.diagonalization * np.maximum(B.norms(), 1e-300)
    rng = _rng(seed)
    Z = None
    for _ in range(MAX_RETRIES):
        c = rng.uniform(-1.0, 1.0, size=B.m)
        _, Zc = sla.schur(np.tensordot(c, mats, axes=1), output="complex")
        if np.all(_lower_norms(dagger(Zc) @ mats @ Zc) <= tol_abs):
            Z = Zc
            break
    if Z is None:
        Z = _deflation_basis(mats, tolerances.cluster)
        Z, _ = np.linalg.qr(Z)
    T = dagger(Z) @ mats @ Z
    residual = _lower_norms(T)
    if not np.all(residual <= tol_abs):
        raise DiagonalizationFailed(f"no common triangular form (lower mass {residual.max():.3e})")
    eig = np.stack([np.diag(Tk) for Tk in T], axis=1)
    order = canonical_order(eig)
    return TriangularForm(eig[order], Z, T, order, float(residual.max()))


# ---------------------------------------------------------------- overlaps


@dataclass(frozen=True, eq=False)
class OverlapMatrix:
    """``w[i, j] = trace(P_i Q_j)`` for two families of rank-one projectors."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DimensionMismatch(f"overlap matrix must be square, got {w.shape}")
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    def stochasticity_defect(self) -> float:
        """Largest deviation of a row or column sum from one."""
        return float(max(np.abs(self.w.sum(axis=0) - 1).max(), np.abs(self.w.sum(axis=1) - 1).max()))

    def is_doubly_stochastic(self, tol=1e-8) -> bool:
        return (self.stochasticity_defect() <= tol
                and self.w.min() >= -1e-10 and self.w.max() <= 1 + 1e-10)


def overlap_matrix(P_spec: JointSpectrum, Q_spec: JointSpectrum) -> OverlapMatrix:
    if P_spec.transform_kind != "unitary" or Q_spec.transform_kind != "unitary":
        raise KindMismatch("overlap matrices need two unitary-kind spectra")
    if P_spec.n != Q_spec.n:
        raise DimensionMismatch(f"spectra of sizes {P_spec.n} and {Q_spec.n}")
    G = dagger(P_spec.transform) @ Q_spec.transform
    return OverlapMatrix(np.abs(G) ** 2)


@dataclass(frozen=True, eq=False)
class BirkhoffDecomposition:
    """``W = sum_s weights[s] * Perm(permutations[s])`` with ``Perm(p)[i, p[i]] = 1``."""

    weights: np.ndarray
    permutations: List[np.ndarray]

    @property
    def terms(self) -> List[Tuple[float, np.ndarray]]:
        return list(zip(self.weights.tolist(), self.permutations))

    def reconstruct(self) -> np.ndarray:
        n = len(self.permutations[0]) if self.permutations else 0
        W = np.zeros((n, n))
        rows = np.arange(n)
        for t, p in zip(self.weights, self.permutations):
            W[rows, p] += t
        return W


def _caratheodory(weights, perms, n):
    """Drop terms until at most (n-1)^2 + 1 remain, keeping the convex combination."""
    weights = list(weights)
    perms = list(perms)
    limit = (n - 1) ** 2 + 1
    rows = np.arange(n)
    while len(perms) > limit:
        k = len(perms)
        M = np.zeros((n * n + 1, k))
        for s, p in enumerate(perms):
            P = np.zeros((n, n))
            P[rows, p] = 1.0
            M[:-1, s] = P.ravel()
        M[-1] = 1.0
        z = sla.null_space(M)[:, 0]
        if z.max() <= 0:
            z = -z
        pos = z > 1e-14
        ratio = np.where(pos, np.asarray(weights) / np.where(pos, z, 1), np.inf)
        s_min = int(np.argmin(ratio))
        step = ratio[s_min]
        weights = [w - step * zi for w, zi in zip(weights, z)]
        weights[s_min] = 0.0
        keep = [s for s in range(k) if weights[s] > 1e-15]
        weights = [weights[s] for s in keep]
        perms = [perms[s] for s in keep]
    return weights, perms


def birkhoff_decompose(W, tolerances: Tolerances = DEFAULT_TOLERANCES) -> BirkhoffDecomposition:
    """Greedy Birkhoff-von Neumann decomposition of a doubly stochastic matrix."""
    O = W if isinstance(W, OverlapMatrix) else OverlapMatrix(W)
    if not O.is_doubly_stochastic(tolerances.birkhoff_residue):
        raise NotDoublyStochastic(f"row/column sums deviate from 1 by {O.stochasticity_defect():.3e}")
    n = O.n
    R = np.clip(O.w, 0.0, None)
    rows = np.arange(n)
    weights, perms = [], []
    while R.sum() >= tolerances.birkhoff_residue:
        perm = kernels.perfect_matching(R, tolerances.birkhoff_cutoff)
        if perm is None:
            raise MatchingNotFound(f"no perfect matching on the support (residual mass {R.sum():.3e})")
        perm = np.asarray(perm, dtype=np.int64)
        vals = R[rows, perm]
        t = float(vals.min())
        R[rows, perm] -= t
        R[rows[vals == t], perm[vals == t]] = 0.0
        R[R <= tolerances.birkhoff_cutoff] = 0.0
        weights.append(t)
        perms.append(perm)
    weights, perms = _caratheodory(weights, perms, n)
    return BirkhoffDecomposition(np.array(weights, dtype=np.float64), perms)


def projector_overlap(P_spec: JointSpectrum, Q_spec: JointSpectrum) -> np.ndarray:
    """``trace(P_i Q_j)`` evaluated from the projector matrices themselves."""
    P = P_spec.projectors
    Q = Q_spec.projectors
    return np.real(np.einsum("iab,jba->ij", P, Q))


def eigenvalue_multiset_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Max distance under the best pairing of two equally sized value lists."""
    a = np.asarray(a)
    b = np.asarray(b)
    C = np.abs(a[:, None] - b[None, :])
    perm = kernels.lap_solve(C ** 2)
    return float(C[np.arange(len(a)), perm].max())
