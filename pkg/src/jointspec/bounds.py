"""Relative perturbation bounds for joint eigenvalues of commuting tuples.

Three bounds are certified. For ``B = A + E`` with every ``A^(k)``
nonsingular, the left-hand side is

    min_pi  sum_j sum_k |(alpha_j^(k) - beta_pi(j)^(k)) / alpha_j^(k)|^2

and the right-hand sides are

* ``normal``: ``sum_k ||A^(k)^-1 E^(k)||_F^2`` (both tuples normal),
* ``remark``: ``n * sum_k ||A^(k)^-1||^2 ||E^(k)||_F^2`` (B only commuting),
* ``diagonalizable``: ``kappa(P)^2 kappa(Q)^2 * sum_k ||A^(k)^-1 E^(k)||_F^2``.

The minimizing permutation is found with a linear assignment solver, so a
report with ``lhs <= rhs`` certifies the existential statement.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla

from . import kernels
from .errors import NotNormal, NotOrdered, ZeroEigenvalue
from .joint_spectrum import (
    DEFAULT_TOLERANCES,
    BirkhoffDecomposition,
    HypothesisReport,
    JointSpectrum,
    OverlapMatrix,
    Tolerances,
    as_tuple,
    birkhoff_decompose,
    check_hypotheses,
    common_schur,
    diagonalize_general,
    overlap_matrix,
    simultaneous_diagonalize,
)
from .matrix_core import (
    SINGULAR_RTOL,
    as_matrix,
    condition_number,
    dagger,
    frobenius_norm,
    inverse,
    normality_defect,
    operator_norm,
    solve,
)

BOUND_KINDS = ("normal", "remark", "diagonalizable")
_ALIASES = {"diag": "diagonalizable"}


def relative_cost_matrix(alpha, beta) -> np.ndarray:
    """``cost[j, l] = sum_k |(alpha[j, k] - beta[l, k]) / alpha[j, k]|^2``."""
    alpha = np.atleast_2d(np.asarray(alpha, dtype=np.complex128))
    beta = np.atleast_2d(np.asarray(beta, dtype=np.complex128))
    if alpha.shape != beta.shape:
        raise ValueError(f"eigenvalue arrays of shapes {alpha.shape} and {beta.shape}")
    mod = np.abs(alpha)
    floor = SINGULAR_RTOL * mod.max(axis=0)
    bad = np.argwhere((mod <= floor) | (mod == 0))
    if len(bad):
        j, k = bad[0]
        raise ZeroEigenvalue(int(j), int(k), complex(alpha[j, k]))
    rel = (alpha[:, None, :] - beta[None, :, :]) / alpha[:, None, :]
    return np.sum(rel.real ** 2 + rel.imag ** 2, axis=2)


def _assignment_cost(cost, perm) -> float:
    total = 0.0
    for j in range(len(perm)):
        total += float(cost[j, perm[j]])
    return total


def optimal_matching(cost):
    """Minimum-cost assignment: ``(perm, total)`` with ``perm[j]`` matched to row ``j``."""
    cost = np.asarray(cost, dtype=np.float64)
    perm = np.asarray(kernels.lap_solve(cost), dtype=np.int64)
    return perm, _assignment_cost(cost, perm)


def brute_force_matching(cost):
    """Exhaustive search over all ``n!`` permutations; intended as a test oracle."""
    cost = np.asarray(cost, dtype=np.float64)
    n = cost.shape[0]
    if n > 9:
        raise ValueError("brute force matching is limited to n <= 9")
    best, best_perm = np.inf, None
    for perm in itertools.permutations(range(n)):
        total = _assignment_cost(cost, perm)
        if total < best:
            best, best_perm = total, perm
    return np.array(best_perm, dtype=np.int64), best


def _perturbation(A, B):
    A = as_tuple(A)
    B = as_tuple(B)
    return A, (B - A)


def normal_bound_rhs(A, B) -> float:
    A, E = _perturbation(A, B)
    return float(sum(frobenius_norm(solve(A[k], E[k])) ** 2 for k in range(A.m)))


def remark_bound_rhs(A, B) -> float:
    A, E = _perturbation(A, B)
    return float(A.n * sum(operator_norm(inverse(A[k])) ** 2 * frobenius_norm(E[k]) ** 2
                           for k in range(A.m)))


def diag_bound_rhs(A, B, P, Q) -> float:
    return condition_number(P) ** 2 * condition_number(Q) ** 2 * normal_bound_rhs(A, B)


@dataclass
class BoundReport:
    bound_kind: str
    permutation: np.ndarray
    lhs: float
    rhs: float
    tolerance: float
    seed: int
    hypotheses: dict
    alpha: np.ndarray
    beta: np.ndarray
    overlap: Optional[OverlapMatrix] = None
    birkhoff: Optional[BirkhoffDecomposition] = None
    details: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + self.tolerance

    @property
    def sqrt_lhs(self) -> float:
        return float(np.sqrt(self.lhs))

    @property
    def sqrt_rhs(self) -> float:
        return float(np.sqrt(self.rhs))

    def to_dict(self, tolerances: Tolerances = DEFAULT_TOLERANCES) -> dict:
        """ReportFile payload; the permutation is 1-indexed."""
        out = {
            "bound_kind": self.bound_kind,
            "permutation": [int(p) + 1 for p in self.permutation],
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
            "sqrt_lhs": self.sqrt_lhs,
            "sqrt_rhs": self.sqrt_rhs,
            "verification_tolerance": self.tolerance,
            "hypotheses": self.hypotheses,
            "tolerances": tolerances.to_dict(),
            "seed": self.seed,
            "details": self.details,
        }
        if self.overlap is not None:
            out["overlap_stochasticity_defect"] = self.overlap.stochasticity_defect()
        if self.birkhoff is not None:
            out["birkhoff_terms"] = len(self.birkhoff.permutations)
            out["birkhoff_reconstruction_error"] = float(
                np.abs(self.birkhoff.reconstruct() - self.overlap.w).max())
        return out


def _normal_surrogates(PQ_inv: np.ndarray, alpha, beta):
    """Spectra of ``M = U^* D1 U`` and ``N = V^* D2 V`` where ``P Q^-1 = U S V^*``.

    These are the normal tuples the diagonalizable case reduces to; their
    eigenbases are the columns of ``U^*`` and ``V^*``.
    """
    U, _, Vh = sla.svd(PQ_inv)
    M_spec = JointSpectrum(alpha, dagger(U), "unitary", 0.0)
    N_spec = JointSpectrum(beta, Vh, "unitary", 0.0)
    return M_spec, N_spec


def verify_bound(A, B, kind: str = "normal", seed: int = 0,
                 tolerances: Tolerances = DEFAULT_TOLERANCES,
                 decompose: bool = True) -> BoundReport:
    """Check one of the three relative bounds for the pair ``(A, B)``.

    Hypotheses are checked and enforced first; violations raise the matching
    :class:`~jointspec.errors.HypothesisError`. With ``decompose=True`` the
    overlap matrix of the two eigenbases and its Birkhoff decomposition are
    attached to the report (normal and diagonalizable kinds).
    """
    kind = _ALIASES.get(kind, kind)
    if kind not in BOUND_KINDS:
        raise ValueError(f"unknown bound kind {kind!r}; expected one of {BOUND_KINDS}")
    A = as_tuple(A)
    B = as_tuple(B)
    rng = np.random.default_rng(seed)
    hyp_a = check_hypotheses(A, require_normal=kind in ("normal", "remark"),
                             require_nonsingular=True, tolerances=tolerances)
    hyp_b = check_hypotheses(B, require_normal=kind == "normal", tolerances=tolerances)
    hypotheses = {"A": hyp_a.to_dict(), "B": hyp_b.to_dict()}
    hyp_a.enforce("A")
    hyp_b.enforce("B")

    overlap = birkhoff = None
    details = {}
    if kind == "normal":
        sa = simultaneous_diagonalize(A, rng, tolerances)
        sb = simultaneous_diagonalize(B, rng, tolerances)
        alpha, beta = sa.eigenvalues, sb.eigenvalues
        rhs = normal_bound_rhs(A, B)
        if decompose:
            overlap = overlap_matrix(sa, sb)
        details["residuals"] = [sa.residual, sb.residual]
    elif kind == "remark":
        sa = simultaneous_diagonalize(A, rng, tolerances)
        tb = common_schur(B, rng, tolerances)
        alpha, beta = sa.eigenvalues, tb.eigenvalues
        rhs = remark_bound_rhs(A, B)
        details["residuals"] = [sa.residual, tb.residual]
    else:
        sa = diagonalize_general(A, rng, tolerances)
        sb = diagonalize_general(B, rng, tolerances)
        alpha, beta = sa.eigenvalues, sb.eigenvalues
        # P A P^-1 = diag: P is the inverse of the eigenvector matrix.
        P, Q = sa.inverse_transform, sb.inverse_transform
        kp, kq = condition_number(P), condition_number(Q)
        base = normal_bound_rhs(A, B)
        rhs = kp ** 2 * kq ** 2 * base
        details.update(kappa_P=kp, kappa_Q=kq, normal_rhs=base,
                       residuals=[sa.residual, sb.residual],
                       transforms="as returned by diagonalize_general; not optimized over diagonalizers")
        if decompose:
            M_spec, N_spec = _normal_surrogates(P @ sb.transform, alpha, beta)
            overlap = overlap_matrix(M_spec, N_spec)

    cost = relative_cost_matrix(alpha, beta)
    perm, lhs = optimal_matching(cost)
    if overlap is not None:
        birkhoff = birkhoff_decompose(overlap, tolerances)
    return BoundReport(
        bound_kind=kind, permutation=perm, lhs=lhs, rhs=rhs,
        tolerance=tolerances.verification * (1.0 + rhs), seed=seed,
        hypotheses=hypotheses, alpha=alpha, beta=beta,
        overlap=overlap, birkhoff=birkhoff, details=details,
    )


@dataclass(frozen=True)
class LemmaCheck:
    lhs: float
    rhs: float
    holds: bool


def lemma_sigma_check(M, N, sigma, normal_rtol: float = 1e-8, atol: float = 1e-10) -> LemmaCheck:
    """Compare ``||M Sigma N - Sigma||_F`` with ``sigma_n ||M N - I||_F``.

    ``holds`` is ``lhs >= rhs - atol``. The inequality is not universal for
    arbitrary normal ``M``, ``N``; this routine only evaluates it.
    """
    M = as_matrix(M)
    N = as_matrix(N)
    s = np.asarray(sigma, dtype=np.float64)
    n = M.shape[0]
    if N.shape != M.shape or s.shape != (n,):
        raise ValueError(f"incompatible shapes {M.shape}, {N.shape}, {s.shape}")
    for name, X in (("M", M), ("N", N)):
        if normality_defect(X) > normal_rtol * max(frobenius_norm(X) ** 2, 1e-300):
            raise NotNormal(f"{name} is not normal (defect {normality_defect(X):.3e})")
    if np.any(s < 0) or np.any(np.diff(s) > 0):
        raise NotOrdered("sigma must be nonnegative and non-increasing")
    S = np.diag(s).astype(np.complex128)
    lhs = frobenius_norm(M @ S @ N - S)
    rhs = float(s[-1]) * frobenius_norm(M @ N - np.eye(n))
    return LemmaCheck(lhs, rhs, lhs >= rhs - atol)


def hypothesis_summary(report: HypothesisReport) -> str:
    if report.passed:
        return "all requested checks passed"
    return "; ".join(report.failures)
