"""Pinching of B onto the commutant of A and the two-B closed forms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numeric import (
    DEFAULT_CLUSTER_TOL,
    ContractViolation,
    SpectralDecomposition,
    is_exact,
    mpow,
    psd_check,
    real_scalar,
    same_mode,
    spectral_decompose,
    trace,
    zeros_like,
)
from .report import InequalityReport
from .words import clustered_trace, word_average_from_polynomial


def _check_dims(B, S: SpectralDecomposition):
    B = np.asarray(B) if isinstance(B, np.ndarray) else np.asarray(B, dtype=complex)
    if B.shape != (S.dim, S.dim):
        raise ContractViolation(f"dimension mismatch: B is {B.shape}, A is {S.dim}x{S.dim}")
    if is_exact(B) != S.exact:
        raise ContractViolation("cannot mix exact and float matrices")
    return B


def pinch(B, S: SpectralDecomposition) -> np.ndarray:
    """E_A(B) = sum_k P_k B P_k over the spectral projectors of A."""
    B = _check_dims(B, S)
    out = zeros_like(B)
    for P in S.projectors:
        out = out + P @ B @ P
    return out


@dataclass(frozen=True, eq=False)
class PinchingDecomposition:
    pinched: np.ndarray
    complement: np.ndarray
    spectral: SpectralDecomposition


def decompose(B, S: SpectralDecomposition) -> PinchingDecomposition:
    B = _check_dims(B, S)
    D = pinch(B, S)
    return PinchingDecomposition(D, B - D, S)


def pinched_average(S: SpectralDecomposition, B, n: int, m: int):
    """Tr(A^n E_A(B)^m), summed eigenspace by eigenspace."""
    B = _check_dims(B, S)
    total = 0
    for lam, P in zip(S.eigenvalues, S.projectors):
        block = mpow(P @ B @ P, m) if m else P
        # (P B P)^m vanishes off the eigenspace, so its trace is the restricted one.
        total = total + lam**n * trace(P @ block)
    return real_scalar(total)


def noncommutative_gap(A, B, n: int, m: int, cluster_tol: float = DEFAULT_CLUSTER_TOL,
                       spectral: SpectralDecomposition | None = None):
    A, B = same_mode(A, B)
    S = spectral or spectral_decompose(A, cluster_tol)
    return word_average_from_polynomial(A, B, n, m) - pinched_average(S, B, n, m)


def h_poly(n: int, x, y):
    """sum_{r=0}^{n} x^r y^(n-r), by direct summation."""
    if n < 0:
        raise ContractViolation("n must be nonnegative")
    total = 0
    for r in range(n + 1):
        total += x**r * y ** (n - r)
    return total


def _adapted_basis(S: SpectralDecomposition, B):
    """Orthonormal eigenbasis of A that also diagonalises each compression P B P."""
    cols, values, cluster = [], [], []
    for k, (lam, P) in enumerate(zip(S.eigenvalues, S.projectors)):
        w, U = np.linalg.eigh(P)
        V = U[:, w > 0.5]
        _, W = np.linalg.eigh(V.conj().T @ B @ V)
        V = V @ W
        cols.append(V)
        values += [lam] * V.shape[1]
        cluster += [k] * V.shape[1]
    return np.hstack(cols), values, cluster


def two_b_closed_form(S: SpectralDecomposition, B, n: int):
    """(average, gap) for two letters B from the |b_ij|^2 expansion.

    average = sum_ij h_n(a_i, a_j) |b_ij|^2 / (n + 1), gap = the same sum over
    pairs in different eigenspaces.  Float mode works in an eigenbasis adapted
    to the compressions of B; exact mode uses the basis-free block form
    ||P_k B P_l||_F^2 = Tr(P_k B P_l B), which needs no square roots.
    """
    B = _check_dims(B, S)
    if n < 0:
        raise ContractViolation("n must be nonnegative")
    avg = gap = 0
    if S.exact:
        for k, (lk, Pk) in enumerate(zip(S.eigenvalues, S.projectors)):
            for ell, (ll, Pl) in enumerate(zip(S.eigenvalues, S.projectors)):
                term = h_poly(n, lk, ll) * trace(Pk @ B @ Pl @ B)
                avg += term
                if k != ell:
                    gap += term
        return Fraction(avg) / (n + 1), Fraction(gap) / (n + 1)
    V, a, cluster = _adapted_basis(S, B)
    W = np.abs(V.conj().T @ B @ V) ** 2
    d = len(a)
    for i in range(d):
        for j in range(d):
            term = h_poly(n, a[i], a[j]) * W[i, j]
            avg += term
            if cluster[i] != cluster[j]:
                gap += term
    return float(avg) / (n + 1), float(gap) / (n + 1)


def sandwich_check(A, B, n: int, tol: float = 1e-10, cluster_tol: float = DEFAULT_CLUSTER_TOL,
                   psd_tol: float = 1e-12) -> InequalityReport:
    """Pinched <= average <= clustered for two letters B; margins in the report."""
    A, B = same_mode(A, B)
    for name, M in (("A", A), ("B", B)):
        if not psd_check(M, psd_tol):
            raise ContractViolation(f"{name} is not positive semidefinite")
    S = spectral_decompose(A, cluster_tol)
    rep = InequalityReport(
        n=n, m=2, dim=A.shape[0], mode="exact" if is_exact(A) else "float",
        average=word_average_from_polynomial(A, B, n, 2),
        pinched_average=pinched_average(S, B, n, 2),
        clustered=clustered_trace(A, B, n, 2),
        tol=tol,
    )
    rep.checks = {"lower": not rep.pinching_violated, "upper": not rep.clustered_violated}
    return rep


def commutator_norm(A, D) -> float:
    C = A @ D - D @ A
    if is_exact(C):
        return float(max(abs(v) for v in C.flat))
    return float(np.max(np.abs(C)))

