"""Scalars, matrices, spectral decompositions and seeded samplers.

Matrices are plain numpy arrays.  Two scalar modes are supported:

* exact: ``dtype=object`` arrays of :class:`fractions.Fraction` holding real
  symmetric rational matrices;
* float: ``complex128`` arrays holding Hermitian matrices.

The mode of a matrix is read off its dtype (see :func:`is_exact`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

DEFAULT_CLUSTER_TOL = 1e-10
HERMITIAN_TOL = 1e-12


class ContractViolation(ValueError):
    """An operation was called outside its documented preconditions."""


class UnsupportedInput(ContractViolation):
    """The input is valid but cannot be handled in the requested mode."""


# ---------------------------------------------------------------------------
# construction and conversion


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (float, np.floating)):
        return Fraction(float(value))
    raise ContractViolation(f"cannot interpret {value!r} as a rational number")


def exact_matrix(rows) -> np.ndarray:
    """Build an exact (rational) matrix from nested rows of ints/strings/Fractions."""
    rows = [list(r) for r in rows]
    d = len(rows)
    if d == 0 or any(len(r) != d for r in rows):
        raise ContractViolation("matrix must be square and non-empty")
    out = np.empty((d, d), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out[i, j] = _to_fraction(v)
    return out


def float_matrix(rows) -> np.ndarray:
    out = np.array(rows, dtype=complex)
    if out.ndim != 2 or out.shape[0] != out.shape[1] or out.shape[0] == 0:
        raise ContractViolation("matrix must be square and non-empty")
    return out


def is_exact(M) -> bool:
    return isinstance(M, np.ndarray) and M.dtype == object


def as_matrix(M) -> np.ndarray:
    """Coerce array-likes to a square matrix in exact or float mode."""
    if isinstance(M, np.ndarray) and M.dtype == object:
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ContractViolation("matrix must be square")
        return M
    return float_matrix(M)


def to_float(M) -> np.ndarray:
    if is_exact(M):
        return np.array([[float(v) for v in row] for row in M], dtype=complex)
    return np.asarray(M, dtype=complex)


def to_exact(M) -> np.ndarray:
    """Convert to exact mode; float entries must be real."""
    if is_exact(M):
        return M
    M = np.asarray(M)
    if np.iscomplexobj(M) and np.any(M.imag != 0):
        raise UnsupportedInput("exact mode supports real symmetric matrices only")
    return exact_matrix(np.real(M).tolist())


def eye(d: int, exact: bool = False) -> np.ndarray:
    if exact:
        out = np.full((d, d), Fraction(0), dtype=object)
        for i in range(d):
            out[i, i] = Fraction(1)
        return out
    return np.eye(d, dtype=complex)


def zeros_like(M) -> np.ndarray:
    if is_exact(M):
        return np.full(M.shape, Fraction(0), dtype=object)
    return np.zeros(M.shape, dtype=complex)


def same_mode(M, N):
    """Raise unless M and N are square, of equal size and in the same mode."""
    M, N = as_matrix(M), as_matrix(N)
    if M.shape != N.shape:
        raise ContractViolation(f"dimension mismatch: {M.shape} vs {N.shape}")
    if is_exact(M) != is_exact(N):
        raise ContractViolation("cannot mix exact and float matrices")
    return M, N


def trace(M):
    """Trace as a Fraction (exact) or complex (float)."""
    t = np.trace(M)
    return _to_fraction(t) if is_exact(M) else complex(t)


def real_scalar(value):
    """Collapse a trace value to the real line: Fractions pass, complex -> float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return float(np.real(value))


def mpow(M, k: int) -> np.ndarray:
    if k == 0:
        return eye(M.shape[0], is_exact(M))
    return np.linalg.matrix_power(M, k)


def conj_t(M) -> np.ndarray:
    return M.T.copy() if is_exact(M) else M.conj().T


def norm(M) -> float:
    """Max absolute row sum; cheap stand-in for the spectral norm in tolerances."""
    if is_exact(M):
        return float(max(sum(abs(v) for v in row) for row in M))
    return float(np.max(np.sum(np.abs(M), axis=1)))


def is_hermitian(M) -> bool:
    M = as_matrix(M)
    if is_exact(M):
        return bool(np.all(M == M.T))
    return float(np.max(np.abs(M - M.conj().T))) <= HERMITIAN_TOL * norm(M)


def require_hermitian(M) -> np.ndarray:
    M = as_matrix(M)
    if not is_hermitian(M):
        raise ContractViolation("matrix is not Hermitian")
    return M


# ---------------------------------------------------------------------------
# exact linear algebra helpers


def det_exact(M) -> Fraction:
    """Determinant of a rational matrix by fraction-free-ish Gaussian elimination."""
    A = [[_to_fraction(v) for v in row] for row in M]
    d = len(A)
    det = Fraction(1)
    for c in range(d):
        p = next((r for r in range(c, d) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, d):
            f = A[r][c] / A[c][c]
            if f:
                for k in range(c, d):
                    A[r][k] -= f * A[c][k]
    return det


def inverse_exact(M) -> np.ndarray:
    d = M.shape[0]
    A = [[_to_fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(d)]
         for i, row in enumerate(M)]
    for c in range(d):
        p = next((r for r in range(c, d) if A[r][c] != 0), None)
        if p is None:
            raise ContractViolation("matrix is singular")
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [v / piv for v in A[c]]
        for r in range(d):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return exact_matrix([row[d:] for row in A])


def column_basis_exact(M) -> np.ndarray:
    """Pivot columns of M: a rational basis of its column space."""
    A = [[_to_fraction(v) for v in row] for row in M]
    rows, cols = len(A), len(A[0])
    pivots, r = [], 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(r + 1, rows):
            f = A[i][c] / A[r][c]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M[:, pivots]


def charpoly_exact(M) -> list[Fraction]:
    """Coefficients of det(tI - M), highest degree first (Faddeev-LeVerrier)."""
    d = M.shape[0]
    I = eye(d, exact=True)
    coeffs = [Fraction(1)]
    Mk = zeros_like(M)
    for k in range(1, d + 1):
        Mk = M @ Mk + coeffs[-1] * I
        coeffs.append(-trace(M @ Mk) / k)
    return coeffs


def rational_roots(coeffs: Sequence[Fraction]) -> list[Fraction] | None:
    """Roots with multiplicity if the polynomial splits over Q, else None."""
    import sympy

    t = sympy.Symbol("t")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], t)
    _, factors = poly.factor_list()
    roots = []
    for f, mult in factors:
        if f.degree() != 1:
            return None
        a, b = f.all_coeffs()
        r = -sympy.Rational(b) / sympy.Rational(a)
        roots.extend([Fraction(int(r.p), int(r.q))] * mult)
    return roots


# ---------------------------------------------------------------------------
# positivity


def psd_check(M, tol: float = 0.0) -> bool:
    """True iff the Hermitian matrix M is positive semidefinite.

    Float mode accepts eigenvalues down to ``-tol * max(1, norm(M))``.  Exact
    mode ignores ``tol``: for d <= 4 every principal minor is checked, above
    that the signs of the characteristic polynomial coefficients (a real
    symmetric matrix is PSD iff they alternate, zeros allowed).
    """
    M = require_hermitian(M)
    d = M.shape[0]
    if not is_exact(M):
        w = np.linalg.eigvalsh(M)
        return bool(w.min() >= -tol * max(1.0, norm(M)))
    if d <= 4:
        for k in range(1, d + 1):
            for idx in combinations(range(d), k):
                if det_exact(M[np.ix_(idx, idx)]) < 0:
                    return False
        return True
    coeffs = charpoly_exact(M)
    # det(tI - M) = sum_k c_k t^(d-k); PSD iff (-1)^k c_k >= 0.
    return all((-1) ** k * c >= 0 for k, c in enumerate(coeffs))


# ---------------------------------------------------------------------------
# spectral decomposition


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Distinct eigenvalues (descending) with orthogonal spectral projectors."""

    eigenvalues: tuple
    projectors: tuple

    def __post_init__(self):
        if len(self.eigenvalues) != len(self.projectors) or not self.projectors:
            raise ContractViolation("need one projector per eigenvalue")

    @property
    def exact(self) -> bool:
        return is_exact(self.projectors[0])

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def ranks(self) -> list[int]:
        return [int(round(float(real_scalar(trace(P))))) for P in self.projectors]

    def reconstruct(self) -> np.ndarray:
        out = zeros_like(self.projectors[0])
        for lam, P in zip(self.eigenvalues, self.projectors):
            out = out + lam * P
        return out

    def power(self, n: int) -> np.ndarray:
        """The n-th power of the decomposed matrix, with 0**0 = 1."""
        out = zeros_like(self.projectors[0])
        for lam, P in zip(self.eigenvalues, self.projectors):
            out = out + lam**n * P
        return out

    def check(self, M=None, tol: float = 1e-10) -> bool:
        """Verify partition of unity, orthogonality and (optionally) reconstruction."""
        d = self.dim
        I = eye(d, self.exact)
        scale = max(1.0, norm(M)) if M is not None else 1.0

        def small(X, s=1.0):
            if self.exact:
                return bool(np.all(X == 0))
            return float(np.max(np.abs(X))) <= tol * s

        if not small(sum(self.projectors, zeros_like(I)) - I):
            return False
        for k, P in enumerate(self.projectors):
            for ell, Q in enumerate(self.projectors):
                target = P if k == ell else zeros_like(P)
                if not small(P @ Q - target):
                    return False
        if M is not None and not small(self.reconstruct() - M, scale):
            return False
        return True


def _lagrange_projectors(M, eigenvalues) -> list[np.ndarray]:
    d = M.shape[0]
    I = eye(d, exact=True)
    projectors = []
    for k, lam in enumerate(eigenvalues):
        P = I.copy()
        for ell, mu in enumerate(eigenvalues):
            if ell != k:
                P = P @ (M - mu * I) * (Fraction(1) / (lam - mu))
        projectors.append(P)
    return projectors


def spectral_decompose(M, cluster_tol: float = DEFAULT_CLUSTER_TOL, projectors=None,
                       eigenvalues=None) -> SpectralDecomposition:
    """Spectral decomposition with eigenvalue clustering.

    Float mode merges eigenvalues closer than ``cluster_tol * max(1, |lambda|)``.
    Exact mode needs a characteristic polynomial that splits over the
    rationals, or caller-supplied ``eigenvalues`` and ``projectors``.
    """
    M = require_hermitian(M)
    if projectors is not None:
        if eigenvalues is None:
            raise ContractViolation("supplied projectors need their eigenvalues")
        order = sorted(range(len(eigenvalues)), key=lambda k: eigenvalues[k], reverse=True)
        S = SpectralDecomposition(tuple(eigenvalues[k] for k in order),
                                  tuple(projectors[k] for k in order))
        if not S.check(M):
            raise ContractViolation("supplied projectors do not decompose the matrix")
        return S

    if is_exact(M):
        roots = rational_roots(charpoly_exact(M))
        if roots is None:
            raise UnsupportedInput(
                "characteristic polynomial does not split over the rationals; "
                "supply projectors explicitly")
        distinct = sorted(set(roots), reverse=True)
        return SpectralDecomposition(tuple(distinct), tuple(_lagrange_projectors(M, distinct)))

    w, V = np.linalg.eigh(M)
    w, V = w[::-1], V[:, ::-1]
    clusters: list[list[int]] = []
    for i, lam in enumerate(w):
        if clusters and w[clusters[-1][-1]] - lam <= cluster_tol * max(1.0, abs(lam)):
            clusters[-1].append(i)
        else:
            clusters.append([i])
    eigenvalues = tuple(float(np.mean(w[c])) for c in clusters)
    projectors = tuple(V[:, c] @ V[:, c].conj().T for c in clusters)
    return SpectralDecomposition(eigenvalues, projectors)


@dataclass(frozen=True, eq=False)
class Eigenbasis:
    """A basis V diagonalising A, with the eigenvalue attached to each column.

    In float mode V is unitary.  In exact mode V is a rational (generally
    non-orthonormal) basis built from projector columns; similarity by V
    preserves every trace and every closed-cycle product.
    """

    values: tuple
    cluster: tuple
    V: np.ndarray
    Vinv: np.ndarray

    def transform(self, B) -> np.ndarray:
        return self.Vinv @ B @ self.V


def eigenbasis(S: SpectralDecomposition) -> Eigenbasis:
    values, cluster, cols = [], [], []
    for k, (lam, P) in enumerate(zip(S.eigenvalues, S.projectors)):
        if S.exact:
            C = column_basis_exact(P)
        else:
            w, U = np.linalg.eigh(P)
            C = U[:, w > 0.5]
        for j in range(C.shape[1]):
            cols.append(C[:, j])
            values.append(lam)
            cluster.append(k)
    V = np.column_stack(cols)
    if S.exact:
        V = V.astype(object)
        Vinv = inverse_exact(V)
    else:
        Vinv = V.conj().T
    return Eigenbasis(tuple(values), tuple(cluster), V, Vinv)


# ---------------------------------------------------------------------------
# seeded samplers

PROFILES = ("isotropic", "log-anisotropic")


def haar_unitary(dim: int, rng: np.random.Generator, real: bool = False) -> np.ndarray:
    Z = rng.standard_normal((dim, dim))
    if not real:
        Z = (Z + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def _spectrum(dim, profile, decades, rng) -> np.ndarray:
    if profile == "isotropic":
        return rng.uniform(0.0, 1.0, dim)
    if profile in ("log-anisotropic", "anisotropic"):
        return 10.0 ** rng.uniform(-decades, 0.0, dim)
    raise ContractViolation(f"unknown spectrum profile {profile!r}; expected one of {PROFILES}")


def _hermitian_from(Q, s) -> np.ndarray:
    M = (Q * s) @ Q.conj().T
    return (M + M.conj().T) / 2


def random_psd(dim: int, profile: str = "isotropic", seed: int = 0, decades: float = 6.0,
               real: bool = False) -> np.ndarray:
    """Q diag(s) Q* with Haar-random Q; deterministic in (dim, profile, seed)."""
    if dim < 1:
        raise ContractViolation("dim must be positive")
    rng = np.random.default_rng(seed)
    Q = haar_unitary(dim, rng, real)
    return _hermitian_from(Q, _spectrum(dim, profile, decades, rng)).astype(complex)


def commuting_pair(dim: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Two PSD matrices sharing one random eigenbasis."""
    if dim < 1:
        raise ContractViolation("dim must be positive")
    rng = np.random.default_rng(seed)
    Q = haar_unitary(dim, rng)
    return (_hermitian_from(Q, rng.uniform(0, 1, dim)),
            _hermitian_from(Q, rng.uniform(0, 1, dim)))


def random_rational_orthogonal(dim: int, rng: np.random.Generator, size: int = 2) -> np.ndarray:
    """Cayley transform (I - S)(I + S)^-1 of a random integer skew matrix."""
    S = np.full((dim, dim), Fraction(0), dtype=object)
    for i in range(dim):
        for j in range(i + 1, dim):
            v = Fraction(int(rng.integers(-size, size + 1)))
            S[i, j], S[j, i] = v, -v
    I = eye(dim, exact=True)
    return (I - S) @ inverse_exact(I + S)


def random_rational_psd(dim: int, seed: int = 0, size: int = 3) -> np.ndarray:
    """L L^T with small random integer L: exact PSD, generally irrational spectrum."""
    if dim < 1:
        raise ContractViolation("dim must be positive")
    rng = np.random.default_rng(seed)
    L = exact_matrix(rng.integers(-size, size + 1, (dim, dim)).tolist())
    return L @ L.T


def random_rational_spectral(dim: int, seed: int = 0, values: Iterable[int] = range(4)) -> np.ndarray:
    """Q diag(a) Q^T with rational orthogonal Q and a drawn (with repeats) from values.

    The characteristic polynomial splits over Q, so exact spectral
    decomposition applies.
    """
    if dim < 1:
        raise ContractViolation("dim must be positive")
    rng = np.random.default_rng(seed)
    values = list(values)
    a = [Fraction(values[int(i)]) for i in rng.integers(0, len(values), dim)]
    Q = random_rational_orthogonal(dim, rng)
    D = np.full((dim, dim), Fraction(0), dtype=object)
    for i, v in enumerate(a):
        D[i, i] = v
    return Q @ D @ Q.T


# ---------------------------------------------------------------------------
# JSON interchange


def _fraction_str(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def scalar_to_json(v):
    if isinstance(v, Fraction):
        return _fraction_str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def matrix_to_json(M) -> dict:
    M = as_matrix(M)
    if is_exact(M):
        entries = [[_fraction_str(_to_fraction(v)) for v in row] for row in M]
        return {"dim": M.shape[0], "mode": "exact", "entries": entries}
    entries = [[[float(v.real), float(v.imag)] for v in row] for row in M]
    return {"dim": M.shape[0], "mode": "float", "entries": entries}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        d, mode, entries = int(obj["dim"]), obj["mode"], obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractViolation(f"malformed matrix JSON: {exc}") from None
    if len(entries) != d:
        raise ContractViolation("entries do not match dim")
    if mode == "exact":
        return exact_matrix(entries)
    if mode == "float":
        return float_matrix([[complex(re, im) for re, im in row] for row in entries])
    raise ContractViolation(f"unknown matrix mode {mode!r}")
