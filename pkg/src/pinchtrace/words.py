"""Noncommutative words in two letters and the normalised word-trace average.

The average over all words with ``n`` letters A and ``m`` letters B can be
computed three independent ways:

* by enumerating every word (the oracle, capped in size),
* from the coefficient of t**m in Tr (A + tB)**(n+m),
* from cyclic representatives A^r1 B ... A^rm B, one per composition of n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import comb
from typing import Iterator

import numpy as np

from .numeric import ContractViolation, is_exact, mpow, real_scalar, same_mode, trace

ENUMERATION_CAP = 10**6

Word = str
"""A word is a string over the letters ``"A"`` and ``"B"``."""


class EnumerationCapExceeded(ContractViolation):
    pass


def word_count(n: int, m: int) -> int:
    return comb(n + m, n)


def enumerate_words(n: int, m: int, cap: int = ENUMERATION_CAP) -> Iterator[Word]:
    """Yield every word with n A's and m B's once, in lexicographic order."""
    if n < 0 or m < 0 or n + m < 1:
        raise ContractViolation(f"need n, m >= 0 and n + m >= 1, got ({n}, {m})")
    count = word_count(n, m)
    if count > cap:
        raise EnumerationCapExceeded(
            f"refusing to enumerate {count} words (cap {cap}); use the polynomial route")
    N = n + m
    # Lexicographic order of words == lexicographic order of A-position tuples.
    for a_pos in combinations(range(N), n):
        letters = ["B"] * N
        for p in a_pos:
            letters[p] = "A"
        yield "".join(letters)


def compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of n into ``parts`` nonnegative integers (stars and bars)."""
    if parts == 0:
        if n == 0:
            yield ()
        return
    for bars in combinations(range(n + parts - 1), parts - 1):
        prev, out = -1, []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + parts - 2 - prev)
        yield tuple(out)


def evaluate_word(word: Word, A, B):
    """Tr of the ordered product; Fraction in exact mode, complex in float mode."""
    A, B = same_mode(A, B)
    if not word:
        return trace(mpow(A, 0))
    letters = {"A": A, "B": B}
    try:
        mats = [letters[c] for c in word]
    except KeyError as exc:
        raise ContractViolation(f"word letters must be A or B, got {exc.args[0]!r}") from None
    return trace(reduce(np.matmul, mats))


def _check_nm(n, m):
    if n < 0 or m < 0:
        raise ContractViolation(f"n and m must be nonnegative, got ({n}, {m})")


def word_average_enumeration(A, B, n: int, m: int, cap: int = ENUMERATION_CAP):
    A, B = same_mode(A, B)
    _check_nm(n, m)
    if n + m == 0:
        return real_scalar(A.shape[0])
    total = sum(evaluate_word(w, A, B) for w in enumerate_words(n, m, cap))
    return _normalise(total, word_count(n, m), A)


def _normalise(total, count, A):
    if is_exact(A):
        return Fraction(total) / count
    return real_scalar(total) / count


@dataclass(frozen=True)
class TracePolynomial:
    """Coefficients c_0..c_N of Tr (A + tB)**N in ascending powers of t."""

    degree: int
    coefficients: tuple

    def average(self, m: int):
        """The word average with N - m letters A and m letters B."""
        c = self.coefficients[m]
        return c / comb(self.degree, m)


def trace_polynomial(A, B, N: int) -> TracePolynomial:
    """Expand Tr (A + tB)**N by multiplying degree-truncated matrix polynomials."""
    A, B = same_mode(A, B)
    if N < 1:
        raise ContractViolation("degree N must be positive")
    d = A.shape[0]
    if is_exact(A):
        P = np.full((N + 1, d, d), Fraction(0), dtype=object)
    else:
        P = np.zeros((N + 1, d, d), dtype=complex)
    P[0], P[1] = A, B
    for _ in range(N - 1):
        Q = P @ A
        Q[1:] += P[:-1] @ B
        P = Q
    coeffs = tuple(real_scalar(Fraction(c) if is_exact(A) else c)
                   for c in np.trace(P, axis1=1, axis2=2))
    return TracePolynomial(N, coeffs)


def word_average_from_polynomial(A, B, n: int, m: int):
    A, B = same_mode(A, B)
    _check_nm(n, m)
    if n + m == 0:
        return real_scalar(A.shape[0])
    return trace_polynomial(A, B, n + m).average(m)


def word_average_compositions(A, B, n: int, m: int):
    """Average via cyclic representatives.

    Rotating each (word, marked B) pair until the marked B is last maps
    onto (representative, rotation) pairs, so
    m * sum_W Tr W = (n + m) * sum_r Tr(A^r1 B ... A^rm B).
    """
    A, B = same_mode(A, B)
    _check_nm(n, m)
    if m == 0:
        return real_scalar(trace(mpow(A, n)))
    powers = [mpow(A, r) @ B for r in range(n + 1)]
    total = sum(trace(reduce(np.matmul, [powers[r] for r in comp]))
                for comp in compositions(n, m))
    if is_exact(A):
        return Fraction(total) * Fraction(n + m, m) / word_count(n, m)
    return real_scalar(total) * (n + m) / m / word_count(n, m)


def clustered_trace(A, B, n: int, m: int):
    """Tr(A^n B^m), the clustered word."""
    A, B = same_mode(A, B)
    _check_nm(n, m)
    return real_scalar(trace(mpow(A, n) @ mpow(B, m)))


METHODS = {
    "enum": word_average_enumeration,
    "poly": word_average_from_polynomial,
    "comp": word_average_compositions,
}


def word_average(A, B, n: int, m: int, method: str = "poly"):
    try:
        fn = METHODS[method]
    except KeyError:
        raise ContractViolation(f"unknown method {method!r}; expected one of {sorted(METHODS)}") from None
    return fn(A, B, n, m)
