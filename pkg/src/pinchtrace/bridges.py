"""Closed-cycle accounting of traces in an eigenbasis of A.

With A = diag(a) and B = (b_ij), a cyclic representative A^r1 B ... A^rm B
expands as a sum over closed index sequences i1 -> ... -> im -> i1 of
a_i1^r1 ... a_im^rm * b_i1i2 ... b_imi1.  The clustered word puts all of A^n
on the starting vertex; mixed words spread it around the cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from math import comb

import numpy as np

from .numeric import (
    DEFAULT_CLUSTER_TOL,
    ContractViolation,
    eigenbasis,
    is_exact,
    mpow,
    same_mode,
    spectral_decompose,
    trace,
)
from .words import word_average_from_polynomial, clustered_trace

SEQUENCE_CAP = 6**6


def canonical_rotation(cycle) -> tuple:
    cycle = tuple(cycle)
    return min(cycle[k:] + cycle[:k] for k in range(len(cycle)))


def rotations(cycle) -> set:
    cycle = tuple(cycle)
    return {cycle[k:] + cycle[:k] for k in range(len(cycle))}


def b_product(Bmat, cycle):
    m = len(cycle)
    return reduce(lambda acc, j: acc * Bmat[cycle[j], cycle[(j + 1) % m]], range(m), 1)


def _check_cycle(a, cycle):
    if not cycle:
        raise ContractViolation("cycle must have length >= 1")
    if any(i < 0 or i >= len(a) for i in cycle):
        raise ContractViolation(f"cycle {cycle} has an index outside 0..{len(a) - 1}")


def cycle_contribution_clustered(a, Bmat, cycle, n: int):
    """a_start^n * b_i0i1 ... b_i(m-1)i0; all of A^n sits on the start vertex."""
    _check_cycle(a, cycle)
    return a[cycle[0]] ** n * b_product(Bmat, cycle)


def cycle_contribution_mixed(a, Bmat, cycle, comp):
    """a_i1^r1 ... a_im^rm * b_i1i2 ... b_imi1 (with 0**0 = 1)."""
    _check_cycle(a, cycle)
    if len(comp) != len(cycle):
        raise ContractViolation("composition and cycle lengths differ")
    weight = reduce(lambda acc, ir: acc * a[ir[0]] ** ir[1], zip(cycle, comp), 1)
    return weight * b_product(Bmat, cycle)


def _basis(A, cluster_tol):
    S = spectral_decompose(A, cluster_tol)
    return eigenbasis(S)


def composition_trace_identity(A, B, comp, cluster_tol: float = DEFAULT_CLUSTER_TOL):
    """(closed-sequence sum, direct trace) for Tr(A^r1 B ... A^rm B).

    The first value enumerates all d**m closed index sequences in the
    eigenbasis of A; the second multiplies the matrices directly.
    """
    A, B = same_mode(A, B)
    comp = tuple(int(r) for r in comp)
    if not comp or any(r < 0 for r in comp):
        raise ContractViolation("composition needs at least one nonnegative part")
    d, m = A.shape[0], len(comp)
    if d**m > SEQUENCE_CAP:
        raise ContractViolation(f"{d}**{m} closed sequences exceed the cap {SEQUENCE_CAP}")
    E = _basis(A, cluster_tol)
    Bmat = E.transform(B)
    a = E.values
    total = sum(cycle_contribution_mixed(a, Bmat, seq, comp)
                for seq in product(range(d), repeat=m))
    direct = trace(reduce(np.matmul, [mpow(A, r) @ B for r in comp]))
    if is_exact(A):
        return Fraction(total), direct
    return complex(total), direct


def complete_homogeneous(n: int, xs):
    """h_n(x1, ..., xk) = sum over compositions r of n of prod x_j^r_j."""
    H = [1] + [0] * n
    for x in xs:
        for k in range(1, n + 1):
            H[k] = H[k] + x * H[k - 1]
    return H[n]


@dataclass
class CycleRecord:
    cycle: tuple
    multiplicity: int
    b_product: object
    clustered: object
    averaged: object
    best_mixed: object
    best_composition: tuple
    gain: float
    crosses_eigenspaces: bool
    positive_bridge: bool
    reversal: tuple

    def to_dict(self) -> dict:
        return {
            "cycle": " -> ".join(str(i) for i in self.cycle + self.cycle[:1]),
            "indices": list(self.cycle),
            "multiplicity": self.multiplicity,
            "b_product": _num(self.b_product),
            "clustered": _num(self.clustered),
            "averaged": _num(self.averaged),
            "best_mixed": _num(self.best_mixed),
            "best_composition": list(self.best_composition),
            "gain": self.gain,
            "crosses_eigenspaces": self.crosses_eigenspaces,
            "positive_bridge": self.positive_bridge,
            "reversal": list(self.reversal),
        }


def _num(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    v = complex(v)
    return v.real if v.imag == 0 else [v.real, v.imag]


@dataclass
class BridgeReport:
    """Per-cycle-class contributions; totals reconstruct the two traces.

    ``total_clustered`` sums to Tr(A^n B^m) and ``total_averaged`` to the
    word average; ``average`` and ``clustered`` are the same quantities
    computed directly, kept for cross-checking.
    """

    n: int
    m: int
    eigenvalues: tuple
    cycles: list = field(default_factory=list)
    total_clustered: object = 0
    total_averaged: object = 0
    clustered: object = 0
    average: object = 0
    class_count: int = 0

    @property
    def aggregate_gain(self) -> float:
        c = abs(complex(self.total_clustered))
        return abs(complex(self.total_averaged)) / c if c else float("inf")

    def to_dict(self) -> dict:
        return {
            "n": self.n, "m": self.m,
            "eigenvalues": [_num(v) for v in self.eigenvalues],
            "class_count": self.class_count,
            "total_clustered": _num(self.total_clustered),
            "total_averaged": _num(self.total_averaged),
            "clustered": _num(self.clustered),
            "average": _num(self.average),
            "aggregate_gain": self.aggregate_gain,
            "cycles": [c.to_dict() for c in self.cycles],
        }


def _gain(avg, clu) -> float:
    num, den = abs(complex(avg)), abs(complex(clu))
    if den == 0:
        return 1.0 if num == 0 else float("inf")
    return num / den


def bridge_report(A, B, n: int, m: int, top_k: int = 10, rank_by: str = "gain",
                  cluster_tol: float = DEFAULT_CLUSTER_TOL) -> BridgeReport:
    """Cycle-class breakdown of Tr(A^n B^m) and of the word average.

    For each rotation class of closed sequences the record holds the
    clustered share, the averaged share (multiplicity * b-product * h_n of the
    eigenvalues on the cycle / C(n+m-1, m-1)), and the largest single
    placement of A^n, which sits on a vertex of maximal |a|.  ``gain`` is
    |averaged| / |clustered|.  Classes with zero b-product are dropped.
    """
    A, B = same_mode(A, B)
    if m < 1 or n < 0:
        raise ContractViolation("bridge report needs m >= 1 and n >= 0")
    if rank_by not in ("gain", "weight"):
        raise ContractViolation("rank_by must be 'gain' or 'weight'")
    d = A.shape[0]
    if d**m > SEQUENCE_CAP:
        raise ContractViolation(f"{d}**{m} closed sequences exceed the cap {SEQUENCE_CAP}")
    E = _basis(A, cluster_tol)
    Bmat = E.transform(B)
    a = E.values
    norm_avg = comb(n + m - 1, m - 1)
    exact = is_exact(A)

    classes: dict[tuple, int] = {}
    for seq in product(range(d), repeat=m):
        key = canonical_rotation(seq)
        classes[key] = classes.get(key, 0) + 1

    report = BridgeReport(n=n, m=m, eigenvalues=tuple(a), class_count=len(classes))
    records = []
    for cyc, mult in classes.items():
        bp = b_product(Bmat, cyc)
        if bp == 0:
            continue
        clu = sum(a[r[0]] ** n for r in rotations(cyc)) * bp
        h = complete_homogeneous(n, [a[i] for i in cyc])
        avg = Fraction(mult * h) * bp / norm_avg if exact else mult * h * bp / norm_avg
        pos = max(range(m), key=lambda j: (abs(a[cyc[j]]), -j))
        comp = tuple(n if j == pos else 0 for j in range(m))
        best = cycle_contribution_mixed(a, Bmat, cyc, comp)
        crosses = len({E.cluster[i] for i in cyc}) > 1
        report.total_clustered += clu
        report.total_averaged += avg
        records.append(CycleRecord(
            cycle=cyc, multiplicity=mult, b_product=bp, clustered=clu, averaged=avg,
            best_mixed=best, best_composition=comp, gain=_gain(avg, clu),
            crosses_eigenspaces=crosses,
            positive_bridge=crosses and complex(bp).real > 0,
            reversal=canonical_rotation(cyc[::-1]),
        ))
    if rank_by == "gain":
        records.sort(key=lambda r: (-r.gain, -abs(complex(r.averaged)), r.cycle))
    else:
        records.sort(key=lambda r: (-abs(complex(r.averaged)), r.cycle))
    report.cycles = records[:top_k]
    report.average = word_average_from_polynomial(A, B, n, m)
    report.clustered = clustered_trace(A, B, n, m)
    if not exact:
        report.total_clustered = complex(report.total_clustered)
        report.total_averaged = complex(report.total_averaged)
    return report
