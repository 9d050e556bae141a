"""The 3x3 counterexample family (A_x, B_x) for n = m = 5.

A_x = [[1,0,0],[0,x,-x],[0,-x,x]],  B_x = [[x,-x,0],[-x,x,0],[0,0,1]].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numeric import (
    ContractViolation,
    SpectralDecomposition,
    eigenbasis,
    exact_matrix,
    float_matrix,
    spectral_decompose,
)
from .pinching import pinch
from .report import InequalityReport

AVERAGE_COEFFS = (5, 1422, 1675, 3130, 4875, 5930, 4881)


def _coerce_x(x, exact: bool | None):
    """Strings, ints and Fractions default to exact; floats to float mode."""
    if exact is None:
        exact = not isinstance(x, float)
    if exact:
        x = Fraction(x) if not isinstance(x, str) else Fraction(x.strip())
    else:
        x = float(Fraction(x)) if isinstance(x, str) else float(x)
    if x <= 0:
        raise ContractViolation(f"x must be positive, got {x}")
    return x, exact


@dataclass(frozen=True, eq=False)
class ChaInstance:
    x: object
    A: np.ndarray
    B: np.ndarray
    spectral: SpectralDecomposition

    @property
    def exact(self) -> bool:
        return self.spectral.exact


def cha_pair(x, exact: bool | None = None) -> ChaInstance:
    """Build (A_x, B_x) with hard-coded projectors of A_x, verified on construction."""
    x, exact = _coerce_x(x, exact)
    build = exact_matrix if exact else float_matrix
    one, zero, half = (Fraction(1), Fraction(0), Fraction(1, 2)) if exact else (1.0, 0.0, 0.5)
    A = build([[one, zero, zero], [zero, x, -x], [zero, -x, x]])
    B = build([[x, -x, zero], [-x, x, zero], [zero, zero, one]])
    P1 = build([[one, zero, zero], [zero, zero, zero], [zero, zero, zero]])
    P2x = build([[zero, zero, zero], [zero, half, -half], [zero, -half, half]])
    P0 = build([[zero, zero, zero], [zero, half, half], [zero, half, half]])
    S = spectral_decompose(A, projectors=[P1, P2x, P0], eigenvalues=[one, 2 * x, zero])
    return ChaInstance(x, A, B, S)


def cha_exact_values(x, exact: bool | None = None):
    """(pinched, clustered, average) from the closed forms for n = m = 5."""
    x, _ = _coerce_x(x, exact)
    pinched = x**5 * (1 + (1 + x) ** 5)
    clustered = 32 * x**5 + 256 * x**10
    poly = sum(c * x**k for k, c in enumerate(AVERAGE_COEFFS))
    average = x**4 * poly / 126 if isinstance(x, float) else x**4 * poly / Fraction(126)
    return pinched, clustered, average


def cha_pinched_matrix(x, exact: bool | None = None) -> np.ndarray:
    """diag(x, (1+x)/2, (1+x)/2) in the eigenbasis of A_x ordered 1, 2x, 0."""
    x, exact = _coerce_x(x, exact)
    build = exact_matrix if exact else float_matrix
    z = Fraction(0) if exact else 0.0
    h = (1 + x) / 2
    return build([[x, z, z], [z, h, z], [z, z, h]])


def pinched_in_eigenbasis(inst: ChaInstance) -> np.ndarray:
    """Generic pinch of B_x, carried into the eigenbasis of A_x."""
    return eigenbasis(inst.spectral).transform(pinch(inst.B, inst.spectral))


def cha_ordering_check(x, exact: bool | None = None) -> InequalityReport:
    """Report pinched < clustered < average; only expected for small x."""
    xv, exact = _coerce_x(x, exact)
    pinched, clustered, average = cha_exact_values(xv)
    rep = InequalityReport(n=5, m=5, dim=3, mode="exact" if exact else "float",
                           average=average, pinched_average=pinched, clustered=clustered)
    rep.checks = {"pinched<clustered": bool(pinched < clustered),
                  "clustered<average": bool(clustered < average)}
    return rep


def cha_ratio_scan(x_values):
    """Rows (x, average/clustered, ratio * x * 4032 / 5), evaluated exactly then rounded."""
    x_values = list(x_values)
    if not x_values:
        raise ContractViolation("need at least one x")
    rows = []
    for x in x_values:
        xe = Fraction(x) if not isinstance(x, str) else Fraction(x.strip())
        if xe <= 0:
            raise ContractViolation(f"x must be positive, got {x}")
        _, clustered, average = cha_exact_values(xe)
        ratio = average / clustered
        rows.append((float(xe), float(ratio), float(ratio * xe * 4032 / 5)))
    return rows


def crossover(lo=Fraction(1, 10**6), hi=Fraction(1), iters: int = 60) -> float:
    """Largest x (by bisection on [lo, hi]) below which clustered < average.

    Assumes a single sign change of average - clustered on the bracket.
    """
    def violated(x):
        _, c, a = cha_exact_values(x)
        return a > c

    lo, hi = Fraction(lo), Fraction(hi)
    if not violated(lo) or violated(hi):
        raise ContractViolation("bracket does not contain a crossover")
    for _ in range(iters):
        mid = (lo + hi) / 2
        mid = Fraction(mid).limit_denominator(10**15)
        if violated(mid):
            lo = mid
        else:
            hi = mid
    return float(lo)
