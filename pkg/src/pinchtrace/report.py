from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

SCALE_FLOOR = 1e-300


def scale_of(*values) -> float:
    return max([abs(float(v)) for v in values if v is not None] + [SCALE_FLOOR])


@dataclass
class InequalityReport:
    """Values and flags of one trial.

    ``gap`` is average - pinched_average (nonnegative under the pinching
    conjecture); ``clustered_margin`` is average - clustered (nonpositive
    under the old clustered bound).  ``wall_time`` is the only field that is
    not a pure function of the trial parameters.
    """

    n: int
    m: int
    dim: int
    mode: str
    average: object
    pinched_average: object
    clustered: object
    tol: float = 0.0
    trial: int | None = None
    seed: int | None = None
    sampler: str | None = None
    log_exp_anchor: float | None = None
    checks: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def gap(self):
        return self.average - self.pinched_average

    @property
    def clustered_margin(self):
        return self.average - self.clustered

    @property
    def scale(self) -> float:
        return scale_of(self.average, self.clustered, self.pinched_average)

    @property
    def pinching_violated(self) -> bool:
        return float(self.gap) < -self.tol * self.scale

    @property
    def clustered_violated(self) -> bool:
        return float(self.clustered_margin) > self.tol * self.scale

    @property
    def ratio(self) -> float:
        c = float(self.clustered)
        return float(self.average) / c if c else float("inf")

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(gap=self.gap, clustered_margin=self.clustered_margin,
                   pinching_violated=self.pinching_violated,
                   clustered_violated=self.clustered_violated)
        return {k: _jsonable(v) for k, v in out.items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def key(self) -> dict:
        """Everything except wall time; equal keys mean a bit-identical rerun."""
        out = self.to_dict()
        out.pop("wall_time")
        return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):
        return v.item()
    return v
