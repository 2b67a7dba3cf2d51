"""The two-setting CHSH combination, used as a one-dimensional comparison baseline."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError

SL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
ALGEBRAIC_BOUND = 4.0


@dataclass(frozen=True)
class ChshCorrelators:
    m00: float
    m01: float
    m10: float
    m11: float

    def __post_init__(self) -> None:
        for name in ("m00", "m01", "m10", "m11"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and -1.0 <= value <= 1.0):
                raise DomainError(f"correlator {name}={value!r} outside [-1, 1]")
            object.__setattr__(self, name, value)


class ChshRegion(str, enum.Enum):
    SL = "SL"
    Q_MINUS_SL = "Q\\SL"
    NS_MINUS_Q = "NS\\Q"
    INVALID = "invalid"


def chsh_value(c: ChshCorrelators) -> float:
    return c.m00 + c.m01 + c.m10 - c.m11


def chsh_classify(s: float, tol: float = 1e-9) -> ChshRegion:
    a = abs(s)
    if a <= SL_BOUND + tol:
        return ChshRegion.SL
    if a <= TSIRELSON_BOUND + tol:
        return ChshRegion.Q_MINUS_SL
    if a <= ALGEBRAIC_BOUND + tol:
        return ChshRegion.NS_MINUS_Q
    return ChshRegion.INVALID


def occupancy_ratios() -> tuple[float, float]:
    """Share of the ``|S| <= 4`` interval taken by the SL and quantum intervals."""
    return SL_BOUND / ALGEBRAIC_BOUND, TSIRELSON_BOUND / ALGEBRAIC_BOUND


def pyramid_ratios() -> tuple[float, float]:
    """Share of the moment cube taken by the tetrahedron and by the elliptope."""
    return 1.0 / 3.0, math.pi**2 / 16.0


def comparison() -> dict:
    chsh_sl, chsh_q = occupancy_ratios()
    pyr_sl, pyr_q = pyramid_ratios()
    return {
        "pyramid": {"sl": pyr_sl, "q": pyr_q, "beyond_q": 1.0 - pyr_q},
        "chsh": {"sl": chsh_sl, "q": chsh_q, "beyond_q": 1.0 - chsh_q},
    }
