"""Monte Carlo volumes of the SL, Q and NS regions inside the cube ``[-1, 1]^3``."""

from __future__ import annotations

import enum
import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import geometry
from ._rng import DEFAULT_CHUNK, map_chunks
from .errors import ConsistencyError, DomainError

CUBE_VOLUME = 8.0

REFERENCE_FRACTIONS = {
    "SL": 1.0 / 3.0,
    "Q": math.pi**2 / 16.0,
    "NS": 1.0,
}


class Region(str, enum.Enum):
    SL = "SL"
    Q = "Q"
    NS = "NS"

    @classmethod
    def parse(cls, value) -> "Region":
        if isinstance(value, Region):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise DomainError(f"unknown region {value!r}; expected SL, Q or NS") from None


_MASKS = {
    Region.SL: geometry.sl_closed_mask,
    Region.Q: geometry.q_closed_mask,
    Region.NS: geometry.ns_closed_mask,
}


@dataclass(frozen=True)
class VolumeEstimate:
    region: Region
    samples: int
    hits: int
    fraction: float
    stderr: float
    absolute_volume: float
    seed: int
    wall_time_s: float = 0.0

    @property
    def reference_fraction(self) -> float:
        return REFERENCE_FRACTIONS[self.region.value]

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        d["region"] = self.region.value
        d["reference_fraction"] = self.reference_fraction
        if not timing:
            d.pop("wall_time_s")
        return d


def _uniform_cube(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(n, 3))


def _check_samples(samples: int) -> int:
    samples = int(samples)
    if samples < 1:
        raise DomainError(f"samples must be at least 1, got {samples}")
    return samples


def _estimate(region: Region, samples: int, hits: int, seed: int, wall: float) -> VolumeEstimate:
    frac = hits / samples
    stderr = math.sqrt(frac * (1.0 - frac) / samples)
    return VolumeEstimate(region, samples, hits, frac, stderr, frac * CUBE_VOLUME, seed, wall)


def estimate_volume(
    region,
    samples: int,
    seed: int,
    *,
    tol: float = geometry.DEFAULT_TOL,
    chunk: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> VolumeEstimate:
    """Fraction of uniform cube points landing in the closed ``region``."""
    region = Region.parse(region)
    samples = _check_samples(samples)
    mask = _MASKS[region]
    start = time.perf_counter()
    counts = map_chunks(
        lambda rng, n: int(np.count_nonzero(mask(_uniform_cube(rng, n), tol))),
        samples,
        seed,
        chunk,
        workers,
    )
    return _estimate(region, samples, sum(counts), seed, time.perf_counter() - start)


@dataclass(frozen=True)
class HierarchyBreakdown:
    samples: int
    seed: int
    sl: float
    q_minus_sl: float
    ns_minus_q: float
    stderr: dict

    @property
    def q(self) -> float:
        return self.sl + self.q_minus_sl

    def to_dict(self) -> dict:
        d = asdict(self)
        d["q"] = self.q
        return d


def _hierarchy_counts(rng: np.random.Generator, n: int, tol: float) -> np.ndarray:
    pts = _uniform_cube(rng, n)
    sl = geometry.sl_closed_mask(pts, tol)
    q = geometry.q_closed_mask(pts, tol)
    ns = geometry.ns_closed_mask(pts, tol)
    return np.array(
        [
            np.count_nonzero(sl),
            np.count_nonzero(q & ~sl),
            np.count_nonzero(ns & ~q),
            # nesting violations; must stay zero
            np.count_nonzero(sl & ~q) + np.count_nonzero(q & ~ns),
        ]
    )


def hierarchy_breakdown(
    samples: int,
    seed: int,
    *,
    tol: float = geometry.DEFAULT_TOL,
    chunk: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> HierarchyBreakdown:
    """Split the cube into SL, Q minus SL, and NS minus Q with one shared sample."""
    samples = _check_samples(samples)
    counts = sum(map_chunks(lambda rng, n: _hierarchy_counts(rng, n, tol), samples, seed, chunk, workers))
    if counts[3]:
        raise ConsistencyError(f"{counts[3]} sampled points broke SL < Q < NS nesting")
    fr = counts[:3] / samples
    se = np.sqrt(fr * (1.0 - fr) / samples)
    return HierarchyBreakdown(
        samples,
        seed,
        float(fr[0]),
        float(fr[1]),
        float(fr[2]),
        {"sl": float(se[0]), "q_minus_sl": float(se[1]), "ns_minus_q": float(se[2])},
    )
