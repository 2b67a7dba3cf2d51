"""Finite runs of ``(q1, q2, a1, a2)`` events and moment estimates from them.

Estimation only ever uses the off-diagonal setting pairs; transposed pairs
such as (0,1) and (1,0) are pooled into one class.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from . import geometry
from ._rng import DEFAULT_CHUNK, map_chunks
from .behavior import OFF_DIAGONAL_CLASSES, Behavior, validate
from .errors import DomainError, InsufficientDataError, StructureError
from .models import DeterministicStrategy, LocalHiddenVariableModel, PhotonPairModel, photon_behavior

EVENT_FILE_VERSION = 1
EVENT_FILE_MAGIC = "bellpyramid-events"

# block outcome index (canonical order) -> (a1, a2)
_A1_OF = np.array([1, 1, -1, -1], dtype=np.int8)
_A2_OF = np.array([1, -1, 1, -1], dtype=np.int8)


class EventRecord(NamedTuple):
    q1: int
    q2: int
    a1: int
    a2: int


@dataclass(frozen=True, eq=False)
class Events:
    """Column storage for a run of events."""

    q1: np.ndarray
    q2: np.ndarray
    a1: np.ndarray
    a2: np.ndarray

    def __post_init__(self) -> None:
        cols = [np.asarray(getattr(self, k)).reshape(-1) for k in ("q1", "q2", "a1", "a2")]
        if len({c.size for c in cols}) > 1:
            raise StructureError("event columns have different lengths")
        if any(np.any((c < 0) | (c > 2)) for c in cols[:2]):
            raise DomainError("setting labels must be 0, 1 or 2")
        if any(np.any((c != 1) & (c != -1)) for c in cols[2:]):
            raise DomainError("outcome labels must be +1 or -1")
        for name, c in zip(("q1", "q2", "a1", "a2"), cols):
            c = c.astype(np.int8)
            c.setflags(write=False)
            object.__setattr__(self, name, c)

    @classmethod
    def empty(cls) -> "Events":
        z = np.zeros(0, dtype=np.int8)
        return cls(z, z, z, z)

    @classmethod
    def from_records(cls, records: Iterable) -> "Events":
        arr = np.array([tuple(r) for r in records], dtype=np.int64).reshape(-1, 4)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])

    @classmethod
    def concat(cls, parts: Iterable["Events"]) -> "Events":
        parts = list(parts)
        if not parts:
            return cls.empty()
        return cls(*(np.concatenate([getattr(p, k) for p in parts]) for k in ("q1", "q2", "a1", "a2")))

    def __len__(self) -> int:
        return self.q1.size

    def __iter__(self) -> Iterator[EventRecord]:
        for row in zip(self.q1.tolist(), self.q2.tolist(), self.a1.tolist(), self.a2.tolist()):
            yield EventRecord(*row)


# --- setting policy ----------------------------------------------------------


def uniform_off_diagonal_policy() -> np.ndarray:
    p = np.full((3, 3), 1.0 / 6.0)
    np.fill_diagonal(p, 0.0)
    return p


def _policy_array(policy) -> np.ndarray:
    if policy is None:
        return uniform_off_diagonal_policy()
    if isinstance(policy, dict):
        p = np.zeros((3, 3))
        for (q1, q2), w in policy.items():
            if not (0 <= q1 <= 2 and 0 <= q2 <= 2):
                raise DomainError(f"setting pair {(q1, q2)} out of range")
            p[q1, q2] = w
    else:
        p = np.array(policy, dtype=float)
    if p.shape != (3, 3) or not np.all(np.isfinite(p)):
        raise DomainError("setting policy must be a 3x3 table of finite weights")
    if np.any(p < 0):
        raise DomainError("setting policy has negative weights")
    if abs(p.sum() - 1.0) > 1e-9:
        raise DomainError(f"setting policy weights sum to {p.sum()!r}, not 1")
    return p


# --- generation --------------------------------------------------------------


def _draw_settings(rng: np.random.Generator, n: int, policy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pair = rng.choice(9, size=n, p=policy.reshape(-1) / policy.sum())
    return pair // 3, pair % 3


def _lhv_chunk(model: LocalHiddenVariableModel, policy: np.ndarray, rng: np.random.Generator, n: int) -> Events:
    q1, q2 = _draw_settings(rng, n, policy)
    lam = rng.choice(model.n_lambda, size=n, p=model.weights)
    # Bell factorisation: given lambda, the two outcomes are drawn independently
    p1 = 0.5 * (1.0 + model.responses[lam, q1])
    p2 = 0.5 * (1.0 + model.responses[lam, q2])
    a1 = np.where(rng.random(n) < p1, 1, -1)
    a2 = np.where(rng.random(n) < p2, 1, -1)
    return Events(q1, q2, a1, a2)


def _behavior_chunk(table: np.ndarray, policy: np.ndarray, rng: np.random.Generator, n: int) -> Events:
    q1, q2 = _draw_settings(rng, n, policy)
    cdf = np.cumsum(table.reshape(3, 3, 4), axis=2)
    cdf[..., -1] = np.inf
    u = rng.random(n)
    idx = (u[:, None] >= cdf[q1, q2]).sum(axis=1)
    return Events(q1, q2, _A1_OF[idx], _A2_OF[idx])


def sample_events(
    source,
    n: int,
    seed: int,
    policy=None,
    *,
    chunk: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> Events:
    """Draw ``n`` events from a behavior, LHV model, deterministic strategy or photon pair.

    ``policy`` is a 3x3 table (or ``{(q1, q2): weight}``) of setting-pair
    probabilities, chosen independently of any hidden variable; the default is
    uniform over the six off-diagonal pairs.
    """
    n = int(n)
    if n < 0:
        raise DomainError(f"event count must be non-negative, got {n}")
    p = _policy_array(policy)
    if isinstance(source, DeterministicStrategy):
        source = LocalHiddenVariableModel.single(source)
    if isinstance(source, PhotonPairModel):
        source = photon_behavior(source)
    if isinstance(source, LocalHiddenVariableModel):
        fn = lambda rng, k: _lhv_chunk(source, p, rng, k)  # noqa: E731
    elif isinstance(source, Behavior):
        report = validate(source)
        if not report.valid:
            raise DomainError(f"cannot sample from an invalid behavior (max residual {report.max_residual})")
        table = np.clip(source.table, 0.0, None)
        fn = lambda rng, k: _behavior_chunk(table, p, rng, k)  # noqa: E731
    else:
        raise DomainError(f"unsupported event source {type(source).__name__}")
    if n == 0:
        return Events.empty()
    return Events.concat(map_chunks(fn, n, seed, chunk, workers))


# --- estimation --------------------------------------------------------------


@dataclass
class MomentAccumulator:
    """Per setting-pair event counts and sums of ``a1 * a2``; merging is order-free."""

    counts: np.ndarray = field(default_factory=lambda: np.zeros((3, 3), dtype=np.int64))
    sums: np.ndarray = field(default_factory=lambda: np.zeros((3, 3), dtype=np.int64))

    def update(self, events) -> "MomentAccumulator":
        if not isinstance(events, Events):
            events = Events.from_records(events)
        flat = events.q1.astype(np.int64) * 3 + events.q2
        prod = events.a1.astype(np.int64) * events.a2
        self.counts += np.bincount(flat, minlength=9).reshape(3, 3)
        self.sums += np.bincount(flat, weights=prod, minlength=9).astype(np.int64).reshape(3, 3)
        return self

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        return MomentAccumulator(self.counts + other.counts, self.sums + other.sums)


@dataclass(frozen=True)
class MomentEstimate:
    point: geometry.MomentPoint
    counts: tuple[int, int, int]
    stderr: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {
            "point": list(self.point),
            "counts": list(self.counts),
            "stderr": list(self.stderr),
        }


def estimate_from_accumulator(acc: MomentAccumulator, pooled: bool = True) -> MomentEstimate:
    means, counts, errs = [], [], []
    for q1, q2 in OFF_DIAGONAL_CLASSES:
        n = int(acc.counts[q1, q2])
        s = int(acc.sums[q1, q2])
        if pooled:
            n += int(acc.counts[q2, q1])
            s += int(acc.sums[q2, q1])
        if n == 0:
            label = f"({q1},{q2})" + (f"+({q2},{q1})" if pooled else "")
            raise InsufficientDataError(f"no events in setting class {label}")
        m = s / n
        means.append(m)
        counts.append(n)
        errs.append(math.sqrt(max(0.0, 1.0 - m * m) / n))
    return MomentEstimate(geometry.MomentPoint(*means), tuple(counts), tuple(errs))


def estimate_moments(events, pooled: bool = True) -> MomentEstimate:
    """Sample means of ``a1 * a2`` per off-diagonal class with ``sqrt((1 - m^2) / n)`` errors.

    With ``pooled=False`` only the (0,1), (0,2), (1,2) orientations are used.
    """
    return estimate_from_accumulator(MomentAccumulator().update(events), pooled)


@dataclass(frozen=True)
class RunClassification:
    membership: geometry.RegionMembership
    estimate: MomentEstimate
    facet_z: tuple[float, float, float, float]
    gram_det_z: float
    alpha: float
    significant_facets: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate.to_dict(),
            "region": self.membership.region,
            "membership": {
                "sl": self.membership.in_sl.value,
                "q": self.membership.in_q.value,
                "ns": self.membership.in_ns.value,
                "gram_det": self.membership.gram_det,
            },
            "facet_z": list(self.facet_z),
            "gram_det_z": self.gram_det_z,
            "alpha": self.alpha,
            "significant_facet_violations": list(self.significant_facets),
        }


def _z(margin: float, se: float) -> float:
    if se > 0:
        return margin / se
    if margin == 0:
        return 0.0
    return math.copysign(math.inf, margin)


def classify_run(events, tol: float = geometry.DEFAULT_TOL, alpha: float = 0.05) -> RunClassification:
    """Classify the point estimate and attach z-scores for each facet and for ``det G``.

    Facet weights are linear in the moments with coefficients of size 1/4, so
    their standard error is ``sqrt(sum se^2) / 4``. The ``det G`` error uses the
    first-order delta method. ``significant_facets`` lists facets (1-based)
    whose one-sided violation is significant at level ``alpha``.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"significance level must lie in (0, 1), got {alpha}")
    est = estimate_moments(events)
    membership = geometry.classify(est.point, tol)
    se = np.asarray(est.stderr)
    xi_se = 0.25 * math.sqrt(float(se @ se))
    facet_z = tuple(_z(xi, xi_se) for xi in membership.barycentric.xi)
    x, y, z = est.point
    grad = np.array([2 * y * z - 2 * x, 2 * x * z - 2 * y, 2 * x * y - 2 * z])
    det_se = math.sqrt(float((grad * se) @ (grad * se)))
    det_z = _z(membership.gram_det, det_se)
    crit = NormalDist().inv_cdf(1.0 - alpha)
    significant = tuple(i + 1 for i, zv in enumerate(facet_z) if zv < -crit)
    return RunClassification(membership, est, facet_z, det_z, alpha, significant)


# --- event files -------------------------------------------------------------


def write_events(target, events: Events, source: str = "") -> None:
    """Write ``q1 q2 a1 a2`` lines after a one-line header."""
    desc = " ".join(source.split())
    own = isinstance(target, (str, os.PathLike))
    fh = open(target, "w", encoding="ascii", newline="\n") if own else target
    try:
        fh.write(f"# {EVENT_FILE_MAGIC} version={EVENT_FILE_VERSION} source={desc}\n")
        buf = io.StringIO()
        np.savetxt(buf, np.column_stack([events.q1, events.q2, events.a1, events.a2]), fmt="%d")
        fh.write(buf.getvalue())
    finally:
        if own:
            fh.close()


def read_events(source) -> tuple[Events, str]:
    """Parse an event file; returns the events and the header's source description."""
    own = isinstance(source, (str, os.PathLike))
    fh = open(source, encoding="ascii") if own else source
    try:
        header = fh.readline().strip()
        parts = header.lstrip("#").split(maxsplit=2)
        if not header.startswith("#") or len(parts) < 2 or parts[0] != EVENT_FILE_MAGIC:
            raise StructureError(f"missing event file header, got {header!r}")
        if parts[1] != f"version={EVENT_FILE_VERSION}":
            raise StructureError(f"unsupported event file {parts[1]!r}")
        desc = parts[2][len("source="):] if len(parts) > 2 and parts[2].startswith("source=") else ""
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 4:
                raise StructureError(f"line {lineno}: expected 4 fields, got {len(fields)}")
            try:
                q1, q2, a1, a2 = (int(f) for f in fields)
            except ValueError:
                raise StructureError(f"line {lineno}: non-integer field in {line!r}") from None
            if q1 not in (0, 1, 2) or q2 not in (0, 1, 2) or a1 not in (1, -1) or a2 not in (1, -1):
                raise DomainError(f"line {lineno}: label out of range in {line!r}")
            rows.append((q1, q2, a1, a2))
    finally:
        if own:
            fh.close()
    return Events.from_records(rows), desc
