"""Conditional probability tables ``P(a1, a2 | q1, q2)`` for the (3,3,2,2) scenario.

Tables are stored dense with shape ``(3, 3, 2, 2)`` indexed
``[q1, q2, i1, i2]``, where outcome index 0 means ``a = +1`` and 1 means
``a = -1``. Flattening a block gives the canonical outcome order
``(+,+), (+,-), (-,+), (-,-)`` used by every serialized form.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, StructureError
from .geometry import DEFAULT_TOL, MomentPoint

SETTINGS = (0, 1, 2)
OUTCOMES = np.array([1.0, -1.0])
OUTCOME_ORDER = ("++", "+-", "-+", "--")
SETTING_PAIRS = tuple(itertools.product(SETTINGS, SETTINGS))
OFF_DIAGONAL_CLASSES = ((0, 1), (0, 2), (1, 2))

# Dimension bookkeeping for the full and symmetry-reduced probability spaces.
FULL_DIMENSION = 36
NORMALIZED_DIMENSION = 27
SYMMETRIC_DIMENSION = 15
MOMENT_DIMENSION = 3
FACET_COUNTS = {"positivity": 36, "chsh": 72, "i3322": 576}
TOTAL_FACETS = sum(FACET_COUNTS.values())

SERIAL_VERSION = 1
SCENARIO = "3322"

# a1 * a2 for each (i1, i2)
_PRODUCT_SIGNS = np.outer(OUTCOMES, OUTCOMES)


@dataclass(frozen=True, eq=False)
class Behavior:
    table: np.ndarray

    def __post_init__(self) -> None:
        table = np.array(self.table, dtype=float)
        if table.shape == (3, 3, 4):
            table = table.reshape(3, 3, 2, 2)
        if table.shape != (3, 3, 2, 2):
            raise StructureError(f"behavior table must have shape (3, 3, 2, 2), got {table.shape}")
        if not np.all(np.isfinite(table)):
            raise DomainError("behavior table has non-finite entries")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def uniform(cls) -> "Behavior":
        return cls(np.full((3, 3, 2, 2), 0.25))

    @classmethod
    def from_blocks(cls, blocks) -> "Behavior":
        """Build from a mapping ``(q1, q2) -> four probabilities`` in canonical order."""
        table = np.empty((3, 3, 4))
        for q1, q2 in SETTING_PAIRS:
            key = (q1, q2)
            if key not in blocks:
                raise StructureError(f"missing setting pair {key}")
            block = np.asarray(blocks[key], dtype=float).reshape(-1)
            if block.shape != (4,):
                raise StructureError(f"block {key} needs 4 probabilities, got {block.size}")
            table[q1, q2] = block
        return cls(table)

    def block(self, q1: int, q2: int) -> np.ndarray:
        return self.table[q1, q2]

    def prob(self, a1: int, a2: int, q1: int, q2: int) -> float:
        return float(self.table[q1, q2, _outcome_index(a1), _outcome_index(a2)])

    def __eq__(self, other) -> bool:
        return isinstance(other, Behavior) and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash(self.table.tobytes())


def _outcome_index(a: int) -> int:
    if a == 1:
        return 0
    if a == -1:
        return 1
    raise DomainError(f"outcome must be +1 or -1, got {a!r}")


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    residuals: np.ndarray = field(repr=False)  # (3, 3) block sums minus one
    negative_entries: tuple[tuple[int, int, int, int, float], ...]
    max_residual: float


@dataclass(frozen=True, eq=False)
class CorrelatorExpansion:
    """Local expectations and mixed moments per setting pair, each a 3x3 array."""

    a1_marginals: np.ndarray
    a2_marginals: np.ndarray
    mixed: np.ndarray

    def __post_init__(self) -> None:
        for name in ("a1_marginals", "a2_marginals", "mixed"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (3, 3):
                raise StructureError(f"{name} must be 3x3, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} has non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def zeros(cls) -> "CorrelatorExpansion":
        return cls(np.zeros((3, 3)), np.zeros((3, 3)), np.zeros((3, 3)))


def validate(b: Behavior, tol: float = DEFAULT_TOL) -> ValidationReport:
    t = b.table
    residuals = t.sum(axis=(2, 3)) - 1.0
    negatives = tuple(
        (int(q1), int(q2), int(OUTCOMES[i1]), int(OUTCOMES[i2]), float(t[q1, q2, i1, i2]))
        for q1, q2, i1, i2 in zip(*np.nonzero(t < -tol))
    )
    too_large = bool(np.any(t > 1.0 + tol))
    max_residual = float(np.abs(residuals).max())
    valid = max_residual <= tol and not negatives and not too_large
    return ValidationReport(valid, residuals, negatives, max_residual)


def check_exchange_symmetry(b: Behavior, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Compare ``P(a1, a2 | q1, q2)`` against ``P(a2, a1 | q2, q1)``.

    On diagonal blocks this is the constraint ``P(+,- | q,q) = P(-,+ | q,q)``.
    """
    t = b.table
    residual = float(np.abs(t - t.transpose(1, 0, 3, 2)).max())
    return residual <= tol, residual


def site_marginals(b: Behavior) -> tuple[np.ndarray, np.ndarray]:
    """Marginal outcome distributions, each shape ``(3, 3, 2)`` indexed ``[q1, q2, i]``."""
    return b.table.sum(axis=3), b.table.sum(axis=2)


def check_no_signalling(b: Behavior, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    m1, m2 = site_marginals(b)
    # site 1 must not see q2 (axis 1); site 2 must not see q1 (axis 0)
    dev1 = m1.max(axis=1) - m1.min(axis=1)
    dev2 = m2.max(axis=0) - m2.min(axis=0)
    deviation = float(max(dev1.max(), dev2.max()))
    return deviation <= tol, deviation


def mixed_moments(b: Behavior) -> np.ndarray:
    """Full 3x3 matrix of ``<a1 a2>`` per setting pair, diagonal included."""
    return np.einsum("pqij,ij->pq", b.table, _PRODUCT_SIGNS)


def mixed_moment(b: Behavior, q1: int, q2: int) -> float:
    return float(np.sum(b.table[q1, q2] * _PRODUCT_SIGNS))


def reduce_to_moment_point(b: Behavior, tol: float = DEFAULT_TOL) -> MomentPoint:
    m = mixed_moments(b)
    for q1, q2 in OFF_DIAGONAL_CLASSES:
        if abs(m[q1, q2] - m[q2, q1]) > tol:
            raise DomainError(
                f"mixed moments disagree for settings ({q1},{q2}) vs ({q2},{q1}): "
                f"{m[q1, q2]!r} != {m[q2, q1]!r}"
            )
    return MomentPoint(m[0, 1], m[0, 2], m[1, 2])


def correlator_expansion(b: Behavior) -> CorrelatorExpansion:
    m1, m2 = site_marginals(b)
    return CorrelatorExpansion(m1 @ OUTCOMES, m2 @ OUTCOMES, mixed_moments(b))


def from_correlator_expansion(e: CorrelatorExpansion, tol: float = DEFAULT_TOL) -> Behavior:
    a1 = OUTCOMES[:, None]
    a2 = OUTCOMES[None, :]
    table = 0.25 * (
        1.0
        + a1 * e.a1_marginals[:, :, None, None]
        + a2 * e.a2_marginals[:, :, None, None]
        + a1 * a2 * e.mixed[:, :, None, None]
    )
    bad = np.argwhere(table < -tol)
    if bad.size:
        q1, q2, i1, i2 = bad[0]
        raise DomainError(
            f"expansion is infeasible: P({int(OUTCOMES[i1]):+d},{int(OUTCOMES[i2]):+d} | {q1},{q2}) "
            f"= {table[q1, q2, i1, i2]!r} < 0"
        )
    return Behavior(table)


def ns_behavior_from_point(point, diagonal=(0.0, 0.0, 0.0)) -> Behavior:
    """No-signalling behavior with zero marginals and the given mixed moments.

    Off-diagonal moments come from ``point`` (symmetrized), diagonal moments
    from ``diagonal``.
    """
    p = point if isinstance(point, MomentPoint) else MomentPoint.from_array(point)
    diag = np.asarray(diagonal, dtype=float)
    if diag.shape != (3,):
        raise DomainError(f"diagonal fill needs three values, got {diag.shape}")
    coords = np.array([p.x, p.y, p.z])
    if np.abs(coords).max() > 1.0 or not np.all(np.abs(diag) <= 1.0):
        raise DomainError(f"moments must lie in [-1, 1]; got point {tuple(coords)}, diagonal {tuple(diag)}")
    m = np.diag(diag)
    for value, (q1, q2) in zip(coords, OFF_DIAGONAL_CLASSES):
        m[q1, q2] = m[q2, q1] = value
    zeros = np.zeros((3, 3))
    return from_correlator_expansion(CorrelatorExpansion(zeros, zeros, m), tol=0.0)


# --- dimension counting ------------------------------------------------------


def _flat_index(q1: int, q2: int, i1: int, i2: int) -> int:
    return ((q1 * 3 + q2) * 2 + i1) * 2 + i2


def constraint_matrix(symmetric: bool = True) -> np.ndarray:
    """Linear constraints on the 36 flattened probabilities.

    Rows are normalization (one per setting pair, homogeneous part) and, when
    ``symmetric`` is set, exchange symmetry ``P(a1,a2|q1,q2) - P(a2,a1|q2,q1)``
    together with ``P(+,-|q,q) - P(-,+|q,q)``. Redundant rows are kept; the
    free-parameter count is ``36 - rank``.
    """
    rows = []
    for q1, q2 in SETTING_PAIRS:
        row = np.zeros(FULL_DIMENSION)
        for i1, i2 in itertools.product((0, 1), (0, 1)):
            row[_flat_index(q1, q2, i1, i2)] = 1.0
        rows.append(row)
    if symmetric:
        for q1, q2, i1, i2 in itertools.product(SETTINGS, SETTINGS, (0, 1), (0, 1)):
            row = np.zeros(FULL_DIMENSION)
            row[_flat_index(q1, q2, i1, i2)] += 1.0
            row[_flat_index(q2, q1, i2, i1)] -= 1.0
            if np.any(row):
                rows.append(row)
        for q in SETTINGS:
            row = np.zeros(FULL_DIMENSION)
            row[_flat_index(q, q, 0, 1)] = 1.0
            row[_flat_index(q, q, 1, 0)] = -1.0
            rows.append(row)
    return np.array(rows)


def free_parameter_count(symmetric: bool = True) -> int:
    return FULL_DIMENSION - int(np.linalg.matrix_rank(constraint_matrix(symmetric)))


def random_symmetric_behavior(rng: np.random.Generator) -> Behavior:
    """A generic exchange-symmetric behavior (Dirichlet blocks, then symmetrized)."""
    t = rng.dirichlet(np.ones(4), size=(3, 3)).reshape(3, 3, 2, 2)
    return Behavior(0.5 * (t + t.transpose(1, 0, 3, 2)))


# --- serialization -----------------------------------------------------------


def behavior_to_dict(b: Behavior) -> dict:
    return {
        "version": SERIAL_VERSION,
        "scenario": SCENARIO,
        "outcome_order": list(OUTCOME_ORDER),
        "blocks": {f"{q1},{q2}": [float(v) for v in b.table[q1, q2].reshape(-1)] for q1, q2 in SETTING_PAIRS},
    }


def behavior_from_dict(doc: dict) -> Behavior:
    if not isinstance(doc, dict):
        raise StructureError("behavior document must be a JSON object")
    if doc.get("version") != SERIAL_VERSION:
        raise StructureError(f"unsupported behavior version {doc.get('version')!r}")
    if str(doc.get("scenario")) != SCENARIO:
        raise StructureError(f"unsupported scenario {doc.get('scenario')!r}")
    order = doc.get("outcome_order", list(OUTCOME_ORDER))
    if list(order) != list(OUTCOME_ORDER):
        raise StructureError(f"outcome order must be {list(OUTCOME_ORDER)}, got {order!r}")
    raw = doc.get("blocks")
    if not isinstance(raw, dict):
        raise StructureError("behavior document has no 'blocks' object")
    blocks = {}
    for key, values in raw.items():
        try:
            q1, q2 = (int(s) for s in key.split(","))
        except ValueError:
            raise StructureError(f"bad block key {key!r}; expected 'q1,q2'") from None
        if (q1, q2) not in SETTING_PAIRS:
            raise StructureError(f"setting pair {key!r} out of range")
        blocks[(q1, q2)] = values
    return Behavior.from_blocks(blocks)


def dumps_behavior(b: Behavior) -> str:
    return json.dumps(behavior_to_dict(b), indent=2)


def loads_behavior(text: str) -> Behavior:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"behavior file is not valid JSON: {exc}") from None
    return behavior_from_dict(doc)
