"""Membership tests and coordinate maps in the reduced mixed-moment cube.

A point ``(x, y, z)`` collects the three off-diagonal mixed moments
``<a1 a2>`` at setting pairs (0,1), (0,2) and (1,2). Three nested bodies live
in the cube ``[-1, 1]^3``:

* the strongly-local (SL) region, the regular tetrahedron spanned by the four
  deterministic vertices,
* the quantum (Q) region, the elliptope ``1 + 2xyz - x^2 - y^2 - z^2 >= 0``,
* the no-signalling (NS) region, the whole cube.

Scalar functions take a :class:`MomentPoint`; the ``*_array`` helpers accept
``(N, 3)`` arrays and are used by the Monte Carlo and sampling code.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ConsistencyError, DomainError

DEFAULT_TOL = 1e-9

VERTICES = np.array(
    [
        [1.0, 1.0, 1.0],
        [-1.0, -1.0, 1.0],
        [-1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0],
    ]
)
VERTICES.setflags(write=False)

# Row i gives 4 * xi_i = 1 + c . (x, y, z); inverse of the vertex map.
_XI_COEFFS = VERTICES.copy()

SL_VOLUME = 8.0 / 3.0
Q_VOLUME = math.pi**2 / 2.0
NS_VOLUME = 8.0


class Membership(enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"

    @property
    def closed(self) -> bool:
        """True for points of the closed region (inside or on the boundary)."""
        return self is not Membership.OUTSIDE


@dataclass(frozen=True)
class MomentPoint:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"moment coordinate {name}={value!r} is not finite")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, arr) -> "MomentPoint":
        arr = np.asarray(arr, dtype=float).reshape(-1)
        if arr.shape != (3,):
            raise DomainError(f"expected three coordinates, got shape {arr.shape}")
        return cls(*arr)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __iter__(self) -> Iterator[float]:
        return iter((self.x, self.y, self.z))


@dataclass(frozen=True)
class BarycentricCoords:
    xi: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        xi = tuple(float(v) for v in self.xi)
        if len(xi) != 4:
            raise DomainError(f"need four barycentric weights, got {len(xi)}")
        if not all(math.isfinite(v) for v in xi):
            raise DomainError(f"non-finite barycentric weights {xi}")
        object.__setattr__(self, "xi", xi)

    def __iter__(self) -> Iterator[float]:
        return iter(self.xi)

    def __getitem__(self, i: int) -> float:
        return self.xi[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.xi)


@dataclass(frozen=True)
class RegionMembership:
    point: MomentPoint
    in_sl: Membership
    in_q: Membership
    in_ns: Membership
    barycentric: BarycentricCoords
    gram_det: float
    tolerance_used: float

    @property
    def region(self) -> str:
        """Innermost closed region containing the point: ``SL``, ``Q\\SL``, ``NS\\Q`` or ``outside``."""
        if self.in_sl.closed:
            return "SL"
        if self.in_q.closed:
            return "Q\\SL"
        if self.in_ns.closed:
            return "NS\\Q"
        return "outside"


def _as_point(point) -> MomentPoint:
    if isinstance(point, MomentPoint):
        return point
    return MomentPoint.from_array(point)


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not tol >= 0.0:
        raise DomainError(f"tolerance must be non-negative, got {tol}")
    return tol


# --- array helpers -----------------------------------------------------------


def barycentric_array(points) -> np.ndarray:
    """Barycentric weights for an ``(N, 3)`` array of points, shape ``(N, 4)``."""
    pts = np.asarray(points, dtype=float)
    return 0.25 * (1.0 + pts @ _XI_COEFFS.T)


def gram_det_array(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    return 1.0 + 2.0 * x * y * z - x * x - y * y - z * z


def sl_closed_mask(points, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Boolean mask of points in the closed tetrahedron (all ``4 xi_i >= -tol``)."""
    return (4.0 * barycentric_array(points)).min(axis=-1) >= -tol


def q_closed_mask(points, tol: float = DEFAULT_TOL) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    in_box = np.abs(pts).max(axis=-1) <= 1.0 + tol
    return in_box & (gram_det_array(pts) >= -tol)


def ns_closed_mask(points, tol: float = DEFAULT_TOL) -> np.ndarray:
    return np.abs(np.asarray(points, dtype=float)).max(axis=-1) <= 1.0 + tol


def pyramid_inequalities_array(points) -> np.ndarray:
    """Left minus right side of the three squared pyramid inequalities, shape ``(N, 3)``.

    All three strictly positive <=> strictly inside the tetrahedron. Each entry
    equals ``16 xi_a xi_b`` for a neighbouring pair in the chain (1,2), (2,3), (3,4).
    """
    pts = np.asarray(points, dtype=float)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    return np.stack(
        [
            (1.0 + z) ** 2 - (x + y) ** 2,
            (1.0 - x) ** 2 - (y - z) ** 2,
            (1.0 - z) ** 2 - (x - y) ** 2,
        ],
        axis=-1,
    )


# --- scalar operations -------------------------------------------------------


def barycentric_of(point) -> BarycentricCoords:
    p = _as_point(point)
    return BarycentricCoords(tuple(barycentric_array(p.as_array())))


def point_of(coords, tol: float = DEFAULT_TOL) -> MomentPoint:
    xi = coords.as_array() if isinstance(coords, BarycentricCoords) else np.asarray(coords, dtype=float)
    if xi.shape != (4,) or not np.all(np.isfinite(xi)):
        raise DomainError(f"expected four finite barycentric weights, got {xi!r}")
    total = xi.sum()
    if abs(total - 1.0) > tol:
        raise DomainError(f"barycentric weights sum to {total!r}, not 1")
    return MomentPoint.from_array(xi @ VERTICES)


def tetrahedron_facet_margins(point) -> tuple[float, float, float, float]:
    """Signed distances-in-weight to the four tetrahedron facets (positive inside).

    Facet ``i`` is the face opposite vertex ``i``. Since the weights sum to one,
    any three of them fix the fourth; that is why three inequalities are
    enough to describe the interior.
    """
    return barycentric_of(point).xi


def sl_membership(point, tol: float = DEFAULT_TOL) -> tuple[Membership, BarycentricCoords]:
    tol = _check_tol(tol)
    coords = barycentric_of(point)
    margin = 4.0 * min(coords.xi)
    if margin > tol:
        state = Membership.INSIDE
    elif margin >= -tol:
        state = Membership.BOUNDARY
    else:
        state = Membership.OUTSIDE
    return state, coords


def q_membership(point, tol: float = DEFAULT_TOL) -> tuple[Membership, float]:
    tol = _check_tol(tol)
    p = _as_point(point)
    det = float(gram_det_array(p.as_array()))
    largest = max(abs(p.x), abs(p.y), abs(p.z))
    if largest > 1.0 + tol or det < -tol:
        state = Membership.OUTSIDE
    elif det <= tol or largest >= 1.0 - tol:
        state = Membership.BOUNDARY
    else:
        state = Membership.INSIDE
    return state, det


def ns_membership(point, tol: float = DEFAULT_TOL) -> Membership:
    tol = _check_tol(tol)
    p = _as_point(point)
    largest = max(abs(p.x), abs(p.y), abs(p.z))
    if largest < 1.0 - tol:
        return Membership.INSIDE
    if largest <= 1.0 + tol:
        return Membership.BOUNDARY
    return Membership.OUTSIDE


def classify(point, tol: float = DEFAULT_TOL) -> RegionMembership:
    p = _as_point(point)
    in_sl, coords = sl_membership(p, tol)
    in_q, det = q_membership(p, tol)
    in_ns = ns_membership(p, tol)
    if in_sl is Membership.INSIDE and in_q is Membership.OUTSIDE:
        raise ConsistencyError(f"{p} is strictly SL but outside Q (det G = {det})")
    if in_q is Membership.INSIDE and in_ns is Membership.OUTSIDE:
        raise ConsistencyError(f"{p} is strictly Q but outside NS")
    return RegionMembership(p, in_sl, in_q, in_ns, coords, det, tol)


def gram_matrix(point) -> np.ndarray:
    p = _as_point(point)
    return np.array(
        [
            [1.0, p.x, p.y],
            [p.x, 1.0, p.z],
            [p.y, p.z, 1.0],
        ]
    )


def min_sl_third_moment(x: float, y: float) -> float:
    """Smallest ``z`` keeping ``(x, y, z)`` in the closed tetrahedron.

    Only the facets whose weight grows with ``z`` (``xi_1`` and ``xi_2``) bound
    ``z`` from below; ``xi_3`` and ``xi_4`` bound it from above.
    """
    lower = max(-1.0 - x - y, x + y - 1.0)
    upper = min(1.0 - x + y, 1.0 + x - y)
    if lower > upper:
        raise DomainError(f"no z puts ({x}, {y}, z) in the tetrahedron")
    return lower


def tetrahedron_volume(vertices=VERTICES) -> float:
    v = np.asarray(vertices, dtype=float)
    return abs(np.linalg.det(v[1:] - v[0])) / 6.0


def vertex_distances(vertices=VERTICES) -> np.ndarray:
    v = np.asarray(vertices, dtype=float)
    i, j = np.triu_indices(len(v), k=1)
    return np.linalg.norm(v[i] - v[j], axis=1)
