"""Model families mapped into the moment cube.

* local hidden-variable (LHV) models: finitely many hidden values ``lambda``
  with weights ``f(lambda)`` and site-identical single-site responses,
  parameterized by the expectations ``<a>`` at settings 0, 1, 2,
* the polarization-entangled photon pair measured at three polarizer angles,
* helpers for the deterministic vertex strategies and the curved surface of
  single-``lambda`` models.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .behavior import OUTCOMES, Behavior, CorrelatorExpansion, from_correlator_expansion
from .errors import DomainError, StructureError
from .geometry import DEFAULT_TOL, MomentPoint, sl_membership

WEIGHT_TOL = 1e-9
DROP_WEIGHT = 1e-12
SERIAL_VERSION = 1


@dataclass(frozen=True)
class DeterministicStrategy:
    alpha: int
    beta: int
    gamma: int

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if value not in (1, -1):
                raise DomainError(f"deterministic response {name}={value!r} must be +1 or -1")
            object.__setattr__(self, name, int(value))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True, eq=False)
class LocalHiddenVariableModel:
    weights: np.ndarray  # (N,)
    responses: np.ndarray  # (N, 3): <a> at settings 0, 1, 2 for each lambda

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float).reshape(-1)
        r = np.array(self.responses, dtype=float)
        if r.ndim == 1:
            r = r.reshape(1, -1)
        if w.size == 0:
            raise DomainError("an LHV model needs at least one hidden value")
        if r.shape != (w.size, 3):
            raise DomainError(f"responses must have shape ({w.size}, 3), got {r.shape}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(r))):
            raise DomainError("LHV model has non-finite entries")
        if np.any(w < 0):
            raise DomainError(f"negative hidden-variable weight in {w}")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise DomainError(f"weights sum to {w.sum()!r}, not 1")
        if np.abs(r).max() > 1.0:
            raise DomainError("single-site expectations must lie in [-1, 1]")
        w.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "responses", r)

    @classmethod
    def single(cls, strategy) -> "LocalHiddenVariableModel":
        if isinstance(strategy, DeterministicStrategy):
            strategy = strategy.as_tuple()
        return cls(np.ones(1), np.asarray(strategy, dtype=float).reshape(1, 3))

    @property
    def n_lambda(self) -> int:
        return self.weights.size

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LocalHiddenVariableModel)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.responses, other.responses)
        )

    __hash__ = None


@dataclass(frozen=True)
class PhotonPairModel:
    """Polarizer angles (radians) for settings 0, 1, 2, identical at both sites."""

    theta0: float
    theta1: float
    theta2: float

    def __post_init__(self) -> None:
        for name in ("theta0", "theta1", "theta2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"angle {name}={value!r} is not finite")
            object.__setattr__(self, name, value)

    @property
    def angles(self) -> np.ndarray:
        return np.array([self.theta0, self.theta1, self.theta2])


def moments_of_strategy(s) -> MomentPoint:
    if isinstance(s, DeterministicStrategy):
        s = s.as_tuple()
    a, b, c = (float(v) for v in s)
    if max(abs(a), abs(b), abs(c)) > 1.0:
        raise DomainError(f"single-site expectations {s} leave [-1, 1]")
    return MomentPoint(a * b, a * c, b * c)


def _pair_products(responses: np.ndarray) -> np.ndarray:
    a, b, c = responses[..., 0], responses[..., 1], responses[..., 2]
    return np.stack([a * b, a * c, b * c], axis=-1)


def moments_of_lhv(m: LocalHiddenVariableModel) -> MomentPoint:
    return MomentPoint.from_array(m.weights @ _pair_products(m.responses))


def behavior_of_lhv(m: LocalHiddenVariableModel) -> Behavior:
    # p[lambda, q, i] = (1 + a_i <a>_{q,lambda}) / 2
    p = 0.5 * (1.0 + m.responses[:, :, None] * OUTCOMES[None, None, :])
    return Behavior(np.einsum("l,lpi,lqj->pqij", m.weights, p, p))


def vertex_strategy(v: int) -> DeterministicStrategy:
    """Deterministic strategy reaching tetrahedron vertex ``v`` (1..4), with ``alpha = +1``."""
    table = {
        1: (1, 1, 1),
        2: (1, -1, -1),
        3: (1, -1, 1),
        4: (1, 1, -1),
    }
    if v not in table:
        raise DomainError(f"vertex index must be 1..4, got {v!r}")
    return DeterministicStrategy(*table[v])


def realize_sl_point(point, tol: float = DEFAULT_TOL) -> LocalHiddenVariableModel:
    """An LHV model with at most four hidden values reproducing ``point``.

    Weights are the barycentric coordinates; zero-weight vertices are dropped,
    so vertices, edges and faces use one, two and three hidden values.
    """
    state, coords = sl_membership(point, tol)
    if not state.closed:
        raise DomainError(f"point {tuple(point)} lies outside the tetrahedron; facet margins {coords.xi}")
    xi = coords.as_array()
    keep = np.flatnonzero(xi >= DROP_WEIGHT)
    weights = xi[keep] / xi[keep].sum()
    responses = np.array([vertex_strategy(int(i) + 1).as_tuple() for i in keep], dtype=float)
    return LocalHiddenVariableModel(weights, responses)


def photon_moments(m: PhotonPairModel) -> MomentPoint:
    t0, t1, t2 = m.theta0, m.theta1, m.theta2
    return MomentPoint(math.cos(2 * (t0 - t1)), math.cos(2 * (t0 - t2)), math.cos(2 * (t1 - t2)))


def photon_moment_matrix(m: PhotonPairModel) -> np.ndarray:
    """``cos 2(theta_q1 - theta_q2)`` for all nine setting pairs; the diagonal is 1."""
    t = m.angles
    return np.cos(2.0 * (t[:, None] - t[None, :]))


def photon_behavior(m: PhotonPairModel) -> Behavior:
    """Behavior with unbiased local outcomes and the photon-pair correlators."""
    zeros = np.zeros((3, 3))
    return from_correlator_expansion(CorrelatorExpansion(zeros, zeros, photon_moment_matrix(m)), tol=1e-12)


def factorize_point(point, tol: float = DEFAULT_TOL) -> tuple[float, float, float] | None:
    """Solve ``x = ab, y = ac, z = bc`` for ``(a, b, c)`` in ``[-1, 1]^3``.

    Returns one solution or ``None`` if ``point`` is not reachable by a single
    hidden value. Coordinates within ``tol`` of zero are treated as zero.
    """
    p = point if isinstance(point, MomentPoint) else MomentPoint.from_array(point)
    x, y, z = p.x, p.y, p.z
    zero = [abs(v) <= tol for v in (x, y, z)]
    n_zero = sum(zero)
    if n_zero == 3:
        sol = (1.0, 0.0, 0.0)
    elif n_zero == 2:
        # two zero products force their shared factor to zero
        if zero[0] and zero[1]:
            sol = (0.0, 1.0, z)
        elif zero[0] and zero[2]:
            sol = (1.0, 0.0, y)
        else:
            sol = (1.0, x, 0.0)
    elif n_zero == 1:
        # one vanishing factor always kills two of the three products
        return None
    else:
        if x * y * z < 0:
            return None
        a = math.sqrt(x * y / z)
        sol = (a, x / a, y / a)
        if abs(sol[1] * sol[2] - z) > tol:
            return None
    if max(abs(v) for v in sol) > 1.0 + tol:
        return None
    return sol


def is_on_curved_n1_surface(point, tol: float = DEFAULT_TOL) -> bool:
    """True if ``point`` is a single-hidden-value image with some ``|<a>_q| = 1``."""
    sol = factorize_point(point, tol)
    if sol is None:
        return False
    return max(abs(v) for v in sol) >= 1.0 - tol


# --- serialization -----------------------------------------------------------


def lhv_to_dict(m: LocalHiddenVariableModel) -> dict:
    return {
        "version": SERIAL_VERSION,
        "kind": "lhv",
        "weights": [float(w) for w in m.weights],
        "responses": [[float(v) for v in row] for row in m.responses],
    }


def lhv_from_dict(doc: dict) -> LocalHiddenVariableModel:
    if not isinstance(doc, dict) or doc.get("kind") != "lhv":
        raise StructureError("not an LHV model document")
    if doc.get("version") != SERIAL_VERSION:
        raise StructureError(f"unsupported LHV model version {doc.get('version')!r}")
    try:
        weights = np.asarray(doc["weights"], dtype=float)
        responses = np.asarray(doc["responses"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"malformed LHV model document: {exc}") from None
    # stored weights are kept verbatim so files round-trip bit for bit
    return LocalHiddenVariableModel(weights, responses)


def dumps_lhv(m: LocalHiddenVariableModel) -> str:
    return json.dumps(lhv_to_dict(m), indent=2)


def loads_lhv(text: str) -> LocalHiddenVariableModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"model file is not valid JSON: {exc}") from None
    return lhv_from_dict(doc)
