import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bellpyramid import behavior as bh
from bellpyramid.errors import DomainError, StructureError
from bellpyramid.geometry import MomentPoint
from bellpyramid.models import LocalHiddenVariableModel, behavior_of_lhv

import oracles

unit = st.floats(-1, 1, allow_nan=False)


def _blocks(over=None):
    blocks = {pair: [0.25] * 4 for pair in bh.SETTING_PAIRS}
    blocks.update(over or {})
    return blocks


def test_uniform_is_valid():
    rep = bh.validate(bh.Behavior.uniform())
    assert rep.valid
    assert rep.max_residual == 0
    assert rep.negative_entries == ()


def test_block_summing_to_point_nine():
    b = bh.Behavior.from_blocks(_blocks({(1, 2): [0.3, 0.2, 0.2, 0.2]}))
    rep = bh.validate(b)
    assert not rep.valid
    assert rep.residuals[1, 2] == pytest.approx(-0.1)
    assert rep.max_residual == pytest.approx(0.1)


def test_negative_entry_flagged():
    b = bh.Behavior.from_blocks(_blocks({(0, 0): [0.26, 0.25, 0.5, -0.01]}))
    rep = bh.validate(b)
    assert not rep.valid
    assert rep.negative_entries == ((0, 0, -1, -1, -0.01),)


def test_missing_setting_pair():
    blocks = _blocks()
    del blocks[(2, 1)]
    with pytest.raises(StructureError, match=r"\(2, 1\)"):
        bh.Behavior.from_blocks(blocks)


def test_wrong_shape():
    with pytest.raises(StructureError):
        bh.Behavior(np.zeros((2, 2, 2, 2)))


def test_prob_lookup_uses_canonical_order():
    b = bh.Behavior.from_blocks(_blocks({(0, 1): [0.1, 0.2, 0.3, 0.4]}))
    assert b.prob(1, 1, 0, 1) == 0.1
    assert b.prob(1, -1, 0, 1) == 0.2
    assert b.prob(-1, 1, 0, 1) == 0.3
    assert b.prob(-1, -1, 0, 1) == 0.4


def test_exchange_symmetry_uniform():
    ok, res = bh.check_exchange_symmetry(bh.Behavior.uniform())
    assert ok and res == 0


def test_exchange_symmetry_lhv(rng):
    m = LocalHiddenVariableModel(rng.dirichlet(np.ones(3)), rng.uniform(-1, 1, (3, 3)))
    ok, res = bh.check_exchange_symmetry(behavior_of_lhv(m))
    assert ok and res < 1e-15


def test_exchange_asymmetry_detected():
    # P(+,-|0,1) = 0.3 but P(-,+|1,0) = 0.2
    b = bh.Behavior.from_blocks(_blocks({(0, 1): [0.2, 0.3, 0.2, 0.3], (1, 0): [0.3, 0.3, 0.2, 0.2]}))
    ok, res = bh.check_exchange_symmetry(b)
    assert not ok
    assert res == pytest.approx(0.1)


def test_diagonal_symmetry_constraint():
    b = bh.Behavior.from_blocks(_blocks({(2, 2): [0.25, 0.3, 0.2, 0.25]}))
    ok, res = bh.check_exchange_symmetry(b)
    assert not ok and res == pytest.approx(0.1)


def test_no_signalling_lhv(rng):
    m = LocalHiddenVariableModel(rng.dirichlet(np.ones(4)), rng.uniform(-1, 1, (4, 3)))
    ok, dev = bh.check_no_signalling(behavior_of_lhv(m))
    assert ok and dev < 1e-15


def test_no_signalling_cube_realization():
    ok, dev = bh.check_no_signalling(bh.ns_behavior_from_point((0.3, -0.5, 0.9), (1, -1, 0.2)))
    assert ok and dev < 1e-15


def test_signalling_detected():
    # site-1 marginal P(a1=+1 | q1=0) is 0.5 at q2=0 but 0.7 at q2=1
    b = bh.Behavior.from_blocks(_blocks({(0, 1): [0.35, 0.35, 0.15, 0.15]}))
    ok, dev = bh.check_no_signalling(b)
    assert not ok
    assert dev == pytest.approx(0.2)


@pytest.mark.parametrize(
    "block, expected",
    [
        ((0.25, 0.25, 0.25, 0.25), 0.0),
        ((0.5, 0, 0, 0.5), 1.0),
        ((0.4, 0.1, 0.1, 0.4), 0.6),
    ],
)
def test_mixed_moment(block, expected):
    b = bh.Behavior.from_blocks(_blocks({(1, 2): list(block)}))
    assert bh.mixed_moment(b, 1, 2) == pytest.approx(expected, abs=1e-15)
    assert bh.mixed_moment(b, 1, 2) == pytest.approx(oracles.moment_by_loops(b.table, 1, 2), abs=1e-15)


def test_reduce_uniform():
    assert bh.reduce_to_moment_point(bh.Behavior.uniform()) == MomentPoint(0, 0, 0)


def test_reduce_deterministic_vertex():
    b = behavior_of_lhv(LocalHiddenVariableModel.single((1, 1, 1)))
    assert bh.reduce_to_moment_point(b) == MomentPoint(1, 1, 1)


def test_reduce_rejects_asymmetric_moments():
    b = bh.Behavior.from_blocks(_blocks({(2, 0): [0.5, 0, 0, 0.5]}))
    with pytest.raises(DomainError, match=r"\(0,2\)"):
        bh.reduce_to_moment_point(b)


def test_expansion_all_zero_is_uniform():
    assert bh.from_correlator_expansion(bh.CorrelatorExpansion.zeros()) == bh.Behavior.uniform()


def test_expansion_perfect_correlation():
    m = np.zeros((3, 3))
    m[0, 1] = 1
    b = bh.from_correlator_expansion(bh.CorrelatorExpansion(np.zeros((3, 3)), np.zeros((3, 3)), m))
    np.testing.assert_array_equal(b.block(0, 1).reshape(-1), [0.5, 0, 0, 0.5])


def test_expansion_marginal_only():
    a1 = np.zeros((3, 3))
    a1[0, 0] = 0.5
    b = bh.from_correlator_expansion(bh.CorrelatorExpansion(a1, np.zeros((3, 3)), np.zeros((3, 3))))
    np.testing.assert_allclose(b.block(0, 0).reshape(-1), [0.375, 0.375, 0.125, 0.125], atol=1e-15)


def test_expansion_infeasible_names_entry():
    m = np.zeros((3, 3))
    a1 = np.zeros((3, 3))
    m[2, 1] = 1
    a1[2, 1] = 0.5
    with pytest.raises(DomainError, match=r"\| 2,1\)"):
        bh.from_correlator_expansion(bh.CorrelatorExpansion(a1, np.zeros((3, 3)), m))


def test_expansion_bijection(rng):
    for _ in range(200):
        t = rng.dirichlet(np.ones(4), size=(3, 3))
        b = bh.Behavior(t)
        e = bh.correlator_expansion(b)
        back = bh.from_correlator_expansion(e)
        np.testing.assert_allclose(back.table, b.table, atol=1e-12)
        e2 = bh.correlator_expansion(back)
        for name in ("a1_marginals", "a2_marginals", "mixed"):
            np.testing.assert_allclose(getattr(e2, name), getattr(e, name), atol=1e-12)


def test_ns_behavior_uniform():
    assert bh.ns_behavior_from_point((0, 0, 0)) == bh.Behavior.uniform()


def test_ns_behavior_corner_outside_q():
    b = bh.ns_behavior_from_point((1, 1, -1), (1, 1, 1))
    assert bh.validate(b).valid
    assert bh.check_no_signalling(b)[0]
    assert bh.check_exchange_symmetry(b)[0]
    np.testing.assert_array_equal(np.diag(bh.mixed_moments(b)), [1, 1, 1])


def test_ns_behavior_rejects_out_of_range():
    with pytest.raises(DomainError):
        bh.ns_behavior_from_point((1.1, 0, 0))
    with pytest.raises(DomainError):
        bh.ns_behavior_from_point((0, 0, 0), (0, 2, 0))


@given(unit, unit, unit, unit, unit, unit)
def test_ns_round_trip(x, y, z, d0, d1, d2):
    b = bh.ns_behavior_from_point((x, y, z), (d0, d1, d2))
    assert tuple(bh.reduce_to_moment_point(b)) == pytest.approx((x, y, z), abs=1e-15)
    assert bh.validate(b).valid
    assert bh.check_exchange_symmetry(b)[0]
    assert bh.check_no_signalling(b)[0]


def test_moments_bounded_and_symmetric(rng):
    for _ in range(200):
        b = bh.random_symmetric_behavior(rng)
        m = bh.mixed_moments(b)
        assert np.abs(m).max() <= 1
        np.testing.assert_allclose(m, m.T, atol=1e-15)


def test_dimension_counts():
    assert bh.free_parameter_count(symmetric=False) == bh.NORMALIZED_DIMENSION == 27
    assert bh.free_parameter_count(symmetric=True) == bh.SYMMETRIC_DIMENSION == 15
    assert bh.TOTAL_FACETS == 684


def test_serialization_round_trip(rng):
    b = bh.random_symmetric_behavior(rng)
    text = bh.dumps_behavior(b)
    doc = json.loads(text)
    assert doc["scenario"] == "3322" and doc["version"] == 1
    assert doc["blocks"]["0,1"] == [float(v) for v in b.block(0, 1).reshape(-1)]
    again = bh.loads_behavior(text)
    assert again == b  # bit-exact: repr floats keep 17 significant digits


@pytest.mark.parametrize(
    "mutate, exc",
    [
        (lambda d: d.update(scenario="2222"), StructureError),
        (lambda d: d.update(version=7), StructureError),
        (lambda d: d["blocks"].pop("1,1"), StructureError),
        (lambda d: d["blocks"].update({"3,0": [0.25] * 4}), StructureError),
        (lambda d: d["blocks"].update({"0,0": [0.5, 0.5]}), StructureError),
    ],
)
def test_serialization_rejects(mutate, exc):
    doc = bh.behavior_to_dict(bh.Behavior.uniform())
    mutate(doc)
    with pytest.raises(exc):
        bh.loads_behavior(json.dumps(doc))


def test_behavior_is_immutable():
    b = bh.Behavior.uniform()
    with pytest.raises(ValueError):
        b.table[0, 0, 0, 0] = 1.0
