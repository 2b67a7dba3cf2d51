import json
import math

import numpy as np
import pytest

from bellpyramid import behavior as bh
from bellpyramid import cli, models
from bellpyramid import sampler as sp

S = 1 / math.sqrt(2)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "point, code, region",
    [
        ((0, 0, 0), 0, "SL"),
        ((1, 1, 1), 0, "SL"),
        ((S, S, 0), 10, "Q\\SL"),
        ((1, 1, -1), 20, "NS\\Q"),
    ],
)
def test_classify_point(capsys, point, code, region):
    got, out, _ = run(capsys, "classify", "--point", *map(str, point), "--format", "structured")
    assert got == code
    doc = json.loads(out)
    assert doc["version"] == 1
    assert doc["classification"]["region"] == region


def test_classify_boundary_human(capsys):
    code, out, _ = run(capsys, "classify", "--point", str(S), str(S), "0")
    assert code == 10
    assert "Q:  boundary" in out
    assert "SL: outside" in out


def test_classify_outside_cube(capsys):
    code, _, _ = run(capsys, "classify", "--point", "1.5", "0", "0")
    assert code == 30


def test_classify_needs_one_source(capsys, tmp_path):
    code, _, err = run(capsys, "classify")
    assert code == 2 and "exactly one" in err
    path = tmp_path / "b.json"
    path.write_text(bh.dumps_behavior(bh.Behavior.uniform()))
    code, _, _ = run(capsys, "classify", "--point", "0", "0", "0", "--behavior", str(path))
    assert code == 2


def test_classify_non_finite(capsys):
    code, _, err = run(capsys, "classify", "--point", "nan", "0", "0")
    assert code == 2 and "error" in err


def test_classify_behavior_file(capsys, tmp_path):
    path = tmp_path / "photon.json"
    path.write_text(bh.dumps_behavior(models.photon_behavior(models.PhotonPairModel(0, math.pi / 4, math.pi / 8))))
    code, out, _ = run(capsys, "classify", "--behavior", str(path), "--format", "structured")
    assert code == 10
    doc = json.loads(out)
    assert doc["behavior_checks"]["no_signalling"] is True
    assert doc["classification"]["point"] == pytest.approx([0, S, S], abs=1e-12)


def test_classify_malformed_behavior(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(capsys, "classify", "--behavior", str(path))[0] == 2
    assert run(capsys, "classify", "--behavior", str(tmp_path / "missing.json"))[0] == 2


def test_classify_events_file(capsys, tmp_path):
    path = tmp_path / "ev.txt"
    sp.write_events(path, sp.sample_events(bh.Behavior.uniform(), 20_000, seed=1), "uniform")
    code, out, _ = run(capsys, "classify", "--events", str(path), "--format", "structured")
    assert code == 0
    assert json.loads(out)["input"]["source"] == "uniform"


@pytest.mark.parametrize("point, n", [((0, 0, 0), 4), ((1, 1, 1), 1), ((0, 0, 1), 2), ((-1 / 3, -1 / 3, -1 / 3), 3)])
def test_realize(capsys, tmp_path, point, n):
    out_path = tmp_path / "m.json"
    code, _, _ = run(capsys, "realize", "--point", *map(repr, point), "--out", str(out_path))
    assert code == 0
    m = models.loads_lhv(out_path.read_text())
    assert m.n_lambda == n
    np.testing.assert_allclose(models.moments_of_lhv(m).as_array(), point, atol=1e-12)


def test_realize_outside(capsys):
    code, out, err = run(capsys, "realize", "--point", str(S), str(S), "0")
    assert code == 2
    assert out == ""
    assert "facet margins" in err


def test_volume_is_byte_identical(capsys):
    args = ("volume", "--samples", "200000", "--seed", "42", "--format", "structured")
    first = run(capsys, *args)[1]
    second = run(capsys, *args)[1]
    assert first == second
    doc = json.loads(first)
    assert [e["region"] for e in doc["estimates"]] == ["SL", "Q", "NS"]
    assert doc["estimates"][2]["fraction"] == 1.0


def test_volume_workers_do_not_change_output(capsys):
    a = run(capsys, "volume", "--region", "q", "--samples", "3e6", "--format", "structured")[1]
    b = run(capsys, "volume", "--region", "q", "--samples", "3e6", "--workers", "3", "--format", "structured")[1]
    assert a == b


def test_volume_timing(capsys):
    _, out, _ = run(capsys, "volume", "--region", "sl", "--samples", "1000", "--timing", "--format", "structured")
    assert "wall_time_s" in json.loads(out)["estimates"][0]


def test_bad_samples_exit_usage(capsys):
    with pytest.raises(SystemExit):
        cli.main(["volume", "--samples", "0"])


def test_sample_then_estimate(capsys, tmp_path):
    ev_path = tmp_path / "photon.txt"
    code, _, _ = run(
        capsys, "sample", "--photon", "0", repr(math.pi / 4), repr(math.pi / 8),
        "--samples", "200000", "--seed", "3", "--out", str(ev_path),
    )
    assert code == 0
    events, desc = sp.read_events(ev_path)
    assert len(events) == 200_000 and "seed=3" in desc
    code, out, _ = run(capsys, "estimate", "--events", str(ev_path), "--format", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["events"] == 200_000
    assert doc["membership"]["sl"] == "outside"


def test_estimate_matches_sample_from_same_seed(capsys, tmp_path):
    ev_path = tmp_path / "ev.txt"
    run(capsys, "sample", "--photon", "0", "0.5", "1.0", "--samples", "5000", "--seed", "9", "--out", str(ev_path))
    from_file = json.loads(run(capsys, "estimate", "--events", str(ev_path), "--format", "structured")[1])
    direct = json.loads(
        run(capsys, "estimate", "--photon", "0", "0.5", "1.0", "--samples", "5000", "--seed", "9", "--format", "structured")[1]
    )
    assert from_file["estimate"] == direct["estimate"]


def test_estimate_from_model_file(capsys, tmp_path):
    mpath = tmp_path / "m.json"
    run(capsys, "realize", "--point", "0.2", "-0.1", "0.3", "--out", str(mpath))
    code, out, _ = run(capsys, "estimate", "--model", str(mpath), "--samples", "100000", "--format", "structured")
    assert code == 0
    assert json.loads(out)["region"] == "SL"


def test_estimate_conflicting_sources(capsys, tmp_path):
    code, _, err = run(capsys, "estimate", "--events", "x.txt", "--photon", "0", "0", "0")
    assert code == 2
    code, _, err = run(capsys, "sample")
    assert code == 2 and "exactly one" in err


def test_scan_quantum(capsys):
    code, out, _ = run(capsys, "scan-quantum", "--format", "structured")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 81
    assert all(abs(r["gram_det"]) <= 1e-9 for r in rows)

    def row(t1, t2):
        return next(r for r in rows if np.allclose(r["theta"], [0, t1, t2]))

    assert row(math.pi / 4, math.pi / 8)["sl_violating"] is True
    assert row(0, 0)["sl_violating"] is False
    assert any(r["sl_violating"] for r in rows) and not all(r["sl_violating"] for r in rows)


def test_scan_quantum_human(capsys):
    _, out, _ = run(capsys, "scan-quantum", "--grid", "0", "1", "3")
    lines = out.strip().splitlines()
    assert lines[0].startswith("theta0")
    assert len(lines) == 10


def test_compare(capsys):
    code, out, _ = run(capsys, "compare")
    assert code == 0
    assert "0.333     0.500" in out
    assert "0.617     0.707" in out
    assert "0.383     0.293" in out


def test_out_file(capsys, tmp_path):
    path = tmp_path / "c.json"
    code, out, _ = run(capsys, "compare", "--format", "structured", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["command"] == "compare"
