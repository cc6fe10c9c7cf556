import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hsroute import cli
from hsroute.errors import ConfigError, NonMonotonicAxis, OutOfDomain, ParseError, ShapeMismatch
from hsroute.fileio import (emit_plot_data, field_samples, load_grid_field, load_manifest,
                            manifest_from_dict, parse_grid, read_route_csv, write_grid_field)
from hsroute.route_analysis import LandOnBaseline
from hsroute.vector_field import GridField, circular

from fixtures import gyre_sphere_grid, island_grid


def _doc(**kw):
    d = {"format": "cgrid-v1", "space": "euclidean", "x1_axis": [0, 1], "x2_axis": [0, 1],
         "u": [[0.1, 0.2], [0.3, 0.4]], "v": [[0, 0], [0, 0]]}
    d.update(kw)
    return json.dumps(d)


def test_parse_all_water():
    g = parse_grid(_doc())
    assert g.u.shape == (2, 2) and not g.land_mask.any()
    assert g.sample((1.0, 1.0)).w1 == pytest.approx(0.4)


def test_null_is_land():
    g = parse_grid(_doc(u=[[0.1, None], [0.3, 0.4]], v=[[0, None], [0, 0]]))
    assert g.land_mask[0, 1] and g.is_land((1.0, 0.0))


def test_bad_axis():
    with pytest.raises(NonMonotonicAxis):
        parse_grid(_doc(x1_axis=[0, 1, 1], u=[[0, 0, 0]] * 2, v=[[0, 0, 0]] * 2))


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        parse_grid(_doc(u=[[0.1, 0.2, 0.3], [0.3, 0.4, 0.5]]))


def test_parse_error_has_position():
    with pytest.raises(ParseError, match=r"<grid>:2:"):
        parse_grid('{"format": "cgrid-v1",\n  "space": }')
    with pytest.raises(ParseError, match="missing"):
        parse_grid('{"format": "cgrid-v1"}')
    with pytest.raises(ParseError, match="both u and v"):
        parse_grid(_doc(u=[[None, 0.2], [0.3, 0.4]]))
    with pytest.raises(ParseError, match="not a number"):
        parse_grid(_doc(u=[["x", 0.2], [0.3, 0.4]]))


@given(vals=st.lists(st.floats(-3, 3, allow_nan=False), min_size=12, max_size=12),
       land=st.lists(st.booleans(), min_size=12, max_size=12))
def test_grid_round_trip_bit_exact(vals, land, tmp_path_factory):
    u = np.array(vals).reshape(3, 4)
    mask = np.array(land).reshape(3, 4)
    g = GridField(np.array([0.0, 0.5, 1.25, 3.0]), np.array([-1.0, 0.0, 0.1]), u, -u, mask)
    path = tmp_path_factory.mktemp("grid") / "g.json"
    write_grid_field(g, path)
    h = load_grid_field(path)
    assert np.array_equal(h.u, g.u) and np.array_equal(h.v, g.v)
    assert np.array_equal(h.land_mask, g.land_mask)
    pts = np.random.default_rng(0).uniform([0, -1], [3, 0.1], size=(50, 2))
    assert all(a == b for a, b in zip(g.sample_many(pts[:, 0], pts[:, 1])[0], h.sample_many(pts[:, 0], pts[:, 1])[0]))


def test_manifest_validation():
    base = {"field": "circular", "start": [3, 2], "goal": [-7, 2]}
    m = manifest_from_dict(base)
    assert m.hs.dt == 0.01 and m.smoothing.iterations == 10_000
    with pytest.raises(ConfigError, match="unknown"):
        manifest_from_dict({**base, "colour": "red"})
    with pytest.raises(ConfigError):
        manifest_from_dict({**base, "tau": 0.015})
    with pytest.raises(ConfigError):
        manifest_from_dict({"field": "circular", "start": [3, 2]})
    with pytest.raises(ConfigError):
        manifest_from_dict({**base, "N": 2.5})


def test_spherical_manifest_defaults(tmp_path):
    write_grid_field(gyre_sphere_grid(), tmp_path / "gyre.json")
    (tmp_path / "m.json").write_text(json.dumps(
        {"space": "spherical", "field": "gyre.json", "start": [-79.7, 32.7], "goal": [-29.5, 38.5]}))
    m = load_manifest(tmp_path / "m.json", {"V": 8})
    assert (m.hs.dt, m.hs.tau, m.hs.d, m.hs.V) == (600.0, 7200.0, 10.0, 8)
    assert m.smoothing.iterations == 2000
    assert m.load_field().space.is_sphere


def test_field_samples_grid_count():
    rows = field_samples(circular(), (-8, 4, -3, 4), 0.25)
    assert rows.shape == (49 * 29, 5)


def test_plot_data_flags_land_and_bounds(tmp_path):
    g = island_grid()
    f, r = emit_plot_data(np.zeros((3, 4)), g, (0, 10, 0, 6), 0.5, tmp_path / "p")
    lines = f.read_text().splitlines()
    assert lines[0] == "x1,x2,w1,w2,land"
    assert any(line.endswith(",1") for line in lines[1:])
    assert len(read_route_csv(r)) == 3
    with pytest.raises(OutOfDomain):
        emit_plot_data(np.zeros((3, 4)), g, (-1, 10, 0, 6), 0.5, tmp_path / "q")


# ------------------------------------------------------------------- CLI

def _manifest(tmp_path, **kw):
    write_grid_field(island_grid(), tmp_path / "island.json")
    doc = {"field": "island.json", "start": [1.0, 3.0], "goal": [9.0, 3.0], "iterations": 200}
    doc.update(kw)
    p = tmp_path / "run.json"
    p.write_text(json.dumps(doc))
    return p


def test_cli_route_writes_consistent_record(tmp_path, capsys):
    m = _manifest(tmp_path)
    assert cli.main(["route", "--manifest", str(m)]) == 0
    summary = json.loads((tmp_path / "run.summary.json").read_text())
    rows = read_route_csv(tmp_path / "run.route.csv")
    assert summary["reached"] is True
    assert summary["rows"] == len(rows)
    assert np.all(np.diff(rows[:, 0]) > 0)
    assert tuple(rows[-1, 1:3]) == (9.0, 3.0)
    assert summary["action_trace_length"] >= 1
    assert json.loads(capsys.readouterr().out)["travel_time"] == summary["travel_time"]


def test_cli_overrides_and_exit_codes(tmp_path, capsys):
    m = _manifest(tmp_path)
    assert cli.main(["route", "--manifest", str(m), "--max-outer", "1", "--max_checkpoints", "3"]) == 2
    assert cli.main(["route", "--manifest", str(m), "--goal", "[5.0, 3.0]"]) == 1
    assert "LandGoal" in capsys.readouterr().err
    assert cli.main(["route", "--manifest", str(m), "--nonsense", "1"]) == 1
    assert cli.main(["route", "--manifest", str(tmp_path / "missing.json")]) == 1


def test_cli_baseline(tmp_path, capsys):
    m = _manifest(tmp_path)
    with pytest.warns(LandOnBaseline):  # the straight line crosses the island
        assert cli.main(["baseline", "--manifest", str(m)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["path_length"] == pytest.approx(8.0)


def test_cli_benchmark_unsmoothed(capsys):
    assert cli.main(["benchmark", "circular", "--iterations", "0"]) == 0
    out = capsys.readouterr().out
    assert "Min. dist." in out and "11.93" in out


def test_cli_plot_data(tmp_path, capsys):
    m = _manifest(tmp_path)
    assert cli.main(["route", "--manifest", str(m)]) == 0
    capsys.readouterr()
    assert cli.main(["plot-data", "--record", str(tmp_path / "run.summary.json"), "--resolution", "0.5"]) == 0
    fpath, rpath = capsys.readouterr().out.split()
    assert read_route_csv(rpath).shape == read_route_csv(tmp_path / "run.route.csv").shape


def test_same_manifest_same_bytes(tmp_path):
    m = _manifest(tmp_path, route_csv="a.csv", summary_json="a.json")
    cli.main(["route", "--manifest", str(m)])
    first = (tmp_path / "a.csv").read_bytes(), (tmp_path / "a.json").read_bytes()
    cli.main(["route", "--manifest", str(m)])
    assert ((tmp_path / "a.csv").read_bytes(), (tmp_path / "a.json").read_bytes()) == first
    # a different worker count must not change the route itself
    cli.main(["route", "--manifest", str(m), "--workers", "3"])
    assert (tmp_path / "a.csv").read_bytes() == first[0]
