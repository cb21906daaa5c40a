import json

import numpy as np
import pytest

from stablemaps.cli import _parse_grid, build_parser, main


def test_parse_grid():
    assert np.allclose(_parse_grid("0:1:3"), [0.0, 0.5, 1.0])
    assert np.allclose(_parse_grid("0.1,0.2"), [0.1, 0.2])


def test_help_exits_zero():
    with pytest.raises(SystemExit) as e:
        build_parser().parse_args(["--help"])
    assert e.value.code == 0


def test_model_solve_json(tmp_path):
    out = tmp_path / "table.json"
    assert main(["model", "solve", "--out", str(out)]) == 0
    d = json.load(open(out))
    assert set(d) >= {"W", "c_q", "p_q", "residual", "L_max"}
    assert len(d["W"]) == d["L_max"] + 1
    assert d["residual"] <= 1e-9


def test_peel_run_trace_csv(tmp_path):
    out = tmp_path / "trace.csv"
    assert main(["peel", "run", "--perimeter", "6", "--seed", "3",
                 "--max-steps", "200", "--out", str(out)]) == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "step,P,H,T,event_kind,event_param,face_degree"
    assert lines[1].startswith("0,6,0,0")
    # T column non-decreasing
    ts = [float(r.split(",")[3]) for r in lines[1:]]
    assert ts == sorted(ts)


def test_peel_run_cells_json(tmp_path):
    out = tmp_path / "cells.json"
    assert main(["peel", "run", "--perimeter", "6", "--algo", "layers",
                 "--cutoff", "2", "--seed", "3", "--out", str(out)]) == 0
    d = json.load(open(out))
    assert "" in d["cells"]
    assert d["ell"] == 6


def test_levy_sample_csv(tmp_path):
    out = tmp_path / "xi.csv"
    assert main(["levy", "sample", "--process", "xi", "--horizon", "1",
                 "--grid", "0:1:5", "--seed", "1", "--out", str(out)]) == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "time,value"
    assert len(lines) == 6


def test_levy_sample_gf_blocks(tmp_path):
    out = tmp_path / "gf.csv"
    assert main(["levy", "sample", "--process", "gf", "--alpha", "0",
                 "--delta", "0.2", "--grid", "0.5,1.0", "--seed", "2",
                 "--out", str(out)]) == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "time,value,ulam_label,birth_time"
    assert any(r.split(",")[2] == "root" for r in lines[1:])


def test_unknown_experiment_rejected():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["verify", "bogus"])
