import json

import numpy as np
import pytest

from stablemaps import EXPERIMENTS, ExperimentConfig, default_config, \
    load_config
from stablemaps.experiments import EnsembleSummary, _format_row, _row, \
    _stream


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="bogus", ladder=(256,))
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="fpp", ladder=(256, 128))
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="fpp", ladder=())
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="fpp", ladder=(256,), N=10)


def test_default_config_has_tolerances():
    for name in EXPERIMENTS:
        cfg = default_config(name)
        assert cfg.experiment == name
        assert cfg.tolerances
        assert cfg.ladder == tuple(sorted(cfg.ladder))


def test_default_config_overrides():
    cfg = default_config("fpp", N=123, tolerances={"ks_final": 0.5})
    assert cfg.N == 123
    assert cfg.tolerances["ks_final"] == 0.5
    assert "gate_t" in cfg.tolerances  # merged, not replaced


def test_load_config_round_trip(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"experiment": "perimeter_finite",
                             "ladder": [128, 256], "N": 150,
                             "master_seed": 7}))
    cfg = load_config(str(p))
    assert cfg.experiment == "perimeter_finite"
    assert cfg.ladder == (128, 256)
    assert cfg.master_seed == 7
    q = tmp_path / "bad.json"
    q.write_text("{}")
    with pytest.raises(ValueError):
        load_config(str(q))


def test_stream_is_deterministic_per_label():
    cfg = default_config("fpp")
    a = _stream(cfg, "x").random(4)
    b = _stream(cfg, "x").random(4)
    c = _stream(cfg, "y").random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_csv_schema(tmp_path, rng):
    rows = [_row(256, 0.25, rng.random(100), ks=0.1, ci=(0.05, 0.15)),
            _row(0, 0.25, rng.random(100))]
    s = EnsembleSummary(experiment="fpp", rows=rows, passed=True,
                        details={}, wall_time=1.0)
    path = s.write(str(tmp_path))
    lines = open(path).read().splitlines()
    header = lines[0].split(",")
    assert header[:5] == ["ell", "t", "ks", "ks_ci_lo", "ks_ci_hi"]
    assert header[5] == "q01" and header[103] == "q99"
    assert header[-2:] == ["n", "ess"]
    assert len(header) == 106
    first = lines[1].split(",")
    assert len(first) == 106
    assert first[0] == "256"
    # continuum rows: ell = 0 with empty ks fields
    second = lines[2].split(",")
    assert second[0] == "0" and second[2] == ""
    # quantiles monotone
    qs = [float(x) for x in first[5:104]]
    assert qs == sorted(qs)
    verdict = json.load(open(tmp_path / "fpp.verdict.json"))
    assert set(verdict) == {"experiment", "pass", "details"}
    assert verdict["pass"] is True


def test_format_row_is_full_precision(rng):
    r = _row(4, 1.0, np.asarray([1.0 / 3.0] * 100))
    cells = _format_row(r).split(",")
    assert cells[5] == f"{1.0 / 3.0:.17g}"
