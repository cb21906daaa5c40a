import glob
import os

import numpy as np
import pytest

from reportplots import EXPECTED_HEADER, SchemaError, read_experiment_csv

FIXTURE = os.path.join(os.path.dirname(__file__), "fixture")


def _write(tmp_path, name, lines):
    p = tmp_path / name
    p.write_text("\n".join(lines) + "\n")
    return str(p)


def _good_row(ell="256", t="0.25", ks="0.1"):
    ci = ["0.05", "0.15"] if ks else ["", ""]
    qs = [f"{0.01 * i:.17g}" for i in range(1, 100)]
    return ",".join([ell, t, ks] + ci + qs + ["100", "100"])


def test_header_is_106_columns():
    assert len(EXPECTED_HEADER) == 106
    assert EXPECTED_HEADER[5] == "q01"
    assert EXPECTED_HEADER[103] == "q99"


def test_reads_valid_file(tmp_path):
    p = _write(tmp_path, "exp.csv",
               [",".join(EXPECTED_HEADER), _good_row(),
                _good_row(ell="0", ks="")])
    data = read_experiment_csv(p)
    assert data.name == "exp"
    assert data.ladder == [256]
    assert data.row(0, 0.25).ks is None
    assert data.row(256, 0.25).ks == 0.1
    assert len(data.row(256, 0.25).quantiles) == 99


def test_bad_header_rejected(tmp_path):
    p = _write(tmp_path, "exp.csv", ["ell,t,ks", _good_row()])
    with pytest.raises(SchemaError):
        read_experiment_csv(p)


def test_bad_column_count_rejected(tmp_path):
    p = _write(tmp_path, "exp.csv",
               [",".join(EXPECTED_HEADER), _good_row() + ",9"])
    with pytest.raises(SchemaError):
        read_experiment_csv(p)


def test_ks_out_of_range_rejected(tmp_path):
    p = _write(tmp_path, "exp.csv",
               [",".join(EXPECTED_HEADER), _good_row(ks="1.5")])
    with pytest.raises(SchemaError):
        read_experiment_csv(p)


def test_non_monotone_quantiles_rejected(tmp_path):
    row = _good_row().split(",")
    row[5], row[6] = row[6], row[5]
    p = _write(tmp_path, "exp.csv",
               [",".join(EXPECTED_HEADER), ",".join(row)])
    with pytest.raises(SchemaError):
        read_experiment_csv(p)


def test_empty_file_rejected(tmp_path):
    p = tmp_path / "exp.csv"
    p.write_text("")
    with pytest.raises(SchemaError):
        read_experiment_csv(str(p))


def test_verdict_attached(tmp_path):
    _write(tmp_path, "exp.verdict.json",
           ['{"experiment": "exp", "pass": true, "details": {}}'])
    p = _write(tmp_path, "exp.csv",
               [",".join(EXPECTED_HEADER), _good_row()])
    data = read_experiment_csv(p)
    assert data.passed is True


def test_reference_fixture_has_zero_schema_errors():
    paths = sorted(glob.glob(os.path.join(FIXTURE, "*.csv")))
    assert paths, "reference fixture missing"
    for p in paths:
        data = read_experiment_csv(p)  # must not raise
        assert data.rows
        assert data.passed is not None
        # continuum rows present with empty ks
        assert any(r.ell == 0 and r.ks is None for r in data.rows)
        for r in data.rows:
            finite = r.quantiles[np.isfinite(r.quantiles)]
            assert np.all(np.diff(finite) >= 0)
