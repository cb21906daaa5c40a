import glob
import os

from reportplots import read_experiment_csv, render_experiment, write_index
from reportplots.cli import main

FIXTURE = os.path.join(os.path.dirname(__file__), "fixture")
HEADER = ("ell,t,ks,ks_ci_lo,ks_ci_hi,"
          + ",".join(f"q{i:02d}" for i in range(1, 100)) + ",n,ess")


def test_render_fixture_full_suite(tmp_path):
    paths = sorted(glob.glob(os.path.join(FIXTURE, "*.csv")))
    assert paths
    entries = []
    for p in paths:
        data = read_experiment_csv(p)
        fig = render_experiment(data, str(tmp_path))
        assert os.path.exists(fig)
        assert os.path.getsize(fig) > 1000
        entries.append((data, fig))
    idx = write_index(entries, [], str(tmp_path))
    text = open(idx).read()
    for data, _ in entries:
        assert data.name in text
    assert "PASS" in text or "FAIL" in text


def test_render_png(tmp_path):
    p = sorted(glob.glob(os.path.join(FIXTURE, "*.csv")))[0]
    data = read_experiment_csv(p)
    fig = render_experiment(data, str(tmp_path), fmt="png")
    assert fig.endswith(".png")
    assert os.path.exists(fig)


def test_render_deterministic(tmp_path):
    p = sorted(glob.glob(os.path.join(FIXTURE, "*.csv")))[0]
    data = read_experiment_csv(p)
    os.makedirs(tmp_path / "a")
    os.makedirs(tmp_path / "b")
    a = render_experiment(data, str(tmp_path / "a"), fmt="svg")
    b = render_experiment(data, str(tmp_path / "b"), fmt="svg")
    assert open(a).read() == open(b).read()


def test_cli_happy_path(tmp_path):
    out = tmp_path / "out"
    assert main(["--in", FIXTURE, "--out", str(out)]) == 0
    assert (out / "index.md").exists()
    assert list(out.glob("*.svg"))


def test_cli_skips_garbled_but_succeeds(tmp_path, capsys):
    src = tmp_path / "in"
    src.mkdir()
    good = sorted(glob.glob(os.path.join(FIXTURE, "*.csv")))[0]
    (src / os.path.basename(good)).write_text(open(good).read())
    (src / "garbled.csv").write_text("not,a,real,header\n1,2,3,4\n")
    out = tmp_path / "out"
    assert main(["--in", str(src), "--out", str(out)]) == 0
    assert "skipping" in capsys.readouterr().err
    text = (out / "index.md").read_text()
    assert "garbled.csv" in text  # listed under skipped inputs


def test_cli_all_garbled_fails(tmp_path, capsys):
    src = tmp_path / "in"
    src.mkdir()
    (src / "garbled.csv").write_text("nope\n")
    assert main(["--in", str(src), "--out", str(tmp_path / "out")]) == 2


def test_cli_empty_dir_fails(tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    assert main(["--in", str(src), "--out", str(tmp_path / "out")]) == 2
