"""Acceptance gates: every primary criterion runs here at its stated scale
and tolerance, printing one pass/fail line each.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines as they
complete.  The ball-perimeter gate is known to fail at desk scale for an
intrinsic finite-size reason (the layer clock converges like 1/log ell);
the analysis lives in the project notes.  It is asserted at tolerance
anyway rather than weakened.
"""

import filecmp
import math
import time

import numpy as np
import pytest

from stablemaps import PRESET_NAME, LayeredBoundary, PeelEvent, \
    default_config, harmonicity_defect, peel_step, qnd_mean, run_experiment, \
    sample_steps, self_similarity_ks, solve_partition_function

CACHE = "/tmp/stablemaps-test-cache"


def _gate(name: str, ok: bool, detail: str):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def timed_table():
    t0 = time.time()
    table = solve_partition_function(PRESET_NAME, L_max=256, tol=1e-10)
    return table, time.time() - t0


def test_model_consistency(timed_table):
    table, dt = timed_table
    t2 = solve_partition_function(PRESET_NAME, L_max=512, tol=2e-6)
    drift_c = abs(t2.c_q / table.c_q - 1.0)
    drift_p = abs(t2.p_q / table.p_q - 1.0)
    ok = (table.residual <= 1e-9 and dt < 60.0
          and drift_c < 1e-3 and drift_p < 1e-3)
    _gate("model-consistency", ok,
          f"residual={table.residual:.2e} time={dt:.1f}s "
          f"c_q drift={drift_c:.2e} p_q drift={drift_p:.2e}")


def test_harmonicity(timed_table):
    table, _ = timed_table
    defect = harmonicity_defect(table, list(range(1, 65)))
    worst = float(np.max(np.abs(defect)))
    _gate("harmonicity", worst < 1e-6, f"max relative defect={worst:.2e}")


def test_peeling_invariants(timed_table):
    table, _ = timed_table
    rng = np.random.default_rng(31)
    n_walk, ell = 2000, 64
    states = [LayeredBoundary(p=ell) for _ in range(n_walk)]
    steps = violations = 0
    t0 = time.time()
    while steps < 10**6:
        ps = np.asarray([s.p for s in states])
        draws = sample_steps(table, ps, "finite", rng)
        sides = rng.random(n_walk) < 0.5
        for i, s in enumerate(states):
            d = int(draws[i])
            if d >= 0:
                ev = PeelEvent("C", k=d + 1)
            else:
                ev = PeelEvent("G", j=-d - 1,
                               side="right" if sides[i] else "left")
            p0, h0 = s.p, s.h
            try:
                new, out = peel_step(s, ev, mode="finite")
                if ev.kind == "C" and new.p - p0 != ev.k - 1:
                    violations += 1
                if ev.kind == "G" and new.p - p0 != -(ev.j + 1):
                    violations += 1
                if new.h - h0 not in (0, 1):
                    violations += 1
                if new.p > 0 and not 1 <= new.m <= 2 * new.p:
                    violations += 1
            except (ValueError, AssertionError):
                violations += 1
                new = LayeredBoundary(p=ell)
            states[i] = new if new.p > 0 else LayeredBoundary(p=ell)
            steps += 1
    dt = time.time() - t0
    _gate("peeling-invariants", violations == 0 and dt < 30.0,
          f"{steps} layered steps, {violations} violations, {dt:.1f}s")


def test_lamperti_identity_qnd():
    t0 = time.time()
    mean, se = qnd_mean(N=10**4, u=0.5, eps=1e-3, seed=4)
    dt = time.time() - t0
    ok = 0.45 <= mean <= 0.55 and dt < 300.0
    _gate("lamperti-identity-qnd", ok,
          f"mean={mean:.4f} (se {se:.4f}) time={dt:.0f}s")


def test_self_similarity():
    ks = self_similarity_ks(N=10**4, t=0.5, seed=1)
    _gate("self-similarity", ks < 0.05, f"KS={ks:.4f} at N=10^4")


def test_perimeter_finite_limit():
    cfg = default_config("perimeter_finite", cache_dir=CACHE)
    s = run_experiment(cfg)
    d = s.details
    ok = s.passed and s.wall_time < 900.0
    _gate("perimeter-finite-limit", ok,
          f"KS ladder={[round(k, 3) for k in d['ks_ladder']]} "
          f"final={d['ks_final']:.3f} tau={d['kendall_tau']:+.2f} "
          f"time={s.wall_time:.0f}s")


def test_fpp_limit():
    cfg = default_config("fpp", cache_dir=CACHE)
    s = run_experiment(cfg)
    d = s.details
    ok = s.passed and s.wall_time < 900.0
    _gate("fpp-limit", ok,
          f"KS ladder={[round(k, 3) for k in d['ks_ladder']]} "
          f"final={d['ks_final']:.3f} time={s.wall_time:.0f}s")


def test_height_limit():
    cfg = default_config("height", cache_dir=CACHE)
    s = run_experiment(cfg)
    d = s.details
    ok = s.passed and s.wall_time < 2700.0
    _gate("height-limit", ok,
          f"median gaps={[round(g, 3) for g in d['median_gaps']]} "
          f"tau={d['kendall_tau']:+.2f} "
          f"downgraded={d['downgraded_to_trend_only']} "
          f"time={s.wall_time:.0f}s")


def test_ball_perimeters_growth_fragmentation():
    # Known to fail at desk scale: the layer clock carries a 1/log(ell)
    # finite-size correction with a large constant, so ball perimeters at
    # r = s log(ell) are systematically oversized (~1.7x at ell = 4096).
    # Asserted faithfully at tolerance; see the project notes.
    cfg = default_config("ball_perimeters", cache_dir=CACHE)
    s = run_experiment(cfg)
    d = s.details
    _gate("ball-perimeters", s.passed,
          f"rank-1 KS={d['ks_rank1_final']:.3f} (gate "
          f"{cfg.tolerances['ks_rank1']}) time={s.wall_time:.0f}s")


def test_joint_faces():
    cfg = default_config("joint_faces", cache_dir=CACHE)
    s = run_experiment(cfg)
    d = s.details
    ok = s.passed
    _gate("joint-faces", ok,
          f"degree KS={d['final_ks']['degree']:.3f} "
          f"time KS={d['final_ks']['time']:.3f} "
          f"time={s.wall_time:.0f}s")


def test_determinism(tmp_path):
    cfg = default_config("perimeter_finite", ladder=(128, 256), N=100,
                         t_grid=(0.25,))
    a = tmp_path / "a"
    b = tmp_path / "b"
    run_experiment(cfg, out_dir=str(a))
    run_experiment(cfg, out_dir=str(b))
    same = filecmp.cmp(a / "perimeter_finite.csv",
                       b / "perimeter_finite.csv", shallow=False)
    _gate("determinism", same, "CSV byte-identical across reruns")
