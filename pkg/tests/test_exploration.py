import numpy as np
import pytest

from stablemaps import PeelEvent, run_exploration


def test_injected_events_deterministic_trace(table256):
    events = [PeelEvent("C", k=2), PeelEvent("G", side="right", j=0),
              PeelEvent("C", k=1), PeelEvent("G", side="left", j=1)]
    tr = run_exploration(table256, 4, algo="uniform", events=events,
                         exponentials=[1.0, 1.0, 1.0, 1.0])
    assert list(tr.P) == [4, 5, 4, 4, 2]
    # fpp clock: sum of 1/(2 P(i))
    expected_T = np.cumsum([0.0] + [1.0 / (2 * p) for p in (4, 5, 4, 4)])
    assert np.allclose(tr.T, expected_T)
    assert tr.faces[0][0] == 4  # C(2) discovered a square
    assert not tr.absorbed


def test_layers_height_monotone(table256, rng):
    tr = run_exploration(table256, 16, algo="layers", rng=rng,
                         max_steps=4000)
    dh = np.diff(tr.H)
    assert np.all((dh == 0) | (dh == 1))
    assert np.all(tr.T == 0.0)


def test_uniform_clock_monotone(table256, rng):
    tr = run_exploration(table256, 16, algo="uniform", rng=rng,
                         max_steps=4000)
    assert np.all(np.diff(tr.T) >= 0)
    assert tr.T[0] == 0.0
    assert np.all(tr.H == 0)


def test_finite_mode_absorbs(table256, rng):
    tr = run_exploration(table256, 2, algo="uniform", rng=rng,
                         max_steps=10**6)
    assert tr.absorbed
    assert tr.P[-1] == 0


def test_debug_words_agree(table256, rng):
    # the explicit-word cross-check must pass on random runs
    run_exploration(table256, 8, algo="layers", rng=rng, max_steps=500,
                    debug_words=True)


def test_validation(table256):
    with pytest.raises(ValueError):
        run_exploration(table256, 0)
    with pytest.raises(ValueError):
        run_exploration(table256, 4, algo="bogus")
    with pytest.raises(ValueError):
        run_exploration(table256, 4, mode="bogus")
