import math

import numpy as np
import pytest

from stablemaps import WeightedEnsemble, doob_pair_ensemble, \
    sample_upsilon_up
from stablemaps.levy import sample_cauchy


def test_weights_zero_exactly_on_negativity(rng):
    ens = sample_upsilon_up(0.5, 200, rng, eps_cut=0.01)
    for path, w in zip(ens.paths, ens.weights):
        pos = path.min_value() > 0.0
        if pos:
            assert w == pytest.approx(math.sqrt(path(0.5)))
        else:
            assert w == 0.0


def test_ess_definition():
    ens = WeightedEnsemble(paths=(None, None, None),
                           weights=np.asarray([1.0, 1.0, 0.0]), horizon=1.0)
    assert ens.ess == pytest.approx(2.0)
    with pytest.raises(ValueError):
        WeightedEnsemble(paths=(None,), weights=np.asarray([-1.0]),
                         horizon=1.0)


def test_values_at(rng):
    ens = sample_upsilon_up(0.25, 50, rng)
    vals = ens.values_at(0.1)
    assert vals.shape == (50,)
    assert np.all(np.isfinite(vals))


def test_upsilon_mean_grows(rng):
    # h-transform mean: E^up[X_t] relative growth is positive (transient
    # upward); weighted mean at the horizon must exceed the start 1
    ens = sample_upsilon_up(0.5, 800, rng, eps_cut=5e-3)
    w = ens.weights
    vals = ens.values_at(0.5)
    mean = float(np.sum(w * vals) / np.sum(w))
    assert mean > 1.0
    assert ens.ess > 80


def test_doob_pair_weights(rng):
    ens = doob_pair_ensemble(1.0, 2.0, 0.3, 100, rng)
    for (L, R), w in zip(ens.paths, ens.weights):
        if L.min_value() > 0 and R.min_value() > 0:
            s = L(0.3) + R(0.3)
            assert w == pytest.approx((3.0 / s) ** 2)
        else:
            assert w == 0.0
    with pytest.raises(ValueError):
        doob_pair_ensemble(0.0, 1.0, 0.3, 10, rng)


def test_ess_stable_under_cutoff_refinement(rng):
    # ESS/N at a fixed horizon should not collapse when eps_cut is halved
    a = sample_upsilon_up(1.0, 600, np.random.default_rng(5), eps_cut=0.01)
    b = sample_upsilon_up(1.0, 600, np.random.default_rng(6), eps_cut=0.005)
    ra, rb = a.ess / 600.0, b.ess / 600.0
    assert abs(ra - rb) < 0.1
