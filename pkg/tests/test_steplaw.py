import math

import numpy as np
import pytest

from stablemaps import sample_steps, transition_law


@pytest.mark.parametrize("mode", ["finite", "infinite"])
@pytest.mark.parametrize("p", [1, 8, 64])
def test_total_mass_is_one(table256, mode, p):
    law = transition_law(table256, mode, p)
    assert law.total_mass() == pytest.approx(1.0, abs=1e-8)


def test_finite_drift_matches_minus_inv_pi(table256):
    # per-step perimeter drift of the locally-largest walk is -1/pi
    for p, tol in ((64, 1e-4), (256, 5e-5)):
        law = transition_law(table256, "finite", p)
        s = np.arange(0, 200001)
        drift = float(np.sum(s * law.prob_C(s + 1)))
        for j in range((p - 1) // 2 + 1):
            mult = 1.0 if 2 * j + 1 == p else 2.0
            drift -= mult * law.prob_G(j) * (j + 1)
        assert drift == pytest.approx(-1.0 / math.pi, abs=tol)


def test_finite_locally_largest_support(table256):
    law = transition_law(table256, "finite", 9)
    # j may not exceed (p-1)/2; s = -(j+1) bounded below by -(p+1)/2
    assert law.step_probability(-5) > 0
    assert law.step_probability(-6) == 0.0


def test_infinite_no_absorption(table256):
    law = transition_law(table256, "infinite", 4)
    # the retained hole must stay positive: s = -p is impossible
    assert law.step_probability(-4) == 0.0
    assert law.step_probability(-3) > 0


def test_sampler_matches_law(table256, rng):
    p, n = 32, 40000
    law = transition_law(table256, "finite", p)
    draws = sample_steps(table256, np.full(n, p), "finite", rng)
    for s in (-3, -1, 0, 1, 4):
        prob = law.step_probability(s)
        freq = float(np.mean(draws == s))
        se = math.sqrt(prob * (1.0 - prob) / n)
        assert abs(freq - prob) < 5.0 * se + 1e-12, (s, freq, prob)


def test_sampler_mean_infinite(table256, rng):
    # infinite-mode steps at large p have mean ~ h_up drift > 0; just pin
    # the empirical mean against the enumerated law
    p, n = 64, 30000
    law = transition_law(table256, "infinite", p)
    s = np.arange(0, 400001)
    mean = float(np.sum(s * law.prob_C(s + 1)))
    for j in range(p - 1):
        mean -= 2.0 * law.prob_G(j) * (j + 1)
    draws = sample_steps(table256, np.full(n, p), "infinite", rng)
    se = float(np.std(draws)) / math.sqrt(n)
    assert abs(float(np.mean(draws)) - mean) < 6.0 * se


def test_big_perimeter_branch_seam(table256, rng):
    # infinite-mode sampling switches to an asymptotic two-sided Pareto
    # proposal above 2^19; the laws on either side of the seam are nearly
    # identical, so samples must agree to KS noise level
    from stablemaps.steplaw import _K_BIG

    n = 150000
    lo = sample_steps(table256, np.full(n, _K_BIG), "infinite", rng)
    hi = sample_steps(table256, np.full(n, 2 * _K_BIG), "infinite", rng)
    assert hi.min() > -2 * _K_BIG  # retained hole stays positive
    from stablemaps import ks_two_sample

    assert ks_two_sample(lo, hi) < 0.012


def test_finite_mode_range_guard(table256, rng):
    # walks may roam past the trusted table (tail-ansatz weights take
    # over) but 64x the solved range signals a mis-sized solve
    sample_steps(table256, np.asarray([16 * table256.L_max]), "finite", rng)
    with pytest.raises(ValueError):
        sample_steps(table256, np.asarray([64 * table256.L_max + 1]),
                     "finite", rng)


def test_law_validation(table256):
    with pytest.raises(ValueError):
        transition_law(table256, "finite", 0)
    with pytest.raises(ValueError):
        transition_law(table256, "bogus", 4)
    law = transition_law(table256, "finite", 8)
    with pytest.raises(ValueError):
        law.prob_G(8)
