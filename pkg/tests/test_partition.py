import math

import numpy as np
import pytest

from stablemaps import h_up, f_up, harmonicity_defect


def test_residual_small(table256):
    assert table256.residual <= 1e-9


def test_constants_exact(table256):
    # closed-form values for the preset: c_q = 3 pi, p_q = 1/(2 pi)
    assert table256.c_q == pytest.approx(3.0 * math.pi, rel=1e-10)
    assert table256.p_q == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-3)
    assert table256.type2


def test_scaled_partition_values_closed_form(table256):
    # w_l = 3 / ((2l+1)(2l+3)) for the preset
    l = np.arange(0, 129)
    expected = 3.0 / ((2.0 * l + 1.0) * (2.0 * l + 3.0))
    assert np.allclose(table256.w(l), expected, rtol=5e-7)


def test_tail_ansatz_extension(table256):
    P = table256.pad_len
    w_far = table256.w(2 * P, strict=False)
    assert w_far == pytest.approx(table256.w_scaled[P] / 4.0, rel=1e-12)
    with pytest.raises(ValueError):
        table256.w(8 * table256.L_max + 1)


def test_nu_values(table256):
    # nu(-m) = 2 W^(m-1) c^{-m}
    assert table256.nu(-1) == pytest.approx(
        2.0 * table256.w(0) / table256.c_q, rel=1e-12)
    # closed form nu(-m) = (2/pi)/(4 m^2 - 1)
    m = np.arange(1, 50)
    expected = (2.0 / math.pi) / (4.0 * m.astype(float) ** 2 - 1.0)
    assert np.allclose(table256.nu(-m), expected, rtol=1e-6)


def test_h_up_small_values():
    # 2 l 4^{-l} C(2l, l): first values 1, 3/2, 15/8
    assert h_up(1) == pytest.approx(1.0, rel=1e-14)
    assert h_up(2) == pytest.approx(1.5, rel=1e-14)
    assert h_up(3) == pytest.approx(15.0 / 8.0, rel=1e-14)


def test_h_up_sqrt_asymptotics():
    # h_up(l) ~ 2 sqrt(l / pi)
    l = 1e6
    assert h_up(l) == pytest.approx(2.0 * math.sqrt(l / math.pi), rel=1e-5)


def test_harmonicity(table256):
    defect = harmonicity_defect(table256, list(range(1, 17)))
    assert np.max(np.abs(defect)) < 1e-6


def test_f_up_positive_and_summable(table256):
    vals = np.asarray([f_up(table256, l) for l in range(1, 20)])
    assert np.all(vals >= 0)


def test_constants_stable_under_range_doubling(table256):
    from stablemaps import PRESET_NAME, solve_partition_function

    t2 = solve_partition_function(PRESET_NAME, L_max=512, tol=2e-6)
    assert t2.c_q == pytest.approx(table256.c_q, rel=1e-3)
    assert t2.p_q == pytest.approx(table256.p_q, rel=1e-3)
