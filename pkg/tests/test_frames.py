import math

import numpy as np
import pytest

from xpulse.frames import (
    BoostFrame,
    boost,
    boost_consistency_check,
    boosted_boundary_check,
    boosted_energy_in_cylinder,
    boosted_scalar_field,
    field_in_frame,
    in_boosted_window,
    unboost,
    z_independence_check,
)
from xpulse.numerics import spectral_integral
from xpulse.pulse import AxiconGeometry, CylPoint, scalar_field


def test_frame_validation():
    with pytest.raises(ValueError):
        BoostFrame(1.0, 2.0)
    with pytest.raises(ValueError):
        BoostFrame(0.5, 1.0)
    f = BoostFrame.comoving(AxiconGeometry(0.9, 1.0))
    assert f.gamma * math.sqrt(1 - f.V**2) == pytest.approx(1.0, abs=1e-12)


def test_boost_examples(g45):
    f = BoostFrame.comoving(g45)
    tp, zp = boost(f, 1.0, 0.0)
    assert tp == pytest.approx(1.41421, abs=1e-5) and zp == pytest.approx(-1.0, abs=1e-12)
    assert boost(f, 0.0, 0.0) == (0.0, 0.0)


def test_inverse_interval_and_phase(g45):
    rng = np.random.default_rng(2)
    f = BoostFrame.comoving(g45)
    t, z = rng.uniform(-10, 10, (2, 1000))
    tp, zp = boost(f, t, z)
    t2, z2 = unboost(f, tp, zp)
    assert np.max(np.abs(t2 - t)) < 1e-12 and np.max(np.abs(z2 - z)) < 1e-12
    assert np.max(np.abs((t**2 - z**2) - (tp**2 - zp**2))) < 1e-10
    assert np.max(np.abs((t - z * g45.cos_eta) - g45.sin_eta * tp)) < 1e-12


def test_window_mapping(g45):
    w = g45.T / g45.sin_eta
    assert w == pytest.approx(1.41421, abs=1e-5)
    assert in_boosted_window(g45, 0.999999 * w) and not in_boosted_window(g45, w)
    f = BoostFrame.comoving(g45)
    rng = np.random.default_rng(4)
    for tp, zp in rng.uniform(-3, 3, (500, 2)):
        t, z = unboost(f, tp, zp)
        assert (abs(t - z * g45.cos_eta) < g45.T) == in_boosted_window(g45, tp)


def test_boosted_field_examples(g45, rect1):
    for zp in (-7.0, 0.0, 3.3):
        assert abs(boosted_scalar_field(g45, rect1, 0.0, 0.0, zp) - 1.0) < 1e-13
    w = g45.T / g45.sin_eta
    for tp in (w, 1.0001 * w, -2 * w):
        assert boosted_scalar_field(g45, rect1, tp, 0.5) == 0
    assert boosted_scalar_field(g45, rect1, 0.99 * w, 0.0) != 0


def test_consistency_check(g45, gauss):
    rng = np.random.default_rng(6)
    w = g45.T / g45.sin_eta
    pts = np.column_stack([rng.uniform(-w, w, 1000), rng.uniform(0, 8, 1000), rng.uniform(-10, 10, 1000)])
    assert boost_consistency_check(g45, gauss, pts) < 1e-9
    outside = [(2 * w, 1.0, 0.0), (-3 * w, 0.0, 5.0)]
    assert boost_consistency_check(g45, gauss, outside) == 0.0


def test_z_independence(g45, rect1):
    f = BoostFrame.comoving(g45)
    a = field_in_frame(g45, rect1, f, 0.4, 1.3, -2.0)
    b = field_in_frame(g45, rect1, f, 0.4, 1.3, 9.0)
    assert abs(a - b) < 1e-10
    pts = [(0.3, 0.5, 0.0), (-1.2, 2.0, 4.0), (1.0, 7.0, -3.0)]
    assert z_independence_check(g45, rect1, pts) < 1e-10


def test_general_frame_goes_through_lab(g45, gauss):
    f = BoostFrame.from_velocity(0.3)
    t, z = unboost(f, 0.2, 0.5)
    assert field_in_frame(g45, gauss, f, 0.2, 1.0, 0.5) == scalar_field(g45, gauss, CylPoint(t, 1.0, z))


def test_boundary_check(g45, gauss, rect1):
    w = g45.T / g45.sin_eta
    inside = np.linspace(-0.9 * w, 0.9 * w, 7)
    assert boosted_boundary_check(g45, gauss, inside, [0.0, 0.7, 3.0]) < 1e-9
    assert boosted_boundary_check(g45, gauss, [1.2 * w, -2 * w], [0.0, 1.0]) == 0.0
    rhs = 1j * g45.cos_eta * spectral_integral(rect1, 0, 1, 0.0, 0.0)
    assert abs(rhs - 0.5j * g45.cos_eta) < 1e-14


def test_cylinder_energy_linear_in_length(g45, rect1, zero_spectrum):
    e = [boosted_energy_in_cylinder(g45, rect1, 6.0, L, 0.3) for L in (1.0, 2.0, 4.0)]
    assert abs(e[1] / e[0] - 2) / 2 < 1e-10 and abs(e[2] / e[0] - 4) / 4 < 1e-10
    assert e[0] / 1.0 == pytest.approx(e[2] / 4.0, rel=1e-10)
    assert boosted_energy_in_cylinder(g45, rect1, 6.0, 1.0, 0.9) != pytest.approx(e[0], rel=1e-3)
    assert boosted_energy_in_cylinder(g45, zero_spectrum, 6.0, 1.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        boosted_energy_in_cylinder(g45, rect1, 6.0, 1.0, 5.0)
