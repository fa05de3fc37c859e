import math

import numpy as np
import pytest

from xpulse.fields import CollarError, em_field, em_field_many, em_from_hertz
from xpulse.pulse import CylPoint

from conftest import BUILTIN_SPECTRA


def at_zeta(g, zeta, rho, t=1.0):
    return CylPoint(t, rho, (t - zeta) / g.cos_eta)


def test_axis_and_examples(g45, rect1):
    e = em_field(g45, rect1, at_zeta(g45, 0.0, 0.0))
    assert e.E_theta == 0 and e.B_rho == 0
    assert abs(e.B_z - 1 / 6) < 1e-12
    assert abs(e.B_z - g45.sin_eta**2 / 3) < 1e-12
    for S in BUILTIN_SPECTRA:
        assert not np.any(em_field(g45, S, at_zeta(g45, 1.2, 0.7)).as_array())


def test_coefficient_identity(g45, gauss):
    rng = np.random.default_rng(5)
    n = 10_000
    zeta = rng.uniform(-0.999, 0.999, n)
    rho = rng.uniform(0, 8, n)
    t = rng.uniform(-3, 3, n)
    E, Br, _ = em_field_many(g45, gauss, t, rho, (t - zeta) / g45.cos_eta)
    assert np.all(np.abs(Br + g45.cos_eta * E) <= 1e-10 * np.maximum(np.abs(E), 1e-30))


def test_hertz_route_converges(g45, rect1):
    p = at_zeta(g45, 0.2, 1.0)
    exact = em_field(g45, rect1, p).as_array()
    e1 = np.abs(em_from_hertz(g45, rect1, p, 1e-2).as_array() - exact).max()
    e2 = np.abs(em_from_hertz(g45, rect1, p, 5e-3).as_array() - exact).max()
    assert e1 / e2 == pytest.approx(4.0, rel=0.25)


@pytest.mark.parametrize("S", BUILTIN_SPECTRA, ids=lambda s: s.label)
def test_hertz_order_on_random_sample(g45, S):
    rng = np.random.default_rng(9)
    pts = [at_zeta(g45, z, r) for z, r in zip(rng.uniform(-0.8, 0.8, 6), rng.uniform(0.3, 5, 6))]
    errs = []
    for h in (0.02, 0.01):
        errs.append(max(np.abs(em_from_hertz(g45, S, p, h).as_array() - em_field(g45, S, p).as_array()).max() for p in pts))
    assert 1.7 <= math.log2(errs[0] / errs[1]) <= 2.3


def test_hertz_on_axis_vanishing_components(g45, rect1):
    p = at_zeta(g45, 0.3, 0.0)
    for h in (1e-2, 1e-3):
        e = em_from_hertz(g45, rect1, p, h)
        assert abs(e.E_theta) < 1e-10 and abs(e.B_rho) < 1e-10
    bz = em_from_hertz(g45, rect1, p, 1e-3).B_z
    assert abs(bz - em_field(g45, rect1, p).B_z) < 1e-5


def test_hertz_outside_and_collar(g45, rect1):
    for h in (0.1, 0.01):
        assert not np.any(em_from_hertz(g45, rect1, at_zeta(g45, 3.0, 1.0), h).as_array())
    with pytest.raises(CollarError):
        em_from_hertz(g45, rect1, at_zeta(g45, 0.99, 1.0), 0.01)
    with pytest.raises(ValueError):
        em_from_hertz(g45, rect1, at_zeta(g45, 0.0, 1.0), 0.0)


def test_bz_flat_on_axis(g45, gauss):
    # central-difference slope of B_z at small rho shrinks linearly with rho
    t, z = 1.0, (1.0 - 0.1) / g45.cos_eta

    def slope(r, h):
        plus, minus = em_field_many(g45, gauss, t, np.array([r + h, r - h]), z)[2]
        return abs(plus - minus) / (2 * h)

    s1, s2 = slope(0.02, 0.01), slope(0.01, 0.005)
    assert s1 / s2 == pytest.approx(2.0, rel=0.05)
    assert slope(1e-4, 5e-5) < 1e-3
