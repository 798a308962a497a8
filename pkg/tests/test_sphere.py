import math

import numpy as np
import pytest

from sgiphonon.constants import DIAMOND
from sgiphonon.sphere import (SphereSpec, boundary_residual, dipole_radial_function,
                              fundamental_dipole_wavenumber, fundamental_frequency,
                              mode_normalization, second_dipole_wavenumber,
                              spin_mode_overlap)


def test_radial_function_small_argument():
    assert dipole_radial_function(1.0, 1e-6) == pytest.approx(1e-6 / 3, rel=1e-9)


def test_radial_function_at_pi():
    assert dipole_radial_function(math.pi, 1.0) == pytest.approx(1 / math.pi, rel=1e-12)


def test_radial_function_bounded_scan():
    x = np.linspace(1e-4, 60.0, 20000)
    vals = np.array([dipole_radial_function(xi, 1.0) for xi in x])
    assert np.max(np.abs(vals)) < 1.0


def test_fundamental_wavenumber_times_diameter():
    for D in (1e-9, 100e-9, 1e-6):
        assert fundamental_dipole_wavenumber(D) * D == pytest.approx(4.1632, abs=5e-4)


def test_wavenumber_scale_invariance():
    q1 = fundamental_dipole_wavenumber(50e-9)
    q2 = fundamental_dipole_wavenumber(100e-9)
    assert q2 == pytest.approx(0.5 * q1, rel=1e-12)


def test_boundary_residual_at_root():
    D = 80e-9
    x = fundamental_dipole_wavenumber(D) * D / 2
    # residual relative to the function's scale near the origin (1/3)
    assert abs(boundary_residual(x)) < 1e-9 / 3


def test_single_sign_change_in_bracket():
    xs = np.linspace(0.1, 4.0, 1000)
    vals = np.array([boundary_residual(x) for x in xs])
    changes = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    assert len(changes) == 1


def test_second_root_is_distinct():
    D = 100e-9
    q2 = second_dipole_wavenumber(D)
    assert q2 * D / 2 == pytest.approx(5.94, abs=0.05)


def sphere(D=100e-9, frac=0.1, align=1.0):
    return SphereSpec(diameter=D, material=DIAMOND, spin_radius=frac * D / 2,
                      spin_alignment=align)


def test_fundamental_frequency_diamond_100nm():
    f = fundamental_frequency(sphere()) / (2 * math.pi)
    assert f == pytest.approx(17.5e3 * 4.1632 / (2 * math.pi * 100e-9), rel=1e-4)
    assert 110e9 < f < 120e9


def test_frequency_vs_cube_estimate():
    s = sphere()
    cube = math.pi * DIAMOND.sound_speed / s.diameter
    assert fundamental_frequency(s) / cube == pytest.approx(4.1632 / math.pi, rel=1e-4)


def test_mode_normalization_peak_is_at_center():
    s = sphere()
    # analytic peak: |f| = q/3 at the center, so the norm approaches 3/q
    assert mode_normalization(s) == pytest.approx(3.0 / s.wavenumber, rel=1e-6)


def test_overlap_center_is_full():
    s = sphere(frac=1e-9)
    assert spin_mode_overlap(s) == pytest.approx(1.0, rel=1e-9)


def test_overlap_zero_alignment():
    assert spin_mode_overlap(sphere(align=0.0)) == 0.0


def test_overlap_bounded_and_decreasing_outward():
    vals = [spin_mode_overlap(sphere(frac=f)) for f in (0.0, 0.2, 0.5, 0.8, 0.999)]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-4  # the radial slope vanishes at the free surface


def test_sphere_mass():
    s = sphere()
    assert s.total_mass == pytest.approx(DIAMOND.density * math.pi * (100e-9) ** 3 / 6)


def test_sphere_validation():
    with pytest.raises(ValueError):
        SphereSpec(diameter=-1.0, material=DIAMOND, spin_radius=0.0)
    with pytest.raises(ValueError):
        SphereSpec(diameter=1e-7, material=DIAMOND, spin_radius=1e-7)
    with pytest.raises(ValueError):
        SphereSpec(diameter=1e-7, material=DIAMOND, spin_radius=0.0, spin_alignment=2.0)
