import math

import numpy as np
import pytest

from sgiphonon.constants import DIAMOND
from sgiphonon.chain import (ChainSpec, chain_for_length, dispersion,
                             mode_amplitude_at_spin, project_modes,
                             reconstruct_modes)


def make_chain(n, s=0):
    return ChainSpec(n_sites=n, step=DIAMOND.lattice_const, site_mass=DIAMOND.atom_mass,
                     sound_speed=DIAMOND.sound_speed, spin_site=s)


def test_com_mode_has_zero_frequency():
    assert dispersion(make_chain(17), 0) == 0.0


def test_dispersion_matches_acoustic_limit_at_small_q():
    ch = make_chain(4000)
    # qa < 0.35 -> within 1% of c*q
    for k in (1, 50, 200, 440):
        q = math.pi * k / ch.length
        assert q * ch.step < 0.35
        assert dispersion(ch, k) == pytest.approx(ch.sound_speed * q, rel=1e-2)


def test_dispersion_n17_first_mode_closed_form():
    ch = make_chain(17)
    om_max = math.sqrt(4 * ch.spring_constant / ch.site_mass)
    assert dispersion(ch, 1) == pytest.approx(om_max * math.sin(math.pi / 34), rel=1e-14)
    # deviation from the acoustic estimate pi*c/L is exactly 1 - sin(x)/x
    x = math.pi / 34
    acoustic = math.pi * ch.sound_speed / ch.length
    assert 1 - dispersion(ch, 1) / acoustic == pytest.approx(1 - math.sin(x) / x, rel=1e-10)


def test_dispersion_monotone_below_band_edge():
    ch = make_chain(257)
    om = ch.modes.omega
    assert np.all(np.diff(om) > 0)
    assert om[-1] < ch.omega_max


def test_mode_index_bounds():
    ch = make_chain(8)
    with pytest.raises(IndexError):
        dispersion(ch, 8)
    with pytest.raises(IndexError):
        mode_amplitude_at_spin(ch, -1)


def test_spin_amplitude_uniform_mode():
    assert mode_amplitude_at_spin(make_chain(23, s=11), 0) == pytest.approx(1.0)


def test_center_spin_kills_odd_modes():
    # odd N with s = (N-1)/2 puts s + 1/2 at N/2: cos(k pi / 2) = 0 for odd k
    ch = make_chain(17, s=8)
    for k in range(1, 17, 2):
        assert abs(mode_amplitude_at_spin(ch, k)) < 1e-14
    for k in range(2, 17, 2):
        assert abs(mode_amplitude_at_spin(ch, k)) == pytest.approx(1.0, abs=1e-12)


def test_end_spin_first_mode():
    ch = make_chain(33, s=0)
    assert mode_amplitude_at_spin(ch, 1) == pytest.approx(math.cos(math.pi / 66), rel=1e-14)


def test_rigid_translation_projects_to_com_only():
    ch = make_chain(64)
    coeff = project_modes(ch, np.full(64, 3.7e-12))
    assert coeff[0] == pytest.approx(3.7e-12, rel=1e-14)
    assert np.max(np.abs(coeff[1:])) < 1e-12 * 3.7e-12


def test_single_mode_projects_to_delta():
    ch = make_chain(48)
    kp = 11
    n = np.arange(48)
    z = np.cos((n + 0.5) * math.pi * kp / 48)
    coeff = project_modes(ch, z)
    assert coeff[kp] == pytest.approx(1.0, rel=1e-12)
    others = np.delete(coeff, kp)
    assert np.max(np.abs(others)) < 1e-12


@pytest.mark.parametrize("n", [2, 17, 1024, 10_000])
def test_projection_roundtrip(n):
    ch = make_chain(n)
    rng = np.random.default_rng(42)
    z = rng.normal(size=n)
    back = reconstruct_modes(ch, project_modes(ch, z))
    assert np.max(np.abs(back - z)) <= 1e-12 * np.max(np.abs(z))


def test_projection_length_mismatch():
    ch = make_chain(8)
    with pytest.raises(ValueError):
        project_modes(ch, np.zeros(9))


def test_chain_spec_validation():
    with pytest.raises(ValueError):
        make_chain(1)
    with pytest.raises(ValueError):
        make_chain(8, s=8)


def test_chain_for_length_defaults():
    ch = chain_for_length(100e-9, DIAMOND)
    assert ch.n_sites == round(100e-9 / DIAMOND.lattice_const)
    assert ch.spin_site == (ch.n_sites - 1) // 2
    assert ch.total_mass == pytest.approx(ch.n_sites * DIAMOND.atom_mass)


def test_large_mode_table_is_cached():
    ch = make_chain(1_000_000)
    t1 = ch.modes
    t2 = ch.modes
    assert t1 is t2
    assert t1.omega.shape == (1_000_000,)
