"""Continuum acoustic dipole mode of a spherical nano-object.

The dipole displacement field is the gradient of cos(theta) * g(q r) with
g(x) = sin(x)/x^2 - cos(x)/x (the first spherical Bessel function).  A
stress-free surface is imposed as a Neumann condition on the scalar mode,
g'(q R) = 0 at the radius R = D/2, whose first root reproduces q*D = 4.1632.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .constants import MaterialSpec


def dipole_radial_function(q: float, r: float) -> float:
    """g(x) = sin(x)/x^2 - cos(x)/x at x = q*r, with the series limit for small x."""
    if q <= 0 or r < 0:
        raise ValueError("need q > 0 and r >= 0")
    return _g(q * r)


def _g(x: float) -> float:
    if x < 1e-3:
        return x / 3.0 - x**3 / 30.0 + x**5 / 840.0
    return math.sin(x) / x**2 - math.cos(x) / x


def _g_prime(x: float) -> float:
    """d/dx [sin x / x^2 - cos x / x]; 1/3 at the origin."""
    if x < 1e-3:
        return 1.0 / 3.0 - x**2 / 10.0 + x**4 / 168.0
    return (x**2 - 2.0) * math.sin(x) / x**3 + 2.0 * math.cos(x) / x**2


def boundary_residual(x: float) -> float:
    """Neumann boundary function whose first positive root fixes the mode."""
    return _g_prime(x)


def _nth_boundary_root(lo: float, hi: float) -> float:
    xs = np.linspace(lo, hi, 1000)
    vals = np.array([boundary_residual(x) for x in xs])
    sign_changes = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(sign_changes) != 1:
        raise RuntimeError(
            f"expected exactly one boundary-function sign change in ({lo}, {hi}), "
            f"found {len(sign_changes)}")
    i = sign_changes[0]
    return brentq(boundary_residual, xs[i], xs[i + 1], rtol=1e-12, xtol=1e-300)


def fundamental_dipole_wavenumber(D: float) -> float:
    """First Neumann root of the dipole mode: q = 2*x1/D with x1 ~= 2.08158."""
    if D <= 0:
        raise ValueError("diameter must be positive")
    x1 = _nth_boundary_root(0.1, 4.0)
    return 2.0 * x1 / D


def second_dipole_wavenumber(D: float) -> float:
    """Second Neumann root (the mode's first overtone), x2 ~= 5.94."""
    if D <= 0:
        raise ValueError("diameter must be positive")
    x2 = _nth_boundary_root(4.0, 7.5)
    return 2.0 * x2 / D


@dataclass(frozen=True)
class SphereSpec:
    """Spherical object of diameter D with the spin at radius r_s.

    spin_alignment is |e_z . f_hat| of the local mode polarization against the
    force direction, in [0, 1]; the radial field profile is evaluated on the
    polar axis (exact at the center, where the dipole field is uniform).
    """

    diameter: float
    material: MaterialSpec
    spin_radius: float
    spin_alignment: float = 1.0

    def __post_init__(self):
        if self.diameter <= 0:
            raise ValueError("diameter must be positive")
        if not 0 <= self.spin_radius <= 0.5 * self.diameter:
            raise ValueError("spin must sit inside the sphere (0 <= r_s <= D/2)")
        if not 0.0 <= self.spin_alignment <= 1.0:
            raise ValueError("spin_alignment must be in [0, 1]")

    @property
    def total_mass(self) -> float:
        return self.material.density * math.pi * self.diameter**3 / 6.0

    @cached_property
    def wavenumber(self) -> float:
        return fundamental_dipole_wavenumber(self.diameter)


def fundamental_frequency(sphere: SphereSpec) -> float:
    """omega_1 = c * q of the fundamental dipole mode [rad/s]."""
    return sphere.material.sound_speed * sphere.wavenumber


def _field_magnitude_sq(x: np.ndarray, cos_th: np.ndarray) -> np.ndarray:
    """|grad(cos(theta) g(x))|^2 / q^2 on a (radius, angle) grid of x = q*r."""
    gp = np.array([_g_prime(v) for v in np.atleast_1d(x)])
    g_over = np.array([_g(v) / v if v > 0 else 1.0 / 3.0 for v in np.atleast_1d(x)])
    c2 = cos_th**2
    return c2[None, :] * gp[:, None] ** 2 + (1.0 - c2[None, :]) * g_over[:, None] ** 2


def _normalization_for(q: float, R: float, tol: float) -> float:
    n_r, n_th = 200, 100
    prev = None
    for _ in range(8):
        x = np.linspace(0.0, q * R, n_r)
        cos_th = np.cos(np.linspace(0.0, math.pi, n_th))
        peak = q * math.sqrt(float(np.max(_field_magnitude_sq(x, cos_th))))
        if prev is not None and abs(peak - prev) <= tol * peak:
            return 1.0 / peak
        prev = peak
        n_r *= 2
        n_th *= 2
    return 1.0 / prev


def mode_normalization(sphere: SphereSpec, tol: float = 1e-4,
                       wavenumber: float = None) -> float:
    """1 / max|f| over the sphere so the normalized mode peaks at unity.

    Scanned on a radial x polar grid, refined by doubling until the maximum is
    stable to tol.  For the fundamental the analytic answer is 3/q (the field
    peaks at the center); pass the overtone wavenumber to normalize that mode.
    """
    q = sphere.wavenumber if wavenumber is None else wavenumber
    return _normalization_for(q, 0.5 * sphere.diameter, tol)


def spin_mode_overlap(sphere: SphereSpec) -> float:
    """|e_z . f_1(r_s)|^2 of the unit-peak fundamental mode, times alignment^2.

    Evaluated on the polar axis: e_z . f = q g'(q r_s), which stays strictly
    positive all the way to the center (no odd-mode suppression in 3D).
    """
    q = sphere.wavenumber
    norm = mode_normalization(sphere)
    axis_component = q * _g_prime(q * sphere.spin_radius)
    val = (norm * axis_component * sphere.spin_alignment) ** 2
    return min(val, 1.0)
