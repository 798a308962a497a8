"""Normal modes of the free-end 1D atom chain.

Mode k of an N-site chain has wavenumber q = pi*k/L (L = N*a), frequency
omega = sqrt(4K/m) sin(q a / 2) and standing-wave profile cos[(n+1/2) q a];
k = 0 is the zero-frequency CoM translation.  The cosine basis diagonalizes
the free-end spring Laplacian exactly, so projection/reconstruction are the
orthogonal DCT-II/DCT-III pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.fft import dct

from .constants import MaterialSpec


@dataclass(frozen=True)
class ChainSpec:
    """Geometry of the 1D chain: N sites of mass m spaced a, spin at site s."""

    n_sites: int
    step: float         # lattice step a [m]
    site_mass: float    # per-site mass m [kg]
    sound_speed: float  # c [m/s]; fixes K = m c^2 / a^2
    spin_site: int

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("chain needs at least two sites")
        if not 0 <= self.spin_site <= self.n_sites - 1:
            raise ValueError(f"spin site {self.spin_site} outside 0..{self.n_sites - 1}")
        if min(self.step, self.site_mass, self.sound_speed) <= 0:
            raise ValueError("step, site_mass and sound_speed must be positive")

    @property
    def length(self) -> float:
        return self.n_sites * self.step

    @property
    def total_mass(self) -> float:
        return self.n_sites * self.site_mass

    @property
    def spring_constant(self) -> float:
        return self.site_mass * self.sound_speed**2 / self.step**2

    @property
    def omega_max(self) -> float:
        """Band edge sqrt(4K/m) = 2c/a; every mode frequency sits below it."""
        return 2.0 * self.sound_speed / self.step

    @cached_property
    def modes(self) -> "ModeTable":
        k = np.arange(self.n_sites, dtype=float)
        q = math.pi * k / self.length
        omega = self.omega_max * np.sin(0.5 * q * self.step)
        spin_amp = np.cos((self.spin_site + 0.5) * math.pi * k / self.n_sites)
        tbl = ModeTable(q=q, omega=omega, spin_amp=spin_amp)
        q.setflags(write=False)
        omega.setflags(write=False)
        spin_amp.setflags(write=False)
        return tbl


def chain_for_length(L: float, material: MaterialSpec, spin_site=None,
                     step: float = None, site_mass: float = None) -> ChainSpec:
    """Chain of total length ~L.  Defaults: one site per lattice constant with
    12-amu site mass as configured in the material; spin at the center site."""
    a = material.lattice_const if step is None else step
    m = material.atom_mass if site_mass is None else site_mass
    n = max(2, int(round(L / a)))
    if spin_site is None:
        spin_site = (n - 1) // 2
    elif spin_site < 0:
        spin_site = n + spin_site
    return ChainSpec(n_sites=n, step=a, site_mass=m,
                     sound_speed=material.sound_speed, spin_site=spin_site)


@dataclass(frozen=True)
class ModeTable:
    """Per-mode wavenumber, frequency, and standing-wave amplitude at the spin."""

    q: np.ndarray
    omega: np.ndarray
    spin_amp: np.ndarray


def dispersion(chain: ChainSpec, k: int) -> float:
    """omega(q_k) = sqrt(4K/m) sin(q_k a / 2) with q_k = pi k / L."""
    if not 0 <= k < chain.n_sites:
        raise IndexError(f"mode index {k} outside 0..{chain.n_sites - 1}")
    return float(chain.modes.omega[k])


def mode_amplitude_at_spin(chain: ChainSpec, k: int) -> float:
    """Standing-wave value cos[(s+1/2) pi k / N] at the impurity site."""
    if not 0 <= k < chain.n_sites:
        raise IndexError(f"mode index {k} outside 0..{chain.n_sites - 1}")
    return float(chain.modes.spin_amp[k])


def project_modes(chain: ChainSpec, displacements) -> np.ndarray:
    """Displacements -> mode coefficients.

    Returns an array c of length N with c[0] the CoM mean (1/N) sum z_n and
    c[k] = (2/N) sum_n z_n cos[(n+1/2) pi k / N] for k >= 1.
    """
    z = np.asarray(displacements, dtype=float)
    if z.shape[-1] != chain.n_sites:
        raise ValueError(f"expected {chain.n_sites} displacements, got {z.shape[-1]}")
    coeff = dct(z, type=2, axis=-1) / chain.n_sites
    coeff[..., 0] *= 0.5
    return coeff


def reconstruct_modes(chain: ChainSpec, coefficients) -> np.ndarray:
    """Inverse of project_modes: z_n = c0 + sum_k c_k cos[(n+1/2) pi k / N]."""
    c = np.asarray(coefficients, dtype=float)
    if c.shape[-1] != chain.n_sites:
        raise ValueError(f"expected {chain.n_sites} coefficients, got {c.shape[-1]}")
    w = 0.5 * c
    w[..., 0] = c[..., 0]
    return dct(w, type=3, axis=-1)
