"""Phonon-induced contrast loss in closed-loop Stern-Gerlach interferometry."""

__version__ = "0.1.0"

from .constants import (CODATA, DIAMOND, MaterialSpec, PhysicalConstants, ThermalState,
                        acceleration_from_gradient, fundamental_tone,
                        thermal_coherence_length)
from .protocols import (ProtocolSpec, accel_at, bicosine, by_index, closure_check,
                        custom, custom_from_file, energy_norm, parseval_constant,
                        quartic, spectrum_analytic, spectrum_numeric, square)
from .chain import ChainSpec, chain_for_length, dispersion, mode_amplitude_at_spin, \
    project_modes, reconstruct_modes
from .sphere import SphereSpec, dipole_radial_function, fundamental_dipole_wavenumber, \
    fundamental_frequency, spin_mode_overlap
from .contrast import (ComState, ContrastReport, PhaseSpaceShift, chain_contrast,
                       contrast_com, gradient_time_bound, macroscopic_contrast,
                       mode_displacement, mode_overlap_exponent, sphere_contrast,
                       spectral_mode_sum, splitting_scale_factor, thermal_factor)
from .config import ConfigError, RunConfig, load_config
