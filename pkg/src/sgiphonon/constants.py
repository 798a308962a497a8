"""Physical constants, material presets, and derived single-number quantities.

SI units everywhere.  Unit conversion from CLI-friendly units (nm, us, amu, ...)
happens at the command-line boundary, never in here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants in SI units. Frozen; shared module-wide as CODATA."""

    hbar: float = 1.054571817e-34   # J s
    k_B: float = 1.380649e-23       # J/K (exact)
    amu: float = 1.66053906660e-27  # kg
    mu_B: float = 9.2740100783e-24  # J/T

    def __post_init__(self):
        for name in ("hbar", "k_B", "amu", "mu_B"):
            if getattr(self, name) <= 0:
                raise ValueError(f"constant {name} must be positive")


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class MaterialSpec:
    """Crystal the object is made of.

    Attributes
    ----------
    name : str
        Preset label.
    lattice_const : float
        Cubic cell size a [m].
    atom_mass : float
        Single-atom mass [kg].
    atoms_per_cell : int
        Atoms per cubic cell.
    sound_speed : float
        Acoustic sound speed c [m/s] (single branch; no L/T split).
    density : float
        Mass density rho [kg/m^3].
    """

    name: str
    lattice_const: float
    atom_mass: float
    atoms_per_cell: int
    sound_speed: float
    density: float

    def __post_init__(self):
        if min(self.lattice_const, self.atom_mass, self.sound_speed, self.density) <= 0:
            raise ValueError(f"material '{self.name}': all scales must be positive")
        if self.atoms_per_cell < 1:
            raise ValueError(f"material '{self.name}': atoms_per_cell must be >= 1")

    @property
    def spring_constant(self) -> float:
        """Per-atom spring constant K = m c^2 / a^2 reproducing the sound speed."""
        return self.atom_mass * self.sound_speed**2 / self.lattice_const**2


# Diamond numbers: 3.6 A cell with 8 carbon atoms, c = 17.5 km/s, rho = 3.5 g/cm^3.
DIAMOND = MaterialSpec(
    name="diamond",
    lattice_const=3.6e-10,
    atom_mass=12.0 * CODATA.amu,
    atoms_per_cell=8,
    sound_speed=17.5e3,
    density=3.5e3,
)

PRESETS = {"diamond": DIAMOND}


@dataclass(frozen=True)
class ThermalState:
    """Internal phonon temperature and CoM kinetic temperature [K]."""

    T_ph: float
    T_cm: float = 0.0

    def __post_init__(self):
        if self.T_ph < 0 or self.T_cm < 0:
            raise ValueError("temperatures must be >= 0")


def acceleration_from_gradient(mu: float, b: float, M: float) -> float:
    """Spin-dependent acceleration mu*b/M for magnetic moment mu [J/T],
    gradient b [T/m] and object mass M [kg]."""
    if M <= 0:
        raise ValueError(f"mass must be positive, got {M}")
    return mu * b / M


def thermal_coherence_length(M: float, T: float) -> float:
    """Thermal coherence length hbar / sqrt(M k_B T) [m].

    T = 0 returns math.inf (infinite coherence length, ground state).
    """
    if M <= 0:
        raise ValueError(f"mass must be positive, got {M}")
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T}")
    if T == 0:
        return math.inf
    return CODATA.hbar / math.sqrt(M * CODATA.k_B * T)


def fundamental_tone(c: float, L: float) -> float:
    """Lowest acoustic angular frequency pi*c/L [rad/s] of an object of size L."""
    if c <= 0 or L <= 0:
        raise ValueError("sound speed and size must be positive")
    return math.pi * c / L


_MATERIAL_FIELDS = {
    "lattice_const": float,
    "atom_mass": float,
    "atoms_per_cell": int,
    "sound_speed": float,
    "density": float,
}


def material_from_text(text: str, name: str = "custom") -> MaterialSpec:
    """Build a MaterialSpec from `key = value` lines (SI units, '#' comments).

    Unknown keys raise ValueError with the offending line number.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key == "name":
            name = val.strip()
            continue
        if key not in _MATERIAL_FIELDS:
            raise ValueError(f"line {lineno}: unknown material field {key!r}")
        try:
            values[key] = _MATERIAL_FIELDS[key](val.strip())
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    missing = set(_MATERIAL_FIELDS) - set(values)
    if missing:
        raise ValueError(f"missing material fields: {sorted(missing)}")
    return MaterialSpec(name=name, **values)


def load_material(path) -> MaterialSpec:
    """Read a material config file; bare preset names are looked up directly."""
    key = str(path).strip().lower()
    if key in PRESETS:
        return PRESETS[key]
    with open(path, encoding="utf-8") as fh:
        return material_from_text(fh.read())
