"""Layered run configuration: built-in defaults <- config file <- CLI overrides.

Config files are flat `key = value` lines, SI units, '#' comments.  The
resolved configuration is echoed into every output header so runs are
reproducible byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Optional

from .constants import CODATA, MaterialSpec, PRESETS, load_material, fundamental_tone
from .chain import ChainSpec, chain_for_length
from .sphere import SphereSpec
from . import protocols


class ConfigError(ValueError):
    """Invalid configuration; message carries the offending line when known."""


@dataclass(frozen=True)
class RunConfig:
    # object & regime
    material: str = "diamond"
    regime: str = "1d"                  # 1d | 3d | macro
    size: float = 100e-9                # chain length / sphere diameter / cube size [m]
    chain_step: Optional[float] = None  # default: material lattice constant
    chain_site_mass: Optional[float] = None  # default: material atom mass
    chain_sites: Optional[int] = None   # overrides size/chain_step-derived N
    spin_site: str = "center"           # "center" | "end" | integer site index
    spin_radius_frac: float = 0.1       # 3d: r_s = frac * D/2
    spin_alignment: float = 1.0
    # protocol
    protocol: int = 1
    a_max: float = 100.0
    T_half: float = 30e-6
    T_half_roundtrips: Optional[float] = None  # duration 2*T_half in units of L/c
    custom_profile: Optional[str] = None
    # thermal
    T_ph: float = 293.0
    T_ph_fundamental_quanta: Optional[float] = None  # k_B T_ph in units of hbar*omega_1
    T_cm: float = 293.0
    # CoM overlap inputs (optional; enables the C_cm report)
    delta_Z: Optional[float] = None
    delta_P: Optional[float] = None
    sigma_z: Optional[float] = None
    sigma_p: Optional[float] = None
    # knobs
    mu: float = CODATA.mu_B
    prefactor: float = 1.0
    seed: int = 0
    b_max_cap: float = 1e6
    T_half_cap: float = 100e-6
    field_offset: float = 0.0           # accepted and ignored (constant field term)
    # oracle runs
    oracle_sites: int = 64
    oracle_roundtrips: float = 1.4      # 2*T_half in units of L/c for validate runs
    oracle_dt_refine: int = 2048        # Verlet step = stability limit / refine

    def material_spec(self) -> MaterialSpec:
        return load_material(self.material)

    def resolved(self) -> "RunConfig":
        """Fill derived fields (regime-aware T_half / T_ph rescalings)."""
        mat = self.material_spec()
        out = self
        if self.chain_sites is not None and self.regime == "1d":
            step = self.chain_step or mat.lattice_const
            out = replace(out, size=self.chain_sites * step)
        if self.T_half_roundtrips is not None:
            T = 0.5 * self.T_half_roundtrips * out.size / mat.sound_speed
            out = replace(out, T_half=T)
        if self.T_ph_fundamental_quanta is not None:
            om1 = fundamental_tone(mat.sound_speed, out.size)
            out = replace(out, T_ph=self.T_ph_fundamental_quanta * CODATA.hbar * om1 / CODATA.k_B)
        return out

    def chain(self) -> ChainSpec:
        mat = self.material_spec()
        cfg = self.resolved()
        step = cfg.chain_step or mat.lattice_const
        mass = cfg.chain_site_mass or mat.atom_mass
        n = cfg.chain_sites or max(2, int(round(cfg.size / step)))
        spin = _spin_index(cfg.spin_site, n)
        return ChainSpec(n_sites=n, step=step, site_mass=mass,
                         sound_speed=mat.sound_speed, spin_site=spin)

    def sphere(self) -> SphereSpec:
        mat = self.material_spec()
        cfg = self.resolved()
        return SphereSpec(diameter=cfg.size, material=mat,
                          spin_radius=cfg.spin_radius_frac * 0.5 * cfg.size,
                          spin_alignment=cfg.spin_alignment)

    def protocol_spec(self, index: Optional[int] = None) -> protocols.ProtocolSpec:
        cfg = self.resolved()
        if cfg.custom_profile is not None and index is None:
            return protocols.custom_from_file(cfg.custom_profile, cfg.T_half)
        n = cfg.protocol if index is None else index
        return protocols.by_index(n, cfg.a_max, cfg.T_half)

    def object_mass(self) -> float:
        mat = self.material_spec()
        cfg = self.resolved()
        if cfg.regime == "1d":
            ch = self.chain()
            return ch.total_mass
        if cfg.regime == "3d":
            return self.sphere().total_mass
        return mat.density * cfg.size**3

    def echo(self) -> dict:
        """Flat key -> value mapping of the resolved configuration."""
        cfg = self.resolved()
        return {f.name: getattr(cfg, f.name) for f in fields(cfg)}


def _spin_index(spec, n: int) -> int:
    if isinstance(spec, str):
        key = spec.strip().lower()
        if key == "center":
            return (n - 1) // 2
        if key == "end":
            return 0
        try:
            spec = int(key)
        except ValueError:
            raise ConfigError(f"spin_site must be 'center', 'end' or an index, got {spec!r}")
    spec = int(spec)
    if spec < 0:
        spec += n
    if not 0 <= spec <= n - 1:
        raise ConfigError(f"spin_site {spec} outside 0..{n - 1}")
    return spec


_FIELD_TYPES = {f.name: f for f in fields(RunConfig)}
_INT_KEYS = {"protocol", "seed", "chain_sites", "oracle_sites", "oracle_dt_refine"}
_STR_KEYS = {"material", "regime", "spin_site", "custom_profile"}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key in _STR_KEYS:
        return raw
    if raw.lower() in ("none", ""):
        return None
    if key in _INT_KEYS:
        return int(raw)
    return float(raw)


def _apply_pair(cfg: RunConfig, pair: str, where: str) -> RunConfig:
    if "=" not in pair:
        raise ConfigError(f"{where}: expected 'key = value', got {pair!r}")
    key, _, raw = pair.partition("=")
    key = key.strip()
    if key not in _FIELD_TYPES:
        raise ConfigError(f"{where}: unknown config key {key!r}")
    try:
        value = _coerce(key, raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from None
    return replace(cfg, **{key: value})


def parse_overrides(pairs, base: RunConfig, origin: str = "override") -> RunConfig:
    """Apply key=value strings on top of base; unknown keys raise ConfigError."""
    cfg = base
    for i, pair in enumerate(pairs, start=1):
        cfg = _apply_pair(cfg, pair, where=f"{origin} {i}")
    return cfg


def load_config(path=None, overrides=(), base: Optional[RunConfig] = None) -> RunConfig:
    """defaults <- file <- overrides, validating keys with line-anchored errors."""
    cfg = base or RunConfig()
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                cfg = _apply_pair(cfg, line, where=f"{path}:{lineno}")
    if overrides:
        cfg = parse_overrides(list(overrides), cfg, origin="--set")
    # validate enums early so errors are caught at config time, not mid-run
    if cfg.regime not in ("1d", "3d", "macro"):
        raise ConfigError(f"regime must be 1d, 3d or macro, got {cfg.regime!r}")
    if cfg.protocol not in (0, 1, 2):
        raise ConfigError(f"protocol must be 0, 1 or 2, got {cfg.protocol!r}")
    if cfg.material.lower() not in PRESETS:
        # a path is fine, but fail now if it does not exist
        import os
        if not os.path.exists(cfg.material):
            raise ConfigError(f"unknown material preset or missing file: {cfg.material!r}")
    return cfg
