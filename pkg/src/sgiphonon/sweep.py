"""Parameter sweeps over size / drive / temperature, with slope fits and CSV.

Two drive constraints:

fixed-acceleration
    a_max and T_half held at their configured values at every point.
fixed-fractional-splitting
    the loop is sized to the object: dZ_max = fraction * L, T_half =
    dZ_max / dv_max, a_max = dZ_max / T_half^2; points whose required
    gradient or half-time exceed the hardware caps are flagged.

Every CSV starts with '#'-prefixed metadata (resolved config, version, seed,
fitted slopes) and carries full round-trip precision so identical configs
produce byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import __version__
from .constants import CODATA, fundamental_tone
from .config import RunConfig
from .chain import chain_for_length
from .sphere import fundamental_frequency
from . import contrast, protocols

SWEEP_VARIABLES = ("L", "a_max", "T_half", "T_ph", "s")
FIXED_ACCELERATION = "fixed-acceleration"
FIXED_FRACTIONAL = "fixed-fractional-splitting"


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    vmin: float
    vmax: float
    count: int
    scale: str = "log"                  # log | linear
    constraint_mode: str = FIXED_ACCELERATION
    splitting_fraction: float = 0.1     # dZ_max / L in fixed-fractional mode
    dv_max: float = 1e-3                # velocity splitting [m/s] in that mode
    base: RunConfig = RunConfig()
    protocol_indices: tuple = (0, 1, 2)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}")
        if not self.vmin < self.vmax:
            raise ValueError("need vmin < vmax")
        if self.count < 2:
            raise ValueError("need at least two sweep points")
        if self.scale not in ("log", "linear"):
            raise ValueError("scale must be 'log' or 'linear'")
        if self.constraint_mode not in (FIXED_ACCELERATION, FIXED_FRACTIONAL):
            raise ValueError(f"unknown constraint mode {self.constraint_mode!r}")

    def grid(self) -> np.ndarray:
        if self.scale == "log":
            if self.vmin <= 0:
                raise ValueError("log grids need vmin > 0")
            return np.geomspace(self.vmin, self.vmax, self.count)
        return np.linspace(self.vmin, self.vmax, self.count)


def _point_config(spec: SweepSpec, x: float) -> RunConfig:
    cfg = spec.base
    if spec.variable == "L":
        cfg = replace(cfg, size=float(x))
    elif spec.variable == "a_max":
        cfg = replace(cfg, a_max=float(x))
    elif spec.variable == "T_half":
        cfg = replace(cfg, T_half=float(x))
    elif spec.variable == "T_ph":
        cfg = replace(cfg, T_ph=float(x))
    else:
        cfg = replace(cfg, spin_site=str(int(round(x))))
    if spec.constraint_mode == FIXED_FRACTIONAL:
        dz = spec.splitting_fraction * cfg.size
        T = dz / spec.dv_max
        a = dz / T**2
        cfg = replace(cfg, a_max=a, T_half=T)
    return cfg


def evaluate_point(spec: SweepSpec, x: float) -> dict:
    """All columns for one sweep point (pure; points are independent)."""
    cfg = _point_config(spec, x).resolved()
    mat = cfg.material_spec()
    row = {"value": float(x), "a_max": cfg.a_max, "T_half": cfg.T_half,
           "T_ph": cfg.T_ph}
    if cfg.regime == "1d":
        chain = cfg.chain()
        M = chain.total_mass
        om1 = fundamental_tone(chain.sound_speed, chain.length)
    elif cfg.regime == "3d":
        sph = cfg.sphere()
        M = sph.total_mass
        om1 = fundamental_frequency(sph)
    else:
        M = mat.density * cfg.size**3
        om1 = fundamental_tone(mat.sound_speed, cfg.size)
    row["M"] = M
    row["omega1"] = om1
    row["b_max_required"] = M * cfg.a_max / cfg.mu
    row["capped"] = int(row["b_max_required"] > cfg.b_max_cap
                        or cfg.T_half > cfg.T_half_cap)
    row["quantum"] = int(CODATA.hbar * om1 >= CODATA.k_B * cfg.T_ph / 3.0)
    for n in spec.protocol_indices:
        p = protocols.by_index(n, cfg.a_max, cfg.T_half)
        if cfg.regime == "1d":
            rep = contrast.chain_contrast(chain, p, cfg.T_ph)
            exact = rep.minus_log_C
            f = contrast.splitting_scale_factor(cfg.a_max, cfg.T_half, cfg.T_ph, M, om1)
            est = f * contrast.spectral_mode_sum(n, om1, cfg.T_half, cfg.T_ph, chain).bound
        elif cfg.regime == "3d":
            exact = contrast.sphere_contrast(sph, p, cfg.T_ph,
                                             prefactor=cfg.prefactor).minus_log_C
            est = contrast.sphere_contrast(sph, p, cfg.T_ph, spectrum="envelope",
                                           prefactor=cfg.prefactor).minus_log_C
        else:
            import warnings
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                rep = contrast.macroscopic_contrast(mat, p, cfg.size, cfg.T_ph,
                                                    cfg.prefactor)
            exact = rep.minus_log_C
            est = rep.estimate_fS
        row[f"minus_log_C_p{n}"] = exact
        row[f"estimate_p{n}"] = est
    return row


def fit_loglog(x, y, mask=None):
    """Least-squares slope/intercept of log10(y) vs log10(x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if mask is None:
        mask = np.ones_like(x, dtype=bool)
    keep = mask & (x > 0) & (y > 0) & np.isfinite(y)
    if np.count_nonzero(keep) < 2:
        return math.nan, math.nan
    slope, intercept = np.polyfit(np.log10(x[keep]), np.log10(y[keep]), 1)
    return float(slope), float(intercept)


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list
    columns: list
    slopes: dict    # column name -> fitted log-log slope vs the sweep variable

    def column(self, name) -> np.ndarray:
        return np.array([row[name] for row in self.rows])


def run_sweep(spec: SweepSpec) -> SweepResult:
    rows = [evaluate_point(spec, x) for x in spec.grid()]
    columns = list(rows[0].keys())
    slopes = {}
    x = np.array([r["value"] for r in rows])
    classical = np.array([not (r["quantum"] or r["capped"]) for r in rows])
    if spec.variable in ("L", "a_max", "T_half", "T_ph"):
        for name in columns:
            if name.startswith(("minus_log_C_p", "estimate_p")):
                y = np.array([r[name] for r in rows])
                slopes[name], _ = fit_loglog(x, y, classical)
    return SweepResult(spec=spec, rows=rows, columns=columns, slopes=slopes)


def _format(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_csv(result: SweepResult, path, config_echo: Optional[dict] = None) -> None:
    lines = [f"# sgiphonon version = {__version__}"]
    if config_echo:
        for key in sorted(config_echo):
            lines.append(f"# config {key} = {config_echo[key]}")
    sp = result.spec
    lines.append(f"# sweep variable = {sp.variable}")
    lines.append(f"# sweep range = {_format(sp.vmin)} .. {_format(sp.vmax)}"
                 f" ({sp.count} points, {sp.scale})")
    lines.append(f"# constraint_mode = {sp.constraint_mode}")
    if sp.constraint_mode == FIXED_FRACTIONAL:
        lines.append(f"# splitting_fraction = {_format(sp.splitting_fraction)}")
        lines.append(f"# dv_max = {_format(sp.dv_max)}")
    lines.append("# window_normalization = T_half")
    for name in sorted(result.slopes):
        lines.append(f"# fit_slope {name} = {_format(result.slopes[name])}")
    lines.append(",".join(result.columns))
    for row in result.rows:
        lines.append(",".join(_format(row[c]) for c in result.columns))
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
