"""Command-line front end.

Subcommands: contrast, sweep, modes, validate, bound.
Exit codes: 0 success, 1 validation failure, 2 invalid config, 3 unwritable output.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__, contrast, oracle, protocols
from .config import ConfigError, RunConfig, load_config, parse_overrides
from .constants import CODATA, fundamental_tone, thermal_coherence_length
from .sweep import (FIXED_ACCELERATION, FIXED_FRACTIONAL, SweepSpec, run_sweep,
                    write_csv)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_OUTPUT = 3


def _add_common(parser):
    parser.add_argument("--config", help="config file (key = value lines, SI units)")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (SI units); repeatable")
    parser.add_argument("--protocol", type=int, choices=(0, 1, 2),
                        help="acceleration protocol index")
    parser.add_argument("--regime", choices=("1d", "3d", "macro"))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--prefactor", type=float,
                        help="order-unity prefactor of the closed-form estimates")
    # convenience units, converted at this boundary only
    parser.add_argument("--size-nm", type=float, help="object size in nanometers")
    parser.add_argument("--t-half-us", type=float, help="half-duration in microseconds")
    parser.add_argument("--a-max", type=float, help="peak acceleration in m/s^2")
    parser.add_argument("--t-ph", type=float, help="phonon temperature in kelvin")


def _resolve_config(args) -> RunConfig:
    cfg = load_config(args.config, overrides=args.set)
    pairs = []
    if args.protocol is not None:
        pairs.append(f"protocol={args.protocol}")
    if args.regime is not None:
        pairs.append(f"regime={args.regime}")
    if args.seed is not None:
        pairs.append(f"seed={args.seed}")
    if args.prefactor is not None:
        pairs.append(f"prefactor={args.prefactor}")
    if args.size_nm is not None:
        pairs.append(f"size={args.size_nm * 1e-9}")
    if args.t_half_us is not None:
        pairs.append(f"T_half={args.t_half_us * 1e-6}")
    if args.a_max is not None:
        pairs.append(f"a_max={args.a_max}")
    if args.t_ph is not None:
        pairs.append(f"T_ph={args.t_ph}")
    return parse_overrides(pairs, cfg, origin="flag")


def _echo_lines(cfg: RunConfig):
    lines = [f"# sgiphonon version = {__version__}"]
    for key, val in sorted(cfg.echo().items()):
        lines.append(f"# config {key} = {val}")
    return lines


def _write_or_fail(path, text) -> int:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    return EXIT_OK


def cmd_contrast(args) -> int:
    cfg = _resolve_config(args).resolved()
    if cfg.a_max == 0:
        # degenerate zero drive: nothing is excited, full contrast
        out = _echo_lines(cfg) + ["regime = none", "minus_log_C_ph = 0", "C_ph = 1",
                                  "estimate_fS = 0"]
        text = "\n".join(out) + "\n"
        print(text, end="")
        if args.out:
            return _write_or_fail(args.out, text)
        return EXIT_OK
    p = cfg.protocol_spec()
    if cfg.regime == "1d":
        report = contrast.chain_contrast(cfg.chain(), p, cfg.T_ph)
    elif cfg.regime == "3d":
        report = contrast.sphere_contrast(cfg.sphere(), p, cfg.T_ph,
                                          prefactor=cfg.prefactor)
    else:
        report = contrast.macroscopic_contrast(cfg.material_spec(), p, cfg.size,
                                               cfg.T_ph, prefactor=cfg.prefactor)
    out = _echo_lines(cfg)
    out.append(f"regime = {report.regime}")
    out.append(f"minus_log_C_ph = {report.minus_log_C:.17g}")
    out.append(f"C_ph = {report.contrast:.17g}")
    if cfg.delta_Z is not None or cfg.delta_P is not None:
        M = cfg.object_mass()
        sigma_p = cfg.sigma_p or math.sqrt(M * CODATA.k_B * cfg.T_cm)
        sigma_z = cfg.sigma_z or CODATA.hbar / sigma_p
        state = contrast.ComState(sigma_z=sigma_z, sigma_p=sigma_p,
                                  delta_Z=cfg.delta_Z or 0.0, delta_P=cfg.delta_P or 0.0)
        out.append(f"C_cm = {contrast.contrast_com(state):.17g}")
    out.append(f"estimate_fS = {report.estimate_fS:.17g}")
    if report.regime == contrast.MACROSCOPIC:
        lam = thermal_coherence_length(cfg.object_mass(), cfg.T_ph)
        dz = cfg.a_max * cfg.T_half**2
        if report.minus_log_C > math.log(10.0):
            out.append(f"note = contrast below 10%; coherent splitting bounded by "
                       f"lambda_ph = {lam:.3e} m (requested dZ_max = {dz:.3e} m)")
    text = "\n".join(out) + "\n"
    print(text, end="")
    if args.out:
        body = report.to_text()
        return _write_or_fail(args.out, text + body)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    spec = SweepSpec(variable=args.variable, vmin=args.vmin, vmax=args.vmax,
                     count=args.count, scale=args.scale,
                     constraint_mode=args.constraint,
                     splitting_fraction=args.fraction, dv_max=args.dv_max,
                     base=cfg, protocol_indices=tuple(args.protocols))
    result = run_sweep(spec)
    try:
        write_csv(result, args.out, config_echo=cfg.echo())
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    for name, slope in sorted(result.slopes.items()):
        print(f"fit_slope {name} = {slope:.4f}")
    print(f"wrote {args.out} ({len(result.rows)} points)")
    return EXIT_OK


def cmd_modes(args) -> int:
    cfg = _resolve_config(args).resolved()
    if cfg.regime != "1d":
        raise ConfigError("the modes table is defined for the 1d chain regime")
    chain = cfg.chain()
    tbl = chain.modes
    om1 = fundamental_tone(chain.sound_speed, chain.length)
    M = chain.total_mass
    omegas = tbl.omega[1:]
    cos2 = tbl.spin_amp[1:] ** 2
    coth = np.array([contrast.thermal_factor(w, cfg.T_ph) for w in omegas])
    quantum = (CODATA.hbar * omegas >= CODATA.k_B * cfg.T_ph).astype(int)
    lines = _echo_lines(cfg)
    lines.append(f"# omega1 = {om1:.17g}")
    lines.append(f"# kBTph_over_hbar_omega1 = {CODATA.k_B * cfg.T_ph / (CODATA.hbar * om1):.17g}")
    cols = ["k", "omega_over_omega1", "quantum"]
    for n in (0, 1, 2):
        cols += [f"envelope_p{n}", f"term_p{n}"]
    lines.append(",".join(cols))
    env = {}
    for n in (0, 1, 2):
        p = protocols.by_index(n, cfg.a_max, cfg.T_half)
        spec_sq = protocols.spectrum_analytic_array(p, omegas) ** 2
        env[n] = M / (2.0 * CODATA.hbar * omegas) * coth * spec_sq
    for i, k in enumerate(range(1, chain.n_sites)):
        row = [str(k), f"{omegas[i] / om1:.17g}", str(int(quantum[i]))]
        for n in (0, 1, 2):
            row += [f"{env[n][i]:.17g}", f"{env[n][i] * cos2[i]:.17g}"]
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if args.out:
        return _write_or_fail(args.out, text)
    print(text, end="")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _resolve_config(args).resolved()
    if cfg.oracle_sites > 512:
        raise ConfigError(f"oracle runs are limited to 512 sites, got {cfg.oracle_sites}")
    mat = cfg.material_spec()
    chain = cfg.chain()
    from .chain import ChainSpec
    n = cfg.oracle_sites
    chain = ChainSpec(n_sites=n, step=chain.step, site_mass=chain.site_mass,
                      sound_speed=chain.sound_speed, spin_site=(n - 1) // 2)
    T_half = 0.5 * cfg.oracle_roundtrips * chain.length / chain.sound_speed
    dt = oracle.suggested_dt(chain, cfg.oracle_dt_refine)
    checks = []

    # free-evolution energy conservation on a thermal state
    zero = protocols.custom([(-T_half, 0.0), (T_half, 0.0)], T_half)
    traj = oracle.integrate(chain, zero, +1, dt, seed=cfg.seed, T_ph=cfg.T_ph)
    e = [oracle.mechanical_energy(chain, traj.positions[i], traj.velocities[i])
         for i in range(len(traj.times))]
    drift = (max(e) - min(e)) / max(e)
    checks.append(("energy conservation (free thermal chain)", drift, 1e-8))

    for idx in (0, 1, 2):
        p = protocols.by_index(idx, cfg.a_max, T_half)
        com = oracle.com_limit_check(chain, p, dt, seed=cfg.seed, T_ph=cfg.T_ph)
        checks.append((f"CoM momentum vs kinematics, protocol {idx}",
                       com["max_rel_dP"], 1e-8))
        checks.append((f"CoM position vs kinematics, protocol {idx}",
                       com["max_rel_dZ"], 1e-8))
        modes = oracle.mode_history_check(chain, p, dt, seed=cfg.seed, T_ph=cfg.T_ph)
        checks.append((f"mode amplitudes vs analytic, protocol {idx}",
                       modes["max_rel_mode_error"], 1e-6))
        shifts = oracle.differential_displacement(chain, p, dt, seed=cfg.seed)
        refs = [contrast.mode_displacement(chain, p, k)
                for k in range(1, chain.n_sites)]
        omegas = chain.modes.omega
        mags = [math.hypot(r.delta_u, r.delta_udot / omegas[k + 1])
                for k, r in enumerate(refs)]
        floor = 1e-6 * max(mags)  # suppressed modes are compared to the peak shift
        worst = 0.0
        for k, (shift, ref) in enumerate(zip(shifts, refs), start=1):
            w = float(omegas[k])
            err = math.hypot(shift.delta_u - ref.delta_u,
                             (shift.delta_udot - ref.delta_udot) / w)
            worst = max(worst, err / max(mags[k - 1], floor))
        checks.append((f"differential displacement vs engine, protocol {idx}",
                       worst, 1e-6))

    print(f"# oracle chain: N = {chain.n_sites}, dt = {dt:.3e} s, "
          f"T_half = {T_half:.3e} s, seed = {cfg.seed}")
    ok = True
    for name, value, tol in checks:
        status = "PASS" if value <= tol else "FAIL"
        ok &= value <= tol
        print(f"{status}  {name}: {value:.3e} (tol {tol:.0e})")
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_bound(args) -> int:
    cfg = _resolve_config(args)
    mu = args.mu_bohr * CODATA.mu_B if args.mu_bohr is not None else cfg.mu
    mat = cfg.material_spec()
    val = contrast.gradient_time_bound(mat, mu, cfg.T_ph, prefactor=cfg.prefactor)
    print(f"# material = {mat.name} (rho = {mat.density} kg/m^3, c = {mat.sound_speed} m/s)")
    print(f"# mu = {mu / CODATA.mu_B:.17g} mu_B, T_ph = {cfg.T_ph} K, "
          f"prefactor = {cfg.prefactor}")
    print(f"(T_half/us) * (b_max/(T/m))^2 <= {val:.17g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sgiphonon",
        description="Phonon decoherence in closed-loop Stern-Gerlach interferometry")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("contrast", help="single-point contrast evaluation")
    _add_common(c)
    c.add_argument("--out", help="also write the full per-mode report here")
    c.set_defaults(func=cmd_contrast)

    s = sub.add_parser("sweep", help="parameter sweep to CSV")
    _add_common(s)
    s.add_argument("--variable", default="L", choices=("L", "a_max", "T_half", "T_ph", "s"))
    s.add_argument("--min", dest="vmin", type=float, required=True,
                   help="sweep start (SI units of the variable)")
    s.add_argument("--max", dest="vmax", type=float, required=True)
    s.add_argument("--count", type=int, default=16)
    s.add_argument("--scale", default="log", choices=("log", "linear"))
    s.add_argument("--constraint", default=FIXED_ACCELERATION,
                   choices=(FIXED_ACCELERATION, FIXED_FRACTIONAL))
    s.add_argument("--fraction", type=float, default=0.1,
                   help="dZ_max / L in fixed-fractional-splitting mode")
    s.add_argument("--dv-max", type=float, default=1e-3,
                   help="velocity splitting [m/s] in fixed-fractional-splitting mode")
    s.add_argument("--protocols", type=int, nargs="+", default=[0, 1, 2],
                   choices=(0, 1, 2))
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("modes", help="per-mode exponent table (1d chain)")
    _add_common(m)
    m.add_argument("--out")
    m.set_defaults(func=cmd_modes)

    v = sub.add_parser("validate", help="run the MD-oracle consistency suite")
    _add_common(v)
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bound", help="gradient/time budget for 10% contrast")
    _add_common(b)
    b.add_argument("--mu-bohr", type=float, help="magnetic moment in Bohr magnetons")
    b.set_defaults(func=cmd_bound)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
