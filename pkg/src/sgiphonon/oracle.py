"""Brute-force verification by direct molecular dynamics.

Velocity-Verlet integration of the free-end spring chain with the spin force
spin_sign * (M/2) * a(t) applied to the impurity site.  Everything here is an
independent route to the same physics as the chain/contrast modules: CoM
kinematics, per-mode driven-oscillator responses, and the differential
phase-space displacements entering the contrast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import CODATA
from .chain import ChainSpec, project_modes, reconstruct_modes
from .contrast import PhaseSpaceShift
from . import protocols
from .protocols import ProtocolSpec


def stability_limit(chain: ChainSpec) -> float:
    """Largest admissible Verlet step, 2 pi / (100 omega_max)."""
    return 2.0 * math.pi / (100.0 * chain.omega_max)


def suggested_dt(chain: ChainSpec, refine: int = 2048) -> float:
    """Step size for oracle-grade accuracy (band-edge phase errors below 1e-8
    over a sound-roundtrip window at the default refinement)."""
    return stability_limit(chain) / refine


@dataclass(frozen=True)
class ChainState:
    """Snapshot: site displacements from equilibrium, velocities, time."""

    positions: np.ndarray
    velocities: np.ndarray
    time: float


@dataclass
class Trajectory:
    """Sampled chain history for one spin sign."""

    times: np.ndarray        # (S,)
    positions: np.ndarray    # (S, N)
    velocities: np.ndarray   # (S, N)
    spin_sign: int
    chain: ChainSpec
    protocol: ProtocolSpec
    dt: float
    seed: Optional[int]
    work_done: float         # by the impurity force over the run

    def state(self, i: int) -> ChainState:
        return ChainState(self.positions[i], self.velocities[i], float(self.times[i]))

    def dump_text(self) -> str:
        """Columnar text (t, z_0 ... z_{N-1}) with metadata header."""
        lines = [f"# n_sites = {self.chain.n_sites}",
                 f"# spin_sign = {self.spin_sign}",
                 f"# protocol = {self.protocol.kind}",
                 f"# dt = {self.dt:.17g}",
                 f"# seed = {self.seed}"]
        for t, z in zip(self.times, self.positions):
            lines.append(" ".join(f"{v:.17g}" for v in (t, *z)))
        return "\n".join(lines) + "\n"


def thermal_chain_state(chain: ChainSpec, T_ph: float, rng: np.random.Generator):
    """Classical thermal state drawn mode by mode: variance 2 k_B T / M in the
    mode velocity and the same over omega^2 in the amplitude; CoM starts at the
    origin with an equipartition velocity."""
    N = chain.n_sites
    M = chain.total_mass
    if T_ph <= 0:
        return np.zeros(N), np.zeros(N)
    sigma_v = math.sqrt(2.0 * CODATA.k_B * T_ph / M)
    omegas = chain.modes.omega
    u = np.zeros(N)
    udot = np.zeros(N)
    u[1:] = rng.normal(0.0, sigma_v, N - 1) / omegas[1:]
    udot[1:] = rng.normal(0.0, sigma_v, N - 1)
    udot[0] = rng.normal(0.0, math.sqrt(CODATA.k_B * T_ph / M))
    return reconstruct_modes(chain, u), reconstruct_modes(chain, udot)


def _verlet_core(z, v, F, K, m, s, ext, h, sample_steps, samp_z, samp_v):
    """Inner Verlet loop; plain scalar loops so numba can jit it when present."""
    n = z.shape[0]
    c = 0.5 * h / m
    work = 0.0
    si = 0
    n_steps = ext.shape[0] - 1
    for step in range(n_steps + 1):
        if si < sample_steps.shape[0] and step == sample_steps[si]:
            for i in range(n):
                samp_z[si, i] = z[i]
                samp_v[si, i] = v[i]
            si += 1
        if step == n_steps:
            break
        z_s_old = z[s]
        for i in range(n):
            v[i] += c * F[i]
            z[i] += h * v[i]
        F[0] = K * (z[1] - z[0])
        F[n - 1] = K * (z[n - 2] - z[n - 1])
        for i in range(1, n - 1):
            F[i] = K * (z[i + 1] - 2.0 * z[i] + z[i - 1])
        F[s] += ext[step + 1]
        for i in range(n):
            v[i] += c * F[i]
        work += 0.5 * (ext[step] + ext[step + 1]) * (z[s] - z_s_old)
    return work


def _verlet_core_numpy(z, v, F, K, m, s, ext, h, sample_steps, samp_z, samp_v):
    """Vectorized twin of _verlet_core for environments without numba."""
    n = z.shape[0]
    c = 0.5 * h / m
    work = 0.0
    si = 0
    n_steps = ext.shape[0] - 1
    tmp = np.empty(n)
    d = np.empty(n - 1)
    for step in range(n_steps + 1):
        if si < sample_steps.shape[0] and step == sample_steps[si]:
            samp_z[si] = z
            samp_v[si] = v
            si += 1
        if step == n_steps:
            break
        z_s_old = z[s]
        np.multiply(F, c, out=tmp)
        np.add(v, tmp, out=v)
        np.multiply(v, h, out=tmp)
        np.add(z, tmp, out=z)
        np.subtract(z[1:], z[:-1], out=d)
        F[:-1] = d
        F[-1] = 0.0
        F[1:] -= d
        F *= K
        F[s] += ext[step + 1]
        np.multiply(F, c, out=tmp)
        np.add(v, tmp, out=v)
        work += 0.5 * (ext[step] + ext[step + 1]) * (z[s] - z_s_old)
    return work


try:  # pragma: no cover - exercised implicitly
    from numba import njit
    _verlet_kernel = njit(cache=True)(_verlet_core)
except ImportError:  # pragma: no cover
    _verlet_kernel = _verlet_core_numpy


def _node_forces(protocol: ProtocolSpec, times: np.ndarray, half_force: float) -> np.ndarray:
    """Spin force at every Verlet node; jump-aligned nodes get the mean of the
    one-sided limits (zero for the square), preserving second-order accuracy."""
    a = np.asarray(protocols.accel_at(protocol, times), dtype=float).copy()
    if protocol.kind == protocols.SQUARE:
        eps = 1e-9 * protocol.T_half
        jump = np.abs(np.abs(times) - 0.5 * protocol.T_half) < eps
        a[jump] = 0.0
    return half_force * a


def integrate(chain: ChainSpec, protocol: ProtocolSpec, spin_sign: int, dt: float,
              initial=None, seed: Optional[int] = None, T_ph: float = 0.0,
              n_samples: int = 129) -> Trajectory:
    """Velocity-Verlet run over the full window t in [-T_half, +T_half].

    dt above the stability limit is rejected.  The actual step divides the
    window into a multiple of four so the square protocol's jumps land exactly
    on nodes (where the force lookup uses the mean of the one-sided limits,
    keeping the integrator second order across the jumps).
    """
    if spin_sign not in (-1, 1):
        raise ValueError("spin_sign must be +1 or -1")
    limit = stability_limit(chain)
    if dt > limit:
        raise ValueError(
            f"dt = {dt:.3e} s exceeds the stability bound 2*pi/(100*omega_max) "
            f"= {limit:.3e} s for this chain")
    T = protocol.T_half
    n_steps = 4 * max(1, math.ceil(2.0 * T / (4.0 * dt)))
    h = 2.0 * T / n_steps

    if initial is not None:
        z = np.array(initial[0], dtype=float)
        v = np.array(initial[1], dtype=float)
        if z.shape != (chain.n_sites,) or v.shape != (chain.n_sites,):
            raise ValueError("initial state must hold N positions and N velocities")
    else:
        rng = np.random.default_rng(seed)
        z, v = thermal_chain_state(chain, T_ph, rng)

    K = chain.spring_constant
    m = chain.site_mass
    s = chain.spin_site

    stride = max(1, n_steps // max(1, n_samples - 1))
    sample_steps = list(range(0, n_steps, stride))
    if sample_steps[-1] != n_steps:
        sample_steps.append(n_steps)
    sample_steps = np.array(sample_steps, dtype=np.int64)
    samples_t = -T + sample_steps * h
    samples_z = np.empty((len(sample_steps), chain.n_sites))
    samples_v = np.empty((len(sample_steps), chain.n_sites))

    node_times = -T + h * np.arange(n_steps + 1)
    ext = _node_forces(protocol, node_times, spin_sign * 0.5 * chain.total_mass)
    F = np.empty(chain.n_sites)
    F[:-1] = np.diff(z)
    F[-1] = 0.0
    F[1:] -= np.diff(z)
    F *= K
    F[s] += ext[0]
    work = _verlet_kernel(z, v, F, K, m, s, ext, h, sample_steps, samples_z, samples_v)
    return Trajectory(times=samples_t, positions=samples_z, velocities=samples_v,
                      spin_sign=spin_sign, chain=chain, protocol=protocol,
                      dt=h, seed=seed, work_done=work)


def mechanical_energy(chain: ChainSpec, z: np.ndarray, v: np.ndarray) -> float:
    K = chain.spring_constant
    return float(0.5 * chain.site_mass * np.sum(v**2) + 0.5 * K * np.sum(np.diff(z) ** 2))


# ---------------------------------------------------------------------------
# analytic references (independent quadrature routes)


def analytic_com(chain: ChainSpec, protocol: ProtocolSpec, spin_sign: int,
                 t: float, Z0: float = 0.0, V0: float = 0.0):
    """CoM (position, momentum) at time t from rest-frame kinematics:
    the total momentum obeys dP/dt = spin_sign * (M/2) a(t)."""
    M = chain.total_mass
    dv = protocols.integrate_accel(protocol, -protocol.T_half, t)
    # displacement kernel integral (t - t') a(t') dt'
    edges = protocols._panels(protocol, -protocol.T_half, t, 2.0 * math.pi / protocol.T_half)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    tt = mid[:, None] + half[:, None] * protocols._GL_NODES[None, :]
    w = half[:, None] * protocols._GL_WEIGHTS[None, :]
    dz = float(np.sum(w * protocols.accel_at(protocol, tt) * (t - tt)))
    Z = Z0 + V0 * (t + protocol.T_half) + spin_sign * 0.5 * dz
    P = M * (V0 + spin_sign * 0.5 * dv)
    return Z, P


def analytic_mode(chain: ChainSpec, protocol: ProtocolSpec, spin_sign: int, k: int,
                  t: float, u0: float = 0.0, v0: float = 0.0):
    """Mode-k (amplitude, velocity) at time t: free rotation of the initial
    condition plus the driven convolution, the latter via the complex windowed
    transform A(omega, t):  conv_sin = -Im A, conv_cos = Re A."""
    omega = float(chain.modes.omega[k])
    cs = float(chain.modes.spin_amp[k])
    phase = omega * (t + protocol.T_half)
    A = protocols.spectrum_numeric(protocol, omega, t_end=t)
    u = u0 * math.cos(phase) + v0 / omega * math.sin(phase) \
        + spin_sign * cs / omega * (-A.imag)
    v = -u0 * omega * math.sin(phase) + v0 * math.cos(phase) \
        + spin_sign * cs * A.real
    return u, v


# ---------------------------------------------------------------------------
# oracle checks


def com_limit_check(chain: ChainSpec, protocol: ProtocolSpec, dt: float,
                    spin_sign: int = 1, seed: Optional[int] = 12345,
                    T_ph: float = 0.0) -> dict:
    """Compare the trajectory's CoM projection against closed-form kinematics.

    Returns max relative deviations of CoM position and momentum over the
    sampled history, normalized to the peak analytic excursion.
    """
    traj = integrate(chain, protocol, spin_sign, dt, seed=seed, T_ph=T_ph)
    M = chain.total_mass
    Z0 = float(np.mean(traj.positions[0]))
    V0 = float(np.mean(traj.velocities[0]))
    z_ref, p_ref, z_got, p_got = [], [], [], []
    for i, t in enumerate(traj.times):
        Z, P = analytic_com(chain, protocol, spin_sign, float(t), Z0, V0)
        z_ref.append(Z)
        p_ref.append(P)
        z_got.append(float(np.mean(traj.positions[i])))
        p_got.append(M * float(np.mean(traj.velocities[i])))
    z_ref, p_ref = np.array(z_ref), np.array(p_ref)
    z_got, p_got = np.array(z_got), np.array(p_got)
    z_scale = max(np.max(np.abs(z_ref)), 1e-300)
    p_scale = max(np.max(np.abs(p_ref)), 1e-300)
    return {
        "max_rel_dZ": float(np.max(np.abs(z_got - z_ref)) / z_scale),
        "max_rel_dP": float(np.max(np.abs(p_got - p_ref)) / p_scale),
        "final_dv_over_scale": float(abs(np.mean(traj.velocities[-1]) - np.mean(traj.velocities[0]))
                                     / (protocol.a_max * protocol.T_half)),
        "final_dz_over_scale": float(abs(np.mean(traj.positions[-1]) - np.mean(traj.positions[0])
                                         - np.mean(traj.velocities[0]) * 2 * protocol.T_half)
                                     / (protocol.a_max * protocol.T_half**2)),
    }


def mode_history_check(chain: ChainSpec, protocol: ProtocolSpec, dt: float,
                       spin_sign: int = 1, seed: Optional[int] = 12345,
                       T_ph: float = 0.0, sample_stride: int = 8) -> dict:
    """Per-mode comparison of projected trajectory amplitudes against the
    rotation-plus-convolution solution, at a thinned set of sample times.

    The relative error of mode k is normalized to that mode's own peak
    analytic amplitude (amplitude and velocity/omega pooled).
    """
    traj = integrate(chain, protocol, spin_sign, dt, seed=seed, T_ph=T_ph)
    u0 = project_modes(chain, traj.positions[0])
    v0 = project_modes(chain, traj.velocities[0])
    idx = list(range(0, len(traj.times), sample_stride))
    if idx[-1] != len(traj.times) - 1:
        idx.append(len(traj.times) - 1)
    omegas = chain.modes.omega
    n_modes = chain.n_sites - 1
    err = np.zeros(n_modes)
    scale = np.zeros(n_modes)
    for i in idx:
        t = float(traj.times[i])
        got_u = project_modes(chain, traj.positions[i])
        got_v = project_modes(chain, traj.velocities[i])
        for k in range(1, chain.n_sites):
            ref_u, ref_v = analytic_mode(chain, protocol, spin_sign, k, t,
                                         float(u0[k]), float(v0[k]))
            w = omegas[k]
            err[k - 1] = max(err[k - 1], abs(got_u[k] - ref_u),
                             abs(got_v[k] - ref_v) / w)
            scale[k - 1] = max(scale[k - 1], abs(ref_u), abs(ref_v) / w)
    rel = err / np.maximum(scale, 1e-300)
    return {"max_rel_mode_error": float(np.max(rel)),
            "worst_mode": int(np.argmax(rel) + 1)}


def differential_displacement(chain: ChainSpec, protocol: ProtocolSpec, dt: float,
                              seed: Optional[int] = 12345, T_ph: float = 0.0):
    """Per-mode (du, dudot) between the two spin signs, from two MD runs
    sharing one initial state (which cancels exactly by linearity).

    Default T_ph = 0 starts from rest: the difference is initial-state
    independent, and a cold start keeps the tiny differential signals clear of
    the floating-point cancellation floor of large thermal amplitudes.
    """
    rng = np.random.default_rng(seed)
    z0, v0 = thermal_chain_state(chain, T_ph, rng)
    up = integrate(chain, protocol, +1, dt, initial=(z0, v0))
    dn = integrate(chain, protocol, -1, dt, initial=(z0, v0))
    du = project_modes(chain, up.positions[-1]) - project_modes(chain, dn.positions[-1])
    dv = project_modes(chain, up.velocities[-1]) - project_modes(chain, dn.velocities[-1])
    return [PhaseSpaceShift(delta_u=float(du[k]), delta_udot=float(dv[k]))
            for k in range(1, chain.n_sites)]
