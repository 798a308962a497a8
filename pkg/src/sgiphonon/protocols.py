"""Pulsed magnetic-gradient acceleration protocols and their windowed spectra.

All protocols live on t in [-T_half, +T_half] with the moment of maximum
splitting at t = 0.  The three named closed-loop profiles are

    square:   -a_max for |t| < T_half/2, +a_max outside (inner leg negative)
    quartic:   a_max * (-1 + 6 x^2 - 5 x^4),              x = t/T_half
    bicosine: -(a_max/2) * (cos(pi x) + cos(2 pi x))

all with zero net velocity and zero net displacement over the window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

SQUARE = "square"
QUARTIC = "quartic"
BICOSINE = "bicosine"
CUSTOM = "custom"

NAMED_KINDS = (SQUARE, QUARTIC, BICOSINE)
KIND_INDEX = {SQUARE: 0, QUARTIC: 1, BICOSINE: 2}
INDEX_KIND = {v: k for k, v in KIND_INDEX.items()}

# |a_n(omega)| <= AMP * a_max*T_half * E_n / u^(n+1) asymptotically, u = omega*T_half.
ENVELOPE_AMPLITUDE = {0: 6.0, 1: 16.0, 2: 3.0 * math.pi**2}
# Squared-envelope constants entering the closed-form spectral-sum bound.
ENVELOPE_BOUND_CONSTANTS = {0: 36.0, 1: 256.0, 2: 9.0 * math.pi**4}
# Constants as published; A1, A2 understate the true envelope by pi^(2n).
PAPER_BOUND_CONSTANTS = {0: 36.0, 1: (16.0 / math.pi) ** 2, 2: 9.0}


@dataclass(frozen=True)
class ProtocolSpec:
    """One acceleration protocol.

    samples holds (t, a) pairs for kind 'custom' (piecewise-linear), else None.
    """

    kind: str
    a_max: float
    T_half: float
    samples: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.kind not in (*NAMED_KINDS, CUSTOM):
            raise ValueError(f"unknown protocol kind {self.kind!r}")
        if self.a_max <= 0 or self.T_half <= 0:
            raise ValueError("a_max and T_half must be positive")
        if self.kind == CUSTOM:
            if not self.samples or len(self.samples) < 2:
                raise ValueError("custom protocol needs at least two samples")
            t = np.array([s[0] for s in self.samples])
            if np.any(np.diff(t) <= 0):
                raise ValueError("custom samples must be strictly increasing in t")
            tol = 1e-9 * self.T_half
            if t[0] > -self.T_half + tol or t[-1] < self.T_half - tol:
                raise ValueError("custom samples must span [-T_half, +T_half]")
        elif self.samples is not None:
            raise ValueError("samples are only valid for kind 'custom'")

    @property
    def index(self) -> int:
        """Protocol index n in {0, 1, 2}; custom has none."""
        if self.kind == CUSTOM:
            raise ValueError("custom protocols have no index")
        return KIND_INDEX[self.kind]

    @property
    def duration(self) -> float:
        return 2.0 * self.T_half


def square(a_max: float, T_half: float) -> ProtocolSpec:
    return ProtocolSpec(SQUARE, a_max, T_half)


def quartic(a_max: float, T_half: float) -> ProtocolSpec:
    return ProtocolSpec(QUARTIC, a_max, T_half)


def bicosine(a_max: float, T_half: float) -> ProtocolSpec:
    return ProtocolSpec(BICOSINE, a_max, T_half)


def by_index(n: int, a_max: float, T_half: float) -> ProtocolSpec:
    return ProtocolSpec(INDEX_KIND[n], a_max, T_half)


def custom(samples, T_half: float) -> ProtocolSpec:
    """Piecewise-linear protocol from (t, a) samples; a_max taken as max|a|."""
    samples = tuple((float(t), float(a)) for t, a in samples)
    a_max = max(abs(a) for _, a in samples)
    if a_max == 0:
        a_max = 1.0  # degenerate all-zero profile; keep spec invariant a_max > 0
    return ProtocolSpec(CUSTOM, a_max, T_half, samples)


def custom_from_file(path, T_half: Optional[float] = None) -> ProtocolSpec:
    """Two-column text (t [s], a [m/s^2]); '#' starts a comment."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns, got {raw!r}")
            rows.append((float(parts[0]), float(parts[1])))
    if not rows:
        raise ValueError(f"{path}: no samples")
    if T_half is None:
        T_half = max(abs(rows[0][0]), abs(rows[-1][0]))
    return custom(rows, T_half)


# ---------------------------------------------------------------------------
# time-domain evaluation


def accel_at(p: ProtocolSpec, t):
    """Acceleration at time t (scalar or array); |t| <= T_half required.

    Square convention: -a_max strictly inside |t| < T_half/2, +a_max at and
    outside the quarter points.
    """
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > p.T_half * (1 + 1e-12)):
        raise ValueError(f"t outside protocol window [+-{p.T_half}]")
    if p.kind == SQUARE:
        out = np.where(np.abs(t) < 0.5 * p.T_half, -p.a_max, p.a_max)
    elif p.kind == QUARTIC:
        x = t / p.T_half
        out = p.a_max * (-1.0 + 6.0 * x**2 - 5.0 * x**4)
    elif p.kind == BICOSINE:
        x = t / p.T_half
        out = -0.5 * p.a_max * (np.cos(np.pi * x) + np.cos(2.0 * np.pi * x))
    else:
        ts = np.array([s[0] for s in p.samples])
        vs = np.array([s[1] for s in p.samples])
        out = np.interp(t, ts, vs)
    return out if out.ndim else float(out)


def breakpoints(p: ProtocolSpec):
    """Interior times where a(t) is not smooth (square jumps, custom knots)."""
    if p.kind == SQUARE:
        return [-0.5 * p.T_half, 0.5 * p.T_half]
    if p.kind == CUSTOM:
        return [s[0] for s in p.samples if abs(s[0]) < p.T_half]
    return []


def accel_regularized(p: ProtocolSpec, t: float) -> float:
    """accel_at with jump nodes replaced by the mean of the one-sided limits.

    Integrators sampling on closed nodes need this to keep second-order
    accuracy across the square profile's discontinuities.
    """
    if p.kind == SQUARE:
        eps = 1e-9 * p.T_half
        if abs(abs(t) - 0.5 * p.T_half) < eps:
            return 0.0  # mean of -a_max and +a_max
    return accel_at(p, t)


# ---------------------------------------------------------------------------
# panelized Gauss-Legendre quadrature (deterministic, oscillation-aware)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _panels(p: ProtocolSpec, t_lo: float, t_hi: float, omega: float):
    """Panel edges over [t_lo, t_hi]: protocol breakpoints plus per-oscillation
    splitting so each panel spans at most ~pi of phase."""
    edges = [t_lo, t_hi]
    for b in breakpoints(p):
        if t_lo < b < t_hi:
            edges.append(b)
    edges = sorted(set(edges))
    out = []
    max_span = math.pi / abs(omega) if omega else math.inf
    # keep some minimum resolution for the smooth named shapes too
    max_span = min(max_span, p.T_half / 4.0)
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, math.ceil((b - a) / max_span))
        out.extend(np.linspace(a, b, n + 1)[:-1])
    out.append(edges[-1])
    return np.array(out)


def _gl_integrate(p: ProtocolSpec, t_lo: float, t_hi: float, omega: float, phase_ref: float):
    """Complex integral of a(t) * exp(i*omega*(t - phase_ref)) over [t_lo, t_hi]."""
    edges = _panels(p, t_lo, t_hi, omega)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    # nodes: (n_panels, n_gl)
    t = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    w = half[:, None] * _GL_WEIGHTS[None, :]
    vals = accel_at(p, t)
    phase = omega * (t - phase_ref)
    re = float(np.sum(w * vals * np.cos(phase)))
    im = float(np.sum(w * vals * np.sin(phase)))
    return complex(re, im)


def _piecewise_linear_transform(p: ProtocolSpec, omega: float, t_end: float) -> complex:
    """Exact transform of the piecewise-linear custom profile, piece by piece.

    Pieces with little phase go through Gauss-Legendre (the closed form loses
    digits there); fast-oscillating pieces use the exact antiderivative, so the
    cost is O(n_samples) at any frequency.
    """
    ts = np.array([s[0] for s in p.samples])
    vs = np.array([s[1] for s in p.samples])
    total = 0j
    for t0, t1, a0, a1 in zip(ts[:-1], ts[1:], vs[:-1], vs[1:]):
        lo = max(t0, -p.T_half)
        hi = min(t1, t_end)
        if hi <= lo:
            continue
        slope = (a1 - a0) / (t1 - t0)
        if abs(omega) * (hi - lo) < 0.5:
            mid = 0.5 * (lo + hi)
            half = 0.5 * (hi - lo)
            t = mid + half * _GL_NODES
            val = a0 + slope * (t - t0)
            ph = omega * t
            total += half * np.sum(_GL_WEIGHTS * val * (np.cos(ph) + 1j * np.sin(ph)))
        else:
            # integral (alpha + beta t) e^{i w t} dt
            #   = e^{i w t} [ (alpha + beta t)/(i w) + beta / w^2 ]
            def anti(t):
                return np.exp(1j * omega * t) * ((a0 + slope * (t - t0)) / (1j * omega)
                                                 + slope / omega**2)
            total += anti(hi) - anti(lo)
    return total * np.exp(-1j * omega * t_end)


def spectrum_numeric(p: ProtocolSpec, omega: float, t_end: Optional[float] = None) -> complex:
    """Finite-window transform  integral a(t') exp(i*omega*(t' - t_end)) dt'
    over [-T_half, t_end], with t_end defaulting to the loop end +T_half.

    Named kinds go through oscillation-split Gauss-Legendre panels (machine
    accurate up to omega*T_half ~ 1e6); custom profiles integrate their
    piecewise-linear model exactly at any frequency.
    """
    if t_end is None:
        t_end = p.T_half
    if not -p.T_half <= t_end <= p.T_half:
        raise ValueError("t_end outside protocol window")
    if t_end == -p.T_half:
        return 0j
    if p.kind == CUSTOM:
        return _piecewise_linear_transform(p, omega, t_end)
    if abs(omega) * (t_end + p.T_half) > 1e7:
        raise ValueError(
            "oscillation-split quadrature is impractical beyond omega*T_half ~ 1e6; "
            "use spectrum_complex (closed form) for the named protocols")
    return _gl_integrate(p, -p.T_half, t_end, omega, phase_ref=t_end)


# Power-series coefficients (in u^2) of the small-u spectra, 12 terms each:
# square: (2 sin u - 4 sin(u/2)) / u,  quartic: 2 * integral_0^1 a1-shape * cos(ux) dx
_SQ_COEFF = np.array([(-1.0) ** j * (2.0 - 2.0 ** (1 - 2 * j)) / math.factorial(2 * j + 1)
                      for j in range(1, 13)])
_QU_COEFF = np.array([(-1.0) ** j * 2.0 * (-1.0 / (2 * j + 1) + 6.0 / (2 * j + 3)
                                           - 5.0 / (2 * j + 5)) / math.factorial(2 * j)
                      for j in range(1, 13)])


def _series_eval(coeff: np.ndarray, u: np.ndarray) -> np.ndarray:
    u2 = u * u
    out = np.zeros_like(u)
    for c in coeff[::-1]:
        out = (out + c) * u2
    return out


def _sinc(d: np.ndarray) -> np.ndarray:
    return np.sinc(d / math.pi)  # sin(d)/d with the 0/0 limit handled


def spectrum_signed_array(p: ProtocolSpec, omega) -> np.ndarray:
    """Signed closed-form transform  integral a(t) e^{i omega t} dt  for the
    named protocols (real and even in omega since the profiles are even).

    Removable singular points (omega -> 0 for all; omega*T_half -> pi, 2*pi
    for the bicosine) are evaluated through exactly factored / series forms,
    so the result is machine-accurate arbitrarily close to them.
    """
    if p.kind == CUSTOM:
        raise ValueError("no closed-form spectrum for custom profiles; use spectrum_numeric")
    u = np.abs(np.asarray(omega, dtype=float)) * p.T_half
    aT = p.a_max * p.T_half
    if p.kind == SQUARE:
        us = np.where(u < 0.5, 1.0, u)  # guarded divisor for the direct branch
        direct = (2.0 * np.sin(u) - 4.0 * np.sin(0.5 * u)) / us
        return aT * np.where(u < 0.5, _series_eval(_SQ_COEFF, u), direct)
    if p.kind == QUARTIC:
        us = np.where(u < 0.5, 1.0, u)
        direct = -16.0 * (np.cos(u) / us**2 * (1.0 - 15.0 / us**2)
                          - np.sin(u) / us**3 * (6.0 - 15.0 / us**2))
        return aT * np.where(u < 0.5, _series_eval(_QU_COEFF, u), direct)
    # bicosine: -3 pi^2 aT * u sin(u) / ((u^2 - pi^2)(u^2 - 4 pi^2)); near the
    # two removable poles the vanishing sine is pulled into an exact sinc factor.
    pi, c = math.pi, -3.0 * math.pi**2 * aT
    near1 = np.abs(u - pi) < 0.5
    near2 = np.abs(u - 2.0 * pi) < 0.5
    den1 = np.where(near1, 1.0, u**2 - pi**2)
    den2 = np.where(near2, 1.0, u**2 - 4.0 * pi**2)
    out = u * np.sin(u) / np.where(near1 | near2, 1.0, den1 * den2)
    out = np.where(near1, -u * _sinc(u - pi) / ((u + pi) * den2), out)
    out = np.where(near2, u * _sinc(u - 2.0 * pi) / (den1 * (u + 2.0 * pi)), out)
    return c * out


def spectrum_analytic_array(p: ProtocolSpec, omega) -> np.ndarray:
    """|a(omega, 2*T_half)| in closed form on an array of frequencies."""
    return np.abs(spectrum_signed_array(p, omega))


def spectrum_analytic(p: ProtocolSpec, omega: float) -> float:
    """Scalar |a(omega, 2*T_half)| for the named protocols (see the array form)."""
    return float(spectrum_analytic_array(p, omega))


def spectrum_complex(p: ProtocolSpec, omega: float, t_end: Optional[float] = None) -> complex:
    """Complex windowed transform a(omega, t_end + T_half), preferring the
    closed form: for named kinds over the full window it equals the signed
    real spectrum times the end-phase e^{-i omega T_half}, valid at any
    frequency; anything else falls back to quadrature."""
    if p.kind != CUSTOM and (t_end is None or t_end == p.T_half):
        mag = float(spectrum_signed_array(p, omega))
        return mag * complex(math.cos(omega * p.T_half), -math.sin(omega * p.T_half))
    return spectrum_numeric(p, omega, t_end)


def spectrum_envelope(p: ProtocolSpec, omega: float) -> float:
    """Smooth asymptotic envelope E_n * a_max * T_half / u^(n+1) of |a_n(omega)|."""
    n = p.index
    u = abs(omega) * p.T_half
    if u == 0:
        return math.inf
    return ENVELOPE_AMPLITUDE[n] * p.a_max * p.T_half / u ** (n + 1)


def spectrum_magnitude(p: ProtocolSpec, omega: float) -> tuple[float, str]:
    """|a(omega)| plus which evaluation path produced it ('analytic'/'numeric')."""
    if p.kind == CUSTOM:
        return abs(spectrum_numeric(p, omega)), "numeric"
    return spectrum_analytic(p, omega), "analytic"


# ---------------------------------------------------------------------------
# loop diagnostics


def integrate_accel(p: ProtocolSpec, t_lo: float = None, t_hi: float = None) -> float:
    """integral a dt over [t_lo, t_hi] (defaults: the full window)."""
    if t_lo is None:
        t_lo = -p.T_half
    if t_hi is None:
        t_hi = p.T_half
    if t_hi <= t_lo:
        return 0.0
    return _gl_integrate(p, t_lo, t_hi, 0.0, 0.0).real


def closure_check(p: ProtocolSpec):
    """(delta_v, delta_z): net velocity and net displacement over the window,
    starting from rest at t = -T_half.  Both vanish for the named protocols."""
    dv = _gl_integrate(p, -p.T_half, p.T_half, 0.0, 0.0).real
    # z(T) = integral (T - t') a(t') dt'; fold the linear weight into panels
    edges = _panels(p, -p.T_half, p.T_half, 2.0 * math.pi / p.T_half)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    w = half[:, None] * _GL_WEIGHTS[None, :]
    dz = float(np.sum(w * accel_at(p, t) * (p.T_half - t)))
    return dv, dz


def energy_norm(p: ProtocolSpec) -> float:
    """integral a(t)^2 dt over the full window [-T_half, +T_half]  [m^2/s^3].

    For the named protocols this equals C_n * a_max^2 * T_half with
    C = {square: 2, quartic: 256/315, bicosine: 1/2} (see parseval_constant).
    """
    edges = _panels(p, -p.T_half, p.T_half, 4.0 * math.pi / p.T_half)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    w = half[:, None] * _GL_WEIGHTS[None, :]
    return float(np.sum(w * accel_at(p, t) ** 2))


def parseval_constant(p: ProtocolSpec) -> float:
    """energy_norm / (a_max^2 * T_half), the uniform-window Parseval constant.

    Note the square comes out 2 under this normalization; the commonly quoted
    value 1 refers to the full loop duration 2*T_half (same physical integral).
    """
    return energy_norm(p) / (p.a_max**2 * p.T_half)


def envelope_peaks(p: ProtocolSpec, u_lo: float, u_hi: float, points_per_lobe: int = 40):
    """Local maxima of |a(omega)| on omega*T_half in [u_lo, u_hi].

    Returns (u_peaks, magnitudes); used for checking the 1/omega^(n+1) decay.
    """
    n_pts = int((u_hi - u_lo) / math.pi * points_per_lobe) + 2
    u = np.linspace(u_lo, u_hi, n_pts)
    mag = np.array([spectrum_analytic(p, ui / p.T_half) for ui in u])
    inner = (mag[1:-1] > mag[:-2]) & (mag[1:-1] >= mag[2:])
    idx = np.nonzero(inner)[0] + 1
    return u[idx], mag[idx]
