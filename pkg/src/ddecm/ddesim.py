"""Dynamics-level validation: method-of-steps integration of the full delay
equation and one-step integration of the reduced equation, plus a
zero-crossing frequency estimator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .cmcore import ModelSpec
from .errors import DivergenceError, TooFewCrossingsError
from .exppoly import ExpPoly
from .reduction import ReducedEquation

_BLOWUP = 1e6
_HISTORY_WARN = 0.5


@dataclass(frozen=True)
class SimConfig:
    dt: float
    horizon: float
    history: ExpPoly | float

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ValueError("horizon must be positive")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")


def _history_fn(cfg: SimConfig, r: float):
    h = cfg.history
    if isinstance(h, ExpPoly):
        def fn(s: float) -> float:
            v = h.eval(s)
            return v.real
        probe = max(abs(h.eval(-r + k * r / 16).real) for k in range(17))
    else:
        val = float(h)
        def fn(s: float) -> float:
            return val
        probe = abs(val)
    if probe > _HISTORY_WARN:
        warnings.warn(
            f"history amplitude {probe:.3g} exceeds {_HISTORY_WARN}; the cubic "
            "truncation of the nonlinearity may not be meaningful",
            stacklevel=3,
        )
    return fn


def _hermite(x0, m0, x1, m1, theta, h):
    t2 = theta * theta
    t3 = t2 * theta
    return (
        x0 * (2 * t3 - 3 * t2 + 1)
        + m0 * h * (t3 - 2 * t2 + theta)
        + x1 * (-2 * t3 + 3 * t2)
        + m1 * h * (t3 - t2)
    )


def integrate_dde(model: ModelSpec, cfg: SimConfig) -> Trajectory:
    """Classic one-step 4th-order integration with cubic-Hermite delayed lookup.

    The delay is snapped to an exact grid multiple of dt so stage lookups fall
    inside completed intervals.
    """
    lin = model.lin
    r = lin.r
    if cfg.dt > r / 20:
        raise ValueError(f"dt must be at most r/20 = {r / 20:.6g}")
    if cfg.horizon < 10 * r:
        raise ValueError(f"horizon must be at least 10 r = {10 * r:.6g}")
    n_hist = max(20, int(math.ceil(r / cfg.dt)))
    dt = r / n_hist
    n = int(math.ceil(cfg.horizon / dt))

    hist = _history_fn(cfg, r)
    C = model.C

    def rhs(x: float, xd: float) -> float:
        out = lin.A * x + lin.B * xd
        for (j, k), c in C.items():
            out += c * x**j * xd**k / (math.factorial(j) * math.factorial(k))
        return out

    xs = np.empty(n + 1)
    ms = np.empty(n + 1)
    xs[0] = hist(0.0)

    def past(t: float, completed: int) -> float:
        # value of x at time t <= completed*dt, t >= -r
        if t <= 0.0:
            return hist(t)  # the analytic history, exact at every stage point
        pos = t / dt
        j = min(int(pos), completed - 1)
        return _hermite(xs[j], ms[j], xs[j + 1], ms[j + 1], pos - j, dt)

    for i in range(n):
        t = i * dt
        x = xs[i]
        if abs(x) > _BLOWUP:
            raise DivergenceError(f"|x| exceeded {_BLOWUP:g} at t = {t:.6g}", time=t)
        k1 = rhs(x, past(t - r, i))
        ms[i] = k1
        xd_mid = past(t + 0.5 * dt - r, i)
        k2 = rhs(x + 0.5 * dt * k1, xd_mid)
        k3 = rhs(x + 0.5 * dt * k2, xd_mid)
        k4 = rhs(x + dt * k3, past(t + dt - r, i))
        xs[i + 1] = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    ms[n] = rhs(xs[n], past(n * dt - r, n))
    if abs(xs[n]) > _BLOWUP:
        raise DivergenceError(f"|x| exceeded {_BLOWUP:g} at t = {n * dt:.6g}", time=n * dt)
    return Trajectory(times=np.arange(n + 1) * dt, values=xs)


def integrate_reduced(red: ReducedEquation, u0: complex, cfg: SimConfig) -> Trajectory:
    """One-step 4th-order integration of the complex scalar reduced equation."""
    if abs(u0) > 0.5:
        raise ValueError("|u0| must be at most 0.5 for the cubic truncation to be meaningful")
    lam = red.lambda1
    items = [((j, k), g, math.factorial(j) * math.factorial(k)) for (j, k), g in red.g.items()]

    def rhs(u: complex) -> complex:
        out = lam * u
        ub = u.conjugate()
        for (j, k), g, fact in items:
            out += g * u**j * ub**k / fact
        return out

    n = int(math.ceil(cfg.horizon / cfg.dt))
    dt = cfg.horizon / n
    us = np.empty(n + 1, dtype=complex)
    us[0] = u0
    for i in range(n):
        u = us[i]
        if abs(u) > _BLOWUP:
            raise DivergenceError(f"|u| exceeded {_BLOWUP:g} at t = {i * dt:.6g}", time=i * dt)
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * dt * k1)
        k3 = rhs(u + 0.5 * dt * k2)
        k4 = rhs(u + dt * k3)
        us[i + 1] = u + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return Trajectory(times=np.arange(n + 1) * dt, values=us)


def measure_frequency(traj: Trajectory, t_min: float) -> float:
    """Angular frequency from the mean spacing of zero crossings after t_min."""
    mask = traj.times >= t_min
    ts = traj.times[mask]
    vs = np.real(traj.values[mask])
    crossings = []
    for i in range(len(vs) - 1):
        a, b = vs[i], vs[i + 1]
        if a == 0.0:
            crossings.append(ts[i])
        elif a * b < 0.0:
            crossings.append(ts[i] - a * (ts[i + 1] - ts[i]) / (b - a))
    if len(crossings) < 5:
        raise TooFewCrossingsError(
            f"only {len(crossings)} zero crossings after t = {t_min:g}; need at least 5"
        )
    spacing = (crossings[-1] - crossings[0]) / (len(crossings) - 1)
    return math.pi / spacing


def manifold_history(
    u0: complex,
    so,
    eig,
    third=None,
) -> ExpPoly:
    """History lying (to cubic order) on the computed manifold at coordinate u0.

    2 Re(u0 phi1) + sum over stored w profiles of w_jk u0^j conj(u0)^k / (j! k!).
    """
    ub = u0.conjugate()
    out = eig.phi1.scale(u0) + eig.phi2.scale(ub)
    out = out + so.w20.scale(u0 * u0 / 2) + so.w11.scale(u0 * ub) + so.w02.scale(ub * ub / 2)
    if third is not None:
        out = out + third.w21.scale(u0 * u0 * ub / 2) + third.w21.conjugate().scale(u0 * ub * ub / 2)
    return out


def reconstruct_state(u: complex, so, third=None) -> float:
    """Head-point value x(t) ~ 2 Re u + sum w_jk(0) u^j ubar^k / (j! k!)."""
    ub = u.conjugate()
    val = 2 * u.real + (so.w20_0 * u * u / 2 + so.w11_0 * u * ub + so.w02_0 * ub * ub / 2).real
    if third is not None:
        val += (third.w21_0 * u * u * ub).real  # w21 and conj(w12) terms combine
    return val
