"""Reverse-engineered resonant pulses for a prescribed population path.

If the population of ``|1>`` is to follow ``f(t)`` with a constant relative
phase ``phi`` between the amplitudes, the rotating-wave equations can be
solved for the field, giving

    E(t) = fdot / (mu * sqrt(f (1 - f))) * sin(omega0 t + phi)

which is resonant by construction.  For the sigmoid family
``f = a_i (1 - g) + a_f g`` with ``g = 1/(1 + exp(-alpha t))`` the ratio
has a closed form that stays finite for every ``t`` including pure-state
endpoints.

Phase convention: ``c1 = sqrt(f) e^{i phi}``, ``c2 = sqrt(1 - f)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .domain import ControlSpec, PulsePathError, QuantumState, SystemParams

SINGULARITY_FLOOR = 1e-30
PROBE_POINTS = 10_000
FD_REL_TOL = 1e-6


class SingularityError(PulsePathError, ArithmeticError):
    """The prescribed path reaches a pure state at finite time with nonzero slope."""


class InvalidControlError(PulsePathError, ValueError):
    """A user-supplied control path failed its probe-grid checks."""


def sigmoid(t, alpha):
    """Logistic switch ``1/(1 + exp(-alpha t))``, overflow-safe, scalar or array."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    x = alpha * np.asarray(t, dtype=float)
    # exp of a nonpositive argument never overflows
    e = np.exp(-np.abs(x))
    out = np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return float(out) if out.ndim == 0 else out


def _sigmoid_terms(t, spec: ControlSpec):
    x = spec.alpha * np.asarray(t, dtype=float)
    e = np.exp(-np.abs(x))
    g = np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    h = np.where(x >= 0, e / (1.0 + e), 1.0 / (1.0 + e))
    return g, h


def control_function(t, spec: ControlSpec):
    """Sigmoid path value and slope ``(f, fdot)`` at ``t`` (scalar or array)."""
    g, h = _sigmoid_terms(t, spec)
    if spec.a_i == spec.a_f:
        f = np.full_like(g, spec.a_i)
    else:
        # blend of both weights keeps relative precision when f is near 0
        f = spec.a_i * h + spec.a_f * g
    fdot = (spec.a_f - spec.a_i) * spec.alpha * g * h
    if f.ndim == 0:
        return float(f), float(fdot)
    return f, fdot


def control_complement(t, spec: ControlSpec):
    """``1 - f(t)`` computed without cancellation."""
    g, h = _sigmoid_terms(t, spec)
    if spec.a_i == spec.a_f:
        out = np.full_like(g, 1.0 - spec.a_i)
    else:
        out = (1.0 - spec.a_i) * h + (1.0 - spec.a_f) * g
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ControlEvaluator:
    """A prescribed population path ``f(t)`` for state ``|1>`` and its slope.

    Parameters
    ----------
    f, fdot : callable
        Vectorised callables returning the path and its time derivative.
    probe_window : (float, float)
        Interval sampled at construction (10^4 points) to check
        ``0 <= f <= 1`` and that ``fdot`` matches a central difference of
        ``f`` to 1e-6 of its largest magnitude.
    f_minus_inf, f_plus_inf : float, optional
        Declared limits.  A path with both limits declared reaches pure
        states only asymptotically, so ``fdot / sqrt(f (1 - f))`` tends to
        zero there and the synthesizer returns 0 below the singularity
        floor instead of raising.
    one_minus_f : callable, optional
        Accurate complement ``1 - f``; used instead of the subtraction when
        ``f`` is close to 1.
    """

    f: Callable
    fdot: Callable
    probe_window: tuple[float, float]
    f_minus_inf: float | None = None
    f_plus_inf: float | None = None
    one_minus_f: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        lo, hi = self.probe_window
        if not lo < hi:
            raise InvalidControlError(f"probe window must be increasing, got {self.probe_window}")
        for lim in (self.f_minus_inf, self.f_plus_inf):
            if lim is not None and not 0.0 <= lim <= 1.0:
                raise InvalidControlError(f"declared limit {lim} is outside [0, 1]")
        grid = np.linspace(lo, hi, PROBE_POINTS)
        f = np.asarray(self.f(grid), dtype=float)
        if not np.all(np.isfinite(f)) or f.min() < 0.0 or f.max() > 1.0:
            bad = grid[np.argmax((f < 0) | (f > 1) | ~np.isfinite(f))]
            raise InvalidControlError(f"control path leaves [0, 1] near t = {bad:.6g}")
        fdot = np.asarray(self.fdot(grid), dtype=float)
        step = 1e-3 * (grid[1] - grid[0])
        fd = (np.asarray(self.f(grid + step)) - np.asarray(self.f(grid - step))) / (2 * step)
        scale = max(float(np.max(np.abs(fdot))), float(np.max(np.abs(fd))))
        mismatch = np.abs(fd - fdot)
        if scale > 0 and mismatch.max() > FD_REL_TOL * scale:
            bad = grid[np.argmax(mismatch)]
            raise InvalidControlError(
                f"fdot disagrees with finite difference of f near t = {bad:.6g} "
                f"(|diff| = {mismatch.max():.3g}, scale {scale:.3g})"
            )

    @property
    def asymptotic(self) -> bool:
        return self.f_minus_inf is not None and self.f_plus_inf is not None

    def complement(self, t):
        if self.one_minus_f is not None:
            return np.asarray(self.one_minus_f(t), dtype=float)
        return 1.0 - np.asarray(self.f(t), dtype=float)

    @classmethod
    def from_spec(cls, spec: ControlSpec, window: tuple[float, float] | None = None):
        """Sigmoid path of ``spec``; probes ``window`` widened by ``5/alpha``."""
        lo, hi = window if window is not None else spec.default_window()
        pad = 5.0 / spec.alpha
        return cls(
            f=lambda t: control_function(t, spec)[0],
            fdot=lambda t: control_function(t, spec)[1],
            probe_window=(lo - pad, hi + pad),
            f_minus_inf=spec.a_i,
            f_plus_inf=spec.a_f,
            one_minus_f=lambda t: control_complement(t, spec),
        )


def synthesize_field_generic(evaluator: ControlEvaluator, params: SystemParams, phi: float, t):
    """Resonant field that drives the population of ``|1>`` along ``evaluator.f``.

    Raises
    ------
    SingularityError
        Where ``f (1 - f) < 1e-30`` and the path does not declare
        asymptotic limits.
    """
    t_arr = np.asarray(t, dtype=float)
    f = np.asarray(evaluator.f(t_arr), dtype=float)
    omf = evaluator.complement(t_arr)
    fdot = np.asarray(evaluator.fdot(t_arr), dtype=float)
    prod = f * omf
    small = prod < SINGULARITY_FLOOR
    if np.any(small) and not evaluator.asymptotic:
        bad = np.broadcast_to(t_arr, small.shape)[small].flat[0]
        raise SingularityError(
            f"f(1-f) = {np.min(prod):.3g} below {SINGULARITY_FLOOR:g} at t = {bad:.6g}: "
            "path touches a pure state at finite time"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = fdot / np.sqrt(prod)
    ratio = np.where(small, 0.0, ratio)
    out = ratio / params.mu * np.sin(params.omega0 * t_arr + phi)
    return float(out) if out.ndim == 0 else out


def synthesize_field_closed(spec: ControlSpec, params: SystemParams, t):
    """Closed-form sigmoid pulse, finite for all ``t`` (scalar or array)."""
    t_arr = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t_arr).ravel()
    pref = kernels.sigmoid_prefactor_array(flat, spec.a_i, spec.a_f, spec.alpha)
    out = (pref / params.mu * np.sin(params.omega0 * flat + spec.phi)).reshape(t_arr.shape)
    return float(out) if out.ndim == 0 else out


def envelope(spec: ControlSpec, params: SystemParams, t):
    """Magnitude of the factor multiplying ``sin(omega0 t + phi)``."""
    t_arr = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t_arr).ravel()
    pref = kernels.sigmoid_prefactor_array(flat, spec.a_i, spec.a_f, spec.alpha)
    out = (np.abs(pref) / abs(params.mu)).reshape(t_arr.shape)
    return float(out) if out.ndim == 0 else out


def initial_state(spec: ControlSpec, t0: float) -> QuantumState:
    """Amplitudes on the prescribed path at ``t0``: ``(sqrt(f) e^{i phi}, sqrt(1 - f))``."""
    f, _ = control_function(t0, spec)
    omf = control_complement(t0, spec)
    return QuantumState(math.sqrt(f) * complex(math.cos(spec.phi), math.sin(spec.phi)),
                        complex(math.sqrt(omf)))


@dataclass(frozen=True)
class Pulse:
    """Synthesized resonant pulse for ``spec`` on system ``params``."""

    spec: ControlSpec
    params: SystemParams
    carrier: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "carrier", self.params.omega0)

    def __call__(self, t):
        return synthesize_field_closed(self.spec, self.params, t)

    def envelope(self, t):
        return envelope(self.spec, self.params, t)

    def complex_envelope(self, t):
        """``env`` with ``E(t) = env e^{-i omega0 t} + c.c.``."""
        t_arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t_arr).ravel()
        pref = kernels.sigmoid_prefactor_array(flat, self.spec.a_i, self.spec.a_f, self.spec.alpha)
        out = (0.5j * pref / self.params.mu * np.exp(-1j * self.spec.phi)).reshape(t_arr.shape)
        return complex(out) if out.ndim == 0 else out

    def control(self, t):
        return control_function(t, self.spec)[0]

    def sample(self, grid) -> "PulseSamples":
        return sample_pulse(self.spec, self.params, grid)


@dataclass(frozen=True, eq=False)
class PulseSamples:
    times: np.ndarray
    field: np.ndarray
    envelope: np.ndarray

    def __len__(self):
        return self.times.shape[0]


def sample_pulse(spec: ControlSpec, params: SystemParams, grid) -> PulseSamples:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d array")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("grid must be strictly increasing")
    return PulseSamples(grid, synthesize_field_closed(spec, params, grid), envelope(spec, params, grid))
