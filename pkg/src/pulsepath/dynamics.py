"""Propagation of the two-level amplitudes under a classical field.

Two frames are supported:

``exact``
    The full equations with counter-rotating terms, written in terms of the
    real field value: ``c1' = i mu E(t) e^{-i omega0 t} c2`` and
    ``c2' = i mu E(t) e^{+i omega0 t} c1``.
``rwa``
    Rotating-wave equations for the complex envelope ``env`` of
    ``E = env e^{-i w t} + c.c.`` with detuning ``delta = w - omega0``.

No renormalisation is ever applied; ``norm_drift`` measures what the
integrator lost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from . import kernels
from ._accel import BACKEND, python_impl
from .domain import PulsePathError, QuantumState, SimConfig, SystemParams, Trajectory
from .synthesis import Pulse, control_function

Frame = Literal["exact", "rwa"]

MAX_STEPS = 10_000_000
CONSISTENCY_TOL = 1e-12


class IntegrationError(PulsePathError, ArithmeticError):
    """The adaptive integrator could not advance; ``t`` is where it stopped."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True, eq=False)
class DriveField:
    """Classical drive acting on a two-level system.

    Built-in drives (zero field, synthesized sigmoid pulses, constant
    envelopes) carry a packed parameter vector and run through the compiled
    integrators.  ``DriveField.custom`` wraps arbitrary Python callables and
    falls back to the interpreted integrators.
    """

    params: SystemParams
    field: Callable
    envelope: Callable | None = None
    carrier: float | None = None
    reference: Callable | None = None
    packed: np.ndarray | None = field(default=None, repr=False)

    @property
    def delta(self) -> float | None:
        return None if self.carrier is None else self.carrier - self.params.omega0

    @property
    def has_envelope(self) -> bool:
        return self.envelope is not None and self.carrier is not None

    def field_array(self, t) -> np.ndarray:
        t = np.ascontiguousarray(t, dtype=float)
        if self.packed is not None:
            return kernels.drive_field_array(t, self.packed)
        return np.array([float(self.field(x)) for x in t])

    @classmethod
    def zero(cls, params: SystemParams) -> "DriveField":
        packed = np.array([kernels.DRIVE_ZERO, params.mu, params.omega0, 0.0, 0.0, 0.0, 0.0, 0.0])
        return cls(params, lambda t: 0.0, lambda t: 0j, params.omega0, packed=packed)

    @classmethod
    def from_pulse(cls, pulse: Pulse) -> "DriveField":
        s, prm = pulse.spec, pulse.params
        packed = np.array([kernels.DRIVE_SIGMOID, prm.mu, prm.omega0, s.a_i, s.a_f, s.alpha, s.phi, 0.0])
        return cls(
            prm,
            pulse,
            pulse.complex_envelope,
            pulse.carrier,
            reference=lambda t: control_function(t, s)[0],
            packed=packed,
        )

    @classmethod
    def constant(cls, params: SystemParams, env0: complex, carrier: float | None = None,
                 delta: float | None = None) -> "DriveField":
        """Constant complex envelope at ``carrier`` (or ``omega0 + delta``)."""
        if carrier is not None and delta is not None:
            raise ValueError("give either carrier or delta, not both")
        if carrier is None:
            carrier = params.omega0 + (delta or 0.0)
        env0 = complex(env0)
        packed = np.array([kernels.DRIVE_CONSTANT, params.mu, params.omega0,
                           env0.real, env0.imag, carrier, 0.0, 0.0])
        return cls(
            params,
            lambda t: 2.0 * (env0 * np.exp(-1j * carrier * np.asarray(t))).real,
            lambda t: env0,
            carrier,
            packed=packed,
        )

    @classmethod
    def custom(cls, params: SystemParams, field: Callable, envelope: Callable | None = None,
               carrier: float | None = None, reference: Callable | None = None,
               probe_window: tuple[float, float] | None = None) -> "DriveField":
        """Wrap Python callables.

        When both representations are given they are checked against each
        other on 1000 points of ``probe_window`` (required in that case).
        """
        if (envelope is None) != (carrier is None):
            raise ValueError("envelope and carrier must be given together")
        if envelope is not None:
            if probe_window is None:
                raise ValueError("probe_window is required to check envelope consistency")
            grid = np.linspace(probe_window[0], probe_window[1], 1000)
            real = np.array([float(field(x)) for x in grid])
            env = np.array([complex(envelope(x)) for x in grid])
            recon = 2.0 * (env * np.exp(-1j * carrier * grid)).real
            scale = max(1.0, float(np.max(np.abs(real))))
            if np.max(np.abs(recon - real)) > CONSISTENCY_TOL * scale:
                raise ValueError("field and envelope representations disagree")
        return cls(params, field, envelope, carrier, reference)


def rhs_exact(state: QuantumState, t: float, field: float, params: SystemParams):
    """Amplitude derivatives ``(c1', c2')`` of the full equations."""
    return python_impl(kernels.exact_rhs)(t, field, state.c1, state.c2, params.mu, params.omega0)


def rhs_rwa(state: QuantumState, t: float, envelope: complex, delta: float, params: SystemParams):
    """Amplitude derivatives ``(c1', c2')`` under the rotating-wave approximation."""
    return python_impl(kernels.rwa_rhs)(t, complex(envelope), delta, state.c1, state.c2, params.mu)


def _python_deriv(drive: DriveField, frame: Frame):
    mu, w0 = drive.params.mu, drive.params.omega0
    if frame == "exact":
        rhs = python_impl(kernels.exact_rhs)
        fld = drive.field

        def deriv(t, c1, c2, p):
            return rhs(t, float(fld(t)), c1, c2, mu, w0)
    else:
        rhs = python_impl(kernels.rwa_rhs)
        env, delta = drive.envelope, drive.delta

        def deriv(t, c1, c2, p):
            return rhs(t, complex(env(t)), delta, c1, c2, mu)
    return deriv


def output_grid(config: SimConfig) -> np.ndarray:
    """Uniform recording grid of the adaptive integrator, ``t_end`` always included."""
    span = config.t_end - config.t_start
    n = int(math.floor(span / config.output_step * (1 + 1e-12)))
    base = config.t_start + config.output_step * np.arange(n + 1)
    base = base[::config.record_stride]
    if config.t_end - base[-1] > 1e-9 * max(1.0, abs(config.t_end)):
        base = np.append(base, config.t_end)
    else:
        base[-1] = config.t_end
    return base


def propagate(initial: QuantumState, drive: DriveField, frame: Frame, config: SimConfig) -> Trajectory:
    """Integrate the amplitudes from ``config.t_start`` to ``config.t_end``.

    Raises
    ------
    IntegrationError
        If the adaptive step size underflows or the step budget runs out.
    """
    if frame not in ("exact", "rwa"):
        raise ValueError(f"frame must be 'exact' or 'rwa', got {frame!r}")
    if frame == "rwa" and not drive.has_envelope:
        raise ValueError("the rwa frame needs a drive with an envelope and carrier")

    if drive.packed is not None:
        packed = drive.packed.copy()
        packed[kernels.FRAME_SLOT] = kernels.FRAME_EXACT if frame == "exact" else kernels.FRAME_RWA
        rk4, dopri = kernels.rk4_fixed, kernels.dopri45
    else:
        deriv = _python_deriv(drive, frame)
        packed = np.zeros(1)
        rk4 = kernels.with_deriv(kernels.rk4_fixed, deriv)
        dopri = kernels.with_deriv(kernels.dopri45, deriv)

    c1, c2 = complex(initial.c1), complex(initial.c2)
    meta = {"method": config.method, "frame": frame, "backend": BACKEND}
    if config.method == "rk4":
        step = config.resolved_step(drive.params)
        span = config.t_end - config.t_start
        n_steps = max(1, int(math.ceil(span / step * (1 - 1e-12))))
        times, o1, o2 = rk4(packed, config.t_start, config.t_end, n_steps,
                            int(config.record_stride), c1, c2)
        meta["n_steps"] = n_steps
        meta["step"] = span / n_steps
    else:
        times = output_grid(config)
        o1, o2, status, t_fail, n_acc, n_rej = dopri(
            packed, config.t_start, config.t_end, config.rel_tol, config.abs_tol,
            times, c1, c2, MAX_STEPS)
        if status == kernels.STATUS_UNDERFLOW:
            raise IntegrationError(f"step size underflow at t = {t_fail:.12g}", t_fail)
        if status == kernels.STATUS_MAX_STEPS:
            raise IntegrationError(f"step budget exhausted at t = {t_fail:.12g}", t_fail)
        meta["n_accepted"] = int(n_acc)
        meta["n_rejected"] = int(n_rej)

    fields = drive.field_array(times)
    if drive.reference is not None:
        ref = np.asarray(drive.reference(times), dtype=float)
    else:
        ref = np.full(times.shape, np.nan)
    return Trajectory(times, o1, o2, fields, ref, frame=frame, meta=meta)


def rabi_oracle(initial: QuantumState, envelope: complex, delta: float, params: SystemParams,
                t: float) -> QuantumState:
    """Closed-form RWA state at ``t`` for a constant envelope, starting at time 0.

    The generalised Rabi frequency is ``sqrt(4 mu^2 |env|^2 + delta^2)``.
    """
    c1, c2 = python_impl(kernels.rabi_closed_form)(
        complex(initial.c1), complex(initial.c2), complex(envelope), float(delta), params.mu, float(t))
    return QuantumState.raw(c1, c2)


def rabi_frequency(envelope: complex, delta: float, params: SystemParams) -> float:
    return math.sqrt(4.0 * params.mu ** 2 * abs(envelope) ** 2 + delta ** 2)


def norm_drift(traj: Trajectory) -> float:
    """Largest deviation of ``|c1|^2 + |c2|^2`` from 1 over the samples."""
    return float(np.max(np.abs(traj.p1 + traj.p2 - 1.0)))
