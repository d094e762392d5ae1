"""Figures of merit for propagated trajectories and synthesized pulses."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .domain import AU_TIME_FS, ControlSpec, PulsePathError, SystemParams, Trajectory, wrap_phase
from .synthesis import envelope

PHASE_POPULATION_FLOOR = 1e-6
SCAN_POINTS = 10_000
XTOL = 1e-10


class DegeneratePulseError(PulsePathError, ValueError):
    """The pulse is identically zero (``a_i == a_f``)."""


class NoPhaseSamplesError(PulsePathError, ValueError):
    """Every sample had a population below the phase floor."""


class TrackingError(NamedTuple):
    max_abs: float
    l2: float


class PhaseConstancy(NamedTuple):
    max_deviation: float
    n_included: int
    n_excluded: int


class PulseMetrics(NamedTuple):
    peak_amplitude: float
    peak_time: float
    fwhm: float
    cycles_in_fwhm: float


def tracking_error(traj: Trajectory) -> TrackingError:
    """Max and RMS distance between the population of ``|1>`` and the prescribed path."""
    if np.all(np.isnan(traj.reference_f)):
        raise ValueError("trajectory carries no prescribed path")
    dev = traj.p1 - traj.reference_f
    return TrackingError(float(np.max(np.abs(dev))), float(np.sqrt(np.mean(dev ** 2))))


def final_population_error(traj: Trajectory, a_f: float) -> float:
    return float(abs(traj.p1[-1] - a_f))


def phase_constancy(traj: Trajectory, floor: float = PHASE_POPULATION_FLOOR) -> PhaseConstancy:
    """Largest drift of ``arg(c1) - arg(c2)`` from its value at the first usable sample.

    Samples where either population is at or below ``floor`` are skipped
    and counted in ``n_excluded``.
    """
    keep = (traj.p1 > floor) & (traj.p2 > floor)
    n_in = int(np.count_nonzero(keep))
    if n_in == 0:
        raise NoPhaseSamplesError(f"no sample has both populations above {floor:g}")
    phase = np.angle(traj.c1[keep] * np.conj(traj.c2[keep]))
    drift = np.abs(wrap_phase(phase - phase[0]))
    return PhaseConstancy(float(np.max(drift)), n_in, int(keep.size - n_in))


def _golden_max(fn, lo, hi, xtol):
    res = optimize.minimize_scalar(lambda t: -fn(t), bounds=(lo, hi), method="bounded",
                                   options={"xatol": xtol})
    return float(res.x)


def pulse_metrics(spec: ControlSpec, params: SystemParams,
                  window: tuple[float, float] | None = None) -> PulseMetrics:
    """Peak, FWHM and carrier cycles within the FWHM of the pulse envelope.

    The envelope is scanned on 10^4 points of ``window`` (default
    ``spec.default_window()``); the peak is refined by a bounded scalar
    search and each half-maximum crossing by bisection, both to 1e-10 au.
    """
    if spec.a_i == spec.a_f:
        raise DegeneratePulseError("a_i == a_f gives an identically zero pulse")
    lo, hi = window if window is not None else spec.default_window()
    grid = np.linspace(lo, hi, SCAN_POINTS)
    env = envelope(spec, params, grid)
    k = int(np.argmax(env))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    fn = lambda t: envelope(spec, params, t)
    t_peak = _golden_max(fn, a, b, XTOL)
    peak = max(fn(t_peak), float(env[k]))
    half = 0.5 * peak
    # outermost scan points still above half maximum
    above = np.flatnonzero(env >= half)
    i_lo, i_hi = above[0], above[-1]
    if i_lo == 0 or i_hi == grid.size - 1:
        raise ValueError("half-maximum crossing lies outside the scan window")
    g = lambda t: fn(t) - half
    left = optimize.bisect(g, grid[i_lo - 1], grid[i_lo], xtol=XTOL)
    right = optimize.bisect(g, grid[i_hi], grid[i_hi + 1], xtol=XTOL)
    fwhm = right - left
    return PulseMetrics(peak, t_peak, fwhm, fwhm * params.omega0 / (2 * math.pi))


def period_crosscheck(params: SystemParams) -> float:
    """Carrier period ``2 pi / omega0`` in femtoseconds."""
    return 2 * math.pi / params.omega0 * AU_TIME_FS
