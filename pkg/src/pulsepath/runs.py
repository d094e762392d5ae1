"""End-to-end runs behind the CLI subcommands."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis
from ._accel import BACKEND
from .domain import PulsePathError, Trajectory
from .dynamics import DriveField, norm_drift, output_grid, propagate
from .fileio import (
    GNUPLOT_PULSE, GNUPLOT_TRAJECTORY, RunManifest, format_keyed, manifest_items,
    timestamp_line, write_csv, write_gnuplot,
)
from .synthesis import Pulse, initial_state, sample_pulse

log = logging.getLogger(__name__)


@dataclass
class PropagationResult:
    manifest: RunManifest
    exact: Trajectory | None
    rwa: Trajectory | None
    summary: dict


def _stamp(m: RunManifest):
    return timestamp_line() if m.timestamp else None


def synthesize(m: RunManifest):
    """Write ``pulse.csv`` (``t_au, field_au, envelope_au``) on the run's output grid."""
    out = m.ensure_out_dir()
    samples = sample_pulse(m.spec, m.params, output_grid(m.sim))
    path = write_csv(out / "pulse.csv", {
        "t_au": samples.times, "field_au": samples.field, "envelope_au": samples.envelope,
    }, _stamp(m))
    written = [path]
    if m.emit_gnuplot:
        written.append(write_gnuplot(out / "pulse.gp", GNUPLOT_PULSE, path.name))
    return samples, written


def _relphase(traj: Trajectory) -> np.ndarray:
    ok = (np.abs(traj.c1) >= 1e-12) & (np.abs(traj.c2) >= 1e-12)
    phase = np.angle(traj.c1 * np.conj(traj.c2))
    return np.where(ok, phase, np.nan)


def _frame_summary(tag: str, traj: Trajectory, a_f: float) -> dict:
    err = analysis.tracking_error(traj)
    return {
        f"final_p1_{tag}": float(traj.p1[-1]),
        f"final_p2_{tag}": float(traj.p2[-1]),
        f"final_population_error_{tag}": analysis.final_population_error(traj, a_f),
        f"max_tracking_error_{tag}": err.max_abs,
        f"rms_tracking_error_{tag}": err.l2,
        f"norm_drift_{tag}": norm_drift(traj),
    }


def run_propagation(m: RunManifest) -> PropagationResult:
    """Propagate the synthesized pulse in the requested frame(s) and summarise."""
    pulse = Pulse(m.spec, m.params)
    drive = DriveField.from_pulse(pulse)
    start = initial_state(m.spec, m.sim.t_start)
    exact = propagate(start, drive, "exact", m.sim) if m.frame in ("exact", "both") else None
    rwa = propagate(start, drive, "rwa", m.sim) if m.frame in ("rwa", "both") else None

    summary = dict(manifest_items(m))
    summary["backend"] = BACKEND
    if exact is not None:
        summary.update(_frame_summary("exact", exact, m.spec.a_f))
    if rwa is not None:
        summary.update(_frame_summary("rwa", rwa, m.spec.a_f))
        try:
            pc = analysis.phase_constancy(rwa)
            summary["phase_drift_rwa"] = pc.max_deviation
            summary["phase_excluded_samples_rwa"] = pc.n_excluded
        except analysis.NoPhaseSamplesError:
            summary["phase_drift_rwa"] = "undefined"
    if exact is not None and rwa is not None:
        summary["max_abs_dp1_exact_minus_rwa"] = float(np.max(np.abs(exact.p1 - rwa.p1)))
    if m.spec.a_i != m.spec.a_f:
        pm = analysis.pulse_metrics(m.spec, m.params, (m.sim.t_start, m.sim.t_end))
        summary.update(peak_amplitude_au=pm.peak_amplitude, peak_time_au=pm.peak_time,
                       fwhm_au=pm.fwhm, cycles_in_fwhm=pm.cycles_in_fwhm)
    else:
        summary["cycles_in_fwhm"] = "n/a (zero pulse)"
    summary["carrier_period_fs"] = analysis.period_crosscheck(m.params)
    return PropagationResult(m, exact, rwa, summary)


def trajectory_columns(exact: Trajectory | None, rwa: Trajectory | None) -> dict:
    base = exact if exact is not None else rwa
    n = len(base)
    blank = np.full(n, np.nan)
    return {
        "t_au": base.times,
        "field_au": base.field_values,
        "p1_exact": exact.p1 if exact is not None else blank,
        "p2_exact": exact.p2 if exact is not None else blank,
        "p1_rwa": rwa.p1 if rwa is not None else blank,
        "p2_rwa": rwa.p2 if rwa is not None else blank,
        "f_ref": base.reference_f,
        "relphase_rwa": _relphase(rwa) if rwa is not None else blank,
    }


def write_propagation(result: PropagationResult):
    m = result.manifest
    out = m.ensure_out_dir()
    stamp = _stamp(m)
    written = [write_csv(out / "trajectory.csv", trajectory_columns(result.exact, result.rwa), stamp)]
    if result.exact is not None and result.rwa is not None:
        written.append(write_csv(out / "difference.csv", {
            "t_au": result.exact.times,
            "dp1_exact_minus_rwa": result.exact.p1 - result.rwa.p1,
            "dp2_exact_minus_rwa": result.exact.p2 - result.rwa.p2,
        }, stamp))
    summary_path = out / "summary.txt"
    summary_path.write_text(format_keyed(result.summary, stamp=stamp))
    written.append(summary_path)
    if m.emit_gnuplot:
        written.append(write_gnuplot(out / "trajectory.gp", GNUPLOT_TRAJECTORY, "trajectory.csv"))
    return written


def sweep_row(m: RunManifest) -> dict:
    """One sweep entry; failures are captured in the ``error`` field."""
    row = {"alpha": m.spec.alpha, "cycles_in_fwhm": np.nan, "final_population_error": np.nan,
           "max_tracking_error": np.nan, "final_p1": np.nan, "error": ""}
    try:
        drive = DriveField.from_pulse(Pulse(m.spec, m.params))
        traj = propagate(initial_state(m.spec, m.sim.t_start), drive, "exact", m.sim)
        row["final_population_error"] = analysis.final_population_error(traj, m.spec.a_f)
        row["max_tracking_error"] = analysis.tracking_error(traj).max_abs
        row["final_p1"] = float(traj.p1[-1])
        row["cycles_in_fwhm"] = analysis.pulse_metrics(
            m.spec, m.params, (m.sim.t_start, m.sim.t_end)).cycles_in_fwhm
    except (PulsePathError, ValueError, ArithmeticError) as exc:
        log.warning("sweep row alpha=%g failed: %s", m.spec.alpha, exc)
        row["error"] = f"{type(exc).__name__}: {exc}".replace(",", ";")
    return row


def run_sweep(m: RunManifest, alphas, jobs: int = 1) -> list[dict]:
    manifests = [m.for_alpha(a) for a in alphas]
    if jobs <= 1 or len(manifests) == 1:
        return [sweep_row(x) for x in manifests]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(sweep_row, manifests))


def write_sweep(m: RunManifest, rows: list[dict]):
    out = m.ensure_out_dir()
    cols = {k: [r[k] for r in rows] for k in rows[0]}
    return write_csv(out / "sweep.csv", cols, _stamp(m))
