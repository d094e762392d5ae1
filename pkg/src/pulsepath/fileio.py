"""Run manifests, keyed-text config/summary files and CSV tables."""
from __future__ import annotations

import datetime as _dt
import math
import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .domain import ControlSpec, SimConfig, SystemParams

PRESETS: dict[str, dict[str, str]] = {
    "fig1": {"mu": "6", "omega0": "0.02", "a_i": "0.4", "a_f": "1", "alpha": "0.01", "phi": "0"},
    "fig2": {"mu": "6", "omega0": "0.02", "a_i": "0.4", "a_f": "1", "alpha": "0.05", "phi": "0"},
}
DEFAULTS = dict(PRESETS["fig1"])

TRAJECTORY_COLUMNS = ("t_au", "field_au", "p1_exact", "p2_exact", "p1_rwa", "p2_rwa",
                      "f_ref", "relphase_rwa")
PULSE_COLUMNS = ("t_au", "field_au", "envelope_au")
DIFFERENCE_COLUMNS = ("t_au", "dp1_exact_minus_rwa", "dp2_exact_minus_rwa")
SWEEP_COLUMNS = ("alpha", "cycles_in_fwhm", "final_population_error", "max_tracking_error",
                 "final_p1", "error")

_FLOAT_KEYS = ("mu", "omega0", "a_i", "a_f", "alpha", "phi", "t_start", "t_end", "step",
               "rel_tol", "abs_tol", "output_step", "window_scale")
_KNOWN_KEYS = set(_FLOAT_KEYS) | {"method", "record_stride", "frame", "alphas"}
FRAMES = ("exact", "rwa", "both")


class ConfigError(ValueError):
    """Bad configuration; ``key`` names the offending entry when known."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message if key is None else f"key '{key}': {message}")
        self.key = key


def parse_keyed_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        out[key] = value
    return out


def read_keyed(path) -> dict[str, str]:
    path = Path(path)
    return parse_keyed_text(path.read_text(), str(path))


def format_keyed(items: dict, digits: int = 6, stamp: str | None = None) -> str:
    lines = [] if stamp is None else [f"# {stamp}"]
    width = max((len(k) for k in items), default=0)
    for key, value in items.items():
        if isinstance(value, float):
            value = f"{value:.{digits}g}"
        lines.append(f"{key:<{width}} = {value}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RunManifest:
    """Everything a CLI run needs: physics, integration settings and outputs."""

    spec: ControlSpec
    params: SystemParams
    sim: SimConfig
    frame: str = "both"
    out_dir: Path = Path(".")
    window_scale: float = 15.0
    alphas: tuple[float, ...] = ()
    timestamp: bool = True
    emit_gnuplot: bool = False
    explicit_window: bool = False

    def __post_init__(self):
        if self.frame not in FRAMES:
            raise ConfigError(f"must be one of {', '.join(FRAMES)}, got {self.frame!r}", "frame")

    def for_alpha(self, alpha: float) -> "RunManifest":
        """Same run with a different ``alpha``; the window rescales unless set explicitly."""
        spec = replace(self.spec, alpha=alpha)
        sim = self.sim
        if not self.explicit_window:
            lo, hi = spec.default_window(self.window_scale)
            sim = replace(sim, t_start=lo, t_end=hi)
        return replace(self, spec=spec, sim=sim)

    def ensure_out_dir(self) -> Path:
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {self.out_dir}: {exc}", "out")
        if not os.access(self.out_dir, os.W_OK):
            raise ConfigError(f"output directory {self.out_dir} is not writable", "out")
        return self.out_dir


def _float(values: dict[str, str], key: str) -> float:
    try:
        v = float(values[key])
    except ValueError:
        raise ConfigError(f"expected a number, got {values[key]!r}", key) from None
    if not math.isfinite(v):
        raise ConfigError(f"must be finite, got {values[key]!r}", key)
    return v


def parse_alphas(text: str, key: str = "alphas") -> tuple[float, ...]:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if not parts:
        raise ConfigError("empty list", key)
    out = []
    for p in parts:
        try:
            a = float(p)
        except ValueError:
            raise ConfigError(f"expected a number, got {p.strip()!r}", key) from None
        if not a > 0 or not math.isfinite(a):
            raise ConfigError(f"alpha must be positive, got {p.strip()}", key)
        out.append(a)
    return tuple(out)


def build_manifest(values: dict[str, str], out_dir=".", timestamp=True,
                   emit_gnuplot=False) -> RunManifest:
    """Validate merged ``key -> value`` strings into a :class:`RunManifest`."""
    unknown = sorted(set(values) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError("unknown configuration key", unknown[0])
    merged = dict(DEFAULTS)
    merged.update(values)
    num = {k: _float(merged, k) for k in _FLOAT_KEYS if k in merged}

    if not num["omega0"] > 0:
        raise ConfigError(f"must be positive, got {merged['omega0']}", "omega0")
    if num["mu"] == 0:
        raise ConfigError("must be nonzero", "mu")
    params = SystemParams(omega0=num["omega0"], mu=num["mu"])
    for key in ("a_i", "a_f"):
        if not 0.0 <= num[key] <= 1.0:
            raise ConfigError(f"must lie in [0, 1], got {merged[key]}", key)
    if not num["alpha"] > 0:
        raise ConfigError(f"must be positive, got {merged['alpha']}", "alpha")
    spec = ControlSpec(num["a_i"], num["a_f"], num["alpha"], num["phi"])

    scale = num.get("window_scale", 15.0)
    if not scale > 0:
        raise ConfigError("must be positive", "window_scale")
    explicit = "t_start" in num or "t_end" in num
    lo, hi = spec.default_window(scale)
    t_start = num.get("t_start", lo)
    t_end = num.get("t_end", hi)
    if not t_start < t_end:
        raise ConfigError(f"empty time window [{t_start}, {t_end}]", "t_end")

    method = merged.get("method", "dopri45")
    if method not in ("dopri45", "rk4"):
        raise ConfigError(f"must be 'dopri45' or 'rk4', got {method!r}", "method")
    stride_txt = merged.get("record_stride", "1")
    try:
        stride = int(stride_txt)
    except ValueError:
        raise ConfigError(f"expected an integer, got {stride_txt!r}", "record_stride") from None
    if stride < 1:
        raise ConfigError("must be >= 1", "record_stride")
    for key in ("step", "rel_tol", "abs_tol", "output_step"):
        if key in num and not num[key] > 0:
            raise ConfigError(f"must be positive, got {merged[key]}", key)
    sim = SimConfig(
        t_start=t_start, t_end=t_end, method=method, step=num.get("step"),
        rel_tol=num.get("rel_tol", 1e-10), abs_tol=num.get("abs_tol", 1e-12),
        record_stride=stride, output_step=num.get("output_step", 1.0),
    )
    alphas = parse_alphas(merged["alphas"]) if "alphas" in merged else ()
    return RunManifest(spec=spec, params=params, sim=sim, frame=merged.get("frame", "both"),
                       out_dir=Path(out_dir), window_scale=scale, alphas=alphas,
                       timestamp=timestamp, emit_gnuplot=emit_gnuplot, explicit_window=explicit)


def timestamp_line() -> str:
    now = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0)
    return f"generated {now.isoformat()}"


def _cell(x) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def write_csv(path, columns: dict[str, np.ndarray | list], stamp: str | None = None) -> Path:
    """Write equal-length columns with a header row; NaN cells are left empty.

    Floats are written with ``repr`` (shortest round-trip form, at most 17
    significant digits) so reading them back is bit-exact.
    """
    path = Path(path)
    names = list(columns)
    cols = [columns[n] for n in names]
    n = len(cols[0]) if cols else 0
    if any(len(c) != n for c in cols):
        raise ValueError("columns must have equal length")
    with open(path, "w", newline="") as fh:
        if stamp is not None:
            fh.write(f"# {stamp}\n")
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(_cell(c[i]) for c in cols) + "\n")
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    """Read a table written by :func:`write_csv`; empty cells become NaN.

    Columns that do not parse as numbers are returned as string arrays.
    """
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:] if ln]
    out: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        raw = [r[j] if j < len(r) else "" for r in rows]
        try:
            out[name] = np.array([float(x) if x != "" else np.nan for x in raw], dtype=float)
        except ValueError:
            out[name] = np.array(raw, dtype=object)
    return out


GNUPLOT_PULSE = """set datafile separator ','
set key autotitle columnhead
set xlabel 't (au)'
set ylabel 'E (au)'
plot '{csv}' using 1:2 with lines, '' using 1:3 with lines dt 2, '' using 1:(-$3) with lines dt 2 notitle
"""

GNUPLOT_TRAJECTORY = """set datafile separator ','
set key autotitle columnhead
set xlabel 't (au)'
set ylabel 'population'
set yrange [0:1]
plot '{csv}' using 1:3 with lines lc rgb 'red', \\
     '' using 1:4 with lines lc rgb 'dark-green', \\
     '' using 1:5 with lines dt 2 lc rgb 'red', \\
     '' using 1:6 with lines dt 2 lc rgb 'dark-green', \\
     '' using 1:7 with lines lc rgb 'blue'
"""


def write_gnuplot(path, template: str, csv_name: str) -> Path:
    path = Path(path)
    path.write_text(template.format(csv=csv_name))
    return path


def manifest_items(m: RunManifest) -> dict:
    s, p, c = m.spec, m.params, m.sim
    return {
        "mu": p.mu, "omega0": p.omega0, "a_i": s.a_i, "a_f": s.a_f, "alpha": s.alpha, "phi": s.phi,
        "t_start": c.t_start, "t_end": c.t_end, "method": c.method, "frame": m.frame,
    }

