"""Value types shared across the package.

Atomic units are used for every quantity (hbar = e = m_e = 1).  Only the
transition frequency ``omega0 = eps2 - eps1`` is stored; the individual
eigenenergies contribute a global phase and never reach a population or a
synthesized field.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

#: One atomic unit of time in femtoseconds.
AU_TIME_FS = 2.4188843265857e-2

NORM_TOL = 1e-12
PHASE_FLOOR = 1e-12


class PulsePathError(Exception):
    """Base class for errors raised by this package."""


class DegenerateAmplitudeError(PulsePathError, ValueError):
    """A relative phase was requested where one amplitude vanishes."""


@dataclass(frozen=True)
class SystemParams:
    """Two-level system: transition frequency and projected dipole (au)."""

    omega0: float
    mu: float

    def __post_init__(self):
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if not math.isfinite(self.mu) or self.mu == 0:
            raise ValueError(f"mu must be finite and nonzero, got {self.mu}")


@dataclass(frozen=True)
class ControlSpec:
    """Sigmoid population path from ``a_i`` to ``a_f`` at rate ``alpha``.

    ``phi`` is the constant relative phase between the amplitudes of
    ``|1>`` and ``|2>``.
    """

    a_i: float
    a_f: float
    alpha: float
    phi: float = 0.0

    def __post_init__(self):
        for name in ("a_i", "a_f"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not math.isfinite(self.phi):
            raise ValueError(f"phi must be finite, got {self.phi}")

    def default_window(self, scale: float = 15.0) -> tuple[float, float]:
        """Symmetric window ``[-scale/alpha, scale/alpha]``.

        ``scale=15`` leaves a residual ``g`` of ``exp(-15) ~ 3.1e-7`` at
        either edge.
        """
        half = scale / self.alpha
        return -half, half


@dataclass(frozen=True)
class QuantumState:
    """Interaction-picture amplitude pair ``(c1, c2)``."""

    c1: complex
    c2: complex

    def __post_init__(self):
        object.__setattr__(self, "c1", complex(self.c1))
        object.__setattr__(self, "c2", complex(self.c2))
        norm = abs(self.c1) ** 2 + abs(self.c2) ** 2
        if not abs(norm - 1.0) <= NORM_TOL:
            raise ValueError(f"state is not normalized: |c1|^2+|c2|^2 = {norm!r}")

    @classmethod
    def raw(cls, c1: complex, c2: complex) -> "QuantumState":
        """Build a state without the normalization check (integrator output)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "c1", complex(c1))
        object.__setattr__(obj, "c2", complex(c2))
        return obj

    @property
    def norm(self) -> float:
        return abs(self.c1) ** 2 + abs(self.c2) ** 2


def population(state: QuantumState, which: Literal[1, 2]) -> float:
    """Population ``|c_k|^2`` of state ``which`` (1 or 2)."""
    if which == 1:
        return abs(state.c1) ** 2
    if which == 2:
        return abs(state.c2) ** 2
    raise ValueError(f"which must be 1 or 2, got {which!r}")


def wrap_phase(x):
    """Wrap angles to ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    out = np.pi - np.mod(np.pi - x, 2 * np.pi)
    return float(out) if out.ndim == 0 else out


def relative_phase(state: QuantumState) -> float:
    """``arg(c1) - arg(c2)`` wrapped to ``(-pi, pi]``.

    Raises
    ------
    DegenerateAmplitudeError
        If either modulus is below 1e-12.
    """
    if abs(state.c1) < PHASE_FLOOR or abs(state.c2) < PHASE_FLOOR:
        raise DegenerateAmplitudeError(
            f"relative phase undefined for |c1|={abs(state.c1):.3g}, |c2|={abs(state.c2):.3g}"
        )
    # phase of c1*conj(c2) is already the wrapped difference
    phase = cmath.phase(state.c1 * state.c2.conjugate())
    return math.pi if phase == -math.pi else phase


Method = Literal["dopri45", "rk4"]


@dataclass(frozen=True)
class SimConfig:
    """Integration window and stepping controls.

    ``method='dopri45'`` is the adaptive Dormand-Prince pair; the solution is
    reported on a uniform grid of spacing ``output_step`` via its dense
    interpolant.  ``method='rk4'`` is classical fixed-step RK4 with step
    ``step`` (``None`` means 200 steps per carrier period); every step is a
    grid point.  ``record_stride`` keeps every n-th grid point; the final
    time is always kept.
    """

    t_start: float
    t_end: float
    method: Method = "dopri45"
    step: float | None = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    record_stride: int = 1
    output_step: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise ValueError("integration window must be finite")
        if not self.t_start < self.t_end:
            raise ValueError(f"t_start must be < t_end, got [{self.t_start}, {self.t_end}]")
        if self.method not in ("dopri45", "rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "rk4" and self.step is not None and not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.method == "dopri45" and not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError(f"record_stride must be an integer >= 1, got {self.record_stride}")
        if not self.output_step > 0:
            raise ValueError(f"output_step must be positive, got {self.output_step}")

    def resolved_step(self, params: SystemParams) -> float:
        if self.step is not None:
            return self.step
        return (2 * math.pi / params.omega0) / 200


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled propagation result.

    ``reference_f`` holds the prescribed population of ``|1>``; it is NaN
    when the drive carries no prescribed path.
    """

    times: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    field_values: np.ndarray
    reference_f: np.ndarray
    frame: str = "exact"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        arrays = {
            "c1": np.asarray(self.c1, dtype=complex),
            "c2": np.asarray(self.c2, dtype=complex),
            "field_values": np.asarray(self.field_values, dtype=float),
            "reference_f": np.asarray(self.reference_f, dtype=float),
        }
        n = times.shape[0]
        if times.ndim != 1 or n < 1:
            raise ValueError("times must be a non-empty 1-d array")
        for name, arr in arrays.items():
            if arr.shape != (n,):
                raise ValueError(f"{name} has shape {arr.shape}, expected ({n},)")
        if n > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.times.shape[0]

    @property
    def p1(self) -> np.ndarray:
        return np.abs(self.c1) ** 2

    @property
    def p2(self) -> np.ndarray:
        return np.abs(self.c2) ** 2

    @property
    def states(self) -> list[QuantumState]:
        return [QuantumState.raw(a, b) for a, b in zip(self.c1, self.c2)]

    @property
    def final_state(self) -> QuantumState:
        return QuantumState.raw(self.c1[-1], self.c2[-1])
