"""Hot numeric kernels (numba-compiled unless disabled, see ``_accel``).

Drives are passed to the integrators as a flat float64 parameter vector::

    p[0]  drive code: 0 zero field, 1 sigmoid pulse, 2 constant envelope
    p[1]  mu          p[2]  omega0
    code 1:  p[3] a_i  p[4] a_f  p[5] alpha  p[6] phi     (carrier = omega0)
    code 2:  p[3] Re E0  p[4] Im E0  p[5] carrier omega
    p[7]  frame: 0 exact, 1 rwa

so that one compiled integrator covers every built-in drive and both
frames.  Arbitrary Python drives run an uncompiled copy of the same
integrator with ``packed_deriv`` rebound (``with_deriv``).
"""
import cmath
import math
import types

import numpy as np

from ._accel import USE_NUMBA, jit, python_impl

DRIVE_ZERO = 0
DRIVE_SIGMOID = 1
DRIVE_CONSTANT = 2

FRAME_SLOT = 7
FRAME_EXACT = 0
FRAME_RWA = 1

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAX_STEPS = 2


# --------------------------------------------------------------------------
# sigmoid path and closed-form pulse
# --------------------------------------------------------------------------

@jit
def logistic_pair(x):
    """Return ``(g, 1 - g)`` for ``g = 1/(1 + exp(-x))`` without overflow."""
    if x >= 0.0:
        e = math.exp(-x)
        return 1.0 / (1.0 + e), e / (1.0 + e)
    e = math.exp(x)
    return e / (1.0 + e), 1.0 / (1.0 + e)


@jit
def sigmoid_prefactor(t, a_i, a_f, alpha):
    """Signed amplitude ``mu * E(t) / sin(omega0 t + phi)`` of the closed-form pulse.

    Evaluated with ``w = exp(-alpha |t|) <= 1`` so nothing overflows; for
    ``t > 0`` the roles of ``a_i`` and ``a_f`` swap.
    """
    if a_i == a_f:
        return 0.0
    w = math.exp(-alpha * abs(t))
    if w == 0.0:
        return 0.0
    if t <= 0.0:
        p = a_i
        q = a_f
    else:
        p = a_f
        q = a_i
    r1 = 1.0 / ((1.0 - p) / w + (1.0 - q))
    # divide first so subnormal endpoints neither overflow nor underflow to 0 * inf
    amp = (a_f - a_i) / math.sqrt(p / w + q)
    return alpha * amp * math.sqrt(r1) / (1.0 + w)


@jit
def sigmoid_field(t, a_i, a_f, alpha, phi, mu, omega0):
    return sigmoid_prefactor(t, a_i, a_f, alpha) / mu * math.sin(omega0 * t + phi)


@jit
def _sigmoid_prefactor_loop(t, a_i, a_f, alpha):
    out = np.empty(t.shape[0])
    for k in range(t.shape[0]):
        out[k] = sigmoid_prefactor(t[k], a_i, a_f, alpha)
    return out


def _sigmoid_prefactor_numpy(t, a_i, a_f, alpha):
    if a_i == a_f:
        return np.zeros_like(t)
    w = np.exp(-alpha * np.abs(t))
    left = t <= 0.0
    p = np.where(left, a_i, a_f)
    q = np.where(left, a_f, a_i)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = 1.0 / ((1.0 - p) / w + (1.0 - q))
        amp = (a_f - a_i) / np.sqrt(p / w + q)
        out = alpha * amp * np.sqrt(r1) / (1.0 + w)
    return np.where(w == 0.0, 0.0, out)


def sigmoid_prefactor_array(t, a_i, a_f, alpha):
    t = np.ascontiguousarray(t, dtype=np.float64)
    if USE_NUMBA:
        return _sigmoid_prefactor_loop(t, float(a_i), float(a_f), float(alpha))
    return _sigmoid_prefactor_numpy(t, a_i, a_f, alpha)


# --------------------------------------------------------------------------
# drives and equations of motion
# --------------------------------------------------------------------------

@jit
def drive_field(t, p):
    """Real field ``E(t)`` of a coded drive."""
    code = int(p[0])
    if code == DRIVE_SIGMOID:
        return sigmoid_field(t, p[3], p[4], p[5], p[6], p[1], p[2])
    if code == DRIVE_CONSTANT:
        env = complex(p[3], p[4])
        return 2.0 * (env * cmath.exp(-1j * p[5] * t)).real
    return 0.0


@jit
def drive_envelope(t, p):
    """Complex envelope with ``E = env e^{-i w t} + c.c.``; returns ``(env, w)``."""
    code = int(p[0])
    if code == DRIVE_SIGMOID:
        amp = 0.5 * sigmoid_prefactor(t, p[3], p[4], p[5]) / p[1]
        return 1j * amp * cmath.exp(-1j * p[6]), p[2]
    if code == DRIVE_CONSTANT:
        return complex(p[3], p[4]), p[5]
    return 0j, p[2]


@jit
def drive_field_array(t, p):
    out = np.empty(t.shape[0])
    for k in range(t.shape[0]):
        out[k] = drive_field(t[k], p)
    return out


@jit
def exact_rhs(t, field, c1, c2, mu, omega0):
    """Full (non-RWA) amplitude equations driven by the real field value."""
    rot = cmath.exp(-1j * omega0 * t)
    coupling = 1j * mu * field
    return coupling * c2 * rot, coupling * c1 * rot.conjugate()


@jit
def rwa_rhs(t, env, delta, c1, c2, mu):
    """Rotating-wave amplitude equations for envelope ``env`` and detuning ``delta``."""
    rot = cmath.exp(1j * delta * t)
    return 1j * mu * env.conjugate() * rot * c2, 1j * mu * env * rot.conjugate() * c1


@jit
def deriv_exact(t, c1, c2, p):
    return exact_rhs(t, drive_field(t, p), c1, c2, p[1], p[2])


@jit
def deriv_rwa(t, c1, c2, p):
    env, carrier = drive_envelope(t, p)
    return rwa_rhs(t, env, carrier - p[2], c1, c2, p[1])


@jit
def packed_deriv(t, c1, c2, p):
    """Right-hand side selected by ``p[FRAME_SLOT]`` (0 exact, 1 rwa)."""
    if p[FRAME_SLOT] == FRAME_RWA:
        return deriv_rwa(t, c1, c2, p)
    return deriv_exact(t, c1, c2, p)


# --------------------------------------------------------------------------
# integrators
# --------------------------------------------------------------------------

@jit
def rk4_fixed(p, t0, t1, n_steps, stride, c1, c2):
    """Classical RK4 on ``n_steps`` equal steps; records every ``stride``-th point."""
    h = (t1 - t0) / n_steps
    n_rec = n_steps // stride + 1
    if n_steps % stride != 0:
        n_rec += 1
    times = np.empty(n_rec)
    out1 = np.empty(n_rec, dtype=np.complex128)
    out2 = np.empty(n_rec, dtype=np.complex128)
    times[0] = t0
    out1[0] = c1
    out2[0] = c2
    j = 1
    for k in range(n_steps):
        t = t0 + k * h
        a1, a2 = packed_deriv(t, c1, c2, p)
        b1, b2 = packed_deriv(t + 0.5 * h, c1 + 0.5 * h * a1, c2 + 0.5 * h * a2, p)
        d1, d2 = packed_deriv(t + 0.5 * h, c1 + 0.5 * h * b1, c2 + 0.5 * h * b2, p)
        e1, e2 = packed_deriv(t + h, c1 + h * d1, c2 + h * d2, p)
        c1 = c1 + h / 6.0 * (a1 + 2.0 * b1 + 2.0 * d1 + e1)
        c2 = c2 + h / 6.0 * (a2 + 2.0 * b2 + 2.0 * d2 + e2)
        if (k + 1) % stride == 0 or k + 1 == n_steps:
            times[j] = t1 if k + 1 == n_steps else t0 + (k + 1) * h
            out1[j] = c1
            out2[j] = c2
            j += 1
    return times, out1, out2


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# y5 - y4 weights, last entry multiplies the FSAL stage
_E = np.array([-71.0 / 57600.0, 0.0, 71.0 / 16695.0, -71.0 / 1920.0,
               17253.0 / 339200.0, -22.0 / 525.0, 1.0 / 40.0])
# quartic continuous extension (Shampine), rows = stages, cols = powers 1..4
_P = np.array([
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0],
])


@jit
def _err_norm(e1, e2, y1, y2, n1, n2, rtol, atol):
    s1 = atol + rtol * max(abs(y1), abs(n1))
    s2 = atol + rtol * max(abs(y2), abs(n2))
    return math.sqrt(0.5 * ((abs(e1) / s1) ** 2 + (abs(e2) / s2) ** 2))


@jit
def dopri45(p, t0, t1, rtol, atol, out_times, c1, c2, max_steps):
    """Adaptive Dormand-Prince 5(4) with dense output on ``out_times``.

    ``out_times`` must be increasing, start at ``t0`` and end at ``t1``.
    Returns ``(c1_out, c2_out, status, t_fail, n_accepted, n_rejected)``.
    """
    n_out = out_times.shape[0]
    out1 = np.empty(n_out, dtype=np.complex128)
    out2 = np.empty(n_out, dtype=np.complex128)
    out1[0] = c1
    out2[0] = c2
    j = 1
    k1 = np.empty(7, dtype=np.complex128)
    k2 = np.empty(7, dtype=np.complex128)

    t = t0
    f1, f2 = packed_deriv(t, c1, c2, p)
    span = t1 - t0
    # starting step from the scaled derivative magnitude
    d0 = _err_norm(c1, c2, c1, c2, c1, c2, rtol, atol)
    d1 = _err_norm(f1, f2, c1, c2, c1, c2, rtol, atol)
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6 * span
    else:
        h = 0.01 * d0 / d1
    h = min(h, span)
    eps = 2.220446049250313e-16
    n_acc = 0
    n_rej = 0
    while t < t1:
        if n_acc + n_rej >= max_steps:
            return out1, out2, STATUS_MAX_STEPS, t, n_acc, n_rej
        h_min = 16.0 * eps * max(abs(t), 1.0)
        if h < h_min:
            return out1, out2, STATUS_UNDERFLOW, t, n_acc, n_rej
        if t + h > t1:
            h = t1 - t
        k1[0] = f1
        k2[0] = f2
        a1, a2 = packed_deriv(t + _C2 * h, c1 + h * _A21 * k1[0], c2 + h * _A21 * k2[0], p)
        k1[1] = a1
        k2[1] = a2
        a1, a2 = packed_deriv(t + _C3 * h,
                       c1 + h * (_A31 * k1[0] + _A32 * k1[1]),
                       c2 + h * (_A31 * k2[0] + _A32 * k2[1]), p)
        k1[2] = a1
        k2[2] = a2
        a1, a2 = packed_deriv(t + _C4 * h,
                       c1 + h * (_A41 * k1[0] + _A42 * k1[1] + _A43 * k1[2]),
                       c2 + h * (_A41 * k2[0] + _A42 * k2[1] + _A43 * k2[2]), p)
        k1[3] = a1
        k2[3] = a2
        a1, a2 = packed_deriv(t + _C5 * h,
                       c1 + h * (_A51 * k1[0] + _A52 * k1[1] + _A53 * k1[2] + _A54 * k1[3]),
                       c2 + h * (_A51 * k2[0] + _A52 * k2[1] + _A53 * k2[2] + _A54 * k2[3]), p)
        k1[4] = a1
        k2[4] = a2
        a1, a2 = packed_deriv(t + h,
                       c1 + h * (_A61 * k1[0] + _A62 * k1[1] + _A63 * k1[2]
                                 + _A64 * k1[3] + _A65 * k1[4]),
                       c2 + h * (_A61 * k2[0] + _A62 * k2[1] + _A63 * k2[2]
                                 + _A64 * k2[3] + _A65 * k2[4]), p)
        k1[5] = a1
        k2[5] = a2
        n1 = c1 + h * (_B1 * k1[0] + _B3 * k1[2] + _B4 * k1[3] + _B5 * k1[4] + _B6 * k1[5])
        n2 = c2 + h * (_B1 * k2[0] + _B3 * k2[2] + _B4 * k2[3] + _B5 * k2[4] + _B6 * k2[5])
        t_new = t1 if t + h >= t1 else t + h
        g1, g2 = packed_deriv(t_new, n1, n2, p)
        k1[6] = g1
        k2[6] = g2
        e1 = 0j
        e2 = 0j
        for s in range(7):
            e1 += _E[s] * k1[s]
            e2 += _E[s] * k2[s]
        err = _err_norm(h * e1, h * e2, c1, c2, n1, n2, rtol, atol)
        if not math.isfinite(err):
            # a non-finite stage shrinks the step until underflow is reported
            err = 1e10
        if err <= 1.0:
            # dense output for grid points inside (t, t_new]
            while j < n_out and out_times[j] <= t_new:
                x = (out_times[j] - t) / h
                s1 = 0j
                s2 = 0j
                xp = x
                for m in range(4):
                    q1 = 0j
                    q2 = 0j
                    for s in range(7):
                        q1 += _P[s, m] * k1[s]
                        q2 += _P[s, m] * k2[s]
                    s1 += q1 * xp
                    s2 += q2 * xp
                    xp *= x
                out1[j] = c1 + h * s1
                out2[j] = c2 + h * s2
                j += 1
            t = t_new
            c1 = n1
            c2 = n2
            f1 = g1
            f2 = g2
            n_acc += 1
            if err == 0.0:
                factor = 10.0
            else:
                factor = min(10.0, 0.9 * err ** -0.2)
            h = h * factor
        else:
            n_rej += 1
            h = h * max(0.2, 0.9 * err ** -0.2)
    # the last grid point is t1 itself; store the step endpoint exactly
    out1[n_out - 1] = c1
    out2[n_out - 1] = c2
    return out1, out2, STATUS_OK, t, n_acc, n_rej


def with_deriv(kernel, deriv):
    """Uncompiled copy of an integrator whose right-hand side is ``deriv``."""
    fn = python_impl(kernel)
    scope = dict(fn.__globals__)
    scope["packed_deriv"] = deriv
    return types.FunctionType(fn.__code__, scope, fn.__name__, fn.__defaults__, fn.__closure__)


@jit
def rabi_closed_form(c1, c2, env, delta, mu, t):
    """Exact solution of the RWA equations for a constant envelope."""
    omega = mu * env
    w = math.sqrt(delta * delta + 4.0 * abs(omega) ** 2)
    b1 = c1
    b2 = c2
    half = 0.5 * w * t
    if w > 0.0:
        cs = math.cos(half)
        sn = math.sin(half) / (0.5 * w)
        # b(t) = [cos + i sin * M / (w/2)] b(0), M = [[-d/2, conj(Om)], [Om, d/2]]
        b1 = cs * c1 + 1j * sn * (-0.5 * delta * c1 + omega.conjugate() * c2)
        b2 = cs * c2 + 1j * sn * (omega * c1 + 0.5 * delta * c2)
    return b1 * cmath.exp(0.5j * delta * t), b2 * cmath.exp(-0.5j * delta * t)
