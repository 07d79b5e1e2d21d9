"""Inverse-square tails: propagation beyond x0 and reference matching.

For V = b*x**-2 (x >= x0) with b >= -1/4 and j(j+1) = b, the scattering
problem matches the three-dimensional radial problem of order j.  The
coupling homotopy scales the inner region only; the tail is the fixed
background that defines the reference problem, so lam = 0 is the free
order-j problem and the continuity convention carries over unchanged.

Reference solutions of order j (asymptotic phases k*x - j*pi/2 and
k*x - (j+1)*pi/2) are evaluated through their large-argument expansions at
a matching radius with k*R well beyond j; the physical solution is
propagated outward to that radius with a step plan that follows both the
local wavelength and the x-scale of the tail.  Propagating the references
inward instead would be unstable through the power-law zone, where the
subdominant solution decays like x**-j against x**(j+1).

The reported phases include the j*pi/2 offset of the order-j background,
so the zero-momentum relations read eta_minus(0) - j*pi/2 = n_minus*pi,
eta_plus(0) + (1-j)*pi/2 = n_plus*pi in the non-critical cases; at b = 0
everything reduces to the cutoff formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import DEFAULT_CONFIG, EngineConfig, Parity, integrate_inner_batch
from .errors import (CriticalTailError, DomainError, LimitUnresolvedError,
                     MatchingRadiusError, TailModeError)
from .phase_shifts import HALF_PI, MAX_LAMBDA_POINTS, DEFAULT_LAMBDA_STEPS, _sweep_phase, wrap_half
from .potentials import Potential

TWO_PI = 2.0 * math.pi

#: Resolution caps: steps per x-scale of the tail and per radian of phase.
STEPS_PER_X = 128.0
STEPS_PER_RADIAN = 160.0

#: Fixed radius (in units of x0) for zero-energy tail node analysis.
NODE_RADIUS_FACTOR = 16.0

#: Residual threshold for accepting a matching radius.
MATCH_RESIDUAL = 1e-6


def _require_tail(p: Potential) -> None:
    if p.tail.kind != "inverse_square":
        raise TailModeError(
            f"inverse-square tail required (got tail {p.tail.kind!r})"
        )


def _z_far(j: float) -> float:
    """Smallest k*x at which the asymptotic reference series is trusted."""
    mu = (2.0 * j + 1.0) ** 2
    return max(40.0, 1.5 * mu)


def _pq(mu: float, z: float):
    """Large-argument amplitude/phase series P, Q and their z-derivatives,
    through (8z)**-4 and (8z)**-3."""
    a = 8.0 * z
    e1 = mu - 1.0
    c2 = e1 * (mu - 9.0) / 2.0
    c4 = e1 * (mu - 9.0) * (mu - 25.0) * (mu - 49.0) / 24.0
    q1 = e1 / 8.0
    q3 = e1 * (mu - 9.0) * (mu - 25.0) / (6.0 * 512.0)
    P = 1.0 - c2 / (a * a) + c4 / (a ** 4)
    Q = q1 / z - q3 / (z ** 3)
    dP = 2.0 * (c2 / 64.0) / z ** 3 - 4.0 * (c4 / 4096.0) / z ** 5
    dQ = -q1 / z ** 2 + 3.0 * q3 / z ** 4
    return P, Q, dP, dQ


def reference_pair(j: float, k: float, x: float):
    """(u1, u1', u2, u2') of the order-j background at k*x >= z_far.

    u1 ~ sin(k*x - j*pi/2), u2 ~ sin(k*x - (j+1)*pi/2); their Wronskian is
    exactly k.
    """
    z = k * x
    mu = (2.0 * j + 1.0) ** 2
    P, Q, dP, dQ = _pq(mu, z)
    t = z - j * HALF_PI
    s, c = math.sin(t), math.cos(t)
    u1 = P * s + Q * c
    du1 = k * ((dP - Q) * s + (P + dQ) * c)
    u2 = -P * c + Q * s
    du2 = k * (-(dP - Q) * c + (P + dQ) * s)
    return u1, du1, u2, du2


def _step_plan(x_from: float, x_to: float, k: float) -> list[tuple[float, float]]:
    """Deterministic step sequence honoring both resolution caps."""
    steps = []
    x = x_from
    cap_k = math.inf if k <= 0.0 else 1.0 / (STEPS_PER_RADIAN * k)
    while x < x_to:
        h = min(x / STEPS_PER_X, cap_k, x_to - x)
        steps.append((x, h))
        x += h
    return steps


def propagate_tail(b: float, E: float, x_from: float, x_to: float,
                   psi: np.ndarray, dpsi: np.ndarray, k_for_steps: float,
                   theta: np.ndarray | None = None):
    """Batched outward integration of psi'' = (b/x**2 - E) psi.

    Same projective bookkeeping as the inner engine: per-step
    renormalization plus optional continuous angle tracking for node
    counting.  Returns (psi, dpsi[, theta]).
    """
    psi = np.array(psi, dtype=float)
    dpsi = np.array(dpsi, dtype=float)
    track = theta is not None
    if track:
        theta = np.array(theta, dtype=float)
        raw_prev = np.arctan2(dpsi, psi)
    for x, h in _step_plan(x_from, x_to, k_for_steps):
        w0 = b / (x * x) - E
        xm = x + 0.5 * h
        wm = b / (xm * xm) - E
        x1 = x + h
        w1 = b / (x1 * x1) - E

        k1q = w0 * psi
        p2 = psi + 0.5 * h * dpsi
        q2 = dpsi + 0.5 * h * k1q
        k2q = wm * p2
        p3 = psi + 0.5 * h * q2
        q3 = dpsi + 0.5 * h * k2q
        k3q = wm * p3
        p4 = psi + h * q3
        q4 = dpsi + h * k3q
        k4q = w1 * p4
        psi = psi + (h / 6.0) * (dpsi + 2.0 * (q2 + q3) + q4)
        dpsi = dpsi + (h / 6.0) * (k1q + 2.0 * (k2q + k3q) + k4q)

        if track:
            raw = np.arctan2(dpsi, psi)
            d = raw - raw_prev
            d -= TWO_PI * np.round(d / TWO_PI)
            theta = theta + d
            raw_prev = raw
        s = np.maximum(np.abs(psi), np.abs(dpsi))
        psi = psi / s
        dpsi = dpsi / s
    if track:
        return psi, dpsi, theta
    return psi, dpsi


def match_reference_phase(j: float, k: float, x: float,
                          psi: np.ndarray, dpsi: np.ndarray) -> np.ndarray:
    """Phase of psi relative to the order-j background at radius x (mod pi):
    psi ~ sin(k*x - j*pi/2 + phi)."""
    u1, du1, u2, du2 = reference_pair(j, k, x)
    wron = u1 * du2 - u2 * du1
    alpha = (psi * du2 - dpsi * u2) / wron
    gamma = (dpsi * u1 - psi * du1) / wron
    return np.arctan2(-gamma, alpha)


def _tail_eval_factory(p: Potential, parity: Parity, cfg: EngineConfig, z_far_mult: float,
                       r_floor: float):
    """eval_pairs(k_arr, lam_arr) for the sweep machinery: inner integration
    to x0, outward tail propagation, reference matching."""
    b = p.tail.b
    j = p.tail.j
    x0 = p.x0

    def eval_pairs(k_arr: np.ndarray, lam_arr: np.ndarray) -> np.ndarray:
        out = np.empty(len(k_arr))
        for k in np.unique(k_arr):
            rows = np.nonzero(k_arr == k)[0]
            lams = lam_arr[rows]
            E = float(k * k)
            _, _, psi, dpsi, _ = integrate_inner_batch(
                p, parity, np.full(len(rows), E), lams, cfg)
            X = max(r_floor, z_far_mult * _z_far(j) / k)
            psi, dpsi = propagate_tail(b, E, x0, X, psi, dpsi, float(k))
            phi = match_reference_phase(j, float(k), X, psi, dpsi)
            if Parity(parity) is Parity.EVEN:
                phi = phi - HALF_PI
            out[rows] = phi
        return out

    return eval_pairs


def _tail_sweep(p: Potential, parity: Parity, ks, lam_target: float, cfg: EngineConfig,
                z_far_mult: float = 1.0, r_floor: float | None = None,
                lambda_steps: int = DEFAULT_LAMBDA_STEPS,
                max_points: int = MAX_LAMBDA_POINTS):
    """Unwrapped tail-mode eta (including the j*pi/2 background offset)."""
    r_floor = 50.0 * p.x0 if r_floor is None else r_floor
    eval_pairs = _tail_eval_factory(p, parity, cfg, z_far_mult, r_floor)
    grids, etas = _sweep_phase(p, parity, ks, lam_target, lambda_steps, cfg,
                               max_points, eval_pairs=eval_pairs)
    offset = p.tail.j * HALF_PI
    return grids, [e + offset for e in etas]


def tail_phase_shift(p: Potential, parity: Parity, k: float, lam: float = 1.0,
                     R_match: float | None = None,
                     config: EngineConfig | None = None,
                     lambda_steps: int = DEFAULT_LAMBDA_STEPS,
                     max_points: int = MAX_LAMBDA_POINTS) -> float:
    """Tail-mode phase shift at one momentum under the continuity convention.

    The matching radius starts at max(R_match or 50*x0, z_far(j)/k) and is
    doubled until the extracted phase is stable to 1e-6; if the caller
    pinned R_match and the first doubling moves the phase by more, the
    radius is reported as too small.
    """
    _require_tail(p)
    if not k > 0.0:
        raise DomainError(f"momentum k must be positive, got {k}")
    cfg = config or DEFAULT_CONFIG
    r_floor = 50.0 * p.x0 if R_match is None else float(R_match)

    def endpoint(mult: float) -> float:
        _, etas = _tail_sweep(p, parity, [k], lam, cfg, z_far_mult=mult,
                              r_floor=r_floor, lambda_steps=lambda_steps,
                              max_points=max_points)
        return float(etas[0][-1])

    value = endpoint(1.0)
    mult = 2.0
    while mult <= 8.0:
        probe = endpoint(mult)
        if abs(probe - value) <= MATCH_RESIDUAL:
            return probe
        if R_match is not None:
            raise MatchingRadiusError(
                f"increase matching radius: phase moved by {abs(probe - value):.3e} "
                f"when the radius was doubled (R_match = {R_match})"
            )
        value = probe
        mult *= 2.0
    raise MatchingRadiusError(
        "increase matching radius: phase did not stabilize within the doubling budget"
    )


@dataclass(frozen=True)
class TailZeroEnergy:
    """Zero-energy analysis of a tail potential: bound-state count (nodes of
    the zero-energy solution on (0, infinity)), criticality, and the
    power-basis coefficients at the analysis radius."""

    count: int
    critical: bool
    c_grow: float
    c_decay: float


def tail_zero_energy(p: Potential, parity: Parity,
                     config: EngineConfig | None = None,
                     tol_half: float = 1e-6) -> TailZeroEnergy:
    """Node count and criticality of the zero-energy solution.

    Beyond x0 the zero-energy solution is c1*x**(j+1) + c2*x**-j (a log
    pair at j = -1/2 exactly); it has at most one node out there, decided
    analytically from the coefficients at the analysis radius.  Critical
    means the growing component is absent to within tol_half.
    """
    _require_tail(p)
    cfg = config or DEFAULT_CONFIG
    b, j, x0 = p.tail.b, p.tail.j, p.x0

    th, _, psi, dpsi, _ = integrate_inner_batch(p, parity, [0.0], [1.0], cfg)
    X = NODE_RADIUS_FACTOR * x0
    psi, dpsi, th = propagate_tail(b, 0.0, x0, X, psi, dpsi, 0.0, theta=th)
    w, y, dy = float(th[0]), float(psi[0]), float(dpsi[0])
    nodes_inside = int(abs(math.ceil((w - HALF_PI) / math.pi)))

    if abs(2.0 * j + 1.0) > 1e-9:
        # power basis {x^(j+1), x^-j}
        f1, df1 = X ** (j + 1.0), (j + 1.0) * X ** j
        f2, df2 = X ** (-j), -j * X ** (-j - 1.0)
    else:
        # degenerate order: {sqrt(x), sqrt(x)*log(x/x0)}
        L = math.log(X / x0)
        r = math.sqrt(X)
        f1, df1 = r * L, (0.5 * L + 1.0) / r * 1.0
        f2, df2 = r, 0.5 / r
    det = f1 * df2 - f2 * df1
    c1 = (y * df2 - dy * f2) / det
    c2 = (dy * f1 - y * df1) / det

    s1 = abs(c1 * f1)
    s2 = abs(c2 * f2)
    critical = s1 <= tol_half * (s1 + s2) if (s1 + s2) > 0.0 else True

    extra = 0
    if not critical and c1 != 0.0 and c2 != 0.0 and (c1 > 0.0) != (c2 > 0.0):
        if s2 > s1:  # sign change still ahead of the analysis radius
            extra = 1
    return TailZeroEnergy(nodes_inside + extra, critical, c1, c2)


def tail_zero_momentum(p: Potential, parity: Parity,
                       config: EngineConfig | None = None,
                       lambda_steps: int = DEFAULT_LAMBDA_STEPS,
                       max_points: int = MAX_LAMBDA_POINTS):
    """Momentum-ladder evaluation of the tail-mode zero-momentum phase.

    Returns (eta_raw, samples); rounding to the shifted lattice happens in
    the verifier, which owns the modified relations.
    """
    _require_tail(p)
    cfg = config or DEFAULT_CONFIG
    ks = [10.0 ** (-2 - jj) / p.x0 for jj in range(4)]
    _, etas = _tail_sweep(p, parity, ks, 1.0, cfg, lambda_steps=lambda_steps,
                          max_points=max_points)
    values = [float(e[-1]) for e in etas]
    for a, b_ in zip(values, values[1:]):
        if abs(b_ - a) > 0.25 * math.pi:
            raise LimitUnresolvedError(
                f"limit unresolved: successive ladder values {a:.6f} and {b_:.6f} "
                "differ by more than pi/4"
            )
    return values[-1], tuple(zip(ks, values))
