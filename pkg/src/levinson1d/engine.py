"""Fixed-step integration of the parity-projected problem on [0, x0].

The pair (psi, psi') is integrated by classical fourth-order Runge-Kutta
and tracked projectively: theta = atan2(psi', psi) is unwrapped
continuously along x, and (psi, psi') is renormalized every step by
max(|psi|, |psi'|).  A positive rescaling changes neither theta nor any
reported ratio, so the projective data is exact while overflow is
impossible.  Nodes of psi are passages of theta through pi/2 (mod pi),
always in the decreasing direction, so the winding count is exact by
construction.  The quadrature integral of psi**2 rides along as a third
component of the same Runge-Kutta system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import ConfigError, DomainError, NodeAtBoundaryError
from .potentials import Potential, inner_values

HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi


class Parity(str, Enum):
    """Parity sector of the symmetric problem restricted to x >= 0.

    even: psi'(0) = 0 with psi(0) = 1;  odd: psi(0) = 0 with psi'(0) = 1.
    The normalizations are arbitrary but fixed for determinism.
    """

    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class EngineConfig:
    """Integration controls.

    n_steps: number of x-steps on [0, x0], so h = x0/n_steps.
    node_refine_tol: relative tolerance for locating node positions.
    """

    n_steps: int = 4096
    node_refine_tol: float = 1e-12

    def __post_init__(self):
        if self.n_steps < 1:
            raise ConfigError("step-size configuration invalid: n_steps must be >= 1")
        if not self.node_refine_tol > 0.0:
            raise ConfigError("node_refine_tol must be positive")


DEFAULT_CONFIG = EngineConfig()


@dataclass(frozen=True)
class BoundaryState:
    """Projective boundary data at a point.

    theta is the representative of atan2(psi', psi) reduced to
    (-pi/2, pi/2]; winding counts the (signed) passages of the continuous
    angle through pi/2 (mod pi) from the origin to at_x.  All passages are
    downward, so winding <= 0 and |winding| is the node count.  The
    logarithmic derivative is tan(theta); theta = pi/2 encodes a node of
    psi at at_x, where the log-derivative passes through infinity without
    this being a singularity of the angle flow.
    """

    theta: float
    winding: int
    at_x: float

    @property
    def theta_continuous(self) -> float:
        return self.theta + self.winding * math.pi

    def is_node(self, tol: float = 1e-9) -> bool:
        return HALF_PI - abs(self.theta) <= tol or abs(self.theta + HALF_PI) <= tol

    @property
    def A(self) -> float:
        """Logarithmic derivative psi'/psi; +inf at a node."""
        if self.is_node():
            return math.inf
        return math.tan(self.theta)


@dataclass(frozen=True)
class InnerSolution:
    """Inner integration result at x0-: boundary state, node count on
    (0, x0], and quadrature_I = psi(x0)**-2 * integral_0^x0 psi**2 dx."""

    boundary: BoundaryState
    node_count: int
    quadrature_I: float


@lru_cache(maxsize=128)
def _half_grid(p: Potential, n: int) -> np.ndarray:
    """Potential samples on the half-step grid x_m = m*h/2, m = 0..2n."""
    xs = np.linspace(0.0, p.x0, 2 * n + 1)
    v = inner_values(p, xs)
    v.setflags(write=False)
    return v


def _as_array(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


def integrate_inner_batch(p: Potential, parity: Parity, E, lam, config: EngineConfig | None = None):
    """Vectorized inner integration over a batch of (E, lam) pairs.

    Returns (theta_cont, winding, psi, dpsi, quad_I) as equal-length
    arrays; psi and dpsi are the renormalized boundary pair (their ratio
    and signs are meaningful, their scale is not).  Elementwise results
    are bitwise identical for any batch decomposition.
    """
    cfg = config or DEFAULT_CONFIG
    E = _as_array(E)
    lam = _as_array(lam)
    E, lam = np.broadcast_arrays(E, lam)
    E = np.ascontiguousarray(E, dtype=float)
    lam = np.ascontiguousarray(lam, dtype=float)
    if not np.all(np.isfinite(E)):
        raise DomainError("energy must be finite")
    if not np.all(np.isfinite(lam)) or np.any(lam < 0.0) or np.any(lam > 1.0):
        raise DomainError("coupling lam must lie in [0, 1]")

    n = cfg.n_steps
    h = p.x0 / n
    V = _half_grid(p, n)
    shape = E.shape

    parity = Parity(parity)
    if parity is Parity.EVEN:
        psi = np.ones(shape)
        dpsi = np.zeros(shape)
        theta = np.zeros(shape)
    else:
        psi = np.zeros(shape)
        dpsi = np.ones(shape)
        theta = np.full(shape, HALF_PI)
    raw_prev = theta.copy()
    S = np.zeros(shape)

    half_h = 0.5 * h
    sixth = h / 6.0
    for i in range(n):
        w0 = lam * V[2 * i] - E
        wm = lam * V[2 * i + 1] - E
        w1 = lam * V[2 * i + 2] - E

        k1q = w0 * psi
        p2 = psi + half_h * dpsi
        q2 = dpsi + half_h * k1q
        k2q = wm * p2
        p3 = psi + half_h * q2
        q3 = dpsi + half_h * k2q
        k3q = wm * p3
        p4 = psi + h * q3
        q4 = dpsi + h * k3q
        k4q = w1 * p4

        S = S + sixth * (psi * psi + 2.0 * (p2 * p2 + p3 * p3) + p4 * p4)
        new_psi = psi + sixth * (dpsi + 2.0 * (q2 + q3) + q4)
        new_dpsi = dpsi + sixth * (k1q + 2.0 * (k2q + k3q) + k4q)

        raw = np.arctan2(new_dpsi, new_psi)
        d = raw - raw_prev
        d -= TWO_PI * np.round(d / TWO_PI)
        if np.any(np.abs(d) >= HALF_PI):
            raise ConfigError(
                "angle advanced by >= pi/2 in one step; increase n_steps for "
                "this potential/energy range"
            )
        theta = theta + d
        raw_prev = raw

        s = np.maximum(np.abs(new_psi), np.abs(new_dpsi))
        psi = new_psi / s
        dpsi = new_dpsi / s
        S = S / (s * s)

    winding = np.ceil((theta - HALF_PI) / math.pi).astype(np.int64)
    with np.errstate(divide="ignore"):
        quad = S / (psi * psi)
    return theta, winding, psi, dpsi, quad


def _solution_from_row(x0: float, theta_cont: float, winding: int, quad: float) -> InnerSolution:
    reduced = theta_cont - winding * math.pi
    state = BoundaryState(theta=float(reduced), winding=int(winding), at_x=x0)
    return InnerSolution(boundary=state, node_count=int(abs(winding)), quadrature_I=float(quad))


def integrate_inner(p: Potential, parity: Parity, E: float, lam: float = 1.0,
                    config: EngineConfig | None = None) -> InnerSolution:
    """Integrate the parity-projected equation on [0, x0] at one (E, lam).

    Returns the boundary state at x0-, the node count on (0, x0], and the
    quadrature integral.  Deterministic for a fixed configuration.
    """
    th, wind, _, _, quad = integrate_inner_batch(p, parity, [E], [lam], config)
    return _solution_from_row(p.x0, float(th[0]), int(wind[0]), float(quad[0]))


def inner_log_derivative(p: Potential, parity: Parity, E: float, lam: float = 1.0,
                         config: EngineConfig | None = None) -> BoundaryState:
    """Boundary state at x0- (projection of integrate_inner)."""
    return integrate_inner(p, parity, E, lam, config).boundary


def outer_log_derivative(E: float) -> float:
    """Log-derivative of the decaying outer solution at x0+ for E <= 0.

    exp(-kappa*x) gives -kappa; at E = 0 the outer solution is the
    constant, with log-derivative exactly 0 (treated by its own closed
    form rather than as a limit).
    """
    E = float(E)
    if E > 0.0:
        raise DomainError(
            f"outer log-derivative is defined for E <= 0 only (continuum for E = {E} > 0)"
        )
    return -math.sqrt(-E)


def dA_dE_quadrature(sol: InnerSolution) -> float:
    """Energy derivative of the inner log-derivative, from the quadrature.

    Equals -quadrature_I, which is always <= 0 (the monotonicity that
    makes the matching construction single-valued).  Undefined when the
    boundary sits on a node.
    """
    if sol.boundary.is_node():
        raise NodeAtBoundaryError("derivative undefined at node")
    return -sol.quadrature_I


def _integrate_recorded(p: Potential, parity: Parity, E: float, lam: float,
                        cfg: EngineConfig):
    """Scalar integration that records the renormalized trajectory."""
    n = cfg.n_steps
    h = p.x0 / n
    V = _half_grid(p, n)
    if Parity(parity) is Parity.EVEN:
        psi, dpsi = 1.0, 0.0
    else:
        psi, dpsi = 0.0, 1.0
    xs = np.linspace(0.0, p.x0, n + 1)
    ps = np.empty(n + 1)
    qs = np.empty(n + 1)
    ps[0], qs[0] = psi, dpsi
    half_h = 0.5 * h
    sixth = h / 6.0
    for i in range(n):
        w0 = lam * V[2 * i] - E
        wm = lam * V[2 * i + 1] - E
        w1 = lam * V[2 * i + 2] - E
        k1q = w0 * psi
        p2 = psi + half_h * dpsi
        q2 = dpsi + half_h * k1q
        k2q = wm * p2
        p3 = psi + half_h * q2
        q3 = dpsi + half_h * k2q
        k3q = wm * p3
        p4 = psi + h * q3
        q4 = dpsi + h * k3q
        k4q = w1 * p4
        psi = psi + sixth * (dpsi + 2.0 * (q2 + q3) + q4)
        dpsi = dpsi + sixth * (k1q + 2.0 * (k2q + k3q) + k4q)
        s = max(abs(psi), abs(dpsi))
        psi /= s
        dpsi /= s
        ps[i + 1], qs[i + 1] = psi, dpsi
    return xs, ps, qs


def node_positions(p: Potential, parity: Parity, E: float = 0.0, lam: float = 1.0,
                   config: EngineConfig | None = None) -> np.ndarray:
    """Positions of the nodes of psi in (0, x0].

    Sign changes of psi between grid points bracket each node; the
    bracketed root of the cubic Hermite interpolant is then bisected to
    node_refine_tol (relative to x0), so near-tangencies cannot be
    double counted.  Diagnostic companion to the winding count.
    """
    cfg = config or DEFAULT_CONFIG
    xs, ps, qs = _integrate_recorded(p, parity, E, lam, cfg)
    h = xs[1] - xs[0]
    out = []
    for i in range(len(xs) - 1):
        if i == 0 and Parity(parity) is Parity.ODD:
            continue  # the origin zero of the odd sector is not a node
        p0, p1 = ps[i], ps[i + 1]
        if p1 == 0.0:
            out.append(xs[i + 1])
            continue
        if p0 * p1 >= 0.0:
            continue
        m0, m1 = qs[i] * h, qs[i + 1] * h  # Hermite slopes in cell units

        def hermite(t):
            t2 = t * t
            t3 = t2 * t
            return ((2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0
                    + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1)

        lo, hi = 0.0, 1.0
        flo = p0
        while (hi - lo) * h > cfg.node_refine_tol * p.x0:
            mid = 0.5 * (lo + hi)
            fm = hermite(mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if (flo > 0) != (fm > 0):
                hi = mid
            else:
                lo, flo = mid, fm
        out.append(xs[i] + 0.5 * (lo + hi) * h)
    return np.array(out)
