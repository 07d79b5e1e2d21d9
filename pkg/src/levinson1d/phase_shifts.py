"""Scattering phase shifts under the coupling-continuity convention.

The phase at coupling lam is pinned by eta(k, 0) = 0 and continued along a
lam grid, choosing at every step the tangent branch nearest the previous
value.  The grid refines adaptively until adjacent samples differ by less
than pi/2, the largest step at which the branch order is still decidable.
The matching itself is done in angle form, beta = atan2(k*psi, psi'), so
poles of the tangent are ordinary points of the phase.

Zero-momentum limits are evaluated on a descending momentum ladder and
rounded to the lattice the limit is known to lie on: multiples of pi for
the odd sector (shifted by pi/2 in the even sector), moved by pi/2 in the
critical (half-bound) case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bound_states import TOL_HALF, detect_half_bound, _require_cutoff
from .engine import (DEFAULT_CONFIG, BoundaryState, EngineConfig, Parity,
                     integrate_inner, integrate_inner_batch)
from .errors import BranchTrackingError, DomainError, LimitUnresolvedError, NodeAtBoundaryError
from .potentials import Potential

HALF_PI = 0.5 * math.pi

#: Hard ceiling on lambda samples per momentum during branch tracking.
MAX_LAMBDA_POINTS = 2 ** 14
#: Initial lambda grid size for phase continuation.
DEFAULT_LAMBDA_STEPS = 33


@dataclass(frozen=True)
class SmallKExpansion:
    """Leading behavior A(E) ~ A0 - c2*k**2 of the boundary log-derivative.

    c2 equals the zero-energy quadrature integral and is never negative.
    """

    A0: float
    c2: float


@dataclass(frozen=True)
class ZeroMomentumLimit:
    parity: Parity
    eta0: float
    critical: bool
    multiple: int
    eta_raw: float
    samples: tuple[tuple[float, float], ...] = ()


@dataclass(frozen=True)
class PhaseShiftCurve:
    parity: Parity
    lam: float
    k_grid: tuple[float, ...]
    eta: tuple[float, ...]
    convention_tag: str = "eta(k,0)=0, continuous in lambda"


def wrap_half(x: float) -> float:
    """Representative of x (mod pi) in (-pi/2, pi/2]."""
    y = x - math.pi * math.floor((x + HALF_PI) / math.pi)
    if y <= -HALF_PI:  # guard the open endpoint against rounding
        y += math.pi
    return y


def tan_eta_odd(k: float, state: BoundaryState, x0: float) -> float:
    """tan of the odd-parity phase from the boundary state at x0.

    Evaluated in the angle representation, so a node at x0 (infinite
    log-derivative) is handled exactly and yields -tan(k*x0).  Returns
    math.inf as an explicit marker when the phase sits at an odd multiple
    of pi/2 (the denominator zero of the tangent form).
    """
    if not k > 0.0:
        raise DomainError(f"momentum k must be positive, got {k}")
    beta = math.atan2(k * math.cos(state.theta), math.sin(state.theta))
    phi = wrap_half(beta - k * x0)
    if HALF_PI - abs(phi) <= 1e-12:
        return math.inf
    return math.tan(phi)


def _raw_phase_batch(p: Potential, parity: Parity, k: np.ndarray, lam: np.ndarray,
                     cfg: EngineConfig) -> np.ndarray:
    """Raw matching angle phi = beta - k*x0 (- pi/2 for even parity) with
    beta = atan2(k*psi, psi').

    The boundary pair (psi, psi') never vanishes, so beta is continuous in
    lam modulo 2*pi; the unwrapped phase differs from the unwrapped beta by
    a constant.  Tracking the full angle rather than its mod-pi class is
    what makes a fast pi-swing (a bound state entering at small k)
    detectable between grid points instead of aliasing away.
    """
    E = k * k
    _, _, psi, dpsi, _ = integrate_inner_batch(p, parity, E, lam, cfg)
    beta = np.arctan2(k * psi, dpsi)
    m = beta - k * p.x0
    if Parity(parity) is Parity.EVEN:
        m = m - HALF_PI
    return m


def _wrap_diffs(phi: np.ndarray) -> np.ndarray:
    """Differences of raw angles wrapped to (-pi, pi]."""
    d = np.diff(phi)
    return d - 2.0 * math.pi * np.round(d / (2.0 * math.pi))


def _unwrap_curve(phi: np.ndarray) -> np.ndarray:
    """Continuously unwrapped phase pinned at the free end.

    The lam = 0 value is the representative nearest zero; a cutoff
    potential matches the free solution identically there and is recorded
    as exactly zero.
    """
    eta = np.empty(len(phi))
    start = wrap_half(float(phi[0]))
    eta[0] = 0.0 if abs(start) < 1e-6 else start
    eta[1:] = eta[0] + np.cumsum(_wrap_diffs(phi))
    return eta


#: Intervals narrower than this fraction of the sweep span are not split
#: further: below it the evaluated angle is dominated by integration noise,
#: while the wrapped step across the whole interval is still correct for an
#: isolated pole crossing (the only structure that narrow).
REFINE_FLOOR = 1e-9


def _continue_curves(ks, grids, phis, eval_pairs, max_points):
    """Adaptive continuation over per-k lambda grids.

    grids/phis are per-k arrays of sample positions and raw matching
    angles; eval_pairs(k_arr, lam_arr) supplies angles for refinement
    points.  Intervals whose wrapped angle step reaches pi/2 are split
    until every step is below it (the largest step at which the wrap of
    the difference is still trustworthy).  An interval at the refinement
    floor is accepted as a single pole crossing; only a degenerate double
    crossing inside one floor-width interval could defeat the wrap, and
    crossings are isolated zeros of an analytic function.
    """
    trigger = HALF_PI * 0.98
    for _round in range(80):
        need_k: list[float] = []
        need_lam: list[float] = []
        need_ki: list[int] = []
        etas = []
        for ki, k in enumerate(ks):
            eta = _unwrap_curve(phis[ki])
            etas.append(eta)
            lams = grids[ki]
            floor = REFINE_FLOOR * max(lams[-1] - lams[0], 1e-300)
            for i in np.nonzero(np.abs(np.diff(eta)) >= trigger)[0]:
                if lams[i + 1] - lams[i] <= floor:
                    continue
                mid = 0.5 * (lams[i] + lams[i + 1])
                if mid <= lams[i] or mid >= lams[i + 1]:
                    continue
                need_k.append(k)
                need_lam.append(mid)
                need_ki.append(ki)
        if not need_k:
            return etas
        for ki in set(need_ki):
            extra = need_ki.count(ki)
            if len(grids[ki]) + extra > max_points:
                raise BranchTrackingError(
                    f"branch-tracking unresolved: more than {max_points} lambda "
                    "samples required"
                )
        new_phi = eval_pairs(np.array(need_k), np.array(need_lam))
        for value, lam_mid, ki in zip(new_phi, need_lam, need_ki):
            pos = np.searchsorted(grids[ki], lam_mid)
            grids[ki] = np.insert(grids[ki], pos, lam_mid)
            phis[ki] = np.insert(phis[ki], pos, value)
    raise BranchTrackingError("branch-tracking unresolved: refinement did not converge")


def _sweep_phase(p, parity, ks, lam_target, lambda_steps, cfg, max_points, eval_pairs=None):
    """Unwrapped eta(k, lam') curves from lam' = 0 to lam_target, per k."""
    if lambda_steps < 2:
        raise DomainError(f"lambda_steps must be >= 2, got {lambda_steps}")
    ks = [float(k) for k in ks]
    for k in ks:
        if not k > 0.0:
            raise DomainError(f"momentum k must be positive, got {k}")
    if not 0.0 <= lam_target <= 1.0:
        raise DomainError(f"coupling lam must lie in [0, 1], got {lam_target}")

    if eval_pairs is None:
        def eval_pairs(k_arr, lam_arr):
            return _raw_phase_batch(p, parity, k_arr, lam_arr, cfg)

    base = np.linspace(0.0, lam_target, lambda_steps)
    flat_k = np.repeat(ks, lambda_steps)
    flat_lam = np.tile(base, len(ks))
    flat_m = eval_pairs(flat_k, flat_lam)
    grids = [base.copy() for _ in ks]
    ms = [flat_m[i * lambda_steps:(i + 1) * lambda_steps].copy() for i in range(len(ks))]
    etas = _continue_curves(ks, grids, ms, eval_pairs, max_points)
    return grids, etas


def phase_lambda_curve(p: Potential, parity: Parity, k: float, lam: float = 1.0,
                       lambda_steps: int = DEFAULT_LAMBDA_STEPS,
                       config: EngineConfig | None = None,
                       max_points: int = MAX_LAMBDA_POINTS):
    """Full continuation record eta(k, lam') on the refined lam' grid."""
    _require_cutoff(p)
    cfg = config or DEFAULT_CONFIG
    grids, etas = _sweep_phase(p, parity, [k], lam, lambda_steps, cfg, max_points)
    return grids[0], etas[0]


def phase_shift(p: Potential, parity: Parity, k: float, lam: float = 1.0,
                lambda_steps: int = DEFAULT_LAMBDA_STEPS,
                config: EngineConfig | None = None,
                max_points: int = MAX_LAMBDA_POINTS) -> float:
    """eta(k, lam) under the continuity convention (endpoint of the sweep)."""
    _, eta = phase_lambda_curve(p, parity, k, lam, lambda_steps, config, max_points)
    return float(eta[-1])


def phase_curve(p: Potential, parity: Parity, k_grid, lam: float = 1.0,
                lambda_steps: int = DEFAULT_LAMBDA_STEPS,
                config: EngineConfig | None = None,
                max_points: int = MAX_LAMBDA_POINTS) -> PhaseShiftCurve:
    """eta over a strictly increasing positive momentum grid at fixed lam."""
    _require_cutoff(p)
    cfg = config or DEFAULT_CONFIG
    ks = [float(k) for k in k_grid]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise DomainError("k_grid must be strictly increasing")
    _, etas = _sweep_phase(p, parity, ks, lam, lambda_steps, cfg, max_points)
    return PhaseShiftCurve(Parity(parity), lam, tuple(ks), tuple(float(e[-1]) for e in etas))


def small_k_expansion(p: Potential, parity: Parity, lam: float = 1.0,
                      config: EngineConfig | None = None) -> SmallKExpansion:
    """A0 = A(0, lam) and the curvature coefficient c2 (the zero-energy
    quadrature integral)."""
    sol = integrate_inner(p, parity, 0.0, lam, config)
    if sol.boundary.is_node():
        raise NodeAtBoundaryError(
            "expansion undefined: zero-energy solution has a node at x0 "
            "(infinite log-derivative)"
        )
    return SmallKExpansion(A0=sol.boundary.A, c2=sol.quadrature_I)


def _momentum_ladder(p: Potential, parity: Parity, cfg: EngineConfig,
                     critical: bool, tol_half: float) -> list[float]:
    """k_j = 10**(-2-j)/x0, j = 0..3, extended downward for a near-critical
    A0 until the k**2 curvature term is dominated, so the non-critical
    lattice wins the crossover."""
    ks = [10.0 ** (-2 - j) / p.x0 for j in range(4)]
    if critical:
        return ks
    try:
        exp = small_k_expansion(p, parity, 1.0, cfg)
    except NodeAtBoundaryError:
        return ks
    a0 = abs(exp.A0)
    if a0 <= tol_half:
        return ks
    while len(ks) < 12 and ks[-1] ** 2 > a0 / (100.0 * exp.c2):
        ks.append(ks[-1] / 10.0)
    return ks


def _round_lattice(parity: Parity, critical: bool, eta_raw: float) -> tuple[int, float]:
    """Round to the proven lattice; return (integer multiple, eta0)."""
    if Parity(parity) is Parity.ODD:
        offset = HALF_PI if critical else 0.0
    else:
        offset = 0.0 if critical else -HALF_PI
    n = round((eta_raw - offset) / math.pi)
    return int(n), n * math.pi + offset


def zero_momentum_limit(p: Potential, parity: Parity,
                        config: EngineConfig | None = None,
                        tol_half: float = TOL_HALF,
                        lambda_steps: int = DEFAULT_LAMBDA_STEPS,
                        max_points: int = MAX_LAMBDA_POINTS) -> ZeroMomentumLimit:
    """Zero-momentum phase at full coupling, rounded to its lattice.

    The limit is evaluated on the descending momentum ladder; successive
    ladder values must agree within pi/4 (else the limit is unresolved),
    after which rounding is exact because the true limit lies on a lattice
    with spacing pi.
    """
    _require_cutoff(p)
    cfg = config or DEFAULT_CONFIG
    critical = detect_half_bound(p, parity, cfg, tol_half)
    ks = _momentum_ladder(p, parity, cfg, critical, tol_half)
    _, etas = _sweep_phase(p, parity, ks, 1.0, lambda_steps, cfg, max_points)
    values = [float(e[-1]) for e in etas]
    for a, b in zip(values, values[1:]):
        if abs(b - a) > 0.25 * math.pi:
            raise LimitUnresolvedError(
                f"limit unresolved: successive ladder values {a:.6f} and {b:.6f} "
                "differ by more than pi/4"
            )
    eta_raw = values[-1]
    n, eta0 = _round_lattice(parity, critical, eta_raw)
    return ZeroMomentumLimit(Parity(parity), eta0, critical, n, eta_raw,
                             tuple(zip(ks, values)))
