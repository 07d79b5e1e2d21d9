"""Bound-state counting per parity for cutoff potentials.

Two independent routes are provided and must agree:

* matching: roots of the angle-form matching defect over E < 0, found by
  bracketing on an energy grid and safeguarded Newton/bisection.  The
  inner angle decreases strictly with E while the outer angle increases,
  so each root is simple and bracketed exactly once.
* node counting: the node count of the zero-energy solution, including
  the single node the linear continuation beyond x0 contributes when the
  boundary log-derivative is negative.

A zero-energy solution that just matches (boundary log-derivative zero)
is a half-bound state: finite, constant beyond x0, not square integrable,
and never counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import (DEFAULT_CONFIG, EngineConfig, Parity, integrate_inner,
                     integrate_inner_batch)
from .errors import DomainError, LevinsonError, TailModeError
from .potentials import Potential, max_abs

#: Half-bound detection width in the angle metric (dimensionless).
TOL_HALF = 1e-6


@dataclass(frozen=True)
class BoundStateResult:
    parity: Parity
    count: int
    energies: tuple[float, ...]
    half_bound: bool
    method: str  # "matching" or "node_count"


def _require_cutoff(p: Potential) -> None:
    if p.tail.kind != "cutoff":
        raise TailModeError(
            f"tail mode required: this operation handles cutoff potentials only "
            f"(got tail {p.tail.kind!r})"
        )


def matching_defect(p: Potential, parity: Parity, E: float, lam: float = 1.0,
                    config: EngineConfig | None = None) -> float:
    """Angle difference theta_inner - theta_outer, reduced to (-pi, pi].

    theta_outer = atan2(-kappa, 1).  A root with E < 0 is a bound state;
    the angle form stays bounded and continuous through nodes where the
    raw log-derivative difference would blow up.
    """
    E = float(E)
    if E > 0.0:
        raise DomainError(f"matching defect is defined for E <= 0, got E = {E}")
    state = integrate_inner(p, parity, E, lam, config).boundary
    theta_out = -math.atan(math.sqrt(-E))
    d = state.theta - theta_out
    d -= 2.0 * math.pi * math.floor((d + math.pi) / (2.0 * math.pi))
    return d


def _defect_batch(p: Potential, parity: Parity, E: np.ndarray, lam: float,
                  cfg: EngineConfig):
    """Continuous defect delta(E) = theta_cont(E) + atan(kappa) and its
    E-derivative.  delta is strictly decreasing on E <= 0."""
    th, _, psi, dpsi, quad = integrate_inner_batch(p, parity, E, np.full_like(E, lam), cfg)
    kappa = np.sqrt(-E)
    delta = th + np.arctan(kappa)
    # d(theta_in)/dE = -S/(psi^2+psi'^2) with S = quad * psi^2 (scale free)
    with np.errstate(invalid="ignore", divide="ignore"):
        dth_in = -(quad * psi * psi) / (psi * psi + dpsi * dpsi)
        dth_out = 1.0 / (2.0 * kappa * (1.0 + kappa * kappa))
    ddelta = dth_in - dth_out
    return delta, ddelta


def detect_half_bound(p: Potential, parity: Parity, config: EngineConfig | None = None,
                      tol_half: float = TOL_HALF) -> bool:
    """True iff the zero-energy boundary angle at full coupling is within
    tol_half of zero, i.e. the zero-energy solution continues as a finite
    constant beyond x0 (half-bound / critical case).

    Half-boundedness is a codimension-one condition; exact hits occur only
    for designed potentials, so the tolerance is mandatory and every report
    echoes it.
    """
    _require_cutoff(p)
    state = integrate_inner(p, parity, 0.0, 1.0, config).boundary
    return abs(state.theta) <= tol_half


def _zero_energy_theta(p: Potential, parity: Parity, lam: float, cfg: EngineConfig) -> float:
    th, _, _, _, _ = integrate_inner_batch(p, parity, [0.0], [lam], cfg)
    return float(th[0])


def _count_from_theta(theta_cont: float, tol_half: float) -> int:
    """Number of matching roots below threshold: #{m >= 0 : theta < -m*pi},
    with a tol_half guard so a half-bound tangency is not counted."""
    return max(0, math.ceil((-theta_cont - tol_half) / math.pi))


def count_by_nodes(p: Potential, parity: Parity, lam: float = 1.0,
                   config: EngineConfig | None = None,
                   tol_half: float = TOL_HALF) -> BoundStateResult:
    """Bound-state count from the zero-energy solution's nodes.

    The zero-energy solution is integrated exactly at E = 0; its
    continuation beyond x0 is linear and contributes one further node
    exactly when the boundary log-derivative is negative.  Both pieces are
    read off the continuous boundary angle in one formula.
    """
    _require_cutoff(p)
    cfg = config or DEFAULT_CONFIG
    theta = _zero_energy_theta(p, parity, lam, cfg)
    count = _count_from_theta(theta, tol_half)
    reduced = theta - math.pi * math.ceil((theta - 0.5 * math.pi) / math.pi)
    half = abs(reduced) <= tol_half
    return BoundStateResult(Parity(parity), count, (), half, "node_count")


def _lambda_max_abs(p: Potential, lam: float) -> float:
    return abs(lam) * max_abs(p)


def count_by_matching(p: Potential, parity: Parity, lam: float = 1.0,
                      config: EngineConfig | None = None,
                      tol_half: float = TOL_HALF) -> BoundStateResult:
    """Bound states from roots of the matching defect on (E_min, 0).

    E_min sits below -max|lam*V| so the inner solution is nodeless there;
    the continuous defect then decreases strictly from just under pi to
    its zero-energy value, crossing each -m*pi target exactly once.
    """
    _require_cutoff(p)
    cfg = config or DEFAULT_CONFIG
    x0 = p.x0

    E_min = -(_lambda_max_abs(p, lam) + (math.pi / x0) ** 2)
    for _ in range(4):
        if integrate_inner(p, parity, E_min, lam, cfg).node_count == 0:
            break
        E_min *= 4.0
    else:
        raise LevinsonError("could not find a nodeless lower energy bound")

    sol0 = integrate_inner(p, parity, 0.0, lam, cfg)
    theta0 = sol0.boundary.theta_continuous
    half = abs(sol0.boundary.theta) <= tol_half

    targets = []
    m = 0
    while -(m * math.pi) - theta0 > tol_half:
        targets.append(-m * math.pi)
        m += 1
    count = len(targets)
    if count == 0:
        return BoundStateResult(Parity(parity), 0, (), half, "matching")

    # bracket each target on an energy grid sized by the winding change
    n_pts = max(33, 8 * (sol0.node_count + 1) + 1)
    grid = np.linspace(E_min, 0.0, n_pts)
    delta, _ = _defect_batch(p, parity, grid, lam, cfg)

    lo = np.empty(count)
    hi = np.empty(count)
    for idx, t in enumerate(targets):
        above = np.nonzero(delta >= t)[0]
        if len(above) == 0 or above[-1] == n_pts - 1:
            raise LevinsonError("energy grid failed to bracket a matching root")
        lo[idx] = grid[above[-1]]
        hi[idx] = grid[above[-1] + 1]

    t_arr = np.array(targets)
    x = 0.5 * (lo + hi)
    tol_E = 1e-11 * max(1.0, -E_min)
    for _ in range(60):
        d, dd = _defect_batch(p, parity, x, lam, cfg)
        g = d - t_arr
        move_lo = g > 0.0
        lo = np.where(move_lo, x, lo)
        hi = np.where(move_lo, hi, x)
        if np.all((hi - lo) < tol_E) or np.all(np.abs(g) < 1e-12):
            break
        with np.errstate(invalid="ignore", divide="ignore"):
            newton = x - g / dd
        inside = np.isfinite(newton) & (newton > lo) & (newton < hi)
        x = np.where(inside, newton, 0.5 * (lo + hi))

    energies = tuple(sorted(float(v) for v in x))
    return BoundStateResult(Parity(parity), count, energies, half, "matching")
