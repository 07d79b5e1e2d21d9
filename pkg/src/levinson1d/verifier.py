"""Theorem assembly: counts vs zero-momentum phases, per parity.

For cutoff potentials the checked identities are

    eta_plus(0) + pi/2 = n_plus * pi      eta_minus(0) = n_minus * pi

in the non-critical case, and

    eta_plus(0) = n_plus * pi             eta_minus(0) - pi/2 = n_minus * pi

when a half-bound state is present.  Both bound-state counting routes
(matching and node counting) are computed and must agree; disagreement is
an internal numerical defect and raises instead of producing a report.

For inverse-square tails (b >= -1/4, effective order j, non-critical
cases only) the modified identities are

    eta_minus(0) - j*pi/2 = n_minus * pi
    eta_plus(0) + (1 - j)*pi/2 = n_plus * pi

with counts from zero-energy node analysis.  Declared slow-decay tails
and critical tails are refused outright.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import serialize
from .bound_states import (TOL_HALF, count_by_matching, count_by_nodes,
                           detect_half_bound, _require_cutoff)
from .engine import DEFAULT_CONFIG, EngineConfig, Parity, integrate_inner_batch
from .errors import (CriticalTailError, MethodDisagreementError, SlowDecayError,
                     SweepUnresolvedError)
from .phase_shifts import (DEFAULT_LAMBDA_STEPS, MAX_LAMBDA_POINTS, HALF_PI,
                           zero_momentum_limit)
from .potentials import Potential, to_document
from .tail import tail_phase_shift, tail_zero_energy, tail_zero_momentum

REPORT_SCHEMA = "levinson-report/1"


@dataclass(frozen=True)
class SweepEvent:
    lambda_star: float
    direction: str  # "down" or "up"


@dataclass(frozen=True)
class LambdaSweep:
    """Trajectory of the zero-energy boundary angle over the coupling.

    crossings lists the zero crossings of A(0, lam) with their directions;
    a terminal tangency (the angle reaching, but not crossing, a zero of A
    at lam = 1) is recorded separately as the half-bound event.
    """

    parity: Parity
    lambda_grid: tuple[float, ...]
    theta0: tuple[float, ...]
    crossings: tuple[SweepEvent, ...]
    terminal_half_bound: SweepEvent | None = None

    @property
    def net(self) -> int:
        down = sum(1 for e in self.crossings if e.direction == "down")
        up = sum(1 for e in self.crossings if e.direction == "up")
        return down - up


def _theta_batch(p, parity, lams, cfg):
    th, _, _, _, _ = integrate_inner_batch(p, parity, np.zeros(len(lams)), lams, cfg)
    return th


def sweep_lambda(p: Potential, parity: Parity, initial_grid_size: int = 129,
                 config: EngineConfig | None = None,
                 tol_lambda: float = 1e-6, tol_half: float = TOL_HALF,
                 max_points: int = MAX_LAMBDA_POINTS) -> LambdaSweep:
    """Sample theta(x0; E=0, lam) over lam in [0, 1] and classify the zero
    crossings of the boundary log-derivative.

    The grid refines until adjacent angle changes stay below pi/2, each
    crossing is then bisected to tol_lambda.  A departure of the even
    sector from its lam = 0 half-bound (angle exactly on a zero of A)
    counts as a crossing at lambda_star = 0 when it heads downward.
    """
    _require_cutoff(p)
    cfg = config or DEFAULT_CONFIG
    if initial_grid_size < 2:
        raise ValueError("initial_grid_size must be >= 2")

    lams = np.linspace(0.0, 1.0, initial_grid_size)
    theta = _theta_batch(p, parity, lams, cfg)
    for _ in range(40):
        jumps = np.abs(np.diff(theta))
        bad = np.nonzero(jumps >= HALF_PI * 0.98)[0]
        if len(bad) == 0:
            break
        if len(lams) + len(bad) > max_points:
            raise SweepUnresolvedError(
                f"sweep unresolved: more than {max_points} lambda samples required")
        mids = 0.5 * (lams[bad] + lams[bad + 1])
        th_mid = _theta_batch(p, parity, mids, cfg)
        order = np.argsort(np.concatenate([lams, mids]))
        lams = np.concatenate([lams, mids])[order]
        theta = np.concatenate([theta, th_mid])[order]
    else:
        raise SweepUnresolvedError("sweep unresolved: refinement did not converge")

    thresholds = [-m * math.pi for m in range(int(math.floor(-min(theta.min(), 0.0) / math.pi)) + 2)]

    events: list[SweepEvent] = []
    # departure from an exact zero of A at lam = 0 (the even free sector)
    on_threshold = min(abs(theta[0] - t) for t in thresholds)
    if on_threshold <= 1e-9:
        t0 = min(thresholds, key=lambda t: abs(theta[0] - t))
        moved = np.nonzero(np.abs(theta - theta[0]) > 10 * tol_half)[0]
        if len(moved) and theta[moved[0]] < t0:
            events.append(SweepEvent(0.0, "down"))

    # transversal crossings, bisected to tol_lambda
    brackets = []  # (lo, hi, th_lo, th_hi, target)
    for i in range(len(lams) - 1):
        a, b = theta[i], theta[i + 1]
        if a == b:
            continue
        for t in thresholds:
            if (a - t) * (b - t) < 0.0:
                brackets.append([lams[i], lams[i + 1], a, b, t])
    if brackets:
        lo = np.array([br[0] for br in brackets])
        hi = np.array([br[1] for br in brackets])
        th_lo = np.array([br[2] for br in brackets])
        targets = np.array([br[4] for br in brackets])
        while np.any((hi - lo) > tol_lambda):
            mid = 0.5 * (lo + hi)
            th_mid = _theta_batch(p, parity, mid, cfg)
            upper = (th_lo - targets) * (th_mid - targets) < 0.0
            hi = np.where(upper, mid, hi)
            lo = np.where(upper, lo, mid)
            th_lo = np.where(upper, th_lo, th_mid)
        for i, br in enumerate(brackets):
            direction = "down" if br[3] < br[2] else "up"
            events.append(SweepEvent(float(0.5 * (lo[i] + hi[i])), direction))
    events.sort(key=lambda e: e.lambda_star)

    # terminal tangency: theta(1) lands on a threshold without crossing it
    terminal = None
    t_near = min(thresholds, key=lambda t: abs(theta[-1] - t))
    if abs(theta[-1] - t_near) <= tol_half:
        approach = "down" if theta[-2] > theta[-1] else "up"
        terminal = SweepEvent(1.0, approach)
        events = [e for e in events
                  if not (abs(e.lambda_star - 1.0) <= 100 * tol_lambda)]

    return LambdaSweep(Parity(parity), tuple(float(v) for v in lams),
                       tuple(float(v) for v in theta), tuple(events), terminal)


@dataclass(frozen=True)
class ParityBlock:
    parity: Parity
    n: int
    energies: tuple[float, ...]
    eta0: float
    eta0_raw: float
    critical: bool
    multiple: int
    relation: str
    residual: float
    pre_rounding_residual: float
    verdict: str
    counts: dict = field(default_factory=dict)
    samples: tuple = ()


@dataclass(frozen=True)
class LevinsonReport:
    potential: Potential
    blocks: dict[str, ParityBlock]
    tail: dict | None
    configuration: dict

    @property
    def passed(self) -> bool:
        return all(b.verdict == "pass" for b in self.blocks.values())

    def to_document(self) -> dict:
        doc: dict = {
            "schema": REPORT_SCHEMA,
            "potential": to_document(self.potential),
            "parities": {},
        }
        for name, b in self.blocks.items():
            doc["parities"][name] = {
                "n": b.n,
                "energies": list(b.energies),
                "eta0": b.eta0,
                "eta0_raw": b.eta0_raw,
                "critical": b.critical,
                "multiple": b.multiple,
                "relation": b.relation,
                "residual": b.residual,
                "pre_rounding_residual": b.pre_rounding_residual,
                "verdict": b.verdict,
                "counts": dict(b.counts),
                "phase_samples": [[k, e] for k, e in b.samples],
            }
        if self.tail is not None:
            doc["tail"] = dict(self.tail)
        doc["configuration"] = dict(self.configuration)
        return doc

    def to_json(self) -> str:
        return serialize.dumps(self.to_document()) + "\n"


def _config_echo(cfg: EngineConfig, tol_half: float, lambda_steps: int, jobs: int) -> dict:
    return {
        "engine": {"n_steps": cfg.n_steps, "node_refine_tol": cfg.node_refine_tol},
        "tol_half": tol_half,
        "lambda_steps": lambda_steps,
        "max_lambda_points": MAX_LAMBDA_POINTS,
        "jobs": jobs,
    }


def _cutoff_block(p: Potential, parity: Parity, cfg: EngineConfig, tol_half: float,
                  lambda_steps: int) -> ParityBlock:
    by_match = count_by_matching(p, parity, 1.0, cfg, tol_half)
    by_nodes = count_by_nodes(p, parity, 1.0, cfg, tol_half)
    if by_match.count != by_nodes.count:
        raise MethodDisagreementError(
            f"internal consistency failure ({Parity(parity).value}): matching count "
            f"{by_match.count} != node count {by_nodes.count}"
        )
    n = by_match.count
    zml = zero_momentum_limit(p, parity, cfg, tol_half, lambda_steps)

    even = Parity(parity) is Parity.EVEN
    if even and not zml.critical:
        relation = "eta_plus(0) + pi/2 == n_plus * pi"
        expected = n * math.pi - HALF_PI
    elif even:
        relation = "eta_plus(0) == n_plus * pi (critical)"
        expected = n * math.pi
    elif zml.critical:
        relation = "eta_minus(0) - pi/2 == n_minus * pi (critical)"
        expected = n * math.pi + HALF_PI
    else:
        relation = "eta_minus(0) == n_minus * pi"
        expected = n * math.pi

    ok = zml.multiple == n
    residual = 0.0 if ok else abs(zml.eta_raw - expected)
    return ParityBlock(
        parity=Parity(parity), n=n, energies=by_match.energies,
        eta0=zml.eta0, eta0_raw=zml.eta_raw, critical=zml.critical,
        multiple=zml.multiple, relation=relation, residual=residual,
        pre_rounding_residual=abs(zml.eta_raw - zml.eta0),
        verdict="pass" if ok else "fail",
        counts={"matching": by_match.count, "node_count": by_nodes.count},
        samples=zml.samples,
    )


def _tail_block(p: Potential, parity: Parity, cfg: EngineConfig, tol_half: float,
                lambda_steps: int) -> ParityBlock:
    j = p.tail.j
    ze = tail_zero_energy(p, parity, cfg, tol_half)
    if ze.critical:
        raise CriticalTailError(
            f"critical tail case ({Parity(parity).value}): the zero-energy solution "
            "has no growing component; the modified relation covers non-critical "
            "cases only"
        )
    n = ze.count
    eta_raw, samples = tail_zero_momentum(p, parity, cfg, lambda_steps)

    if Parity(parity) is Parity.ODD:
        relation = "eta_minus(0) - j*pi/2 == n_minus * pi"
        offset = j * HALF_PI
    else:
        relation = "eta_plus(0) + (1 - j)*pi/2 == n_plus * pi"
        offset = -(1.0 - j) * HALF_PI
    multiple = int(round((eta_raw - offset) / math.pi))
    eta0 = multiple * math.pi + offset
    expected = n * math.pi + offset
    ok = multiple == n
    residual = 0.0 if ok else abs(eta_raw - expected)
    return ParityBlock(
        parity=Parity(parity), n=n, energies=(),
        eta0=eta0, eta0_raw=eta_raw, critical=False,
        multiple=multiple, relation=relation, residual=residual,
        pre_rounding_residual=abs(eta_raw - eta0),
        verdict="pass" if ok else "fail",
        counts={"node_count": n},
        samples=samples,
    )


def verify(p: Potential, config: EngineConfig | None = None,
           tol_half: float = TOL_HALF,
           lambda_steps: int = DEFAULT_LAMBDA_STEPS,
           parities=(Parity.EVEN, Parity.ODD),
           jobs: int = 1) -> LevinsonReport:
    """Full theorem check for one potential.

    Refuses declared slow-decay tails and critical inverse-square tails;
    raises on internal method disagreement.  Per-parity work may fan out
    over threads (the result assembly is deterministic either way).
    """
    cfg = config or DEFAULT_CONFIG
    kind = p.tail.kind
    if kind == "rejected_slow_decay":
        raise SlowDecayError(
            "refused: the tail was declared to decay slower than x^-2, for which "
            "the bound-state/phase-shift relation is violated"
        )
    parities = [Parity(q) for q in parities]
    worker = _tail_block if kind == "inverse_square" else _cutoff_block

    if jobs > 1 and len(parities) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {q: pool.submit(worker, p, q, cfg, tol_half, lambda_steps)
                       for q in parities}
            blocks = {q.value: futures[q].result() for q in parities}
    else:
        blocks = {q.value: worker(p, q, cfg, tol_half, lambda_steps) for q in parities}

    tail_doc = None
    if kind == "inverse_square":
        tail_doc = {"j": p.tail.j, "b": p.tail.b, "modified": True}
    return LevinsonReport(p, blocks, tail_doc,
                          _config_echo(cfg, tol_half, lambda_steps, jobs))
