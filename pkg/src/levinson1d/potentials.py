"""Symmetric one-dimensional potentials with a sharp cutoff or an inverse-square tail.

All potentials are defined on x >= 0 (mirror symmetry V(-x) = V(x) is by
construction) in units hbar = 1, 2m = 1.  A cutoff potential vanishes
identically for x >= x0.  A tail potential equals b*x**-2 for x >= x0.
The coupling family V(x, lam) = lam * V(x) interpolates between the free
particle (lam = 0) and the full potential (lam = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfiniteSpectrumError, ParameterError
from . import serialize

#: Gaussian wells are truncated where they fall below 1e-14 of their depth.
GAUSSIAN_SUPPORT_SIGMAS = math.sqrt(14.0 * math.log(10.0))

FAMILIES = (
    "square_well",
    "gaussian_well",
    "square_barrier",
    "double_well",
    "tabulated",
    "inverse_square_tail",
)


@dataclass(frozen=True)
class TailClass:
    """Large-x classification: cutoff, inverse_square (with strength b and
    the effective order j solving j*(j+1) = b), or a declared slow decay."""

    kind: str
    b: float = 0.0
    j: float = 0.0


CUTOFF = TailClass("cutoff")
SLOW_DECAY = TailClass("rejected_slow_decay")


def inverse_square_tail_class(b: float) -> TailClass:
    """Tail class for V = b*x**-2 beyond the cutoff radius.

    Requires b >= -1/4; below that the spectrum is infinite and the
    descriptor is rejected.
    """
    b = float(b)
    if not math.isfinite(b):
        raise ParameterError("tail strength b must be finite")
    if b < -0.25:
        raise InfiniteSpectrumError(
            f"infinite spectrum: inverse-square tail with b = {b} < -1/4 "
            "supports infinitely many bound states"
        )
    j = -0.5 + math.sqrt(b + 0.25)
    return TailClass("inverse_square", b=b, j=j)


@dataclass(frozen=True)
class Potential:
    """Immutable symmetric potential descriptor.

    params is a tuple of (name, value) pairs so the descriptor is hashable;
    use .param(name) for access.  Construct through the make_* helpers,
    which validate the family-specific constraints.
    """

    family: str
    params: tuple[tuple[str, float], ...]
    x0: float
    tail: TailClass

    def param(self, name: str) -> float:
        for key, value in self.params:
            if key == name:
                return value
        raise KeyError(name)

    def param_dict(self) -> dict[str, float]:
        return dict(self.params)


def _check_finite(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not math.isfinite(value):
            raise ParameterError(f"parameter {name} must be finite, got {value!r}")


def make_square_well(V0: float, a: float, x0: float) -> Potential:
    """Square well V(x) = -V0 for 0 <= x <= a, 0 beyond.

    V0 may carry either sign (a negative V0 is a barrier); a > 0 and
    x0 >= a so the support lies inside the cutoff radius.
    """
    V0, a, x0 = float(V0), float(a), float(x0)
    _check_finite(V0=V0, a=a, x0=x0)
    if a <= 0.0:
        raise ParameterError(f"half-width a must be positive, got {a}")
    if x0 < a:
        raise ParameterError(f"cutoff x0 = {x0} must not be smaller than the support radius a = {a}")
    return Potential("square_well", (("V0", V0), ("a", a)), x0, CUTOFF)


def make_free_particle(x0: float = 1.0) -> Potential:
    """V identically zero (a zero-depth well)."""
    return make_square_well(0.0, x0, x0)


def make_gaussian_well(V0: float, a: float, x0: float) -> Potential:
    """Gaussian well -V0*exp(-(x/a)**2), truncated to exactly zero where it
    falls below 1e-14 of its depth.  Requires x0 at or beyond that radius."""
    V0, a, x0 = float(V0), float(a), float(x0)
    _check_finite(V0=V0, a=a, x0=x0)
    if a <= 0.0:
        raise ParameterError(f"width a must be positive, got {a}")
    support = a * GAUSSIAN_SUPPORT_SIGMAS
    if x0 < support:
        raise ParameterError(
            f"cutoff x0 = {x0} is below the truncation radius {support:.6g} "
            "where the Gaussian falls to 1e-14 of its depth"
        )
    return Potential("gaussian_well", (("V0", V0), ("a", a)), x0, CUTOFF)


def make_square_barrier(height: float, a: float, x0: float) -> Potential:
    """Repulsive step V(x) = +height for 0 <= x <= a, 0 beyond."""
    height, a, x0 = float(height), float(a), float(x0)
    _check_finite(height=height, a=a, x0=x0)
    if a <= 0.0:
        raise ParameterError(f"half-width a must be positive, got {a}")
    if x0 < a:
        raise ParameterError(f"cutoff x0 = {x0} must not be smaller than the support radius a = {a}")
    return Potential("square_barrier", (("height", height), ("a", a)), x0, CUTOFF)


def make_double_well(V0: float, c: float, w: float, x0: float) -> Potential:
    """Symmetric double well: -V0 on [c, c+w] (mirrored to [-c-w, -c]), zero
    elsewhere.  c > 0 keeps the wells away from the origin."""
    V0, c, w, x0 = float(V0), float(c), float(w), float(x0)
    _check_finite(V0=V0, c=c, w=w, x0=x0)
    if c <= 0.0 or w <= 0.0:
        raise ParameterError("double well needs c > 0 and w > 0")
    if x0 < c + w:
        raise ParameterError(f"cutoff x0 = {x0} must not be smaller than the outer edge c + w = {c + w}")
    return Potential("double_well", (("V0", V0), ("c", c), ("w", w)), x0, CUTOFF)


def make_tabulated(values, x0: float) -> Potential:
    """Potential sampled on a uniform grid spanning [0, x0] inclusive,
    linearly interpolated, identically zero beyond x0."""
    x0 = float(x0)
    vals = [float(v) for v in values]
    if len(vals) < 2:
        raise ParameterError("tabulated potential needs at least two samples")
    _check_finite(x0=x0, **{f"y{i}": v for i, v in enumerate(vals)})
    if x0 <= 0.0:
        raise ParameterError(f"cutoff x0 must be positive, got {x0}")
    params = tuple((f"y{i}", v) for i, v in enumerate(vals))
    return Potential("tabulated", params, x0, CUTOFF)


def make_inverse_square_tail(b: float, x0: float, V0: float = 0.0, a: float | None = None) -> Potential:
    """Inner square well (-V0 on [0, a]) joined to the tail b*x**-2 for x >= x0.

    a defaults to x0.  b < -1/4 is rejected at construction (infinite
    spectrum).
    """
    x0 = float(x0)
    if x0 <= 0.0:
        raise ParameterError(f"cutoff x0 must be positive, got {x0}")
    a = x0 if a is None else float(a)
    V0 = float(V0)
    _check_finite(V0=V0, a=a, x0=x0)
    if a <= 0.0 or a > x0:
        raise ParameterError(f"inner half-width a must lie in (0, x0], got {a}")
    tail = inverse_square_tail_class(b)
    return Potential("inverse_square_tail", (("b", tail.b), ("V0", V0), ("a", a)), x0, tail)


def declare_slow_decay(p: Potential) -> Potential:
    """Mark a descriptor as having a tail that decays slower than x**-2.

    Slow decay is a declaration, not something the toolkit detects;
    downstream verification refuses such potentials.
    """
    return Potential(p.family, p.params, p.x0, SLOW_DECAY)


def _family_body(p: Potential, xs: np.ndarray) -> np.ndarray:
    fam = p.family
    if fam == "square_well":
        return np.where(xs <= p.param("a"), -p.param("V0"), 0.0)
    if fam == "square_barrier":
        return np.where(xs <= p.param("a"), p.param("height"), 0.0)
    if fam == "gaussian_well":
        a = p.param("a")
        support = a * GAUSSIAN_SUPPORT_SIGMAS
        with np.errstate(under="ignore"):
            body = -p.param("V0") * np.exp(-((xs / a) ** 2))
        return np.where(xs < support, body, 0.0)
    if fam == "double_well":
        c, w = p.param("c"), p.param("w")
        inside = (xs >= c) & (xs <= c + w)
        return np.where(inside, -p.param("V0"), 0.0)
    if fam == "tabulated":
        vals = np.array([v for _, v in p.params], dtype=float)
        grid = np.linspace(0.0, p.x0, len(vals))
        return np.interp(xs, grid, vals)
    if fam == "inverse_square_tail":
        return np.where(xs <= p.param("a"), -p.param("V0"), 0.0)
    raise ParameterError(f"unknown family {fam!r}")


def base_values(p: Potential, xs: np.ndarray) -> np.ndarray:
    """V(x) at full coupling (lam = 1) for an array of x >= 0.

    The tail clause governs at and beyond x0: cutoff potentials are
    exactly zero there and inverse-square tails equal b*x**-2 there,
    whatever the inner family would give at the boundary point itself.
    """
    xs = np.asarray(xs, dtype=float)
    if p.tail.kind == "inverse_square":
        safe = np.where(xs >= p.x0, xs, p.x0)
        tail_vals = p.tail.b / (safe * safe)
    else:
        tail_vals = np.zeros_like(xs)
    return np.where(xs >= p.x0, tail_vals, _family_body(p, xs))


def inner_values(p: Potential, xs: np.ndarray) -> np.ndarray:
    """Inner-region samples for integration on [0, x0]: the value at x0 is
    the left limit, since the inner equation lives on [0, x0)."""
    xs = np.asarray(xs, dtype=float)
    left = np.where(xs >= p.x0, p.x0 * (1.0 - 2.0 ** -40), xs)
    return _family_body(p, left)


def evaluate(p: Potential, x: float, lam: float = 1.0) -> float:
    """V(x, lam) = lam * V(x).

    Defined for x >= 0 and 0 <= lam <= 1 only.  For cutoff tails the value
    is exactly zero for every x >= x0.
    """
    x = float(x)
    lam = float(lam)
    if x < 0.0:
        raise DomainError(f"potential is defined for x >= 0 only, got x = {x}")
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"coupling lam must lie in [0, 1], got {lam}")
    return lam * float(base_values(p, np.array([x]))[0])


def classify_tail(p: Potential) -> TailClass:
    """Tail classification of a well-formed descriptor.

    Total on representable descriptors: cutoff families map to cutoff,
    inverse-square tails carry their (b, j), and declared slow decay is
    passed through for downstream refusal.  Descriptors with b < -1/4 are
    unrepresentable (construction already failed).
    """
    return p.tail


def max_abs(p: Potential) -> float:
    """Bound on |V| over [0, x0] at full coupling."""
    fam = p.family
    if fam in ("square_well", "gaussian_well", "double_well"):
        return abs(p.param("V0"))
    if fam == "square_barrier":
        return abs(p.param("height"))
    if fam == "tabulated":
        return max(abs(v) for _, v in p.params)
    if fam == "inverse_square_tail":
        return abs(p.param("V0"))
    raise ParameterError(f"unknown family {fam!r}")


def to_document(p: Potential) -> dict:
    doc: dict = {
        "family": p.family,
        "params": {name: value for name, value in p.params},
        "x0": p.x0,
    }
    tail: dict = {"kind": p.tail.kind}
    if p.tail.kind == "inverse_square":
        tail["b"] = p.tail.b
        tail["j"] = p.tail.j
    doc["tail"] = tail
    return doc


def to_json(p: Potential) -> str:
    return serialize.dumps(to_document(p)) + "\n"


def from_document(doc: dict) -> Potential:
    try:
        family = doc["family"]
        params = {str(k): float(v) for k, v in doc["params"].items()}
        x0 = float(doc["x0"])
        tail_kind = doc["tail"]["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed potential document: {exc}") from exc

    if family == "square_well":
        p = make_square_well(params["V0"], params["a"], x0)
    elif family == "gaussian_well":
        p = make_gaussian_well(params["V0"], params["a"], x0)
    elif family == "square_barrier":
        p = make_square_barrier(params["height"], params["a"], x0)
    elif family == "double_well":
        p = make_double_well(params["V0"], params["c"], params["w"], x0)
    elif family == "tabulated":
        vals = [params[f"y{i}"] for i in range(len(params))]
        p = make_tabulated(vals, x0)
    elif family == "inverse_square_tail":
        p = make_inverse_square_tail(params["b"], x0, params.get("V0", 0.0), params.get("a"))
    else:
        raise ParameterError(f"unknown family {family!r}")

    if tail_kind == "rejected_slow_decay":
        p = declare_slow_decay(p)
    elif tail_kind != p.tail.kind:
        raise ParameterError(f"tail kind {tail_kind!r} inconsistent with family {family!r}")
    return p


def from_json(text: str) -> Potential:
    return from_document(serialize.loads(text))
