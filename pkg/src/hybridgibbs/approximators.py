"""Rules that manufacture per-conditional approximating kernels.

Each rule builds, for a target conditional distribution pi on a coordinate
slice, a kernel reversible with respect to pi:

  Exact            one-shot independence kernel: Q(z, .) = pi(.)
  Lazy(eps)        eps * I + (1 - eps) * pi(.); operator norm eps
  MetropolisRW(r)  random walk proposing uniformly among the 2r neighbors
                   within index distance r, no wrap-around; out-of-range
                   proposals are rejected (the chain stays put), in-range
                   ones accepted with min(1, pi(x')/pi(x))
  MetropolisIndep  independence Metropolis-Hastings with a fixed proposal
  ExplicitMatrix   user-supplied matrices keyed by (coordinate, complement),
                   validated for reversibility against the conditional

An ApproximatorSpec bundles a default rule with per-coordinate overrides.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec
from .space import conditional
from .spectral import ProbVec, check_reversibility


@dataclass(frozen=True)
class Exact:
    def describe(self):
        return {"rule": "exact"}


@dataclass(frozen=True)
class Lazy:
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidSpec(f"lazy mixing weight must lie in [0, 1], got {self.epsilon}")

    def describe(self):
        return {"rule": "lazy", "epsilon": float(self.epsilon)}


@dataclass(frozen=True)
class MetropolisRW:
    radius: int = 1

    def __post_init__(self):
        if int(self.radius) < 1:
            raise InvalidSpec("random-walk radius must be at least 1")

    def describe(self):
        return {"rule": "metropolis_rw", "radius": int(self.radius)}


@dataclass(frozen=True, eq=False)
class MetropolisIndep:
    """Independence Metropolis-Hastings; proposal is "uniform" or a vector."""

    proposal: object = "uniform"

    def describe(self):
        if isinstance(self.proposal, str):
            return {"rule": "metropolis_indep", "proposal": self.proposal}
        return {"rule": "metropolis_indep", "proposal": list(np.asarray(self.proposal, float))}


@dataclass(frozen=True, eq=False)
class ExplicitMatrix:
    """Per-conditional kernel table keyed by (coordinate, complement tuple)."""

    tables: dict

    def describe(self):
        return {"rule": "explicit", "n_tables": len(self.tables)}


RULE_TYPES = (Exact, Lazy, MetropolisRW, MetropolisIndep, ExplicitMatrix)


@dataclass(frozen=True, eq=False)
class ApproximatorSpec:
    """Default rule plus per-coordinate overrides.

    On finite spaces the map from a configuration to its conditional's kernel
    is automatically measurable, so no regularity condition is needed beyond
    per-conditional reversibility, which ``make_approximator`` verifies.
    """

    default: object = field(default_factory=Exact)
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.default, RULE_TYPES):
            raise InvalidSpec(f"unknown approximator rule {self.default!r}")
        for c, rule in self.overrides.items():
            if not isinstance(rule, RULE_TYPES):
                raise InvalidSpec(f"unknown approximator rule {rule!r} for coordinate {c}")

    def rule_for(self, i):
        return self.overrides.get(i, self.default)

    def describe(self):
        return {
            "default": self.default.describe(),
            "overrides": {str(c): r.describe() for c, r in sorted(self.overrides.items())},
        }


EXACT_SPEC = ApproximatorSpec()


def kernel_for_target(target, rule, key=None):
    """Matrix of the rule's kernel for a target distribution on a slice."""
    pi = target.weights if isinstance(target, ProbVec) else np.asarray(target, float)
    d = pi.size
    if isinstance(rule, Exact):
        return np.tile(pi, (d, 1))
    if isinstance(rule, Lazy):
        eps = float(rule.epsilon)
        return eps * np.eye(d) + (1.0 - eps) * np.tile(pi, (d, 1))
    if isinstance(rule, MetropolisRW):
        return _metropolis_rw(pi, int(rule.radius))
    if isinstance(rule, MetropolisIndep):
        if isinstance(rule.proposal, str):
            if rule.proposal != "uniform":
                raise InvalidSpec(f"unknown proposal {rule.proposal!r}")
            q = np.full(d, 1.0 / d)
        else:
            q = ProbVec(np.asarray(rule.proposal, float)).weights
            if q.size != d:
                raise InvalidSpec("independence proposal has the wrong length")
        return _metropolis_indep(pi, q)
    if isinstance(rule, ExplicitMatrix):
        if key not in rule.tables:
            raise InvalidSpec(f"no explicit kernel supplied for {key}")
        m = np.asarray(rule.tables[key], dtype=float)
        if m.shape != (d, d):
            raise InvalidSpec(f"explicit kernel for {key} has shape {m.shape}, expected {(d, d)}")
        return m
    raise InvalidSpec(f"unknown approximator rule {rule!r}")


def _metropolis_rw(pi, radius):
    d = pi.size
    Q = np.zeros((d, d))
    prop = 1.0 / (2 * radius)
    for x in range(d):
        stay = 0.0
        for step in range(-radius, radius + 1):
            if step == 0:
                continue
            y = x + step
            if y < 0 or y >= d:
                stay += prop
                continue
            if pi[x] > 0.0:
                acc = min(1.0, pi[y] / pi[x])
            else:
                acc = 1.0 if pi[y] > 0.0 else 0.0
            Q[x, y] = prop * acc
            stay += prop * (1.0 - acc)
        Q[x, x] = stay
    return Q


def _metropolis_indep(pi, q):
    d = pi.size
    Q = np.zeros((d, d))
    for x in range(d):
        stay = 0.0
        for y in range(d):
            if y == x:
                continue
            num = pi[y] * q[x]
            den = pi[x] * q[y]
            if den > 0.0:
                acc = min(1.0, num / den)
            else:
                acc = 1.0 if num > 0.0 else 0.0
            Q[x, y] = q[y] * acc
            stay += q[y] * (1.0 - acc)
        Q[x, x] = q[x] + stay
    return Q


def make_approximator(joint, spec, i, y, tol=1e-10):
    """Approximating kernel for conditional ``i`` given ``y``, verified reversible.

    Exact rules produce the independence kernel (operator norm 0); whatever
    the rule, the result is paired with the conditional distribution via a
    detailed-balance check at tolerance ``tol``.
    """
    target = conditional(joint, i, y)
    rule = spec.rule_for(i)
    Q = kernel_for_target(target, rule, key=(i, tuple(int(v) for v in y)))
    return check_reversibility(Q, target, tol=tol)
