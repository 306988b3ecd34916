"""Chain simulation and cross-validation of the exact spectral quantities.

Random numbers come from numpy's Philox generator, a named, seedable,
counter-based generator with cheap stream splitting (``Generator.spawn`` /
``Philox.jumped``): identical (seed, kernel, start) triples reproduce
trajectories bit-exactly across runs and across the compiled/pure stepper
backends, since both consume the same pre-drawn uniform stream.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    CrossCheckFailure,
    DimensionMismatch,
    InvalidStart,
    NotAbsolutelyContinuous,
    TooFewBatches,
)
from .report import fingerprint_bytes, make_report
from .spectral import (
    NULL_MASS,
    ProbVec,
    as_values,
    asymptotic_variance,
    spectral_summary,
)

try:  # pragma: no cover - exercised indirectly via backend tests
    from . import _stepper as _stepper_impl

    COMPILED_STEPPER = True
except ImportError:  # pragma: no cover
    from . import _stepper_py as _stepper_impl

    COMPILED_STEPPER = False

from . import _stepper_py


def stepper_backend():
    """Name of the inner-loop implementation selected at import time."""
    return "compiled" if COMPILED_STEPPER else "pure-python"


def kernel_fingerprint(rev):
    return fingerprint_bytes(
        np.ascontiguousarray(rev.kernel.matrix).tobytes(),
        np.ascontiguousarray(rev.stationary.weights).tobytes(),
    )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A simulated path: state indices (start included), seed, kernel id."""

    states: np.ndarray
    seed: int
    fingerprint: str

    @property
    def steps(self):
        return self.states.size - 1


@dataclass(frozen=True)
class VarianceEstimate:
    estimate: float
    standard_error: float
    batch: int
    batches: int


def simulate(rev, start, steps, seed, backend=None):
    """Simulate ``steps`` transitions by per-row inverse-CDF sampling.

    ``start`` is a state index or a distribution (ProbVec / weight vector) to
    draw the initial state from; drawing consumes one uniform before the
    transition stream so the start choice never shifts later draws relative
    to an integer start.
    """
    steps = int(steps)
    if steps < 1:
        raise ValueError("steps must be a positive integer")
    n = rev.n
    rng = np.random.Generator(np.random.Philox(int(seed)))
    if isinstance(start, (int, np.integer)):
        s0 = int(start)
        if not 0 <= s0 < n:
            raise InvalidStart(f"start index {s0} out of range [0, {n})")
    else:
        if isinstance(start, ProbVec):
            w = start.weights
        else:
            try:
                w = ProbVec(np.asarray(start, dtype=float)).weights
            except Exception as exc:
                raise InvalidStart(f"bad start distribution: {exc}") from exc
        if w.size != n:
            raise InvalidStart(f"start distribution has length {w.size}, expected {n}")
        cdf = np.cumsum(w)
        u0 = rng.random()
        s0 = int(min(np.searchsorted(cdf, u0, side="right"), n - 1))
    uniforms = rng.random(steps)
    cumulative = np.ascontiguousarray(np.cumsum(rev.kernel.matrix, axis=1))
    impl = _resolve_backend(backend)
    states = impl.walk(cumulative, uniforms, s0)
    return Trajectory(states=states, seed=int(seed), fingerprint=kernel_fingerprint(rev))


def _resolve_backend(backend):
    if backend in (None, "auto"):
        return _stepper_impl
    if backend == "pure-python":
        return _stepper_py
    if backend == "compiled":
        if not COMPILED_STEPPER:
            raise RuntimeError("the compiled stepper is not available")
        return _stepper_impl
    raise ValueError(f"unknown stepper backend {backend!r}")


def batch_means_variance(traj, f, batch):
    """Batch-means estimate of the asymptotic variance of f along the path.

    Uses nonoverlapping batches of the post-start samples; the estimate is
    batch * sample variance of the batch means, its standard error the usual
    chi-square spread sqrt(2/(B-1)) times the estimate.
    """
    batch = int(batch)
    if batch < 1:
        raise ValueError("batch size must be positive")
    values = np.asarray(f, dtype=float)[traj.states[1:]]
    nb = values.size // batch
    if nb < 20:
        raise TooFewBatches(
            f"{values.size} samples give {nb} batches of {batch}; need at least 20"
        )
    used = values[: nb * batch]
    centered = used - used.mean()
    means = centered.reshape(nb, batch).mean(axis=1)
    est = batch * float(np.var(means, ddof=1))
    se = est * np.sqrt(2.0 / (nb - 1))
    return VarianceEstimate(estimate=est, standard_error=float(se), batch=batch, batches=nb)


def cross_validate_variance(rev, f, steps, seed, batch=None, backend=None, fingerprint=""):
    """Compare the batch-means estimate against the exact asymptotic variance.

    Passes when the two agree within three standard errors.  The start state
    is drawn from the stationary distribution.
    """
    v = as_values(f, rev.n)
    exact = asymptotic_variance(rev, v)
    if batch is None:
        batch = max(1, int(np.sqrt(int(steps))))
    traj = simulate(rev, rev.stationary, steps, seed, backend=backend)
    est = batch_means_variance(traj, v, batch)
    return make_report(
        "simulation-cross-validation",
        abs(est.estimate - exact),
        3.0 * est.standard_error,
        0.0,
        witness={
            "exact": float(exact),
            "estimate": est.estimate,
            "standard_error": est.standard_error,
            "batch": est.batch,
            "batches": est.batches,
            "steps": int(steps),
            "seed": int(seed),
        },
        fingerprint=fingerprint or kernel_fingerprint(rev),
    )


@dataclass(frozen=True, eq=False)
class MixingCurve:
    distances: np.ndarray  # distance at t = 0 .. tmax
    fitted_rate: float
    operator_norm: float

    def rows(self):
        return [(t, float(d)) for t, d in enumerate(self.distances)]


def mixing_curve(rev, mu0, tmax):
    """Exact stationary-L2 distances of mu0 K^t from the stationary law.

    Distances come from the density formula |d(mu K^t)/d(omega) - 1|; the
    decay rate is fitted on the tail of the log curve and verified not to
    exceed the operator norm.
    """
    tmax = int(tmax)
    if tmax < 1:
        raise ValueError("tmax must be a positive integer")
    w = rev.stationary.weights
    if isinstance(mu0, ProbVec):
        mu = mu0.weights.copy()
    else:
        mu = ProbVec(np.asarray(mu0, dtype=float)).weights.copy()
    if mu.size != rev.n:
        raise DimensionMismatch("initial distribution has the wrong length")
    bad = (mu > 0.0) & (w < NULL_MASS)
    if np.any(bad):
        raise NotAbsolutelyContinuous(
            f"initial mass on stationary-null states {np.flatnonzero(bad).tolist()}"
        )
    keep = w >= NULL_MASS
    K = rev.kernel.matrix
    dists = np.empty(tmax + 1)
    for t in range(tmax + 1):
        diff = mu[keep] - w[keep]
        dists[t] = np.sqrt(float(np.sum(diff * diff / w[keep])))
        if t < tmax:
            mu = mu @ K
    norm = spectral_summary(rev).operator_norm
    rate = _fit_tail_rate(dists)
    if rate > norm + 1e-6:
        raise CrossCheckFailure(
            f"fitted decay rate {rate:.9f} exceeds the operator norm {norm:.9f}"
        )
    return MixingCurve(distances=dists, fitted_rate=rate, operator_norm=norm)


def _fit_tail_rate(dists):
    # Distances below ~1e-7 of the start lose relative accuracy to the
    # accumulated rounding of the mu @ K recursion and would bias the slope.
    floor = max(1e-7 * dists[0], 1e-290)
    usable = [(t, d) for t, d in enumerate(dists) if t >= 1 and d > floor]
    if len(usable) < 2:
        return 0.0
    tail = usable[-10:]
    ts = np.array([t for t, _ in tail], dtype=float)
    logs = np.log([d for _, d in tail])
    slope = np.polyfit(ts, logs, 1)[0]
    return float(np.exp(slope))


def write_trajectory(traj, path):
    """Text export: a header with seed and kernel fingerprint, then one state
    index per line."""
    with open(path, "w") as fh:
        fh.write(f"# seed={traj.seed} kernel={traj.fingerprint}\n")
        for s in traj.states:
            fh.write(f"{int(s)}\n")
