"""Finite slice samplers with exact level-set integration.

A SliceModel is an unnormalized positive density over finitely many points.
The auxiliary variable z ranges over (0, max density); between consecutive
distinct density values the level set G(z) = {y : density(y) > z} is constant,
so the z-integral defining the marginal kernel is a finite sum over level
intervals and the chain can be built exactly, never by Monte Carlo.

Level k = 1..K covers the interval (v_{k-1}, v_k] where 0 = v_0 < ... < v_K
are the distinct density values; its level set G_k = {y : density(y) > v_{k-1}}
is nested: G_K subset ... subset G_1 = all points.

Hybrid variants replace the uniform redraw on G_k by one step of a per-level
kernel reversible with respect to the uniform distribution on G_k.  Per-level
(rather than per-z) kernels are exactly the ones for which the finite
integration stays exact.
"""

from dataclasses import dataclass, field

import numpy as np

from .approximators import RULE_TYPES, kernel_for_target
from .errors import MissingLevelKernel, NonPositiveWeight
from .spectral import ProbVec, check_reversibility

_BUILD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SliceModel:
    """Unnormalized density plus optional per-level kernels.

    ``level_kernels``, when given, holds one entry per level (ordered from the
    lowest level interval up): either an approximator rule applied to the
    uniform distribution on that level set, or an explicit matrix over the
    level set's points.
    """

    density: np.ndarray
    level_kernels: tuple = None
    levels: np.ndarray = field(init=False)
    level_sets: tuple = field(init=False)

    def __post_init__(self):
        m = np.array(self.density, dtype=np.float64)
        if m.ndim != 1 or m.size == 0:
            raise NonPositiveWeight("density must be a nonempty 1-d vector")
        if not np.all(np.isfinite(m)) or np.any(m <= 0.0):
            raise NonPositiveWeight("density must be strictly positive and finite")
        m.flags.writeable = False
        levels = np.unique(m)
        level_sets = []
        lower = 0.0
        for v in levels:
            level_sets.append(np.flatnonzero(m > lower))
            lower = v
        object.__setattr__(self, "density", m)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "level_sets", tuple(level_sets))
        if self.level_kernels is not None:
            lk = tuple(self.level_kernels)
            if len(lk) != levels.size:
                raise MissingLevelKernel(
                    f"expected {levels.size} level kernels, got {len(lk)}"
                )
            object.__setattr__(self, "level_kernels", lk)

    @property
    def n(self):
        return self.density.size

    @property
    def nlevels(self):
        return self.levels.size

    def target(self):
        """The stationary distribution: the density, normalized."""
        return ProbVec(self.density)

    def interval_lengths(self, y):
        """Overlap of each level interval (v_{k-1}, v_k] with (0, density(y))."""
        v = self.levels
        lo = np.concatenate(([0.0], v[:-1]))
        return np.clip(np.minimum(v, self.density[y]) - lo, 0.0, None)


def _level_matrices(model):
    """Full-space kernels per level: the provided kernel on G_k, identity off it."""
    n = model.n
    out = []
    if model.level_kernels is None:
        raise MissingLevelKernel("this slice model has no per-level kernels")
    for k, (members, entry) in enumerate(zip(model.level_sets, model.level_kernels)):
        uniform = ProbVec(np.full(members.size, 1.0))
        if isinstance(entry, RULE_TYPES):
            Q = kernel_for_target(uniform, entry, key=("level", k))
        else:
            Q = np.asarray(entry, dtype=float)
            if Q.shape != (members.size, members.size):
                raise MissingLevelKernel(
                    f"level {k + 1} kernel has shape {Q.shape}, expected "
                    f"{(members.size, members.size)}"
                )
        # Reversibility against the uniform distribution on the level set.
        check_reversibility(Q, uniform, tol=_BUILD_TOL)
        full = np.eye(n)
        full[np.ix_(members, members)] = Q
        out.append(full)
    return out


def slice_exact(model):
    """Exact slice-sampler kernel via piecewise-constant z-integration.

    From state y, the height is uniform on (0, density(y)); conditioned on
    landing in level interval k the next state is uniform on G_k, so the row
    is the length-weighted mixture of uniform laws on the nested level sets.
    """
    n = model.n
    S = np.zeros((n, n))
    uniforms = []
    for members in model.level_sets:
        u = np.zeros(n)
        u[members] = 1.0 / members.size
        uniforms.append(u)
    for y in range(n):
        lengths = model.interval_lengths(y)
        row = np.zeros(n)
        for k in range(model.nlevels):
            if lengths[k] > 0.0:
                row += lengths[k] * uniforms[k]
        S[y] = row / model.density[y]
    return check_reversibility(S, model.target(), tol=_BUILD_TOL)


def slice_hybrid(model):
    """Hybrid slice kernel: the uniform redraw on each level set is replaced
    by one step of that level's kernel (extended by the identity off the set)."""
    mats = _level_matrices(model)
    n = model.n
    S = np.zeros((n, n))
    for y in range(n):
        lengths = model.interval_lengths(y)
        row = np.zeros(n)
        for k in range(model.nlevels):
            if lengths[k] > 0.0:
                row += lengths[k] * mats[k][y]
        S[y] = row / model.density[y]
    return check_reversibility(S, model.target(), tol=_BUILD_TOL)


def level_kernel_norms(model):
    """Operator norm of each per-level kernel against uniform on its level set."""
    from .spectral import spectral_summary

    norms = []
    if model.level_kernels is None:
        raise MissingLevelKernel("this slice model has no per-level kernels")
    for members, entry in zip(model.level_sets, model.level_kernels):
        uniform = ProbVec(np.full(members.size, 1.0))
        if isinstance(entry, RULE_TYPES):
            Q = kernel_for_target(uniform, entry)
        else:
            Q = np.asarray(entry, dtype=float)
        pair = check_reversibility(Q, uniform, tol=_BUILD_TOL)
        norms.append(spectral_summary(pair).operator_norm)
    return np.asarray(norms)
