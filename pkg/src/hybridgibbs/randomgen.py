"""Seeded generators for random test models.

Used by the randomized sweeps in the test suite and by the "random" demo.
Everything is driven by a numpy Generator (Philox) so sweeps are exactly
reproducible from an integer seed.
"""

import numpy as np

from .approximators import ApproximatorSpec, ExplicitMatrix, Lazy
from .space import JointDistribution, ProductSpace, conditional
from .spectral import ProbVec


def rng_from(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(int(seed)))


def random_probvec(seed, n, floor=0.05):
    """Strictly positive weights; ``floor`` keeps conditionals well-behaved."""
    rng = rng_from(seed)
    w = rng.random(n) + floor
    return ProbVec(w)


def random_joint(seed, sizes=None, max_coords=3, max_size=4, floor=0.05):
    """Random strictly positive joint; sizes drawn unless given."""
    rng = rng_from(seed)
    if sizes is None:
        ncoords = int(rng.integers(2, max_coords + 1))
        sizes = tuple(int(rng.integers(2, max_size + 1)) for _ in range(ncoords))
    space = ProductSpace(tuple(int(d) for d in sizes))
    return JointDistribution(space, random_probvec(rng, space.total, floor=floor))


def random_reversible_kernel(seed, target):
    """A kernel reversible w.r.t. ``target``: a random dense proposal run
    through a Metropolis-Hastings acceptance step.  Generally not psd."""
    rng = rng_from(seed)
    pi = target.weights if isinstance(target, ProbVec) else np.asarray(target, float)
    d = pi.size
    P = rng.random((d, d)) + 0.05
    P /= P.sum(axis=1, keepdims=True)
    Q = np.zeros((d, d))
    for x in range(d):
        stay = 0.0
        for y in range(d):
            if y == x:
                continue
            num = pi[y] * P[y, x]
            den = pi[x] * P[x, y]
            acc = 1.0 if den <= 0.0 else min(1.0, num / den)
            Q[x, y] = P[x, y] * acc
            stay += P[x, y] * (1.0 - acc)
        Q[x, x] = P[x, x] + stay
    return Q


def random_explicit_spec(seed, joint, coords=None):
    """Explicit random reversible approximators for every supported conditional."""
    rng = rng_from(seed)
    space = joint.space
    if coords is None:
        coords = tuple(range(space.ncoords))
    tables = {}
    for i in coords:
        for y in space.complement_configs((i,)):
            idx = space.subspace_indices((i,), y)
            if joint.weights[idx].sum() <= 0.0:
                continue
            target = conditional(joint, i, y)
            tables[(i, y)] = random_reversible_kernel(rng, target)
    return ApproximatorSpec(default=ExplicitMatrix(tables))


def random_mixed_spec(seed, joint, coords=None, lazy_prob=0.4):
    """Mix of lazy and explicit random reversible approximators.

    Lazy rules are psd; the explicit Metropolized ones generally are not, so
    sweeps built from this cover both branches of the psd tightenings.
    """
    rng = rng_from(seed)
    space = joint.space
    if coords is None:
        coords = tuple(range(space.ncoords))
    tables = {}
    for i in coords:
        for y in space.complement_configs((i,)):
            idx = space.subspace_indices((i,), y)
            if joint.weights[idx].sum() <= 0.0:
                continue
            target = conditional(joint, i, y)
            if rng.random() < lazy_prob:
                eps = float(rng.uniform(0.0, 0.9))
                d = target.n
                Q = eps * np.eye(d) + (1.0 - eps) * np.tile(target.weights, (d, 1))
                tables[(i, y)] = Q
            else:
                tables[(i, y)] = random_reversible_kernel(rng, target)
    return ApproximatorSpec(default=ExplicitMatrix(tables))


def random_lazy_spec(seed, joint, eps_range=(0.0, 0.9)):
    """A single Lazy rule with a random mixing weight (always psd)."""
    rng = rng_from(seed)
    return ApproximatorSpec(default=Lazy(float(rng.uniform(*eps_range))))


def random_slice_model(seed, max_points=6, lazy_prob=0.5, with_kernels=True):
    """Random finite slice model; repeated density values exercise level ties."""
    from .slicemodel import SliceModel

    rng = rng_from(seed)
    n = int(rng.integers(2, max_points + 1))
    base = rng.integers(1, 5, size=n).astype(float)  # ties are likely
    base += rng.random(n) * (rng.random() < 0.5)  # sometimes break them
    if not with_kernels:
        return SliceModel(density=base)
    model = SliceModel(density=base)
    kernels = []
    for members in model.level_sets:
        if rng.random() < lazy_prob:
            kernels.append(Lazy(float(rng.uniform(0.0, 0.9))))
        else:
            uniform = ProbVec(np.full(members.size, 1.0))
            kernels.append(random_reversible_kernel(rng, uniform))
    return SliceModel(density=base, level_kernels=tuple(kernels))


def random_function(seed, n):
    rng = rng_from(seed)
    return rng.standard_normal(n)
