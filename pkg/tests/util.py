"""Shared builders for the test suite."""

from __future__ import annotations

from itertools import product

import numpy as np

from unirep import (
    Cdf,
    IntervalPartition,
    Kernel,
    KernelFamily,
    ValueSpace,
    validate_space,
)

REAL = ValueSpace("real")
UNIT = ValueSpace("unit")
LABELS3 = ValueSpace("labels", 3)


def space(atoms, probs):
    return validate_space(list(atoms), list(probs))


def table_kernel(name, sp, values, value_space=UNIT, symmetric=False):
    arity = len(next(iter(values)))
    return Kernel(
        name=name,
        arity=arity,
        value_space=value_space,
        domain=sp,
        table=dict(values),
        symmetric=symmetric,
    )


def const_graph_kernel(p, name="f"):
    """Constant edge-probability kernel on the trivial one-cell partition."""
    part = IntervalPartition((0.0, 1.0), ("o",))
    return Kernel(
        name=name,
        arity=2,
        value_space=UNIT,
        domain=part,
        table={(0, 0): p},
        symmetric=True,
    )


def two_block_kernel(within=0.1, across=0.9, name="f"):
    """Step kernel with equal halves: ``within`` on the diagonal blocks."""
    part = IntervalPartition((0.0, 0.5, 1.0), ("lo", "hi"))
    table = {
        (0, 0): within,
        (0, 1): across,
        (1, 0): across,
        (1, 1): within,
    }
    return Kernel(
        name=name, arity=2, value_space=UNIT, domain=part, table=table, symmetric=True
    )


def random_space(rng, size, ids=None):
    probs = rng.dirichlet(np.ones(size))
    atoms = ids or [f"a{k}" for k in range(size)]
    return space(atoms, probs)


def _draw_value(rng, value_space):
    if value_space.kind == "labels":
        return int(rng.integers(0, value_space.num_labels))
    if value_space.kind == "unit":
        return float(rng.random())
    return float(np.round(rng.normal(), 6))


def random_kernel(rng, sp, arity, value_space, name, symmetric=False):
    table = {}
    if symmetric:
        for key in product(sp.atom_ids, repeat=arity):
            canon = tuple(sorted(key))
            if canon not in table:
                table[canon] = _draw_value(rng, value_space)
        full = {}
        for key in product(sp.atom_ids, repeat=arity):
            full[key] = table[tuple(sorted(key))]
        table = full
    else:
        for key in product(sp.atom_ids, repeat=arity):
            table[key] = _draw_value(rng, value_space)
    return Kernel(
        name=name,
        arity=arity,
        value_space=value_space,
        domain=sp,
        table=table,
        symmetric=symmetric,
    )


def random_family(rng, sp, specs):
    """``specs``: iterable of (name, arity, value_space, symmetric)."""
    return KernelFamily(
        tuple(
            random_kernel(rng, sp, arity, vs, name, symmetric)
            for name, arity, vs, symmetric in specs
        )
    )


def random_step_cdf(rng, max_jumps=8):
    k = int(rng.integers(1, max_jumps + 1))
    ys = np.sort(rng.choice(np.round(rng.normal(0, 5, 4 * k), 3), k, replace=False))
    if k == 1:
        cums = [1.0]
    else:
        cuts = np.sort(rng.random(k - 1))
        while k > 1 and (np.diff(np.concatenate(([0.0], cuts, [1.0]))) < 1e-6).any():
            cuts = np.sort(rng.random(k - 1))
        cums = list(cuts) + [1.0]
    return Cdf("step", tuple(zip(ys.tolist(), cums)))


def random_pwl_cdf(rng, max_knots=8):
    k = int(rng.integers(2, max_knots + 1))
    xs = np.sort(rng.choice(np.round(rng.normal(0, 3, 4 * k), 3), k, replace=False))
    if k == 2:
        fs = [0.0, 1.0]
    else:
        cuts = np.sort(rng.random(k - 2))
        while (np.diff(np.concatenate(([0.0], cuts, [1.0]))) < 1e-6).any():
            cuts = np.sort(rng.random(k - 2))
        fs = [0.0] + list(cuts) + [1.0]
    return Cdf("pwl", tuple(zip(xs.tolist(), fs)))
