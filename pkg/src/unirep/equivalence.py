"""Deciding whether two function families induce the same joint distribution.

At small scale the decision is exact: :func:`exact_joint_law`
enumerates every atom assignment and aggregates the full vector of
kernel values over all distinct-index tuples, and :func:`tv_distance`
compares two such laws by bit-exact support matching (valid because
both laws draw their values from identical tables; upstream modules
copy values, never recompute them through different arithmetic).

Beyond enumeration scale, :func:`mc_two_sample_test` compares sampled
graph laws statistically: labeled-graph frequency chi-squared for small
n, summary-statistic z-tests for larger n.

``exact_joint_law`` and ``graph_law_exact`` refuse to enumerate more
than a configured number of assignments (default 10^7, overridable via
the ``REP_MAX_ENUM`` environment variable or a ``cap`` argument).
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass
from itertools import permutations, product
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np
from scipy.stats import chi2 as _chi2
from scipy.stats import norm as _norm

from .errors import ArityError, PowerError, RangeError, ScaleError, SpecError
from .kernels import Kernel, KernelFamily, value_array
from .sampling import RandomGraph, derive_seed, graph_bitmask, pair_list
from .spaces import DiscreteSpace, IntervalPartition, validate_space

__all__ = [
    "JointLaw",
    "PatternGraph",
    "PATTERNS",
    "exact_joint_law",
    "step_family_as_space",
    "tv_distance",
    "law_is_exchangeable",
    "exchangeability_check",
    "hom_density",
    "graph_law_exact",
    "mc_two_sample_test",
]

_DEFAULT_CAP = 10_000_000


def _enum_cap(cap: int | None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get("REP_MAX_ENUM")
    return int(env) if env else _DEFAULT_CAP


@dataclass(frozen=True)
class JointLaw:
    """Exact finite distribution of all kernel values at iid points.

    ``keys`` lists, in canonical order (family order, then
    lexicographic 1-based index tuples), the coordinates of the value
    vectors; ``support`` maps each realizable value vector to its
    probability.
    """

    n: int
    keys: tuple[tuple[str, tuple[int, ...]], ...]
    support: Mapping[tuple, float]

    def __post_init__(self):
        total = math.fsum(self.support.values())
        if any(p < 0.0 for p in self.support.values()):
            raise SpecError("joint-law probabilities must be nonnegative")
        if abs(total - 1.0) > 1e-12:
            raise SpecError(f"joint-law probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "support", MappingProxyType(dict(self.support)))

    @property
    def support_size(self) -> int:
        return len(self.support)


def canonical_keys(family: KernelFamily, n: int) -> tuple[tuple[str, tuple[int, ...]], ...]:
    """All (kernel name, distinct-index tuple) coordinates for sample size n.

    Kernels whose arity exceeds n contribute no coordinates: the
    n-point marginal of the infinite collection contains no tuple long
    enough for them.
    """
    keys = []
    for k in family:
        keys.extend((k.name, idx) for idx in permutations(range(1, n + 1), k.arity))
    return tuple(keys)


def exact_joint_law(
    space: DiscreteSpace,
    family: KernelFamily,
    n: int,
    cap: int | None = None,
) -> JointLaw:
    """Enumerate the exact joint law of all kernel evaluations.

    Walks every atom assignment in Omega^n with its product
    probability, computes the full value vector over all canonical
    keys, and aggregates equal vectors.  Zero-probability assignments
    contribute nothing and are skipped, so the support contains only
    realizable vectors.

    Raises
    ------
    ScaleError
        If ``|Omega|^n`` exceeds the enumeration cap.
    """
    space = validate_space(space)
    if family.domain != space:
        raise SpecError("family is defined over a different space")
    size = len(space)
    if size**n > _enum_cap(cap):
        raise ScaleError(
            f"{size}^{n} assignments exceed the enumeration cap "
            f"{_enum_cap(cap)}; use the statistical mode or raise REP_MAX_ENUM"
        )
    keys = canonical_keys(family, n)
    lookups = []
    for k in family:
        for idx in permutations(range(1, n + 1), k.arity):
            lookups.append((k.table, idx))
    support: dict[tuple, float] = {}
    for assign in product(range(size), repeat=n):
        prob = 1.0
        for a in assign:
            prob *= space.probs[a]
        if prob == 0.0:
            continue
        atoms = tuple(space.atom_ids[a] for a in assign)
        vec = tuple(tab[tuple(atoms[t - 1] for t in idx)] for tab, idx in lookups)
        support[vec] = support.get(vec, 0.0) + prob
    return JointLaw(n, keys, support)


def step_family_as_space(family: KernelFamily) -> tuple[DiscreteSpace, KernelFamily]:
    """View a step family as a table family on its cell space.

    Cells become atoms with the cell lengths as probabilities (cell
    labels are kept as atom ids), and the cell maps are copied into
    tables.  Because step kernels are constant on cells, the exact
    joint law of the output under atom sampling equals the law the step
    family induces under Lebesgue sampling of [0,1); this is what makes
    exact comparison of step families possible.
    """
    if not isinstance(family.domain, IntervalPartition):
        raise SpecError("step_family_as_space expects a family of step kernels")
    partition = family.domain
    space = validate_space(partition.cell_labels, partition.lengths)
    labels = partition.cell_labels
    out = []
    for k in family:
        table = {
            tuple(labels[c] for c in key): v for key, v in k.table.items()
        }
        out.append(
            Kernel(
                name=k.name,
                arity=k.arity,
                value_space=k.value_space,
                domain=space,
                table=table,
                symmetric=k.symmetric,
            )
        )
    return space, KernelFamily(tuple(out))


def tv_distance(law1: JointLaw, law2: JointLaw) -> float:
    """Total variation distance between two laws with the same keys.

    Half the sum of absolute probability differences over the union of
    supports, matching support points by bit-exact value vectors.

    Raises
    ------
    SpecError
        If the two laws have different key structures.
    """
    if law1.n != law2.n or law1.keys != law2.keys:
        raise SpecError("joint laws have mismatched key structures")
    points = set(law1.support) | set(law2.support)
    return 0.5 * math.fsum(
        abs(law1.support.get(v, 0.0) - law2.support.get(v, 0.0)) for v in points
    )


def law_is_exchangeable(law: JointLaw, tol: float = 1e-9) -> bool:
    """Whether a joint law is invariant under every permutation of [n].

    For each permutation pi, relabels the index tuples in the keys by
    pi and compares the induced law with the original; passes when all
    n! comparisons have TV distance at most ``tol``.  Vacuously true
    for n = 1.
    """
    key_pos = {key: q for q, key in enumerate(law.keys)}
    for perm in permutations(range(1, law.n + 1)):
        src = [
            key_pos[(name, tuple(perm[t - 1] for t in idx))]
            for name, idx in law.keys
        ]
        permuted: dict[tuple, float] = {}
        for vec, p in law.support.items():
            newvec = tuple(vec[q] for q in src)
            permuted[newvec] = permuted.get(newvec, 0.0) + p
        if tv_distance(law, JointLaw(law.n, law.keys, permuted)) > tol:
            return False
    return True


def exchangeability_check(
    space: DiscreteSpace,
    family: KernelFamily,
    n: int,
    tol: float = 1e-9,
    cap: int | None = None,
) -> bool:
    """Exchangeability of the exact joint law of a family at size n."""
    return law_is_exchangeable(exact_joint_law(space, family, n, cap=cap), tol=tol)


@dataclass(frozen=True)
class PatternGraph:
    """A small simple graph used as a density pattern."""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        norm = []
        for u, v in self.edges:
            if u == v:
                raise SpecError("pattern graphs have no loops")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise SpecError(f"pattern edge ({u},{v}) outside vertex range")
            norm.append((min(u, v), max(u, v)))
        if len(set(norm)) != len(norm):
            raise SpecError("pattern graphs are simple (no repeated edges)")
        object.__setattr__(self, "edges", tuple(norm))


PATTERNS: dict[str, PatternGraph] = {
    "edge": PatternGraph(2, ((0, 1),)),
    "p3": PatternGraph(3, ((0, 1), (1, 2))),
    "triangle": PatternGraph(3, ((0, 1), (1, 2), (0, 2))),
    "c4": PatternGraph(4, ((0, 1), (1, 2), (2, 3), (3, 0))),
    "k4": PatternGraph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))),
}


def _weights_and_values(kernel: Kernel) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(kernel.domain, DiscreteSpace):
        weights = np.asarray(kernel.domain.probs)
    else:
        weights = np.asarray(kernel.domain.lengths)
    return weights, value_array(kernel)


def hom_density(kernel: Kernel, pattern: PatternGraph) -> float:
    """Probability-weighted density of a pattern graph in an arity-2 kernel.

    Sums, over all assignments of pattern vertices to cells (or atoms),
    the product of cell weights times the product of kernel values
    along the pattern's edges.  Exact summation over all assignments.

    Raises
    ------
    ArityError
        If the kernel is not arity 2.
    RangeError
        If kernel values leave [0,1].
    """
    if kernel.arity != 2:
        raise ArityError(f"hom_density needs an arity-2 kernel, got {kernel.arity}")
    weights, values = _weights_and_values(kernel)
    if values.min() < 0.0 or values.max() > 1.0:
        raise RangeError("hom_density needs kernel values in [0,1]")
    size = len(weights)
    terms = []
    for assign in product(range(size), repeat=pattern.num_vertices):
        w = 1.0
        for c in assign:
            w *= weights[c]
        if w == 0.0:
            continue
        for u, v in pattern.edges:
            w *= values[assign[u], assign[v]]
        terms.append(w)
    return math.fsum(terms)


def graph_law_exact(kernel: Kernel, n: int, cap: int | None = None) -> np.ndarray:
    """Exact distribution over labeled graphs on [n].

    Entry ``mask`` is the probability of the graph whose pair p (in
    :func:`~unirep.sampling.pair_list` order) is an edge iff bit p of
    ``mask`` is set: the weighted sum over cell assignments of the
    product over pairs of the edge (or non-edge) probability.

    Raises
    ------
    ScaleError
        If ``2^(n choose 2) * K^n`` exceeds the enumeration cap.
    """
    if kernel.arity != 2:
        raise ArityError(f"graph law needs an arity-2 kernel, got {kernel.arity}")
    weights, values = _weights_and_values(kernel)
    if values.min() < 0.0 or values.max() > 1.0:
        raise RangeError("graph sampling needs kernel values in [0,1]")
    pairs = pair_list(n)
    num_graphs = 1 << len(pairs)
    size = len(weights)
    if num_graphs * size**n > _enum_cap(cap):
        raise ScaleError(
            f"2^{len(pairs)} * {size}^{n} terms exceed the enumeration cap"
        )
    masks = np.arange(num_graphs)
    law = np.zeros(num_graphs)
    for assign in product(range(size), repeat=n):
        w = 1.0
        for c in assign:
            w *= weights[c]
        if w == 0.0:
            continue
        acc = np.full(num_graphs, w)
        for p, (i, j) in enumerate(pairs.tolist()):
            pe = values[assign[i - 1], assign[j - 1]]
            acc *= np.where((masks >> p) & 1, pe, 1.0 - pe)
        law += acc
    return law


def _edge_count(g: RandomGraph) -> float:
    return float(g.edge_count)


def _triangle_count(g: RandomGraph) -> float:
    adj = np.zeros((g.n, g.n))
    for i, j in g.edges.tolist():
        adj[i - 1, j - 1] = adj[j - 1, i - 1] = 1.0
    return float(np.trace(adj @ adj @ adj) / 6.0)


_DEFAULT_STATISTICS: tuple[tuple[str, Callable[[RandomGraph], float]], ...] = (
    ("edge_count", _edge_count),
    ("triangle_count", _triangle_count),
)

_CHI2_FLOOR = 5.0


def mc_two_sample_test(
    sampler_a: Callable[[int], RandomGraph],
    sampler_b: Callable[[int], RandomGraph],
    n: int,
    runs: int,
    seed: int,
    alpha: float = 0.01,
    statistics=None,
) -> dict:
    """Statistical comparison of two graph samplers.

    Each sampler is called ``runs`` times with seeds derived from the
    master seed (disjoint derivation tags for the two sides, so "same
    kernel, two seeds" is a genuine null case).  For n <= 5 the test is
    a two-sample chi-squared on labeled-graph frequencies, merging
    graphs whose pooled expected count falls below 5 into a tail
    bucket; for larger n (or when ``statistics`` is given) it is a
    two-sample z-test per summary statistic (default: edge count and
    triangle count).

    Returns
    -------
    dict
        ``{"pass": bool, "pvalues": {...}, "mode": ..., "runs": ...,
        "alpha": ...}`` plus mode-specific entries; JSON-serializable.

    Raises
    ------
    PowerError
        If too few runs leave fewer than two valid frequency buckets
        while the samples differ; carries an estimated sufficient run
        count.
    """
    if runs < 1:
        raise PowerError("need at least one run")
    graphs_a = [sampler_a(derive_seed(seed, 0, r)) for r in range(runs)]
    graphs_b = [sampler_b(derive_seed(seed, 1, r)) for r in range(runs)]

    if statistics is None and n <= 5:
        counts_a = Counter(graph_bitmask(g.edges.tolist(), n) for g in graphs_a)
        counts_b = Counter(graph_bitmask(g.edges.tolist(), n) for g in graphs_b)
        observed = sorted(set(counts_a) | set(counts_b))
        totals = {g: counts_a.get(g, 0) + counts_b.get(g, 0) for g in observed}
        big = [g for g in observed if totals[g] / 2.0 >= _CHI2_FLOOR]
        tail = [g for g in observed if g not in set(big)]
        buckets = [[g] for g in big]
        if tail:
            buckets.append(tail)
        if len(buckets) < 2:
            if counts_a == counts_b:
                return {
                    "pass": True,
                    "pvalues": {"labeled_graphs": 1.0},
                    "mode": "chi2",
                    "runs": runs,
                    "alpha": alpha,
                    "buckets": len(buckets),
                }
            ranked = sorted(totals.values(), reverse=True)
            second = ranked[1] if len(ranked) > 1 else 0
            # need runs * (second / (2 runs)) >= floor for the second cell
            required = math.ceil(2.0 * _CHI2_FLOOR * runs / second) if second else None
            raise PowerError(
                f"{runs} runs leave fewer than two frequency buckets with "
                f"expected count >= {_CHI2_FLOOR}",
                required_runs=required,
            )
        stat = 0.0
        for bucket in buckets:
            tot = sum(totals[g] for g in bucket)
            expect = tot / 2.0
            oa = sum(counts_a.get(g, 0) for g in bucket)
            ob = sum(counts_b.get(g, 0) for g in bucket)
            stat += (oa - expect) ** 2 / expect + (ob - expect) ** 2 / expect
        df = len(buckets) - 1
        pvalue = float(_chi2.sf(stat, df))
        return {
            "pass": pvalue >= alpha,
            "pvalues": {"labeled_graphs": pvalue},
            "mode": "chi2",
            "statistic": stat,
            "df": df,
            "buckets": len(buckets),
            "runs": runs,
            "alpha": alpha,
        }

    stats = tuple(statistics) if statistics is not None else _DEFAULT_STATISTICS
    pvalues = {}
    details = {}
    for name, fn in stats:
        xa = np.array([fn(g) for g in graphs_a])
        xb = np.array([fn(g) for g in graphs_b])
        va = xa.var(ddof=1) if runs > 1 else 0.0
        vb = xb.var(ddof=1) if runs > 1 else 0.0
        denom = math.sqrt(va / runs + vb / runs)
        diff = float(xa.mean() - xb.mean())
        if denom == 0.0:
            p = 1.0 if diff == 0.0 else 0.0
        else:
            p = float(2.0 * _norm.sf(abs(diff) / denom))
        pvalues[name] = p
        details[name] = {"mean_a": float(xa.mean()), "mean_b": float(xb.mean())}
    return {
        "pass": all(p >= alpha for p in pvalues.values()),
        "pvalues": pvalues,
        "mode": "ztest",
        "means": details,
        "runs": runs,
        "alpha": alpha,
    }
