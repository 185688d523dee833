import math
import subprocess
import sys

import numpy as np
import pytest
from scipy.stats import kstest

from unirep import (
    ArityError,
    KernelFamily,
    RangeError,
    SymmetryError,
    UnsupportedError,
    interval_partition,
    sample_array,
    sample_graph,
    sample_latents,
    unit_uniform,
    unit_uniform_array,
)
from unirep.sampling import (
    derive_seed,
    graph_bitmask,
    pair_list,
    sample_graph_bitmasks,
)

from util import (
    REAL,
    UNIT,
    const_graph_kernel,
    random_kernel,
    space,
    table_kernel,
    two_block_kernel,
)


class TestUnitUniform:
    def test_pure_function_of_inputs(self):
        a = unit_uniform(123, 1, 4, 9)
        b = unit_uniform(123, 1, 4, 9)
        assert a == b
        assert 0.0 <= a < 1.0

    def test_identical_across_processes(self):
        script = (
            "from unirep import unit_uniform;"
            "print(repr([unit_uniform(987654321, s, i, j)"
            " for s in (0,1) for i in (0,5) for j in (1,2**40)]))"
        )
        out = subprocess.run(
            [sys.executable, "-c", script], capture_output=True, text=True, check=True
        )
        local = repr(
            [unit_uniform(987654321, s, i, j) for s in (0, 1) for i in (0, 5) for j in (1, 2**40)]
        )
        assert out.stdout.strip() == local

    def test_distinct_arguments_change_output(self):
        base = unit_uniform(7, 0, 0, 1)
        assert unit_uniform(8, 0, 0, 1) != base
        assert unit_uniform(7, 1, 0, 1) != base
        assert unit_uniform(7, 0, 1, 1) != base
        assert unit_uniform(7, 0, 0, 2) != base

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(11)
        i = rng.integers(0, 2**62, 300)
        j = rng.integers(0, 2**62, 300)
        vec = unit_uniform_array(31337, 1, i.astype(np.uint64), j.astype(np.uint64))
        ref = [unit_uniform(31337, 1, int(a), int(b)) for a, b in zip(i, j)]
        assert vec.tolist() == ref

    def test_streams_uncorrelated(self):
        # edge-coin stream vs latent stream over 1e5 paired draws
        n = 100_000
        idx = np.arange(1, n + 1, dtype=np.uint64)
        coins = unit_uniform_array(2025, 1, idx, idx + np.uint64(1))
        lats = unit_uniform_array(2025, 0, 0, idx)
        corr = np.corrcoef(coins, lats)[0, 1]
        assert abs(corr) < 0.01

    def test_uniformity_ks(self):
        idx = np.arange(1, 1_000_001, dtype=np.uint64)
        u = unit_uniform_array(99, 0, 0, idx)
        assert kstest(u, "uniform").pvalue >= 0.01

    def test_derive_seed_distinct(self):
        seeds = {derive_seed(5, tag, r) for tag in (0, 1) for r in range(100)}
        assert len(seeds) == 200


class TestSampleLatents:
    def test_reproducible(self):
        sp = space("ab", (0.5, 0.5))
        l1 = sample_latents(sp, 3, 42)
        l2 = sample_latents(sp, 3, 42)
        assert l1.uniforms.tolist() == l2.uniforms.tolist()
        assert l1.atoms == l2.atoms

    def test_rng_contract(self):
        sp = space("ab", (0.5, 0.5))
        lat = sample_latents(sp, 5, 42)
        assert lat.uniforms.tolist() == [unit_uniform(42, 0, 0, i) for i in range(1, 6)]

    def test_cell_frequency(self):
        part = interval_partition(space("ab", (0.5, 0.5)))
        lat = sample_latents(part, 100_000, 7)
        count = int((lat.cells == 0).sum())
        sigma = math.sqrt(100_000 * 0.25)
        assert abs(count - 50_000) <= 4 * sigma

    def test_single_atom_space(self):
        lat = sample_latents(space("a", (1.0,)), 10, 3)
        assert lat.atoms == ("a",) * 10

    def test_infinite_n_unsupported(self):
        sp = space("a", (1.0,))
        with pytest.raises(UnsupportedError):
            sample_latents(sp, float("inf"), 1)
        with pytest.raises(UnsupportedError):
            sample_latents(sp, 0, 1)


class TestSampleGraph:
    def test_complete_graph(self):
        g = sample_graph(const_graph_kernel(1.0), 4, 0)
        assert g.edges.tolist() == [[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]]

    def test_empty_graph(self):
        g = sample_graph(const_graph_kernel(0.0), 6, 0)
        assert g.edge_count == 0

    def test_edge_count_binomial(self):
        n, p = 1000, 0.3
        pairs = n * (n - 1) // 2
        g = sample_graph(const_graph_kernel(p), n, 4242)
        sigma = math.sqrt(pairs * p * (1 - p))
        assert abs(g.edge_count - pairs * p) <= 4 * sigma

    def test_rng_contract_per_edge(self):
        k = two_block_kernel()
        g = sample_graph(k, 6, 99)
        from unirep.kernels import value_array

        vals = value_array(k)
        expected = [
            [i, j]
            for i, j in pair_list(6).tolist()
            if unit_uniform(99, 1, i, j) < vals[g.latents.cells[i - 1], g.latents.cells[j - 1]]
        ]
        assert g.edges.tolist() == expected

    def test_scalar_and_vector_paths_agree(self):
        # n=40 crosses the vectorization threshold; force both paths
        import unirep.sampling as sampling

        k = two_block_kernel()
        g_vec = sample_graph(k, 40, 5)
        old = sampling._VECTOR_THRESHOLD
        sampling._VECTOR_THRESHOLD = 10**9
        try:
            g_scalar = sample_graph(k, 40, 5)
        finally:
            sampling._VECTOR_THRESHOLD = old
        assert g_vec.edges.tolist() == g_scalar.edges.tolist()

    def test_threads_do_not_change_output(self):
        k = two_block_kernel()
        g1 = sample_graph(k, 60, 123, threads=1)
        g8 = sample_graph(k, 60, 123, threads=8)
        assert g1.edges.tolist() == g8.edges.tolist()

    def test_table_kernel_domain(self):
        sp = space("ab", (0.5, 0.5))
        table = {("a", "a"): 0.0, ("a", "b"): 1.0, ("b", "a"): 1.0, ("b", "b"): 0.0}
        k = table_kernel("f", sp, table, symmetric=True)
        g = sample_graph(k, 30, 11)
        atoms = g.latents.atoms
        for i, j in g.edges.tolist():
            assert atoms[i - 1] != atoms[j - 1]

    def test_rejects_asymmetric(self):
        sp = space("ab", (0.5, 0.5))
        asym = {("a", "a"): 0.0, ("a", "b"): 1.0, ("b", "a"): 0.0, ("b", "b"): 0.0}
        k = table_kernel("f", sp, asym)
        with pytest.raises(SymmetryError):
            sample_graph(k, 3, 0)

    def test_rejects_non_unit_values(self):
        sp = space("ab", (0.5, 0.5))
        table = {(a, b): 0.5 for a in "ab" for b in "ab"}
        k = table_kernel("f", sp, table, value_space=REAL, symmetric=True)
        with pytest.raises(RangeError):
            sample_graph(k, 3, 0)

    def test_rejects_wrong_arity(self):
        sp = space("ab", (0.5, 0.5))
        k = table_kernel("f", sp, {("a",): 0.5, ("b",): 0.5})
        with pytest.raises(ArityError):
            sample_graph(k, 3, 0)


class TestBitmaskSampler:
    def test_matches_sample_graph(self):
        k = two_block_kernel()
        seeds = [derive_seed(2, 0, r) for r in range(50)]
        masks = sample_graph_bitmasks(k, 4, np.array(seeds, dtype=np.uint64))
        for seed, mask in zip(seeds, masks.tolist()):
            g = sample_graph(k, 4, seed)
            assert graph_bitmask(g.edges.tolist(), 4) == mask

    def test_pair_order(self):
        assert pair_list(4).tolist() == [
            [1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4],
        ]


class TestSampleArray:
    def test_arity_one_counts(self):
        sp = space("ab", (0.5, 0.5))
        fam = KernelFamily((table_kernel("f", sp, {("a",): 0.1, ("b",): 0.9}),))
        arr = sample_array(fam, 2, 1)
        assert set(arr.values) == {("f", (1,)), ("f", (2,))}

    def test_symmetric_kernel_symmetric_values(self):
        rng = np.random.default_rng(21)
        sp = space("abc", (0.2, 0.3, 0.5))
        k = random_kernel(rng, sp, 2, UNIT, "f", symmetric=True)
        arr = sample_array(KernelFamily((k,)), 4, 17)
        for (name, idx), v in arr.values.items():
            assert arr.values[(name, idx[::-1])] == v

    def test_value_counts_for_mixed_arities(self):
        rng = np.random.default_rng(22)
        sp = space("ab", (0.5, 0.5))
        k1 = random_kernel(rng, sp, 1, UNIT, "f")
        k2 = random_kernel(rng, sp, 2, UNIT, "g")
        arr = sample_array(KernelFamily((k1, k2)), 3, 5)
        assert len(arr.values) == 3 + 6

    def test_values_recomputable_from_latents(self):
        rng = np.random.default_rng(23)
        sp = space("abc", (0.2, 0.3, 0.5))
        k = random_kernel(rng, sp, 2, REAL, "f")
        fam = KernelFamily((k,))
        arr = sample_array(fam, 3, 9)
        for (name, idx), v in arr.values.items():
            key = tuple(arr.latents.atoms[t - 1] for t in idx)
            assert k.table[key] == v

    def test_arity_exceeding_n(self):
        rng = np.random.default_rng(24)
        sp = space("ab", (0.5, 0.5))
        k = random_kernel(rng, sp, 2, UNIT, "f")
        with pytest.raises(ArityError):
            sample_array(KernelFamily((k,)), 1, 0)
