"""DistMaint: repair mechanics, exact recoloring probabilities, uniformity."""

import math
import random
from fractions import Fraction

import pytest

from conftest import build_forest
from forestcolor.dist_maint import (
    child_to_root,
    dm_update_rooted,
    dm_update_unrooted,
    fix_forbidden,
    recolor_probability,
    root_to_child,
    sample_uniform_coloring,
)
from forestcolor.errors import NotRoot
from forestcolor.forest import ColoredForest, Palette, RecourseLedger, Update, edge_key
from forestcolor.kernels import KernelForest, KernelRng
from forestcolor.mc import (
    complete_tree_parents,
    insertion_depth_counts,
    script_histogram,
    toggle_run,
)
from forestcolor.oracles import chisq_uniformity
from forestcolor.rng import Rng, mix_seed


def binom_3sigma(trials, p):
    return 3 * math.sqrt(p * (1 - p) / trials)


class TestSampling:
    def test_single_edge_frequencies(self):
        kf = KernelForest(2, 3)
        counts = {1: 0, 2: 0, 3: 0}
        for t in range(100_000):
            kf.reset([-1, 0], [0, 0])
            kf.sample_colors(KernelRng(mix_seed(11, t)))
            counts[kf.colors()[1]] += 1
        for c in (1, 2, 3):
            assert abs(counts[c] / 100_000 - 1 / 3) <= binom_3sigma(100_000, 1 / 3)

    def test_path3_uniform_over_12(self):
        hist, support = script_histogram(
            4,
            Palette(3, 0),
            [Update.insert(0, 1, 0), Update.insert(1, 2, 1), Update.insert(2, 3, 2)],
            trials=100_000,
            seed=17,
        )
        assert support == 12
        _, p = chisq_uniformity(hist, support)
        assert p > 0.01
        # degree form of the per-coloring probability: (1/3)*1*(1/2)*(1/2)*1
        assert Fraction(1, 3) * Fraction(1, 2) * Fraction(1, 2) == Fraction(1, 12)

    def test_sampled_coloring_proper(self):
        rng = Rng(5)
        for n, edges in ((6, [(0, 1), (1, 2), (1, 3), (3, 4), (0, 5)]),):
            f = ColoredForest(n, Palette(3, 1))
            for a, b in edges:
                f.insert_topology(a, b, parent_hint=a)
            for _ in range(50):
                sample_uniform_coloring(f, rng)
                f.assert_proper()


class TestFixForbidden:
    def test_no_conflict_empty_trace(self):
        f = build_forest(3, Palette(3, 0), [(0, 1, 1), (1, 2, 3)])
        trace = fix_forbidden(f, 1, 1, 2)  # no child of 1 is colored 2
        assert trace.swapped == []

    def test_depth2_recolor_probability(self):
        # kappa=4: under the top-down law at v=1, the edge at depth 2 below v
        # is recolored with probability 1/(kappa-1)^2 = 1/9
        palette = Palette(3, 1)
        f = ColoredForest(6, palette)
        for p, c in [(0, 1), (1, 2), (1, 4), (2, 3), (2, 5)]:
            f.insert_topology(p, c, parent_hint=p)
        rng = Rng(2718)
        trials, hits = 100_000, 0
        target = edge_key(2, 3)
        for _ in range(trials):
            sample_uniform_coloring(f, rng)
            alpha = f.edge_color((0, 1))
            beta = alpha % 4 + 1
            f.set_color((0, 1), beta)
            trace = fix_forbidden(f, 1, alpha, beta)
            f.assert_proper()
            if any(e == target for e, _, _ in trace.swapped):
                hits += 1
        assert abs(hits / trials - 1 / 9) <= binom_3sigma(trials, 1 / 9)

    def test_repair_yields_conditional_distribution(self):
        # after fixing alpha->beta, the subtree below v=1 is top-down
        # distributed with beta forbidden: uniform over colorings of the
        # chain (1,2),(2,3) that avoid beta at vertex 1
        palette = Palette(3, 0)
        f = ColoredForest(4, palette)
        for p, c in [(0, 1), (1, 2), (2, 3)]:
            f.insert_topology(p, c, parent_hint=p)
        rng = Rng(424242)
        counts = {}
        trials = 0
        while trials < 20_000:
            sample_uniform_coloring(f, rng)
            if f.edge_color((0, 1)) != 1:
                continue
            trials += 1
            f.set_color((0, 1), 2)
            fix_forbidden(f, 1, 1, 2)
            f.assert_proper()
            key = (f.edge_color((1, 2)), f.edge_color((2, 3)))
            counts[key] = counts.get(key, 0) + 1
        # support: (1,2) in {1,3}, (2,3) != (1,2): 4 cells
        assert set(counts) == {(1, 2), (1, 3), (3, 1), (3, 2)}
        expected = trials / 4
        stat = sum((c - expected) ** 2 / expected for c in counts.values())
        from scipy.stats import chi2

        assert chi2.sf(stat, 3) > 0.01


class TestRootToChild:
    def test_unused_color_empty_trace(self):
        f = build_forest(3, Palette(3, 0), [(0, 1, 1), (0, 2, 2)])
        rng = Rng(1)
        state_before = rng.state
        assert root_to_child(f, 0, 3, rng).swapped == []
        assert rng.state == state_before  # no randomness consumed

    def test_repair_starts_with_ell_over_kappa(self):
        # root with ell=2 children, kappa=4: inserting above it starts a
        # repair with probability exactly 2/4
        palette = Palette(3, 1)
        kf = KernelForest(4, palette.kappa)
        parents = [-1, 0, 0, -1]
        trials, hits = 100_000, 0
        for t in range(trials):
            kf.reset(parents, [0] * 4)
            rng = KernelRng(mix_seed(23, t))
            kf.sample_colors(rng)
            if kf.insert(3, 0, rng) > 0:
                hits += 1
        assert abs(hits / trials - 0.5) <= binom_3sigma(trials, 0.5)

    def test_complete_tree_depth_probabilities_small(self):
        palette = Palette(3, 1)
        trials = 30_000
        counts = insertion_depth_counts(palette, h=3, trials=trials, seed=3)
        kappa = 4
        for d in (1, 2, 3):
            n_d = 2**d
            q = n_d * (1 / (kappa * (kappa - 1) ** (d - 1)))
            assert abs(counts[d] / trials - q) <= binom_3sigma(trials, q)


class TestChildToRoot:
    def test_leaf_becomes_root_noop(self):
        f = build_forest(2, Palette(3, 0), [(0, 1, 2)])
        rng = Rng(9)
        before = rng.state
        f.delete_topology((0, 1))
        assert child_to_root(f, 1, 2, rng).swapped == []
        assert rng.state == before

    def test_start_probability(self):
        # r has ell=2 children; repair starts with probability 2/kappa
        palette = Palette(3, 1)
        kf = KernelForest(4, palette.kappa)
        parents = [-1, 0, 1, 1]  # 0 -> 1 -> {2, 3}
        trials, hits = 100_000, 0
        for t in range(trials):
            kf.reset(parents, [0] * 4)
            rng = KernelRng(mix_seed(29, t))
            kf.sample_colors(rng)
            if kf.delete(0, 1, rng) > 0:
                hits += 1
        assert abs(hits / trials - 2 / 4) <= binom_3sigma(trials, 0.5)

    def test_post_state_distribution(self):
        # delete the root edge; the detached subtree must be top-down
        # distributed, i.e. uniform over its proper colorings
        palette = Palette(3, 0)
        updates = [
            Update.insert(0, 1, 0),
            Update.insert(1, 2, 1),
            Update.insert(1, 3, 1),
            Update.delete(0, 1),
        ]
        hist, support = script_histogram(4, palette, updates, 50_000, seed=31)
        assert support == 6  # remaining 2-star: 3 * 2 injective pairs
        _, p = chisq_uniformity(hist, support)
        assert p > 0.01


class TestRootedUpdates:
    def test_second_insert_collides_with_prob_one_over_kappa(self):
        palette = Palette(3, 1)
        kf = KernelForest(3, palette.kappa)
        trials, hits = 100_000, 0
        for t in range(trials):
            kf.reset([-1] * 3, [0] * 3)
            rng = KernelRng(mix_seed(37, t))
            kf.insert(1, 2, rng)  # edge (1,2), 1 parent
            if kf.insert(0, 1, rng) == 1:
                hits += 1
        assert abs(hits / trials - 1 / 4) <= binom_3sigma(trials, 1 / 4)

    def test_delete_leaf_below_childless_root_always_zero(self):
        palette = Palette(3, 0)
        for seed in range(50):
            f = ColoredForest(2, palette)
            rng = Rng(seed)
            dm_update_rooted(f, Update.insert(0, 1, 0), rng)
            state = rng.state
            assert dm_update_rooted(f, Update.delete(0, 1), rng) == 0
            assert rng.state == state  # childless new root: no coin used

    def test_uniform_after_random_script(self):
        palette = Palette(3, 0)
        updates = random_script_n7(seed=55, steps=50)
        hist, support = script_histogram(7, palette, updates, 100_000, seed=61)
        _, p = chisq_uniformity(hist, support)
        assert p > 0.01

    def test_requires_root(self):
        f = ColoredForest(3, Palette(3, 0))
        rng = Rng(0)
        dm_update_rooted(f, Update.insert(0, 1, 0), rng)
        with pytest.raises(NotRoot):
            dm_update_rooted(f, Update.insert(2, 1, 2), rng)

    def test_trace_is_bicolored_downward_path(self):
        palette = Palette(4, 1)
        f = ColoredForest(40, palette)
        rng = Rng(4096)
        pyrng = random.Random(12)
        traces = []
        for _ in range(600):
            edges = list(f.edges())
            if edges and pyrng.random() < 0.4:
                a, b = pyrng.choice(edges)
                dm_update_rooted(f, Update.delete(a, b), rng, trace_out=traces)
            else:
                for _ in range(60):
                    r, p = pyrng.randrange(40), pyrng.randrange(40)
                    if (
                        f.parent[r] is None
                        and f.find_root(p) != r
                        and f.degree(p) < 4
                        and f.degree(r) < 4
                    ):
                        dm_update_rooted(
                            f, Update.insert(p, r, p), rng, trace_out=traces
                        )
                        break
            f.assert_proper()
        nontrivial = [t for t in traces if t.swapped]
        assert nontrivial, "workload never triggered a repair"
        for trace in nontrivial:
            edges = [e for e, _, _ in trace.swapped]
            assert len(set(edges)) == len(edges)
            colors = set()
            prev_new = None
            for e, old, new in trace.swapped:
                colors.update((old, new))
                if prev_new is not None:
                    assert old == prev_new  # the two colors swap alternately
                prev_new = new
            for a, b in zip(edges, edges[1:]):
                assert set(a) & set(b)  # one contiguous downward path
            assert len(colors) <= 2
            assert trace.start in edges[0]


def random_script_n7(seed, steps):
    rng = random.Random(seed)
    sim = ColoredForest(7, Palette(3, 0))
    out = []
    while len(out) < steps:
        edges = list(sim.edges())
        if edges and rng.random() < 0.4:
            a, b = rng.choice(edges)
            sim.delete_topology((a, b))
            out.append(Update.delete(a, b))
            continue
        for _ in range(60):
            r, p = rng.randrange(7), rng.randrange(7)
            if (
                sim.parent[r] is None
                and sim.find_root(p) != r
                and sim.degree(p) < 3
                and sim.degree(r) < 3
            ):
                sim.insert_topology(p, r, parent_hint=p)
                out.append(Update.insert(p, r, parent=p))
                break
        else:
            a, b = rng.choice(edges)
            sim.delete_topology((a, b))
            out.append(Update.delete(a, b))
    if sim.edge_count() < 3:  # retry until the final state is worth testing
        return random_script_n7(seed + 1, steps)
    return out


class TestUnrootedUpdates:
    def test_star_growth_pays_nothing(self):
        # the smaller-degree endpoint is rerooted, so building a star leaf by
        # leaf never recolors anything
        for seed in (1, 2, 3):
            palette = Palette(8, 0)
            ledger = RecourseLedger()
            f = ColoredForest(9, palette, ledger)
            rng = Rng(seed)
            for leaf in range(1, 9):
                dm_update_unrooted(f, Update.insert(0, leaf), rng)
            assert ledger.total == 0
            f.assert_proper()

    def test_wrong_side_rerooting_costs_delta_squared_over_kappa(self):
        # contrast: rerooting the star side on every insertion pays about
        # sum (i-1)/kappa = delta*(delta-1)/(2*kappa) in total
        palette = Palette(8, 0)
        trials = 3_000
        total = 0
        for t in range(trials):
            f = ColoredForest(9, palette)
            rng = Rng(mix_seed(43, t))
            for leaf in range(1, 9):
                f.reroot(0)
                total += dm_update_rooted(f, Update.insert(leaf, 0, leaf), rng)
            f.assert_proper()
        mean = total / trials
        expected = 8 * 7 / (2 * 8)
        sigma = math.sqrt(2.0 / trials)  # per-insert variance is < 2 overall
        assert abs(mean - expected) <= 4 * sigma

    def test_deletion_uses_current_rooting(self):
        palette = Palette(3, 0)
        f = ColoredForest(4, palette)
        rng = Rng(7)
        dm_update_unrooted(f, Update.insert(0, 1), rng)
        dm_update_unrooted(f, Update.insert(1, 2), rng)
        dm_update_unrooted(f, Update.delete(0, 1), rng)
        f.assert_proper()


class TestToggles:
    def test_small_toggle_expectation(self):
        h, toggles = 3, 20_000
        inserts, _ = toggle_run(3, 4, h, toggles, seed=93)
        kappa, delta = 4, 3
        p = (delta - 1) / (kappa - 1)
        expected = (delta - 1) / kappa * sum(p**i for i in range(h))
        mean = sum(inserts) / toggles
        var = toggle_variance(delta, kappa, h)
        assert abs(mean - expected) <= 3 * math.sqrt(var / toggles)


def toggle_variance(delta, kappa, h):
    """Exact variance of one insert's recourse on complete (delta-1)-ary
    depth-h trees under the maintained distribution."""
    start = (delta - 1) / kappa
    p = (delta - 1) / (kappa - 1)
    probs = {}
    for j in range(1, h + 1):
        probs[j] = start * p ** (j - 1) * ((1 - p) if j < h else 1)
    probs[0] = 1 - sum(probs.values())
    mean = sum(j * q for j, q in probs.items())
    return sum((j - mean) ** 2 * q for j, q in probs.items())


class TestRecolorProbability:
    def test_exact_values(self):
        assert recolor_probability(4, 1) == Fraction(1, 4)
        assert recolor_probability(4, 2) == Fraction(1, 12)

    def test_monotone_decreasing(self):
        vals = [recolor_probability(4, d) for d in range(1, 12)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < Fraction(1, 10**4)

    def test_depth_validation(self):
        with pytest.raises(ValueError):
            recolor_probability(4, 0)


def test_determinism_same_seed_same_run():
    palette = Palette(3, 1)
    outs = []
    for _ in range(2):
        f = ColoredForest(10, palette)
        rng = Rng(123456789)
        recs = []
        for r in range(1, 10):
            recs.append(dm_update_unrooted(f, Update.insert(r - 1, r), rng))
        outs.append((recs, sorted((e, f.edge_color(e)) for e in f.edges())))
    assert outs[0] == outs[1]


class TestExpectedRecourseBound:
    def test_toggle_mean_below_theorem_bound(self):
        # per-update expected recourse is at most
        # (delta/kappa) * min((kappa-1)/c, 2 + ceil(log_{kappa-1} n)) for
        # c >= 1, and 2 + ceil(log_{delta-1} n) for c = 0
        h, toggles = 6, 30_000
        for delta, kappa in ((3, 4), (3, 3), (4, 5)):
            inserts, deletes = toggle_run(delta, kappa, h, toggles, seed=delta * 100 + kappa)
            n = 2 * ((delta - 1) ** (h + 1) - 1) // max(1, delta - 2)
            depth_term = 2 + math.ceil(math.log(n, kappa - 1))
            c = kappa - delta
            if c >= 1:
                bound = delta / kappa * min((kappa - 1) / c, depth_term)
            else:
                bound = depth_term
            for series in (inserts, deletes):
                assert sum(series) / toggles <= bound
