"""Brute-force oracles: enumeration, min recourse, exact probabilities, chi-square."""

from fractions import Fraction

import pytest

from forestcolor.errors import ImproperColoring, InsufficientSamples, TooLarge
from forestcolor.oracles import (
    ColoringHistogram,
    chisq_uniformity,
    coloring_probability,
    enumerate_proper_colorings,
    min_recourse_bruteforce,
)

PATH3 = [(0, 1), (1, 2), (2, 3)]


class TestEnumerate:
    def test_single_edge(self):
        assert len(enumerate_proper_colorings([(0, 1)], 3)) == 3

    def test_two_leaf_star(self):
        # injective pairs: 3 * 2
        assert len(enumerate_proper_colorings([(0, 1), (0, 2)], 3)) == 6

    def test_path3(self):
        colorings = enumerate_proper_colorings(PATH3, 3)
        assert len(colorings) == 12  # kappa * (kappa-1)^2
        assert colorings == sorted(colorings)
        for cols in colorings:
            assert cols[0] != cols[1] and cols[1] != cols[2]

    def test_guard(self):
        edges = [(i, i + 1) for i in range(13)]
        with pytest.raises(TooLarge):
            enumerate_proper_colorings(edges, 3)


class TestMinRecourse:
    def test_free_color(self):
        old = {(0, 1): 1}
        assert min_recourse_bruteforce([(0, 1)], old, (1, 2), 3) == 0

    def test_incremental_lb_state(self):
        # Delta=4, c=0: u=0 with leaves colored {3,4}; v=3 a star with leaves
        # colored {1,2}; linking them costs exactly one recolor.
        edges = [(0, 1), (0, 2), (3, 4), (3, 5)]
        old = {(0, 1): 3, (0, 2): 4, (3, 4): 1, (3, 5): 2}
        assert min_recourse_bruteforce(edges, old, (0, 3), 4) == 1

    def test_layered_merge_needs_full_path(self):
        # Delta=3, kappa=3, P={1}: P-layered and complement-layered trees of
        # depth 2; merging their roots must recolor a path to a leaf (>= 2).
        p_edges = {(0, 1): 1, (1, 2): 2, (1, 3): 3}
        q_edges = {(4, 5): 2, (4, 6): 3, (5, 7): 1, (6, 8): 1}
        edges = list(p_edges) + list(q_edges)
        old = {**p_edges, **q_edges}
        assert min_recourse_bruteforce(edges, old, (0, 4), 3) >= 2


class TestColoringProbability:
    def test_path3(self):
        coloring = {(0, 1): 1, (1, 2): 2, (2, 3): 1}
        assert coloring_probability(PATH3, 3, coloring) == Fraction(1, 12)

    def test_single_edge(self):
        assert coloring_probability([(0, 1)], 3, {(0, 1): 2}) == Fraction(1, 3)

    def test_root_invariance(self):
        coloring = {(0, 1): 1, (1, 2): 2, (2, 3): 1}
        values = {
            coloring_probability(PATH3, 3, coloring, roots=[r]) for r in range(4)
        }
        assert values == {Fraction(1, 12)}

    def test_matches_enumeration_for_every_coloring(self):
        for edges in (PATH3, [(0, 1), (0, 2), (1, 3)]):
            for kappa in (3, 4):
                colorings = enumerate_proper_colorings(edges, kappa)
                srt = sorted(edges)
                for cols in colorings:
                    mapping = dict(zip(srt, cols))
                    p = coloring_probability(edges, kappa, mapping)
                    assert p == Fraction(1, len(colorings))

    def test_improper_rejected(self):
        with pytest.raises(ImproperColoring):
            coloring_probability([(0, 1), (1, 2)], 3, {(0, 1): 1, (1, 2): 1})


class TestChiSquare:
    def test_exactly_uniform(self):
        h = ColoringHistogram()
        for i in range(12):
            h.counts[str(i)] = 100
        h.total = 1200
        stat, p = chisq_uniformity(h, 12)
        assert stat == 0 and p == 1.0

    def test_point_mass_rejected(self):
        h = ColoringHistogram()
        h.counts["0"] = 1200
        h.total = 1200
        _, p = chisq_uniformity(h, 12)
        assert p < 1e-6

    def test_insufficient_samples(self):
        h = ColoringHistogram()
        h.counts["0"] = 5
        h.total = 5
        with pytest.raises(InsufficientSamples):
            chisq_uniformity(h, 12)

    def test_canonical_key_order(self):
        key = ColoringHistogram.canonical_key(
            [(1, 2), (0, 1)], {(0, 1): 3, (1, 2): 1}
        )
        assert key == "3,1"


def test_oracle_lower_bounds_every_algorithm():
    """min_recourse_bruteforce is a lower bound for each update algorithm
    (and exactly matches greedy); checked on random small states."""
    import random

    from conftest import random_instance
    from forestcolor.dist_maint import dm_update_unrooted
    from forestcolor.forest import RecourseLedger, Update
    from forestcolor.greedy import (
        greedy_insert,
        greedy_path_insert,
        greedy_shift_insert,
        smallest_subtree_path_insert,
    )
    from forestcolor.rng import Rng
    from forestcolor.sublinear import sublinear_insert

    rng = random.Random(246810)
    for trial in range(40):
        f, (u, v) = random_instance(rng)
        edges = list(f.edges())
        coloring = {e: f.edge_color(e) for e in edges}
        floor = min_recourse_bruteforce(edges, coloring, (u, v), f.kappa)

        runs = []
        for name, insert in (
            ("greedy", greedy_insert),
            ("shift", greedy_shift_insert),
            ("path", greedy_path_insert),
        ):
            g = f.clone()
            e = g.insert_topology(u, v)
            runs.append((name, insert(g, e)))
        if f.palette.extra == 0:
            for name, insert in (
                ("smallest", smallest_subtree_path_insert),
                ("sublinear", sublinear_insert),
            ):
                if f.palette.delta >= 3 or name == "smallest":
                    g = f.clone()
                    e = g.insert_topology(u, v)
                    runs.append((name, insert(g, e)))
        g = f.clone(ledger=RecourseLedger())
        dm_update_unrooted(g, Update.insert(u, v), Rng(trial))
        runs.append(("dist-maint", g.ledger.per_update[-1]))

        for name, got in runs:
            assert got >= floor, (name, got, floor)
        assert dict(runs)["greedy"] == floor
