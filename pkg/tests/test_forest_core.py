"""Forest state: topology, coloring, rooting, recourse accounting."""

import random

import pytest

from forestcolor.errors import (
    DegreeExceeded,
    DuplicateEdge,
    ImproperColoring,
    MissingEdge,
    PaletteError,
    ParseError,
    SameComponent,
)
from forestcolor.forest import ColoredForest, Palette, RecourseLedger, Update, edge_key


def test_palette_invariants():
    assert Palette(4, 2).kappa == 6
    assert Palette(1).kappa == 1
    assert Palette(2, 0).kappa == 2
    with pytest.raises(PaletteError):
        Palette(3, 2)  # extra > delta - 2
    with pytest.raises(PaletteError):
        Palette(2, 1)
    with pytest.raises(PaletteError):
        Palette(0, 0)
    with pytest.raises(PaletteError):
        Palette(4, -1)


def test_update_fields():
    up = Update.insert(3, 1, parent=3)
    assert up.kind == "+" and up.key == (1, 3) and up.parent_hint == 3
    with pytest.raises(ValueError):
        Update.insert(0, 1, parent=2)
    with pytest.raises(ValueError):
        Update("x", 0, 1)


class TestInsertTopology:
    def test_base_case(self):
        f = ColoredForest(4, Palette(3, 0))
        e = f.insert_topology(0, 1)
        assert e == (0, 1)
        assert f.has_edge(0, 1)
        assert f.component_edge_count(0) == 1
        assert len(f.component_vertices(0)) == 2

    def test_duplicate_edge(self):
        f = ColoredForest(4, Palette(3, 0))
        f.insert_topology(0, 1)
        with pytest.raises(DuplicateEdge):
            f.insert_topology(1, 0)

    def test_cycle_rejected(self):
        f = ColoredForest(4, Palette(3, 0))
        f.insert_topology(0, 1)
        f.insert_topology(1, 2)
        with pytest.raises(SameComponent):
            f.insert_topology(0, 2)

    def test_degree_cap(self):
        f = ColoredForest(5, Palette(2, 0))
        f.insert_topology(0, 1)
        f.insert_topology(1, 2)
        with pytest.raises(DegreeExceeded):
            f.insert_topology(1, 3)

    def test_parent_hint_roots_child_side(self):
        f = ColoredForest(4, Palette(3, 0))
        f.insert_topology(0, 1, parent_hint=0)
        f.insert_topology(2, 1, parent_hint=2)  # 1's side rerooted at 1
        assert f.parent[1] == 2
        assert f.parent[0] == 1
        assert f.find_root(0) == 2


class TestDeleteTopology:
    def test_only_edge(self):
        ledger = RecourseLedger()
        f = ColoredForest(2, Palette(3, 0), ledger)
        e = f.insert_topology(0, 1)
        f.set_color(e, 1)
        f.delete_topology(e)
        assert f.edge_count() == 0
        assert f.component_edge_count(0) == 0 == f.component_edge_count(1)
        assert ledger.per_update == []

    def test_cut_side_becomes_root(self):
        # rooted path r -> a -> b; deleting (a, b) makes b the root of {b}
        f = ColoredForest(3, Palette(2, 0))
        f.insert_topology(0, 1, parent_hint=0)
        f.insert_topology(1, 2, parent_hint=1)
        f.delete_topology(edge_key(1, 2))
        assert f.parent[2] is None
        assert f.find_root(1) == 0

    def test_delete_twice(self):
        f = ColoredForest(2, Palette(3, 0))
        e = f.insert_topology(0, 1)
        f.delete_topology(e)
        with pytest.raises(MissingEdge):
            f.delete_topology(e)


class TestAvailableColors:
    def test_isolated(self):
        f = ColoredForest(1, Palette(3, 1))
        assert f.available_colors(0) == {1, 2, 3, 4}

    def test_partial(self):
        f = ColoredForest(3, Palette(3, 1))
        f.set_color(f.insert_topology(0, 1), 1)
        f.set_color(f.insert_topology(0, 2), 3)
        assert f.available_colors(0) == {2, 4}
        assert f.used_colors(0) == {1, 3}

    def test_saturated_star(self):
        f = ColoredForest(4, Palette(3, 0))
        for i, c in zip((1, 2, 3), (1, 2, 3)):
            f.set_color(f.insert_topology(0, i), c)
        assert f.available_colors(0) == set()

    def test_partition_property(self):
        f = random_colored_forest(seed=7, n=20, palette=Palette(4, 1))
        for v in range(f.n):
            used, avail = f.used_colors(v), f.available_colors(v)
            assert used | avail == set(f.palette.colors())
            assert used & avail == set()


class TestReroot:
    def test_noop_at_root(self):
        f = ColoredForest(3, Palette(2, 0))
        f.insert_topology(0, 1, parent_hint=0)
        before = f.snapshot()
        f.reroot(0)
        assert f.snapshot() == before

    def test_path_reversal(self):
        f = ColoredForest(3, Palette(2, 0))
        f.set_color(f.insert_topology(0, 1, parent_hint=0), 1)
        f.set_color(f.insert_topology(1, 2, parent_hint=1), 2)
        colors_before = {e: f.edge_color(e) for e in f.edges()}
        f.reroot(2)
        assert f.parent[2] is None and f.parent[1] == 2 and f.parent[0] == 1
        assert {e: f.edge_color(e) for e in f.edges()} == colors_before

    def test_random_reroots_keep_coloring(self):
        f = random_colored_forest(seed=13, n=40, palette=Palette(4, 0), single_tree=True)
        reference = {e: f.edge_color(e) for e in f.edges()}
        rng = random.Random(99)
        for _ in range(1000):
            f.reroot(rng.randrange(f.n))
            f.assert_proper()
        assert {e: f.edge_color(e) for e in f.edges()} == reference


class TestAssertProper:
    def test_valid_path(self):
        f = ColoredForest(4, Palette(2, 0))
        f.set_color(f.insert_topology(0, 1), 1)
        f.set_color(f.insert_topology(1, 2), 2)
        f.set_color(f.insert_topology(2, 3), 1)
        f.assert_proper()

    def test_conflict_detected(self):
        f = ColoredForest(3, Palette(2, 0))
        f.set_color(f.insert_topology(0, 1), 1)
        e = f.insert_topology(1, 2)
        f.adjacency[1][2] = 1  # corrupt behind the API
        f.adjacency[2][1] = 1
        f._used[1][1] = 2
        f._used[2][1] = 1
        with pytest.raises(ImproperColoring) as err:
            f.assert_proper()
        assert err.value.vertex == 1 and err.value.color == 1

    def test_uncolored_detected(self):
        f = ColoredForest(2, Palette(2, 0))
        f.insert_topology(0, 1)
        with pytest.raises(ImproperColoring):
            f.assert_proper()

    def test_fuzz_mutators_stay_proper(self):
        rng = random.Random(4242)
        f = ColoredForest(30, Palette(4, 1))
        for step in range(10_000):
            edges = list(f.edges())
            if edges and rng.random() < 0.35:
                f.delete_topology(rng.choice(edges))
            else:
                u, v = rng.randrange(f.n), rng.randrange(f.n)
                try:
                    e = f.insert_topology(u, v)
                except (SameComponent, DuplicateEdge, DegreeExceeded):
                    continue
                shared = sorted(f.available_for_edge(e))
                if not shared:  # no greedy repair in this module; undo instead
                    f.delete_topology(e)
                    continue
                f.set_color(e, shared[0])
            if step % 500 == 0:
                f.assert_proper()
        f.assert_proper()


class TestSubtreeSizes:
    def test_singleton(self):
        f = ColoredForest(1, Palette(3, 0))
        assert f.subtree_sizes(0) == {0: 0}

    def test_star(self):
        f = ColoredForest(4, Palette(3, 0))
        for i in (1, 2, 3):
            f.insert_topology(0, i, parent_hint=0)
        sizes = f.subtree_sizes(0)
        assert sizes[0] == 3 and all(sizes[i] == 0 for i in (1, 2, 3))

    def test_random_tree_consistent(self):
        f = random_colored_forest(seed=5, n=50, palette=Palette(5, 2), single_tree=True)
        root = f.find_root(0)
        sizes = f.subtree_sizes(root)
        par = {root: None}
        stack = [root]
        while stack:
            x = stack.pop()
            for y in f.adjacency[x]:
                if y not in par:
                    par[y] = x
                    stack.append(y)
        for v in f.component_vertices(root):
            kids = [w for w in f.adjacency[v] if par[w] == v]
            assert sizes[v] == sum(sizes[w] + 1 for w in kids)


class TestRecourseAccounting:
    def test_net_diff_semantics(self):
        ledger = RecourseLedger()
        f = ColoredForest(6, Palette(4, 1), ledger)
        e1 = f.insert_topology(0, 1)
        e2 = f.insert_topology(1, 2)
        f.set_color(e1, 1)
        f.set_color(e2, 2)
        events = []
        f.on_recolor.append(lambda e, old, new: events.append((e, old, new)))
        with f.recourse_scope() as rs:
            # transient uncolor + recolor to the same color: net zero
            old = f.uncolor(e1)
            f.set_color(e1, old)
            # a real recolor
            f.set_color(e2, 3)
            # a new edge colored during the update: free
            e3 = f.insert_topology(2, 3)
            f.set_color(e3, 1)
        assert rs.recourse == 1
        assert ledger.per_update == [1]
        assert events == [((1, 2), 2, 3)]

    def test_ledger_matches_snapshot_diff(self):
        rng = random.Random(2024)
        ledger = RecourseLedger()
        f = ColoredForest(24, Palette(4, 1), ledger)
        diffs = []
        for _ in range(300):
            before = {e: f.edge_color(e) for e in f.edges()}
            with f.recourse_scope():
                mutate_randomly(f, rng)
            after = {e: f.edge_color(e) for e in f.edges()}
            diffs.append(
                sum(
                    1
                    for e, c in before.items()
                    if c != 0 and e in after and after[e] != c
                )
            )
        assert ledger.per_update == diffs


def mutate_randomly(f, rng):
    """A messy but legal update: topology change plus some recolor churn."""
    edges = list(f.edges())
    if edges and rng.random() < 0.3:
        f.delete_topology(rng.choice(edges))
    else:
        u, v = rng.randrange(f.n), rng.randrange(f.n)
        try:
            e = f.insert_topology(u, v)
            shared = sorted(f.available_for_edge(e))
            if shared:
                f.set_color(e, shared[0])
            else:
                f.delete_topology(e)
        except (SameComponent, DuplicateEdge, DegreeExceeded):
            pass
    for e in list(f.edges()):
        if rng.random() < 0.1:
            old = f.uncolor(e)
            options = sorted(f.available_for_edge(e) | {old})
            f.set_color(e, rng.choice(options))


class TestSnapshot:
    def test_round_trip(self):
        f = random_colored_forest(seed=11, n=15, palette=Palette(3, 1))
        text = f.snapshot()
        g = ColoredForest.from_snapshot(text)
        assert g.snapshot() == text
        assert g.state_hash() == f.state_hash()
        g.assert_proper()

    def test_header_fields(self):
        f = ColoredForest(3, Palette(3, 1))
        f.set_color(f.insert_topology(0, 1, parent_hint=1), 2)
        snap = f.snapshot()
        assert snap.splitlines()[0] == "forest n=3 kappa=4 delta=3"
        assert snap.splitlines()[1] == "e 0 1 2 p=1"

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            ColoredForest.from_snapshot("nonsense\n")
        with pytest.raises(ParseError) as err:
            ColoredForest.from_snapshot("forest n=3 kappa=3 delta=3\ne 0 1\n")
        assert err.value.line == 2


def random_colored_forest(seed, n, palette, single_tree=False):
    """Random legal forest, every edge colored with some available color."""
    rng = random.Random(seed)
    f = ColoredForest(n, palette)
    target = n - 1 if single_tree else int(n * 0.7)
    guard = 0
    while f.edge_count() < target and guard < 50 * n:
        guard += 1
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v:
            continue
        try:
            e = f.insert_topology(u, v)
        except (SameComponent, DuplicateEdge, DegreeExceeded):
            continue
        choices = sorted(f.available_for_edge(e))
        if not choices:
            f.delete_topology(e)
            continue
        f.set_color(e, rng.choice(choices))
    f.assert_proper()
    return f
