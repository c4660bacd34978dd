"""The acceptance suite: every criterion, with its pinned tolerance.

Each criterion function returns (passed, detail).  `run_acceptance` executes
a suite ('oracles', 'deterministic', 'randomized', or 'all') and returns
machine-readable verdicts; the CLI's `verify` subcommand and the pytest
acceptance module both call straight into this.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction

from . import adversaries as adv
from .colorful_path import cp_delete, cp_insert
from .dist_maint import dm_update_unrooted, sample_uniform_coloring
from .forest import ColoredForest, Palette, RecourseLedger, Update
from .greedy import greedy_delete, greedy_insert
from .harness import (
    ExperimentConfig,
    random_incremental_updates,
    random_rooted_updates,
    rows_to_csv,
    run_experiment,
)
from .mc import insertion_depth_counts, script_histogram, toggle_run
from .oracles import chisq_uniformity, min_recourse_bruteforce
from .rng import Rng, mix_seed
from .sublinear import sublinear_insert


@dataclass
class CriterionResult:
    cid: int
    title: str
    passed: bool
    detail: str


def _apply_greedy(f, up, tb=None):
    if up.kind == "+":
        e = f.insert_topology(up.u, up.v, parent_hint=up.parent_hint)
        return greedy_insert(f, e, tb)
    return greedy_delete(f, up.key)


def _binom_3sigma(trials, p):
    return 3 * math.sqrt(p * (1 - p) / trials)


# -- criterion 1 ---------------------------------------------------------------


def _random_small_instance(rng):
    while True:
        delta = rng.choice([2, 3, 4])
        extra = rng.randint(0, min(delta - 2, 4 - delta)) if delta >= 3 else 0
        n = rng.randint(4, 10)
        f = ColoredForest(n, Palette(delta, extra))
        target = rng.randint(1, n - 2)
        for _ in range(40 * n):
            if f.edge_count() >= target:
                break
            u, v = rng.randrange(n), rng.randrange(n)
            if (
                u != v
                and not f.has_edge(u, v)
                and f.find_root(u) != f.find_root(v)
                and f.degree(u) < delta
                and f.degree(v) < delta
            ):
                f.insert_topology(u, v)
        sample_uniform_coloring(f, Rng(rng.getrandbits(63)))
        pairs = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if f.find_root(u) != f.find_root(v)
            and f.degree(u) < delta
            and f.degree(v) < delta
        ]
        if pairs:
            return f, rng.choice(pairs)


def criterion_1(instances: int = 500):
    """Oracle equivalence on >= 500 random instances within 2 minutes."""
    start = time.monotonic()
    rng = random.Random(0xC0FFEE)
    for i in range(instances):
        f, (u, v) = _random_small_instance(rng)
        edges = list(f.edges())
        coloring = {e: f.edge_color(e) for e in edges}
        want = min_recourse_bruteforce(edges, coloring, (u, v), f.kappa)
        e = f.insert_topology(u, v)
        got = greedy_insert(f, e)
        if got != want:
            return False, f"instance {i}: greedy={got} oracle={want}"
        f.assert_proper()
    elapsed = time.monotonic() - start
    if elapsed >= 120:
        return False, f"took {elapsed:.1f}s >= 120s"
    return True, f"{instances}/{instances} equal, {elapsed:.1f}s"


# -- criterion 2 ---------------------------------------------------------------


def criterion_2():
    """Incremental greedy LB at Delta=8, c=0: exactly 4 recolorings over 18
    insertions (amortized 2/9)."""
    plan = adv.gen_incremental_greedy_lb(Palette(8, 0))
    if (plan.ell, plan.insertions, plan.predicted_recourse) != (4, 18, 4):
        return False, f"plan mismatch: {plan.ell}, {plan.insertions}"
    ledger = RecourseLedger()
    f = ColoredForest(plan.n, Palette(8, 0), ledger)
    tb = plan.tie_breaker()
    for up in plan.updates:
        _apply_greedy(f, up, tb)
    f.assert_proper()
    ok = ledger.total == 4 and ledger.updates == 18
    amort = Fraction(ledger.total, ledger.updates)
    return ok and amort == Fraction(2, 9), (
        f"total={ledger.total}/18, amortized={amort}"
    )


# -- criterion 3 ---------------------------------------------------------------


def criterion_3():
    """Layered cycle at d in {6,9,12}: exactly 2*d1+2*d2+1 per cycle and the
    state hash restored, 100 cycles each."""
    details = []
    for d in (6, 9, 12):
        cyc = adv.GreedyCycle(Palette(3, 0), d)
        f = ColoredForest(cyc.required_vertices(), Palette(3, 0), RecourseLedger())
        cyc.setup(f)
        per_cycle, matches = cyc.run(f, _apply_greedy, cycles=100, scripted=True)
        want = cyc.predicted_cycle_recourse
        if set(per_cycle) != {want} or not all(matches):
            return False, f"d={d}: per_cycle={sorted(set(per_cycle))}, want {want}"
        details.append(f"d={d}:{want}x100")
    return True, ", ".join(details)


# -- criterion 4 ---------------------------------------------------------------


def _owner_star_amortized(steps):
    palette = Palette(3, 0)
    adversary = adv.OwnerStarAdversary(palette, 15, steps)
    ledger = RecourseLedger()
    f = ColoredForest(15, palette, ledger)
    while True:
        up = adversary.next(f)
        if up is None:
            break
        _apply_greedy(f, up)
    f.assert_proper()
    return ledger.total / ledger.updates


def criterion_4():
    """Owner-star adversary at Delta=3, c=0 (n0=15): amortized >= 0.1 after
    2*n0 steps, increasing toward 1/2 over 10*n0."""
    n0 = adv.adversary_thresholds(Palette(3, 0))[0]
    points = [_owner_star_amortized(k * n0) for k in (2, 6, 10)]
    ok = (
        points[0] >= 0.1
        and points[0] < points[1] < points[2] <= 0.5
    )
    return ok, "amortized at (2,6,10)*n0 steps: " + ", ".join(
        f"{p:.3f}" for p in points
    )


# -- criterion 5 ---------------------------------------------------------------


def criterion_5():
    """ColorfulPath amortized <= 10 on random rooted updates (Delta 3..6) and
    on the layered cycle, where greedy's amortized exceeds it by a factor
    growing with d."""
    details = []
    for delta, seed in ((3, 1), (4, 2), (5, 3), (6, 4)):
        palette = Palette(delta, delta - 2)
        updates = random_rooted_updates(300, palette, 10_000, seed)
        ledger = RecourseLedger()
        f = ColoredForest(300, palette, ledger)
        for up in updates:
            if up.kind == "+":
                p = up.parent_hint
                cp_insert(f, p, up.v if p == up.u else up.u)
            else:
                cp_delete(f, up.key)
        amort = ledger.total / ledger.updates
        if amort > 10:
            return False, f"random delta={delta}: amortized {amort:.2f} > 10"
        details.append(f"rnd d{delta}:{amort:.2f}")
    factors = []
    for d in (6, 9, 12):
        palette = Palette(3, 1)
        cycles = 5 * d // 3
        cyc = adv.GreedyCycle(palette, d)
        gf = ColoredForest(cyc.required_vertices(), palette, RecourseLedger())
        cyc.setup(gf)
        per_cycle, _ = cyc.run(gf, _apply_greedy, cycles=cycles, scripted=True)
        greedy_am = sum(per_cycle) / (6 * cycles)

        cyc2 = adv.GreedyCycle(palette, d)
        cl = RecourseLedger()
        cf = ColoredForest(cyc2.required_vertices(), palette, cl)
        cyc2.setup(cf)

        def apply_cp(f, up, tb=None):
            if up.kind == "+":
                p = up.parent_hint
                return cp_insert(f, p, up.v if p == up.u else up.u)
            return cp_delete(f, up.key)

        cyc2.run(cf, apply_cp, cycles=cycles)
        cp_am = cl.total / cl.updates
        if cp_am > 10:
            return False, f"cycle d={d}: colorful-path amortized {cp_am:.2f} > 10"
        factors.append(greedy_am / max(cp_am, 1e-9))
        details.append(f"cyc d={d}:{greedy_am:.2f}/{cp_am:.2f}")
    ok = factors[0] < factors[1] < factors[2]
    return ok, ", ".join(details) + f"; factors {[f'{x:.1f}' for x in factors]}"


# -- criterion 6 ---------------------------------------------------------------


def _uniformity_scenarios():
    path3 = [Update.insert(0, 1, 0), Update.insert(1, 2, 1), Update.insert(2, 3, 2)]
    btree = [
        Update.insert(0, 1, 0),
        Update.insert(0, 2, 0),
        Update.insert(1, 3, 1),
        Update.insert(1, 4, 1),
        Update.insert(2, 5, 2),
        Update.insert(2, 6, 2),
    ]
    churn = [
        Update.insert(0, 1, 0),
        Update.insert(1, 2, 1),
        Update.insert(2, 3, 2),
        Update.insert(3, 4, 3),
        Update.delete(2, 3),
        Update.insert(2, 5, 2),
        Update.delete(0, 1),
        Update.insert(3, 0, 3),
    ]
    return [
        ("path3-k3", 4, Palette(3, 0), path3),
        ("path3-k4", 4, Palette(3, 1), path3),
        ("btree-k3", 7, Palette(3, 0), btree),
        ("btree-k4", 7, Palette(3, 1), btree),
        ("churn-k3", 6, Palette(3, 0), churn),
    ]


def criterion_6():
    """DistMaint uniformity: chi-square p > 0.01 (Bonferroni over the five
    scripted scenarios) against enumeration, 1e5 seeded runs each."""
    scenarios = _uniformity_scenarios()
    threshold = 0.01 / len(scenarios)
    details = []
    for i, (name, n, palette, updates) in enumerate(scenarios):
        hist, support = script_histogram(n, palette, updates, 100_000, seed=1000 + i)
        _, p = chisq_uniformity(hist, support)
        details.append(f"{name}: p={p:.4f} (support {support})")
        if p <= threshold:
            return False, "; ".join(details)
    return True, "; ".join(details)


# -- criterion 7 ---------------------------------------------------------------


def criterion_7():
    """Insertion above a complete binary tree (Delta=3, kappa=4, h=5): per
    depth, recoloring frequency = n_d / (kappa (kappa-1)^(d-1)) within 3
    binomial sigma over 1e5 trials."""
    palette = Palette(3, 1)
    trials, h, kappa = 100_000, 5, 4
    counts = insertion_depth_counts(palette, h=h, trials=trials, seed=4242)
    details = []
    for d in range(1, h + 1):
        n_d = 2**d
        q = n_d / (kappa * (kappa - 1) ** (d - 1))
        got = counts[d] / trials
        tol = _binom_3sigma(trials, q)
        details.append(f"d{d}: {got:.4f}~{q:.4f}")
        if abs(got - q) > tol:
            return False, f"depth {d}: {got:.5f} vs {q:.5f} (3s={tol:.5f})"
    return True, ", ".join(details)


# -- criterion 8 ---------------------------------------------------------------


def _toggle_moments(delta, kappa, h):
    start = (delta - 1) / kappa
    p = (delta - 1) / (kappa - 1)
    probs = {}
    for j in range(1, h + 1):
        probs[j] = start * p ** (j - 1) * ((1 - p) if j < h else 1)
    probs[0] = 1 - sum(probs.values())
    mean = sum(j * q for j, q in probs.items())
    var = sum((j - mean) ** 2 * q for j, q in probs.items())
    return mean, var


def criterion_8():
    """Toggle workload: mean insert recourse matches the closed form within
    3 sigma at 1e5 toggles for kappa in {4,5}; linear in h for kappa=Delta."""
    details = []
    h, toggles = 6, 100_000
    for kappa, seed in ((4, 21), (5, 22)):
        inserts, _ = toggle_run(3, kappa, h, toggles, seed=seed)
        mean, var = _toggle_moments(3, kappa, h)
        got = sum(inserts) / toggles
        tol = 3 * math.sqrt(var / toggles)
        details.append(f"k={kappa}: {got:.4f}~{mean:.4f}")
        if abs(got - mean) > tol:
            return False, f"kappa={kappa}: {got:.4f} vs {mean:.4f}+-{tol:.4f}"
    # c = 0: the expectation degenerates to (delta-1)/delta * h
    for hh, seed in ((3, 23), (6, 24)):
        inserts, _ = toggle_run(3, 3, hh, toggles, seed=seed)
        mean, var = _toggle_moments(3, 3, hh)
        got = sum(inserts) / toggles
        tol = 3 * math.sqrt(var / toggles)
        details.append(f"c0 h={hh}: {got:.4f}~{mean:.4f}")
        if abs(got - mean) > tol:
            return False, f"c=0 h={hh}: {got:.4f} vs {mean:.4f}+-{tol:.4f}"
    return True, ", ".join(details)


# -- criterion 9 ---------------------------------------------------------------


def criterion_9():
    """DistMaint incremental: amortized <= 8/Delta on random workloads
    (n=1e4), and the randomized LB gadgets force >= 0.1/Delta."""
    details = []
    n = 10_000
    for delta, seed in ((4, 31), (8, 32), (16, 33), (32, 34)):
        palette = Palette(delta, 0)
        updates = random_incremental_updates(n, palette, seed)
        ledger = RecourseLedger()
        f = ColoredForest(n, palette, ledger)
        rng = Rng(mix_seed(777, delta))
        for up in updates:
            dm_update_unrooted(f, up, rng)
        amort = ledger.total / ledger.updates
        details.append(f"d{delta}: {amort * delta:.2f}/D")
        if amort > 8 / delta:
            return False, f"delta={delta}: amortized {amort:.5f} > {8 / delta:.5f}"
        gadgets = n // (2 * delta + 1)
        updates, _, used = adv.gen_rand_c0_incremental(palette, gadgets, seed)
        ledger2 = RecourseLedger()
        g = ColoredForest(used, palette, ledger2)
        rng2 = Rng(mix_seed(778, delta))
        for up in updates:
            dm_update_unrooted(g, up, rng2)
        lb = ledger2.total / ledger2.updates
        if lb < 0.1 / delta:
            return False, f"delta={delta}: LB amortized {lb:.5f} < {0.1 / delta:.5f}"
    return True, ", ".join(details)


# -- criterion 10 ----------------------------------------------------------------


def criterion_10():
    """Sublinear worst case: caterpillar merges at N in {2^10, 2^14} stay
    within 2*R (and proper); balanced-tree merges cost <= depth + 1."""
    palette = Palette(4, 0)
    details = []
    for n_edges in (2**10, 2**14):
        n_spine = n_edges // (palette.delta - 1)
        f = ColoredForest(adv.caterpillar_vertices(palette, n_spine), palette)
        (a, b), cat_edges = adv.build_caterpillar_merge(f, n_spine)
        e = f.insert_topology(a, b)
        report = {}
        got = sublinear_insert(f, e, report=report)
        f.assert_proper()
        plan = report["plan"]
        if plan is None:
            return False, f"N~{n_edges}: merge did not conflict"
        bound = 2 * plan.recourse_bound()
        details.append(f"N={cat_edges}: {got}<={bound}")
        if got > bound:
            return False, f"N={cat_edges}: recourse {got} > {bound}"
    from .mc import complete_tree_parents

    for h, seed in ((4, 51), (7, 52)):
        parents1, size, _ = complete_tree_parents(3, h)
        parents2, _, _ = complete_tree_parents(3, h, offset=size)
        f = ColoredForest(2 * size, palette)
        for v in range(1, size):
            f.insert_topology(parents1[v], v, parent_hint=parents1[v])
        for v in range(1, size):
            f.insert_topology(parents2[v], size + v, parent_hint=parents2[v])
        sample_uniform_coloring(f, Rng(seed))
        e = f.insert_topology(0, size)
        got = sublinear_insert(f, e)
        f.assert_proper()
        details.append(f"balanced h={h}: {got}<={h + 1}")
        if got > h + 1:
            return False, f"balanced h={h}: recourse {got} > {h + 1}"
    return True, ", ".join(details)


# -- criterion 11 ----------------------------------------------------------------


def criterion_11():
    """Delta=2 doubling: greedy's total recourse is at least n*lg(n)/16 and
    scales stably with n*lg(n) across n in {2^8..2^12}."""
    ratios = []
    totals = []
    for exp in range(8, 13):
        n = 2**exp
        adversary = adv.gen_delta2_doubling(n)
        palette = Palette(2, 0)
        ledger = RecourseLedger()
        f = ColoredForest(n, palette, ledger)
        while True:
            up = adversary.next(f)
            if up is None:
                break
            _apply_greedy(f, up)
        f.assert_proper()
        total = ledger.total
        totals.append(total)
        floor = n * exp / 16
        if total < floor:
            return False, f"n=2^{exp}: total {total} < {floor:.0f}"
        ratios.append(total / (n * exp))
    stable = max(ratios) / min(ratios) <= 2.0 and all(
        b > a for a, b in zip(totals, totals[1:])
    )
    detail = "totals " + ", ".join(map(str, totals)) + (
        f"; total/(n lg n) in [{min(ratios):.3f}, {max(ratios):.3f}]"
    )
    return stable, detail


# -- criterion 12 ----------------------------------------------------------------


def criterion_12():
    """Determinism: rerunning a randomized experiment with the same seed
    produces byte-identical CSV."""
    outputs = []
    for _ in range(2):
        cfg = ExperimentConfig(
            algorithm="dist-maint",
            workload="adv:toggle,h=3,toggles=50",
            palette=Palette(3, 1),
            n=64,
            seed=12345,
            reps=2,
        )
        outputs.append(rows_to_csv(run_experiment(cfg)))
    ok = outputs[0] == outputs[1] and len(outputs[0]) > 0
    return ok, f"{len(outputs[0])} CSV bytes, identical={ok}"


CRITERIA = {
    1: ("oracle equivalence (greedy == brute force)", criterion_1, "oracles"),
    2: ("incremental greedy LB exactness", criterion_2, "deterministic"),
    3: ("layered-cycle exactness", criterion_3, "deterministic"),
    4: ("owner-star adversary forces Omega(1)", criterion_4, "deterministic"),
    5: ("colorful-path constant recourse", criterion_5, "deterministic"),
    6: ("dist-maint uniformity (chi-square)", criterion_6, "randomized"),
    7: ("exact recoloring probabilities", criterion_7, "randomized"),
    8: ("toggle workload expectation", criterion_8, "randomized"),
    9: ("dist-maint incremental Theta(1/Delta)", criterion_9, "randomized"),
    10: ("sublinear worst case", criterion_10, "deterministic"),
    11: ("Delta=2 doubling lower bound", criterion_11, "deterministic"),
    12: ("determinism / replayability", criterion_12, "randomized"),
}

SUITES = {
    "oracles": [cid for cid, (_, _, s) in CRITERIA.items() if s == "oracles"],
    "deterministic": [cid for cid, (_, _, s) in CRITERIA.items() if s == "deterministic"],
    "randomized": [cid for cid, (_, _, s) in CRITERIA.items() if s == "randomized"],
    "all": sorted(CRITERIA),
}


def run_criterion(cid: int) -> CriterionResult:
    title, fn, _ = CRITERIA[cid]
    passed, detail = fn()
    return CriterionResult(cid, title, passed, detail)


def run_acceptance(suite: str = "all"):
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    return [run_criterion(cid) for cid in SUITES[suite]]
