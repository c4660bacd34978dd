"""Experiment runner: algorithms x workloads -> recourse ledgers -> CSV.

A workload is either a static update sequence (possibly with scripted
tie-breaks) or an adaptive adversary that observes the forest.  One
experiment row per update:

    rep,update_idx,kind,recourse,component_sizes,cum_amortized,...

plus a summary row carrying the exact amortized value, the worst case, and
the workload's theoretical bound column when it declares one.  Repetition
r uses the derived seed mix(seed, r), so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import adversaries as adv
from .colorful_path import cp_delete, cp_insert
from .dist_maint import dm_update_rooted, dm_update_unrooted
from .errors import ParseError
from .forest import ColoredForest, Palette, RecourseLedger, Update
from .greedy import (
    TieBreaker,
    greedy_delete,
    greedy_insert,
    greedy_path_insert,
    greedy_shift_insert,
    smallest_subtree_path_insert,
)
from .rng import Rng, mix_seed
from .sublinear import sublinear_insert

RANDOMIZED_ALGORITHMS = {"dist-maint", "dist-maint-rooted"}

CSV_COLUMNS = [
    "rep",
    "update_idx",
    "kind",
    "recourse",
    "component_sizes",
    "cum_amortized",
    "amortized_exact",
    "worst_case",
    "bound",
]


# -- sequence file format ----------------------------------------------------


def parse_sequence(text: str):
    """Lines '+ u v [p=u|v]' or '- u v'; '#' starts a comment."""
    updates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "+" and len(tok) in (3, 4):
                u, v = int(tok[1]), int(tok[2])
                parent = None
                if len(tok) == 4:
                    if not tok[3].startswith("p="):
                        raise ValueError
                    parent = int(tok[3][2:])
                updates.append(Update.insert(u, v, parent))
            elif tok[0] == "-" and len(tok) == 3:
                updates.append(Update.delete(int(tok[1]), int(tok[2])))
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise ParseError(f"malformed update {raw!r}", line=lineno) from None
    return updates


def serialize_sequence(updates) -> str:
    out = []
    for up in updates:
        if up.kind == "+":
            suffix = f" p={up.parent_hint}" if up.parent_hint is not None else ""
            out.append(f"+ {up.u} {up.v}{suffix}")
        else:
            out.append(f"- {up.u} {up.v}")
    return "\n".join(out) + "\n"


# -- algorithm adapters -------------------------------------------------------


def make_algorithm(alg_id: str, forest: ColoredForest, seed: Optional[int]):
    """Returns apply(update, tb=None) -> recourse for the given algorithm."""
    if alg_id in RANDOMIZED_ALGORITHMS and seed is None:
        raise ValueError(f"algorithm {alg_id!r} requires --seed")

    if alg_id in ("greedy", "greedy-shift", "greedy-path"):
        insert = {
            "greedy": greedy_insert,
            "greedy-shift": greedy_shift_insert,
            "greedy-path": greedy_path_insert,
        }[alg_id]

        def apply(up, tb=None):
            if up.kind == "+":
                e = forest.insert_topology(up.u, up.v, parent_hint=up.parent_hint)
                return insert(forest, e, tb)
            return greedy_delete(forest, up.key)

        return apply

    if alg_id == "smallest-subtree":

        def apply(up, tb=None):
            if up.kind == "+":
                e = forest.insert_topology(up.u, up.v, parent_hint=up.parent_hint)
                return sublinear_like_recourse(forest, e, smallest_subtree_path_insert)
            return greedy_delete(forest, up.key)

        return apply

    if alg_id == "sublinear-delta":

        def apply(up, tb=None):
            if up.kind == "+":
                e = forest.insert_topology(up.u, up.v, parent_hint=up.parent_hint)
                return sublinear_insert(forest, e)
            return greedy_delete(forest, up.key)

        return apply

    if alg_id == "colorful-path":

        def apply(up, tb=None):
            if up.kind == "+":
                p, r = resolve_rooted(forest, up)
                return cp_insert(forest, p, r)
            return cp_delete(forest, up.key)

        return apply

    if alg_id in RANDOMIZED_ALGORITHMS:
        rng = Rng(seed)
        update_fn = dm_update_rooted if alg_id == "dist-maint-rooted" else dm_update_unrooted

        def apply(up, tb=None):
            return update_fn(forest, up, rng)

        return apply

    raise ValueError(f"unknown algorithm id {alg_id!r}")


def sublinear_like_recourse(forest, e, fn):
    return fn(forest, e)


def resolve_rooted(forest: ColoredForest, up: Update):
    from .errors import NotRoot

    if up.parent_hint is not None:
        p = up.parent_hint
        return p, (up.v if p == up.u else up.u)
    u_root = forest.parent[up.u] is None
    v_root = forest.parent[up.v] is None
    if u_root == v_root:
        raise NotRoot(f"insertion ({up.u},{up.v}) violates the rooted model")
    return (up.u, up.v) if v_root else (up.v, up.u)


# -- workloads ----------------------------------------------------------------


@dataclass
class Workload:
    """Driver for one experiment repetition."""

    name: str
    n: int
    palette: Palette
    setup_updates: list = field(default_factory=list)
    updates: Optional[list] = None  # static part (after setup)
    adversary: object = None  # .next(f) -> Update | None
    tie_breaker: Optional[TieBreaker] = None
    bound: Optional[float] = None  # theoretical per-update bound, if declared
    setup_forest: Optional[Callable] = None  # direct state construction
    before_update: Optional[Callable] = None  # observe (forest, update)
    prefs_provider: Optional[Callable] = None  # (forest, update) -> prefs

    def stream(self, forest):
        for up in self.setup_updates:
            yield up
        if self.updates is not None:
            for up in self.updates:
                yield up
        if self.adversary is not None:
            while True:
                up = self.adversary.next(forest)
                if up is None:
                    return
                yield up


def _parse_workload_id(workload: str):
    parts = workload.split(",")
    params = {}
    for piece in parts[1:]:
        k, _, v = piece.partition("=")
        params[k] = int(v)
    return parts[0], params


def make_workload(workload: str, palette: Palette, n: int, seed: Optional[int]) -> Workload:
    """Instantiate a workload id (or read a sequence file)."""
    base, params = _parse_workload_id(workload)

    if base == "adv:greedy-incremental":
        plan = adv.gen_incremental_greedy_lb(palette)
        return Workload(
            base,
            plan.n,
            palette,
            updates=plan.updates,
            tie_breaker=plan.tie_breaker(),
            bound=float(plan.amortized),
        )
    if base == "adv:owner-stars":
        n0 = adv.adversary_thresholds(palette)[0]
        steps = params.get("steps", 2 * n0)
        return Workload(
            base,
            max(n, n0),
            palette,
            adversary=adv.OwnerStarAdversary(palette, max(n, n0), steps),
            bound=0.5,
        )
    if base == "adv:layered-cycle":
        d = params.get("d", 9)
        cycles = params.get("cycles", 50)
        cyc = adv.GreedyCycle(palette, d)
        updates = []
        for _ in range(cycles):
            updates.extend(cyc.cycle_updates())
        recorded = {}

        def remember_deleted(forest, up):
            if up.kind == "-":
                recorded[up.key] = forest.edge_color(up.key)

        wl = Workload(
            base,
            cyc.required_vertices(),
            palette,
            updates=updates,
            bound=cyc.predicted_cycle_recourse / 6,
            setup_forest=cyc.setup,
            before_update=remember_deleted,
            prefs_provider=lambda forest, up: cyc.prefs_for(forest, up, recorded),
        )
        return wl
    if base == "adv:shift-stars":
        return Workload(
            base, n, palette, adversary=adv.ShiftStarReduction(palette, n)
        )
    if base == "adv:delta2":
        adversary = adv.gen_delta2_doubling(n, seed=params.get("oblivious_seed"))
        return Workload(base, n, palette, adversary=adversary)
    if base == "adv:rand-c0-inc":
        gadgets = params.get("gadgets", max(1, n // (2 * palette.delta + 1)))
        updates, _, used = adv.gen_rand_c0_incremental(palette, gadgets, seed or 0)
        return Workload(base, used, palette, updates=updates)
    if base == "adv:rand-c0-dyn":
        h = params.get("h", 4)
        phases = params.get("phases", 50)
        setup, phase_updates, r1, r2, u = adv.gen_rand_c0_dynamic(palette, h, phases)
        return Workload(
            base, u + 1, palette, setup_updates=setup, updates=phase_updates
        )
    if base == "adv:toggle":
        h = params.get("h", 6)
        toggles = params.get("toggles", 1000)
        setup, seq, expected = adv.gen_toggle_workload(palette, h, toggles)
        need = 2 * ((palette.delta - 1) ** (h + 1) - 1) // (palette.delta - 2)
        return Workload(
            base, need, palette, setup_updates=setup, updates=seq,
            bound=float(expected),
        )
    if base == "random-rooted":
        steps = params.get("steps", 10 * n)
        return Workload(
            base, n, palette, updates=random_rooted_updates(n, palette, steps, seed or 0)
        )
    if base == "random-incremental":
        return Workload(
            base, n, palette, updates=random_incremental_updates(n, palette, seed or 0)
        )
    # otherwise: a sequence file
    try:
        with open(workload, "r", encoding="utf-8") as fh:
            updates = parse_sequence(fh.read())
    except OSError as exc:
        raise ValueError(f"unknown workload id or unreadable file: {workload}") from exc
    return Workload(workload, n, palette, updates=updates)


def random_rooted_updates(n, palette, steps, seed, delete_prob=0.35):
    """Random legal rooted-model updates over a shadow forest."""
    rng = random.Random(seed)
    sim = ColoredForest(n, palette)
    out = []
    while len(out) < steps:
        edges = list(sim.edges())
        if edges and rng.random() < delete_prob:
            a, b = rng.choice(edges)
            sim.delete_topology((a, b))
            out.append(Update.delete(a, b))
            continue
        for _ in range(60):
            r, p = rng.randrange(n), rng.randrange(n)
            if (
                sim.parent[r] is None
                and sim.find_root(p) != r
                and sim.degree(p) < palette.delta
                and sim.degree(r) < palette.delta
            ):
                sim.insert_topology(p, r, parent_hint=p)
                out.append(Update.insert(p, r, parent=p))
                break
        else:
            if not edges:
                raise RuntimeError("workload generator stuck")
            a, b = rng.choice(edges)
            sim.delete_topology((a, b))
            out.append(Update.delete(a, b))
    return out


def random_incremental_updates(n, palette, seed):
    """n-1 random insertions growing a single forest (degree-capped)."""
    rng = random.Random(seed)
    sim = ColoredForest(n, palette)
    out = []
    while sim.edge_count() < n - 1:
        u, v = rng.randrange(n), rng.randrange(n)
        if (
            u != v
            and sim.find_root(u) != sim.find_root(v)
            and sim.degree(u) < palette.delta
            and sim.degree(v) < palette.delta
        ):
            sim.insert_topology(u, v)
            out.append(Update.insert(u, v))
    return out


# -- experiments ---------------------------------------------------------------


@dataclass
class ExperimentConfig:
    algorithm: str
    workload: str
    palette: Palette
    n: int
    seed: Optional[int] = None
    reps: int = 1
    out: Optional[str] = None

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.algorithm in RANDOMIZED_ALGORITHMS and self.seed is None:
            raise ValueError("randomized algorithms require a seed")


def run_experiment(cfg: ExperimentConfig):
    """Run reps repetitions; returns CSV rows (list of dicts)."""
    rows = []
    for rep in range(cfg.reps):
        rep_seed = mix_seed(cfg.seed, rep) if cfg.seed is not None else None
        workload = make_workload(cfg.workload, cfg.palette, cfg.n, rep_seed)
        ledger = RecourseLedger()
        forest = ColoredForest(workload.n, cfg.palette, ledger)
        if workload.setup_forest is not None:
            workload.setup_forest(forest)
        apply = make_algorithm(cfg.algorithm, forest, rep_seed)
        tb = workload.tie_breaker
        total = 0
        worst = 0
        for idx, up in enumerate(workload.stream(forest)):
            if workload.before_update is not None:
                workload.before_update(forest, up)
            if workload.prefs_provider is not None and up.kind == "+":
                tb = TieBreaker.scripted([workload.prefs_provider(forest, up)])
            recourse = apply(up, tb)
            total += recourse
            worst = max(worst, recourse)
            sizes = (
                forest.component_edge_count(up.u),
                forest.component_edge_count(up.v),
            )
            rows.append(
                {
                    "rep": rep,
                    "update_idx": idx,
                    "kind": up.kind,
                    "recourse": recourse,
                    "component_sizes": f"{sizes[0]}|{sizes[1]}",
                    "cum_amortized": repr(total / (idx + 1)),
                    "amortized_exact": "",
                    "worst_case": "",
                    "bound": "",
                }
            )
        count = ledger.updates
        exact = Fraction(total, count) if count else Fraction(0)
        rows.append(
            {
                "rep": rep,
                "update_idx": "summary",
                "kind": "",
                "recourse": total,
                "component_sizes": "",
                "cum_amortized": repr(total / count) if count else "0",
                "amortized_exact": f"{exact.numerator}/{exact.denominator}",
                "worst_case": worst,
                "bound": "" if workload.bound is None else repr(workload.bound),
            }
        )
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(rows_to_csv(rows))
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
