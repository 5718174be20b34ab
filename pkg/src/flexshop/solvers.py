"""Exact search, exhaustive enumeration, and a left-tight list heuristic.

All three share :class:`flexshop.timing.PlacementEngine`, so a schedule any
of them returns is by construction the left-tight decoding of its decision
structure and passes the checker.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from time import perf_counter

from .model import Instance, Schedule
from .timing import DecodeInfeasible, PlacementEngine, PlaceState, decode, makespan

_INF = float("inf")


@dataclass(frozen=True)
class SolveResult:
    status: str  # optimal | feasible | infeasible | limit
    schedule: Schedule | None
    makespan: int | None
    lower_bound: int | None
    gap: float | None
    nodes: int
    wall_ms: int

    def to_dict(self) -> dict:
        from .jsonio import schedule_to_dict

        return {
            "status": self.status,
            "makespan": self.makespan,
            "lower_bound": self.lower_bound,
            "gap": self.gap,
            "nodes": self.nodes,
            "wall_ms": self.wall_ms,
            "schedule": None if self.schedule is None else schedule_to_dict(self.schedule),
        }


class _SearchLimit(Exception):
    pass


# ---------------------------------------------------------------------------
# Exhaustive enumeration
# ---------------------------------------------------------------------------


def brute_force(inst: Instance) -> SolveResult:
    """Decode every assignment and every per-machine permutation.

    Only strict improvements replace the incumbent and structures are visited
    in lexicographic order (assignments, then sequences, machines ascending),
    so ties resolve to the lexicographically first optimal structure. Strictly
    a reference implementation: the structure count is exponential, keep it to
    a handful of operations.
    """
    t0 = perf_counter()
    ids = sorted(op.id for op in inst.operations)
    eligible = {i: sorted(inst.op(i).eligible) for i in ids}
    machine_ids = sorted(mc.id for mc in inst.machines)

    best: Schedule | None = None
    best_mk: int | None = None
    tried = 0
    for combo in itertools.product(*(eligible[i] for i in ids)):
        assignment = dict(zip(ids, combo))
        per_machine = {k: [i for i in ids if assignment[i] == k] for k in machine_ids}
        for perms in itertools.product(*(itertools.permutations(per_machine[k]) for k in machine_ids)):
            tried += 1
            sequences = dict(zip(machine_ids, perms))
            try:
                sched = decode(inst, assignment, sequences)
            except DecodeInfeasible:
                continue
            mk = makespan(sched)
            if best_mk is None or mk < best_mk:
                best, best_mk = sched, mk
    wall = int((perf_counter() - t0) * 1000)
    if best is None:
        return SolveResult("infeasible", None, None, None, None, tried, wall)
    return SolveResult("optimal", best, best_mk, best_mk, 0.0, tried, wall)


# ---------------------------------------------------------------------------
# Shared lower bound
# ---------------------------------------------------------------------------


class _Bounder:
    """Lower bounds for partial placements, all three parts independently valid:

    the largest placed completion; a head recursion through the precedence
    graph (an unplaced operation starts no earlier than its release and its
    predecessors' partial completions, placed ones exact, unplaced ones
    bounded by head plus their own minimum partial length); and per machine
    its tail completion plus the processing still owed to it by unplaced
    operations eligible nowhere else.
    """

    def __init__(self, inst: Instance):
        from .model import topological_order

        self.inst = inst
        self.topo = topological_order(inst)
        self.preds = inst.predecessors
        self.pmin = {op.id: min(op.eligible.values()) for op in inst.operations}
        self.pbmin = {op.id: min(op.partial_units(k) for k in op.eligible) for op in inst.operations}
        self.solo = {op.id: next(iter(op.eligible)) for op in inst.operations if len(op.eligible) == 1}

    def bound(self, state: PlaceState) -> int:
        lb = 0
        head: dict[int, int] = {}
        for i in self.topo:
            rec = state.placed.get(i)
            if rec is not None:
                lb = max(lb, rec.completion)
                continue
            h = self.inst.op(i).release
            floor = 0
            for p in self.preds[i]:
                prec = state.placed.get(p)
                if prec is not None:
                    h = max(h, prec.partial_completion)
                    floor = max(floor, prec.completion)
                else:
                    h = max(h, head[p] + self.pbmin[p])
            head[i] = h
            lb = max(lb, h + self.pmin[i], floor)

        owed: dict[int, int] = {}
        for i, k in self.solo.items():
            if i not in state.placed:
                owed[k] = owed.get(k, 0) + self.inst.op(i).eligible[k]
        for k, extra in owed.items():
            lb = max(lb, state.tail_completion.get(k, 0) + extra)
        return lb


# ---------------------------------------------------------------------------
# Depth-first branch and bound
# ---------------------------------------------------------------------------


def solve_exact(inst: Instance, time_limit: float | None = None,
                node_limit: int | None = None) -> SolveResult:
    """Branch over (ready operation, machine) appends, prune on bound.

    A node appends one operation whose graph predecessors are all placed to
    the end of one of its machines' current sequences; children are visited
    by ascending operation id, then ascending (processing time, machine id).
    Limits are only checked between nodes, so runs are reproducible: a fixed
    node limit always explores the same tree regardless of wall time. With a
    tripped limit the result carries the best incumbent, the root bound, and
    status "limit"; exhausted searches prove optimality or infeasibility.
    """
    t0 = perf_counter()
    ids = sorted(op.id for op in inst.operations)
    engine = PlacementEngine(inst)
    bounder = _Bounder(inst)
    succ = inst.successors

    incumbent: Schedule | None = None
    ub: float = _INF
    try:
        incumbent = solve_greedy(inst)
        ub = makespan(incumbent)
    except DecodeInfeasible:
        pass

    state = PlaceState()
    root_lb = bounder.bound(state)
    nodes = 0
    if incumbent is not None and ub <= root_lb:
        wall = int((perf_counter() - t0) * 1000)
        return SolveResult("optimal", incumbent, int(ub), int(ub), 0.0, 0, wall)
    if time_limit is not None and time_limit <= 0:
        wall = int((perf_counter() - t0) * 1000)
        mk = None if incumbent is None else int(ub)
        gap = None if incumbent is None else (ub - root_lb) / (1e-10 + ub)
        return SolveResult("limit", incumbent, mk, root_lb, gap, 0, wall)

    pred_left = {i: len(inst.predecessors[i]) for i in ids}
    seqs: dict[int, list[int]] = {mc.id: [] for mc in inst.machines}
    machine_order = {i: [k for k, p in sorted(inst.op(i).eligible.items(), key=lambda kp: (kp[1], kp[0]))]
                     for i in ids}

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * len(ids) + 100))

    def descend() -> None:
        nonlocal incumbent, ub, nodes
        if len(state.placed) == len(ids):
            mk = max(so.completion for so in state.placed.values())
            if mk < ub:
                ub = mk
                incumbent = Schedule(ops=dict(state.placed),
                                     sequences={k: tuple(s) for k, s in seqs.items()})
            return
        for i in ids:
            if i in state.placed or pred_left[i]:
                continue
            for k in machine_order[i]:
                if node_limit is not None and nodes >= node_limit:
                    raise _SearchLimit
                if time_limit is not None and perf_counter() - t0 > time_limit:
                    raise _SearchLimit
                prev_tail = (state.tail_op.get(k), state.tail_completion.get(k))
                try:
                    rec = engine.placement(state, i, k)
                except DecodeInfeasible:
                    continue
                engine.commit(state, i, rec)
                seqs[k].append(i)
                for j in succ[i]:
                    pred_left[j] -= 1
                nodes += 1
                if bounder.bound(state) < ub:
                    descend()
                # undo
                for j in succ[i]:
                    pred_left[j] += 1
                seqs[k].pop()
                del state.placed[i]
                if prev_tail[0] is None:
                    del state.tail_op[k]
                    del state.tail_completion[k]
                else:
                    state.tail_op[k], state.tail_completion[k] = prev_tail

    hit_limit = False
    try:
        descend()
    except _SearchLimit:
        hit_limit = True

    wall = int((perf_counter() - t0) * 1000)
    if hit_limit:
        mk = None if incumbent is None else int(ub)
        gap = None if incumbent is None else (ub - root_lb) / (1e-10 + ub)
        return SolveResult("limit", incumbent, mk, root_lb, gap, nodes, wall)
    if incumbent is None:
        return SolveResult("infeasible", None, None, None, None, nodes, wall)
    return SolveResult("optimal", incumbent, int(ub), int(ub), 0.0, nodes, wall)


# ---------------------------------------------------------------------------
# Greedy list heuristic
# ---------------------------------------------------------------------------


def solve_greedy(inst: Instance) -> Schedule:
    """Repeatedly commit the ready (operation, machine) pair finishing first.

    Ties break on the lower operation id, then machine id. Placements are
    cached per (operation, machine) and recomputed only when that machine's
    tail has moved. A machine holding an unplaced pinned operation accepts
    another operation only if it would complete in time for the pinned
    setup; when no candidate survives, raises DecodeInfeasible.
    """
    engine = PlacementEngine(inst)
    state = PlaceState()
    ids = sorted(op.id for op in inst.operations)
    pred_left = {i: len(inst.predecessors[i]) for i in ids}
    ready = sorted(i for i in ids if pred_left[i] == 0)
    seqs: dict[int, list[int]] = {mc.id: [] for mc in inst.machines}
    version = {mc.id: 0 for mc in inst.machines}
    cache: dict[tuple[int, int], tuple[int, object]] = {}

    pinned_start: dict[int, tuple[int, int]] = {}  # machine -> (pinned start, op)
    for op in inst.operations:
        if op.fixed is not None:
            k, s = op.fixed
            if k not in pinned_start or s < pinned_start[k][0]:
                pinned_start[k] = (s, op.id)

    placed_count = 0
    while placed_count < len(ids):
        best = None  # (completion, op, machine, record)
        for i in ready:
            op = inst.op(i)
            for k in sorted(op.eligible):
                key = (i, k)
                hit = cache.get(key)
                if hit is not None and hit[0] == version[k]:
                    rec = hit[1]
                else:
                    try:
                        rec = engine.placement(state, i, k)
                    except DecodeInfeasible:
                        rec = None
                    cache[key] = (version[k], rec)
                if rec is None:
                    continue
                pin = pinned_start.get(k)
                if pin is not None and pin[1] != i and pin[1] not in state.placed:
                    if rec.completion + inst.setup_between(k, i, pin[1]) > pin[0]:
                        continue
                if best is None or (rec.completion, i, k) < (best[0], best[1], best[2]):
                    best = (rec.completion, i, k, rec)
        if best is None:
            stuck = sorted(i for i in ids if i not in state.placed)
            raise DecodeInfeasible(
                f"no operation can be placed (pinned starts block every candidate) among {stuck}")
        _, i, k, rec = best
        engine.commit(state, i, rec)
        seqs[k].append(i)
        version[k] += 1
        ready.remove(i)
        for j in inst.successors[i]:
            pred_left[j] -= 1
            if pred_left[j] == 0:
                ready.append(j)
        ready.sort()
        placed_count += 1

    return Schedule(ops=state.placed, sequences={k: tuple(s) for k, s in seqs.items()})
