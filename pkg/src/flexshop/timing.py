"""Placement arithmetic on machine calendars, list decoding, and the checker.

The ground rules, shared by every routine here:

* Processing is resumable: work suspends over unavailability windows and the
  elapsed completion time grows by each window crossed.

* Starts may not fall inside a window. With a window [b, e], legal starts are
  s <= b - 1 or s >= e. Completions may touch a window begin (c <= b) or must
  clear its end (c >= e + 1), which recomputation from a legal start yields
  automatically.

* Setups are not resumable: the setup interval [start - setup_len, start]
  may touch window endpoints but never their interior, and on one machine a
  setup begins no earlier than the previous operation's completion.

* A successor may start once its predecessor's partial completion is reached,
  but must not complete earlier than the predecessor completes.
"""

from __future__ import annotations

from typing import Iterator, NamedTuple, Sequence

from .model import Instance, Schedule, ScheduledOp, Violation

Calendar = Sequence[tuple[int, int]]


class DecodeInfeasible(ValueError):
    """The decision structure admits no schedule (deadlock or fixed-op clash)."""


class PlacementQuery(NamedTuple):
    calendar: Calendar
    ready: int
    setup_len: int
    proc: int
    partial: int


class PlacementResult(NamedTuple):
    setup_start: int
    start: int
    partial_completion: int
    completion: int


def _finish(calendar: Calendar, start: int, duration: int) -> int:
    """Completion time of `duration` work units from `start`, skipping windows."""
    t = start
    remaining = duration
    for b, e in calendar:
        if e <= t:
            continue
        if t + remaining <= b:
            break
        remaining -= max(0, b - t)
        t = e
    return t + remaining


def _legal_start(calendar: Calendar, s: int) -> bool:
    return all(s <= b - 1 or s >= e for b, e in calendar)


def _setup_fits(calendar: Calendar, setup_start: int, start: int) -> bool:
    return all(start <= b or setup_start >= e for b, e in calendar)


def _earliest_legal(calendar: Calendar, ready: int, setup_len: int) -> int:
    """Smallest start >= max(ready, setup_len) that is legal with its setup.

    A window [b, e] admits a start at b - 1 or earlier (the setup then also
    ends by b - 1 < b) or from e + setup_len on, so any start caught in
    between jumps to e + setup_len. Windows are ordered, so one pass settles.
    """
    s = max(ready, setup_len)
    for b, e in calendar:
        if s <= b - 1:
            break
        if s - setup_len >= e:
            continue
        s = e + setup_len
    return s


def completion_time(calendar: Calendar, start: int, duration: int) -> int:
    if not _legal_start(calendar, start):
        raise ValueError(f"start {start} lies inside an unavailability window")
    return _finish(calendar, start, duration)


def earliest_start(query: PlacementQuery) -> PlacementResult:
    calendar = query.calendar
    s = _earliest_legal(calendar, query.ready, query.setup_len)
    return PlacementResult(
        setup_start=s - query.setup_len,
        start=s,
        partial_completion=_finish(calendar, s, query.partial),
        completion=_finish(calendar, s, query.proc),
    )


# ---------------------------------------------------------------------------
# Incremental placement shared by decode and the solvers
# ---------------------------------------------------------------------------


class PlaceState:
    """Mutable search state: placed operations plus each machine's tail."""

    __slots__ = ("placed", "tail_op", "tail_completion")

    def __init__(self) -> None:
        self.placed: dict[int, ScheduledOp] = {}
        self.tail_op: dict[int, int] = {}
        self.tail_completion: dict[int, int] = {}


class PlacementEngine:
    """Appends operations to machine tails at their earliest legal times.

    A placement honors, in one shot: the release time, window legality of the
    start, the non-resumable setup ending exactly at the start and beginning
    no earlier than the machine's previous completion, predecessors' partial
    completions as a start floor, and predecessors' completions as a
    completion floor. The completion floor is met by searching for the
    minimal legal start whose resulting completion clears it, which keeps
    every placement left-tight.
    """

    def __init__(self, inst: Instance):
        self.inst = inst
        self.calendars = {mc.id: mc.windows for mc in inst.machines}
        self.preds = inst.predecessors

    def placement(self, state: PlaceState, op_id: int, machine_id: int) -> ScheduledOp:
        """Compute the earliest placement without mutating `state`.

        Raises DecodeInfeasible when a pinned operation cannot run exactly at
        its pinned start in this position.
        """
        inst = self.inst
        op = inst.op(op_id)
        calendar = self.calendars[machine_id]
        prev = state.tail_op.get(machine_id)
        if prev is None:
            setup_len = inst.setup_first(machine_id, op_id)
            ready = op.release
        else:
            setup_len = inst.setup_between(machine_id, prev, op_id)
            ready = max(op.release, state.tail_completion[machine_id] + setup_len)

        completion_floor = 0
        for p in self.preds[op_id]:
            rec = state.placed[p]
            ready = max(ready, rec.partial_completion)
            completion_floor = max(completion_floor, rec.completion)

        proc = op.eligible[machine_id]
        partial = op.partial_units(machine_id)

        if op.fixed is not None:
            pinned = op.fixed[1]
            s = _earliest_legal(calendar, max(ready, pinned), setup_len)
            if s != pinned:
                raise DecodeInfeasible(
                    f"operation {op_id} is pinned to start {pinned} but the earliest "
                    f"feasible start in this position is {s}")
            completion = _finish(calendar, s, proc)
            if completion < completion_floor:
                raise DecodeInfeasible(
                    f"operation {op_id} is pinned to start {pinned} yet must not "
                    f"complete before {completion_floor}")
        else:
            s = _earliest_legal(calendar, ready, setup_len)
            completion = _finish(calendar, s, proc)
            if completion < completion_floor:
                s, completion = self._lift(calendar, s, setup_len, proc, completion_floor)

        return ScheduledOp(
            machine=machine_id,
            setup_start=s - setup_len,
            setup_len=setup_len,
            start=s,
            partial_completion=_finish(calendar, s, partial),
            completion=completion,
        )

    @staticmethod
    def _lift(calendar: Calendar, lo: int, setup_len: int, proc: int, floor: int) -> tuple[int, int]:
        """Minimal legal start above `lo` whose completion reaches `floor`.

        Completion is nondecreasing in the start, so binary search on the
        raw time axis works; each probe is legalized first. The bracket is
        sound because a start at `floor` completes at floor + proc > floor.
        """
        hi = _earliest_legal(calendar, floor, setup_len)
        lo += 1
        while lo < hi:
            mid = (lo + hi) // 2
            s_mid = _earliest_legal(calendar, mid, setup_len)
            if _finish(calendar, s_mid, proc) >= floor:
                hi = mid
            else:
                lo = mid + 1
        s = _earliest_legal(calendar, lo, setup_len)
        return s, _finish(calendar, s, proc)

    def commit(self, state: PlaceState, op_id: int, rec: ScheduledOp) -> None:
        state.placed[op_id] = rec
        state.tail_op[rec.machine] = op_id
        state.tail_completion[rec.machine] = rec.completion


# ---------------------------------------------------------------------------
# Decoding a decision structure into a schedule
# ---------------------------------------------------------------------------


def decode(inst: Instance, assignment: dict[int, int], sequences: dict[int, Sequence[int]]) -> Schedule:
    """Left-tight schedule from a machine assignment and per-machine orders.

    Operations are placed one at a time: among the operations whose graph
    predecessors are all placed and which sit at the front of their machine's
    remaining sequence, the lowest id goes next. A pinned operation must land
    exactly on its pinned start. Raises DecodeInfeasible when no operation is
    placeable (the sequences deadlock against the precedence graph) and
    ValueError when the structure itself is malformed.
    """
    ids = {op.id for op in inst.operations}
    if set(assignment) != ids:
        raise ValueError("assignment must cover exactly the instance's operations")
    for i, k in assignment.items():
        if k not in inst.op(i).eligible:
            raise ValueError(f"operation {i} assigned to machine {k} outside its eligible set")
    seq: dict[int, list[int]] = {mc.id: list(sequences.get(mc.id, ())) for mc in inst.machines}
    unknown = set(sequences) - set(seq)
    if unknown:
        raise ValueError(f"sequences reference unknown machines {sorted(unknown)}")
    listed: list[int] = [i for k in sorted(seq) for i in seq[k]]
    if sorted(listed) != sorted(ids):
        raise ValueError("sequences must list every operation exactly once")
    for k, ops_here in seq.items():
        for i in ops_here:
            if assignment[i] != k:
                raise ValueError(f"operation {i} appears in machine {k}'s sequence but is assigned to {assignment[i]}")

    engine = PlacementEngine(inst)
    state = PlaceState()
    pred_left = {i: len(inst.predecessors[i]) for i in ids}
    front = {k: 0 for k in seq}
    remaining = len(ids)
    while remaining:
        best = None
        for k in sorted(seq):
            if front[k] < len(seq[k]):
                i = seq[k][front[k]]
                if pred_left[i] == 0 and (best is None or i < best[0]):
                    best = (i, k)
        if best is None:
            stuck = sorted(i for i in ids if i not in state.placed)
            raise DecodeInfeasible(f"deadlock: no placeable operation among {stuck}")
        i, k = best
        rec = engine.placement(state, i, k)
        engine.commit(state, i, rec)
        front[k] += 1
        for j in inst.successors[i]:
            pred_left[j] -= 1
        remaining -= 1

    return Schedule(ops=state.placed, sequences={k: tuple(seq[k]) for k in seq})


def makespan(sched: Schedule) -> int:
    return max((so.completion for so in sched.ops.values()), default=0)


# ---------------------------------------------------------------------------
# Checking an arbitrary schedule against an instance
# ---------------------------------------------------------------------------


def check_schedule(inst: Instance, sched: Schedule) -> list[Violation]:
    """Every broken scheduling rule, empty when the schedule is feasible.

    Raises ValueError when the schedule references operations or machines the
    instance does not define; everything else is reported, not raised.
    """
    out: list[Violation] = []
    ids = {op.id for op in inst.operations}

    unknown_ops = sorted(set(sched.ops) - ids)
    if unknown_ops:
        raise ValueError(f"schedule references unknown operations {unknown_ops}")
    unknown_machines = sorted(set(sched.sequences) - set(inst.machines_by_id))
    if unknown_machines:
        raise ValueError(f"schedule references unknown machines {unknown_machines}")
    for k, seq_ids in sched.sequences.items():
        bad = sorted(set(seq_ids) - ids)
        if bad:
            raise ValueError(f"machine {k} sequence references unknown operations {bad}")

    for i in sorted(ids - set(sched.ops)):
        out.append(Violation("structure", (i,), "operation missing from schedule"))

    # sequences must list exactly the operations placed on each machine, once
    seen_in_seq: dict[int, int] = {}
    for k, seq_ids in sorted(sched.sequences.items()):
        for i in seq_ids:
            if i in seen_in_seq:
                out.append(Violation("structure", (i,), "operation listed in more than one sequence position"))
            seen_in_seq[i] = k
    for i, so in sorted(sched.ops.items()):
        if seen_in_seq.get(i) != so.machine:
            out.append(Violation("structure", (i,), f"operation not listed in machine {so.machine}'s sequence"))
    for i, k in sorted(seen_in_seq.items()):
        if i not in sched.ops:
            out.append(Violation("structure", (i,), f"machine {k} sequence lists an unscheduled operation"))

    for i, so in sorted(sched.ops.items()):
        op = inst.op(i)
        eligible = so.machine in op.eligible

        if not eligible:
            out.append(Violation("assignment not eligible", (i,),
                                 f"machine {so.machine} is not in the eligible set"))
        if min(so.setup_start, so.setup_len, so.start, so.partial_completion, so.completion) < 0:
            out.append(Violation("structure", (i,), "negative time value"))
        if so.setup_start + so.setup_len != so.start:
            out.append(Violation("structure", (i,),
                                 f"setup interval [{so.setup_start}, {so.setup_start + so.setup_len}] does not end at start {so.start}"))
        if not so.start <= so.partial_completion <= so.completion:
            out.append(Violation("structure", (i,),
                                 f"times out of order: start {so.start}, partial {so.partial_completion}, completion {so.completion}"))
        if so.start < op.release:
            out.append(Violation("release violated", (i,),
                                 f"start {so.start} is before release {op.release}"))
        if op.fixed is not None and (so.machine, so.start) != op.fixed:
            out.append(Violation("fixed operation moved", (i,),
                                 f"pinned to machine {op.fixed[0]} at {op.fixed[1]}, scheduled on {so.machine} at {so.start}"))

        calendar = inst.machine(so.machine).windows if so.machine in inst.machines_by_id else ()
        if so.machine not in inst.machines_by_id:
            out.append(Violation("structure", (i,), f"machine {so.machine} does not exist"))
            continue
        for b, e in calendar:
            if b <= so.start <= e - 1:
                out.append(Violation("start inside unavailability", (i,),
                                     f"start {so.start} lies in window [{b}, {e}]"))
            if b < so.completion <= e:
                out.append(Violation("completion inside unavailability", (i,),
                                     f"completion {so.completion} lies in window [{b}, {e}]"))
            if b < so.partial_completion <= e:
                out.append(Violation("completion inside unavailability", (i,),
                                     f"partial completion {so.partial_completion} lies in window [{b}, {e}]"))
        if not _setup_fits(calendar, so.setup_start, so.start):
            out.append(Violation("setup inside unavailability", (i,),
                                 f"setup interval [{so.setup_start}, {so.start}] overlaps a window"))
        if eligible:
            want_c = _finish(calendar, so.start, op.eligible[so.machine])
            if so.completion != want_c:
                out.append(Violation("completion mismatch", (i,),
                                     f"completion {so.completion}, but start {so.start} yields {want_c}"))
            want_cb = _finish(calendar, so.start, op.partial_units(so.machine))
            if so.partial_completion != want_cb:
                out.append(Violation("partial completion mismatch", (i,),
                                     f"partial completion {so.partial_completion}, but start {so.start} yields {want_cb}"))

    for i, j in sorted(inst.arcs):
        if i not in sched.ops or j not in sched.ops:
            continue
        a, b = sched.ops[i], sched.ops[j]
        if a.partial_completion > b.start:
            out.append(Violation("precedence overlap violated", (i, j),
                                 f"partial completion {a.partial_completion} is after successor start {b.start}"))
        if a.completion > b.completion:
            out.append(Violation("precedence end order violated", (i, j),
                                 f"completion {a.completion} is after successor completion {b.completion}"))

    for k, seq_ids in sorted(sched.sequences.items()):
        placed = [i for i in seq_ids if i in sched.ops]
        calendar = inst.machine(k).windows
        for pos, i in enumerate(placed):
            so = sched.ops[i]
            if so.machine != k:
                continue  # already a structure violation
            if k in inst.op(i).eligible:
                if pos == 0:
                    want = inst.setup_first(k, i)
                elif k in inst.op(placed[pos - 1]).eligible:
                    want = inst.setup_between(k, placed[pos - 1], i)
                else:
                    want = None  # predecessor itself misassigned; its own violation covers it
                if want is not None and so.setup_len != want:
                    out.append(Violation("setup length mismatch", (i,),
                                         f"setup length {so.setup_len} on machine {k}, rule requires {want}"))
            if pos > 0:
                prev_so = sched.ops[placed[pos - 1]]
                if so.setup_start < prev_so.completion:
                    out.append(Violation("machine overlap", (placed[pos - 1], i),
                                         f"setup starts at {so.setup_start} before previous completion {prev_so.completion}"))

    return out


def iter_one_unit_left_shifts(inst: Instance, sched: Schedule) -> Iterator[tuple[int, Schedule]]:
    """Variants of `sched` with one operation started one unit earlier.

    The shifted operation's setup window, partial completion, and completion
    are recomputed from its new start (setup length kept); everything else is
    untouched. Useful for probing left-tightness: a left-tight schedule turns
    every such variant infeasible.
    """
    for i in sorted(sched.ops):
        so = sched.ops[i]
        op = inst.op(i)
        calendar = inst.machine(so.machine).windows if so.machine in inst.machines_by_id else ()
        s = so.start - 1
        proc = op.eligible.get(so.machine, so.completion - so.start)
        partial = op.partial_units(so.machine) if so.machine in op.eligible else proc
        shifted = ScheduledOp(
            machine=so.machine,
            setup_start=s - so.setup_len,
            setup_len=so.setup_len,
            start=s,
            partial_completion=_finish(calendar, s, partial),
            completion=_finish(calendar, s, proc),
        )
        ops = dict(sched.ops)
        ops[i] = shifted
        yield i, Schedule(ops=ops, sequences=sched.sequences)
