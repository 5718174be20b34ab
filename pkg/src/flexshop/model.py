"""Domain model: instances, schedules, validation, and big-M derivation.

Times are plain non-negative 64-bit integers everywhere. The overlap fraction
of an operation is stored in integer hundredths (``theta_hundredths``) so the
partial-processing length ``ceil(theta * p)`` is exact and instances serialize
losslessly.

Setups come in two interchangeable representations on a machine: explicit maps
(first-setup per operation, pair setup per ordered operation pair), or a
:class:`SetupRule` of four constants from which both are computed out of the
operations' size/color/varnish features. Rule machines keep large generated
instances compact: the pair map is quadratic in the number of eligible
operations and is pure arithmetic anyway.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

MAX_TIME = (1 << 63) - 1


class CycleError(ValueError):
    """A precedence cycle was found; ``witness`` lists op ids along the cycle."""

    def __init__(self, witness: list[int]):
        self.witness = witness
        super().__init__("precedence cycle: " + " -> ".join(str(i) for i in witness))


@dataclass(frozen=True)
class Violation:
    """One broken rule, naming the operations involved."""

    rule: str
    op_ids: tuple[int, ...]
    detail: str

    def to_dict(self) -> dict:
        return {"rule": self.rule, "op_ids": list(self.op_ids), "detail": self.detail}

    def __str__(self) -> str:
        return f"{self.rule} {list(self.op_ids)}: {self.detail}"


@dataclass(frozen=True)
class Operation:
    id: int
    job: int
    eligible: dict[int, int]  # machine id -> processing time (>= 1)
    theta_hundredths: int = 100  # overlap fraction, in hundredths of the processing time
    release: int = 0
    fixed: tuple[int, int] | None = None  # (machine id, pinned start)
    size: int = 1
    color: int = 1
    varnish: int = 1

    def partial_units(self, machine: int) -> int:
        """ceil(theta * p) on the given machine: work required before successors may start."""
        p = self.eligible[machine]
        return -(-self.theta_hundredths * p // 100)


@dataclass(frozen=True)
class SetupRule:
    """Feature-driven setup times shared by every operation pair on one machine.

    The pair setup adds ``st_smaller`` when the predecessor's size is below the
    successor's (``st_larger`` when above, nothing when equal), plus ``ct`` on a
    color change and ``vt`` on a varnish change. The first-on-machine setup is
    the worst case: ``max(st_smaller, st_larger) + ct + vt``.
    """

    st_smaller: int
    st_larger: int
    ct: int
    vt: int

    def first(self) -> int:
        return max(self.st_smaller, self.st_larger) + self.ct + self.vt

    def between(self, pred: Operation, succ: Operation) -> int:
        g = 0
        if pred.size < succ.size:
            g += self.st_smaller
        elif pred.size > succ.size:
            g += self.st_larger
        if pred.color != succ.color:
            g += self.ct
        if pred.varnish != succ.varnish:
            g += self.vt
        return g


@dataclass(frozen=True)
class Machine:
    id: int
    windows: tuple[tuple[int, int], ...] = ()  # ordered disjoint unavailability [begin, end]
    setup_first: dict[int, int] | None = None  # op id -> first-on-machine setup
    setup_between: dict[tuple[int, int], int] | None = None  # (pred, succ) -> pair setup
    setup_rule: SetupRule | None = None

    def last_window_end(self) -> int:
        return self.windows[-1][1] if self.windows else 0


@dataclass(frozen=True)
class Instance:
    num_machines: int
    operations: tuple[Operation, ...]
    arcs: tuple[tuple[int, int], ...]
    machines: tuple[Machine, ...]

    # -- lookups -------------------------------------------------------------

    @cached_property
    def ops_by_id(self) -> dict[int, Operation]:
        return {op.id: op for op in self.operations}

    @cached_property
    def machines_by_id(self) -> dict[int, Machine]:
        return {mc.id: mc for mc in self.machines}

    @cached_property
    def successors(self) -> dict[int, tuple[int, ...]]:
        succ: dict[int, list[int]] = {op.id: [] for op in self.operations}
        for i, j in self.arcs:
            succ[i].append(j)
        return {i: tuple(sorted(js)) for i, js in succ.items()}

    @cached_property
    def predecessors(self) -> dict[int, tuple[int, ...]]:
        pred: dict[int, list[int]] = {op.id: [] for op in self.operations}
        for i, j in self.arcs:
            pred[j].append(i)
        return {j: tuple(sorted(is_)) for j, is_ in pred.items()}

    @cached_property
    def eligible_ops(self) -> dict[int, tuple[int, ...]]:
        """Machine id -> ascending ids of operations that may run on it."""
        bk: dict[int, list[int]] = {mc.id: [] for mc in self.machines}
        for op in self.operations:
            for k in op.eligible:
                if k in bk:
                    bk[k].append(op.id)
        return {k: tuple(sorted(ids)) for k, ids in bk.items()}

    def op(self, op_id: int) -> Operation:
        try:
            return self.ops_by_id[op_id]
        except KeyError:
            raise ValueError(f"unknown operation id {op_id}") from None

    def machine(self, machine_id: int) -> Machine:
        try:
            return self.machines_by_id[machine_id]
        except KeyError:
            raise ValueError(f"unknown machine id {machine_id}") from None

    # -- setup dispatch ------------------------------------------------------

    def setup_first(self, machine_id: int, op_id: int) -> int:
        mc = self.machine(machine_id)
        if mc.setup_rule is not None:
            return mc.setup_rule.first()
        assert mc.setup_first is not None
        return mc.setup_first[op_id]

    def setup_between(self, machine_id: int, pred_id: int, succ_id: int) -> int:
        mc = self.machine(machine_id)
        if mc.setup_rule is not None:
            return mc.setup_rule.between(self.op(pred_id), self.op(succ_id))
        assert mc.setup_between is not None
        return mc.setup_between[(pred_id, succ_id)]


@dataclass(frozen=True)
class ScheduledOp:
    machine: int
    setup_start: int
    setup_len: int
    start: int
    partial_completion: int
    completion: int


@dataclass(frozen=True)
class Schedule:
    ops: dict[int, ScheduledOp]
    sequences: dict[int, tuple[int, ...]]  # machine id -> op ids in processing order


@dataclass(frozen=True)
class BigM:
    m1: int
    m2: int
    m3: int


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _check_time(target: list[Violation], rule: str, op_ids: tuple[int, ...], label: str, value: int) -> bool:
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= MAX_TIME:
        target.append(Violation(rule, op_ids, f"{label} must be a non-negative 64-bit integer, got {value!r}"))
        return False
    return True


def validate_instance(inst: Instance) -> list[Violation]:
    """Structural validation. Empty list means every domain invariant holds."""
    report: list[Violation] = []

    if inst.num_machines < 1:
        report.append(Violation("machine count", (), f"need at least one machine, got {inst.num_machines}"))
    machine_ids = {mc.id for mc in inst.machines}
    if sorted(machine_ids) != list(range(1, inst.num_machines + 1)):
        report.append(Violation("machine ids", (), f"machine ids must be 1..{inst.num_machines}"))

    op_ids = [op.id for op in inst.operations]
    if sorted(op_ids) != list(range(1, len(op_ids) + 1)):
        report.append(Violation("operation ids", (), f"operation ids must be 1..{len(op_ids)}"))
        return report  # everything below keys off well-formed ids

    known = set(op_ids)
    jobs = {op.id: op.job for op in inst.operations}

    for op in inst.operations:
        if not op.eligible:
            report.append(Violation("eligibility", (op.id,), "empty eligible-machine set"))
        for k, p in op.eligible.items():
            if k not in machine_ids:
                report.append(Violation("eligibility", (op.id,), f"eligible machine {k} does not exist"))
            if not isinstance(p, int) or isinstance(p, bool) or not 1 <= p <= MAX_TIME:
                report.append(Violation("processing time", (op.id,), f"p on machine {k} must be an integer >= 1, got {p!r}"))
        if not 1 <= op.theta_hundredths <= 100:
            report.append(Violation("overlap fraction", (op.id,), f"theta_hundredths must be in 1..100, got {op.theta_hundredths}"))
        _check_time(report, "release", (op.id,), "release", op.release)
        if op.fixed is not None:
            k_fix, s_fix = op.fixed
            if set(op.eligible) != {k_fix}:
                report.append(Violation("fixed", (op.id,), "fixed operation must have singleton machine set"))
            _check_time(report, "fixed", (op.id,), "fixed start", s_fix)

    # theta below 1 only makes sense for operations with successors
    has_succ = {i for i, _ in inst.arcs}
    for op in inst.operations:
        if op.theta_hundredths != 100 and op.id not in has_succ:
            report.append(Violation("overlap fraction", (op.id,), "theta below 1 on an operation with no successors"))

    seen_arcs = set()
    for i, j in inst.arcs:
        if i not in known or j not in known:
            report.append(Violation("arc", (i, j), "arc references unknown operation"))
            continue
        if i == j:
            report.append(Violation("arc", (i,), "self-loop (a one-arc cycle)"))
            continue
        if (i, j) in seen_arcs:
            report.append(Violation("arc", (i, j), "duplicate arc"))
        seen_arcs.add((i, j))
        if jobs[i] != jobs[j]:
            report.append(Violation("arc", (i, j), f"arc crosses jobs {jobs[i]} and {jobs[j]}"))

    try:
        topological_order(inst)
    except CycleError as exc:
        report.append(Violation("precedence", tuple(exc.witness), "cycle: " + " -> ".join(map(str, exc.witness))))

    for mc in inst.machines:
        prev_end = None
        for b, e in mc.windows:
            ok = _check_time(report, "calendar", (), f"machine {mc.id} window begin", b)
            ok = _check_time(report, "calendar", (), f"machine {mc.id} window end", e) and ok
            if not ok:
                continue
            if b >= e:
                report.append(Violation("calendar", (), f"machine {mc.id} window [{b},{e}] is empty or reversed"))
            if prev_end is not None and b <= prev_end:
                report.append(Violation("calendar", (), f"machine {mc.id} windows touch or overlap at {b} (previous end {prev_end})"))
            prev_end = e

        has_maps = mc.setup_first is not None or mc.setup_between is not None
        if mc.setup_rule is not None and has_maps:
            report.append(Violation("setup", (), f"machine {mc.id} has both a setup rule and explicit setup maps"))
        elif mc.setup_rule is None:
            if mc.setup_first is None or mc.setup_between is None:
                report.append(Violation("setup", (), f"machine {mc.id} needs a setup rule or both setup maps"))
            else:
                bk = set(inst.eligible_ops.get(mc.id, ()))
                if set(mc.setup_first) != bk:
                    report.append(Violation("setup", (), f"machine {mc.id} first-setup keys do not match its eligible operations"))
                want_pairs = {(i, j) for i in bk for j in bk if i != j}
                if set(mc.setup_between) != want_pairs:
                    report.append(Violation("setup", (), f"machine {mc.id} pair-setup keys do not cover exactly its eligible pairs"))
                for g in mc.setup_first.values():
                    _check_time(report, "setup", (), f"machine {mc.id} first setup", g)
                for g in mc.setup_between.values():
                    _check_time(report, "setup", (), f"machine {mc.id} pair setup", g)
        else:
            rule = mc.setup_rule
            for label, val in (("st_smaller", rule.st_smaller), ("st_larger", rule.st_larger), ("ct", rule.ct), ("vt", rule.vt)):
                _check_time(report, "setup", (), f"machine {mc.id} rule {label}", val)

    return report


# ---------------------------------------------------------------------------
# Big-M constants
# ---------------------------------------------------------------------------


def big_m_constants(inst: Instance) -> BigM:
    """The three model constants, from the instance data alone.

    m1 bounds every setup length. m3 bounds every unavailability-window end.
    m2 bounds any sensible schedule horizon: the latest window end plus, for
    each operation, its worst eligible processing time plus the worst setup
    that could precede it there. Empty maxima count as 0 so the formulas stay
    total on window-free or setup-free instances.
    """
    m1 = 0
    m3 = 0
    for mc in inst.machines:
        m3 = max(m3, mc.last_window_end())
        if mc.setup_rule is not None:
            rule = mc.setup_rule
            m1 = max(m1, rule.first(), rule.st_smaller + rule.ct + rule.vt, rule.st_larger + rule.ct + rule.vt)
        else:
            for g in (mc.setup_first or {}).values():
                m1 = max(m1, g)
            for g in (mc.setup_between or {}).values():
                m1 = max(m1, g)

    m2 = m3
    for op in inst.operations:
        best = 0
        for k, p in op.eligible.items():
            worst_setup = inst.setup_first(k, op.id)
            if inst.machine(k).setup_rule is None:
                # explicit pair setups may exceed the first-on-machine setup
                for other in inst.eligible_ops[k]:
                    if other != op.id:
                        worst_setup = max(worst_setup, inst.setup_between(k, other, op.id))
            # a rule machine's pair setup never exceeds its first setup
            best = max(best, p + worst_setup)
        m2 += best
    return BigM(m1=m1, m2=m2, m3=m3)


# ---------------------------------------------------------------------------
# Topological order
# ---------------------------------------------------------------------------


def topological_order(inst: Instance) -> list[int]:
    """Operation ids, every arc tail before its head, lowest id first among ready ops."""
    import heapq

    indegree = {op.id: 0 for op in inst.operations}
    succ: dict[int, list[int]] = {op.id: [] for op in inst.operations}
    for i, j in inst.arcs:
        if i in indegree and j in indegree and i != j:
            indegree[j] += 1
            succ[i].append(j)

    ready = [i for i, d in indegree.items() if d == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for j in succ[i]:
            indegree[j] -= 1
            if indegree[j] == 0:
                heapq.heappush(ready, j)

    if len(order) != len(indegree):
        # walk predecessor links among the leftover nodes until one repeats
        stuck = {i for i, d in indegree.items() if d > 0}
        pred_in_stuck = {j: [i for i, j2 in inst.arcs if j2 == j and i in stuck] for j in stuck}
        node = min(stuck)
        seen: list[int] = []
        while node not in seen:
            seen.append(node)
            node = min(pred_in_stuck[node])
        cycle = seen[seen.index(node):] + [node]
        raise CycleError(list(reversed(cycle)))
    return order
