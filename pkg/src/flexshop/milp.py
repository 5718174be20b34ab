"""Mixed-integer model construction, LP-format export, and row evaluation.

The model minimizes the makespan ``Cmax`` over machine assignment binaries
``x_i_k``, immediate-predecessor binaries ``yI_i_j_k`` (operation i directly
precedes j on machine k), per-window indicator binaries (``v`` start past the
window, ``w`` completion past it, ``wb`` likewise for the partial
completion), and continuous start/completion/setup quantities. All input
data is integral, every coefficient stays integral, and row evaluation is
exact integer arithmetic.

Three derived constants make the indicator rows work: ``m1`` bounds setup
lengths, ``m3`` bounds window ends, ``m2`` bounds the schedule horizon; see
:func:`flexshop.model.big_m_constants`.

One deliberate deviation from the obvious chain-count formulation: per
machine the immediate-predecessor pairs satisfy ``sum(y) >= sum(x) - 1``
rather than equality, so an entirely unused machine (``sum(x) = 0``) stays
feasible. The degree caps and the gap rows still force one simple chain
through every operation the machine actually hosts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import BigM, Instance, Schedule, big_m_constants
from .timing import makespan as schedule_makespan


@dataclass(frozen=True)
class Var:
    name: str
    kind: str  # "B" binary, "C" continuous
    lb: int = 0
    ub: int | None = None


@dataclass(frozen=True)
class Row:
    name: str
    terms: tuple[tuple[int, str], ...]
    sense: str  # "<=", "=", ">="
    rhs: int


@dataclass(frozen=True)
class MilpModel:
    variables: tuple[Var, ...]
    constraints: tuple[Row, ...]
    objective: str = "Cmax"

    def binaries(self) -> list[str]:
        return [v.name for v in self.variables if v.kind == "B"]


@dataclass(frozen=True)
class RowViolation:
    name: str
    lhs: int
    sense: str
    rhs: int

    def __str__(self) -> str:
        return f"{self.name}: {self.lhs} {self.sense} {self.rhs} fails"


def _x(i: int, k: int) -> str:
    return f"x_{i}_{k}"


def _y(i: int, j: int, k: int) -> str:
    return f"yI_{i}_{j}_{k}"


def build_model(inst: Instance, bigm: BigM | None = None) -> MilpModel:
    if bigm is None:
        bigm = big_m_constants(inst)
    m1, m2, m3 = bigm.m1, bigm.m2, bigm.m3

    ops = sorted(op.id for op in inst.operations)
    op_of = inst.ops_by_id
    eligible = {i: sorted(op_of[i].eligible) for i in ops}
    hosts = {k: inst.eligible_ops[k] for k in sorted(inst.machines_by_id)}
    windows = {k: inst.machine(k).windows for k in hosts}
    has_succ = sorted({i for i, _ in inst.arcs})
    arcs = sorted(inst.arcs)
    gap_pairs = [(i, j) for i in ops for j in ops
                 if i != j and not set(eligible[i]).isdisjoint(eligible[j])]

    variables: list[Var] = []
    for i in ops:
        for k in eligible[i]:
            variables.append(Var(_x(i, k), "B"))
    for k, here in hosts.items():
        for i in here:
            for j in here:
                if i != j:
                    variables.append(Var(_y(i, j, k), "B"))
    for prefix in ("v", "w", "wb"):
        for i in ops:
            for k in eligible[i]:
                for ell in range(1, len(windows[k]) + 1):
                    variables.append(Var(f"{prefix}_{i}_{k}_{ell}", "B"))
    for prefix in ("s", "c", "cb", "pp", "ppb", "u", "ub"):
        for i in ops:
            variables.append(Var(f"{prefix}_{i}", "C"))
    for prefix in ("xih", "xib"):
        for i in ops:
            for k in eligible[i]:
                variables.append(Var(f"{prefix}_{i}_{k}", "C"))
    for i in ops:
        variables.append(Var(f"xi_{i}", "C"))
    variables.append(Var("Cmax", "C"))

    rows: list[Row] = []

    def row(name: str, terms: list[tuple[int, str]], sense: str, rhs: int) -> None:
        rows.append(Row(name, tuple(terms), sense, rhs))

    for i in ops:
        row(f"assign_{i}", [(1, _x(i, k)) for k in eligible[i]], "=", 1)
    for i in ops:
        row(f"proc_def_{i}",
            [(1, f"pp_{i}")] + [(-op_of[i].eligible[k], _x(i, k)) for k in eligible[i]], "=", 0)
    for i in ops:
        row(f"release_{i}", [(1, f"s_{i}")], ">=", op_of[i].release)
    for i in ops:
        if op_of[i].fixed is not None:
            row(f"fix_start_{i}", [(1, f"s_{i}")], "=", op_of[i].fixed[1])
    for i in has_succ:
        row(f"overlap_def_{i}",
            [(1, f"ppb_{i}")] + [(-op_of[i].partial_units(k), _x(i, k)) for k in eligible[i]], "=", 0)

    def window_quads(i: int) -> list[tuple[int, int, int, int]]:
        """(machine, window index, begin, end) across the op's eligible machines."""
        return [(k, ell, b, e)
                for k in eligible[i]
                for ell, (b, e) in enumerate(windows[k], start=1)]

    for i in ops:
        terms: list[tuple[int, str]] = [(1, f"u_{i}")]
        for k, ell, b, e in window_quads(i):
            terms.append((e - b, f"v_{i}_{k}_{ell}"))
            terms.append((-(e - b), f"w_{i}_{k}_{ell}"))
        row(f"unavail_sum_{i}", terms, "=", 0)
    for i in ops:
        terms = [(1, f"ub_{i}")]
        for k, ell, b, e in window_quads(i):
            terms.append((e - b, f"v_{i}_{k}_{ell}"))
            terms.append((-(e - b), f"wb_{i}_{k}_{ell}"))
        row(f"overlap_unavail_sum_{i}", terms, "=", 0)

    for i in ops:
        row(f"start_before_partial_{i}", [(1, f"s_{i}"), (-1, f"cb_{i}")], "<=", 0)
    for i in ops:
        row(f"partial_before_completion_{i}", [(1, f"cb_{i}"), (-1, f"c_{i}")], "<=", 0)
    for i in ops:
        row(f"completion_def_{i}",
            [(1, f"s_{i}"), (1, f"pp_{i}"), (1, f"u_{i}"), (-1, f"c_{i}")], "=", 0)
    for i in ops:
        row(f"partial_completion_def_{i}",
            [(1, f"s_{i}"), (1, f"ppb_{i}"), (1, f"ub_{i}"), (-1, f"cb_{i}")], "=", 0)
    for i in ops:
        row(f"makespan_{i}", [(1, f"c_{i}"), (-1, "Cmax")], "<=", 0)

    for i, j in arcs:
        row(f"overlap_start_{i}_{j}", [(1, f"cb_{i}"), (-1, f"s_{j}")], "<=", 0)
    for i, j in arcs:
        row(f"end_order_{i}_{j}", [(1, f"c_{i}"), (-1, f"c_{j}")], "<=", 0)

    for k, here in hosts.items():
        for i in here:
            for j in here:
                if i != j:
                    row(f"imm_x_pred_{i}_{j}_{k}", [(1, _y(i, j, k)), (-1, _x(i, k))], "<=", 0)
                    row(f"imm_x_succ_{i}_{j}_{k}", [(1, _y(i, j, k)), (-1, _x(j, k))], "<=", 0)
    for k, here in hosts.items():
        terms = [(1, _y(i, j, k)) for i in here for j in here if i != j]
        terms += [(-1, _x(i, k)) for i in here]
        if terms:
            row(f"chain_count_{k}", terms, ">=", -1)
    for k, here in hosts.items():
        for i in here:
            terms = [(1, _y(i, j, k)) for j in here if j != i]
            if terms:
                row(f"succ_once_{k}_{i}", terms, "<=", 1)
        for j in here:
            terms = [(1, _y(i, j, k)) for i in here if i != j]
            if terms:
                row(f"pred_once_{k}_{j}", terms, "<=", 1)

    for j in ops:
        for k in eligible[j]:
            gf = inst.setup_first(k, j)
            terms = [(1, f"xih_{j}_{k}")]
            for i in hosts[k]:
                if i != j:
                    diff = inst.setup_between(k, i, j) - gf
                    if diff != 0:
                        terms.append((-diff, _y(i, j, k)))
            row(f"setup_pick_def_{j}_{k}", terms, "=", gf)
    for j in ops:
        for k in eligible[j]:
            row(f"setup_sel_ub_{j}_{k}", [(1, f"xib_{j}_{k}"), (-m1, _x(j, k))], "<=", 0)
            row(f"setup_sel_lb_{j}_{k}",
                [(1, f"xih_{j}_{k}"), (-1, f"xib_{j}_{k}"), (m1, _x(j, k))], "<=", m1)
            row(f"setup_sel_cap_{j}_{k}", [(1, f"xib_{j}_{k}"), (-1, f"xih_{j}_{k}")], "<=", 0)
    for j in ops:
        row(f"setup_len_def_{j}",
            [(1, f"xi_{j}")] + [(-1, f"xib_{j}_{k}") for k in eligible[j]], "=", 0)

    for i, j in gap_pairs:
        shared = [k for k in eligible[i] if k in op_of[j].eligible]
        terms = [(1, f"c_{i}"), (-1, f"s_{j}"), (1, f"xi_{j}")]
        terms += [(m2, _y(i, j, k)) for k in shared]
        row(f"machine_gap_{i}_{j}", terms, "<=", m2)
    for i in ops:
        row(f"setup_within_start_{i}", [(1, f"s_{i}"), (-1, f"xi_{i}")], ">=", 0)

    for i in ops:
        for k in eligible[i]:
            for ell, (b, e) in enumerate(windows[k], start=1):
                tag = f"{i}_{k}_{ell}"
                row(f"win_sv_{tag}", [(1, f"v_{tag}"), (-1, _x(i, k))], "<=", 0)
                row(f"win_s_ub_{tag}",
                    [(1, f"s_{i}"), (-m2, f"v_{tag}"), (m2, _x(i, k))], "<=", b - 1 + m2)
                row(f"win_setup_lb_{tag}",
                    [(1, f"s_{i}"), (-1, f"xi_{i}"), (-m3, f"v_{tag}"), (-m3, _x(i, k))],
                    ">=", e - 2 * m3)
                row(f"win_cw_{tag}", [(1, f"w_{tag}"), (-1, _x(i, k))], "<=", 0)
                row(f"win_c_ub_{tag}",
                    [(1, f"c_{i}"), (-m2, f"w_{tag}"), (m2, _x(i, k))], "<=", b + m2)
                row(f"win_c_lb_{tag}",
                    [(1, f"c_{i}"), (-m3, f"w_{tag}"), (-m3, _x(i, k))], ">=", e + 1 - 2 * m3)
                row(f"win_pw_{tag}", [(1, f"wb_{tag}"), (-1, _x(i, k))], "<=", 0)
                row(f"win_pc_ub_{tag}",
                    [(1, f"cb_{i}"), (-m2, f"wb_{tag}"), (m2, _x(i, k))], "<=", b + m2)
                row(f"win_pc_lb_{tag}",
                    [(1, f"cb_{i}"), (-m3, f"wb_{tag}"), (-m3, _x(i, k))], ">=", e + 1 - 2 * m3)

    return MilpModel(variables=tuple(variables), constraints=tuple(rows))


# ---------------------------------------------------------------------------
# LP-format text
# ---------------------------------------------------------------------------


def emit_lp(model: MilpModel) -> str:
    """CPLEX-style LP text. Deterministic; every coefficient an integer.

    Continuous variables each get an explicit (default) bound line so the
    declaration list survives a round trip through the text form.
    """
    out = ["Minimize", f" obj: {model.objective}", "Subject To"]
    for rowdef in model.constraints:
        parts = []
        for pos, (coef, var) in enumerate(rowdef.terms):
            if coef < 0:
                parts.append(f"- {-coef} {var}" if coef != -1 else f"- {var}")
            elif pos == 0:
                parts.append(f"{coef} {var}" if coef != 1 else var)
            else:
                parts.append(f"+ {coef} {var}" if coef != 1 else f"+ {var}")
        out.append(f" {rowdef.name}: {' '.join(parts)} {rowdef.sense} {rowdef.rhs}")
    out.append("Bounds")
    for v in model.variables:
        if v.kind == "C":
            if v.ub is None:
                out.append(f" {v.name} >= {v.lb}")
            else:
                out.append(f" {v.lb} <= {v.name} <= {v.ub}")
    out.append("Binaries")
    for v in model.variables:
        if v.kind == "B":
            out.append(f" {v.name}")
    out.append("End")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Evaluating a schedule against the rows
# ---------------------------------------------------------------------------


def schedule_values(inst: Instance, sched: Schedule) -> dict[str, int]:
    """Variable values a schedule induces, honest wherever it is inconsistent.

    Indicator binaries are set from the actual times (a window counts as
    passed when the relevant time has cleared its end), setup-pick values
    follow the immediate-predecessor pairs in the sequences, and the slack
    quantities (u, ub) are the literal residuals of the schedule's own times,
    so any internal inconsistency surfaces as a violated row rather than
    being patched over.
    """
    val: dict[str, int] = {}
    assigned = {i: so.machine for i, so in sched.ops.items()}

    for op in inst.operations:
        i = op.id
        so = sched.ops.get(i)
        k_here = assigned.get(i)
        for k in sorted(op.eligible):
            val[_x(i, k)] = 1 if k == k_here else 0
        if so is None:
            continue
        val[f"s_{i}"] = so.start
        val[f"c_{i}"] = so.completion
        val[f"cb_{i}"] = so.partial_completion
        pp = op.eligible.get(k_here, 0)
        ppb = op.partial_units(k_here) if k_here in op.eligible else 0
        val[f"pp_{i}"] = pp
        val[f"ppb_{i}"] = ppb
        val[f"u_{i}"] = so.completion - so.start - pp
        val[f"ub_{i}"] = so.partial_completion - so.start - ppb
        val[f"xi_{i}"] = so.setup_len
        for k in sorted(op.eligible):
            ws = inst.machine(k).windows
            for ell, (b, e) in enumerate(ws, start=1):
                on_k = k == k_here
                val[f"v_{i}_{k}_{ell}"] = 1 if on_k and so.start >= e else 0
                val[f"w_{i}_{k}_{ell}"] = 1 if on_k and so.completion > e else 0
                val[f"wb_{i}_{k}_{ell}"] = 1 if on_k and so.partial_completion > e else 0

    for k, here in inst.eligible_ops.items():
        here_set = set(here)
        for a in here_set:
            for b in here_set:
                if a != b:
                    val[_y(a, b, k)] = 0
    for k, seq in sched.sequences.items():
        for a, b in zip(seq, seq[1:]):
            if _y(a, b, k) in val:
                val[_y(a, b, k)] = 1

    pred_on_machine: dict[int, int | None] = {}
    for k, seq in sched.sequences.items():
        for pos, j in enumerate(seq):
            pred_on_machine[j] = seq[pos - 1] if pos > 0 else None
    for op in inst.operations:
        j = op.id
        for k in sorted(op.eligible):
            pick = inst.setup_first(k, j)
            prev = pred_on_machine.get(j)
            if assigned.get(j) == k and prev is not None and prev in set(inst.eligible_ops[k]):
                pick = inst.setup_between(k, prev, j)
            val[f"xih_{j}_{k}"] = pick
            val[f"xib_{j}_{k}"] = pick if assigned.get(j) == k else 0

    val["Cmax"] = schedule_makespan(sched)
    return val


def evaluate_schedule(inst: Instance, sched: Schedule, bigm: BigM | None = None,
                      model: MilpModel | None = None) -> list[RowViolation]:
    """All model rows (and variable bounds) the schedule's values violate."""
    if model is None:
        model = build_model(inst, bigm)
    val = schedule_values(inst, sched)
    out: list[RowViolation] = []
    for v in model.variables:
        x = val.get(v.name, 0)
        if x < v.lb or (v.ub is not None and x > v.ub) or (v.kind == "B" and x not in (0, 1)):
            out.append(RowViolation(f"bound_{v.name}", x, "in", v.lb))
    for rowdef in model.constraints:
        lhs = sum(coef * val.get(var, 0) for coef, var in rowdef.terms)
        ok = (lhs <= rowdef.rhs if rowdef.sense == "<=" else
              lhs >= rowdef.rhs if rowdef.sense == ">=" else lhs == rowdef.rhs)
        if not ok:
            out.append(RowViolation(rowdef.name, lhs, rowdef.sense, rowdef.rhs))
    return out
