"""Mixed-integer encoding of the average property.

Per non-sink vertex ``v`` with neighbours ``u_1..u_d`` the model has

* ``vm_v`` = min of the neighbour values and ``vp_v`` = max, each via a
  big-M selector gadget;
* ``vc_v`` = min(WRinv((vp_v + vm_v) / 2), 1) and ``f_v`` = max(vc_v, 0);

sinks are pinned to 0 (target) or 1, and the objective maximizes the sum of
all ``f_v``. A d-way selector uses ``d - 1`` binaries ``b_1..b_{d-1}`` with
``sum(b) <= 1``; the last alternative is selected by ``1 - sum(b)``, which for
``d = 2`` is the single-binary form ``b`` / ``1 - b``.

The model can be written out in CPLEX LP format or solved here exactly by
enumerating binary assignments and solving each induced LP with the exact
simplex.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .avgprop import check_average_property, wr_inv
from .core import ONE, ZERO, Game, GameError, format_decimal
from .simplex import Constraint, LinearProgram, Status, presolve
from .solver import InvariantError, search_order

MAX_BINARIES = 24


@dataclass
class Gadget:
    """A group of binaries decided together during enumeration."""

    vertex: str
    binaries: list
    choices: list  # list of {binary: 0/1} assignments allowed by the group's own rows


@dataclass
class MilpModel:
    game: Game
    big_m: Fraction
    continuous: list = field(default_factory=list)  # variable names
    binaries: list = field(default_factory=list)
    constraints: list = field(default_factory=list)  # (label, Constraint)
    objective: dict = field(default_factory=dict)
    names: dict = field(default_factory=dict)  # vertex -> sanitized name stem
    gadgets: list = field(default_factory=list)
    vertex_rows: dict = field(default_factory=dict)  # vertex -> row indices

    def f(self, v):
        return f"f_{self.names[v]}"

    def row_count(self):
        return len(self.constraints)


_LP_NAME = re.compile(r"[^A-Za-z0-9_.]")


def _stems(game: Game) -> dict:
    out, used = {}, set()
    for i, v in enumerate(game.vertices):
        stem = _LP_NAME.sub("_", v)
        if stem in used:
            stem = f"{stem}__{i}"
        used.add(stem)
        out[v] = stem
    return out


def _con(coeffs: dict, sense: str, rhs) -> Constraint:
    merged = {}
    for n, c in coeffs.items():
        c = Fraction(c)
        if c:
            merged[n] = merged.get(n, ZERO) + c
    return Constraint(tuple((n, c) for n, c in merged.items() if c), sense, Fraction(rhs))


def _selector(model, v, kind, target, values, binaries_prefix, two_m):
    """Rows making ``target`` the min (kind='min') or max (kind='max') of ``values``."""
    rows = []
    d = len(values)
    if d == 1:
        rows.append((f"{kind}_{v}", _con({target: 1, values[0]: -1}, "==", 0)))
        return rows, None
    bins = [f"{binaries_prefix}_{model.names[v]}_{k}" for k in range(1, d)]
    sign = 1 if kind == "min" else -1
    for k, x in enumerate(values):
        # min: target <= x ; max: target >= x
        rows.append((f"{kind}_bound_{v}_{k}", _con({target: sign, x: -sign}, "<=", 0)))
        # min: target >= x - 2M(1 - s_k) ; max: target <= x + 2M(1 - s_k)
        if k < d - 1:
            b = bins[k]
            rows.append((f"{kind}_pick_{v}_{k}", _con({target: sign, x: -sign, b: -two_m}, ">=", -two_m)))
        else:
            coeffs = {target: sign, x: -sign}
            for b in bins:
                coeffs[b] = two_m
            rows.append((f"{kind}_pick_{v}_{k}", _con(coeffs, ">=", 0)))
    if d > 2:
        rows.append((f"{kind}_onehot_{v}", _con({b: 1 for b in bins}, "<=", 1)))
    choices = [{b: 0 for b in bins}]
    for b in bins:
        choice = {c: 0 for c in bins}
        choice[b] = 1
        choices.append(choice)
    return rows, Gadget(v, bins, choices)


def build_milp(game: Game) -> MilpModel:
    lam = game.lam
    big_m = wr_inv(ONE, lam)
    two_m = 2 * big_m
    model = MilpModel(game, big_m, names=_stems(game))
    for v in game.vertices:
        model.continuous.append(model.f(v))
    for v in game.vertices:
        start = len(model.constraints)
        fv = model.f(v)
        if game.is_sink(v):
            model.constraints.append((f"sink_{v}", _con({fv: 1}, "==", game.sink_value(v))))
            model.vertex_rows[v] = list(range(start, len(model.constraints)))
            continue
        stem = model.names[v]
        vm, vp, vc = f"vm_{stem}", f"vp_{stem}", f"vc_{stem}"
        model.continuous += [vm, vp, vc]
        xs = [model.f(u) for u in game.neighbors(v)]
        for kind, target, prefix in (("min", vm, "bm"), ("max", vp, "bp")):
            rows, gadget = _selector(model, v, kind, target, xs, prefix, two_m)
            model.constraints += rows
            if gadget:
                model.binaries += gadget.binaries
                model.gadgets.append(gadget)
        # pre = k*(vp + vm) - c0
        k = 1 / (2 * (1 - 2 * lam))
        c0 = lam / (1 - 2 * lam)
        bu, bl = f"bu_{stem}_0", f"bl_{stem}_0"
        model.binaries += [bu, bl]
        model.constraints += [
            (f"upper_le_pre_{v}", _con({vc: 1, vp: -k, vm: -k}, "<=", -c0)),
            (f"upper_le_one_{v}", _con({vc: 1}, "<=", 1)),
            (f"upper_pick_pre_{v}", _con({vc: 1, vp: -k, vm: -k, bu: -two_m}, ">=", -c0 - two_m)),
            (f"upper_pick_one_{v}", _con({vc: 1, bu: two_m}, ">=", 1)),
            (f"lower_ge_vc_{v}", _con({fv: 1, vc: -1}, ">=", 0)),
            (f"lower_ge_zero_{v}", _con({fv: 1}, ">=", 0)),
            (f"lower_pick_vc_{v}", _con({fv: 1, vc: -1, bl: two_m}, "<=", two_m)),
            (f"lower_pick_zero_{v}", _con({fv: 1, bl: -two_m}, "<=", 0)),
        ]
        model.gadgets.append(Gadget(v, [bu, bl], [{bu: a, bl: b} for a in (1, 0) for b in (1, 0)]))
        model.vertex_rows[v] = list(range(start, len(model.constraints)))
    model.objective = {model.f(v): ONE for v in game.vertices}
    return model


# -- LP file export ---------------------------------------------------------

def _term(c: Fraction, name: str, first: bool) -> str:
    sign = "-" if c < 0 else ("" if first else "+")
    mag = abs(c)
    coef = "" if mag == 1 else format_decimal(mag) + " "
    if first:
        return f"{'-' if c < 0 else ''}{coef}{name}"
    return f"{sign} {coef}{name}"


def _expr(coeffs) -> str:
    parts = [_term(c, n, i == 0) for i, (n, c) in enumerate(coeffs)]
    return " ".join(parts) if parts else "0"


def _label(label: str, i: int) -> str:
    return f"c{i}_" + _LP_NAME.sub("_", label)


def export_lp(model: MilpModel) -> str:
    """Render the model in CPLEX LP format (coefficients as 17-digit decimals)."""
    obj = [(n, c) for n, c in model.objective.items()]
    lines = ["\\ Robin Hood reachability threshold MILP", f"Maximize obj: {_expr(obj)}"]
    lines.append("Subject To")
    ops = {"<=": "<=", ">=": ">=", "==": "="}
    for i, (label, con) in enumerate(model.constraints):
        lines.append(f" {_label(label, i)}: {_expr(con.coeffs)} {ops[con.sense]} {format_decimal(con.rhs) if con.rhs >= 0 else '-' + format_decimal(-con.rhs)}")
    lines.append("Bounds")
    for n in model.continuous:
        lines.append(f" {n} free")
    if model.binaries:
        lines.append("Binary")
        for b in model.binaries:
            lines.append(f" {b}")
    lines.append("End")
    return "\n".join(lines) + "\n"


@dataclass
class LpFileSummary:
    objective_sense: str
    objective: str
    constraints: int
    bounds: int
    binaries: int


def parse_lp_summary(text: str) -> LpFileSummary:
    """Structural read-back of an exported LP file (section counts only)."""
    section = None
    sense = obj = None
    counts = {"Subject To": 0, "Bounds": 0, "Binary": 0}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        head = line.split(None, 1)
        if head[0] in ("Maximize", "Minimize"):
            section = sense = head[0]
            if len(head) > 1:
                obj = head[1]
            continue
        if line in counts or line == "End":
            section = line
            continue
        if section in ("Maximize", "Minimize"):
            obj = line
        elif section in counts:
            counts[section] += 1
    if sense is None or obj is None:
        raise ValueError("no objective section")
    return LpFileSummary(sense, obj, counts["Subject To"], counts["Bounds"], counts["Binary"])


# -- exhaustive solve -------------------------------------------------------

@dataclass
class MilpSolution:
    assignment: dict  # binary -> 0/1
    point: dict  # every continuous variable
    objective: Fraction
    values: dict  # vertex -> f value
    lp_solves: int = 0


def _substituted(con: Constraint, fixed: dict):
    coeffs = {}
    rhs = con.rhs
    for n, c in con.coeffs:
        if n in fixed:
            rhs -= c * fixed[n]
        else:
            coeffs[n] = c
    return coeffs, rhs


def solve_milp_exhaustive(model: MilpModel, max_binaries: int = MAX_BINARIES) -> MilpSolution:
    """Best binary assignment by exhaustive enumeration, each induced LP solved exactly.

    Assignments are built vertex by vertex; once every binary appearing in a
    vertex's rows is fixed those rows are added and the partial LP is checked,
    so assignments extending an infeasible prefix are skipped (they cannot be
    feasible). No objective bounds are used.
    """
    if len(model.binaries) > max_binaries:
        raise GameError(f"MILP size guard: {len(model.binaries)} binaries exceed {max_binaries}")
    game = model.game
    by_vertex = {}
    own = {v: set() for v in game.vertices}
    for g in model.gadgets:
        by_vertex.setdefault(g.vertex, []).append(g)
        own[g.vertex].update(g.binaries)

    base = LinearProgram()
    for n in model.continuous:
        base.add_variable(n, None, None)

    cache = {}

    def rows_of(v, fixed):
        # a vertex's rows only mention its own binaries
        key = (v, tuple(sorted((b, x) for b, x in fixed.items() if b in own[v])))
        if key not in cache:
            out = []
            for idx in model.vertex_rows[v]:
                con = model.constraints[idx][1]
                coeffs, rhs = _substituted(con, fixed)
                out.append((coeffs, con.sense, rhs))
            cache[key] = out
        return cache[key]

    for v in game.sinks:
        for coeffs, sense, rhs in rows_of(v, {}):
            base.add_constraint(coeffs, sense, rhs)
    order = search_order(game)
    best = {"value": None}
    solves = [0]

    def visit(depth, red, fixed):
        if red is None:
            return
        solves[0] += 1
        leaf = depth == len(order)
        # partial programs may leave variables free: check feasibility only
        res = red.maximize(model.objective if leaf else {})
        if res.status is Status.INFEASIBLE:
            return
        if res.status is Status.UNBOUNDED:
            raise InvariantError("MILP program with fixed binaries is unbounded")
        if leaf:
            if best["value"] is None or res.value > best["value"]:
                best.update(value=res.value, point=res.point, assignment=dict(fixed))
            return
        v = order[depth]
        groups = by_vertex.get(v, [])
        for combo in itertools.product(*(g.choices for g in groups)):
            assign = dict(fixed)
            for part in combo:
                assign.update(part)
            visit(depth + 1, red.extend(rows_of(v, assign)), assign)

    visit(0, presolve(base), {})
    if best["value"] is None:
        raise InvariantError("MILP has no feasible binary assignment")
    values = {v: best["point"][model.f(v)] for v in game.vertices}
    report = check_average_property(values, game)
    if not report:
        raise InvariantError(f"MILP optimum violates the average property: {report.violations}")
    return MilpSolution(best["assignment"], best["point"], best["value"], values, solves[0])


def solve_milp_threshold(game: Game, max_binaries: int = MAX_BINARIES):
    """Threshold map obtained through the MILP route."""
    from .core import Method, ThresholdMap

    sol = solve_milp_exhaustive(build_milp(game), max_binaries)
    return ThresholdMap(sol.values, Method.MILP, ZERO, 0, {"objective": sol.objective, "lp_solves": sol.lp_solves})
