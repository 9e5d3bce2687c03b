"""Small exact linear programs.

A two-phase tableau simplex over exact rationals with Bland's rule, so it
terminates on degenerate problems. Sizes here are tiny (tens of rows), so a
dense tableau is fine. Internally ``gmpy2.mpq`` is used when available;
everything returned is :class:`fractions.Fraction`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import format_rational

_ZERO = Fraction(0)

try:  # internal arithmetic; results are always handed back as Fraction
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction
_QZ = _Q(0)


def _frac(q) -> Fraction:
    return q if isinstance(q, Fraction) else Fraction(int(q.numerator), int(q.denominator))


def _qbounds(b):
    lo, hi = b
    return (None if lo is None else _Q(lo), None if hi is None else _Q(hi))


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple  # ((name, Fraction), ...)
    sense: str  # "<=", ">=", "=="
    rhs: Fraction

    def evaluate(self, point: Mapping) -> Fraction:
        return sum((c * point[n] for n, c in self.coeffs), _ZERO)

    def satisfied(self, point: Mapping) -> bool:
        lhs = self.evaluate(point)
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs

    def __str__(self):
        terms = " + ".join(f"{format_rational(c)}*{n}" for n, c in self.coeffs) or "0"
        return f"{terms} {self.sense} {format_rational(self.rhs)}"


@dataclass
class LinearProgram:
    """Maximize ``objective`` over named real variables.

    ``bounds`` maps a variable to ``(lo, hi)``; ``None`` means unbounded on
    that side. Undeclared bounds default to ``(0, None)``.
    """

    variables: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)

    def add_variable(self, name, lo=_ZERO, hi=None):
        if name in self.bounds:
            raise ValueError(f"duplicate variable {name}")
        self.variables.append(name)
        self.bounds[name] = (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi))

    def add_constraint(self, coeffs: Mapping, sense: str, rhs):
        if sense not in ("<=", ">=", "=="):
            raise ValueError(f"bad sense {sense!r}")
        merged = {}
        for n, c in coeffs.items():
            if n not in self.bounds:
                raise ValueError(f"undeclared variable {n}")
            c = Fraction(c)
            if c:
                merged[n] = merged.get(n, _ZERO) + c
        terms = tuple((n, c) for n, c in merged.items() if c)
        self.constraints.append(Constraint(terms, sense, Fraction(rhs)))

    def copy(self) -> "LinearProgram":
        return LinearProgram(list(self.variables), list(self.constraints), dict(self.objective), dict(self.bounds))

    def feasible(self, point: Mapping) -> bool:
        for n in self.variables:
            lo, hi = self.bounds[n]
            if lo is not None and point[n] < lo or hi is not None and point[n] > hi:
                return False
        return all(c.satisfied(point) for c in self.constraints)


@dataclass
class LPResult:
    status: Status
    point: dict
    value: Fraction | None


def _pivot(T, basis, r, c):
    row = T[r]
    p = row[c]
    if p != 1:
        row = [x / p for x in row]
        T[r] = row
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                T[i] = [a - f * b for a, b in zip(other, row)]
    basis[r] = c


def _run(T, basis, cost, ncols):
    """Maximize ``cost . x`` over the tableau in place. Returns False when unbounded."""
    m = len(T)
    while True:
        # reduced costs: c_j - sum_i c_B(i) * T[i][j]
        entering = None
        for j in range(ncols):
            rc = cost[j]
            if rc is None:
                continue
            for i in range(m):
                a = T[i][j]
                if a:
                    rc -= cost[basis[i]] * a
            if rc > 0:
                entering = j
                break
        if entering is None:
            return True
        leave = None
        best = None
        for i in range(m):
            a = T[i][entering]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or ratio == best and basis[i] < basis[leave]:
                    best, leave = ratio, i
        if leave is None:
            return False
        _pivot(T, basis, leave, entering)


def _expand(coeffs, subst):
    out, const = {}, _QZ
    for n, c in coeffs:
        if n in subst:
            sc, s0 = subst[n]
            const += c * s0
            for m, d in sc.items():
                out[m] = out.get(m, _QZ) + c * d
        else:
            out[n] = out.get(n, _QZ) + c
    return {n: c for n, c in out.items() if c}, const


def _reduce(bounds: dict, rows: list):
    """Core of :func:`presolve` on raw ``(coeff dict, sense, rhs)`` rows.

    Repeatedly: scale every inequality so its leading coefficient is 1, turn
    single-variable rows into bounds, merge rows over the same linear form
    into an interval (an equality when the interval is a point), then
    eliminate one variable per equality. Returns ``None`` on detected
    infeasibility, else ``(bounds, rows, subst)``.
    """
    bounds = dict(bounds)
    subst = {}  # var -> (coeff dict, const), in terms of surviving variables
    while True:
        eqs = []
        forms = {}  # normalized coeff tuple -> [lo, hi]
        for cf, sense, r in rows:
            if not cf:
                if (sense == "<=" and r < 0) or (sense == ">=" and r > 0) or (sense == "==" and r != 0):
                    return None
                continue
            if sense == "==":
                eqs.append((cf, r))
                continue
            items = sorted(cf.items())
            lead = items[0][1]
            if lead != 1:
                items = [(n, c / lead) for n, c in items]
                r = r / lead
            key = tuple(items)
            upper = (sense == "<=") == (lead > 0)
            if len(key) == 1:
                lo, hi = bounds[key[0][0]]
                if upper:
                    hi = r if hi is None else min(hi, r)
                else:
                    lo = r if lo is None else max(lo, r)
                bounds[key[0][0]] = (lo, hi)
                continue
            iv = forms.setdefault(key, [None, None])
            if upper:
                iv[1] = r if iv[1] is None else min(iv[1], r)
            else:
                iv[0] = r if iv[0] is None else max(iv[0], r)
        for n, (lo, hi) in bounds.items():
            if lo is not None and hi is not None:
                if lo > hi:
                    return None
                if lo == hi:
                    eqs.append(({n: _Q(1)}, lo))
        rows = []
        for key, (lo, hi) in forms.items():
            cf = dict(key)
            if lo is not None and hi is not None:
                if lo > hi:
                    return None
                if lo == hi:
                    eqs.append((cf, lo))
                    continue
            if lo is not None:
                rows.append((cf, ">=", lo))
            if hi is not None:
                rows.append((dict(cf), "<=", hi))
        if not eqs:
            return bounds, rows, subst
        # eliminate one variable per equality, substituting as we go
        while eqs:
            coeffs, rhs = eqs.pop()
            if not coeffs:
                if rhs != 0:
                    return None
                continue
            x = next(iter(coeffs))
            cx = coeffs[x]
            expr = {m: -d / cx for m, d in coeffs.items() if m != x}
            const = rhs / cx
            lo, hi = bounds.pop(x)
            if lo is not None:
                rows.append((dict(expr), ">=", lo - const))
            if hi is not None:
                rows.append((dict(expr), "<=", hi - const))

            def sub(cf):
                # returns (cf with x replaced, constant picked up)
                if x not in cf:
                    return cf, _QZ
                a = cf.pop(x)
                for m, d in expr.items():
                    cf[m] = cf.get(m, _QZ) + a * d
                return {m: d for m, d in cf.items() if d}, a * const

            new_rows = []
            for cf, sense, r in rows:
                cf, k = sub(cf)
                new_rows.append((cf, sense, r - k))
            rows = new_rows
            new_eqs = []
            for cf, r in eqs:
                cf, k = sub(cf)
                new_eqs.append((cf, r - k))
            eqs = new_eqs
            for n, (sc, s0) in list(subst.items()):
                sc, k = sub(dict(sc))
                subst[n] = (sc, s0 + k)
            subst[x] = (expr, const)


class Reduction:
    """A presolved program plus the substitutions that produced it.

    ``subst`` maps every eliminated original variable to an affine
    expression over the surviving ones. :meth:`extend` adds rows to an
    already reduced program without redoing earlier work, which is what the
    branching searches need.
    """

    def __init__(self, lp: LinearProgram, subst: dict):
        self.lp = lp
        self.subst = subst

    def expand(self, coeffs) -> tuple:
        """Rewrite a row over original variables in terms of surviving ones."""
        return _expand(coeffs, self.subst)

    def extend(self, constraints) -> "Reduction | None":
        """Add ``(coeffs, sense, rhs)`` rows over original variables.

        ``coeffs`` is a dict or a sequence of ``(name, coefficient)`` pairs.
        """
        rows = [(dict(c.coeffs), c.sense, c.rhs) for c in self.lp.constraints]
        for coeffs, sense, rhs in constraints:
            items = coeffs.items() if type(coeffs) is dict else coeffs
            cf, const = self.expand([(n, c if type(c) is _Q else _Q(c)) for n, c in items])
            rows.append((cf, sense, (rhs if type(rhs) is _Q else _Q(rhs)) - const))
        return _build(self.lp.variables, self.lp.bounds, rows, self.subst)

    def recover(self, point: Mapping) -> dict:
        full = dict(point)
        for n, (sc, s0) in self.subst.items():
            full[n] = s0 + sum((d * point[m] for m, d in sc.items()), _QZ)
        return full

    def maximize(self, objective: Mapping) -> LPResult:
        """Optimize ``objective`` (over original variables) on this program."""
        obj, _ = self.expand(tuple((n, _Q(c)) for n, c in objective.items()))
        lp = LinearProgram(self.lp.variables, self.lp.constraints, obj, self.lp.bounds)
        res = _tableau_max(lp)
        if res.status is not Status.OPTIMAL:
            return res
        point = {n: _frac(q) for n, q in self.recover(res.point).items()}
        value = sum((Fraction(c) * point[n] for n, c in objective.items()), _ZERO)
        return LPResult(Status.OPTIMAL, point, value)

    def feasible(self) -> bool:
        return self.maximize({}).status is Status.OPTIMAL


def _build(variables, bounds, rows, outer):
    out = _reduce(bounds, rows)
    if out is None:
        return None
    bounds, rows, subst = out
    red = LinearProgram()
    for n in variables:
        if n not in subst:
            red.variables.append(n)
            red.bounds[n] = bounds[n]
    for cf, sense, r in rows:
        red.constraints.append(Constraint(tuple(cf.items()), sense, r))
    if outer:
        # compose: earlier eliminations now refer to variables eliminated here
        merged = {}
        for n, (sc, s0) in outer.items():
            cf, k = _expand(tuple(sc.items()), subst)
            merged[n] = (cf, s0 + k)
        merged.update(subst)
        subst = merged
    return Reduction(red, subst)


def presolve(lp: LinearProgram) -> Reduction | None:
    """Reduce ``lp`` by exact substitution; ``None`` if found infeasible."""
    rows = [({n: _Q(c) for n, c in con.coeffs}, con.sense, _Q(con.rhs)) for con in lp.constraints]
    bounds = {n: _qbounds(lp.bounds[n]) for n in lp.variables}
    return _build(lp.variables, bounds, rows, {})


def simplex_max(lp: LinearProgram) -> LPResult:
    """Solve ``lp`` exactly; returns status, an optimal vertex and the optimum."""
    red = presolve(lp)
    if red is None:
        return LPResult(Status.INFEASIBLE, {}, None)
    return red.maximize(lp.objective)


def _tableau_max(lp: LinearProgram) -> LPResult:
    names = list(lp.variables)
    # column layout: each variable becomes 1 (shifted) or 2 (free split) columns
    cols = []  # (name, sign) per structural column
    shift = {}
    rows = []  # (coeff dict over column ids, sense, rhs)
    for n in names:
        lo, hi = lp.bounds[n]
        if lo is not None:
            shift[n] = lo
            cols.append((n, 1))
            if hi is not None:
                if hi < lo:
                    return LPResult(Status.INFEASIBLE, {}, None)
                rows.append(({len(cols) - 1: _Q(1)}, "<=", hi - lo))
        elif hi is not None:
            # x = hi - x'
            shift[n] = hi
            cols.append((n, -1))
        else:
            shift[n] = _QZ
            cols.append((n, 1))
            cols.append((n, -1))
    colmap = {}
    for j, (n, s) in enumerate(cols):
        colmap.setdefault(n, []).append((j, s))

    for con in lp.constraints:
        coeffs = {}
        rhs = con.rhs
        for n, c in con.coeffs:
            rhs -= c * shift[n]
            for j, s in colmap[n]:
                coeffs[j] = coeffs.get(j, _QZ) + c * s
        rows.append((coeffs, con.sense, rhs))

    nstruct = len(cols)
    nslack = sum(1 for _, sense, _ in rows if sense != "==")

    def slack_basic(sense, rhs):
        return sense == "<=" and rhs >= 0 or sense == ">=" and rhs <= 0

    nart = sum(1 for _, sense, rhs in rows if not slack_basic(sense, rhs))
    art0 = nstruct + nslack
    ncols = art0 + nart
    T = []
    basis = []
    k = nstruct
    a = art0
    for coeffs, sense, rhs in rows:
        row = [_QZ] * (ncols + 1)
        for j, c in coeffs.items():
            row[j] = c
        slack = None
        if sense != "==":
            slack = k
            row[k] = _Q(1) if sense == "<=" else _Q(-1)
            k += 1
        row[-1] = rhs
        if rhs < 0 or rhs == 0 and sense == ">=":
            row = [-x for x in row]
        if slack is not None and slack_basic(sense, rhs):
            basis.append(slack)
        else:
            row[a] = _Q(1)
            basis.append(a)
            a += 1
        T.append(row)
    m = len(T)

    if nart:
        phase1 = [_QZ] * art0 + [_Q(-1)] * nart
        _run(T, basis, phase1, ncols)
    if any(basis[i] >= art0 and T[i][-1] != 0 for i in range(m)):
        return LPResult(Status.INFEASIBLE, {}, None)
    # drive zero-level artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= art0:
            for j in range(art0):
                if T[i][j] != 0:
                    _pivot(T, basis, i, j)
                    break
            else:
                del T[i]
                del basis[i]
                continue
        i += 1

    cost = [_QZ] * art0 + [None] * nart
    for n, c in lp.objective.items():
        for j, s in colmap[n]:
            cost[j] += _Q(c) * s
    for j in range(art0, ncols):
        for row in T:
            row[j] = _QZ
    if not _run(T, basis, cost, ncols):
        return LPResult(Status.UNBOUNDED, {}, None)

    xs = [_QZ] * ncols
    for i, b in enumerate(basis):
        xs[b] = T[i][-1]
    point = {n: shift[n] for n in names}
    for j, (n, s) in enumerate(cols):
        point[n] += s * xs[j]
    value = sum((_Q(c) * point[n] for n, c in lp.objective.items()), _QZ)
    return LPResult(Status.OPTIMAL, point, value)
