"""Exact rational linear programming.

Two-phase dense simplex on an integer tableau with fraction-free pivoting
(see ``_kernels``) and Bland's smallest-index rule.  Every Optimal answer is
checked against a dual certificate before it is returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import _kernels
from .errors import ConsistencyError, ValidationError
from .game import as_rational

LE, GE, EQ = "<=", ">=", "="
RELATIONS = (LE, GE, EQ)

OPTIMAL, INFEASIBLE, UNBOUNDED = "Optimal", "Infeasible", "Unbounded"


@dataclass
class Constraint:
    coeffs: tuple
    relation: str
    rhs: Fraction
    name: str = ""

    def lhs(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.coeffs, x) if c), Fraction(0))

    def holds(self, x) -> bool:
        v = self.lhs(x)
        return v <= self.rhs if self.relation == LE else v >= self.rhs if self.relation == GE \
            else v == self.rhs


@dataclass
class LinearProgram:
    """maximize ``objective . x`` subject to ``constraints`` and per-variable ``bounds``.

    A bound is ``(lower, upper)``; ``None`` means unbounded on that side.  The
    default bound is ``(0, None)``.
    """

    variables: list
    objective: list
    constraints: list = field(default_factory=list)
    bounds: Optional[list] = None
    name: str = ""

    def __post_init__(self):
        n = len(self.variables)
        if len(set(self.variables)) != n:
            raise ValidationError("duplicate variable names")
        if len(self.objective) != n:
            raise ValidationError(f"objective has {len(self.objective)} entries for {n} variables")
        self.objective = [as_rational(c) for c in self.objective]
        clean = []
        for k, con in enumerate(self.constraints):
            if not isinstance(con, Constraint):
                con = Constraint(*con)
            if con.relation not in RELATIONS:
                raise ValidationError(f"unknown relation {con.relation!r}")
            if len(con.coeffs) != n:
                raise ValidationError(f"constraint {con.name or k} has {len(con.coeffs)} "
                                      f"coefficients for {n} variables")
            clean.append(Constraint(tuple(as_rational(c) for c in con.coeffs), con.relation,
                                    as_rational(con.rhs), con.name or f"c{k}"))
        self.constraints = clean
        if self.bounds is None:
            self.bounds = [(Fraction(0), None)] * n
        if len(self.bounds) != n:
            raise ValidationError("one bound pair per variable is required")
        self.bounds = [(None if lo is None else as_rational(lo), None if hi is None else as_rational(hi))
                       for lo, hi in self.bounds]

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def is_feasible(self, x) -> bool:
        for (lo, hi), v in zip(self.bounds, x):
            if (lo is not None and v < lo) or (hi is not None and v > hi):
                return False
        return all(con.holds(x) for con in self.constraints)

    def value(self, x) -> Fraction:
        return sum((c * v for c, v in zip(self.objective, x) if c), Fraction(0))


class LpBuilder:
    """Incremental construction with named variables and sparse rows."""

    def __init__(self, name: str = ""):
        self.name = name
        self.variables: list = []
        self.index: dict = {}
        self.bounds: list = []
        self.objective: dict = {}
        self.rows: list = []

    def var(self, name, lower=0, upper=None) -> str:
        if name in self.index:
            raise ValidationError(f"variable {name!r} defined twice")
        self.index[name] = len(self.variables)
        self.variables.append(name)
        self.bounds.append((lower, upper))
        return name

    def maximize(self, terms: dict):
        self.objective = dict(terms)

    def add(self, terms: dict, relation: str, rhs, name: str = ""):
        self.rows.append((dict(terms), relation, rhs, name))

    def build(self) -> LinearProgram:
        n = len(self.variables)
        obj = [Fraction(0)] * n
        for v, c in self.objective.items():
            obj[self.index[v]] += as_rational(c)
        cons = []
        for terms, rel, rhs, name in self.rows:
            row = [Fraction(0)] * n
            for v, c in terms.items():
                row[self.index[v]] += as_rational(c)
            cons.append(Constraint(tuple(row), rel, rhs, name))
        return LinearProgram(list(self.variables), obj, cons, list(self.bounds), self.name)


@dataclass
class LpSolution:
    """``duals`` holds one multiplier per constraint (Lagrangian sign convention)."""

    status: str
    assignment: dict = field(default_factory=dict)
    objective_value: Optional[Fraction] = None
    duals: list = field(default_factory=list)
    ray: Optional[dict] = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    def __getitem__(self, name):
        return self.assignment[name]

    def vector(self, lp: LinearProgram) -> list:
        return [self.assignment[v] for v in lp.variables]


def _lcm_den(values) -> int:
    out = 1
    for v in values:
        out = out * v.denominator // math.gcd(out, v.denominator)
    return out


def dual_bound(lp: LinearProgram, duals: Sequence[Fraction]) -> Optional[Fraction]:
    """Upper bound on the LP optimum implied by constraint multipliers ``duals``.

    Returns ``None`` when the multipliers have the wrong sign for some row or
    leave a reduced cost pointing at an infinite bound (the bound is vacuous).
    """
    if len(duals) != len(lp.constraints):
        return None
    total = Fraction(0)
    reduced = list(lp.objective)
    for y, con in zip(duals, lp.constraints):
        if (con.relation == LE and y < 0) or (con.relation == GE and y > 0):
            return None
        if y:
            total += y * con.rhs
            for j, a in enumerate(con.coeffs):
                if a:
                    reduced[j] -= y * a
    for r, (lo, hi) in zip(reduced, lp.bounds):
        if r > 0:
            if hi is None:
                return None
            total += r * hi
        elif r < 0:
            if lo is None:
                return None
            total += r * lo
    return total


def verify_optimal(lp: LinearProgram, sol: LpSolution) -> bool:
    """Exact feasibility plus zero duality gap."""
    x = sol.vector(lp)
    if not lp.is_feasible(x) or lp.value(x) != sol.objective_value:
        return False
    return dual_bound(lp, sol.duals) == sol.objective_value


class _Tableau:
    """Standard-form translation of a LinearProgram and the simplex itself."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        # columns for each original variable: list of (column, sign); x = shift + sum(sign*col)
        self.shift = []
        self.var_cols = []
        ncol = 0
        upper_rows = []  # (column, width) rows col <= width
        for lo, hi in lp.bounds:
            if lo is not None:
                self.shift.append(lo)
                self.var_cols.append([(ncol, 1)])
                if hi is not None:
                    if hi < lo:
                        self.empty_box = True
                    upper_rows.append((ncol, hi - lo))
                ncol += 1
            elif hi is not None:
                self.shift.append(hi)
                self.var_cols.append([(ncol, -1)])
                ncol += 1
            else:
                self.shift.append(Fraction(0))
                self.var_cols.append([(ncol, 1), (ncol + 1, -1)])
                ncol += 2
        self.n_struct = ncol
        rows = []  # (coeffs over structural cols, relation, rhs)
        for con in lp.constraints:
            coeffs = [Fraction(0)] * ncol
            rhs = con.rhs
            for j, a in enumerate(con.coeffs):
                if a:
                    rhs -= a * self.shift[j]
                    for col, s in self.var_cols[j]:
                        coeffs[col] += s * a
            rows.append((coeffs, con.relation, rhs))
        for col, width in upper_rows:
            coeffs = [Fraction(0)] * ncol
            coeffs[col] = Fraction(1)
            rows.append((coeffs, LE, width))
        self.rows = rows
        c = [Fraction(0)] * ncol
        self.obj_const = Fraction(0)
        for j, cj in enumerate(lp.objective):
            self.obj_const += cj * self.shift[j]
            for col, s in self.var_cols[j]:
                c[col] += s * cj
        self.c = c

    def solve(self) -> LpSolution:
        lp = self.lp
        if getattr(self, "empty_box", False):
            return LpSolution(INFEASIBLE)
        m = len(self.rows)
        ns = self.n_struct
        # scale each row to integers, flip to make rhs >= 0
        scaled = []
        self.row_factor = []
        n_slack = n_art = 0
        kinds = []
        for coeffs, rel, rhs in self.rows:
            s = _lcm_den(coeffs + [rhs])
            if rhs < 0:
                s = -s
                rel = {LE: GE, GE: LE, EQ: EQ}[rel]
            scaled.append(([int(a * s) for a in coeffs], int(rhs * s)))
            self.row_factor.append(Fraction(s))
            kinds.append(rel)
            if rel == LE:
                n_slack += 1
            elif rel == GE:
                n_slack += 1
                n_art += 1
            else:
                n_art += 1
        first_slack = ns
        first_art = ns + n_slack
        width = first_art + n_art + 1
        rhs_col = width - 1
        T = []
        basis = []
        ident_col = []  # column holding +identity for row i initially
        si, ai = first_slack, first_art
        art_rows = []
        for i, ((coeffs, b), rel) in enumerate(zip(scaled, kinds)):
            row = coeffs + [0] * (width - ns)
            row[rhs_col] = b
            if rel == LE:
                row[si] = 1
                basis.append(si)
                ident_col.append(si)
                si += 1
            else:
                if rel == GE:
                    row[si] = -1
                    si += 1
                row[ai] = 1
                basis.append(ai)
                ident_col.append(ai)
                art_rows.append(i)
                ai += 1
            T.append(row)
        cden = _lcm_den(self.c)
        zrow = [-int(cj * cden) for cj in self.c] + [0] * (width - ns)
        wrow = [0] * width
        for i in art_rows:
            for j in range(width):
                if j < first_art or j == rhs_col:
                    wrow[j] -= T[i][j]
        T.append(zrow)
        T.append(wrow)
        zr, wr = m, m + 1
        det = 1
        pivots = 0

        def ratio_row(q):
            best = None
            for i in range(m):
                a = T[i][q]
                if a > 0:
                    if best is None:
                        best = i
                        continue
                    lhs = T[i][rhs_col] * T[best][q]
                    rhs = T[best][rhs_col] * a
                    if lhs < rhs or (lhs == rhs and basis[i] < basis[best]):
                        best = i
            return best

        # phase 1
        if art_rows:
            while True:
                wv = T[wr]
                q = next((j for j in range(first_art) if wv[j] < 0), None)
                if q is None:
                    break
                r = ratio_row(q)
                det = _kernels.pivot(T, r, q, det)
                basis[r] = q
                pivots += 1
            if T[wr][rhs_col] != 0:
                return LpSolution(INFEASIBLE, pivots=pivots)
            # drive zero-level artificials out where possible
            for i in range(m):
                if basis[i] >= first_art:
                    q = next((j for j in range(first_art) if T[i][j] != 0), None)
                    if q is not None:
                        det = _kernels.pivot(T, i, q, det)
                        basis[i] = q
                        pivots += 1
        T.pop()  # phase-1 row no longer needed
        # phase 2
        while True:
            zv = T[zr]
            q = next((j for j in range(first_art) if zv[j] < 0), None)
            if q is None:
                break
            r = ratio_row(q)
            if r is None:
                return self._unbounded(T, basis, q, det, pivots)
            det = _kernels.pivot(T, r, q, det)
            basis[r] = q
            pivots += 1
        values = [Fraction(0)] * ns
        for i, bcol in enumerate(basis):
            if bcol < ns:
                values[bcol] = Fraction(T[i][rhs_col], det)
        x = self._original(values)
        duals = []
        for k in range(len(lp.constraints)):
            y = Fraction(T[zr][ident_col[k]], det * cden)
            duals.append(y * self.row_factor[k])
        obj = lp.value(x)
        return LpSolution(OPTIMAL, dict(zip(lp.variables, x)), obj, duals, pivots=pivots)

    def _original(self, values, direction=False):
        out = []
        for j, cols in enumerate(self.var_cols):
            v = Fraction(0) if direction else self.shift[j]
            for col, s in cols:
                v += s * values[col]
            out.append(v)
        return out

    def _unbounded(self, T, basis, q, det, pivots):
        ns = self.n_struct
        d = [Fraction(0)] * ns
        if q < ns:
            d[q] = Fraction(1)
        for i, bcol in enumerate(basis):
            if bcol < ns:
                d[bcol] = Fraction(-T[i][q], det)
        ray = dict(zip(self.lp.variables, self._original(d, direction=True)))
        return LpSolution(UNBOUNDED, ray=ray, pivots=pivots)


def solve_lp(lp: LinearProgram, check: bool = True) -> LpSolution:
    """Solve ``lp`` exactly.  Optimal results are certified unless ``check`` is false."""
    sol = _Tableau(lp).solve()
    if sol.status == OPTIMAL and check and not verify_optimal(lp, sol):
        raise ConsistencyError(f"LP {lp.name or '<anon>'}: optimality certificate failed")
    return sol


def dump_lp(lp: LinearProgram) -> str:
    """Human-readable text form, one constraint per line."""

    def expr(coeffs):
        parts = []
        for c, v in zip(coeffs, lp.variables):
            if c:
                sign = "-" if c < 0 else "+"
                mag = abs(c)
                parts.append(f"{sign} {'' if mag == 1 else str(mag) + ' '}{v}")
        if not parts:
            return "0"
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[1:]

    lines = [f"\\ {lp.name}" if lp.name else "\\ lp", "maximize", f"  obj: {expr(lp.objective)}",
             "subject to"]
    for con in lp.constraints:
        lines.append(f"  {con.name}: {expr(con.coeffs)} {con.relation} {con.rhs}")
    lines.append("bounds")
    for v, (lo, hi) in zip(lp.variables, lp.bounds):
        lo_s = "-inf" if lo is None else str(lo)
        hi_s = "+inf" if hi is None else str(hi)
        lines.append(f"  {lo_s} <= {v} <= {hi_s}")
    lines.append("end")
    return "\n".join(lines) + "\n"
