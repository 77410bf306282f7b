"""Exact linear programming over the rationals.

``Problem`` holds rows over named nonnegative variables. Equalities are
eliminated first (each pivot variable becomes an affine expression in the
remaining ones, and its nonnegativity turns into an inequality); the reduced
problem is solved with the dictionary simplex method, Bland's rule, and the
auxiliary-variable first phase. No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping

ZERO = Fraction(0)

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass
class LPResult:
    status: str
    values: dict = field(default_factory=dict)
    objective: Fraction | None = None


def _add(acc: dict, coeffs: Mapping, scale: Fraction = Fraction(1)):
    for k, v in coeffs.items():
        x = acc.get(k, ZERO) + scale * v
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)


class Reduced:
    """Inequalities ``Σ a_k x_k <= b`` over free variables after eliminating equalities."""

    def __init__(self, variables, le_rows, eq_rows):
        self.variables = list(variables)
        self.subst: dict = {}  # pivot var -> (const, {free var: coeff}) meaning x = const + Σ
        self.infeasible = False
        for coeffs, rhs in eq_rows:
            self._eliminate(dict(coeffs), Fraction(rhs))
            if self.infeasible:
                return
        self.free = [v for v in self.variables if v not in self.subst]
        rows = {}
        for coeffs, rhs in le_rows:
            self._put(rows, *self.substitute(coeffs, rhs))
        for v, (const, expr) in self.subst.items():
            # x_v >= 0, i.e. -Σ expr <= const
            self._put(rows, {k: -c for k, c in expr.items()}, const)
        self.rows = [(dict(k), b) for k, b in rows.items()]

    def _put(self, rows, coeffs, rhs):
        if not coeffs:
            if rhs < 0:
                self.infeasible = True
            return
        key = tuple(sorted(coeffs.items(), key=lambda kv: repr(kv[0])))
        if key not in rows or rhs < rows[key]:
            rows[key] = rhs

    def substitute(self, coeffs: Mapping, rhs=ZERO):
        """Rewrite ``Σ coeffs·x <= rhs`` (or an objective) over the free variables."""
        out: dict = {}
        rhs = Fraction(rhs)
        for k, c in coeffs.items():
            c = Fraction(c)
            if k in self.subst:
                const, expr = self.subst[k]
                rhs -= c * const
                _add(out, expr, c)
            elif c:
                _add(out, {k: c})
        return out, rhs

    def _eliminate(self, coeffs: dict, rhs: Fraction):
        expr, rhs = self.substitute(coeffs, rhs)
        if not expr:
            if rhs != 0:
                self.infeasible = True
            return
        pivot = min(expr, key=lambda k: self.variables.index(k))
        a = expr.pop(pivot)
        # pivot = rhs/a - Σ (c/a) x
        new = (rhs / a, {k: -c / a for k, c in expr.items()})
        for v, (const, e) in list(self.subst.items()):
            if pivot in e:
                c = e[pivot]
                e2 = dict(e)
                del e2[pivot]
                _add(e2, new[1], c)
                self.subst[v] = (const + c * new[0], e2)
        self.subst[pivot] = new

    def expand(self, free_values: Mapping) -> dict:
        out = {v: Fraction(free_values.get(v, ZERO)) for v in self.free}
        for v, (const, expr) in self.subst.items():
            out[v] = const + sum((c * out[k] for k, c in expr.items()), ZERO)
        return out


class Problem:
    """Maximise a linear objective over nonnegative variables subject to rows."""

    def __init__(self, variables):
        self.variables = list(variables)
        self.le: list = []
        self.eq: list = []

    def add(self, coeffs: Mapping[Hashable, Fraction], op: str, rhs) -> None:
        coeffs = {k: Fraction(v) for k, v in coeffs.items() if v}
        rhs = Fraction(rhs)
        if op == "<=":
            self.le.append((coeffs, rhs))
        elif op == ">=":
            self.le.append(({k: -v for k, v in coeffs.items()}, -rhs))
        elif op == "==":
            self.eq.append((coeffs, rhs))
        else:
            raise ValueError(f"unknown row operator {op!r}")

    def reduce(self) -> Reduced:
        return Reduced(self.variables, self.le, self.eq)

    def maximize(self, objective: Mapping[Hashable, Fraction], reduced: Reduced | None = None,
                 extra=()) -> LPResult:
        """Optimum of ``objective``; ``extra`` rows are (coeffs, "<="|">=", rhs) on top of ``reduced``."""
        R = reduced or self.reduce()
        if R.infeasible:
            return LPResult(INFEASIBLE)
        rows = list(R.rows)
        for coeffs, op, rhs in extra:
            c, b = R.substitute(coeffs, rhs)
            if op == ">=":
                c, b = {k: -v for k, v in c.items()}, -b
            elif op != "<=":
                raise ValueError("extra rows must be inequalities")
            if not c:
                if b < 0:
                    return LPResult(INFEASIBLE)
                continue
            rows.append((c, b))
        obj, const = R.substitute(objective)
        status, free_values, value = dictionary_simplex(R.free, rows, obj)
        if status != OPTIMAL:
            return LPResult(status)
        return LPResult(OPTIMAL, R.expand(free_values), value - const)


def dictionary_simplex(variables, rows, objective):
    """Maximise ``objective`` s.t. ``Σ a x <= b`` for each row and ``x >= 0``.

    Returns (status, values, optimum). Variables are labelled by position, the
    slack of row r by ``n + r`` and the auxiliary variable by ``-1``; Bland's
    rule picks the smallest label among candidates, which rules out cycling.
    """
    n, m = len(variables), len(rows)
    pos = {v: k for k, v in enumerate(variables)}
    # basic[r] = b_r + Σ_j D[r][j] * nonbasic_j ; nonbasic labels in `nb`
    nb = list(range(n))
    basic = [n + r for r in range(m)]
    D = [[ZERO] * n for _ in range(m)]
    b = [ZERO] * m
    for r, (coeffs, rhs) in enumerate(rows):
        for k, c in coeffs.items():
            D[r][pos[k]] = -Fraction(c)
        b[r] = Fraction(rhs)

    def pivot(r, j, z):
        """Exchange basic[r] with nb[j]; z is the objective row (list, const last)."""
        a = D[r][j]
        row = [-x / a for x in D[r]]
        row[j] = 1 / a
        br = -b[r] / a
        D[r], b[r] = row, br
        basic[r], nb[j] = nb[j], basic[r]
        for s in range(m):
            if s == r:
                continue
            c = D[s][j]
            if c:
                Ds = D[s]
                for k in range(len(row)):
                    Ds[k] = c * row[k] if k == j else Ds[k] + c * row[k]
                b[s] += c * br
        c = z[j]
        if c:
            for k in range(len(row)):
                z[k] = c * row[k] if k == j else z[k] + c * row[k]
            z[-1] += c * br

    def run(z):
        while True:
            cands = [j for j in range(len(nb)) if z[j] > 0]
            if not cands:
                return OPTIMAL
            j = min(cands, key=lambda j: nb[j])
            best = None
            for r in range(m):
                if D[r][j] < 0:
                    ratio = b[r] / -D[r][j]
                    key = (ratio, basic[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return UNBOUNDED
            pivot(best[1], j, z)

    if m and min(b) < 0:
        # auxiliary problem: maximise -x0 with x0 added to every row
        nb.append(-1)
        for r in range(m):
            D[r].append(Fraction(1))
        z = [ZERO] * (n + 1) + [ZERO]
        z[n] = Fraction(-1)
        r0 = min(range(m), key=lambda r: (b[r], basic[r]))
        pivot(r0, n, z)
        run(z)
        if z[-1] < 0:
            return INFEASIBLE, {}, None
        if -1 in basic:
            r = basic.index(-1)
            j = next((j for j in range(len(nb)) if D[r][j] != 0), None)
            pivot(r, j, [ZERO] * (len(nb) + 1))
        j = nb.index(-1)
        for r in range(m):
            del D[r][j]
        del nb[j]
    # objective in terms of the current nonbasic variables
    z = [ZERO] * (len(nb) + 1)
    for k, c in objective.items():
        c = Fraction(c)
        label = pos[k]
        if label in nb:
            z[nb.index(label)] += c
        else:
            r = basic.index(label)
            for j in range(len(nb)):
                z[j] += c * D[r][j]
            z[-1] += c * b[r]
    status = run(z)
    if status != OPTIMAL:
        return status, {}, None
    values = {}
    for r, lab in enumerate(basic):
        if 0 <= lab < n:
            values[variables[lab]] = b[r]
    return OPTIMAL, values, z[-1]


__all__ = ["Problem", "Reduced", "LPResult", "dictionary_simplex", "OPTIMAL", "INFEASIBLE", "UNBOUNDED"]
