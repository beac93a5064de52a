"""Brute-force satisfiability oracle for ground, quantified-atom-free
order-clausal theories, and brute-force entailment for ground formulas.

Only the position of each atom relative to the occurring truth constants
and to the other atoms matters, so a finite value grid is complete: take
the occurring constants (plus 0 and 1) and add, inside every gap between
consecutive constants, as many equally spaced slots as there are atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .algebra import g_and, g_delta, g_eq, g_implies, g_lt, g_neg, g_or
from .syntax import (
    Atom,
    Bin,
    Delta,
    Neg,
    OrderClause,
    QAtom,
    Quant,
    TruthConst,
    clause_atoms,
    clause_is_ground,
    clause_qatoms,
    clause_tcons,
    formula_tcons,
)

ONE = Fraction(1)


class OracleInputError(ValueError):
    pass


@dataclass
class SatResult:
    satisfiable: bool
    valuation: dict | None  # ground Atom -> Fraction

    def render(self) -> str:
        if not self.satisfiable:
            return "UNSAT"
        lines = ["SAT"]
        for atom in sorted(self.valuation, key=repr):
            lines.append("%r = %s" % (atom, self.valuation[atom]))
        return "\n".join(lines)


def _require_ground_qfree(clauses):
    for c in clauses:
        if not isinstance(c, OrderClause):
            raise OracleInputError("oracle expects order clauses")
        if clause_qatoms(c):
            raise OracleInputError("oracle requires quantified-atom-free input")
        if not clause_is_ground(c):
            raise OracleInputError("oracle requires ground input")


def value_grid(constants, n_atoms):
    """Occurring constants plus n_atoms equally spaced slots per gap."""
    consts = sorted(set(Fraction(c) for c in constants) | {Fraction(0), Fraction(1)})
    points = list(consts)
    for lo, hi in zip(consts, consts[1:]):
        step = (hi - lo) / (n_atoms + 1)
        for j in range(1, n_atoms + 1):
            points.append(lo + j * step)
    return sorted(set(points))


def _lit_value(lit, val):
    def side(e):
        if isinstance(e, TruthConst):
            return e.value
        return val[e]

    a, b = side(lit.left), side(lit.right)
    return g_eq(a, b) if lit.op == "=" else g_lt(a, b)


def brute_force_sat(clauses) -> SatResult:
    """Decide satisfiability of a ground quantified-atom-free theory by
    enumerating valuations over the completeness grid."""
    clauses = list(clauses)
    _require_ground_qfree(clauses)
    atoms = sorted({a for c in clauses for a in clause_atoms(c)}, key=repr)
    constants = {t.value for c in clauses for t in clause_tcons(c)}
    points = value_grid(constants, len(atoms))
    for combo in product(points, repeat=len(atoms)):
        val = dict(zip(atoms, combo))
        if all(
            any(_lit_value(l, val) == ONE for l in c.literals) for c in clauses
        ):
            return SatResult(True, val)
    return SatResult(False, None)


# ---------------------------------------------------------------------------
# Ground formula evaluation and entailment


def _collect_formula_atoms(phi, out):
    if isinstance(phi, Atom):
        out.add(phi)
    elif isinstance(phi, (Neg, Delta)):
        _collect_formula_atoms(phi.sub, out)
    elif isinstance(phi, Bin):
        _collect_formula_atoms(phi.left, out)
        _collect_formula_atoms(phi.right, out)
    elif isinstance(phi, (Quant, QAtom)):
        raise OracleInputError("quantifiers not supported in ground entailment")


def eval_ground_formula(phi, val):
    if isinstance(phi, Atom):
        return val[phi]
    if isinstance(phi, TruthConst):
        return phi.value
    if isinstance(phi, Neg):
        return g_neg(eval_ground_formula(phi.sub, val))
    if isinstance(phi, Delta):
        return g_delta(eval_ground_formula(phi.sub, val))
    if isinstance(phi, Bin):
        a = eval_ground_formula(phi.left, val)
        b = eval_ground_formula(phi.right, val)
        if phi.op == "&":
            return g_and(a, b)
        if phi.op == "|":
            return g_or(a, b)
        if phi.op == "->":
            return g_implies(a, b)
        if phi.op == "<->":
            return g_and(g_implies(a, b), g_implies(b, a))
        if phi.op == "=":
            return g_eq(a, b)
        return g_lt(a, b)
    raise OracleInputError("cannot evaluate %r" % (phi,))


def entails_ground(theory, phi) -> bool:
    """Brute-force entailment for ground quantifier-free formulas: no grid
    valuation makes every theory member 1 while the goal stays below 1."""
    atoms: set = set()
    constants: set = set()
    for f in list(theory) + [phi]:
        _collect_formula_atoms(f, atoms)
        constants |= {t.value for t in formula_tcons(f)}
    atoms = sorted(atoms, key=repr)
    points = value_grid(constants, len(atoms))
    for combo in product(points, repeat=len(atoms)):
        val = dict(zip(atoms, combo))
        if all(eval_ground_formula(f, val) == ONE for f in theory):
            if eval_ground_formula(phi, val) != ONE:
                return False
    return True
