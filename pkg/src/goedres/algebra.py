"""Exact-rational Goedel algebra on [0,1] and evaluation of formulas and
order clauses in finite interpretations.

All truth-value arithmetic uses Fraction; the order operators '=' and '<'
are discontinuous, so floating point is never used.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .syntax import (
    App,
    Atom,
    Bin,
    Delta,
    Neg,
    OrderClause,
    QAtom,
    Quant,
    TruthConst,
    Var,
    clause_freevars,
)

ONE = Fraction(1)
ZERO = Fraction(0)


def _check(a):
    if not ZERO <= a <= ONE:
        raise ValueError("truth value out of [0,1]: %s" % a)
    return a


def g_and(a, b):
    return min(_check(a), _check(b))


def g_or(a, b):
    return max(_check(a), _check(b))


def g_implies(a, b):
    return ONE if _check(a) <= _check(b) else b


def g_neg(a):
    return ONE if _check(a) == ZERO else ZERO


def g_delta(a):
    return ONE if _check(a) == ONE else ZERO


def g_eq(a, b):
    return ONE if _check(a) == _check(b) else ZERO


def g_lt(a, b):
    return ONE if _check(a) < _check(b) else ZERO


# The defining laws and the ten lattice/residuum identities, checked exactly
# on sample triples.  Each entry is (name, arity, checker).

IDENTITIES = [
    ("residuation", 3, lambda a, b, c: (min(a, b) <= c) == (a <= g_implies(b, c))),
    ("neg_as_implies_bot", 1, lambda a: g_neg(a) == g_implies(a, ZERO)),
    ("delta_as_eq_top", 1, lambda a: g_delta(a) == g_eq(a, ONE)),
    ("or_over_and", 3, lambda a, b, c: g_or(a, g_and(b, c)) == g_and(g_or(a, b), g_or(a, c))),
    ("and_over_or", 3, lambda a, b, c: g_and(a, g_or(b, c)) == g_or(g_and(a, b), g_and(a, c))),
    ("implies_or", 3, lambda a, b, c: g_implies(a, g_or(b, c)) == g_or(g_implies(a, b), g_implies(a, c))),
    ("implies_and", 3, lambda a, b, c: g_implies(a, g_and(b, c)) == g_and(g_implies(a, b), g_implies(a, c))),
    ("or_implies", 3, lambda a, b, c: g_implies(g_or(a, b), c) == g_and(g_implies(a, c), g_implies(b, c))),
    ("and_implies", 3, lambda a, b, c: g_implies(g_and(a, b), c) == g_or(g_implies(a, c), g_implies(b, c))),
    ("currying", 3, lambda a, b, c: g_implies(a, g_implies(b, c)) == g_implies(g_and(a, b), c)),
    ("residual_collapse", 2, lambda a, b, _=None: g_implies(g_implies(g_implies(a, b), b), b) == g_implies(a, b)),
    ("residual_expand", 3, lambda a, b, c: g_implies(g_implies(a, b), c)
        == g_or(g_and(g_implies(g_implies(a, b), b), g_implies(b, c)), c)),
    ("neg_of_implies", 2, lambda a, b, _=None: g_implies(g_implies(a, b), ZERO)
        == g_and(g_implies(g_implies(a, ZERO), ZERO), g_implies(b, ZERO))),
]


def check_identities(samples):
    """Assert every identity on every sample triple.

    `samples` is an iterable of (a, b, c) Fraction triples.  Returns the
    number of checks performed; raises AssertionError naming the first
    violated identity and its witness.
    """
    checks = 0
    for a, b, c in samples:
        for name, arity, fn in IDENTITIES:
            ok = fn(a) if arity == 1 else fn(a, b) if arity == 2 else fn(a, b, c)
            if not ok:
                raise AssertionError(
                    "identity %s violated at a=%s b=%s c=%s" % (name, a, b, c)
                )
            checks += 1
    return checks


def grid(points):
    """The full cube of triples over the given truth values."""
    pts = [Fraction(p) for p in points]
    return list(product(pts, repeat=3))


# ---------------------------------------------------------------------------
# Finite interpretations


@dataclass
class Interpretation:
    """Finite interpretation: a nonempty label universe, total function
    tables and total [0,1]-valued predicate tables."""

    universe: tuple
    functions: dict  # name -> {arg_labels_tuple: label}
    predicates: dict  # name -> {arg_labels_tuple: Fraction}

    def __post_init__(self):
        if not self.universe:
            raise ValueError("universe must be nonempty")

    def fun(self, name, args):
        table = self.functions.get(name)
        if table is None:
            raise KeyError("no table for function %r" % name)
        try:
            return table[tuple(args)]
        except KeyError:
            raise KeyError("function table %r not total at %r" % (name, args))

    def pred(self, name, args):
        table = self.predicates.get(name)
        if table is None:
            raise KeyError("no table for predicate %r" % name)
        try:
            return _check(table[tuple(args)])
        except KeyError:
            raise KeyError("predicate table %r not total at %r" % (name, args))


def eval_term(interp, assignment, t):
    if isinstance(t, Var):
        try:
            return assignment[t.name]
        except KeyError:
            raise KeyError("assignment missing variable %r" % t.name)
    return interp.fun(t.func, [eval_term(interp, assignment, a) for a in t.args])


def eval_formula(interp, assignment, phi):
    """Truth value of a formula under a variable assignment."""
    if isinstance(phi, Atom):
        return interp.pred(
            phi.pred, [eval_term(interp, assignment, t) for t in phi.args]
        )
    if isinstance(phi, TruthConst):
        return phi.value
    if isinstance(phi, Neg):
        return g_neg(eval_formula(interp, assignment, phi.sub))
    if isinstance(phi, Delta):
        return g_delta(eval_formula(interp, assignment, phi.sub))
    if isinstance(phi, Bin):
        a = eval_formula(interp, assignment, phi.left)
        b = eval_formula(interp, assignment, phi.right)
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
    if isinstance(phi, (Quant, QAtom)):
        if isinstance(phi, QAtom):
            quant, var, sub = phi.quant, phi.var, phi.body
        else:
            quant, var, sub = phi.quant, phi.var, phi.sub
        values = []
        for u in interp.universe:
            inner = dict(assignment)
            inner[var] = u
            values.append(eval_formula(interp, inner, sub))
        return min(values) if quant == "forall" else max(values)
    raise TypeError("cannot evaluate %r" % (phi,))


def eval_literal(interp, assignment, lit):
    a = eval_formula(interp, assignment, lit.left)
    b = eval_formula(interp, assignment, lit.right)
    return g_eq(a, b) if lit.op == "=" else g_lt(a, b)


def _assignments(interp, variables):
    names = sorted(variables)
    if not names:
        yield {}
        return
    for combo in product(interp.universe, repeat=len(names)):
        yield dict(zip(names, combo))


def clause_true_under(interp, assignment, c: OrderClause) -> bool:
    return any(eval_literal(interp, assignment, l) == ONE for l in c.literals)


def models(interp, target) -> bool:
    """Is the interpretation a model of a formula, clause, or iterable of
    them?  Clauses are checked under every assignment of their free
    variables (the universe is finite)."""
    if isinstance(target, OrderClause):
        return all(
            clause_true_under(interp, e, target)
            for e in _assignments(interp, clause_freevars(target))
        )
    if isinstance(target, (Atom, TruthConst, Neg, Delta, Bin, Quant, QAtom)):
        from .syntax import formula_freevars

        fv = formula_freevars(target) if not isinstance(target, QAtom) else set()
        return all(
            eval_formula(interp, e, target) == ONE
            for e in _assignments(interp, fv)
        )
    return all(models(interp, x) for x in target)


def interpretation_from_valuation(clauses, valuation, default=ZERO):
    """Build a finite interpretation from a ground-atom valuation so that
    models() can independently confirm an oracle witness.

    The universe consists of labels for all ground terms occurring in the
    clauses (plus a sink label); function tables act as constructors on
    occurring terms and send everything else to the sink.
    """
    from .syntax import clause_atoms, subterms

    terms = set()
    atoms = set()
    for c in clauses:
        for a in clause_atoms(c):
            atoms.add(a)
            for t in a.args:
                terms.update(subterms(t))
    labels = sorted(repr(t) for t in terms)
    sink = "<sink>"
    universe = tuple(labels) + (sink,)

    functions: dict = {}
    predicates: dict = {}
    term_label = {t: repr(t) for t in terms}
    arity_f: dict = {}
    arity_p: dict = {}
    for t in terms:
        if isinstance(t, App):
            arity_f[t.func] = len(t.args)
    for a in atoms:
        arity_p[a.pred] = len(a.args)

    for name, n in arity_f.items():
        table = {}
        for combo in product(universe, repeat=n):
            table[combo] = sink
        for t in terms:
            if isinstance(t, App) and t.func == name:
                table[tuple(term_label[x] for x in t.args)] = term_label[t]
        functions[name] = table

    atom_value = {a: valuation[a] for a in atoms if a in valuation}
    for name, n in arity_p.items():
        table = {}
        for combo in product(universe, repeat=n):
            table[combo] = default
        for a, v in atom_value.items():
            if a.pred == name:
                table[tuple(term_label[x] for x in a.args)] = Fraction(v)
        predicates[name] = table

    return Interpretation(universe, functions, predicates)
