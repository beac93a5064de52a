"""Substitutions and unification for the order-clause language.

A substitution is a finite map from variable names to terms.  Application
is strict: the domain must cover the (free) variables of the target, and
applying to a quantified atom must not capture its bound variable.

mgu() unifies a sequence of expression families (terms, atoms, truth
constants, quantified atoms, order literals).  Equality literals are
identified with their flipped form, so unification of two '='-literals
tries the direct orientation first and the flipped one second; the first
success wins.  The result maps every free variable of the input (possibly
to itself), is idempotent, and its range avoids a protected variable set
that always includes all bound variables of the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .syntax import (
    App,
    Atom,
    OrderClause,
    OrderLit,
    QAtom,
    TruthConst,
    Var,
    clause_freevars,
    element_freevars,
    lit_freevars,
    term_vars,
)


class SubstitutionError(ValueError):
    pass


class NoUnifier(Exception):
    """Raised when a family sequence has no unifier."""


@dataclass(frozen=True)
class Substitution:
    mapping: tuple  # sorted tuple of (name, Term)

    @classmethod
    def of(cls, mapping: dict) -> "Substitution":
        return cls(tuple(sorted(mapping.items())))

    @classmethod
    def identity(cls, names) -> "Substitution":
        return cls.of({n: Var(n) for n in names})

    def as_dict(self) -> dict:
        return dict(self.mapping)

    @property
    def domain(self) -> frozenset:
        return frozenset(n for n, _ in self.mapping)

    def range_vars(self) -> set:
        out: set = set()
        for _, t in self.mapping:
            out |= term_vars(t)
        return out

    def get(self, name):
        for n, t in self.mapping:
            if n == name:
                return t
        return None

    def is_renaming(self) -> bool:
        seen = set()
        for _, t in self.mapping:
            if not isinstance(t, Var) or t.name in seen:
                return False
            seen.add(t.name)
        return True

    def restrict(self, names) -> "Substitution":
        return Substitution.of({n: t for n, t in self.mapping if n in names})

    def extend_identity(self, names) -> "Substitution":
        d = self.as_dict()
        for n in names:
            d.setdefault(n, Var(n))
        return Substitution.of(d)

    def __repr__(self):
        return ", ".join("%s/%r" % (n, t) for n, t in self.mapping)


def apply_term(theta: Substitution, t):
    if isinstance(t, Var):
        out = theta.get(t.name)
        if out is None:
            raise SubstitutionError("substitution not applicable: %s missing" % t.name)
        return out
    return App(t.func, tuple(apply_term(theta, a) for a in t.args))


def apply_atom(theta: Substitution, a: Atom) -> Atom:
    return Atom(a.pred, tuple(apply_term(theta, t) for t in a.args))


def apply_element(theta: Substitution, e):
    if isinstance(e, TruthConst):
        return e
    if isinstance(e, Atom):
        return apply_atom(theta, e)
    # quantified atom: apply on free variables, keep the bound one fixed
    free = element_freevars(e)
    restricted = theta.restrict(free)
    if restricted.domain < free:
        raise SubstitutionError("substitution not applicable to %r" % e)
    if e.var in restricted.range_vars():
        raise SubstitutionError(
            "capture: %s in range of substitution applied to %r" % (e.var, e)
        )
    inner = restricted.extend_identity({e.var})
    return QAtom(e.quant, e.var, apply_atom(inner, e.body))


def apply_literal(theta: Substitution, l: OrderLit) -> OrderLit:
    return OrderLit(apply_element(theta, l.left), l.op, apply_element(theta, l.right))


def apply_clause(theta: Substitution, c: OrderClause) -> OrderClause:
    return OrderClause(frozenset(apply_literal(theta, l) for l in c.literals))


def apply(theta: Substitution, e):
    """Apply a substitution to any syntactic category."""
    if isinstance(e, (Var, App)):
        return apply_term(theta, e)
    if isinstance(e, (Atom, TruthConst, QAtom)):
        return apply_element(theta, e)
    if isinstance(e, OrderLit):
        return apply_literal(theta, e)
    if isinstance(e, OrderClause):
        return apply_clause(theta, e)
    raise TypeError("cannot apply substitution to %r" % (e,))


def compose(theta: Substitution, theta2: Substitution) -> Substitution:
    """theta followed by theta2; requires range(theta) <= dom(theta2)."""
    if not theta.range_vars() <= set(theta2.domain):
        raise SubstitutionError("composition undefined: range not covered")
    return Substitution.of(
        {n: apply_term(theta2, t) for n, t in theta.mapping}
    )


# ---------------------------------------------------------------------------
# Free variables of mixed expressions


def expr_freevars(e) -> set:
    if isinstance(e, (Var, App)):
        return term_vars(e)
    if isinstance(e, (Atom, TruthConst, QAtom)):
        return element_freevars(e)
    if isinstance(e, OrderLit):
        return lit_freevars(e)
    if isinstance(e, OrderClause):
        return clause_freevars(e)
    raise TypeError("no free variables for %r" % (e,))


def expr_boundvars(e) -> set:
    if isinstance(e, QAtom):
        return {e.var}
    if isinstance(e, OrderLit):
        return expr_boundvars(e.left) | expr_boundvars(e.right)
    if isinstance(e, OrderClause):
        out: set = set()
        for l in e.literals:
            out |= expr_boundvars(l)
        return out
    return set()


# ---------------------------------------------------------------------------
# Unification


class _Solver:
    """Incremental term unification with occurs check and a protected set
    (bound variables may neither be instantiated nor appear in ranges)."""

    def __init__(self, protected):
        self.protected = frozenset(protected)
        self.sub: dict = {}

    def resolve(self, t):
        while isinstance(t, Var) and t.name in self.sub:
            t = self.sub[t.name]
        if isinstance(t, App):
            return App(t.func, tuple(self.resolve(a) for a in t.args))
        return t

    def bind(self, name, t):
        if name in self.protected:
            raise NoUnifier("bound variable %s cannot be instantiated" % name)
        if term_vars(t) & self.protected:
            raise NoUnifier("range would capture a bound variable")
        if name in term_vars(t):
            raise NoUnifier("occurs check: %s in %r" % (name, t))
        self.sub[name] = t

    def unify_terms(self, s, t):
        s = self.resolve(s)
        t = self.resolve(t)
        if s == t:
            return
        if isinstance(s, Var):
            self.bind(s.name, t)
            return
        if isinstance(t, Var):
            self.bind(t.name, s)
            return
        if s.func != t.func or len(s.args) != len(t.args):
            raise NoUnifier("clash: %r vs %r" % (s, t))
        for a, b in zip(s.args, t.args):
            self.unify_terms(a, b)

    def unify_elements(self, a, b):
        if isinstance(a, TruthConst) or isinstance(b, TruthConst):
            if not (isinstance(a, TruthConst) and isinstance(b, TruthConst)):
                raise NoUnifier("kind clash: %r vs %r" % (a, b))
            if a.value != b.value:
                raise NoUnifier("distinct truth constants %r, %r" % (a, b))
            return
        if isinstance(a, QAtom) or isinstance(b, QAtom):
            if not (isinstance(a, QAtom) and isinstance(b, QAtom)):
                raise NoUnifier("kind clash: %r vs %r" % (a, b))
            if a.quant != b.quant or a.var != b.var:
                raise NoUnifier("quantifier clash: %r vs %r" % (a, b))
            self.unify_elements(a.body, b.body)
            return
        if a.pred != b.pred or len(a.args) != len(b.args):
            raise NoUnifier("predicate clash: %r vs %r" % (a, b))
        for s, t in zip(a.args, b.args):
            self.unify_terms(s, t)

    def snapshot(self):
        return dict(self.sub)

    def restore(self, snap):
        self.sub = snap


def _literal_pairs(family):
    """Split a family into a representative-vs-member pair list."""
    members = list(family)
    rep = members[0]
    return [(rep, m) for m in members[1:]]


def mgu(families, protected=None) -> Substitution:
    """Most general unifier for a sequence of expression families.

    Each family is a nonempty collection of expressions of one kind (terms,
    atoms, truth constants, quantified atoms, or order literals); the
    unifier collapses every family to a singleton.  Raises NoUnifier when a
    family is empty or no unifier exists.
    """
    families = [list(f) for f in families]
    if any(not f for f in families):
        raise NoUnifier("a family is empty")

    free: set = set()
    bound: set = set()
    for f in families:
        for e in f:
            free |= expr_freevars(e)
            bound |= expr_boundvars(e)
    protected_set = bound | set(protected or ())
    if free & protected_set:
        raise NoUnifier("free and bound variable names overlap: %s"
                        % sorted(free & protected_set))

    element_pairs = []  # (a, b) element pairs, fixed
    flip_pairs = []  # ((l1, l2)) '='-literal pairs with two orientations
    solver = _Solver(protected_set)

    def queue_pair(a, b):
        if isinstance(a, OrderLit) or isinstance(b, OrderLit):
            if not (isinstance(a, OrderLit) and isinstance(b, OrderLit)):
                raise NoUnifier("kind clash: %r vs %r" % (a, b))
            if a.op != b.op:
                raise NoUnifier("connective clash: %r vs %r" % (a, b))
            if a.op == "=":
                flip_pairs.append((a, b))
            else:
                element_pairs.append((a.left, b.left))
                element_pairs.append((a.right, b.right))
        elif isinstance(a, (Var, App)) and isinstance(b, (Var, App)):
            element_pairs.append((a, b))
        else:
            element_pairs.append((a, b))

    for f in families:
        for rep, member in _literal_pairs(f):
            queue_pair(rep, member)

    for a, b in element_pairs:
        if isinstance(a, (Var, App)):
            solver.unify_terms(a, b)
        else:
            solver.unify_elements(a, b)

    # orientation choices for '='-literal pairs: direct first, flipped second
    def solve_flips(i):
        if i == len(flip_pairs):
            return True
        l1, l2 = flip_pairs[i]
        for orientation in ((l2.left, l2.right), (l2.right, l2.left)):
            snap = solver.snapshot()
            try:
                solver.unify_elements(l1.left, orientation[0])
                solver.unify_elements(l1.right, orientation[1])
                if solve_flips(i + 1):
                    return True
            except NoUnifier:
                pass
            solver.restore(snap)
        return False

    if not solve_flips(0):
        raise NoUnifier("no orientation of '='-literals unifies")

    theta = Substitution.of(
        {v: solver.resolve(Var(v)) for v in free}
    )
    # sanity: every family collapses
    for f in families:
        image = {_render_key(apply(theta, e)) for e in f}
        if len(image) != 1:
            raise NoUnifier("internal: family did not collapse")
    return theta


def _render_key(e):
    return repr(e)


def unifies(families, protected=None):
    try:
        return mgu(families, protected)
    except NoUnifier:
        return None


# ---------------------------------------------------------------------------
# Matching (one-way unification), instances, variants


def match_terms(pattern, target, bindings):
    if isinstance(pattern, Var):
        bound = bindings.get(pattern.name)
        if bound is None:
            bindings[pattern.name] = target
            return True
        return bound == target
    if isinstance(target, Var):
        return False
    if pattern.func != target.func or len(pattern.args) != len(target.args):
        return False
    return all(
        match_terms(p, t, bindings) for p, t in zip(pattern.args, target.args)
    )


def match_elements(pattern, target, bindings):
    if isinstance(pattern, TruthConst):
        return isinstance(target, TruthConst) and pattern.value == target.value
    if isinstance(pattern, QAtom):
        if (
            not isinstance(target, QAtom)
            or pattern.quant != target.quant
            or pattern.var != target.var
        ):
            return False
        inner = dict(bindings)
        inner[pattern.var] = Var(pattern.var)
        if not match_elements(pattern.body, target.body, inner):
            return False
        del inner[pattern.var]
        bindings.clear()
        bindings.update(inner)
        return True
    if not isinstance(target, Atom) or pattern.pred != target.pred:
        return False
    if len(pattern.args) != len(target.args):
        return False
    return all(
        match_terms(p, t, bindings) for p, t in zip(pattern.args, target.args)
    )


def match_literals(pattern, target, bindings):
    """Match a literal against another, trying both orientations for '='."""
    if pattern.op != target.op:
        return None
    orientations = [(target.left, target.right)]
    if pattern.op == "=":
        orientations.append((target.right, target.left))
    for left, right in orientations:
        trial = dict(bindings)
        if match_elements(pattern.left, left, trial) and match_elements(
            pattern.right, right, trial
        ):
            return trial
    return None


def clause_match(pattern: OrderClause, target: OrderClause, renaming_only=False):
    """Find a substitution s with pattern*s == target (as literal sets).

    With renaming_only, the substitution must be an injective variable
    renaming (then the clauses are variants).  Returns a Substitution or
    None.
    """
    pat = list(pattern.lits)
    tgt = list(target.lits)

    def ok_bindings(b):
        if not renaming_only:
            return True
        vals = list(b.values())
        return all(isinstance(v, Var) for v in vals) and len(
            {v.name for v in vals}
        ) == len(vals)

    def assign(i, bindings, used):
        if i == len(pat):
            if len(used) != len(tgt):
                return None
            return bindings
        for j, t in enumerate(tgt):
            trial = match_literals(pat[i], t, bindings)
            if trial is None or not ok_bindings(trial):
                continue
            result = assign(i + 1, trial, used | {j})
            if result is not None:
                return result
        # also allow mapping onto an already-used literal (collapse),
        # except under renaming
        if not renaming_only:
            for j in sorted(used):
                trial = match_literals(pat[i], tgt[j], bindings)
                if trial is not None:
                    result = assign(i + 1, trial, used)
                    if result is not None:
                        return result
        return None

    if renaming_only and len(pat) != len(tgt):
        return None
    found = assign(0, {}, frozenset())
    if found is None:
        return None
    theta = Substitution.of(found).extend_identity(clause_freevars(pattern))
    return theta


def instance_of(c: OrderClause, d: OrderClause):
    """Is c an instance of d?  Returns the witnessing substitution or None."""
    return clause_match(d, c)


def variant_of(c: OrderClause, d: OrderClause) -> bool:
    return clause_match(d, c, renaming_only=True) is not None


class FreshVars:
    """Source of fresh variable names, avoiding a growing pool."""

    def __init__(self, avoid=()):
        self.avoid = set(avoid)
        self.counter = 0

    def fresh(self, base: str) -> str:
        stem = base.split("_")[0]
        while True:
            self.counter += 1
            name = "%s_%d" % (stem, self.counter)
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def rename_apart(clauses, avoid=()):
    """Variants of the given clauses with pairwise disjoint free variables,
    fresh against `avoid`.  Returns (renamed_clauses, renamings)."""
    pool = FreshVars(set(avoid))
    for c in clauses:
        pool.avoid |= clause_freevars(c)
        pool.avoid |= expr_boundvars(c)
    out = []
    subs = []
    for c in clauses:
        fv = sorted(clause_freevars(c))
        rho = Substitution.of({v: Var(pool.fresh(v)) for v in fv})
        out.append(apply_clause(rho, c))
        subs.append(rho)
    return out, subs


# ---------------------------------------------------------------------------
# Canonical variants and condensation


def canonical_clause(c: OrderClause) -> OrderClause:
    """Rename free variables to a canonical sequence so that variants share
    one representation (used for duplicate suppression and replay checks)."""
    fv = clause_freevars(c)
    if not fv:
        return c

    def abstract_key(l):
        # structural key with variable names blanked
        def tk(t):
            if isinstance(t, Var):
                return ("v",)
            return ("a", t.func, tuple(tk(x) for x in t.args))

        def ek(e):
            if isinstance(e, TruthConst):
                return ("c", e.value)
            if isinstance(e, Atom):
                return ("p", e.pred, tuple(tk(x) for x in e.args))
            return ("q", e.quant, e.var, ek(e.body))

        return (ek(l.left), l.op, ek(l.right))

    groups: dict = {}
    for l in c.lits:
        groups.setdefault(abstract_key(l), []).append(l)

    group_items = sorted(groups.items())
    best = None

    def orderings(items):
        # permute only within groups of structurally identical literals
        from itertools import permutations

        pools = [list(permutations(ls)) if len(ls) > 1 else [tuple(ls)]
                 for _, ls in items]
        for combo in product(*pools):
            seq = []
            for part in combo:
                seq.extend(part)
            yield seq

    for seq in orderings(group_items):
        names: dict = {}
        ok = True
        renamed = []
        for l in seq:
            try:
                rho = {}
                for v in _lit_var_occurrences(l):
                    if v not in names:
                        names[v] = "v%d" % len(names)
                    rho[v] = Var(names[v])
                theta = Substitution.of(rho).extend_identity(lit_freevars(l))
                renamed.append(apply_literal(theta, l))
            except SubstitutionError:
                ok = False
                break
        if not ok:
            continue
        candidate = OrderClause(frozenset(renamed))
        key = repr(candidate)
        if best is None or key < best[0]:
            best = (key, candidate)
    return best[1]


def _lit_var_occurrences(l: OrderLit):
    """Free variable names in a literal, in left-right order."""
    seen = []

    def walk_term(t, skip):
        if isinstance(t, Var):
            if t.name not in skip and t.name not in seen:
                seen.append(t.name)
        else:
            for a in t.args:
                walk_term(a, skip)

    def walk_element(e):
        if isinstance(e, Atom):
            for t in e.args:
                walk_term(t, set())
        elif isinstance(e, QAtom):
            for t in e.body.args:
                walk_term(t, {e.var})

    walk_element(l.left)
    walk_element(l.right)
    return seen


def variants_equal(c: OrderClause, d: OrderClause) -> bool:
    if len(c.literals) != len(d.literals):
        return False
    return canonical_clause(c) == canonical_clause(d)


def condense(c: OrderClause) -> OrderClause:
    """Merge literals that are instances of each other through variables not
    occurring elsewhere in the clause; the result is equivalent to c."""
    changed = True
    current = c
    while changed:
        changed = False
        lits = list(current.lits)
        for i, l in enumerate(lits):
            rest = [x for j, x in enumerate(lits) if j != i]
            rest_vars: set = set()
            for x in rest:
                rest_vars |= lit_freevars(x)
            for target in rest:
                bindings = match_literals(l, target, {})
                if bindings is None:
                    continue
                nontrivial = {k for k, v in bindings.items() if v != Var(k)}
                if nontrivial & rest_vars:
                    continue
                current = OrderClause(frozenset(rest))
                changed = True
                break
            if changed:
                break
    return current
