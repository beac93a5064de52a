"""Syntactic objects: terms, atoms, truth constants, quantified atoms,
order literals/clauses and formulas, with their structural measures.

Everything is immutable and hashable. Equality-literals (op '=') are
identified with their flipped form by normalizing the side order under a
total syntactic key, so clauses behave as sets of literals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

EQ = "="   # the order-equality connective
LT = "<"   # the strict-order connective

# Reserved namespace prefix: symbols introduced by the toolkit (fresh
# predicates, witness functions, numeral constructors, fuzzy-set and
# fuzzy-state predicates) all start with '$' and are rejected in user
# formula input.
RESERVED_PREFIX = "$"

# Reserved plain words (domain axiomatization predicates and numeral
# constructors without the '$' prefix, per the clause grammar).
RESERVED_WORDS = frozenset({"nat", "rat", "time", "uni", "frac", "-frac"})


class SyntaxError_(ValueError):
    """Raised for ill-formed syntactic objects."""


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class App:
    """Function application; constants are 0-ary applications."""

    func: str
    args: tuple = ()

    def __repr__(self):
        if not self.args:
            return self.func
        return "%s(%s)" % (self.func, ",".join(map(repr, self.args)))


Term = Union[Var, App]


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    out: set = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def term_is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(term_is_ground(a) for a in t.args)


def term_varseq(t: Term) -> list:
    """Left-right preorder sequence of variable occurrences."""
    if isinstance(t, Var):
        return [t.name]
    out = []
    for a in t.args:
        out.extend(term_varseq(a))
    return out


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def replace_term(t: Term, old: Term, new: Term) -> Term:
    """Replace every occurrence of the subterm `old` by `new`."""
    if t == old:
        return new
    if isinstance(t, App):
        return App(t.func, tuple(replace_term(a, old, new) for a in t.args))
    return t


# ---------------------------------------------------------------------------
# Atoms, truth constants, quantified atoms


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __repr__(self):
        if not self.args:
            return self.pred
        return "%s(%s)" % (self.pred, ",".join(map(repr, self.args)))


@dataclass(frozen=True)
class TruthConst:
    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        if not 0 <= v <= 1:
            raise SyntaxError_("truth constant out of [0,1]: %s" % v)
        object.__setattr__(self, "value", v)

    def __repr__(self):
        if self.value == 0:
            return "0"
        if self.value == 1:
            return "1"
        return "c(%s)" % self.value


TOP = TruthConst(Fraction(1))
BOT = TruthConst(Fraction(0))


@dataclass(frozen=True)
class QAtom:
    """Quantified atom Q x. p(t0,...,tn): every argument is either exactly
    the bound variable or free of it."""

    quant: str  # "forall" | "exists"
    var: str
    body: Atom

    def __post_init__(self):
        if self.quant not in ("forall", "exists"):
            raise SyntaxError_("bad quantifier %r" % self.quant)
        bound = 0
        for t in self.body.args:
            if t == Var(self.var):
                bound += 1
            elif self.var in term_vars(t):
                raise SyntaxError_(
                    "not a quantified atom: %s occurs inside argument %r"
                    % (self.var, t)
                )
        if bound == 0:
            raise SyntaxError_(
                "not a quantified atom: bound variable %s absent" % self.var
            )

    def __repr__(self):
        return "%s %s. %r" % (self.quant, self.var, self.body)


Element = Union[Atom, TruthConst, QAtom]


def element_vars(e: Element) -> set:
    if isinstance(e, TruthConst):
        return set()
    if isinstance(e, Atom):
        out: set = set()
        for t in e.args:
            out |= term_vars(t)
        return out
    return element_vars(e.body)


def element_freevars(e: Element) -> set:
    if isinstance(e, QAtom):
        return element_vars(e.body) - {e.var}
    return element_vars(e)


def element_size(e: Element) -> int:
    if isinstance(e, TruthConst):
        return 1
    if isinstance(e, Atom):
        return 1 + sum(term_size(t) for t in e.args)
    return 2 + element_size(e.body)


def freetermseq(e: Element) -> tuple:
    """Argument terms not containing the bound variable, in argument order."""
    if isinstance(e, TruthConst):
        return ()
    if isinstance(e, Atom):
        return tuple(e.args)
    x = e.var
    return tuple(t for t in e.body.args if x not in term_vars(t))


def boundindset(a: QAtom) -> frozenset:
    """Indices at which the bound variable itself occurs; never empty."""
    if not isinstance(a, QAtom):
        raise SyntaxError_("boundindset expects a quantified atom")
    return frozenset(i for i, t in enumerate(a.body.args) if t == Var(a.var))


# A total syntactic key, used to canonicalize '='-literals and to order
# clause literals deterministically.


def _term_key(t: Term):
    if isinstance(t, Var):
        return (0, t.name)
    return (1, t.func, tuple(_term_key(a) for a in t.args))


def element_key(e: Element):
    if isinstance(e, TruthConst):
        return (0, e.value)
    if isinstance(e, Atom):
        return (1, e.pred, tuple(_term_key(t) for t in e.args))
    return (2, e.quant, e.var, element_key(e.body))


# ---------------------------------------------------------------------------
# Order literals and clauses


@dataclass(frozen=True)
class OrderLit:
    """e1 = e2 (order equality) or e1 < e2 (strict order).

    '='-literals are stored with the smaller side (under the syntactic key)
    on the left, so a literal compares equal to its flipped form.
    """

    left: Element
    op: str
    right: Element

    def __post_init__(self):
        if self.op not in (EQ, LT):
            raise SyntaxError_("bad literal operator %r" % self.op)
        if self.op == EQ and element_key(self.left) > element_key(self.right):
            l, r = self.left, self.right
            object.__setattr__(self, "left", r)
            object.__setattr__(self, "right", l)

    def flipped(self) -> "OrderLit":
        if self.op != EQ:
            raise SyntaxError_("only '='-literals can be flipped")
        return self  # normalization makes the flip identical

    def __repr__(self):
        return "%r %s %r" % (self.left, self.op, self.right)


def lit_size(l: OrderLit) -> int:
    return 1 + element_size(l.left) + element_size(l.right)


def lit_vars(l: OrderLit) -> set:
    return element_vars(l.left) | element_vars(l.right)


def lit_freevars(l: OrderLit) -> set:
    return element_freevars(l.left) | element_freevars(l.right)


def lit_key(l: OrderLit):
    return (element_key(l.left), l.op, element_key(l.right))


@dataclass(frozen=True)
class OrderClause:
    """A finite set of order literals; the empty clause prints as []."""

    literals: frozenset

    # canonically sorted literal tuple, precomputed for indexing/printing
    lits: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "literals", frozenset(self.literals))
        object.__setattr__(
            self, "lits", tuple(sorted(self.literals, key=lit_key))
        )

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def __len__(self):
        return len(self.literals)

    def __iter__(self):
        return iter(self.lits)

    def __repr__(self):
        if not self.literals:
            return "[]"
        return " | ".join(map(repr, self.lits))


EMPTY_CLAUSE = OrderClause(frozenset())


def clause(*lits: OrderLit) -> OrderClause:
    return OrderClause(frozenset(lits))


def clause_size(c: OrderClause) -> int:
    return sum(lit_size(l) for l in c.literals)


def clause_vars(c: OrderClause) -> set:
    out: set = set()
    for l in c.literals:
        out |= lit_vars(l)
    return out


def clause_freevars(c: OrderClause) -> set:
    out: set = set()
    for l in c.literals:
        out |= lit_freevars(l)
    return out


def clause_union(c: OrderClause, d: OrderClause) -> OrderClause:
    return OrderClause(c.literals | d.literals)


def subclause(c: OrderClause, d: OrderClause) -> bool:
    return c.literals <= d.literals


def clause_is_ground(c: OrderClause) -> bool:
    return not clause_freevars(c)


def clause_atoms(c: OrderClause) -> set:
    out = set()
    for l in c.literals:
        for e in (l.left, l.right):
            if isinstance(e, Atom):
                out.add(e)
    return out


def clause_qatoms(c: OrderClause) -> set:
    out = set()
    for l in c.literals:
        for e in (l.left, l.right):
            if isinstance(e, QAtom):
                out.add(e)
    return out


def clause_tcons(c: OrderClause) -> set:
    out = set()
    for l in c.literals:
        for e in (l.left, l.right):
            if isinstance(e, TruthConst):
                out.add(e)
    return out


def theory_size(clauses) -> int:
    return sum(clause_size(c) for c in clauses)


def theory_tcons(clauses) -> set:
    out: set = set()
    for c in clauses:
        out |= clause_tcons(c)
    return out


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Neg:
    sub: "FormulaT"

    def __repr__(self):
        return "~%r" % (self.sub,)


@dataclass(frozen=True)
class Delta:
    sub: "FormulaT"

    def __repr__(self):
        return "delta %r" % (self.sub,)


@dataclass(frozen=True)
class Bin:
    op: str  # '&', '|', '->', '<->', '=', '<'
    left: "FormulaT"
    right: "FormulaT"

    def __post_init__(self):
        if self.op not in ("&", "|", "->", "<->", EQ, LT):
            raise SyntaxError_("bad connective %r" % self.op)

    def __repr__(self):
        return "(%r %s %r)" % (self.left, self.op, self.right)


@dataclass(frozen=True)
class Quant:
    quant: str  # "forall" | "exists"
    var: str
    sub: "FormulaT"

    def __post_init__(self):
        if self.quant not in ("forall", "exists"):
            raise SyntaxError_("bad quantifier %r" % self.quant)

    def __repr__(self):
        return "%s %s. %r" % (self.quant, self.var, self.sub)


FormulaT = Union[Atom, TruthConst, Neg, Delta, Bin, Quant]


def formula_size(phi: FormulaT) -> int:
    if isinstance(phi, Atom):
        return 1 + sum(term_size(t) for t in phi.args)
    if isinstance(phi, TruthConst):
        return 1
    if isinstance(phi, (Neg, Delta)):
        return 1 + formula_size(phi.sub)
    if isinstance(phi, Bin):
        return 1 + formula_size(phi.left) + formula_size(phi.right)
    if isinstance(phi, Quant):
        return 2 + formula_size(phi.sub)
    raise SyntaxError_("not a formula: %r" % (phi,))


def size(e) -> int:
    """Structural size of a term, element, formula, clause, or iterable of
    formulas/clauses."""
    if isinstance(e, (Var, App)):
        return term_size(e)
    if isinstance(e, OrderClause):
        return clause_size(e)
    if isinstance(e, QAtom):
        return element_size(e)
    if isinstance(e, OrderLit):
        return lit_size(e)
    if isinstance(e, (Atom, TruthConst, Neg, Delta, Bin, Quant)):
        return formula_size(e)
    return sum(size(x) for x in e)


def varseq(phi) -> list:
    """All variable occurrences in left-right preorder (binders included)."""
    if isinstance(phi, (Var, App)):
        return term_varseq(phi)
    if isinstance(phi, Atom):
        out = []
        for t in phi.args:
            out.extend(term_varseq(t))
        return out
    if isinstance(phi, TruthConst):
        return []
    if isinstance(phi, (Neg, Delta)):
        return varseq(phi.sub)
    if isinstance(phi, Bin):
        return varseq(phi.left) + varseq(phi.right)
    if isinstance(phi, Quant):
        return [phi.var] + varseq(phi.sub)
    if isinstance(phi, QAtom):
        return [phi.var] + varseq(phi.body)
    raise SyntaxError_("varseq: unsupported %r" % (phi,))


def formula_vars(phi: FormulaT) -> set:
    if isinstance(phi, Atom):
        out: set = set()
        for t in phi.args:
            out |= term_vars(t)
        return out
    if isinstance(phi, TruthConst):
        return set()
    if isinstance(phi, (Neg, Delta)):
        return formula_vars(phi.sub)
    if isinstance(phi, Bin):
        return formula_vars(phi.left) | formula_vars(phi.right)
    return formula_vars(phi.sub) | {phi.var}


def formula_freevars(phi: FormulaT) -> set:
    if isinstance(phi, (Neg, Delta)):
        return formula_freevars(phi.sub)
    if isinstance(phi, Bin):
        return formula_freevars(phi.left) | formula_freevars(phi.right)
    if isinstance(phi, Quant):
        return formula_freevars(phi.sub) - {phi.var}
    return formula_vars(phi)


def formula_tcons(phi: FormulaT) -> set:
    if isinstance(phi, TruthConst):
        return {phi}
    if isinstance(phi, Atom):
        return set()
    if isinstance(phi, (Neg, Delta)):
        return formula_tcons(phi.sub)
    if isinstance(phi, Bin):
        return formula_tcons(phi.left) | formula_tcons(phi.right)
    return formula_tcons(phi.sub)


# ---------------------------------------------------------------------------
# Signature


class Signature:
    """Symbol table with arities and a reserved namespace for generated
    symbols. User symbols may not collide with reserved ones."""

    def __init__(self):
        self.functions: dict = {}
        self.predicates: dict = {}
        self.truth_constants: set = {Fraction(0), Fraction(1)}

    @staticmethod
    def is_reserved(name: str) -> bool:
        return name.startswith(RESERVED_PREFIX) or name in RESERVED_WORDS

    def add_function(self, name: str, arity: int, reserved: bool = False):
        if not reserved and self.is_reserved(name):
            raise SyntaxError_("function name %r is reserved" % name)
        old = self.functions.get(name)
        if old is not None and old != arity:
            raise SyntaxError_("arity clash for function %r" % name)
        self.functions[name] = arity

    def add_predicate(self, name: str, arity: int, reserved: bool = False):
        if not reserved and self.is_reserved(name):
            raise SyntaxError_("predicate name %r is reserved" % name)
        old = self.predicates.get(name)
        if old is not None and old != arity:
            raise SyntaxError_("arity clash for predicate %r" % name)
        self.predicates[name] = arity

    def add_truth_constant(self, value: Fraction):
        v = Fraction(value)
        if not 0 <= v <= 1:
            raise SyntaxError_("truth constant out of [0,1]: %s" % v)
        self.truth_constants.add(v)

    def check_term(self, t: Term):
        if isinstance(t, Var):
            return
        arity = self.functions.get(t.func)
        if arity is None:
            raise SyntaxError_("unknown function %r" % t.func)
        if arity != len(t.args):
            raise SyntaxError_("arity mismatch for %r" % t.func)
        for a in t.args:
            self.check_term(a)

    def check_atom(self, a: Atom):
        arity = self.predicates.get(a.pred)
        if arity is None:
            raise SyntaxError_("unknown predicate %r" % a.pred)
        if arity != len(a.args):
            raise SyntaxError_("arity mismatch for %r" % a.pred)
        for t in a.args:
            self.check_term(t)


def collect_signature(objects) -> Signature:
    """Build a signature from clauses/formulas, registering whatever symbols
    occur (reserved names allowed, since the input may be generated)."""
    sig = Signature()

    def walk_term(t):
        if isinstance(t, App):
            sig.add_function(t.func, len(t.args), reserved=True)
            for a in t.args:
                walk_term(a)

    def walk_element(e):
        if isinstance(e, Atom):
            sig.add_predicate(e.pred, len(e.args), reserved=True)
            for t in e.args:
                walk_term(t)
        elif isinstance(e, TruthConst):
            sig.add_truth_constant(e.value)
        elif isinstance(e, QAtom):
            walk_element(e.body)

    def walk(o):
        if isinstance(o, OrderClause):
            for l in o.literals:
                walk_element(l.left)
                walk_element(l.right)
        elif isinstance(o, OrderLit):
            walk_element(o.left)
            walk_element(o.right)
        elif isinstance(o, (Atom, TruthConst, QAtom)):
            walk_element(o)
        elif isinstance(o, (Neg, Delta)):
            walk(o.sub)
        elif isinstance(o, Bin):
            walk(o.left)
            walk(o.right)
        elif isinstance(o, Quant):
            walk(o.sub)
        else:
            for x in o:
                walk(x)

    walk(objects)
    return sig
