"""The order hyperresolution rules.

The central rule resolves several premises at once: from each premise a
block of literals is selected; the blocks must collapse to single literals
under a simultaneous most general unifier, the collapsed literals must form
a linked chain (either starting at 1, ending at 0, or cycling back to its
own first element) with at least one strict link, and the resolvent
collects the unselected remainders under the unifier.

Auxiliary rules: trichotomy (the truth order is total), quantification
(a quantified atom bounds its instances), witnessing (a fresh function
symbol names the extremum of a quantified atom relative to another
expression), and the admissible shortcuts (0/1 dichotomies, conjunction
commutativity, universe-bounded generalization).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .substitution import (
    NoUnifier,
    Substitution,
    apply_atom,
    apply_clause,
    apply_element,
    apply_literal,
    condense as condense_clause,
    mgu,
    rename_apart,
)
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
    freetermseq,
    term_is_ground,
)

TOP = TruthConst(Fraction(1))
BOT = TruthConst(Fraction(0))


class RuleError(ValueError):
    """A rule application violates its side conditions."""


@dataclass(frozen=True)
class Premise:
    """One premise of the central rule: the clause, the indices of the
    selected block within clause.lits, and whether the (equality) chain
    literal is read right-to-left."""

    clause: OrderClause
    selected: tuple
    flip: bool = False

    def __post_init__(self):
        n = len(self.clause.lits)
        if not self.selected:
            raise RuleError("empty selection")
        if any(i < 0 or i >= n for i in self.selected):
            raise RuleError("selection out of range")


def hyperresolve(premises, endpoint: str, condense: bool = False):
    """Apply the central rule.

    premises: sequence of Premise; endpoint: 'top' (chain starts at 1),
    'bottom' (chain ends at 0) or 'cycle' (chain returns to its first
    element).  Returns (resolvent, unifier, renamings).
    """
    if endpoint not in ("top", "bottom", "cycle"):
        raise RuleError("bad endpoint %r" % endpoint)
    if not premises:
        raise RuleError("no premises")

    renamed, renamings = rename_apart([p.clause for p in premises])
    families = []
    chain = []  # (left, op, right) per premise, oriented
    remainders = []
    for p, rc in zip(premises, renamed):
        lits = rc.lits
        sel = set(p.selected)
        block = [lits[i] for i in p.selected]
        rest = [l for i, l in enumerate(lits) if i not in sel]
        rep = block[0]
        if p.flip and rep.op != "=":
            raise RuleError("only '='-literals can be flipped")
        left, right = (rep.right, rep.left) if p.flip else (rep.left, rep.right)
        families.append(block)
        chain.append((left, rep.op, right))
        remainders.extend(rest)

    if not any(op == "<" for _, op, _ in chain):
        raise RuleError("chain has no strict link")

    for l in remainders:
        families.append([l])
    for (_, _, right), (nleft, _, _) in zip(chain, chain[1:]):
        families.append([right, nleft])
    if endpoint == "top":
        families.append([chain[0][0], TOP])
    elif endpoint == "bottom":
        families.append([chain[-1][2], BOT])
    else:
        families.append([chain[0][0], chain[-1][2]])

    try:
        theta = mgu(families)
    except NoUnifier as exc:
        raise RuleError("premises do not link into a contradiction: %s" % exc)

    resolvent = OrderClause(
        frozenset(apply_literal(theta, l) for l in remainders)
    )
    if condense:
        resolvent = condense_clause(resolvent)
    return resolvent, theta, renamings


# ---------------------------------------------------------------------------
# Chains over unit ground theories (classification helper)


def classify_chain(literals, oriented=None):
    """Classify a sequence of linked order literals.

    `oriented`, when given, flips the i-th '='-literal.  Returns a dict with
    kind ('equality'|'increasing'), whether the links hold, and whether the
    chain is a contradiction (starts at 1, ends at 0, or cycles).
    """
    if not literals:
        raise RuleError("empty chain")
    oriented = oriented or [False] * len(literals)
    sides = []
    for l, flip in zip(literals, oriented):
        if flip and l.op != "=":
            raise RuleError("cannot flip a strict literal")
        left, right = (l.right, l.left) if flip else (l.left, l.right)
        sides.append((left, l.op, right))
    linked = all(
        a[2] == b[0] for a, b in zip(sides, sides[1:])
    )
    increasing = any(op == "<" for _, op, _ in sides)
    kind = "increasing" if increasing else "equality"
    contradiction = linked and increasing and (
        sides[0][0] == TOP or sides[-1][2] == BOT or sides[0][0] == sides[-1][2]
    )
    return {
        "kind": kind,
        "linked": linked,
        "contradiction": contradiction,
    }


def ordtcons(constants):
    """All strict-order facts between occurring truth constants (0 and 1
    always included)."""
    values = sorted({Fraction(c) for c in constants} | {Fraction(0), Fraction(1)})
    out = []
    for i, a in enumerate(values):
        for b in values[i + 1:]:
            out.append(
                OrderClause(frozenset([OrderLit(TruthConst(a), "<", TruthConst(b))]))
            )
    return out


# ---------------------------------------------------------------------------
# Auxiliary rules


def trichotomy(a, b, qatoms_empty: bool) -> OrderClause:
    """a < b | a = b | b < a, for atoms and intermediate truth constants."""
    for e in (a, b):
        if not isinstance(e, (Atom, TruthConst)):
            raise RuleError("trichotomy takes atoms or truth constants")
        if isinstance(e, TruthConst) and e.value in (Fraction(0), Fraction(1)):
            raise RuleError("trichotomy excludes 0 and 1")
    if isinstance(a, TruthConst) and isinstance(b, TruthConst):
        raise RuleError("trichotomy needs at least one atom")
    if qatoms_empty:
        if not isinstance(a, Atom) or not isinstance(b, TruthConst):
            raise RuleError(
                "without quantified atoms, trichotomy pairs an atom "
                "with an intermediate truth constant"
            )
    else:
        if element_freevars(a) & element_freevars(b):
            raise RuleError("trichotomy sides must not share variables")
    return OrderClause(
        frozenset(
            [OrderLit(a, "<", b), OrderLit(a, "=", b), OrderLit(b, "<", a)]
        )
    )


def quantification(q: QAtom, ground_term=None) -> OrderClause:
    """Order a quantified atom against its body (general mode) or a ground
    instance of the body (ground mode)."""
    if not isinstance(q, QAtom):
        raise RuleError("quantification takes a quantified atom")
    if ground_term is None:
        inst = q.body
    else:
        if not term_is_ground(ground_term):
            raise RuleError("instantiation term must be ground")
        gamma = Substitution.of({q.var: ground_term}).extend_identity(
            element_freevars(q)
        )
        inst = apply_atom(gamma, q.body)
    if q.quant == "forall":
        lits = [OrderLit(q, "<", inst), OrderLit(q, "=", inst)]
    else:
        lits = [OrderLit(inst, "<", q), OrderLit(inst, "=", q)]
    return OrderClause(frozenset(lits))


def witnessing(q: QAtom, b, witness_name: str):
    """Introduce a fresh witness for the extremum of q relative to b.

    Returns (clause, witness_arity).  The witness term applies the fresh
    symbol to the bound-variable-free arguments of q followed by those of b.
    """
    if not isinstance(q, QAtom):
        raise RuleError("witnessing takes a quantified atom")
    if not isinstance(b, (Atom, TruthConst, QAtom)):
        raise RuleError("witness partner must be an atom, constant or "
                        "quantified atom")
    if element_freevars(q) & element_freevars(b):
        raise RuleError("witnessing sides must not share free variables")
    if not witness_name.startswith("$w_"):
        raise RuleError("witness symbols live in the '$w_' namespace")
    args = freetermseq(q) + freetermseq(b)
    w = App(witness_name, args)
    gamma = Substitution.of({q.var: w}).extend_identity(element_freevars(q))
    inst = apply_atom(gamma, q.body)
    if q.quant == "forall":
        lits = [OrderLit(inst, "<", b), OrderLit(b, "=", q), OrderLit(b, "<", q)]
    else:
        lits = [OrderLit(b, "<", inst), OrderLit(q, "=", b), OrderLit(q, "<", b)]
    return OrderClause(frozenset(lits)), len(args)


def zero_dichotomy(a) -> OrderClause:
    if not isinstance(a, (Atom, QAtom)):
        raise RuleError("dichotomy takes an atom or quantified atom")
    return OrderClause(frozenset([OrderLit(a, "=", BOT), OrderLit(BOT, "<", a)]))


def one_dichotomy(a) -> OrderClause:
    if not isinstance(a, (Atom, QAtom)):
        raise RuleError("dichotomy takes an atom or quantified atom")
    return OrderClause(frozenset([OrderLit(a, "<", TOP), OrderLit(a, "=", TOP)]))


def _fresh_pred_atom(e):
    return isinstance(e, Atom) and e.pred.startswith("$p_")


def and_commutativity(c1: OrderClause, c2: OrderClause) -> OrderClause:
    """From the two definition clauses of a conjunction, derive the clause
    obtained by commuting the conjuncts:

        p1 < p2 | p1 = p2 | p = p2,   p2 < p1 | p = p1
        ----------------------------------------------
                  p1 < p2 | p = p2
    """
    if len(c1.literals) != 3 or len(c2.literals) != 2:
        raise RuleError("conjunction-commutativity premise shapes are 3+2 literals")
    lt1 = [l for l in c1.lits if l.op == "<"]
    if len(lt1) != 1:
        raise RuleError("first premise needs exactly one strict literal")
    a, b = lt1[0].left, lt1[0].right
    eqs = [l for l in c1.lits if l.op == "="]
    pair = OrderLit(a, "=", b)
    if pair not in eqs:
        raise RuleError("first premise lacks the a = b literal")
    other = [l for l in eqs if l != pair]
    if len(other) != 1:
        raise RuleError("first premise lacks the head literal")
    head_lit = other[0]
    if head_lit.left == b:
        head = head_lit.right
    elif head_lit.right == b:
        head = head_lit.left
    else:
        raise RuleError("head literal does not mention the second conjunct")
    atoms = [a, b, head]
    if not all(_fresh_pred_atom(x) for x in atoms):
        raise RuleError("conjunction commutativity applies to definition "
                        "predicates only")
    xbar = a.args
    if any(x.args != xbar for x in atoms):
        raise RuleError("definition predicates must share one argument tuple")
    from .substitution import variants_equal

    expected_c2 = OrderClause(
        frozenset([OrderLit(b, "<", a), OrderLit(head, "=", a)])
    )
    if not variants_equal(expected_c2, c2):
        raise RuleError("second premise does not match the commuted shape")
    return OrderClause(frozenset([OrderLit(a, "<", b), OrderLit(head, "=", b)]))


def universe_forall(template: OrderClause, hole_var: str, universe, premises):
    """From one instance of template(x/u) per universe point u, derive
    uni(x) = 0 | template(x)."""
    if hole_var not in clause_freevars(template):
        raise RuleError("hole variable does not occur in the template")
    premise_set = set(premises)
    wanted = []
    for u in universe:
        if not term_is_ground(u):
            raise RuleError("universe points must be ground")
        theta = Substitution.of({hole_var: u}).extend_identity(
            clause_freevars(template)
        )
        inst = apply_clause(theta, template)
        wanted.append(inst)
        if inst not in premise_set:
            raise RuleError("missing universe instance %r" % inst)
    if len(premise_set) != len(universe):
        raise RuleError("premises must be exactly the universe instances")
    guard = OrderLit(Atom("uni", (Var(hole_var),)), "=", BOT)
    return OrderClause(frozenset([guard]) | template.literals)
