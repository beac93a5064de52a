"""Recorded deductions and their independent replay.

A ProofStep records one rule application with everything needed to redo it:
premise ids, selected literal positions, chain orientations, endpoint form,
and any rule-specific data (trichotomy sides, quantified atom, witness
symbol, universe template).  check_proof replays every step from scratch
with its own unifier and compares clauses up to renaming of free variables,
tracking signature growth so witness symbols are provably fresh.

The line format is
    [id] rule=<tag> premises=[ids] <fields> clause=<clause>
with structured field values written without spaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import rules
from .parser import (
    parse_clause,
    parse_element,
    parse_term,
    render_clause,
    render_element,
    render_term,
)
from .substitution import Substitution, variants_equal
from .syntax import (
    App,
    Atom,
    OrderClause,
    QAtom,
    TruthConst,
    Var,
    clause_atoms,
    clause_qatoms,
    clause_tcons,
)
from .substitution import match_elements

RULE_TAGS = (
    "input",
    "ordtcons",
    "hyper",
    "trichotomy",
    "forall_quant",
    "exists_quant",
    "forall_witness",
    "exists_witness",
    "zero_dichotomy",
    "one_dichotomy",
    "and_commutativity",
    "universe_forall",
)


@dataclass(frozen=True)
class ProofStep:
    step_id: str
    rule: str
    clause: OrderClause
    premises: tuple = ()
    # central rule
    selections: tuple = ()  # tuple of index-tuples, one per premise
    flips: tuple = ()
    endpoint: str = ""
    condensed: bool = False
    subst: Substitution | None = None
    # trichotomy / dichotomies / witnessing partner
    element_a: object = None
    element_b: object = None
    # quantification / witnessing
    qatom: QAtom | None = None
    ground_term: object = None
    witness: str | None = None
    # universe-bounded generalization
    template: OrderClause | None = None
    hole_var: str | None = None
    universe: tuple = ()

    def __post_init__(self):
        if self.rule not in RULE_TAGS:
            raise ValueError("unknown rule tag %r" % self.rule)


@dataclass
class Deduction:
    steps: list = field(default_factory=list)

    def __post_init__(self):
        self.by_id = {s.step_id: s for s in self.steps}
        if len(self.by_id) != len(self.steps):
            raise ValueError("duplicate step ids")

    def add(self, step: ProofStep):
        if step.step_id in self.by_id:
            raise ValueError("duplicate step id %r" % step.step_id)
        self.steps.append(step)
        self.by_id[step.step_id] = step

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    @property
    def is_refutation(self) -> bool:
        return bool(self.steps) and self.steps[-1].clause.is_empty


@dataclass
class CheckResult:
    ok: bool
    step_id: str | None = None
    reason: str | None = None
    refutation: bool = False

    def __bool__(self):
        return self.ok

    def render(self) -> str:
        if self.ok:
            return "OK refutation" if self.refutation else "OK"
        return "REJECTED at [%s]: %s" % (self.step_id, self.reason)


def _clause_functions(c: OrderClause) -> set:
    out: set = set()

    def walk_term(t):
        if isinstance(t, App):
            out.add(t.func)
            for a in t.args:
                walk_term(a)

    def walk_element(e):
        if isinstance(e, Atom):
            for t in e.args:
                walk_term(t)
        elif isinstance(e, QAtom):
            walk_element(e.body)

    for l in c.literals:
        walk_element(l.left)
        walk_element(l.right)
    return out


class _Checker:
    def __init__(self, inputs):
        self.inputs = list(inputs)
        self.input_tcons = {t.value for c in self.inputs for t in clause_tcons(c)}
        self.qatoms_empty = not any(clause_qatoms(c) for c in self.inputs)
        self.ordtcons_set = set(rules.ordtcons(self.input_tcons))
        self.derived: dict = {}
        self.functions: set = set()
        for c in self.inputs:
            self.functions |= _clause_functions(c)
        self.atom_pool: set = set()
        self.qatom_pool: set = set()
        self.tcons_pool = set(self.input_tcons) | {Fraction(0), Fraction(1)}
        for c in self.inputs:
            self._index(c)

    def _index(self, c: OrderClause):
        self.atom_pool |= clause_atoms(c)
        self.qatom_pool |= clause_qatoms(c)
        self.tcons_pool |= {t.value for t in clause_tcons(c)}

    def occurs_as_instance(self, e) -> bool:
        """Is e an instance of an atom/quantified atom occurring so far, or
        an occurring truth constant?"""
        if isinstance(e, TruthConst):
            return e.value in self.tcons_pool
        pool = self.qatom_pool if isinstance(e, QAtom) else self.atom_pool
        for candidate in pool:
            if match_elements(candidate, e, {}):
                return True
        return False

    def new_functions(self, c: OrderClause) -> set:
        return _clause_functions(c) - self.functions

    def commit(self, step: ProofStep):
        self.derived[step.step_id] = step.clause
        self.functions |= _clause_functions(step.clause)
        self._index(step.clause)

    # -- per-rule validation -------------------------------------------------

    def validate(self, step: ProofStep):
        for pid in step.premises:
            if pid not in self.derived:
                raise rules.RuleError("premise [%s] not derived yet" % pid)

        fresh = self.new_functions(step.clause)
        if step.rule in ("forall_witness", "exists_witness"):
            if fresh - {step.witness}:
                raise rules.RuleError(
                    "unexpected new symbols %s" % sorted(fresh - {step.witness})
                )
        elif fresh:
            raise rules.RuleError(
                "step introduces new function symbols %s" % sorted(fresh)
            )

        if step.rule == "input":
            if not any(
                variants_equal(step.clause, c) for c in self.inputs
            ):
                raise rules.RuleError("clause is not in the input theory")
            return

        if step.rule == "ordtcons":
            if step.clause not in self.ordtcons_set:
                raise rules.RuleError(
                    "clause is not an order fact of the input truth constants"
                )
            return

        if step.rule == "hyper":
            if len(step.premises) != len(step.selections) or len(
                step.premises
            ) != len(step.flips):
                raise rules.RuleError("selection arity mismatch")
            prem = [
                rules.Premise(self.derived[pid], sel, flip)
                for pid, sel, flip in zip(
                    step.premises, step.selections, step.flips
                )
            ]
            resolvent, _, _ = rules.hyperresolve(
                prem, step.endpoint, condense=step.condensed
            )
            if not variants_equal(resolvent, step.clause):
                raise rules.RuleError(
                    "replayed resolvent %s differs from recorded %s"
                    % (render_clause(resolvent), render_clause(step.clause))
                )
            return

        if step.rule == "trichotomy":
            a, b = step.element_a, step.element_b
            for e in (a, b):
                if not self.occurs_as_instance(e):
                    raise rules.RuleError(
                        "%s does not occur in the clause set" % render_element(e)
                    )
            produced = rules.trichotomy(a, b, self.qatoms_empty)
            if not variants_equal(produced, step.clause):
                raise rules.RuleError("trichotomy resolvent mismatch")
            return

        if step.rule in ("zero_dichotomy", "one_dichotomy"):
            a = step.element_a
            if not self.occurs_as_instance(a):
                raise rules.RuleError(
                    "%s does not occur in the clause set" % render_element(a)
                )
            fn = (
                rules.zero_dichotomy
                if step.rule == "zero_dichotomy"
                else rules.one_dichotomy
            )
            if not variants_equal(fn(a), step.clause):
                raise rules.RuleError("dichotomy resolvent mismatch")
            return

        if step.rule in ("forall_quant", "exists_quant"):
            q = step.qatom
            if q is None or q.quant != step.rule.split("_", 1)[0]:
                raise rules.RuleError("step records the wrong quantifier")
            if not self.occurs_as_instance(q):
                raise rules.RuleError("quantified atom does not occur")
            produced = rules.quantification(q, step.ground_term)
            if not variants_equal(produced, step.clause):
                raise rules.RuleError("quantification resolvent mismatch")
            return

        if step.rule in ("forall_witness", "exists_witness"):
            q, b = step.qatom, step.element_b
            if q is None or q.quant != step.rule.split("_", 1)[0]:
                raise rules.RuleError("step records the wrong quantifier")
            if not self.occurs_as_instance(q):
                raise rules.RuleError("quantified atom does not occur")
            if not self.occurs_as_instance(b):
                raise rules.RuleError("witness partner does not occur")
            if step.witness in self.functions:
                raise rules.RuleError(
                    "witness symbol %s is not fresh" % step.witness
                )
            produced, _ = rules.witnessing(q, b, step.witness)
            if not variants_equal(produced, step.clause):
                raise rules.RuleError("witnessing resolvent mismatch")
            return

        if step.rule == "and_commutativity":
            if len(step.premises) != 2:
                raise rules.RuleError("conjunction commutativity takes two premises")
            c1 = self.derived[step.premises[0]]
            c2 = self.derived[step.premises[1]]
            produced = rules.and_commutativity(c1, c2)
            if not variants_equal(produced, step.clause):
                raise rules.RuleError("commutativity resolvent mismatch")
            return

        if step.rule == "universe_forall":
            premise_clauses = [self.derived[p] for p in step.premises]
            produced = rules.universe_forall(
                step.template, step.hole_var, step.universe, premise_clauses
            )
            if not variants_equal(produced, step.clause):
                raise rules.RuleError("universe generalization mismatch")
            return

        raise rules.RuleError("unhandled rule %r" % step.rule)


def check_proof(deduction: Deduction, inputs) -> CheckResult:
    """Replay every step of a deduction against the input theory."""
    checker = _Checker(inputs)
    for step in deduction:
        try:
            checker.validate(step)
        except rules.RuleError as exc:
            return CheckResult(False, step.step_id, str(exc))
        except Exception as exc:  # replay machinery errors are rejections too
            return CheckResult(
                False, step.step_id, "%s: %s" % (type(exc).__name__, exc)
            )
        checker.commit(step)
    return CheckResult(True, refutation=deduction.is_refutation)


# ---------------------------------------------------------------------------
# Trace serialization


def _render_subst(theta: Substitution) -> str:
    return "{%s}" % ",".join(
        "%s/%s" % (n, render_term(t, compact=True)) for n, t in theta.mapping
    )


def _split_top(text: str, sep: str) -> list:
    out = []
    depth = 0
    current = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(current))
            current = []
        else:
            current.append(ch)
    if current:
        out.append("".join(current))
    return out


def _parse_subst(text: str) -> Substitution:
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError("bad substitution %r" % text)
    body = body[1:-1]
    mapping = {}
    if body:
        for part in _split_top(body, ","):
            name, term = part.split("/", 1)
            mapping[name] = parse_term(term)
    return Substitution.of(mapping)


def render_step(step: ProofStep) -> str:
    fields = ["[%s]" % step.step_id, "rule=%s" % step.rule]
    fields.append("premises=[%s]" % ",".join(step.premises))
    if step.rule == "hyper":
        fields.append(
            "sel=[%s]" % ";".join(",".join(map(str, s)) for s in step.selections)
        )
        fields.append("flips=[%s]" % ",".join("1" if f else "0" for f in step.flips))
        fields.append("endpoint=%s" % step.endpoint)
        if step.condensed:
            fields.append("condense=1")
        if step.subst is not None:
            fields.append("subst=%s" % _render_subst(step.subst))
    if step.element_a is not None:
        fields.append("a=%s" % render_element(step.element_a, compact=True))
    if step.element_b is not None:
        fields.append("b=%s" % render_element(step.element_b, compact=True))
    if step.qatom is not None:
        fields.append("qatom=%s" % render_element(step.qatom, compact=True))
    if step.ground_term is not None:
        fields.append("term=%s" % render_term(step.ground_term, compact=True))
    if step.witness is not None:
        fields.append("witness=%s" % step.witness)
    if step.template is not None:
        fields.append("template=%s" % render_clause(step.template, compact=True))
        fields.append("var=%s" % step.hole_var)
        fields.append(
            "universe=[%s]"
            % ";".join(render_term(t, compact=True) for t in step.universe)
        )
    fields.append("clause=%s" % render_clause(step.clause))
    return " ".join(fields)


def render_deduction(deduction: Deduction) -> str:
    return "\n".join(render_step(s) for s in deduction) + "\n"


def parse_step(line: str) -> ProofStep:
    line = line.strip()
    if not line.startswith("["):
        raise ValueError("step line must start with [id]")
    end = line.index("]")
    step_id = line[1:end]
    rest = line[end + 1:].strip()
    kv = {}
    while rest and not rest.startswith("clause="):
        token, _, rest = rest.partition(" ")
        key, _, value = token.partition("=")
        kv[key] = value
        rest = rest.strip()
    if not rest.startswith("clause="):
        raise ValueError("missing clause field in %r" % line)
    clause_text = rest[len("clause="):]

    def id_list(text):
        body = text.strip("[]")
        return tuple(x for x in body.split(",") if x)

    rule = kv.get("rule")
    premises = id_list(kv.get("premises", "[]"))
    kwargs = {}
    if "sel" in kv:
        groups = kv["sel"].strip("[]").split(";")
        kwargs["selections"] = tuple(
            tuple(int(x) for x in g.split(",") if x) for g in groups if g
        )
    if "flips" in kv:
        kwargs["flips"] = tuple(
            x == "1" for x in kv["flips"].strip("[]").split(",") if x
        )
    if "endpoint" in kv:
        kwargs["endpoint"] = kv["endpoint"]
    if kv.get("condense") == "1":
        kwargs["condensed"] = True
    if "subst" in kv:
        kwargs["subst"] = _parse_subst(kv["subst"])
    if "a" in kv:
        kwargs["element_a"] = parse_element(kv["a"])
    if "b" in kv:
        kwargs["element_b"] = parse_element(kv["b"])
    if "qatom" in kv:
        kwargs["qatom"] = parse_element(kv["qatom"])
    if "term" in kv:
        kwargs["ground_term"] = parse_term(kv["term"])
    if "witness" in kv:
        kwargs["witness"] = kv["witness"]
    if "template" in kv:
        kwargs["template"] = parse_clause(kv["template"])
        kwargs["hole_var"] = kv["var"]
        kwargs["universe"] = tuple(
            parse_term(t) for t in kv["universe"].strip("[]").split(";") if t
        )
    return ProofStep(
        step_id=step_id,
        rule=rule,
        clause=parse_clause(clause_text),
        premises=premises,
        **kwargs,
    )


def parse_deduction(text: str) -> Deduction:
    steps = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        steps.append(parse_step(line))
    return Deduction(steps)
