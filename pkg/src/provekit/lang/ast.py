"""Abstract syntax for the bounded spec language.

Two sorts only: integers and integer lists.  Terms and formulas are frozen
dataclasses, so structural equality and hashing come for free; that is what
the dedup and trace machinery rely on.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Sort(enum.Enum):
    INT = "Int"
    INT_LIST = "IntList"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


# ---------------------------------------------------------------------------
# Terms


class Term:
    """Base class; concrete nodes below."""

    __slots__ = ()


@dataclass(frozen=True)
class IntLit(Term):
    value: int


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Sub(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Mod(Term):
    """Remainder truncated toward zero: the result carries the dividend's sign."""

    left: Term
    right: Term


@dataclass(frozen=True)
class ListLit(Term):
    elements: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Cons(Term):
    head: Term
    tail: Term


@dataclass(frozen=True)
class Append(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Length(Term):
    arg: Term


@dataclass(frozen=True)
class Count(Term):
    arg: Term
    element: Term


@dataclass(frozen=True)
class IfThenElse(Term):
    cond: "Formula"
    then: Term
    other: Term


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Lt(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Le(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Mem(Formula):
    element: Term
    lst: Term


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    binder: str
    sort: Sort
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    binder: str
    sort: Sort
    body: Formula


@dataclass(frozen=True)
class GoalDecl:
    """A named, implicitly universally quantified statement."""

    name: str
    binders: tuple[tuple[str, Sort], ...]
    body: Formula
    span: SourceSpan | None = field(default=None, compare=False)


# ---------------------------------------------------------------------------
# Structural measures and helpers

# Nodes that count one step of logical or domain structure.  Variable
# references, literals and binder annotations carry no weight.
_COUNTED_TERMS = (Add, Sub, Mul, Mod, Cons, Append, Length, Count, IfThenElse)
_COUNTED_FORMULAS = (Eq, Lt, Le, Mem, Not, And, Or, Implies, Forall, Exists)


def term_footprint(term: Term) -> int:
    weight = 1 if isinstance(term, _COUNTED_TERMS) else 0
    if isinstance(term, (Add, Sub, Mul, Mod, Append)):
        return weight + term_footprint(term.left) + term_footprint(term.right)
    if isinstance(term, Cons):
        return weight + term_footprint(term.head) + term_footprint(term.tail)
    if isinstance(term, Length):
        return weight + term_footprint(term.arg)
    if isinstance(term, Count):
        return weight + term_footprint(term.arg) + term_footprint(term.element)
    if isinstance(term, IfThenElse):
        return (
            weight
            + formula_footprint(term.cond)
            + term_footprint(term.then)
            + term_footprint(term.other)
        )
    if isinstance(term, ListLit):
        return sum(term_footprint(e) for e in term.elements)
    return weight


def formula_footprint(formula: Formula) -> int:
    weight = 1 if isinstance(formula, _COUNTED_FORMULAS) else 0
    if isinstance(formula, (Eq, Lt, Le)):
        return weight + term_footprint(formula.left) + term_footprint(formula.right)
    if isinstance(formula, Mem):
        return weight + term_footprint(formula.element) + term_footprint(formula.lst)
    if isinstance(formula, Not):
        return weight + formula_footprint(formula.child)
    if isinstance(formula, (And, Or, Implies)):
        return weight + formula_footprint(formula.left) + formula_footprint(formula.right)
    if isinstance(formula, (Forall, Exists)):
        return weight + formula_footprint(formula.body)
    return weight


def operator_footprint(goal: GoalDecl) -> int:
    """Count of operator nodes in the goal body; the size measure the
    decomposition score compares parents and children by."""
    return formula_footprint(goal.body)


def term_free_vars(term: Term, acc: set[str]) -> None:
    if isinstance(term, Var):
        acc.add(term.name)
    elif isinstance(term, (Add, Sub, Mul, Mod, Append)):
        term_free_vars(term.left, acc)
        term_free_vars(term.right, acc)
    elif isinstance(term, Cons):
        term_free_vars(term.head, acc)
        term_free_vars(term.tail, acc)
    elif isinstance(term, Length):
        term_free_vars(term.arg, acc)
    elif isinstance(term, Count):
        term_free_vars(term.arg, acc)
        term_free_vars(term.element, acc)
    elif isinstance(term, IfThenElse):
        free_vars_into(term.cond, acc)
        term_free_vars(term.then, acc)
        term_free_vars(term.other, acc)
    elif isinstance(term, ListLit):
        for e in term.elements:
            term_free_vars(e, acc)


def free_vars_into(formula: Formula, acc: set[str]) -> None:
    if isinstance(formula, (Eq, Lt, Le)):
        term_free_vars(formula.left, acc)
        term_free_vars(formula.right, acc)
    elif isinstance(formula, Mem):
        term_free_vars(formula.element, acc)
        term_free_vars(formula.lst, acc)
    elif isinstance(formula, Not):
        free_vars_into(formula.child, acc)
    elif isinstance(formula, (And, Or, Implies)):
        free_vars_into(formula.left, acc)
        free_vars_into(formula.right, acc)
    elif isinstance(formula, (Forall, Exists)):
        inner: set[str] = set()
        free_vars_into(formula.body, inner)
        inner.discard(formula.binder)
        acc |= inner


def free_vars(formula: Formula) -> set[str]:
    acc: set[str] = set()
    free_vars_into(formula, acc)
    return acc


def _subst_term(term: Term, name: str, replacement: Term) -> Term:
    if isinstance(term, Var):
        return replacement if term.name == name else term
    if isinstance(term, (Add, Sub, Mul, Mod, Append)):
        return type(term)(
            _subst_term(term.left, name, replacement),
            _subst_term(term.right, name, replacement),
        )
    if isinstance(term, Cons):
        return Cons(_subst_term(term.head, name, replacement), _subst_term(term.tail, name, replacement))
    if isinstance(term, Length):
        return Length(_subst_term(term.arg, name, replacement))
    if isinstance(term, Count):
        return Count(_subst_term(term.arg, name, replacement), _subst_term(term.element, name, replacement))
    if isinstance(term, IfThenElse):
        return IfThenElse(
            substitute(term.cond, name, replacement),
            _subst_term(term.then, name, replacement),
            _subst_term(term.other, name, replacement),
        )
    if isinstance(term, ListLit):
        return ListLit(tuple(_subst_term(e, name, replacement) for e in term.elements))
    return term


def substitute(formula: Formula, name: str, replacement: Term) -> Formula:
    """Replace free occurrences of ``name``.  Intended for closed replacement
    terms (literals), so binder capture cannot arise; shadowing binders stop
    the descent."""
    if isinstance(formula, (Eq, Lt, Le)):
        return type(formula)(
            _subst_term(formula.left, name, replacement),
            _subst_term(formula.right, name, replacement),
        )
    if isinstance(formula, Mem):
        return Mem(_subst_term(formula.element, name, replacement), _subst_term(formula.lst, name, replacement))
    if isinstance(formula, Not):
        return Not(substitute(formula.child, name, replacement))
    if isinstance(formula, (And, Or, Implies)):
        return type(formula)(
            substitute(formula.left, name, replacement),
            substitute(formula.right, name, replacement),
        )
    if isinstance(formula, (Forall, Exists)):
        if formula.binder == name:
            return formula
        return type(formula)(formula.binder, formula.sort, substitute(formula.body, name, replacement))
    return formula


def rename_free(formula: Formula, mapping: dict[str, str]) -> Formula:
    """Rename free variables; every target name must itself be fresh enough
    not to collide with binders in the formula (true for positional binder
    renames between goals)."""
    out = formula
    for old, new in mapping.items():
        if old != new:
            out = substitute(out, old, Var(new))
    return out


def conjunct_fringe(formula: Formula) -> list[Formula]:
    """Leaves of the maximal conjunction tree, left to right."""
    if isinstance(formula, And):
        return conjunct_fringe(formula.left) + conjunct_fringe(formula.right)
    return [formula]


def _canon_term(term: Term, env: dict[str, str]) -> str:
    if isinstance(term, IntLit):
        return str(term.value)
    if isinstance(term, Var):
        return env.get(term.name, term.name)
    if isinstance(term, (Add, Sub, Mul, Mod, Append)):
        return f"{type(term).__name__}({_canon_term(term.left, env)},{_canon_term(term.right, env)})"
    if isinstance(term, Cons):
        return f"Cons({_canon_term(term.head, env)},{_canon_term(term.tail, env)})"
    if isinstance(term, Length):
        return f"Length({_canon_term(term.arg, env)})"
    if isinstance(term, Count):
        return f"Count({_canon_term(term.arg, env)},{_canon_term(term.element, env)})"
    if isinstance(term, IfThenElse):
        return (
            f"Ite({_canon_formula(term.cond, env)},{_canon_term(term.then, env)},"
            f"{_canon_term(term.other, env)})"
        )
    if isinstance(term, ListLit):
        return "List(" + ",".join(_canon_term(e, env) for e in term.elements) + ")"
    raise TypeError(f"unknown term {term!r}")


def _canon_formula(formula: Formula, env: dict[str, str]) -> str:
    if isinstance(formula, TrueF):
        return "T"
    if isinstance(formula, FalseF):
        return "F"
    if isinstance(formula, (Eq, Lt, Le)):
        return f"{type(formula).__name__}({_canon_term(formula.left, env)},{_canon_term(formula.right, env)})"
    if isinstance(formula, Mem):
        return f"Mem({_canon_term(formula.element, env)},{_canon_term(formula.lst, env)})"
    if isinstance(formula, Not):
        return f"Not({_canon_formula(formula.child, env)})"
    if isinstance(formula, (And, Or, Implies)):
        return (
            f"{type(formula).__name__}({_canon_formula(formula.left, env)},"
            f"{_canon_formula(formula.right, env)})"
        )
    if isinstance(formula, (Forall, Exists)):
        inner = dict(env)
        inner[formula.binder] = f"b{len(env)}"
        return (
            f"{type(formula).__name__}[{formula.sort.value}]"
            f"({_canon_formula(formula.body, inner)})"
        )
    raise TypeError(f"unknown formula {formula!r}")


def statement_key(goal: GoalDecl) -> str:
    """Canonical form of the statement, invariant under renaming of binders
    and bound variables.  Goal names are provenance, not identity, so they
    are excluded."""
    env = {name: f"b{i}" for i, (name, _) in enumerate(goal.binders)}
    sorts = ",".join(sort.value for _, sort in goal.binders)
    return f"({sorts})|{_canon_formula(goal.body, env)}"


def alpha_equivalent(a: GoalDecl, b: GoalDecl) -> bool:
    return statement_key(a) == statement_key(b)
