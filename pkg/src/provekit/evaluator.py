"""Bounded evaluation and decision procedures.

All semantics are relative to a finite ``Domain``: integers range over a
closed interval and lists over bounded-length vectors of bounded elements.
Deciding a goal enumerates every binder assignment, so validity here always
means validity over the domain, nothing stronger.

Conventions that matter for soundness downstream:

- ``Mod`` truncates toward zero (the result carries the dividend's sign) and
  a zero divisor raises ``EvalError``.
- Any evaluation error while deciding an assignment counts as falsifying
  that assignment; a crashing statement is never silently accepted.
- One ``node_budget`` covers a whole decision (all assignments); exhausting
  it raises ``BudgetExceeded``, which callers surface as a resource verdict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .errors import BudgetExceeded, ContractViolation, EvalError
from .lang.ast import (
    Add,
    And,
    Append,
    Cons,
    Count,
    Eq,
    Exists,
    FalseF,
    Forall,
    Formula,
    GoalDecl,
    IfThenElse,
    IntLit,
    Le,
    Length,
    ListLit,
    Lt,
    Mem,
    Mod,
    Mul,
    Not,
    Or,
    Implies,
    Sort,
    Sub,
    Term,
    TrueF,
    Var,
    rename_free,
)

Value = int | tuple[int, ...]
Env = dict[str, Value]


@dataclass(frozen=True)
class Domain:
    """Finite carrier sets plus the per-decision step budget."""

    int_lo: int = -5
    int_hi: int = 5
    max_list_len: int = 3
    elem_lo: int = -2
    elem_hi: int = 2
    node_budget: int = 1_000_000

    def __post_init__(self) -> None:
        if self.int_lo > self.int_hi or self.elem_lo > self.elem_hi:
            raise ContractViolation("empty value range")
        if self.max_list_len < 0 or self.node_budget <= 0:
            raise ContractViolation("need max_list_len >= 0 and node_budget > 0")

    def iter_values(self, sort: Sort) -> Iterator[Value]:
        """Integers ascending; lists by length, then lexicographically."""
        if sort is Sort.INT:
            yield from range(self.int_lo, self.int_hi + 1)
            return
        elems = range(self.elem_lo, self.elem_hi + 1)
        for length in range(self.max_list_len + 1):
            yield from itertools.product(elems, repeat=length)

    def value_count(self, sort: Sort) -> int:
        if sort is Sort.INT:
            return self.int_hi - self.int_lo + 1
        base = self.elem_hi - self.elem_lo + 1
        if base == 1:
            return self.max_list_len + 1
        return (base ** (self.max_list_len + 1) - 1) // (base - 1)

    def iter_assignments(self, binders: tuple[tuple[str, Sort], ...]) -> Iterator[Env]:
        """Cartesian product of per-binder enumerations; the last binder
        varies fastest."""
        names = [name for name, _ in binders]
        pools = [list(self.iter_values(sort)) for _, sort in binders]
        for combo in itertools.product(*pools):
            yield dict(zip(names, combo))


class Budget:
    """Mutable step counter shared by every node visit in one decision."""

    __slots__ = ("remaining",)

    def __init__(self, limit: int):
        self.remaining = limit

    def tick(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise BudgetExceeded("evaluation step budget exhausted")


def _trunc_mod(a: int, b: int) -> int:
    if b == 0:
        raise EvalError("modulo by zero")
    r = abs(a) % abs(b)
    return r if a >= 0 else -r


def eval_term(term: Term, env: Env, domain: Domain, budget: Budget) -> Value:
    budget.tick()
    if isinstance(term, IntLit):
        return term.value
    if isinstance(term, Var):
        try:
            return env[term.name]
        except KeyError:
            raise EvalError(f"unbound variable {term.name!r}") from None
    if isinstance(term, Add):
        return eval_term(term.left, env, domain, budget) + eval_term(term.right, env, domain, budget)
    if isinstance(term, Sub):
        return eval_term(term.left, env, domain, budget) - eval_term(term.right, env, domain, budget)
    if isinstance(term, Mul):
        return eval_term(term.left, env, domain, budget) * eval_term(term.right, env, domain, budget)
    if isinstance(term, Mod):
        return _trunc_mod(
            eval_term(term.left, env, domain, budget),
            eval_term(term.right, env, domain, budget),
        )
    if isinstance(term, ListLit):
        return tuple(eval_term(e, env, domain, budget) for e in term.elements)
    if isinstance(term, Cons):
        head = eval_term(term.head, env, domain, budget)
        tail = eval_term(term.tail, env, domain, budget)
        return (head, *tail)
    if isinstance(term, Append):
        return eval_term(term.left, env, domain, budget) + eval_term(term.right, env, domain, budget)
    if isinstance(term, Length):
        return len(eval_term(term.arg, env, domain, budget))
    if isinstance(term, Count):
        lst = eval_term(term.arg, env, domain, budget)
        needle = eval_term(term.element, env, domain, budget)
        return sum(1 for x in lst if x == needle)
    if isinstance(term, IfThenElse):
        if eval_formula(term.cond, env, domain, budget):
            return eval_term(term.then, env, domain, budget)
        return eval_term(term.other, env, domain, budget)
    raise EvalError(f"unknown term {term!r}")


def eval_formula(formula: Formula, env: Env, domain: Domain, budget: Budget | None = None) -> bool:
    """Evaluate under one assignment; quantifiers enumerate the domain."""
    if budget is None:
        budget = Budget(domain.node_budget)
    budget.tick()
    if isinstance(formula, TrueF):
        return True
    if isinstance(formula, FalseF):
        return False
    if isinstance(formula, Eq):
        return eval_term(formula.left, env, domain, budget) == eval_term(
            formula.right, env, domain, budget
        )
    if isinstance(formula, Lt):
        return eval_term(formula.left, env, domain, budget) < eval_term(
            formula.right, env, domain, budget
        )
    if isinstance(formula, Le):
        return eval_term(formula.left, env, domain, budget) <= eval_term(
            formula.right, env, domain, budget
        )
    if isinstance(formula, Mem):
        needle = eval_term(formula.element, env, domain, budget)
        return needle in eval_term(formula.lst, env, domain, budget)
    if isinstance(formula, Not):
        return not eval_formula(formula.child, env, domain, budget)
    if isinstance(formula, And):
        return eval_formula(formula.left, env, domain, budget) and eval_formula(
            formula.right, env, domain, budget
        )
    if isinstance(formula, Or):
        return eval_formula(formula.left, env, domain, budget) or eval_formula(
            formula.right, env, domain, budget
        )
    if isinstance(formula, Implies):
        return (not eval_formula(formula.left, env, domain, budget)) or eval_formula(
            formula.right, env, domain, budget
        )
    if isinstance(formula, (Forall, Exists)):
        want_all = isinstance(formula, Forall)
        for value in domain.iter_values(formula.sort):
            inner = dict(env)
            inner[formula.binder] = value
            result = eval_formula(formula.body, inner, domain, budget)
            if want_all and not result:
                return False
            if not want_all and result:
                return True
        return want_all
    raise EvalError(f"unknown formula {formula!r}")


@dataclass(frozen=True)
class DecisionVerdict:
    """Outcome of a bounded decision.

    status is one of "valid", "counterexample", "resource_exceeded"; the
    witness is the first falsifying assignment in enumeration order (an
    assignment whose evaluation errored counts as falsifying).
    """

    status: str
    witness: Env | None = None
    steps_used: int = 0

    VALID = "valid"
    COUNTEREXAMPLE = "counterexample"
    RESOURCE_EXCEEDED = "resource_exceeded"


def decide_bounded(goal: GoalDecl, domain: Domain) -> DecisionVerdict:
    """Exhaustively decide the goal over the domain under one budget."""
    budget = Budget(domain.node_budget)
    for env in domain.iter_assignments(goal.binders):
        try:
            holds = eval_formula(goal.body, env, domain, budget)
        except EvalError:
            holds = False
        except BudgetExceeded:
            return DecisionVerdict(
                DecisionVerdict.RESOURCE_EXCEEDED, steps_used=domain.node_budget
            )
        if not holds:
            return DecisionVerdict(
                DecisionVerdict.COUNTEREXAMPLE,
                witness=env,
                steps_used=domain.node_budget - budget.remaining,
            )
    return DecisionVerdict(
        DecisionVerdict.VALID, steps_used=domain.node_budget - budget.remaining
    )


def _signature(goal: GoalDecl) -> tuple[Sort, ...]:
    return tuple(sort for _, sort in goal.binders)


def entailment_check(lemmas: list[GoalDecl], goal: GoalDecl, domain: Domain) -> bool:
    """Do the lemmas jointly entail the goal over the domain?

    Lemmas whose binder signature matches the goal's (positionally, by sort)
    are renamed onto the goal's binders and evaluated pointwise; any other
    lemma is universally closed over its own binders first.  An evaluation
    error anywhere in the implication at some point falsifies that point,
    so entailment fails rather than silently accepting a crashing statement.

    With no lemmas this reduces exactly to deciding the goal itself.
    Raises BudgetExceeded when the shared budget runs out.
    """
    budget = Budget(domain.node_budget)
    goal_names = [name for name, _ in goal.binders]
    goal_sig = _signature(goal)

    # Premises keep lemma order so short-circuiting matches the implication
    # formula: an earlier false premise shields a later erroring one.
    POINTWISE, CONST = "pointwise", "const"
    premises: list[tuple[str, object]] = []
    for lemma in lemmas:
        if lemma.binders and _signature(lemma) == goal_sig:
            mapping = {old: new for (old, _), new in zip(lemma.binders, goal_names)}
            premises.append((POINTWISE, rename_free(lemma.body, mapping)))
            continue
        # Universal closure over the lemma's own binders, evaluated once;
        # it is assignment-independent from the goal's point of view.
        result: bool | None = True
        for env in domain.iter_assignments(lemma.binders):
            try:
                if not eval_formula(lemma.body, env, domain, budget):
                    result = False
                    break
            except EvalError:
                result = None  # erroring premise: falsifies unless shielded
                break
        premises.append((CONST, result))

    for env in domain.iter_assignments(goal.binders):
        satisfied = True
        for kind, payload in premises:
            if kind is CONST:
                if payload is None:
                    return False
                if payload is False:
                    satisfied = False
                    break
                continue
            try:
                if not eval_formula(payload, env, domain, budget):  # type: ignore[arg-type]
                    satisfied = False
                    break
            except EvalError:
                return False
        if not satisfied:
            continue
        try:
            if not eval_formula(goal.body, env, domain, budget):
                return False
        except EvalError:
            return False
    return True


def leave_one_out_necessity(lemmas: list[GoalDecl], goal: GoalDecl, domain: Domain) -> list[bool]:
    """For each lemma: does dropping it break the entailment?

    Advisory diagnostics only; results are recorded, never used to gate.
    Precondition: the full set entails the goal.
    """
    if not entailment_check(lemmas, goal, domain):
        raise ContractViolation("necessity probe requires an entailing lemma set")
    flags: list[bool] = []
    for i in range(len(lemmas)):
        rest = lemmas[:i] + lemmas[i + 1 :]
        flags.append(not entailment_check(rest, goal, domain))
    return flags
