"""Randomized counterexample search over generated binder assignments.

Generation is uniform and fully seeded: each call derives its own generator
state from (seed, goal name), so outcomes are reproducible and independent
of call order.  A reported witness is always re-verified by evaluation
before being returned; there is no shrinking.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .errors import BudgetExceeded, ContractViolation, EvalError
from .evaluator import Domain, Env, eval_formula
from .lang.ast import GoalDecl, Sort


@dataclass(frozen=True)
class QcConfig:
    trials: int = 1000
    seed: int = 0
    gen_int_lo: int = -100
    gen_int_hi: int = 100
    gen_max_list_len: int = 8
    # List elements default to the integer range; set these when the element
    # carrier is narrower than the integer one (they must then match the
    # domain the results will be compared against).
    gen_elem_lo: int | None = None
    gen_elem_hi: int | None = None

    def __post_init__(self) -> None:
        if self.trials <= 0:
            raise ContractViolation("trials must be positive")
        if self.gen_int_lo > self.gen_int_hi:
            raise ContractViolation("empty generator integer range")

    @property
    def elem_lo(self) -> int:
        return self.gen_int_lo if self.gen_elem_lo is None else self.gen_elem_lo

    @property
    def elem_hi(self) -> int:
        return self.gen_int_hi if self.gen_elem_hi is None else self.gen_elem_hi


@dataclass(frozen=True)
class NoCounterexample:
    trials_run: int


@dataclass(frozen=True)
class Counterexample:
    witness: Env
    trial_index: int  # 1-based


QcOutcome = NoCounterexample | Counterexample


def derive_rng(seed: int, goal_name: str) -> random.Random:
    """Generator state owned by one quickcheck call, stable across runs."""
    digest = hashlib.sha256(f"{seed}:{goal_name}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def generate_env(
    binders: tuple[tuple[str, Sort], ...], config: QcConfig, rng: random.Random
) -> Env:
    """Draw one assignment; identical generator state gives an identical
    environment."""
    env: Env = {}
    for name, sort in binders:
        if sort is Sort.INT:
            env[name] = rng.randint(config.gen_int_lo, config.gen_int_hi)
        else:
            length = rng.randint(0, config.gen_max_list_len)
            env[name] = tuple(
                rng.randint(config.elem_lo, config.elem_hi) for _ in range(length)
            )
    return env


def _falsifies(goal: GoalDecl, env: Env, domain: Domain) -> bool:
    """Errors and budget exhaustion count as falsifying the assignment."""
    try:
        return not eval_formula(goal.body, env, domain)
    except (EvalError, BudgetExceeded):
        return True


def quickcheck(goal: GoalDecl, config: QcConfig, domain: Domain) -> QcOutcome:
    """Run up to ``config.trials`` sampled assignments against the goal body.

    Inner quantifiers still range over ``domain``; only the outer binders are
    sampled.  The first falsifying assignment is re-verified and returned
    with its 1-based trial index.
    """
    rng = derive_rng(config.seed, goal.name)
    for trial in range(1, config.trials + 1):
        env = generate_env(goal.binders, config, rng)
        if _falsifies(goal, env, domain):
            if not _falsifies(goal, env, domain):  # re-verification
                raise ContractViolation("witness failed re-verification")
            return Counterexample(witness=env, trial_index=trial)
    return NoCounterexample(trials_run=config.trials)
