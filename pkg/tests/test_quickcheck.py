"""Seeded random testing: determinism, witness soundness, generator ranges."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_goal
from provekit.errors import ContractViolation, EvalError
from provekit.evaluator import Domain, eval_formula
from provekit.lang import Sort, parse_goal
from provekit.quickcheck import (
    Counterexample,
    NoCounterexample,
    QcConfig,
    derive_rng,
    generate_env,
    quickcheck,
)

DOMAIN = Domain()


def test_identical_config_gives_identical_outcome():
    goal = parse_goal("goal neg (x: Int) := 0 <= x")
    cfg = QcConfig(trials=50, seed=0)
    assert quickcheck(goal, cfg, DOMAIN) == quickcheck(goal, cfg, DOMAIN)


def test_outcome_is_independent_of_call_order():
    a = parse_goal("goal a (x: Int) := 0 <= x")
    b = parse_goal("goal b (x: Int) := x <= 0")
    cfg = QcConfig(trials=30, seed=5)
    first_a = quickcheck(a, cfg, DOMAIN)
    first_b = quickcheck(b, cfg, DOMAIN)
    # Reversed order: each call derives its own generator state.
    assert quickcheck(b, cfg, DOMAIN) == first_b
    assert quickcheck(a, cfg, DOMAIN) == first_a


def test_goal_name_decorrelates_streams():
    r1 = derive_rng(0, "alpha")
    r2 = derive_rng(0, "beta")
    r3 = derive_rng(0, "alpha")
    first = r1.random()
    assert first == r3.random()
    assert first != r2.random()


def test_trial_index_is_one_based():
    goal = parse_goal("goal f := 0 = 1")
    out = quickcheck(goal, QcConfig(trials=10, seed=0), DOMAIN)
    assert out == Counterexample(witness={}, trial_index=1)


def test_valid_goal_reports_trials_run():
    goal = parse_goal("goal t (x: Int) := x + 0 = x")
    out = quickcheck(goal, QcConfig(trials=25, seed=3), DOMAIN)
    assert out == NoCounterexample(trials_run=25)


def test_evaluation_error_counts_as_counterexample():
    goal = parse_goal("goal e (x: Int) := x % 0 = 0")
    out = quickcheck(goal, QcConfig(trials=10, seed=0), DOMAIN)
    assert isinstance(out, Counterexample)
    assert out.trial_index == 1


def test_needle_in_haystack_detection_rate():
    # One falsifying point out of 201; 1000 trials find it with
    # probability about 0.993 per seed, so 20 seeds shouldn't miss often.
    goal = parse_goal("goal n (x: Int) := x != 37")
    found = sum(
        isinstance(quickcheck(goal, QcConfig(trials=1000, seed=s), DOMAIN), Counterexample)
        for s in range(20)
    )
    assert found >= 16


def test_inner_quantifiers_range_over_domain_not_generator():
    # Sampled x routinely falls outside [-5, 5], where no domain value of w
    # can equal it, so the mismatch surfaces immediately.
    goal = parse_goal("goal q (x: Int) := exists w: Int, w = x")
    out = quickcheck(goal, QcConfig(trials=200, seed=0), DOMAIN)
    assert isinstance(out, Counterexample)
    assert abs(out.witness["x"]) > DOMAIN.int_hi


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=5000), st.integers(min_value=0, max_value=50))
def test_witness_always_falsifies(goal_seed, qc_seed):
    goal = random_goal(goal_seed, "g", depth=2)
    domain = Domain(int_lo=-2, int_hi=2, max_list_len=2, elem_lo=-1, elem_hi=1)
    cfg = QcConfig(
        trials=40,
        seed=qc_seed,
        gen_int_lo=-2,
        gen_int_hi=2,
        gen_max_list_len=2,
        gen_elem_lo=-1,
        gen_elem_hi=1,
    )
    out = quickcheck(goal, cfg, domain)
    if isinstance(out, Counterexample):
        try:
            holds = eval_formula(goal.body, out.witness, domain)
        except EvalError:
            holds = False
        assert not holds


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_generated_values_respect_configured_ranges(seed):
    cfg = QcConfig(
        trials=1,
        seed=seed,
        gen_int_lo=-3,
        gen_int_hi=7,
        gen_max_list_len=4,
        gen_elem_lo=0,
        gen_elem_hi=2,
    )
    rng = derive_rng(seed, "ranges")
    binders = (("x", Sort.INT), ("l", Sort.INT_LIST), ("y", Sort.INT))
    for _ in range(20):
        env = generate_env(binders, cfg, rng)
        assert -3 <= env["x"] <= 7
        assert -3 <= env["y"] <= 7
        assert len(env["l"]) <= 4
        assert all(0 <= e <= 2 for e in env["l"])


def test_element_range_defaults_to_integer_range():
    cfg = QcConfig(trials=1, seed=0, gen_int_lo=5, gen_int_hi=6, gen_max_list_len=3)
    assert cfg.elem_lo == 5 and cfg.elem_hi == 6
    rng = derive_rng(0, "default-elems")
    for _ in range(20):
        env = generate_env((("l", Sort.INT_LIST),), cfg, rng)
        assert all(5 <= e <= 6 for e in env["l"])


@pytest.mark.parametrize(
    "kwargs",
    [{"trials": 0}, {"trials": -3}, {"gen_int_lo": 1, "gen_int_hi": 0}],
)
def test_bad_configs_are_rejected(kwargs):
    with pytest.raises(ContractViolation):
        QcConfig(**kwargs)
