"""Built-in checker dispatch, structural reconstruction, and policies."""

from __future__ import annotations

import pytest

from provekit.errors import ContractViolation
from provekit.evaluator import Domain
from provekit.lang import GoalDecl, IntLit, ListLit, Sort, parse_goal, substitute
from provekit.prover import (
    ACCEPTED,
    CHECKER_ERROR,
    DEFAULT_AXIOM_ALLOWLIST,
    DIRECT_PROOF_DIRECTIVE,
    KIND_COMPLETION,
    KIND_DIRECT,
    KIND_RECONSTRUCTION,
    MODE_COMPLETE,
    REJECTED,
    TIMEOUT,
    BuiltinChecker,
    CheckRequest,
    CheckVerdict,
    Checker,
    CompletionAttempt,
    ConjunctionSplitter,
    DirectSubmit,
    FeedbackEntry,
    Policy,
    PolicyContext,
    QuantifierGrounder,
    StochasticPolicy,
    axiom_audit,
    fresh_lemma_name,
)
from provekit.prover.api import RECON_AND_INTRO, RECON_DIRECT, RECON_GROUND
from provekit.prover.builtin import _junk_proposal

DOMAIN = Domain()
CHECKER = BuiltinChecker(DOMAIN)
T_MS = 300_000


def _check(request: CheckRequest) -> CheckVerdict:
    return CHECKER.check(request, T_MS)


# --- direct and completion checks --------------------------------------------


def test_direct_valid_goal_is_accepted():
    goal = parse_goal("goal t (x: Int) := x + 0 = x")
    verdict = _check(CheckRequest(KIND_DIRECT, goal))
    assert verdict.status == ACCEPTED
    assert verdict.wall_time_ms >= 0


def test_direct_refutable_goal_is_rejected_with_witness():
    goal = parse_goal("goal t (x: Int) := x < 3")
    verdict = _check(CheckRequest(KIND_DIRECT, goal))
    assert verdict.status == REJECTED
    assert "x=3" in verdict.diagnostics


def test_completion_decide_directive_decides():
    goal = parse_goal("goal t (x: Int) := x <= 5")
    verdict = _check(CheckRequest(KIND_COMPLETION, goal, proof_text=DIRECT_PROOF_DIRECTIVE))
    assert verdict.status == ACCEPTED


def test_completion_unknown_directive_is_rejected():
    goal = parse_goal("goal t := 0 = 0")
    verdict = _check(CheckRequest(KIND_COMPLETION, goal, proof_text="sorry"))
    assert verdict.status == REJECTED
    assert "sorry" in verdict.diagnostics


def test_reconstruction_without_lemmas_decides_the_goal():
    good = parse_goal("goal t (x: Int) := x <= 5")
    bad = parse_goal("goal t (x: Int) := x <= 4")
    assert _check(CheckRequest(KIND_RECONSTRUCTION, good)).status == ACCEPTED
    assert _check(CheckRequest(KIND_RECONSTRUCTION, bad)).status == REJECTED


def test_entailment_reconstruction():
    goal = parse_goal("goal g (x: Int) := x = 3")
    lo = parse_goal("goal lo (a: Int) := 3 <= a")
    hi = parse_goal("goal hi (b: Int) := b <= 3")
    ok = CheckRequest(KIND_RECONSTRUCTION, goal, lemmas=(lo, hi))
    assert _check(ok).status == ACCEPTED
    weak = CheckRequest(KIND_RECONSTRUCTION, goal, lemmas=(lo,))
    assert _check(weak).status == REJECTED


def test_unknown_marker_falls_back_to_entailment():
    goal = parse_goal("goal g (x: Int) := x = 3")
    lo = parse_goal("goal lo (a: Int) := 3 <= a")
    hi = parse_goal("goal hi (b: Int) := b <= 3")
    req = CheckRequest(KIND_RECONSTRUCTION, goal, lemmas=(lo, hi), proof_text="by magic")
    assert _check(req).status == ACCEPTED


def test_budget_exhaustion_maps_to_timeout_verdict():
    checker = BuiltinChecker(DOMAIN, nodes_per_ms=1)
    goal = parse_goal("goal t := 0 = 0")
    verdict = checker.check(CheckRequest(KIND_DIRECT, goal), 0)  # 1-node budget
    assert verdict.status == TIMEOUT


def test_infrastructure_faults_become_checker_error_not_rejection():
    verdict = _check(CheckRequest(KIND_DIRECT, None))  # type: ignore[arg-type]
    assert verdict.status == CHECKER_ERROR
    assert verdict.diagnostics


def test_erroring_goal_is_a_rejection_not_a_fault():
    goal = parse_goal("goal e (x: Int) := x % 0 = 0")
    assert _check(CheckRequest(KIND_DIRECT, goal)).status == REJECTED


# --- conjunction introduction -------------------------------------------------


def _and_intro(goal: GoalDecl, *lemmas: GoalDecl) -> CheckVerdict:
    return _check(
        CheckRequest(KIND_RECONSTRUCTION, goal, lemmas=lemmas, proof_text=RECON_AND_INTRO)
    )


def test_and_intro_accepts_exact_tiling():
    goal = parse_goal("goal g (x: Int) := x = x /\\ (x <= 5 /\\ 0 <= x + 5)")
    a = parse_goal("goal a (x: Int) := x = x")
    b = parse_goal("goal b (x: Int) := x <= 5")
    c = parse_goal("goal c (x: Int) := 0 <= x + 5")
    assert _and_intro(goal, a, b, c).status == ACCEPTED


def test_and_intro_is_structural_not_semantic():
    # Falsity is the quickcheck gate's job; tiling alone passes here.
    goal = parse_goal("goal g := 0 = 1 /\\ 0 = 2")
    a = parse_goal("goal a := 0 = 1")
    b = parse_goal("goal b := 0 = 2")
    assert _and_intro(goal, a, b).status == ACCEPTED


def test_and_intro_lemma_may_cover_a_subtree():
    goal = parse_goal("goal g := 0 = 0 /\\ (1 = 1 /\\ 2 = 2)")
    a = parse_goal("goal a := 0 = 0")
    bc = parse_goal("goal bc := 1 = 1 /\\ 2 = 2")
    assert _and_intro(goal, a, bc).status == ACCEPTED


def test_and_intro_rejects_wrong_order_and_missing_pieces():
    goal = parse_goal("goal g := 0 = 0 /\\ 1 = 1")
    a = parse_goal("goal a := 0 = 0")
    b = parse_goal("goal b := 1 = 1")
    assert _and_intro(goal, b, a).status == REJECTED
    assert _and_intro(goal, a).status == REJECTED


def test_and_intro_rejects_foreign_binder():
    goal = parse_goal("goal g (x: Int) := x = x /\\ 0 = 0")
    a = parse_goal("goal a (z: Int) := z = z")
    b = parse_goal("goal b := 0 = 0")
    verdict = _and_intro(goal, a, b)
    assert verdict.status == REJECTED
    assert "z" in verdict.diagnostics


def test_and_intro_rejects_unbound_lemma_body():
    goal = parse_goal("goal g (x: Int) := x = x /\\ 0 = 0")
    stray = GoalDecl("a", (), parse_goal("goal t (x: Int) := x = x").body)
    b = parse_goal("goal b := 0 = 0")
    verdict = _and_intro(goal, stray, b)
    assert verdict.status == REJECTED
    assert "unbound" in verdict.diagnostics


# --- first-binder grounding ---------------------------------------------------


def test_grounding_accepts_in_order_instances():
    d = Domain(int_lo=0, int_hi=1)
    checker = BuiltinChecker(d)
    goal = parse_goal("goal g (x: Int) (y: Int) := x * y = y * x")
    lemmas = tuple(
        GoalDecl(f"g_1_{i}", (("y", Sort.INT),), substitute(goal.body, "x", IntLit(v)))
        for i, v in enumerate([0, 1], start=1)
    )
    req = CheckRequest(KIND_RECONSTRUCTION, goal, lemmas=lemmas, proof_text=RECON_GROUND)
    assert checker.check(req, T_MS).status == ACCEPTED


def test_grounding_rejects_wrong_count_order_or_binders():
    d = Domain(int_lo=0, int_hi=1)
    checker = BuiltinChecker(d)
    goal = parse_goal("goal g (x: Int) (y: Int) := x * y = y * x")
    inst = [
        GoalDecl(f"g_1_{i}", (("y", Sort.INT),), substitute(goal.body, "x", IntLit(v)))
        for i, v in enumerate([0, 1], start=1)
    ]

    def run(lemmas):
        req = CheckRequest(
            KIND_RECONSTRUCTION, goal, lemmas=tuple(lemmas), proof_text=RECON_GROUND
        )
        return checker.check(req, T_MS)

    assert "2 instances" in run(inst[:1]).diagnostics
    assert "not the instance" in run(inst[::-1]).diagnostics
    dropped = GoalDecl(inst[0].name, (), inst[0].body)
    assert "must keep binders" in run([dropped, inst[1]]).diagnostics
    closed = parse_goal("goal c := 0 = 0")
    assert "at least one binder" in checker.check(
        CheckRequest(KIND_RECONSTRUCTION, closed, lemmas=(inst[0],), proof_text=RECON_GROUND),
        T_MS,
    ).diagnostics


def test_grounding_over_list_carrier():
    d = Domain(int_lo=0, int_hi=0, max_list_len=1, elem_lo=0, elem_hi=0)
    checker = BuiltinChecker(d)
    goal = parse_goal("goal g (l: IntList) := len(l) <= 1")
    values = [(), (0,)]
    lemmas = tuple(
        GoalDecl(
            f"g_1_{i}",
            (),
            substitute(goal.body, "l", ListLit(tuple(IntLit(e) for e in v))),
        )
        for i, v in enumerate(values, start=1)
    )
    req = CheckRequest(KIND_RECONSTRUCTION, goal, lemmas=lemmas, proof_text=RECON_GROUND)
    assert checker.check(req, T_MS).status == ACCEPTED


# --- policies -----------------------------------------------------------------


def _ctx(goal: GoalDecl, depth: int = 0) -> PolicyContext:
    return PolicyContext(goal=goal, target_depth=depth)


def test_direct_submit_policy():
    goal = parse_goal("goal t := 0 = 0")
    policy = DirectSubmit()
    proposal = policy.propose_decomposition(_ctx(goal))
    assert proposal.k == 0
    assert proposal.reconstruction == RECON_DIRECT
    attempt = policy.propose_completion(PolicyContext(goal=goal, mode=MODE_COMPLETE))
    assert attempt == CompletionAttempt(proof_text=DIRECT_PROOF_DIRECTIVE, attempt_index=1)
    assert policy.fork(99) is policy


def test_completion_attempt_index_tracks_feedback():
    goal = parse_goal("goal t := 0 = 0")
    fb = (FeedbackEntry("decide", CheckVerdict(TIMEOUT, diagnostics="slow")),)
    ctx = PolicyContext(goal=goal, feedback_history=fb, mode=MODE_COMPLETE)
    assert DirectSubmit().propose_completion(ctx).attempt_index == 2


def test_splitter_depth_controls_fringe_flattening():
    goal = parse_goal("goal g := 0 = 0 /\\ (1 = 1 /\\ 2 = 2)")
    shallow = ConjunctionSplitter(depth=1).propose_decomposition(_ctx(goal))
    assert shallow.k == 2
    deep = ConjunctionSplitter(depth=2).propose_decomposition(_ctx(goal))
    assert deep.k == 3
    assert deep.reconstruction == RECON_AND_INTRO


def test_splitter_restricts_binders_and_names_children():
    goal = parse_goal("goal g (x: Int) (y: Int) := x = x /\\ y = y")
    proposal = ConjunctionSplitter().propose_decomposition(_ctx(goal, depth=2))
    first, second = proposal.lemmas
    assert first.name == fresh_lemma_name("g", 3, 1)
    assert second.name == fresh_lemma_name("g", 3, 2)
    assert first.binders == (("x", Sort.INT),)
    assert second.binders == (("y", Sort.INT),)


def test_splitter_proposals_reconstruct_under_the_checker():
    goal = parse_goal("goal g (x: Int) := x + 0 = x /\\ x * 1 = x")
    proposal = ConjunctionSplitter().propose_decomposition(_ctx(goal))
    req = CheckRequest(
        KIND_RECONSTRUCTION, goal, lemmas=proposal.lemmas, proof_text=proposal.reconstruction
    )
    assert _check(req).status == ACCEPTED


def test_splitter_falls_back_to_direct_on_non_conjunction():
    goal = parse_goal("goal g (x: Int) := x = x")
    proposal = ConjunctionSplitter().propose_decomposition(_ctx(goal))
    assert proposal.k == 0 and proposal.reconstruction == RECON_DIRECT


def test_grounder_instantiates_small_carriers():
    goal = parse_goal("goal g (x: Int) (y: Int) := x * y = y * x")
    grounder = QuantifierGrounder(DOMAIN, max_points=11)
    proposal = grounder.propose_decomposition(_ctx(goal))
    assert proposal.k == DOMAIN.value_count(Sort.INT)
    assert proposal.reconstruction == RECON_GROUND
    req = CheckRequest(
        KIND_RECONSTRUCTION, goal, lemmas=proposal.lemmas, proof_text=proposal.reconstruction
    )
    assert _check(req).status == ACCEPTED


def test_grounder_declines_large_carriers_and_closed_goals():
    goal = parse_goal("goal g (x: Int) := x + 0 = x")
    assert QuantifierGrounder(DOMAIN, max_points=4).propose_decomposition(_ctx(goal)).k == 0
    closed = parse_goal("goal c := 0 = 0")
    assert QuantifierGrounder(DOMAIN).propose_decomposition(_ctx(closed)).k == 0


def test_junk_proposal_is_refutable_by_quickcheck():
    from provekit.quickcheck import Counterexample, QcConfig, quickcheck

    goal = parse_goal("goal g (x: Int) := x = x")
    proposal = _junk_proposal(_ctx(goal))
    assert proposal.k == 1
    (lemma,) = proposal.lemmas
    out = quickcheck(lemma, QcConfig(trials=5, seed=0), DOMAIN)
    assert isinstance(out, Counterexample)


def test_stochastic_policy_is_seed_deterministic():
    goal = parse_goal("goal g (x: Int) := x = x /\\ x + 0 = x")
    ctx = _ctx(goal)
    a = StochasticPolicy(7, DOMAIN)
    b = StochasticPolicy(7, DOMAIN)
    assert [a.propose_decomposition(ctx) for _ in range(20)] == [
        b.propose_decomposition(ctx) for _ in range(20)
    ]


def test_stochastic_policy_mixes_all_strategies():
    goal = parse_goal("goal g (x: Int) := x = x /\\ x + 0 = x")
    ctx = _ctx(goal)
    # 5-point integer carrier keeps the grounder inside its point cap.
    policy = StochasticPolicy(0, Domain(int_lo=-2, int_hi=2))
    kinds = {
        policy.propose_decomposition(ctx).reconstruction for _ in range(200)
    }
    assert kinds == {RECON_AND_INTRO, RECON_DIRECT, RECON_GROUND, "entailment"}


def test_stochastic_fork_reseeds_independently():
    goal = parse_goal("goal g (x: Int) := x = x /\\ x + 0 = x")
    ctx = _ctx(goal)
    parent = StochasticPolicy(3, DOMAIN, split_depth=2, max_ground_points=5)
    parent.propose_decomposition(ctx)  # advance parent state
    child = parent.fork(3)
    fresh = StochasticPolicy(3, DOMAIN, split_depth=2, max_ground_points=5)
    assert [child.propose_decomposition(ctx) for _ in range(10)] == [
        fresh.propose_decomposition(ctx) for _ in range(10)
    ]


def test_stochastic_policy_copies_caller_weights():
    weights = {"split": 1.0, "direct": 0.0, "ground": 0.0, "junk": 0.0}
    policy = StochasticPolicy(0, DOMAIN, weights=weights)
    weights["split"] = 0.0
    weights["junk"] = 1.0
    goal = parse_goal("goal g := 0 = 0 /\\ 1 = 1")
    proposal = policy.propose_decomposition(_ctx(goal))
    assert proposal.reconstruction == RECON_AND_INTRO


# --- protocol plumbing ---------------------------------------------------------


def test_builtin_types_satisfy_the_protocols():
    assert isinstance(CHECKER, Checker)
    for policy in (DirectSubmit(), ConjunctionSplitter(), StochasticPolicy(0, DOMAIN)):
        assert isinstance(policy, Policy)


def test_axiom_audit():
    clean = CheckVerdict(ACCEPTED, axioms_used=("propext", "Quot.sound"))
    assert axiom_audit(clean) == []
    dirty = CheckVerdict(ACCEPTED, axioms_used=("propext", "Lean.ofReduceBool"))
    assert axiom_audit(dirty) == ["Lean.ofReduceBool"]
    with pytest.raises(ContractViolation):
        axiom_audit(CheckVerdict(REJECTED, diagnostics="no"))


def test_default_allowlist_contents():
    assert DEFAULT_AXIOM_ALLOWLIST == frozenset({"propext", "Classical.choice", "Quot.sound"})


def test_contract_validation_on_wire_types():
    goal = parse_goal("goal t := 0 = 0")
    with pytest.raises(ContractViolation):
        CheckRequest("prove", goal)
    with pytest.raises(ContractViolation):
        CheckVerdict(REJECTED, axioms_used=("propext",))
    with pytest.raises(ContractViolation):
        CompletionAttempt(proof_text="decide", attempt_index=0)
    with pytest.raises(ContractViolation):
        PolicyContext(goal=goal, mode="ponder")
    fb = (FeedbackEntry("decide", CheckVerdict(REJECTED, diagnostics="no")),)
    with pytest.raises(ContractViolation):
        PolicyContext(goal=goal, feedback_history=fb)


def test_fresh_lemma_name_format():
    assert fresh_lemma_name("root", 1, 2) == "root_1_2"
