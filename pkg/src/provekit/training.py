"""Turning search activity into training data.

Three concerns live here: scoring groups of decomposition rollouts so a
learner gets a graded reward instead of a pass/fail bit, closing lemmas with
a learned policy before falling back to a deterministic one, and exporting
validated trajectory records plus a deduplicated curriculum of the lemmas
the search invented along the way.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ContractViolation, FilterViolation, PolicyError
from .lang import GoalDecl, parse_goal, print_goal, statement_key
from .prover import (
    ACCEPTED,
    CHECKER_ERROR,
    DEFAULT_AXIOM_ALLOWLIST,
    KIND_COMPLETION,
    MODE_COMPLETE,
    MODE_DECOMPOSE,
    CheckRequest,
    CheckVerdict,
    Checker,
    DecompositionProposal,
    FeedbackEntry,
    Policy,
    PolicyContext,
    axiom_audit,
)
from .search import ProposalEvaluation, SearchConfig, evaluate_proposal, mix_seed

RECORD_DECOMPOSITION = "decomposition"
RECORD_COMPLETION = "completion"

SOURCE_POLICY = "policy"
SOURCE_FALLBACK = "fallback"

TRAJECTORY_FORMAT_VERSION = 1


@dataclass
class Rollout:
    """One sampled decomposition plus how the gate judged it.

    ``reward`` is None exactly when the sample ended in an infrastructure
    error (policy crash or checker_error); such samples carry no signal
    about the proposal's quality and are excluded from group statistics.
    """

    proposal: DecompositionProposal | None
    evaluation: ProposalEvaluation | None
    reward: float | None
    error: str | None = None


@dataclass
class RolloutGroup:
    goal: GoalDecl
    rollouts: list[Rollout]

    def rewards(self) -> list[float]:
        return [r.reward for r in self.rollouts if r.reward is not None]

    @property
    def all_error(self) -> bool:
        return not self.rewards()

    def mean_reward(self) -> float | None:
        rewards = self.rewards()
        if not rewards:
            return None
        return sum(rewards) / len(rewards)


def score_rollout_group(
    goal: GoalDecl,
    policy: Policy,
    checker: Checker,
    config: SearchConfig,
    n_rollouts: int = 8,
) -> RolloutGroup:
    """Sample ``n_rollouts`` proposals for one goal and score each.

    The policy is asked repeatedly with the same context; a stochastic
    policy diversifies on its own RNG.  Gate failures are rewards of 0.0,
    not errors: the learner must see them.
    """
    if n_rollouts < 1:
        raise ContractViolation("n_rollouts must be >= 1")
    context = PolicyContext(goal=goal, mode=MODE_DECOMPOSE)
    rollouts: list[Rollout] = []
    for _ in range(n_rollouts):
        try:
            proposal = policy.propose_decomposition(context)
        except PolicyError as exc:
            rollouts.append(Rollout(None, None, None, error=f"policy_error: {exc}"))
            continue
        evaluation = evaluate_proposal(goal, proposal, checker, config)
        verdict = evaluation.reconstruction_verdict
        if verdict is not None and verdict.status == CHECKER_ERROR:
            rollouts.append(Rollout(proposal, evaluation, None, error=verdict.diagnostics))
            continue
        assert evaluation.breakdown is not None
        rollouts.append(Rollout(proposal, evaluation, evaluation.breakdown.S))
    return RolloutGroup(goal=goal, rollouts=rollouts)


def filter_groups(groups: list[RolloutGroup]) -> list[RolloutGroup]:
    """Keep only groups whose mean reward carries a learning signal.

    Mean exactly 0 (everything failed) or exactly 1 (everything maximal)
    gives a zero-advantage batch; all-error groups have no mean at all.
    """
    kept = []
    for group in groups:
        mean = group.mean_reward()
        if mean is None or mean == 0.0 or mean == 1.0:
            continue
        kept.append(group)
    return kept


@dataclass
class CompletionOutcome:
    """Result of trying to close one lemma, policy first."""

    closed: bool
    source: str | None
    attempts_used: int
    proof_text: str | None = None
    verdict: CheckVerdict | None = None


def policy_first_completion(
    goal: GoalDecl,
    policy: Policy,
    fallback: Policy,
    checker: Checker,
    config: SearchConfig,
    policy_attempts: int = 4,
) -> CompletionOutcome:
    """Try the learned policy a few times, then the fallback.

    The total attempt budget is ``config.complete_iters``; the first
    ``policy_attempts`` of it go to the policy under test so its successes
    are observable separately from the safety net's.
    """
    if policy_attempts < 0:
        raise ContractViolation("policy_attempts must be >= 0")
    feedback: list[FeedbackEntry] = []
    budget = config.complete_iters
    for attempt in range(1, budget + 1):
        source = SOURCE_POLICY if attempt <= policy_attempts else SOURCE_FALLBACK
        active = policy if source == SOURCE_POLICY else fallback
        context = PolicyContext(
            goal=goal,
            mode=MODE_COMPLETE,
            feedback_history=tuple(feedback),
        )
        try:
            candidate = active.propose_completion(context)
        except PolicyError:
            continue
        request = CheckRequest(kind=KIND_COMPLETION, goal=goal, proof_text=candidate.proof_text)
        verdict = checker.check(request, config.check_timeout_ms)
        if verdict.status == ACCEPTED and not axiom_audit(verdict):
            return CompletionOutcome(
                closed=True,
                source=source,
                attempts_used=attempt,
                proof_text=candidate.proof_text,
                verdict=verdict,
            )
        feedback.append(FeedbackEntry(candidate.proof_text, verdict))
    return CompletionOutcome(closed=False, source=None, attempts_used=budget)


class Curriculum:
    """A growing set of training goals, deduplicated up to renaming.

    Two goals that differ only in their bound-variable or goal names are
    the same exercise; the second copy is refused.  ``version`` bumps on
    every accepted addition so consumers can cheaply detect staleness.
    """

    def __init__(self) -> None:
        self._by_key: dict[str, GoalDecl] = {}
        self._names: set[str] = set()
        self.version = 0

    def __len__(self) -> int:
        return len(self._by_key)

    def __contains__(self, goal: GoalDecl) -> bool:
        return statement_key(goal) in self._by_key

    def goals(self) -> list[GoalDecl]:
        return list(self._by_key.values())

    def add(self, goal: GoalDecl) -> bool:
        key = statement_key(goal)
        if key in self._by_key:
            return False
        name = goal.name
        if name in self._names:
            # Distinct statement under a clashing name: keep both, the
            # newcomer renamed so exports stay unambiguous.
            suffix = 2
            while f"{name}_v{suffix}" in self._names:
                suffix += 1
            goal = GoalDecl(name=f"{name}_v{suffix}", binders=goal.binders, body=goal.body)
        self._by_key[key] = goal
        self._names.add(goal.name)
        self.version += 1
        return True


def augment_curriculum(curriculum: Curriculum, goals: list[GoalDecl]) -> int:
    added = 0
    for goal in goals:
        if curriculum.add(goal):
            added += 1
    return added


@dataclass
class TrajectoryRecord:
    """One exportable training example.

    Decomposition records carry the proposal and its full score breakdown;
    completion records carry the accepted proof and its verdict facts.
    """

    kind: str
    goal_source: str
    # decomposition fields
    lemma_sources: tuple[str, ...] = ()
    reconstruction: str | None = None
    score: dict | None = None
    reward: float | None = None
    # completion fields
    proof_text: str | None = None
    verdict_status: str | None = None
    axioms: tuple[str, ...] = ()
    attempt_index: int | None = None
    source: str | None = None
    replay: bool = False

    def to_json(self) -> dict:
        data = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = list(value)
            data[f.name] = value
        return data

    @classmethod
    def from_json(cls, data: dict) -> "TrajectoryRecord":
        kwargs = dict(data)
        for key in ("lemma_sources", "axioms"):
            if key in kwargs and kwargs[key] is not None:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    def goal(self) -> GoalDecl:
        return parse_goal(self.goal_source)


def validate_record(
    record: TrajectoryRecord,
    allowlist: frozenset[str] = DEFAULT_AXIOM_ALLOWLIST,
) -> None:
    """Admission rules for the training set.

    A decomposition example must have passed the gate (v = 1) and actually
    shrunk the goal (r > 0): rewarding zero-progress splits teaches the
    policy to stall.  A completion example must be an accepted proof whose
    axioms all sit inside the allowlist.
    """
    if record.kind == RECORD_DECOMPOSITION:
        if record.score is None:
            raise FilterViolation("decomposition record lacks its score breakdown")
        if record.score.get("v") != 1:
            raise FilterViolation("decomposition did not pass the validity gate")
        if not record.score.get("r", 0.0) > 0.0:
            raise FilterViolation("decomposition has zero reduction")
        return
    if record.kind == RECORD_COMPLETION:
        if record.verdict_status != ACCEPTED:
            raise FilterViolation("completion record is not an accepted proof")
        extra = [a for a in record.axioms if a not in allowlist]
        if extra:
            raise FilterViolation(f"completion relies on disallowed axioms: {extra}")
        return
    raise FilterViolation(f"unknown record kind {record.kind!r}")


def export_trajectories(records: list[TrajectoryRecord], path: str | Path) -> int:
    """Validate every record, then write the JSONL file atomically enough
    for our purposes (full-file write).  Returns the record count."""
    for record in records:
        validate_record(record)
    header = {
        "type": "trajectories",
        "format_version": TRAJECTORY_FORMAT_VERSION,
        "count": len(records),
    }
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    for record in records:
        lines.append(json.dumps(record.to_json(), sort_keys=True, separators=(",", ":")))
    Path(path).write_text("\n".join(lines) + "\n")
    return len(records)


def load_trajectories(path: str | Path) -> list[TrajectoryRecord]:
    lines = [line for line in Path(path).read_text().splitlines() if line.strip()]
    if not lines:
        raise FilterViolation("empty trajectory file")
    header = json.loads(lines[0])
    if header.get("type") != "trajectories":
        raise FilterViolation("missing trajectory header")
    if header.get("format_version") != TRAJECTORY_FORMAT_VERSION:
        raise FilterViolation(f"unsupported trajectory format {header.get('format_version')!r}")
    records = [TrajectoryRecord.from_json(json.loads(line)) for line in lines[1:]]
    if header.get("count") != len(records):
        raise FilterViolation("trajectory count disagrees with header")
    for record in records:
        validate_record(record)
    return records


def _decomposition_record(goal: GoalDecl, rollout: Rollout) -> TrajectoryRecord:
    assert rollout.proposal is not None and rollout.evaluation is not None
    breakdown = rollout.evaluation.breakdown
    assert breakdown is not None
    return TrajectoryRecord(
        kind=RECORD_DECOMPOSITION,
        goal_source=print_goal(goal),
        lemma_sources=tuple(print_goal(l) for l in rollout.proposal.lemmas),
        reconstruction=rollout.proposal.reconstruction,
        score={
            "v": breakdown.v,
            "d_parent": breakdown.d_parent,
            "d_children": list(breakdown.d_children),
            "d_bar": breakdown.d_bar,
            "r": breakdown.r,
            "S": breakdown.S,
        },
        reward=rollout.reward,
    )


@dataclass
class CollectStats:
    problems_sampled: int = 0
    groups_kept: int = 0
    groups_dropped: int = 0
    decomposition_records: int = 0
    completion_records: int = 0
    curriculum_added: int = 0


def collect(
    problems: list[GoalDecl],
    policy: Policy,
    checker: Checker,
    config: SearchConfig,
    fallback: Policy | None = None,
    curriculum: Curriculum | None = None,
    n_problems: int | None = None,
    n_rollouts: int = 8,
    replay_ratio: float = 0.25,
    policy_attempts: int = 4,
) -> tuple[list[TrajectoryRecord], Curriculum, CollectStats]:
    """One data-collection pass.

    For each sampled problem: draw a rollout group, keep it only if its
    reward spread is informative, export the gate-passing rollouts, then
    close the best proposal's lemmas (policy first, fallback after) and
    export those proofs.  ``replay_ratio`` of completion records are marked
    for replay so later training mixes fresh and replayed proofs; lemmas
    from the best rollout feed the curriculum.
    """
    if not problems:
        raise ContractViolation("need at least one problem to collect from")
    if not 0.0 <= replay_ratio <= 1.0:
        raise ContractViolation("replay_ratio must be within [0, 1]")
    fallback = fallback if fallback is not None else policy
    curriculum = curriculum if curriculum is not None else Curriculum()
    count = n_problems if n_problems is not None else len(problems)
    rng = random.Random(mix_seed(config.seed, "collect"))
    records: list[TrajectoryRecord] = []
    stats = CollectStats()
    for _ in range(count):
        problem = problems[rng.randrange(len(problems))]
        stats.problems_sampled += 1
        run_policy = policy.fork(mix_seed(config.seed, f"collect:{problem.name}:{stats.problems_sampled}"))
        group = score_rollout_group(problem, run_policy, checker, config, n_rollouts)
        if not filter_groups([group]):
            stats.groups_dropped += 1
            continue
        stats.groups_kept += 1
        best: Rollout | None = None
        for rollout in group.rollouts:
            if rollout.reward is None or rollout.evaluation is None:
                continue
            breakdown = rollout.evaluation.breakdown
            if breakdown is None or breakdown.v != 1 or not breakdown.r > 0.0:
                continue
            records.append(_decomposition_record(problem, rollout))
            stats.decomposition_records += 1
            # Completion practice and curriculum growth both need lemmas, so
            # the best *decomposing* rollout is followed up, not a discharge.
            if rollout.proposal is not None and rollout.proposal.k >= 1:
                if best is None or rollout.reward > (best.reward or 0.0):
                    best = rollout
        if best is None or best.proposal is None:
            continue
        for lemma in best.proposal.lemmas:
            outcome = policy_first_completion(
                lemma, run_policy, fallback, checker, config, policy_attempts
            )
            if not outcome.closed:
                continue
            assert outcome.verdict is not None and outcome.proof_text is not None
            records.append(
                TrajectoryRecord(
                    kind=RECORD_COMPLETION,
                    goal_source=print_goal(lemma),
                    proof_text=outcome.proof_text,
                    verdict_status=outcome.verdict.status,
                    axioms=outcome.verdict.axioms_used,
                    attempt_index=outcome.attempts_used,
                    source=outcome.source,
                    replay=rng.random() < replay_ratio,
                )
            )
            stats.completion_records += 1
        stats.curriculum_added += augment_curriculum(curriculum, list(best.proposal.lemmas))
    return records, curriculum, stats
