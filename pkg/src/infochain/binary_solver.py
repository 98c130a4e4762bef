"""Closed-form equilibrium for binary-state chains.

The solver normalizes the receiver into the canonical frame (conformist,
threshold below the prior), reads the equilibrium off the pivotal structure,
and maps the support back to the original labels:

* everything collapses to no information when some intermediary prefers the
  receiver's default action outright, or when the best-aligned conformist
  sits in front of the last blocker;
* all-conformist chains reveal everything;
* otherwise the chain splits exactly at the best-aligned conformist's
  threshold.

Expected utilities use the two-branch posterior-weighting formula (split
outcomes below the receiver's threshold versus the constant-action plateau),
which the brute-force engine re-derives independently from raw definitions.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .core import (
    BinaryOutcome,
    BinaryPrior,
    ChainError,
    PriorMismatch,
    make_outcome,
)
from .agents import (
    RECEIVER,
    AgentClass,
    HierarchySpec,
    Kind,
    PivotalReport,
    Relabeling,
    TableUtility,
    ValidationError,
    _argmin_threshold,
    _binary_sets,
    canonicalize_receiver,
    pivotal_binary,
    receiver_class,
    sender_classes,
)


class EquilibriumKind(Enum):
    NO_INFO = "no-info"
    FULL_INFO = "full-info"
    PARTIAL = "partial"


class NoInfoCause(Enum):
    """Why a chain transmits nothing.

    OPPOSED: an intermediary always prefers the receiver's default action
    (a contrarian past the receiver's threshold, or an extremist for the
    biased action) — no insertion of extra players can fix this.
    BLOCKER_ABOVE_PIVOT: a contrarian blocker tolerates splits only above the
    best conformist's threshold, emptying the intersection — also unfixable.
    ORDERING: every blocker sits behind the best-aligned conformist, who
    therefore coarsens first; fixable by inserting a later conformist, and the
    one case where everyone would rather have some information flow.
    """

    OPPOSED = "opposed"
    BLOCKER_ABOVE_PIVOT = "blocker-above-pivot"
    ORDERING = "ordering"


@dataclass(eq=False)
class EquilibriumReport:
    """Solved equilibrium, reported in the hierarchy's original labels.

    ``support`` and ``outcome`` are original-frame; ``witness`` (present only
    for inefficient verdicts) is the canonical-frame interval of low-cell
    posteriors that every player weakly prefers — interpret it through
    ``relabeling``.  ``values`` aligns with ``labels`` (senders then receiver).
    """

    kind: EquilibriumKind
    support: tuple[Fraction, ...]
    outcome: BinaryOutcome
    pivotal: Optional[PivotalReport]
    efficient: bool
    witness: Optional[tuple[Fraction, Fraction]]
    labels: tuple[str, ...]
    values: tuple[Fraction, ...]
    no_info_cause: Optional[NoInfoCause]
    relabeling: Relabeling
    tie_action: int

    def value_of(self, label: str) -> Fraction:
        return self.values[self.labels.index(label)]


# ---------------------------------------------------------------------------
# expected utility calculus (canonical frame)
# ---------------------------------------------------------------------------

def expected_value(
    agent: TableUtility,
    out: BinaryOutcome,
    receiver_threshold: Fraction,
    tie_action: int = 0,
) -> Fraction:
    """Expected utility of a table agent in the canonical frame, where the
    receiver plays 1 above her threshold and at the prior.

    A split with its low cell under the threshold mixes both actions;
    anything else earns the constant-action (no-information) value.
    """
    informative = (not out.degenerate) and (
        out.q0 < receiver_threshold
        or (out.q0 == receiver_threshold and tie_action == 0)
    )
    if informative:
        return out.w1 * (out.q1 * agent.u11 + (1 - out.q1) * agent.u01) + out.w0 * (
            out.q0 * agent.u10 + (1 - out.q0) * agent.u00
        )
    return out.p * agent.u11 + (1 - out.p) * agent.u01


def compare_outcomes(
    agent: TableUtility,
    out_a: BinaryOutcome,
    out_b: BinaryOutcome,
    receiver_threshold: Fraction,
    tie_action: int = 0,
) -> int:
    """Sign of the agent's preference between two outcomes: +1 if out_a is
    strictly better, -1 if strictly worse, 0 on an exact tie (so callers can
    apply informativeness tie-breaking)."""
    if out_a.p != out_b.p:
        raise PriorMismatch(f"outcomes priors differ: {out_a.p} vs {out_b.p}")
    va = expected_value(agent, out_a, receiver_threshold, tie_action)
    vb = expected_value(agent, out_b, receiver_threshold, tie_action)
    if va > vb:
        return 1
    if va < vb:
        return -1
    return 0


def prefers(
    agent: TableUtility,
    out_a: BinaryOutcome,
    out_b: BinaryOutcome,
    receiver_threshold: Fraction,
    tie_action: int = 0,
) -> bool:
    """Strict preference for out_a over out_b."""
    return compare_outcomes(agent, out_a, out_b, receiver_threshold, tie_action) == 1


# ---------------------------------------------------------------------------
# the equilibrium decision
# ---------------------------------------------------------------------------

def _decide(
    classes: list[AgentClass], mu_r: Fraction, p: Fraction
) -> tuple[EquilibriumKind, Optional[Fraction], Optional[NoInfoCause], Union[int, str]]:
    """Canonical-frame equilibrium of a chain with the given sender classes:
    (kind, low-cell threshold for partial splits, no-info cause, pivot seat)."""
    a, b, c, d, e0, e1 = _binary_sets(classes, mu_r, p)
    if a:
        a_pos, a_thr = _argmin_threshold(a)
    else:
        a_pos, a_thr = RECEIVER, mu_r
    if c or e1:
        return EquilibriumKind.NO_INFO, None, NoInfoCause.OPPOSED, a_pos
    if any(thr > a_thr for _, thr in d):
        return EquilibriumKind.NO_INFO, None, NoInfoCause.BLOCKER_ABOVE_PIVOT, a_pos
    blockers = [pos for pos, _ in d] + e0
    if not blockers:
        return EquilibriumKind.FULL_INFO, None, None, a_pos
    e_star = max(blockers)
    numeric_pos = len(classes) + 1 if a_pos == RECEIVER else a_pos
    if numeric_pos > e_star:
        return EquilibriumKind.PARTIAL, a_thr, None, a_pos
    return EquilibriumKind.NO_INFO, None, NoInfoCause.ORDERING, a_pos


def _tie_action(canon: HierarchySpec, mu_r: Fraction) -> int:
    g = canon.senders[-1].utility.gain_of_action1(mu_r)
    return 1 if g > 0 else 0


def _labels(h: HierarchySpec) -> tuple[str, ...]:
    return tuple(
        (s.label or f"sender{i}") for i, s in enumerate(h.senders, start=1)
    ) + (h.receiver.label or RECEIVER,)


def solve_binary(h: HierarchySpec) -> EquilibriumReport:
    """Closed-form equilibrium of a binary-state chain.

    An extremist receiver never reacts, every outcome ties for every sender,
    and informativeness tie-breaking selects full revelation.
    """
    if not h.is_binary:
        raise ValidationError("solve_binary needs a binary-state hierarchy")
    labels = _labels(h)
    r_cls = receiver_class(h)
    if r_cls.kind.is_extremist:
        outcome = make_outcome(0, 1, h.prior)
        action = 1 if r_cls.kind is Kind.ONE_EXTREMIST else 0
        values = tuple(
            h.prior.p * spec.utility.value(1, action)
            + (1 - h.prior.p) * spec.utility.value(0, action)
            for spec in (*h.senders, h.receiver)
        )
        return EquilibriumReport(
            kind=EquilibriumKind.FULL_INFO,
            support=(Fraction(0), Fraction(1)),
            outcome=outcome,
            pivotal=None,
            efficient=True,
            witness=None,
            labels=labels,
            values=values,
            no_info_cause=None,
            relabeling=Relabeling(),
            tie_action=action,
        )

    canon, rel = canonicalize_receiver(h)
    p = canon.prior.p
    mu_r = receiver_class(canon).threshold
    classes = sender_classes(canon)
    tie = _tie_action(canon, mu_r)
    kind, a_thr, cause, a_pos = _decide(classes, mu_r, p)

    if kind is EquilibriumKind.PARTIAL and a_pos == RECEIVER and tie == 1:
        # the receiver would answer the split at her own threshold with the
        # constant action; the nominal split carries nothing
        kind, a_thr, cause = EquilibriumKind.NO_INFO, None, NoInfoCause.ORDERING

    if kind is EquilibriumKind.FULL_INFO:
        canon_outcome = make_outcome(0, 1, canon.prior)
    elif kind is EquilibriumKind.PARTIAL:
        canon_outcome = make_outcome(a_thr, 1, canon.prior)
    else:
        canon_outcome = make_outcome(p, p, canon.prior)

    values = tuple(
        expected_value(spec.utility, canon_outcome, mu_r, tie)
        for spec in (*canon.senders, canon.receiver)
    )

    support = rel.support_back(canon_outcome.support())
    outcome = make_outcome(support[0], support[-1], h.prior)
    pivotal = pivotal_binary(h)
    efficient = cause is not NoInfoCause.ORDERING
    witness = None
    if not efficient:
        d_thr = pivotal.d_star_threshold
        witness = (d_thr, pivotal.a_star_threshold)
    return EquilibriumReport(
        kind=kind,
        support=support,
        outcome=outcome,
        pivotal=pivotal,
        efficient=efficient,
        witness=witness,
        labels=labels,
        values=values,
        no_info_cause=cause,
        relabeling=rel,
        tie_action=tie,
    )


@dataclass(frozen=True)
class EfficiencyVerdict:
    efficient: bool
    witness: Optional[tuple[Fraction, Fraction]] = None


def classify_efficiency(h: HierarchySpec, report: EquilibriumReport) -> EfficiencyVerdict:
    """Whether any feasible outcome would make every player (receiver
    included) weakly better off, some strictly.

    Only the ordering collapse is dominated: all low cells in the canonical
    interval [best blocker threshold, best conformist threshold] paired with
    full revelation above beat no information for everyone.
    """
    if report.no_info_cause is NoInfoCause.ORDERING:
        return EfficiencyVerdict(efficient=False, witness=report.witness)
    return EfficiencyVerdict(efficient=True)
