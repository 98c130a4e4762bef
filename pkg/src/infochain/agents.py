"""Agent utilities, the conformist/contrarian/extremist taxonomy, and the
pivotal-agent structure of a sender chain.

Solvers work in a canonical frame where the receiver is a conformist biased
toward action 1 (threshold below the prior).  `canonicalize_receiver` maps any
non-extremist receiver into that frame by relabeling actions and/or states;
the returned descriptor maps computed supports back.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .core import (
    HALF,
    BinaryPrior,
    ChainError,
    NumberLike,
    OrderViolation,
    UniformPrior,
    as_ratio,
)

RECEIVER = "receiver"


class DegenerateAgent(ChainError):
    """Action preference never switches and no threshold exists."""


class ThresholdCollision(ChainError):
    """A threshold coincides with {0, prior, 1} or with another agent's."""


class ExtremistReceiver(ChainError):
    """The receiver ignores information entirely; nothing to canonicalize."""


class NoConformist(ChainError):
    """The general game's pivotal conformist P does not exist."""


class ValidationError(ChainError):
    """A hierarchy violates an ingestion assumption."""


class Kind(Enum):
    CONFORMIST = "conformist"
    CONTRARIAN = "contrarian"
    ZERO_EXTREMIST = "zero-extremist"
    ONE_EXTREMIST = "one-extremist"

    @property
    def is_extremist(self) -> bool:
        return self in (Kind.ZERO_EXTREMIST, Kind.ONE_EXTREMIST)


# ---------------------------------------------------------------------------
# utility models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableUtility:
    """Payoffs u(state, action) of the two-state two-action game."""

    u00: Fraction
    u10: Fraction
    u01: Fraction
    u11: Fraction

    def __post_init__(self) -> None:
        for name in ("u00", "u10", "u01", "u11"):
            object.__setattr__(self, name, as_ratio(getattr(self, name)))

    def value(self, state: int, action: int) -> Fraction:
        return getattr(self, f"u{state}{action}")

    def gain_of_action1(self, q: Fraction) -> Fraction:
        """Expected gain from playing 1 instead of 0 at posterior q."""
        return q * (self.u11 - self.u10) + (1 - q) * (self.u01 - self.u00)


@dataclass(frozen=True)
class LinearUtility:
    """Linear action-1 premium over [0,1]: gain(w) = alpha*w + beta, with the
    action-0 payoff normalized to zero."""

    alpha: Fraction
    beta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", as_ratio(self.alpha))
        object.__setattr__(self, "beta", as_ratio(self.beta))
        if self.alpha == 0:
            raise DegenerateAgent("linear agent needs a sloped action premium")

    @property
    def crossing(self) -> Fraction:
        """The state at which the agent flips action preference."""
        return -self.beta / self.alpha

    def gain_of_action1(self, w: Fraction) -> Fraction:
        return self.alpha * w + self.beta


Utility = Union[TableUtility, LinearUtility]


def table_utility(u00: NumberLike, u10: NumberLike, u01: NumberLike, u11: NumberLike) -> TableUtility:
    return TableUtility(as_ratio(u00), as_ratio(u10), as_ratio(u01), as_ratio(u11))


def linear_utility(alpha: NumberLike, beta: NumberLike) -> LinearUtility:
    return LinearUtility(as_ratio(alpha), as_ratio(beta))


def quadratic_loss_table(bias: NumberLike) -> TableUtility:
    """State-matching loss -(a-w)^2 - bias*a; threshold (1+bias)/2."""
    b = as_ratio(bias)
    return TableUtility(Fraction(0), Fraction(-1), -1 - b, -b)


def conformist_table(threshold: NumberLike) -> TableUtility:
    """A conformist with the given interior threshold (quadratic-loss family)."""
    t = as_ratio(threshold)
    if not 0 < t < 1:
        raise ThresholdCollision(f"conformist threshold must be interior, got {t}")
    return quadratic_loss_table(2 * t - 1)


def contrarian_table(threshold: NumberLike) -> TableUtility:
    """A contrarian (mismatch-rewarded) agent with the given threshold."""
    t = as_ratio(threshold)
    if not 0 < t < 1:
        raise ThresholdCollision(f"contrarian threshold must be interior, got {t}")
    return TableUtility(Fraction(0), 1 - t, t, Fraction(0))


def zero_extremist_table() -> TableUtility:
    return TableUtility(Fraction(2), Fraction(1), Fraction(0), Fraction(0))


def one_extremist_table() -> TableUtility:
    return TableUtility(Fraction(0), Fraction(0), Fraction(2), Fraction(1))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AgentClass:
    """Where an agent sits in the taxonomy.

    ``threshold`` is the indifference belief (binary game) or indifference
    mean (general game) and is None for extremists.  ``bias_toward`` is the
    preferred action at the prior; ``bias_magnitude`` orders same-direction
    agents by |prior - threshold| and is invariant under relabeling.
    """

    kind: Kind
    threshold: Optional[Fraction] = None
    bias_toward: Optional[int] = None
    bias_magnitude: Optional[Fraction] = None


def indifference_belief(u: TableUtility) -> Fraction:
    """Belief at which the agent is indifferent between actions; may fall
    outside [0,1], which flags an extremist."""
    d0 = u.u00 - u.u01
    d1 = u.u11 - u.u10
    if d0 + d1 == 0:
        raise DegenerateAgent("action preference never switches (d0 + d1 = 0)")
    return d0 / (d0 + d1)


def _biased(threshold: Fraction, prior: Fraction, conformist: bool) -> tuple[int, Fraction]:
    # A conformist prefers 1 above the threshold, a contrarian below it.
    if conformist:
        toward = 1 if prior > threshold else 0
    else:
        toward = 0 if prior > threshold else 1
    return toward, abs(prior - threshold)


def classify_binary(u: TableUtility, prior: BinaryPrior) -> AgentClass:
    """Taxonomy slot of a table agent under a binary prior.

    Non-extremists must have a threshold strictly inside (0,1) and away from
    the prior; collisions are ingestion errors, not silently perturbed.
    """
    p = prior.p
    d1 = u.u11 - u.u10
    mu = indifference_belief(u)
    if mu <= 0 or mu >= 1:
        if mu in (Fraction(0), Fraction(1)):
            raise ThresholdCollision(f"threshold sits on the boundary: {mu}")
        kind = Kind.ONE_EXTREMIST if d1 > 0 else Kind.ZERO_EXTREMIST
        return AgentClass(kind=kind)
    if mu == p:
        raise ThresholdCollision(f"threshold collides with prior {p}")
    conformist = d1 > 0
    kind = Kind.CONFORMIST if conformist else Kind.CONTRARIAN
    toward, magnitude = _biased(mu, p, conformist)
    return AgentClass(kind=kind, threshold=mu, bias_toward=toward, bias_magnitude=magnitude)


def classify_linear(u: LinearUtility, prior: UniformPrior | None = None) -> AgentClass:
    """Taxonomy slot of a linear agent under the uniform prior."""
    w = u.crossing
    if w in (Fraction(0), HALF, Fraction(1)):
        raise ThresholdCollision(f"indifference mean collides with {{0, 1/2, 1}}: {w}")
    if w < 0 or w > 1:
        # the action premium keeps one sign on all of [0,1]
        sign = u.gain_of_action1(HALF)
        kind = Kind.ONE_EXTREMIST if sign > 0 else Kind.ZERO_EXTREMIST
        return AgentClass(kind=kind)
    conformist = u.alpha > 0
    kind = Kind.CONFORMIST if conformist else Kind.CONTRARIAN
    toward, magnitude = _biased(w, HALF, conformist)
    return AgentClass(kind=kind, threshold=w, bias_toward=toward, bias_magnitude=magnitude)


def reclassify_under_support(agent: AgentClass, m0: NumberLike, m1: NumberLike) -> AgentClass:
    """Re-slot a linear agent inside the subgame spanned by means (m0, m1).

    The subgame threshold is (w - m0)/(m1 - m0); an agent whose crossing falls
    strictly outside [m0, m1] keeps one preferred action throughout and turns
    into the matching extremist.  Crossings exactly on the edge keep a
    degenerate threshold of 0 or 1 rather than being forced extremist.
    """
    m0, m1 = as_ratio(m0), as_ratio(m1)
    if m0 >= m1:
        raise OrderViolation(f"need m0 < m1, got ({m0}, {m1})")
    if agent.kind.is_extremist:
        return agent
    w = agent.threshold
    conformist = agent.kind is Kind.CONFORMIST
    if w < m0:
        # prefers 1 everywhere on [m0, m1] if conformist, 0 if contrarian
        return AgentClass(kind=Kind.ONE_EXTREMIST if conformist else Kind.ZERO_EXTREMIST)
    if w > m1:
        return AgentClass(kind=Kind.ZERO_EXTREMIST if conformist else Kind.ONE_EXTREMIST)
    mu = (w - m0) / (m1 - m0)
    sub_prior = (HALF - m0) / (m1 - m0)
    if 0 < sub_prior < 1 and mu != sub_prior:
        toward, magnitude = _biased(mu, sub_prior, conformist)
    else:
        toward, magnitude = None, None
    return AgentClass(kind=agent.kind, threshold=mu, bias_toward=toward,
                      bias_magnitude=magnitude)


# ---------------------------------------------------------------------------
# hierarchies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AgentSpec:
    utility: Utility
    label: str = ""


@dataclass(frozen=True)
class HierarchySpec:
    """A sender chain.  senders[0] is player 1, the agent farthest from the
    receiver; the receiver sits after senders[-1]."""

    senders: tuple[AgentSpec, ...]
    receiver: AgentSpec
    prior: Union[BinaryPrior, UniformPrior]

    @property
    def n(self) -> int:
        return len(self.senders)

    @property
    def is_binary(self) -> bool:
        return isinstance(self.prior, BinaryPrior)


def classify_spec(spec: AgentSpec, prior: Union[BinaryPrior, UniformPrior]) -> AgentClass:
    if isinstance(spec.utility, TableUtility):
        if not isinstance(prior, BinaryPrior):
            raise ValidationError("table utilities need a binary prior")
        return classify_binary(spec.utility, prior)
    if not isinstance(prior, UniformPrior):
        raise ValidationError("linear utilities need the uniform prior")
    return classify_linear(spec.utility, prior)


def hierarchy(
    senders,
    receiver,
    prior: Union[BinaryPrior, UniformPrior],
    *,
    strict: bool = True,
) -> HierarchySpec:
    """Validated constructor.  Wraps bare utilities into AgentSpecs, classifies
    everyone (surfacing DegenerateAgent / ThresholdCollision), and in strict
    mode enforces pairwise-distinct thresholds across senders and receiver.
    Relaxed mode (strict=False) is for machine-built chains such as appended
    advisors, where a duplicate threshold is resolved by position.
    """

    def wrap(x) -> AgentSpec:
        if isinstance(x, AgentSpec):
            return x
        if isinstance(x, (TableUtility, LinearUtility)):
            return AgentSpec(utility=x)
        raise ValidationError(f"not an agent: {x!r}")

    sender_specs = tuple(wrap(s) for s in senders)
    if not sender_specs:
        raise ValidationError("a chain needs at least one sender")
    receiver_spec = wrap(receiver)
    h = HierarchySpec(senders=sender_specs, receiver=receiver_spec, prior=prior)
    classes = [classify_spec(s, prior) for s in sender_specs]
    classes.append(classify_spec(receiver_spec, prior))
    if strict:
        seen: dict[Fraction, int] = {}
        for idx, cls in enumerate(classes):
            if cls.threshold is None:
                continue
            if cls.threshold in seen:
                raise ValidationError(
                    "thresholds must be pairwise distinct: "
                    f"agents {seen[cls.threshold]} and {idx} share {cls.threshold}"
                )
            seen[cls.threshold] = idx
    return h


def sender_classes(h: HierarchySpec) -> list[AgentClass]:
    return [classify_spec(s, h.prior) for s in h.senders]


def receiver_class(h: HierarchySpec) -> AgentClass:
    return classify_spec(h.receiver, h.prior)


# ---------------------------------------------------------------------------
# canonical frame
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Relabeling:
    """Action/state renaming that turned a hierarchy canonical.

    Supports of equilibria computed in the canonical frame map back through
    `support_back`; an action flip leaves posteriors untouched, a state flip
    reflects them through 1/2 and swaps the pair order.
    """

    flip_action: bool = False
    flip_state: bool = False

    @property
    def identity(self) -> bool:
        return not (self.flip_action or self.flip_state)

    def point_back(self, q: Fraction) -> Fraction:
        return 1 - q if self.flip_state else q

    def support_back(self, pair: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
        if not self.flip_state:
            return pair
        return tuple(sorted(1 - q for q in pair))

    def action_back(self, action: int) -> int:
        return 1 - action if self.flip_action else action


def _flip_table_action(u: TableUtility) -> TableUtility:
    return TableUtility(u.u01, u.u11, u.u00, u.u10)


def _flip_table_state(u: TableUtility) -> TableUtility:
    return TableUtility(u.u10, u.u00, u.u11, u.u01)


def _flip_linear_action(u: LinearUtility) -> LinearUtility:
    # negating the premium and restoring the zero action-0 baseline shifts
    # every outcome's value by a constant, so preferences are untouched
    return LinearUtility(-u.alpha, -u.beta)


def _flip_linear_state(u: LinearUtility) -> LinearUtility:
    return LinearUtility(-u.alpha, u.alpha + u.beta)


def relabel_utility(u: Utility, flip_action: bool, flip_state: bool) -> Utility:
    if isinstance(u, TableUtility):
        if flip_action:
            u = _flip_table_action(u)
        if flip_state:
            u = _flip_table_state(u)
        return u
    if flip_action:
        u = _flip_linear_action(u)
    if flip_state:
        u = _flip_linear_state(u)
    return u


def relabel_hierarchy(h: HierarchySpec, rel: Relabeling) -> HierarchySpec:
    if rel.identity:
        return h
    prior = h.prior
    if isinstance(prior, BinaryPrior) and rel.flip_state:
        prior = BinaryPrior(1 - prior.p)

    def go(spec: AgentSpec) -> AgentSpec:
        return replace(spec, utility=relabel_utility(spec.utility, rel.flip_action, rel.flip_state))

    return HierarchySpec(
        senders=tuple(go(s) for s in h.senders),
        receiver=go(h.receiver),
        prior=prior,
    )


def canonicalize_receiver(h: HierarchySpec) -> tuple[HierarchySpec, Relabeling]:
    """Relabel actions/states so the receiver is a conformist biased toward
    action 1 (threshold strictly below the prior)."""
    cls = receiver_class(h)
    if cls.kind.is_extremist:
        raise ExtremistReceiver("the receiver never responds to information")
    prior_point = h.prior.p if isinstance(h.prior, BinaryPrior) else HALF
    below = cls.threshold < prior_point
    if cls.kind is Kind.CONFORMIST:
        rel = Relabeling() if below else Relabeling(flip_action=True, flip_state=True)
    else:
        rel = Relabeling(flip_action=True) if below else Relabeling(flip_state=True)
    return relabel_hierarchy(h, rel), rel


# ---------------------------------------------------------------------------
# pivotal structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PivotalReport:
    """The handful of agents whose thresholds decide the equilibrium.

    Binary-game fields: a_star (1-based sender index, or RECEIVER when no
    sender out-bids the receiver), its threshold, e_star (last non-conformist
    blocking the pipe, None if all senders conform), d_star_threshold, and
    a_star_e (best conformist strictly after e_star, or RECEIVER).

    General-game fields (None in the binary case): p_pivot / p_threshold for
    the most 1-biased conformist including player 1, b_star_threshold and
    b_star_p_threshold for the most 0-biased conformists among intermediaries
    (the latter restricted to seats after P), d_dstar_threshold, and
    d_star_general which folds in a contrarian player 1.
    """

    a_star: Union[int, str]
    a_star_threshold: Fraction
    e_star: Optional[int]
    d_star_threshold: Fraction
    a_star_e: Union[int, str]
    p_pivot: Optional[int] = None
    p_threshold: Optional[Fraction] = None
    b_star_threshold: Optional[Fraction] = None
    b_star_p_threshold: Optional[Fraction] = None
    d_dstar_threshold: Optional[Fraction] = None
    d_star_general: Optional[Fraction] = None


def _binary_sets(classes: list[AgentClass], mu_r: Fraction, p: Fraction):
    """Slot canonical-frame sender classes into the pivotal sets."""
    a, b, c, d, e0, e1 = [], [], [], [], [], []
    for pos, cls in enumerate(classes, start=1):
        if cls.kind is Kind.ZERO_EXTREMIST:
            e0.append(pos)
        elif cls.kind is Kind.ONE_EXTREMIST:
            e1.append(pos)
        elif cls.kind is Kind.CONFORMIST:
            if cls.threshold < mu_r:
                a.append((pos, cls.threshold))
            elif cls.threshold > p:
                b.append((pos, cls.threshold))
            # conformists between the receiver's threshold and the prior are
            # never pivotal
        else:
            if cls.threshold < mu_r:
                d.append((pos, cls.threshold))
            else:
                c.append(pos)
    return a, b, c, d, e0, e1


def _argmin_threshold(entries: list[tuple[int, Fraction]]) -> tuple[int, Fraction]:
    # ties resolved toward the receiver (later position), per the convention
    # that among equally-biased agents the one closest to the receiver is
    # pivotal
    best = entries[0]
    for entry in entries[1:]:
        if entry[1] < best[1] or (entry[1] == best[1] and entry[0] > best[0]):
            best = entry
    return best


def pivotal_binary(h: HierarchySpec) -> PivotalReport:
    """Pivotal agents of a binary-state chain, reported in the canonical frame.

    Apply the hierarchy's relabeling (`canonicalize_receiver`) first if you
    need to interpret thresholds in the original labels.
    """
    canon, _ = canonicalize_receiver(h)
    p = canon.prior.p if isinstance(canon.prior, BinaryPrior) else HALF
    mu_r = receiver_class(canon).threshold
    classes = sender_classes(canon)
    a, b, c, d, e0, e1 = _binary_sets(classes, mu_r, p)

    if a:
        a_star, a_thr = _argmin_threshold(a)
    else:
        a_star, a_thr = RECEIVER, mu_r
    blockers = sorted(pos for pos, _ in d) + sorted(e0)
    e_star = max(blockers) if blockers else None
    d_below = [thr for _, thr in d if thr < a_thr]
    d_thr = max(d_below) if d_below else Fraction(0)
    if e_star is None:
        a_star_e: Union[int, str] = a_star
    else:
        tail = [(pos, thr) for pos, thr in a if pos > e_star]
        a_star_e = _argmin_threshold(tail)[0] if tail else RECEIVER
    return PivotalReport(
        a_star=a_star,
        a_star_threshold=a_thr,
        e_star=e_star,
        d_star_threshold=d_thr,
        a_star_e=a_star_e,
    )


def pivotal_general(h: HierarchySpec) -> PivotalReport:
    """Pivotal agents of the uniform-prior linear chain (canonical frame).

    P ranges over every player 1..n; B*, B*_P, D** range over intermediaries
    2..n only.  Raises NoConformist when no player has an interior crossing
    with a positive slope.
    """
    canon, _ = canonicalize_receiver(h)
    classes = sender_classes(canon)
    w_r = receiver_class(canon).threshold

    p_candidates = [
        (pos, cls.threshold)
        for pos, cls in enumerate(classes, start=1)
        if cls.kind is Kind.CONFORMIST
    ]
    if not p_candidates:
        raise NoConformist("no player wants to match the state on any interior mean")
    p_pivot, w_p = _argmin_threshold(p_candidates)

    b = [
        (pos, cls.threshold)
        for pos, cls in enumerate(classes, start=1)
        if pos >= 2 and cls.kind is Kind.CONFORMIST and cls.threshold > HALF
    ]
    w_bstar = max((thr for _, thr in b), default=HALF)
    w_bstar_p = max((thr for pos, thr in b if pos > p_pivot), default=HALF)

    d = [
        (pos, cls.threshold)
        for pos, cls in enumerate(classes, start=1)
        if pos >= 2 and cls.kind is Kind.CONTRARIAN and cls.threshold < w_r
    ]
    w_ddstar = max((thr for _, thr in d if thr < w_p), default=Fraction(0))
    first = classes[0]
    if first.kind is Kind.CONTRARIAN and 0 < first.threshold < w_p:
        w_dstar = max(w_ddstar, first.threshold)
    else:
        w_dstar = w_ddstar

    # reuse the binary scaffolding for A*/E* of the reduced/corresponding view
    base = pivotal_binary(h)
    return replace(
        base,
        p_pivot=p_pivot,
        p_threshold=w_p,
        b_star_threshold=w_bstar,
        b_star_p_threshold=w_bstar_p,
        d_dstar_threshold=w_ddstar,
        d_star_general=w_dstar,
    )
