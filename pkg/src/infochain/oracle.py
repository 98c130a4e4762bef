"""Brute-force verification engine.

Everything here works from raw utilities and exhaustive enumeration — no
pivotal-agent shortcuts — so closed-form solvers can be checked against an
independent route:

* a discretized outcome grid and the chain of incentive-compatibility level
  sets (which outcomes each intermediary would pass along, given what later
  intermediaries will pass),
* grid subgame-perfect equilibrium for the binary game,
* exhaustive mean-pair search for the uniform-state game,
* a pass-through (simple-equilibrium) deviation scan, and
* seeded Monte-Carlo signal propagation.

Values are exact rationals end to end; only Monte Carlo uses floats.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .core import (
    HALF,
    BinaryOutcome,
    BinaryPrior,
    ChainError,
    Experiment,
    UniformPrior,
    as_ratio,
    compose,
    experiment_of_outcome,
    identity_experiment,
    make_outcome,
    mpc_feasible_uniform,
    outcome_of_experiment,
)
from .agents import (
    AgentClass,
    HierarchySpec,
    Kind,
    LinearUtility,
    TableUtility,
    classify_linear,
    reclassify_under_support,
)

log = logging.getLogger(__name__)


class ResolutionTooCoarse(ChainError):
    """Grid step too large for the requested computation."""


class SeedRequired(ChainError):
    """Monte Carlo runs must be reproducible; pass an explicit seed."""


class EmptyLevelSet(ChainError):
    """A level set came out empty; cannot happen (the no-information outcome
    is always passable) unless the chain construction itself is broken."""


# ---------------------------------------------------------------------------
# outcome grid
# ---------------------------------------------------------------------------

def grid_pairs(p: Fraction, resolution: int) -> list[tuple[Fraction, Fraction]]:
    """All coordinate pairs (q0, q1) with q0 <= p <= q1 on the 1/G lattice,
    with p itself inserted as a coordinate when it is off-lattice."""
    p = as_ratio(p)
    step = Fraction(1, resolution)
    q0s = [k * step for k in range(resolution + 1) if k * step <= p]
    if q0s[-1] != p:
        q0s.append(p)
    q1s = [k * step for k in range(resolution + 1) if k * step >= p]
    if q1s[0] != p:
        q1s.insert(0, p)
    return [(a, b) for a in q0s for b in q1s]


@dataclass(eq=False)
class OutcomeGrid:
    """Discretized Bayes-plausible outcome set.

    ``points`` is the raw enumeration (pairs touching the prior canonicalize
    to the degenerate outcome but keep their slot); ``outcomes`` is the
    deduplicated canonical set the chain computations run on.
    """

    resolution: int
    prior: BinaryPrior
    q0s: tuple[Fraction, ...]
    q1s: tuple[Fraction, ...]
    points: tuple[BinaryOutcome, ...]
    outcomes: tuple[BinaryOutcome, ...]

    @cached_property
    def cell_table(self) -> tuple[tuple[BinaryOutcome, ...], ...]:
        return tuple(
            tuple(make_outcome(a, b, self.prior) for b in self.q1s)
            for a in self.q0s
        )

    def outcome_at(self, i: int, j: int) -> BinaryOutcome:
        return self.cell_table[i][j]


def build_grid(prior: BinaryPrior, resolution: int) -> OutcomeGrid:
    if resolution < 10:
        raise ResolutionTooCoarse(f"need at least 10 grid steps, got {resolution}")
    pairs = grid_pairs(prior.p, resolution)
    q0s = tuple(sorted({a for a, _ in pairs}))
    q1s = tuple(sorted({b for _, b in pairs}))
    points = tuple(make_outcome(a, b, prior) for a, b in pairs)
    unique = sorted(set(points), key=lambda o: (o.q0, o.q1))
    return OutcomeGrid(
        resolution=resolution,
        prior=prior,
        q0s=q0s,
        q1s=q1s,
        points=points,
        outcomes=tuple(unique),
    )


# ---------------------------------------------------------------------------
# receiver behavior and raw outcome values
# ---------------------------------------------------------------------------

def tie_rule(h: HierarchySpec) -> Callable[[Fraction], int]:
    """Action the receiver takes when exactly indifferent: the last sender's
    preferred action there (falling back to 0 if that sender is indifferent
    too, which is the information-preserving direction in the canonical
    frame)."""
    last = h.senders[-1].utility

    def tie(q: Fraction) -> int:
        g = last.gain_of_action1(q)
        return 1 if g > 0 else 0

    return tie


def action_rule(h: HierarchySpec) -> Callable[[Fraction], int]:
    """Receiver's action as a function of the posterior (binary game) or the
    posterior mean (uniform game), ties resolved by `tie_rule`."""
    ru = h.receiver.utility
    tie = tie_rule(h)

    def act(q: Fraction) -> int:
        g = ru.gain_of_action1(q)
        if g > 0:
            return 1
        if g < 0:
            return 0
        return tie(q)

    return act


def outcome_cells(out: BinaryOutcome) -> list[tuple[Fraction, Fraction]]:
    if out.degenerate:
        return [(out.p, Fraction(1))]
    return [(out.q0, out.w0), (out.q1, out.w1)]


def outcome_value(u: TableUtility, out: BinaryOutcome, act: Callable[[Fraction], int]) -> Fraction:
    """Expected utility of a table agent given an outcome, straight from the
    definition (no rearrangement): weight each posterior cell by the payoff of
    the receiver's action there."""
    total = Fraction(0)
    for q, w in outcome_cells(out):
        a = act(q)
        total += w * (q * u.value(1, a) + (1 - q) * u.value(0, a))
    return total


def _value_fn(
    u: TableUtility, act: Callable[[Fraction], int], grid: OutcomeGrid
) -> Callable[[BinaryOutcome], Fraction]:
    """Same expected value as `outcome_value`, with the per-posterior payoff
    memoized across the grid (the inner term only depends on the posterior,
    and a grid has ~2R distinct posteriors against R^2/4 cells)."""
    point: dict[Fraction, Fraction] = {}
    for q in {*grid.q0s, *grid.q1s, grid.prior.p}:
        a = act(q)
        point[q] = q * u.value(1, a) + (1 - q) * u.value(0, a)

    def value(out: BinaryOutcome) -> Fraction:
        if out.degenerate:
            return point[out.p]
        return out.w0 * point[out.q0] + out.w1 * point[out.q1]

    return value


# ---------------------------------------------------------------------------
# incentive-compatibility chain
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class IcChain:
    """Level sets of outcomes each intermediary passes along.

    ``levels[i]`` holds the outcomes sender i would deliver unchanged given
    that senders i+1..n behave likewise (computed back from the receiver);
    level sets shrink toward the front of the chain.  ``garble_proof`` is the
    stricter set no intermediary would garble *regardless* of what later
    players tolerate — a strict subset in general, which is exactly why the
    recursion matters.
    """

    grid: OutcomeGrid
    levels: dict[int, tuple[BinaryOutcome, ...]]
    garble_proof: tuple[BinaryOutcome, ...]
    values: dict[int, dict[BinaryOutcome, Fraction]]


def _prefix_max(
    grid: OutcomeGrid,
    candidate: Callable[[int, int], Optional[Fraction]],
) -> list[list[Optional[Fraction]]]:
    """M[i][j] = best candidate value over the contraction cone of cell (i,j):
    cells with weakly higher q0 index and weakly lower q1 index."""
    ni, nj = len(grid.q0s), len(grid.q1s)
    m: list[list[Optional[Fraction]]] = [[None] * nj for _ in range(ni)]
    for i in range(ni - 1, -1, -1):
        for j in range(nj):
            best = candidate(i, j)
            if i + 1 < ni:
                down = m[i + 1][j]
                if down is not None and (best is None or down > best):
                    best = down
            if j - 1 >= 0:
                left = m[i][j - 1]
                if left is not None and (best is None or left > best):
                    best = left
            m[i][j] = best
    return m


def ic_chain(h: HierarchySpec, grid: OutcomeGrid) -> IcChain:
    """Build the level-set chain for a binary-state hierarchy on the grid."""
    act = action_rule(h)
    n = h.n
    outcomes = grid.outcomes
    cell_value: dict[int, dict[BinaryOutcome, Fraction]] = {}
    for idx in range(1, n + 1):
        value = _value_fn(h.senders[idx - 1].utility, act, grid)
        cell_value[idx] = {o: value(o) for o in outcomes}

    ni, nj = len(grid.q0s), len(grid.q1s)
    at = grid.outcome_at

    levels: dict[int, tuple[BinaryOutcome, ...]] = {}
    ceilings: dict[int, dict[BinaryOutcome, Fraction]] = {}
    member: dict[BinaryOutcome, bool] = {o: True for o in outcomes}

    for idx in range(n, 1, -1):
        vals = cell_value[idx]
        table = [
            [vals[o] if member[o] else None for o in row] for row in grid.cell_table
        ]
        m = _prefix_max(grid, lambda i, j: table[i][j])
        ceiling = {at(i, j): m[i][j] for i in range(ni) for j in range(nj)}
        new_member = {
            o: member[o] and vals[o] == ceiling[o] for o in outcomes
        }
        level = tuple(o for o in outcomes if new_member[o])
        if not level:
            raise EmptyLevelSet(f"level {idx} is empty")
        levels[idx] = level
        ceilings[idx] = ceiling
        member = new_member

    # garble-proof set: no intermediary strictly prefers any contraction,
    # credible or not, over the outcome itself
    proof_member = {o: True for o in outcomes}
    for idx in range(2, n + 1):
        vals = cell_value[idx]
        table = [[vals[o] for o in row] for row in grid.cell_table]
        m = _prefix_max(grid, lambda i, j: table[i][j])
        for i in range(ni):
            for j in range(nj):
                if table[i][j] != m[i][j]:
                    proof_member[at(i, j)] = False
    garble_proof = tuple(o for o in outcomes if proof_member[o])

    return IcChain(grid=grid, levels=levels, garble_proof=garble_proof, values=ceilings)


def solve_spe_grid(
    h: HierarchySpec,
    grid: OutcomeGrid,
    chain: Optional[IcChain] = None,
) -> list[BinaryOutcome]:
    """Equilibrium outcomes of the grid game: player 1's best pick among what
    the rest of the chain will pass, keeping only the Blackwell-maximal
    elements of the argmax (less informative payoff-ties are discarded)."""
    if chain is None:
        chain = ic_chain(h, grid)
    candidates = chain.levels.get(2, grid.outcomes)
    if not candidates:
        raise EmptyLevelSet("no passable outcome for player 1")
    act = action_rule(h)
    u1 = h.senders[0].utility
    best: Optional[Fraction] = None
    arg: list[BinaryOutcome] = []
    for o in candidates:
        v = outcome_value(u1, o, act)
        if best is None or v > best:
            best, arg = v, [o]
        elif v == best:
            arg.append(o)
    # outcomes the receiver answers with one constant action are informative
    # in name only; report them as the degenerate outcome they are worth
    degenerate = make_outcome(grid.prior.p, grid.prior.p, grid.prior)

    def canonical(o: BinaryOutcome) -> BinaryOutcome:
        if o.degenerate:
            return o
        if act(o.q0) == act(o.q1) == act(o.p):
            return degenerate
        return o

    return blackwell_maximal([canonical(o) for o in arg])


def blackwell_maximal(outcomes: Sequence[BinaryOutcome]) -> list[BinaryOutcome]:
    """Drop every outcome that is a contraction of another in the list."""
    keep = []
    for o in outcomes:
        dominated = any(
            other is not o
            and other != o
            and other.q0 <= o.q0
            and o.q1 <= other.q1
            for other in outcomes
        )
        if not dominated:
            keep.append(o)
    return sorted(set(keep), key=lambda o: (o.q0, o.q1))


# ---------------------------------------------------------------------------
# pass-through (simple-equilibrium) verification
# ---------------------------------------------------------------------------

def _maximal_set(items: list[BinaryOutcome]) -> list[BinaryOutcome]:
    return blackwell_maximal(items)


def _delivered_after(
    h: HierarchySpec,
    grid: OutcomeGrid,
    first_scanned: int,
) -> dict[BinaryOutcome, list[BinaryOutcome]]:
    """For each grid outcome, the set of outcomes actually reaching the
    receiver when senders first_scanned..n best-respond to it (ties kept,
    filtered to Blackwell-maximal; payoff evaluation of a tied set is
    optimistic)."""
    act = action_rule(h)
    ni, nj = len(grid.q0s), len(grid.q1s)
    at = grid.outcome_at
    delivered: dict[BinaryOutcome, list[BinaryOutcome]] = {
        o: [o] for o in grid.outcomes
    }
    for idx in range(h.n, first_scanned - 1, -1):
        value = _value_fn(h.senders[idx - 1].utility, act, grid)
        cand_val: dict[BinaryOutcome, Fraction] = {}
        cand_set: dict[BinaryOutcome, list[BinaryOutcome]] = {}
        for o in grid.outcomes:
            vals = [(value(d), d) for d in delivered[o]]
            vmax = max(v for v, _ in vals)
            cand_val[o] = vmax
            cand_set[o] = _maximal_set([d for v, d in vals if v == vmax])

        best_val: list[list[Optional[Fraction]]] = [[None] * nj for _ in range(ni)]
        best_set: list[list[list[BinaryOutcome]]] = [[[] for _ in range(nj)] for _ in range(ni)]
        for i in range(ni - 1, -1, -1):
            for j in range(nj):
                o = at(i, j)
                val, out_set = cand_val[o], list(cand_set[o])
                for pi, pj in ((i + 1, j), (i, j - 1)):
                    if 0 <= pi < ni and 0 <= pj < nj:
                        pv = best_val[pi][pj]
                        if pv is None:
                            continue
                        if pv > val:
                            val, out_set = pv, list(best_set[pi][pj])
                        elif pv == val:
                            out_set.extend(best_set[pi][pj])
                best_val[i][j] = val
                best_set[i][j] = _maximal_set(out_set)
        new_delivered = {}
        for i in range(ni):
            for j in range(nj):
                new_delivered[at(i, j)] = best_set[i][j]
        delivered = new_delivered
    return delivered


def _verify_binary_pass_through(
    h: HierarchySpec,
    outcome: BinaryOutcome,
    grid: OutcomeGrid,
    first_scanned: int = 2,
) -> bool:
    p = grid.prior.p
    if outcome.p != p:
        return False
    # (i) the outcome is realizable as player 1's experiment followed by
    # identity pass-through
    pi = experiment_of_outcome(outcome)
    composed = pi
    for _ in range(h.n - 1):
        composed = compose(composed, identity_experiment(2))
    if outcome_of_experiment(grid.prior, composed) != outcome:
        return False
    # (ii) no scanned sender strictly gains by garbling, given that successors
    # best-respond on the grid
    if outcome not in set(grid.outcomes):
        return False
    if h.n < first_scanned:
        return True
    delivered = _delivered_after(h, grid, first_scanned)
    return outcome in delivered[outcome]


def _uniform_subgame_tables(h: HierarchySpec, m0: Fraction, m1: Fraction) -> HierarchySpec:
    """Binary-state stand-in for the subgame after player 1 induces means
    (m0, m1): state s is the cell with mean m_s, and each later agent's payoff
    is its action-1 premium at that mean (action-0 payoff normalized away)."""
    zero = Fraction(0)

    def as_table(u: LinearUtility) -> TableUtility:
        return TableUtility(zero, zero, u.gain_of_action1(m0), u.gain_of_action1(m1))

    p_sub = BinaryPrior((HALF - m0) / (m1 - m0))
    senders = tuple(
        type(s)(utility=as_table(s.utility), label=s.label) for s in h.senders[1:]
    )
    receiver = type(h.receiver)(utility=as_table(h.receiver.utility), label=h.receiver.label)
    return HierarchySpec(senders=senders, receiver=receiver, prior=p_sub)


def verify_simple_equilibrium(
    h: HierarchySpec,
    eq,
    grid: Union[OutcomeGrid, int, None] = None,
) -> bool:
    """Check that an equilibrium outcome really is a pass-through equilibrium:
    player 1 can realize it alone, and no intermediary would garble it given
    grid best responses downstream.

    ``eq`` may be a solver report (anything with .outcome or .support) or a
    raw outcome.  For uniform-state hierarchies pass a grid resolution (int);
    the scan runs in the induced subgame.
    """
    outcome = getattr(eq, "outcome", eq)
    if h.is_binary:
        if isinstance(outcome, BinaryOutcome):
            pass
        else:
            support = tuple(as_ratio(x) for x in outcome)
            lo, hi = (support[0], support[-1])
            outcome = make_outcome(lo, hi, h.prior)
        if grid is None or isinstance(grid, int):
            grid = build_grid(h.prior, grid or 100)
        return _verify_binary_pass_through(h, outcome, grid)

    # uniform-state game: outcome is a pair of means (or a degenerate mean)
    if isinstance(outcome, BinaryOutcome):
        support = outcome.support()
    else:
        raw = getattr(outcome, "support", outcome)
        if callable(raw):
            raw = raw()
        support = tuple(as_ratio(x) for x in raw)
    if len(support) == 1 or support[0] == support[-1]:
        return True  # nothing to garble
    m0, m1 = support[0], support[-1]
    if not mpc_feasible_uniform(m0, m1):
        return False
    if not (m0 < HALF < m1):
        return False
    sub = _uniform_subgame_tables(h, m0, m1)
    resolution = grid if isinstance(grid, int) else (grid.resolution if grid else 100)
    sub_grid = build_grid(sub.prior, resolution)
    sub_outcome = make_outcome(0, 1, sub.prior)
    # scan every intermediary of the original chain (all senders of the
    # stand-in), and skip the realizability composition which the cut handles
    if sub.n == 0:
        return True
    delivered = _delivered_after(sub, sub_grid, 1)
    return sub_outcome in delivered[sub_outcome]


# ---------------------------------------------------------------------------
# exhaustive search for the uniform-state game
# ---------------------------------------------------------------------------

def _flip_class_action(c: AgentClass) -> AgentClass:
    swap = {
        Kind.CONFORMIST: Kind.CONTRARIAN,
        Kind.CONTRARIAN: Kind.CONFORMIST,
        Kind.ZERO_EXTREMIST: Kind.ONE_EXTREMIST,
        Kind.ONE_EXTREMIST: Kind.ZERO_EXTREMIST,
    }
    return AgentClass(kind=swap[c.kind], threshold=c.threshold)

def _flip_class_state(c: AgentClass) -> AgentClass:
    if c.kind.is_extremist:
        return AgentClass(kind=c.kind)
    swap = {Kind.CONFORMIST: Kind.CONTRARIAN, Kind.CONTRARIAN: Kind.CONFORMIST}
    return AgentClass(kind=swap[c.kind], threshold=1 - c.threshold)


def _prop_decide(
    classes: Sequence[AgentClass], mu_r: Fraction, p: Fraction
) -> Optional[tuple[Fraction, Fraction]]:
    """Equilibrium outcome delivered by a chain of intermediaries holding the
    given (canonical-frame) classes, in posterior coordinates: None means the
    pipe collapses to no information; otherwise the delivered pair."""
    a: list[tuple[int, Fraction]] = []
    blockers: list[tuple[int, Optional[Fraction]]] = []
    for pos, c in enumerate(classes, start=1):
        if c.kind is Kind.ONE_EXTREMIST:
            return None
        if c.kind is Kind.CONTRARIAN:
            if c.threshold >= mu_r:
                return None
            blockers.append((pos, c.threshold))
        elif c.kind is Kind.ZERO_EXTREMIST:
            blockers.append((pos, None))
        elif c.threshold < mu_r:
            a.append((pos, c.threshold))
    if a:
        a_pos, a_thr = a[0]
        for pos, thr in a[1:]:
            if thr < a_thr or (thr == a_thr and pos > a_pos):
                a_pos, a_thr = pos, thr
    else:
        a_pos, a_thr = len(classes) + 1, mu_r  # the receiver herself
    for _, thr in blockers:
        if thr is not None and thr > a_thr:
            return None
    if not blockers:
        return (Fraction(0), Fraction(1))
    e_pos = max(pos for pos, _ in blockers)
    if a_pos > e_pos:
        return (a_thr, Fraction(1))
    return None


def _respond_to_means(
    h: HierarchySpec,
    m0: Fraction,
    m1: Fraction,
) -> list[tuple[Fraction, Fraction, int]]:
    """What the receiver ends up seeing and doing if player 1 induces means
    (m0, m1): a list of (cell mean, weight, receiver action).  Intermediaries
    2..n respond per their subgame classes."""
    act = action_rule(h)
    if m0 == m1:
        return [(HALF, Fraction(1), act(HALF))]
    sub_mu_r = (h.receiver.utility.crossing - m0) / (m1 - m0)
    sub_p = (HALF - m0) / (m1 - m0)
    receiver_conformist = h.receiver.utility.alpha > 0

    if not 0 < sub_mu_r < 1 or not 0 < sub_p < 1:
        # the receiver cannot split on [m0, m1]; information is moot
        return [(HALF, Fraction(1), act(HALF))]

    classes = [
        reclassify_under_support(classify_linear(s.utility), m0, m1)
        for s in h.senders[1:]
    ]
    mu_r, p = sub_mu_r, sub_p
    if not receiver_conformist:
        classes = [_flip_class_action(c) for c in classes]
    if mu_r > p:
        # a bare state reflection would leave the receiver acting downward, so
        # pair it with an action swap to restore the upward-acting convention
        classes = [_flip_class_action(_flip_class_state(c)) for c in classes]
        mu_r, p = 1 - mu_r, 1 - p
    if mu_r == p:
        return [(HALF, Fraction(1), act(HALF))]

    sub = _prop_decide(classes, mu_r, p) if classes else (Fraction(0), Fraction(1))
    if sub is None:
        return [(HALF, Fraction(1), act(HALF))]
    if mu_r != sub_mu_r:  # undo the state reflection
        sub = tuple(sorted(1 - q for q in sub))
    d0 = m0 + sub[0] * (m1 - m0)
    d1 = m0 + sub[1] * (m1 - m0)
    if d0 == d1 or not d0 < HALF < d1:
        return [(HALF, Fraction(1), act(HALF))]
    a0, a1 = act(d0), act(d1)
    if a0 == a1 and a0 == act(HALF):
        return [(HALF, Fraction(1), act(HALF))]
    w1 = (HALF - d0) / (d1 - d0)
    w0 = (d1 - HALF) / (d1 - d0)
    return [(d0, w0, a0), (d1, w1, a1)]


def _means_value(u: LinearUtility, cells: list[tuple[Fraction, Fraction, int]]) -> Fraction:
    return sum((w * u.gain_of_action1(m) for m, w, a in cells if a == 1), Fraction(0))


def solve_general_grid(h: HierarchySpec, resolution: int) -> list[tuple[Fraction, Fraction]]:
    """Exhaustive search over player 1's grid mean pairs, each answered by the
    induced subgame; returns the Blackwell-maximal argmax supports (a
    degenerate result is reported as (1/2, 1/2))."""
    if not isinstance(h.prior, UniformPrior):
        raise ChainError("exhaustive mean search needs the uniform prior")
    if resolution < 10:
        raise ResolutionTooCoarse(f"need at least 10 grid steps, got {resolution}")
    u1 = h.senders[0].utility
    step = Fraction(1, resolution)
    half_steps = resolution // 2

    best: Optional[Fraction] = None
    arg: dict[tuple[Fraction, Fraction], None] = {}
    for k0 in range(half_steps + 1):
        m0 = k0 * step
        for k1 in range(half_steps, min(half_steps + k0, resolution) + 1):
            m1 = k1 * step
            if m1 - m0 > HALF or m1 < HALF:
                continue
            cells = _respond_to_means(h, m0, m1)
            v = _means_value(u1, cells)
            if len(cells) == 1:
                key = (HALF, HALF)
            else:
                key = (cells[0][0], cells[1][0])
            if best is None or v > best:
                best, arg = v, {key: None}
            elif v == best:
                arg[key] = None

    pairs = list(arg)
    keep = []
    for pair in pairs:
        dominated = any(
            other != pair and other[0] <= pair[0] and pair[1] <= other[1]
            for other in pairs
        )
        if not dominated:
            keep.append(pair)
    return sorted(keep)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalCut:
    """Player 1's move in the uniform game: reveal which side of x the state
    fell on (signal 1 for the high side)."""

    x: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", as_ratio(self.x))
        if not 0 <= self.x <= 1:
            raise ChainError(f"cut must lie in [0,1], got {self.x}")


@dataclass(eq=False)
class McReport:
    trials: int
    seed: int
    labels: tuple[str, ...]           # senders 1..n then "receiver"
    means: tuple[float, ...]
    stderrs: tuple[float, ...]

    def row(self, label: str) -> tuple[float, float]:
        i = self.labels.index(label)
        return self.means[i], self.stderrs[i]


def _propagate(rng, signals: np.ndarray, matrix: Experiment) -> np.ndarray:
    to_one = np.array([float(row[1]) for row in matrix.rows])
    return (rng.random(signals.shape[0]) < to_one[signals]).astype(np.int8)


def monte_carlo(
    h: HierarchySpec,
    experiments: Sequence[Union[Experiment, IntervalCut]],
    trials: int,
    seed: Optional[int] = None,
) -> McReport:
    """Simulate the chain: draw states, push signals through the experiment
    profile, apply the receiver's threshold behavior, and average realized
    utilities per agent (with standard errors)."""
    if seed is None:
        raise SeedRequired("pass an integer seed; runs must be reproducible")
    if len(experiments) != h.n:
        raise ChainError(f"need one experiment per sender ({h.n}), got {len(experiments)}")
    rng = np.random.Generator(np.random.PCG64(seed))
    act = action_rule(h)

    if h.is_binary:
        for e in experiments:
            if not isinstance(e, Experiment):
                raise ChainError("binary chains take 2x2 experiments only")
        p = h.prior.p
        states = (rng.random(trials) < float(p)).astype(np.int8)
        signals = states
        for e in experiments:
            signals = _propagate(rng, signals, e)
        composed = experiments[0]
        for e in experiments[1:]:
            composed = compose(composed, e)
        # equilibrium posterior (and hence the action) attached to each final signal
        actions_by_signal = []
        for s in range(2):
            lik1, lik0 = composed.rows[1][s], composed.rows[0][s]
            total = p * lik1 + (1 - p) * lik0
            if total == 0:
                actions_by_signal.append(0)
                continue
            actions_by_signal.append(act(p * lik1 / total))
        actions = np.array(actions_by_signal, dtype=np.int8)[signals]

        rows = []
        agents = [s.utility for s in h.senders] + [h.receiver.utility]
        for u in agents:
            table = np.array(
                [[float(u.u00), float(u.u01)], [float(u.u10), float(u.u11)]]
            )
            rows.append(table[states, actions])
    else:
        cut, garbles = experiments[0], experiments[1:]
        if not isinstance(cut, IntervalCut):
            raise ChainError("uniform chains start with an IntervalCut")
        for e in garbles:
            if not isinstance(e, Experiment):
                raise ChainError("intermediaries garble with 2x2 experiments")
        states = rng.random(trials)
        signals = (states >= float(cut.x)).astype(np.int8)
        for e in garbles:
            signals = _propagate(rng, signals, e)
        # posterior mean for each final signal, exactly
        x = cut.x
        cell_prob = [x, 1 - x]
        cell_mean = [x / 2, (x + 1) / 2]
        composed = identity_experiment(2)
        for e in garbles:
            composed = compose(composed, e)
        actions_by_signal = []
        for s in range(2):
            num = sum(cell_prob[c] * composed.rows[c][s] * cell_mean[c] for c in range(2))
            den = sum(cell_prob[c] * composed.rows[c][s] for c in range(2))
            if den == 0:
                actions_by_signal.append(0)
                continue
            actions_by_signal.append(act(num / den))
        actions = np.array(actions_by_signal, dtype=np.int8)[signals]

        rows = []
        agents = [s.utility for s in h.senders] + [h.receiver.utility]
        for u in agents:
            premium = float(u.alpha) * states + float(u.beta)
            rows.append(premium * actions)

    labels = tuple(
        (s.label or f"sender{i}") for i, s in enumerate(h.senders, start=1)
    ) + ("receiver",)
    means, errs = [], []
    for sample in rows:
        means.append(float(np.mean(sample)))
        errs.append(float(np.std(sample, ddof=1) / np.sqrt(trials)))
    return McReport(trials=trials, seed=seed, labels=labels,
                    means=tuple(means), stderrs=tuple(errs))
