"""Brute-force engine: grids, level-set chains, grid equilibria, pass-through
verification, and Monte Carlo.  Expected values here were produced by running
the engine once and hand-checking the mechanics (set shapes, exclusion of
non-credible garbles, collapse of receiver-constant outcomes)."""
from __future__ import annotations

from fractions import Fraction as F

import pytest

from infochain import (
    BinaryPrior,
    IntervalCut,
    ResolutionTooCoarse,
    SeedRequired,
    UniformPrior,
    blackwell_maximal,
    build_grid,
    conformist_table,
    contrarian_table,
    experiment,
    grid_pairs,
    hierarchy,
    ic_chain,
    identity_experiment,
    linear_utility,
    make_outcome,
    monte_carlo,
    solve_general_grid,
    solve_spe_grid,
    verify_simple_equilibrium,
    zero_extremist_table,
)

P = BinaryPrior(F(3, 5))


def support_set(outcomes):
    return sorted((o.q0, o.q1) for o in outcomes)


@pytest.fixture(scope="module")
def grid20():
    return build_grid(P, 20)


@pytest.fixture(scope="module")
def chain(grid20):
    """Three-sender chain: probe conformist 0.35, then an always-action-0
    extremist, then a conformist at 0.2; receiver conformist at 0.4."""
    h = hierarchy(
        [conformist_table(F(7, 20)), zero_extremist_table(), conformist_table(F(1, 5))],
        conformist_table(F(2, 5)), P,
    )
    return h, ic_chain(h, grid20)


class TestGrid:
    def test_pair_count_small(self):
        # helper enumeration at a deliberately coarse step: 4 low x 3 high
        assert len(grid_pairs(F(3, 5), 5)) == 12

    def test_minimum_resolution(self):
        with pytest.raises(ResolutionTooCoarse):
            build_grid(P, 5)

    def test_prior_always_a_coordinate(self):
        g = build_grid(BinaryPrior(F(1, 3)), 10)
        assert F(1, 3) in g.q0s and F(1, 3) in g.q1s
        assert make_outcome(F(1, 3), F(1, 3), g.prior) in g.outcomes

    def test_degenerate_present(self, grid20):
        assert make_outcome(P.p, P.p, P) in grid20.outcomes


class TestLevelSets:
    def test_last_level(self, grid20, chain):
        _, ch = chain
        want = {o for o in grid20.outcomes if o.q0 <= F(1, 5) or F(2, 5) <= o.q0}
        assert set(ch.levels[3]) == want

    def test_middle_level_excludes_non_credible_garbles(self, grid20, chain):
        _, ch = chain
        want = {o for o in grid20.outcomes if o.q0 == F(1, 5) or F(2, 5) <= o.q0}
        assert set(ch.levels[2]) == want

    def test_garble_proof_strictly_smaller(self, grid20, chain):
        _, ch = chain
        want = {o for o in grid20.outcomes if F(2, 5) <= o.q0}
        assert set(ch.garble_proof) == want
        assert set(ch.garble_proof) < set(ch.levels[2])

    def test_nesting(self, chain):
        _, ch = chain
        assert set(ch.levels[2]) <= set(ch.levels[3])

    def test_equilibrium_of_this_chain(self, grid20, chain):
        h, ch = chain
        assert support_set(solve_spe_grid(h, grid20, ch)) == [(F(1, 5), F(1))]

    def test_single_intermediary_at_receiver_threshold(self, grid20):
        h = hierarchy(
            [conformist_table(F(7, 20)), conformist_table(F(2, 5))],
            conformist_table(F(2, 5)), P, strict=False,
        )
        ch = ic_chain(h, grid20)
        assert set(ch.levels[2]) == set(grid20.outcomes)
        assert set(ch.garble_proof) <= set(ch.levels[2])


class TestGridEquilibria:
    def test_all_conformists_reveal_everything(self, grid20):
        h = hierarchy(
            [conformist_table(F(1, 4)), conformist_table(F(3, 10)), conformist_table(F(7, 10))],
            conformist_table(F(2, 5)), P,
        )
        assert support_set(solve_spe_grid(h, grid20)) == [(F(0), F(1))]

    def test_front_contrarian_splits_at_best_conformist(self, grid20):
        h = hierarchy(
            [contrarian_table(F(1, 10)), conformist_table(F(1, 4)), conformist_table(F(3, 10))],
            conformist_table(F(2, 5)), P,
        )
        assert support_set(solve_spe_grid(h, grid20)) == [(F(1, 4), F(1))]

    def test_blocked_ordering_collapses_to_no_information(self, grid20):
        h = hierarchy(
            [conformist_table(F(1, 4)), contrarian_table(F(1, 10)), conformist_table(F(3, 10))],
            conformist_table(F(2, 5)), P,
        )
        assert support_set(solve_spe_grid(h, grid20)) == [(P.p, P.p)]

    def test_blackwell_filter(self):
        wide = make_outcome(F(1, 4), 1, P)
        narrow = make_outcome(F(2, 5), F(4, 5), P)
        assert blackwell_maximal([narrow, wide]) == [wide]


UNIFORM = UniformPrior()


class TestUniformGrid:
    def test_three_conformist_interior_optimum(self):
        h = hierarchy(
            [linear_utility(1, F(-8, 25)), linear_utility(1, F(-1, 5)), linear_utility(1, F(-29, 50))],
            linear_utility(1, F(-3, 10)), UNIFORM,
        )
        assert solve_general_grid(h, 100) == [(F(4, 25), F(33, 50))]

    def test_contrarian_between_conformists_blocks(self):
        h = hierarchy(
            [linear_utility(1, F(-1, 5)), linear_utility(-1, F(1, 10)), linear_utility(1, F(-29, 50))],
            linear_utility(1, F(-3, 10)), UNIFORM,
        )
        assert solve_general_grid(h, 100) == [(F(1, 2), F(1, 2))]

    def test_distant_zero_biased_conformist_blocks(self):
        # intermediary wants to match only above 0.9; pivotal threshold 0.25
        h = hierarchy(
            [linear_utility(1, F(-1, 4)), linear_utility(1, F(-9, 10))],
            linear_utility(1, F(-3, 10)), UNIFORM,
        )
        assert solve_general_grid(h, 100) == [(F(1, 2), F(1, 2))]

    def test_zero_biased_conformist_anchors_low_cell(self):
        # B*'s threshold 0.62 pins m0 at 0.12 (= 0.62 - 1/2 > half of 0.15)
        h = hierarchy(
            [linear_utility(1, F(-3, 20)), linear_utility(1, F(-31, 50))],
            linear_utility(1, F(-1, 4)), UNIFORM,
        )
        assert solve_general_grid(h, 100) == [(F(3, 25), F(31, 50))]

    def test_resolution_floor(self):
        h = hierarchy([linear_utility(1, F(-1, 5))], linear_utility(1, F(-3, 10)), UNIFORM)
        with pytest.raises(ResolutionTooCoarse):
            solve_general_grid(h, 4)


class TestVerifySimple:
    def test_full_information_all_conformists(self, grid20):
        h = hierarchy(
            [conformist_table(F(1, 4)), conformist_table(F(3, 10)), conformist_table(F(7, 10))],
            conformist_table(F(2, 5)), P,
        )
        assert verify_simple_equilibrium(h, make_outcome(0, 1, P), grid20)

    def test_partial_split_holds(self, grid20):
        h = hierarchy(
            [contrarian_table(F(1, 10)), conformist_table(F(1, 4)), conformist_table(F(3, 10))],
            conformist_table(F(2, 5)), P,
        )
        assert verify_simple_equilibrium(h, make_outcome(F(1, 4), 1, P), grid20)

    def test_blocker_tolerates_the_partial_split(self, grid20):
        # middle contrarian passes {0.25, 1} (all alternatives the last
        # conformist would accept are worse for him) ...
        h = hierarchy(
            [conformist_table(F(3, 10)), contrarian_table(F(1, 10)), conformist_table(F(1, 4))],
            conformist_table(F(2, 5)), P,
        )
        assert verify_simple_equilibrium(h, make_outcome(F(1, 4), 1, P), grid20)

    def test_injected_full_information_fails(self, grid20):
        # ... but would profitably coarsen injected full revelation
        h = hierarchy(
            [conformist_table(F(3, 10)), contrarian_table(F(1, 10)), conformist_table(F(1, 4))],
            conformist_table(F(2, 5)), P,
        )
        assert not verify_simple_equilibrium(h, make_outcome(0, 1, P), grid20)

    def test_uniform_equilibrium_passes(self):
        h = hierarchy(
            [linear_utility(1, F(-8, 25)), linear_utility(1, F(-1, 5)), linear_utility(1, F(-29, 50))],
            linear_utility(1, F(-3, 10)), UNIFORM,
        )
        assert verify_simple_equilibrium(h, (F(4, 25), F(33, 50)), 100)

    def test_uniform_injected_wide_pair_fails(self):
        h = hierarchy(
            [linear_utility(1, F(-8, 25)), linear_utility(1, F(-1, 5)), linear_utility(1, F(-29, 50))],
            linear_utility(1, F(-3, 10)), UNIFORM,
        )
        assert not verify_simple_equilibrium(h, (F(1, 10), F(9, 10)), 100)


class TestMonteCarlo:
    def test_seed_mandatory(self):
        h = hierarchy([conformist_table(F(1, 4))], conformist_table(F(2, 5)), P)
        with pytest.raises(SeedRequired):
            monte_carlo(h, [identity_experiment()], 100)

    def test_no_information_baseline(self):
        h = hierarchy(
            [conformist_table(F(1, 4)), conformist_table(F(3, 10)), conformist_table(F(7, 10))],
            conformist_table(F(2, 5)), P,
        )
        babble = experiment([[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]])
        rep = monte_carlo(h, [babble, identity_experiment(), identity_experiment()],
                          10**5, seed=11)
        mean, se = rep.row("receiver")
        ru = h.receiver.utility
        target = float(P.p * ru.u11 + (1 - P.p) * ru.u01)
        assert abs(mean - target) <= 3 * se

    def test_bit_exact_determinism(self):
        h = hierarchy([conformist_table(F(1, 4))], conformist_table(F(2, 5)), P)
        runs = [
            monte_carlo(h, [identity_experiment()], 10**4, seed=3)
            for _ in range(2)
        ]
        assert runs[0].means == runs[1].means
        assert runs[0].stderrs == runs[1].stderrs

    def test_uniform_chain_with_cut(self):
        h = hierarchy(
            [linear_utility(1, F(-8, 25)), linear_utility(1, F(-1, 5)), linear_utility(1, F(-29, 50))],
            linear_utility(1, F(-3, 10)), UNIFORM,
        )
        rep = monte_carlo(
            h,
            [IntervalCut(F(8, 25)), identity_experiment(), identity_experiment()],
            10**5, seed=5,
        )
        # receiver sees means 0.16 / 0.66, acts on the high cell only:
        # expected premium = P(high) * (E[w | high] - 0.3) = 0.68 * 0.36
        mean, se = rep.row("receiver")
        assert abs(mean - 0.68 * 0.36) <= 3 * se
