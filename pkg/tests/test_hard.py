import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from commitpay.commit import solve_two_player_mixed, solve_two_player_pure
from commitpay.errors import SizeError, ValidationError
from commitpay.game import (BayesianGame, Commitment, NormalFormGame, OutcomePayments, PureAction,
                            evaluate_leader, induce_game)
from commitpay.hard import (approx_payments_only, approx_sequential_mixed,
                            approx_single_commitment, solve_bayesian_follower_exact,
                            solve_leader_types_pure_exact)
from commitpay.reductions import (BipartiteGraph, Graph, PricingInstance, optimal_revenue,
                                  reduce_balanced_vertex_cover, reduce_bcbs,
                                  reduce_item_pricing, reduce_vertex_cover_bayesian, revenue)
from commitpay.signaling import solve_signaling_mixed
from conftest import games, random_bayesian, random_game, table1
from oracles import nash_by_support_enumeration

TRIANGLE = Graph(["v1", "v2", "v3"], [("v1", "v2"), ("v2", "v3"), ("v1", "v3")])
SQUARE = Graph(["v1", "v2", "v3", "v4"], [("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v1")])


# --- follower types ----------------------------------------------------------


@given(games())
def test_single_follower_type_equals_mixed(g):
    assert solve_bayesian_follower_exact(BayesianGame.from_normal_form(g)).value == \
        solve_two_player_mixed(g).value


def test_one_item_pricing():
    inst = PricingInstance(1, (((F(5),), F(1)),))
    game = reduce_item_pricing(inst)
    rep = solve_bayesian_follower_exact(game)
    Z = game.metadata["Z"]
    assert rep.value == 5
    assert rep.commitment.payments.amounts == (0, Z - 5)


def candidate_price_revenue(inst):
    """Best revenue with every price drawn from the values that occur (plus 0)."""
    cands = sorted({F(0)} | {v for vals, _ in inst.support for v in vals})
    return max(revenue(inst, r) for r in itertools.product(cands, repeat=inst.items))


def test_two_item_pricing():
    inst = PricingInstance(2, (((10, 0), F(1, 2)), ((6, 6), F(1, 2))))
    rep = solve_bayesian_follower_exact(reduce_item_pricing(inst))
    assert rep.value == candidate_price_revenue(inst) == optimal_revenue(inst)[0] == 8


def test_pricing_optimum_can_sit_between_values():
    # the best prices (9, 3) are not raw values; the solver and the arrangement oracle find them
    inst = PricingInstance(2, (((10, 4), F(1, 2)), ((0, 3), F(1, 2))))
    rep = solve_bayesian_follower_exact(reduce_item_pricing(inst))
    assert rep.value == optimal_revenue(inst)[0] == 6 > candidate_price_revenue(inst)


def test_zero_value_pricing():
    inst = PricingInstance(2, (((0, 0), F(1)),))
    rep = solve_bayesian_follower_exact(reduce_item_pricing(inst))
    assert rep.value == 0 and rep.follower_play[0][0][0] == 1


def test_follower_types_report_consistent():
    rng = random.Random(5)
    for _ in range(30):
        bg = random_bayesian(rng, (rng.randint(1, 3), rng.randint(1, 3)), (1, rng.randint(1, 3)))
        rep = solve_bayesian_follower_exact(bg)
        assert all(s >= 0 for _, s in rep.certificate)
        assert evaluate_leader(bg, rep.commitment, rep.follower_play) == rep.value


def test_enumeration_budget():
    bg = random_bayesian(random.Random(0), (2, 3), (1, 5))
    with pytest.raises(SizeError):
        solve_bayesian_follower_exact(bg, budget=100)


# --- leader types, pure ------------------------------------------------------


def test_vertex_cover_triangle():
    assert solve_leader_types_pure_exact(reduce_vertex_cover_bayesian(TRIANGLE, 2)).value == 1
    assert solve_leader_types_pure_exact(reduce_vertex_cover_bayesian(TRIANGLE, 1)).value <= 0


@given(games())
def test_single_leader_type_equals_pure(g):
    assert solve_leader_types_pure_exact(BayesianGame.from_normal_form(g)).value == \
        solve_two_player_pure(g).value


def add_dominated_follower_action(bg):
    n1, n2 = bg.shape
    low = min(min(t.values()) for t in bg.payoffs[1]) - 1
    actions = (bg.actions[0], tuple(bg.actions[1]) + ("worse",))
    leader = tuple({**t, **{(a, n2): F(100) for a in range(n1)}} for t in bg.payoffs[0])
    follower = tuple({**t, **{(a, n2): low for a in range(n1)}} for t in bg.payoffs[1])
    return BayesianGame(actions, bg.types, bg.prior, (leader, follower))


def test_exact_enumerators_ignore_strictly_dominated_action():
    rng = random.Random(17)
    for _ in range(25):
        lt = random_bayesian(rng, (2, 2), (2, 1))
        ft = random_bayesian(rng, (2, 2), (1, 2))
        # a strictly dominated follower action can still be bought, so compare without payments
        assert solve_leader_types_pure_exact(add_dominated_follower_action(lt), True).value == \
            solve_leader_types_pure_exact(lt, True).value
        assert solve_bayesian_follower_exact(add_dominated_follower_action(ft), True).value == \
            solve_bayesian_follower_exact(ft, True).value


# --- grid approximators ------------------------------------------------------


def k22():
    return reduce_bcbs(BipartiteGraph(["v1", "v2"], ["w1", "w2"],
                                      [(v, w) for v in ("v1", "v2") for w in ("w1", "w2")]), 2)


def test_single_commit_finds_cooperation_without_payments():
    rep = approx_single_commitment(k22(), step=F(1), cap=0)
    assert rep.value == 1 and rep.bound == "lower"


def test_single_action_followers_exact():
    rng = random.Random(1)
    g = random_game(rng, (3, 1, 1))
    rep = approx_single_commitment(g, step=F(1, 2), cap=0)
    assert rep.value == max(g.payoffs[(a, 0, 0)][0] for a in range(3))


def test_single_commit_matches_support_enumeration_on_generic_games():
    rng = random.Random(8)
    for _ in range(8):
        g = random_game(rng, (1, 2, 2), -997, 997)
        rep = approx_single_commitment(g, step=F(1), cap=1)
        best = None
        slots = [(a, i) for a in g.profiles() for i in range(2)]
        for choice in itertools.product((0, 1), repeat=len(slots)):
            pay = {}
            for (a, i), v in zip(slots, choice):
                vec = list(pay.get(a, (F(0), F(0))))
                vec[i] = F(v)
                pay[a] = tuple(vec)
            ind = induce_game(g, Commitment(PureAction(0), OutcomePayments(pay)))
            for x, y in nash_by_support_enumeration(ind):
                val = sum(x[b] * y[c] * ind.leader_residual[(b, c)]
                          for b in range(2) for c in range(2))
                best = val if best is None else max(best, val)
        assert rep.value == best


def test_grids_below_signaling_and_monotone():
    rng = random.Random(23)
    for n in range(6):
        # refine the leader's mixture grid
        g = random_game(rng, (2, 2, 2), -3, 3)
        ub = solve_signaling_mixed(g).value
        vals = [approx_single_commitment(g, step=F(1, k), cap=0).value for k in (1, 2, 4)]
        assert vals[0] <= vals[1] <= vals[2] <= ub
        seq = [approx_sequential_mixed(g, step=F(1, k), cap=0).value for k in (1, 2, 4)]
        assert seq[0] <= seq[1] <= seq[2]
        if n >= 2:
            continue
        # refine the payment grid
        h = random_game(rng, (1, 2, 2), -3, 3)
        ub = solve_signaling_mixed(h).value
        coarse = approx_single_commitment(h, step=F(1), cap=1).value
        fine = approx_single_commitment(h, step=F(1, 2), cap=1).value
        assert coarse <= fine <= ub


def test_sequential_mixed_single_leader_action():
    rng = random.Random(4)
    for _ in range(10):
        g = random_game(rng, (1, 2, 3), -997, 997)
        rep = approx_sequential_mixed(g, step=F(1), cap=0)
        ind = induce_game(g, Commitment(PureAction(0), OutcomePayments({})))
        inner = solve_two_player_mixed(NormalFormGame(ind.actions, ind.payoffs))
        b = inner.details["incentivized"]
        mix = inner.commitment.strategy.probs
        assert rep.value == sum(mix[k] * ind.leader_residual[(k, b)] for k in range(2))


def test_balanced_cover_square():
    eps = F(1, 4 ** 5)
    rep = approx_sequential_mixed(reduce_balanced_vertex_cover(SQUARE), step=F(1, 2), cap=0)
    assert rep.value >= eps


def test_all_zero_games():
    g = random_game(random.Random(0), (2, 2, 2), 0, 0)
    assert approx_sequential_mixed(g, step=F(1, 2), cap=0).value == 0
    assert approx_single_commitment(g, step=F(1, 2), cap=0).value == 0


def test_payments_only_table1():
    assert approx_payments_only(table1(), step=F(1), cap=2).value <= 0
    assert solve_two_player_mixed(table1(), no_payments=True).value <= 0


def test_grid_budget_and_player_counts():
    g = random_game(random.Random(0), (2, 2, 2))
    with pytest.raises(SizeError):
        approx_single_commitment(g, step=F(1, 4), cap=4, budget=1000)
    with pytest.raises(ValidationError):
        approx_single_commitment(table1())
    with pytest.raises(ValidationError):
        approx_payments_only(g)
