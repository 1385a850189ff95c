import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from commitpay.errors import SchemaError, ValidationError
from commitpay.game import (BayesianGame, Commitment, FollowerActionPayments, Mixture,
                            NormalFormGame, OutcomePayments, PureAction, TypedMixture, TypedPure,
                            as_rational, evaluate_leader, induce_game)
from conftest import games, random_game, table1


# --- independent oracles ----------------------------------------------------


def resum_induced(game, sigma, payments):
    """Follower utilities and leader residual by summing over every full profile."""
    n = game.n_players
    out, res = {}, {}
    for rest in itertools.product(*(range(k) for k in game.shape[1:])):
        util = [F(0)] * (n - 1)
        lead = F(0)
        for a1 in range(game.shape[0]):
            a = (a1,) + rest
            for i in range(1, n):
                util[i - 1] += sigma[a1] * (game.payoffs[a][i] + payments.to(i, a))
            lead += sigma[a1] * (game.payoffs[a][0] - payments.total(a))
        out[rest] = tuple(util)
        res[rest] = lead
    return out, res


def expectation_oracle(game, sigma, payments, plays):
    """Leader expectation over the full product distribution, including zero-probability
    profiles."""
    total = F(0)
    for a in game.profiles():
        p = sigma[a[0]]
        for i in range(1, game.n_players):
            p *= plays[i - 1][a[i]]
        total += p * (game.payoffs[a][0] - payments.total(a))
    return total


def rand_dist(rng, k, den=6):
    w = [rng.randint(0, den) for _ in range(k)]
    if not sum(w):
        w[0] = 1
    return tuple(F(x, sum(w)) for x in w)


def rand_outcome_payments(rng, game):
    return OutcomePayments({a: tuple(F(rng.randint(0, 6), rng.randint(1, 3))
                                     for _ in range(game.n_players - 1))
                            for a in game.profiles() if rng.random() < 0.6})


# --- parsing and construction -----------------------------------------------


def test_rationals_reject_floats_and_bools():
    assert as_rational("-3/6") == F(-1, 2)
    assert as_rational(4) == 4
    for bad in (0.5, True, "1.5", "abc", "1/2/3"):
        with pytest.raises(ValidationError):
            as_rational(bad)


def test_incomplete_game_lists_every_missing_profile():
    with pytest.raises(SchemaError) as exc:
        NormalFormGame([["a", "b"], ["c", "d"]], {(0, 0): (F(0), F(0))})
    assert len(exc.value.violations) >= 3


def test_one_player_one_action_game_is_valid():
    g = NormalFormGame([["only"]], {(0,): (F(0),)})
    assert g.shape == (1,) and g.u(0, (0,)) == 0


def test_negative_payment_rejected():
    with pytest.raises(ValidationError):
        FollowerActionPayments((F(1), F(-1)))
    with pytest.raises(ValidationError):
        OutcomePayments({(0, 0): (F(-1, 3),)})


def test_mixture_must_sum_to_one():
    with pytest.raises(ValidationError):
        Mixture((F(1, 3), F(1, 3)))
    with pytest.raises(ValidationError):
        TypedMixture(((F(1), F(0)), (F(2), F(-1))))


def test_prior_not_summing_to_one_names_player():
    with pytest.raises(Exception) as exc:
        BayesianGame([["a"], ["b"]], [["x", "y"], ["z"]], [[F(1, 2), F(2, 5)], [F(1)]],
                     [({(0, 0): F(0)}, {(0, 0): F(0)}), ({(0, 0): F(0)},)])
    assert "player 1" in str(exc.value)


def test_typed_strategy_must_cover_every_type():
    bg = BayesianGame.from_normal_form(table1())
    c = Commitment(TypedPure((0, 1)), FollowerActionPayments((0, 0, 0)))
    with pytest.raises(SchemaError):
        evaluate_leader(bg, c, ((F(1), F(0), F(0)),))


def test_payment_dimension_mismatch():
    g = table1()
    with pytest.raises(SchemaError):
        induce_game(g, Commitment(PureAction(0), FollowerActionPayments((1, 0))))
    with pytest.raises(SchemaError):
        induce_game(g, Commitment(PureAction(0), OutcomePayments({(0, 5): (F(1),)})))


# --- induce_game ------------------------------------------------------------


def test_table1_induced_game():
    g = table1()
    c = Commitment(Mixture((F(1, 3), F(2, 3))), OutcomePayments({(1, 0): (F(1),)}))
    ind = induce_game(g, c)
    assert [ind.payoffs[(b,)][0] for b in range(3)] == [F(2, 3)] * 3
    assert [ind.leader_residual[(b,)] for b in range(3)] == [F(1, 3), F(-1, 3), F(-1, 3)]


@given(games(((1, 3), (1, 3), (1, 3))), st.data())
def test_pure_action_zero_payments_gives_base_row(g, data):
    a1 = data.draw(st.integers(0, g.shape[0] - 1))
    ind = induce_game(g, Commitment(PureAction(a1), OutcomePayments({})))
    for rest, vec in ind.payoffs.items():
        assert vec == tuple(g.payoffs[(a1,) + rest][1:])
        assert ind.leader_residual[rest] == g.payoffs[(a1,) + rest][0]


def test_induced_matches_resummation_oracle():
    rng = random.Random(11)
    for _ in range(60):
        g = random_game(rng, (2, 2, 2))
        sigma = rand_dist(rng, 2)
        pay = rand_outcome_payments(rng, g)
        ind = induce_game(g, Commitment(Mixture(sigma), pay))
        util, res = resum_induced(g, sigma, pay)
        assert dict(ind.payoffs) == util
        assert dict(ind.leader_residual) == res


@given(games(((1, 3), (1, 3), (1, 2))), st.data())
def test_induce_is_linear_in_payments(g, data):
    rng = random.Random(data.draw(st.integers(0, 10 ** 6)))
    sigma = rand_dist(rng, g.shape[0])
    P, Q = rand_outcome_payments(rng, g), rand_outcome_payments(rng, g)
    both = OutcomePayments({a: tuple(P.to(i, a) + Q.to(i, a) for i in range(1, g.n_players))
                            for a in g.profiles()})
    zero = OutcomePayments({})
    ip, iq, ib, i0 = (induce_game(g, Commitment(Mixture(sigma), x)) for x in (P, Q, both, zero))
    for rest in ib.payoffs:
        for k in range(g.n_players - 1):
            assert ib.payoffs[rest][k] == ip.payoffs[rest][k] + iq.payoffs[rest][k] - \
                i0.payoffs[rest][k]
        assert ib.leader_residual[rest] == ip.leader_residual[rest] + iq.leader_residual[rest] - \
            i0.leader_residual[rest]


@given(games(((1, 3), (1, 3))), st.data())
def test_zero_payments_follower_utilities_are_mixture_averages(g, data):
    rng = random.Random(data.draw(st.integers(0, 10 ** 6)))
    sigma = rand_dist(rng, g.shape[0])
    ind = induce_game(g, Commitment(Mixture(sigma), OutcomePayments({})))
    for (b,), vec in ind.payoffs.items():
        assert vec[0] == sum(sigma[a] * g.payoffs[(a, b)][1] for a in range(g.shape[0]))


# --- evaluate_leader -------------------------------------------------------


def test_table1_leader_value_is_one_third():
    c = Commitment(Mixture((F(1, 3), F(2, 3))), OutcomePayments({(1, 0): (F(1),)}))
    assert evaluate_leader(table1(), c, ((F(1), F(0), F(0)),)) == F(1, 3)


@given(games(((1, 3), (1, 3), (1, 3))), st.data())
def test_deterministic_profile_zero_payments(g, data):
    a = tuple(data.draw(st.integers(0, m - 1)) for m in g.shape)
    plays = tuple(tuple(F(int(k == a[i])) for k in range(g.shape[i]))
                  for i in range(1, g.n_players))
    assert evaluate_leader(g, Commitment(PureAction(a[0]), OutcomePayments({})), plays) == \
        g.payoffs[a][0]


def test_evaluate_matches_full_support_oracle():
    rng = random.Random(5)
    for _ in range(80):
        shape = tuple(rng.randint(1, 3) for _ in range(rng.choice((2, 3))))
        g = random_game(rng, shape)
        sigma = rand_dist(rng, shape[0])
        pay = rand_outcome_payments(rng, g)
        plays = tuple(rand_dist(rng, m) for m in shape[1:])
        assert evaluate_leader(g, Commitment(Mixture(sigma), pay), plays) == \
            expectation_oracle(g, sigma, pay, plays)


@given(games(((1, 3), (1, 3))), st.data())
def test_evaluate_monotone_in_leader_utility(g, data):
    rng = random.Random(data.draw(st.integers(0, 10 ** 6)))
    sigma = rand_dist(rng, g.shape[0])
    play = (rand_dist(rng, g.shape[1]),)
    bumped = NormalFormGame(g.actions, {a: (v[0] + rng.randint(0, 3),) + v[1:]
                                        for a, v in g.payoffs.items()})
    c = Commitment(Mixture(sigma), OutcomePayments({}))
    assert evaluate_leader(bumped, c, play) >= evaluate_leader(g, c, play)


def test_bayesian_collapse_round_trip():
    g = table1()
    bg = BayesianGame.from_normal_form(g)
    assert bg.collapse() == g
    assert bg.leader_types_only and bg.follower_types_only
