"""Exact enumerators and grid approximators for the NP-hard commitment settings.

Exact solvers enumerate the combinatorial part (follower-type assignments or
per-type leader actions) and solve what remains exactly.  Approximators search
a grid and report a lower bound.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .commit import _mixed_lp, simplex_grid, two_player_certificate
from .equilibria import best_nash_for_leader, best_nash_with_payments, grid_denominator
from .errors import SizeError, ValidationError
from .game import (BayesianGame, Commitment, FollowerActionPayments, Mixture, NormalFormGame,
                   OutcomePayments, SolveReport, TypedPure, induce_game, point_mass)
from .lp import GE, EQ, LpBuilder, solve_lp

ZERO = Fraction(0)
DEFAULT_BUDGET = 10 ** 6
GRID_BUDGET = 10 ** 5


def _check_budget(count, budget, hint=""):
    if count > budget:
        raise SizeError(f"enumeration needs {count} cases, budget is {budget}{hint}")


# ---------------------------------------------------------------------------
# follower types, exact


def _assignment_lp(bg: BayesianGame, tau, no_payments):
    n1, n2 = bg.shape
    lb = LpBuilder("assignment-" + "-".join(map(str, tau)))
    p = [lb.var(f"p[{a}]") for a in range(n1)]
    used = sorted(set(tau))
    pay = {b: lb.var(f"P[{bg.actions[1][b]}]", 0, 0 if no_payments else None) for b in used}
    obj = {}
    leader = bg.payoffs[0][0]
    for t, b in enumerate(tau):
        w = bg.prior[1][t]
        if not w:
            continue
        for a in range(n1):
            obj[p[a]] = obj.get(p[a], ZERO) + w * leader[(a, b)]
        obj[pay[b]] = obj.get(pay[b], ZERO) - w
    lb.maximize(obj)
    lb.add({v: 1 for v in p}, EQ, 1, "simplex")
    for t, b in enumerate(tau):
        table = bg.payoffs[1][t]
        for b2 in range(n2):
            if b2 == b:
                continue
            terms = {pay[b]: 1}
            if b2 in pay:
                terms[pay[b2]] = -1
            for a in range(n1):
                c = table[(a, b)] - table[(a, b2)]
                if c:
                    terms[p[a]] = c
            lb.add(terms, GE, 0, f"ic[{bg.types[1][t]}:{b}>={b2}]")
    return lb.build(), p, pay


def solve_bayesian_follower_exact(game: BayesianGame, no_payments: bool = False,
                                  budget: int = DEFAULT_BUDGET, lp_sink=None) -> SolveReport:
    """Optimal mixture plus follower-action payments against a follower with private types.

    Enumerates every map from follower types to actions; each map leaves an LP.
    """
    if game.n_players != 2 or len(game.types[0]) != 1:
        raise ValidationError("needs a 2-player game where only the follower has types")
    n1, n2 = game.shape
    n_types = len(game.types[1])
    _check_budget(n2 ** n_types, budget, "; try the grid approximator instead")
    best = None
    for tau in itertools.product(range(n2), repeat=n_types):
        lp, p, pay = _assignment_lp(game, tau, no_payments)
        if lp_sink is not None:
            lp_sink.append(lp)
        sol = solve_lp(lp)
        if sol.optimal and (best is None or sol.objective_value > best[0]):
            best = (sol.objective_value, tau, sol, p, pay)
    value, tau, sol, p, pay = best
    amounts = [ZERO] * n2
    for b, v in pay.items():
        amounts[b] = sol[v]
    commitment = Commitment(Mixture(tuple(sol[v] for v in p)), FollowerActionPayments(amounts))
    play = (tuple(point_mass(b, n2) for b in tau),)
    return SolveReport("bayes-follower-exact", value, commitment, play,
                       two_player_certificate(game, commitment, play),
                       details={"assignment": tau, "no_payments": no_payments})


# ---------------------------------------------------------------------------
# leader types, pure actions, exact


def solve_leader_types_pure_exact(game: BayesianGame, no_payments: bool = False,
                                  budget: int = DEFAULT_BUDGET) -> SolveReport:
    """Optimal per-type pure actions plus follower-action payments, by enumeration."""
    if game.n_players != 2 or not game.leader_types_only:
        raise ValidationError("needs a 2-player game where only the leader has types")
    n1, n2 = game.shape
    prior = game.prior[0]
    n_types = len(prior)
    _check_budget(n1 ** n_types, budget)
    follower = game.payoffs[1][0]
    best = None
    for f in itertools.product(range(n1), repeat=n_types):
        fu = [sum((w * follower[(f[t], b)] for t, w in enumerate(prior) if w), ZERO)
              for b in range(n2)]
        lu = [sum((w * game.payoffs[0][t][(f[t], b)] for t, w in enumerate(prior) if w), ZERO)
              for b in range(n2)]
        top = max(fu)
        for b in range(n2):
            deficit = top - fu[b]
            if no_payments and deficit:
                continue
            value = lu[b] - deficit
            if best is None or value > best[0]:
                best = (value, f, b, deficit)
    value, f, b, deficit = best
    amounts = [ZERO] * n2
    amounts[b] = deficit
    commitment = Commitment(TypedPure(f), FollowerActionPayments(amounts))
    play = ((point_mass(b, n2),),)
    return SolveReport("leader-types-pure-exact", value, commitment, play,
                       two_player_certificate(game, commitment, play),
                       details={"actions_by_type": f, "no_payments": no_payments})


# ---------------------------------------------------------------------------
# grid approximators


def _payment_grid(k: int, cap: Fraction):
    top = math.floor(cap * k)
    return [Fraction(j, k) for j in range(top + 1)]


def _outcome_payment_grid(game, k, cap):
    """Every OutcomePayments whose entries lie on the grid [0, cap] with step 1/k."""
    levels = _payment_grid(k, cap)
    profiles = list(game.profiles())
    slots = [(a, i) for a in profiles for i in range(game.n_players - 1)]
    for choice in itertools.product(levels, repeat=len(slots)):
        amounts = {}
        for (a, i), v in zip(slots, choice):
            if v:
                vec = list(amounts.get(a, [ZERO] * (game.n_players - 1)))
                vec[i] = v
                amounts[a] = vec
        yield OutcomePayments(amounts)


def _grid_size(game, k, cap, with_mixture=True):
    levels = math.floor(Fraction(cap) * k) + 1
    slots = math.prod(game.shape) * (game.n_players - 1)
    mix = math.comb(game.shape[0] + k - 1, game.shape[0] - 1) if with_mixture else 1
    return mix * levels ** slots


def _default_cap(game):
    return max(game.utility_range(i) for i in range(1, game.n_players))


def approx_single_commitment(game: NormalFormGame, step=Fraction(1, 4), cap=None,
                             budget: int = GRID_BUDGET) -> SolveReport:
    """Grid search over leader mixtures and outcome payments; followers play the
    leader-best Nash equilibrium of the induced game.  Lower bound."""
    if game.n_players != 3:
        raise ValidationError("single-commitment approximation expects a 3-player game")
    k = grid_denominator(step)
    cap = _default_cap(game) if cap is None else Fraction(cap)
    _check_budget(_grid_size(game, k, cap), budget)
    best = None
    for sigma in simplex_grid(game.shape[0], k):
        for payments in _outcome_payment_grid(game, k, cap):
            rep = best_nash_for_leader(game, Commitment(Mixture(sigma), payments))
            if best is None or rep.value > best.value:
                best = rep
    best.setting = "single-commit"
    best.bound = "lower"
    best.details.update({"step": Fraction(1, k), "cap": cap})
    return best


def _follower_stage(induced, no_payments=False):
    """Player 2 commits (mixture + payment) against player 3 on ``induced``; ties between
    player 2's optimal commitments go to the leader.  Returns (leader value, details)."""
    w2 = {a: v[0] for a, v in induced.payoffs.items()}
    w3 = {a: v[1] for a, v in induced.payoffs.items()}
    res = induced.leader_residual
    shape = induced.shape
    firsts = []
    for b in range(shape[1]):
        lp, names, pay = _mixed_lp((Fraction(1),), (w2,), w3, shape, b, no_payments)
        sol = solve_lp(lp)
        firsts.append((lp, names, pay, sol))
    top = max(s.objective_value for *_, s in firsts if s.optimal)
    best = None
    for b, (lp, names, pay, sol) in enumerate(firsts):
        if not sol.optimal or sol.objective_value != top:
            continue
        row = names[0]
        lb = LpBuilder(f"leader-tiebreak-{b}")
        for v in lp.variables:
            lb.var(v, *lp.bounds[lp.variables.index(v)])
        for con in lp.constraints:
            lb.add(dict(zip(lp.variables, con.coeffs)), con.relation, con.rhs, con.name)
        lb.add(dict(zip(lp.variables, lp.objective)), GE, top, "player2-optimal")
        lb.maximize({row[a]: res[(a, b)] for a in range(shape[0])})
        sol2 = solve_lp(lb.build())
        if best is None or sol2.objective_value > best[0]:
            mix = tuple(sol2[v] for v in row)
            best = (sol2.objective_value, b, mix, sol2[pay])
    value, b, mix, p2 = best
    return value, {"player2_mixture": mix, "player3_action": b, "player2_payment": p2,
                   "player2_value": top}


def approx_sequential_mixed(game: NormalFormGame, step=Fraction(1, 2), cap=None,
                            budget: int = GRID_BUDGET) -> SolveReport:
    """Grid over the leader's mixture and outcome payments; player 2 then solves its own
    commitment problem exactly.  Lower bound."""
    if game.n_players != 3:
        raise ValidationError("sequential mixed approximation expects a 3-player game")
    k = grid_denominator(step)
    cap = _default_cap(game) if cap is None else Fraction(cap)
    _check_budget(_grid_size(game, k, cap), budget)
    best = None
    for sigma in simplex_grid(game.shape[0], k):
        for payments in _outcome_payment_grid(game, k, cap):
            commitment = Commitment(Mixture(sigma), payments)
            value, info = _follower_stage(induce_game(game, commitment))
            if best is None or value > best[0]:
                best = (value, commitment, info)
    value, commitment, info = best
    play = ((info["player2_mixture"],),
            (point_mass(info["player3_action"], game.shape[2]),))
    info.update({"step": Fraction(1, k), "cap": cap})
    return SolveReport("seq-mixed", value, commitment, play, [], bound="lower", details=info)


def approx_payments_only(game: NormalFormGame, step=Fraction(1), cap=None,
                         budget: int = GRID_BUDGET) -> SolveReport:
    """Leader commits to outcome payments only, then both players play the leader-best
    Nash equilibrium of the game with payments.  Grid search; lower bound."""
    if game.n_players != 2:
        raise ValidationError("payments-only approximation expects a 2-player game")
    k = grid_denominator(step)
    cap = _default_cap(game) if cap is None else Fraction(cap)
    _check_budget(_grid_size(game, k, cap, with_mixture=False), budget)
    best = None
    for payments in _outcome_payment_grid(game, k, cap):
        value, pair, flag = best_nash_with_payments(game, payments)
        if best is None or value > best[0]:
            best = (value, pair, payments, flag)
    value, pair, payments, flag = best
    commitment = Commitment(Mixture(pair[0]), payments)
    return SolveReport("payments-only", value, commitment, ((pair[1],),), [], bound="lower",
                       details={"step": Fraction(1, k), "cap": cap, "flag": flag})
