"""Polynomial-time optimal commitments without signaling.

* two-player pure action + payments (dynamic program over outcomes)
* two-player mixture + payments (one LP per incentivized follower action)
* two-player leader-types mixture + payments (same, per-type mixtures)
* three-player sequential pure commitment (three-variable LP per outcome)

Follower ties go to the leader: every incentive constraint is weak and the
solver maximizes over which action/outcome to incentivize.  Ties between
equally good choices go to the lowest index.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConsistencyError, ValidationError
from .game import (BayesianGame, Commitment, FollowerActionPayments, Mixture, NormalFormGame,
                   OutcomePayments, PureAction, SolveReport, TypedMixture, induce_game,
                   point_mass)
from .lp import GE, EQ, LpBuilder, solve_lp

ZERO = Fraction(0)


def _require_players(game, n):
    if game.n_players != n:
        raise ValidationError(f"this solver needs a {n}-player game, got {game.n_players} players")


def _solve_many(lps, parallel=False):
    """Solve LPs in order; with ``parallel`` use worker processes, merged by position."""
    if parallel and len(lps) > 1:
        with ProcessPoolExecutor() as pool:
            return list(pool.map(solve_lp, lps))
    return [solve_lp(lp) for lp in lps]


# ---------------------------------------------------------------------------
# certificates


def follower_utilities(game, commitment: Commitment) -> list:
    """Expected utility of each follower action, one list per follower type (2 players)."""
    bg = game if isinstance(game, BayesianGame) else BayesianGame.from_normal_form(game)
    n1, n2 = bg.shape
    sigmas = commitment.leader_mixtures(n1, len(bg.types[0]))
    pay = commitment.payments
    out = []
    for t2 in range(len(bg.types[1])):
        table = bg.payoffs[1][t2]
        row = []
        for b in range(n2):
            total = ZERO
            for t1, w in enumerate(bg.prior[0]):
                for a, p in enumerate(sigmas[t1]):
                    if p and w:
                        total += w * p * (table[(a, b)] + pay.to(1, (a, b)))
            row.append(total)
        out.append(row)
    return out


def two_player_certificate(game, commitment: Commitment, follower_play) -> list:
    """``(id, slack)`` for every follower incentive constraint, recomputed from scratch.

    Each action in the support of a follower type's play must be weakly best.
    """
    bg = game if isinstance(game, BayesianGame) else BayesianGame.from_normal_form(game)
    utils = follower_utilities(bg, commitment)
    labels = bg.actions[1]
    cert = []
    plays = follower_play[0]
    for t2, row in enumerate(utils):
        prefix = "" if len(bg.types[1]) == 1 else f"{bg.types[1][t2]}:"
        for b, prob in enumerate(plays[t2]):
            if not prob:
                continue
            for b2 in range(len(row)):
                if b2 != b:
                    cert.append((f"{prefix}{labels[b]}>={labels[b2]}", row[b] - row[b2]))
    return cert


# ---------------------------------------------------------------------------
# two players, pure action


def solve_two_player_pure(game: NormalFormGame, no_payments: bool = False,
                          secondary=None) -> SolveReport:
    """Best outcome to implement with a pure leader action and a payment on that outcome.

    Value ties go to the larger ``secondary`` entry (profile -> Rational, used
    when replaying sequential play), then to the smaller payment, then to index
    order.
    """
    _require_players(game, 2)
    n1, n2 = game.shape
    best = None
    for a1 in range(n1):
        row_max = max(game.payoffs[(a1, b)][1] for b in range(n2))
        for b in range(n2):
            deficit = row_max - game.payoffs[(a1, b)][1]
            if no_payments and deficit:
                continue
            value = game.payoffs[(a1, b)][0] - deficit
            key = (value, ZERO if secondary is None else secondary[(a1, b)], -deficit)
            if best is None or key > best[0]:
                best = (key, a1, b, deficit)
    (value, _, _), a1, b, deficit = best
    amounts = [ZERO] * n2
    amounts[b] = deficit
    commitment = Commitment(PureAction(a1), FollowerActionPayments(amounts))
    play = ((point_mass(b, n2),),)
    return SolveReport("2p-pure", value, commitment, play,
                       two_player_certificate(game, commitment, play),
                       details={"outcome": (a1, b), "no_payments": no_payments})


# ---------------------------------------------------------------------------
# two players, mixtures (optionally with leader types)


def _mixed_lp(prior, leader_tables, follower_table, shape, b, no_payments):
    """LP maximizing leader utility subject to follower action ``b`` being weakly best."""
    n1, n2 = shape
    typed = len(prior) > 1
    lb = LpBuilder(f"incentivize-{b}")
    names = [[lb.var(f"p[{t}][{a}]" if typed else f"p[{a}]") for a in range(n1)]
             for t in range(len(prior))]
    pay = lb.var("P", 0, 0 if no_payments else None)
    obj = {pay: -1}
    for t, w in enumerate(prior):
        for a in range(n1):
            obj[names[t][a]] = w * leader_tables[t][(a, b)]
    lb.maximize(obj)
    for t in range(len(prior)):
        lb.add({v: 1 for v in names[t]}, EQ, 1, f"simplex[{t}]" if typed else "simplex")
    for b2 in range(n2):
        if b2 == b:
            continue
        terms = {pay: 1}
        for t, w in enumerate(prior):
            for a in range(n1):
                c = w * (follower_table[(a, b)] - follower_table[(a, b2)])
                if c:
                    terms[names[t][a]] = c
        lb.add(terms, GE, 0, f"ic[{b}>={b2}]")
    return lb.build(), names, pay


def _solve_mixed_family(prior, leader_tables, follower_table, shape, no_payments, parallel,
                        lp_sink):
    n1, n2 = shape
    built = [_mixed_lp(prior, leader_tables, follower_table, shape, b, no_payments)
             for b in range(n2)]
    if lp_sink is not None:
        lp_sink.extend(lp for lp, _, _ in built)
    sols = _solve_many([lp for lp, _, _ in built], parallel)
    best = None
    per_action = {}
    for b, ((lp, names, pay), sol) in enumerate(zip(built, sols)):
        per_action[b] = sol.objective_value if sol.optimal else None
        if sol.optimal and (best is None or sol.objective_value > best[0]):
            best = (sol.objective_value, b, sol, names, pay)
    if best is None:
        raise ConsistencyError("no follower action can be incentivized")
    value, b, sol, names, pay = best
    mixtures = tuple(tuple(sol[v] for v in row) for row in names)
    amounts = [ZERO] * n2
    amounts[b] = sol[pay]
    return value, b, mixtures, amounts, per_action


def solve_two_player_mixed(game: NormalFormGame, no_payments: bool = False,
                           parallel: bool = False, lp_sink=None) -> SolveReport:
    """Optimal mixture plus follower-action payments for a two-player game."""
    _require_players(game, 2)
    leader = {a: v[0] for a, v in game.payoffs.items()}
    follower = {a: v[1] for a, v in game.payoffs.items()}
    value, b, mixtures, amounts, per_action = _solve_mixed_family(
        (Fraction(1),), (leader,), follower, game.shape, no_payments, parallel, lp_sink)
    commitment = Commitment(Mixture(mixtures[0]), FollowerActionPayments(amounts))
    play = ((point_mass(b, game.shape[1]),),)
    return SolveReport("2p-mixed", value, commitment, play,
                       two_player_certificate(game, commitment, play),
                       details={"incentivized": b, "values_by_action": per_action,
                                "no_payments": no_payments})


def solve_two_player_leader_types_mixed(game: BayesianGame, no_payments: bool = False,
                                        parallel: bool = False, lp_sink=None) -> SolveReport:
    """Per-type leader mixtures plus follower-action payments; only the leader has types."""
    _require_players(game, 2)
    if not game.leader_types_only:
        raise ValidationError("the follower must have a single type for this solver")
    value, b, mixtures, amounts, per_action = _solve_mixed_family(
        game.prior[0], game.payoffs[0], game.payoffs[1][0], game.shape, no_payments, parallel,
        lp_sink)
    commitment = Commitment(TypedMixture(mixtures), FollowerActionPayments(amounts))
    play = ((point_mass(b, game.shape[1]),),)
    return SolveReport("2p-leader-types-mixed", value, commitment, play,
                       two_player_certificate(game, commitment, play),
                       details={"incentivized": b, "values_by_action": per_action,
                                "no_payments": no_payments})


# ---------------------------------------------------------------------------
# three players, sequential pure commitment


@dataclass
class SequentialPaymentPlan:
    """Leader payments implementing ``target`` plus the follower-2-to-3 transfer it induces.

    ``triggers`` are off-path profiles where the leader pays player 3 ``big_m``;
    they punish a deviation by player 2 and are never realized.
    """

    target: tuple
    pay_to_2: Fraction
    pay_to_3: Fraction
    pay_2_to_3: Fraction
    big_m: Fraction
    triggers: list = field(default_factory=list)

    def leader_payments(self) -> OutcomePayments:
        amounts = {self.target: (self.pay_to_2, self.pay_to_3)}
        for prof in self.triggers:
            amounts[prof] = (ZERO, self.big_m)
        return OutcomePayments(amounts)


def _sequential_lp(game, a):
    a1, a2, a3 = a
    n1, n2, n3 = game.shape
    u = game.payoffs
    lb = LpBuilder(f"implement-{game.label(a)}")
    t12, t13, t23 = lb.var("t12"), lb.var("t13"), lb.var("t23")
    lb.maximize({t12: -1, t13: -1})
    for x in range(n3):
        if x == a3:
            continue
        alt = u[(a1, a2, x)]
        lb.add({t13: 1, t23: 1}, GE, alt[2] - u[a][2], f"p3[{x}]")
        lb.add({t12: 1, t13: 1}, GE, alt[1] + alt[2] - u[a][1] - u[a][2], f"joint[{x}]")
    for y in range(n2):
        if y == a2:
            continue
        worst = min(u[(a1, y, z)][1] for z in range(n3))
        lb.add({t12: 1, t23: -1}, GE, worst - u[a][1], f"p2[{y}]")
    return lb.build()


def sequential_certificate(game: NormalFormGame, plan: SequentialPaymentPlan) -> list:
    """Slack of every constraint the plan must satisfy, recomputed from utilities."""
    a1, a2, a3 = plan.target
    u = game.payoffs
    a = plan.target
    cert = [("t12>=0", plan.pay_to_2), ("t13>=0", plan.pay_to_3), ("t23>=0", plan.pay_2_to_3)]
    labels = game.actions
    for x in range(game.shape[2]):
        if x == a3:
            continue
        alt = u[(a1, a2, x)]
        cert.append((f"p3:{labels[2][a3]}>={labels[2][x]}",
                     u[a][2] + plan.pay_to_3 + plan.pay_2_to_3 - alt[2]))
        cert.append((f"joint:{labels[2][a3]}>={labels[2][x]}",
                     u[a][1] + plan.pay_to_2 + u[a][2] + plan.pay_to_3 - alt[1] - alt[2]))
    for y in range(game.shape[1]):
        if y == a2:
            continue
        worst = min(u[(a1, y, z)][1] for z in range(game.shape[2]))
        cert.append((f"p2:{labels[1][a2]}>={labels[1][y]}",
                     u[a][1] + plan.pay_to_2 - plan.pay_2_to_3 - worst))
    return cert


def replay_sequential(game: NormalFormGame, a1: int, payments: OutcomePayments):
    """Play out the followers' stages after the leader commits to ``(a1, payments)``.

    Player 2 solves its own pure commitment problem against player 3 on the
    induced game; ties go to player 1's residual utility, then lowest index.
    Returns ``(outcome, leader_value, player2_report)``.
    """
    _require_players(game, 3)
    induced = induce_game(game, Commitment(PureAction(a1), payments))
    rep = solve_two_player_pure(induced, secondary=induced.leader_residual)
    a2, a3 = rep.details["outcome"]
    return (a1, a2, a3), induced.leader_residual[(a2, a3)], rep


def _plan_for(game, a, sol):
    a1, a2, a3 = a
    u = game.payoffs
    t12, t13 = sol["t12"], sol["t13"]
    need = max((u[(a1, a2, x)][2] - u[a][2] for x in range(game.shape[2]) if x != a3),
               default=ZERO)
    t23 = max(ZERO, need - t13)
    value = u[a][0] - t12 - t13
    top1 = max(v[0] for v in u.values())
    big_m = game.utility_range(1) + game.utility_range(2) + max(ZERO, top1 - value) + 1
    triggers = []
    for y in range(game.shape[1]):
        if y == a2:
            continue
        col = [u[(a1, y, z)][1] for z in range(game.shape[2])]
        triggers.append((a1, y, col.index(min(col))))
    return SequentialPaymentPlan(a, t12, t13, t23, big_m, triggers), value


def solve_three_player_sequential_pure(game: NormalFormGame, no_payments: bool = False,
                                       parallel: bool = False, lp_sink=None) -> SolveReport:
    """Optimal sequential pure commitment with payments for three players."""
    _require_players(game, 3)
    if no_payments:
        raise ValidationError("3p-seq-pure relies on leader payments; --no-payments is not "
                              "supported for this setting")
    profiles = list(game.profiles())
    lps = [_sequential_lp(game, a) for a in profiles]
    if lp_sink is not None:
        lp_sink.extend(lps)
    sols = _solve_many(lps, parallel)
    feasible = [(a, sol) for a, sol in zip(profiles, sols) if sol.optimal]
    if not feasible:
        raise ConsistencyError("no outcome of the three-player game is implementable")
    plans = [(_plan_for(game, a, sol), a) for a, sol in feasible]
    top = max(value for (_, value), _ in plans)
    chosen = None
    for (plan, value), a in plans:
        if value != top:
            continue
        outcome, realized, _ = replay_sequential(game, a[0], plan.leader_payments())
        if outcome == a and realized == value:
            chosen = plan
            break
    replay_ok = chosen is not None
    if chosen is None:
        chosen = next(plan for (plan, value), _ in plans if value == top)
    commitment = Commitment(PureAction(chosen.target[0]), chosen.leader_payments())
    play = tuple((point_mass(k, m),) for k, m in zip(chosen.target[1:], game.shape[1:]))
    return SolveReport("3p-seq-pure", top, commitment, play,
                       sequential_certificate(game, chosen),
                       details={"plan": chosen, "outcome": chosen.target,
                                "replay_verified": replay_ok})


def stackelberg_sweep(game: NormalFormGame, mixtures) -> Fraction:
    """Leader value of classical commitment (no payments) maximized over given mixtures."""
    best = None
    n2 = game.shape[1]
    for sigma in mixtures:
        utils = [sum((p * game.payoffs[(a, b)][1] for a, p in enumerate(sigma)), ZERO)
                 for b in range(n2)]
        top = max(utils)
        val = max(sum((p * game.payoffs[(a, b)][0] for a, p in enumerate(sigma)), ZERO)
                  for b in range(n2) if utils[b] == top)
        best = val if best is None else max(best, val)
    return best


def simplex_grid(size: int, denominator: int):
    """All distributions over ``size`` points with probabilities in multiples of 1/denominator."""
    for cut in itertools.combinations(range(denominator + size - 1), size - 1):
        prev = -1
        parts = []
        for c in cut + (denominator + size - 1,):
            parts.append(Fraction(c - prev - 1, denominator))
            prev = c
        yield tuple(parts)
