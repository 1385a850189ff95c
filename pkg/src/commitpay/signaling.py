"""Optimal commitment with signaling: the leader commits to a distribution over
action profiles, privately recommends each follower its coordinate, and pays
followers for obeying.  Each setting is one exact LP (or |A_1| of them).
"""
from __future__ import annotations

import math
from fractions import Fraction

from .commit import _solve_many
from .errors import ConsistencyError, SizeError, ValidationError
from .game import (BayesianGame, NormalFormGame, RecommendationPayments, SignalingCommitment,
                   SolveReport, evaluate_signaling, joint_recommendations)
from .lp import EQ, GE, LpBuilder

PROFILE_LIMIT = 10 ** 5
ZERO = Fraction(0)


def _as_leader_typed(game) -> BayesianGame:
    if isinstance(game, NormalFormGame):
        return BayesianGame.from_normal_form(game)
    if not game.leader_types_only:
        raise ValidationError("signaling solvers need single-typed followers")
    return game


def _guard(bg: BayesianGame, limit: int):
    count = math.prod(bg.shape) * len(bg.types[0])
    if count > limit:
        raise SizeError(f"signaling LP over {count} profile variables exceeds the limit of {limit}")
    if bg.n_players < 2:
        raise ValidationError("signaling needs at least one follower")


def _signaling_lp(bg: BayesianGame, no_payments: bool, leader_action=None):
    n = bg.n_players
    typed = len(bg.types[0]) > 1
    profiles = list(bg.profiles())
    lb = LpBuilder("signaling" if leader_action is None else f"signaling-pure-{leader_action}")
    pvars = [{a: lb.var(f"p[{t}][{bg.label(a)}]" if typed else f"p[{bg.label(a)}]")
              for a in profiles} for t in range(len(bg.types[0]))]
    tvars = [[lb.var(f"t{i + 1}[{bg.actions[i][k]}]", 0, 0 if no_payments else None)
              for k in range(bg.shape[i])] for i in range(1, n)]
    obj = {}
    for t, w in enumerate(bg.prior[0]):
        for a in profiles:
            obj[pvars[t][a]] = w * bg.payoffs[0][t][a]
    for row in tvars:
        for v in row:
            obj[v] = -1
    lb.maximize(obj)
    for t in range(len(bg.types[0])):
        lb.add({v: 1 for v in pvars[t].values()}, EQ, 1, f"simplex[{t}]" if typed else "simplex")
        if leader_action is not None:
            lb.add({pvars[t][a]: 1 for a in profiles if a[0] == leader_action}, EQ, 1,
                   f"pure[{leader_action}]")
    for i in range(1, n):
        table = bg.payoffs[i][0]
        for k in range(bg.shape[i]):
            for k2 in range(bg.shape[i]):
                if k2 == k:
                    continue
                terms = {tvars[i - 1][k]: 1}
                for t, w in enumerate(bg.prior[0]):
                    for a in profiles:
                        if a[i] != k:
                            continue
                        dev = a[:i] + (k2,) + a[i + 1:]
                        c = w * (table[a] - table[dev])
                        if c:
                            terms[pvars[t][a]] = terms.get(pvars[t][a], 0) + c
                lb.add(terms, GE, 0, f"ic{i + 1}[{bg.actions[i][k]}>={bg.actions[i][k2]}]")
    return lb.build(), pvars, tvars


def marginals(bg: BayesianGame, joint: dict) -> tuple:
    """Per-follower recommendation probabilities."""
    out = []
    for i in range(1, bg.n_players):
        row = [ZERO] * bg.shape[i]
        for a, p in joint.items():
            row[a[i]] += p
        out.append(tuple(row))
    return tuple(out)


def _recover(bg, sol, pvars, tvars):
    dists = tuple({a: sol[v] for a, v in pv.items() if sol[v]} for pv in pvars)
    joint = {}
    for t, d in enumerate(dists):
        for a, p in d.items():
            joint[a] = joint.get(a, ZERO) + bg.prior[0][t] * p
    rec = marginals(bg, joint)
    expected = tuple(tuple(sol[v] for v in row) for row in tvars)
    amounts = []
    for i, row in enumerate(expected):
        out = []
        for k, tv in enumerate(row):
            pr = rec[i][k]
            if pr:
                out.append(tv / pr)
            elif tv:
                raise ConsistencyError("positive payment on a never-recommended action")
            else:
                out.append(None)
        amounts.append(tuple(out))
    return SignalingCommitment(dists, RecommendationPayments(tuple(amounts)), expected), rec


def check_incentive_compatibility(game, commitment: SignalingCommitment) -> list:
    """Exact conditional slack of every obedience constraint for recommended actions.

    A recommended action's constraint reads: expected utility of obeying plus
    the obedience payment is at least the expected utility of each deviation,
    conditional on the recommendation.
    """
    bg = _as_leader_typed(game)
    joint = joint_recommendations(bg, commitment)
    rec = marginals(bg, joint)
    cert = []
    for i in range(1, bg.n_players):
        table = bg.payoffs[i][0]
        labels = bg.actions[i]
        pays = commitment.payments.amounts[i - 1]
        for k in range(bg.shape[i]):
            pr = rec[i - 1][k]
            if not pr:
                continue
            gains = [ZERO] * bg.shape[i]
            for a, p in joint.items():
                if a[i] != k:
                    continue
                for k2 in range(bg.shape[i]):
                    dev = a[:i] + (k2,) + a[i + 1:]
                    gains[k2] += p * (table[a] - table[dev])
            pay = pays[k] or ZERO
            for k2 in range(bg.shape[i]):
                if k2 != k:
                    cert.append((f"player{i + 1}:{labels[k]}>={labels[k2]}", gains[k2] / pr + pay))
    return cert


def ic_passes(certificate) -> bool:
    return all(slack >= 0 for _, slack in certificate)


def _report(setting, bg, game, sol, pvars, tvars, extra):
    sc, rec = _recover(bg, sol, pvars, tvars)
    value = evaluate_signaling(bg, sc)
    if value != sol.objective_value:
        raise ConsistencyError("recovered signaling commitment does not reproduce the LP value")
    cert = check_incentive_compatibility(bg, sc)
    if not ic_passes(cert):
        raise ConsistencyError("signaling LP optimum violates obedience")
    play = tuple((m,) for m in rec)
    return SolveReport(setting, value, sc, play, cert, details=extra)


def solve_signaling_mixed(game, no_payments: bool = False, limit: int = PROFILE_LIMIT,
                          lp_sink=None) -> SolveReport:
    """Leader-optimal recommendation scheme with obedience payments."""
    bg = _as_leader_typed(game)
    _guard(bg, limit)
    lp, pvars, tvars = _signaling_lp(bg, no_payments)
    if lp_sink is not None:
        lp_sink.append(lp)
    (sol,) = _solve_many([lp])
    setting = "sig-leader-types" if len(bg.types[0]) > 1 else "sig-mixed"
    return _report(setting, bg, game, sol, pvars, tvars, {"no_payments": no_payments})


def solve_signaling_leader_types_mixed(game: BayesianGame, no_payments: bool = False,
                                       limit: int = PROFILE_LIMIT, lp_sink=None) -> SolveReport:
    """Per-type recommendation schemes; obedience holds in expectation over leader types."""
    rep = solve_signaling_mixed(game, no_payments, limit, lp_sink)
    rep.setting = "sig-leader-types"
    return rep


def solve_signaling_pure(game, no_payments: bool = False, limit: int = PROFILE_LIMIT,
                         parallel: bool = False, lp_sink=None) -> SolveReport:
    """Signaling when the leader's own coordinate is a fixed pure action; best action wins."""
    bg = _as_leader_typed(game)
    if len(bg.types[0]) > 1:
        raise ValidationError("sig-pure is defined for a leader without types")
    _guard(bg, limit)
    built = [_signaling_lp(bg, no_payments, leader_action=a1) for a1 in range(bg.shape[0])]
    if lp_sink is not None:
        lp_sink.extend(lp for lp, _, _ in built)
    sols = _solve_many([lp for lp, _, _ in built], parallel)
    best = None
    for a1, sol in enumerate(sols):
        if sol.optimal and (best is None or sol.objective_value > sols[best].objective_value):
            best = a1
    if best is None:
        raise ConsistencyError("no leader action admits an obedient scheme")
    _, pvars, tvars = built[best]
    values = {a1: (s.objective_value if s.optimal else None) for a1, s in enumerate(sols)}
    return _report("sig-pure", bg, game, sols[best], pvars, tvars,
                   {"leader_action": best, "values_by_action": values,
                    "no_payments": no_payments})
