"""Exact Nash equilibria of small bimatrix games and brute-force commitment search.

Equilibria come from vertex enumeration of the two best-response polytopes
(after shifting payoffs positive): completely labeled vertex pairs are exactly
the extreme equilibria.  Every equilibrium component is a union of products
of convex hulls of extreme equilibria, so any bilinear objective (such as the
leader's utility in an induced game) is maximized at a listed pair.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from .commit import simplex_grid, two_player_certificate
from .errors import SizeError, ValidationError
from .game import (Commitment, FollowerActionPayments, Mixture, NormalFormGame, OutcomePayments,
                   SolveReport, induce_game, point_mass)

ZERO = Fraction(0)
COMPLETE, REPRESENTATIVES = "Complete", "VertexRepresentativesOnly"
DEFAULT_CAP = 6


@dataclass
class EquilibriumSet:
    equilibria: list  # list of (row mixture, column mixture)
    flag: str

    def __len__(self):
        return len(self.equilibria)


def _int_matrix(rows):
    den = 1
    for row in rows:
        for v in row:
            den = den * v.denominator // math.gcd(den, v.denominator)
    return [[int(v * den) for v in row] for row in rows], den


def _vertices(M):
    """Vertices of {z >= 0, M z <= 1} other than the origin, with their tight labels.

    ``M`` has one row per inequality; labels 0..d-1 are coordinates z_k = 0 and
    d.. are the rows of M.
    """
    rows_m = len(M)
    d = len(M[0])
    Mi, scale = _int_matrix(M)
    found = {}
    for tight in itertools.combinations(range(d + rows_m), d):
        sys_rows, rhs = [], []
        for lab in tight:
            if lab < d:
                sys_rows.append([int(k == lab) for k in range(d)])
                rhs.append(0)
            else:
                sys_rows.append(Mi[lab - d])
                rhs.append(scale)
        res = _kernels.solve_square(sys_rows, rhs)
        if res is None:
            continue
        nums, den = res
        z = tuple(Fraction(v, den) for v in nums)
        if any(v < 0 for v in z) or not any(z):
            continue
        if z in found:
            continue
        slack_ok = True
        labels = {k for k in range(d) if z[k] == 0}
        for r, row in enumerate(M):
            s = sum((a * b for a, b in zip(row, z) if b), ZERO)
            if s > 1:
                slack_ok = False
                break
            if s == 1:
                labels.add(d + r)
        if slack_ok:
            found[z] = frozenset(labels)
    return found


def _check_cap(shape, cap):
    if max(shape) > cap:
        raise SizeError(f"equilibrium enumeration limited to {cap} actions per player, got {shape}")


def enumerate_nash_two_player(game: NormalFormGame, cap: int = DEFAULT_CAP) -> EquilibriumSet:
    """All extreme Nash equilibria of a bimatrix game, exactly."""
    if game.n_players != 2:
        raise ValidationError("equilibrium enumeration needs a 2-player game")
    m, n = game.shape
    _check_cap(game.shape, cap)
    A = [[game.payoffs[(i, j)][0] for j in range(n)] for i in range(m)]
    B = [[game.payoffs[(i, j)][1] for j in range(n)] for i in range(m)]
    shift_a = 1 - min(min(r) for r in A)
    shift_b = 1 - min(min(r) for r in B)
    A1 = [[v + shift_a for v in r] for r in A]
    B1 = [[v + shift_b for v in r] for r in B]
    # P: x in R^m, labels i (x_i = 0) and m + j ((B^T x)_j = 1)
    P = _vertices([[B1[i][j] for i in range(m)] for j in range(n)])
    # Q: y in R^n, labels n + i ((A y)_i = 1) and j (y_j = 0); remap to the P labeling
    Qraw = _vertices(A1)
    Q = {y: frozenset((lab - n) if lab >= n else (m + lab) for lab in labs)
         for y, labs in Qraw.items()}
    everything = frozenset(range(m + n))
    eq = []
    xs, ys = {}, {}
    for x, lx in sorted(P.items()):
        for y, ly in sorted(Q.items()):
            if lx | ly == everything:
                sx, sy = sum(x), sum(y)
                pair = (tuple(v / sx for v in x), tuple(v / sy for v in y))
                eq.append(pair)
                xs[pair[0]] = xs.get(pair[0], 0) + 1
                ys[pair[1]] = ys.get(pair[1], 0) + 1
    eq.sort()
    flag = REPRESENTATIVES if any(c > 1 for c in xs.values()) or any(
        c > 1 for c in ys.values()) else COMPLETE
    for pair in eq:
        if min(nash_slacks(game, pair)) < 0:
            raise AssertionError("enumerated profile failed the best-response check")
    return EquilibriumSet(eq, flag)


def mixed_utility(game: NormalFormGame, i: int, mixtures) -> Fraction:
    total = ZERO
    for a in game.profiles():
        p = Fraction(1)
        for k, ak in enumerate(a):
            p *= mixtures[k][ak]
            if not p:
                break
        if p:
            total += p * game.payoffs[a][i]
    return total


def nash_slacks(game: NormalFormGame, mixtures) -> list:
    """For each player and pure deviation: equilibrium utility minus deviation utility."""
    out = []
    for i in range(game.n_players):
        base = mixed_utility(game, i, mixtures)
        for k in range(game.shape[i]):
            dev = list(mixtures)
            dev[i] = point_mass(k, game.shape[i])
            out.append(base - mixed_utility(game, i, dev))
    return out


def is_nash(game: NormalFormGame, mixtures) -> bool:
    return min(nash_slacks(game, mixtures)) >= 0


def leader_value_in(game: NormalFormGame, pair) -> Fraction:
    return mixed_utility(game, 0, pair)


def best_nash_two_player(game: NormalFormGame, cap: int = DEFAULT_CAP):
    """Leader-best Nash equilibrium of a 2-player base game: ``(value, pair, flag)``."""
    es = enumerate_nash_two_player(game, cap)
    best = max(es.equilibria, key=lambda pr: leader_value_in(game, pr))
    return leader_value_in(game, best), best, es.flag


def best_nash_for_leader(game: NormalFormGame, commitment: Commitment,
                         cap: int = DEFAULT_CAP) -> SolveReport:
    """Followers play the leader-best Nash equilibrium of the induced two-follower game."""
    if game.n_players != 3:
        raise ValidationError("best_nash_for_leader expects a 3-player game")
    induced = induce_game(game, commitment)
    es = enumerate_nash_two_player(induced, cap)
    res = induced.leader_residual
    best_val, best_pair = None, None
    for pair in es.equilibria:
        val = sum((pair[0][b] * pair[1][c] * res[(b, c)]
                   for b in range(induced.shape[0]) for c in range(induced.shape[1])
                   if pair[0][b] and pair[1][c]), ZERO)
        if best_val is None or val > best_val:
            best_val, best_pair = val, pair
    slacks = nash_slacks(induced, best_pair)
    labels = [f"player{i + 2}:{lab}" for i in range(2) for lab in induced.actions[i]]
    cert = list(zip(labels, slacks))
    return SolveReport("single-commit", best_val, commitment, ((best_pair[0],), (best_pair[1],)),
                       cert, details={"flag": es.flag, "equilibria": len(es)})


def best_nash_with_payments(game: NormalFormGame, payments: OutcomePayments,
                            cap: int = DEFAULT_CAP):
    """Leader-best Nash equilibrium when the leader commits to payments but not to an action."""
    n = game.n_players
    if n != 2:
        raise ValidationError("payments-only play is implemented for 2-player games")
    shifted = NormalFormGame(game.actions, {
        a: (v[0] - payments.total(a), v[1] + payments.to(1, a)) for a, v in game.payoffs.items()})
    return best_nash_two_player(shifted, cap)


# ---------------------------------------------------------------------------
# brute-force commitment


def grid_denominator(step: Fraction) -> int:
    step = Fraction(step)
    if step <= 0 or step.numerator != 1:
        raise ValidationError(f"grid step must be 1/k for a positive integer k, got {step}")
    return step.denominator


def _follower_response(utils, leader_vals):
    top = max(utils)
    return max((b for b in range(len(utils)) if utils[b] == top),
               key=lambda b: (leader_vals[b], -b))


def brute_force_commitment(game: NormalFormGame, step=Fraction(1, 16), cap=None,
                           budget: int = 10 ** 6) -> SolveReport:
    """Best commitment among grid mixtures and grid follower-action payments (a lower bound).

    Paying only for the action the follower ends up playing is never worse than
    any other payment vector, and for a fixed mixture and target action the
    cheapest grid payment making that action weakly best dominates larger ones,
    so trying zero payment plus that cheapest amount per action is exhaustive
    over the payment grid.
    """
    if game.n_players != 2:
        raise ValidationError("brute-force commitment expects a 2-player game")
    k = grid_denominator(step)
    step = Fraction(1, k)
    if cap is None:
        cap = game.utility_range(1)
    cap = Fraction(cap)
    n1, n2 = game.shape
    count = math.comb(n1 + k - 1, n1 - 1) * (n2 + 1)
    if count > budget:
        raise SizeError(f"grid has {count} cells, budget is {budget}")
    best = None
    for sigma in simplex_grid(n1, k):
        utils = [sum((p * game.payoffs[(a, b)][1] for a, p in enumerate(sigma) if p), ZERO)
                 for b in range(n2)]
        lead = [sum((p * game.payoffs[(a, b)][0] for a, p in enumerate(sigma) if p), ZERO)
                for b in range(n2)]
        options = [(None, ZERO)]
        top = max(utils)
        for b in range(n2):
            deficit = top - utils[b]
            if deficit:
                amount = _ceil_to(deficit, step)
                if amount <= cap:
                    options.append((b, amount))
        for target, amount in options:
            u = list(utils)
            lv = list(lead)
            if target is not None:
                u[target] += amount
                lv[target] -= amount
            resp = _follower_response(u, lv)
            val = lv[resp]
            if best is None or val > best[0]:
                best = (val, sigma, target, amount, resp)
    val, sigma, target, amount, resp = best
    amounts = [ZERO] * n2
    if target is not None:
        amounts[target] = amount
    commitment = Commitment(Mixture(sigma), FollowerActionPayments(amounts))
    play = ((point_mass(resp, n2),),)
    return SolveReport("brute-force", val, commitment, play,
                       two_player_certificate(game, commitment, play), bound="lower",
                       details={"step": step, "cap": cap})


def _ceil_to(x: Fraction, step: Fraction) -> Fraction:
    q = x / step
    return step * -((-q.numerator) // q.denominator)


