"""Games, commitments, payments and exact expected-utility evaluation.

Player indices are 0-based internally: player 0 is the leader, players
``1..n-1`` are the followers.  Every number is a :class:`fractions.Fraction`.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import SchemaError, ValidationError

Profile = tuple  # tuple[int, ...] of action indices, one per player

_RATIONAL_RE = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")


def as_rational(x) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.  Floats are refused."""
    if isinstance(x, bool):
        raise ValidationError(f"not a rational: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str) and _RATIONAL_RE.match(x):
        value = Fraction(x.replace(" ", ""))
        return value
    raise ValidationError(f"not a rational literal: {x!r}")


def fmt(x: Fraction) -> str:
    return str(Fraction(x))


def check_distribution(probs: Sequence[Fraction], what: str = "distribution") -> tuple:
    probs = tuple(as_rational(p) for p in probs)
    if any(p < 0 for p in probs):
        raise ValidationError(f"{what} has a negative entry")
    if sum(probs) != 1:
        raise ValidationError(f"{what} sums to {sum(probs)}, not 1")
    return probs


def point_mass(k: int, size: int) -> tuple:
    return tuple(Fraction(int(j == k)) for j in range(size))


# ---------------------------------------------------------------------------
# Games


@dataclass(frozen=True)
class NormalFormGame:
    """A finite game ``(A, u)``; ``payoffs[a][i]`` is player i's utility at profile a."""

    actions: tuple
    payoffs: Mapping

    def __post_init__(self):
        actions = tuple(tuple(str(x) for x in acts) for acts in self.actions)
        object.__setattr__(self, "actions", actions)
        problems = []
        if not actions:
            problems.append("game has no players")
        for i, acts in enumerate(actions):
            if not acts:
                problems.append(f"player {i + 1} has an empty action set")
        if problems:
            raise SchemaError(problems)
        n = len(actions)
        table = {}
        for a in itertools.product(*(range(len(acts)) for acts in actions)):
            vec = self.payoffs.get(a)
            if vec is None:
                problems.append(f"missing utilities for profile {self.label(a)}")
                continue
            if len(vec) != n:
                problems.append(f"profile {self.label(a)} has {len(vec)} utilities, expected {n}")
                continue
            table[a] = tuple(as_rational(x) for x in vec)
        for a in set(self.payoffs) - set(table):
            if not (isinstance(a, tuple) and len(a) == n and all(
                    isinstance(k, int) and 0 <= k < len(actions[i]) for i, k in enumerate(a))):
                problems.append(f"utilities given for unknown profile {a!r}")
        if problems:
            raise SchemaError(problems)
        object.__setattr__(self, "payoffs", table)

    @property
    def n_players(self) -> int:
        return len(self.actions)

    @property
    def shape(self) -> tuple:
        return tuple(len(acts) for acts in self.actions)

    def profiles(self):
        return itertools.product(*(range(k) for k in self.shape))

    def u(self, i: int, a: Profile) -> Fraction:
        return self.payoffs[a][i]

    def label(self, a: Profile) -> str:
        return "|".join(self.actions[i][k] for i, k in enumerate(a))

    def utility_range(self, i: int) -> Fraction:
        vals = [vec[i] for vec in self.payoffs.values()]
        return max(vals) - min(vals)

    @classmethod
    def from_matrices(cls, *matrices, actions=None) -> "NormalFormGame":
        """Build a 2-player game from a row-player and a column-player matrix."""
        A, B = matrices
        rows, cols = len(A), len(A[0])
        if actions is None:
            actions = ([f"r{i}" for i in range(rows)], [f"c{j}" for j in range(cols)])
        payoffs = {(i, j): (A[i][j], B[i][j]) for i in range(rows) for j in range(cols)}
        return cls(actions, payoffs)

    @classmethod
    def from_function(cls, actions, fn) -> "NormalFormGame":
        actions = tuple(tuple(acts) for acts in actions)
        payoffs = {a: tuple(fn(a)) for a in itertools.product(*(range(len(x)) for x in actions))}
        return cls(actions, payoffs)


@dataclass(frozen=True)
class BayesianGame:
    """Finite Bayesian game.

    ``payoffs[i][t]`` maps each action profile to player i's utility when i has
    type index ``t``.  ``prior[i]`` is the distribution over ``types[i]``.
    """

    actions: tuple
    types: tuple
    prior: tuple
    payoffs: tuple
    metadata: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        actions = tuple(tuple(str(x) for x in acts) for acts in self.actions)
        types = tuple(tuple(str(x) for x in ts) for ts in self.types)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "types", types)
        problems = []
        n = len(actions)
        if not n or any(not acts for acts in actions):
            problems.append("every player needs a nonempty action set")
        if len(types) != n or len(self.prior) != n or len(self.payoffs) != n:
            problems.append("types, prior and payoffs must have one entry per player")
            raise SchemaError(problems)
        prior = []
        for i, (ts, pi) in enumerate(zip(types, self.prior)):
            if not ts:
                problems.append(f"player {i + 1} has no types")
            pi = tuple(as_rational(p) for p in pi)
            if len(pi) != len(ts):
                problems.append(f"player {i + 1}: prior length {len(pi)} != {len(ts)} types")
            elif any(p < 0 for p in pi) or sum(pi) != 1:
                problems.append(f"player {i + 1}: prior must be nonnegative and sum to 1 "
                                f"(sums to {sum(pi)})")
            prior.append(pi)
        profiles = list(itertools.product(*(range(len(acts)) for acts in actions)))
        payoffs = []
        for i in range(n):
            per_type = []
            if len(self.payoffs[i]) != len(types[i]):
                problems.append(f"player {i + 1}: utilities for {len(self.payoffs[i])} types, "
                                f"expected {len(types[i])}")
                payoffs.append(())
                continue
            for t, table in enumerate(self.payoffs[i]):
                clean = {}
                for a in profiles:
                    if a not in table:
                        problems.append(f"player {i + 1} type {types[i][t]}: missing profile "
                                        + "|".join(actions[j][k] for j, k in enumerate(a)))
                    else:
                        clean[a] = as_rational(table[a])
                per_type.append(clean)
            payoffs.append(tuple(per_type))
        if problems:
            raise SchemaError(problems)
        object.__setattr__(self, "prior", tuple(prior))
        object.__setattr__(self, "payoffs", tuple(payoffs))

    @property
    def n_players(self) -> int:
        return len(self.actions)

    @property
    def shape(self) -> tuple:
        return tuple(len(acts) for acts in self.actions)

    def profiles(self):
        return itertools.product(*(range(k) for k in self.shape))

    def u(self, i: int, t: int, a: Profile) -> Fraction:
        return self.payoffs[i][t][a]

    def label(self, a: Profile) -> str:
        return "|".join(self.actions[i][k] for i, k in enumerate(a))

    @property
    def leader_types_only(self) -> bool:
        return all(len(ts) == 1 for ts in self.types[1:])

    @property
    def follower_types_only(self) -> bool:
        return len(self.types[0]) == 1

    def type_game(self, thetas: Sequence[int]) -> NormalFormGame:
        """The normal-form game played when the type profile is ``thetas``."""
        return NormalFormGame(self.actions, {
            a: tuple(self.payoffs[i][t][a] for i, t in enumerate(thetas))
            for a in self.profiles()})

    def collapse(self) -> NormalFormGame:
        if any(len(ts) != 1 for ts in self.types):
            raise ValidationError("only single-type Bayesian games collapse to normal form")
        return self.type_game([0] * self.n_players)

    @classmethod
    def from_normal_form(cls, game: NormalFormGame) -> "BayesianGame":
        n = game.n_players
        return cls(game.actions, [["*"]] * n, [[1]] * n,
                   [({a: game.payoffs[a][i] for a in game.profiles()},) for i in range(n)])


AnyGame = Union[NormalFormGame, BayesianGame]


# ---------------------------------------------------------------------------
# Payments


def _nonneg(values, what):
    for v in values:
        if v is not None and v < 0:
            raise ValidationError(f"{what}: negative payment {v}")


@dataclass(frozen=True)
class OutcomePayments:
    """P(a) in R^{n-1}_{>=0}; profiles absent from ``amounts`` pay nothing."""

    amounts: Mapping

    def __post_init__(self):
        clean = {tuple(a): tuple(as_rational(x) for x in vec) for a, vec in self.amounts.items()}
        for vec in clean.values():
            _nonneg(vec, "outcome payments")
        object.__setattr__(self, "amounts", clean)

    def to(self, i: int, a: Profile) -> Fraction:
        """Payment to follower i (1-based follower index as a player index) at a."""
        vec = self.amounts.get(a)
        return vec[i - 1] if vec else Fraction(0)

    def total(self, a: Profile) -> Fraction:
        vec = self.amounts.get(a)
        return sum(vec, Fraction(0)) if vec else Fraction(0)


@dataclass(frozen=True)
class FollowerActionPayments:
    """Two-player payments that depend only on the follower's action."""

    amounts: tuple

    def __post_init__(self):
        clean = tuple(as_rational(x) for x in self.amounts)
        _nonneg(clean, "follower-action payments")
        object.__setattr__(self, "amounts", clean)

    def to(self, i: int, a: Profile) -> Fraction:
        return self.amounts[a[1]] if i == 1 else Fraction(0)

    def total(self, a: Profile) -> Fraction:
        return self.amounts[a[1]]


@dataclass(frozen=True)
class RecommendationPayments:
    """P_i(a_i) for following a recommendation; ``None`` marks never-recommended actions."""

    amounts: tuple  # amounts[i - 1][a_i]

    def __post_init__(self):
        clean = tuple(tuple(None if x is None else as_rational(x) for x in row)
                      for row in self.amounts)
        for row in clean:
            _nonneg(row, "recommendation payments")
        object.__setattr__(self, "amounts", clean)

    def to(self, i: int, a: Profile) -> Fraction:
        x = self.amounts[i - 1][a[i]]
        return Fraction(0) if x is None else x

    def total(self, a: Profile) -> Fraction:
        return sum((self.to(i, a) for i in range(1, len(self.amounts) + 1)), Fraction(0))


PaymentFunction = Union[OutcomePayments, FollowerActionPayments, RecommendationPayments]


def zero_payments(game) -> OutcomePayments:
    return OutcomePayments({})


# ---------------------------------------------------------------------------
# Commitments


@dataclass(frozen=True)
class PureAction:
    action: int


@dataclass(frozen=True)
class Mixture:
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "probs", check_distribution(self.probs, "leader mixture"))


@dataclass(frozen=True)
class TypedPure:
    actions: tuple

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(int(k) for k in self.actions))


@dataclass(frozen=True)
class TypedMixture:
    mixtures: tuple

    def __post_init__(self):
        object.__setattr__(self, "mixtures", tuple(
            check_distribution(m, f"leader mixture for type {t}")
            for t, m in enumerate(self.mixtures)))


Strategy = Union[PureAction, Mixture, TypedPure, TypedMixture]


@dataclass(frozen=True)
class Commitment:
    strategy: Strategy
    payments: PaymentFunction

    def leader_mixtures(self, n_actions: int, n_types: int = 1) -> tuple:
        """One mixture over leader actions per leader type."""
        s = self.strategy
        if isinstance(s, PureAction):
            return (point_mass(s.action, n_actions),) * n_types
        if isinstance(s, Mixture):
            if len(s.probs) != n_actions:
                raise SchemaError(f"mixture has {len(s.probs)} entries for {n_actions} actions")
            return (s.probs,) * n_types
        if isinstance(s, TypedPure):
            if len(s.actions) != n_types:
                raise SchemaError(f"typed strategy covers {len(s.actions)} of {n_types} types")
            return tuple(point_mass(k, n_actions) for k in s.actions)
        if len(s.mixtures) != n_types:
            raise SchemaError(f"typed strategy covers {len(s.mixtures)} of {n_types} types")
        return s.mixtures


@dataclass(frozen=True)
class SignalingCommitment:
    """A recommendation scheme plus recommendation-conditional payments.

    ``distributions[t]`` maps action profiles to probabilities when the leader
    has type ``t`` (a single entry for a normal-form game).  ``expected_payments``
    holds the ex-ante amounts t_i(a_i) the payments were recovered from.
    """

    distributions: tuple
    payments: RecommendationPayments
    expected_payments: tuple = ()

    def __post_init__(self):
        clean = []
        for t, dist in enumerate(self.distributions):
            d = {tuple(a): as_rational(p) for a, p in dist.items() if as_rational(p) != 0}
            check_distribution(list(d.values()), f"recommendation distribution {t}")
            clean.append(d)
        object.__setattr__(self, "distributions", tuple(clean))

    @property
    def distribution(self):
        if len(self.distributions) != 1:
            raise ValidationError("typed signaling commitment has one distribution per type")
        return self.distributions[0]


@dataclass
class SolveReport:
    """Result of a solver run.

    ``follower_play[i][t]`` is the mixture played (or recommended, for
    signaling) by follower ``i + 1`` of type ``t``.  ``certificate`` lists
    ``(constraint_id, slack)`` for every incentive constraint, recomputed
    directly from the commitment rather than read off an LP.
    """

    setting: str
    value: Fraction
    commitment: object
    follower_play: tuple
    certificate: list
    bound: str = "exact"
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Induced games and evaluation


@dataclass(frozen=True)
class InducedGame(NormalFormGame):
    """The followers' game G[sigma_1, P]; ``leader_residual`` holds v_1^P per follower profile."""

    leader_residual: Mapping = field(default_factory=dict)


def _payment_vector(payments, a: Profile, n: int) -> tuple:
    return tuple(payments.to(i, a) for i in range(1, n))


def induce_game(game: NormalFormGame, commitment: Commitment) -> InducedGame:
    """Followers' game after the leader commits to a pure action or mixture and payments."""
    n = game.n_players
    if n < 2:
        raise ValidationError("inducing a follower game needs at least two players")
    if isinstance(commitment.strategy, (TypedPure, TypedMixture)):
        raise ValidationError("typed leader strategies do not induce a normal-form game")
    payments = commitment.payments
    if isinstance(payments, OutcomePayments):
        for a, vec in payments.amounts.items():
            if len(a) != n or len(vec) != n - 1 or any(
                    not 0 <= k < m for k, m in zip(a, game.shape)):
                raise SchemaError(f"payment entry {a!r} does not match the game's dimensions")
    elif isinstance(payments, FollowerActionPayments):
        if n != 2 or len(payments.amounts) != game.shape[1]:
            raise SchemaError("follower-action payments need a 2-player game and one amount "
                              "per follower action")
    sigma = commitment.leader_mixtures(game.shape[0])[0]
    follower_utils = {}
    residual = {}
    for rest in itertools.product(*(range(k) for k in game.shape[1:])):
        vec = [Fraction(0)] * (n - 1)
        res = Fraction(0)
        for a1, p in enumerate(sigma):
            if not p:
                continue
            a = (a1,) + rest
            pay = _payment_vector(payments, a, n)
            for i in range(1, n):
                vec[i - 1] += p * (game.payoffs[a][i] + pay[i - 1])
            res += p * (game.payoffs[a][0] - sum(pay))
        follower_utils[rest] = tuple(vec)
        residual[rest] = res
    return InducedGame(game.actions[1:], follower_utils, leader_residual=residual)


def _as_bayesian(game: AnyGame) -> BayesianGame:
    return game if isinstance(game, BayesianGame) else BayesianGame.from_normal_form(game)


def normalize_follower_play(game: AnyGame, follower_play) -> tuple:
    """Accept per-follower mixtures (untyped) or per-follower, per-type mixtures."""
    bg = _as_bayesian(game)
    out = []
    if len(follower_play) != bg.n_players - 1:
        raise ValidationError(f"expected play for {bg.n_players - 1} followers")
    for i, play in enumerate(follower_play, start=1):
        n_types = len(bg.types[i])
        if play and not isinstance(play[0], (tuple, list)):
            play = (play,) * n_types
        if len(play) != n_types:
            raise ValidationError(f"follower {i + 1}: play given for {len(play)} of {n_types} types")
        out.append(tuple(check_distribution(m, f"follower {i + 1} play") for m in play))
        for m in out[-1]:
            if len(m) != bg.shape[i]:
                raise ValidationError(f"follower {i + 1}: mixture length {len(m)} != {bg.shape[i]}")
    return tuple(out)


def evaluate_leader(game: AnyGame, commitment: Commitment, follower_play) -> Fraction:
    """Exact ex-ante leader utility after payments.

    Followers play independently: ``follower_play[i][t]`` is follower ``i+1``'s
    mixture when it has type ``t``.  Payments are charged on realized outcomes.
    """
    bg = _as_bayesian(game)
    plays = normalize_follower_play(bg, follower_play)
    sigmas = commitment.leader_mixtures(bg.shape[0], len(bg.types[0]))
    payments = commitment.payments
    total = Fraction(0)
    for thetas in itertools.product(*(range(len(ts)) for ts in bg.types)):
        weight = Fraction(1)
        for i, t in enumerate(thetas):
            weight *= bg.prior[i][t]
        if not weight:
            continue
        mixes = [sigmas[thetas[0]]] + [plays[i - 1][thetas[i]] for i in range(1, bg.n_players)]
        leader_table = bg.payoffs[0][thetas[0]]
        for a in bg.profiles():
            p = weight
            for i, k in enumerate(a):
                p *= mixes[i][k]
                if not p:
                    break
            if p:
                total += p * (leader_table[a] - payments.total(a))
    return total


def evaluate_signaling(game: AnyGame, commitment: SignalingCommitment) -> Fraction:
    """Ex-ante leader utility when every follower obeys its recommendation."""
    bg = _as_bayesian(game)
    if len(commitment.distributions) != len(bg.types[0]):
        raise ValidationError("one recommendation distribution per leader type is required")
    total = Fraction(0)
    for t, dist in enumerate(commitment.distributions):
        w = bg.prior[0][t]
        for a, p in dist.items():
            total += w * p * (bg.payoffs[0][t][a] - commitment.payments.total(a))
    return total


def joint_recommendations(game: AnyGame, commitment: SignalingCommitment) -> dict:
    """Prior-weighted distribution over action profiles (what followers face)."""
    bg = _as_bayesian(game)
    joint = {}
    for t, dist in enumerate(commitment.distributions):
        for a, p in dist.items():
            joint[a] = joint.get(a, Fraction(0)) + bg.prior[0][t] * p
    return joint
