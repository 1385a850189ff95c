import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from commitpay.game import BayesianGame, NormalFormGame

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def fixture_path(name):
    return os.path.join(FIXTURES, name)


def table1():
    return NormalFormGame.from_matrices([[-1, -1, -1], [2, 0, 0]], [[0, -2, 0], [0, 2, 1]],
                                        actions=[["Top", "Bottom"], ["Left", "Middle", "Right"]])


def dominated():
    return NormalFormGame.from_matrices([[3, 1], [2, 0]], [[0, 1], [1, 0]],
                                        actions=[["Top", "Bottom"], ["Left", "Right"]])


def pennies():
    return NormalFormGame.from_matrices([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])


def random_game(rng, shape, lo=-5, hi=5):
    actions = [[f"p{i}a{k}" for k in range(m)] for i, m in enumerate(shape)]
    return NormalFormGame.from_function(
        actions, lambda a: tuple(Fraction(rng.randint(lo, hi)) for _ in shape))


def random_ensemble(count, seed, max_size=4):
    rng = random.Random(seed)
    return [random_game(rng, (rng.randint(1, max_size), rng.randint(1, max_size)))
            for _ in range(count)]


def random_bayesian(rng, shape, types, lo=-4, hi=4):
    """2-player game with ``types = (n_leader_types, n_follower_types)`` and random priors."""
    actions = [[f"a{k}" for k in range(shape[0])], [f"b{k}" for k in range(shape[1])]]
    type_labels = [[f"s{t}" for t in range(types[0])], [f"t{t}" for t in range(types[1])]]
    prior = []
    for n in types:
        w = [rng.randint(1, 4) for _ in range(n)]
        prior.append([Fraction(x, sum(w)) for x in w])
    profiles = [(a, b) for a in range(shape[0]) for b in range(shape[1])]
    payoffs = [tuple({p: Fraction(rng.randint(lo, hi)) for p in profiles} for _ in range(n))
               for n in types]
    return BayesianGame(actions, type_labels, prior, payoffs)


small_ints = st.integers(min_value=-4, max_value=4)


@st.composite
def games(draw, shapes=((1, 3), (1, 3))):
    shape = tuple(draw(st.integers(min_value=lo, max_value=hi)) for lo, hi in shapes)
    n = len(shape)
    import itertools
    profiles = list(itertools.product(*(range(m) for m in shape)))
    vals = draw(st.lists(st.lists(small_ints, min_size=n, max_size=n),
                         min_size=len(profiles), max_size=len(profiles)))
    actions = [[f"p{i}a{k}" for k in range(m)] for i, m in enumerate(shape)]
    return NormalFormGame(actions, {a: tuple(Fraction(x) for x in v)
                                    for a, v in zip(profiles, vals)})


@pytest.fixture
def t1():
    return table1()
