"""Game generators from combinatorial problems, plus witness checks.

Each generator turns a graph or pricing instance into a game whose optimal
commitment value answers the source question.  The brute-force solvers for
the source problems live here too; tests use them as ground truth.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import _kernels
from .errors import SchemaError, ValidationError
from .game import BayesianGame, NormalFormGame, as_rational

ZERO = Fraction(0)
CONSISTENT = "Consistent"


@dataclass(frozen=True)
class Graph:
    vertices: tuple
    edges: tuple  # tuple of frozenset({u, v})

    def __post_init__(self):
        verts = tuple(str(v) for v in self.vertices)
        if len(set(verts)) != len(verts):
            raise SchemaError("duplicate vertex names")
        seen = []
        for e in self.edges:
            e = tuple(str(v) for v in e)
            if len(e) != 2 or e[0] == e[1] or any(v not in verts for v in e):
                raise SchemaError(f"bad edge {e!r}")
            fe = frozenset(e)
            if fe not in seen:
                seen.append(fe)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(seen))

    def edge_label(self, e) -> str:
        u, v = sorted(e, key=self.vertices.index)
        return f"{u}-{v}"


@dataclass(frozen=True)
class BipartiteGraph:
    left: tuple
    right: tuple
    edges: tuple  # pairs (left vertex, right vertex)

    def __post_init__(self):
        left = tuple(str(v) for v in self.left)
        right = tuple(str(v) for v in self.right)
        if len(set(left + right)) != len(left) + len(right):
            raise SchemaError("vertex names must be distinct across both sides")
        edges = []
        for e in self.edges:
            u, v = str(e[0]), str(e[1])
            if u in right and v in left:
                u, v = v, u
            if u not in left or v not in right:
                raise SchemaError(f"edge {e!r} does not cross the two sides")
            if (u, v) not in edges:
                edges.append((u, v))
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "edges", tuple(edges))


@dataclass(frozen=True)
class PricingInstance:
    """Unit-demand buyers: ``support`` lists (value vector, probability)."""

    items: int
    support: tuple
    threshold: Fraction = ZERO

    def __post_init__(self):
        clean = []
        for values, prob in self.support:
            values = tuple(as_rational(v) for v in values)
            if len(values) != self.items or any(v < 0 for v in values):
                raise SchemaError("every value vector needs one nonnegative value per item")
            clean.append((values, as_rational(prob)))
        total = sum((p for _, p in clean), ZERO)
        if any(p < 0 for _, p in clean) or total != 1:
            raise SchemaError(f"buyer probabilities must be nonnegative and sum to 1, got {total}")
        object.__setattr__(self, "support", tuple(clean))
        object.__setattr__(self, "threshold", as_rational(self.threshold))


def uniform_budget_instance(items: int, buyers, threshold=0) -> PricingInstance:
    """Buyers given as (budget, interesting items, probability): value = budget on
    interesting items and 0 elsewhere."""
    support = []
    for budget, wanted, prob in buyers:
        budget = as_rational(budget)
        wanted = set(wanted)
        if any(not 0 <= i < items for i in wanted):
            raise SchemaError("interesting item index out of range")
        support.append((tuple(budget if i in wanted else ZERO for i in range(items)), prob))
    return PricingInstance(items, tuple(support), threshold)


# ---------------------------------------------------------------------------
# generators


def reduce_bcbs(graph: BipartiteGraph, k: int) -> NormalFormGame:
    """Three-player game, leader with one action, whose leader-best equilibrium is worth 1
    exactly when the bipartite graph has a k-by-k complete subgraph."""
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValidationError("k must be a positive integer")
    left, right = graph.left, graph.right
    p2 = [("C", v) for v in left] + [("E", v) for v in right]
    p3 = [("C", v) for v in right] + [("E", v) for v in left]
    adj = set(graph.edges)
    k = Fraction(k)

    def utils(x, y):
        (m2, v2), (m3, v3) = x, y
        if m2 == "C" and m3 == "C":
            return (1, 1, 1) if (v2, v3) in adj else (0, 0, 0)
        if m2 == "E" and m3 == "C" and v2 == v3:
            return (0, k, -k - 1)
        if m2 == "C" and m3 == "E" and v2 == v3:
            return (0, -k - 1, k)
        return (0, 0, 0)

    payoffs = {(0, i, j): utils(x, y) for i, x in enumerate(p2) for j, y in enumerate(p3)}
    return NormalFormGame((("s",), tuple(f"{m}:{v}" for m, v in p2),
                           tuple(f"{m}:{v}" for m, v in p3)), payoffs)


def reduce_balanced_vertex_cover(graph: Graph, epsilon=None) -> NormalFormGame:
    """Three-player game for sequential mixed commitment; a cover of half the vertices
    lets the first two players steer player 3 to the shared-reward action."""
    nv = len(graph.vertices)
    if nv < 4 or nv % 2:
        raise ValidationError("the graph needs an even number of vertices, at least 4")
    limit = Fraction(1, nv ** 5)
    eps = limit if epsilon is None else as_rational(epsilon)
    if not 0 < eps <= limit:
        raise ValidationError(f"epsilon must lie in (0, {limit}]")
    V = graph.vertices
    high = Fraction(nv, nv - 2)
    c_actions = [("v", v) for v in V] + [("e", e) for e in graph.edges] + [("0", None)]
    payoffs = {}
    for i, a in enumerate(V):
        for j, b in enumerate(V):
            for k, (kind, obj) in enumerate(c_actions):
                if kind == "0":
                    vec = (eps, eps, Fraction(1))
                elif kind == "v":
                    vec = (ZERO, ZERO, ZERO if obj in (a, b) else high)
                else:
                    vec = (ZERO, ZERO, ZERO if a in obj else high)
                payoffs[(i, j, k)] = vec
    labels3 = [f"c_{v}" for v in V] + [f"c_{graph.edge_label(e)}" for e in graph.edges] + ["c_0"]
    return NormalFormGame((tuple(f"a_{v}" for v in V), tuple(f"b_{v}" for v in V),
                           tuple(labels3)), payoffs)


def reduce_vertex_cover_bayesian(graph: Graph, K: int) -> BayesianGame:
    """Two-player game with K equally likely leader types; the leader gets 1 only when the
    follower opts out, which pure per-type actions can force iff a K-cover exists."""
    if not isinstance(K, int) or isinstance(K, bool) or K < 1:
        raise ValidationError("K must be a positive integer")
    if not graph.vertices:
        raise ValidationError("the graph needs at least one vertex")
    V, E = graph.vertices, graph.edges
    leader_acts = tuple(f"a_{v}" for v in V)
    follower_acts = ("b_0",) + tuple(f"b_{graph.edge_label(e)}" for e in E)
    leader = {(i, j): Fraction(int(j == 0)) for i in range(len(V)) for j in range(len(follower_acts))}
    follower = {}
    for i, v in enumerate(V):
        follower[(i, 0)] = ZERO
        for j, e in enumerate(E, start=1):
            follower[(i, j)] = Fraction(-K) if v in e else Fraction(1)
    return BayesianGame((leader_acts, follower_acts),
                        (tuple(f"t{i + 1}" for i in range(K)), ("*",)),
                        ((Fraction(1, K),) * K, (Fraction(1),)),
                        ((leader,) * K, (follower,)))


def reduce_item_pricing(instance: PricingInstance) -> BayesianGame:
    """Leader with one action, follower types = buyer value vectors; paying Z - r_i on the
    follower's item action mirrors posting price r_i."""
    m = instance.items
    Z = max((v for values, _ in instance.support for v in values), default=ZERO) + 1
    follower_acts = ("t_0",) + tuple(f"t_{i + 1}" for i in range(m))
    leader = {(0, 0): ZERO}
    for i in range(1, m + 1):
        leader[(0, i)] = Z
    tables = []
    for values, _ in instance.support:
        t = {(0, 0): ZERO}
        for i in range(1, m + 1):
            t[(0, i)] = values[i - 1] - Z
        tables.append(t)
    types = tuple("v(" + ",".join(str(x) for x in values) + ")" for values, _ in instance.support)
    if len(set(types)) != len(types):
        types = tuple(f"{t}#{n}" for n, t in enumerate(types))
    return BayesianGame((("s",), follower_acts), (("*",), types),
                        ((Fraction(1),), tuple(p for _, p in instance.support)),
                        ((leader,), tuple(tables)), metadata={"Z": Z})


# ---------------------------------------------------------------------------
# brute force on the source problems


def find_biclique(graph: BipartiteGraph, k: int):
    """A k-by-k complete bipartite subgraph as (left set, right set), or None."""
    adj = set(graph.edges)
    for L in itertools.combinations(graph.left, k):
        common = [v for v in graph.right if all((u, v) in adj for u in L)]
        if len(common) >= k:
            return L, tuple(common[:k])
    return None


def find_vertex_cover(graph: Graph, K: int):
    """A vertex cover with at most K vertices, or None."""
    for size in range(0, min(K, len(graph.vertices)) + 1):
        for C in itertools.combinations(graph.vertices, size):
            if all(e & set(C) for e in graph.edges):
                return C
    return None


def find_balanced_cover(graph: Graph):
    half = len(graph.vertices) // 2
    return find_vertex_cover(graph, half)


def buyer_choice(values, prices):
    """Item bought (0-based) or None: max surplus, ties to the higher price then lower index."""
    best = None
    for i, (v, r) in enumerate(zip(values, prices)):
        s = v - r
        if s < 0:
            continue
        if best is None or (s, r) > best[0]:
            best = ((s, r), i)
    return None if best is None else best[1]


def revenue(instance: PricingInstance, prices) -> Fraction:
    total = ZERO
    for values, p in instance.support:
        i = buyer_choice(values, prices)
        if i is not None:
            total += p * prices[i]
    return total


def optimal_revenue(instance: PricingInstance):
    """Exact optimal revenue by checking every vertex of the price arrangement.

    Revenue is linear on each cell cut out by the hyperplanes ``r_i = v_i``,
    ``r_i - r_j = v_i - v_j``, ``r_i = 0`` and ``r_i = Z``; buyer ties favor the
    seller, so the maximum sits at a vertex.  Returns (revenue, prices).
    """
    m = instance.items
    Z = max((v for values, _ in instance.support for v in values), default=ZERO) + 1
    planes = set()
    for i in range(m):
        unit = tuple(int(k == i) for k in range(m))
        planes.add((unit, ZERO))
        planes.add((unit, Z))
        for values, _ in instance.support:
            planes.add((unit, values[i]))
    for i, j in itertools.combinations(range(m), 2):
        row = tuple(1 if k == i else -1 if k == j else 0 for k in range(m))
        for values, _ in instance.support:
            planes.add((row, values[i] - values[j]))
    planes = sorted(planes)
    best = None
    seen = set()
    for combo in itertools.combinations(planes, m):
        den = 1
        for _, b in combo:
            den = den * b.denominator // math.gcd(den, b.denominator)
        res = _kernels.solve_square([list(r) for r, _ in combo], [int(b * den) for _, b in combo])
        if res is None:
            continue
        nums, d = res
        r = tuple(Fraction(x, d * den) for x in nums)
        if r in seen or any(x < 0 or x > Z for x in r):
            continue
        seen.add(r)
        rev = revenue(instance, r)
        if best is None or rev > best[0]:
            best = (rev, r)
    return best


# ---------------------------------------------------------------------------
# witness verification


@dataclass
class WitnessResult:
    status: str
    detail: str = ""
    witness: object = None
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == CONSISTENT


def _violation(msg, **kw):
    return WitnessResult("Violation", msg, **kw)


def verify_witness(kind: str, source, report, parameter=None) -> WitnessResult:
    """Check a solver report on a generated game against its source instance.

    ``kind`` is one of ``bcbs``, ``vc-bayes``, ``pricing``, ``bvc``;
    ``parameter`` is k (bcbs) or K (vc-bayes).
    """
    if kind == "bcbs":
        return _verify_bcbs(source, report, parameter)
    if kind == "vc-bayes":
        return _verify_vc(source, report, parameter)
    if kind == "pricing":
        return _verify_pricing(source, report)
    if kind == "bvc":
        return _verify_bvc(source, report)
    raise ValidationError(f"unknown reduction kind {kind!r}")


def _supports(play, labels):
    return [labels[i] for i, p in enumerate(play) if p]


def _verify_bcbs(graph: BipartiteGraph, report, k):
    game = reduce_bcbs(graph, k)
    s2 = _supports(report.follower_play[0][0], game.actions[1])
    s3 = _supports(report.follower_play[1][0], game.actions[2])
    only_c = all(x.startswith("C:") for x in s2 + s3)
    L = [x[2:] for x in s2]
    R = [x[2:] for x in s3]
    adj = set(graph.edges)
    complete = only_c and all((u, v) in adj for u in L for v in R)
    is_biclique = complete and len(L) >= k and len(R) >= k
    truth = find_biclique(graph, k)
    if (report.value >= 1) != is_biclique:
        return _violation(f"value {report.value} but supports {L}/{R} "
                          f"{'do' if is_biclique else 'do not'} form a {k}-biclique")
    if report.value < 1 and truth is not None:
        return _violation(f"graph has the {k}-biclique {truth} but the report's value is "
                          f"{report.value}")
    return WitnessResult(CONSISTENT, witness=(tuple(L), tuple(R)) if is_biclique else None)


def _verify_vc(graph: Graph, report, K):
    strategy = report.commitment.strategy
    actions = getattr(strategy, "actions", None)
    truth = find_vertex_cover(graph, K)
    if actions is None:
        return _violation("vertex-cover witnesses need per-type pure actions")
    chosen = {graph.vertices[a] for a in actions}
    covers = all(e & chosen for e in graph.edges)
    if (report.value > 0) != covers:
        return _violation(f"value {report.value} but per-type vertices {sorted(chosen)} "
                          f"{'are' if covers else 'are not'} a cover")
    if report.value <= 0 and truth is not None:
        return _violation(f"graph has the cover {truth} but the report's value is {report.value}")
    return WitnessResult(CONSISTENT, witness=tuple(sorted(chosen)) if covers else None)


def _verify_pricing(instance: PricingInstance, report):
    Z = reduce_item_pricing(instance).metadata["Z"]
    pays = report.commitment.payments.amounts
    prices = tuple(Z - pays[i] for i in range(1, instance.items + 1))
    if any(r < 0 for r in prices):
        return _violation(f"recovered prices {prices} include a negative price")
    rev = revenue(instance, prices)
    if rev != report.value:
        return _violation(f"report value {report.value} differs from revenue {rev} at prices "
                          f"{prices}")
    return WitnessResult(CONSISTENT, witness=prices)


def _verify_bvc(graph: Graph, report):
    game_value = report.value
    truth = find_balanced_cover(graph)
    if game_value > 0 and truth is None:
        return _violation(f"value {game_value} is positive but no balanced cover exists")
    if game_value > 0:
        sigma = report.commitment.strategy.probs
        support = [graph.vertices[i] for i, p in enumerate(sigma) if p]
        return WitnessResult(CONSISTENT, witness=tuple(support))
    return WitnessResult(CONSISTENT)
