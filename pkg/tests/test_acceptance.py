"""End-to-end acceptance checks; each prints one PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for just the summary lines.
"""
import contextlib
import io
import itertools
import json
import random
import sys
import time
from fractions import Fraction as F

import networkx as nx
import pytest

from commitpay.cli import main
from commitpay.commit import (replay_sequential, solve_three_player_sequential_pure,
                              solve_two_player_leader_types_mixed, solve_two_player_mixed,
                              solve_two_player_pure)
from commitpay.equilibria import (best_nash_for_leader, brute_force_commitment,
                                  enumerate_nash_two_player, leader_value_in)
from commitpay.game import BayesianGame, Commitment, OutcomePayments, PureAction, evaluate_leader
from commitpay.hard import (approx_payments_only, solve_bayesian_follower_exact,
                            solve_leader_types_pure_exact)
from commitpay.lp import OPTIMAL, dual_bound, solve_lp, verify_optimal
from commitpay.reductions import (BipartiteGraph, Graph, PricingInstance, find_biclique,
                                  find_vertex_cover, optimal_revenue, reduce_bcbs,
                                  reduce_item_pricing, reduce_vertex_cover_bayesian, revenue)
from commitpay.schema import read_game
from commitpay.signaling import (check_incentive_compatibility, ic_passes,
                                 solve_signaling_leader_types_mixed, solve_signaling_mixed,
                                 solve_signaling_pure)
from conftest import dominated, fixture_path, pennies, random_ensemble, random_game, table1
from oracles import lp_vertex_optimum, perturbed_fails, random_lp_list

ENSEMBLE_SEED = 2025
NOTHING = Commitment(PureAction(0), OutcomePayments({}))


def ensemble():
    return random_ensemble(200, ENSEMBLE_SEED, max_size=4)


def _emit(line):
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()


def run_criterion(number, title, check, limit=None, emit=_emit):
    """Time ``check`` (returns a list of failure strings), print one line, return success."""
    start = time.perf_counter()
    try:
        failures = list(check())
    except Exception as exc:  # report, then let the test fail
        failures = [f"{type(exc).__name__}: {exc}"]
    took = time.perf_counter() - start
    if limit is not None and took > limit:
        failures.append(f"took {took:.2f}s, limit {limit}s")
    status = "PASS" if not failures else "FAIL"
    extra = "" if not failures else " | " + "; ".join(failures[:3])
    emit(f"criterion {number:>2} {status} ({took:.2f}s) {title}{extra}")
    return failures


# --- criteria ---------------------------------------------------------------


def table1_golden():
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["solve", "--setting", "2p-mixed", fixture_path("table1.json")])
    if code != 0:
        yield f"exit code {code}"
        return
    doc = json.loads(buf.getvalue())
    if F(doc["value"]) != F(1, 3):
        yield f"reported {doc['value']}"
    rep = solve_two_player_mixed(read_game(fixture_path("table1.json")))
    got = evaluate_leader(table1(), rep.commitment, rep.follower_play)
    if got != F(1, 3):
        yield f"evaluate_leader gives {got}"


def small_golden_values():
    checks = [
        ("dominated pure", lambda: solve_two_player_pure(dominated()).value, lambda v: v == 2),
        ("pennies pure", lambda: solve_two_player_pure(pennies()).value, lambda v: v == -1),
        ("table1 payments-only", lambda: approx_payments_only(table1(), step=F(1), cap=2).value,
         lambda v: v <= 0),
        ("table1 actions-only", lambda: solve_two_player_mixed(table1(), no_payments=True).value,
         lambda v: v <= 0),
    ]
    for name, run, ok in checks:
        start = time.perf_counter()
        v = run()
        took = time.perf_counter() - start
        if not ok(v):
            yield f"{name}: value {v}"
        if took > 1:
            yield f"{name}: {took:.2f}s"


def nash_dominance():
    for n, g in enumerate(ensemble()):
        value = solve_two_player_mixed(g).value
        for pair in enumerate_nash_two_player(g).equilibria:
            if leader_value_in(g, pair) > value:
                yield f"game {n}: NE worth {leader_value_in(g, pair)} > {value}"


def dominance_chain():
    for n, g in enumerate(ensemble()):
        sm = solve_signaling_mixed(g).value
        sp = solve_signaling_pure(g).value
        mx = solve_two_player_mixed(g).value
        pu = solve_two_player_pure(g).value
        if not (sm >= mx >= pu and sm >= sp >= pu):
            yield f"game {n}: sig-mixed {sm}, sig-pure {sp}, mixed {mx}, pure {pu}"


def grid_vs_lp():
    rng = random.Random(515)
    for n in range(50):
        g = random_game(rng, (2, rng.choice((2, 3))))
        lp_value = solve_two_player_mixed(g).value
        cap = g.utility_range(1)
        gaps = []
        for k in (4, 8, 16):
            v = brute_force_commitment(g, step=F(1, k), cap=cap).value
            if v > lp_value:
                yield f"game {n}: grid 1/{k} gives {v} > LP {lp_value}"
            gaps.append(lp_value - v)
        if not gaps[0] >= gaps[1] >= gaps[2]:
            yield f"game {n}: gaps {gaps} not monotone"


def lp_soundness():
    for n, lp in enumerate(random_lp_list(100, 6060)):
        sol = solve_lp(lp)
        best = lp_vertex_optimum(lp)
        if best is None:
            if sol.status == OPTIMAL:
                yield f"lp {n}: solver optimal but oracle finds no vertex"
            continue
        if sol.status != OPTIMAL or sol.objective_value != best:
            yield f"lp {n}: {sol.status} {sol.objective_value} vs {best}"
        elif not verify_optimal(lp, sol) or dual_bound(lp, sol.duals) != sol.objective_value:
            yield f"lp {n}: duality gap check failed"


def sequential_replay():
    rng = random.Random(707)
    for n in range(50):
        g = random_game(rng, (2, 2, 2))
        rep = solve_three_player_sequential_pure(g)
        outcome, value, _ = replay_sequential(g, rep.commitment.strategy.action,
                                              rep.commitment.payments)
        if outcome != rep.details["outcome"] or value != rep.value:
            yield f"game {n}: replay {outcome}/{value} vs {rep.details['outcome']}/{rep.value}"


def bipartite_graphs(max_vertices=5):
    for p in range(1, max_vertices):
        for q in range(1, max_vertices - p + 1):
            L = [f"v{i}" for i in range(p)]
            R = [f"w{j}" for j in range(q)]
            pairs = list(itertools.product(L, R))
            for mask in range(1 << len(pairs)):
                yield BipartiteGraph(L, R, [e for b, e in enumerate(pairs) if mask >> b & 1])


def atlas_graphs(max_vertices=5):
    for h in nx.graph_atlas_g():
        if 1 <= h.number_of_nodes() <= max_vertices:
            names = {v: f"v{v}" for v in h.nodes}
            yield Graph([names[v] for v in h.nodes], [(names[a], names[b]) for a, b in h.edges])


def random_pricing(rng):
    m = rng.randint(1, 3)
    t = rng.randint(1, 4)
    w = [rng.randint(1, 4) for _ in range(t)]
    support = tuple((tuple(F(rng.randint(0, 9)) for _ in range(m)), F(x, sum(w))) for x in w)
    return PricingInstance(m, support)


def reduction_round_trips():
    count = 0
    for graph in bipartite_graphs():
        for k in range(1, min(len(graph.left), len(graph.right)) + 1):
            value = best_nash_for_leader(reduce_bcbs(graph, k), NOTHING).value
            if (value == 1) != (find_biclique(graph, k) is not None):
                yield f"bcbs {graph} k={k}: value {value}"
            count += 1
    for graph in atlas_graphs():
        for K in range(1, len(graph.vertices) + 1):
            value = solve_leader_types_pure_exact(reduce_vertex_cover_bayesian(graph, K)).value
            if (value > 0) != (find_vertex_cover(graph, K) is not None):
                yield f"vc {graph} K={K}: value {value}"
    rng = random.Random(88)
    for n in range(20):
        inst = random_pricing(rng)
        value = solve_bayesian_follower_exact(reduce_item_pricing(inst)).value
        best, prices = optimal_revenue(inst)
        breakpoints = sorted({F(0)} | {v for vals, _ in inst.support for v in vals})
        grid_best = max(revenue(inst, p) for p in itertools.product(breakpoints,
                                                                   repeat=inst.items))
        if value != best or revenue(inst, prices) != best or grid_best > best:
            yield f"pricing {n}: solver {value}, optimum {best}, breakpoint grid {grid_best}"


def signaling_certificates():
    for n, g in enumerate(ensemble()):
        for rep in (solve_signaling_mixed(g), solve_signaling_pure(g)):
            if not ic_passes(check_incentive_compatibility(g, rep.commitment)):
                yield f"game {n} {rep.setting}: IC check fails on solver output"
            if not perturbed_fails(g, rep.commitment):
                yield f"game {n} {rep.setting}: reduced payment still obedient"
    for n, bg in enumerate(single_type_games()):
        rep = solve_signaling_leader_types_mixed(bg)
        g = bg.collapse()
        if not ic_passes(check_incentive_compatibility(bg, rep.commitment)):
            yield f"typed game {n}: IC check fails"
        if not perturbed_fails(g, rep.commitment):
            yield f"typed game {n}: reduced payment still obedient"


def single_type_games():
    return [BayesianGame.from_normal_form(g) for g in random_ensemble(50, 1010, max_size=3)]


def degeneration():
    for n, bg in enumerate(single_type_games()):
        g = bg.collapse()
        pairs = [
            ("bayes-follower-exact", solve_bayesian_follower_exact(bg), solve_two_player_mixed(g)),
            ("leader-types-pure", solve_leader_types_pure_exact(bg), solve_two_player_pure(g)),
            ("leader-types-mixed", solve_two_player_leader_types_mixed(bg),
             solve_two_player_mixed(g)),
            ("sig-leader-types", solve_signaling_leader_types_mixed(bg), solve_signaling_mixed(g)),
        ]
        for name, a, b in pairs:
            if a.value != b.value:
                yield f"game {n} {name}: {a.value} vs {b.value}"


CRITERIA = [
    (1, "2x3 example game mixed commitment worth exactly 1/3", table1_golden, 1),
    (2, "small golden values and restricted modes", small_golden_values, 4),
    (3, "mixed commitment beats every Nash equilibrium (200 games)", nash_dominance, 60),
    (4, "dominance chain over the same 200 games", dominance_chain, None),
    (5, "grid search below LP with shrinking gap (50 games)", grid_vs_lp, 120),
    (6, "simplex matches vertex enumeration, zero duality gap (100 LPs)", lp_soundness, None),
    (7, "sequential pure commitments replay exactly (50 games)", sequential_replay, None),
    (8, "reduction round trips (biclique, vertex cover, pricing)", reduction_round_trips, 300),
    (9, "signaling outputs obedient, 1/100 cut breaks obedience", signaling_certificates, None),
    (10, "single-type Bayesian solvers equal normal-form ones (50 each)", degeneration, None),
]


@pytest.mark.parametrize("number,title,check,limit", CRITERIA,
                         ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_criterion(number, title, check, limit, capsys):
    def emit(line):
        with capsys.disabled():
            print(line)
    failures = run_criterion(number, title, check, limit, emit)
    assert not failures, failures


if __name__ == "__main__":
    bad = [n for n, title, check, limit in CRITERIA if run_criterion(n, title, check, limit)]
    sys.exit(1 if bad else 0)
