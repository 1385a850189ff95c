"""JSON documents for games, commitments, reports and reduction sources.

Rationals are written as ``"p/q"`` or integer strings.  Floats are rejected
on input.  Writers are canonical, so parsing a written document and writing
it again reproduces the same bytes.
"""
from __future__ import annotations

import dataclasses
import itertools
import json
import re
from fractions import Fraction

from .errors import SchemaError, ValidationError
from .game import (BayesianGame, Commitment, FollowerActionPayments, Mixture, NormalFormGame,
                   OutcomePayments, PureAction, RecommendationPayments, SignalingCommitment,
                   SolveReport, TypedMixture, TypedPure)
from .reductions import BipartiteGraph, Graph, PricingInstance, uniform_budget_instance

RATIONAL = re.compile(r"^-?\d+(/\d+)?$")


def parse_rational(x, where: str, problems: list):
    if isinstance(x, bool) or isinstance(x, float):
        problems.append(f"{where}: {x!r} is not an exact rational (floats are not accepted)")
        return None
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str) and RATIONAL.match(x):
        if "/" in x and int(x.split("/")[1]) == 0:
            problems.append(f"{where}: zero denominator in {x!r}")
            return None
        return Fraction(x)
    problems.append(f"{where}: {x!r} is not a rational literal like \"3\" or \"-2/5\"")
    return None


def rat(x) -> str:
    return str(Fraction(x))


def _render(x, depth):
    pad = "  " * (depth + 1)
    if isinstance(x, dict) and x:
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_render(v, depth + 1)}"
                 for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * depth + "}"
    if isinstance(x, list) and any(isinstance(v, (dict, list)) and v for v in x):
        items = [pad + _render(v, depth + 1) for v in x]
        return "[\n" + ",\n".join(items) + "\n" + "  " * depth + "]"
    return json.dumps(x, ensure_ascii=False, separators=(", ", ": "))


def dumps(doc) -> str:
    """Canonical text: objects one key per line, flat lists on one line."""
    return _render(doc, 0) + "\n"


# ---------------------------------------------------------------------------
# games


def _label_lists(raw, key, count, problems, what):
    lists = raw.get(key)
    if not isinstance(lists, list) or len(lists) != count:
        problems.append(f"'{key}' must be a list with one entry per player ({count})")
        return None
    out = []
    for i, labels in enumerate(lists):
        if not isinstance(labels, list) or not labels:
            problems.append(f"player {i + 1}: {what} list must be nonempty")
            out.append(None)
            continue
        if any(not isinstance(x, str) or not x or "|" in x for x in labels):
            problems.append(f"player {i + 1}: {what} labels must be nonempty strings without '|'")
        if len(set(labels)) != len(labels):
            problems.append(f"player {i + 1}: duplicate {what} labels")
        out.append([str(x) for x in labels])
    return out


def _profile_index(key, label_lists, where, problems):
    parts = key.split("|")
    if len(parts) != len(label_lists):
        problems.append(f"{where}: key {key!r} needs {len(label_lists)} '|'-separated labels")
        return None
    idx = []
    for i, (part, labels) in enumerate(zip(parts, label_lists)):
        if part not in labels:
            problems.append(f"{where}: unknown label {part!r} for player {i + 1} in {key!r}")
            return None
        idx.append(labels.index(part))
    return tuple(idx)


def _utility_table(raw_table, actions, n, where, problems):
    if not isinstance(raw_table, dict):
        problems.append(f"{where}: utilities must be an object keyed by action profile")
        return {}
    table = {}
    for key, vec in raw_table.items():
        a = _profile_index(key, actions, where, problems)
        if a is None:
            continue
        if not isinstance(vec, list) or len(vec) != n:
            problems.append(f"{where}: profile {key!r} needs a list of {n} utilities")
            continue
        vals = [parse_rational(x, f"{where} {key}[{i}]", problems) for i, x in enumerate(vec)]
        if None not in vals:
            table[a] = tuple(vals)
    for a in itertools.product(*(range(len(x)) for x in actions)):
        if a not in table and not any(p.startswith(f"{where}: profile") for p in problems):
            label = "|".join(actions[i][k] for i, k in enumerate(a))
            problems.append(f"{where}: missing utilities for profile {label!r}")
    return table


def validate_game(raw):
    """Turn a parsed document into a game, or raise SchemaError listing every violation."""
    problems = []
    if not isinstance(raw, dict):
        raise SchemaError("a game document must be a JSON object")
    n = raw.get("players")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("'players' must be a positive integer")
    actions = _label_lists(raw, "actions", n, problems, "action")
    if actions is None or None in actions:
        raise SchemaError(problems)
    if "types" not in raw and "prior" not in raw:
        table = _utility_table(raw.get("utilities"), actions, n, "utilities", problems)
        if problems:
            raise SchemaError(problems)
        return NormalFormGame(actions, table)
    types = _label_lists(raw, "types", n, problems, "type")
    prior_raw = raw.get("prior")
    if types is None or None in types:
        raise SchemaError(problems)
    prior = []
    if not isinstance(prior_raw, list) or len(prior_raw) != n:
        problems.append("'prior' must list one distribution per player")
    else:
        for i, (dist, ts) in enumerate(zip(prior_raw, types)):
            if not isinstance(dist, list) or len(dist) != len(ts):
                problems.append(f"player {i + 1}: prior needs {len(ts)} entries")
                prior.append(None)
                continue
            vals = [parse_rational(x, f"player {i + 1} prior", problems) for x in dist]
            if None in vals:
                prior.append(None)
                continue
            if any(v < 0 for v in vals) or sum(vals) != 1:
                problems.append(f"player {i + 1}: prior must be nonnegative and sum to 1 "
                                f"(sums to {sum(vals)})")
            prior.append(vals)
    utils = raw.get("utilities")
    per_player = [[None] * len(ts) for ts in types]
    if not isinstance(utils, dict):
        problems.append("utilities must be an object keyed by type profile")
    else:
        for tkey in utils:
            if _profile_index(tkey, types, "utilities", problems) is None:
                continue
        for thetas in itertools.product(*(range(len(ts)) for ts in types)):
            tkey = "|".join(types[i][t] for i, t in enumerate(thetas))
            if tkey not in utils:
                problems.append(f"utilities: missing type profile {tkey!r}")
                continue
            table = _utility_table(utils[tkey], actions, n, f"utilities[{tkey}]", problems)
            if not table:
                continue
            for i, t in enumerate(thetas):
                mine = {a: v[i] for a, v in table.items()}
                if per_player[i][t] is None:
                    per_player[i][t] = mine
                elif per_player[i][t] != mine:
                    problems.append(f"utilities[{tkey}]: player {i + 1}'s utilities change with "
                                    f"other players' types")
    if problems:
        raise SchemaError(problems)
    return BayesianGame(actions, types, prior, [tuple(x) for x in per_player],
                        metadata=dict(raw.get("metadata", {})))


def game_to_doc(game) -> dict:
    n = game.n_players
    doc = {"players": n, "actions": [list(a) for a in game.actions]}
    if isinstance(game, NormalFormGame):
        doc["utilities"] = {game.label(a): [rat(x) for x in game.payoffs[a]]
                            for a in game.profiles()}
        return doc
    doc["types"] = [list(t) for t in game.types]
    doc["prior"] = [[rat(p) for p in pi] for pi in game.prior]
    utils = {}
    for thetas in itertools.product(*(range(len(ts)) for ts in game.types)):
        tkey = "|".join(game.types[i][t] for i, t in enumerate(thetas))
        utils[tkey] = {game.label(a): [rat(game.payoffs[i][t][a]) for i, t in enumerate(thetas)]
                       for a in game.profiles()}
    doc["utilities"] = utils
    if game.metadata:
        doc["metadata"] = {k: rat(v) if isinstance(v, Fraction) else v
                           for k, v in game.metadata.items()}
    return doc


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})")


def read_game(path):
    return validate_game(load_json(path))


def write_game(game) -> str:
    return dumps(game_to_doc(game))


# ---------------------------------------------------------------------------
# commitments and reports


def _dist_doc(labels, probs):
    return {labels[k]: rat(p) for k, p in enumerate(probs)}


def _as_bayes(game):
    return game if isinstance(game, BayesianGame) else BayesianGame.from_normal_form(game)


def commitment_to_doc(game, commitment) -> dict:
    bg = _as_bayes(game)
    if isinstance(commitment, SignalingCommitment):
        return {
            "kind": "signaling",
            "distributions": {bg.types[0][t]: {bg.label(a): rat(p) for a, p in sorted(d.items())}
                              for t, d in enumerate(commitment.distributions)},
            "payments": {"recommendation": [
                {bg.actions[i][k]: (None if x is None else rat(x)) for k, x in enumerate(row)}
                for i, row in enumerate(commitment.payments.amounts, start=1)]},
            "expected_payments": [
                {bg.actions[i][k]: rat(x) for k, x in enumerate(row)}
                for i, row in enumerate(commitment.expected_payments, start=1)],
        }
    s = commitment.strategy
    leader = bg.actions[0]
    if isinstance(s, PureAction):
        strat = {"pure": leader[s.action]}
    elif isinstance(s, Mixture):
        strat = {"mixture": _dist_doc(leader, s.probs)}
    elif isinstance(s, TypedPure):
        strat = {"typed_pure": {bg.types[0][t]: leader[a] for t, a in enumerate(s.actions)}}
    else:
        strat = {"typed_mixture": {bg.types[0][t]: _dist_doc(leader, m)
                                   for t, m in enumerate(s.mixtures)}}
    pay = commitment.payments
    if isinstance(pay, FollowerActionPayments):
        pdoc = {"follower_action": _dist_doc(bg.actions[1], pay.amounts)}
    elif isinstance(pay, OutcomePayments):
        pdoc = {"outcome": {bg.label(a): [rat(x) for x in vec]
                            for a, vec in sorted(pay.amounts.items())}}
    else:
        pdoc = {"recommendation": [
            {bg.actions[i][k]: (None if x is None else rat(x)) for k, x in enumerate(row)}
            for i, row in enumerate(pay.amounts, start=1)]}
    return {"kind": "commitment", "strategy": strat, "payments": pdoc}


def _read_dist(doc, labels, where, problems):
    if not isinstance(doc, dict):
        problems.append(f"{where}: expected an object keyed by label")
        return None
    out = [Fraction(0)] * len(labels)
    for lab, x in doc.items():
        if lab not in labels:
            problems.append(f"{where}: unknown label {lab!r}")
            continue
        v = parse_rational(x, f"{where}[{lab}]", problems)
        if v is not None:
            out[labels.index(lab)] = v
    return tuple(out)


def _read_recommendation(rows, bg, problems):
    amounts = []
    if not isinstance(rows, list) or len(rows) != bg.n_players - 1:
        problems.append("recommendation payments need one object per follower")
        return None
    for i, row in enumerate(rows, start=1):
        labels = bg.actions[i]
        out = [None] * len(labels)
        for lab, x in (row or {}).items():
            if lab not in labels:
                problems.append(f"recommendation payments: unknown label {lab!r}")
            elif x is not None:
                out[labels.index(lab)] = parse_rational(x, f"payment[{lab}]", problems)
        amounts.append(tuple(out))
    return RecommendationPayments(tuple(amounts))


def commitment_from_doc(game, doc):
    """Inverse of :func:`commitment_to_doc`."""
    bg = _as_bayes(game)
    problems = []
    if not isinstance(doc, dict):
        raise SchemaError("a commitment must be a JSON object")
    try:
        if doc.get("kind") == "signaling":
            dists = []
            raw = doc.get("distributions", {})
            for t, tl in enumerate(bg.types[0]):
                d = {}
                for key, x in raw.get(tl, {}).items():
                    a = _profile_index(key, bg.actions, "distribution", problems)
                    v = parse_rational(x, f"distribution[{key}]", problems)
                    if a is not None and v is not None:
                        d[a] = v
                dists.append(d)
            pay = _read_recommendation(doc.get("payments", {}).get("recommendation"), bg, problems)
            expected = tuple(
                _read_dist(row, bg.actions[i], "expected_payments", problems)
                for i, row in enumerate(doc.get("expected_payments", []), start=1))
            if problems:
                raise SchemaError(problems)
            return SignalingCommitment(tuple(dists), pay, expected)
        s = doc.get("strategy", {})
        leader = list(bg.actions[0])
        if "pure" in s:
            if s["pure"] not in leader:
                raise SchemaError(f"unknown leader action {s['pure']!r}")
            strat = PureAction(leader.index(s["pure"]))
        elif "mixture" in s:
            strat = Mixture(_read_dist(s["mixture"], leader, "mixture", problems))
        elif "typed_pure" in s:
            strat = TypedPure(tuple(leader.index(s["typed_pure"][t]) for t in bg.types[0]))
        elif "typed_mixture" in s:
            strat = TypedMixture(tuple(_read_dist(s["typed_mixture"][t], leader, "mixture",
                                                  problems) for t in bg.types[0]))
        else:
            raise SchemaError("commitment strategy must be pure, mixture, typed_pure or "
                              "typed_mixture")
        p = doc.get("payments", {})
        if "follower_action" in p:
            pay = FollowerActionPayments(_read_dist(p["follower_action"], list(bg.actions[1]),
                                                    "payments", problems))
        elif "outcome" in p:
            amounts = {}
            for key, vec in p["outcome"].items():
                a = _profile_index(key, bg.actions, "payments", problems)
                vals = [parse_rational(x, f"payments[{key}]", problems) for x in vec]
                if a is not None and None not in vals:
                    amounts[a] = tuple(vals)
            pay = OutcomePayments(amounts)
        elif "recommendation" in p:
            pay = _read_recommendation(p["recommendation"], bg, problems)
        else:
            raise SchemaError("payments must be follower_action, outcome or recommendation")
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"malformed commitment: {exc}")
    if problems:
        raise SchemaError(problems)
    return Commitment(strat, pay)


def _jsonable(x):
    if isinstance(x, Fraction):
        return rat(x)
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {f.name: _jsonable(getattr(x, f.name)) for f in dataclasses.fields(x)}
    if isinstance(x, dict):
        return {("|".join(map(str, k)) if isinstance(k, tuple) else str(k)): _jsonable(v)
                for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def report_to_doc(game, report: SolveReport) -> dict:
    bg = _as_bayes(game)
    play = []
    for i, per_type in enumerate(report.follower_play, start=1):
        play.append({bg.types[i][t]: _dist_doc(bg.actions[i], m) for t, m in enumerate(per_type)})
    details = dict(report.details)
    plan = details.get("plan")
    if dataclasses.is_dataclass(plan):
        details["plan"] = {
            "target": bg.label(plan.target), "pay_to_2": rat(plan.pay_to_2),
            "pay_to_3": rat(plan.pay_to_3), "pay_2_to_3": rat(plan.pay_2_to_3),
            "big_m": rat(plan.big_m), "triggers": [bg.label(a) for a in plan.triggers]}
    # index-valued details become labels; already-labeled ones (parsed reports) pass through
    leader, first = bg.actions[0], bg.actions[1]
    if isinstance(details.get("outcome"), tuple) and len(details["outcome"]) == bg.n_players:
        details["outcome"] = bg.label(details["outcome"])
    if isinstance(details.get("incentivized"), int):
        details["incentivized"] = first[details["incentivized"]]
    if isinstance(details.get("leader_action"), int):
        details["leader_action"] = leader[details["leader_action"]]
    vba = details.get("values_by_action")
    if isinstance(vba, dict) and all(isinstance(k, int) for k in vba):
        names = leader if "leader_action" in report.details else first
        details["values_by_action"] = {names[k]: v for k, v in vba.items()}
    if isinstance(details.get("assignment"), tuple):
        details["assignment"] = {bg.types[1][t]: first[b]
                                 for t, b in enumerate(details["assignment"])}
    if isinstance(details.get("actions_by_type"), tuple):
        details["actions_by_type"] = {bg.types[0][t]: leader[a]
                                      for t, a in enumerate(details["actions_by_type"])}
    if isinstance(details.get("player3_action"), int):
        details["player3_action"] = bg.actions[2][details["player3_action"]]
    return {
        "setting": report.setting,
        "bound": report.bound,
        "value": rat(report.value),
        "commitment": commitment_to_doc(bg, report.commitment),
        "follower_play": play,
        "certificate": [{"id": cid, "slack": rat(s)} for cid, s in report.certificate],
        "details": _jsonable(details),
    }


def report_from_doc(game, doc) -> SolveReport:
    bg = _as_bayes(game)
    problems = []
    if not isinstance(doc, dict) or "commitment" not in doc or "value" not in doc:
        raise SchemaError("a report needs 'value' and 'commitment'")
    value = parse_rational(doc["value"], "value", problems)
    commitment = commitment_from_doc(bg, doc["commitment"])
    play = []
    for i, per_type in enumerate(doc.get("follower_play", []), start=1):
        play.append(tuple(_read_dist(per_type.get(tl, {}), list(bg.actions[i]), "follower_play",
                                     problems) for tl in bg.types[i]))
    cert = [(c["id"], parse_rational(c["slack"], "certificate", problems))
            for c in doc.get("certificate", [])]
    if problems:
        raise SchemaError(problems)
    return SolveReport(doc.get("setting", ""), value, commitment, tuple(play), cert,
                       bound=doc.get("bound", "exact"), details=doc.get("details", {}))


# ---------------------------------------------------------------------------
# reduction sources


def _adjacency_edges(adj, where):
    if not isinstance(adj, dict):
        raise SchemaError(f"{where}: 'adjacency' must map each vertex to its neighbours")
    return [(u, v) for u, nbrs in adj.items() for v in nbrs]


def read_graph(doc) -> Graph:
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise SchemaError("a graph document needs 'vertices' and 'adjacency'")
    return Graph(doc["vertices"], _adjacency_edges(doc.get("adjacency", {}), "graph"))


def read_bipartite(doc) -> BipartiteGraph:
    if not isinstance(doc, dict) or "left" not in doc or "right" not in doc:
        raise SchemaError("a bipartite graph document needs 'left', 'right' and 'adjacency'")
    return BipartiteGraph(doc["left"], doc["right"],
                          _adjacency_edges(doc.get("adjacency", {}), "bipartite graph"))


def graph_to_doc(graph, **params) -> dict:
    if isinstance(graph, BipartiteGraph):
        adj = {u: [v for (x, v) in graph.edges if x == u] for u in graph.left}
        doc = {"left": list(graph.left), "right": list(graph.right), "adjacency": adj}
    else:
        adj = {}
        for e in graph.edges:
            u, v = sorted(e, key=graph.vertices.index)
            adj.setdefault(u, []).append(v)
        doc = {"vertices": list(graph.vertices), "adjacency": adj}
    doc.update(params)
    return doc


def read_pricing(doc) -> PricingInstance:
    problems = []
    if not isinstance(doc, dict) or "items" not in doc:
        raise SchemaError("a pricing document needs 'items' and 'buyers'")
    m = doc["items"]
    threshold = parse_rational(doc.get("threshold", 0), "threshold", problems)
    if "uniform_budget" in doc:
        buyers = []
        for b in doc["uniform_budget"]:
            buyers.append((parse_rational(b["budget"], "budget", problems), b["items"],
                           parse_rational(b["prob"], "prob", problems)))
        if problems:
            raise SchemaError(problems)
        return uniform_budget_instance(m, buyers, threshold)
    support = []
    for k, b in enumerate(doc.get("buyers", [])):
        vals = [parse_rational(x, f"buyers[{k}].values", problems) for x in b.get("values", [])]
        prob = parse_rational(b.get("prob"), f"buyers[{k}].prob", problems)
        support.append((vals, prob))
    if problems:
        raise SchemaError(problems)
    try:
        return PricingInstance(m, tuple(support), threshold)
    except ValidationError as exc:
        raise SchemaError(str(exc))


def pricing_to_doc(instance: PricingInstance) -> dict:
    return {"items": instance.items,
            "buyers": [{"values": [rat(v) for v in vals], "prob": rat(p)}
                       for vals, p in instance.support],
            "threshold": rat(instance.threshold)}
