"""``commitpay`` command line: solve, approx, oracle, generate, verify.

Exit codes: 0 success, 1 verification failed, 2 bad input, 3 size or budget
exceeded, 4 internal consistency failure.  Diagnostics go to stderr as JSON;
nothing is written to stdout or ``-o`` unless the command succeeds.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import commit, equilibria, hard, reductions, signaling
from .errors import CommitPayError, ConsistencyError, SchemaError, SizeError, ValidationError
from .game import BayesianGame, Commitment, NormalFormGame, PureAction, SignalingCommitment, zero_payments
from .lp import dump_lp
from . import schema

SOLVE_SETTINGS = {
    "2p-pure": "leader commits to one action plus payments per follower action (2 players)",
    "2p-mixed": "leader commits to a mixed strategy plus payments per follower action, "
                "one LP per induced follower action (2 players)",
    "3p-seq-pure": "pure actions chosen in turn, leader pays both followers and may fund "
                   "player 2's payment to player 3 (3 players)",
    "2p-leader-types-mixed": "leader with private types commits to a mixture per type (2 players)",
    "sig-mixed": "leader draws a joint action profile, recommends each follower its action "
                 "and pays for obedience (any number of players)",
    "sig-pure": "as sig-mixed but the leader's own action is fixed and pure",
    "sig-leader-types": "as sig-mixed with a separate profile distribution per leader type",
    "bayes-follower-exact": "follower with private types; exact by enumerating the type to "
                            "action map (exponential in the number of types)",
    "leader-types-pure-exact": "leader with private types commits to a pure action per type; "
                               "exact by enumeration",
}
APPROX_SETTINGS = {
    "single-commit": "3 players: grid over leader mixtures and outcome payments, followers play "
                     "the leader-best Nash equilibrium of what remains",
    "seq-mixed": "3 players: grid over leader mixtures and outcome payments, then player 2 "
                 "commits optimally against player 3",
    "payments-only": "2 players: grid over outcome payments with no action commitment, players "
                     "then reach the leader-best Nash equilibrium",
}
REDUCTIONS = ("bcbs", "bvc", "vc-bayes", "pricing")

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_SIZE, EXIT_INTERNAL = 0, 1, 2, 3, 4


def _rational_arg(text):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational like 1/8")
    if "." in text or "e" in text.lower():
        raise argparse.ArgumentTypeError("give rationals as p/q, not decimals")
    return value


def _positive(text):
    value = _rational_arg(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _nonnegative(text):
    value = _rational_arg(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _settings_help(table):
    return "; ".join(f"{k}: {v}" for k, v in table.items())


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def build_parser():
    p = _Parser(prog="commitpay", description="Optimal commitments with payments in small games.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("-o", "--output", help="write the JSON result here instead of stdout")
        sp.add_argument("--no-payments", action="store_true",
                        help="force every payment variable to zero")

    s = sub.add_parser("solve", help="exact solvers", description=_settings_help(SOLVE_SETTINGS))
    s.add_argument("--setting", required=True, choices=sorted(SOLVE_SETTINGS),
                   help=_settings_help(SOLVE_SETTINGS))
    s.add_argument("--dump-lp", metavar="PATH", help="write every LP built, in LP text format")
    s.add_argument("--budget", type=int, default=hard.DEFAULT_BUDGET,
                   help="case limit for the exact enumerators")
    s.add_argument("game")
    common(s)

    a = sub.add_parser("approx", help="grid approximations (lower bounds)",
                       description=_settings_help(APPROX_SETTINGS))
    a.add_argument("--setting", required=True, choices=sorted(APPROX_SETTINGS),
                   help=_settings_help(APPROX_SETTINGS))
    a.add_argument("--step", type=_positive, help="grid step 1/k")
    a.add_argument("--cap", type=_nonnegative, help="largest payment tried (default: the "
                   "largest follower utility range)")
    a.add_argument("--budget", type=int, default=hard.GRID_BUDGET, help="grid cell limit")
    a.add_argument("game")
    common(a)

    o = sub.add_parser("oracle", help="independent reference computations")
    mode = o.add_mutually_exclusive_group(required=True)
    mode.add_argument("--nash", action="store_true",
                      help="leader-best Nash equilibrium without commitment (2 players), or "
                           "the followers' leader-best equilibrium for each pure leader action "
                           "without payments (3 players)")
    mode.add_argument("--brute-force", action="store_true",
                      help="grid search over mixtures and follower-action payments (2 players)")
    o.add_argument("--step", type=_positive, default=Fraction(1, 16))
    o.add_argument("--cap", type=_nonnegative)
    o.add_argument("--budget", type=int, default=10 ** 6)
    o.add_argument("game")
    o.add_argument("-o", "--output")

    g = sub.add_parser("generate", help="build games from reduction sources or at random")
    gm = g.add_mutually_exclusive_group(required=True)
    gm.add_argument("--reduction", choices=REDUCTIONS,
                    help="bcbs: bipartite graph to a 3-player biclique game; bvc: graph to a "
                         "3-player balanced-cover game; vc-bayes: graph to a leader-typed "
                         "vertex-cover game; pricing: unit-demand buyers to a follower-typed game")
    gm.add_argument("--random", metavar="SHAPE", help="random game, e.g. 3x4 or 2x2x2")
    g.add_argument("--seed", type=int, default=0, help="seed for --random")
    g.add_argument("--payoff-range", type=int, default=5,
                   help="--random draws integer payoffs in [-R, R]")
    g.add_argument("--parameter", type=int, help="k for bcbs or K for vc-bayes, overriding the "
                                                "source file")
    g.add_argument("source", nargs="?")
    g.add_argument("-o", "--output")

    v = sub.add_parser("verify", help="check emitted commitments")
    vm = v.add_mutually_exclusive_group(required=True)
    vm.add_argument("--ic", action="store_true",
                    help="obedience check: verify --ic commitment.json game.json")
    vm.add_argument("--witness", action="store_true",
                    help="reduction check: verify --witness --reduction KIND source.json "
                         "report.json")
    v.add_argument("--reduction", choices=REDUCTIONS)
    v.add_argument("--parameter", type=int)
    v.add_argument("first")
    v.add_argument("second")
    v.add_argument("-o", "--output")
    return p


# ---------------------------------------------------------------------------
# commands


def _as_normal(game, players=None):
    if isinstance(game, BayesianGame):
        if any(len(t) != 1 for t in game.types):
            raise ValidationError("this setting needs a game without private types")
        game = game.collapse()
    if players is not None and game.n_players != players:
        raise ValidationError(f"this setting needs a {players}-player game, "
                              f"got {game.n_players}")
    return game


def _as_bayesian(game):
    return game if isinstance(game, BayesianGame) else BayesianGame.from_normal_form(game)


def cmd_solve(args):
    game = schema.read_game(args.game)
    sink = [] if args.dump_lp else None
    np_ = args.no_payments
    st = args.setting
    if st == "2p-pure":
        rep = commit.solve_two_player_pure(_as_normal(game, 2), np_)
    elif st == "2p-mixed":
        rep = commit.solve_two_player_mixed(_as_normal(game, 2), np_, lp_sink=sink)
    elif st == "3p-seq-pure":
        rep = commit.solve_three_player_sequential_pure(_as_normal(game, 3), np_)
    elif st == "2p-leader-types-mixed":
        rep = commit.solve_two_player_leader_types_mixed(_as_bayesian(game), np_, lp_sink=sink)
    elif st in ("sig-mixed", "sig-leader-types"):
        rep = signaling.solve_signaling_mixed(_as_bayesian(game), np_, lp_sink=sink)
        rep.setting = st
    elif st == "sig-pure":
        rep = signaling.solve_signaling_pure(_as_bayesian(game), np_, lp_sink=sink)
    elif st == "bayes-follower-exact":
        rep = hard.solve_bayesian_follower_exact(_as_bayesian(game), np_, args.budget,
                                                 lp_sink=sink)
    else:
        rep = hard.solve_leader_types_pure_exact(_as_bayesian(game), np_, args.budget)
    out = schema.dumps(schema.report_to_doc(game, rep))
    if sink is not None:
        _write(args.dump_lp, "\n".join(dump_lp(lp) for lp in sink))
    return out


def cmd_approx(args):
    game = schema.read_game(args.game)
    if args.no_payments and args.cap not in (None, 0):
        raise ValidationError("--no-payments conflicts with a positive --cap")
    cap = Fraction(0) if args.no_payments else args.cap
    kw = {"cap": cap, "budget": args.budget}
    if args.step is not None:
        kw["step"] = args.step
    if args.setting == "single-commit":
        rep = hard.approx_single_commitment(_as_normal(game, 3), **kw)
    elif args.setting == "seq-mixed":
        rep = hard.approx_sequential_mixed(_as_normal(game, 3), **kw)
    else:
        rep = hard.approx_payments_only(_as_normal(game, 2), **kw)
    return schema.dumps(schema.report_to_doc(game, rep))


def cmd_oracle(args):
    game = _as_normal(schema.read_game(args.game))
    if args.brute_force:
        rep = equilibria.brute_force_commitment(_as_normal(game, 2), args.step, args.cap,
                                                args.budget)
        return schema.dumps(schema.report_to_doc(game, rep))
    if game.n_players == 2:
        es = equilibria.enumerate_nash_two_player(game)
        value, pair, flag = equilibria.best_nash_two_player(game)
        doc = {
            "setting": "nash",
            "value": schema.rat(value),
            "flag": flag,
            "best": [{game.actions[i][k]: schema.rat(p) for k, p in enumerate(pair[i])}
                     for i in range(2)],
            "equilibria": [
                {"profile": [{game.actions[i][k]: schema.rat(p) for k, p in enumerate(eq[i])}
                             for i in range(2)],
                 "leader_value": schema.rat(equilibria.leader_value_in(game, eq))}
                for eq in es.equilibria],
        }
        return schema.dumps(doc)
    if game.n_players == 3:
        best = None
        for a1 in range(game.shape[0]):
            rep = equilibria.best_nash_for_leader(game, Commitment(PureAction(a1),
                                                                   zero_payments(game)))
            if best is None or rep.value > best.value:
                best = rep
        return schema.dumps(schema.report_to_doc(game, best))
    raise ValidationError("--nash supports 2- and 3-player games")


def _random_game(shape_text, seed, R):
    try:
        shape = [int(x) for x in shape_text.lower().split("x")]
    except ValueError:
        raise ValidationError(f"shape {shape_text!r} should look like 3x4")
    if len(shape) < 2 or min(shape) < 1:
        raise ValidationError("a random game needs at least two players with one action each")
    rng = random.Random(seed)
    actions = [[f"a{i + 1}_{k}" for k in range(m)] for i, m in enumerate(shape)]
    return NormalFormGame.from_function(actions, lambda a: tuple(
        Fraction(rng.randint(-R, R)) for _ in shape))


def cmd_generate(args):
    if args.random:
        return schema.write_game(_random_game(args.random, args.seed, args.payoff_range))
    if not args.source:
        raise ValidationError("generate --reduction needs a source file")
    doc = schema.load_json(args.source)
    kind = args.reduction
    try:
        if kind == "bcbs":
            k = args.parameter if args.parameter is not None else doc.get("k")
            game = reductions.reduce_bcbs(schema.read_bipartite(doc), _int_param(k, "k"))
        elif kind == "bvc":
            eps = doc.get("epsilon")
            if eps is not None:
                probs = []
                eps = schema.parse_rational(eps, "epsilon", probs)
                if probs:
                    raise SchemaError(probs)
            game = reductions.reduce_balanced_vertex_cover(schema.read_graph(doc), eps)
        elif kind == "vc-bayes":
            K = args.parameter if args.parameter is not None else doc.get("K")
            game = reductions.reduce_vertex_cover_bayesian(schema.read_graph(doc),
                                                           _int_param(K, "K"))
        else:
            game = reductions.reduce_item_pricing(schema.read_pricing(doc))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed {kind} source: {exc}")
    return schema.write_game(game)


def _int_param(x, name):
    if not isinstance(x, int) or isinstance(x, bool) or x < 1:
        raise ValidationError(f"{name} must be a positive integer (source file or --parameter)")
    return x


def _read_report_or_commitment(doc, game):
    if isinstance(doc, dict) and "commitment" in doc and "value" in doc:
        return schema.report_from_doc(game, doc).commitment
    return schema.commitment_from_doc(game, doc)


def cmd_verify(args):
    if args.ic:
        game = schema.read_game(args.second)
        sc = _read_report_or_commitment(schema.load_json(args.first), game)
        if not isinstance(sc, SignalingCommitment):
            raise ValidationError("--ic expects a signaling commitment")
        cert = signaling.check_incentive_compatibility(game, sc)
        ok = signaling.ic_passes(cert)
        doc = {"check": "ic", "passes": ok,
               "certificate": [{"id": cid, "slack": schema.rat(s)} for cid, s in cert]}
        return schema.dumps(doc), ok
    if not args.reduction:
        raise ValidationError("--witness needs --reduction")
    kind = args.reduction
    src = schema.load_json(args.first)
    if kind == "bcbs":
        source = schema.read_bipartite(src)
        param = args.parameter if args.parameter is not None else src.get("k")
        game = reductions.reduce_bcbs(source, _int_param(param, "k"))
    elif kind == "vc-bayes":
        source = schema.read_graph(src)
        param = args.parameter if args.parameter is not None else src.get("K")
        game = reductions.reduce_vertex_cover_bayesian(source, _int_param(param, "K"))
    elif kind == "bvc":
        source, param = schema.read_graph(src), None
        game = reductions.reduce_balanced_vertex_cover(source)
    else:
        source, param = schema.read_pricing(src), None
        game = reductions.reduce_item_pricing(source)
    report = schema.report_from_doc(game, schema.load_json(args.second))
    res = reductions.verify_witness(kind, source, report, param)
    doc = {"check": "witness", "reduction": kind, "status": res.status, "detail": res.detail,
           "witness": schema._jsonable(res.witness)}
    return schema.dumps(doc), res.ok


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _fail(code, kind, exc):
    diag = {"error": kind, "message": str(exc)}
    if isinstance(exc, SchemaError):
        diag["violations"] = list(exc.violations)
    sys.stderr.write(json.dumps(diag) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        ok = True
        if args.command == "solve":
            out = cmd_solve(args)
        elif args.command == "approx":
            out = cmd_approx(args)
        elif args.command == "oracle":
            out = cmd_oracle(args)
        elif args.command == "generate":
            out = cmd_generate(args)
        else:
            out, ok = cmd_verify(args)
    except (SchemaError, ValidationError) as exc:
        return _fail(EXIT_INPUT, "invalid-input", exc)
    except SizeError as exc:
        return _fail(EXIT_SIZE, "too-large", exc)
    except ConsistencyError as exc:
        return _fail(EXIT_INTERNAL, "consistency", exc)
    except CommitPayError as exc:
        return _fail(EXIT_INTERNAL, "error", exc)
    except OSError as exc:
        return _fail(EXIT_INPUT, "io", exc)
    if args.output:
        _write(args.output, out)
    else:
        sys.stdout.write(out)
    return EXIT_OK if ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
