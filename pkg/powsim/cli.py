import argparse
import logging
import os
import sys
from typing import Optional

from powsim.attack.search import SearchBudget, threshold_search
from powsim.config import POLICY_NAMES, PROTOCOL_NAMES, attack_config, config_hash
from powsim.engine import run
from powsim.errors import SimulationError
from powsim.experiments.attack_eval import AttackSettings, DeskRuns, FullRuns, cmd_attack_eval, summarize_attacks
from powsim.experiments.aggregate import MinimumRuns, aggregate
from powsim.experiments.breakeven import BreakEvenSettings, cmd_breakeven
from powsim.experiments.episode_server import EpisodeServer
from powsim.experiments.fairness import DeskBudget, FairnessSettings, FullBudget, cmd_fairness
from powsim.experiments.tables import cmd_orphan_table, cmd_race, cmd_short_term, print_orphan_table
from powsim.format.format_csv import dump_csv
from powsim.format.format_json import dump_json
from powsim.format.registry import read_config, write_dag, write_results
from powsim.io import Rows
from powsim.metrics import accumulate_rewards, measured_orphan_rate, winning_chain

logger = logging.getLogger(__name__)


def float_list(value: str) -> tuple[float, ...]:
    return tuple(float(x) for x in value.split(",") if x.strip() != "")


def int_list(value: str) -> tuple[int, ...]:
    return tuple(int(x) for x in value.split(",") if x.strip() != "")


def name_list(choices):
    def parse(value: str) -> tuple[str, ...]:
        names = tuple(x.strip() for x in value.split(",") if x.strip() != "")
        for name in names:
            if name not in choices:
                raise argparse.ArgumentTypeError("unsupported name: {0}".format(name))
        return names

    return parse


def summary_path(out: str) -> str:
    root, _ = os.path.splitext(out)
    return "{0}.summary.json".format(root)


def emit_rows(args, rows: Rows):
    if args.out is None:
        dump_csv(rows, sys.stdout)
    else:
        write_results(args.out, rows)
        logger.info("wrote %d rows to %s", len(rows), args.out)


def emit_summary(args, summary):
    if args.out is None:
        dump_json(summary, sys.stderr)
    else:
        with open(summary_path(args.out), 'wt') as stream:
            dump_json(summary, stream)


def emit_json(args, data):
    if args.out is None:
        dump_json(data, sys.stdout)
    else:
        with open(args.out, 'wt') as stream:
            dump_json(data, stream)


def check_runs(args, runs: int):
    if runs < MinimumRuns and not args.force:
        raise SimulationError("{0} runs per configuration are too few to aggregate, use --force to run anyway".format(
            runs))


def cmd_fairness_args(args):
    settings = FairnessSettings(
        protocol=args.protocol,
        ks=args.k,
        intervals=args.interval,
        weak=args.weak,
        delay=args.delay,
        budget=args.budget if args.budget is not None else (FullBudget if args.paper_scale else DeskBudget),
        seed=args.seed,
    )
    rows = cmd_fairness(settings, args.workers)
    emit_rows(args, rows)
    emit_summary(args, aggregate(rows, ['protocol', 'k', 'interval'], 'weak_relative_reward_pct', args.force))


def cmd_attack_eval_args(args):
    runs = args.runs if args.runs is not None else (FullRuns if args.paper_scale else DeskRuns)
    check_runs(args, runs)
    settings = AttackSettings(
        protocols=args.protocol,
        policies=args.policy,
        alphas=args.alpha,
        gammas=args.gamma,
        k=args.k,
        n=args.n,
        runs=runs,
        stop_blocks=args.blocks,
        seed=args.seed,
    )
    rows = cmd_attack_eval(settings, args.workers)
    emit_rows(args, rows)
    emit_summary(args, summarize_attacks(rows, args.force))


def cmd_breakeven_args(args):
    runs = args.runs if args.runs is not None else (FullRuns if args.paper_scale else DeskRuns)
    check_runs(args, runs)
    rows = []
    for protocol in args.protocol:
        for gamma in args.gamma:
            settings = BreakEvenSettings(protocol=protocol, policy=args.policy, gamma=gamma, k=args.k, n=args.n,
                                         stop_blocks=args.blocks, runs=runs, max_runs=max(runs, args.max_runs),
                                         tolerance=args.tolerance, seed=args.seed)
            rows.append(cmd_breakeven(settings, args.workers))
    emit_rows(args, rows)


def cmd_orphan_table_args(args):
    rows = cmd_orphan_table(args.interval, args.k, args.tau0, args.transmit)
    if args.pretty:
        print_orphan_table(rows)
    else:
        emit_rows(args, rows)


def cmd_short_term_args(args):
    emit_rows(args, cmd_short_term(args.k))


def cmd_race_args(args):
    emit_rows(args, cmd_race(args.gamma, args.n, args.races, args.seed))


def cmd_episode_server_args(args):
    EpisodeServer().serve()


def cmd_run_args(args):
    config = read_config(args.config)
    result = run(config)
    tip = winning_chain(result.view, result.protocol)
    ledger = accumulate_rewards(result.view, tip, result.protocol)
    if args.dump is not None:
        write_dag(args.dump, result.view)
    emit_json(args, {
        'config_hash': config_hash(config),
        'seed': config.seed,
        'blocks': len(list(result.view.blocks())),
        'pows': result.pows,
        'simulated_seconds': result.seconds,
        'events': result.events,
        'tip': tip,
        'progress': ledger.progress,
        'rewards': {str(miner): amount for miner, amount in sorted(ledger.rewards.items())},
        'orphans': measured_orphan_rate(result.view, tip),
    })


def cmd_search_args(args):
    config = attack_config(args.protocol[0], args.alpha[0], args.gamma[0], None, k=args.k, n=args.n,
                           stop_blocks=args.blocks)
    result = threshold_search(config, SearchBudget(args.candidates, args.runs or MinimumRuns), args.seed,
                              workers=args.workers)
    emit_json(args, {
        'policy': result.policy._asdict(),
        'score': result.score,
        'evaluated': [{'policy': policy._asdict(), 'score': score} for policy, score in result.evaluated],
    })


def add_attack_arguments(parser: argparse.ArgumentParser, alphas, policies=True):
    parser.add_argument('--protocol', type=name_list(PROTOCOL_NAMES), default=('tailstorm',),
                        help="comma-separated protocols")
    if policies:
        parser.add_argument('--policy', type=name_list(POLICY_NAMES), default=('minordelay',),
                            help="comma-separated attack policies")
    parser.add_argument('--alpha', type=float_list, default=alphas, help="comma-separated attacker hash rates")
    parser.add_argument('--gamma', type=float_list, default=(0.05, 0.5, 0.95),
                        help="comma-separated attacker network reach")
    parser.add_argument('--k', type=int, default=8)
    parser.add_argument('--n', type=int, default=32)
    parser.add_argument('--stop-blocks', '--blocks', dest='blocks', type=int, default=2048,
                        help="stop after this many blocks")
    parser.add_argument('--runs', type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='powsim', description="proof-of-work consensus simulator")
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--workers', type=int, default=1)
    parser.add_argument('--out', default=None, help="result file, .csv or .json")
    parser.add_argument('--paper-scale', action='store_true', help="use the full run counts and budgets")
    parser.add_argument('--force', action='store_true', help="aggregate even with too few runs")
    parser.add_argument('--verbose', '-v', action='store_true', help="log at debug level")
    commands = parser.add_subparsers(dest='command', required=True)

    fairness = commands.add_parser('fairness', help="weak miner reward per simulated day")
    fairness.add_argument('--protocol', choices=('bitcoin', 'tailstorm'), default='bitcoin')
    fairness.add_argument('--k', type=int_list, default=(1,))
    fairness.add_argument('--interval', type=float_list, default=(600.0,))
    fairness.add_argument('--weak', type=float, default=0.01)
    fairness.add_argument('--delay', type=float, default=6.0)
    fairness.add_argument('--budget', type=int, default=None, help="total PoW budget")
    fairness.set_defaults(handler=cmd_fairness_args)

    attack = commands.add_parser('attack-eval', help="attack rewards over a protocol/policy/alpha/gamma grid")
    add_attack_arguments(attack, (0.20, 0.25, 0.30, 0.35, 0.40, 0.45))
    attack.set_defaults(handler=cmd_attack_eval_args)

    breakeven = commands.add_parser('break-even', help="smallest profitable attacker hash rate")
    add_attack_arguments(breakeven, (), policies=False)
    breakeven.add_argument('--policy', choices=POLICY_NAMES, default='minordelay')
    breakeven.add_argument('--max-runs', type=int, default=120)
    breakeven.add_argument('--tolerance', type=float, default=0.005)
    breakeven.set_defaults(handler=cmd_breakeven_args)

    orphans = commands.add_parser('orphan-table', help="analytic orphan rate bounds")
    orphans.add_argument('--T', '--interval', dest='interval', type=float_list, default=(75.0, 150.0, 300.0, 600.0),
                         help="comma-separated block intervals in seconds")
    orphans.add_argument('--k', type=int_list, default=(1, 5, 10, 15))
    orphans.add_argument('--tau0', type=float, default=5.0)
    orphans.add_argument('--transmit', type=float, default=2.56)
    orphans.add_argument('--pretty', action='store_true', help="print an aligned table instead of CSV")
    orphans.set_defaults(handler=cmd_orphan_table_args)

    short_term = commands.add_parser('short-term', help="one-step reward rates of summarizing or delaying")
    short_term.add_argument('--k', type=int_list, default=(2, 4, 8, 16, 32, 64))
    short_term.set_defaults(handler=cmd_short_term_args)

    race = commands.add_parser('race', help="staged races of the attacker network")
    race.add_argument('--gamma', type=float_list, default=(0.05, 0.5, 0.95))
    race.add_argument('--n', type=int, default=32)
    race.add_argument('--races', type=int, default=100_000)
    race.set_defaults(handler=cmd_race_args)

    server = commands.add_parser('episode-server', help="JSON lines episode control on stdin/stdout")
    server.set_defaults(handler=cmd_episode_server_args)

    single = commands.add_parser('run', help="run a single configuration file")
    single.add_argument('--config', required=True, help=".yaml or .json configuration")
    single.add_argument('--dump', default=None, help="write the final DAG as .jsonl")
    single.set_defaults(handler=cmd_run_args)

    search = commands.add_parser('search', help="search the threshold policy family")
    add_attack_arguments(search, (0.35,), policies=False)
    search.add_argument('--candidates', type=int, default=16)
    search.set_defaults(handler=cmd_search_args)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        args.handler(args)
    except SimulationError as e:
        logger.error("%s", e)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
