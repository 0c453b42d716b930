"""Command-line pipeline: embed, build networks, realize and verify"""
import argparse
import json
import logging
from pathlib import Path
import sys
from typing import Any

import voluptuous as vol

from .book_embed import BookEmbedding
from .book_embed import SpineOrder
from .book_embed import dnn_embedding
from .book_embed import exact_thickness
from .book_embed import greedy_embed
from .ccn import build_Pn
from .ccn import build_Q
from .ccn import export_ccn_dot
from .ccn import minimal_synchrony
from .common.config import PipelineConfig
from .common.exceptions import CcnException
from .common.exceptions import HetNetValidationException
from .common.exceptions import SolverLimitException
from .common.exceptions import SynthesisException
from .common.exceptions import VerificationException
from .common.exceptions import VerificationFailedException
from .const import DEFAULT_MAX_PAGES
from .const import DNN_INCOMING
from .const import DNN_OUTGOING
from .const import EXIT_INPUT
from .const import EXIT_OK
from .const import EXIT_SOLVER
from .const import EXIT_SYNTHESIS
from .const import EXIT_VERIFICATION
from .const import FAMILY_PN
from .const import FAMILY_Q
from .const import GRADE_PARTIAL
from .const import MODE_BOOK
from .const import MODES
from .const import SOLVER_EXACT
from .const import SOLVERS
from .const import STARTUP_MESSAGE
from .graph_core import GENERATORS
from .graph_core import HetNet
from .graph_core import export_dot
from .plotting import figure_path
from .plotting import plot_book
from .plotting import write_plots
from .serialization import load_embedding
from .serialization import load_network
from .serialization import load_realization
from .serialization import realization_dump
from .serialization import save_report
from .serialization import write_json
from .serialization import write_trajectory_csv
from .synth.realize import Realization
from .synth.realize import assign_subspaces
from .synth.realize import realize_almost_complete
from .synth.realize import realize_book
from .verify import RealizationReport
from .verify import verify_all

_LOGGER = logging.getLogger(__name__)

EXIT_CODES: dict[type[Exception], int] = {
    HetNetValidationException: EXIT_INPUT,
    CcnException: EXIT_INPUT,
    vol.Invalid: EXIT_INPUT,
    SolverLimitException: EXIT_SOLVER,
    SynthesisException: EXIT_SYNTHESIS,
    VerificationException: EXIT_VERIFICATION,
    VerificationFailedException: EXIT_VERIFICATION,
}

_DNN_GENERATORS = {"dnn-incoming": DNN_INCOMING, "dnn-outgoing": DNN_OUTGOING}


def _parse_generator(spec: str) -> tuple[str, int | None]:
    name, _, size = spec.partition(":")
    if name not in GENERATORS and name not in _DNN_GENERATORS:
        known = sorted(list(GENERATORS) + list(_DNN_GENERATORS))
        raise HetNetValidationException(f"unknown generator {name}", f"known: {known}")
    try:
        return name, int(size) if size else None
    except ValueError as ex:
        raise HetNetValidationException("generator size must be an integer", spec) from ex


def load_graph(
    path: str | None, generator: str | None, allow_weak: bool = False
) -> tuple[HetNet, BookEmbedding | None]:
    """The network to work on and, for the DNN generators, its explicit embedding"""
    if generator is None:
        if path is None:
            raise HetNetValidationException("a graph file or --generator is required")
        return load_network(Path(path), allow_weak), None
    name, size = _parse_generator(generator)
    if name in _DNN_GENERATORS:
        return dnn_embedding(size or 6, _DNN_GENERATORS[name])
    default = {"cycle": 3, "dnn": 6, "fan": 3, "hub": 4}.get(name)
    return GENERATORS[name](size or default), None


def compute_embedding(
    net: HetNet, solver: str, pages_max: int
) -> tuple[BookEmbedding, bool]:
    if solver == SOLVER_EXACT:
        result = exact_thickness(net, max_pages=pages_max)
        return result.embedding, result.optimal
    emb = greedy_embed(net, SpineOrder.identity(net.num_nodes))
    if emb.pages > pages_max:
        raise SolverLimitException(f"greedy embedding needs {emb.pages} pages", emb)
    return emb, False


def _overrides(pairs: list[str]) -> dict[str, Any]:
    result = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise HetNetValidationException("expected KEY=VALUE", pair)
        try:
            result[key] = json.loads(value)
        except json.JSONDecodeError:
            result[key] = value
    return result


def _pipeline(args: argparse.Namespace) -> PipelineConfig:
    return PipelineConfig.from_dict(
        {
            "input": args.graph or args.generator or "",
            "mode": args.mode,
            "solver": args.solver,
            "out": args.out,
            "seed": args.seed,
            "pages_max": args.pages_max,
            "perturb": args.perturb,
            "trials": args.trials,
            "embedding": args.embedding,
            "allow_weak": args.allow_weak,
            "realization": _overrides(args.set),
        }
    )


def cmd_embed(args: argparse.Namespace) -> int:
    cfg = _pipeline(args)
    net, emb = load_graph(args.graph, args.generator, cfg.allow_weak)
    optimal = False
    searched = emb is None and cfg.solver == SOLVER_EXACT
    if emb is None:
        emb, optimal = compute_embedding(net, cfg.solver, cfg.pages_max)
    out = Path(cfg.out)
    write_json(out / "embedding.json", emb.as_dict(net))
    plot_book(net, emb, figure_path(out, "book"))
    print(f"pages={emb.pages}, cells={emb.pages + 1}" + ("" if optimal else " (upper bound)"))
    if searched and not optimal:
        _LOGGER.error("Exact search stopped before proving %d pages minimal", emb.pages)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_network(args: argparse.Namespace) -> int:
    params = args.params
    if args.family == FAMILY_PN:
        if len(params) != 1:
            raise CcnException("Pn takes one parameter n")
        ccn = build_Pn(params[0])
    else:
        if len(params) != 2:
            raise CcnException("Q takes two parameters n1 n2")
        ccn = build_Q(params[0], params[1])
    out = Path(args.out)
    name = f"{args.family}-" + "-".join(str(p) for p in params)
    write_json(out / f"{name}.json", ccn.as_dict())
    (out / f"{name}.dot").write_text(export_ccn_dot(ccn), encoding="utf-8")
    print(f"cells={ccn.num_cells}, types={ccn.num_types}")
    for subspace in minimal_synchrony(ccn):
        print(f"  {subspace}")
    return EXIT_OK


def _finish(
    real: Realization, cfg: PipelineConfig, args: argparse.Namespace
) -> RealizationReport:
    report = verify_all(real, eta=cfg.perturb, trials=cfg.trials)
    out = Path(cfg.out)
    save_report(report, out / "report.json")
    write_plots(real, report.connections, out)
    if args.csv:
        for conn in report.connections:
            if conn.trajectory is not None:
                write_trajectory_csv(conn.trajectory, out / "trajectories" / f"{conn.edge.replace('->', '_')}.csv")
    passed = sum(c.passed for c in report.connections)
    print(f"cells={real.ccn.num_cells}, connections={passed}/{len(report.connections)}, grade={report.grade}")
    if report.robustness is not None:
        rob = report.robustness
        print(f"robustness eta={rob.eta:g}: {rob.passed}/{rob.trials}")
    if args.strict and report.grade == GRADE_PARTIAL:
        raise VerificationFailedException(report.grade, report.failed)
    return report


def cmd_realize(args: argparse.Namespace) -> int:
    cfg = _pipeline(args)
    net, emb = load_graph(args.graph, args.generator, cfg.allow_weak)
    if cfg.mode == MODE_BOOK:
        if cfg.embedding is not None:
            emb = load_embedding(net, Path(cfg.embedding))
        elif emb is None:
            emb, _ = compute_embedding(net, cfg.solver, cfg.pages_max)
        real = realize_book(net, emb, cfg.realization)
    else:
        n1, n2, _ = assign_subspaces(net)
        _LOGGER.info("Using Q(%d, %d)", n1, n2)
        real = realize_almost_complete(net, cfg.realization)
    out = Path(cfg.out)
    write_json(out / "realization.json", realization_dump(real, cfg.allow_weak))
    (out / "network.dot").write_text(export_dot(net), encoding="utf-8")
    _finish(real, cfg, args)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    real = load_realization(Path(args.dump))
    cfg = PipelineConfig.from_dict(
        {
            "input": args.dump,
            "mode": real.mode,
            "out": args.out,
            "seed": real.cfg.seed,
            "perturb": args.perturb,
            "trials": args.trials,
            "realization": real.cfg.as_dict(),
        }
    )
    _finish(real, cfg, args)
    return EXIT_OK


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("-v", "--verbose", action="count", default=0)


def _graph_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("graph", nargs="?", help="network JSON file")
    parser.add_argument("--generator", help="built-in network, e.g. figure2, cycle:3, fan:3, dnn-incoming:6")
    parser.add_argument("--allow-weak", action="store_true", help="skip the strong connectivity check")
    parser.add_argument("--solver", choices=SOLVERS, default=SOLVER_EXACT)
    parser.add_argument("--pages-max", type=int, default=DEFAULT_MAX_PAGES)
    parser.add_argument("--mode", choices=MODES, default=MODE_BOOK)
    parser.add_argument("--embedding", help="embedding JSON to use instead of solving")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="realization parameter override")


def _verify_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--perturb", type=float, default=0.0, help="perturbation size eta")
    parser.add_argument("--trials", type=int, default=0, help="number of perturbed trials")
    parser.add_argument("--csv", action="store_true", help="dump connection trajectories as CSV")
    parser.add_argument("--strict", action="store_true", help="fail when the grade is partial")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetnet_realize", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    embed = sub.add_parser("embed", help="compute a book embedding")
    _graph_options(embed)
    _common(embed)
    embed.set_defaults(handler=cmd_embed, perturb=0.0, trials=0)

    network = sub.add_parser("network", help="build P_n or Q(n1, n2)")
    network.add_argument("family", choices=[FAMILY_PN, FAMILY_Q])
    network.add_argument("params", type=int, nargs="+")
    _common(network)
    network.set_defaults(handler=cmd_network)

    realize = sub.add_parser("realize", help="synthesize and verify a realization")
    _graph_options(realize)
    _verify_options(realize)
    _common(realize)
    realize.set_defaults(handler=cmd_realize)

    verify = sub.add_parser("verify", help="re-run verification on a realization dump")
    verify.add_argument("dump", help="realization.json")
    _verify_options(verify)
    _common(verify)
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    _LOGGER.info(STARTUP_MESSAGE)
    try:
        return args.handler(args)
    except tuple(EXIT_CODES) as ex:
        code = next(c for cls, c in EXIT_CODES.items() if isinstance(ex, cls))
        print(f"error: {ex}", file=sys.stderr)
        return code
    except Exception:  # pylint: disable=broad-except
        _LOGGER.error("Unexpected failure", exc_info=True)
        return EXIT_INPUT
