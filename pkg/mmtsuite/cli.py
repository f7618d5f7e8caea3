"""
Command line interface: ``mmtsuite <command> <instance.json> [options]``.

Results are printed as JSON on stdout, diagnostics go to stderr. Exit status is 0 on success,
1 when a verification fails, 2 on invalid input and 3 when a resource limit is hit.
"""
import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

from ._metadata import __version__
from .calibration import mass_gap_certificate, verify_calibration
from .constants import DEFAULT_TOL, MAX_PERMS
from .costs import check_axioms
from .errors import LPError, MMTError, PreconditionError, ResourceLimitError
from .instance import InstanceDocument, dumps, network_record, read_instance, with_networks, write_instance
from .lifting import lift, project
from .log import logger, set_verbosity
from .model import LabeledNetwork, Network, energy, mass
from .norm import verify_eqn_main
from .render import render_ball_svg, render_network_svg
from .solver import grid_oracle, solve_mmtp, solve_on_grid

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


def _emit(record: Any, output: Optional[str] = None) -> None:
    text = dumps(record)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _derived(doc: InstanceDocument, args: argparse.Namespace, networks: Dict[str, Any], record: Dict[str, Any]) -> None:
    """Write a new instance holding the produced networks to ``-o``, or print the record."""
    if args.output:
        write_instance(with_networks(doc, networks), args.output)
        logger.info(f"wrote {args.output}")
    _emit(record)


def cmd_check_cost(doc: InstanceDocument, args: argparse.Namespace) -> int:
    cost = doc.require_cost()
    report = check_axioms(cost, cost.box if cost.box is not None else doc.layout().counts)
    record = dict(report._asdict(), passed=report.passed,
                  counterexamples=[c._asdict() for c in report.counterexamples])
    _emit(record, args.output)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_build_norm(doc: InstanceDocument, args: argparse.Namespace) -> int:
    ball = doc.build_ball(args.hull)
    record: Dict[str, Any] = {"ball": ball.describe(), "extreme_points": ball.extreme_points().tolist()}
    ok = True
    if doc.cost is not None and ball.dimension:
        report = verify_eqn_main(doc.cost, ball, doc.layout(), tol=args.tol, max_perms=args.max_perms or MAX_PERMS,
                                 seed=args.seed)
        record["eqn_main"] = {"passed": report.passed, "max_residual": report.max_residual, "mode": report.mode,
                              "checked": report.checked,
                              "witness": report.witness._asdict() if report.witness else None}
        ok = report.passed
    _emit(record, args.output)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_energy(doc: InstanceDocument, args: argparse.Namespace) -> int:
    net = doc.network(args.network, labeled=False)
    _emit({"energy": energy(net, doc.require_cost())}, args.output)  # type: ignore
    return EXIT_OK


def cmd_mass(doc: InstanceDocument, args: argparse.Namespace) -> int:
    lnet = doc.network(args.network, labeled=True)
    _emit({"mass": mass(lnet, doc.build_ball(args.hull))}, args.output)  # type: ignore
    return EXIT_OK


def cmd_lift(doc: InstanceDocument, args: argparse.Namespace) -> int:
    net = doc.network(args.network, labeled=False)
    lnet, sigma = lift(net, doc.layout())  # type: ignore
    _derived(doc, args, {"lifted": lnet}, {"sigma": sigma, "network": network_record(lnet)})
    return EXIT_OK


def cmd_project(doc: InstanceDocument, args: argparse.Namespace) -> int:
    lnet = doc.network(args.network, labeled=True)
    net = project(lnet, doc.layout())  # type: ignore
    _derived(doc, args, {"projected": net}, {"network": network_record(net)})
    return EXIT_OK


def cmd_verify_calibration(doc: InstanceDocument, args: argparse.Namespace) -> int:
    block = doc.calibration
    if block is None:
        raise PreconditionError("verify-calibration: instance has no calibration block")
    lnet = doc.networks[block.network]
    if not isinstance(lnet, LabeledNetwork):
        raise PreconditionError(f"verify-calibration: network {block.network!r} is not labeled")
    ball = doc.build_ball(args.hull)
    report = verify_calibration(block.form, lnet, ball, args.tol)
    record: Dict[str, Any] = {
        "tangency_residual": report.tangency_residual,
        "closed": report.closed,
        "max_comass": report.max_comass,
        "verdict": report.verdict,
        "witnesses": [w._asdict() for w in report.witnesses],
    }
    for w in report.witnesses:
        logger.warning(f"verify-calibration: {w.condition} fails at {w.where}: {w.value:.12g} vs {w.expected:.12g}")
    if block.competitor is not None:
        competitor = doc.networks[block.competitor]
        if not isinstance(competitor, LabeledNetwork):
            raise PreconditionError(f"verify-calibration: network {block.competitor!r} is not labeled")
        record["mass_gap"] = mass_gap_certificate(block.form, lnet, competitor, ball, args.tol)._asdict()
    _emit(record, args.output)
    return EXIT_OK if report.verdict else EXIT_FAILED


def cmd_solve(doc: InstanceDocument, args: argparse.Namespace) -> int:
    options = doc.solve_options(max_steiner=args.max_steiner, max_perms=args.max_perms, seed=args.seed,
                                hull=args.hull, irrigation=args.irrigation or None, progress=args.progress or None)
    result = solve_mmtp(doc.boundary, doc.require_cost(), options)
    record = {
        "energy": result.energy,
        "mass": result.mass,
        "equivalence_gap": result.equivalence_gap,
        "sigma": result.sigma,
        "topology": result.topology._asdict() if result.topology else None,
        "stats": result.stats._asdict(),
        "network": network_record(result.network),
    }
    networks: Dict[str, Network] = {"solution": result.network}
    if result.labeled_network is not None:
        networks["solution_labeled"] = result.labeled_network  # type: ignore
    _derived(doc, args, networks, record)
    return EXIT_OK


def cmd_oracle(doc: InstanceDocument, args: argparse.Namespace) -> int:
    if doc.grid is None:
        raise PreconditionError("oracle: instance has no grid")
    cost = doc.require_cost()
    best = grid_oracle(doc.boundary, cost, doc.grid)
    record: Dict[str, Any] = {"energy": best.value, "sigma": best.sigma, "network": network_record(best.network)}
    status = EXIT_OK
    if args.compare:
        other = solve_on_grid(doc.boundary, cost, doc.grid, doc.solve_options(hull=args.hull))
        record["grid_mass"] = other.value
        record["agrees"] = abs(other.value - best.value) <= max(args.tol, 1e-9) * max(1.0, best.value)
        status = EXIT_OK if record["agrees"] else EXIT_FAILED
    _derived(doc, args, {"oracle": best.network}, record)
    return status


def cmd_render(doc: InstanceDocument, args: argparse.Namespace) -> int:
    if args.ball:
        svg = render_ball_svg(doc.build_ball(args.hull))
    else:
        net = doc.network(args.network)
        svg = render_network_svg(net, boundary=doc.boundary if isinstance(net, Network) else None)
    if args.output:
        Path(args.output).write_text(svg, encoding="utf-8")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[InstanceDocument, argparse.Namespace], int]] = {
    "check-cost": cmd_check_cost,
    "build-norm": cmd_build_norm,
    "energy": cmd_energy,
    "mass": cmd_mass,
    "lift": cmd_lift,
    "project": cmd_project,
    "verify-calibration": cmd_verify_calibration,
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "render": cmd_render,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", help="instance document (JSON)")
    common.add_argument("-o", "--output", help="output path")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="verification tolerance (default %(default)g)")
    common.add_argument("--max-steiner", type=int, default=None, help="Steiner nodes per topology (default 2)")
    common.add_argument("--max-perms", type=int, default=None,
                        help="exhaustive relabelling search up to this many permutations (default 10000)")
    common.add_argument("--seed", type=int, default=None, help="seed of the sampled relabelling search")
    common.add_argument("--hull", choices=("full", "good_pairs"), default=None, help="ball construction")
    common.add_argument("--network", default=None, help="name of the network to use")

    parser = argparse.ArgumentParser(prog="mmtsuite", description="Discrete multi-material transport toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "solve":
            p.add_argument("--irrigation", action="store_true", help="identity relabelling for dominant boundaries")
            p.add_argument("--progress", action="store_true", help="show a progress bar (needs rich)")
        if name == "oracle":
            p.add_argument("--compare", action="store_true", help="also minimize the mass on the grid")
        if name == "render":
            p.add_argument("--ball", action="store_true", help="draw the unit ball instead of a network")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    set_verbosity(args.verbose)
    try:
        doc = read_instance(args.instance)
        return COMMANDS[args.command](doc, args)
    except ResourceLimitError as e:
        logger.error(str(e))
        return EXIT_LIMIT
    except (MMTError, OSError) as e:
        if isinstance(e, LPError):
            logger.error(f"internal LP failure: {e}")
        else:
            logger.error(str(e))
        return EXIT_INPUT

