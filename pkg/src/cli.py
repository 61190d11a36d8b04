"""Command-line front end.

Verbs: ``search``, ``handles``, ``compose``, ``analyze``, ``sweep``, ``dot``.
Exit codes: 0 success, 1 unexpected error, 2 validation failure,
3 budget exhausted, 4 anomalous verdict, 5 malformed input file.
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from .analyze import ANOMALOUS as VERDICT_ANOMALOUS
from .analyze import HypothesisFailed, analyze_imprimitivity, classify_thm7, verify_thm8, wreath_embedding_check
from .app_controller import PipelineController
from .compose import (ALPHABETA, CENTRALIZER, CLONE, CONSTRUCTIONS, GENERAL, HandleAssignment,
                      check_cycle_law, compose_alpha_beta, compose_centralizer, compose_clone_p,
                      compose_general)
from .config_manager import LOG_LEVELS, ConfigManager
from .dot_export import to_dot
from .errors import BudgetExhausted, MalformedFile, ValidationError
from .group import BlockSystem
from .models import ANOMALOUS, ToolSettings
from .perm import parse_cycles
from .rep_io import (composition_to_repfile, load_composition, read_repfile, repfile_text,
                     repfile_to_representation, representation_to_repfile)
from .triangle import (Handle, Representation, TrianglePresentation, find_handles, search_alpha_beta,
                       search_alternating, search_backtrack)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_ANOMALOUS = 4
EXIT_MALFORMED = 5


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="./config", help="directory holding settings.json")
    common.add_argument("--log-level", choices=LOG_LEVELS, help="override the configured log level")
    common.add_argument("--seed", type=int, help="seed for randomized steps")
    common.add_argument("--budget", type=int, help="attempt budget for randomized searches")
    common.add_argument("--k", type=int, help="handle exponent")
    common.add_argument("--out", help="output file (stdout when omitted)")
    common.add_argument("--strict-orders", action="store_true", default=None,
                        help="require exact orders p, q, r instead of divisibility")
    return common


def _presentation_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, required=True)
    parser.add_argument("--q", type=int, required=True)
    parser.add_argument("--r", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="triangle-compose",
        description="Compose permutation representations of triangle groups and analyse the results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    search = sub.add_parser("search", parents=[common], help="find representations")
    _presentation_options(search)
    search.add_argument("--degree", type=int, required=True)
    search.add_argument("--method", choices=("backtrack", "alternating"), default="backtrack")
    search.add_argument("--transitive", action="store_true", help="backtrack: keep transitive ones only")
    search.add_argument("--require-handle", action="store_true", help="backtrack: keep ones with a k-handle")
    search.add_argument("--max-solutions", type=int)
    search.add_argument("--handles", type=int, default=1, choices=(1, 2),
                        help="alternating: number of compatible handles needed")

    handles = sub.add_parser("handles", parents=[common], help="list the k-handles of a representation")
    handles.add_argument("file")

    compose = sub.add_parser("compose", parents=[common], help="build a composed representation")
    compose.add_argument("files", nargs="+")
    compose.add_argument("--mode", choices=CONSTRUCTIONS, default=CLONE)
    compose.add_argument("--handle", help="a:b in the base diagram (default: first k-handle)")
    compose.add_argument("--handle2", help="alphabeta: second handle c:d")
    compose.add_argument("--assign", action="append", default=[],
                         help="general: j:a:b, one per handle in splice order")
    compose.add_argument("--hs", action="append", default=[],
                         help="centralizer: relabelling permutation in cycle notation, identity first")
    compose.add_argument("--alpha", help="alphabeta: permutation of 1..m in cycle notation")
    compose.add_argument("--beta", help="alphabeta: permutation of 1..m in cycle notation")
    compose.add_argument("--m", type=int, help="alphabeta: number of copies")

    analyze = sub.add_parser("analyze", parents=[common], help="analyse a composed representation")
    analyze.add_argument("file")

    sweep = sub.add_parser("sweep", parents=[common], help="gather evidence for a conjecture over degrees")
    _presentation_options(sweep)
    sweep.add_argument("--conjecture", type=int, choices=(1, 2), required=True)
    sweep.add_argument("--min-degree", type=int, default=7)
    sweep.add_argument("--max-degree", type=int, default=12)
    sweep.add_argument("--m", type=int, help="conjecture 2: number of copies")
    sweep.add_argument("--workers", type=int)

    dot = sub.add_parser("dot", parents=[common], help="coset diagram as DOT")
    dot.add_argument("file")
    return parser


def load_settings(args: argparse.Namespace) -> ToolSettings:
    """Settings from the config directory with per-run flag overrides."""
    settings = ConfigManager(args.config).load_settings()
    if args.log_level:
        settings.log_level = args.log_level
    if args.seed is None:
        args.seed = settings.default_seed
    if args.budget is None:
        args.budget = settings.default_budget
    if args.k is None:
        args.k = settings.default_k
    if args.strict_orders is None:
        args.strict_orders = settings.strict_orders
    return settings


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Output written to {path}")
    else:
        sys.stdout.write(text)


def _json(data: Any) -> str:
    return json.dumps(data, indent=2) + "\n"


def _manifest_dir(args: argparse.Namespace, settings: ToolSettings) -> Path:
    if args.out:
        return Path(args.out).parent
    return ConfigManager(args.config).get_output_path(settings)


def _parse_handle(text: str, k: int) -> Handle:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ValidationError(f"handle {text!r} must be a:b or a:b:k")
    try:
        values = [int(v) for v in parts]
    except ValueError:
        raise ValidationError(f"handle {text!r} must hold integers") from None
    return Handle(values[0], values[1], values[2] if len(values) == 3 else k)


def _parse_assign(text: str, k: int) -> tuple:
    diagram, _, rest = text.partition(":")
    try:
        return int(diagram), _parse_handle(rest, k)
    except ValueError:
        raise ValidationError(f"assignment {text!r} must be j:a:b") from None


def _load(path: str, strict: bool = False) -> tuple:
    rf = read_repfile(path)
    rep, handles = repfile_to_representation(rf, strict=strict)
    return rf, rep, handles


def _base_handle(rep: Representation, stored: List[Handle], text: Optional[str], k: int) -> Handle:
    if text:
        return _parse_handle(text, k)
    candidates = [h for h in stored if h.k == k] or find_handles(rep, k)
    if not candidates:
        raise ValidationError(f"the representation has no {k}-handle")
    return candidates[0]


def cmd_search(args: argparse.Namespace, settings: ToolSettings) -> int:
    pres = TrianglePresentation(args.p, args.q, args.r)
    if args.method == "backtrack":
        reps = search_backtrack(
            pres, args.degree,
            require_transitive=args.transitive,
            require_handle_k=args.k if args.require_handle else None,
            max_solutions=args.max_solutions,
            strict_orders=args.strict_orders,
            degree_cap=settings.backtrack_degree_cap,
        )
        files = [representation_to_repfile(rep, find_handles(rep, args.k) or None).to_dict(encode_json=True)
                 for rep in reps]
        _emit(_json(files), args.out)
        return EXIT_OK

    controller = PipelineController(settings)
    manifest = controller.start_manifest("search", args.argv, args.seed)
    started = time.perf_counter()
    outcome: Dict[str, Any] = {"presentation": str(pres), "degree": args.degree}
    try:
        hit = search_alternating(pres, args.degree, args.handles, args.k, args.seed, args.budget,
                                 strict_orders=args.strict_orders)
        outcome.update(status="Found", attempts=hit.attempts)
        rf = representation_to_repfile(hit.representation, hit.handles,
                                       {"search": "alternating", "seed": args.seed, "attempts": hit.attempts})
        _emit(repfile_text(rf), args.out)
        return EXIT_OK
    except BudgetExhausted:
        outcome.update(status="NotFound", note="no witness within budget")
        raise
    finally:
        controller.finish_manifest(manifest, started, outcome, _manifest_dir(args, settings), "search")


def cmd_handles(args: argparse.Namespace, settings: ToolSettings) -> int:
    _, rep, _ = _load(args.file, args.strict_orders)
    handles = find_handles(rep, args.k)
    _emit(_json([[h.a, h.b, h.k] for h in handles]), args.out)
    return EXIT_OK


def cmd_compose(args: argparse.Namespace, settings: ToolSettings) -> int:
    loaded = [_load(path, args.strict_orders) for path in args.files]
    rf, rep, stored = loaded[0]
    seed = None

    if args.mode == GENERAL:
        if not args.assign:
            raise ValidationError("general mode needs --assign j:a:b for every handle")
        assignment = HandleAssignment([_parse_assign(a, args.k) for a in args.assign])
        comp = compose_general([r for _, r, _ in loaded], assignment)
    elif args.mode == CLONE:
        comp = compose_clone_p(rep, _base_handle(rep, stored, args.handle, args.k))
    elif args.mode == CENTRALIZER:
        hs = [parse_cycles(text, rep.degree) for text in args.hs]
        comp = compose_centralizer(rep, _base_handle(rep, stored, args.handle, args.k), hs)
    else:
        h1 = _base_handle(rep, stored, args.handle, args.k)
        if args.handle2:
            h2 = _parse_handle(args.handle2, args.k)
        else:
            h2 = next((h for h in stored[1:] if h.is_disjoint(h1)), None)
            if h2 is None:
                raise ValidationError("alphabeta mode needs --handle2 or a second stored handle")
        if not args.m:
            raise ValidationError("alphabeta mode needs --m")
        m = args.m
        if args.alpha and args.beta:
            alpha, beta = parse_cycles(args.alpha, m), parse_cycles(args.beta, m)
        else:
            pair = search_alpha_beta(rep.presentation.p, m, args.seed, args.budget)
            alpha, beta, seed = pair.alpha, pair.beta, args.seed
        comp = compose_alpha_beta(rep, h1, h2, alpha, beta, m)

    _emit(repfile_text(composition_to_repfile(comp, seed)), args.out)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace, settings: ToolSettings) -> int:
    rf = read_repfile(args.file)
    comp = load_composition(rf)
    result: Dict[str, Any] = {
        "construction": comp.provenance.construction,
        "degree": comp.degree,
        "relations_ok": comp.relations.ok,
        "exact_orders": list(comp.relations.exact_orders),
        "transitive": comp.transitive,
        "cycle_law_violations": len(check_cycle_law(comp)),
    }
    if comp.block_report is not None:
        result["block_report"] = {
            "partition": comp.block_report.partition,
            "blocks_for_pi": comp.block_report.blocks_for_pi,
            "blocks_for_phi": comp.block_report.blocks_for_phi,
            "splice_closed": comp.block_report.splice_closed,
        }
    exit_code = EXIT_OK
    if comp.blocks is not None:
        report = analyze_imprimitivity(comp)
        result["report"] = report.to_dict()
        result["wreath_embedding"] = wreath_embedding_check(comp, report)
        if comp.provenance.construction == CLONE:
            verdict = classify_thm7(comp, report)
            result["thm7"] = verdict.to_dict()
            if verdict.case == VERDICT_ANOMALOUS:
                exit_code = EXIT_ANOMALOUS
        elif comp.provenance.construction == ALPHABETA:
            try:
                result["thm8"] = verify_thm8(comp, report=report).to_dict()
            except HypothesisFailed as e:
                result["thm8"] = {"hypothesis_failed": e.hypothesis}
    _emit(_json(result), args.out)
    return exit_code


def cmd_sweep(args: argparse.Namespace, settings: ToolSettings) -> int:
    controller = PipelineController(settings)
    manifest = controller.start_manifest("sweep", args.argv, args.seed)
    started = time.perf_counter()
    degrees = range(args.min_degree, args.max_degree + 1)
    tasks = controller.sweep_tasks(args.conjecture, args.p, args.q, args.r, degrees,
                                   args.budget, args.seed, args.k, args.m)
    rows = controller.run_sweep(tasks, args.workers)

    lines = [f"{'deg':>4}  {'status':<10} {'verdict':<13} message"]
    for row in rows:
        lines.append(f"{row.degree:>4}  {row.status:<10} {row.verdict or '-':<13} {row.message}")
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        _emit(_json([row.to_dict(encode_json=True) for row in rows]), args.out)

    counts: Dict[str, int] = {}
    for row in rows:
        counts[row.status] = counts.get(row.status, 0) + 1
    controller.finish_manifest(manifest, started, {"rows": counts}, _manifest_dir(args, settings),
                               f"sweep_conjecture{args.conjecture}")
    if counts.get(ANOMALOUS):
        logger.error(f"{counts[ANOMALOUS]} anomalous sweep rows")
        return EXIT_ANOMALOUS
    return EXIT_OK


def cmd_dot(args: argparse.Namespace, settings: ToolSettings) -> int:
    rf, rep, _ = _load(args.file)
    blocks = None
    if rf.provenance and rf.provenance.get("blocks"):
        try:
            blocks = BlockSystem(rep.degree, rf.provenance["blocks"])
        except ValidationError as e:
            raise MalformedFile(f"stored blocks are not a partition: {e}") from None
    _emit(to_dot(rep, Path(args.file).stem, blocks), args.out)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, ToolSettings], int]] = {
    "search": cmd_search,
    "handles": cmd_handles,
    "compose": cmd_compose,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "dot": cmd_dot,
}


def run_command(args: argparse.Namespace, settings: ToolSettings) -> int:
    """Dispatch a parsed command and map failures to exit codes."""
    try:
        return COMMANDS[args.command](args, settings)
    except MalformedFile as e:
        logger.error(f"Malformed input: {e}")
        return EXIT_MALFORMED
    except ValidationError as e:
        logger.error(f"Validation failed: {e}")
        return EXIT_VALIDATION
    except BudgetExhausted as e:
        logger.error(f"Budget exhausted: {e}")
        return EXIT_BUDGET
    except Exception as e:
        logger.exception(f"Unexpected error in {args.command}: {e}")
        return EXIT_UNEXPECTED
