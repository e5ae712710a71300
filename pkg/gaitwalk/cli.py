"""
Command-line entry point: `gaitwalk <command> [options]`.

Exit status: 0 success, 2 invalid input or configuration, 3 internal failure.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from .audio.io import load_mono
from .core.config import CONFIG_ENV_VAR, HmmConfig, Settings, SynthConfig, load_settings
from .core.errors import GaitwalkError
from .core.logging import setup_logging
from .evaluation.manifest import load_manifest
from .evaluation.protocol import enroll_subjects, evaluate, run_ablation
from .evaluation.report import format_table, percent, write_report
from .features.pipeline import extract_features
from .hmm.model import DecodeGrammar
from .models.reports import EvaluationReport
from .recognizer import SubjectModelSet, identify
from .synth.corpus import MANIFEST_NAME, generate_corpus

logger = logging.getLogger(__name__)

console = Console(soft_wrap=True, highlight=False)
err_console = Console(stderr=True, soft_wrap=True, highlight=False)

_SETTINGS = Settings.model_fields
_HMM = HmmConfig()
_SYNTH = SynthConfig()


def _default(name: str) -> Any:
    return _SETTINGS[name].default


# =============================================================================
# COMMANDS
# =============================================================================


def cmd_synth(args: argparse.Namespace, settings: Settings) -> int:
    values = {
        "num_subjects": args.subjects,
        "seed": args.seed,
        "snr_db": args.snr_db,
        "steps_per_recording": args.steps,
        "split": args.split,
    }
    config = SynthConfig(**{k: v for k, v in values.items() if v is not None})
    manifest = generate_corpus(config, args.out, jobs=settings.jobs)
    counts = manifest.role_counts()
    console.print(
        f"[green]✓[/green] {len(manifest.entries)} recordings for {config.num_subjects} subjects "
        f"({counts['enrollment']} enrollment, {counts['identification']} identification)"
    )
    console.print(str(Path(args.out) / MANIFEST_NAME), markup=False)
    return 0


def cmd_enroll(args: argparse.Namespace, settings: Settings) -> int:
    manifest = load_manifest(args.manifest)
    model_set = enroll_subjects(
        manifest, settings.features, settings.hmm, settings.use_pca, settings.jobs
    )
    model_set.save(args.out)
    for subject_id in model_set.subject_ids:
        history = model_set.models[subject_id].training_history
        final = f"{history[-1]:.3f}" if history else "n/a"
        console.print(f"{subject_id}  {final}", markup=False)
    console.print(f"[green]✓[/green] {len(model_set.models)} models written to {args.out}")
    return 0


def cmd_evaluate(args: argparse.Namespace, settings: Settings) -> int:
    manifest = load_manifest(args.manifest, split=args.split)
    grammar = DecodeGrammar(settings.grammar)
    if args.models is not None:
        model_set = SubjectModelSet.load(args.models)
        if (model_set.pca is not None) != settings.use_pca or model_set.hmm_config.cyclic != settings.hmm.cyclic:
            logger.warning("--no-pca/--topology are fixed by the model directory and were ignored")
    else:
        model_set = enroll_subjects(
            manifest, settings.features, settings.hmm, settings.use_pca, settings.jobs
        )
    report = evaluate(model_set, manifest, grammar, settings.jobs)

    out = Path(args.out)
    write_report(report, out / "report.json")
    table = format_table([(_system_label(report), report)])
    (out / "report.txt").write_text(table, encoding="utf-8")
    console.print(table, end="", markup=False)
    stats = report.step_statistics
    if stats.mean_detected_steps is not None:
        console.print(
            f"steps (N): true {stats.mean_true_steps}, detected {stats.mean_detected_steps:.2f}",
            markup=False,
        )
    return 0


def _system_label(report: EvaluationReport) -> str:
    system = report.system
    if system is None:
        return "system"
    pca = "pca" if system.use_pca else "no-pca"
    return f"{system.topology}/{system.grammar}/{pca}"


def cmd_identify(args: argparse.Namespace, settings: Settings) -> int:
    model_set = SubjectModelSet.load(args.models)
    result = identify(
        model_set, load_mono(args.recording), DecodeGrammar(settings.grammar), settings.jobs
    )
    ranked = result.ranked if args.top is None else result.ranked[: args.top]
    for rank, (subject_id, score) in enumerate(ranked, start=1):
        console.print(f"{rank:>3}  {subject_id}  {score:.3f}", markup=False)
    console.print(f"predicted: {result.predicted}", markup=False)
    console.print(f"log-likelihood: {result.decode.log_likelihood:.3f}", markup=False)
    console.print(f"steps: {result.decode.step_count}", markup=False)
    boundaries = " ".join(f"{t:.2f}" for t in result.step_boundary_seconds)
    console.print(f"step boundaries (s): {boundaries}", markup=False)
    return 0


def cmd_features(args: argparse.Namespace, settings: Settings) -> int:
    signal = load_mono(args.recording)
    if args.models is not None:
        seq = SubjectModelSet.load(args.models).features(signal)
    else:
        seq = extract_features(signal, settings.features)
    if args.out is not None:
        Path(args.out).write_text(seq.to_document().model_dump_json(indent=2) + "\n", encoding="utf-8")
    console.print(
        f"{seq.num_frames} frames x {seq.dim} dims, frame shift {seq.frame_shift:.3f} s",
        markup=False,
    )
    return 0


def cmd_ablation(args: argparse.Namespace, settings: Settings) -> int:
    manifest = load_manifest(args.manifest, split=args.split)
    rows = run_ablation(manifest, settings)
    text = format_table([(row.label, row.report) for row in rows])

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "ablation.txt").write_text(text, encoding="utf-8")
    for index, row in enumerate(rows, start=1):
        write_report(row.report, out / f"ablation_{index}.json")

    table = Table(title="Ablation")
    table.add_column("system", style="cyan")
    for column in ("N", "B", "S", "average", "p (vs. previous)"):
        table.add_column(column, justify="right")
    for row in rows:
        acc = row.report.per_condition_accuracy
        cells = [percent(acc.get(c)) for c in ("N", "B", "S")] + [percent(row.report.average)]
        p = "" if row.p_values is None else f"{row.p_values.get('all', float('nan')):.3g}"
        table.add_row(row.label, *cells, p)
    console.print(table)
    return 0


def cmd_serve(args: argparse.Namespace, settings: Settings) -> int:
    import uvicorn

    # the app builds its own settings on import
    if args.config is not None:
        os.environ[CONFIG_ENV_VAR] = str(args.config)
    if settings.model_dir is not None:
        os.environ["GAITWALK_MODEL_DIR"] = str(settings.model_dir)
    uvicorn.run("gaitwalk.main:app", host=settings.api_host, port=settings.api_port)
    return 0


# =============================================================================
# PARSER
# =============================================================================


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--no-pca",
        dest="no_pca",
        action="store_true",
        help=f"skip the enrollment PCA (default: PCA {'on' if _default('use_pca') else 'off'})",
    )
    parser.add_argument(
        "--topology",
        choices=["linear", "cyclic"],
        default=None,
        help=f"HMM topology (default: {'cyclic' if _HMM.cyclic else 'linear'})",
    )
    parser.add_argument(
        "--states", type=int, default=None, help=f"HMM states per step (default: {_HMM.num_states})"
    )
    parser.add_argument(
        "--iterations",
        type=int,
        default=None,
        help=f"embedded re-estimation rounds (default: {_HMM.training_iterations})",
    )


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _add_grammar_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--grammar",
        choices=["single", "multi"],
        default=None,
        help=f"decoding grammar (default: {_default('grammar')})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitwalk",
        description="Acoustic gait recognition with cyclic HMMs",
    )
    parser.add_argument("--config", type=Path, default=None, help="YAML config file ($GAITWALK_CONFIG)")
    parser.add_argument(
        "--jobs", type=int, default=None, help=f"worker threads (default: {_default('jobs')})"
    )
    parser.add_argument(
        "--log-level", default=None, help=f"logging level (default: {_default('log_level')})"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus and its manifest")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--subjects", type=int, default=None, help=f"number of subjects (default: {_SYNTH.num_subjects})")
    p.add_argument("--seed", type=int, default=None, help=f"random seed (default: {_SYNTH.seed})")
    p.add_argument("--snr-db", type=float, default=None, help=f"background SNR in dB (default: {_SYNTH.snr_db})")
    p.add_argument(
        "--steps", type=int, default=None, help=f"steps per recording (default: {_SYNTH.steps_per_recording})"
    )
    p.add_argument("--split", choices=["development", "test"], default=None, help=f"(default: {_SYNTH.split})")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("enroll", help="train one model per subject from the enrollment rows")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="model directory to write")
    _add_model_flags(p)
    p.set_defaults(handler=cmd_enroll)

    p = sub.add_parser("evaluate", help="identify every identification row and report accuracy")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--models", type=Path, default=None, help="model directory (default: enroll from the manifest)")
    p.add_argument(
        "--out", type=Path, default=Path("report"), help="directory for report.json and report.txt (default: report)"
    )
    p.add_argument(
        "--split", choices=["development", "test"], default="development", help="(default: development)"
    )
    _add_grammar_flag(p)
    _add_model_flags(p)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("identify", help="rank enrolled subjects for one recording")
    p.add_argument("recording", type=Path)
    p.add_argument("--models", type=Path, required=True)
    p.add_argument("--top", type=_positive_int, default=None, help="number of ranked subjects to print (default: all)")
    _add_grammar_flag(p)
    p.set_defaults(handler=cmd_identify)

    p = sub.add_parser("features", help="dump the feature vectors of one recording")
    p.add_argument("recording", type=Path)
    p.add_argument("--models", type=Path, default=None, help="apply this model directory's front-end and PCA")
    p.add_argument("--out", type=Path, default=None, help="feature JSON to write")
    p.set_defaults(handler=cmd_features)

    p = sub.add_parser("ablation", help="evaluate the basic-to-full system ladder")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument(
        "--out", type=Path, default=Path("ablation"), help="directory for the per-row reports (default: ablation)"
    )
    p.add_argument(
        "--split", choices=["development", "test"], default="development", help="(default: development)"
    )
    p.set_defaults(handler=cmd_ablation)

    p = sub.add_parser("serve", help="run the HTTP identification service")
    p.add_argument("--models", type=Path, default=None)
    p.add_argument("--host", default=None, help=f"(default: {_default('api_host')})")
    p.add_argument("--port", type=int, default=None, help=f"(default: {_default('api_port')})")
    p.set_defaults(handler=cmd_serve)
    return parser


def settings_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Flag values as a nested settings mapping; unset flags are None."""
    return {
        "jobs": args.jobs,
        "log_level": args.log_level,
        "grammar": getattr(args, "grammar", None),
        "topology": getattr(args, "topology", None),
        "use_pca": False if getattr(args, "no_pca", False) else None,
        "model_dir": getattr(args, "models", None) if args.command == "serve" else None,
        "api_host": getattr(args, "host", None),
        "api_port": getattr(args, "port", None),
        "hmm": {
            "num_states": getattr(args, "states", None),
            "training_iterations": getattr(args, "iterations", None),
        },
    }


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    handler: Callable[[argparse.Namespace, Settings], int] = args.handler
    try:
        settings = load_settings(args.config, settings_overrides(args))
        setup_logging(settings)
        return handler(args, settings)
    except GaitwalkError as e:
        err_console.print(f"error: {e}", markup=False)
        return e.exit_code
    except ValidationError as e:
        err_console.print(f"error: invalid configuration: {e}", markup=False)
        return 2
    except Exception as e:  # noqa: BLE001
        logger.exception("Unexpected failure")
        err_console.print(f"error: {type(e).__name__}: {e}", markup=False)
        return 3


if __name__ == "__main__":
    sys.exit(main())
