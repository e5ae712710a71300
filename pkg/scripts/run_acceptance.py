#!/usr/bin/env python3
"""
End-to-end smoke run on a freshly generated corpus.

Generates the default 10-subject corpus, enrolls the full system, evaluates
it and prints the headline numbers next to their targets. Exit status 1 if
any target is missed.

    python scripts/run_acceptance.py [--out DIR] [--jobs N]
"""

import argparse
import sys
import tempfile
import time
from pathlib import Path

# Add the project root to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from gaitwalk.core.config import Settings, SynthConfig
from gaitwalk.evaluation.protocol import enroll_subjects, evaluate
from gaitwalk.evaluation.report import format_table, write_report
from gaitwalk.hmm.model import DecodeGrammar
from gaitwalk.synth.corpus import generate_corpus


def run(out: Path, jobs: int) -> bool:
    settings = Settings(jobs=jobs)
    started = time.time()

    print("🎲 Generating corpus (10 subjects, seed 42, SNR 10 dB)...")
    manifest = generate_corpus(SynthConfig(), out / "corpus", jobs=jobs)
    print(f"   ✅ {len(manifest.entries)} recordings")

    print("🧠 Enrolling subjects (15 states, 6 iterations, cyclic, PCA)...")
    model_set = enroll_subjects(manifest, settings.features, settings.hmm, True, jobs)
    model_set.save(out / "models")
    print(f"   ✅ {len(model_set.models)} models written to {out / 'models'}")

    print("🔍 Identifying...")
    report = evaluate(model_set, manifest, DecodeGrammar.MULTI_STEP, jobs)
    write_report(report, out / "report.json")
    elapsed = time.time() - started
    print()
    print(format_table([("full system", report)]), end="")
    print()

    hits = [o for o in report.per_recording if o.condition == "N" and o.correct]
    step_error = float(np.mean([abs(o.detected_steps - o.true_steps) for o in hits])) if hits else float("inf")
    acc = report.per_condition_accuracy

    checks = [
        ("N accuracy >= 90%", acc["N"] is not None and acc["N"] >= 0.9),
        ("N > B > S", acc["N"] > acc["B"] > acc["S"]),
        ("mean step error <= 1 (identified N)", step_error <= 1.0),
        ("runtime < 120 s", elapsed < 120.0),
    ]
    for label, ok in checks:
        print(f"   {'✅' if ok else '❌'} {label}")
    print(f"⏱️  {elapsed:.1f}s, mean step error {step_error:.2f}")
    return all(ok for _, ok in checks)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", type=Path, default=None, help="keep outputs here (default: temporary folder)")
    parser.add_argument("--jobs", type=int, default=4)
    args = parser.parse_args()

    if args.out is not None:
        return 0 if run(args.out, args.jobs) else 1
    with tempfile.TemporaryDirectory() as tmp:
        return 0 if run(Path(tmp), args.jobs) else 1


if __name__ == "__main__":
    sys.exit(main())
