"""
Command-line tests, run in-process through main(argv).
"""

import json
import re

import numpy as np
import pytest

from gaitwalk.audio.io import MonoSignal, write_wav
from gaitwalk.cli import main
from gaitwalk.synth.corpus import MANIFEST_NAME

FAST = ["--states", "5", "--iterations", "2"]
RANKED_LINE = re.compile(r"^\s*\d+\s+subject\d{3}\s+-?\d")


@pytest.fixture(scope="module")
def model_dir(small_manifest_path, tmp_path_factory):
    out = tmp_path_factory.mktemp("models")
    assert main(["enroll", "--manifest", str(small_manifest_path), "--out", str(out), *FAST]) == 0
    return out


def test_synth_writes_corpus(tmp_path, capsys):
    out = tmp_path / "corpus"
    code = main(["synth", "--subjects", "2", "--seed", "3", "--steps", "2", "--out", str(out)])
    assert code == 0
    assert (out / MANIFEST_NAME).is_file()
    assert len(list(out.glob("audio/*/*.wav"))) == 20
    assert str(out / MANIFEST_NAME) in capsys.readouterr().out


def test_synth_rejects_zero_subjects(tmp_path, capsys):
    assert main(["synth", "--subjects", "0", "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_synth_unwritable_destination(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert main(["synth", "--subjects", "1", "--out", str(blocker)]) == 2
    assert "cannot write corpus" in capsys.readouterr().err


@pytest.mark.parametrize(
    "command, expected",
    [
        (["enroll"], ["(default: 15)", "(default: 6)", "--no-pca", "(default: cyclic)"]),
        (
            ["evaluate"],
            ["(default: multi)", "--topology", "--models", "(default: report)", "(default: development)"],
        ),
        (["identify"], ["--top", "(default: multi)", "(default: all)"]),
        (["ablation"], ["(default: ablation)", "(default: development)"]),
        (["synth"], ["(default: 10)", "(default: 42)", "(default: 10.0)"]),
        (["features"], ["--models"]),
    ],
)
def test_help_lists_defaults(command, expected, capsys):
    assert main([*command, "--help"]) == 0
    text = " ".join(capsys.readouterr().out.split())
    for fragment in expected:
        assert fragment in text


def test_enroll_layout_and_determinism(model_dir, small_manifest_path, tmp_path, capsys):
    names = sorted(p.relative_to(model_dir).as_posix() for p in model_dir.rglob("*") if p.is_file())
    assert names == [
        "manifest.json",
        "models/subject001.json",
        "models/subject002.json",
        "models/subject003.json",
    ]

    again = tmp_path / "again"
    assert main(["enroll", "--manifest", str(small_manifest_path), "--out", str(again), *FAST]) == 0
    for name in names:
        assert (model_dir / name).read_bytes() == (again / name).read_bytes()
    assert "subject001" in capsys.readouterr().out


def test_enroll_requires_step_counts(tmp_path, capsys):
    manifest = tmp_path / "manifest.csv"
    manifest.write_text(
        "subject_id,condition,take,role,path,step_count\n"
        "a,N,1,enrollment,a.wav,\n"
    )
    assert main(["enroll", "--manifest", str(manifest), "--out", str(tmp_path / "m")]) == 2
    assert "step_count" in capsys.readouterr().err


def test_evaluate_writes_report(model_dir, small_manifest_path, tmp_path, capsys):
    out = tmp_path / "report"
    code = main(
        ["evaluate", "--manifest", str(small_manifest_path), "--models", str(model_dir), "--out", str(out)]
    )
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert set(report["per_condition_accuracy"]) == {"N", "B", "S"}
    table = (out / "report.txt").read_text()
    assert table.splitlines()[0].split() == ["system", "N", "B", "S", "average"]
    assert table in capsys.readouterr().out


def test_evaluate_basic_configuration(small_manifest_path, tmp_path):
    out = tmp_path / "basic"
    code = main(
        [
            "evaluate", "--manifest", str(small_manifest_path), "--out", str(out),
            "--topology", "linear", "--grammar", "single", "--no-pca", *FAST,
        ]
    )
    assert code == 0
    system = json.loads((out / "report.json").read_text())["system"]
    assert system == {
        "grammar": "single",
        "topology": "linear",
        "use_pca": False,
        "num_states": 5,
        "training_iterations": 2,
    }


def test_identify_top_k(model_dir, small_corpus, capsys):
    recording = small_corpus.identification[0].path
    assert main(["identify", str(recording), "--models", str(model_dir), "--top", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len([line for line in lines if RANKED_LINE.match(line)]) == 2
    assert any(line.startswith("predicted: subject") for line in lines)
    assert any(line.startswith("step boundaries (s):") for line in lines)


@pytest.mark.parametrize("top", ["0", "-1", "two"])
def test_identify_rejects_bad_top(model_dir, small_corpus, top, capsys):
    recording = small_corpus.identification[0].path
    assert main(["identify", str(recording), "--models", str(model_dir), "--top", top]) == 2
    assert "--top" in capsys.readouterr().err


def test_identify_too_short_for_single_pass(model_dir, tmp_path, capsys):
    short = tmp_path / "short.wav"
    write_wav(short, MonoSignal(samples=np.full(800, 0.01), sample_rate=16000))
    code = main(["identify", str(short), "--models", str(model_dir), "--grammar", "single"])
    assert code == 2
    assert "no subject model admits" in capsys.readouterr().err


def test_features_dump(small_corpus, tmp_path, capsys):
    recording = small_corpus.entries[0].path
    out = tmp_path / "features.json"
    assert main(["features", str(recording), "--out", str(out)]) == 0
    document = json.loads(out.read_text())
    assert document["dim"] == 39
    assert len(document["frames"]) > 0
    assert "x 39 dims" in capsys.readouterr().out


def test_unknown_config_key(tmp_path, small_manifest_path, capsys):
    config = tmp_path / "bad.yaml"
    config.write_text("hmm:\n  mixtures: 4\n")
    code = main(["--config", str(config), "enroll", "--manifest", str(small_manifest_path), "--out", str(tmp_path)])
    assert code == 2
    assert "invalid configuration" in capsys.readouterr().err


def test_missing_command():
    assert main([]) == 2
