"""
End-to-end tests for the pidfuse command line and its table output.
"""

import argparse
import json

import numpy as np
import pytest

from src.audio import SAMPLE_RATE
from src.cli import main
from src.cli.commands import (
    GALLERY_FILE,
    MODELS_DIR,
    PREDICTIONS_FILE,
    REPORT_FILE,
    RETRIEVAL_FILE,
    TRAIN_FILE,
    TRUTH_FILE,
)
from src.cli.utils import apply_overrides
from src.config import Config
from src.core import Modality
from src.eval import MetricsReport, mean_average_precision
from src.output import _supports_color, format_table, map_rows
from src.storage import read_corpus, read_retrieval, read_truth

SMALL_RUN = {
    "n_identities": 4,
    "n_clips_per_identity": 3,
    "n_train_clips_per_identity": 10,
    "n_distractor_clips": 4,
    "dim": 8,
    "hidden_dim": 16,
    "epochs": 5,
    "batch_size": 16,
    "learning_rate": 0.01,
    "dropout_keep_prob": 1.0,
    "folds": 2,
    "quality_bands": [40, 80],
}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL_RUN))
    return str(path)


@pytest.fixture
def generated(tmp_path, config_file):
    out = tmp_path / "data"
    assert main(["--config", config_file, "gen", "-o", str(out)]) == 0
    return out


# ---------------------------------------------------------------------------
# Single-stage commands
# ---------------------------------------------------------------------------

class TestStages:

    def test_gen_writes_corpora_and_truth(self, generated):
        for name in (GALLERY_FILE, TRAIN_FILE, TRUTH_FILE):
            assert (generated / name).is_file()
        assert (generated / (GALLERY_FILE + ".manifest.json")).is_file()
        assert read_truth(generated / TRUTH_FILE).n_labels == 4

    def test_gen_base64(self, tmp_path, config_file):
        out = tmp_path / "b64"
        assert main(["--config", config_file, "gen", "-o", str(out), "--encoding", "base64"]) == 0
        manifest = json.loads((out / (GALLERY_FILE + ".manifest.json")).read_text())
        assert manifest["encoding"] == "base64"

    def test_train_predict_fuse_eval(self, tmp_path, generated, config_file, capsys):
        cfg = ["--config", config_file]
        models = tmp_path / "models"
        predictions = tmp_path / "predictions.jsonl"
        retrieval = tmp_path / "retrieval.tsv"
        report_path = tmp_path / "report.json"

        assert main(cfg + ["train", str(generated / TRAIN_FILE), "-o", str(models)]) == 0
        manifest = json.loads((models / "manifest.json").read_text())
        assert manifest["counts"] == {"part_a": 4, "part_b": 6, "concat": 4}

        assert main(cfg + ["predict", str(models), str(generated / GALLERY_FILE), "-o", str(predictions)]) == 0
        assert main(cfg + ["fuse", str(predictions), "-o", str(retrieval)]) == 0
        assert len(retrieval.read_text().splitlines()) == 4

        capsys.readouterr()
        assert main(cfg + ["eval", str(retrieval), str(generated / TRUTH_FILE),
                           "--predictions", str(predictions), "-o", str(report_path), "--json"]) == 0
        printed = MetricsReport.from_dict(json.loads(capsys.readouterr().out))
        expected = mean_average_precision(read_retrieval(retrieval), read_truth(generated / TRUTH_FILE))
        assert printed.map == expected
        assert set(printed.modalities) == {"face", "head", "audio"}
        assert set(printed.baselines) == {"face+head", "face+head+audio"}
        assert MetricsReport.from_dict(json.loads(report_path.read_text())) == printed

    def test_eval_perfect_retrieval(self, tmp_path, capsys):
        truth = tmp_path / "truth.json"
        truth.write_text(json.dumps({"format_version": 1, "positives": {"0": ["a", "b"], "1": ["c"]}}))
        retrieval = tmp_path / "r.tsv"
        retrieval.write_text("0\ta\tb\tx\n1\tc\n")
        config = tmp_path / "c.json"
        config.write_text("{}")
        capsys.readouterr()
        assert main(["--config", str(config), "eval", str(retrieval), str(truth), "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["map"] == 1.0

    def test_eval_prints_table(self, tmp_path, capsys, strip_ansi):
        truth = tmp_path / "truth.json"
        truth.write_text(json.dumps({"format_version": 1, "positives": {"0": ["a"]}}))
        retrieval = tmp_path / "r.tsv"
        retrieval.write_text("0\tx\ta\n")
        config = tmp_path / "c.json"
        config.write_text("{}")
        assert main(["--config", str(config), "eval", str(retrieval), str(truth)]) == 0
        out = strip_ansi(capsys.readouterr().out)
        assert "MAP@100" in out
        assert "fused" in out and "50.00%" in out

    def test_fusing_the_same_file_twice_fails(self, tmp_path, generated, config_file):
        cfg = ["--config", config_file]
        models = tmp_path / "models"
        predictions = tmp_path / "p.jsonl"
        assert main(cfg + ["train", str(generated / TRAIN_FILE), "-o", str(models)]) == 0
        assert main(cfg + ["predict", str(models), str(generated / GALLERY_FILE), "-o", str(predictions)]) == 0
        assert main(cfg + ["fuse", str(predictions), str(predictions), "-o", str(tmp_path / "r.tsv")]) == 1


# ---------------------------------------------------------------------------
# Exit codes
# ---------------------------------------------------------------------------

class TestExitCodes:

    def test_missing_corpus(self, tmp_path, config_file, capsys):
        assert main(["--config", config_file, "train", str(tmp_path / "nope.jsonl"), "-o", str(tmp_path)]) == 1

    def test_malformed_corpus(self, generated, tmp_path, config_file, capsys):
        corpus = generated / TRAIN_FILE
        corpus.write_text(corpus.read_text() + "{broken\n")
        assert main(["--config", config_file, "train", str(corpus), "-o", str(tmp_path / "m")]) == 1
        assert "MalformedRecordError" in capsys.readouterr().err

    @pytest.mark.parametrize("line", [
        pytest.param(b'{"clip_id": "x", "frames": 5}\n', id="frames-not-a-list"),
        pytest.param(b'{"clip_id": "caf\xe9"}\n', id="not-utf8"),
    ])
    def test_bad_corpus_line_exits_1(self, generated, tmp_path, config_file, capsys, line):
        corpus = generated / TRAIN_FILE
        with open(corpus, "ab") as f:
            f.write(line)
        assert main(["--config", config_file, "train", str(corpus), "-o", str(tmp_path / "m")]) == 1
        assert "MalformedRecordError" in capsys.readouterr().err

    def test_zero_rank_in_predictions_exits_1(self, tmp_path, capsys):
        predictions = tmp_path / "p.jsonl"
        predictions.write_text('{"format_version":1,"models":["face"],"n_classes":1}\n'
                               '{"entries":[["a",0.5,0]],"label":0,"model":"face"}\n')
        config = tmp_path / "c.json"
        config.write_text("{}")
        assert main(["--config", str(config), "fuse", str(predictions), "-o", str(tmp_path / "r.tsv")]) == 1
        assert "InvalidRankError" in capsys.readouterr().err

    def test_negative_seed_is_reset(self, tmp_path, config_file, capsys):
        assert main(["--config", config_file, "--seed", "-1", "gen", "-o", str(tmp_path / "d")]) == 0
        assert "seed" in capsys.readouterr().err
        assert (tmp_path / "d" / GALLERY_FILE).is_file()

    def test_missing_config_file(self, tmp_path):
        assert main(["--config", str(tmp_path / "none.json"), "config"]) == 1

    @pytest.mark.parametrize("argv", [
        pytest.param([], id="no-command"),
        pytest.param(["train"], id="missing-corpus-argument"),
        pytest.param(["gen"], id="missing-out"),
        pytest.param(["frobnicate"], id="unknown-command"),
        pytest.param(["--threads", "many", "config"], id="non-integer-flag"),
    ])
    def test_usage_errors_exit_2(self, argv):
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
        assert excinfo.value.code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0
        assert "pidfuse 1.0.0" in capsys.readouterr().out

    def test_gallery_without_train(self, tmp_path, generated, config_file):
        argv = ["--config", config_file, "pipeline", "-o", str(tmp_path / "run"),
                "--gallery", str(generated / GALLERY_FILE)]
        assert main(argv) == 1

    def test_config_command(self, config_file, capsys, strip_ansi):
        assert main(["--config", config_file, "config"]) == 0
        out = strip_ansi(capsys.readouterr().out)
        assert "Current Configuration" in out
        assert "hidden_dim:" in out and "16" in out

    def test_completion(self, capsys):
        assert main(["completion"]) == 0
        assert "register-python-argcomplete pidfuse" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

class TestPipelineCommand:

    def test_writes_every_artifact(self, tmp_path, config_file):
        out = tmp_path / "run"
        assert main(["--config", config_file, "pipeline", "-o", str(out)]) == 0
        for name in (GALLERY_FILE, TRAIN_FILE, TRUTH_FILE, PREDICTIONS_FILE, RETRIEVAL_FILE, REPORT_FILE):
            assert (out / name).is_file(), name
        assert (out / MODELS_DIR / "manifest.json").is_file()
        report = json.loads((out / REPORT_FILE).read_text())
        assert set(report["parts"]) <= {"A", "B"}
        assert 0.0 <= report["map"] <= 1.0

    def test_same_seed_same_bytes(self, tmp_path, config_file):
        first, second = tmp_path / "one", tmp_path / "two"
        assert main(["--config", config_file, "pipeline", "-o", str(first)]) == 0
        assert main(["--config", config_file, "--threads", "3", "pipeline", "-o", str(second)]) == 0
        assert (first / RETRIEVAL_FILE).read_bytes() == (second / RETRIEVAL_FILE).read_bytes()
        assert (first / REPORT_FILE).read_bytes() == (second / REPORT_FILE).read_bytes()

    def test_given_corpora(self, tmp_path, generated, config_file):
        out = tmp_path / "run"
        argv = ["--config", config_file, "pipeline", "-o", str(out),
                "--train", str(generated / TRAIN_FILE), "--gallery", str(generated / GALLERY_FILE)]
        assert main(argv) == 0
        assert not (out / GALLERY_FILE).exists()
        assert (out / RETRIEVAL_FILE).is_file()


# ---------------------------------------------------------------------------
# Overrides and output
# ---------------------------------------------------------------------------

class TestOverrides:

    @staticmethod
    def _args(**values):
        base = {"seed": None, "threads": None, "cut": None}
        base.update(values)
        return argparse.Namespace(**base)

    def test_env_beats_file(self, monkeypatch):
        monkeypatch.setenv("PIDFUSE_CUT", "5")
        assert apply_overrides(Config(cut=20), self._args()).cut == 5

    def test_flag_beats_env(self, monkeypatch):
        monkeypatch.setenv("PIDFUSE_SEED", "3")
        assert apply_overrides(Config(), self._args(seed=11)).seed == 11

    def test_bad_env_value_is_ignored(self, monkeypatch, capsys):
        monkeypatch.setenv("PIDFUSE_THREADS", "lots")
        assert apply_overrides(Config(threads=2), self._args()).threads == 2
        assert "PIDFUSE_THREADS" in capsys.readouterr().err

    def test_invalid_flag_is_reset(self, monkeypatch, capsys):
        monkeypatch.delenv("PIDFUSE_CUT", raising=False)
        assert apply_overrides(Config(), self._args(cut=0)).cut == 100
        assert "cut" in capsys.readouterr().err

    def test_original_config_is_untouched(self, monkeypatch):
        monkeypatch.delenv("PIDFUSE_SEED", raising=False)
        config = Config()
        apply_overrides(config, self._args(seed=99))
        assert config.seed == 7


class TestOutput:

    def test_table_alignment(self, strip_ansi):
        table = strip_ansi(format_table([("face only", " 83.54%"), ("fused", " 92.17%")]))
        lines = table.splitlines()
        assert lines[0].startswith("run")
        assert lines[2] == "face only   83.54%"
        assert len({len(line) for line in lines}) == 1

    def test_map_rows_order(self):
        report = MetricsReport(map=0.9, cut=100, n_labels=3, per_label_ap={},
                               parts={"B": 0.5, "A": 0.8}, modalities={"face": 0.7, "audio": 0.2},
                               baselines={"face+head": 0.75})
        names = [name for name, _ in map_rows(report)]
        assert names == ["face only", "audio only", "face+head concat", "Part A", "Part B", "fused"]
        assert map_rows(report)[-1][1] == " 90.00%"

    @pytest.mark.parametrize("env, expected", [
        pytest.param({"NO_COLOR": "1", "FORCE_COLOR": "1"}, False, id="no-color-wins"),
        pytest.param({"FORCE_COLOR": "1"}, True, id="force-color"),
    ])
    def test_color_follows_environment(self, monkeypatch, env, expected):
        monkeypatch.delenv("NO_COLOR", raising=False)
        monkeypatch.delenv("FORCE_COLOR", raising=False)
        for key, value in env.items():
            monkeypatch.setenv(key, value)
        assert _supports_color() is expected


# ---------------------------------------------------------------------------
# PCM audio
# ---------------------------------------------------------------------------

class TestEmbedAudio:

    @pytest.fixture
    def pcm_dir(self, tmp_path, generated):
        directory = tmp_path / "pcm"
        directory.mkdir()
        t = np.arange(SAMPLE_RATE // 4) / SAMPLE_RATE
        tone = (np.sin(2 * np.pi * 440.0 * t) * 8000).astype("<i2").tobytes()
        clips = read_corpus(generated / GALLERY_FILE)
        for clip in clips[:3] + [c for c in clips if not c.frames and Modality.HEAD not in c.clip_embeddings]:
            (directory / f"{clip.clip_id}.pcm").write_bytes(tone)
        return directory

    def test_attaches_512_d_audio(self, tmp_path, generated, config_file, pcm_dir, capsys, strip_ansi):
        out = tmp_path / "with-audio.jsonl"
        argv = ["--config", config_file, "embed-audio", str(generated / GALLERY_FILE),
                "--pcm-dir", str(pcm_dir), "--sample-rate", "16000", "-o", str(out)]
        assert main(argv) == 0
        n_files = len(list(pcm_dir.iterdir()))
        assert f"{n_files} of" in strip_ansi(capsys.readouterr().out)
        clips = read_corpus(out)
        with_audio = [c for c in clips if Modality.AUDIO in c.clip_embeddings]
        assert len(with_audio) == n_files >= 3
        assert all(c.clip_embeddings[Modality.AUDIO].dim == 512 for c in with_audio)
        assert json.loads((out.parent / (out.name + ".manifest.json")).read_text())["dims"]["audio"] == 512

    def test_other_sample_rate_exits_1(self, tmp_path, generated, config_file, pcm_dir, capsys):
        argv = ["--config", config_file, "embed-audio", str(generated / GALLERY_FILE),
                "--pcm-dir", str(pcm_dir), "--sample-rate", "8000", "-o", str(tmp_path / "x.jsonl")]
        assert main(argv) == 1
        assert "WrongSampleRateError" in capsys.readouterr().err

    def test_missing_pcm_dir_exits_1(self, tmp_path, generated, config_file):
        argv = ["--config", config_file, "embed-audio", str(generated / GALLERY_FILE),
                "--pcm-dir", str(tmp_path / "absent"), "-o", str(tmp_path / "x.jsonl")]
        assert main(argv) == 1

    def test_pcm_dir_is_required(self, generated):
        with pytest.raises(SystemExit) as excinfo:
            main(["embed-audio", str(generated / GALLERY_FILE), "-o", "x.jsonl"])
        assert excinfo.value.code == 2
