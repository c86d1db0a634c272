import numpy as np
import pytest

from goldens import GOLDEN, SENTENCE_1, SENTENCE_2
from segtr.cli import child_seeds, main, read_config_file
from segtr.errors import ConfigError
from segtr.evaluation import read_predictions
from segtr.perf import REPORT_HEADER, read_report
from segtr.subword import load_bpe
from segtr.synthetic import generate_reviews
from segtr.corpus import write_corpus


@pytest.fixture
def small_corpus(tmp_path):
    path = tmp_path / "reviews.tsv"
    write_corpus(path, generate_reviews(60, seed=3))
    return path


def _experiment_args(corpus, out, *extra):
    return ["experiment", "--corpus", str(corpus), "--out-dir", str(out), "--method", "word-token",
            "--arch", "meanpool", "--learning-rate", "2.0", "--max-epochs", "4", "--min-frequency", "1",
            *extra]


def test_child_seeds_are_distinct_and_stable():
    a = child_seeds(7)
    assert list(a) == ["split", "init", "dropout", "clt"]
    assert len(set(a.values())) == 4 and a == child_seeds(7) and a != child_seeds(8)


def test_segment_syllables(tmp_path, data_dir):
    out = tmp_path / "s.txt"
    assert main(["segment", "--method", "syllable", "--in", str(data_dir / "running_examples.txt"), "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8").splitlines() == list(GOLDEN["syllable"])


def test_segment_check_form(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("türkçe !\n", encoding="utf-8")
    out = tmp_path / "o.txt"
    assert main(["segment", "--method", "syllable", "--check-form", "--in", str(src), "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == "türk/CVCC çe/CV !/-\n"


def test_segment_morph_with_dictionary(tmp_path, data_dir):
    src = tmp_path / "in.txt"
    src.write_text(SENTENCE_1 + "\n" + SENTENCE_2 + "\n", encoding="utf-8")
    out = tmp_path / "o.txt"
    assert main(["segment", "--method", "token-meta", "--dict", str(data_dir / "fixture_dict.tsv"),
                 "--in", str(src), "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8").splitlines() == list(GOLDEN["token-meta"])


def test_segment_morph_without_dictionary(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("film\n", encoding="utf-8")
    assert main(["segment", "--method", "lemma", "--in", str(src)]) == 2


def test_bpe_train_abab(tmp_path, capsys):
    src = tmp_path / "words.txt"
    src.write_text("abab\n" * 5, encoding="utf-8")
    out = tmp_path / "merges.txt"
    assert main(["bpe-train", str(src), "--limit", "4", "--out", str(out)]) == 0
    assert len(load_bpe(out).merges) == 2
    assert "merges\t2" in capsys.readouterr().out
    # refuses to overwrite without --force, then succeeds with it
    assert main(["bpe-train", str(src), "--limit", "4", "--out", str(out)]) == 2
    assert main(["bpe-train", str(src), "--limit", "4", "--out", str(out), "--force"]) == 0


def test_bpe_train_bad_limit(tmp_path):
    src = tmp_path / "words.txt"
    src.write_text("abc\n", encoding="utf-8")
    assert main(["bpe-train", str(src), "--limit", "2", "--out", str(tmp_path / "m.txt")]) == 2


def test_stats_empty_file(tmp_path, capsys):
    empty = tmp_path / "empty.tsv"
    empty.write_text("", encoding="utf-8")
    assert main(["stats", str(empty)]) == 0
    assert capsys.readouterr().out == "vocab_size\t0\navg_sentence_length\t0.0000\nmax_review_size\t0\n"


def test_stats_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.tsv"
    bad.write_text("1\tiyi\n7\tkötü\n", encoding="utf-8")
    assert main(["stats", str(bad)]) == 1
    assert "bad.tsv:2" in capsys.readouterr().err
    assert main(["stats", str(bad), "--lenient"]) == 0


def test_split_writes_partitions(tmp_path, small_corpus):
    out = tmp_path / "parts"
    assert main(["split", str(small_corpus), "--out-dir", str(out), "--seed", "4"]) == 0
    sizes = [len((out / f"{n}.tsv").read_text(encoding="utf-8").splitlines())
             for n in ("train", "validation", "test")]
    assert sizes == [48, 6, 6]
    assert main(["split", str(small_corpus), "--out-dir", str(out), "--seed", "4"]) == 2


def test_experiment_artifacts(tmp_path, small_corpus):
    out = tmp_path / "run"
    assert main(_experiment_args(small_corpus, out, "--seed", "3")) == 0
    for name in ("config.cfg", "vocab.tsv", "model.txt", "history.csv", "predictions.tsv",
                 "histogram.csv", "report.csv"):
        assert (out / name).exists(), name
    (record,) = read_report(out / "report.csv")
    assert record.no == 1 and record.dataset == "reviews"
    preds = read_predictions(out / "predictions.tsv")
    assert len(preds) == record.test
    # rerun refuses without --force
    assert main(_experiment_args(small_corpus, out, "--seed", "3")) == 2
    assert main(_experiment_args(small_corpus, out, "--seed", "3", "--force")) == 0


def test_experiment_shared_report(tmp_path, small_corpus):
    shared = tmp_path / "all.csv"
    for i in range(2):
        assert main(_experiment_args(small_corpus, tmp_path / f"r{i}", "--report", str(shared))) == 0
    assert [r.no for r in read_report(shared)] == [1, 2]
    assert shared.read_text().splitlines()[0] == ",".join(REPORT_HEADER)


def test_experiment_morph_without_dictionary(tmp_path, small_corpus):
    args = _experiment_args(small_corpus, tmp_path / "run")
    args[args.index("word-token")] = "lemma-suffix"
    assert main(args) == 2
    assert not (tmp_path / "run").exists()


def test_experiment_flags_incomplete_artifacts(tmp_path):
    tiny = tmp_path / "tiny.tsv"
    tiny.write_text("1\tiyi film\n0\tkötü film\n", encoding="utf-8")
    out = tmp_path / "run"
    assert main(_experiment_args(tiny, out)) == 1
    assert (out / "config.cfg.incomplete").exists()
    assert not (out / "config.cfg").exists()


def test_seed_precedence(tmp_path, small_corpus, monkeypatch):
    monkeypatch.setenv("SEGTR_SEED", "11")
    assert main(_experiment_args(small_corpus, tmp_path / "env")) == 0
    assert "seed=11" in (tmp_path / "env" / "config.cfg").read_text().splitlines()
    assert main(_experiment_args(small_corpus, tmp_path / "flag", "--seed", "5")) == 0
    assert "seed=5" in (tmp_path / "flag" / "config.cfg").read_text().splitlines()
    # the same seed from either source gives the same predictions
    assert main(_experiment_args(small_corpus, tmp_path / "again", "--seed", "11")) == 0
    assert (tmp_path / "again" / "predictions.tsv").read_bytes() == (
        tmp_path / "env" / "predictions.tsv").read_bytes()


def test_config_file_and_flag_override(tmp_path, small_corpus):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(f"# comment\ncorpus={small_corpus.name}\nmethod=word-token\narch=meanpool\n"
                   "max_epochs=2\nmin_frequency=1\nseed=2\n", encoding="utf-8")
    values = read_config_file(cfg)
    assert values["corpus"] == str(small_corpus)
    assert main(["experiment", "--config", str(cfg), "--out-dir", str(tmp_path / "run"),
                 "--max-epochs", "3"]) == 0
    written = (tmp_path / "run" / "config.cfg").read_text().splitlines()
    assert "max_epochs=3" in written and "seed=2" in written
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour=blue\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="bad.cfg:1"):
        read_config_file(bad)


def test_train_and_predict(tmp_path, small_corpus):
    parts = tmp_path / "parts"
    assert main(["split", str(small_corpus), "--out-dir", str(parts)]) == 0
    model_dir = tmp_path / "model"
    assert main(["train", "--train", str(parts / "train.tsv"), "--val", str(parts / "validation.tsv"),
                 "--out-dir", str(model_dir), "--method", "word-token", "--arch", "meanpool",
                 "--max-epochs", "3", "--learning-rate", "2.0", "--min-frequency", "1"]) == 0
    preds = tmp_path / "preds.tsv"
    assert main(["predict", "--model", str(model_dir / "model.txt"), "--vocab", str(model_dir / "vocab.tsv"),
                 "--input", str(parts / "test.tsv"), "--out", str(preds), "--method", "word-token",
                 "--histogram", str(tmp_path / "h.csv")]) == 0
    assert read_predictions(preds)
    assert len((tmp_path / "h.csv").read_text().splitlines()) == 51


def test_sweep_rows(tmp_path, small_corpus):
    base = ["sweep", "--corpus", str(small_corpus), "--method", "word-token", "--max-epochs", "1",
            "--min-frequency", "1", "--learning-rate", "0.5"]
    one = tmp_path / "one.csv"
    assert main(base + ["--out", str(one), "--filter-sets", "3,4", "--dropouts", "0.5", "--l2s", "0"]) == 0
    assert len(one.read_text().splitlines()) == 2
    dup = tmp_path / "dup.csv"
    assert main(base + ["--out", str(dup), "--filter-sets", "3,4;3,4", "--dropouts", "0.5,0.5",
                        "--l2s", "0,0.01"]) == 0
    assert len(dup.read_text().splitlines()) == 3
    assert main(base + ["--out", str(tmp_path / "x.csv"), "--arch", "meanpool"]) == 2


def test_report_merge(tmp_path, small_corpus, capsys):
    for i in range(2):
        assert main(_experiment_args(small_corpus, tmp_path / f"r{i}")) == 0
    capsys.readouterr()
    out = tmp_path / "merged.csv"
    assert main(["report", str(tmp_path / "r0" / "report.csv"), str(tmp_path / "r1" / "report.csv"),
                 "--renumber", "--no-timings", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3 and lines[1].startswith("1,") and lines[2].startswith("2,")
    # identical seeds and settings give identical rows once timings are blanked
    assert lines[1][2:] == lines[2][2:]


def test_clt_check_command(tmp_path):
    out = tmp_path / "clt.csv"
    assert main(["clt-check", "--uniform", "20000", "--n", "4,25,100", "--trials", "2000",
                 "--out", str(out)]) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    sigmas = [float(r[2]) for r in rows]
    assert sigmas[0] > sigmas[1] > sigmas[2]
    assert abs(sigmas[1] - 1 / np.sqrt(12 * 25)) / (1 / np.sqrt(12 * 25)) < 0.1
    assert main(["clt-check", "--n", "x", "--out", str(tmp_path / "bad.csv")]) == 2
