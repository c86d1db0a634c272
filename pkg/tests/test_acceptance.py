"""Acceptance suite: one test per criterion, each with its tolerance and time budget.

Every test records a PASS/FAIL line in ``RESULTS``; the conftest hook prints
them at the end of the run. ``python tests/test_acceptance.py`` runs the
suite through pytest and prints the same lines.
"""

import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from gradcheck import max_gradient_error
from goldens import GOLDEN, SENTENCE_1, SENTENCE_2
from test_subword import TOY_CORPORA, brute_force_bpe, replay_encode
from segtr.cli import main
from segtr.corpus import Polarity, Review, SplitSpec, split_dataset
from segtr.evaluation import Prediction, clt_check, majority_vote
from segtr.nn import (
    ArchKind, ArchitectureDescriptor, BestModelSave, Classifier, EarlyStopping, forward, infer_shapes,
)
from segtr.perf import actual_train_duration, format_report, mem_cnn, mem_lstm, read_report
from segtr.segment import SegmentationMethod, SegmenterDeps, build_vocabulary, decode, encode, segment
from segtr.subword import bpe_train
from segtr.text import PAD_TOKEN, UNK_TOKEN

RESULTS: dict[int, str] = {}


@contextmanager
def criterion(number, title, budget):
    start = time.perf_counter()
    ok, why = False, ""
    try:
        yield
        ok = True
    except AssertionError as exc:
        why = f" -- {exc}".split("\n")[0]
        raise
    finally:
        elapsed = time.perf_counter() - start
        within = elapsed < budget
        status = "PASS" if ok and within else "FAIL"
        RESULTS[number] = f"[{status}] criterion {number}: {title} ({elapsed:.2f}s, budget {budget:g}s){why}"
    assert within, f"criterion {number} took {elapsed:.2f}s, budget {budget}s"


def test_criterion_1_segmentation_goldens(fixture_dict):
    with criterion(1, "segmentation goldens, exact", 1):
        deps = SegmenterDeps(dictionary=fixture_dict)
        methods = ["character", "syllable", "word-token", "hybrid", "lemma", "lemma-suffix",
                   "lemma-suffix-meta", "stem", "stem-suffix", "stem-suffix-meta", "token-meta"]
        for name in methods:
            for which, text in enumerate((SENTENCE_1, SENTENCE_2)):
                got = " ".join(segment(SegmentationMethod(name), text, deps))
                assert got == GOLDEN[name][which], name
        assert " ".join(segment(SegmentationMethod.SYLLABLE, SENTENCE_2)) == (
            "ge çen haf ta e li mi ze u laş tı , kul la nı mı ko lay bu la şık la rı pı rıl pı rıl yı kı yor .")


def test_criterion_2_bpe_oracle():
    with criterion(2, "BPE matches brute-force greedy merging, exact", 5):
        assert len(TOY_CORPORA) >= 5
        for corpus, limit in TOY_CORPORA:
            assert len(corpus) <= 30
            model = bpe_train(corpus, limit)
            merges, tokens = brute_force_bpe(corpus, limit)
            assert list(model.merges) == merges and model.tokens == tokens
            assert len(model.tokens) <= limit
            for w in set(corpus):
                pieces = model.encode_word(w)
                assert list(pieces) == replay_encode(merges, w)
                assert "".join(pieces) == w


def test_criterion_3_shape_inference():
    with criterion(3, "CnnRand shapes at L=38, exact", 1):
        for v in (2, 1000, 54321):
            shapes = {s.name: s.dims for s in
                      infer_shapes(ArchitectureDescriptor.default(ArchKind.CNN_RAND), 38, v)}
            assert [shapes[f"conv_{f}"] for f in (3, 4, 5)] == [(36, 100), (35, 100), (34, 100)]
            assert [shapes[f"pool_{f}"][0] for f in (3, 4, 5)] == [18, 17, 17]
            assert [shapes[f"flatten_{f}"] for f in (3, 4, 5)] == [(1800,), (1700,), (1700,)]
            assert shapes["concat"] == (5200,)
            assert shapes["dense"] == (50,)
            assert shapes["output"] == (1,)


SAMPLE_REVIEWS = [
    # (sentence scores, exact mean, published two-decimal value, predicted class)
    ([0.36, 0.23, 0.77, 0.78], 0.535, 0.53, Polarity.POSITIVE),
    ([0.83, 0.79, 0.88, 0.21], 0.6775, 0.67, Polarity.POSITIVE),
    ([0.23, 0.11, 0.29], 0.21, 0.21, Polarity.NEGATIVE),
    ([0.24, 0.04, 0.15], 0.1433, 0.14, Polarity.NEGATIVE),
]


def _vote(scores, label):
    (vote,) = majority_vote([Prediction(1, i, label, s) for i, s in enumerate(scores)])
    return vote


@pytest.mark.xfail(strict=True, reason="0.6775 is 0.0075 from the printed 0.67; the printed values are "
                                       "truncated, so a 0.005 band around them cannot hold")
def test_criterion_4_majority_vote():
    with criterion(4, "sample-review means within 0.005 of the printed values", 1):
        misses = []
        for scores, _, printed, label in SAMPLE_REVIEWS:
            vote = _vote(scores, label)
            if abs(vote.mean_score - printed) > 0.005 + 1e-12:
                misses.append(f"{vote.mean_score:.4f} vs {printed}")
        assert not misses, "outside 0.005: " + ", ".join(misses)


def test_criterion_4_exact_means_and_truncation():
    # the implementation side of criterion 4: exact means, classes and two-decimal truncation
    for scores, exact, printed, label in SAMPLE_REVIEWS:
        vote = _vote(scores, label)
        assert abs(vote.mean_score - exact) < 5e-5
        assert vote.predicted == label
        assert math.floor(vote.mean_score * 100 + 1e-9) / 100 == printed


def test_criterion_5_memory_and_time():
    with criterion(5, "memory and time formulas, exact", 1):
        assert mem_cnn(0, 0) == 3121
        assert all(mem_lstm(0, l) == 53301 for l in range(0, 2000, 7))
        assert actual_train_duration(100, 10, 5) == 50
        rnd = random.Random(5)
        for _ in range(1000):
            v, l = rnd.randint(0, 10**6), rnd.randint(0, 10**6)
            assert mem_cnn(v, l) == Fraction(50 * v) + Fraction(500 * l) + 3121
            assert mem_lstm(v, l) == Fraction(32 * v) + 53301
            t, ec = rnd.uniform(0, 1e4), rnd.randint(1, 300)
            se = rnd.randint(1, ec)
            assert actual_train_duration(t, ec, se) == (t if se == ec else t * se / ec)


def test_criterion_6_gradient_checks():
    with criterion(6, "analytic vs central-difference gradients, rel err < 1e-4 over 20 instances each", 30):
        worst = 0.0
        for kind in (ArchKind.MEAN_POOL, ArchKind.CNN_RAND_SIMPLIFIED):
            for seed in range(20):
                worst = max(worst, max_gradient_error(kind, seed))
        assert worst < 1e-4, worst


def test_criterion_7_clt():
    with criterion(7, "uniform population, n=25: sigma of means within 10% of 0.05774", 10):
        pop = np.random.default_rng(7).uniform(0.0, 1.0, size=100_000)
        target = 1 / (math.sqrt(12) * math.sqrt(25))
        res = clt_check(pop, 25, 10000, seed=7)
        assert abs(res.sigma_means - target) / target < 0.10
        assert abs(res.sigma_predicted - target) / target < 0.10
        sigmas = [clt_check(pop, n, 10000, seed=7).sigma_means for n in (4, 25, 100)]
        assert sigmas[0] > sigmas[1] > sigmas[2]


def test_criterion_8_end_to_end(tmp_path, data_dir, capsys):
    with criterion(8, "shipped synthetic corpus: sentence acc >= 0.90, review acc >= sentence - 0.02, "
                      "deterministic", 60):
        rows = []
        for run in ("a", "b"):
            out = tmp_path / run
            code = main(["experiment", "--config", str(data_dir / "synthetic_experiment.cfg"),
                         "--out-dir", str(out)])
            assert code == 0, capsys.readouterr().err
            rows.append(read_report(out / "report.csv"))
        (rec,) = rows[0]
        assert rec.score >= 0.90
        assert rec.mv_score >= rec.score - 0.02
        assert format_report(rows[0], with_timings=False) == format_report(rows[1], with_timings=False)
        assert (tmp_path / "a" / "predictions.tsv").read_bytes() == (tmp_path / "b" / "predictions.tsv").read_bytes()


def test_criterion_9_pipeline_invariants():
    with criterion(9, "split, vocabulary, encoding, PAD masking and early-stopping invariants", 10):
        # split determinism and disjointness
        reviews = [Review(i, Polarity(i % 2), f"metin {i}") for i in range(1, 58)]
        parts = split_dataset(reviews, SplitSpec(seed=3))
        assert parts == split_dataset(list(reversed(reviews)), SplitSpec(seed=3))
        ids = [r.id for p in parts for r in p]
        assert sorted(ids) == list(range(1, 58)) and len(set(ids)) == len(ids)

        # vocabulary cutoff and encode/decode round trip
        vocab = build_vocabulary([["a"] * 5 + ["b"] * 2 + ["c"]], 3)
        assert set(vocab.token_to_id) == {PAD_TOKEN, UNK_TOKEN, "a"}
        seq = encode(vocab, ["a", "b", "a"], 5)
        assert seq.ids == (2, 1, 2, 0, 0) and decode(vocab, seq) == ["a", UNK_TOKEN, "a"]

        # PAD rows never influence a prediction
        for kind in (ArchKind.MEAN_POOL, ArchKind.CNN_RAND_SIMPLIFIED):
            model = Classifier(ArchitectureDescriptor.default(kind), 10, 12, seed=1)
            batch = np.array([[3, 4, 5, 0, 0, 0, 0, 0, 0, 0]])
            before = forward(model, batch)
            model.params["embedding"][0] += 50.0
            assert np.array_equal(before, forward(model, batch))

        # scripted validation trace: patience 2 stops at epoch 4, best accuracy at epoch 2
        stopper, saver = EarlyStopping(0.001, 2), BestModelSave()
        losses, accs = [1.0, 0.9, 0.91, 0.92], [0.6, 0.8, 0.7, 0.75]
        epoch_count = None
        for epoch, (loss, acc) in enumerate(zip(losses, accs), 1):
            saver.update(epoch, acc, {"w": np.array([float(epoch)])})
            if stopper.update(loss):
                epoch_count = epoch
                break
        assert epoch_count == 4 and saver.epoch == 2


if __name__ == "__main__":
    import sys
    from pathlib import Path

    raise SystemExit(pytest.main([str(Path(__file__)), "-q"] + sys.argv[1:]))
