"""``segtr`` command line: corpus tools, segmentation, training and experiments.

Exit codes: 0 on success, 1 for runtime or data errors, 2 for configuration
errors (bad flags, missing dependencies, refusing to overwrite).

Randomness comes from one seed (``--seed``, else the config file, else
``SEGTR_SEED``, else 0). It is fanned out into four child seeds with
``numpy.random.SeedSequence(seed).spawn(4)``, in this order: split, init,
dropout, clt.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .corpus import (
    RatingScheme, SplitSpec, break_long_sentences, compute_stats, count_words,
    format_stats, nearest_rank_percentile, read_corpus, sentences_of, split_dataset,
    write_corpus,
)
from .errors import ConfigError, InputError, SegtrError, TrainingDiverged
from .evaluation import (
    Prediction, clt_check, histogram, majority_vote, read_predictions, review_accuracy,
    sentence_accuracy, write_predictions,
)
from .morphdict import load_dictionary
from .nn import (
    ArchKind, ArchitectureDescriptor, Classifier, SweepGrid, TrainConfig, forward,
    hyperparameter_sweep, load_model, save_model, sweep_to_csv, train,
)
from .perf import (
    RunConfig, RunResults, Stopwatch, append_report, format_report, next_run_number,
    read_report, record_experiment,
)
from .segment import (
    SegmentationMethod, SegmenterDeps, Vocabulary, build_vocabulary, encode_all, segment,
)
from .subword import Residue, bpe_train, load_bpe, save_bpe, syllabify_word, syllable_form
from .text import tokenize_words

log = logging.getLogger("segtr")

SEED_STREAMS = ("split", "init", "dropout", "clt")


def child_seeds(seed: int) -> dict[str, int]:
    kids = np.random.SeedSequence(seed).spawn(len(SEED_STREAMS))
    return {name: int(k.generate_state(1)[0]) for name, k in zip(SEED_STREAMS, kids)}


# configuration

def _parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _optional(conv):
    def parse(text):
        if text is None or str(text).strip() in ("", "none"):
            return None
        return conv(text)
    return parse


@dataclass(frozen=True)
class ExperimentConfig:
    corpus: str | None = None
    dataset: str | None = None
    scheme: str | None = None
    lenient: bool = False
    method: str = SegmentationMethod.WORD_TOKEN.value
    dictionary: str | None = None
    bpe: str | None = None
    bpe_limit: int | None = None
    residue: str = Residue.DISCARD.value
    min_frequency: int = 3
    global_vocab: bool = False
    percentile: float = 0.995
    train_ratio: float = 0.8
    val_ratio: float = 0.1
    test_ratio: float = 0.1
    arch: str = ArchKind.MEAN_POOL.value
    embedding_dim: int | None = None
    learning_rate: float | None = None
    max_epochs: int | None = None
    patience: int | None = None
    min_delta: float = 0.001
    batch_size: int = 64
    l2: float = 0.0
    output_dir: str | None = None
    seed: int = 0

    @property
    def segmentation(self) -> SegmentationMethod:
        return SegmentationMethod(self.method)

    @property
    def arch_kind(self) -> ArchKind:
        return ArchKind(self.arch)

    def split_spec(self, seed: int) -> SplitSpec:
        try:
            return SplitSpec(self.train_ratio, self.val_ratio, self.test_ratio, seed)
        except InputError as exc:
            raise ConfigError(str(exc)) from None

    def architecture(self) -> ArchitectureDescriptor:
        overrides = {}
        if self.embedding_dim is not None:
            overrides["embedding_dim"] = self.embedding_dim
        return ArchitectureDescriptor.default(self.arch_kind, **overrides)

    def train_config(self, seed: int) -> TrainConfig:
        overrides = {"seed": seed, "batch_size": self.batch_size, "l2": self.l2,
                     "min_delta": self.min_delta}
        for name in ("learning_rate", "max_epochs", "patience"):
            if getattr(self, name) is not None:
                overrides[name] = getattr(self, name)
        return TrainConfig.for_arch(self.arch_kind, **overrides)

    def to_text(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            lines.append(f"{key}={'' if value is None else value}")
        return "\n".join(lines) + "\n"


_CONVERTERS = {
    "corpus": _optional(str), "dataset": _optional(str), "scheme": _optional(str),
    "lenient": _parse_bool, "method": str, "dictionary": _optional(str), "bpe": _optional(str),
    "bpe_limit": _optional(int), "residue": str, "min_frequency": int,
    "global_vocab": _parse_bool, "percentile": float, "train_ratio": float,
    "val_ratio": float, "test_ratio": float, "arch": str, "embedding_dim": _optional(int),
    "learning_rate": _optional(float), "max_epochs": _optional(int), "patience": _optional(int),
    "min_delta": float, "batch_size": int, "l2": float, "output_dir": _optional(str), "seed": int,
}
_PATH_KEYS = ("corpus", "dictionary", "bpe", "output_dir")


def read_config_file(path) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment line.

    Relative paths are resolved against the config file's directory.
    """
    values = {}
    base = Path(path).resolve().parent
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in _CONVERTERS:
                raise ConfigError(f"{path}:{lineno}: unknown or malformed setting {line!r}")
            value = value.strip()
            if key in _PATH_KEYS and value and not os.path.isabs(value):
                value = str(base / value)
            values[key] = value
    return values


def build_config(file_values: dict, flag_values: dict) -> ExperimentConfig:
    merged = {**file_values, **{k: v for k, v in flag_values.items() if k in _CONVERTERS and v is not None}}
    if "seed" not in merged and os.environ.get("SEGTR_SEED"):
        merged["seed"] = os.environ["SEGTR_SEED"]
    kwargs = {}
    for key, value in merged.items():
        try:
            kwargs[key] = _CONVERTERS[key](value)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    return ExperimentConfig(**kwargs)


def validate_config(cfg: ExperimentConfig, need_corpus: bool = True, need_output: bool = True):
    try:
        method = cfg.segmentation
    except ValueError:
        raise ConfigError(f"unknown segmentation method {cfg.method!r}") from None
    try:
        kind = cfg.arch_kind
    except ValueError:
        raise ConfigError(f"unknown architecture {cfg.arch!r}") from None
    if kind is ArchKind.LSTM:
        raise ConfigError("the lstm architecture supports shape and memory accounting only")
    try:
        Residue(cfg.residue)
    except ValueError:
        raise ConfigError(f"unknown residue policy {cfg.residue!r}") from None
    if cfg.scheme is not None:
        _scheme(cfg.scheme)
    if need_corpus:
        _require_file(cfg.corpus, "corpus")
    if method.needs_dictionary:
        if not cfg.dictionary:
            raise ConfigError(f"segmentation method {method.value!r} requires a dictionary (--dict)")
        _require_file(cfg.dictionary, "dictionary")
    if cfg.bpe:
        if method.bpe_limit is None:
            raise ConfigError(f"--bpe given but method {method.value!r} is not a BPE method")
        _require_file(cfg.bpe, "BPE merges")
    if need_output and not cfg.output_dir:
        raise ConfigError("an output directory is required (--out-dir)")
    if cfg.min_frequency < 1 or cfg.batch_size < 1:
        raise ConfigError("min_frequency and batch_size must be >= 1")
    cfg.split_spec(0)


def _require_file(path, what):
    if not path:
        raise ConfigError(f"a {what} path is required")
    if not os.path.isfile(path):
        raise ConfigError(f"{what} file not found: {path}")


def _scheme(name):
    if name is None:
        return None
    try:
        return RatingScheme(name)
    except ValueError:
        choices = ", ".join(s.value for s in RatingScheme)
        raise ConfigError(f"unknown rating scheme {name!r} (choose from {choices})") from None


# output handling

def guard_outputs(paths, force: bool):
    existing = [str(p) for p in paths if os.path.exists(p)]
    if existing and not force:
        raise ConfigError(f"refusing to overwrite {', '.join(existing)} (use --force)")


class StageFailed(SegtrError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


class ArtifactSet:
    """Tracks files written by a run so a failure can flag them ``.incomplete``."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.written: list[Path] = []
        self.stage = "setup"

    def path(self, name: str) -> Path:
        return self.directory / name

    def wrote(self, name: str) -> Path:
        p = self.path(name)
        self.written.append(p)
        return p

    def flag_incomplete(self):
        for p in self.written:
            if p.exists():
                os.replace(p, p.with_name(p.name + ".incomplete"))


# pipeline pieces shared by train, predict, experiment and sweep

def load_deps(cfg: ExperimentConfig, train_sentences=None, artifacts: ArtifactSet | None = None):
    method = cfg.segmentation
    dictionary = load_dictionary(cfg.dictionary) if method.needs_dictionary else None
    bpe_models = {}
    if method.bpe_limit is not None:
        if cfg.bpe:
            bpe_models[method] = load_bpe(cfg.bpe)
        else:
            if train_sentences is None:
                raise ConfigError(f"method {method.value!r} needs --bpe when there is no training data")
            words = [w for s in train_sentences for w in tokenize_words(s.text)]
            model = bpe_train(words, cfg.bpe_limit or method.bpe_limit)
            bpe_models[method] = model
            if artifacts is not None:
                save_bpe(model, artifacts.wrote("bpe.txt"))
    return SegmenterDeps(dictionary, bpe_models, Residue(cfg.residue))


def segment_sentences(method, sentences, deps):
    return [(s.review_id, s.index, segment(method, s.text, deps)) for s in sentences]


def length_cutoff(sentences, percentile: float) -> int | None:
    if not sentences:
        return None
    return nearest_rank_percentile((count_words(s.text) for s in sentences), percentile)


def id_matrix(encoded) -> np.ndarray:
    return np.array([e.ids for e in encoded], dtype=np.int64).reshape(len(encoded), -1)


def labels_of(sentences) -> np.ndarray:
    return np.array([int(s.label) for s in sentences], dtype=float)


def predict_sentences(model: Classifier, encoded, sentences) -> list[Prediction]:
    scores = forward(model, id_matrix(encoded)) if encoded else np.zeros(0)
    return [Prediction(s.review_id, s.index, s.label, float(p)) for s, p in zip(sentences, scores)]


@dataclass
class ExperimentOutcome:
    record: object
    sentence_accuracy: float
    review_accuracy: float
    output_dir: Path


EXPERIMENT_ARTIFACTS = ("config.cfg", "bpe.txt", "vocab.tsv", "model.txt", "history.csv",
                        "predictions.tsv", "histogram.csv", "report.csv")


def run_experiment(cfg: ExperimentConfig, force: bool = False, report_path=None,
                   run_number: int | None = None) -> ExperimentOutcome:
    """Split, segment, encode, train, predict and score one configuration."""
    validate_config(cfg)
    out = Path(cfg.output_dir)
    guard_outputs([out / n for n in EXPERIMENT_ARTIFACTS], force)
    out.mkdir(parents=True, exist_ok=True)
    for name in EXPERIMENT_ARTIFACTS:
        stale = out / (name + ".incomplete")
        if stale.exists():
            stale.unlink()

    seeds = child_seeds(cfg.seed)
    method = cfg.segmentation
    arch = cfg.architecture()
    tcfg = cfg.train_config(seeds["dropout"])
    art = ArtifactSet(out)
    watch = Stopwatch()
    watch.stamp()
    try:
        art.stage = "config"
        art.wrote("config.cfg").write_text(cfg.to_text(), encoding="utf-8")

        art.stage = "load"
        reviews = read_corpus(cfg.corpus, _scheme(cfg.scheme), cfg.lenient)

        art.stage = "split"
        parts = split_dataset(reviews, cfg.split_spec(seeds["split"]))

        art.stage = "sentences"
        raw = [sentences_of(p) for p in parts]
        cutoff = length_cutoff(raw[0], cfg.percentile)
        sents = [break_long_sentences(r, cutoff=cutoff) for r in raw]

        art.stage = "segment"
        deps = load_deps(cfg, sents[0], art)
        segmented = [segment_sentences(method, s, deps) for s in sents]

        art.stage = "vocab"
        vocab_source = segmented[0] if not cfg.global_vocab else [r for seg in segmented for r in seg]
        vocab = build_vocabulary((t for _, _, t in vocab_source), cfg.min_frequency)
        vocab.save(art.wrote("vocab.tsv"))

        art.stage = "encode"
        max_length = max((len(t) for _, _, t in segmented[0]), default=0)
        if max_length < 1:
            raise InputError("training partition has no tokens")
        encoded = [encode_all(vocab, seg, max_length) for seg in segmented]
        watch.stamp()

        art.stage = "train"
        model = Classifier(arch, max_length, len(vocab), seed=seeds["init"], pad_id=vocab.pad_id)
        try:
            best, hist = train(model, id_matrix(encoded[0]), labels_of(sents[0]),
                               id_matrix(encoded[1]), labels_of(sents[1]), tcfg)
        except TrainingDiverged as exc:
            art.wrote("history.csv").write_text(exc.history.to_csv(), encoding="utf-8")
            raise
        save_model(best, art.wrote("model.txt"))
        art.wrote("history.csv").write_text(hist.to_csv(), encoding="utf-8")
        watch.stamp()

        art.stage = "predict"
        preds = predict_sentences(best, encoded[2], sents[2])
        watch.stamp()
        write_predictions(art.wrote("predictions.tsv"), preds)

        art.stage = "evaluate"
        s_acc = sentence_accuracy(preds)
        reviews_scored = majority_vote(preds)
        r_acc = review_accuracy(reviews_scored)
        art.wrote("histogram.csv").write_text(histogram(preds).to_csv(), encoding="utf-8")

        art.stage = "report"
        if run_number is None:
            run_number = next_run_number(report_path) if report_path else 1
        record = record_experiment(
            watch,
            RunConfig(run_number, cfg.dataset or Path(cfg.corpus).stem, method, tcfg.batch_size, arch),
            RunResults(len(sents[0]), len(sents[1]), len(sents[2]), len(vocab), max_length,
                       s_acc, r_acc, hist.epoch_count, hist.save_epoch),
        )
        report_file = art.wrote("report.csv")
        report_file.write_text(format_report([record]), encoding="utf-8")
        if report_path:
            append_report(report_path, record)
    except Exception as exc:
        art.flag_incomplete()
        if isinstance(exc, ConfigError):
            raise ConfigError(f"stage '{art.stage}' failed: {exc}") from exc
        raise StageFailed(art.stage, exc) from exc
    return ExperimentOutcome(record, s_acc, r_acc, out)


# command handlers

def _write_text(path, text: str, force: bool):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    guard_outputs([path], force)
    Path(path).write_text(text, encoding="utf-8")


def cmd_stats(args) -> int:
    reviews = read_corpus(args.corpus, _scheme(args.scheme), args.lenient)
    _write_text(args.out, format_stats(compute_stats(reviews), csv=args.csv), args.force)
    return 0


def cmd_split(args) -> int:
    ratios = [float(x) for x in args.ratios.split(",")]
    if len(ratios) != 3:
        raise ConfigError("--ratios needs three comma-separated values")
    seed = child_seeds(resolve_seed(args))["split"]
    try:
        spec = SplitSpec(*ratios, seed=seed)
    except InputError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(args.out_dir)
    names = ("train.tsv", "validation.tsv", "test.tsv")
    guard_outputs([out / n for n in names], args.force)
    parts = split_dataset(read_corpus(args.corpus, _scheme(args.scheme), args.lenient), spec)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in zip(names, parts):
        write_corpus(out / name, part)
        print(f"{name}\t{len(part)}")
    return 0


def _render_check_form(word_tokens) -> list[str]:
    out = []
    for w in word_tokens:
        for syl in syllabify_word(w):
            out.append(f"{syl}/{syllable_form(syl) or '-'}")
    return out


def cmd_segment(args) -> int:
    cfg = build_config({}, {"method": args.method, "dictionary": args.dict, "bpe": args.bpe,
                            "residue": args.residue})
    validate_config(cfg, need_corpus=False, need_output=False)
    method = cfg.segmentation
    if args.check_form and method is not SegmentationMethod.SYLLABLE:
        raise ConfigError("--check-form only applies to the syllable method")
    deps = load_deps(cfg)
    if args.input in (None, "-"):
        lines = sys.stdin.read().splitlines()
    else:
        lines = Path(args.input).read_text(encoding="utf-8").splitlines()
    rendered = []
    for line in lines:
        if args.check_form:
            tokens = _render_check_form(tokenize_words(line))
        else:
            tokens = segment(method, line, deps)
        rendered.append(" ".join(tokens) + "\n")
    _write_text(args.out, "".join(rendered), args.force)
    return 0


def cmd_bpe_train(args) -> int:
    guard_outputs([args.out], args.force)
    if args.format == "corpus":
        texts = [r.text for r in read_corpus(args.input, _scheme(args.scheme), args.lenient)]
    else:
        texts = Path(args.input).read_text(encoding="utf-8").splitlines()
    words = [w for t in texts for w in tokenize_words(t)]
    model = bpe_train(words, args.limit)
    save_bpe(model, args.out)
    print(f"merges\t{len(model.merges)}\ntokens\t{len(model.tokens)}")
    return 0


def _config_from_args(args) -> ExperimentConfig:
    file_values = read_config_file(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items() if v is not None}
    if getattr(args, "out_dir", None):
        flags["output_dir"] = args.out_dir
    if getattr(args, "dict", None):
        flags["dictionary"] = args.dict
    return build_config(file_values, flags)


def cmd_train(args) -> int:
    cfg = _config_from_args(args)
    validate_config(cfg, need_corpus=False)
    _require_file(args.train, "training corpus")
    _require_file(args.val, "validation corpus")
    out = Path(cfg.output_dir)
    names = ("model.txt", "vocab.tsv", "history.csv", "bpe.txt")
    guard_outputs([out / n for n in names], args.force)
    out.mkdir(parents=True, exist_ok=True)
    seeds = child_seeds(cfg.seed)
    scheme = _scheme(cfg.scheme)
    raw = [sentences_of(read_corpus(p, scheme, cfg.lenient)) for p in (args.train, args.val)]
    cutoff = length_cutoff(raw[0], cfg.percentile)
    sents = [break_long_sentences(r, cutoff=cutoff) for r in raw]
    art = ArtifactSet(out)
    deps = load_deps(cfg, sents[0], art)
    segmented = [segment_sentences(cfg.segmentation, s, deps) for s in sents]
    vocab = build_vocabulary((t for _, _, t in segmented[0]), cfg.min_frequency)
    max_length = max((len(t) for _, _, t in segmented[0]), default=0)
    if max_length < 1:
        raise InputError("training corpus has no tokens")
    encoded = [encode_all(vocab, seg, max_length) for seg in segmented]
    model = Classifier(cfg.architecture(), max_length, len(vocab), seed=seeds["init"])
    best, hist = train(model, id_matrix(encoded[0]), labels_of(sents[0]),
                       id_matrix(encoded[1]), labels_of(sents[1]),
                       cfg.train_config(seeds["dropout"]))
    vocab.save(out / "vocab.tsv")
    save_model(best, out / "model.txt")
    (out / "history.csv").write_text(hist.to_csv(), encoding="utf-8")
    print(f"epochs\t{hist.epoch_count}\nsave_epoch\t{hist.save_epoch}\n"
          f"val_accuracy\t{hist.epochs[hist.save_epoch - 1].val_accuracy:.4f}")
    return 0


def cmd_predict(args) -> int:
    cfg = build_config({}, {"method": args.method, "dictionary": args.dict, "bpe": args.bpe,
                            "residue": args.residue})
    validate_config(cfg, need_corpus=False, need_output=False)
    guard_outputs([p for p in (args.out, args.histogram) if p], args.force)
    model = load_model(args.model)
    vocab = Vocabulary.load(args.vocab)
    if len(vocab) != model.vocab_size:
        raise ConfigError(f"vocabulary has {len(vocab)} entries but the model expects {model.vocab_size}")
    sents = sentences_of(read_corpus(args.input, _scheme(args.scheme), args.lenient))
    if args.cutoff:
        sents = break_long_sentences(sents, cutoff=args.cutoff)
    deps = load_deps(cfg)
    encoded = encode_all(vocab, segment_sentences(cfg.segmentation, sents, deps), model.max_length)
    preds = predict_sentences(model, encoded, sents)
    write_predictions(args.out, preds)
    if args.histogram:
        Path(args.histogram).write_text(histogram(preds).to_csv(), encoding="utf-8")
    print(f"sentence_accuracy\t{sentence_accuracy(preds):.4f}\n"
          f"review_accuracy\t{review_accuracy(majority_vote(preds)):.4f}")
    return 0


def cmd_experiment(args) -> int:
    cfg = _config_from_args(args)
    outcome = run_experiment(cfg, force=args.force, report_path=args.report)
    print(f"sentence_accuracy\t{outcome.sentence_accuracy:.4f}\n"
          f"review_accuracy\t{outcome.review_accuracy:.4f}\n"
          f"output\t{outcome.output_dir}")
    return 0


def _int_tuple_list(text: str):
    return tuple(tuple(int(x) for x in group.split(",")) for group in text.split(";") if group)


def _float_list(text: str):
    return tuple(float(x) for x in text.split(",") if x)


def cmd_sweep(args) -> int:
    if not args.arch:
        args.arch = ArchKind.CNN_RAND_SIMPLIFIED.value
    cfg = _config_from_args(args)
    validate_config(cfg, need_output=False)
    if not cfg.arch_kind.is_cnn:
        raise ConfigError("the sweep grid varies filter sizes, so it needs a CNN architecture")
    guard_outputs([args.out], args.force)
    grid = SweepGrid()
    try:
        if args.filter_sets:
            grid = replace(grid, filter_sizes=_int_tuple_list(args.filter_sets))
        if args.dropouts:
            grid = replace(grid, dropouts=_float_list(args.dropouts))
        if args.l2s:
            grid = replace(grid, l2s=_float_list(args.l2s))
    except ValueError as exc:
        raise ConfigError(f"bad grid specification: {exc}") from None
    seeds = child_seeds(cfg.seed)
    reviews = read_corpus(cfg.corpus, _scheme(cfg.scheme), cfg.lenient)
    parts = split_dataset(reviews, cfg.split_spec(seeds["split"]))
    raw = [sentences_of(p) for p in parts[:2]]
    cutoff = length_cutoff(raw[0], cfg.percentile)
    sents = [break_long_sentences(r, cutoff=cutoff) for r in raw]
    deps = load_deps(cfg, sents[0])
    segmented = [segment_sentences(cfg.segmentation, s, deps) for s in sents]
    vocab = build_vocabulary((t for _, _, t in segmented[0]), cfg.min_frequency)
    max_length = max((len(t) for _, _, t in segmented[0]), default=0)
    if max_length < 1:
        raise InputError("training partition has no tokens")
    encoded = [encode_all(vocab, seg, max_length) for seg in segmented]
    rows = hyperparameter_sweep(
        cfg.architecture(), grid, id_matrix(encoded[0]), labels_of(sents[0]),
        id_matrix(encoded[1]), labels_of(sents[1]), cfg.train_config(seeds["dropout"]),
        len(vocab), init_seed=seeds["init"])
    _write_text(args.out, sweep_to_csv(rows), args.force)
    return 0


def cmd_report(args) -> int:
    records = []
    for path in args.reports:
        records.extend(read_report(path))
    if args.renumber:
        records = [replace(r, no=i) for i, r in enumerate(records, 1)]
    _write_text(args.out, format_report(records, with_timings=not args.no_timings), args.force)
    return 0


def cmd_clt_check(args) -> int:
    seed = child_seeds(resolve_seed(args))["clt"]
    if args.predictions:
        population = [p.score for p in read_predictions(args.predictions)]
    else:
        population = np.random.default_rng(seed).uniform(0.0, 1.0, size=args.uniform)
    try:
        sizes = [int(x) for x in args.n.split(",")]
    except ValueError:
        raise ConfigError(f"bad --n list {args.n!r}") from None
    lines = ["n,sigma_population,sigma_means,sigma_predicted,relative_error,mean_of_means"]
    for i, n in enumerate(sizes):
        res = clt_check(population, n, args.trials, seed=seed + i)
        lines.append(f"{n},{res.sigma_population:.6f},{res.sigma_means:.6f},"
                     f"{res.sigma_predicted:.6f},{res.relative_error:.6f},{res.mean_of_means:.6f}")
    _write_text(args.out, "\n".join(lines) + "\n", args.force)
    return 0


# argument parsing

def resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("SEGTR_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"SEGTR_SEED is not an integer: {env!r}") from None
    return 0


def _add_corpus_options(p):
    p.add_argument("--scheme", choices=[s.value for s in RatingScheme],
                   help="map r:<rating> labels with this rating scheme")
    p.add_argument("--lenient", action="store_true", default=None,
                   help="skip malformed corpus lines instead of failing")


def _add_segmentation_options(p, required=False):
    p.add_argument("--method", required=required, choices=[m.value for m in SegmentationMethod])
    p.add_argument("--dict", help="morphological dictionary TSV")
    p.add_argument("--bpe", help="BPE merges file")
    p.add_argument("--residue", choices=[r.value for r in Residue],
                   help="what to do with characters the BPE model never saw")


def _add_model_options(p):
    p.add_argument("--arch", choices=[k.value for k in ArchKind if k is not ArchKind.LSTM])
    p.add_argument("--embedding-dim", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--max-epochs", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--min-delta", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--l2", type=float)
    p.add_argument("--min-frequency", type=int)
    p.add_argument("--bpe-limit", type=int, help="train a BPE model with this limit when --bpe is absent")
    p.add_argument("--percentile", type=float, help="sentence-length percentile for chunking")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed (default: $SEGTR_SEED or 0)")
    common.add_argument("--force", action="store_true", help="overwrite existing outputs")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="segtr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[common], help="corpus statistics")
    p.add_argument("corpus")
    p.add_argument("--csv", action="store_true", help="one CSV row instead of key/value lines")
    p.add_argument("--out", help="output file (default stdout)")
    _add_corpus_options(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", parents=[common], help="seeded train/validation/test split")
    p.add_argument("corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--ratios", default="0.8,0.1,0.1")
    _add_corpus_options(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("segment", parents=[common], help="segment one sentence per line")
    _add_segmentation_options(p, required=True)
    p.add_argument("--in", dest="input", help="input file (default stdin)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--check-form", action="store_true",
                   help="print each syllable with its matched pattern")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("bpe-train", parents=[common], help="learn BPE merges")
    p.add_argument("input")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("text", "corpus"), default="text",
                   help="plain text lines or a label<TAB>text corpus")
    _add_corpus_options(p)
    p.set_defaults(func=cmd_bpe_train)

    p = sub.add_parser("train", parents=[common], help="train a classifier on given partitions")
    p.add_argument("--train", required=True)
    p.add_argument("--val", required=True)
    p.add_argument("--out-dir")
    p.add_argument("--config", help="key=value settings file; flags override it")
    _add_segmentation_options(p)
    _add_model_options(p)
    _add_corpus_options(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="score a corpus with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--histogram")
    p.add_argument("--cutoff", type=int, help="chunk sentences longer than this many words")
    _add_segmentation_options(p, required=True)
    _add_corpus_options(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("experiment", parents=[common], help="run the full pipeline")
    p.add_argument("--corpus")
    p.add_argument("--dataset")
    p.add_argument("--out-dir")
    p.add_argument("--config", help="key=value settings file; flags override it")
    p.add_argument("--report", help="also append the row to this shared report CSV")
    p.add_argument("--global-vocab", action="store_true", default=None,
                   help="build the vocabulary on all partitions")
    _add_segmentation_options(p)
    _add_model_options(p)
    _add_corpus_options(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("sweep", parents=[common], help="grid search over filters, dropout and L2")
    p.add_argument("--corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="key=value settings file; flags override it")
    p.add_argument("--filter-sets", help="e.g. '3,4,5;10,16,22'")
    p.add_argument("--dropouts", help="e.g. '0.4,0.5'")
    p.add_argument("--l2s", help="e.g. '0,0.01'")
    _add_segmentation_options(p)
    _add_model_options(p)
    _add_corpus_options(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", parents=[common], help="validate and merge report CSVs")
    p.add_argument("reports", nargs="+")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--no-timings", action="store_true", help="blank the clock-dependent columns")
    p.add_argument("--renumber", action="store_true", help="renumber rows 1..N")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("clt-check", parents=[common], help="spread of resampled means vs sigma/sqrt(n)")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--predictions", help="use the scores of a predictions TSV as the population")
    src.add_argument("--uniform", type=int, default=100000,
                     help="size of a seeded uniform[0,1] population (default)")
    p.add_argument("--n", default="4,25,100", help="comma-separated group sizes")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_clt_check)
    return parser


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return 2
    if isinstance(exc, StageFailed) and isinstance(exc.cause, ConfigError):
        return 2
    return 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SegtrError, OSError, ValueError) as exc:
        print(f"segtr {args.command}: error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
