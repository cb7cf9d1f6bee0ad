"""Training runs, evaluation and restart selection."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import shutil
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DivergenceError
from ..evalkit import AccuracyReport, accuracy_report, curve_auc, per_char_accuracy, predict_strings
from ..ndgrad import no_grad
from ..nets import DiscriminatorConfig, ModelBundle, RecogniserConfig, save_checkpoint
from ..synthrender import Shard, load_shard
from ..textcorpus import Alphabet, Corpus, load_corpus, sample_real_batch
from .runlog import RunLog
from .steps import OptStates, d_phase, g_phase, supervised_step, train_step

log = logging.getLogger("unspell.train")

MODES = ("adversarial", "supervised")


@dataclass(frozen=True)
class TrainConfig:
    dataset: str
    corpus: str | None = None
    corpus_kind: str = "word"
    corpus_length: int | None = None  # exact word length filter (word corpora)
    n: int | None = None  # defaults to the dataset's n
    mode: str = "adversarial"
    batch_size: int = 32
    iterations: int = 60_000
    seed: int = 0
    d_steps: int = 1
    g_steps: int = 1
    eval_interval: int = 500
    eval_count: int | None = None  # test samples per evaluation; None = whole shard
    checkpoint_interval: int = 0  # 0 = final checkpoint only
    restarts: int = 1
    lr: float = 1e-3
    skip_rnn: int | None = None
    discriminator: str = "synthetic"  # layer preset: synthetic (5 x k5) or real (8 x k11)
    stop_at: float | None = None  # end a run early once char accuracy reaches this
    out: str = "runs"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("batch_size", "iterations", "eval_interval", "d_steps", "g_steps", "restarts"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.d_steps < self.g_steps:
            raise ConfigError("d_steps:g_steps must be at least 1:1")
        if self.checkpoint_interval < 0:
            raise ConfigError("checkpoint_interval must be >= 0")
        if self.discriminator not in ("synthetic", "real"):
            raise ConfigError("discriminator must be 'synthetic' or 'real'")
        if self.mode == "adversarial" and not self.corpus:
            raise ConfigError("adversarial training needs a corpus")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)


# ---------------------------------------------------------------------------
# evaluation


@dataclass
class EvalResult:
    report: AccuracyReport
    per_char: np.ndarray
    gt: list[str]
    pred: list[str]
    gt_idx: np.ndarray
    pred_idx: np.ndarray

    @property
    def char_acc(self) -> float:
        return self.report.char_accuracy

    @property
    def word_acc(self) -> float:
        return self.report.word_accuracy


def predict(bundle: ModelBundle, images: np.ndarray, batch: int = 64) -> np.ndarray:
    """Eval-mode logits ``N x K x n`` for an image array, in chunks."""
    out = []
    with no_grad():
        for i in range(0, len(images), batch):
            out.append(bundle.recogniser(images[i:i + batch], training=False).data)
    return np.concatenate(out) if out else np.zeros((0, bundle.alphabet.K, 0))


def evaluate_bundle(bundle: ModelBundle, shard: Shard, count: int | None = None, batch: int = 64) -> EvalResult:
    m = len(shard) if count is None else min(count, len(shard))
    gt_idx = shard.encoded()[:m]
    pred_idx = []
    with no_grad():
        for i in range(0, m, batch):
            logits = bundle.recogniser(shard.batch(np.arange(i, min(i + batch, m))), training=False).data
            pred_idx.append(logits.argmax(axis=1))
    pred_idx = np.concatenate(pred_idx)
    _, pred = predict_strings(np.eye(bundle.alphabet.K)[pred_idx].transpose(0, 2, 1), bundle.alphabet)
    gt = shard.labels[:m]
    return EvalResult(accuracy_report(gt, pred), per_char_accuracy(gt_idx, pred_idx, bundle.alphabet.K),
                      gt, pred, gt_idx, pred_idx)


def fingerprint(bundle: ModelBundle) -> str:
    """Short hash of the recogniser state an evaluation measured."""
    h = hashlib.sha256()
    for name, p in bundle.phi_params().items():
        h.update(name.encode())
        h.update(np.ascontiguousarray(p.data).tobytes())
    for name, b in bundle.buffers().items():
        h.update(name.encode())
        h.update(np.ascontiguousarray(b).tobytes())
    return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# runs


def run_seeds(seed: int, run: int) -> tuple[int, np.random.Generator, np.random.Generator]:
    ss = np.random.SeedSequence(seed, spawn_key=(run,))
    model_ss, img_ss, str_ss = ss.spawn(3)
    return int(model_ss.generate_state(1)[0]), np.random.default_rng(img_ss), np.random.default_rng(str_ss)


def _load_data(cfg: TrainConfig) -> tuple[Shard, Shard, Corpus | None, int]:
    root = Path(cfg.dataset)
    try:
        train, test = load_shard(root / "train"), load_shard(root / "test")
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load dataset {root}: {exc}") from exc
    n = cfg.n or train.n
    if train.n != n or test.n != n:
        raise ConfigError(f"dataset n={train.n} does not match configured n={n}")
    if train.alphabet != test.alphabet:
        raise ConfigError("train and test shards use different alphabets")
    corpus = None
    if cfg.mode == "adversarial":
        length = cfg.corpus_length if cfg.corpus_kind == "word" else (cfg.corpus_length or n)
        corpus = load_corpus(cfg.corpus, cfg.corpus_kind, length, mode=train.alphabet.mode)
        if Alphabet.for_mode(corpus.mode) != train.alphabet:
            raise ConfigError("corpus and dataset alphabets differ")
        too_long = [e for e in corpus.entries if len(e) > n]
        if too_long:
            raise ConfigError(f"corpus entry {too_long[0]!r} is longer than n={n}")
    return train, test, corpus, n


def build_bundle(cfg: TrainConfig, alphabet: Alphabet, n: int, seed: int, channels: int) -> ModelBundle:
    rc = RecogniserConfig(n, alphabet.K, channels=channels, skip_rnn=cfg.skip_rnn)
    dc = getattr(DiscriminatorConfig, cfg.discriminator)(alphabet.K, n)
    return ModelBundle(rc, dc, alphabet, seed=seed)


@dataclass
class RunResult:
    index: int
    directory: str
    status: str
    auc: float | None
    final_char_acc: float | None
    final_word_acc: float | None
    iterations: int


def train_run(cfg: TrainConfig, run: int = 0, out_dir=None) -> RunResult:
    """One seeded training run; writes its RunLog and final checkpoint under ``out_dir``."""
    out = Path(out_dir if out_dir is not None else Path(cfg.out) / f"run_{run:02d}")
    train, test, corpus, n = _load_data(cfg)
    alphabet = train.alphabet
    model_seed, img_rng, str_rng = run_seeds(cfg.seed, run)
    bundle = build_bundle(cfg, alphabet, n, model_seed, train.manifest["channels"])
    opts = OptStates.with_lr(cfg.lr)
    labels = train.encoded() if cfg.mode == "supervised" else None
    runlog = RunLog(dict(cfg.as_dict(), run=run, model_seed=model_seed),
                    [alphabet.label(i) for i in range(alphabet.K)])
    start = time.perf_counter()

    def images():
        idx = img_rng.integers(0, len(train), size=cfg.batch_size)
        return idx, train.batch(idx)

    def strings():
        return sample_real_batch(corpus, alphabet, n, cfg.batch_size, str_rng)

    def evaluate(it: int) -> float:
        res = evaluate_bundle(bundle, test, cfg.eval_count)
        runlog.log_eval(it, res.char_acc, res.word_acc, res.per_char, fingerprint(bundle))
        runlog.timing.append((it, time.perf_counter() - start))
        log.info("run %d iter %d: char %.4f word %.4f", run, it, res.char_acc, res.word_acc)
        return res.char_acc

    it = 0
    try:
        evaluate(0)
        for it in range(1, cfg.iterations + 1):
            if cfg.mode == "supervised":
                idx, x = images()
                runlog.log_step(it, None, supervised_step(bundle, x, labels[idx], opts.phi))
            elif cfg.d_steps == cfg.g_steps == 1:
                _, x = images()
                runlog.log_step(it, *train_step(bundle, x, strings(), opts))
            else:
                dl = float(np.mean([d_phase(bundle, images()[1], strings(), opts.d) for _ in range(cfg.d_steps)]))
                gl = float(np.mean([g_phase(bundle, images()[1], opts.phi) for _ in range(cfg.g_steps)]))
                runlog.log_step(it, dl, gl)
            if cfg.checkpoint_interval and it % cfg.checkpoint_interval == 0:
                save_checkpoint(bundle, out / "checkpoint", extra={"iteration": it})
            if it % cfg.eval_interval == 0 or it == cfg.iterations:
                acc = evaluate(it)
                if cfg.stop_at is not None and acc >= cfg.stop_at:
                    break
        runlog.status = "completed"
    except DivergenceError as exc:
        runlog.status = "diverged"
        save_checkpoint(bundle, out / "diverged", extra={"iteration": it, "error": str(exc)})
        (out / "failure.json").write_text(json.dumps({"iteration": it, "error": str(exc)}, indent=2) + "\n")
        log.warning("run %d diverged at iteration %d: %s", run, it, exc)
    runlog.write(out)
    if runlog.status == "completed":
        save_checkpoint(bundle, out / "final", extra={"iteration": it})
    auc = None
    if runlog.status == "completed" and len(runlog.evals) >= 2:
        auc = curve_auc(runlog.eval_iterations, runlog.char_curve)
    last = runlog.evals[-1] if runlog.evals else None
    return RunResult(run, str(out), runlog.status, auc, last[1] if last else None, last[2] if last else None, it)


def _worker(args) -> RunResult:
    cfg_dict, run, out = args
    return train_run(TrainConfig.from_dict(cfg_dict), run, out)


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("UNSPELL_THREADS", "1")))
    except ValueError as exc:
        raise ConfigError("UNSPELL_THREADS must be an integer") from exc


def run_training(cfg: TrainConfig) -> dict:
    """All restarts of ``cfg``; selects the completed run with the largest char-accuracy AUC."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _load_data(cfg)  # fail fast on configuration errors
    (out / "config.json").write_text(json.dumps(cfg.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    jobs = [(cfg.as_dict(), r, str(out / f"run_{r:02d}")) for r in range(cfg.restarts)]
    workers = min(thread_cap(), cfg.restarts)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_worker, jobs))
    else:
        results = [_worker(j) for j in jobs]
    done = [r for r in results if r.auc is not None]
    best = max(done, key=lambda r: (r.auc, -r.index)) if done else None
    if best is not None:
        target = out / "best"
        if target.exists():
            shutil.rmtree(target)
        shutil.copytree(Path(best.directory) / "final", target)
    summary = {
        "runs": [asdict(r) for r in results],
        "best": best.index if best else None,
        "best_auc": best.auc if best else None,
        "best_char_acc": best.final_char_acc if best else None,
        "best_word_acc": best.final_word_acc if best else None,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return summary
