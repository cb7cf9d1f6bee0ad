import json
import math

import numpy as np
import pytest

from unspell import advtrain
from unspell.advtrain import (
    OptStates,
    RunLog,
    TrainConfig,
    d_loss,
    d_phase,
    g_loss,
    g_phase,
    run_training,
    supervised_step,
    train_run,
    train_step,
)
from unspell.errors import ConfigError, DataError, DivergenceError
from unspell.evalkit import curve_auc
from unspell.ndgrad import DiffTensor, OptimizerState, gradcheck, softmax
from unspell.nets import DiscriminatorConfig, ModelBundle, RecogniserConfig, discriminator_forward, load_checkpoint
from unspell.synthrender import RenderStyle, generate_dataset, load_shard
from unspell.textcorpus import Alphabet, make_corpus, sample_real_batch

SYN = Alphabet.synthetic()
WORDS = ["cat", "dog", "sun", "map", "ink", "owl", "red", "tea", "bay", "fox", "hen", "jam"]


@pytest.fixture(scope="module")
def data(tmp_path_factory):
    root = tmp_path_factory.mktemp("adv")
    corpus = make_corpus(WORDS, "word")
    generate_dataset(corpus, 3, root / "ds", count_train=24, count_test=8, seed=5,
                     style=RenderStyle(clean=True, jitter_x=0, jitter_y=0))
    (root / "words.txt").write_text("\n".join(WORDS) + "\n")
    return root


def tiny_bundle(n=3, seed=0, dtype=np.float64, filters=16):
    rc = RecogniserConfig(n, SYN.K, filters=8, feature_dim=8)
    dc = DiscriminatorConfig(SYN.K, n, embed_dim=8, layers=2, filters=filters, kernel=3)
    return ModelBundle(rc, dc, SYN, seed=seed, dtype=dtype)


def cfg(data, **kw):
    base = dict(dataset=str(data / "ds"), corpus=str(data / "words.txt"), corpus_length=3, batch_size=4,
                iterations=4, eval_interval=2, eval_count=8, out=str(data / "runs"))
    base.update(kw)
    return TrainConfig(**base)


def snapshot(params):
    return {k: p.data.copy() for k, p in params.items()}


def same(a, b):
    return a.keys() == b.keys() and all(np.array_equal(a[k], b[k]) for k in a)


# -- losses


@pytest.mark.parametrize("real,fake,want", [(1.0, 0.0, 0.0), (0.0, 0.0, 0.5), (1.0, 1.0, 0.5)])
def test_d_loss_examples(real, fake, want):
    assert float(d_loss(np.full(5, real), np.full(3, fake)).data) == want


def test_g_loss_examples():
    assert float(g_loss(np.ones(4)).data) == 0.0
    assert float(g_loss(np.zeros(4)).data) == 0.5


def test_g_loss_gradcheck_wrt_logits():
    b = tiny_bundle(n=4, filters=5)
    logits = DiffTensor(np.random.default_rng(2).standard_normal((2, SYN.K, 4)), requires_grad=True)
    err = gradcheck(lambda z: g_loss(discriminator_forward(softmax(z, axis=1), b)), [logits])
    assert err < 1e-4


def test_d_loss_with_zero_projection_is_half(data):
    shard = load_shard(data / "ds" / "train")
    b = tiny_bundle(dtype=np.float32)
    b.discriminator.out.weight.data[:] = 0
    if b.discriminator.out.bias is not None:
        b.discriminator.out.bias.data[:] = 0
    rng = np.random.default_rng(0)
    strings = sample_real_batch(make_corpus(WORDS, "word"), SYN, 3, 4, rng)
    assert d_phase(b, shard.batch(np.arange(4)), strings, OptimizerState()) == 0.5


# -- update scoping


def test_update_scoping_is_bit_exact(data):
    shard = load_shard(data / "ds" / "train")
    b = tiny_bundle(dtype=np.float32)
    x = shard.batch(np.arange(4))
    strings = sample_real_batch(make_corpus(WORDS, "word"), SYN, 3, 4, np.random.default_rng(1))
    opts = OptStates()

    phi0, bufs0, d0 = snapshot(b.phi_params()), {k: v.copy() for k, v in b.buffers().items()}, snapshot(b.d_params())
    d_phase(b, x, strings, opts.d)
    assert same(phi0, snapshot(b.phi_params()))
    assert same(bufs0, b.buffers())
    d1 = snapshot(b.d_params())
    assert not np.array_equal(d0["W"], d1["W"])
    assert any(not np.array_equal(d0[k], d1[k]) for k in d0 if k != "W")

    g_phase(b, x, opts.phi)
    assert same(d1, snapshot(b.d_params()))
    phi1 = snapshot(b.phi_params())
    assert all(not np.array_equal(phi0[k], phi1[k]) for k in phi0)
    assert all(b.d_params()[k].grad is None or not b.d_params()[k].grad.any() for k in d1)


def test_train_step_returns_finite_pair(data):
    shard = load_shard(data / "ds" / "train")
    b = tiny_bundle(dtype=np.float32)
    strings = sample_real_batch(make_corpus(WORDS, "word"), SYN, 3, 4, np.random.default_rng(1))
    dl, gl = train_step(b, shard.batch(np.arange(4)), strings, OptStates())
    assert math.isfinite(dl) and math.isfinite(gl) and dl >= 0 and gl >= 0


def test_non_finite_loss_raises_divergence(data):
    shard = load_shard(data / "ds" / "train")
    b = tiny_bundle(dtype=np.float32)
    b.recogniser.out.weight.data[0, 0] = np.nan
    strings = sample_real_batch(make_corpus(WORDS, "word"), SYN, 3, 4, np.random.default_rng(1))
    with pytest.raises(DivergenceError):
        train_step(b, shard.batch(np.arange(4)), strings, OptStates())


# -- supervised mode


def test_supervised_loss_on_uniform_logits(data):
    shard = load_shard(data / "ds" / "train")
    b = tiny_bundle()
    b.recogniser.out.weight.data[:] = 0
    b.recogniser.out.bias.data[:] = 0
    loss = supervised_step(b, shard.batch(np.arange(4)), shard.encoded()[:4], OptimizerState())
    assert loss == pytest.approx(math.log(28), abs=1e-12)


def test_supervised_loss_on_confident_logits():
    from unspell.ndgrad import cross_entropy

    labels = np.random.default_rng(0).integers(0, 28, size=(3, 5))
    logits = np.eye(28)[labels].transpose(0, 2, 1) * 60.0
    assert float(cross_entropy(DiffTensor(logits), labels, axis=1).data) < 1e-20


def test_supervised_overfit_decreases_monotonically(data):
    shard = load_shard(data / "ds" / "train")
    b = tiny_bundle(dtype=np.float32)
    x, y = shard.batch(np.arange(4)), shard.encoded()[:4]
    opt = OptimizerState(lr=1e-4)  # at 1e-3 RMSProp's normalised steps overshoot and the curve jitters
    losses = [supervised_step(b, x, y, opt) for _ in range(50)]
    assert all(b2 < a for a, b2 in zip(losses, losses[1:]))
    assert losses[-1] < 0.8 * losses[0]


def test_supervised_shape_mismatch(data):
    shard = load_shard(data / "ds" / "train")
    b = tiny_bundle(dtype=np.float32)
    with pytest.raises(ValueError):
        supervised_step(b, shard.batch(np.arange(4)), shard.encoded()[:3], OptimizerState())


# -- config


def test_config_validation(data):
    with pytest.raises(ConfigError):
        cfg(data, batch_size=0)
    with pytest.raises(ConfigError):
        cfg(data, iterations=0)
    with pytest.raises(ConfigError):
        cfg(data, d_steps=1, g_steps=2)
    with pytest.raises(ConfigError):
        cfg(data, mode="wasserstein")
    with pytest.raises(ConfigError):
        cfg(data, corpus=None)
    with pytest.raises(ConfigError):
        TrainConfig.from_dict({"dataset": "x", "corpus": "y", "learning_rate": 1})
    assert TrainConfig.from_dict(cfg(data).as_dict()) == cfg(data)


def test_dataset_and_corpus_mismatch(data, tmp_path):
    with pytest.raises(ConfigError):
        run_training(cfg(data, n=5, out=str(tmp_path / "r")))
    (tmp_path / "long.txt").write_text("kitten\n")
    with pytest.raises(ConfigError):
        run_training(cfg(data, corpus=str(tmp_path / "long.txt"), corpus_length=None, out=str(tmp_path / "r")))
    with pytest.raises(ConfigError):
        run_training(cfg(data, dataset=str(tmp_path / "nope"), out=str(tmp_path / "r")))


# -- runs and logs


DETERMINISTIC = ("log.csv", "char_acc.csv", "evals.csv", "config.json")


def test_run_is_deterministic(data, tmp_path):
    a = train_run(cfg(data), 0, tmp_path / "a")
    b = train_run(cfg(data), 0, tmp_path / "b")
    assert a.status == b.status == "completed"
    for name in DETERMINISTIC:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "final" / "weights.bin").read_bytes() == (tmp_path / "b" / "final" / "weights.bin").read_bytes()


def test_runlog_contents(data, tmp_path):
    res = train_run(cfg(data, iterations=5), 0, tmp_path / "r")
    log = RunLog.read(tmp_path / "r")
    assert [s[0] for s in log.steps] == [1, 2, 3, 4, 5]
    assert log.eval_iterations == [0, 2, 4, 5]
    assert all(len(e[3]) == 16 for e in log.evals)
    assert log.evals[-1][3] == advtrain.fingerprint(load_checkpoint(tmp_path / "r" / "final"))
    assert res.auc == pytest.approx(curve_auc(log.eval_iterations, log.char_curve))
    header = (tmp_path / "r" / "log.csv").read_text().splitlines()[0]
    assert header == "iter,d_loss,g_loss,char_acc,word_acc"
    rows = (tmp_path / "r" / "char_acc.csv").read_text().splitlines()
    assert rows[0].split(",")[0] == "iter" and len(rows[0].split(",")) == 1 + SYN.K
    assert set(log.char_curves()) == {SYN.label(i) for i in range(SYN.K)}


def test_supervised_run_logs_loss(data, tmp_path):
    res = train_run(cfg(data, mode="supervised", corpus=None), 0, tmp_path / "s")
    assert res.status == "completed"
    log = RunLog.read(tmp_path / "s")
    assert all(d is None and g > 0 for _, d, g in log.steps)


def test_single_restart_equals_single_run(data, tmp_path):
    c = cfg(data, out=str(tmp_path / "multi"))
    summary = run_training(c)
    train_run(c, 0, tmp_path / "single")
    for name in DETERMINISTIC:
        assert (tmp_path / "multi" / "run_00" / name).read_bytes() == (tmp_path / "single" / name).read_bytes()
    assert summary["best"] == 0
    best = (tmp_path / "multi" / "best" / "weights.bin").read_bytes()
    assert best == (tmp_path / "single" / "final" / "weights.bin").read_bytes()


def test_restarts_use_distinct_seeds_and_best_auc(data, tmp_path):
    summary = run_training(cfg(data, restarts=2, out=str(tmp_path / "m")))
    runs = summary["runs"]
    assert len(runs) == 2
    seeds = [json.loads((tmp_path / "m" / f"run_0{i}" / "config.json").read_text())["config"]["model_seed"]
             for i in range(2)]
    assert seeds[0] != seeds[1]
    assert summary["best_auc"] == max(r["auc"] for r in runs)


def test_divergence_marks_run_and_restarts_absorb_it(data, tmp_path, monkeypatch):
    calls = {"n": 0}
    real_step = advtrain.loop.train_step

    def flaky(*args):
        calls["n"] += 1
        if calls["n"] == 2:  # second step of the first run
            raise DivergenceError("non-finite d_loss: nan")
        return real_step(*args)

    monkeypatch.setattr(advtrain.loop, "train_step", flaky)
    summary = run_training(cfg(data, restarts=2, out=str(tmp_path / "m")))
    first, second = summary["runs"]
    assert first["status"] == "diverged" and first["auc"] is None
    assert second["status"] == "completed" and summary["best"] == 1
    failure = json.loads((tmp_path / "m" / "run_00" / "failure.json").read_text())
    assert failure["iteration"] == 2
    assert (tmp_path / "m" / "run_00" / "diverged" / "manifest.json").exists()
    assert not (tmp_path / "m" / "run_00" / "final").exists()


def test_stop_at_ends_run_early(data, tmp_path):
    res = train_run(cfg(data, iterations=6, stop_at=-10.0), 0, tmp_path / "r")
    assert res.iterations == 2 and RunLog.read(tmp_path / "r").eval_iterations == [0, 2]


def test_checkpoint_interval(data, tmp_path):
    train_run(cfg(data, checkpoint_interval=3), 0, tmp_path / "r")
    manifest = json.loads((tmp_path / "r" / "checkpoint" / "manifest.json").read_text())
    assert manifest["extra"]["iteration"] == 3


def test_runlog_rejects_non_increasing_and_corrupt(tmp_path):
    log = RunLog({}, ["a"])
    log.log_step(1, 0.1, 0.2)
    with pytest.raises(ValueError):
        log.log_step(1, 0.1, 0.2)
    log.log_eval(1, 0.5, 0.5, [0.5], "abc")
    with pytest.raises(ValueError):
        log.log_eval(0, 0.5, 0.5, [0.5], "abc")
    log.write(tmp_path / "r")
    (tmp_path / "r" / "evals.csv").write_text("iter,char_acc\n1,x\n")
    with pytest.raises(DataError):
        RunLog.read(tmp_path / "r")
    with pytest.raises(DataError):
        RunLog.read(tmp_path / "missing")
