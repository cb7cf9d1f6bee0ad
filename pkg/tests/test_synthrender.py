import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unspell.netpbm import NetpbmError, read_netpbm, write_netpbm
from unspell.synthrender import (
    BackgroundPool,
    Renderer,
    RenderStyle,
    build_colour_model,
    generate_dataset,
    kmeans,
    load_shard,
    luminance,
    size_and_pad,
)
from unspell.synthrender.glyphs import glyph
from unspell.textcorpus import UNK_CHAR, Alphabet, encode, make_corpus, normalize


@pytest.fixture(scope="module")
def renderer():
    return Renderer(RenderStyle(), seed=0)


# -- colour model


def test_kmeans_two_solid_colours():
    red = np.tile([0.9, 0.1, 0.1], (20, 20, 1))
    blue = np.tile([0.1, 0.1, 0.6], (20, 20, 1))
    model = build_colour_model([red, blue], 2, np.random.default_rng(0))
    np.testing.assert_allclose(model.centroids, [[0.1, 0.1, 0.6], [0.9, 0.1, 0.1]])
    assert not model.duplicate_centroids


def test_kmeans_single_cluster_is_mean():
    px = np.random.default_rng(1).uniform(size=(500, 3))
    model = kmeans(px, 1, np.random.default_rng(0))
    np.testing.assert_allclose(model.centroids[0], px.mean(axis=0))


def test_kmeans_objective_non_increasing():
    px = np.random.default_rng(2).uniform(size=(2000, 3))
    inertia = kmeans(px, 6, np.random.default_rng(3)).inertia
    assert len(inertia) >= 2
    assert all(b <= a + 1e-9 for a, b in zip(inertia, inertia[1:]))


def test_kmeans_sorted_and_duplicate_flag():
    px = np.array([[0.2, 0.2, 0.2], [0.8, 0.8, 0.8]] * 10)
    model = kmeans(px, 4, np.random.default_rng(0))
    assert model.duplicate_centroids
    lum = luminance(model.centroids)
    assert (np.diff(lum) >= 0).all()


# -- sizing


def test_size_and_pad_downscale_no_pad():
    img = np.random.default_rng(0).uniform(size=(64, 1024, 3))
    out = size_and_pad(img, 24)
    assert out.shape == (32, 384, 3)
    # the unpadded rescale would be 512 wide; capping means the whole output is image content
    assert min(math.ceil(1024 * 32 / 64), 24 * 16) == 384


def test_size_and_pad_right_pads_with_mean():
    img = np.random.default_rng(1).uniform(size=(32, 100, 3))
    out = size_and_pad(img, 24)
    assert out.shape == (32, 384, 3)
    np.testing.assert_allclose(out[:, :100], img)
    pad = out[:, 100:]
    np.testing.assert_allclose(pad, np.broadcast_to(img.mean(axis=(0, 1)), pad.shape))


def test_size_and_pad_identity():
    img = np.random.default_rng(2).uniform(size=(32, 384, 1))
    assert np.array_equal(size_and_pad(img, 24), img)


def test_size_and_pad_upscale_then_pad():
    img = np.random.default_rng(3).uniform(size=(100, 1600, 1))
    out = size_and_pad(img, 50)
    assert out.shape == (32, 800, 1)
    assert np.ptp(out[:, 512:, 0]) == 0.0
    assert np.ptp(out[:, 511, 0]) > 0.0


@given(st.integers(1, 80), st.integers(1, 900), st.integers(1, 30))
@settings(max_examples=60, deadline=None)
def test_size_and_pad_shape_and_range(h, w, n):
    img = np.random.default_rng(h * w).uniform(size=(h, w, 3))
    out = size_and_pad(img, n)
    assert out.shape == (32, n * 16, 3)
    assert np.isfinite(out).all() and out.min() >= 0 and out.max() <= 1


# -- rendering


def test_empty_text_is_background(renderer):
    rec = renderer.render_line("", 7, 5)
    assert rec.image.shape == (32, 112, 3)
    assert rec.text == ""
    clean = Renderer(RenderStyle(clean=True)).render_line("", 7, 5).image
    assert (clean == 1.0).all()


def test_render_deterministic(renderer):
    a = renderer.render_line("hello world", 13, 42).image
    b = renderer.render_line("hello world", 13, 42).image
    c = renderer.render_line("hello world", 13, 43).image
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != c.tobytes()


def test_render_shape_and_range(renderer):
    for text, n in [("a", 1), ("quixotic", 8), ("the cat sat", 24)]:
        img = renderer.render_line(text, n, 0).image
        assert img.shape == (32, n * 16, 3)
        assert np.isfinite(img).all() and 0 <= img.min() and img.max() <= 1


def test_render_grayscale():
    img = Renderer(RenderStyle(channels=1)).render_line("abc", 4, 0).image
    assert img.shape == (32, 64, 1)


def test_render_unknown_symbol():
    text = normalize("don't", "real")
    img = Renderer(RenderStyle(clean=True)).render_line(text, 6, 0).image
    assert img.shape == (32, 96, 3) and img.min() < 0.1


def test_render_rejects_bad_input(renderer):
    with pytest.raises(ValueError):
        renderer.render_line("Hello", 8, 0)
    with pytest.raises(ValueError):
        renderer.render_line("toolong", 3, 0)


def test_font_contrast(renderer):
    # ink luminance sits clearly below the background it is drawn on
    for seed in range(10):
        bg = renderer.render_line("", 7, seed).image
        ink = renderer.render_line("mmmmmmm", 7, seed).image
        lb = luminance(bg).mean()
        lmin = luminance(ink).min()
        assert lb - lmin > 0.2


def _ink_runs(image):
    inked = (luminance(image) < 0.5).any(axis=0)
    runs, start = [], None
    for x, on in enumerate(list(inked) + [False]):
        if on and start is None:
            start = x
        elif not on and start is not None:
            runs.append((start, x))
            start = None
    return runs


@pytest.mark.parametrize("jitter", [0, 1])
def test_clean_render_fixed_pitch(jitter):
    style = RenderStyle(clean=True, jitter_x=jitter, jitter_y=jitter)
    r = Renderer(style)
    text = "mwmhmnm"
    for seed in range(5):
        runs = _ink_runs(r.render_line(text, 7, seed).image)
        assert len(runs) == len(text)  # disjoint regions, one per character
        for i, (lo, hi) in enumerate(runs):
            box = i * style.pitch + style.margin
            assert box - jitter <= lo and hi <= box + style.glyph_width + jitter
        same = _ink_runs(r.render_line("mmmmmmm", 7, seed).image)
        starts = np.array([lo for lo, _ in same])
        assert np.all(np.abs(np.diff(starts) - style.pitch) <= 2 * jitter)


def test_clean_render_offsets_match_glyph_bitmap():
    style = RenderStyle(clean=True, jitter_x=0, jitter_y=0)
    runs = _ink_runs(Renderer(style).render_line("oxo", 3, 0).image)
    g = glyph("o", style.glyph_width, style.glyph_height)
    cols = np.nonzero((np.minimum(1, 1.5 * g) > 0.5).any(axis=0))[0]
    for i, (lo, hi) in enumerate(runs[::2]):
        assert lo == 2 * i * style.pitch + style.margin + cols[0]


def test_wide_pitch_layout():
    style = RenderStyle(pitch=30, clean=True, jitter_x=0, jitter_y=0)
    img = Renderer(style).render_line("wide", 24, 0).image
    assert img.shape == (32, 384, 3)
    runs = _ink_runs(img)
    assert len(runs) == 4
    assert runs[-1][1] <= 4 * 30


def test_jitter_must_fit_margin():
    with pytest.raises(ValueError):
        RenderStyle(jitter_x=5)


def test_background_dir(tmp_path):
    rng = np.random.default_rng(0)
    for i in range(2):
        write_netpbm(tmp_path / f"bg{i}.ppm", rng.uniform(0.7, 0.9, size=(40, 200, 3)))
    pool = BackgroundPool.from_dir(tmp_path, 3)
    assert pool.source == str(tmp_path) and len(pool.images) == 2
    img = Renderer(RenderStyle(), pool).render_line("abc", 24, 0).image
    assert img.shape == (32, 384, 3)


# -- netpbm


def test_netpbm_round_trip(tmp_path):
    img = np.random.default_rng(0).integers(0, 256, size=(5, 7, 3)) / 255
    write_netpbm(tmp_path / "a.ppm", img)
    np.testing.assert_allclose(read_netpbm(tmp_path / "a.ppm"), img)
    write_netpbm(tmp_path / "a.pgm", img[..., :1])
    assert read_netpbm(tmp_path / "a.pgm").shape == (5, 7, 1)


def test_netpbm_comments_and_16bit(tmp_path):
    data = np.array([[0, 65535], [1000, 30000]], dtype=">u2")
    (tmp_path / "b.pgm").write_bytes(b"P5\n# comment\n2 2\n65535\n" + data.tobytes())
    np.testing.assert_allclose(read_netpbm(tmp_path / "b.pgm")[..., 0], data / 65535)


def test_netpbm_errors(tmp_path):
    (tmp_path / "bad.pgm").write_bytes(b"P2\n1 1\n255\n0")
    with pytest.raises(NetpbmError):
        read_netpbm(tmp_path / "bad.pgm")
    (tmp_path / "short.pgm").write_bytes(b"P5\n4 4\n255\n\x00\x00")
    with pytest.raises(NetpbmError):
        read_netpbm(tmp_path / "short.pgm")


# -- dataset shards


@pytest.fixture(scope="module")
def corpus():
    return make_corpus(["cat", "dog", "cow", "hen", "owl", "yak"], "word")


def test_generate_dataset(tmp_path, corpus):
    out = generate_dataset(corpus, 3, tmp_path / "ds", count_train=12, count_test=4, seed=7)
    for split, count in (("train", 12), ("test", 4)):
        shard = load_shard(out / split)
        m = json.loads((out / split / "manifest.json").read_text())
        lines = (out / split / "labels.txt").read_text(encoding="utf-8").splitlines()
        size = (out / split / "images.bin").stat().st_size
        assert m["count"] == len(lines) == count == size // (32 * 48 * 3)
        assert m["version"] == 1 and m["height"] == 32 and m["width"] == 48 and m["n"] == 3
        assert tuple(m["alphabet"]) == Alphabet.synthetic().symbols
        assert shard.images.shape == (count, 32, 48, 3)
        for label in shard.labels:
            assert normalize(label) == label
            encode(label, shard.alphabet, shard.n)
        b = shard.batch([0, 1])
        assert b.dtype == np.float32 and 0 <= b.min() and b.max() <= 1
    assert not (tmp_path / "ds.partial").exists()


def test_generate_dataset_bitwise_reproducible(tmp_path, corpus):
    a = generate_dataset(corpus, 3, tmp_path / "a", count_train=6, count_test=2, seed=3)
    b = generate_dataset(corpus, 3, tmp_path / "b", count_train=6, count_test=2, seed=3)
    for split in ("train", "test"):
        for f in ("images.bin", "labels.txt", "manifest.json"):
            assert (a / split / f).read_bytes() == (b / split / f).read_bytes()
    c = generate_dataset(corpus, 3, tmp_path / "c", count_train=6, count_test=2, seed=4)
    assert (a / "train" / "images.bin").read_bytes() != (c / "train" / "images.bin").read_bytes()


def test_generate_dataset_order_independent(tmp_path, corpus):
    # sample i depends only on (seed, i): a longer run shares its prefix with a shorter one
    a = load_shard(generate_dataset(corpus, 3, tmp_path / "a", count_train=3, count_test=1, seed=9) / "train")
    b = load_shard(generate_dataset(corpus, 3, tmp_path / "b", count_train=6, count_test=1, seed=9) / "train")
    assert a.labels == b.labels[:3]
    assert np.array_equal(a.images[:], b.images[:3])


def test_generate_dataset_defaults():
    import inspect

    sig = inspect.signature(generate_dataset)
    assert sig.parameters["count_train"].default == 100_000
    assert sig.parameters["count_test"].default == 1_000


def test_generate_dataset_rejects_long_entries(tmp_path):
    with pytest.raises(ValueError):
        generate_dataset(make_corpus(["horse"], "word"), 3, tmp_path / "x", 1, 1)
    assert not (tmp_path / "x").exists()


def test_generate_dataset_cleans_up_on_error(tmp_path, corpus, monkeypatch):
    from unspell.synthrender import shards

    def boom(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr(shards, "write_shard", boom)
    with pytest.raises(OSError):
        generate_dataset(corpus, 3, tmp_path / "ds", 2, 1)
    assert not (tmp_path / "ds").exists() and not (tmp_path / "ds.partial").exists()


def test_real_mode_dataset(tmp_path):
    c = make_corpus([normalize("it's", "real"), "ok"], "line", mode="real")
    out = generate_dataset(c, 4, tmp_path / "r", 4, 1, seed=0)
    shard = load_shard(out / "train")
    assert shard.alphabet.K == 29
    assert all(set(l) <= set("abcdefghijklmnopqrstuvwxyz " + UNK_CHAR) for l in shard.labels)
