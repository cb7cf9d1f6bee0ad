import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unspell import ndgrad as nd
from unspell.ndgrad import DiffTensor, gradcheck

SEEDS = range(20)
TOL = 1e-4


def rand(rng, *shape, scale=1.0):
    return DiffTensor(rng.standard_normal(shape) * scale, requires_grad=True)


# ---------------------------------------------------------------- conv2d

def test_conv2d_identity_kernel():
    x = DiffTensor(np.arange(9.0).reshape(3, 3, 1))
    w = DiffTensor(np.ones((1, 1, 1, 1)))
    np.testing.assert_array_equal(nd.conv2d(x, w).data, x.data)


def test_conv2d_zero_kernel():
    x = DiffTensor(np.random.default_rng(0).standard_normal((2, 5, 6, 3)))
    w = DiffTensor(np.zeros((3, 3, 3, 4)))
    assert not nd.conv2d(x, w).data.any()


@pytest.mark.parametrize("padding,stride,expected", [("same", 1, (8, 8)), ("valid", 1, (6, 6)), ("same", 2, (4, 4)), ("valid", 2, (3, 3))])
def test_conv2d_output_size(padding, stride, expected):
    x = DiffTensor(np.zeros((1, 8, 8, 2)))
    w = DiffTensor(np.zeros((3, 3, 2, 4)))
    assert nd.conv2d(x, w, stride=stride, padding=padding).shape == (1, *expected, 4)


def test_conv2d_channel_mismatch():
    with pytest.raises(ValueError):
        nd.conv2d(DiffTensor(np.zeros((4, 4, 2))), DiffTensor(np.zeros((3, 3, 3, 1))))


def test_conv2d_matches_direct_loops():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((5, 6, 2))
    w = rng.standard_normal((3, 3, 2, 4))
    xp = np.pad(x, ((1, 1), (1, 1), (0, 0)))
    ref = np.zeros((5, 6, 4))
    for i in range(5):
        for j in range(6):
            ref[i, j] = np.einsum("abc,abco->o", xp[i:i + 3, j:j + 3], w)
    np.testing.assert_allclose(nd.conv2d(DiffTensor(x), DiffTensor(w)).data, ref, atol=1e-12)


def test_conv2d_gradcheck_spec_instance():
    rng = np.random.default_rng(0)
    x, w = rand(rng, 8, 8, 2), rand(rng, 3, 3, 2, 4)
    assert gradcheck(nd.conv2d, [x, w]) < 1e-5


@pytest.mark.parametrize("seed", SEEDS)
def test_conv2d_gradcheck(seed):
    rng = np.random.default_rng(seed)
    stride = 1 + seed % 2
    padding = "same" if seed % 3 else "valid"
    x, w, b = rand(rng, 2, 5, 6, 2), rand(rng, 3, 3, 2, 3), rand(rng, 3)
    assert gradcheck(lambda x, w, b: nd.conv2d(x, w, b, stride=stride, padding=padding), [x, w, b]) < TOL


# ---------------------------------------------------------------- conv1d

def test_conv1d_centered_delta():
    x = DiffTensor(np.random.default_rng(1).standard_normal((7, 1)))
    w = np.zeros((5, 1, 1))
    w[2, 0, 0] = 1.0
    np.testing.assert_array_equal(nd.conv1d(x, DiffTensor(w)).data, x.data)


def test_conv1d_averaging_constant_interior():
    x = DiffTensor(np.full((9, 1), 3.0))
    w = DiffTensor(np.full((5, 1, 1), 0.2))
    y = nd.conv1d(x, w).data[:, 0]
    np.testing.assert_allclose(y[2:-2], 3.0)
    assert y.shape == (9,)


def test_conv1d_rejects_even_kernel():
    with pytest.raises(ValueError):
        nd.conv1d(DiffTensor(np.zeros((7, 1))), DiffTensor(np.zeros((4, 1, 1))))


@pytest.mark.parametrize("seed", SEEDS)
def test_conv1d_gradcheck(seed):
    rng = np.random.default_rng(seed)
    k = (3, 5)[seed % 2]
    x, w, b = rand(rng, 2, 7, 3), rand(rng, k, 3, 4), rand(rng, 4)
    assert gradcheck(nd.conv1d, [x, w, b]) < TOL


# ---------------------------------------------------------------- pooling

def test_max_pool_value():
    x = DiffTensor(np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(2, 2, 1))
    assert nd.pool(x, "max2x2").data.item() == 4.0


def test_max_pool_rejects_odd():
    with pytest.raises(ValueError):
        nd.pool(DiffTensor(np.zeros((3, 4, 1))), "max2x2")


def test_avg_over_height_constant():
    x = DiffTensor(np.full((2, 5, 3), 1.5))
    y = nd.pool(x, "avg-over-height")
    assert y.shape == (1, 5, 3)
    np.testing.assert_allclose(y.data, 1.5)


def test_max_pool_gradient_routes_to_argmax():
    x = DiffTensor(np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(2, 2, 1), requires_grad=True)
    nd.backward(nd.pool(x, "max2x2").sum())
    num = nd.numerical_grad(lambda: float(nd.pool(DiffTensor(x.data), "max2x2").data.sum()), x.data)
    np.testing.assert_allclose(x.grad, num, atol=1e-8)
    np.testing.assert_array_equal(x.grad[..., 0], [[0, 0], [0, 1]])


@pytest.mark.parametrize("seed", SEEDS)
def test_pool_gradcheck(seed):
    rng = np.random.default_rng(seed)
    x = rand(rng, 2, 4, 6, 2)
    assert gradcheck(lambda x: nd.pool(x, "max2x2"), [x]) < TOL
    assert gradcheck(lambda x: nd.pool(x, "avg-over-height"), [x]) < TOL
    assert gradcheck(lambda x: nd.pool(x, "avg-over-length"), [rand(rng, 2, 5, 3)]) < TOL


# ---------------------------------------------------------------- normalisation

def test_layer_norm_standardises():
    x = DiffTensor(np.random.default_rng(2).standard_normal((4, 16)) * 50 + 7)
    y = nd.normalize(x, "layer").data
    np.testing.assert_allclose(y.mean(axis=-1), 0, atol=1e-6)
    np.testing.assert_allclose(y.var(axis=-1), 1, atol=1e-6)


def test_batch_norm_identical_samples_zero():
    # per-channel statistics span H and W as well, so every site holds the same vector
    row = np.random.default_rng(3).standard_normal((1, 1, 1, 2))
    x = DiffTensor(np.broadcast_to(row, (4, 3, 3, 2)).copy())
    assert np.abs(nd.normalize(x, "batch", "train").data).max() < 1e-12


def test_batch_norm_eval_uses_running():
    x = DiffTensor(np.ones((2, 3)) * 5)
    y = nd.normalize(x, "batch", "eval", running=(np.full(3, 4.0), np.full(3, 4.0)))
    np.testing.assert_allclose(y.data, 1 / np.sqrt(4 + 1e-5))
    with pytest.raises(ValueError):
        nd.normalize(x, "batch", "eval")


def test_batch_norm_four_sample_gradcheck():
    rng = np.random.default_rng(4)
    x, g, b = rand(rng, 4, 3), rand(rng, 3), rand(rng, 3)
    assert gradcheck(lambda x, g, b: nd.batch_norm(x, g, b)[0], [x, g, b]) < 1e-4


@pytest.mark.parametrize("seed", SEEDS)
def test_norm_gradcheck(seed):
    rng = np.random.default_rng(seed)
    x, g, b = rand(rng, 3, 2, 4, 5), rand(rng, 5), rand(rng, 5)
    assert gradcheck(lambda x, g, b: nd.batch_norm(x, g, b)[0], [x, g, b]) < TOL
    mean, var = rng.standard_normal(5), rng.uniform(0.5, 2, 5)
    assert gradcheck(lambda x, g, b: nd.batch_norm(x, g, b, mean, var)[0], [x, g, b]) < TOL
    assert gradcheck(nd.layer_norm, [rand(rng, 3, 4, 6), rand(rng, 6), rand(rng, 6)]) < TOL


# ---------------------------------------------------------------- activations

def test_leaky_relu_value():
    assert nd.activate(DiffTensor(np.array([-1.0])), "leaky_relu", slope=0.2).data[0] == pytest.approx(-0.2)
    assert nd.leaky_relu(DiffTensor(np.array([3.0]))).data[0] == 3.0


def test_softmax_uniform():
    y = nd.softmax(DiffTensor(np.full((28, 4), 1.7)), axis=0).data
    np.testing.assert_allclose(y, 1 / 28, atol=1e-15)


@given(st.integers(0, 10_000), st.floats(-50, 50))
@settings(max_examples=50, deadline=None)
def test_softmax_shift_invariance_and_simplex(seed, shift):
    z = np.random.default_rng(seed).standard_normal((3, 28, 5)) * 10
    a = nd.softmax(DiffTensor(z), axis=1).data
    b = nd.softmax(DiffTensor(z + shift), axis=1).data
    np.testing.assert_allclose(a, b, atol=1e-9)
    assert (a >= 0).all()
    np.testing.assert_allclose(a.sum(axis=1), 1, atol=1e-6)


@pytest.mark.parametrize("seed", SEEDS)
def test_activation_gradcheck(seed):
    rng = np.random.default_rng(seed)
    assert gradcheck(lambda x: nd.leaky_relu(x, 0.2), [rand(rng, 4, 5)]) < TOL
    assert gradcheck(lambda x: nd.softmax(x, axis=1), [rand(rng, 2, 6, 3)]) < TOL


# ---------------------------------------------------------------- linear

def test_linear_identity_and_zero():
    x = DiffTensor(np.random.default_rng(5).standard_normal((3, 4)))
    np.testing.assert_array_equal(nd.linear(x, DiffTensor(np.eye(4)), DiffTensor(np.zeros(4))).data, x.data)
    b = np.arange(2.0)
    np.testing.assert_array_equal(nd.linear(x, DiffTensor(np.zeros((4, 2))), DiffTensor(b)).data, np.tile(b, (3, 1)))


def test_linear_shape_mismatch():
    with pytest.raises(ValueError):
        nd.linear(DiffTensor(np.zeros((2, 3))), DiffTensor(np.zeros((4, 2))))


def test_linear_gradcheck_tight():
    rng = np.random.default_rng(6)
    assert gradcheck(nd.linear, [rand(rng, 2, 3, 4), rand(rng, 4, 5), rand(rng, 5)]) < 1e-6


@pytest.mark.parametrize("seed", SEEDS)
def test_linear_gradcheck(seed):
    rng = np.random.default_rng(seed)
    assert gradcheck(nd.linear, [rand(rng, 3, 4), rand(rng, 4, 2), rand(rng, 2)]) < TOL


# ---------------------------------------------------------------- lstm

def lstm_params(rng, din, hid, scale=0.5):
    return rand(rng, din, 4 * hid, scale=scale), rand(rng, hid, 4 * hid, scale=scale), rand(rng, 4 * hid, scale=scale)


def test_lstm_zero():
    z = lambda *s: DiffTensor(np.zeros(s))
    out = nd.lstm_seq(z(2, 5, 3), z(3, 16), z(4, 16), z(16))
    assert out.shape == (2, 5, 4) and not out.data.any()


def test_lstm_causal():
    rng = np.random.default_rng(7)
    params = lstm_params(rng, 3, 5)
    x = rng.standard_normal((6, 3))
    base = nd.lstm_seq(DiffTensor(x), *params).data
    x2 = x.copy()
    x2[4:] += rng.standard_normal((2, 3)) * 3
    pert = nd.lstm_seq(DiffTensor(x2), *params).data
    np.testing.assert_array_equal(base[:4], pert[:4])
    assert not np.allclose(base[4:], pert[4:])


def test_lstm_matches_stepwise_reference():
    rng = np.random.default_rng(8)
    wi, wh, b = (p.data for p in lstm_params(rng, 3, 5))
    x = rng.standard_normal((4, 3))
    h, c = np.zeros(5), np.zeros(5)
    sig = lambda v: 1 / (1 + np.exp(-v))
    ref = []
    for t in range(4):
        z = x[t] @ wi + h @ wh + b
        i, f, g, o = sig(z[:5]), sig(z[5:10]), np.tanh(z[10:15]), sig(z[15:])
        c = f * c + i * g
        h = o * np.tanh(c)
        ref.append(h)
    out = nd.lstm_seq(DiffTensor(x), DiffTensor(wi), DiffTensor(wh), DiffTensor(b)).data
    np.testing.assert_allclose(out, np.array(ref), atol=1e-12)


@pytest.mark.parametrize("seed", SEEDS)
def test_lstm_gradcheck(seed):
    rng = np.random.default_rng(seed)
    x = rand(rng, 4, 3) if seed % 2 else rand(rng, 2, 4, 3)
    assert gradcheck(nd.lstm_seq, [x, *lstm_params(rng, 3, 5)]) < TOL


# ---------------------------------------------------------------- backward contract

def test_backward_sum_and_square():
    p = DiffTensor(np.array([1.0, -2.0, 3.0]), requires_grad=True)
    nd.backward(p.sum())
    np.testing.assert_array_equal(p.grad, np.ones(3))
    p.zero_grad()
    nd.backward((p * p).sum() * 0.5)
    np.testing.assert_allclose(p.grad, p.data)


def test_backward_accumulates():
    p = DiffTensor(np.array([1.0, 2.0]), requires_grad=True)
    nd.backward((p * 3.0).sum())
    nd.backward((p * 3.0).sum())
    np.testing.assert_array_equal(p.grad, [6.0, 6.0])


def test_backward_rejects_non_scalar():
    p = DiffTensor(np.ones(3), requires_grad=True)
    with pytest.raises(ValueError):
        nd.backward(p * 2.0)


def test_shared_subexpression():
    p = DiffTensor(np.array([2.0]), requires_grad=True)
    q = p * p
    nd.backward((q + q * p).sum())  # 2p^2... d/dp (p^2 + p^3) = 2p + 3p^2
    np.testing.assert_allclose(p.grad, [2 * 2 + 3 * 4])


def test_no_grad_blocks_graph():
    p = DiffTensor(np.ones(2), requires_grad=True)
    with nd.no_grad():
        y = p * 2.0
    assert not y.requires_grad


def test_cross_entropy_gradcheck_and_uniform():
    rng = np.random.default_rng(9)
    labels = rng.integers(0, 6, size=(2, 4))
    assert gradcheck(lambda z: nd.cross_entropy(z, labels, axis=1), [rand(rng, 2, 6, 4)]) < TOL
    loss = nd.cross_entropy(DiffTensor(np.zeros((2, 28, 4))), labels, axis=1)
    assert loss.item() == pytest.approx(np.log(28))


# ---------------------------------------------------------------- optimiser / init

def test_rmsprop_zero_grad_noop():
    p = DiffTensor(np.array([1.0, 2.0]), requires_grad=True)
    state = nd.OptimizerState()
    state.accumulators["p"] = np.array([4.0, 1.0])
    p.grad = np.zeros(2)
    nd.rmsprop_step({"p": p}, state)
    np.testing.assert_array_equal(p.data, [1.0, 2.0])
    np.testing.assert_allclose(state.accumulators["p"], [3.6, 0.9])


def test_rmsprop_first_step_closed_form():
    g = np.array([0.5, -2.0, 1e-3])
    p = DiffTensor(np.zeros(3), requires_grad=True)
    p.grad = g.copy()
    state = nd.OptimizerState(lr=0.001, decay=0.9, eps=1e-8)
    nd.rmsprop_step({"p": p}, state)
    expected = -0.001 * g / (np.sqrt(0.1 * g * g) + 1e-8)
    np.testing.assert_allclose(p.data, expected, rtol=1e-12)


def test_rmsprop_accumulator_fixed_point():
    g = np.array([0.3, -1.5])
    p = DiffTensor(np.zeros(2), requires_grad=True)
    state = nd.OptimizerState()
    for _ in range(400):
        p.grad = g.copy()
        nd.rmsprop_step({"p": p}, state)
    # acc_t = g^2 (1 - 0.9^t)
    np.testing.assert_allclose(state.accumulators["p"], g * g * (1 - 0.9**400), rtol=1e-12)
    np.testing.assert_allclose(state.accumulators["p"], g * g, rtol=1e-12)


def test_xavier_statistics_and_determinism():
    a = nd.xavier_init((256, 256), 11, dtype=np.float64)
    b = nd.xavier_init((256, 256), 11, dtype=np.float64)
    assert a.data.tobytes() == b.data.tobytes()
    target = 2.0 / 512
    assert abs(a.data.var() - target) / target < 0.2
    assert np.abs(a.data).max() <= np.sqrt(6 / 512)


def test_xavier_conv_fans():
    assert nd.fans((3, 3, 4, 32)) == (36, 288)
    assert nd.fans((5, 256, 512)) == (1280, 2560)
    t = nd.xavier_init((3, 3, 4, 32), 0)
    assert np.abs(t.data).max() <= np.sqrt(6 / (36 + 288))
