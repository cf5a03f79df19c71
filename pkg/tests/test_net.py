"""Network core: shape contracts, exact forward arithmetic, gradients
against finite differences, Adam behavior, dropout, checkpoints."""

import numpy as np
import pytest

from cetime import net
from cetime.mathstats import Rng
from oracles import reference_adam


def tiny_params(w1, b1, w2, b2):
    return net.MlpParams(
        W1=np.asarray(w1, dtype=float),
        b1=np.asarray(b1, dtype=float),
        W2=np.asarray(w2, dtype=float),
        b2=np.asarray(b2, dtype=float),
    )


class TestInit:
    def test_shapes(self):
        p = net.mlp_init(5, 100, 2, Rng(0))
        assert p.W1.shape == (100, 5)
        assert p.W2.shape == (2, 100)
        assert p.b1.shape == (100,) and p.b2.shape == (2,)

    def test_wide_shapes(self):
        p = net.mlp_init(346, 750, 10, Rng(0))
        assert p.W1.shape == (750, 346)
        assert p.W2.shape == (10, 750)

    def test_biases_zero(self):
        p = net.mlp_init(7, 20, 3, Rng(1))
        assert np.all(p.b1 == 0.0)
        assert np.all(p.b2 == 0.0)

    def test_scales(self):
        p = net.mlp_init(1000, 4000, 1000, Rng(2))
        assert p.W1.std() == pytest.approx(np.sqrt(2.0 / 1000), rel=0.02)
        assert p.W2.std() == pytest.approx(np.sqrt(1.0 / 4000), rel=0.02)

    def test_zero_dims_rejected(self):
        with pytest.raises(net.ConfigError):
            net.mlp_init(0, 5, 2, Rng(0))


class TestForward:
    def test_zero_weights_give_bias(self):
        p = tiny_params(np.zeros((4, 3)), np.zeros(4), np.zeros((2, 4)), [1.5, -0.5])
        y, _ = net.mlp_forward(np.ones((6, 3)), p)
        np.testing.assert_array_equal(y, np.tile([1.5, -0.5], (6, 1)))

    def test_identity_net(self):
        p = tiny_params([[1.0]], [0.0], [[1.0]], [0.0])
        y, _ = net.mlp_forward(np.array([[2.0]]), p)
        assert y[0, 0] == 2.0

    def test_matches_direct_matrix_arithmetic(self):
        rng = Rng(11)
        p = net.mlp_init(3, 4, 2, rng)
        x = rng.child(1).standard_normal((5, 3))
        y, _ = net.mlp_forward(x, p)
        expected = np.maximum(x @ p.W1.T + p.b1, 0.0) @ p.W2.T + p.b2
        np.testing.assert_allclose(y, expected, atol=1e-12)

    def test_shape_mismatch(self):
        p = net.mlp_init(3, 4, 2, Rng(0))
        with pytest.raises(net.ConfigError):
            net.mlp_forward(np.zeros((5, 7)), p)


class TestBackward:
    def test_zero_cotangent_zero_grads(self):
        p = net.mlp_init(3, 4, 2, Rng(0))
        y, cache = net.mlp_forward(Rng(1).standard_normal((5, 3)), p)
        g, dx = net.mlp_backward(cache, np.zeros_like(y))
        for f in ("W1", "b1", "W2", "b2"):
            assert np.all(getattr(g, f) == 0.0)
        assert np.all(dx == 0.0)

    def test_relu_gate_blocks_gradient(self):
        # single hidden unit with negative pre-activation: all grads through it vanish
        p = tiny_params([[1.0]], [0.0], [[1.0]], [0.0])
        y, cache = net.mlp_forward(np.array([[-3.0]]), p)
        assert y[0, 0] == 0.0
        g, dx = net.mlp_backward(cache, np.array([[1.0]]))
        assert g.W1[0, 0] == 0.0 and g.b1[0] == 0.0 and dx[0, 0] == 0.0
        assert g.W2[0, 0] == 0.0  # hidden activation is zero
        assert g.b2[0] == 1.0

    def test_mismatched_cotangent_rejected(self):
        p = net.mlp_init(3, 4, 2, Rng(0))
        _, cache = net.mlp_forward(np.zeros((5, 3)), p)
        with pytest.raises(net.ConfigError):
            net.mlp_backward(cache, np.zeros((5, 3)))


def _flatten(p):
    return np.concatenate([getattr(p, f).ravel() for f in ("W1", "b1", "W2", "b2")])


def _unflatten(vec, template):
    out = {}
    k = 0
    for f in ("W1", "b1", "W2", "b2"):
        arr = getattr(template, f)
        out[f] = vec[k : k + arr.size].reshape(arr.shape).copy()
        k += arr.size
    return net.MlpParams(**out)


def run_finite_difference_check(n_configs=50, seed=0):
    """Analytic gradients vs central differences on random small nets.

    Returns the worst relative error (with a 1e-7 absolute floor) over
    parameter and input gradients; shared with the acceptance suite.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_configs):
        n_in, n_hidden, n_out = rng.integers(1, 9, size=3)
        n_batch = int(rng.integers(1, 5))
        p = net.mlp_init(int(n_in), int(n_hidden), int(n_out), Rng(int(rng.integers(1 << 30))))
        x = rng.standard_normal((n_batch, n_in))
        cot = rng.standard_normal((n_batch, n_out))

        y, cache = net.mlp_forward(x, p)
        g, dx = net.mlp_backward(cache, cot)

        theta = _flatten(p)
        h = 1e-5
        fd = np.empty_like(theta)
        for i in range(theta.size):
            bump = theta.copy()
            bump[i] += h
            up = (net.mlp_forward(x, _unflatten(bump, p))[0] * cot).sum()
            bump[i] -= 2 * h
            down = (net.mlp_forward(x, _unflatten(bump, p))[0] * cot).sum()
            fd[i] = (up - down) / (2 * h)
        analytic = _flatten(g)
        err = np.abs(analytic - fd) / np.maximum(np.abs(fd), 1e-7)
        worst = max(worst, float(err.max()))

        fd_x = np.empty(x.size)
        flat_x = x.ravel()
        for i in range(x.size):
            bump = flat_x.copy()
            bump[i] += h
            up = (net.mlp_forward(bump.reshape(x.shape), p)[0] * cot).sum()
            bump[i] -= 2 * h
            down = (net.mlp_forward(bump.reshape(x.shape), p)[0] * cot).sum()
            fd_x[i] = (up - down) / (2 * h)
        err_x = np.abs(dx.ravel() - fd_x) / np.maximum(np.abs(fd_x), 1e-7)
        worst = max(worst, float(err_x.max()))
    return worst


def test_gradients_match_finite_differences():
    assert run_finite_difference_check(n_configs=10, seed=3) < 1e-4


class TestDropout:
    def test_eval_path_has_no_mask(self):
        p = net.mlp_init(3, 16, 2, Rng(0))
        x = Rng(1).standard_normal((4, 3))
        y1, _ = net.mlp_forward(x, p, mask=None)
        y2, _ = net.mlp_forward(x, p, mask=None)
        np.testing.assert_array_equal(y1, y2)

    def test_zero_rate_returns_none(self):
        assert net.make_dropout_mask(4, 8, 0.0, Rng(0)) is None

    def test_expectation_matches_clean_forward(self):
        p = net.mlp_init(3, 8, 2, Rng(5))
        x = Rng(6).standard_normal((3, 3))
        clean, _ = net.mlp_forward(x, p)
        rng = Rng(7)
        n_masks = 10_000
        outs = np.empty((n_masks,) + clean.shape)
        for i in range(n_masks):
            mask = net.make_dropout_mask(3, 8, 0.5, rng.child(i))
            outs[i] = net.mlp_forward(x, p, mask)[0]
        se = outs.std(axis=0) / np.sqrt(n_masks)
        assert np.all(np.abs(outs.mean(axis=0) - clean) <= 3.0 * se + 1e-12)

    def test_stacked_rows_share_mask(self):
        # K stacked replicas of a batch must see one mask per original row
        p = net.mlp_init(3, 8, 2, Rng(5))
        x = Rng(6).standard_normal((4, 3))
        mask = net.make_dropout_mask(4, 8, 0.5, Rng(8))
        stacked, _ = net.mlp_forward(np.tile(x, (3, 1)), p, mask)
        single, _ = net.mlp_forward(x, p, mask)
        np.testing.assert_array_equal(stacked, np.tile(single, (3, 1)))


class TestAdam:
    def test_zero_gradient_no_change(self):
        p = net.mlp_init(3, 4, 2, Rng(0))
        before = p.copy()
        state = net.AdamState.for_params(p)
        net.adam_step(p, p.zeros_like(), state, lr=0.1)
        for f in ("W1", "b1", "W2", "b2"):
            np.testing.assert_array_equal(getattr(p, f), getattr(before, f))
        assert state.t == 1

    def test_first_step_size(self):
        # bias correction makes the first step ~ -lr * g / (|g| + eps)
        p = tiny_params([[1.0]], [1.0], [[1.0]], [1.0])
        g = tiny_params([[1.0]], [1.0], [[1.0]], [1.0])
        net.adam_step(p, g, net.AdamState.for_params(p), lr=0.1)
        assert p.W1[0, 0] == pytest.approx(1.0 - 0.1 / (1.0 + 1e-8), abs=1e-15)

    def test_quadratic_trajectory_matches_reference(self):
        p = tiny_params([[1.0]], [0.0], [[0.0]], [0.0])
        state = net.AdamState.for_params(p)
        ours = []
        for _ in range(100):
            g = p.zeros_like()
            g.W1[0, 0] = p.W1[0, 0]  # dL/dp of L = p^2/2
            net.adam_step(p, g, state, lr=0.05)
            ours.append(p.W1[0, 0])
        ref = reference_adam(lambda v: v, 1.0, lr=0.05, n_steps=100)
        np.testing.assert_allclose(ours, ref, atol=1e-12)
        assert abs(p.W1[0, 0]) < 0.5

    def test_non_finite_gradients_rejected(self):
        p = net.mlp_init(2, 2, 1, Rng(0))
        before = p.copy()
        state = net.AdamState.for_params(p)
        g = p.zeros_like()
        g.W2[0, 0] = np.nan
        with pytest.raises(FloatingPointError):
            net.adam_step(p, g, state, lr=0.1)
        assert state.t == 0
        np.testing.assert_array_equal(p.W1, before.W1)

    def test_bad_betas(self):
        p = net.mlp_init(2, 2, 1, Rng(0))
        with pytest.raises(net.ConfigError):
            net.adam_step(p, p.zeros_like(), net.AdamState.for_params(p), lr=0.1, beta1=1.0)


class TestDeterminism:
    def test_identical_seeds_identical_training(self):
        def run():
            rng = Rng(77)
            p = net.mlp_init(4, 8, 2, rng.child(0))
            state = net.AdamState.for_params(p)
            x = rng.child(1).standard_normal((16, 4))
            target = rng.child(2).standard_normal((16, 2))
            for step in range(25):
                mask = net.make_dropout_mask(16, 8, 0.5, rng.child(3, step))
                y, cache = net.mlp_forward(x, p, mask)
                g, _ = net.mlp_backward(cache, y - target)
                net.adam_step(p, g, state, lr=1e-3)
            return p

        a, b = run(), run()
        for f in ("W1", "b1", "W2", "b2"):
            np.testing.assert_array_equal(getattr(a, f), getattr(b, f))


class TestCheckpoint:
    def test_roundtrip_exact(self, tmp_path):
        p = net.mlp_init(3, 5, 2, Rng(4))
        state = net.AdamState.for_params(p)
        g = p.copy()
        net.adam_step(p, g, state, lr=0.01)
        path = tmp_path / "ckpt.json"
        net.save_checkpoint(path, {"head": (p, state), "bare": p.copy()}, seed=99, meta={"kind": "test"})
        nets, seed, meta = net.load_checkpoint(path)
        assert seed == 99 and meta["kind"] == "test"
        loaded_p, loaded_state = nets["head"]
        for f in ("W1", "b1", "W2", "b2"):
            np.testing.assert_array_equal(getattr(loaded_p, f), getattr(p, f))
            np.testing.assert_array_equal(getattr(loaded_state.m, f), getattr(state.m, f))
        assert loaded_state.t == 1
        assert isinstance(nets["bare"], net.MlpParams)

    def test_wrong_format_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"format": "other"}')
        with pytest.raises(ValueError):
            net.load_checkpoint(path)
