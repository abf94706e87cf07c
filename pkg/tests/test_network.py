import numpy as np
import pytest

from network import (
    CellType,
    LstmState,
    TrainConfig,
    gru_cell_forward,
    init_params,
    load_params,
    loss_and_grad,
    loss_rmse,
    lstm_cell_forward,
    params_from_bytes,
    params_to_bytes,
    predict,
    save_params,
    sequence_forward,
    sigmoid,
    tensor_names,
    train,
    zero_params,
)
from network.params import NetworkParams
from preprocessing.windows import WindowSet
from utils.errors import DataError, ShapeMismatchError

FD_STEP = 1e-5


def _numeric_grad(params: NetworkParams, seq, target) -> dict:
    """중앙 차분 기울기"""
    grads = {}
    for name in params.names:
        base = params[name]
        g = np.zeros_like(base)
        for idx in np.ndindex(base.shape):
            plus = {n: t.copy() for n, t in params.tensors.items()}
            minus = {n: t.copy() for n, t in params.tensors.items()}
            plus[name][idx] += FD_STEP
            minus[name][idx] -= FD_STEP
            lp = loss_rmse(predict(params.with_tensors(plus), seq), target)
            lm = loss_rmse(predict(params.with_tensors(minus), seq), target)
            g[idx] = (lp - lm) / (2 * FD_STEP)
        grads[name] = g
    return grads


def _assert_grads_match(params, seq, target):
    _, analytic = loss_and_grad(seq, target, params)
    numeric = _numeric_grad(params, seq, target)
    for name in params.names:
        a, n = analytic[name], numeric[name]
        tol = 1e-6 + 1e-4 * np.maximum(np.abs(a), np.abs(n))
        assert np.all(np.abs(a - n) <= tol), f"{params.cell.value}:{name} 기울기 불일치"


# ────────────────────────────────────────
# 셀 순전파
# ────────────────────────────────────────

def test_lstm_scalar_gates():
    p = {name: np.ones((1, 1)) for name in ("w_xf", "w_xi", "w_xc", "w_xo", "w_hf", "w_hi", "w_hc", "w_ho")}
    p.update({name: np.zeros(1) for name in ("bias_f", "bias_i", "bias_c", "bias_o")})
    state, cache = lstm_cell_forward(np.ones((1, 1)), LstmState.zeros(1, 1), p)

    for gate in ("f", "i", "o"):
        assert cache[gate][0, 0] == pytest.approx(0.731059, abs=1e-6)
    assert cache["g"][0, 0] == pytest.approx(0.761594, abs=1e-6)
    expected_c = sigmoid(np.array([1.0]))[0] * np.tanh(1.0)
    assert state.c[0, 0] == pytest.approx(expected_c, abs=1e-12)
    assert state.h[0, 0] == pytest.approx(sigmoid(np.array([1.0]))[0] * np.tanh(expected_c), abs=1e-12)


def test_lstm_zero_params_keeps_zero_state():
    p = zero_params(CellType.LSTM, 1, 1, 1).layer(0)
    state, cache = lstm_cell_forward(np.full((1, 1), 3.0), LstmState.zeros(1, 1), p)
    assert cache["f"][0, 0] == 0.5
    assert state.c[0, 0] == 0.0 and state.h[0, 0] == 0.0


def test_zero_network_predicts_zero(rng):
    for cell in CellType:
        params = zero_params(cell, 3, 4, 2)
        np.testing.assert_array_equal(predict(params, rng.standard_normal((5, 3))), np.zeros(2))


def test_sigmoid_is_stable_for_large_inputs():
    out = sigmoid(np.array([-1000.0, 0.0, 1000.0]))
    np.testing.assert_array_equal(out, [0.0, 0.5, 1.0])


def test_rnn_hidden_state_in_range(rng):
    params = init_params(CellType.RNN, 3, 4, 2, seed=1)
    _, cache = sequence_forward(10.0 * rng.standard_normal((6, 3)), params)
    assert np.all(np.abs(cache.last_h) <= 1.0)


def test_gru_closed_update_gate_keeps_state(rng):
    params = init_params(CellType.GRU, 3, 4, 2, seed=2)
    p = dict(params.layer(0))
    p["bias_z"] = np.full(4, -50.0)
    h_prev = rng.uniform(-0.5, 0.5, size=(1, 4))
    state, _ = gru_cell_forward(rng.standard_normal((1, 3)), LstmState(h=h_prev), p)
    np.testing.assert_allclose(state.h, h_prev, atol=1e-12)


def test_cell_shape_mismatch():
    p = zero_params(CellType.LSTM, 3, 4, 2).layer(0)
    with pytest.raises(ShapeMismatchError):
        lstm_cell_forward(np.ones((1, 5)), LstmState.zeros(1, 4), p)


# ────────────────────────────────────────
# 시퀀스 모델 / 손실
# ────────────────────────────────────────

def test_step_order_matters(rng):
    params = init_params(CellType.LSTM, 3, 4, 2, seed=3)
    seq = rng.standard_normal((5, 3))
    assert not np.allclose(predict(params, seq), predict(params, seq[::-1]))


def test_batched_forward_matches_single(rng):
    params = init_params(CellType.GRU, 3, 4, 2, seed=4)
    batch = rng.standard_normal((3, 5, 3))
    out = predict(params, batch)
    for b in range(3):
        np.testing.assert_allclose(out[b], predict(params, batch[b]), rtol=1e-12, atol=1e-14)


def test_forward_rejects_wrong_input_dim(rng):
    params = init_params(CellType.LSTM, 3, 4, 2, seed=0)
    with pytest.raises(ShapeMismatchError):
        predict(params, rng.standard_normal((5, 4)))


def test_loss_rmse_values():
    assert loss_rmse([1.0, 3.0], [0.0, 0.0]) == pytest.approx(np.sqrt(5.0), abs=1e-12)
    assert loss_rmse([2.0, 2.0], [2.0, 2.0]) == 0.0
    with pytest.raises(ShapeMismatchError):
        loss_rmse([1.0, 2.0], [1.0])


# ────────────────────────────────────────
# 기울기 검증 (중앙 차분)
# ────────────────────────────────────────

@pytest.mark.parametrize("cell", list(CellType))
@pytest.mark.parametrize("seed", range(20))
def test_gradients_match_finite_differences(cell, seed):
    rng = np.random.default_rng(100 + seed)
    params = init_params(cell, 3, 4, 2, seed=seed)
    seq = rng.standard_normal((5, 3))
    target = rng.standard_normal(2)
    _assert_grads_match(params, seq, target)


def test_gradients_two_layers_batched():
    rng = np.random.default_rng(7)
    params = init_params(CellType.LSTM, 3, 4, 2, num_layers=2, seed=7)
    assert params.names == tensor_names(CellType.LSTM, 2)
    _assert_grads_match(params, rng.standard_normal((2, 5, 3)), rng.standard_normal((2, 2)))


def test_gradients_hour_unroll():
    rng = np.random.default_rng(8)
    params = init_params(CellType.LSTM, 1, 4, 2, seed=8)
    _assert_grads_match(params, rng.standard_normal((12, 1)), rng.standard_normal(2))


def test_batch_gradient_is_mean_of_sample_gradients():
    rng = np.random.default_rng(9)
    params = init_params(CellType.LSTM, 3, 4, 2, seed=9)
    seqs = rng.standard_normal((2, 5, 3))
    targets = rng.standard_normal((2, 2))
    loss, grads = loss_and_grad(seqs, targets, params)
    singles = [loss_and_grad(seqs[b], targets[b], params) for b in range(2)]
    assert loss == pytest.approx(0.5 * (singles[0][0] + singles[1][0]), rel=1e-12)
    for name in params.names:
        np.testing.assert_allclose(
            grads[name], 0.5 * (singles[0][1][name] + singles[1][1][name]), rtol=1e-10, atol=1e-14
        )


def test_zero_residual_gives_zero_gradient(rng):
    params = init_params(CellType.LSTM, 3, 4, 2, seed=10)
    seq = rng.standard_normal((5, 3))
    loss, grads = loss_and_grad(seq, predict(params, seq), params)
    assert loss == 0.0
    assert all(not np.any(grads[name]) for name in grads.names)


# ────────────────────────────────────────
# 파라미터 / 직렬화
# ────────────────────────────────────────

def test_init_bounds():
    params = init_params(CellType.LSTM, 24, 10, 24, seed=0)
    assert np.max(np.abs(params["w_xf"])) <= 1.0 / np.sqrt(24)
    assert np.max(np.abs(params["w_hf"])) <= 1.0 / np.sqrt(10)
    assert params.size == 4 * (10 * 24 + 10 * 10 + 10) + 24 * 10 + 24


def test_init_is_seeded():
    a = init_params(CellType.GRU, 3, 4, 2, seed=5)
    b = init_params(CellType.GRU, 3, 4, 2, seed=5)
    c = init_params(CellType.GRU, 3, 4, 2, seed=6)
    assert a.equals(b) and not a.equals(c)


def test_params_reject_bad_shapes():
    params = zero_params(CellType.RNN, 3, 4, 2)
    tensors = dict(params.tensors)
    tensors["w_x"] = np.zeros((4, 5))
    with pytest.raises(ShapeMismatchError):
        params.with_tensors(tensors)
    tensors.pop("w_x")
    with pytest.raises(ShapeMismatchError):
        params.with_tensors(tensors)


def test_flat_round_trip_over_subset():
    params = init_params(CellType.LSTM, 3, 4, 2, seed=1)
    names = ["w_xf", "w_out"]
    vector = np.arange(params.flat_size(names), dtype=np.float64)
    updated = params.with_flat(vector, names)
    np.testing.assert_array_equal(updated.flatten(names), vector)
    np.testing.assert_array_equal(updated["w_hf"], params["w_hf"])
    with pytest.raises(ShapeMismatchError):
        params.with_flat(vector[:-1], names)


@pytest.mark.parametrize("cell", list(CellType))
def test_serialization_round_trip(tmp_path, cell):
    params = init_params(cell, 3, 4, 2, num_layers=2, seed=11)
    path = tmp_path / "model.bin"
    save_params(params, path)
    assert load_params(path).equals(params)
    assert params_to_bytes(params_from_bytes(path.read_bytes())) == path.read_bytes()


def test_serialization_errors(tmp_path):
    data = params_to_bytes(init_params(CellType.LSTM, 3, 4, 2, seed=0))
    with pytest.raises(DataError, match="bad magic"):
        params_from_bytes(b"XXXX" + data[4:])
    with pytest.raises(DataError, match="truncated"):
        params_from_bytes(data[:-3])
    with pytest.raises(DataError, match="trailing"):
        params_from_bytes(data + b"\x00")
    with pytest.raises(FileNotFoundError):
        load_params(tmp_path / "missing.bin")


# ────────────────────────────────────────
# 학습 루프
# ────────────────────────────────────────

def _windows(rng, count: int = 20, n_days: int = 2, target: float = 0.5) -> WindowSet:
    inputs = rng.uniform(0.0, 1.0, size=(count, n_days, 24))
    return WindowSet(n_days=n_days, inputs=inputs, targets=np.full((count, 24), target))


def test_train_zero_epochs_returns_init(rng):
    init = init_params(CellType.LSTM, 24, 4, 24, seed=0)
    params, history = train(_windows(rng), TrainConfig(hidden_dim=4, epochs=0), init)
    assert history == []
    assert params.equals(init) and params is not init


def test_train_is_deterministic(rng):
    windows = _windows(rng)
    init = init_params(CellType.LSTM, 24, 4, 24, seed=0)
    cfg = TrainConfig(hidden_dim=4, epochs=5, batch_size=8, seed=3)
    a, hist_a = train(windows, cfg, init)
    b, hist_b = train(windows, cfg, init)
    assert a.equals(b)
    assert hist_a == hist_b


def test_train_reduces_loss_on_constant_target(rng):
    init = init_params(CellType.LSTM, 24, 4, 24, seed=1)
    cfg = TrainConfig(hidden_dim=4, epochs=40, batch_size=8, learning_rate=0.01)
    _, history = train(_windows(rng), cfg, init)
    assert len(history) == 40
    assert history[-1] < history[0]


def test_train_hour_unroll_needs_scalar_input(rng):
    windows = _windows(rng, count=4)
    cfg = TrainConfig(hidden_dim=3, epochs=1, unroll="hour")
    with pytest.raises(ShapeMismatchError):
        train(windows, cfg, init_params(CellType.LSTM, 24, 3, 24, seed=0))
    params, history = train(windows, cfg, init_params(CellType.LSTM, 1, 3, 24, seed=0))
    assert len(history) == 1 and params.is_finite()


def test_train_rejects_empty_windows():
    empty = WindowSet(n_days=2, inputs=np.zeros((0, 2, 24)), targets=np.zeros((0, 24)))
    with pytest.raises(DataError, match="empty window set"):
        train(empty, TrainConfig(), init_params(CellType.LSTM, 24, 10, 24, seed=0))
