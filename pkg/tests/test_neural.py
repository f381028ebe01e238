import sys
import math
import logging
import pytest
import numpy as np

sys.path.insert(0, "..")

from buck_smc.plugins.neural.dataset import Dataset, save_dataset, load_dataset
from buck_smc.plugins.neural.mlp import (
    Mlp,
    init_mlp,
    forward,
    predict,
    hidden_features,
    standardize_inputs,
    cost,
    rmse,
    correlation,
    backward,
    save_model,
    load_model,
)
from buck_smc.plugins.neural.trainer import (
    TrainConfig,
    Sgd,
    Adam,
    RmsProp,
    train,
    evaluate,
    hyperparameter_sweep,
)
from buck_smc.plugins.neural.adaptive_head import AdaptiveHead, f_hat, adapt, head_from_mlp

logging.basicConfig(level=logging.ERROR)


def hand_net():
    return Mlp(
        layer_sizes=[2, 3, 3, 1],
        weights=[
            [[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]],
            [[1.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.5, 0.0, 2.0]],
            [[1.0, 2.0, 3.0]],
        ],
        biases=[[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.5]],
        activation="relu",
    )


def linear_dataset(size=400, seed=1):
    rng = np.random.default_rng(seed)
    e = rng.uniform(-1.0, 1.0, size)
    edot = rng.normal(0.0, 50.0, size)
    return Dataset(np.column_stack((e, edot)), 2.0 * e)


def test_init_mlp():
    net = init_mlp()
    assert net.layer_sizes == [2, 3, 3, 1]
    assert [w.shape for w in net.weights] == [(3, 2), (3, 3), (1, 3)]
    assert all(not b.any() for b in net.biases)
    assert net.hidden_width == 3
    limit = math.sqrt(6.0 / 5.0)
    assert np.all(np.abs(net.weights[0]) <= limit)
    again = init_mlp(seed=0)
    assert all(np.array_equal(a, b) for a, b in zip(net.weights, again.weights))
    other = init_mlp(seed=1)
    assert not np.array_equal(net.weights[0], other.weights[0])


# test_init_mlp()


def test_mlp_validation():
    with pytest.raises(ValueError, match="unsupported activation"):
        init_mlp(activation="softplus")
    with pytest.raises(ValueError, match="expected weights"):
        Mlp([2, 1], weights=[np.zeros((2, 1))], biases=[np.zeros(1)])
    with pytest.raises(ValueError, match="finite"):
        Mlp([2, 1], weights=[[[math.nan, 0.0]]], biases=[[0.0]])
    with pytest.raises(ValueError, match="expected 2 weight"):
        Mlp([2, 2, 1], weights=[np.zeros((2, 2))], biases=[np.zeros(2)])


# test_mlp_validation()


def test_forward_examples():
    zero = Mlp(
        [2, 3, 3, 1],
        weights=[np.zeros((3, 2)), np.zeros((3, 3)), np.zeros((1, 3))],
        biases=[np.zeros(3), np.zeros(3), np.zeros(1)],
    )
    assert forward(zero, [3.0, -7.0])[0] == 0.0
    collapsed = Mlp([2, 2, 1], weights=[np.eye(2), [[1.0, 1.0]]], biases=[[0, 0], [0]])
    output, pre_activations, activations = forward(collapsed, [1.0, -2.0])
    assert output == 1.0
    assert activations[0].tolist() == [1.0, 0.0]
    assert pre_activations[0].tolist() == [1.0, -2.0]
    with pytest.raises(ValueError, match="2 columns"):
        forward(collapsed, [1.0, 2.0, 3.0])


# test_forward_examples()


def test_forward_hand_net_and_hidden_features():
    net = hand_net()
    # S1 = (2, -1, -1) -> h1 = (2, 0, 0); S2 = (2, 0, 1) -> h2 = (2, 0, 1)
    output, _, activations = forward(net, [2.0, -1.0])
    assert activations[0].tolist() == [2.0, 0.0, 0.0]
    assert activations[1].tolist() == [2.0, 0.0, 1.0]
    assert output == pytest.approx(2.0 + 3.0 + 0.5)
    assert hidden_features(net, [2.0, -1.0]).tolist() == activations[1].tolist()
    # all negative layer 2 pre-activations
    negative = hand_net()
    negative.biases[1] = np.array([-100.0, -100.0, -100.0])
    assert not hidden_features(negative, [2.0, -1.0]).any()


# test_forward_hand_net_and_hidden_features()


def test_forward_batch_matches_single():
    net = init_mlp(activation="tanh", seed=3)
    batch = np.array([[0.1, -0.3], [1.5, 2.0], [-0.7, 0.2]])
    outputs = forward(net, batch)[0]
    assert outputs.shape == (3,)
    for row, value in zip(batch, outputs):
        assert forward(net, row)[0] == pytest.approx(value)


# test_forward_batch_matches_single()


def test_relu_positive_homogeneity():
    net = init_mlp(seed=5)
    x = np.array([0.4, -1.3])
    assert forward(net, 3.0 * x)[0] == pytest.approx(3.0 * forward(net, x)[0])


# test_relu_positive_homogeneity()


def test_cost_rmse_correlation():
    assert cost([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert cost([1.0], [0.0]) == 0.5
    assert cost([1.0, 3.0], [0.0, 2.0]) == 0.5
    assert rmse([1.0, 3.0], [0.0, 2.0]) == 1.0
    assert correlation([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]) == pytest.approx(1.0)
    assert math.isnan(correlation([1.0, 1.0], [1.0, 2.0]))
    with pytest.raises(ValueError, match="empty"):
        cost([], [])
    with pytest.raises(ValueError, match="does not match"):
        rmse([1.0, 2.0], [1.0])


# test_cost_rmse_correlation()


def test_backward_examples():
    net = hand_net()
    target = forward(net, [2.0, -1.0])[0]
    grad_w, grad_b = backward(net, [2.0, -1.0], target)
    assert all(not g.any() for g in grad_w + grad_b)

    zero = Mlp(
        [2, 3, 3, 1],
        weights=[np.zeros((3, 2)), np.zeros((3, 3)), np.zeros((1, 3))],
        biases=[np.zeros(3), np.zeros(3), np.zeros(1)],
    )
    grad_w, grad_b = backward(zero, [[1.0, 2.0], [3.0, 4.0]], [4.0, 2.0])
    assert grad_b[-1].tolist() == [-3.0]
    assert all(not g.any() for g in grad_w + grad_b[:-1])
    with pytest.raises(ValueError):
        backward(zero, [[1.0, 2.0]], [1.0, 2.0])


# test_backward_examples()


def _flat(net):
    return np.concatenate([p.ravel() for p in net.weights + net.biases])


def _assign(net, vector):
    offset = 0
    for p in net.weights + net.biases:
        p[...] = vector[offset : offset + p.size].reshape(p.shape)
        offset += p.size


def test_backward_matches_finite_differences():
    rng = np.random.default_rng(42)
    worst = 0.0
    for index in range(100):
        net = init_mlp(activation=("tanh", "sigmoid")[index % 2], seed=index)
        for b in net.biases:
            b[...] = rng.normal(0.0, 0.5, b.shape)
        x = rng.normal(0.0, 1.0, (5, 2))
        y = rng.normal(0.0, 1.0, 5)
        grad_w, grad_b = backward(net, x, y)
        analytic = np.concatenate([g.ravel() for g in grad_w + grad_b])
        theta = _flat(net)
        numeric = np.zeros_like(theta)
        for k in range(theta.size):
            for sign in (1.0, -1.0):
                shifted = theta.copy()
                shifted[k] += sign * 1e-5
                _assign(net, shifted)
                numeric[k] += sign * cost(forward(net, x)[0], y) / 2e-5
        _assign(net, theta)
        scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
        worst = max(worst, np.linalg.norm(analytic - numeric) / scale)
    assert worst < 1e-5


# test_backward_matches_finite_differences()


def test_optimizers_single_step():
    p = [np.array([1.0])]
    Sgd(0.1).step(p, [np.array([2.0])])
    assert p[0][0] == pytest.approx(0.8)
    p = [np.array([1.0])]
    Adam(0.1).step(p, [np.array([2.0])])
    assert p[0][0] == pytest.approx(0.9, abs=1e-7)
    p = [np.array([1.0])]
    RmsProp(0.01).step(p, [np.array([2.0])])
    assert p[0][0] == pytest.approx(1.0 - 0.02 / math.sqrt(0.4))


# test_optimizers_single_step()


def test_train_config():
    cfg = TrainConfig()
    assert cfg.epochs == 260
    assert cfg.lr == 0.2
    assert TrainConfig(optimizer="adam").lr == 0.01
    assert TrainConfig(optimizer="rmsprop").lr == 0.005
    assert TrainConfig(learning_rate=0.0).lr == 0.0
    with pytest.raises(ValueError, match="unsupported optimizer"):
        TrainConfig(optimizer="lbfgs")
    with pytest.raises(ValueError, match="epochs"):
        TrainConfig(epochs=0)
    with pytest.raises(ValueError, match="learning_rate"):
        TrainConfig(learning_rate=-1.0)


# test_train_config()


def test_train_zero_learning_rate_keeps_weights():
    net = init_mlp(seed=7)
    trained, history = train(net, linear_dataset(), TrainConfig(epochs=1, learning_rate=0.0))
    assert len(history) == 1
    assert all(np.array_equal(a, b) for a, b in zip(net.weights, trained.weights))
    assert trained is not net
    assert trained.target_std == pytest.approx(np.std(2.0 * linear_dataset().inputs[:, 0]))


# test_train_zero_learning_rate_keeps_weights()


def test_train_linear_target():
    rng = np.random.default_rng(3)
    exact = Mlp(
        [2, 3, 3, 1],
        weights=[
            [[1.0, 0.0], [-1.0, 0.0], [0.0, 0.0]],
            [[1.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 0.0]],
            [[1.0, -1.0, 0.0]],
        ],
        biases=[np.zeros(3), np.zeros(3), np.zeros(1)],
    )
    for p in exact.weights + exact.biases:
        p += rng.normal(0.0, 0.05, p.shape)
    data = linear_dataset()
    net, history = train(exact, data, TrainConfig(optimizer="sgd", activation="relu"))
    assert len(history) == 260
    assert [h[0] for h in history[:3]] == [1, 2, 3]
    assert history[-1][1] <= history[0][1]
    assert evaluate(net, data) < 1e-2
    assert correlation(predict(net, data.inputs), data.targets) > 0.999


# test_train_linear_target()


def test_train_is_deterministic():
    data = linear_dataset(100)
    cfg = TrainConfig(optimizer="adam", activation="tanh", epochs=20)
    a, history_a = train(init_mlp(activation="tanh", seed=2), data, cfg)
    b, history_b = train(init_mlp(activation="tanh", seed=2), data, cfg)
    assert history_a == history_b
    assert all(np.array_equal(x, y) for x, y in zip(a.weights, b.weights))


# test_train_is_deterministic()


def test_train_divergence():
    cfg = TrainConfig(optimizer="sgd", learning_rate=1e6, epochs=200)
    with pytest.raises(RuntimeError, match="divergence at epoch"):
        train(init_mlp(seed=0), linear_dataset(), cfg)


# test_train_divergence()


def test_hyperparameter_sweep_table():
    rows = hyperparameter_sweep(linear_dataset(200), epochs=5, seed=0)
    assert len(rows) == 9
    assert [(r["optimizer"], r["activation"]) for r in rows[:3]] == [
        ("sgd", "relu"),
        ("sgd", "sigmoid"),
        ("sgd", "tanh"),
    ]
    assert {r["optimizer"] for r in rows} == {"sgd", "adam", "rmsprop"}
    assert sum(r["best"] for r in rows) == 1
    best = [r for r in rows if r["best"]][0]
    assert best["rmse"] == min(r["rmse"] for r in rows)
    assert rows == hyperparameter_sweep(linear_dataset(200), epochs=5, seed=0, num_workers=3)


# test_hyperparameter_sweep_table()


def test_hyperparameter_sweep_single_row_and_divergence():
    # standardized single row is all zeros, matched by zero bias relu and tanh nets
    rows = hyperparameter_sweep(Dataset([[0.3, -20.0]], [1e6]), epochs=3)
    assert all(r["rmse"] == 0.0 for r in rows if r["activation"] != "sigmoid")
    rows = hyperparameter_sweep(
        linear_dataset(200), epochs=200, learning_rates={"sgd": 1e6}
    )
    assert all(math.isinf(r["rmse"]) for r in rows if r["optimizer"] == "sgd")
    assert all(math.isfinite(r["rmse"]) for r in rows if r["optimizer"] != "sgd")


# test_hyperparameter_sweep_single_row_and_divergence()


def test_dataset_validation_and_shuffle():
    with pytest.raises(ValueError, match="at least one row"):
        Dataset(np.zeros((0, 2)), [])
    with pytest.raises(ValueError, match="finite"):
        Dataset([[math.inf, 0.0]], [1.0])
    with pytest.raises(ValueError, match="do not match"):
        Dataset([[1.0, 0.0]], [1.0, 2.0])
    data = linear_dataset(50)
    a, b = data.shuffled(4), data.shuffled(4)
    assert np.array_equal(a.inputs, b.inputs)
    assert sorted(a.targets.tolist()) == sorted(data.targets.tolist())


# test_dataset_validation_and_shuffle()


def test_dataset_csv(tmp_path):
    data = linear_dataset(30)
    filename = str(tmp_path / "data" / "dataset.csv")
    assert save_dataset(data, filename) == 30
    with open(filename, encoding="utf-8") as f:
        assert f.readline() == "e,edot,f\n"
    loaded = load_dataset(filename)
    assert np.array_equal(loaded.inputs, data.inputs)
    assert np.array_equal(loaded.targets, data.targets)

    bad = tmp_path / "bad.csv"
    bad.write_text("x,y,z\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        load_dataset(str(bad))
    bad.write_text("e,edot,f\n1,2\n")
    with pytest.raises(ValueError, match="line 2 malformed"):
        load_dataset(str(bad))


# test_dataset_csv()


def test_model_json(tmp_path):
    net, _ = train(init_mlp(seed=1), linear_dataset(100), TrainConfig(epochs=5))
    filename = str(tmp_path / "model.json")
    save_model(net, filename)
    loaded = load_model(filename)
    x = linear_dataset(10, seed=9).inputs
    assert np.array_equal(predict(loaded, x), predict(net, x))
    assert loaded.activation == "relu"
    assert loaded.input_std.tolist() == net.input_std.tolist()

    broken = tmp_path / "broken.json"
    broken.write_text('{"layer_sizes": [2, 1]}')
    with pytest.raises(ValueError, match="missing keys"):
        load_model(str(broken))
    broken.write_text("{not json")
    with pytest.raises(ValueError, match="failed to parse"):
        load_model(str(broken))
    with pytest.raises(FileNotFoundError):
        load_model(str(tmp_path / "absent.json"))


# test_model_json()


def test_f_hat():
    head = AdaptiveHead([1.0, 2.0, 3.0])
    assert f_hat(head, [1.0, 1.0, 1.0]) == 6.0
    assert f_hat(head, [0.0, 0.0, 0.0]) == 0.0
    assert f_hat(AdaptiveHead([0.0, 0.0, 0.0]), [4.0, 5.0, 6.0]) == 0.0
    assert f_hat(AdaptiveHead([1.0, 2.0, 3.0], offset=10.0), [1.0, 1.0, 1.0]) == 16.0
    with pytest.raises(ValueError, match="expected 3 features"):
        f_hat(head, [1.0, 1.0])


# test_f_hat()


def test_adapt():
    head = adapt(AdaptiveHead([0.0, 0.0, 0.0], gain_gamma=1.0), 2.0, [1.0, 0.0, 0.5], 1e-3)
    assert head.weights_W_hat == pytest.approx([0.002, 0.0, 0.001])
    head = adapt(AdaptiveHead([1.0, 2.0, 3.0], gain_gamma=0.0), 2.0, [1.0, 1.0, 1.0], 1e-3)
    assert head.weights_W_hat.tolist() == [1.0, 2.0, 3.0]
    head = adapt(AdaptiveHead([1.0, 2.0, 3.0]), 0.0, [1.0, 1.0, 1.0], 1e-3)
    assert head.weights_W_hat.tolist() == [1.0, 2.0, 3.0]
    with pytest.raises(ValueError, match="dt_s"):
        adapt(AdaptiveHead([1.0, 2.0, 3.0]), 1.0, [1.0, 1.0, 1.0], 0.0)
    with pytest.raises(RuntimeError, match="non-finite"):
        adapt(AdaptiveHead([1.0, 2.0, 3.0]), math.inf, [1.0, 1.0, 1.0], 1e-3)
    with pytest.raises(ValueError, match="gain_gamma"):
        AdaptiveHead([1.0], gain_gamma=-1.0)


# test_adapt()


def test_adapt_projection():
    head = AdaptiveHead([0.6, 0.0], gain_gamma=1.0, w_max=1.0)
    adapt(head, 1.0, [1.0, 1.0], 1.0)
    assert np.linalg.norm(head.weights_W_hat) == pytest.approx(1.0)
    assert head.projection_count == 1


# test_adapt_projection()


def test_head_from_mlp_reproduces_prediction():
    net, _ = train(init_mlp(activation="tanh", seed=4), linear_dataset(100), TrainConfig(epochs=3))
    head = head_from_mlp(net, gain_gamma=5.0)
    for x in ([0.3, -20.0], [-0.8, 40.0]):
        sigma = hidden_features(net, standardize_inputs(net, x))
        assert f_hat(head, sigma) == pytest.approx(predict(net, x), rel=1e-12, abs=1e-12)
    assert head.gain_gamma == 5.0
    assert head.w_max == pytest.approx(10.0 * np.linalg.norm(head.weights_W_hat))
    cold = head_from_mlp(net, cold_start=True)
    assert not cold.weights_W_hat.any()
    assert cold.offset == head.offset
    assert math.isinf(head_from_mlp(net, w_max_ratio=None).w_max)


# test_head_from_mlp_reproduces_prediction()
