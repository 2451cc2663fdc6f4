import math

import numpy as np
import pytest

from klr_hopfield.dynamics import NetworkState, local_fields
from klr_hopfield.kernel import KernelParams, PatternSet, gram_matrix
from klr_hopfield.training import (
    TrainConfig,
    TrainingDiverged,
    klr_gradient,
    klr_loss,
    sigmoid,
    target_bits,
    train_network,
    train_neuron,
)


def brute_loss(alpha, gram, y, lam):
    p = len(alpha)
    total = 0.0
    for nu in range(p):
        h = sum(gram[nu][mu] * alpha[mu] for mu in range(p))
        sig = 1.0 / (1.0 + math.exp(-h))
        total -= y[nu] * math.log(max(sig, 1e-12)) + (1 - y[nu]) * math.log(max(1 - sig, 1e-12))
    reg = sum(alpha[a] * gram[a][b] * alpha[b] for a in range(p) for b in range(p))
    return total + 0.5 * lam * reg


def random_instance(rng, p, n=12, gamma=0.1):
    ps = PatternSet.random(n, p, rng)
    gram = gram_matrix(ps, KernelParams(gamma))
    y = rng.integers(0, 2, p).astype(float)
    alpha = rng.normal(scale=2.0, size=p)
    return alpha, gram, y


def test_sigmoid_values():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(2.0) == pytest.approx(0.880797077977882444, rel=1e-15)
    z = np.linspace(-700, 700, 201)
    np.testing.assert_allclose(sigmoid(z), 1 - sigmoid(-z), atol=1e-15)
    assert np.all(np.isfinite(sigmoid(np.array([-700.0, 700.0]))))


def test_loss_at_zero_is_p_log2(rng):
    _, gram, y = random_instance(rng, 7)
    assert klr_loss(np.zeros(7), gram, y, 0.01) == pytest.approx(7 * math.log(2), rel=1e-14)


def test_loss_single_term():
    for a in (-3.0, 0.2, 5.0):
        assert klr_loss([a], [[1.0]], [1.0], 0.0) == pytest.approx(-math.log(1 / (1 + math.exp(-a))), rel=1e-13)


@pytest.mark.parametrize("p", [2, 5])
def test_loss_matches_straight_line_oracle(p, rng):
    alpha, gram, y = random_instance(rng, p)
    assert klr_loss(alpha, gram, y, 0.03) == pytest.approx(brute_loss(alpha, gram.tolist(), y, 0.03), abs=1e-12)


def test_loss_rejects_non_finite():
    with pytest.raises(FloatingPointError):
        klr_loss([np.inf], [[1.0]], [1.0], 0.01)


def test_gradient_at_zero(rng):
    _, gram, y = random_instance(rng, 6)
    np.testing.assert_allclose(klr_gradient(np.zeros(6), gram, y, 0.01), gram @ (0.5 - y), atol=1e-15)


def test_gradient_vanishes_at_stationarity(rng):
    alpha, gram, _ = random_instance(rng, 5)
    y = sigmoid(gram @ alpha)
    np.testing.assert_allclose(klr_gradient(alpha, gram, y, 0.0), 0.0, atol=1e-14)


def central_difference(alpha, gram, y, lam, step=1e-5):
    out = np.empty_like(alpha)
    for k in range(len(alpha)):
        e = np.zeros_like(alpha)
        e[k] = step
        out[k] = (klr_loss(alpha + e, gram, y, lam) - klr_loss(alpha - e, gram, y, lam)) / (2 * step)
    return out


@pytest.mark.parametrize("seed", range(5))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    alpha, gram, y = random_instance(rng, int(rng.integers(2, 11)), gamma=0.05)
    grad = klr_gradient(alpha, gram, y, 0.01)
    fd = central_difference(alpha, gram, y, 0.01)
    rel = np.abs(grad - fd) / np.maximum(np.abs(fd), 1e-8)
    assert rel.max() < 1e-5


def test_single_pattern_matches_scalar_iteration():
    a = 0.0
    for _ in range(500):
        a -= 0.1 * (1 / (1 + math.exp(-a)) - 1.0 + 0.01 * a)
    alpha = train_neuron([[1.0]], [1.0])
    assert alpha[0] > 0
    assert alpha[0] == pytest.approx(a, rel=1e-12)


def test_loss_non_increasing(rng):
    ps = PatternSet.random(50, 150, rng)
    gram = gram_matrix(ps, KernelParams(0.1))
    y = target_bits(ps)[:, 3]
    alpha = np.zeros(150)
    losses = [klr_loss(alpha, gram, y, 0.01)]
    for _ in range(500):
        alpha = alpha - 0.1 * klr_gradient(alpha, gram, y, 0.01)
        losses.append(klr_loss(alpha, gram, y, 0.01))
    assert np.all(np.diff(losses) <= 1e-12)
    np.testing.assert_allclose(train_neuron(gram, y), alpha, rtol=1e-12, atol=1e-12)


def test_label_flip_negates_alpha(rng):
    ps = PatternSet.random(20, 30, rng)
    gram = gram_matrix(ps, KernelParams(0.1))
    y = target_bits(ps)[:, 0]
    np.testing.assert_allclose(train_neuron(gram, 1 - y), -train_neuron(gram, y), atol=1e-12)


def test_single_pattern_signs(rng):
    ps = PatternSet.random(30, 1, rng)
    w = train_network(ps)
    assert np.array_equal(np.sign(w.alpha[0]), ps.patterns[0])


def test_network_columns_match_single_neurons(rng):
    ps = PatternSet.random(15, 20, rng)
    w = train_network(ps)
    gram = gram_matrix(ps, KernelParams())
    y = target_bits(ps)
    for i in reversed(range(15)):
        np.testing.assert_allclose(w.alpha[:, i], train_neuron(gram, y[:, i], neuron=i), rtol=1e-12, atol=1e-12)


def test_training_deterministic():
    ps = PatternSet.random(30, 60, np.random.default_rng(5))
    a = train_network(ps).alpha
    b = train_network(PatternSet.random(30, 60, np.random.default_rng(5))).alpha
    assert np.array_equal(a, b)


def test_stored_patterns_fit(default_net):
    w = default_net
    for xi in w.patterns.patterns:
        h = local_fields(w, NetworkState(w, xi))
        assert np.all(np.where(h >= 0, 1, -1) == xi)


def test_divergence_names_neuron():
    # a huge step on an indefinite "gram" blows up
    gram = np.array([[1.0, 0.0], [0.0, -50.0]])
    with pytest.raises(TrainingDiverged, match="neuron 4") as info:
        train_neuron(gram, [1.0, 0.0], TrainConfig(learning_rate=10.0, iterations=500), neuron=4)
    assert info.value.neuron == 4


@pytest.mark.parametrize("kwargs", [dict(learning_rate=0), dict(weight_decay=-1), dict(iterations=0)])
def test_train_config_validation(kwargs):
    with pytest.raises(ValueError):
        TrainConfig(**kwargs)


def test_defaults():
    cfg = TrainConfig()
    assert (cfg.learning_rate, cfg.weight_decay, cfg.iterations) == (0.1, 0.01, 500)
