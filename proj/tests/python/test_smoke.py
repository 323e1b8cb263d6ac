import math

import numpy as np
import pytest

import koopcouple as kc


def harmonic():
    return kc.PolynomialVectorField(2, [[([0, 1], 1.0)], [([1, 0], -1.0)]])


def test_dictionary():
    d = kc.Dictionary(6, 3)
    assert len(d) == 84
    assert d.entries[0] == [0] * 6
    psi = kc.Dictionary(2, 3).evaluate(np.array([2.0, 1.0]))
    assert psi[kc.Dictionary(2, 3).index_of([2, 1])] == 4.0
    with pytest.raises(ValueError):
        d.evaluate(np.zeros(5))


def test_generator_and_local_koopman():
    gen = kc.build_generator(harmonic(), kc.Dictionary(2, 1))
    np.testing.assert_array_equal(gen.entries, [[0, 0, 0], [0, 0, -1], [0, 1, 0]])
    k = kc.local_koopman(gen, 0.01)
    c, s = math.cos(0.01), math.sin(0.01)
    np.testing.assert_allclose(k.matrix[1:, 1:], [[c, s], [-s, c]], rtol=1e-13)
    k_rk4 = kc.local_koopman(gen, 0.01, method="rk4")
    np.testing.assert_allclose(k.matrix, k_rk4.matrix, atol=1e-8)


def test_assembly_uncoupled():
    local = kc.local_koopman(kc.build_generator(harmonic(), kc.Dictionary(2, 3)), 0.01)
    seed = kc.assemble_global([local, local], [2, 2], kc.Dictionary(4, 3))
    assert seed.matrix.shape == (35, 35)
    x = np.array([0.3, -0.2, 0.5, 0.1])
    y = seed.advance(x)
    np.testing.assert_allclose(y[:2], local.advance(x[:2]), rtol=0, atol=1e-15)


def test_online_matches_ridge_and_batch():
    rng = np.random.default_rng(0)
    d = kc.Dictionary(2, 2)
    X = rng.uniform(-1, 1, size=(200, 2))
    Y = 0.9 * X + 0.1 * X**2
    online = kc.OnlineEdmd(d, None, 1e8)
    gammas = online.update_many(X, Y)
    assert online.count == 200
    assert all(0 < g <= 1 for g in gammas)
    batch = kc.batch_edmd(d, X, Y)
    assert not batch.rank_deficient
    err = np.linalg.norm(online.k - batch.model.matrix) / np.linalg.norm(batch.model.matrix)
    assert err < 1e-6
    with pytest.raises(ValueError):
        kc.OnlineEdmd(d, None, 0.0)


def test_spectral_prediction():
    model = kc.KoopmanModel(kc.Dictionary(1, 1), np.diag([1.0, 0.9]))
    dec = kc.decompose(model)
    assert not dec.defective
    assert kc.predict_n(dec, np.array([2.0]), 5)[0] == pytest.approx(2 * 0.9**5)
    p = kc.Predictor(model)
    assert p.spectral
    assert p.predict(np.array([2.0]), 3)[0] == pytest.approx(2 * 0.9**3)
    assert kc.relative_l2(np.array([3.0, 4.0]), np.array([3.0, 0.0])) == pytest.approx(0.8)

    jordan = kc.KoopmanModel(kc.Dictionary(2, 1), np.array([[1, 0, 0], [0, 0.9, 1], [0, 0, 0.9]]))
    with pytest.raises(kc.DefectiveDecomposition):
        kc.predict_one(kc.decompose(jordan), np.array([0.5, 1.0]))


def test_simulate_and_presets():
    traj = kc.simulate(harmonic(), np.array([1.0, 0.0]), 100, 0.01)
    assert traj.shape == (101, 2)
    assert traj[-1, 0] == pytest.approx(math.cos(1.0), abs=1e-9)
    cfg = kc.load_config("preset:duffing")
    seed = kc.derive_seed(cfg)
    assert seed.matrix.shape == (84, 84)
    cfg.train_length = 201
    cfg.test_count = 2
    cfg.test_length = 101
    train, tests = kc.generate_dataset(cfg, 1)
    assert train.shape == (201, 6)
    assert len(tests) == 2 and tests[0].shape == (101, 6)
