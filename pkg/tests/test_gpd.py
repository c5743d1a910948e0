import numpy as np
import pytest

from sparsebo.dataset import Dataset
from sparsebo.gp import GaussianProcess
from sparsebo.gpd import DerivativeGaussianProcess
from sparsebo.kernels import se_spec


def _dense_oracle(spec, X, y, Xg, G, noise, dn):
    """Independent scalar-loop construction of the augmented system."""
    t, d = X.shape
    t0 = Xg.shape[0]
    n = t + t0 * d

    def k(a, b):
        return spec.signal_variance * np.exp(
            -0.5 * np.sum(((a - b) / spec.lengthscales) ** 2)
        )

    def dk_dxp(a, b, g):  # d k(a,b) / d b_g
        return k(a, b) * (a[g] - b[g]) / spec.lengthscales[g] ** 2

    def d2k(a, b, g, h):  # d^2 k / d a_g d b_h
        inv2 = 1.0 / spec.lengthscales**2
        delta = (a - b) * inv2
        return k(a, b) * ((g == h) * inv2[g] - delta[g] * delta[h])

    K = np.zeros((n, n))
    for i in range(t):
        for j in range(t):
            K[i, j] = k(X[i], X[j])
        for j in range(t0):
            for h in range(d):
                K[i, t + j * d + h] = dk_dxp(X[i], Xg[j], h)
                K[t + j * d + h, i] = K[i, t + j * d + h]
    for i in range(t0):
        for g in range(d):
            for j in range(t0):
                for h in range(d):
                    K[t + i * d + g, t + j * d + h] = d2k(Xg[i], Xg[j], g, h)
    K += np.diag(np.concatenate([np.full(t, noise), np.full(t0 * d, dn)]))
    targets = np.concatenate([y, G.ravel()])
    w = np.linalg.solve(K, targets)

    def predict(Xs):
        ks = np.zeros((len(Xs), n))
        for s, xs in enumerate(Xs):
            for j in range(t):
                ks[s, j] = k(xs, X[j])
            for j in range(t0):
                for h in range(d):
                    ks[s, t + j * d + h] = dk_dxp(xs, Xg[j], h)
        mean = ks @ w
        var = spec.signal_variance - np.sum(ks * np.linalg.solve(K, ks.T).T, axis=1)
        return mean, var

    sign, logdet = np.linalg.slogdet(K)
    lml = -0.5 * targets @ w - 0.5 * logdet - 0.5 * n * np.log(2 * np.pi)
    return predict, lml


@pytest.fixture
def problem():
    rng = np.random.default_rng(0)
    X = rng.random((4, 2)) * 2
    y = np.sin(X[:, 0]) * np.cos(X[:, 1])
    G = np.stack(
        [np.cos(X[:, 0]) * np.cos(X[:, 1]), -np.sin(X[:, 0]) * np.sin(X[:, 1])], axis=1
    )
    Xs = rng.random((10, 2)) * 2
    return X, y, G, Xs


def test_matches_dense_oracle(problem):
    X, y, G, Xs = problem
    spec = se_spec(0.8, 1.0, dim=2)
    model = DerivativeGaussianProcess(spec, 0.01**2).fit(X, y, X, G)
    predict, lml = _dense_oracle(spec, X, y, X, G, 0.01**2, 1e-6)
    mean_o, var_o = predict(Xs)
    mean, var = model.predict(Xs, return_var=True)
    assert np.max(np.abs(mean - mean_o)) < 1e-8
    assert np.max(np.abs(var - var_o)) < 1e-8
    assert model.log_marginal_ == pytest.approx(lml, abs=1e-8)


def test_without_gradients_equals_plain_gp(problem):
    X, y, _, Xs = problem
    spec = se_spec(0.8, 1.0, dim=2)
    gp = GaussianProcess(spec, 0.01**2).fit(X, y)
    gpd = DerivativeGaussianProcess(spec, 0.01**2).fit(X, y)
    m1, v1 = gp.predict(Xs, return_var=True)
    m2, v2 = gpd.predict(Xs, return_var=True)
    assert np.allclose(m1, m2, atol=1e-12)
    assert np.allclose(v1, v2, atol=1e-12)


def test_gradient_observations_reduce_variance(problem):
    X, y, G, Xs = problem
    spec = se_spec(0.8, 1.0, dim=2)
    plain = DerivativeGaussianProcess(spec).fit(X, y)
    with_g = DerivativeGaussianProcess(spec).fit(X, y, X, G)
    _, v0 = plain.predict(Xs, return_var=True)
    _, v1 = with_g.predict(Xs, return_var=True)
    assert np.all(v1 <= v0 + 1e-10)


def test_posterior_mean_interpolates_gradients(problem):
    X, y, G, _ = problem
    spec = se_spec(0.8, 1.0, dim=2)
    model = DerivativeGaussianProcess(spec, 1e-10, deriv_noise=1e-10).fit(X, y, X, G)
    for i in range(len(X)):
        g = model.predict_gradient(X[i])
        assert np.allclose(g, G[i], atol=1e-3)


def test_fit_dataset_route(problem):
    X, y, G, Xs = problem
    spec = se_spec(0.8, 1.0, dim=2)
    data = Dataset(X, y, gradients={i: G[i] for i in range(len(X))})
    a = DerivativeGaussianProcess(spec).fit_dataset(data)
    b = DerivativeGaussianProcess(spec).fit(X, y, X, G)
    assert np.allclose(a.predict(Xs), b.predict(Xs), atol=1e-12)


def test_gradients_at_non_observation_points(problem):
    X, y, _, Xs = problem
    spec = se_spec(0.8, 1.0, dim=2)
    extra_X = Xs[:2]
    extra_G = np.stack(
        [
            np.cos(extra_X[:, 0]) * np.cos(extra_X[:, 1]),
            -np.sin(extra_X[:, 0]) * np.sin(extra_X[:, 1]),
        ],
        axis=1,
    )
    model = DerivativeGaussianProcess(spec).fit(X, y, extra_X, extra_G)
    assert model.predict(Xs).shape == (10,)
