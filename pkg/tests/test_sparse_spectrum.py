import numpy as np
import pytest

from sparsebo.gp import GaussianProcess
from sparsebo.kernels import se_spec
from sparsebo.sparse_spectrum import (
    GMDEstimate,
    SparseSpectrumGP,
    SpectrumBasis,
    dense_log_marginal,
    fit_rssgp,
    gmd_ei_proxy,
    gmd_smc,
    gmd_thompson,
    histogram_pmf,
    knn_entropy,
    make_grid,
    optimize_frequencies,
    pmf_entropy,
    sample_frequencies_se,
    total_variation,
)


@pytest.fixture
def problem():
    rng = np.random.default_rng(0)
    X = rng.uniform(-3, 3, (15, 1))
    y = np.sin(2 * X[:, 0]) + rng.normal(0, 0.01, 15)
    return X, y


def test_feature_norm_is_exactly_m():
    spec = se_spec(0.5, 2.0)
    basis = sample_frequencies_se(spec, 12, seed=0)
    phi = basis.features(np.array([[0.3], [-1.7]]))
    assert phi.shape == (2, 24)
    assert np.allclose(np.sum(phi * phi, axis=1), 12.0, atol=1e-12)


def test_frequency_sampling_scale():
    spec = se_spec(0.5, 1.0)
    basis = sample_frequencies_se(spec, 4000, seed=1)
    # spectral density of the SE kernel: std 1/(2 pi rho) per dimension
    assert basis.frequencies.std() == pytest.approx(1 / (2 * np.pi * 0.5), rel=0.05)


def test_log_marginal_matches_dense_gaussian_density(problem):
    X, y = problem
    spec = se_spec(0.5, 2.0)
    for m in (5, 20):
        model = SparseSpectrumGP(spec, sample_frequencies_se(spec, m, seed=2)).fit(X, y)
        # independent dense oracle: N(y; 0, (sf2/m) Phi^T Phi + sn2 I)
        phi = model.basis.features(X)
        C = (2.0 / m) * phi @ phi.T + model.noise_variance * np.eye(len(y))
        sign, logdet = np.linalg.slogdet(C)
        lml = (
            -0.5 * y @ np.linalg.solve(C, y)
            - 0.5 * logdet
            - 0.5 * len(y) * np.log(2 * np.pi)
        )
        assert model.log_marginal_ == pytest.approx(lml, abs=1e-6)
        assert dense_log_marginal(model, X, y) == pytest.approx(lml, abs=1e-6)


def test_predictions_match_dense_woodbury_oracle(problem):
    X, y = problem
    spec = se_spec(0.5, 2.0)
    model = SparseSpectrumGP(spec, sample_frequencies_se(spec, 10, seed=3)).fit(X, y)
    Xs = np.linspace(-3, 3, 17)[:, None]
    phi = model.basis.features(X)
    phis = model.basis.features(Xs)
    C = (2.0 / 10) * phi @ phi.T + model.noise_variance * np.eye(len(y))
    cross = (2.0 / 10) * phis @ phi.T
    mean_o = cross @ np.linalg.solve(C, y)
    var_o = (
        (2.0 / 10) * np.sum(phis * phis, axis=1)
        + model.noise_variance
        - np.sum(cross * np.linalg.solve(C, cross.T).T, axis=1)
    )
    mean, var = model.predict(Xs, return_var=True)
    assert np.max(np.abs(mean - mean_o)) < 1e-8
    assert np.max(np.abs(var - var_o)) < 1e-8


def test_ssgp_converges_to_gp_with_many_features(problem):
    X, y = problem
    spec = se_spec(0.5, 2.0)
    gp = GaussianProcess(spec, 0.01**2).fit(X, y)
    model = SparseSpectrumGP(spec, sample_frequencies_se(spec, 3000, seed=4)).fit(X, y)
    Xs = np.linspace(-3, 3, 25)[:, None]
    assert np.max(np.abs(gp.predict(Xs) - model.predict(Xs))) < 0.05


def test_optimize_frequencies_never_worse(problem):
    X, y = problem
    spec = se_spec(0.5, 2.0)
    basis = sample_frequencies_se(spec, 8, seed=5)
    start = SparseSpectrumGP(spec, basis).fit(X, y).log_marginal_
    model, _ = optimize_frequencies(spec, X, y, basis, maxiter=40)
    assert model.log_marginal_ >= start - 1e-9


def test_weight_posterior_sampling_moments(problem):
    X, y = problem
    spec = se_spec(0.5, 2.0)
    model = SparseSpectrumGP(spec, sample_frequencies_se(spec, 6, seed=6)).fit(X, y)
    W = model.sample_weights(4000, np.random.default_rng(0))
    assert np.max(np.abs(W.mean(axis=1) - model.weights_)) < 0.05


def test_posterior_moments_agree_with_predict(problem):
    X, y = problem
    spec = se_spec(0.5, 2.0)
    model = SparseSpectrumGP(spec, sample_frequencies_se(spec, 9, seed=7)).fit(X, y)
    Xs = np.linspace(-2, 2, 11)[:, None]
    mean, cov = model.posterior_moments(Xs)
    m2, v2 = model.predict(Xs, return_var=True)
    assert np.allclose(mean, m2, atol=1e-12)
    # predictive variance includes the observation noise
    assert np.allclose(np.diag(cov) + model.noise_variance, v2, atol=1e-10)


def test_make_grid_and_histogram_helpers():
    grid = make_grid([[0.0, 1.0]], size=64)
    assert grid.shape == (64, 1)
    pts = np.random.default_rng(0).random((500, 1))
    pmf, edges = histogram_pmf(pts, [[0.0, 1.0]])
    assert pmf.sum() == pytest.approx(1.0)
    assert pmf_entropy(pmf) > 3.0  # near-uniform over 50 bins -> close to log 50


def test_knn_entropy_close_to_gaussian_reference():
    pts = np.random.default_rng(1).standard_normal((4000, 4))
    h = knn_entropy(pts)
    analytic = 4 * 0.5 * np.log(2 * np.pi * np.e)
    assert h == pytest.approx(analytic, abs=0.15)


def test_total_variation():
    p = np.array([0.5, 0.5, 0.0])
    q = np.array([0.0, 0.5, 0.5])
    assert total_variation(p, q) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        total_variation(p, np.ones(2))


def test_gmd_thompson_concentrates_on_known_maximum():
    rng = np.random.default_rng(2)
    X = np.linspace(-3, 3, 40)[:, None]
    y = -((X[:, 0] - 1.0) ** 2)
    spec = se_spec(1.0, 4.0)
    gp = GaussianProcess(spec, 1e-6).fit(X, y)
    est = gmd_thompson(gp, [[-3.0, 3.0]], n_samples=500, seed=0)
    assert isinstance(est, GMDEstimate)
    assert abs(np.median(est.points) - 1.0) < 0.2
    assert est.entropy < 2.0


def test_gmd_smc_close_to_thompson_on_smooth_posterior():
    rng = np.random.default_rng(3)
    X = rng.uniform(-3, 3, (12, 1))
    y = np.sin(X[:, 0])
    spec = se_spec(0.7, 1.0)
    gp = GaussianProcess(spec, 0.01**2).fit(X, y)
    ref = gmd_thompson(gp, [[-3.0, 3.0]], n_samples=20000, seed=1)
    smc = gmd_smc(gp, [[-3.0, 3.0]], n_particles=300, n_challengers=40, rounds=8, seed=2)
    assert total_variation(smc.pmf, ref.pmf) < 0.25


def test_gmd_ei_proxy_flat_fallback(problem):
    X, y = problem
    spec = se_spec(0.5, 2.0)
    model = SparseSpectrumGP(spec, sample_frequencies_se(spec, 20, seed=8)).fit(X, y)
    est = gmd_ei_proxy(model, [[-3.0, 3.0]], incumbent=float(np.max(y)))
    assert est.pmf.sum() == pytest.approx(1.0)
    # an absurdly high incumbent gives no improvement anywhere -> flat pmf
    flat = gmd_ei_proxy(model, [[-3.0, 3.0]], incumbent=1e9)
    assert flat.entropy > est.entropy


def test_rssgp_loss_never_below_start(problem):
    X, y = problem
    spec = se_spec(0.5, 2.0)
    basis = sample_frequencies_se(spec, 10, seed=9)
    model, loss = fit_rssgp(
        spec, X, y, basis, [[-3.0, 3.0]], lam=10.0, estimator="ei", seed=0, iters=10
    )
    start = SparseSpectrumGP(spec, basis).fit(X, y)
    assert isinstance(model, SparseSpectrumGP)
    assert np.isfinite(loss)
