import numpy as np
import pytest

from sparsebo.kernels import (
    KernelFamily,
    KernelSpec,
    UnsupportedKernel,
    augmented_gram,
    cross_grad_grad,
    cross_value_grad,
    grad_block,
    grad_diag,
    hess_block,
    kernel_diag,
    kernel_eval,
    kernel_matrix,
    se_spec,
)


def _se(spec, x, x2):
    d2 = np.sum(((x - x2) / spec.lengthscales) ** 2)
    return spec.signal_variance * np.exp(-0.5 * d2)


def test_se_matrix_matches_scalar_formula():
    rng = np.random.default_rng(0)
    spec = se_spec([0.7, 1.3], 1.8)
    X = rng.random((6, 2))
    X2 = rng.random((4, 2))
    K = kernel_matrix(spec, X, X2)
    for i in range(6):
        for j in range(4):
            assert K[i, j] == pytest.approx(_se(spec, X[i], X2[j]), abs=1e-14)


def test_kernel_diag_and_symmetry():
    spec = se_spec(0.5, 2.0, dim=3)
    X = np.random.default_rng(1).random((5, 3))
    K = kernel_matrix(spec, X)
    assert np.allclose(K, K.T)
    assert np.allclose(np.diag(K), kernel_diag(spec, X))
    assert np.allclose(kernel_diag(spec, X), 2.0)


def test_matern32_value():
    spec = KernelSpec(KernelFamily.MATERN32, np.array([1.0]), 1.0)
    r = np.sqrt(3.0) * 0.5
    expected = (1 + r) * np.exp(-r)
    assert kernel_eval(spec, [0.0], [0.5]) == pytest.approx(expected, rel=1e-12)


def test_polynomial_kernel():
    spec = KernelSpec(KernelFamily.POLYNOMIAL, np.ones(2), poly_degree=3, poly_offset=0.25)
    x, x2 = np.array([1.0, 2.0]), np.array([0.5, -1.0])
    assert kernel_eval(spec, x, x2) == pytest.approx((0.25 + 0.5 - 2.0) ** 3)


def test_infinite_lengthscale_drops_dimension():
    spec = se_spec([1.0, np.inf], 1.0)
    a = kernel_eval(spec, [0.0, 0.0], [0.5, 100.0])
    b = kernel_eval(spec, [0.0, 0.0], [0.5, -3.0])
    assert a == pytest.approx(b, rel=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        se_spec(-1.0)
    with pytest.raises(ValueError):
        se_spec(1.0, signal_variance=0.0)
    with pytest.raises(ValueError):
        KernelSpec(KernelFamily.POLYNOMIAL, np.ones(1), poly_degree=0)


def test_derivative_blocks_need_se():
    spec = KernelSpec(KernelFamily.MATERN32, np.ones(2))
    with pytest.raises(UnsupportedKernel):
        grad_block(spec, np.zeros(2), np.ones(2))
    with pytest.raises(UnsupportedKernel):
        cross_grad_grad(spec, np.zeros((1, 2)), np.zeros((1, 2)))


def test_grad_block_matches_finite_differences():
    rng = np.random.default_rng(2)
    spec = se_spec([0.6, 1.1, 0.9], 1.4)
    eps = 1e-6
    for _ in range(40):
        x, x2 = rng.random(3), rng.random(3)
        g = grad_block(spec, x, x2)
        for k in range(3):
            e = np.zeros(3)
            e[k] = eps
            fd = (kernel_eval(spec, x, x2 + e) - kernel_eval(spec, x, x2 - e)) / (2 * eps)
            assert g[k] == pytest.approx(fd, abs=1e-8)


def test_hess_block_matches_finite_differences():
    rng = np.random.default_rng(3)
    spec = se_spec([0.8, 1.2], 2.0)
    eps = 1e-4
    for _ in range(40):
        x, x2 = rng.random(2), rng.random(2)
        H = hess_block(spec, x, x2)
        for g in range(2):
            for h in range(2):
                eg, eh = np.zeros(2), np.zeros(2)
                eg[g], eh[h] = eps, eps
                fd = (
                    kernel_eval(spec, x + eg, x2 + eh)
                    - kernel_eval(spec, x + eg, x2 - eh)
                    - kernel_eval(spec, x - eg, x2 + eh)
                    + kernel_eval(spec, x - eg, x2 - eh)
                ) / (4 * eps**2)
                assert H[g, h] == pytest.approx(fd, abs=1e-6)


def test_cross_blocks_match_scalar_blocks():
    rng = np.random.default_rng(4)
    spec = se_spec([0.9, 0.7], 1.3)
    X = rng.random((3, 2))
    Xg = rng.random((2, 2))
    C = cross_value_grad(spec, X, Xg)
    assert C.shape == (3, 4)
    for i in range(3):
        for j in range(2):
            assert np.allclose(C[i, 2 * j : 2 * j + 2], grad_block(spec, X[i], Xg[j]))
    G = cross_grad_grad(spec, Xg, Xg)
    assert G.shape == (4, 4)
    for i in range(2):
        for j in range(2):
            blk = G[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
            assert np.allclose(blk, hess_block(spec, Xg[i], Xg[j]))


def test_grad_diag_matches_hess_diagonal():
    spec = se_spec([0.5, 2.0], 1.7)
    Xg = np.random.default_rng(5).random((3, 2))
    diag = grad_diag(spec, Xg)
    full = cross_grad_grad(spec, Xg, Xg)
    assert np.allclose(diag, np.diag(full))


def test_augmented_gram_is_symmetric_psd():
    rng = np.random.default_rng(6)
    spec = se_spec(0.8, 1.0, dim=2)
    X, Xg = rng.random((4, 2)), rng.random((3, 2))
    K = augmented_gram(spec, X, Xg)
    assert K.shape == (10, 10)
    assert np.allclose(K, K.T, atol=1e-12)
    w = np.linalg.eigvalsh(K)
    assert w.min() > -1e-10
