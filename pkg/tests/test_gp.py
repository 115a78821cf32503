import numpy as np
import pytest

from mogpdr.errors import GPConditioningError
from mogpdr.mogp.gp import GPCache, KernelParams, fit_hyperparameters, gp_posterior, log_marginal_likelihood


def _dense_posterior(x, y, params, q):
    ell = np.asarray(params.lengthscales)

    def k(a, b):
        d = ((a[:, None, :] - b[None, :, :]) / ell) ** 2
        return params.signal_variance * np.exp(-0.5 * d.sum(axis=2))

    kinv = np.linalg.inv(k(x, x) + params.noise_variance * np.eye(len(y)))
    ks = k(q[None, :], x)[0]
    return ks @ kinv @ y, params.signal_variance - ks @ kinv @ ks


def test_posterior_matches_dense_formula():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n, d = int(rng.integers(1, 51)), int(rng.integers(1, 4))
        params = KernelParams(
            lengthscales=rng.uniform(0.3, 2.0, size=d).tolist(),
            signal_variance=float(rng.uniform(0.1, 2.0)),
            noise_variance=float(rng.uniform(0.01, 0.1)),
        )
        x = rng.uniform(-2.0, 2.0, size=(n, d))
        y = rng.normal(size=n)
        q = rng.uniform(-2.0, 2.0, size=d)
        mean, var = gp_posterior(x, y, params, q)
        ref_mean, ref_var = _dense_posterior(x, y, params, q)
        assert mean == pytest.approx(ref_mean, rel=1e-9, abs=1e-12)
        assert var == pytest.approx(ref_var, rel=1e-9, abs=1e-12)


def test_no_data_returns_prior():
    params = KernelParams(lengthscales=[1.0], signal_variance=0.7, noise_variance=0.01)
    mean, var = gp_posterior(np.empty((0, 1)), np.empty(0), params, np.array([0.3]))
    assert mean == 0.0 and var == pytest.approx(0.7)


def test_noise_free_interpolation():
    params = KernelParams(lengthscales=[1.0], signal_variance=1.0, noise_variance=0.0)
    x = np.array([[-1.0], [0.5], [2.0]])
    y = np.array([0.2, -0.4, 1.1])
    mean, var = gp_posterior(x, y, params, np.array([0.5]))
    assert mean == pytest.approx(-0.4, abs=1e-8)
    assert var == pytest.approx(0.0, abs=1e-8)


def test_duplicate_inputs_without_noise_fail_to_condition():
    params = KernelParams(lengthscales=[1.0], signal_variance=1.0, noise_variance=0.0)
    with pytest.raises(GPConditioningError):
        GPCache.condition(np.array([[0.0], [0.0]]), np.array([1.0, 2.0]), params)


def test_lml_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    x = rng.uniform(-1.0, 1.0, size=(15, 2))
    y = np.sin(2.0 * x[:, 0]) + 0.1 * rng.normal(size=15)
    params = KernelParams(lengthscales=[0.7, 1.3], signal_variance=0.8, noise_variance=0.05)
    _, grad = log_marginal_likelihood(x, y, params, with_gradient=True)
    theta = params.to_log_vector()
    h = 1e-6
    for i in range(theta.size):
        up, dn = theta.copy(), theta.copy()
        up[i] += h
        dn[i] -= h
        fd = (
            log_marginal_likelihood(x, y, KernelParams.from_log_vector(up))
            - log_marginal_likelihood(x, y, KernelParams.from_log_vector(dn))
        ) / (2 * h)
        assert grad[i] == pytest.approx(fd, rel=1e-4, abs=1e-6)


def test_refit_does_not_lower_lml():
    rng = np.random.default_rng(11)
    x = rng.uniform(0.0, 3.0, size=(30, 1))
    y = 0.3 * np.sin(3.0 * x[:, 0]) + 0.05 * rng.normal(size=30)
    init = KernelParams(lengthscales=[3.0], signal_variance=1.0, noise_variance=0.5)
    fitted = fit_hyperparameters(x, y, init)
    assert log_marginal_likelihood(x, y, fitted) >= log_marginal_likelihood(x, y, init)


def test_kernel_params_validation():
    with pytest.raises(ValueError):
        KernelParams(lengthscales=[], signal_variance=1.0, noise_variance=0.1)
    with pytest.raises(ValueError):
        KernelParams(lengthscales=[1.0], signal_variance=0.0, noise_variance=0.1)
    p = KernelParams(lengthscales=[2.0], signal_variance=1.0, noise_variance=0.1).for_dim(3)
    assert p.lengthscales == [2.0, 2.0, 2.0]


def test_posterior_variance_never_exceeds_prior():
    rng = np.random.default_rng(19)
    for _ in range(30):
        n = int(rng.integers(1, 30))
        params = KernelParams(
            lengthscales=[float(rng.uniform(0.2, 2.0))] * 2,
            signal_variance=float(rng.uniform(0.1, 1.5)),
            noise_variance=float(rng.uniform(1e-4, 0.1)),
        )
        cache = GPCache.condition(rng.uniform(-2.0, 2.0, size=(n, 2)), rng.normal(size=n), params)
        _, var = cache.predict(rng.uniform(-3.0, 3.0, size=(40, 2)))
        assert np.all(var >= 0.0)
        assert np.all(var <= params.signal_variance + 1e-12)
