import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mogpdr.mogp.gating import GatingParams, dp_prior, kernel_fractions, log_gating_kernel, redistribute


def test_prior_splits_mass_between_existing_and_new():
    labels = np.array([0, 0, 1, 1])
    log_k = np.zeros(4)
    existing, new = dp_prior(log_k, labels, 2, GatingParams(concentration=1.0))
    assert np.allclose(existing, [0.4, 0.4])
    assert new == pytest.approx(0.2)


def test_held_out_point_is_ignored():
    labels = np.array([0, 1, 1])
    log_k = np.array([-np.inf, 0.0, 0.0])
    existing, new = dp_prior(log_k, labels, 2, GatingParams(concentration=2.0))
    assert existing[0] == 0.0
    assert existing[1] == pytest.approx(0.5) and new == pytest.approx(0.5)


def test_nearby_points_dominate():
    inputs = np.array([[0.0], [0.1], [5.0]])
    labels = np.array([0, 0, 1])
    frac = kernel_fractions(log_gating_kernel(np.array([0.05]), inputs, 1.0), labels, 2)
    assert frac[0] > 0.99


@settings(max_examples=50, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=12),
    width=st.floats(min_value=0.1, max_value=5.0),
    alpha=st.floats(min_value=0.05, max_value=10.0),
    seed=st.integers(min_value=0, max_value=2**16),
)
def test_gating_weights_form_a_probability_vector(n, width, alpha, seed):
    rng = np.random.default_rng(seed)
    inputs = rng.uniform(-3.0, 3.0, size=(n, 2))
    labels = np.arange(n) % 3
    m = int(labels.max()) + 1
    log_k = log_gating_kernel(rng.uniform(-3.0, 3.0, size=2), inputs, width)
    existing, new = dp_prior(log_k, labels, m, GatingParams(kernel_width=width, concentration=alpha))
    assert np.all(existing >= 0.0) and new > 0.0
    assert existing.sum() + new == pytest.approx(1.0)
    gamma = redistribute(existing, new)
    assert np.all(gamma >= 0.0)
    assert gamma.sum() == pytest.approx(1.0)
