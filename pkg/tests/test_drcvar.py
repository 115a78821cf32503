import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mogpdr.drcvar.ambiguity import (
    AmbiguityComponent,
    AmbiguitySet,
    TighteningOffsets,
    ambiguity_from_prediction,
    cvar_empirical,
)
from mogpdr.drcvar.socp import build_offsets, worst_case_cvar_offset
from mogpdr.errors import AmbiguitySetError
from mogpdr.geometry.sets import Box
from mogpdr.mogp.model import MixtureComponent, MixturePrediction


def _single(mean, var, lo, up):
    return AmbiguitySet((AmbiguityComponent(1.0, mean, var, lo, up),))


def test_cvar_empirical_examples():
    samples = np.arange(1.0, 11.0)
    assert cvar_empirical(samples, 0.2) == pytest.approx(9.5)
    assert cvar_empirical(samples, 1.0) == pytest.approx(5.5)
    assert cvar_empirical([0.7] * 9, 0.3) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        cvar_empirical(samples, 0.0)


def test_point_mass_offsets():
    assert worst_case_cvar_offset(_single(0.0, 0.0, 0.0, 0.0), 0.2) == pytest.approx(0.0, abs=1e-6)
    assert worst_case_cvar_offset(_single(0.3, 0.0, 0.3, 0.3), 0.2) == pytest.approx(0.3, abs=1e-6)


@pytest.mark.parametrize("mean", [0.0, 0.3, -0.5, 0.8])
def test_zero_variance_on_wide_support_is_the_mean(mean):
    assert worst_case_cvar_offset(_single(mean, 0.0, -0.8, 0.8), 0.2) == pytest.approx(mean, abs=1e-6)
    assert worst_case_cvar_offset(_single(mean, 0.0, -0.8, 0.8).mirrored(), 0.2) == pytest.approx(-mean, abs=1e-6)


def test_zero_variance_mixture_is_the_discrete_cvar():
    # atoms 0.5 (weight 0.1) and -0.2 (weight 0.9): the top 20% averages 0.5 and -0.2 equally
    aset = AmbiguitySet(
        (AmbiguityComponent(0.1, 0.5, 0.0, -0.8, 0.8), AmbiguityComponent(0.9, -0.2, 0.0, -0.8, 0.8))
    )
    assert worst_case_cvar_offset(aset, 0.2) == pytest.approx(0.15, abs=1e-6)


def test_tiny_variance_is_floored_not_rejected():
    eta = worst_case_cvar_offset(_single(0.1, 1e-12, -0.8, 0.8), 0.2)
    assert 0.1 - 1e-6 <= eta <= 0.1 + 1e-3


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, 0.5])
def test_mean_variance_closed_form_on_wide_support(eps):
    sigma = 0.1
    expected = sigma * np.sqrt((1.0 - eps) / eps)
    # the worst-case two-point law sits at mean + sigma*sqrt((1-eps)/eps), inside [-2.5, 2.5]
    eta = worst_case_cvar_offset(_single(0.0, sigma**2, -2.5, 2.5), eps)
    assert eta == pytest.approx(expected, abs=1e-3)


def test_closed_form_at_twenty_percent():
    assert worst_case_cvar_offset(_single(0.0, 0.01, -0.8, 0.8), 0.2) == pytest.approx(0.2, abs=1e-4)


def test_invalid_components_rejected():
    with pytest.raises(AmbiguitySetError):
        _single(0.9, 0.0, -0.5, 0.5)
    with pytest.raises(AmbiguitySetError):
        AmbiguitySet((AmbiguityComponent(0.4, 0.0, 0.0, -1.0, 1.0),))
    with pytest.raises(AmbiguitySetError):
        _single(0.0, -0.1, -1.0, 1.0)


def test_offsets_must_be_finite():
    with pytest.raises(AmbiguitySetError):
        TighteningOffsets([0.0, np.inf], [0.0, 0.0])


def test_zero_prediction_gives_zero_offsets():
    pred = MixturePrediction.degenerate(np.zeros(2))
    off = build_offsets(pred, Box.symmetric(0.8, 2), 0.2)
    assert np.allclose(off.eta_lower, 0.0, atol=1e-6) and np.allclose(off.eta_upper, 0.0, atol=1e-6)


def test_symmetric_mixture_gives_equal_sides():
    comps = (MixtureComponent(0.5, 0.3, 0.01), MixtureComponent(0.5, -0.3, 0.01))
    pred = MixturePrediction((comps,))
    off = build_offsets(pred, Box([-0.8], [0.8]), 0.2)
    assert off.eta_lower[0] == pytest.approx(off.eta_upper[0], abs=1e-6)


def test_offset_bounded_by_support():
    comps = (MixtureComponent(0.7, 0.5, 0.02), MixtureComponent(0.3, -0.4, 0.05))
    pred = MixturePrediction((comps,))
    off = build_offsets(pred, Box([-0.8], [0.8]), 0.05)
    assert off.eta_upper[0] <= 0.8 + 1e-6 and off.eta_lower[0] <= 0.8 + 1e-6


def test_prediction_means_are_clamped_into_support():
    pred = MixturePrediction(((MixtureComponent(1.0, 1.5, 0.01),),))
    aset = ambiguity_from_prediction(pred, 0, Box([-0.8], [0.8]))
    assert aset.components[0].mean == 0.8


def test_dominates_sampled_mixture_cvar():
    rng = np.random.default_rng(0)
    weights, means, var = np.array([0.6, 0.4]), np.array([0.3, -0.3]), 0.01
    n = 400_000
    modes = rng.choice(2, size=n, p=weights)
    samples = means[modes] + np.sqrt(var) * rng.standard_normal(n)
    samples = samples[np.abs(samples) <= 0.8]
    pred = MixturePrediction((tuple(MixtureComponent(w, m, var) for w, m in zip(weights, means, strict=True)),))
    eta = build_offsets(pred, Box([-0.8], [0.8]), 0.2).eta_upper[0]
    assert eta >= cvar_empirical(samples, 0.2) - 2e-2


_component = st.tuples(
    st.floats(min_value=-0.5, max_value=0.5),
    st.floats(min_value=0.0, max_value=0.05),
)


@settings(max_examples=20, deadline=None)
@given(comp=_component, extra=st.floats(min_value=0.0, max_value=0.05))
def test_offset_monotone_in_variance(comp, extra):
    mean, var = comp
    low = worst_case_cvar_offset(_single(mean, var, -0.8, 0.8), 0.2)
    high = worst_case_cvar_offset(_single(mean, var + extra, -0.8, 0.8), 0.2)
    assert high >= low - 1e-6


@settings(max_examples=20, deadline=None)
@given(comp=_component)
def test_offset_nonincreasing_in_eps(comp):
    mean, var = comp
    aset = AmbiguitySet(
        (AmbiguityComponent(0.5, mean, var, -0.8, 0.8), AmbiguityComponent(0.5, -0.2, 0.01, -0.8, 0.8))
    )
    assert worst_case_cvar_offset(aset, 0.5) <= worst_case_cvar_offset(aset, 0.1) + 1e-6
