import numpy as np
import pytest

from mogpdr.geometry.sets import Box
from mogpdr.mogp.gating import GatingParams
from mogpdr.mogp.gp import KernelParams
from mogpdr.mogp.model import DimensionModel, MoGPModel, gating_weights, predict_mixture

EXPERT = KernelParams(lengthscales=[1.0], signal_variance=0.25, noise_variance=1e-4)


def _model(inputs, outputs, labels, width=1.0):
    inputs = np.asarray(inputs, dtype=float)
    labels = np.asarray(labels)
    experts = [EXPERT.for_dim(inputs.shape[1])] * (int(labels.max()) + 1)
    return MoGPModel(
        inputs=inputs,
        outputs=np.asarray(outputs, dtype=float).reshape(-1, 1),
        support=Box([-0.8], [0.8]),
        gating=GatingParams(kernel_width=width, concentration=1.0),
        dims=(DimensionModel(assignments=labels, experts=experts),),
    )


def test_single_expert_takes_all_the_weight():
    grid = np.array([[i, j] for i in (-1.0, 0.0, 1.0) for j in (-1.0, 0.0, 1.0)])
    model = _model(grid, np.zeros(9), np.zeros(9, dtype=int))
    for query in ([0.0, 0.0], [3.0, -2.0]):
        assert np.allclose(gating_weights(model, 0, np.array(query)), [1.0])


def test_mirrored_experts_split_evenly_at_the_centre():
    model = _model([[-1.5], [-1.0], [1.0], [1.5]], [0.2, 0.2, -0.2, -0.2], [0, 0, 1, 1])
    assert np.allclose(gating_weights(model, 0, np.array([0.0])), [0.5, 0.5])
    left = gating_weights(model, 0, np.array([-1.2]))
    assert left[0] > left[1]


def test_prediction_near_one_expert_follows_it():
    left = [[-2.1], [-2.0], [-1.9]]
    right = [[1.9], [2.0], [2.1]]
    model = _model(left + right, [0.4] * 3 + [-0.4] * 3, [0, 0, 0, 1, 1, 1])
    (comps,) = predict_mixture(model, np.array([-2.0])).components
    assert comps[0].weight > 0.9
    assert sum(c.weight for c in comps) == pytest.approx(1.0)
    assert comps[0].mean == pytest.approx(0.4, abs=0.02)
    assert comps[0].variance < 1e-2
    # the far expert falls back to its prior
    assert comps[1].mean == pytest.approx(0.0, abs=1e-2)
    assert comps[1].variance == pytest.approx(EXPERT.signal_variance, abs=1e-2)


def test_component_variance_adds_the_expert_noise():
    model = _model([[-1.0], [0.0], [1.0]], [0.1, 0.0, -0.1], [0, 0, 0])
    query = np.array([0.4])
    (with_noise,) = predict_mixture(model, query).components
    (latent,) = predict_mixture(model, query, observation_noise=False).components
    assert with_noise[0].variance == pytest.approx(latent[0].variance + EXPERT.noise_variance)
    assert 0.0 <= latent[0].variance <= EXPERT.signal_variance
    assert with_noise[0].mean == latent[0].mean and with_noise[0].weight == latent[0].weight == 1.0
