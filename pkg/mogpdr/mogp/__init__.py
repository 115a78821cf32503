# mogpdr/mogp/__init__.py
from mogpdr.mogp.gating import GatingParams
from mogpdr.mogp.gp import GPCache, KernelParams, fit_hyperparameters, gp_posterior, log_marginal_likelihood
from mogpdr.mogp.model import (
    Dataset,
    DimensionModel,
    MixtureComponent,
    MixturePrediction,
    MoGPModel,
    gating_weights,
    predict_mixture,
)
from mogpdr.mogp.training import train_mogp, train_single_gp

__all__ = [
    "Dataset",
    "DimensionModel",
    "GPCache",
    "GatingParams",
    "KernelParams",
    "MixtureComponent",
    "MixturePrediction",
    "MoGPModel",
    "fit_hyperparameters",
    "gating_weights",
    "gp_posterior",
    "log_marginal_likelihood",
    "predict_mixture",
    "train_mogp",
    "train_single_gp",
]
