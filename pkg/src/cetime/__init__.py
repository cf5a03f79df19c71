"""Censored event-time modeling with a latent eventual-occurrence layer.

Estimators: ConditionalEventTimeModel (occurrence head + conditional
log-normal time heads trained through a binary stochastic layer),
EventTimeModel (plain censored accelerated-failure-time baseline), and
OccurrenceClassifier (binary classification of the observed-event
indicator). See the data module for the synthetic benchmark and the
metrics module for AUC / MRAE / concordance evaluation.
"""

from .data import Dataset, apply_censoring, generate_synthetic, load_csv, save_csv, split
from .mathstats import Rng
from .metrics import auc, calibration_curve, concordance_index, mrae
from .models import (
    ConditionalEventTimeModel,
    EventTimeModel,
    OccurrenceClassifier,
    load_model,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "ConditionalEventTimeModel",
    "Dataset",
    "EventTimeModel",
    "OccurrenceClassifier",
    "Rng",
    "apply_censoring",
    "auc",
    "calibration_curve",
    "concordance_index",
    "generate_synthetic",
    "load_csv",
    "load_model",
    "mrae",
    "save_csv",
    "split",
    "train",
]
