"""Kernel logistic regression Hopfield memories with synchronous and event-driven retrieval."""

__version__ = "0.1.0"

from .dynamics import (
    NetworkState,
    Outcome,
    RetrievalTrace,
    UpdateScheme,
    async_epoch,
    local_field,
    local_fields,
    pseudo_energy,
    run_retrieval,
    sync_step,
)
from .kernel import KernelParams, PatternSet, gram_matrix, hamming, overlap, rbf_kernel, squared_distance
from .stability import MarginReport, stability_report
from .training import DualWeights, TrainConfig, TrainingDiverged, train_network, train_neuron
