from .manifest import Dataset, ManifestWriter, Sample, load_manifest, save_manifest
from .pruning import PruneConfig, histogram, prune, split
from .training import TrainConfig, evaluate_mse, train_policy

__all__ = [
    "Dataset",
    "ManifestWriter",
    "PruneConfig",
    "Sample",
    "TrainConfig",
    "evaluate_mse",
    "histogram",
    "load_manifest",
    "prune",
    "save_manifest",
    "split",
    "train_policy",
]
