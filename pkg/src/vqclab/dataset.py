"""Synthetic Gaussian-peak regression data.

Each sample is a 21-point curve on the even grid x_j = j/20 holding one
Gaussian peak

    y(x) = A / (sigma * sqrt(2*pi)) * exp(-(x - mu)^2 / (2 sigma^2)) + eps

with A ~ U[0.5, 1.5], sigma ~ U[0.01, 0.1], mu ~ U[0, 1] and i.i.d.
measurement noise eps ~ N(0, 0.01^2) per point.  Every sample is then
independently min-max normalized to [0, 1]; the regression target is
the peak position mu, already in [0, 1].

Reproducibility: each sample draws from its own Philox stream keyed by
(master_seed, split_tag, sample_index), so regenerating any split from
the same master seed is bit-identical, in any order, on any platform.
Draw order within a sample is A, sigma, mu, then the 21 noise values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

N_POINTS = 21
X_GRID = np.arange(N_POINTS) / (N_POINTS - 1)

SPLIT_SIZES = {"train": 150, "val": 250, "test": 500}
_SPLIT_TAGS = {"train": 0, "val": 1, "test": 2}

NOISE_STD = 0.01


@dataclass(frozen=True)
class GaussianSampleParams:
    amplitude: float  # U[0.5, 1.5]
    sigma: float  # U[0.01, 0.1]
    mu: float  # U[0, 1]; the regression target

    def __post_init__(self):
        if not 0.5 <= self.amplitude <= 1.5:
            raise ValueError(f"amplitude {self.amplitude} outside [0.5, 1.5]")
        if not 0.01 <= self.sigma <= 0.1:
            raise ValueError(f"sigma {self.sigma} outside [0.01, 0.1]")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu {self.mu} outside [0, 1]")


@dataclass(frozen=True)
class Sample:
    x_values: np.ndarray  # raw curve, pre-normalization
    features: np.ndarray  # min-max normalized to [0, 1]
    target: float  # mu


@dataclass(frozen=True)
class DatasetSplit:
    train: list
    val: list
    test: list
    master_seed: int

    def features(self, name: str) -> np.ndarray:
        return np.stack([s.features for s in getattr(self, name)])

    def targets(self, name: str) -> np.ndarray:
        return np.array([s.target for s in getattr(self, name)])


def peak_curve(params: GaussianSampleParams) -> np.ndarray:
    """Noise-free curve values on the 21-point grid."""
    norm = params.amplitude / (params.sigma * math.sqrt(2.0 * math.pi))
    return norm * np.exp(-((X_GRID - params.mu) ** 2) / (2.0 * params.sigma ** 2))


def normalize(values: np.ndarray) -> np.ndarray:
    """Per-sample min-max scaling to [0, 1]; an all-equal vector maps to zeros."""
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def render_sample(params: GaussianSampleParams, rng: np.random.Generator) -> Sample:
    raw = peak_curve(params) + rng.normal(0.0, NOISE_STD, size=N_POINTS)
    return Sample(x_values=raw, features=normalize(raw), target=params.mu)


def draw_params(rng: np.random.Generator) -> GaussianSampleParams:
    return GaussianSampleParams(
        amplitude=rng.uniform(0.5, 1.5),
        sigma=rng.uniform(0.01, 0.1),
        mu=rng.uniform(0.0, 1.0),
    )


def _sample_rng(master_seed: int, split: str, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=(int(master_seed), _SPLIT_TAGS[split], int(index)))
    return np.random.Generator(np.random.Philox(seq))


def generate_sample(master_seed: int, split: str, index: int) -> Sample:
    rng = _sample_rng(master_seed, split, index)
    return render_sample(draw_params(rng), rng)


def generate_splits(master_seed: int) -> DatasetSplit:
    """Deterministic 150/250/500 train/val/test sets for one master seed."""
    parts = {
        name: [generate_sample(master_seed, name, i) for i in range(size)]
        for name, size in SPLIT_SIZES.items()
    }
    return DatasetSplit(train=parts["train"], val=parts["val"], test=parts["test"],
                        master_seed=master_seed)


def baseline_rmse(split: DatasetSplit, name: str = "test") -> float:
    """RMSE of the constant predictor 0.5: the did-not-learn reference.

    For uniform targets this sits at 1/sqrt(12) ~ 0.2887.
    """
    targets = split.targets(name)
    return float(np.sqrt(np.mean((targets - 0.5) ** 2)))


def write_split_files(split: DatasetSplit, out_dir) -> list:
    """Write one CSV per split: 21 feature columns then the target column."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    header = ",".join([f"feat_{j:02d}" for j in range(N_POINTS)] + ["target"])
    paths = []
    for name in SPLIT_SIZES:
        path = os.path.join(out_dir, f"{name}.csv")
        rows = np.column_stack([split.features(name), split.targets(name)])
        np.savetxt(path, rows, delimiter=",", header=header, comments="", fmt="%.17g")
        paths.append(path)
    return paths
