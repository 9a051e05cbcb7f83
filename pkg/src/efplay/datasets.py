"""Regression datasets."""

import numpy as np

from .types import Dataset


def make_sine_dataset(K: int = 101, K_val: int = 1000) -> Dataset:
    """Samples of z -> sin(2 pi z) on [0, 1).

    Training points are z_k = (k-1)/K for k = 1..K; validation points follow
    the same convention with K_val points.
    """
    z = np.arange(K) / K
    zv = np.arange(K_val) / K_val
    return Dataset(z[:, None], np.sin(2 * np.pi * z), zv[:, None], np.sin(2 * np.pi * zv))
