"""Random-keys decoders from real vectors to discrete solutions.

Both decoders depend only on the rank order of the components and break
ties by lower index, so they are built on a stable argsort.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_production_levels, check_vector


def random_keys_decode(position) -> np.ndarray:
    """Rank transform: the smallest component becomes 1, the next 2, ...

    >>> random_keys_decode([0.5, -1.1, 2.4]).tolist()
    [2, 1, 3]
    """
    x = check_vector(position, "position")
    ranks = np.empty(x.size, dtype=np.int64)
    ranks[np.argsort(x, kind="stable")] = np.arange(1, x.size + 1)
    return ranks


def multiple_random_keys_decode(position, production_levels) -> np.ndarray:
    """Model sequence with exactly ``production_levels[i]`` copies of model ``i+1``.

    Model 1 takes the ``P_1`` smallest components, model 2 the next ``P_2``
    smallest, and so on.
    """
    x = check_vector(position, "position")
    levels = check_production_levels(production_levels)
    if x.size != levels.sum():
        raise ValueError(
            f"position has length {x.size} but production levels sum to {levels.sum()}"
        )
    sequence = np.empty(x.size, dtype=np.int64)
    sequence[np.argsort(x, kind="stable")] = np.repeat(np.arange(1, levels.size + 1), levels)
    return sequence


class RandomKeysEncoder(TransformerMixin, BaseEstimator):
    """Decode each row of ``X`` into a 1-based task permutation."""

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but the encoder was fitted with {self.n_features_in_}"
            )
        return np.vstack([random_keys_decode(row) for row in X])


class MultipleRandomKeysEncoder(TransformerMixin, BaseEstimator):
    """Decode each row of ``X`` into a model sequence.

    Parameters
    ----------
    production_levels : sequence of int
        Units of each model in the plan; ``X`` must have ``sum`` columns.
    """

    def __init__(self, production_levels=None):
        self.production_levels = production_levels

    def fit(self, X=None, y=None):
        self.levels_ = check_production_levels(self.production_levels)
        self.n_features_in_ = int(self.levels_.sum())
        return self

    def transform(self, X):
        check_is_fitted(self, "levels_")
        X = check_array(X, dtype=float)
        return np.vstack([multiple_random_keys_decode(row, self.levels_) for row in X])
