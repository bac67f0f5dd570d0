"""Embedding-space vectors tagged with their embedding's fingerprint."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BTVector:
    """A point in embedding space.

    The fingerprint records which embedding produced the vector so that
    operations refuse to mix vectors from incompatible embeddings.
    """

    data: np.ndarray
    fingerprint: str

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("vector data must be one-dimensional")
        object.__setattr__(self, "data", arr)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))
