"""Ready-made parameter layouts used by the CLI and the test suite."""

from __future__ import annotations

import math

import numpy as np

from .families import FamilyKind
from .model import ModelParams

__all__ = ["FIVE_AREA_NONNEIGHBORS", "five_area_edge_matrix", "five_area_params"]

# A map of five areas arranged in two rows (three on top, two below); every
# pair of areas shares a border except (1,3), (1,5) and (3,4) in 1-based
# labelling.
FIVE_AREA_NONNEIGHBORS = ((0, 2), (0, 4), (2, 3))


def five_area_edge_matrix(strong: float, weak: float) -> np.ndarray:
    """5x5 intensity matrix: ``strong`` for neighbours, ``weak`` otherwise."""
    c = np.full((5, 5), strong, dtype=float)
    np.fill_diagonal(c, 0.0)
    for j, k in FIVE_AREA_NONNEIGHBORS:
        c[j, k] = c[k, j] = weak
    return c


def five_area_params(
    family=FamilyKind.INVERSE_GAMMA,
    s0: float = 6.0,
    c0: float = 10.0,
    strong: float = math.exp(2.0),
    weak: float = math.exp(-2.0),
) -> ModelParams:
    """Benchmark scenario: five areas with strong/weak edges by adjacency."""
    return ModelParams(
        family=family,
        s0=s0,
        c0=c0,
        edge_intensity=five_area_edge_matrix(strong, weak),
    )
