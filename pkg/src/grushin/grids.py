"""Uniform Dirichlet grids on the interval (-1, 1)."""

from dataclasses import dataclass

import numpy as np

MIN_INTERIOR_NODES = 16


@dataclass(frozen=True)
class DirichletGrid:
    """Uniform grid of interior nodes x_i = -1 + i*spacing, i = 1..m.

    The boundary points x = -1 and x = 1 carry implicit zero values and are
    not stored.
    """

    m: int

    def __post_init__(self):
        if self.m < MIN_INTERIOR_NODES:
            raise ValueError(
                f"grid needs at least {MIN_INTERIOR_NODES} interior nodes, got {self.m}"
            )

    @property
    def spacing(self) -> float:
        return 2.0 / (self.m + 1)

    @property
    def nodes(self) -> np.ndarray:
        return -1.0 + self.spacing * np.arange(1, self.m + 1)

    def refined(self) -> "DirichletGrid":
        """Grid with exactly half the spacing (m -> 2m + 1).

        Keeps the old nodes as a subset, which makes pairs of solutions on
        (coarse, refined) grids suitable for Richardson extrapolation with
        step ratio exactly 2.
        """
        return DirichletGrid(2 * self.m + 1)
