"""Floor layout: rectangular cells, BS sites and the inter-cell overlap band.

Cells are squares of ``cell_area`` tiled row-major on a rows x cols grid with
the BS at the centre. A UT of cell ``l`` interferes with cell ``j`` only while
it sits within ``band_width`` of cell ``j``'s rectangle; ``band_width`` is
chosen so the full border band covers ``overlap_fraction`` of the cell area.
"""

import math

import numpy as np

from .channel import draw_shadow


def grid_shape(num_cells):
    """Most square rows x cols factorisation, rows <= cols."""
    rows = int(math.isqrt(num_cells))
    while num_cells % rows:
        rows -= 1
    return rows, num_cells // rows


class Floor:
    def __init__(self, num_cells, cell_area, overlap_fraction):
        self.num_cells = num_cells
        self.rows, self.cols = grid_shape(num_cells)
        self.side = math.sqrt(cell_area)
        self.band_width = self.side * (1.0 - math.sqrt(1.0 - overlap_fraction)) / 2.0
        idx = np.arange(num_cells)
        self.origins = np.stack([(idx % self.cols) * self.side,
                                 (idx // self.cols) * self.side], axis=-1).astype(float)
        self.bs_positions = self.origins + self.side / 2.0

    @property
    def width(self):
        return self.cols * self.side

    @property
    def height(self):
        return self.rows * self.side

    def cell_of(self, points):
        points = np.asarray(points, dtype=float)
        col = np.clip((points[..., 0] // self.side).astype(int), 0, self.cols - 1)
        row = np.clip((points[..., 1] // self.side).astype(int), 0, self.rows - 1)
        return row * self.cols + col

    def distance_to_cell(self, points, j):
        """Euclidean distance from each point to the closed rectangle of cell j."""
        points = np.asarray(points, dtype=float)
        lo = self.origins[j]
        hi = lo + self.side
        dx = np.maximum(np.maximum(lo[0] - points[..., 0], points[..., 0] - hi[0]), 0.0)
        dy = np.maximum(np.maximum(lo[1] - points[..., 1], points[..., 1] - hi[1]), 0.0)
        return np.hypot(dx, dy)

    def bs_distance(self, points, j):
        points = np.asarray(points, dtype=float)
        d = points - self.bs_positions[j]
        return np.hypot(d[..., 0], d[..., 1])

    def interferes(self, points, home, j):
        """True where a UT of cell ``home`` lies in the overlap band toward cell j."""
        if j == home:
            return np.zeros(np.shape(points)[:-1], dtype=bool)
        return self.distance_to_cell(points, j) < self.band_width


class ShadowField:
    """Spatially consistent shadowing: one lognormal draw per (BS, tile).

    Tiles are ``tile`` metres square, so a UT returning to a grid point sees
    the same shadow coefficient it saw before.
    """

    def __init__(self, floor, sigma_db, tile, rng):
        self.tile = tile
        nx = int(math.ceil(floor.width / tile)) + 1
        ny = int(math.ceil(floor.height / tile)) + 1
        self.z = draw_shadow(sigma_db, rng, size=(floor.num_cells, nx, ny))
        self._max = np.array([nx - 1, ny - 1])

    def __call__(self, points, j):
        points = np.asarray(points, dtype=float)
        t = np.clip((points // self.tile).astype(int), 0, self._max)
        return self.z[j, t[..., 0], t[..., 1]]
