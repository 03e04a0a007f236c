"""3x3 local binary pattern codes and regional histogram descriptors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadGrid, TooSmall
from .geometry import ComponentKind

BINS = 256

# (row, col) offsets, clockwise from the top-left neighbour; bit n has weight 2**n
NEIGHBOR_OFFSETS = (
    (-1, -1), (-1, 0), (-1, 1), (0, 1),
    (1, 1), (1, 0), (1, -1), (0, -1),
)
NEIGHBOR_ORDER_TAG = "cw-from-top-left/ge/lsb-first"

DEFAULT_GRIDS = {
    ComponentKind.FACE: (8, 8),
    ComponentKind.LEFT_EYE: (3, 3),
    ComponentKind.RIGHT_EYE: (3, 3),
    ComponentKind.NOSE: (3, 3),
    ComponentKind.MOUTH_CHIN: (3, 3),
    ComponentKind.FOREHEAD_EYEBROW: (3, 3),
}


def lbp_code(patch) -> int:
    p = np.asarray(patch, dtype=np.float64).reshape(3, 3)
    center = p[1, 1]
    code = 0
    for n, (dr, dc) in enumerate(NEIGHBOR_OFFSETS):
        if p[1 + dr, 1 + dc] - center >= 0:
            code |= 1 << n
    return code


def lbp_image(img) -> np.ndarray:
    """LBP code for every interior pixel; output is ``(h-2, w-2)`` uint8."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 3 or a.shape[1] < 3:
        raise TooSmall(f"LBP needs at least 3x3, got {a.shape}")
    h, w = a.shape
    center = a[1:h - 1, 1:w - 1]
    codes = np.zeros(center.shape, dtype=np.uint8)
    for n, (dr, dc) in enumerate(NEIGHBOR_OFFSETS):
        nb = a[1 + dr:h - 1 + dr, 1 + dc:w - 1 + dc]
        codes |= ((nb - center) >= 0).astype(np.uint8) << n
    return codes


@dataclass(frozen=True, eq=False)
class LbpDescriptor:
    kind: ComponentKind
    grid: tuple[int, int]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "kind", ComponentKind(self.kind))
        object.__setattr__(self, "grid", (int(self.grid[0]), int(self.grid[1])))
        v = np.asarray(self.values, dtype=np.float64).ravel()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        rows, cols = self.grid
        if rows < 1 or cols < 1:
            raise BadGrid(f"grid {self.grid}")
        if v.size != rows * cols * BINS:
            raise BadGrid(f"{v.size} values for grid {self.grid}")

    @property
    def bins(self):
        return BINS

    def regions(self) -> np.ndarray:
        return self.values.reshape(self.grid[0] * self.grid[1], BINS)

    def __eq__(self, other):
        if not isinstance(other, LbpDescriptor):
            return NotImplemented
        return (self.kind == other.kind and self.grid == other.grid
                and np.array_equal(self.values, other.values))

    __hash__ = None


def grid_edges(n: int, parts: int) -> list[int]:
    """Split ``n`` into ``parts`` near-equal spans; the last span takes the remainder."""
    step = n // parts
    return [i * step for i in range(parts)] + [n]


def descriptor(codes, kind: ComponentKind, grid=(3, 3)) -> LbpDescriptor:
    c = np.asarray(codes)
    rows, cols = int(grid[0]), int(grid[1])
    if c.ndim != 2 or rows < 1 or cols < 1 or rows > c.shape[0] or cols > c.shape[1]:
        raise BadGrid(f"grid {grid} does not fit a {c.shape} code image")
    re, ce = grid_edges(c.shape[0], rows), grid_edges(c.shape[1], cols)
    out = np.empty((rows * cols, BINS), dtype=np.float64)
    for i in range(rows):
        for j in range(cols):
            block = c[re[i]:re[i + 1], ce[j]:ce[j + 1]].ravel()
            hist = np.bincount(block.astype(np.intp), minlength=BINS)
            out[i * cols + j] = hist / block.size
    return LbpDescriptor(kind, (rows, cols), out.ravel())
