"""Ground spaces (square and flat torus) and the quadtree cell hierarchy."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class SpaceKind(str, enum.Enum):
    SQUARE = "square"
    TORUS = "torus"


@dataclass(frozen=True)
class GroundSpace:
    """The half-open square ``[0, side)^2``, optionally with wrap-around."""

    kind: SpaceKind
    side: float

    def __post_init__(self):
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        if not self.side > 0:
            raise ValueError(f"side must be positive, got {self.side!r}")

    @property
    def is_torus(self) -> bool:
        return self.kind is SpaceKind.TORUS

    def contains(self, p) -> bool:
        x, y = p
        return 0.0 <= x < self.side and 0.0 <= y < self.side


def distance(space: GroundSpace, p, q) -> float:
    """Euclidean distance on the square, per-axis wrapped distance on the torus."""
    dx = abs(p[0] - q[0])
    dy = abs(p[1] - q[1])
    if space.is_torus:
        dx = min(dx, space.side - dx)
        dy = min(dy, space.side - dy)
    return math.sqrt(dx * dx + dy * dy)


def pairwise_distance(space: GroundSpace, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Vectorised :func:`distance` over broadcastable ``(..., 2)`` arrays."""
    d = np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float))
    if space.is_torus:
        d = np.minimum(d, space.side - d)
    return np.sqrt(d[..., 0] * d[..., 0] + d[..., 1] * d[..., 1])


@dataclass(frozen=True)
class Cell:
    """Quadtree part ``[x1, x2) x [y1, y2)`` indexed by a word over ``1..4``."""

    word: str
    x1: float
    x2: float
    y1: float
    y2: float

    @property
    def level(self) -> int:
        return len(self.word)

    @property
    def size(self) -> float:
        return self.x2 - self.x1

    def contains(self, p) -> bool:
        return self.x1 <= p[0] < self.x2 and self.y1 <= p[1] < self.y2


def root_cell(space: GroundSpace) -> Cell:
    return Cell("", 0.0, space.side, 0.0, space.side)


def cell_children(c: Cell) -> tuple[Cell, Cell, Cell, Cell]:
    # 1 = top-left, 2 = top-right, 3 = bottom-left, 4 = bottom-right
    xm = (c.x1 + c.x2) / 2
    ym = (c.y1 + c.y2) / 2
    return (
        Cell(c.word + "1", c.x1, xm, ym, c.y2),
        Cell(c.word + "2", xm, c.x2, ym, c.y2),
        Cell(c.word + "3", c.x1, xm, c.y1, ym),
        Cell(c.word + "4", xm, c.x2, c.y1, ym),
    )


def cell_of_point(p, level: int, space: GroundSpace) -> Cell:
    if level < 0:
        raise ValueError("level must be non-negative")
    c = root_cell(space)
    x, y = p
    for _ in range(level):
        xm = (c.x1 + c.x2) / 2
        ym = (c.y1 + c.y2) / 2
        right = x >= xm
        top = y >= ym
        digit = (1 if not right else 2) if top else (3 if not right else 4)
        c = Cell(
            c.word + str(digit),
            xm if right else c.x1,
            c.x2 if right else xm,
            ym if top else c.y1,
            c.y2 if top else ym,
        )
    return c


def cell_indices(coords: np.ndarray, level: int, side: float) -> tuple[np.ndarray, np.ndarray]:
    """Integer column/row of each point's level-``level`` cell.

    Digits are produced by the same midpoint comparisons as :func:`cell_of_point`,
    so membership at cell borders agrees exactly with the word-based cells.
    """
    coords = np.asarray(coords, dtype=float)
    n = len(coords)
    ix = np.zeros(n, dtype=np.int64)
    iy = np.zeros(n, dtype=np.int64)
    x1 = np.zeros(n)
    x2 = np.full(n, float(side))
    y1 = np.zeros(n)
    y2 = np.full(n, float(side))
    for _ in range(level):
        xm = (x1 + x2) / 2
        ym = (y1 + y2) / 2
        right = coords[:, 0] >= xm
        top = coords[:, 1] >= ym
        ix = 2 * ix + right
        iy = 2 * iy + top
        x1 = np.where(right, xm, x1)
        x2 = np.where(right, x2, xm)
        y1 = np.where(top, ym, y1)
        y2 = np.where(top, y2, ym)
    return ix, iy


def word_from_indices(ix: int, iy: int, level: int) -> str:
    digits = []
    for j in range(level - 1, -1, -1):
        right = (ix >> j) & 1
        top = (iy >> j) & 1
        digits.append("1" if top and not right else "2" if top else "3" if not right else "4")
    return "".join(digits)


def cell_from_indices(ix: int, iy: int, level: int, space: GroundSpace) -> Cell:
    c = root_cell(space)
    for d in word_from_indices(ix, iy, level):
        c = cell_children(c)[int(d) - 1]
    return c
