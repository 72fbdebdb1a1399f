"""Vector-lattice algebra on the unit cube.

Points are immutable vectors in [0,1]^n.  The four operations below
(join, meet, hadamard, prob_sum) are the currency every algorithm in
this package trades in: join/meet are the coordinatewise max/min, the
Hadamard product models coordinatewise intersection of fractional
solutions, and the probabilistic sum ``x (+) y = 1 - (1-x)(1-y)`` is the
continuous analogue of set union.
"""

from __future__ import annotations

from typing import Iterable, Union

import numpy as np

from .errors import CoordinateRangeError, DimensionMismatchError

# Constructors clamp coordinates that drift outside [0,1] by at most this
# much (iterated prob_sum updates accumulate ~1e-16 of float noise).
CLAMP_TOL = 1e-9

ArrayLike = Union["Point", np.ndarray, Iterable[float]]


class Point:
    """Immutable vector in [0,1]^n.

    Coordinates within ``CLAMP_TOL`` of the cube are clamped onto it;
    larger violations raise :class:`CoordinateRangeError`.
    """

    __slots__ = ("_coords",)

    def __init__(self, coords: ArrayLike):
        arr = np.array(as_array(coords), dtype=np.float64, copy=True)
        if arr.ndim != 1:
            raise CoordinateRangeError(f"expected a 1-D vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise CoordinateRangeError("coordinates must be finite")
        low = arr.min(initial=0.0)
        high = arr.max(initial=1.0)
        if low < -CLAMP_TOL or high > 1.0 + CLAMP_TOL:
            raise CoordinateRangeError(
                f"coordinate outside [0,1] beyond tolerance: min={low!r}, max={high!r}"
            )
        np.clip(arr, 0.0, 1.0, out=arr)
        arr.flags.writeable = False
        self._coords = arr

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def dimension(self) -> int:
        return self._coords.shape[0]

    def __len__(self) -> int:
        return self.dimension

    def __getitem__(self, i):
        return self._coords[i]

    def __iter__(self):
        return iter(self._coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Point):
            return NotImplemented
        return self._coords.shape == other._coords.shape and bool(
            np.all(self._coords == other._coords)
        )

    def __hash__(self):
        return hash(self._coords.tobytes())

    def __repr__(self) -> str:
        return f"Point({self._coords.tolist()!r})"


def as_array(x: ArrayLike) -> np.ndarray:
    """Unwrap a Point (or coerce any array-like) to a float64 ndarray."""
    if isinstance(x, Point):
        return x.coords
    return np.asarray(x, dtype=np.float64)


def zeros(n: int) -> Point:
    return Point(np.zeros(n))


def ones(n: int) -> Point:
    return Point(np.ones(n))


def _paired(x: ArrayLike, y: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    a, b = as_array(x), as_array(y)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def join(x: ArrayLike, y: ArrayLike) -> Point:
    """Coordinatewise maximum of two points."""
    a, b = _paired(x, y)
    return Point(np.maximum(a, b))


def meet(x: ArrayLike, y: ArrayLike) -> Point:
    """Coordinatewise minimum of two points."""
    a, b = _paired(x, y)
    return Point(np.minimum(a, b))


def hadamard(x: ArrayLike, y: ArrayLike) -> Point:
    """Coordinatewise product of two points."""
    a, b = _paired(x, y)
    return Point(a * b)


def prob_sum(x: ArrayLike, y: ArrayLike) -> Point:
    """Coordinatewise probabilistic sum: 1 - (1-x)(1-y)."""
    a, b = _paired(x, y)
    return Point(1.0 - (1.0 - a) * (1.0 - b))
