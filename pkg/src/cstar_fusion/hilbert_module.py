"""Fiberwise Hilbert module over the fiberwise algebra.

A module vector holds one small vector per fiber (complex fibers may have
any dimension, quaternion fibers are one-dimensional).  The inner product
is algebra-valued and taken fiber by fiber; the module norm is the algebra
norm of |x| = <x,x>^(1/2), which here is just the largest Euclidean fiber
length.  The inner product is linear in its first argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import COMPLEX, QUATERNION, _KINDS, AlgebraElement, _hamilton, _quat_conj
from .errors import QuaternionUnsupported, ShapeMismatch


@dataclass(frozen=True)
class ModuleShape:
    """Fiber count, per-fiber dimensions and scalar kind."""

    kind: str
    dims: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown scalar kind {self.kind!r}")
        object.__setattr__(self, "dims", tuple(int(m) for m in self.dims))
        if len(self.dims) < 1:
            raise ValueError("a module needs at least one fiber")
        if any(m < 1 for m in self.dims):
            raise ValueError("fiber dimensions must be at least 1")
        if self.kind == QUATERNION and any(m != 1 for m in self.dims):
            raise QuaternionUnsupported("quaternion fibers must be one-dimensional")

    @property
    def fiber_count(self) -> int:
        return len(self.dims)


class ModuleVector:
    """One vector per fiber; immutable.

    Complex fiber k is a complex array of length dims[k]; a quaternion
    fiber is a single (w, x, y, z) row of length 4.
    """

    __slots__ = ("shape", "fibers")

    def __init__(self, shape: ModuleShape, fibers: Sequence[np.ndarray]) -> None:
        if len(fibers) != shape.fiber_count:
            raise ShapeMismatch(
                f"expected {shape.fiber_count} fibers, got {len(fibers)}"
            )
        clean = []
        for k, (m, f) in enumerate(zip(shape.dims, fibers)):
            if shape.kind == COMPLEX:
                arr = np.asarray(f, dtype=complex).reshape(-1)
                if arr.shape[0] != m:
                    raise ShapeMismatch(f"fiber {k} has length {arr.shape[0]}, expected {m}")
            else:
                arr = np.asarray(f, dtype=float).reshape(-1)
                if arr.shape[0] != 4:
                    raise ShapeMismatch(f"quaternion fiber {k} needs 4 components")
            arr = arr.copy()
            arr.setflags(write=False)
            clean.append(arr)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "fibers", tuple(clean))

    def __setattr__(self, name, value):
        raise AttributeError("ModuleVector is immutable")

    @classmethod
    def zeros(cls, shape: ModuleShape) -> "ModuleVector":
        if shape.kind == COMPLEX:
            return cls(shape, [np.zeros(m, dtype=complex) for m in shape.dims])
        return cls(shape, [np.zeros(4) for _ in shape.dims])

    def _check_same_shape(self, other: "ModuleVector") -> None:
        if self.shape != other.shape:
            raise ShapeMismatch(f"module shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        self._check_same_shape(other)
        return ModuleVector(self.shape, [a + b for a, b in zip(self.fibers, other.fibers)])

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        self._check_same_shape(other)
        return ModuleVector(self.shape, [a - b for a, b in zip(self.fibers, other.fibers)])

    def __neg__(self) -> "ModuleVector":
        return ModuleVector(self.shape, [-f for f in self.fibers])

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return ModuleVector(self.shape, [f * float(other) for f in self.fibers])
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"ModuleVector({self.shape!r}, {[f.tolist() for f in self.fibers]!r})"

    def to_payload(self) -> dict:
        """Shape header plus a flat scalar array in fiber-major order."""
        if self.shape.kind == COMPLEX:
            flat: list[float] = []
            for f in self.fibers:
                flat.extend(float(v) for v in np.column_stack([f.real, f.imag]).reshape(-1))
        else:
            flat = [float(v) for f in self.fibers for v in f]
        return {"kind": self.shape.kind, "dims": list(self.shape.dims), "data": flat}

    @classmethod
    def from_payload(cls, payload: dict) -> "ModuleVector":
        shape = ModuleShape(payload["kind"], tuple(payload["dims"]))
        data = np.asarray(payload["data"], dtype=float)
        fibers = []
        pos = 0
        for m in shape.dims:
            if shape.kind == COMPLEX:
                chunk = data[pos : pos + 2 * m].reshape(m, 2)
                fibers.append(chunk[:, 0] + 1j * chunk[:, 1])
                pos += 2 * m
            else:
                fibers.append(data[pos : pos + 4])
                pos += 4
        return cls(shape, fibers)


def inner_product(x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    """Algebra-valued inner product, linear in the first argument.

    Complex fiber k gives sum_i x_i * conj(y_i); a quaternion fiber gives
    the Hamilton product x * conj(y).
    """
    x._check_same_shape(y)
    if x.shape.kind == COMPLEX:
        vals = [np.vdot(yf, xf) for xf, yf in zip(x.fibers, y.fibers)]
        return AlgebraElement(COMPLEX, vals)
    rows = [_hamilton(xf, _quat_conj(np.asarray(yf))) for xf, yf in zip(x.fibers, y.fibers)]
    return AlgebraElement(QUATERNION, np.stack(rows))


def module_norm(x: ModuleVector) -> float:
    """Largest Euclidean fiber length; equals the algebra norm of |x|."""
    return float(max(np.linalg.norm(f) for f in x.fibers))


def left_action(a: AlgebraElement, x: ModuleVector) -> ModuleVector:
    """Fiberwise left multiplication of the vector by an algebra element."""
    if a.kind != x.shape.kind:
        raise ShapeMismatch(f"mixed scalar kinds {a.kind!r} and {x.shape.kind!r}")
    if a.fiber_count != x.shape.fiber_count:
        raise ShapeMismatch(
            f"fiber counts differ: {a.fiber_count} vs {x.shape.fiber_count}"
        )
    if x.shape.kind == COMPLEX:
        return ModuleVector(x.shape, [a.fibers[k] * f for k, f in enumerate(x.fibers)])
    rows = [_hamilton(a.fibers[k], np.asarray(f)) for k, f in enumerate(x.fibers)]
    return ModuleVector(x.shape, rows)
