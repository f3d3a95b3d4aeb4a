"""Fiberwise C*-algebra arithmetic over complex and quaternion scalars.

An element of the algebra holds one scalar per fiber.  Products, involution
and order are all decided fiber by fiber, and the norm is the largest fiber
modulus, so the C*-identity ``norm(a* a) == norm(a)**2`` holds exactly.
Complex fibers give a commutative algebra; quaternion fibers a
noncommutative one whose center consists of the elements with real fibers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

from .errors import NotInvertible, NotPositive, ShapeMismatch

COMPLEX = "complex"
QUATERNION = "quaternion"
_KINDS = (COMPLEX, QUATERNION)


def _hamilton(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Componentwise Hamilton product of (..., 4) arrays."""
    w1, x1, y1, z1 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    w2, x2, y2, z2 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=-1,
    )


def _quat_conj(a: np.ndarray) -> np.ndarray:
    out = a.copy()
    out[..., 1:] = -out[..., 1:]
    return out


def _quat_abs(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(a * a, axis=-1))


@dataclass(frozen=True)
class Quaternion:
    """A quaternion w + x*i + y*j + z*k with real components."""

    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inverse(self) -> "Quaternion":
        n2 = abs(self) ** 2
        if n2 == 0.0:
            raise NotInvertible("zero quaternion has no inverse")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    def __abs__(self) -> float:
        return float(np.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return NotImplemented


def quat_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product; noncommutative, with |a*b| = |a|*|b|."""
    out = _hamilton(a.as_array(), b.as_array())
    return Quaternion(float(out[0]), float(out[1]), float(out[2]), float(out[3]))


class PositivityClass(IntEnum):
    """Nested positivity classes, finest last."""

    NOT_SELFADJOINT = 0
    SELFADJOINT = 1
    POSITIVE = 2
    STRICTLY_POSITIVE = 3


class AlgebraElement:
    """One scalar per fiber, all fibers of a single kind.

    Complex elements store a complex array of shape (N,); quaternion
    elements a float array of shape (N, 4) with rows (w, x, y, z).
    Instances are immutable.
    """

    __slots__ = ("kind", "fibers")

    def __init__(self, kind: str, fibers) -> None:
        if kind not in _KINDS:
            raise ValueError(f"unknown scalar kind {kind!r}")
        if kind == COMPLEX:
            arr = np.asarray(fibers, dtype=complex).reshape(-1)
        else:
            arr = np.asarray(fibers, dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 4:
                raise ValueError("quaternion fibers must form an (N, 4) array")
        if arr.shape[0] < 1:
            raise ValueError("an algebra element needs at least one fiber")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "fibers", arr)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def complexes(cls, values: Iterable[complex]) -> "AlgebraElement":
        return cls(COMPLEX, list(values))

    @classmethod
    def quaternions(cls, values: Sequence) -> "AlgebraElement":
        rows = [v.as_array() if isinstance(v, Quaternion) else np.asarray(v, float) for v in values]
        return cls(QUATERNION, np.stack(rows))

    @classmethod
    def from_real(cls, values, kind: str) -> "AlgebraElement":
        """Lift real fiber values into the given kind."""
        vals = np.asarray(values, dtype=float).reshape(-1)
        if kind == COMPLEX:
            return cls(COMPLEX, vals.astype(complex))
        rows = np.zeros((vals.shape[0], 4))
        rows[:, 0] = vals
        return cls(QUATERNION, rows)

    @classmethod
    def ones(cls, kind: str, n: int) -> "AlgebraElement":
        return cls.from_real(np.ones(n), kind)

    @classmethod
    def zeros(cls, kind: str, n: int) -> "AlgebraElement":
        return cls.from_real(np.zeros(n), kind)

    # -- structure ---------------------------------------------------------

    @property
    def fiber_count(self) -> int:
        return int(self.fibers.shape[0])

    def fiber_moduli(self) -> np.ndarray:
        if self.kind == COMPLEX:
            return np.abs(self.fibers)
        return _quat_abs(self.fibers)

    def real_parts(self) -> np.ndarray:
        if self.kind == COMPLEX:
            return self.fibers.real.copy()
        return self.fibers[:, 0].copy()

    def imag_magnitudes(self) -> np.ndarray:
        """Modulus of the non-real part of each fiber."""
        if self.kind == COMPLEX:
            return np.abs(self.fibers.imag)
        return np.sqrt(np.sum(self.fibers[:, 1:] ** 2, axis=-1))

    def star(self) -> "AlgebraElement":
        if self.kind == COMPLEX:
            return AlgebraElement(COMPLEX, np.conj(self.fibers))
        return AlgebraElement(QUATERNION, _quat_conj(np.asarray(self.fibers)))

    # -- arithmetic --------------------------------------------------------

    def _check_compatible(self, other: "AlgebraElement") -> None:
        if self.kind != other.kind:
            raise ShapeMismatch(f"mixed scalar kinds {self.kind!r} and {other.kind!r}")
        if self.fiber_count != other.fiber_count:
            raise ShapeMismatch(
                f"fiber counts differ: {self.fiber_count} vs {other.fiber_count}"
            )

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_compatible(other)
        return AlgebraElement(self.kind, self.fibers + other.fibers)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_compatible(other)
        return AlgebraElement(self.kind, self.fibers - other.fibers)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.kind, -np.asarray(self.fibers))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check_compatible(other)
            if self.kind == COMPLEX:
                return AlgebraElement(COMPLEX, self.fibers * other.fibers)
            return AlgebraElement(QUATERNION, _hamilton(self.fibers, other.fibers))
        if isinstance(other, (int, float)):
            return AlgebraElement(self.kind, np.asarray(self.fibers) * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return AlgebraElement(self.kind, np.asarray(self.fibers) * float(other))
        return NotImplemented

    def __repr__(self) -> str:
        return f"AlgebraElement({self.kind!r}, {np.asarray(self.fibers).tolist()!r})"

    # -- serialization -----------------------------------------------------

    def to_payload(self) -> dict:
        """Flat numeric array plus a kind tag.

        Complex fibers are emitted as [re, im] pairs, quaternion fibers as
        [w, x, y, z] quadruples, in fiber order.
        """
        if self.kind == COMPLEX:
            data = np.column_stack([self.fibers.real, self.fibers.imag]).reshape(-1)
        else:
            data = np.asarray(self.fibers).reshape(-1)
        return {"kind": self.kind, "data": [float(v) for v in data]}

    @classmethod
    def from_payload(cls, payload: dict) -> "AlgebraElement":
        kind = payload["kind"]
        data = np.asarray(payload["data"], dtype=float)
        if kind == COMPLEX:
            pairs = data.reshape(-1, 2)
            return cls(COMPLEX, pairs[:, 0] + 1j * pairs[:, 1])
        return cls(QUATERNION, data.reshape(-1, 4))


def star(a: AlgebraElement) -> AlgebraElement:
    """Fiberwise involution: complex or quaternion conjugation."""
    return a.star()


def alg_norm(a: AlgebraElement) -> float:
    """Largest fiber modulus."""
    return float(np.max(a.fiber_moduli()))


def _default_tol(a: AlgebraElement) -> float:
    return 1e-12 * max(1.0, alg_norm(a))


def positivity_class(a: AlgebraElement, tol: float | None = None) -> PositivityClass:
    """Finest of {not_selfadjoint, selfadjoint, positive, strictly_positive}
    that holds fiberwise within ``tol``."""
    if tol is None:
        tol = _default_tol(a)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if float(np.max(a.imag_magnitudes())) > tol:
        return PositivityClass.NOT_SELFADJOINT
    smallest = float(np.min(a.real_parts()))
    if smallest < -tol:
        return PositivityClass.SELFADJOINT
    if smallest <= tol:
        return PositivityClass.POSITIVE
    return PositivityClass.STRICTLY_POSITIVE


def sqrt_positive(a: AlgebraElement, tol: float | None = None) -> AlgebraElement:
    """The unique positive square root of a positive element.

    The root has real fibers, so it is central whenever the input is.
    """
    if positivity_class(a, tol) < PositivityClass.POSITIVE:
        raise NotPositive("square root requires a positive element")
    roots = np.sqrt(np.clip(a.real_parts(), 0.0, None))
    return AlgebraElement.from_real(roots, a.kind)


def invert(a: AlgebraElement, tol: float = 0.0) -> AlgebraElement:
    """Fiberwise inverse; fails if any fiber modulus is at most ``tol``."""
    moduli = a.fiber_moduli()
    if float(np.min(moduli)) <= tol:
        raise NotInvertible(f"fiber modulus {float(np.min(moduli))!r} is at most {tol!r}")
    if a.kind == COMPLEX:
        return AlgebraElement(COMPLEX, 1.0 / a.fibers)
    conj = _quat_conj(np.asarray(a.fibers))
    return AlgebraElement(QUATERNION, conj / (moduli**2)[:, None])


def order_leq(a: AlgebraElement, b: AlgebraElement, tol: float | None = None) -> bool:
    """True iff b - a is positive within ``tol`` (the algebra order)."""
    a._check_compatible(b)
    return positivity_class(b - a, tol) >= PositivityClass.POSITIVE


def is_central(a: AlgebraElement, tol: float | None = None) -> bool:
    """Whether the element commutes with the whole algebra.

    Complex fibers always commute; a quaternion fiber commutes with all of
    its peers exactly when its vector part vanishes.
    """
    if a.kind == COMPLEX:
        return True
    if tol is None:
        tol = _default_tol(a)
    return float(np.max(a.imag_magnitudes())) <= tol
