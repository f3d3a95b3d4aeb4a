"""Orthogonally complemented submodules as per-fiber orthogonal projections.

Complex fibers carry an arbitrary Hermitian idempotent matrix; quaternion
fibers are one-dimensional, so a submodule there is a 0/1 selector (the only
left submodules of a quaternion line are the zero space and the whole line).
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .algebra import COMPLEX, QUATERNION
from .errors import IndexOutOfRange, QuaternionUnsupported, ShapeMismatch
from .hilbert_module import ModuleShape, ModuleVector

_MGS_DROP = 1e-10


class Submodule:
    """Per-fiber projection data; immutable.

    Complex fiber k stores an (m_k, m_k) complex matrix; a quaternion fiber
    stores a (1, 1) float matrix whose single entry is the selector bit.
    """

    __slots__ = ("shape", "fibers")

    def __init__(self, shape: ModuleShape, fibers: Sequence[np.ndarray]) -> None:
        if len(fibers) != shape.fiber_count:
            raise ShapeMismatch(f"expected {shape.fiber_count} fibers, got {len(fibers)}")
        clean = []
        for k, (m, f) in enumerate(zip(shape.dims, fibers)):
            if shape.kind == COMPLEX:
                arr = np.asarray(f, dtype=complex)
                if arr.shape != (m, m):
                    raise ShapeMismatch(f"fiber {k} projection must be {m}x{m}")
            else:
                arr = np.asarray(f, dtype=float).reshape(1, 1)
            arr = arr.copy()
            arr.setflags(write=False)
            clean.append(arr)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "fibers", tuple(clean))

    def __setattr__(self, name, value):
        raise AttributeError("Submodule is immutable")

    def selector_bits(self) -> np.ndarray:
        """Per-fiber 0/1 bits; only meaningful for quaternion submodules."""
        return np.array([float(f[0, 0]) for f in self.fibers])

    def to_payload(self) -> dict:
        fibers = []
        for f in self.fibers:
            if self.shape.kind == QUATERNION:
                fibers.append({"selector": int(round(float(f[0, 0])))})
            else:
                rows = [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(f)]
                fibers.append({"projection": rows})
        return {"kind": self.shape.kind, "dims": list(self.shape.dims), "fibers": fibers}

    @classmethod
    def from_payload(cls, payload: dict) -> "Submodule":
        shape = ModuleShape(payload["kind"], tuple(payload["dims"]))
        fibers = []
        for k, spec in enumerate(payload["fibers"]):
            if "selector" in spec:
                fibers.append(np.array([[float(spec["selector"])]]))
            elif "projection" in spec:
                rows = np.asarray(spec["projection"], dtype=float)
                fibers.append(rows[..., 0] + 1j * rows[..., 1])
            elif "span" in spec:
                vecs = [_complex_vector(v) for v in spec["span"]]
                fibers.append(_span_projection(vecs, shape.dims[k]))
            else:
                raise ShapeMismatch(f"fiber {k}: unknown projection payload")
        return cls(shape, fibers)


def _complex_vector(entries) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def _orthonormalize(vectors: Iterable[np.ndarray], m: int) -> list[np.ndarray]:
    """Modified Gram-Schmidt with a drop tolerance relative to the largest
    input norm; zero and dependent vectors are dropped."""
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    for v in vecs:
        if v.shape[0] != m:
            raise ShapeMismatch(f"span vector has length {v.shape[0]}, expected {m}")
    scale = max((float(np.linalg.norm(v)) for v in vecs), default=0.0)
    drop = _MGS_DROP * scale
    basis: list[np.ndarray] = []
    for v in vecs:
        u = v.astype(complex)
        for _ in range(2):
            for q in basis:
                u = u - np.vdot(q, u) * q
        norm = float(np.linalg.norm(u))
        if norm > drop and norm > 0.0:
            basis.append(u / norm)
    return basis


def _span_projection(vectors: Sequence[np.ndarray], m: int) -> np.ndarray:
    basis = _orthonormalize(vectors, m)
    proj = np.zeros((m, m), dtype=complex)
    for q in basis:
        proj += np.outer(q, np.conj(q))
    return proj


def block_submodule(shape: ModuleShape, index_set: Iterable[int]) -> Submodule:
    """Coordinate submodule: identity on the fibers named by the 1-based
    index set, zero elsewhere.  Valid for both scalar kinds."""
    indices = set(int(i) for i in index_set)
    n = shape.fiber_count
    for i in indices:
        if not 1 <= i <= n:
            raise IndexOutOfRange(f"fiber index {i} outside 1..{n}")
    fibers = []
    for k, m in enumerate(shape.dims):
        selected = (k + 1) in indices
        if shape.kind == COMPLEX:
            fibers.append(np.eye(m, dtype=complex) if selected else np.zeros((m, m), complex))
        else:
            fibers.append(np.array([[1.0 if selected else 0.0]]))
    return Submodule(shape, fibers)


def span_submodule(shape: ModuleShape, fiber_spanning_sets: Sequence[Sequence]) -> Submodule:
    """Submodule spanned fiberwise by the given vectors (complex kind only)."""
    if shape.kind != COMPLEX:
        raise QuaternionUnsupported("span submodules exist only for complex fibers")
    if len(fiber_spanning_sets) != shape.fiber_count:
        raise ShapeMismatch(
            f"expected spans for {shape.fiber_count} fibers, got {len(fiber_spanning_sets)}"
        )
    fibers = [
        _span_projection(list(spans), m) for spans, m in zip(fiber_spanning_sets, shape.dims)
    ]
    return Submodule(shape, fibers)


def project(sub: Submodule, x: ModuleVector) -> ModuleVector:
    """Apply the per-fiber orthogonal projection to a module vector."""
    if sub.shape != x.shape:
        raise ShapeMismatch(f"module shapes differ: {sub.shape} vs {x.shape}")
    if sub.shape.kind == COMPLEX:
        return ModuleVector(x.shape, [p @ f for p, f in zip(sub.fibers, x.fibers)])
    return ModuleVector(x.shape, [float(p[0, 0]) * f for p, f in zip(sub.fibers, x.fibers)])


def complement(sub: Submodule) -> Submodule:
    """The orthogonal complement; per fiber the projection I - P."""
    fibers = []
    for m, p in zip(sub.shape.dims, sub.fibers):
        if sub.shape.kind == COMPLEX:
            fibers.append(np.eye(m, dtype=complex) - p)
        else:
            fibers.append(np.array([[1.0 - float(p[0, 0])]]))
    return Submodule(sub.shape, fibers)


def validate_projection(sub: Submodule, tol: float = 1e-12) -> bool:
    """True iff every fiber matrix is Hermitian and idempotent within tol
    (spectral norm)."""
    for p in sub.fibers:
        arr = np.asarray(p)
        if np.linalg.norm(arr - arr.conj().T, 2) > tol:
            return False
        if np.linalg.norm(arr @ arr - arr, 2) > tol:
            return False
    return True
