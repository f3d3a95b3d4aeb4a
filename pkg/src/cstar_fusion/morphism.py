"""Orthogonality-preserving bijections and frame transport.

In the fiberwise model every bounded bijective module map that preserves
orthogonality acts on fiber k as a positive scale c_k times an isometry:
a unitary matrix for complex fibers, or multiplication by a unit quaternion
for quaternion fibers.  The inner product then transforms as
<Tx, Ty> = nu <x, y> with nu = (c_k^2), a central strictly positive element.

Quaternion isometries multiply from the right: right factors commute with
the left algebra action, which is what makes the map module-linear and the
nu identity hold; a left factor would do neither.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import COMPLEX, AlgebraElement, _hamilton, _quat_conj
from .errors import NotAFrame, ShapeMismatch
from .frame import WeightedFrame, WeightSequence, frame_bounds
from .hilbert_module import ModuleShape, ModuleVector
from .submodule import Submodule

_UNITARY_TOL = 1e-10


class OrthoMap:
    """Per-fiber positive scale and isometry; immutable and invertible."""

    __slots__ = ("shape", "scales", "rotations")

    def __init__(self, shape: ModuleShape, scales, rotations: Sequence) -> None:
        scale_arr = np.asarray(scales, dtype=float).reshape(-1)
        if scale_arr.shape[0] != shape.fiber_count:
            raise ShapeMismatch("need one scale per fiber")
        if np.any(scale_arr <= 0):
            raise ValueError("scales must be positive")
        if len(rotations) != shape.fiber_count:
            raise ShapeMismatch("need one rotation per fiber")
        clean = []
        for k, (m, rot) in enumerate(zip(shape.dims, rotations)):
            if shape.kind == COMPLEX:
                arr = np.asarray(rot, dtype=complex)
                if arr.shape != (m, m):
                    raise ShapeMismatch(f"fiber {k} rotation must be {m}x{m}")
                defect = np.linalg.norm(arr.conj().T @ arr - np.eye(m), 2)
                if defect > _UNITARY_TOL:
                    raise ValueError(f"fiber {k} rotation is not unitary (defect {defect:.2e})")
            else:
                arr = np.asarray(rot, dtype=float).reshape(4)
                if abs(np.linalg.norm(arr) - 1.0) > _UNITARY_TOL:
                    raise ValueError(f"fiber {k} rotation is not a unit quaternion")
            arr = arr.copy()
            arr.setflags(write=False)
            clean.append(arr)
        scale_arr = scale_arr.copy()
        scale_arr.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "scales", scale_arr)
        object.__setattr__(self, "rotations", tuple(clean))

    def __setattr__(self, name, value):
        raise AttributeError("OrthoMap is immutable")

    @classmethod
    def identity(cls, shape: ModuleShape) -> "OrthoMap":
        if shape.kind == COMPLEX:
            rotations = [np.eye(m, dtype=complex) for m in shape.dims]
        else:
            rotations = [np.array([1.0, 0.0, 0.0, 0.0]) for _ in shape.dims]
        return cls(shape, np.ones(shape.fiber_count), rotations)

    def apply(self, x: ModuleVector) -> ModuleVector:
        if self.shape != x.shape:
            raise ShapeMismatch(f"module shapes differ: {self.shape} vs {x.shape}")
        fibers = []
        for k, f in enumerate(x.fibers):
            if self.shape.kind == COMPLEX:
                fibers.append(self.scales[k] * (self.rotations[k] @ f))
            else:
                fibers.append(self.scales[k] * _hamilton(np.asarray(f), self.rotations[k]))
        return ModuleVector(x.shape, fibers)

    def inverse(self) -> "OrthoMap":
        if self.shape.kind == COMPLEX:
            rotations = [r.conj().T for r in self.rotations]
        else:
            rotations = [_quat_conj(np.asarray(r)) for r in self.rotations]
        return OrthoMap(self.shape, 1.0 / self.scales, rotations)

    def nu(self) -> AlgebraElement:
        """The central strictly positive element (c_k^2)."""
        return AlgebraElement.from_real(self.scales**2, self.shape.kind)

    def to_payload(self) -> dict:
        fibers = []
        for k, rot in enumerate(self.rotations):
            entry: dict = {"scale": float(self.scales[k])}
            if self.shape.kind == COMPLEX:
                entry["rotation"] = [
                    [[float(v.real), float(v.imag)] for v in row] for row in np.asarray(rot)
                ]
            else:
                entry["rotation"] = [float(v) for v in rot]
            fibers.append(entry)
        return {"kind": self.shape.kind, "dims": list(self.shape.dims), "fibers": fibers}

    @classmethod
    def from_payload(cls, payload: dict) -> "OrthoMap":
        shape = ModuleShape(payload["kind"], tuple(payload["dims"]))
        scales = [entry["scale"] for entry in payload["fibers"]]
        rotations = []
        for entry in payload["fibers"]:
            rot = np.asarray(entry["rotation"], dtype=float)
            if shape.kind == COMPLEX:
                rotations.append(rot[..., 0] + 1j * rot[..., 1])
            else:
                rotations.append(rot)
        return cls(shape, scales, rotations)


def apply_map(mapping: OrthoMap, x: ModuleVector) -> ModuleVector:
    """Apply the map fiberwise: scale times isometry."""
    return mapping.apply(x)


def nu_of(mapping: OrthoMap) -> AlgebraElement:
    """The squared-scale element nu with <Tx, Ty> = nu <x, y>."""
    return mapping.nu()


def transport_frame(mapping: OrthoMap, frame: WeightedFrame) -> WeightedFrame:
    """Push a frame through the map.

    The image submodules carry the conjugated projections R P R^H (the
    scale cancels there); the map's energy scale is carried by the weights,
    which pick up the factor nu^(1/2) = (c_k), so the transported frame
    verifies with optimal bounds exactly nu^(1/2) times the originals.
    """
    if mapping.shape != frame.shape:
        raise ShapeMismatch(f"module shapes differ: {mapping.shape} vs {frame.shape}")
    if not frame_bounds(frame).is_frame:
        raise NotAFrame("transport requires a frame")
    new_subs = []
    for sub in frame.submodules:
        if frame.shape.kind == COMPLEX:
            fibers = []
            for rot, p in zip(mapping.rotations, sub.fibers):
                moved = rot @ p @ rot.conj().T
                fibers.append((moved + moved.conj().T) / 2.0)
        else:
            fibers = list(sub.fibers)
        new_subs.append(Submodule(frame.shape, fibers))
    scale_element = AlgebraElement.from_real(mapping.scales, frame.shape.kind)
    new_weights = WeightSequence([scale_element * w for w in frame.weights])
    return WeightedFrame(new_subs, new_weights)
