"""Weighted fusion frames: verification, bounds, reconstruction, multipliers.

A frame is a finite sequence of complemented submodules paired with central,
strictly positive weights.  Everything reduces to the per-fiber Hermitian
matrices S_k = sum_n w_{n,k}^2 P_{n,k}: the family is a frame exactly when
every S_k is bounded away from zero, the optimal algebra bounds are the
fiberwise square roots of the spectral extremes of S_k, and inverting the
S_k yields exact reconstruction.

``frame_operator`` is the map x -> sum_n w_n^2 P_n(x); ``synthesis`` sends
x to the sequence (w_n P_n(x)) and ``synthesis_adjoint`` maps a sequence
back into the module.  Composing the adjoint with the synthesis recovers
the frame operator, which is what makes the reconstruction exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    COMPLEX,
    AlgebraElement,
    PositivityClass,
    alg_norm,
    is_central,
    positivity_class,
)
from .errors import InvalidWeight, LengthMismatch, NotAFrame, ShapeMismatch
from .hilbert_module import ModuleShape, ModuleVector, inner_product, left_action, module_norm
from .submodule import Submodule, block_submodule, project

_DIRECT_SOLVE_LIMIT = 64
_FRAME_TOL = 1e-10


class WeightSequence:
    """Central, strictly positive algebra elements, one per submodule."""

    __slots__ = ("weights", "kind", "fiber_count", "matrix")

    def __init__(self, weights: Sequence[AlgebraElement]) -> None:
        weights = tuple(weights)
        if not weights:
            raise LengthMismatch("a weight sequence needs at least one entry")
        first = weights[0]
        for w in weights:
            if w.kind != first.kind or w.fiber_count != first.fiber_count:
                raise ShapeMismatch("weights must share one kind and fiber count")
            if not is_central(w):
                raise InvalidWeight("weights must be central")
            if positivity_class(w) < PositivityClass.STRICTLY_POSITIVE:
                raise InvalidWeight("weights must be strictly positive")
        matrix = np.stack([w.real_parts() for w in weights])
        matrix.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "kind", first.kind)
        object.__setattr__(self, "fiber_count", first.fiber_count)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("WeightSequence is immutable")

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def __getitem__(self, n: int) -> AlgebraElement:
        return self.weights[n]

    @classmethod
    def from_matrix(cls, kind: str, values) -> "WeightSequence":
        """Rows of positive reals, one row per submodule."""
        rows = np.asarray(values, dtype=float)
        if rows.ndim != 2:
            raise ShapeMismatch("weight matrix must be two-dimensional")
        return cls([AlgebraElement.from_real(row, kind) for row in rows])

    def add(self, other: "WeightSequence") -> "WeightSequence":
        if len(other) != len(self):
            raise LengthMismatch("weight sequences have different lengths")
        return WeightSequence([a + b for a, b in zip(self.weights, other.weights)])

    def scale(self, factor: float) -> "WeightSequence":
        if factor <= 0:
            raise ValueError("rescaling factor must be positive")
        return WeightSequence([factor * w for w in self.weights])

    def q_weights(self) -> list[float]:
        """The squared algebra norms of the weights, used to weight ecarts."""
        return [alg_norm(w) ** 2 for w in self.weights]


class FrameOperatorFibers:
    """Per-fiber Hermitian PSD matrices of the frame operator."""

    __slots__ = ("shape", "fibers")

    def __init__(self, shape: ModuleShape, fibers: Sequence[np.ndarray]) -> None:
        object.__setattr__(self, "shape", shape)
        frozen = []
        for f in fibers:
            arr = np.asarray(f).copy()
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "fibers", tuple(frozen))

    def __setattr__(self, name, value):
        raise AttributeError("FrameOperatorFibers is immutable")

    def apply(self, x: ModuleVector) -> ModuleVector:
        if self.shape != x.shape:
            raise ShapeMismatch(f"module shapes differ: {self.shape} vs {x.shape}")
        if self.shape.kind == COMPLEX:
            return ModuleVector(x.shape, [s @ f for s, f in zip(self.fibers, x.fibers)])
        return ModuleVector(x.shape, [float(s[0, 0]) * f for s, f in zip(self.fibers, x.fibers)])


def _assemble_operator(
    shape: ModuleShape, submodules: Sequence[Submodule], wmatrix: np.ndarray
) -> FrameOperatorFibers:
    fibers = []
    for k, m in enumerate(shape.dims):
        if shape.kind == COMPLEX:
            acc = np.zeros((m, m), dtype=complex)
            for n, sub in enumerate(submodules):
                acc += wmatrix[n, k] ** 2 * sub.fibers[k]
            acc = (acc + acc.conj().T) / 2.0
        else:
            total = sum(wmatrix[n, k] ** 2 * float(sub.fibers[k][0, 0]) for n, sub in enumerate(submodules))
            acc = np.array([[total]])
        fibers.append(acc)
    return FrameOperatorFibers(shape, fibers)


class WeightedFrame:
    """Submodules with weights; the frame operator and its per-fiber
    spectral extremes are cached at construction."""

    __slots__ = ("shape", "submodules", "weights", "_operator", "_extremes")

    def __init__(self, submodules: Sequence[Submodule], weights) -> None:
        submodules = tuple(submodules)
        if not submodules:
            raise LengthMismatch("a frame needs at least one submodule")
        if not isinstance(weights, WeightSequence):
            weights = WeightSequence(weights)
        if len(weights) != len(submodules):
            raise LengthMismatch(
                f"{len(submodules)} submodules but {len(weights)} weights"
            )
        shape = submodules[0].shape
        for sub in submodules:
            if sub.shape != shape:
                raise ShapeMismatch("submodules must share one shape")
        if weights.kind != shape.kind or weights.fiber_count != shape.fiber_count:
            raise ShapeMismatch("weights do not match the module shape")
        operator = _assemble_operator(shape, submodules, weights.matrix)
        extremes = []
        for s in operator.fibers:
            if shape.kind == COMPLEX:
                eigvals = np.linalg.eigvalsh(s)
                extremes.append((float(eigvals[0]), float(eigvals[-1])))
            else:
                v = float(s[0, 0])
                extremes.append((v, v))
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "submodules", submodules)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_operator", operator)
        object.__setattr__(self, "_extremes", tuple(extremes))

    def __setattr__(self, name, value):
        raise AttributeError("WeightedFrame is immutable")

    def __len__(self) -> int:
        return len(self.submodules)

    @property
    def operator_fibers(self) -> FrameOperatorFibers:
        return self._operator

    @property
    def per_fiber_extremes(self) -> tuple[tuple[float, float], ...]:
        return self._extremes


class ModuleSequence:
    """A finite sequence of module vectors sharing one shape."""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[ModuleVector]) -> None:
        entries = tuple(entries)
        if not entries:
            raise LengthMismatch("a module sequence needs at least one entry")
        shape = entries[0].shape
        for e in entries:
            if e.shape != shape:
                raise ShapeMismatch("sequence entries must share one shape")
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleSequence is immutable")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, n: int) -> ModuleVector:
        return self.entries[n]

    def gram(self) -> AlgebraElement:
        """sum_n <y_n, y_n> as an algebra element."""
        acc = inner_product(self.entries[0], self.entries[0])
        for e in self.entries[1:]:
            acc = acc + inner_product(e, e)
        return acc

    def norm(self) -> float:
        return float(np.sqrt(alg_norm(self.gram())))


def seq_inner(ys: ModuleSequence, zs: ModuleSequence) -> AlgebraElement:
    """Algebra-valued inner product sum_n <y_n, z_n> of two sequences."""
    if len(ys) != len(zs):
        raise LengthMismatch(f"sequence lengths differ: {len(ys)} vs {len(zs)}")
    acc = inner_product(ys[0], zs[0])
    for y, z in zip(ys.entries[1:], zs.entries[1:]):
        acc = acc + inner_product(y, z)
    return acc


@dataclass(frozen=True)
class FrameBounds:
    """Optimal algebra bounds plus the scalar constants they induce."""

    is_frame: bool
    lower: AlgebraElement
    upper: AlgebraElement
    scalar_lower: float
    scalar_upper: float
    per_fiber: tuple[tuple[float, float], ...]

    def to_payload(self) -> dict:
        return {
            "is_frame": self.is_frame,
            "lower_bound": self.lower.to_payload(),
            "upper_bound": self.upper.to_payload(),
            "scalar_lower": self.scalar_lower,
            "scalar_upper": self.scalar_upper,
            "per_fiber": [[lo, hi] for lo, hi in self.per_fiber],
        }


@dataclass(frozen=True)
class TightnessResult:
    tight: bool
    constant: AlgebraElement | None
    parseval: bool

    def to_payload(self) -> dict:
        return {
            "tight": self.tight,
            "parseval": self.parseval,
            "constant": None if self.constant is None else self.constant.to_payload(),
        }


@dataclass(frozen=True)
class MultiplierResult:
    member: bool
    tight_constant: AlgebraElement | None
    note: str

    def to_payload(self) -> dict:
        return {
            "member": self.member,
            "tight_constant": None
            if self.tight_constant is None
            else self.tight_constant.to_payload(),
            "note": self.note,
        }


@dataclass(frozen=True)
class ReconstructionResult:
    vector: ModuleVector
    rel_error: float


def frame_operator(frame: WeightedFrame) -> FrameOperatorFibers:
    """The per-fiber matrices of x -> sum_n w_n^2 P_n(x)."""
    return frame.operator_fibers


def frame_bounds(frame: WeightedFrame, tol: float | None = None) -> FrameBounds:
    """Optimal bounds from the per-fiber spectral extremes of the frame
    operator.

    The family is reported as a frame when the smallest per-fiber eigenvalue
    exceeds ``tol`` (default: 1e-10 relative to the largest eigenvalue).
    """
    lam_min = np.array([lo for lo, _ in frame.per_fiber_extremes])
    lam_max = np.array([hi for _, hi in frame.per_fiber_extremes])
    c = float(np.min(lam_min))
    d = float(np.max(lam_max))
    threshold = tol if tol is not None else _FRAME_TOL * max(1.0, d)
    kind = frame.shape.kind
    lower = AlgebraElement.from_real(np.sqrt(np.clip(lam_min, 0.0, None)), kind)
    upper = AlgebraElement.from_real(np.sqrt(np.clip(lam_max, 0.0, None)), kind)
    return FrameBounds(
        is_frame=bool(c > threshold),
        lower=lower,
        upper=upper,
        scalar_lower=max(c, 0.0),
        scalar_upper=d,
        per_fiber=frame.per_fiber_extremes,
    )


def synthesis(frame: WeightedFrame, x: ModuleVector) -> ModuleSequence:
    """The sequence (w_n P_n(x)), one entry per submodule."""
    if frame.shape != x.shape:
        raise ShapeMismatch(f"module shapes differ: {frame.shape} vs {x.shape}")
    return ModuleSequence(
        [left_action(w, project(sub, x)) for sub, w in zip(frame.submodules, frame.weights)]
    )


def synthesis_adjoint(frame: WeightedFrame, ys: ModuleSequence) -> ModuleVector:
    """sum_n w_n P_n(y_n); the adjoint of ``synthesis``."""
    if len(ys) != len(frame):
        raise LengthMismatch(f"{len(frame)} submodules but {len(ys)} sequence entries")
    if ys[0].shape != frame.shape:
        raise ShapeMismatch(f"module shapes differ: {frame.shape} vs {ys[0].shape}")
    acc = ModuleVector.zeros(frame.shape)
    for sub, w, y in zip(frame.submodules, frame.weights, ys):
        acc = acc + left_action(w, project(sub, y))
    return acc


def _cg_solve(matrix: np.ndarray, rhs: np.ndarray, tol: float, maxiter: int) -> np.ndarray:
    """Conjugate gradients for a Hermitian positive definite fiber."""
    x = np.zeros_like(rhs)
    r = rhs - matrix @ x
    p = r.copy()
    rs = np.vdot(r, r).real
    target = tol * max(1.0, float(np.linalg.norm(rhs)))
    for _ in range(maxiter):
        if np.sqrt(rs) <= target:
            break
        ap = matrix @ p
        alpha = rs / np.vdot(p, ap).real
        x = x + alpha * p
        r = r - alpha * ap
        rs_next = np.vdot(r, r).real
        p = r + (rs_next / rs) * p
        rs = rs_next
    return x


def _solve_operator(frame: WeightedFrame, x: ModuleVector) -> ModuleVector:
    fibers = []
    for k, m in enumerate(frame.shape.dims):
        s = frame.operator_fibers.fibers[k]
        if frame.shape.kind == COMPLEX:
            if m <= _DIRECT_SOLVE_LIMIT:
                fibers.append(np.linalg.solve(s, x.fibers[k]))
            else:
                fibers.append(_cg_solve(s, x.fibers[k], tol=1e-14, maxiter=10 * m))
        else:
            fibers.append(x.fibers[k] / float(s[0, 0]))
    return ModuleVector(frame.shape, fibers)


def reconstruct(frame: WeightedFrame, x: ModuleVector, tol: float | None = None) -> ReconstructionResult:
    """Exact reconstruction x = sum_n w_n^2 P_n(S^-1 x).

    Solves the frame operator fiber by fiber (direct Hermitian solve for
    small fibers, conjugate gradients above 64 dimensions), then re-applies
    the weighted projection sum and reports the relative error.
    """
    bounds = frame_bounds(frame, tol)
    if not bounds.is_frame:
        raise NotAFrame("cannot reconstruct: the family is not a frame")
    mid = _solve_operator(frame, x)
    acc = ModuleVector.zeros(frame.shape)
    for sub, w in zip(frame.submodules, frame.weights):
        acc = acc + left_action(w * w, project(sub, mid))
    denom = module_norm(x)
    rel = module_norm(acc - x) / denom if denom > 0 else 0.0
    return ReconstructionResult(vector=acc, rel_error=float(rel))


def tightness(frame: WeightedFrame, tol: float = 1e-10) -> TightnessResult:
    """Whether every fiber of the frame operator is a scalar multiple of the
    identity, and whether that scalar is 1 (Parseval)."""
    bounds = frame_bounds(frame)
    if not bounds.is_frame:
        raise NotAFrame("tightness is only defined for frames")
    tight = all(hi - lo <= tol * max(1.0, hi) for lo, hi in frame.per_fiber_extremes)
    if not tight:
        return TightnessResult(tight=False, constant=None, parseval=False)
    levels = np.array([np.sqrt((lo + hi) / 2.0) for lo, hi in frame.per_fiber_extremes])
    constant = AlgebraElement.from_real(levels, frame.shape.kind)
    parseval = bool(np.max(np.abs(levels - 1.0)) <= tol)
    return TightnessResult(tight=True, constant=constant, parseval=parseval)


def assemble_block_frame(
    kind: str, index_sets: Sequence[Iterable[int]], weights
) -> WeightedFrame:
    """Build the coordinate-block frame for the given 1-based index sets and
    an (M, N) matrix of positive weights."""
    matrix = np.asarray(weights, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != len(index_sets):
        raise LengthMismatch("need one weight row per index set")
    shape = ModuleShape(kind, (1,) * matrix.shape[1])
    subs = [block_submodule(shape, idx) for idx in index_sets]
    return WeightedFrame(subs, WeightSequence.from_matrix(kind, matrix))


def block_multiplier_check(
    index_sets: Sequence[Iterable[int]], weights, kind: str = COMPLEX
) -> MultiplierResult:
    """Closed-form multiplier test for coordinate-block families.

    At finite truncation the weight matrix is a multiplier exactly when
    every fiber is covered by some index set; the family is then tight with
    constant sqrt(sum_n a_{n,k}^2 d_{n,k}) per fiber.  The summability
    conditions that appear for infinite families hold vacuously here.
    """
    matrix = np.asarray(weights, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != len(index_sets):
        raise LengthMismatch("need one weight row per index set")
    if np.any(matrix <= 0):
        raise InvalidWeight("block weights must be positive")
    n_fibers = matrix.shape[1]
    sums = np.zeros(n_fibers)
    for n, idx in enumerate(index_sets):
        for i in idx:
            if not 1 <= int(i) <= n_fibers:
                raise LengthMismatch(f"fiber index {i} outside 1..{n_fibers}")
            sums[int(i) - 1] += matrix[n, int(i) - 1] ** 2
    member = bool(np.all(sums > 0))
    constant = AlgebraElement.from_real(np.sqrt(sums), kind) if member else None
    return MultiplierResult(
        member=member, tight_constant=constant, note="finite-truncation: auto-satisfied"
    )


def cone_add(frame: WeightedFrame, other: WeightSequence) -> WeightedFrame:
    """The frame over the same submodules with weights added entrywise.

    Both inputs must verify as frames; the sum then does as well (the
    multiplier set of a submodule sequence is a convex cone).
    """
    if not frame_bounds(frame).is_frame:
        raise NotAFrame("first summand is not a frame")
    second = WeightedFrame(frame.submodules, other)
    if not frame_bounds(second).is_frame:
        raise NotAFrame("second summand is not a frame")
    return WeightedFrame(frame.submodules, frame.weights.add(other))


def cone_scale(frame: WeightedFrame, factor: float) -> WeightedFrame:
    """Positive rescaling of the weights; bounds scale by the same factor."""
    if not frame_bounds(frame).is_frame:
        raise NotAFrame("input is not a frame")
    return WeightedFrame(frame.submodules, frame.weights.scale(factor))
