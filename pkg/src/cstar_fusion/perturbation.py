"""Projection distances, subspace angles and frame perturbation criteria.

The distance between two complemented submodules is the largest fiberwise
spectral norm of the projection difference; it never exceeds 1, and its
arcsine is the angle between the submodules.  Sequences of submodules are
compared by a weighted root-sum-square ecart.  A candidate family whose
ecart from a frame's submodules stays strictly below the frame's smallest
lower-bound fiber (the reciprocal norm of the inverted lower bound) is
itself a frame, with scalar bounds predictable from the ecart.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import COMPLEX, alg_norm
from .errors import LengthMismatch, NotAFrame, ShapeMismatch
from .frame import FrameBounds, WeightedFrame, frame_bounds
from .submodule import Submodule


_SNAP_TO_ONE = 1e-13


def proj_distance(first: Submodule, second: Submodule) -> float:
    """Largest fiberwise spectral norm of the projection difference.

    Always within [0, 1] for valid projections; values within eigensolver
    roundoff of the endpoints snap to them, so orthogonal pairs report
    exactly 1 (arcsin is infinitely steep there, and the snap keeps the
    angle of an orthogonal pair at exactly pi/2).
    """
    if first.shape != second.shape:
        raise ShapeMismatch(f"module shapes differ: {first.shape} vs {second.shape}")
    worst = 0.0
    for p, q in zip(first.fibers, second.fibers):
        if first.shape.kind == COMPLEX:
            diff = np.asarray(p) - np.asarray(q)
            diff = (diff + diff.conj().T) / 2.0
            eigvals = np.linalg.eigvalsh(diff)
            worst = max(worst, float(np.max(np.abs(eigvals))))
        else:
            worst = max(worst, abs(float(p[0, 0]) - float(q[0, 0])))
    if worst >= 1.0 - _SNAP_TO_ONE:
        return 1.0
    return max(worst, 0.0)


def angle(first: Submodule, second: Submodule) -> float:
    """arcsin of the projection distance, in [0, pi/2].

    Orthogonal nonzero submodules are at angle pi/2, but an angle of pi/2
    does not imply orthogonality.
    """
    return float(np.arcsin(proj_distance(first, second)))


def ecart(
    first: Sequence[Submodule], second: Sequence[Submodule], weights: Sequence[float]
) -> float:
    """Weighted root-sum-square of pairwise projection distances."""
    if len(first) != len(second) or len(first) != len(weights):
        raise LengthMismatch(
            f"lengths differ: {len(first)}, {len(second)}, {len(weights)} weights"
        )
    w = np.asarray(list(weights), dtype=float)
    if np.any(w <= 0):
        raise ValueError("ecart weights must be positive")
    dists = np.array([proj_distance(u, v) for u, v in zip(first, second)])
    return float(np.sqrt(np.sum(w * dists**2)))


def ball_membership(
    center: Sequence[Submodule],
    radius: float,
    candidate: Sequence[Submodule],
    weights: Sequence[float],
) -> bool:
    """Strict open-ball test for the ecart topology."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return ecart(center, candidate, weights) < radius


@dataclass(frozen=True)
class CriteriaResult:
    """The three sufficient angle conditions; each implies the ecart bound."""

    crit1: bool
    crit2: bool
    crit3: bool | None
    crit1_lhs: float
    crit1_rhs: float
    crit2_lhs: float
    crit2_rhs: float
    crit3_lhs: float | None
    crit3_rhs: float | None

    def to_payload(self) -> dict:
        return {
            "crit1": self.crit1,
            "crit2": self.crit2,
            "crit3": self.crit3,
            "crit1_lhs": self.crit1_lhs,
            "crit1_rhs": self.crit1_rhs,
            "crit2_lhs": self.crit2_lhs,
            "crit2_rhs": self.crit2_rhs,
            "crit3_lhs": self.crit3_lhs,
            "crit3_rhs": self.crit3_rhs,
        }


@dataclass(frozen=True)
class PerturbReport:
    """Distances, angles, ecart and verdicts for a candidate family."""

    distances: tuple[float, ...]
    angles: tuple[float, ...]
    ecart: float
    threshold: float
    guaranteed: bool
    criteria: CriteriaResult
    predicted_scalar_lower: float
    predicted_scalar_upper: float
    perturbed_is_frame: bool | None
    perturbed_scalar_lower: float | None
    perturbed_scalar_upper: float | None

    def to_payload(self) -> dict:
        return {
            "distances": list(self.distances),
            "angles": list(self.angles),
            "ecart": self.ecart,
            "threshold": self.threshold,
            "guaranteed": self.guaranteed,
            "criteria": self.criteria.to_payload(),
            "predicted_scalar_lower": self.predicted_scalar_lower,
            "predicted_scalar_upper": self.predicted_scalar_upper,
            "perturbed_is_frame": self.perturbed_is_frame,
            "perturbed_scalar_lower": self.perturbed_scalar_lower,
            "perturbed_scalar_upper": self.perturbed_scalar_upper,
        }


def _require_frame(frame: WeightedFrame) -> FrameBounds:
    bounds = frame_bounds(frame)
    if not bounds.is_frame:
        raise NotAFrame("the reference family is not a frame")
    return bounds


def _check_candidates(frame: WeightedFrame, candidates: Sequence[Submodule]) -> None:
    if len(candidates) != len(frame):
        raise LengthMismatch(
            f"{len(frame)} submodules but {len(candidates)} candidates"
        )
    for sub in candidates:
        if sub.shape != frame.shape:
            raise ShapeMismatch("candidate shapes do not match the frame")


def _evaluate_criteria(
    angles: np.ndarray, q_weights: np.ndarray, threshold: float, p: float | None
) -> CriteriaResult:
    wmax = float(np.sqrt(np.max(q_weights)))
    crit1_lhs = float(np.sum(q_weights * angles**2))
    crit1_rhs = threshold**2
    crit2_lhs = float(np.sum(angles**2))
    crit2_rhs = (threshold / wmax) ** 2
    crit3_lhs = crit3_rhs = None
    crit3 = None
    if p is not None:
        if not 1.0 < p < np.inf:
            raise ValueError("the exponent p must lie in (1, inf)")
        power = 2.0 * p / (p - 1.0)
        crit3_lhs = float(np.sum(angles**power))
        q_norm = float(np.sum(q_weights**p) ** (1.0 / p))
        crit3_rhs = float((threshold**2 / q_norm) ** (p / (p - 1.0)))
        crit3 = bool(crit3_lhs < crit3_rhs)
    return CriteriaResult(
        crit1=bool(crit1_lhs < crit1_rhs),
        crit2=bool(crit2_lhs < crit2_rhs),
        crit3=crit3,
        crit1_lhs=crit1_lhs,
        crit1_rhs=crit1_rhs,
        crit2_lhs=crit2_lhs,
        crit2_rhs=crit2_rhs,
        crit3_lhs=crit3_lhs,
        crit3_rhs=crit3_rhs,
    )


def angle_criteria(
    frame: WeightedFrame, candidates: Sequence[Submodule], p: float | None = None
) -> CriteriaResult:
    """Evaluate the three sufficient angle conditions for the candidate
    family; any true one implies the ecart falls below the threshold."""
    bounds = _require_frame(frame)
    _check_candidates(frame, candidates)
    angles = np.array([angle(u, v) for u, v in zip(frame.submodules, candidates)])
    q_weights = np.asarray(frame.weights.q_weights())
    threshold = float(np.sqrt(bounds.scalar_lower))
    return _evaluate_criteria(angles, q_weights, threshold, p)


def perturbation_check(
    frame: WeightedFrame, candidates: Sequence[Submodule], p: float = 2.0
) -> PerturbReport:
    """Compare a candidate submodule family against a frame.

    Uses the ecart weighted by the squared weight norms.  The candidate
    family is guaranteed to be a frame when the ecart falls strictly below
    the threshold, the smallest fiber of the optimal lower bound (ties are
    not guaranteed).  In that case the candidate frame is assembled and its
    verified scalar bounds are reported next to the predictions
    (threshold - ecart)^2 and (upper-bound norm + ecart)^2.
    """
    bounds = _require_frame(frame)
    _check_candidates(frame, candidates)
    dists = tuple(
        proj_distance(u, v) for u, v in zip(frame.submodules, candidates)
    )
    angles = tuple(float(np.arcsin(d)) for d in dists)
    q_weights = np.asarray(frame.weights.q_weights())
    ecart_value = float(np.sqrt(np.sum(q_weights * np.asarray(dists) ** 2)))
    threshold = float(np.sqrt(bounds.scalar_lower))
    guaranteed = bool(ecart_value < threshold)
    upper_norm = alg_norm(bounds.upper)
    criteria = _evaluate_criteria(np.asarray(angles), q_weights, threshold, p)
    perturbed_is_frame = perturbed_lower = perturbed_upper = None
    if guaranteed:
        moved = WeightedFrame(candidates, frame.weights)
        moved_bounds = frame_bounds(moved)
        perturbed_is_frame = moved_bounds.is_frame
        perturbed_lower = moved_bounds.scalar_lower
        perturbed_upper = moved_bounds.scalar_upper
    return PerturbReport(
        distances=dists,
        angles=angles,
        ecart=ecart_value,
        threshold=threshold,
        guaranteed=guaranteed,
        criteria=criteria,
        predicted_scalar_lower=max(threshold - ecart_value, 0.0) ** 2,
        predicted_scalar_upper=(upper_norm + ecart_value) ** 2,
        perturbed_is_frame=perturbed_is_frame,
        perturbed_scalar_lower=perturbed_lower,
        perturbed_scalar_upper=perturbed_upper,
    )


def randomly_rotated(
    submodules: Sequence[Submodule], max_angle: float, rng: np.random.Generator
) -> list[Submodule]:
    """Perturb each submodule by one random Givens rotation per fiber.

    The rotation plane is drawn uniformly and the angle uniformly from
    [0, max_angle]; one-dimensional and quaternion fibers are unchanged.
    """
    if max_angle < 0:
        raise ValueError("max_angle must be nonnegative")
    moved = []
    for sub in submodules:
        fibers = []
        for m, p in zip(sub.shape.dims, sub.fibers):
            if sub.shape.kind != COMPLEX or m < 2:
                fibers.append(p)
                continue
            i, j = rng.choice(m, size=2, replace=False)
            theta = rng.uniform(0.0, max_angle)
            giv = np.eye(m)
            giv[i, i] = giv[j, j] = np.cos(theta)
            giv[i, j] = -np.sin(theta)
            giv[j, i] = np.sin(theta)
            rotated = giv @ np.asarray(p) @ giv.T
            fibers.append((rotated + rotated.conj().T) / 2.0)
        moved.append(Submodule(sub.shape, fibers))
    return moved
