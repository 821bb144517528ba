"""Trust-region bookkeeping: acceptance ratio, candidate acceptance, and
radius update."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .problems import as_input_vector

__all__ = [
    "TrustRegionConstants",
    "TrustRegionState",
    "compute_rho",
    "accept_candidate",
    "update_radius",
    "DEGENERACY_THRESHOLD",
]

# Model decreases at or below this are treated as degenerate (no usable
# prediction): the acceptance ratio is undefined and the iteration fails.
DEGENERACY_THRESHOLD = 1e-14


@dataclass(frozen=True)
class TrustRegionConstants:
    """Acceptance thresholds and radius-update factors.

    Requires 0 < eta1 <= eta2 < 1 and 0 < gamma1 <= gamma2 < 1, with the
    shrink factor inside [gamma1, gamma2] and the expansion factor above 1.
    """

    eta1: float = 0.1
    eta2: float = 0.9
    gamma1: float = 0.5
    gamma2: float = 0.5
    expansion_factor: float = 2.0
    shrink_factor: float = 0.5
    radius_max: float = math.inf

    def __post_init__(self):
        if not 0.0 < self.eta1 <= self.eta2 < 1.0:
            raise ValueError(
                f"require 0 < eta1 <= eta2 < 1, got eta1={self.eta1}, eta2={self.eta2}"
            )
        if not 0.0 < self.gamma1 <= self.gamma2 < 1.0:
            raise ValueError(
                f"require 0 < gamma1 <= gamma2 < 1, got gamma1={self.gamma1}, "
                f"gamma2={self.gamma2}"
            )
        if not self.gamma1 <= self.shrink_factor <= self.gamma2:
            raise ValueError(
                f"shrink_factor must lie in [gamma1, gamma2], got {self.shrink_factor}"
            )
        if not self.expansion_factor > 1.0:
            raise ValueError(f"expansion_factor must be > 1, got {self.expansion_factor}")
        if not self.radius_max > 0.0:
            raise ValueError(f"radius_max must be > 0, got {self.radius_max}")


@dataclass
class TrustRegionState:
    """Reference iterate, its measured plant value, and the current radius."""

    reference: np.ndarray
    radius: float
    reference_plant_value: float
    iteration: int = 0
    reference_moves: int = field(default=0)

    def __post_init__(self):
        self.reference = as_input_vector(self.reference)
        if self.radius <= 0:
            raise ValueError("radius must be > 0")


def compute_rho(
    plant_ref: float,
    plant_cand: float,
    model_ref: float,
    model_cand: float,
    degeneracy_threshold: float = DEGENERACY_THRESHOLD,
) -> float | None:
    """Achieved plant decrease over predicted model decrease.

    Returns None (degenerate) when the predicted decrease does not exceed
    ``degeneracy_threshold``; callers treat that as a failed iteration.
    """
    for name, v in (
        ("plant_ref", plant_ref),
        ("plant_cand", plant_cand),
        ("model_ref", model_ref),
        ("model_cand", model_cand),
    ):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v}")
    predicted = model_ref - model_cand
    if predicted <= degeneracy_threshold:
        return None
    return (plant_ref - plant_cand) / predicted


def accept_candidate(
    state: TrustRegionState,
    candidate,
    candidate_plant_value: float,
    rho: float | None,
    constants: TrustRegionConstants,
) -> bool:
    """Move the reference to the candidate iff rho >= eta1.

    A degenerate (None) rho never moves the reference.  Returns whether the
    reference moved; on a move the stored plant value is updated to the
    candidate's measured value.
    """
    if rho is not None and rho >= constants.eta1:
        state.reference = as_input_vector(candidate, state.reference.size)
        state.reference_plant_value = float(candidate_plant_value)
        state.reference_moves += 1
        return True
    return False


def update_radius(
    radius: float, rho: float | None, constants: TrustRegionConstants
) -> float:
    """Next radius: expand on very successful steps, keep on successful
    ones, shrink otherwise (including degenerate rho).
    """
    if radius <= 0:
        raise ValueError("radius must be > 0")
    if rho is not None and rho >= constants.eta2:
        return min(constants.expansion_factor * radius, constants.radius_max)
    if rho is not None and rho >= constants.eta1:
        return radius
    return constants.shrink_factor * radius
