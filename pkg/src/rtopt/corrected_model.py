"""First-order correction of a mismatched model.

The correction adds a linear term whose coefficients are the gap between
the measured plant gradient and the model gradient at a reference point,
so the corrected surrogate reproduces the plant's first derivatives there.
An optional constant shift additionally pins the surrogate's *value* at
the reference to the measured plant value; the shift cancels from every
value difference, so candidate selection and acceptance ratios are
unaffected by it.
"""

from __future__ import annotations

import numpy as np

from .problems import ScalarOracle, as_input_vector

__all__ = [
    "compute_modifiers",
    "filter_modifiers",
    "ModifierFilter",
    "CorrectedModel",
]


def compute_modifiers(plant_grad, model_grad) -> np.ndarray:
    """Gradient-gap correction coefficients: plant_grad - model_grad."""
    pg = np.asarray(plant_grad, dtype=float).reshape(-1)
    mg = np.asarray(model_grad, dtype=float).reshape(-1)
    if pg.size != mg.size:
        raise ValueError(
            f"gradient length mismatch: plant {pg.size} vs model {mg.size}"
        )
    if not (np.all(np.isfinite(pg)) and np.all(np.isfinite(mg))):
        raise ValueError("gradients must be finite")
    return pg - mg


def filter_modifiers(raw_difference, previous, alpha: float) -> np.ndarray:
    """Exponentially smoothed correction: alpha*raw + (1-alpha)*previous."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    raw = np.asarray(raw_difference, dtype=float).reshape(-1)
    prev = np.asarray(previous, dtype=float).reshape(-1)
    if raw.size != prev.size:
        raise ValueError("raw_difference and previous must have equal length")
    return alpha * raw + (1.0 - alpha) * prev


class ModifierFilter:
    """Stateful smoothing of the correction coefficients across iterations.

    With gain 1 the update reduces to the raw gradient gap.  With gain
    below 1 the coefficients approach a constant raw gap geometrically
    with ratio (1 - gain), and the corrected gradient no longer matches
    the plant gradient exactly at the reference.
    """

    def __init__(self, alpha: float, dimension: int, initial=None):
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {alpha}")
        self.alpha = float(alpha)
        self.dimension = int(dimension)
        if initial is None:
            self.previous = np.zeros(dimension)
        else:
            self.previous = as_input_vector(initial, dimension)

    def update(self, plant_grad, model_grad) -> np.ndarray:
        raw = compute_modifiers(plant_grad, model_grad)
        self.previous = filter_modifiers(raw, self.previous, self.alpha)
        return self.previous.copy()


class CorrectedModel:
    """A model oracle plus linear correction, anchored at a reference point.

    Parameters
    ----------
    base_model : ScalarOracle
        The nominal model.
    modifiers : array
        Linear correction coefficients.
    anchor : array
        Reference point the correction was computed at.
    shift_enabled : bool
        When true, a constant is added so that ``value(anchor)`` equals
        ``plant_value_at_anchor`` exactly; requires that value.
    plant_value_at_anchor : float, optional
        Measured plant value at the anchor.
    """

    def __init__(
        self,
        base_model: ScalarOracle,
        modifiers,
        anchor,
        shift_enabled: bool = False,
        plant_value_at_anchor: float | None = None,
    ):
        self.base_model = base_model
        self.anchor = as_input_vector(anchor, base_model.dimension)
        self.modifiers = as_input_vector(modifiers, base_model.dimension)
        self.shift_enabled = bool(shift_enabled)
        if self.shift_enabled and plant_value_at_anchor is None:
            raise ValueError(
                "shift_enabled requires plant_value_at_anchor to be provided"
            )
        self.plant_value_at_anchor = (
            None if plant_value_at_anchor is None else float(plant_value_at_anchor)
        )
        # Cached once so value differences are identical under both forms.
        self._model_at_anchor = base_model.value(self.anchor)

    @property
    def dimension(self) -> int:
        return self.base_model.dimension

    def value(self, u) -> float:
        """Corrected value at u (shifted form when shift_enabled)."""
        u = as_input_vector(u, self.dimension)
        base = self.base_model.value(u)
        if self.shift_enabled:
            return (
                base
                + (self.plant_value_at_anchor - self._model_at_anchor)
                + float(self.modifiers @ (u - self.anchor))
            )
        return base + float(self.modifiers @ u)

    def gradient(self, u) -> np.ndarray:
        """Corrected gradient at u; identical under both shift modes."""
        u = as_input_vector(u, self.dimension)
        return self.base_model.gradient(u) + self.modifiers

    def value_change(self, u) -> float:
        """value(u) - value(anchor), computed in the shift-free difference
        form so both shift modes produce bit-identical results.
        """
        u = as_input_vector(u, self.dimension)
        return (
            self.base_model.value(u)
            - self._model_at_anchor
            + float(self.modifiers @ (u - self.anchor))
        )
