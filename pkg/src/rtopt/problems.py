"""Simulated plant/model pairs with known mismatch character.

A *plant* is the ground-truth objective that an iterative run probes one
point at a time; a *model* is the closed-form surrogate the optimizer is
allowed to evaluate freely.  Each catalog entry bundles the two, together
with the analytically known plant optimum where one exists.  Plant
evaluations can optionally be perturbed by seeded additive Gaussian noise;
models are always exact.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import OracleError

__all__ = [
    "ScalarOracle",
    "ProblemPair",
    "AssumptionReport",
    "finite_difference_gradient",
    "finite_difference_hessian",
    "probe_assumptions",
    "get_problem",
    "list_problems",
    "PROBLEM_IDS",
]


def as_input_vector(u, dimension: int | None = None) -> np.ndarray:
    """Validate and copy a decision-variable vector.

    Raises ValueError on wrong shape, wrong length, or non-finite entries.
    """
    arr = np.array(u, dtype=float, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"input must be a 1-D vector, got shape {arr.shape}")
    if dimension is not None and arr.size != dimension:
        raise ValueError(
            f"dimension mismatch: expected length {dimension}, got {arr.size}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError("input vector contains non-finite components")
    return arr


class ScalarOracle:
    """A scalar function with its gradient, instrumented with call counters.

    Parameters
    ----------
    value_fn : callable
        Maps a length-``dimension`` vector to a float.
    grad_fn : callable
        Maps a length-``dimension`` vector to a length-``dimension`` array.
    dimension : int
        Expected input length.

    Every ``value``/``gradient`` call increments the corresponding counter
    by exactly one.  Non-finite results raise :class:`OracleError`.
    """

    def __init__(self, value_fn: Callable, grad_fn: Callable, dimension: int):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self._value_fn = value_fn
        self._grad_fn = grad_fn
        self.dimension = int(dimension)
        self.value_calls = 0
        self.gradient_calls = 0

    def value(self, u) -> float:
        u = as_input_vector(u, self.dimension)
        self.value_calls += 1
        out = float(self._value_fn(u))
        if not math.isfinite(out):
            raise OracleError(f"oracle value is non-finite at u={u!r}")
        return out

    def gradient(self, u) -> np.ndarray:
        u = as_input_vector(u, self.dimension)
        self.gradient_calls += 1
        out = np.asarray(self._grad_fn(u), dtype=float).reshape(-1)
        if out.size != self.dimension:
            raise OracleError(
                f"gradient length {out.size} does not match dimension {self.dimension}"
            )
        if not np.all(np.isfinite(out)):
            raise OracleError(f"oracle gradient is non-finite at u={u!r}")
        return out

    def reset_counters(self) -> None:
        self.value_calls = 0
        self.gradient_calls = 0


class ProblemPair:
    """A plant oracle bundled with its (deliberately mismatched) model.

    Plant values and gradients are perturbed by additive Gaussian noise of
    standard deviation ``noise_level`` drawn from a generator seeded at
    construction, so noisy runs are reproducible.  With ``noise_level`` 0
    repeated evaluation at the same point is bit-identical.  The model is
    never noisy.

    Noiseless pairs are stateless apart from the call counters and may be
    shared across concurrent read-only runs when per-run counts are not
    needed; a noisy pair carries generator state and belongs to one run.
    """

    def __init__(
        self,
        identifier: str,
        plant: ScalarOracle,
        model: ScalarOracle,
        known_optimum=None,
        noise_level: float = 0.0,
        seed: int = 0,
        label: str = "",
    ):
        if plant.dimension != model.dimension:
            raise ValueError("plant and model dimensions differ")
        if noise_level < 0:
            raise ValueError("noise_level must be >= 0")
        self.identifier = identifier
        self.label = label
        self.dimension = plant.dimension
        self.plant = plant
        self.model = model
        self.known_optimum = (
            None if known_optimum is None else as_input_vector(known_optimum, self.dimension)
        )
        self.noise_level = float(noise_level)
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)

    def evaluate_plant(self, u) -> float:
        val = self.plant.value(u)
        if self.noise_level > 0.0:
            val += self.noise_level * self._rng.standard_normal()
        return val

    def plant_gradient(self, u) -> np.ndarray:
        grad = self.plant.gradient(u)
        if self.noise_level > 0.0:
            grad = grad + self.noise_level * self._rng.standard_normal(self.dimension)
        return grad

    def evaluate_model(self, u) -> float:
        return self.model.value(u)

    def model_gradient(self, u) -> np.ndarray:
        return self.model.gradient(u)

    def plant_evaluations(self) -> tuple[int, int]:
        """(value calls, gradient calls) made against the plant so far."""
        return self.plant.value_calls, self.plant.gradient_calls


def finite_difference_gradient(oracle: ScalarOracle, u, step: float) -> np.ndarray:
    """Central-difference gradient estimate, component i equal to
    ``[f(u + step*e_i) - f(u - step*e_i)] / (2*step)``.
    """
    if step <= 0:
        raise ValueError("step must be > 0")
    u = as_input_vector(u, oracle.dimension)
    out = np.empty(oracle.dimension)
    for i in range(oracle.dimension):
        e = np.zeros(oracle.dimension)
        e[i] = step
        out[i] = (oracle.value(u + e) - oracle.value(u - e)) / (2.0 * step)
    return out


def finite_difference_hessian(oracle: ScalarOracle, u, step: float = 1e-4) -> np.ndarray:
    """Central second-difference Hessian estimate (symmetrized)."""
    if step <= 0:
        raise ValueError("step must be > 0")
    u = as_input_vector(u, oracle.dimension)
    n = oracle.dimension
    h = np.empty((n, n))
    f0 = oracle.value(u)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step
        h[i, i] = (oracle.value(u + ei) - 2.0 * f0 + oracle.value(u - ei)) / step**2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = step
            cross = (
                oracle.value(u + ei + ej)
                - oracle.value(u + ei - ej)
                - oracle.value(u - ei + ej)
                + oracle.value(u - ei - ej)
            ) / (4.0 * step**2)
            h[i, j] = cross
            h[j, i] = cross
    return h


class AssumptionReport:
    """Sampled evidence about smoothness and boundedness of a problem pair.

    Advisory only: finite sampling cannot prove a global curvature bound,
    and on problems whose Hessian grows without bound the estimate simply
    reflects the box that was probed.
    """

    def __init__(
        self,
        plant_hessian_bound: float,
        model_hessian_bound: float,
        min_plant_value: float,
        max_gradient_discrepancy: float,
        sample_count: int,
    ):
        self.plant_hessian_bound = plant_hessian_bound
        self.model_hessian_bound = model_hessian_bound
        self.min_plant_value = min_plant_value
        self.max_gradient_discrepancy = max_gradient_discrepancy
        self.sample_count = sample_count

    def __repr__(self):
        return (
            f"AssumptionReport(plant_hessian_bound={self.plant_hessian_bound:.6g}, "
            f"model_hessian_bound={self.model_hessian_bound:.6g}, "
            f"min_plant_value={self.min_plant_value:.6g}, "
            f"max_gradient_discrepancy={self.max_gradient_discrepancy:.3g}, "
            f"sample_count={self.sample_count})"
        )


def probe_assumptions(
    problem: ProblemPair,
    box: tuple,
    sample_count: int,
    seed: int = 0,
    hessian_step: float = 1e-4,
    gradient_step: float = 1e-5,
) -> AssumptionReport:
    """Sample a box and report curvature bounds, the minimum plant value,
    and the worst analytic-vs-finite-difference gradient discrepancy.

    Probes the raw oracles: measurement noise is never applied, since
    difference quotients of noisy values would say nothing about the
    underlying functions.
    """
    lower = as_input_vector(box[0], problem.dimension)
    upper = as_input_vector(box[1], problem.dimension)
    if np.any(lower >= upper):
        raise ValueError("degenerate box: require lower < upper componentwise")
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")

    rng = np.random.default_rng(seed)
    plant_bound = 0.0
    model_bound = 0.0
    min_value = math.inf
    max_discrepancy = 0.0
    for _ in range(sample_count):
        u = lower + rng.random(problem.dimension) * (upper - lower)
        hp = finite_difference_hessian(problem.plant, u, hessian_step)
        hm = finite_difference_hessian(problem.model, u, hessian_step)
        plant_bound = max(plant_bound, float(np.max(np.abs(np.linalg.eigvalsh(hp)))))
        model_bound = max(model_bound, float(np.max(np.abs(np.linalg.eigvalsh(hm)))))
        min_value = min(min_value, problem.plant.value(u))
        fd = finite_difference_gradient(problem.plant, u, gradient_step)
        reference = problem.plant.gradient(u)
        max_discrepancy = max(max_discrepancy, float(np.max(np.abs(fd - reference))))
    return AssumptionReport(
        plant_hessian_bound=plant_bound,
        model_hessian_bound=model_bound,
        min_plant_value=min_value,
        max_gradient_discrepancy=max_discrepancy,
        sample_count=sample_count,
    )


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def _p1_plant(u):
    return (u[0] - 1.0) ** 2 + (u[1] - 1.0) ** 2


def _p1_plant_grad(u):
    return 2.0 * (u - 1.0)


def _sphere(u):
    return float(np.dot(u, u))


def _sphere_grad(u):
    return 2.0 * u


def _p2_plant(u):
    return u[0] ** 2


def _p2_plant_grad(u):
    return 2.0 * u


def _p2_model(u):
    return -(u[0] ** 2)


def _p2_model_grad(u):
    return -2.0 * u


def _rosenbrock(u):
    return 100.0 * (u[1] - u[0] ** 2) ** 2 + (1.0 - u[0]) ** 2


def _rosenbrock_grad(u):
    return np.array(
        [
            -400.0 * u[0] * (u[1] - u[0] ** 2) - 2.0 * (1.0 - u[0]),
            200.0 * (u[1] - u[0] ** 2),
        ]
    )


def _himmelblau(u):
    return (u[0] ** 2 + u[1] - 11.0) ** 2 + (u[0] + u[1] ** 2 - 7.0) ** 2


def _himmelblau_grad(u):
    a = u[0] ** 2 + u[1] - 11.0
    b = u[0] + u[1] ** 2 - 7.0
    return np.array([4.0 * u[0] * a + 2.0 * b, 2.0 * a + 4.0 * u[1] * b])


_CATALOG = {
    # identifier: (label, dim, plant fns, model fns, known optimum)
    "P1": (
        "biased-quadratic",
        2,
        (_p1_plant, _p1_plant_grad),
        (_sphere, _sphere_grad),
        (1.0, 1.0),
    ),
    "P2": (
        "wrong-curvature",
        1,
        (_p2_plant, _p2_plant_grad),
        (_p2_model, _p2_model_grad),
        (0.0,),
    ),
    "P3": (
        "rosenbrock-plant",
        2,
        (_rosenbrock, _rosenbrock_grad),
        (_sphere, _sphere_grad),
        (1.0, 1.0),
    ),
    "P4": (
        "himmelblau-plant",
        2,
        (_himmelblau, _himmelblau_grad),
        (_sphere, _sphere_grad),
        (3.0, 2.0),
    ),
}

_BY_LABEL = {entry[0]: key for key, entry in _CATALOG.items()}

PROBLEM_IDS = tuple(_CATALOG)


def list_problems() -> list[tuple[str, str, int]]:
    """(identifier, label, dimension) for every catalog entry."""
    return [(key, entry[0], entry[1]) for key, entry in _CATALOG.items()]


def get_problem(identifier: str, noise_level: float = 0.0, seed: int = 0) -> ProblemPair:
    """Build a fresh catalog problem (fresh oracles, zeroed counters).

    ``identifier`` may be the short id ("P1") or the descriptive label
    ("biased-quadratic").
    """
    key = identifier if identifier in _CATALOG else _BY_LABEL.get(identifier)
    if key is None:
        known = ", ".join(_CATALOG)
        raise KeyError(f"unknown problem {identifier!r}; catalog has: {known}")
    label, dim, plant_fns, model_fns, optimum = _CATALOG[key]
    return ProblemPair(
        identifier=key,
        plant=ScalarOracle(plant_fns[0], plant_fns[1], dim),
        model=ScalarOracle(model_fns[0], model_fns[1], dim),
        known_optimum=optimum,
        noise_level=noise_level,
        seed=seed,
        label=label,
    )
