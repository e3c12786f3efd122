"""Two-regressor linear model: design statistics, data generation, closed-form fits.

The data model is y_t = alpha * x_t1 + beta * x_t2 + e_t with e_t iid N(0, sigma^2)
and a fixed (non-random) design. Everything downstream (weights, estimators,
resampling) is built on the five cached design inner products held in
``DesignStats`` and the two closed-form least-squares fits below.
"""

from __future__ import annotations

import csv
import importlib.resources
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CollinearDesign, ZeroColumn

# A design is treated as collinear when det <= COLLINEARITY_RTOL * s11 * s22.
# Scale-relative so that resampled designs are judged on their own magnitude.
COLLINEARITY_RTOL = 1e-12

# Seed used to generate the shipped n=50 reference design (data/design_n50.csv).
REFERENCE_DESIGN_SEED = 5050


def _inner(a: np.ndarray, b: np.ndarray) -> float:
    # np.sum reduces pairwise, which keeps the closed-form identity checks
    # within 1e-10 even for designs with n up to 1e5.
    return float(np.sum(a * b))


def _validated_column(x, name: str) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a one-dimensional vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DesignMatrix:
    """Fixed regressor columns x1 and x2 of common length n >= 2."""

    x1: np.ndarray
    x2: np.ndarray

    def __post_init__(self):
        x1 = _validated_column(self.x1, "x1")
        x2 = _validated_column(self.x2, "x2")
        if x1.size != x2.size:
            raise ValueError(f"column lengths differ: {x1.size} vs {x2.size}")
        if x1.size < 2:
            raise ValueError("design needs at least two observations")
        if not x1.any():
            raise ZeroColumn("x1 is identically zero")
        if not x2.any():
            raise ZeroColumn("x2 is identically zero")
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)

    @property
    def n(self) -> int:
        return self.x1.size

    def rows(self, idx: np.ndarray) -> "DesignMatrix":
        """Design made of rows ``idx`` (used by resampling; may repeat rows)."""
        return DesignMatrix(self.x1[idx], self.x2[idx])


@dataclass(frozen=True)
class TrueParams:
    """Data-generating parameters (sigma is the known noise sd; 0 = noiseless)."""

    alpha: float
    beta: float
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma >= 0.0:
            raise ValueError("sigma must be >= 0")


@dataclass(frozen=True)
class DesignStats:
    """Cached design inner products.

    s11 = <x1, x1>, s22 = <x2, x2>, s12 = <x1, x2>,
    det = s11 * s22 - s12**2, and sigma_beta = sigma * sqrt(s11 / det),
    the exact standard deviation of the unrestricted slope estimate.
    """

    s11: float
    s22: float
    s12: float
    det: float
    sigma_beta: float

    def __post_init__(self):
        if not self.s11 > 0.0:
            raise ZeroColumn("s11 must be positive")
        if not self.det >= 0.0:
            raise ValueError("det must be non-negative")


@dataclass(frozen=True)
class Dataset:
    """A design paired with a response vector of matching length."""

    design: DesignMatrix
    y: np.ndarray

    def __post_init__(self):
        y = _validated_column(self.y, "y")
        if y.size != self.design.n:
            raise ValueError(f"y has length {y.size}, design has n={self.design.n}")
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.design.n

    def rows(self, idx: np.ndarray) -> "Dataset":
        """Dataset made of (x, y) rows ``idx`` (paired resampling)."""
        return Dataset(self.design.rows(idx), self.y[idx])


@dataclass(frozen=True)
class UnrestrictedFit:
    """Least-squares estimates under the full two-regressor model."""

    alpha_u: float
    beta_u: float


def compute_design_stats(design: DesignMatrix, sigma: float) -> DesignStats:
    """Exact inner products and the sd of the unrestricted slope estimate.

    Raises ZeroColumn when ||x1||^2 vanishes and CollinearDesign when the Gram
    determinant is zero up to the scale-relative tolerance.
    """
    if not sigma >= 0.0:
        raise ValueError("sigma must be >= 0")
    s11 = _inner(design.x1, design.x1)
    s22 = _inner(design.x2, design.x2)
    s12 = _inner(design.x1, design.x2)
    if s11 <= 0.0:
        raise ZeroColumn("||x1||^2 is zero")
    det = s11 * s22 - s12 * s12
    if det <= COLLINEARITY_RTOL * s11 * s22:
        raise CollinearDesign(f"design determinant {det!r} is zero up to tolerance")
    sigma_beta = sigma * np.sqrt(s11) / np.sqrt(det)
    return DesignStats(s11=s11, s22=s22, s12=s12, det=det, sigma_beta=float(sigma_beta))


def generate_response(
    design: DesignMatrix, params: TrueParams, rng: np.random.Generator
) -> Dataset:
    """Draw y = alpha*x1 + beta*x2 + sigma*z with z iid standard normal from rng."""
    z = rng.standard_normal(design.n)
    y = params.alpha * design.x1 + params.beta * design.x2 + params.sigma * z
    return Dataset(design, y)


def fit_unrestricted(dataset: Dataset, stats: DesignStats) -> UnrestrictedFit:
    """Closed-form 2x2 normal-equation solve for (alpha_u, beta_u)."""
    if not stats.det > 0.0:
        raise CollinearDesign("unrestricted fit needs det > 0")
    p1 = _inner(dataset.design.x1, dataset.y)
    p2 = _inner(dataset.design.x2, dataset.y)
    alpha_u = (stats.s22 * p1 - stats.s12 * p2) / stats.det
    beta_u = (stats.s11 * p2 - stats.s12 * p1) / stats.det
    return UnrestrictedFit(alpha_u=alpha_u, beta_u=beta_u)


def fit_restricted(dataset: Dataset, stats: DesignStats) -> float:
    """Least-squares slope on x1 alone: <x1, y> / ||x1||^2."""
    if not stats.s11 > 0.0:
        raise ZeroColumn("restricted fit needs ||x1||^2 > 0")
    return _inner(dataset.design.x1, dataset.y) / stats.s11


def make_uniform_design(n: int, rng: np.random.Generator) -> DesignMatrix:
    """Intercept column plus n Uniform(0, 3) draws, frozen thereafter.

    The uniform column is redrawn on the measure-zero event that the resulting
    design is numerically collinear.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    x1 = np.ones(n)
    for _ in range(100):
        x2 = rng.uniform(0.0, 3.0, size=n)
        design = DesignMatrix(x1, x2)
        try:
            compute_design_stats(design, 1.0)
        except CollinearDesign:
            continue
        return design
    raise CollinearDesign("could not draw a non-collinear uniform design")


def write_design_csv(design: DesignMatrix, path) -> None:
    """Persist a design as CSV with header i,x1,x2 at full precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "x1", "x2"])
        for i in range(design.n):
            writer.writerow([i + 1, repr(float(design.x1[i])), repr(float(design.x2[i]))])


def read_design_csv(path) -> DesignMatrix:
    """Load a design written by :func:`write_design_csv`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["i", "x1", "x2"]:
            raise ValueError(f"unexpected design CSV header: {header}")
        x1, x2 = [], []
        for row in reader:
            x1.append(float(row[1]))
            x2.append(float(row[2]))
    return DesignMatrix(np.asarray(x1), np.asarray(x2))


def load_reference_design() -> DesignMatrix:
    """The shipped n=50 reference design (see REFERENCE_DESIGN_SEED)."""
    ref = importlib.resources.files("modelavg").joinpath("data/design_n50.csv")
    with importlib.resources.as_file(ref) as path:
        return read_design_csv(Path(path))
