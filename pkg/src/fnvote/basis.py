"""Clamped B-spline bases: construction, evaluation, and least-squares fitting.

A basis is described by a ``BasisSpec`` (degree p, K functions, knot vector).
Discrete curves are projected onto the basis by solving the normal equations,
turning each curve into a K-vector of coefficients; those vectors are the
feature space for every classifier in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import DataError, DomainError, ShapeError, SpecError

RIDGE_JITTER = 1e-10


@dataclass(frozen=True)
class RawSeries:
    """One discrete curve: values observed on a strictly increasing time grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if grid.ndim != 1 or values.ndim != 1:
            raise ShapeError("grid and values must be one-dimensional")
        if grid.shape != values.shape:
            raise ShapeError(
                f"grid length {grid.size} != values length {values.size}"
            )
        if grid.size < 2:
            raise DataError("a series needs at least two observations")
        if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
            raise DataError("series contains non-finite entries")
        if np.any(np.diff(grid) <= 0):
            raise DataError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.grid.size


@dataclass(frozen=True)
class BasisSpec:
    """A clamped B-spline basis of ``num_basis`` functions of given degree.

    The knot vector has length K + p + 1 with the domain endpoints repeated
    p + 1 times, so the basis is a partition of unity on the closed domain
    and interpolates endpoint coefficients.
    """

    degree: int
    num_basis: int
    knots: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        p, k = self.degree, self.num_basis
        if p < 0:
            raise SpecError("degree must be non-negative")
        if k < p + 1:
            raise SpecError(f"num_basis {k} must be at least degree+1 = {p + 1}")
        a, b = float(self.domain[0]), float(self.domain[1])
        if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
            raise SpecError(f"invalid domain [{a}, {b}]")
        knots = np.asarray(self.knots, dtype=np.float64)
        if knots.ndim != 1 or knots.size != k + p + 1:
            raise SpecError(
                f"knot vector must have length K+p+1 = {k + p + 1}, got {knots.size}"
            )
        if np.any(np.diff(knots) < 0):
            raise SpecError("knots must be non-decreasing")
        if np.any(knots[: p + 1] != a) or np.any(knots[-(p + 1):] != b):
            raise SpecError("knots must be clamped: endpoints repeated degree+1 times")
        interior = knots[p + 1: k]
        if interior.size and (interior[0] <= a or interior[-1] >= b):
            raise SpecError("interior knots must lie strictly inside the domain")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "domain", (a, b))


@dataclass(frozen=True)
class FitDiagnostics:
    """Per-curve fit quality: L2 residual and whether ridge jitter was needed."""

    residual_norm: float
    condition_flag: bool = False


@dataclass(frozen=True)
class CoefficientMatrix:
    """N x K matrix of fitted basis coefficients plus the producing spec."""

    entries: np.ndarray
    spec: BasisSpec

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 2:
            raise ShapeError("coefficient entries must be a 2-d matrix")
        if entries.shape[1] != self.spec.num_basis:
            raise ShapeError(
                f"coefficient columns {entries.shape[1]} != num_basis "
                f"{self.spec.num_basis}"
            )
        if not np.all(np.isfinite(entries)):
            raise DataError("coefficient matrix contains non-finite entries")
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def make_knots(domain, num_basis: int, degree: int) -> np.ndarray:
    """Clamped-uniform knot vector: endpoint multiplicity degree+1,
    K-degree-1 interior knots equally spaced in the open domain."""
    a, b = float(domain[0]), float(domain[1])
    if a >= b:
        raise SpecError(f"invalid domain [{a}, {b}]: lower bound must be smaller")
    if degree < 0:
        raise SpecError("degree must be non-negative")
    if num_basis < degree + 1:
        raise SpecError(
            f"num_basis {num_basis} must be at least degree+1 = {degree + 1}"
        )
    interior = np.linspace(a, b, num_basis - degree + 1)[1:-1]
    return np.concatenate([
        np.full(degree + 1, a),
        interior,
        np.full(degree + 1, b),
    ])


def uniform_spec(domain, num_basis: int, degree: int) -> BasisSpec:
    """BasisSpec with the clamped-uniform knots of ``make_knots``."""
    a, b = float(domain[0]), float(domain[1])
    return BasisSpec(degree, num_basis, make_knots((a, b), num_basis, degree), (a, b))


def _check_in_domain(spec: BasisSpec, t: np.ndarray) -> None:
    a, b = spec.domain
    if t.size and (t.min() < a or t.max() > b):
        bad = t[(t < a) | (t > b)][0]
        raise DomainError(f"point {bad} outside basis domain [{a}, {b}]")


def _nonzero_basis(spec: BasisSpec, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spans and the degree+1 non-vanishing basis values at each point.

    Returns ``(spans, vals)`` where ``vals[i, j]`` is basis function
    ``spans[i] - degree + j`` evaluated at ``t[i]``.  Points must already be
    inside the domain.  At the right endpoint the last span is used, which
    makes the final basis function evaluate to 1 there (closed-right
    convention).
    """
    p, k, knots = spec.degree, spec.num_basis, spec.knots
    spans = np.searchsorted(knots, t, side="right") - 1
    np.clip(spans, p, k - 1, out=spans)

    m = t.size
    vals = np.zeros((m, p + 1))
    vals[:, 0] = 1.0
    left = np.empty((m, p + 1))
    right = np.empty((m, p + 1))
    for j in range(1, p + 1):
        left[:, j] = t - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - t
        saved = np.zeros(m)
        for r in range(j):
            denom = right[:, r + 1] + left[:, j - r]
            temp = vals[:, r] / denom
            vals[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        vals[:, j] = saved
    return spans, vals


def basis_matrix(spec: BasisSpec, grid) -> np.ndarray:
    """P x K matrix of every basis function evaluated at every grid point."""
    t = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    _check_in_domain(spec, t)
    spans, vals = _nonzero_basis(spec, t)
    p = spec.degree
    out = np.zeros((t.size, spec.num_basis))
    rows = np.arange(t.size)[:, None]
    cols = spans[:, None] - p + np.arange(p + 1)[None, :]
    out[rows, cols] = vals
    return out


def bspline_eval(spec: BasisSpec, k: int, t: float) -> float:
    """Value of basis function ``k`` (0-based) at ``t`` via the Cox-de Boor
    recursion, organised as a single-span triangular sweep."""
    if not 0 <= k < spec.num_basis:
        raise IndexError(f"basis index {k} out of range 0..{spec.num_basis - 1}")
    ts = np.asarray([float(t)])
    _check_in_domain(spec, ts)
    spans, vals = _nonzero_basis(spec, ts)
    offset = k - (int(spans[0]) - spec.degree)
    if 0 <= offset <= spec.degree:
        return float(vals[0, offset])
    return 0.0


def eval_spline(spec: BasisSpec, coefficients, t):
    """Evaluate the spline sum(c_k * B_k) at a point or array of points."""
    c = np.asarray(coefficients, dtype=np.float64)
    if c.shape != (spec.num_basis,):
        raise ShapeError(
            f"expected {spec.num_basis} coefficients, got shape {c.shape}"
        )
    scalar = np.isscalar(t) or np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
    _check_in_domain(spec, ts)
    spans, vals = _nonzero_basis(spec, ts)
    cols = spans[:, None] - spec.degree + np.arange(spec.degree + 1)[None, :]
    out = np.einsum("ij,ij->i", vals, c[cols])
    return float(out[0]) if scalar else out


def _solve_normal_equations(bmat: np.ndarray, rhs: np.ndarray):
    """Solve B'B c = B'y by Cholesky, falling back to a ridge-jittered system
    when the Gram matrix is rank deficient or the fit is underdetermined.

    ``rhs`` may hold several curves as columns.  Returns (coefficients, flag).
    """
    gram = bmat.T @ bmat
    proj = bmat.T @ rhs
    flagged = bmat.shape[0] < bmat.shape[1]
    if not flagged:
        try:
            return cho_solve(cho_factor(gram), proj), False
        except LinAlgError:
            flagged = True
    gram = gram + RIDGE_JITTER * np.eye(gram.shape[0])
    return cho_solve(cho_factor(gram), proj), flagged


def fit_coefficients(series: RawSeries, spec: BasisSpec):
    """Least-squares basis coefficients for one curve.

    Returns ``(coefficients, FitDiagnostics)``.  Rank-deficient or P < K
    systems are solved with a ridge jitter on the normal equations and
    flagged rather than rejected.
    """
    bmat = basis_matrix(spec, series.grid)
    coeffs, flagged = _solve_normal_equations(bmat, series.values)
    if not np.all(np.isfinite(coeffs)):
        raise DataError("least-squares solve produced non-finite coefficients")
    residual = float(np.linalg.norm(series.values - bmat @ coeffs))
    return coeffs, FitDiagnostics(residual_norm=residual, condition_flag=flagged)


def smooth_dataset(dataset, spec: BasisSpec) -> CoefficientMatrix:
    """Fit every curve of a dataset onto the basis; row i holds curve i.

    Curves sharing an identical grid are solved in one batched factorization.
    Failures are re-raised with the offending row index attached.
    """
    series = dataset.series
    if len(series) == 0:
        raise DataError("cannot smooth an empty dataset")
    entries = np.empty((len(series), spec.num_basis))

    groups: dict[bytes, list[int]] = {}
    for i, s in enumerate(series):
        groups.setdefault(s.grid.tobytes(), []).append(i)

    for rows in groups.values():
        grid = series[rows[0]].grid
        try:
            bmat = basis_matrix(spec, grid)
            stacked = np.column_stack([series[i].values for i in rows])
            coeffs, _ = _solve_normal_equations(bmat, stacked)
        except DomainError as exc:
            raise DomainError(f"row {rows[0]}: {exc}") from exc
        except (DataError, LinAlgError) as exc:
            raise DataError(f"row {rows[0]}: {exc}") from exc
        if not np.all(np.isfinite(coeffs)):
            raise DataError(f"row {rows[0]}: non-finite coefficients")
        entries[rows, :] = coeffs.T
    return CoefficientMatrix(entries=entries, spec=spec)
