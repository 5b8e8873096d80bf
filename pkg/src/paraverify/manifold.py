"""Charts, expression-valued tensor fields, pseudo-Riemannian metrics and the
Levi-Civita connection evaluated at sample points.

Everything here is pointwise-numeric: expression fields are differentiated
exactly through hyper-dual evaluation, metric inversion goes through a pivoted
LU factorisation that fails loudly on degeneracy, and signatures are checked
against declared (positive, negative) eigenvalue counts at every sample.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from . import expressions as ex
from .errors import (
    DegenerateMetricError,
    SignatureMismatchError,
    UnsupportedValenceError,
)

PIVOT_FLOOR = 1e-12


@dataclass(frozen=True)
class Chart:
    """A coordinate chart: named coordinates with an open box domain."""

    name: str
    coords: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"chart {self.name!r} has duplicate coordinate names")
        if not (len(self.coords) == len(self.lower) == len(self.upper)):
            raise ValueError(f"chart {self.name!r}: coords/bounds length mismatch")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, name: str) -> int:
        return self.coords.index(name)

    def contains(self, point: Sequence[float]) -> bool:
        return all(lo < v < hi for v, lo, hi in zip(point, self.lower, self.upper))

    def parse(self, text: str) -> ex.ScalarExpr:
        return ex.parse_expression(text, self.coords)


def chart(name: str, coords: Iterable[str], box: Sequence[Sequence[float]] | None = None) -> Chart:
    """Convenience constructor; ``box`` defaults to all of R^n."""
    coords = tuple(coords)
    if box is None:
        box = [(-math.inf, math.inf)] * len(coords)
    lower = tuple(float(b[0]) for b in box)
    upper = tuple(float(b[1]) for b in box)
    return Chart(name, coords, lower, upper)


def sample_points(box: Sequence[Sequence[float]], n: int, rng: np.random.Generator) -> np.ndarray:
    """n points drawn uniformly from a finite box, one row per point."""
    if n < 1:
        raise ValueError("need at least 1 sample point")
    lows = np.array([b[0] for b in box], dtype=float)
    highs = np.array([b[1] for b in box], dtype=float)
    if not (np.all(np.isfinite(lows)) and np.all(np.isfinite(highs))):
        raise ValueError("sampling box must be finite")
    return rng.uniform(lows, highs, size=(n, len(box)))


def _as_expr_array(entries, shape, chart: "Chart | None" = None) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    flat_in = np.asarray(entries, dtype=object).reshape(-1)
    flat_out = arr.reshape(-1)
    for i, e in enumerate(flat_in):
        if isinstance(e, str):
            if chart is None:
                raise TypeError("string components need a chart to parse against")
            flat_out[i] = chart.parse(e)
        else:
            flat_out[i] = ex.as_expr(e)
    return arr


class TensorField:
    """Tensor field of valence (r, s) with ScalarExpr components.

    Components are indexed contravariant-first: a (1,1) field ``phi`` has
    ``phi.components[i][j]`` equal to the i-th component of the image of the
    j-th coordinate field.
    """

    def __init__(self, chart: Chart, r: int, s: int, components):
        self.chart = chart
        self.r = int(r)
        self.s = int(s)
        shape = (chart.dim,) * (self.r + self.s)
        self.components = _as_expr_array(components, shape, chart)

    @property
    def valence(self) -> tuple[int, int]:
        return (self.r, self.s)

    def value(self, point) -> np.ndarray:
        vals = [float(v) for v in point]
        out = np.empty(self.components.shape, dtype=float)
        flat = self.components.reshape(-1)
        oflat = out.reshape(-1)
        for i in range(flat.size):
            oflat[i] = flat[i].evaluate(vals)
        return out

    def partials(self, point) -> np.ndarray:
        """Array P with P[k, ...] the k-th partial of each component."""
        dim = self.chart.dim
        out = np.empty((dim,) + self.components.shape, dtype=float)
        flat = self.components.reshape(-1)
        oflat = out.reshape(dim, -1)
        for i in range(flat.size):
            grad = ex.gradient(flat[i], point)
            for k in range(dim):
                oflat[k, i] = grad[k]
        return out


def vector_field(chart: Chart, components) -> TensorField:
    comps = [chart.parse(c) if isinstance(c, str) else ex.as_expr(c) for c in components]
    return TensorField(chart, 1, 0, comps)


def covector_field(chart: Chart, components) -> TensorField:
    comps = [chart.parse(c) if isinstance(c, str) else ex.as_expr(c) for c in components]
    return TensorField(chart, 0, 1, comps)


def coordinate_field(chart: Chart, index: int) -> TensorField:
    return vector_field(chart, [1.0 if k == index else 0.0 for k in range(chart.dim)])


class MetricField:
    """Symmetric matrix of ScalarExpr entries with a declared signature."""

    def __init__(self, chart: Chart, entries, signature: tuple[int, int]):
        self.chart = chart
        dim = chart.dim
        arr = np.empty((dim, dim), dtype=object)
        rows = list(entries)
        for i in range(dim):
            row = list(rows[i])
            for j in range(dim):
                e = row[j]
                arr[i, j] = chart.parse(e) if isinstance(e, str) else ex.as_expr(e)
        for i in range(dim):
            for j in range(i + 1, dim):
                if arr[i, j].to_text() != arr[j, i].to_text():
                    raise ValueError(
                        f"metric entries ({i},{j}) and ({j},{i}) differ: "
                        f"{arr[i, j]} vs {arr[j, i]}"
                    )
                arr[j, i] = arr[i, j]
        self.entries = arr
        self.signature = (int(signature[0]), int(signature[1]))
        if sum(self.signature) != dim:
            raise ValueError("signature counts must sum to the chart dimension")

    @property
    def dim(self) -> int:
        return self.chart.dim

    def matrix(self, point) -> np.ndarray:
        vals = [float(v) for v in point]
        dim = self.dim
        out = np.empty((dim, dim), dtype=float)
        for i in range(dim):
            for j in range(i, dim):
                out[i, j] = out[j, i] = self.entries[i, j].evaluate(vals)
        return out

    def partials(self, point) -> np.ndarray:
        """D with D[k, i, j] the k-th partial of entry (i, j)."""
        dim = self.dim
        out = np.empty((dim, dim, dim), dtype=float)
        for i in range(dim):
            for j in range(i, dim):
                grad = ex.gradient(self.entries[i, j], point)
                for k in range(dim):
                    out[k, i, j] = out[k, j, i] = grad[k]
        return out

    def inverse(self, point) -> np.ndarray:
        return invert_spd_or_fail(self.matrix(point))

    def check_signature(self, point) -> None:
        """Raise unless eigenvalue signs match the declared signature."""
        m = self.matrix(point)
        eig = np.linalg.eigvalsh(m)
        scale = float(np.max(np.abs(eig)))
        if scale == 0.0 or np.min(np.abs(eig)) < PIVOT_FLOOR * max(1.0, scale):
            raise DegenerateMetricError(
                f"metric eigenvalues {eig} numerically singular at {list(point)}"
            )
        pos = int(np.sum(eig > 0.0))
        neg = int(np.sum(eig < 0.0))
        if (pos, neg) != self.signature:
            raise SignatureMismatchError(
                f"metric signature ({pos},{neg}) at {list(point)} does not match "
                f"declared {self.signature}"
            )


def invert_spd_or_fail(matrix: np.ndarray) -> np.ndarray:
    """Invert via pivoted LU; tiny pivots signal a degenerate metric."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # singularity is handled by the pivot check
        lu, piv = lu_factor(matrix)
    pivots = np.abs(np.diag(lu))
    if pivots.size and float(np.min(pivots)) < PIVOT_FLOOR:
        raise DegenerateMetricError(
            f"LU pivot {float(np.min(pivots)):.3e} below {PIVOT_FLOOR:.0e}"
        )
    return lu_solve((lu, piv), np.eye(matrix.shape[0]))


def christoffel(g: MetricField, point) -> np.ndarray:
    """Levi-Civita connection coefficients C[k, i, j] at a point.

    C[k, i, j] = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij}),
    symmetric in (i, j).
    """
    ginv = g.inverse(point)
    D = g.partials(point)
    C = np.einsum("ijl->ijl", D) + np.einsum("jil->ijl", D) - np.einsum("lij->ijl", D)
    return 0.5 * np.einsum("kl,ijl->kij", ginv, C)


def cov_deriv_vector(g: MetricField, X: TensorField, Y: TensorField, point) -> np.ndarray:
    """(nabla_X Y)^k = X^i d_i Y^k + Gamma^k_{ij} X^i Y^j at a point."""
    gamma = christoffel(g, point)
    Xv = X.value(point)
    Yv = Y.value(point)
    dY = Y.partials(point)
    return np.einsum("i,ik->k", Xv, dY) + np.einsum("kij,i,j->k", gamma, Xv, Yv)


def cov_deriv_tensor(g: MetricField, T: TensorField, direction: int, point) -> np.ndarray:
    """Covariant derivative of a (0, s) tensor, s in {1, 2}, along one coordinate."""
    if T.valence == (0, 1):
        gamma = christoffel(g, point)
        dT = T.partials(point)
        Tv = T.value(point)
        return dT[direction] - np.einsum("li,l->i", gamma[:, direction, :], Tv)
    if T.valence == (0, 2):
        gamma = christoffel(g, point)
        dT = T.partials(point)
        Tv = T.value(point)
        corr1 = np.einsum("li,lj->ij", gamma[:, direction, :], Tv)
        corr2 = np.einsum("lj,il->ij", gamma[:, direction, :], Tv)
        return dT[direction] - corr1 - corr2
    raise UnsupportedValenceError(f"covariant derivative unsupported for valence {T.valence}")


def cov_deriv_covector_all(g: MetricField, T: TensorField, point) -> np.ndarray:
    """All components (nabla_k T)_i for a (0,1) field."""
    gamma = christoffel(g, point)
    dT = T.partials(point)
    Tv = T.value(point)
    return dT - np.einsum("lki,l->ki", gamma, Tv)


def cov_deriv_two_form_all(g: MetricField, T: TensorField, point) -> np.ndarray:
    """All components (nabla_k T)_{ij} for a (0,2) field."""
    gamma = christoffel(g, point)
    dT = T.partials(point)
    Tv = T.value(point)
    return dT - np.einsum("lki,lj->kij", gamma, Tv) - np.einsum("lkj,il->kij", gamma, Tv)


def cov_deriv_mixed_all(g: MetricField, T: TensorField, point) -> np.ndarray:
    """All components (nabla_k T)^i_j for a (1,1) field."""
    gamma = christoffel(g, point)
    dT = T.partials(point)
    Tv = T.value(point)
    return dT + np.einsum("ikl,lj->kij", gamma, Tv) - np.einsum("lkj,il->kij", gamma, Tv)


def lie_bracket(X: TensorField, Y: TensorField, point) -> np.ndarray:
    """[X, Y]^k = X^i d_i Y^k - Y^i d_i X^k at a point."""
    Xv = X.value(point)
    Yv = Y.value(point)
    dX = X.partials(point)
    dY = Y.partials(point)
    return np.einsum("i,ik->k", Xv, dY) - np.einsum("i,ik->k", Yv, dX)


def metric_compatibility_residual(
    g: MetricField, X: TensorField, Y: TensorField, Z: TensorField, point
) -> float:
    """| X g(Y,Z) - g(nabla_X Y, Z) - g(Y, nabla_X Z) | at a point."""
    gm = g.matrix(point)
    dg = g.partials(point)
    Xv, Yv, Zv = X.value(point), Y.value(point), Z.value(point)
    dY, dZ = Y.partials(point), Z.partials(point)
    lhs = (
        np.einsum("k,kij,i,j->", Xv, dg, Yv, Zv)
        + np.einsum("k,ij,ki,j->", Xv, gm, dY, Zv)
        + np.einsum("k,ij,i,kj->", Xv, gm, Yv, dZ)
    )
    nxy = cov_deriv_vector(g, X, Y, point)
    nxz = cov_deriv_vector(g, X, Z, point)
    rhs = float(nxy @ gm @ Zv + Yv @ gm @ nxz)
    return abs(float(lhs) - rhs)


def torsion_residual(g: MetricField, X: TensorField, Y: TensorField, point) -> float:
    """max | nabla_X Y - nabla_Y X - [X, Y] | at a point."""
    r = cov_deriv_vector(g, X, Y, point) - cov_deriv_vector(g, Y, X, point) - lie_bracket(X, Y, point)
    return float(np.max(np.abs(r)))
