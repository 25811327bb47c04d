"""Rectangular grids, the generalized area energy, and singular-set tools.

Scalar unknowns live on grid nodes; gradients, drift fields and energy
densities live at cell centers.  The cell-centered gradient is the average
of the four surrounding forward differences, which is exact on affine
functions — that exactness is the calibration requirement for everything
downstream (plane reproduction, measure consistency).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .measures import VectorMeasure
from .util import g17, pairwise_sum, rotate_pairs


@dataclass(frozen=True)
class GridDomain:
    """Axis-aligned box [x0,x1] x [y0,y1] split into n_cells per axis.

    The data model is dimension-generic but the operations below support
    m = 2.  Nodal arrays have shape (nx+1, ny+1), cell arrays (nx, ny),
    both indexed [i, j] with i along the first axis.
    """

    extents: tuple[tuple[float, float], ...]
    n_cells: tuple[int, ...]

    def __post_init__(self):
        if len(self.extents) != len(self.n_cells):
            raise ValueError("extents and n_cells disagree on dimension")
        for (lo, hi), n in zip(self.extents, self.n_cells):
            if not hi > lo:
                raise ValueError("each extent must be a nondegenerate interval")
            if n < 2:
                raise ValueError("need at least 2 cells per axis")

    @property
    def m(self) -> int:
        return len(self.extents)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            (hi - lo) / n for (lo, hi), n in zip(self.extents, self.n_cells)
        )

    @property
    def h_max(self) -> float:
        return max(self.spacing)

    @property
    def cell_volume(self) -> float:
        v = 1.0
        for h in self.spacing:
            v *= h
        return v

    def axis_nodes(self, k: int) -> np.ndarray:
        lo, hi = self.extents[k]
        return np.linspace(lo, hi, self.n_cells[k] + 1)

    def axis_centers(self, k: int) -> np.ndarray:
        nodes = self.axis_nodes(k)
        return 0.5 * (nodes[:-1] + nodes[1:])

    def node_coords(self) -> tuple[np.ndarray, ...]:
        return tuple(
            np.meshgrid(*(self.axis_nodes(k) for k in range(self.m)), indexing="ij")
        )

    def center_coords(self) -> tuple[np.ndarray, ...]:
        return tuple(
            np.meshgrid(*(self.axis_centers(k) for k in range(self.m)), indexing="ij")
        )

    def boundary_mask(self) -> np.ndarray:
        shape = tuple(n + 1 for n in self.n_cells)
        mask = np.zeros(shape, dtype=bool)
        for k in range(self.m):
            idx_lo = [slice(None)] * self.m
            idx_lo[k] = 0
            mask[tuple(idx_lo)] = True
            idx_hi = [slice(None)] * self.m
            idx_hi[k] = -1
            mask[tuple(idx_hi)] = True
        return mask

    @property
    def perimeter(self) -> float:
        if self.m != 2:
            raise NotImplementedError("perimeter implemented for m = 2")
        (x0, x1), (y0, y1) = self.extents
        return 2.0 * ((x1 - x0) + (y1 - y0))

    @property
    def area(self) -> float:
        v = 1.0
        for lo, hi in self.extents:
            v *= hi - lo
        return v


@dataclass
class ScalarField:
    """Nodal scalar data on a grid; boundary trace = values on boundary nodes."""

    dom: GridDomain
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        expected = tuple(n + 1 for n in self.dom.n_cells)
        if self.values.shape != expected:
            raise ValueError(
                f"nodal array has shape {self.values.shape}, expected {expected}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("nodal values must be finite")

    @staticmethod
    def from_function(dom: GridDomain, fn: Callable) -> "ScalarField":
        return ScalarField(dom, fn(*dom.node_coords()) + np.zeros(tuple(n + 1 for n in dom.n_cells)))

    def boundary_values(self) -> np.ndarray:
        return self.values[self.dom.boundary_mask()]

    def cell_average(self) -> np.ndarray:
        v = self.values
        return 0.25 * (v[:-1, :-1] + v[1:, :-1] + v[:-1, 1:] + v[1:, 1:])


@dataclass
class VectorField:
    """Cell-centered d-vector data on a grid."""

    dom: GridDomain
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        expected = tuple(self.dom.n_cells)
        if self.values.shape[:-1] != expected:
            raise ValueError(
                f"cell array has shape {self.values.shape}, expected {expected} + (d,)"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("cell values must be finite")

    @property
    def d(self) -> int:
        return self.values.shape[-1]


@dataclass
class CellScalarField:
    """Cell-centered scalar data with a validity mask (True = trustworthy)."""

    dom: GridDomain
    values: np.ndarray
    mask: np.ndarray


# ---- energy specification --------------------------------------------------

_PRESETS = ("zero", "p_area", "minus_X_star", "custom")


@dataclass
class EnergySpec:
    """Drift field F and bulk weight H of the energy  sum(|grad u + F| + H u).

    F is either a named preset or an explicit cell-centered field:
      zero         -- plain area / total-variation energy
      p_area       -- F = (-y, x) in the plane, the horizontal-area drift
                      (alias: minus_X_star); even m only
      custom       -- use the supplied VectorField
    H may be a constant or a per-cell array.
    """

    preset: str = "zero"
    F_field: VectorField | None = None
    H: float | np.ndarray = 0.0

    def __post_init__(self):
        if self.preset not in _PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}; use one of {_PRESETS}")
        if self.preset == "custom" and self.F_field is None:
            raise ValueError("preset 'custom' requires F_field")

    def F_cells(self, dom: GridDomain) -> np.ndarray:
        """Drift evaluated at cell centers, shape (*n_cells, m)."""
        coords = dom.center_coords()
        return self.F_at(dom, *coords)

    def F_at(self, dom: GridDomain, *coords: np.ndarray) -> np.ndarray:
        """Drift at arbitrary points (analytic presets evaluate exactly).

        For a custom field the cell value is used for every point inside
        that cell, so the coords must be cell-shaped arrays.
        """
        if self.preset == "zero":
            return np.zeros(coords[0].shape + (dom.m,))
        if self.preset in ("p_area", "minus_X_star"):
            if dom.m % 2:
                raise ValueError("p_area preset needs an even-dimensional domain")
            out = np.empty(coords[0].shape + (dom.m,))
            # -X* with X* = (x_{1'}, -x_1, x_{2'}, -x_2, ...): pairs (x,y) -> (-y, x)
            for k in range(0, dom.m, 2):
                out[..., k] = -coords[k + 1]
                out[..., k + 1] = coords[k]
            return out
        f = self.F_field
        if f.dom != dom:
            raise ValueError("custom drift lives on a different grid")
        if coords[0].shape == tuple(dom.n_cells):
            return f.values
        raise ValueError("custom drift can only be evaluated at cell centers")

    def H_cells(self, dom: GridDomain) -> np.ndarray:
        if np.isscalar(self.H):
            return np.full(tuple(dom.n_cells), float(self.H))
        H = np.asarray(self.H, dtype=np.float64)
        if H.shape != tuple(dom.n_cells):
            raise ValueError("per-cell H has the wrong shape")
        return H


# ---- core operations --------------------------------------------------------


def gradient(u: ScalarField) -> VectorField:
    """Cell-centered gradient: average of the four forward differences.

    Exact for affine nodal data on any grid.
    """
    dom = u.dom
    if dom.m != 2:
        raise NotImplementedError("gradient implemented for m = 2")
    hx, hy = dom.spacing
    v = u.values
    gx = (v[1:, :-1] - v[:-1, :-1] + v[1:, 1:] - v[:-1, 1:]) / (2.0 * hx)
    gy = (v[:-1, 1:] - v[:-1, :-1] + v[1:, 1:] - v[1:, :-1]) / (2.0 * hy)
    return VectorField(dom, np.stack([gx, gy], axis=-1))


def drift_gradient(u: ScalarField, spec: EnergySpec) -> np.ndarray:
    """Cell values of grad u + F, shape (nx, ny, 2)."""
    return gradient(u).values + spec.F_cells(u.dom)


def area_energy(u: ScalarField, spec: EnergySpec) -> float:
    """Midpoint quadrature of  |grad u + F| + H * u  over the domain.

    The cell average of the four corner values stands in for u in the bulk
    term, consistent with the cell-centered gradient.
    """
    dom = u.dom
    m = drift_gradient(u, spec)
    dens = np.sqrt(np.einsum("...k,...k->...", m, m))
    H = spec.H_cells(dom)
    integrand = dens + H * u.cell_average()
    return pairwise_sum(integrand.ravel() * dom.cell_volume)


@dataclass
class SingularSet:
    """Cells where |grad u + F| falls below the detection threshold."""

    mask: np.ndarray          # (nx, ny) bool
    measure: float            # count * cell volume
    threshold: float

    def cells(self) -> list[tuple[int, int]]:
        return [tuple(ij) for ij in np.argwhere(self.mask)]


def singular_set(u: ScalarField, spec: EnergySpec, tol: float = 1.0) -> SingularSet:
    """Detect the near-vanishing set of grad u + F.

    The threshold is tol * h * max(median |grad u + F|, h) with h the
    largest spacing: a cell is flagged when its density is at most one
    cell's worth of variation of a typical density.  A small relative slack
    keeps cells sitting exactly at the threshold (the generic situation for
    piecewise-linear fields) robust against roundoff in the solver output.
    With tol = 0 only exact zeros are flagged.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    dom = u.dom
    m = drift_gradient(u, spec)
    norms = np.sqrt(np.einsum("...k,...k->...", m, m))
    h = dom.h_max
    med = float(np.median(norms))
    threshold = tol * h * max(med, h)
    mask = norms <= threshold * (1.0 + 1e-4)
    return SingularSet(mask=mask, measure=float(mask.sum()) * dom.cell_volume,
                       threshold=threshold)


def field_to_measure(
    u: ScalarField, spec: EnergySpec, tol: float = 1.0
) -> tuple[VectorMeasure, VectorMeasure]:
    """Vector measure with densities grad u + F, zeroed on the singular set.

    Zeroing makes the singular cells genuinely off-support, so that the
    decomposition of a direction measure against this one sends direction
    mass on those cells to the mutually singular remainder.  Also returns a
    zero measure on the same complex as a template for building directions.
    """
    dom = u.dom
    m = drift_gradient(u, spec).copy()
    sing = singular_set(u, spec, tol)
    m[sing.mask] = 0.0
    n = m.shape[0] * m.shape[1]
    weights = np.full(n, dom.cell_volume)
    mu = VectorMeasure(dom.m, weights, m.reshape(n, dom.m))
    template = VectorMeasure(dom.m, weights.copy(), np.zeros((n, dom.m)))
    return mu, template


def gradient_measure(phi: ScalarField) -> VectorMeasure:
    """The measure (grad phi) dx on the cell complex (no zeroing)."""
    dom = phi.dom
    g = gradient(phi).values
    n = g.shape[0] * g.shape[1]
    weights = np.full(n, dom.cell_volume)
    return VectorMeasure(dom.m, weights, g.reshape(n, dom.m))


def hypothesis_checks(
    dom: GridDomain, spec: EnergySpec, f_list: list[ScalarField] | None = None
) -> dict:
    """Check the structural hypotheses on the drift field.

    * gradient compatibility: each component relation d_K F_I = d_I f_K
      against user-supplied potentials f_K, by central differences on
      interior cells;
    * positivity of the divergence of the pairwise-rotated drift
      (F_2, -F_1, F_4, -F_3, ...), the quantity whose sign drives the
      comparison principle.
    """
    if dom.m != 2:
        raise NotImplementedError("hypothesis checks implemented for m = 2")
    F = spec.F_cells(dom)
    hx, hy = dom.spacing

    def _central_dx(c):
        return (c[2:, 1:-1] - c[:-2, 1:-1]) / (2.0 * hx)

    def _central_dy(c):
        return (c[1:-1, 2:] - c[1:-1, :-2]) / (2.0 * hy)

    report: dict = {}
    if f_list is not None:
        if len(f_list) != dom.m:
            raise ValueError(f"need {dom.m} potential candidates, got {len(f_list)}")
        resid = 0.0
        dF = [
            [_central_dx(F[..., i]) for i in range(2)],
            [_central_dy(F[..., i]) for i in range(2)],
        ]
        for k, f in enumerate(f_list):
            gf = gradient(f).values
            for i in range(2):
                diff = dF[k][i] - gf[1:-1, 1:-1, i]
                resid = max(resid, float(np.abs(diff).max()))
        report["gradient_compat_residual"] = resid
        report["gradient_compat_ok"] = resid <= 1e-10

    Fstar = rotate_pairs(F)
    div = _central_dx(Fstar[..., 0]) + _central_dy(Fstar[..., 1])
    report["min_rotated_divergence"] = float(div.min())
    report["rotated_divergence_positive"] = bool(div.min() > 0.0)
    return report


# ---- CSV I/O -----------------------------------------------------------------


def write_scalar_csv(u: ScalarField, path) -> None:
    dom = u.dom
    xs = dom.axis_nodes(0)
    ys = dom.axis_nodes(1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "x", "y", "value"])
        for i in range(xs.size):
            for j in range(ys.size):
                w.writerow([i, j, g17(xs[i]), g17(ys[j]), g17(u.values[i, j])])


def read_scalar_csv(path) -> ScalarField:
    """Rebuild a nodal field (and its grid) from the i,j,x,y,value format."""
    rows = []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r, None)
        if header is None or [c.strip() for c in header[:5]] != ["i", "j", "x", "y", "value"]:
            raise ValueError(f"{path}: expected header i,j,x,y,value")
        for line in r:
            if not line:
                continue
            i, j = int(line[0]), int(line[1])
            rows.append((i, j, float(line[2]), float(line[3]), float(line[4])))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    ni = max(r[0] for r in rows) + 1
    nj = max(r[1] for r in rows) + 1
    vals = np.full((ni, nj), np.nan)
    xs = np.full(ni, np.nan)
    ys = np.full(nj, np.nan)
    for i, j, x, y, v in rows:
        vals[i, j] = v
        xs[i] = x
        ys[j] = y
    if np.any(np.isnan(vals)):
        raise ValueError(f"{path}: incomplete grid data")
    dom = GridDomain(
        extents=((float(xs[0]), float(xs[-1])), (float(ys[0]), float(ys[-1]))),
        n_cells=(ni - 1, nj - 1),
    )
    return ScalarField(dom, vals)


def write_cell_csv(field: VectorField | CellScalarField, path) -> None:
    dom = field.dom
    xc = dom.axis_centers(0)
    yc = dom.axis_centers(1)
    vec = isinstance(field, VectorField)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if vec:
            w.writerow(["i", "j", "x", "y"] + [f"v{k+1}" for k in range(field.d)])
        else:
            w.writerow(["i", "j", "x", "y", "value"])
        for i in range(xc.size):
            for j in range(yc.size):
                pos = [i, j, g17(xc[i]), g17(yc[j])]
                if vec:
                    w.writerow(pos + [g17(v) for v in field.values[i, j]])
                else:
                    val = field.values[i, j]
                    if not field.mask[i, j]:
                        val = float("nan")
                    w.writerow(pos + [format(val, ".17g")])
