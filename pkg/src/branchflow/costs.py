"""Pipe cost model: tabulated unit costs, polynomial interpolation, network cost.

Commercial diameters rarely coincide with the sizes a published cost table
covers, so per-meter unit costs for the catalog are read off the unique
polynomial through all table points. Evaluation uses the numerically stable
barycentric form; the direct product form is also provided and serves as the
test oracle for the stabilized one. Extrapolation is rejected: high-degree
interpolants are meaningless outside their node range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError

__all__ = [
    "CostTable",
    "PipeCatalog",
    "CostReport",
    "lagrange_interpolate",
    "lagrange_interpolate_direct",
    "build_catalog",
    "network_cost",
    "parse_cost_table",
    "parse_catalog",
    "serialize_cost_table",
]


def _validated_axes(pairs: Iterable[tuple[float, float]], what: str, min_size: int = 1):
    pts = sorted((float(d), float(c)) for d, c in pairs)
    if len(pts) < min_size:
        raise ValueError(f"{what} needs at least {min_size} entries")
    diameters = np.array([p[0] for p in pts])
    costs = np.array([p[1] for p in pts])
    if np.any(np.diff(diameters) <= 0):
        raise ValueError(f"{what} diameters must be strictly increasing (no duplicates)")
    if np.any(costs <= 0):
        raise ValueError(f"{what} unit costs must be > 0")
    diameters.setflags(write=False)
    costs.setflags(write=False)
    return diameters, costs


@dataclass(frozen=True)
class CostTable:
    """Published (diameter mm, unit cost per m) data points, strictly increasing."""

    diameters: np.ndarray
    unit_costs: np.ndarray

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "CostTable":
        return cls(*_validated_axes(pairs, "cost table", min_size=2))

    def __len__(self) -> int:
        return len(self.diameters)


@dataclass(frozen=True)
class PipeCatalog:
    """Commercially available diameters with unit costs; the optimizer's alphabet."""

    diameters: np.ndarray
    unit_costs: np.ndarray

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "PipeCatalog":
        return cls(*_validated_axes(pairs, "catalog"))

    def __len__(self) -> int:
        return len(self.diameters)

    def index_of(self, diameter: float) -> int:
        i = int(np.searchsorted(self.diameters, diameter))
        if i >= len(self.diameters) or self.diameters[i] != diameter:
            raise KeyError(f"diameter {diameter} mm not in catalog")
        return i

    def unit_cost(self, diameter: float) -> float:
        return float(self.unit_costs[self.index_of(diameter)])


@dataclass(frozen=True)
class CostReport:
    """Per-pipe and total network cost for one diameter assignment."""

    per_pipe: np.ndarray
    total: float


def _barycentric_weights(xs: np.ndarray) -> np.ndarray:
    diff = xs[:, None] - xs[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / diff.prod(axis=1)


def _check_range(table, x: float) -> None:
    lo, hi = table.diameters[0], table.diameters[-1]
    if not lo <= x <= hi:
        raise ValueError(
            f"diameter {x} mm outside the table range [{lo}, {hi}]; extrapolation refused"
        )


def lagrange_interpolate(table: CostTable, x: float) -> float:
    """Evaluate the unique polynomial through all table points at ``x`` (mm).

    Barycentric second form: sum(w_k y_k / (x - x_k)) / sum(w_k / (x - x_k)).
    Exact at the table's own nodes; rejects ``x`` outside the node range.
    """
    _check_range(table, x)
    xs, ys = table.diameters, table.unit_costs
    exact = np.flatnonzero(xs == x)
    if exact.size:
        return float(ys[exact[0]])
    w = _barycentric_weights(xs)
    common = w / (x - xs)
    return float((common * ys).sum() / common.sum())


def lagrange_interpolate_direct(table: CostTable, x: float) -> float:
    """Direct product-form evaluation: sum_k y_k * prod_{m!=k} (x-x_m)/(x_k-x_m).

    Kept as the independent cross-check for ``lagrange_interpolate``.
    """
    _check_range(table, x)
    xs, ys = table.diameters, table.unit_costs
    total = 0.0
    for k in range(len(xs)):
        basis = 1.0
        for m in range(len(xs)):
            if m != k:
                basis *= (x - xs[m]) / (xs[k] - xs[m])
        total += basis * ys[k]
    return total


def build_catalog(table: CostTable, diameters: Sequence[float]) -> PipeCatalog:
    """Catalog from commercial sizes priced by interpolating the cost table."""
    return PipeCatalog.from_pairs(
        (d, lagrange_interpolate(table, d)) for d in diameters
    )


def network_cost(diameters: np.ndarray, lengths: np.ndarray,
                 catalog: PipeCatalog) -> CostReport:
    """Total cost of an assignment: unit cost of each pipe's diameter times its length."""
    diameters = np.asarray(diameters, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    if diameters.shape != lengths.shape:
        raise ValueError(
            f"{diameters.shape[-1]} diameters for {lengths.shape[-1]} lengths"
        )
    unit = np.array([catalog.unit_cost(d) for d in diameters])
    per_pipe = unit * lengths
    return CostReport(per_pipe=per_pipe, total=float(per_pipe.sum()))


def _parse_pairs(text: str):
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split(",") if "," in line else line.split()
        fields = [f.strip() for f in fields if f.strip()]
        if fields and fields[0].lower() in ("diameter_mm", "diameter"):
            continue  # header row
        if len(fields) != 2:
            raise ParseError("expected 'diameter_mm unit_cost'", lineno)
        try:
            pairs.append((float(fields[0]), float(fields[1])))
        except ValueError:
            raise ParseError(f"not a decimal number pair: {line!r}", lineno) from None
    if not pairs:
        raise ParseError("no cost entries found")
    return pairs


def parse_cost_table(text: str) -> CostTable:
    """Parse 'diameter_mm unit_cost' lines (``#`` comments allowed)."""
    try:
        return CostTable.from_pairs(_parse_pairs(text))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def parse_catalog(text: str) -> PipeCatalog:
    """Parse a catalog file; same lexical format as a cost table."""
    try:
        return PipeCatalog.from_pairs(_parse_pairs(text))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def serialize_cost_table(table: CostTable | PipeCatalog) -> str:
    """Render 'diameter_mm unit_cost' lines; inverse of the parsers."""
    lines = ["# diameter_mm unit_cost"]
    lines += [f"{d:g} {float(c)!r}" for d, c in zip(table.diameters, table.unit_costs)]
    return "\n".join(lines) + "\n"
