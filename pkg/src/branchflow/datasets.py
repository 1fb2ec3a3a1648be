"""Loaders for the bundled datasets and the diameters-file format.

See ``data/README.md`` for dataset provenance. The case-study defaults
(head floor 10 m, gradient cap 0.005 m/m, Hazen-Williams coefficient 130,
fitting coefficient 1.15) are exposed here and double as the CLI defaults.
"""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

import numpy as np

from .costs import CostTable, PipeCatalog, parse_catalog, parse_cost_table
from .errors import ParseError
from .feasibility import DesignLimits
from .hydraulics import HydraulicParams
from .network import TreeNetwork, parse_network

__all__ = [
    "DEFAULT_LIMITS",
    "DEFAULT_HAZEN_WILLIAMS",
    "DEFAULT_FITTING_LOSS",
    "data_path",
    "load_network",
    "load_cost_table",
    "load_catalog",
    "load_diameters",
    "read_diameters",
    "serialize_diameters",
    "default_params",
    "load_reference_pipe_gradients",
    "load_reference_node_heads",
]

DEFAULT_LIMITS = DesignLimits(min_residual_head=10.0, max_loss_gradient=0.005)
DEFAULT_HAZEN_WILLIAMS = 130.0
DEFAULT_FITTING_LOSS = 1.15


def data_path(name: str, root: str | Path | None = None) -> Path:
    """Path of a bundled data file, or of ``name`` under an alternate root."""
    if root is not None:
        return Path(root) / name
    return Path(str(files(__package__) / "data" / name))


def _read(name: str, root: str | Path | None) -> str:
    path = data_path(name, root)
    if not path.exists():
        raise FileNotFoundError(f"dataset fixture missing: {path}")
    return path.read_text(encoding="utf-8")


def load_network(name: str = "warapitiya", root: str | Path | None = None) -> TreeNetwork:
    return parse_network(_read(f"{name}.net", root))


def load_cost_table(root: str | Path | None = None) -> CostTable:
    return parse_cost_table(_read("unit_costs.costs", root))


def load_catalog(root: str | Path | None = None) -> PipeCatalog:
    return parse_catalog(_read("catalog.costs", root))


def load_diameters(name: str, network: TreeNetwork,
                   root: str | Path | None = None) -> np.ndarray:
    return read_diameters(_read(name, root), network)


def default_params(network: TreeNetwork) -> HydraulicParams:
    """Case-study hydraulic coefficients bound to the given network's source head."""
    return HydraulicParams.for_network(network, DEFAULT_HAZEN_WILLIAMS, DEFAULT_FITTING_LOSS)


def read_diameters(text: str, network: TreeNetwork) -> np.ndarray:
    """Parse a ``pipe_id,diameter_mm`` CSV into a vector aligned to pipe order.

    A header row is optional. Every pipe must appear exactly once.
    """
    seen: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if fields[0].lower() == "pipe_id":
            continue
        if len(fields) != 2:
            raise ParseError("expected 'pipe_id,diameter_mm'", lineno)
        pipe_id, value = fields
        if pipe_id in seen:
            raise ParseError(f"duplicate pipe id {pipe_id}", lineno)
        try:
            seen[pipe_id] = float(value)
        except ValueError:
            raise ParseError(f"not a decimal number: {value!r}", lineno) from None

    known = {p.id for p in network.pipes}
    unknown = sorted(set(seen) - known)
    if unknown:
        raise ParseError(f"unknown pipe ids: {', '.join(unknown)}")
    missing = sorted(known - set(seen))
    if missing:
        raise ParseError(
            f"{len(seen)} diameters for {network.pipe_count} pipes; "
            f"missing: {', '.join(missing)}"
        )
    return np.array([seen[p.id] for p in network.pipes])


def serialize_diameters(network: TreeNetwork, diameters: np.ndarray) -> str:
    """Render the diameters CSV; inverse of ``read_diameters``."""
    lines = ["pipe_id,diameter_mm"]
    lines += [f"{p.id},{d:g}" for p, d in zip(network.pipes, np.asarray(diameters))]
    return "\n".join(lines) + "\n"


def load_reference_pipe_gradients(root: str | Path | None = None) -> dict[str, float]:
    """Published per-pipe loss gradients for the best-known Warapitiya design."""
    return _parse_two_column(_read("warapitiya_reference_pipes.csv", root), "pipe_id")


def load_reference_node_heads(root: str | Path | None = None) -> dict[str, float]:
    """Published per-node residual heads for the best-known Warapitiya design."""
    return _parse_two_column(_read("warapitiya_reference_nodes.csv", root), "node_id")


def _parse_two_column(text: str, id_header: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if fields[0].lower() == id_header:
            continue
        if len(fields) != 2:
            raise ParseError(f"expected '{id_header},value'", lineno)
        try:
            out[fields[0]] = float(fields[1])
        except ValueError:
            raise ParseError(f"not a decimal number: {fields[1]!r}", lineno) from None
    return out
