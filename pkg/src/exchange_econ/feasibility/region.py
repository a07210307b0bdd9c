"""Ray sampling of the cooperative and independent sustainability regions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SizeError
from ..model import ExchangeGraph
from .sustainability import _rate_arrays, check_sustainability_1c, in_production_region

__all__ = ["RegionSample", "default_directions", "boundary_along", "sample_region_boundary"]

MAX_REGION_DIM = 4


@dataclass(frozen=True)
class RegionSample:
    direction: np.ndarray  # unit vector, flattened (i, k) order
    cooperative: np.ndarray  # boundary point, shape (N, K)
    independent: np.ndarray


def default_directions(dim: int, n_directions: int) -> np.ndarray:
    """Unit rays in the non-negative orthant.

    In two dimensions the rays are evenly spaced in angle and include both
    axes; otherwise they come from a fixed-seed draw of ``|normal|`` vectors.
    """
    if n_directions < 1:
        raise ValueError("need at least one direction")
    if dim == 1:
        return np.ones((n_directions, 1))
    if dim == 2:
        if n_directions == 1:
            return np.array([[1.0, 1.0]]) / math.sqrt(2.0)
        th = np.linspace(0.0, math.pi / 2, n_directions)
        d = np.column_stack([np.cos(th), np.sin(th)])
        d[np.abs(d) < 1e-15] = 0.0
        return d
    rng = np.random.default_rng(0)
    d = np.abs(rng.standard_normal((n_directions, dim)))
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def _member_fn(graph: ExchangeGraph, plans, n_commodities: int):
    rates = _rate_arrays(plans)
    single = n_commodities == 1 and all(r.shape[0] == 1 for r in rates)
    if single:
        b = np.array([r[0, 0] for r in rates])
        return lambda a: check_sustainability_1c(graph, a.ravel(), b).sustainable
    return lambda a: in_production_region(graph, plans, a)


def boundary_along(member, direction: np.ndarray, tol: float = 1e-6) -> float:
    """Largest ``s`` with ``member(s * direction)``, to within ``tol``."""
    direction = np.asarray(direction, dtype=float)
    if not np.isfinite(direction).all() or (direction < 0).any() or not direction.any():
        raise ValueError("direction must be a non-zero vector in the non-negative orthant")
    lo, hi = 0.0, 1.0
    while member(hi * direction):
        lo, hi = hi, 2.0 * hi
        if hi > 1e12:
            raise ValueError("region is unbounded along this direction")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if member(mid * direction):
            lo = mid
        else:
            hi = mid
    return lo


def sample_region_boundary(
    graph: ExchangeGraph, plans, n_directions: int = 64, n_commodities: int = None, tol: float = 1e-6, directions=None
) -> list:
    """Boundary points of the cooperative region and of the no-exchange region.

    The no-exchange region keeps only self-loops, i.e. every entity serves
    its own demand from its own plans.
    """
    rates = _rate_arrays(plans)
    k_dim = rates[0].shape[1] if n_commodities is None else n_commodities
    n = graph.n_entities
    dim = n * k_dim
    if dim > MAX_REGION_DIM:
        raise SizeError(f"region sampling supports N*K <= {MAX_REGION_DIM}, got {dim}")
    if directions is None:
        directions = default_directions(dim, n_directions)
    else:
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        if (norms == 0).any():
            raise ValueError("zero direction")
        directions = directions / norms
    coop = _member_fn(graph, plans, k_dim)
    solo = _member_fn(ExchangeGraph.self_loops(n), plans, k_dim)
    out = []
    for d in directions:
        shaped = d.reshape(n, k_dim)
        s_coop = boundary_along(lambda a: coop(a), shaped, tol)
        s_solo = boundary_along(lambda a: solo(a), shaped, tol)
        out.append(RegionSample(d.copy(), s_coop * shaped, s_solo * shaped))
    return out
