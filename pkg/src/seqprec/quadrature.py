"""Backward-recursion quadrature for ordering-event probabilities.

``P(T_{s1} <= ... <= T_{sn})`` is evaluated as nested tail integrals
``Q_k(t) = int_t^inf Q_{k+1}(s) dF_{sk}(s)`` with ``Q_n = sf_{sn}``, on a grid
shared by all variables.  The grid is the image of a uniform grid under the
quantile function of the equal-weight mixture of the variables, truncated at
the per-variable ``tail`` quantiles, so nodes follow the probability mass and
singular densities (weibull shape < 1) cause no trouble.  Each cell integral
uses the trapezoid rule against the exact cell mass ``F(x_{i+1}) - F(x_i)``.

The result at ``m`` cells is combined with ``2m`` cells by Richardson
extrapolation; the error estimate is ``|T_2m - T_m| / 3`` plus the size of the
tail corrections.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _accel
from .config import DEFAULT, Config
from .distributions import Distribution
from .errors import MethodUnsupported, NonConvergence


@dataclass(frozen=True)
class Grid:
    nodes: np.ndarray
    F: np.ndarray
    sf: np.ndarray
    dF: np.ndarray
    lo_mass: np.ndarray
    hi_mass: np.ndarray

    @property
    def cells(self) -> int:
        return len(self.nodes) - 1


def support_bounds(dists: Sequence[Distribution], tail: float) -> tuple[float, float]:
    lo = min(float(d.quantile(tail)) for d in dists)
    hi = max(float(d.quantile(1.0 - tail)) for d in dists)
    return lo, hi


def invert_increasing(fn, targets: np.ndarray, lo: float, hi: float, iters: int = 200) -> np.ndarray:
    """Vectorised bisection for ``fn(t) = target`` on ``[lo, hi]``."""
    a = np.full(targets.shape, lo, dtype=float)
    b = np.full(targets.shape, hi, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        done = (mid == a) | (mid == b)
        if np.all(done):
            break
        below = fn(mid) < targets
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return 0.5 * (a + b)


def build_grid(dists: Sequence[Distribution], cells: int, tail: float) -> Grid:
    if any(d.is_discrete for d in dists):
        raise MethodUnsupported("quadrature grid needs continuous variables")
    lo, hi = support_bounds(dists, tail)

    def mixture(t):
        return sum(d.cdf(t) for d in dists) / len(dists)

    # half the nodes equalise mixture mass, half equalise width, so every
    # cell shrinks under refinement even where the mixture is nearly flat
    half = cells // 2
    u = np.linspace(float(mixture(lo)), float(mixture(hi)), cells - half + 1)
    by_mass = invert_increasing(mixture, u[1:-1], lo, hi)
    by_width = np.linspace(lo, hi, half + 1)
    # support endpoints become nodes so no cell straddles a kink of some cdf
    edges = [e for d in dists for e in d.support if lo < e < hi]
    nodes = np.unique(np.concatenate((by_mass, by_width, edges)))
    F = np.array([d.cdf(nodes) for d in dists])
    sf = np.array([d.sf(nodes) for d in dists])
    dF = np.maximum(np.diff(F, axis=1), 0.0)
    return Grid(nodes, F, sf, dF, F[:, 0].copy(), sf[:, -1].copy())


CHUNK = 512


def _on_grid(g: Grid, perms0: np.ndarray, workers: int = 1):
    if workers <= 1 or len(perms0) <= CHUNK:
        return _accel.chain_integrals(g.dF, g.sf, g.lo_mass, g.hi_mass, perms0)
    chunks = [perms0[s : s + CHUNK] for s in range(0, len(perms0), CHUNK)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: _accel.chain_integrals(g.dF, g.sf, g.lo_mass, g.hi_mass, c), chunks))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def chain_probabilities(
    dists: Sequence[Distribution], perms0, cfg: Config = DEFAULT
) -> tuple[np.ndarray, np.ndarray, int]:
    """Probabilities of the ordering events in ``perms0`` (0-based rows).

    Returns ``(values, errors, cells)`` where ``cells`` is the finest grid
    used.  Raises :class:`NonConvergence` if the largest error estimate is
    still above ``cfg.tol`` once the grid would exceed ``cfg.max_grid``.
    """
    perms0 = np.asarray(perms0, dtype=np.int64).reshape(-1, len(dists))
    m = cfg.grid
    t1, _ = _on_grid(build_grid(dists, m, cfg.tail), perms0, cfg.workers)
    t2, _ = _on_grid(build_grid(dists, 2 * m, cfg.tail), perms0, cfg.workers)
    while True:
        t4, corr = _on_grid(build_grid(dists, 4 * m, cfg.tail), perms0, cfg.workers)
        r_coarse = (4.0 * t2 - t1) / 3.0
        r_fine = (4.0 * t4 - t2) / 3.0
        # the Richardson gap catches pre-asymptotic sign changes that make
        # two neighbouring levels agree by accident
        roundoff = perms0.shape[1] * 4 * m * np.finfo(float).eps
        err = np.maximum(np.abs(t4 - t2) / 3.0, np.abs(r_fine - r_coarse)) + corr + roundoff
        if float(np.max(err, initial=0.0)) <= cfg.tol:
            return np.clip(r_fine, 0.0, 1.0), err, 4 * m
        if 8 * m > cfg.max_grid:
            raise NonConvergence(
                f"quadrature error {float(np.max(err)):.3g} above tol {cfg.tol:g} at {4 * m} cells"
            )
        t1, t2 = t2, t4
        m *= 2
