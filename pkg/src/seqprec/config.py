"""Numerical settings shared by the order engines."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

from .errors import MalformedParameter

METHODS = ("auto", "exact", "quadrature", "monte-carlo")
CONVENTIONS = ("strict", "weak")


@dataclass(frozen=True)
class Config:
    """Knobs for quadrature, grid checks, Monte Carlo and verdict guards.

    ``grid`` is the starting quadrature size (doubled once for the Richardson
    estimate and again on each refinement up to ``max_grid``).  ``check_grid``
    is the monotonicity-scan size for the lr/hr/st checks, whose verdicts are
    indeterminate when a decisive violation falls between ``slack`` and
    ``gray``.
    """

    method: str = "auto"
    samples: int = 1_000_000
    seed: int = 0
    grid: int = 2048
    max_grid: int = 2**16
    tol: float = 1e-6
    tail: float = 1e-9
    check_grid: int = 4096
    slack: float = 1e-12
    gray: float = 1e-9
    guard_factor: float = 3.0
    convention: str = "strict"
    n_cap: int = 8
    workers: int = 1
    mc_block: int = 2**17

    def __post_init__(self):
        if self.method not in METHODS:
            raise MalformedParameter(f"method must be one of {METHODS}, got {self.method!r}")
        if self.convention not in CONVENTIONS:
            raise MalformedParameter(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")
        if self.samples < 1:
            raise MalformedParameter("samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise MalformedParameter("seed must be a 64-bit unsigned integer")
        if self.grid < 8 or self.max_grid < 2 * self.grid:
            raise MalformedParameter("need grid >= 8 and max_grid >= 2 * grid")
        if not 0 < self.tail < 0.01:
            raise MalformedParameter("tail must lie in (0, 0.01)")
        if self.check_grid < 16:
            raise MalformedParameter("check_grid must be >= 16")
        if not 0 <= self.slack <= self.gray:
            raise MalformedParameter("need 0 <= slack <= gray")
        if self.tol <= 0 or self.guard_factor < 0:
            raise MalformedParameter("tol must be > 0 and guard_factor >= 0")
        if self.n_cap < 1 or self.workers < 1 or self.mc_block < 1:
            raise MalformedParameter("n_cap, workers and mc_block must be >= 1")

    def with_(self, **changes) -> Config:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> Config:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise MalformedParameter(f"unknown config options: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise MalformedParameter(str(exc)) from exc


DEFAULT = Config()
