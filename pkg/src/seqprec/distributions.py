"""Independent random variables: parametric continuous families and finite atom sets.

All functionals are vectorised over ``t``.  Survival is the primary closed form
for every continuous family and ``cdf`` is defined as ``1 - sf`` so the two
always sum to one.  Discrete cdfs are right-continuous, ``P(T <= t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

import numpy as np
from scipy import special

from .errors import HazardUndefined, MalformedParameter
from .rng import Rng

FAMILIES: dict[str, tuple[str, ...]] = {
    "exponential": ("rate",),
    "weibull": ("shape", "scale"),
    "gamma": ("shape", "rate"),
    "uniform": ("a", "b"),
    "normal": ("mean", "stddev"),
}

MASS_TOL = 1e-12


def _as_fraction(p: Any) -> Fraction:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, bool):
        raise MalformedParameter(f"mass must be numeric, got {p!r}")
    if isinstance(p, (int, np.integer)):
        return Fraction(int(p))
    if isinstance(p, (float, np.floating)):
        if not math.isfinite(p):
            raise MalformedParameter(f"mass must be finite, got {p!r}")
        # shortest repr keeps config decimals exact (0.4 -> 2/5)
        return Fraction(repr(float(p)))
    if isinstance(p, str):
        try:
            return Fraction(p)
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedParameter(f"cannot parse mass {p!r}") from exc
    raise MalformedParameter(f"mass must be numeric, got {p!r}")


@dataclass(frozen=True)
class Distribution:
    """A single independent random variable ``T_i``.

    Use :func:`make_distribution` (or the family helpers below) rather than
    the constructor; it validates parameters and fills in the support.
    """

    kind: str
    family: str
    params: tuple[float, ...] = ()
    atoms: tuple[tuple[float, Fraction], ...] = ()
    name: str = field(default="", compare=False)

    # --- derived -----------------------------------------------------------

    @property
    def is_discrete(self) -> bool:
        return self.kind == "discrete"

    @property
    def values(self) -> np.ndarray:
        return np.array([x for x, _ in self.atoms], dtype=float)

    @property
    def masses(self) -> np.ndarray:
        return np.array([float(p) for _, p in self.atoms], dtype=float)

    @property
    def exact_masses(self) -> tuple[Fraction, ...]:
        return tuple(p for _, p in self.atoms)

    @property
    def support(self) -> tuple[float, float]:
        if self.is_discrete:
            return (self.atoms[0][0], self.atoms[-1][0])
        f, p = self.family, self.params
        if f in ("exponential", "weibull", "gamma"):
            return (0.0, math.inf)
        if f == "uniform":
            return (p[0], p[1])
        return (-math.inf, math.inf)

    def _cum(self) -> np.ndarray:
        cum, acc = [], Fraction(0)
        for _, p in self.atoms:
            acc += p
            cum.append(float(acc))
        cum[-1] = 1.0
        return np.array(cum)

    # --- functionals -------------------------------------------------------

    def sf(self, t):
        """Survival function ``P(T > t)``."""
        t = np.asarray(t, dtype=float)
        if self.is_discrete:
            return 1.0 - self.cdf(t)
        f, p = self.family, self.params
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if f == "exponential":
                out = np.exp(-p[0] * np.maximum(t, 0.0))
            elif f == "weibull":
                out = np.exp(-((np.maximum(t, 0.0) / p[1]) ** p[0]))
            elif f == "gamma":
                out = special.gammaincc(p[0], p[1] * np.maximum(t, 0.0))
            elif f == "uniform":
                out = np.clip((p[1] - t) / (p[1] - p[0]), 0.0, 1.0)
            else:
                out = special.ndtr((p[0] - t) / p[1])
        return out

    def cdf(self, t):
        """Distribution function ``P(T <= t)`` (right-continuous)."""
        t = np.asarray(t, dtype=float)
        if self.is_discrete:
            idx = np.searchsorted(self.values, t, side="right")
            cum = np.concatenate(([0.0], self._cum()))
            return cum[idx]
        return 1.0 - self.sf(t)

    def pdf(self, t):
        """Density, or point mass at ``t`` for discrete variables."""
        t = np.asarray(t, dtype=float)
        if self.is_discrete:
            vals, m = self.values, self.masses
            idx = np.clip(np.searchsorted(vals, t), 0, len(vals) - 1)
            return np.where(vals[idx] == t, m[idx], 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.exp(self.logpdf(t))

    def logpdf(self, t):
        t = np.asarray(t, dtype=float)
        if self.is_discrete:
            with np.errstate(divide="ignore"):
                return np.log(self.pdf(t))
        f, p = self.family, self.params
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if f == "exponential":
                out = np.where(t >= 0, math.log(p[0]) - p[0] * t, -np.inf)
            elif f == "weibull":
                k, s = p
                z = np.where(t > 0, t / s, 1.0)
                body = math.log(k / s) + (k - 1.0) * np.log(z) - z**k
                at0 = -np.inf if k > 1 else (math.log(1.0 / s) if k == 1 else np.inf)
                out = np.where(t > 0, body, np.where(t == 0, at0, -np.inf))
            elif f == "gamma":
                a, r = p
                z = np.where(t > 0, t, 1.0)
                body = a * math.log(r) + (a - 1.0) * np.log(z) - r * z - special.gammaln(a)
                at0 = -np.inf if a > 1 else (math.log(r) if a == 1 else np.inf)
                out = np.where(t > 0, body, np.where(t == 0, at0, -np.inf))
            elif f == "uniform":
                inside = (t >= p[0]) & (t <= p[1])
                out = np.where(inside, -math.log(p[1] - p[0]), -np.inf)
            else:
                z = (t - p[0]) / p[1]
                out = -0.5 * z * z - math.log(p[1]) - 0.5 * math.log(2 * math.pi)
        return out

    def logsf(self, t):
        """Log survival from closed forms, accurate deep into the upper tail."""
        t = np.asarray(t, dtype=float)
        if self.is_discrete:
            with np.errstate(divide="ignore"):
                return np.log(self.sf(t))
        f, p = self.family, self.params
        with np.errstate(divide="ignore", invalid="ignore"):
            if f == "exponential":
                return -p[0] * np.maximum(t, 0.0)
            if f == "weibull":
                return -((np.maximum(t, 0.0) / p[1]) ** p[0])
            if f == "normal":
                return special.log_ndtr((p[0] - t) / p[1])
            return np.log(self.sf(t))

    def hazard(self, t):
        """``pdf / sf``; ``nan`` where the survival function is zero."""
        t = np.asarray(t, dtype=float)
        s = self.sf(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s > 0, self.pdf(t) / np.where(s > 0, s, 1.0), np.nan)

    def quantile(self, q):
        """Smallest ``t`` with ``cdf(t) >= q`` for ``q`` in (0, 1)."""
        q = np.asarray(q, dtype=float)
        if self.is_discrete:
            idx = np.searchsorted(self._cum(), q, side="left")
            return self.values[np.minimum(idx, len(self.atoms) - 1)]
        f, p = self.family, self.params
        if f == "exponential":
            return -np.log1p(-q) / p[0]
        if f == "weibull":
            return p[1] * (-np.log1p(-q)) ** (1.0 / p[0])
        if f == "gamma":
            return special.gammaincinv(p[0], q) / p[1]
        if f == "uniform":
            return p[0] + q * (p[1] - p[0])
        return p[0] + p[1] * special.ndtri(q)

    def sample(self, rng: Rng, count: int) -> np.ndarray:
        """``count`` inverse-cdf draws from the stream ``rng``."""
        if count < 1:
            raise ValueError("count must be >= 1")
        return self.quantile(rng.uniforms(count))

    # --- serialisation -----------------------------------------------------

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "family": self.family}
        if self.is_discrete:
            out["atoms"] = [{"x": x, "p": str(p)} for x, p in self.atoms]
        else:
            out.update(zip(FAMILIES[self.family], self.params))
        return out

    def label(self) -> str:
        if self.name:
            return self.name
        if self.is_discrete:
            return "discrete{" + ", ".join(f"{x:g}:{p}" for x, p in self.atoms) + "}"
        args = ", ".join(f"{k}={v:g}" for k, v in zip(FAMILIES[self.family], self.params))
        return f"{self.family}({args})"


def _positive(family: str, key: str, v: float) -> None:
    if not v > 0:
        raise MalformedParameter(f"{family}: {key} must be > 0, got {v}")


def make_distribution(spec: Mapping[str, Any]) -> Distribution:
    """Build a validated :class:`Distribution` from a parsed config entry.

    ``spec`` carries ``family`` plus the family parameters, e.g.
    ``{"family": "exponential", "rate": 3.0}`` or
    ``{"family": "discrete", "atoms": [{"x": 1.0, "p": 0.4}, {"x": 4.0, "p": 0.6}]}``.
    """
    if not isinstance(spec, Mapping):
        raise MalformedParameter(f"distribution spec must be an object, got {type(spec).__name__}")
    family = spec.get("family")
    name = str(spec.get("name", ""))
    if family == "discrete":
        return _make_discrete(spec.get("atoms"), name)
    if family not in FAMILIES:
        raise MalformedParameter(f"unknown family {family!r}")
    params = []
    for key in FAMILIES[family]:
        if key not in spec:
            raise MalformedParameter(f"{family}: missing parameter {key!r}")
        v = spec[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise MalformedParameter(f"{family}: {key} must be a number, got {v!r}")
        v = float(v)
        if not math.isfinite(v):
            raise MalformedParameter(f"{family}: {key} must be finite, got {v}")
        params.append(v)
    if family == "exponential":
        _positive(family, "rate", params[0])
    elif family in ("weibull", "gamma"):
        for key, v in zip(FAMILIES[family], params):
            _positive(family, key, v)
    elif family == "uniform":
        if not params[0] < params[1]:
            raise MalformedParameter(f"uniform: need a < b, got a={params[0]}, b={params[1]}")
    else:
        _positive(family, "stddev", params[1])
    return Distribution("continuous", family, tuple(params), name=name)


def _make_discrete(raw, name: str) -> Distribution:
    if not raw:
        raise MalformedParameter("discrete: atoms must be a non-empty list")
    atoms = []
    for a in raw:
        if isinstance(a, Mapping):
            x, p = a.get("x"), a.get("p")
        else:
            try:
                x, p = a
            except (TypeError, ValueError) as exc:
                raise MalformedParameter(f"discrete: bad atom {a!r}") from exc
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise MalformedParameter(f"discrete: atom value must be a finite number, got {x!r}")
        p = _as_fraction(p)
        if not 0 < p <= 1:
            raise MalformedParameter(f"discrete: atom mass must lie in (0, 1], got {p}")
        atoms.append((float(x), p))
    atoms.sort(key=lambda a: a[0])
    for (x0, _), (x1, _) in zip(atoms, atoms[1:]):
        if x0 == x1:
            raise MalformedParameter(f"discrete: duplicate atom at {x0}")
    total = sum(p for _, p in atoms)
    if abs(float(total) - 1.0) > MASS_TOL:
        raise MalformedParameter(f"discrete: masses sum to {float(total)!r}, not 1")
    return Distribution("discrete", "discrete", atoms=tuple(atoms), name=name)


def exponential(rate: float, name: str = "") -> Distribution:
    return make_distribution({"family": "exponential", "rate": rate, "name": name})


def weibull(shape: float, scale: float, name: str = "") -> Distribution:
    return make_distribution({"family": "weibull", "shape": shape, "scale": scale, "name": name})


def gamma(shape: float, rate: float, name: str = "") -> Distribution:
    return make_distribution({"family": "gamma", "shape": shape, "rate": rate, "name": name})


def uniform(a: float, b: float, name: str = "") -> Distribution:
    return make_distribution({"family": "uniform", "a": a, "b": b, "name": name})


def normal(mean: float, stddev: float, name: str = "") -> Distribution:
    return make_distribution({"family": "normal", "mean": mean, "stddev": stddev, "name": name})


def discrete(atoms, name: str = "") -> Distribution:
    """``atoms`` is an iterable of ``(value, mass)`` pairs."""
    return _make_discrete(list(atoms), name)


def evaluate(d: Distribution, functional: str, t: float) -> float:
    """Scalar ``pdf`` / ``cdf`` / ``sf`` / ``hazard`` of ``d`` at finite ``t``."""
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    if functional == "hazard":
        s = float(d.sf(t))
        if s <= 0:
            raise HazardUndefined(f"hazard undefined at t={t}: survival is zero")
        return float(d.pdf(t)) / s
    if functional not in ("pdf", "cdf", "sf"):
        raise ValueError(f"unknown functional {functional!r}")
    return float(getattr(d, functional)(t))


def quantile(d: Distribution, p: float) -> float:
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    return float(d.quantile(p))


def sample(d: Distribution, rng: Rng, count: int) -> np.ndarray:
    return d.sample(rng, count)


def blyth_triple() -> list[Distribution]:
    """The three-variable discrete SP cycle of Blyth (1972)."""
    return [
        discrete([(3.0, 1)], name="T1"),
        discrete([(1.0, 0.4), (4.0, 0.6)], name="T2"),
        discrete([(2.0, 0.6), (5.0, 0.4)], name="T3"),
    ]
