"""Mildly ill-posed Gaussian sequence model.

Data are coordinatewise observations

    y_i = kappa_i * mu_i + n^(-1/2) * z_i,   z_i iid standard normal,

where the multipliers kappa_i decay polynomially, kappa_i ~ i^(-p).
This module owns the model/truth descriptions, simulation, norms of
coefficient sequences, and synthesis back to functions on [0, 1] in the
shifted cosine basis e_i(t) = sqrt(2) * cos((i - 1/2) * pi * t).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, OutOfRangeError

TRUNCATION_CAP = 100_000


@dataclass(frozen=True)
class ModelSpec:
    """Decay law of the multipliers kappa_i.

    kind is one of "exact_power" (kappa_i = i^-p), "volterra"
    (kappa_i = 1/((i - 1/2)*pi), decay order p = 1) or "explicit"
    (tabulated kappa values with a declared order p and sandwich
    constant C, i.e. i^-p / C <= kappa_i <= C * i^-p).
    """

    kind: str
    p: float
    C: float = 1.0
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("exact_power", "volterra", "explicit"):
            raise ConfigError(f"unknown model kind {self.kind!r}")
        if self.p < 0:
            raise ConfigError("decay order p must be >= 0")
        if self.C < 1.0:
            raise ConfigError("sandwich constant C must be >= 1")
        if self.kind == "explicit":
            if not self.table:
                raise ConfigError("explicit model needs a non-empty kappa table")
            t = np.asarray(self.table, dtype=float)
            if not np.all(np.isfinite(t)) or np.any(t <= 0):
                raise ConfigError("tabulated kappa values must be positive and finite")
            i = np.arange(1, t.size + 1, dtype=float)
            ratio = t * i**self.p
            if ratio.max() > self.C * (1 + 1e-12) or ratio.min() < (1 - 1e-12) / self.C:
                raise ConfigError("kappa table violates the declared i^-p sandwich")
        elif self.table is not None:
            raise ConfigError("kappa table only makes sense for the explicit kind")

    @classmethod
    def exact_power(cls, p: float) -> "ModelSpec":
        return cls(kind="exact_power", p=float(p))

    @classmethod
    def volterra(cls) -> "ModelSpec":
        # C = pi covers both ends: i^-1/pi <= 1/((i-1/2)*pi) <= (2/pi)*i^-1.
        return cls(kind="volterra", p=1.0, C=math.pi)

    @classmethod
    def explicit(cls, table, p: float, C: float) -> "ModelSpec":
        return cls(kind="explicit", p=float(p), C=float(C), table=tuple(float(v) for v in table))

    def kappa_vector(self, N: int) -> np.ndarray:
        """kappa_1..kappa_N as a float array."""
        if N < 1:
            raise ConfigError("need at least one coordinate")
        i = np.arange(1, N + 1, dtype=float)
        if self.kind == "exact_power":
            return i**-self.p
        if self.kind == "volterra":
            return 1.0 / ((i - 0.5) * math.pi)
        if N > len(self.table):
            raise OutOfRangeError(
                f"kappa table has {len(self.table)} entries, coordinate {N} requested"
            )
        return np.asarray(self.table[:N], dtype=float)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "p": self.p, "C": self.C}
        if self.table is not None:
            d["table"] = list(self.table)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(
            kind=d["kind"],
            p=float(d["p"]),
            C=float(d.get("C", 1.0)),
            table=tuple(d["table"]) if d.get("table") is not None else None,
        )


def kappa(model: ModelSpec, i: int) -> float:
    """Multiplier kappa_i for a single 1-based coordinate."""
    if i < 1:
        raise ConfigError("coordinate index is 1-based")
    return float(model.kappa_vector(i)[-1])


def sandwich_constant(model: ModelSpec, N: int) -> float:
    """Smallest C such that i^-p/C <= kappa_i <= C*i^-p over i <= N (by scan)."""
    i = np.arange(1, N + 1, dtype=float)
    ratio = model.kappa_vector(N) * i**model.p
    return float(max(ratio.max(), 1.0 / ratio.min()))


@dataclass(frozen=True)
class TruthSpec:
    """Generator for the true coefficient sequence mu_0.

    Kinds: "explicit" (a finite table, zero-padded), "power_law"
    (mu_i = c * i^(-1/2 - beta), Sobolev-regular of order beta),
    "paper_example" (mu_i = i^(-3/2) * sin(i), effective order 1),
    "analytic_decay" (mu_i = c * exp(-gamma * i)) and "zero".
    """

    kind: str
    beta: float | None = None
    gamma: float | None = None
    c: float = 1.0
    coeffs: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("explicit", "power_law", "paper_example", "analytic_decay", "zero"):
            raise ConfigError(f"unknown truth kind {self.kind!r}")
        if self.kind == "power_law" and (self.beta is None or self.beta <= 0):
            raise ConfigError("power_law truth needs beta > 0")
        if self.kind == "analytic_decay" and (self.gamma is None or self.gamma <= 0):
            raise ConfigError("analytic_decay truth needs gamma > 0")
        if self.kind == "explicit" and self.coeffs is None:
            raise ConfigError("explicit truth needs a coefficient table")

    @classmethod
    def explicit(cls, coeffs) -> "TruthSpec":
        return cls(kind="explicit", coeffs=tuple(float(v) for v in coeffs))

    @classmethod
    def power_law(cls, beta: float, c: float = 1.0) -> "TruthSpec":
        return cls(kind="power_law", beta=float(beta), c=float(c))

    @classmethod
    def paper_example(cls) -> "TruthSpec":
        return cls(kind="paper_example")

    @classmethod
    def analytic_decay(cls, gamma: float, c: float = 1.0) -> "TruthSpec":
        return cls(kind="analytic_decay", gamma=float(gamma), c=float(c))

    @classmethod
    def zero(cls) -> "TruthSpec":
        return cls(kind="zero")

    def coefficients(self, N: int) -> np.ndarray:
        """mu_0,1..mu_0,N.  Explicit tables are zero-padded past their end."""
        if N < 1:
            raise ConfigError("need at least one coordinate")
        i = np.arange(1, N + 1, dtype=float)
        if self.kind == "zero":
            return np.zeros(N)
        if self.kind == "explicit":
            out = np.zeros(N)
            k = min(N, len(self.coeffs))
            out[:k] = self.coeffs[:k]
            return out
        if self.kind == "power_law":
            return self.c * i ** (-0.5 - self.beta)
        if self.kind == "analytic_decay":
            return self.c * np.exp(-self.gamma * i)
        return i**-1.5 * np.sin(i)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "c": self.c}
        if self.beta is not None:
            d["beta"] = self.beta
        if self.gamma is not None:
            d["gamma"] = self.gamma
        if self.coeffs is not None:
            d["coeffs"] = list(self.coeffs)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TruthSpec":
        return cls(
            kind=d["kind"],
            beta=d.get("beta"),
            gamma=d.get("gamma"),
            c=float(d.get("c", 1.0)),
            coeffs=tuple(d["coeffs"]) if d.get("coeffs") is not None else None,
        )


@dataclass(frozen=True)
class Observation:
    """A simulated (or loaded) dataset: first N noisy coordinates at noise level n."""

    n: float
    N: int
    y: np.ndarray
    seed: int
    model: ModelSpec

    def to_json(self) -> str:
        d = {
            "n": self.n,
            "N": self.N,
            "seed": self.seed,
            "model": self.model.to_dict(),
            "y": [float(v) for v in self.y],
        }
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Observation":
        d = json.loads(text)
        y = np.asarray(d["y"], dtype=float)
        if y.size != d["N"]:
            raise ConfigError("y length does not match N")
        return cls(n=float(d["n"]), N=int(d["N"]), y=y, seed=int(d["seed"]),
                   model=ModelSpec.from_dict(d["model"]))


def default_truncation(n: float, p: float) -> int:
    """Default number of retained coordinates, ceil(n^(1/(1+2p))) capped at 1e5.

    Past that index the signal-to-noise ratio of a coordinate is too small
    to matter for either estimation or likelihood evaluation.
    """
    if n <= 0:
        raise ConfigError("noise scale n must be positive")
    return min(math.ceil(n ** (1.0 / (1.0 + 2.0 * p))), TRUNCATION_CAP)


def simulate(truth: TruthSpec, model: ModelSpec, n: float, N: int, seed: int) -> Observation:
    """Draw y_i = kappa_i*mu_i + n^(-1/2)*z_i for i = 1..N.

    The same (truth, model, n, N, seed) always produces bit-identical
    output; replicate seeds are conventionally seed + replicate index.
    """
    if n <= 0 or not math.isfinite(n):
        raise ConfigError("noise scale n must be positive and finite")
    if N < 1:
        raise ConfigError("need at least one coordinate")
    mu = truth.coefficients(N)
    kap = model.kappa_vector(N)
    z = np.random.default_rng(seed).standard_normal(N)
    y = kap * mu + z / math.sqrt(n)
    return Observation(n=float(n), N=int(N), y=y, seed=int(seed), model=model)


def sobolev_norm_sq(mu: np.ndarray, beta: float) -> float:
    """sum_i i^(2*beta) * mu_i^2 for the finite sequence mu."""
    mu = np.asarray(mu, dtype=float)
    i = np.arange(1, mu.size + 1, dtype=float)
    return float(np.sum(i ** (2.0 * beta) * mu**2))


def analytic_norm_sq(mu: np.ndarray, gamma: float) -> float:
    """sum_i exp(2*gamma*i) * mu_i^2 for the finite sequence mu."""
    mu = np.asarray(mu, dtype=float)
    i = np.arange(1, mu.size + 1, dtype=float)
    return float(np.sum(np.exp(2.0 * gamma * i) * mu**2))


def synthesize_function(mu: np.ndarray, t_grid: np.ndarray) -> np.ndarray:
    """Evaluate sum_i mu_i * sqrt(2)*cos((i-1/2)*pi*t) on t_grid.

    Plain blockwise summation; with at most 1e5 coefficients and a few
    thousand grid points there is nothing to gain from a fast transform.
    """
    mu = np.asarray(mu, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    out = np.zeros(t.size)
    block = 2048
    for lo in range(0, mu.size, block):
        hi = min(lo + block, mu.size)
        freq = (np.arange(lo + 1, hi + 1, dtype=float) - 0.5) * math.pi
        out += np.cos(np.outer(t, freq)) @ mu[lo:hi]
    return math.sqrt(2.0) * out


def volterra_forward_check(mu: np.ndarray, t: float) -> float:
    """sum_i kappa_i * mu_i * e_i(t) with the volterra multipliers.

    Test helper only.  Applying the weighting twice reproduces integration:
    volterra_forward_check(kappa*mu, t) equals the reflected double
    primitive int_t^1 int_0^s mu(u) du ds of the synthesized signal, which
    is what the quadrature cross-checks in the test suite verify.
    """
    mu = np.asarray(mu, dtype=float)
    kap = ModelSpec.volterra().kappa_vector(mu.size)
    return float(synthesize_function(kap * mu, np.asarray([t]))[0])
