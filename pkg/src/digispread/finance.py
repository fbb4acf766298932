"""Discretized Black-Scholes-Merton log-normal distribution and classical ground truth."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from digispread.circuits import Pmf
from digispread.errors import DomainError, StructuralError

#: Normalized index-weighted mean reported for the eight-state option-pricing run.
REPORTED_NORMALIZED_WAG = 0.492592625


@dataclass(frozen=True)
class BsmParams:
    s0: float = 2.0
    sigma: float = 0.10
    rate: float = 0.04
    maturity: float = 300 / 365
    qubits: int = 3
    grid_lo: float | None = None  # None: exp(mu - 3 sigma sqrt(T))
    grid_hi: float | None = None  # None: exp(mu + 3 sigma sqrt(T))

    def __post_init__(self):
        if self.s0 <= 0 or self.sigma <= 0 or self.maturity <= 0:
            raise DomainError("s0, sigma and maturity must be positive")
        if self.qubits < 1:
            raise DomainError("need at least one qubit")
        lo, hi = self.grid
        if lo <= 0 or hi <= lo:
            raise DomainError(f"grid must satisfy 0 < lo < hi, got [{lo}, {hi}]")

    @property
    def mu(self) -> float:
        """Mean of ``ln S_T``."""
        return math.log(self.s0) + (self.rate - self.sigma**2 / 2) * self.maturity

    @property
    def log_sd(self) -> float:
        return self.sigma * math.sqrt(self.maturity)

    @property
    def grid(self) -> tuple[float, float]:
        lo = self.grid_lo if self.grid_lo is not None else math.exp(self.mu - 3 * self.log_sd)
        hi = self.grid_hi if self.grid_hi is not None else math.exp(self.mu + 3 * self.log_sd)
        return lo, hi


def bsm_density(s, p: BsmParams):
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr <= 0):
        raise DomainError("price must be positive")
    var = p.sigma**2 * p.maturity
    out = np.exp(-((np.log(s_arr) - p.mu) ** 2) / (2 * var)) / (s_arr * p.sigma * math.sqrt(2 * math.pi * p.maturity))
    return float(out) if out.ndim == 0 else out


def price_grid(p: BsmParams) -> np.ndarray:
    lo, hi = p.grid
    return np.linspace(lo, hi, 1 << p.qubits)


def discretize_pmf(p: BsmParams) -> Pmf:
    values = price_grid(p)
    return Pmf.from_weights(bsm_density(values, p), values)


def ground_truth_wag(pmf: Pmf, mode: str = "index") -> float:
    """``index``: sum p_i i; ``normalized``: that divided by N; ``price``: sum p_i v_i."""
    if mode == "index":
        return pmf.index_mean()
    if mode == "normalized":
        return pmf.index_mean() / pmf.num_states
    if mode == "price":
        if pmf.values is None:
            raise StructuralError("price mode needs a value grid")
        return float(np.dot(pmf.probs, pmf.values))
    raise ValueError(f"unknown mode {mode!r}")


def index_to_price(index_wag: float, pmf: Pmf) -> float:
    """Map an index-unit mean onto the (uniform) price grid."""
    if pmf.values is None:
        raise StructuralError("PMF has no value grid")
    lo = pmf.values[0]
    step = (pmf.values[-1] - lo) / (pmf.num_states - 1)
    return float(lo + step * index_wag)


def fit_symmetric_grid(
    p: BsmParams, target: float = REPORTED_NORMALIZED_WAG, lo: float = 0.05, hi: float = 1.5
) -> BsmParams:
    """Grid ``[s0 - h, s0 + h]`` whose normalized index mean equals ``target``.

    The half-width ``h`` is found by bracketing on ``[lo, hi]`` (clipped so the
    grid stays positive).
    """
    hi = min(hi, p.s0 * (1 - 1e-9))

    def gap(h: float) -> float:
        q = replace(p, grid_lo=p.s0 - h, grid_hi=p.s0 + h)
        return ground_truth_wag(discretize_pmf(q), "normalized") - target

    hs = np.linspace(lo, hi, 200)
    gaps = [gap(h) for h in hs]
    for a, b, ga, gb in zip(hs, hs[1:], gaps, gaps[1:]):
        if ga == 0:
            b = a
            break
        if ga * gb < 0:
            break
    else:
        raise DomainError(f"no symmetric grid in [{lo}, {hi}] reaches {target}")
    h = a if a == b else brentq(gap, a, b, xtol=1e-15, rtol=1e-15)
    return replace(p, grid_lo=p.s0 - h, grid_hi=p.s0 + h)
