"""Numeric brute-force check of temperedness on a region.

``exp(phi)`` is never formed: ``log|exp(phi)| = Re(phi)`` is evaluated
directly, so exponential growth cannot overflow. Samples are quasi-random
(scrambled Halton) and stratified in log-radius toward the origin.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.stats import qmc

from . import kernels
from .exppoly import ExpPolynomial, format_exppoly
from .growth import Verdict
from .regions import (
    RADIAL_FLOOR,
    BallComplement,
    EtaImage,
    ParabolicU1,
    ParabolicU2,
    Polygon,
    RegionSpec,
    Sector,
    Sublevel,
)

try:  # Python 3.11+
    import tomllib as _toml
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as _toml

__all__ = [
    "OracleConfig",
    "GrowthFit",
    "OracleReport",
    "EmptyRegionError",
    "RegionSpec",
    "Sector",
    "BallComplement",
    "ParabolicU1",
    "ParabolicU2",
    "Sublevel",
    "EtaImage",
    "Polygon",
    "log_abs_exp",
    "sample_region",
    "growth_fit",
    "oracle_verdict",
]

log = logging.getLogger(__name__)

MAX_PROPOSALS = 10 ** 6
MIN_FIT_SAMPLES = 32


class EmptyRegionError(ValueError):
    """No proposal landed inside the region."""


@dataclass(frozen=True)
class OracleConfig:
    precision_bits: int = 128
    samples: int = 10_000
    seed: int = 0
    delta_m: float = 0.5
    max_residual: float = 1.0
    growth_ratio: float = 1.5
    growth_run: int = 3
    growth_floor: float = 10.0
    bins: int = 16
    quantile: float = 0.9
    threads: int = 1

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "OracleConfig":
        known = {f.name: f.type for f in fields(cls)}
        unknown = set(data) - set(known)
        if unknown:
            raise ValueError(f"unknown oracle config keys: {sorted(unknown)}")
        defaults = cls()
        kw = {k: type(getattr(defaults, k))(v) for k, v in data.items()}
        return cls(**kw)

    @classmethod
    def from_file(cls, path: str | Path) -> "OracleConfig":
        with open(path, "rb") as fh:
            return cls.from_mapping(_toml.load(fh))


@dataclass(frozen=True)
class GrowthFit:
    """Envelope fit ``log|f| <= logC + M log(1/d)``; ``fitted_M`` is None when the fit failed."""

    fitted_M: float | None
    fitted_logC: float
    max_residual: float
    sample_count: int
    slope: float = math.nan

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class OracleReport:
    verdict: Verdict
    fit: GrowthFit
    fit_alt: GrowthFit
    strata_max: tuple[float, ...]
    growth_run: int
    diagnostics: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "fit": self.fit.to_json(),
            "fit_alt": self.fit_alt.to_json(),
            "strata_max_log_abs": [None if math.isinf(s) else s for s in self.strata_max],
            "origin_growth_run": self.growth_run,
            "diagnostics": list(self.diagnostics),
        }


# --------------------------------------------------------------------------

def _coeffs_of(phi) -> tuple[np.ndarray, int]:
    if isinstance(phi, ExpPolynomial):
        return phi.coeff_array(), phi.ram_index
    arr = np.asarray(phi, dtype=complex).ravel()
    return np.concatenate([[0], arr]), 1


def log_abs_exp(phi, z: np.ndarray, threads: int = 1, chunk: int = 4096) -> np.ndarray:
    """``log|exp(phi(z))| = Re phi(z)``; ramified phi use the principal ``z^(1/l)``.

    ``phi`` is an :class:`ExpPolynomial` or a numeric list ``[a_1, ..., a_n]``.
    """
    coeffs, l = _coeffs_of(phi)
    z = np.asarray(z, dtype=complex)
    w = z if l == 1 else z ** (1.0 / l)
    if threads <= 1 or w.shape[0] <= chunk:
        return kernels.re_laurent(coeffs, w)
    parts = [w[i:i + chunk] for i in range(0, w.shape[0], chunk)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        out = list(pool.map(lambda p: kernels.re_laurent(coeffs, p), parts))
    return np.concatenate(out)


def sample_region(r: RegionSpec, count: int, seed: int) -> np.ndarray:
    """``count`` deterministic quasi-random points inside ``r`` (complex array)."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    halton = qmc.Halton(d=2, scramble=True, seed=rng)
    got: list[np.ndarray] = []
    total = proposals = 0
    while total < count:
        m = max(256, 2 * (count - total))
        u = halton.random(m)
        # Halton points are in [0, 1); keep them off the edges
        u = np.clip(u, 1e-12, 1 - 1e-12)
        z = r.propose(u)
        ok = r.contains(z) & np.isfinite(z)
        proposals += m
        if ok.any():
            got.append(z[ok])
            total += int(ok.sum())
        elif total == 0 and proposals >= MAX_PROPOSALS:
            raise EmptyRegionError(f"no point of {r.kind} found in {proposals} proposals")
    return np.concatenate(got)[:count]


def growth_fit(values, region: RegionSpec, *, log_values: bool = False,
               config: OracleConfig | None = None) -> GrowthFit:
    """Fit the upper envelope of ``log|f|`` against ``log(1/dist(z, boundary))``.

    ``values`` is a sequence of ``(point, |f(point)|)`` pairs, or of
    ``(point, log|f(point)|)`` with ``log_values=True``. Per distance bin the
    upper quantile is taken, the bins are made monotone by a running maximum,
    and a line is fitted on the populated bins of the upper half of the range.
    """
    cfg = config or OracleConfig()
    pts = np.array([complex(p) for p, _ in values])
    vals = np.array([float(v) for _, v in values])
    if not log_values:
        with np.errstate(divide="ignore"):
            vals = np.log(vals)
    return _fit(pts, vals, region, cfg)


def _fit(pts, logf, region, cfg: OracleConfig) -> GrowthFit:
    n = pts.shape[0]
    if n < MIN_FIT_SAMPLES:
        raise ValueError(f"growth_fit needs at least {MIN_FIT_SAMPLES} samples, got {n}")
    d = region.boundary_distance(pts)
    keep = (d > 0) & np.isfinite(d) & np.isfinite(logf)
    L = np.log(1.0 / d[keep])
    y = logf[keep]
    if L.size < MIN_FIT_SAMPLES or np.ptp(L) < 1e-9:
        raise ValueError("degenerate distance spread: samples are (nearly) equidistant from the boundary")
    edges = np.linspace(L.min(), L.max(), cfg.bins + 1)
    idx = np.clip(np.searchsorted(edges, L, side="right") - 1, 0, cfg.bins - 1)
    xs, ys = [], []
    for b in range(cfg.bins):
        sel = idx == b
        if sel.any():
            xs.append(0.5 * (edges[b] + edges[b + 1]))
            ys.append(np.quantile(y[sel], cfg.quantile))
    xs = np.array(xs)
    ys = np.maximum.accumulate(np.array(ys))
    mid = 0.5 * (edges[0] + edges[-1])
    upper = xs >= mid
    if upper.sum() < 2:
        upper = np.ones_like(xs, dtype=bool)
    if upper.sum() < 2:
        raise ValueError("degenerate distance spread: fewer than two populated bins")
    slope, icpt = np.polyfit(xs[upper], ys[upper], 1)
    resid = ys[upper] - (slope * xs[upper] + icpt)
    max_res = float(np.max(np.abs(resid)))
    logC = float(icpt + np.max(resid))
    M = float(slope) if max_res < cfg.max_residual else None
    return GrowthFit(M, logC, max_res, int(n), float(slope))


def _strata(pts, logf, radius: float) -> list[float]:
    # only strata lying fully above the sampling floor
    K = int(math.floor(math.log2(1.0 / RADIAL_FLOOR)))
    k = np.floor(np.log2(radius / np.abs(pts))).astype(int)
    out = []
    for s in range(K):
        sel = k == s
        out.append(float(np.max(logf[sel])) if sel.any() else -math.inf)
    return out


def _origin_run(strata: Sequence[float], ratio: float) -> int:
    """Length of the run of consecutive growing strata that reaches the innermost one."""
    vals = [s for s in strata if not math.isinf(s)]
    run = 0
    for k in range(len(vals) - 1, 0, -1):
        prev, cur = vals[k - 1], vals[k]
        if prev > 0 and cur >= ratio * prev:
            run += 1
        else:
            break
    return run


def oracle_verdict(phi, region: RegionSpec, budget: int = 10_000, seed: int = 0,
                   config: OracleConfig | None = None) -> OracleReport:
    """Empirical verdict on whether ``exp(phi)`` is tempered on ``region``.

    Two independent sample sets of ``budget // 2`` points each. NotTempered
    when the maximum of ``Re phi`` keeps growing geometrically over the
    innermost dyadic radius strata; Tempered when both envelope fits succeed
    with slopes within ``delta_m``; Boundary otherwise.
    """
    cfg = config or OracleConfig()
    if budget < 1000:
        raise ValueError("budget must be at least 1000 samples")
    seeds = np.random.SeedSequence(seed).spawn(2)
    half = budget // 2
    sets = []
    for ss in seeds:
        s = int(ss.generate_state(1)[0])
        z = sample_region(region, half, s)
        sets.append((z, log_abs_exp(phi, z, threads=cfg.threads)))
    all_z = np.concatenate([s[0] for s in sets])
    all_f = np.concatenate([s[1] for s in sets])
    probe = region.probes(max(budget // 10, 64))
    if probe.size:
        probe = probe[region.contains(probe)]
        all_z = np.concatenate([all_z, probe])
        all_f = np.concatenate([all_f, log_abs_exp(phi, probe, threads=cfg.threads)])
    strata = _strata(all_z, all_f, region.bounding_radius())
    run = _origin_run(strata, cfg.growth_ratio)
    inner = max((s for s in strata if not math.isinf(s)), default=-math.inf)
    diags = []
    fits = []
    for z, f in sets:
        try:
            fits.append(_fit(z, f, region, cfg))
        except ValueError as exc:
            diags.append(str(exc))
            fits.append(GrowthFit(None, math.nan, math.inf, int(z.shape[0])))
    fit, alt = fits
    if run >= cfg.growth_run and inner >= cfg.growth_floor:
        verdict = Verdict.NotTempered
    elif (fit.fitted_M is not None and alt.fitted_M is not None
          and abs(fit.fitted_M - alt.fitted_M) < cfg.delta_m):
        verdict = Verdict.Tempered
    else:
        verdict = Verdict.Boundary
        diags.append("neither the doubling test nor a stable envelope fit was conclusive")
    label = format_exppoly(phi) if isinstance(phi, ExpPolynomial) else repr(list(phi))
    log.debug("oracle %s on %s: %s", label, region.kind, verdict.value)
    return OracleReport(verdict, fit, alt, tuple(strata), run, tuple(diags))
