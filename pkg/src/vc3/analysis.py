"""Numerical studies of the codec: error statistics, precision
sensitivity, bin misses, fractional splitting, companding, and
idempotence.

Sampling is deterministic: the sample stream is split into fixed-size
chunks and chunk ``i`` draws from an independent counter-based generator
keyed by ``(seed, i)``, so serial and parallel runs agree and partial
statistics merge in chunk order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import codec
from .errors import DomainError, EmptyDomain, InvalidSplit
from .layout import (
    ALL_SINGLE_POLICY,
    DEFAULT_LAYOUT,
    DEFAULT_POLICY,
    ORACLE_POLICY,
    BitLayout,
    PrecisionPolicy,
)

CHUNK = 1 << 20

_DOMAIN_KINDS = ("unit_sphere", "sphere_angles", "cube", "shell")


@dataclass(frozen=True)
class SampleDomain:
    """What to sample: a region, a count, and a seed.

    ``unit_sphere`` is area-uniform on the sphere; ``sphere_angles``
    draws theta and phi uniformly in their ranges (denser near the
    poles); ``cube`` is uniform on [-1, 1]^3; ``shell`` scales
    area-uniform directions by a radius uniform in [r_min, r_max].
    Samples are generated in double precision and narrowed to float32.
    """

    kind: str = "unit_sphere"
    count: int = 1_000_000
    seed: int = 0
    r_min: float = 1.0
    r_max: float = 1.0

    def __post_init__(self):
        if self.kind not in _DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.count < 0:
            raise ValueError("count must be non-negative")
        if self.kind == "shell" and not 0 <= self.r_min <= self.r_max:
            raise ValueError("shell needs 0 <= r_min <= r_max")

    def describe(self) -> str:
        if self.kind == "shell":
            return f"shell:{self.r_min:g}:{self.r_max:g}"
        return self.kind

    def _chunk(self, index: int, n: int) -> np.ndarray:
        g = np.random.Generator(np.random.Philox(key=(self.seed, index)))
        if self.kind == "cube":
            return g.uniform(-1.0, 1.0, (n, 3)).astype(np.float32)
        if self.kind == "sphere_angles":
            th = g.uniform(-np.pi, np.pi, n)
            ph = g.uniform(0.0, np.pi, n)
            sp = np.sin(ph)
            v = np.stack([sp * np.cos(th), sp * np.sin(th), np.cos(ph)], axis=1)
            return v.astype(np.float32)
        th = g.uniform(-np.pi, np.pi, n)
        z = g.uniform(-1.0, 1.0, n)
        s = np.sqrt(1.0 - z * z)
        v = np.stack([s * np.cos(th), s * np.sin(th), z], axis=1)
        if self.kind == "shell":
            r = g.uniform(self.r_min, self.r_max, n)
            v = v * r[:, None]
        return v.astype(np.float32)

    def chunks(self):
        done = 0
        index = 0
        while done < self.count:
            n = min(CHUNK, self.count - done)
            yield self._chunk(index, n)
            done += n
            index += 1


def sample(domain: SampleDomain) -> np.ndarray:
    """Materialise the full (count, 3) float32 sample array."""
    if domain.count == 0:
        return np.empty((0, 3), dtype=np.float32)
    return np.concatenate(list(domain.chunks()), axis=0)


@dataclass
class ErrorStats:
    mean: float
    max: float
    stddev: float
    count: int
    normalised: bool

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "max": self.max,
            "stddev": self.stddev,
            "count": self.count,
            "normalised": self.normalised,
        }


class _Welford:
    """Chunk-mergeable mean/variance/max accumulator (N-1 variance)."""

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0
        self.max = 0.0

    def add(self, values: np.ndarray):
        n2 = values.size
        if n2 == 0:
            return
        m2_mean = float(values.mean())
        m2_m2 = float(((values - m2_mean) ** 2).sum())
        if self.n == 0:
            self.n, self.mean, self.m2 = n2, m2_mean, m2_m2
        else:
            n = self.n + n2
            d = m2_mean - self.mean
            self.mean += d * n2 / n
            self.m2 += m2_m2 + d * d * self.n * n2 / n
            self.n = n
        self.max = max(self.max, float(values.max()))

    def stats(self, normalised: bool) -> ErrorStats:
        sd = math.sqrt(self.m2 / (self.n - 1)) if self.n > 1 else 0.0
        return ErrorStats(self.mean, self.max, sd, self.n, normalised)


def _errors(v: np.ndarray, vh: np.ndarray, normalised: bool) -> np.ndarray:
    d = v.astype(np.float64) - vh.astype(np.float64)
    e = np.sqrt((d * d).sum(axis=1))
    if normalised:
        nv = np.sqrt((v.astype(np.float64) ** 2).sum(axis=1))
        e = e / np.where(nv > 0, nv, 1.0)
    return e


def error_study(domain: SampleDomain, layout: BitLayout = DEFAULT_LAYOUT,
                policy: PrecisionPolicy = DEFAULT_POLICY,
                normalised: bool = False) -> ErrorStats:
    """Round-trip L2 error statistics over a sample domain."""
    if domain.count == 0:
        raise EmptyDomain("error_study needs at least one sample")
    acc = _Welford()
    for v in domain.chunks():
        vh = codec.decompress(codec.compress(v, layout, policy), layout)
        acc.add(_errors(v, vh, normalised))
    return acc.stats(normalised)


def precision_comparison(count: int, seed: int,
                         layout: BitLayout = DEFAULT_LAYOUT) -> list[dict]:
    """Error statistics for the four single/double angle policies.

    Rows cover the unit sphere and the cube, errors normalised by the
    vector magnitude before aggregation.  Quantisation stays on the
    narrowed (single) angle in all rows, as in the production default.
    """
    rows = []
    for kind in ("unit_sphere", "cube"):
        domain = SampleDomain(kind, count, seed)
        for theta in ("single", "double"):
            for phi in ("single", "double"):
                policy = PrecisionPolicy(theta, phi, "single")
                stats = error_study(domain, layout, policy, normalised=True)
                rows.append({
                    "domain": kind,
                    "theta": theta,
                    "phi": phi,
                    **stats.to_dict(),
                })
    return rows


def anisotropy_map(layout: BitLayout = DEFAULT_LAYOUT,
                   policy: PrecisionPolicy = ORACLE_POLICY,
                   grid: tuple[int, int] = (32, 16),
                   count: int = 1_000_000, seed: int = 0):
    """Mean round-trip error binned by (theta, phi) cell on the unit sphere.

    Returns (means, counts, theta_edges, phi_edges); cells with no
    samples hold NaN.  Suitable for heat-map plotting.
    """
    tc, pc = grid
    if tc < 1 or pc < 1:
        raise ValueError("grid cells must be >= 1")
    sums = np.zeros((tc, pc))
    counts = np.zeros((tc, pc), dtype=np.int64)
    domain = SampleDomain("unit_sphere", count, seed)
    for v in domain.chunks():
        vh = codec.decompress(codec.compress(v, layout, policy), layout)
        e = _errors(v, vh, normalised=False)
        x, y, z = (v[:, i].astype(np.float64) for i in range(3))
        r = np.sqrt(x * x + y * y + z * z)
        th = np.arctan2(y, x)
        ph = np.arccos(np.clip(z / np.where(r > 0, r, 1.0), -1.0, 1.0))
        ti = np.clip(((th + np.pi) / (2 * np.pi) * tc).astype(np.int64), 0, tc - 1)
        pi_ = np.clip((ph / np.pi * pc).astype(np.int64), 0, pc - 1)
        np.add.at(sums, (ti, pi_), e)
        np.add.at(counts, (ti, pi_), 1)
    means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    theta_edges = np.linspace(-np.pi, np.pi, tc + 1)
    phi_edges = np.linspace(0.0, np.pi, pc + 1)
    return means, counts, theta_edges, phi_edges


def anisotropy_rows(means: np.ndarray) -> list[tuple[int, int, float]]:
    """Flatten an anisotropy grid into (theta_cell, phi_cell, mean) rows."""
    rows = []
    for i in range(means.shape[0]):
        for j in range(means.shape[1]):
            if not np.isnan(means[i, j]):
                rows.append((i, j, float(means[i, j])))
    return rows


def _bins(v: np.ndarray, layout: BitLayout, policy: PrecisionPolicy):
    r, th, ph = codec.to_spherical(v, policy)
    return codec.quantize_angles(th, ph, layout, policy)


def bin_miss_study(domain: SampleDomain,
                   layout: BitLayout = DEFAULT_LAYOUT) -> tuple[float, float]:
    """Fraction of samples whose bucket index differs between the
    all-single and all-double intermediate pipelines."""
    if domain.count == 0:
        raise EmptyDomain("bin_miss_study needs at least one sample")
    miss_t = miss_p = total = 0
    for v in domain.chunks():
        nt_s, np_s = _bins(v, layout, ALL_SINGLE_POLICY)
        nt_d, np_d = _bins(v, layout, ORACLE_POLICY)
        miss_t += int(np.count_nonzero(nt_s != nt_d))
        miss_p += int(np.count_nonzero(np_s != np_d))
        total += v.shape[0]
    return miss_t / total, miss_p / total


# -- fractional splitting ---------------------------------------------------

@dataclass(frozen=True)
class SplitConfig:
    """Joint angle coding: n_p = n_phi*(n_theta_max+1) + n_theta in p bits."""

    total_bits: int
    n_phi_max: int
    n_theta_max: int = field(init=False)

    def __post_init__(self):
        if not 2 <= self.total_bits <= 62:
            raise InvalidSplit(f"total_bits {self.total_bits} out of range")
        if self.n_phi_max < 1:
            raise InvalidSplit("n_phi_max must be >= 1")
        cap = 1 << self.total_bits
        nt1 = cap // (self.n_phi_max + 1)
        if nt1 < 2:
            raise InvalidSplit(
                f"n_phi_max {self.n_phi_max} leaves no room for theta in "
                f"{self.total_bits} bits"
            )
        object.__setattr__(self, "n_theta_max", nt1 - 1)
        if (self.n_phi_max + 1) * (self.n_theta_max + 1) - 1 >= cap:
            raise InvalidSplit("joint index exceeds capacity")


def joint_encode(n_theta, n_phi, cfg: SplitConfig):
    nt = np.asarray(n_theta, dtype=np.int64)
    nph = np.asarray(n_phi, dtype=np.int64)
    if (nt < 0).any() or (nt > cfg.n_theta_max).any():
        raise InvalidSplit("n_theta out of range for split")
    if (nph < 0).any() or (nph > cfg.n_phi_max).any():
        raise InvalidSplit("n_phi out of range for split")
    return nph * (cfg.n_theta_max + 1) + nt


def joint_decode(n_joint, cfg: SplitConfig):
    npk = np.asarray(n_joint, dtype=np.int64)
    nt1 = cfg.n_theta_max + 1
    return npk % nt1, npk // nt1


def _quantize_free(th, ph, ntmax: int, npmax: int):
    # same bucket arithmetic as the codec kernels, for arbitrary bin counts
    vt = ntmax / 2.0 + th * (ntmax / (2.0 * np.pi))
    vp = ph * (npmax / np.pi)
    nt = np.ceil(np.floor(2.0 * vt) / 2.0).astype(np.int64)
    nph = np.ceil(np.floor(2.0 * vp) / 2.0).astype(np.int64)
    return np.clip(nt, 0, ntmax), np.clip(nph, 0, npmax)


def split_sweep(total_bits: int, splits, domain: SampleDomain,
                layout: BitLayout = DEFAULT_LAYOUT) -> list[tuple[SplitConfig, ErrorStats]]:
    """Round-trip error for each joint-coding split of the angle bits.

    Angles run through the double-precision pipeline and the joint code;
    the magnitude reuses the layout's reduced-float field.
    """
    if domain.count == 0:
        raise EmptyDomain("split_sweep needs at least one sample")
    configs = [SplitConfig(total_bits, int(s) - 1) for s in splits]
    results = []
    for cfg in configs:
        acc = _Welford()
        for v in domain.chunks():
            r, th, ph = codec.to_spherical(v, ORACLE_POLICY)
            nt, nph = _quantize_free(th, ph, cfg.n_theta_max, cfg.n_phi_max)
            nt2, nph2 = joint_decode(joint_encode(nt, nph, cfg), cfg)
            rh = codec.decode_magnitude(codec.encode_magnitude(r, layout), layout)
            rh = rh.astype(np.float64)
            th2 = np.pi * (2.0 * nt2 / cfg.n_theta_max - 1.0)
            ph2 = np.pi * nph2 / cfg.n_phi_max
            sp = np.sin(ph2)
            vh = np.stack(
                [rh * np.cos(th2) * sp, rh * np.sin(th2) * sp, rh * np.cos(ph2)],
                axis=1,
            ).astype(np.float32)
            acc.add(_errors(v, vh, normalised=False))
        results.append((cfg, acc.stats(False)))
    return results


# -- companding -------------------------------------------------------------

@dataclass(frozen=True)
class Compander:
    """Monotone map applied to a normalised angle before uniform binning.

    ``uniform`` is the identity; ``cosine`` is n_max*(1-cos(pi*psi))/2;
    ``tanh`` uses m*n_max*(tanh(gamma*(2 psi - 1)) + c) with c = tanh(gamma)
    and m = 1/(2c).  All maps take psi in [0, 1].
    """

    kind: str = "uniform"
    gamma: float = 0.5

    def __post_init__(self):
        if self.kind not in ("uniform", "cosine", "tanh"):
            raise ValueError(f"unknown compander {self.kind!r}")
        if self.kind == "tanh" and self.gamma <= 0:
            raise ValueError("tanh compander needs gamma > 0")

    def encode(self, psi, n_max: int):
        psi = np.asarray(psi, dtype=np.float64)
        if self.kind == "uniform":
            raw = psi * n_max
        elif self.kind == "cosine":
            raw = n_max * (1.0 - np.cos(np.pi * psi)) / 2.0
        else:
            c = math.tanh(self.gamma)
            m = 1.0 / (2.0 * c)
            raw = m * n_max * (np.tanh(self.gamma * (2.0 * psi - 1.0)) + c)
        n = np.ceil(np.floor(2.0 * raw) / 2.0).astype(np.int64)
        return np.clip(n, 0, n_max)

    def decode(self, n, n_max: int):
        n = np.asarray(n, dtype=np.float64)
        if self.kind == "uniform":
            return n / n_max
        if self.kind == "cosine":
            return np.arccos(np.clip(1.0 - 2.0 * n / n_max, -1.0, 1.0)) / np.pi
        c = math.tanh(self.gamma)
        m = 1.0 / (2.0 * c)
        u = np.clip(n / (m * n_max) - c, -c, c)
        # arctanh(tanh(gamma)) can overshoot gamma by an ulp; keep psi in range
        return np.clip((np.arctanh(u) / self.gamma + 1.0) / 2.0, 0.0, 1.0)


def compand(psi, compander: Compander, n_max: int):
    """Bucket index of a normalised angle under a compander."""
    return compander.encode(psi, n_max)


def compand_inverse(n, compander: Compander, n_max: int):
    """Normalised angle reconstructed from a bucket index."""
    return compander.decode(n, n_max)


def compand_study(domain: SampleDomain, compander: Compander,
                  layout: BitLayout = DEFAULT_LAYOUT) -> ErrorStats:
    """Round-trip error with both angles companded before binning."""
    if domain.count == 0:
        raise EmptyDomain("compand_study needs at least one sample")
    acc = _Welford()
    ntmax, npmax = layout.n_theta_max, layout.n_phi_max
    for v in domain.chunks():
        r, th, ph = codec.to_spherical(v, ORACLE_POLICY)
        nt = compander.encode((th + np.pi) / (2.0 * np.pi), ntmax)
        nph = compander.encode(ph / np.pi, npmax)
        th2 = 2.0 * np.pi * compander.decode(nt, ntmax) - np.pi
        ph2 = np.pi * compander.decode(nph, npmax)
        rh = codec.decode_magnitude(codec.encode_magnitude(r, layout), layout)
        rh = rh.astype(np.float64)
        sp = np.sin(ph2)
        vh = np.stack(
            [rh * np.cos(th2) * sp, rh * np.sin(th2) * sp, rh * np.cos(ph2)],
            axis=1,
        ).astype(np.float32)
        acc.add(_errors(v, vh, normalised=False))
    return acc.stats(False)


def smith_theta_bins(phi: float, n_phi_max: int, tau: float) -> int:
    """Azimuth bin count that keeps chordal error within tau on one phi ring.

    Implements the variable-bin rule used for comparison only: the bin
    count depends on phi, so it cannot feed a fixed-rate code.  Raises
    DomainError when the arccosine argument leaves [-1, 1] (tolerance
    finer than the ring spacing allows).
    """
    if not 0.0 < phi < np.pi:
        raise DomainError("phi must lie strictly inside (0, pi)")
    if tau <= 0:
        raise DomainError("tau must be positive")
    step = np.pi / (2.0 * n_phi_max)
    num = math.cos(tau) - math.cos(phi) * math.cos(phi + step)
    den = math.sin(phi) * math.sin(phi + step)
    arg = num / den
    if not -1.0 <= arg <= 1.0:
        raise DomainError(f"arccos argument {arg} outside [-1, 1]")
    inv = math.acos(arg)
    if inv == 0.0:
        raise DomainError("tolerance exactly at the ring spacing limit")
    return int(math.ceil(math.pi / inv))


# -- idempotence ------------------------------------------------------------

@dataclass
class IdempotenceResult:
    word_miss_fraction: float
    predicted_bound: float
    third_cycle_stable_fraction: float
    count: int

    def to_dict(self) -> dict:
        return {
            "word_miss_fraction": self.word_miss_fraction,
            "predicted_bound": self.predicted_bound,
            "third_cycle_stable_fraction": self.third_cycle_stable_fraction,
            "count": self.count,
        }


def idempotence_study(domain: SampleDomain, layout: BitLayout = DEFAULT_LAYOUT,
                      policy: PrecisionPolicy = DEFAULT_POLICY,
                      u: int = 8) -> IdempotenceResult:
    """Word stability under repeated compress/decompress cycles.

    A miss is w2 != w1 where w2 = compress(decompress(w1)).  The
    predicted bound is 2*u*2**(p - m_int) with p the wider of the two
    angle fields and m_int the intermediate mantissa width (24 if any
    angle intermediate runs in single precision, else 53); u is the ulp
    budget of the inverse trigonometry.
    """
    if domain.count == 0:
        raise EmptyDomain("idempotence_study needs at least one sample")
    misses = stable3 = total = 0
    for v in domain.chunks():
        w1 = codec.compress(v, layout, policy)
        w2 = codec.compress(codec.decompress(w1, layout), layout, policy)
        w3 = codec.compress(codec.decompress(w2, layout), layout, policy)
        misses += int(np.count_nonzero(w1 != w2))
        stable3 += int(np.count_nonzero(w2 == w3))
        total += v.shape[0]
    m_int = 24 if (policy.theta_single or policy.phi_single) else 53
    p_eff = max(layout.phi_bits, layout.theta_bits)
    bound = 2.0 * u * 2.0 ** (p_eff - m_int)
    return IdempotenceResult(misses / total, bound, stable3 / total, total)


def report(domain: SampleDomain, layout: BitLayout, policy: PrecisionPolicy,
           **extra) -> dict:
    """Common machine-readable report envelope for the studies."""
    doc = {
        "layout": str(layout),
        "policy": policy.spec(),
        "domain": domain.describe(),
        "seed": domain.seed,
        "count": domain.count,
    }
    doc.update(extra)
    return doc
