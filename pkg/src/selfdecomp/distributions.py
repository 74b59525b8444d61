"""Densities, seeded samplers and inverse-CDF tables for the eight families.

Sampling is reproducible bit-for-bit: a batch of ``n`` draws is cut into
fixed-size blocks and block ``k`` is generated by a counter-based Philox
stream keyed by ``(seed, k)``. The output therefore does not depend on how
many worker threads produce the blocks.

Per-family samplers
-------------------
exponential, weibull
    Inverse CDF of an open uniform.
gamma
    numpy's ``standard_gamma`` (Marsaglia-Tsang squeeze with the
    ``U**(1/r)`` boost for ``r < 1``).
stable
    Kanter's representation ``S = (A(U)/E)**((1-beta)/beta)`` with ``U``
    uniform on ``(0, pi)``, ``E`` unit exponential and
    ``A(u) = [sin(beta u)**beta sin((1-beta) u)**(1-beta) / sin u]**(1/(1-beta))``.
mwright
    The power ``S**(-beta)`` of a stable draw, computed in log space.
halfnormal
    ``|N(0, 1)|`` by default, or ``sqrt(2 G)`` with ``G ~ gamma(1/2)``.
foxh, gaussian_residual
    Inversion of a tabulated CDF, see :func:`build_inverse_cdf_table`.
"""

from __future__ import annotations

import csv
import io
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, QuadratureError, TableUnavailableError
from .families import DistributionSpec, Family
from .mellin import QuadratureConfig, _quad
from .specfun import foxh_residual_density, gaussian_residual_density, m_wright

__all__ = [
    "DistributionSpec",
    "Family",
    "SampleBatch",
    "InverseCdfTable",
    "pdf",
    "power_pdf",
    "sample",
    "cdf_numeric",
    "build_inverse_cdf_table",
    "ensure_table",
    "register_table",
    "get_table",
    "clear_tables",
    "format_float",
]

BLOCK_SIZE = 1 << 16
TABLE_FORMAT_VERSION = 1
_TABLE_ENV = "SELFDECOMP_TABLE_DIR"

_DEFAULT_QUAD = QuadratureConfig()


def format_float(v: float) -> str:
    """17 significant digits: enough for a lossless double round trip."""
    return f"{float(v):.17g}"


# ---------------------------------------------------------------------------
# densities


def _check_support(x, allow_zero):
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("density argument must be finite")
    if np.any(xa < 0) or (not allow_zero and np.any(xa == 0)):
        raise DomainError("density argument outside the support")
    return xa


def _finite_at_zero(spec: DistributionSpec) -> bool:
    c = spec.head_exponent
    return c is None or c >= 1.0


def pdf(spec: DistributionSpec, x):
    """Density of ``spec`` at ``x``.

    ``x = 0`` is accepted wherever the density is finite there.

    Raises
    ------
    DomainError
        For negative ``x``, or ``x = 0`` where the density diverges.
    """
    xa = _check_support(x, _finite_at_zero(spec))
    fam = spec.family
    p = spec.params
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        if fam is Family.EXPONENTIAL:
            out = np.exp(-xa)
        elif fam is Family.GAMMA:
            r = p["r"]
            if r == 1.0:
                out = np.exp(-xa)
            else:
                out = np.exp(special.xlogy(r - 1.0, xa) - xa - special.gammaln(r))
        elif fam is Family.WEIBULL:
            k = p["k"]
            out = k * np.exp(special.xlogy(k - 1.0, xa) - xa ** k)
        elif fam is Family.STABLE:
            b = p["beta"]
            out = np.zeros_like(xa)
            pos = xa > 0
            xp = xa[pos]
            out[pos] = b * xp ** (-b - 1.0) * np.asarray(m_wright(xp ** -b, b))
        elif fam is Family.MWRIGHT:
            out = np.asarray(m_wright(xa, p["beta"]))
        elif fam is Family.FOXH:
            out = np.asarray(foxh_residual_density(xa, p["r"], p["alpha"]))
        elif fam is Family.GAUSSIAN_RESIDUAL:
            out = np.asarray(gaussian_residual_density(xa, p["alpha"]))
        elif fam is Family.HALFNORMAL:
            out = math.sqrt(2.0 / math.pi) * np.exp(-0.5 * xa * xa)
        else:  # pragma: no cover - Family is closed
            raise DomainError(f"unsupported family {fam}")
    out = np.asarray(out, dtype=float)
    if np.ndim(x) == 0:
        return float(out)
    return out


def power_pdf(spec: DistributionSpec, a: float):
    """Density of ``X**a`` for ``X ~ spec`` as a callable.

    ``f_{X^a}(y) = f_X(y**(1/a)) |1/a| y**(1/a - 1)``.
    """
    a = float(a)
    if a == 0.0 or not math.isfinite(a):
        raise DomainError("exponent must be finite and nonzero")
    inv = 1.0 / a

    def density(y):
        ya = np.asarray(y, dtype=float)
        if np.any(~(ya > 0)):
            raise DomainError("power density is evaluated at positive arguments")
        with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
            xs = ya ** inv
            # beyond the double range the density has vanished; at the low
            # end evaluate at the smallest positive double instead of 0
            ok = np.isfinite(xs)
            xs = np.where(ok, np.maximum(xs, np.finfo(float).smallest_subnormal), 1.0)
            out = np.asarray(pdf(spec, xs)) * abs(inv) * np.exp((inv - 1.0) * np.log(ya))
            out = np.where(ok & np.isfinite(out), out, 0.0)
        return float(out) if np.ndim(y) == 0 else out

    return density


# ---------------------------------------------------------------------------
# random streams


def _check_seed(seed) -> int:
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise DomainError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError("seed must lie in [0, 2**64)")
    return seed


def _block_generator(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream, block))
    return np.random.Generator(np.random.Philox(ss))


def _open_uniform(g: np.random.Generator, m: int) -> np.ndarray:
    """Uniforms strictly inside (0, 1) on a 2**-53 lattice."""
    return (g.integers(0, 1 << 53, size=m, dtype=np.int64) + 0.5) * 2.0 ** -53


def _log_kanter(beta: float, u: np.ndarray) -> np.ndarray:
    """``log A(u)`` for Kanter's stable representation, ``u`` in (0, pi)."""
    return (beta * np.log(np.sin(beta * u)) + (1.0 - beta) * np.log(np.sin((1.0 - beta) * u))
            - np.log(np.sin(u))) / (1.0 - beta)


def _draw_block(spec: DistributionSpec, g: np.random.Generator, m: int, table, method):
    fam = spec.family
    p = spec.params
    if fam is Family.EXPONENTIAL:
        return -np.log(_open_uniform(g, m))
    if fam is Family.WEIBULL:
        return (-np.log(_open_uniform(g, m))) ** (1.0 / p["k"])
    if fam is Family.GAMMA:
        return g.standard_gamma(p["r"], size=m)
    if fam in (Family.STABLE, Family.MWRIGHT):
        b = p["beta"]
        u = math.pi * _open_uniform(g, m)
        log_e = np.log(-np.log(_open_uniform(g, m)))
        log_s = (1.0 - b) / b * (_log_kanter(b, u) - log_e)
        if fam is Family.STABLE:
            return np.exp(log_s)
        return np.exp(-b * log_s)
    if fam is Family.HALFNORMAL:
        if method in (None, "fold"):
            return np.abs(g.standard_normal(size=m))
        if method == "gamma":
            return np.sqrt(2.0 * g.standard_gamma(0.5, size=m))
        raise DomainError(f"unknown half-normal method {method!r}")
    if fam in (Family.FOXH, Family.GAUSSIAN_RESIDUAL):
        return table.quantile(_open_uniform(g, m))
    raise DomainError(f"unsupported family {fam}")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Reproducible draws from a distribution.

    Attributes
    ----------
    spec : DistributionSpec
    seed : int
    n : int
    values : ndarray
        Read-only array of ``n`` positive draws.
    """

    spec: Optional[DistributionSpec]
    seed: Optional[int]
    n: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size != self.n:
            raise DomainError("values must be a 1-d array of length n")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.n

    def power(self, a: float) -> "SampleBatch":
        return SampleBatch(None, self.seed, self.n, self.values ** float(a))

    def __mul__(self, other: "SampleBatch") -> "SampleBatch":
        if not isinstance(other, SampleBatch):
            return NotImplemented
        if other.n != self.n:
            raise DomainError("elementwise product needs equal batch sizes")
        return SampleBatch(None, None, self.n, self.values * other.values)

    def to_csv(self, path=None) -> str:
        """Write one value per line under the header ``value``."""
        text = "value\n" + "".join(format_float(v) + "\n" for v in self.values)
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source, spec=None, seed=None) -> "SampleBatch":
        """Read a batch written by :meth:`to_csv` (path or text)."""
        text = source
        if not (isinstance(source, str) and "\n" in source):
            text = Path(source).read_text()
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["value"]:
            raise DomainError("sample CSV must start with the header 'value'")
        vals = np.array([float(r[0]) for r in rows[1:] if r], dtype=float)
        return cls(spec, seed, vals.size, vals)


def sample(spec: DistributionSpec, n: int, seed: int, *, table=None,
           method: Optional[str] = None, workers: Optional[int] = None,
           stream: int = 0) -> SampleBatch:
    """Draw ``n`` values from ``spec``.

    Parameters
    ----------
    spec : DistributionSpec
    n : int
        Number of draws, at least 1.
    seed : int
        64-bit seed. Equal ``(spec, n, seed, stream)`` give identical output.
    table : InverseCdfTable, optional
        Quantile table for the tabulated families; by default the registered
        table (or one cached under ``$SELFDECOMP_TABLE_DIR``) is used.
    method : {"fold", "gamma"}, optional
        Half-normal construction.
    workers : int, optional
        Threads for block generation; does not change the output.
    stream : int
        Independent sub-stream index, so one seed can feed several
        independent batches.

    Raises
    ------
    TableUnavailableError
        A tabulated family has no table yet.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    seed = _check_seed(seed)
    if spec.family in (Family.FOXH, Family.GAUSSIAN_RESIDUAL) and table is None:
        table = get_table(spec)
    if table is not None and table.spec != spec:
        raise DomainError(f"table for {table.spec!r} cannot sample {spec!r}")

    starts = list(range(0, n, BLOCK_SIZE))

    def run(k):
        m = min(BLOCK_SIZE, n - starts[k])
        return _draw_block(spec, _block_generator(seed, k, stream), m, table, method)

    if workers and workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(starts))))
    else:
        parts = [run(k) for k in range(len(starts))]
    values = np.concatenate(parts)
    return SampleBatch(spec, seed, n, values)


# ---------------------------------------------------------------------------
# numerical CDF


def _head_integral(spec, x, cfg):
    """``int_0^x pdf`` with the substitution ``t = x v**(1/c)``."""
    c = spec.head_exponent
    if c is None:
        return _quad(lambda t: pdf(spec, t), 0.0, x, cfg)[0]

    def g(v):
        if v <= 0.0:
            return 0.0
        return pdf(spec, x * v ** (1.0 / c)) * v ** (1.0 / c - 1.0)

    return x / c * _quad(g, 0.0, 1.0, cfg)[0]


def cdf_numeric(spec: DistributionSpec, x, cfg: Optional[QuadratureConfig] = None):
    """``F(x) = int_0^x pdf`` by adaptive quadrature.

    The head ``(0, min(x, c)]`` uses the endpoint substitution of the Mellin
    quadrature (``c`` is the split point), the rest is integrated in
    ``log t``. Monotone in ``x`` up to the quadrature tolerance.
    """
    cfg = cfg or _DEFAULT_QUAD
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or not np.all(np.isfinite(xa) | (xa == np.inf)):
        raise DomainError("cdf argument must be nonnegative")
    c = float(cfg.split_point)
    head_c = None
    out = np.empty(xa.size)
    for i, xv in enumerate(xa.ravel()):
        if xv == 0.0:
            out[i] = 0.0
            continue
        if xv <= c:
            out[i] = _head_integral(spec, xv, cfg)
            continue
        if head_c is None:
            head_c = _head_integral(spec, c, cfg)
        hi = math.log(xv)

        def body(u):
            if u > 709.0:  # beyond the double range the density has vanished
                return 0.0
            t = math.exp(u)
            return pdf(spec, t) * t

        if math.isinf(hi):
            rest = _quad(body, math.log(c), np.inf, cfg)[0]
        else:
            rest = _quad(body, math.log(c), hi, cfg)[0]
        out[i] = head_c + rest
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if xa.ndim == 0 else out.reshape(xa.shape)


# ---------------------------------------------------------------------------
# inverse-CDF tables


@dataclass(frozen=True, eq=False)
class InverseCdfTable:
    """Tabulated quantile function.

    Inside the grid the quantile is a monotone cubic (PCHIP) in
    ``(logit p, log q)``. Below the first point the head law
    ``q ~ p**(1/c)`` is used, ``c`` being the head exponent of the density;
    above the last point ``log q`` is extended linearly in ``log(1 - p)``.

    Attributes
    ----------
    spec : DistributionSpec
    probabilities, quantiles : ndarray
        Strictly increasing grids.
    head_exponent : float
    tail_slope : float
        ``d log q / d log(1 - p)`` used beyond the last point.
    """

    spec: DistributionSpec
    probabilities: np.ndarray = field(repr=False)
    quantiles: np.ndarray = field(repr=False)
    head_exponent: float
    tail_slope: float

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float).copy()
        q = np.asarray(self.quantiles, dtype=float).copy()
        if p.shape != q.shape or p.ndim != 1 or p.size < 4:
            raise DomainError("table needs matching 1-d grids of at least 4 points")
        if not (np.all(np.diff(p) > 0) and np.all(np.diff(q) > 0)):
            raise DomainError("table grids must be strictly increasing")
        if not (p[0] > 0 and p[-1] < 1 and q[0] > 0):
            raise DomainError("table probabilities must lie in (0, 1), quantiles > 0")
        for a in (p, q):
            a.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "quantiles", q)
        object.__setattr__(self, "_interp", PchipInterpolator(special.logit(p), np.log(q)))

    @property
    def grid_size(self) -> int:
        return self.probabilities.size

    def quantile(self, p):
        """Quantile function; ``p`` in (0, 1)."""
        pa = np.asarray(p, dtype=float)
        if np.any(~((pa > 0) & (pa < 1))):
            raise DomainError("probabilities must lie strictly inside (0, 1)")
        flat = pa.ravel()
        out = np.empty(flat.size)
        p0, p1 = self.probabilities[0], self.probabilities[-1]
        lo = flat < p0
        hi = flat > p1
        mid = ~(lo | hi)
        out[mid] = np.exp(self._interp(special.logit(flat[mid])))
        out[lo] = self.quantiles[0] * (flat[lo] / p0) ** (1.0 / self.head_exponent)
        out[hi] = self.quantiles[-1] * np.exp(
            self.tail_slope * (np.log1p(-flat[hi]) - math.log1p(-p1)))
        return float(out[0]) if pa.ndim == 0 else out.reshape(pa.shape)

    # serialisation: commented header, then "p,q" rows

    def to_csv(self, path=None) -> str:
        lines = [
            f"# selfdecomp inverse-cdf table v{TABLE_FORMAT_VERSION}",
            f"# family={self.spec.family.value}",
        ]
        lines += [f"# param {k}={format_float(v)}" for k, v in self.spec.params.items()]
        lines += [
            f"# head_exponent={format_float(self.head_exponent)}",
            f"# tail_slope={format_float(self.tail_slope)}",
            "p,q",
        ]
        lines += [f"{format_float(a)},{format_float(b)}"
                  for a, b in zip(self.probabilities, self.quantiles)]
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "InverseCdfTable":
        text = source if "\n" in str(source) else Path(source).read_text()
        meta = {}
        params = {}
        rows = []
        version = None
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("selfdecomp inverse-cdf table v"):
                    version = int(body.rsplit("v", 1)[1])
                elif body.startswith("param "):
                    k, v = body[6:].split("=", 1)
                    params[k.strip()] = float(v)
                elif "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            if line == "p,q":
                continue
            a, b = line.split(",")
            rows.append((float(a), float(b)))
        if version != TABLE_FORMAT_VERSION:
            raise DomainError(f"unsupported table format version {version!r}")
        spec = DistributionSpec(Family(meta["family"]), params)
        arr = np.array(rows)
        return cls(spec, arr[:, 0], arr[:, 1], float(meta["head_exponent"]),
                   float(meta["tail_slope"]))


def _cell_masses(spec, u_edges, order=8):
    """Probability of each cell ``[e^u_j, e^u_{j+1}]`` by Gauss-Legendre in u."""
    x, w = leggauss(order)
    a, b = u_edges[:-1, None], u_edges[1:, None]
    u = a + (b - a) * (x + 1) / 2
    t = np.exp(u)
    vals = np.asarray(pdf(spec, t.ravel())).reshape(t.shape) * t
    return ((b - a) / 2 * w * vals).sum(axis=1)


def _hermite_inverse(y_nodes, x_nodes, dxdy, y):
    """Cubic Hermite interpolation of x(y) from values and slopes."""
    j = np.clip(np.searchsorted(y_nodes, y) - 1, 0, y_nodes.size - 2)
    y0, y1 = y_nodes[j], y_nodes[j + 1]
    h = y1 - y0
    s = (y - y0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return (h00 * x_nodes[j] + h10 * h * dxdy[j] + h01 * x_nodes[j + 1]
            + h11 * h * dxdy[j + 1])


_TABLE_P_MIN = 1e-10


def _tail_mass(mass_scale, u0, cfg):
    """``int_{u0}^inf mass_scale(e^u) du`` over the scanned extent of the tail.

    A half-line rule sees only a thin sliver of nonzero integrand when the
    tail is very light and then reports roundoff; scanning first keeps the
    interval finite.
    """
    offs = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, 400)))
    vals = np.array([mass_scale(math.exp(u0 + o)) if u0 + o < 709.0 else 0.0 for o in offs])
    peak = vals.max()
    if peak == 0.0:
        return 0.0
    live = np.nonzero(vals > 1e-20 * peak)[0]
    if live[-1] == offs.size - 1:
        raise QuadratureError("density tail too heavy to tabulate")
    end = u0 + offs[live[-1] + 1]
    return _quad(lambda u: mass_scale(math.exp(u)), u0, end, cfg)[0]


def build_inverse_cdf_table(spec: DistributionSpec, grid_size: int = 4096,
                            cfg: Optional[QuadratureConfig] = None,
                            register: bool = True) -> InverseCdfTable:
    """Tabulate the quantile function of ``spec`` on a logit-spaced grid.

    Needed for the Fox H and Gaussian residuals, which have no direct
    sampler; every family except the stable law (whose power tail has no
    finite cutoff) is accepted so the tables can be cross-checked.

    The CDF is accumulated from Gauss-Legendre cell masses on a fine
    log-spaced ``x`` grid: from the left for ``p <= 1/2`` and from the right
    (survival function) above, so both tails keep relative accuracy. The
    inverse at each grid probability comes from cubic Hermite interpolation
    of ``log x`` against ``log F`` (or ``log S``) using the exact slopes
    ``F / (x pdf)``.

    Parameters
    ----------
    spec : DistributionSpec
    grid_size : int
        Number of table points (default 4096).
    cfg : QuadratureConfig, optional
        Tolerances for the head and tail pieces.
    register : bool
        Store the table for :func:`sample` (and write it to
        ``$SELFDECOMP_TABLE_DIR`` when set).
    """
    cfg = cfg or _DEFAULT_QUAD
    if spec.family is Family.STABLE:
        raise DomainError("the stable law cannot be tabulated (power tail)")
    grid_size = int(grid_size)
    if grid_size < 16:
        raise DomainError("grid_size must be at least 16")
    c = spec.head_exponent

    def mass_scale(x):
        return float(pdf(spec, x)) * x

    # lower cutoff: head mass below 1e-3 of the smallest tabulated p
    x_lo = 1.0
    while mass_scale(x_lo) / c > 1e-3 * _TABLE_P_MIN and x_lo > 1e-300:
        x_lo *= 0.5
    # upper cutoff: density mass scale negligible against the tail grid
    x_hi = 1.0
    while mass_scale(x_hi) > 1e-3 * _TABLE_P_MIN or x_hi < 2.0:
        x_hi *= 1.25
        if x_hi > 1e300:
            raise QuadratureError("density tail too heavy to tabulate")
    n_cells = max(8 * grid_size, 4096)
    u_edges = np.linspace(math.log(x_lo), math.log(x_hi), n_cells + 1)
    masses = _cell_masses(spec, u_edges)
    head = _head_integral(spec, x_lo, cfg)
    tail = _tail_mass(mass_scale, u_edges[-1], cfg)
    total = head + masses.sum() + tail
    if abs(total - 1.0) > 1e-8:
        raise QuadratureError(f"tabulated density integrates to {total!r}, not 1")

    cdf = head + np.concatenate(([0.0], np.cumsum(masses)))
    sf = tail + np.concatenate((np.cumsum(masses[::-1])[::-1], [0.0]))
    x_edges = np.exp(u_edges)
    fx = np.asarray(pdf(spec, x_edges)) * x_edges  # dF / dlog x

    logit_p = np.linspace(special.logit(_TABLE_P_MIN), special.logit(1 - _TABLE_P_MIN),
                          grid_size)
    probs = special.expit(logit_p)
    q = np.empty(grid_size)

    lower = probs <= 0.5
    # slopes dlog x / dlog F; edges with a subnormal density give no usable slope
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        slope_f, slope_s = cdf / fx, sf / fx
    okf = (cdf > 0) & np.isfinite(slope_f) & (fx > 0)
    yf = np.log(cdf[okf])
    q[lower] = _hermite_inverse(yf, u_edges[okf], slope_f[okf], np.log(probs[lower]))
    oks = (sf > 0) & np.isfinite(slope_s) & (fx > 0)
    ys = np.log(sf[oks])[::-1]  # increasing as x decreases
    q[~lower] = _hermite_inverse(ys, u_edges[oks][::-1], -slope_s[oks][::-1],
                                 np.log1p(-probs[~lower]))
    q = np.exp(q)
    if not np.all(np.diff(q) > 0):
        raise QuadratureError("tabulated quantiles are not strictly increasing")
    tail_slope = (math.log(q[-1]) - math.log(q[-2])) / (
        math.log1p(-probs[-1]) - math.log1p(-probs[-2]))
    table = InverseCdfTable(spec, probs, q, float(c), tail_slope)
    if register:
        register_table(table)
        cache_dir = os.environ.get(_TABLE_ENV)
        if cache_dir:
            Path(cache_dir).mkdir(parents=True, exist_ok=True)
            table.to_csv(_table_path(Path(cache_dir), spec))
    return table


# registry of built tables; construction happens outside the lock

_TABLES: dict = {}
_TABLES_LOCK = threading.Lock()


def _table_path(directory: Path, spec: DistributionSpec) -> Path:
    parts = [spec.family.value] + [f"{k}={format_float(v)}" for k, v in spec.params.items()]
    return directory / ("_".join(parts) + ".csv")


def register_table(table: InverseCdfTable) -> None:
    with _TABLES_LOCK:
        _TABLES[table.spec] = table


def clear_tables() -> None:
    with _TABLES_LOCK:
        _TABLES.clear()


def get_table(spec: DistributionSpec) -> InverseCdfTable:
    """Registered table for ``spec``, falling back to ``$SELFDECOMP_TABLE_DIR``.

    Raises
    ------
    TableUnavailableError
    """
    with _TABLES_LOCK:
        table = _TABLES.get(spec)
    if table is not None:
        return table
    cache_dir = os.environ.get(_TABLE_ENV)
    if cache_dir:
        path = _table_path(Path(cache_dir), spec)
        if path.exists():
            table = InverseCdfTable.from_csv(path)
            register_table(table)
            return table
    raise TableUnavailableError(
        f"no inverse-CDF table for {spec!r}; build one with build_inverse_cdf_table"
    )


def ensure_table(spec: DistributionSpec, grid_size: int = 4096,
                 cfg: Optional[QuadratureConfig] = None) -> InverseCdfTable:
    """Return the registered table for ``spec``, building it if needed."""
    try:
        return get_table(spec)
    except TableUnavailableError:
        return build_inverse_cdf_table(spec, grid_size, cfg)
