"""Mellin transforms: closed-form registry, quadrature, and Mellin convolution.

For a density ``f`` on the positive half-line the Mellin transform is

.. math:: (\\mathcal{M}f)(z) = \\int_0^\\infty f(x) x^{z-1}\\,dx,

defined on a vertical strip ``a < Re z < b``. If ``X`` has density ``f``
then ``(Mf)(z) = E[X^(z-1)]``, so the transform of the law of ``X**p`` is
``(Mf)(p (z - 1) + 1)``. The Mellin convolution

.. math:: (f \\star g)(x) = \\int_0^\\infty f(x/y)\\,g(y)\\,dy/y

is the density of a product of independent variables, and
``M(f * g) = (Mf)(Mg)``.

The closed forms in :func:`analytic_mellin` are ratios of gamma functions
evaluated through :func:`~selfdecomp.specfun.log_gamma_complex`. The
one-sided stable transform ``Gamma(1 + (1 - z)/beta) / Gamma(2 - z)`` is not
part of the decomposition theory itself; it follows from the Laplace
transform ``exp(-s**beta)`` and is included to validate the stable
representation of the M-Wright law.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import DomainError, QuadratureError, StripError
from .families import DistributionSpec, Family
from .specfun import log_gamma_complex

__all__ = [
    "AnalyticStrip",
    "MellinValue",
    "QuadratureConfig",
    "numeric_mellin",
    "mellin_convolve",
    "analytic_mellin",
    "mellin_of_power",
    "parse_complex",
]


@dataclass(frozen=True)
class AnalyticStrip:
    """Open vertical strip ``lower < Re z < upper``; bounds may be infinite."""

    lower: float
    upper: float

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise DomainError(f"empty strip ({lo}, {hi})")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def contains(self, z) -> bool:
        x = complex(z).real
        return self.lower < x < self.upper

    def require(self, z):
        if not self.contains(z):
            raise StripError(
                f"Re(z) = {complex(z).real:g} lies outside the strip "
                f"({self.lower:g}, {self.upper:g})"
            )

    def power(self, a: float) -> "AnalyticStrip":
        """Strip of ``z -> (Mf)(a (z - 1) + 1)``, the transform of ``X**a``."""
        a = float(a)
        if a == 0.0 or not math.isfinite(a):
            raise DomainError("power exponent must be finite and nonzero")
        ends = [1.0 + (self.lower - 1.0) / a, 1.0 + (self.upper - 1.0) / a]
        return AnalyticStrip(min(ends), max(ends))

    def to_dict(self):
        return {"lower": _json_float(self.lower), "upper": _json_float(self.upper)}

    def __str__(self):
        return f"({self.lower:g}, {self.upper:g})"


def _json_float(v):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


@dataclass(frozen=True)
class MellinValue:
    """A Mellin transform value with its provenance.

    Attributes
    ----------
    z : complex
    value : complex
    strip : AnalyticStrip
    method : {"closed-form", "quadrature"}
    error : float or None
        Estimated absolute error (quadrature only).
    """

    z: complex
    value: complex
    strip: AnalyticStrip
    method: str
    error: Optional[float] = None

    def __post_init__(self):
        if self.method not in ("closed-form", "quadrature"):
            raise DomainError(f"unknown method {self.method!r}")
        self.strip.require(self.z)

    @property
    def real(self) -> float:
        return self.value.real

    def to_dict(self):
        return {
            "z": [self.z.real, self.z.imag],
            "value": [self.value.real, self.value.imag],
            "strip": self.strip.to_dict(),
            "method": self.method,
            "error": self.error,
        }


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the adaptive quadratures.

    ``max_refinements`` bounds the tanh-sinh level on infinite pieces; the
    Gauss-Kronrod pieces may bisect up to ``50 * max_refinements`` times.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_refinements: int = 20
    split_point: float = 1.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if int(self.max_refinements) < 1:
            raise DomainError("max_refinements must be at least 1")
        if not self.split_point > 0:
            raise DomainError("split_point must be positive")


_DEFAULT_QUAD = QuadratureConfig()


def parse_complex(text) -> complex:
    """Parse ``"re+imi"`` style complex literals (``"2"``, ``"2+1i"``, ``"-1.5i"``)."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise DomainError(f"cannot parse complex number {text!r}") from None


# ---------------------------------------------------------------------------
# quadrature helpers


def _quad(func, a, b, cfg, **kw):
    """``scipy.integrate.quad`` with a QuadratureError on failure.

    Quad is asked for 100x the configured accuracy. A warning from it is fatal
    only when the error estimate also misses the configured tolerance, so
    roundoff noise in the integrand near the target accuracy is tolerated.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        val, err = integrate.quad(
            func, a, b, epsabs=cfg.abs_tol * 1e-2, epsrel=cfg.rel_tol * 1e-2,
            limit=50 * int(cfg.max_refinements), **kw,
        )
    if not math.isfinite(val):
        raise QuadratureError(f"non-finite quadrature result on [{a}, {b}]")
    issues = [w for w in caught if issubclass(w.category, integrate.IntegrationWarning)]
    if issues and not err <= max(cfg.abs_tol, cfg.rel_tol * abs(val)):
        raise QuadratureError(f"quadrature on [{a}, {b}] failed: {issues[0].message}")
    return val, err


def _as_vectorised(f):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        try:
            out = np.asarray(f(x), dtype=float)
            if out.shape != x.shape:
                out = np.broadcast_to(out, x.shape).copy()
        except (TypeError, ValueError):
            out = np.array([f(float(v)) for v in x.ravel()], dtype=float).reshape(x.shape)
        return out

    return wrapped


# Offsets (in u = log x) at which the tail envelope is scanned.
_SCAN = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, 400)))
_TAIL_CUTOFF = 1e-20


def _weighted(fv, sigma, u):
    """``f(e^u) e^{sigma u}``, zero where ``e^u`` leaves the double range."""
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        x = np.exp(u)
        ok = np.isfinite(x)
        out = np.where(ok, fv(np.where(ok, x, 1.0)), 0.0) * np.exp(sigma * u)
    return np.where(np.isfinite(out), out, 0.0)


def _tail_tanhsinh(f, lo, z, cfg):
    """``int_lo^inf f(e^u) e^{u z} du`` by tanh-sinh, real and imaginary parts.

    The envelope ``|f(e^u)| e^{u Re z}`` is scanned to locate its peak and
    the point beyond which it stays below 1e-20 of the peak; tanh-sinh is
    then applied on the finite pieces. (Mapping the half-line directly can
    stop at a low level with a wrong value and a small error estimate.)
    """
    fv = _as_vectorised(f)
    sigma, tau = z.real, z.imag
    us = lo + _SCAN
    env = np.abs(_weighted(fv, sigma, us))
    k = int(np.argmax(env))
    if env[k] == 0.0:
        return 0j, 0.0
    beyond = np.nonzero(env[k + 1:] < _TAIL_CUTOFF * env[k])[0]
    hi = us[k + 1 + beyond[0]] if beyond.size else us[-1]
    edges = sorted({lo, float(us[k]), float(hi)})

    def part(trig):
        def integrand(u):
            return _weighted(fv, sigma, u) * trig(tau * u)

        total, err = 0.0, 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                res = integrate.tanhsinh(
                    integrand, a, b, atol=cfg.abs_tol * 1e-2, rtol=cfg.rel_tol * 1e-2,
                    maxlevel=int(cfg.max_refinements),
                )
            if not bool(res.success):
                raise QuadratureError(
                    f"tanh-sinh on [{a:g}, {b:g}] did not converge (status {int(res.status)})"
                )
            total += float(res.integral)
            err += float(res.error)
        return total, err

    re, e1 = part(np.cos)
    if tau == 0.0:
        return complex(re, 0.0), e1
    im, e2 = part(np.sin)
    return complex(re, im), math.hypot(e1, e2)


def numeric_mellin(
    f: Callable,
    z,
    strip: AnalyticStrip,
    cfg: Optional[QuadratureConfig] = None,
    head_exponent: Optional[float] = 1.0,
) -> MellinValue:
    """Mellin transform of ``f`` at ``z`` by quadrature.

    The range is split at ``cfg.split_point = c``. On ``(0, c]`` the
    substitution ``x = c v**(1/kappa)`` with ``kappa = h + Re z - 1`` absorbs
    the endpoint behaviour ``f(x) ~ x**(h-1)`` (``h = head_exponent``) and the
    remaining integral is done by adaptive Gauss-Kronrod. On ``[c, inf)`` the
    substitution ``x = e**u`` is followed by tanh-sinh quadrature.

    Parameters
    ----------
    f : callable
        Density on the positive reals; vectorised callables are faster.
    z : complex
    strip : AnalyticStrip
        Strip on which the transform exists; ``z`` must lie inside.
    cfg : QuadratureConfig, optional
    head_exponent : float or None
        Exponent ``h`` of the small-``x`` behaviour. ``None`` means ``f``
        vanishes faster than any power at 0, and no substitution is applied.

    Returns
    -------
    MellinValue
    """
    cfg = cfg or _DEFAULT_QUAD
    z = complex(z)
    strip.require(z)
    c = float(cfg.split_point)
    sigma, tau = z.real, z.imag

    if head_exponent is None:
        def head_part(trig):
            return _quad(lambda x: f(x) * x ** (sigma - 1) * trig(tau * math.log(x)), 0.0, c, cfg)
    else:
        kappa = float(head_exponent) + sigma - 1.0
        if not kappa > 0:
            raise StripError(f"Re(z) = {sigma:g} is not integrable against x**({head_exponent}-1)")
        scale = c ** sigma / kappa

        def head_part(trig):
            def g(v):
                if v <= 0.0:
                    return 0.0
                x = c * v ** (1.0 / kappa)
                # x**(sigma - 1) dx = (c**sigma / kappa) v**(sigma/kappa - 1) dv
                return f(x) * v ** (sigma / kappa - 1.0) * trig(tau * math.log(x))
            val, err = _quad(g, 0.0, 1.0, cfg)
            return val * scale, err * scale

    hr, her = head_part(math.cos)
    hi, hei = (0.0, 0.0) if tau == 0.0 else head_part(math.sin)
    tail, terr = _tail_tanhsinh(f, math.log(c), z, cfg)
    value = complex(hr, hi) + tail
    error = math.hypot(math.hypot(her, hei), terr)
    if error > max(cfg.abs_tol, cfg.rel_tol * abs(value)):
        raise QuadratureError(
            f"Mellin quadrature error estimate {error:.3g} exceeds tolerance"
        )
    return MellinValue(z, value, strip, "quadrature", error)


def mellin_convolve(f: Callable, g: Callable, x, cfg: Optional[QuadratureConfig] = None):
    """Mellin convolution ``(f * g)(x) = int f(x/y) g(y) dy/y``.

    Evaluated in the variable ``u = log y`` as
    ``int f(x e^-u) g(e^u) du``; the real line is split so that the finite
    middle piece contains both bulk regions (around ``u = 0`` and
    ``u = log x``) and the two half-lines are done separately.

    Parameters
    ----------
    f, g : callable
        Densities on the positive reals.
    x : float or array_like
        Positive evaluation points.
    cfg : QuadratureConfig, optional

    Returns
    -------
    float or ndarray
        The product density at ``x``.
    """
    cfg = cfg or _DEFAULT_QUAD
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)) or not np.all(np.isfinite(xa)):
        raise DomainError("Mellin convolution is evaluated at positive finite x")
    out = np.empty(xa.size)
    for i, xv in enumerate(xa.ravel()):
        lx = math.log(xv)

        def integrand(u, xv=xv):
            if u > 709.0:
                return 0.0
            y = math.exp(u)
            w = xv / y
            if y == 0.0 or math.isinf(y) or w == 0.0 or math.isinf(w):
                return 0.0
            return float(f(w)) * float(g(y))

        a = min(0.0, lx) - 3.0
        b = max(0.0, lx) + 3.0
        pts = sorted({0.0, lx})
        pts = [p for p in pts if a < p < b]
        mid, _ = _quad(integrand, a, b, cfg, points=pts or None)
        left, _ = _quad(integrand, -np.inf, a, cfg)
        right, _ = _quad(integrand, b, np.inf, cfg)
        out[i] = left + mid + right
    if xa.ndim == 0:
        return float(out[0])
    return out.reshape(xa.shape)


# ---------------------------------------------------------------------------
# closed-form registry


def _lg(z):
    return log_gamma_complex(complex(z))


_LN2 = math.log(2.0)
_LN_SQRT_PI = 0.5 * math.log(math.pi)


def _log_mellin_exponential(p, z):
    return _lg(z)


def _log_mellin_gamma(p, z):
    r = p["r"]
    return _lg(r - 1.0 + z) - _lg(r)


def _log_mellin_weibull(p, z):
    return _lg((z - 1.0) / p["k"] + 1.0)


def _log_mellin_stable(p, z):
    b = p["beta"]
    return _lg(1.0 + (1.0 - z) / b) - _lg(2.0 - z)


def _log_mellin_mwright(p, z):
    b = p["beta"]
    return _lg(z) - _lg(b * (z - 1.0) + 1.0)


def _log_mellin_foxh(p, z):
    r, a = p["r"], p["alpha"]
    return _lg(r - 1.0 + z) - _lg(r - a + a * z)


def _log_mellin_halfnormal(p, z):
    # E|U|^(z-1) = 2^((z-1)/2) Gamma(z/2) / sqrt(pi)
    return 0.5 * (z - 1.0) * _LN2 + _lg(0.5 * z) - _LN_SQRT_PI


def _log_mellin_gaussian_residual(p, z):
    a = p["alpha"]
    return 0.5 * (z - 1.0) * (1.0 - a) * _LN2 + _lg(0.5 * z) - _lg(0.5 + 0.5 * a * (z - 1.0))


_REGISTRY = {
    Family.EXPONENTIAL: _log_mellin_exponential,
    Family.GAMMA: _log_mellin_gamma,
    Family.WEIBULL: _log_mellin_weibull,
    Family.STABLE: _log_mellin_stable,
    Family.MWRIGHT: _log_mellin_mwright,
    Family.FOXH: _log_mellin_foxh,
    Family.HALFNORMAL: _log_mellin_halfnormal,
    Family.GAUSSIAN_RESIDUAL: _log_mellin_gaussian_residual,
}


def analytic_mellin(spec: DistributionSpec, z) -> MellinValue:
    """Closed-form Mellin transform of the density of ``spec`` at ``z``.

    ======================  =============================================  ==================
    family                  transform                                      strip
    ======================  =============================================  ==================
    exponential             Gamma(z)                                       Re z > 0
    gamma(r)                Gamma(r-1+z) / Gamma(r)                        Re z > 1-r
    weibull(k)              Gamma((z-1)/k + 1)                             Re z > 1-k
    stable(beta)            Gamma(1+(1-z)/beta) / Gamma(2-z)               Re z < 1+beta
    mwright(beta)           Gamma(z) / Gamma(beta(z-1)+1)                  Re z > 0
    foxh(r, alpha)          Gamma(r-1+z) / Gamma(r-alpha+alpha z)          Re z > 1-r
    halfnormal              2^((z-1)/2) Gamma(z/2) / sqrt(pi)              Re z > 0
    gaussian_residual(a)    2^((z-1)(1-a)/2) Gamma(z/2)/Gamma((1+a(z-1))/2)  Re z > 0
    ======================  =============================================  ==================
    """
    try:
        fn = _REGISTRY[spec.family]
    except KeyError:
        raise DomainError(f"no closed-form Mellin transform for {spec!r}") from None
    z = complex(z)
    strip = spec.strip
    strip.require(z)
    value = cmath.exp(fn(spec.params, z))
    if z.imag == 0.0:
        value = complex(value.real, 0.0)
    return MellinValue(z, value, strip, "closed-form")


def mellin_of_power(spec: DistributionSpec, exponent: float, z) -> MellinValue:
    """Mellin transform of the law of ``X**exponent`` where ``X ~ spec``.

    Equal to ``analytic_mellin(spec, exponent * (z - 1) + 1)``; the strip is
    mapped accordingly (and reversed for negative exponents).
    """
    a = float(exponent)
    z = complex(z)
    strip = spec.strip.power(a)
    strip.require(z)
    inner = analytic_mellin(spec, a * (z - 1.0) + 1.0)
    return MellinValue(z, inner.value, strip, "closed-form")
