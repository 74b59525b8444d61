import cmath
import math

import numpy as np
import pytest
from scipy import special

from selfdecomp.distributions import pdf
from selfdecomp.errors import DomainError, QuadratureError, StripError
from selfdecomp.families import DistributionSpec as D
from selfdecomp.mellin import (
    AnalyticStrip,
    MellinValue,
    QuadratureConfig,
    analytic_mellin,
    mellin_convolve,
    mellin_of_power,
    numeric_mellin,
    parse_complex,
)

ALL_SPECS = [
    D.exponential(), D.gamma(0.5), D.gamma(2.5), D.weibull(2.0), D.weibull(0.7),
    D.stable(0.5), D.stable(0.3), D.mwright(0.3), D.mwright(0.8),
    D.foxh(0.5, 0.3), D.foxh(2.5, 0.7), D.halfnormal(), D.gaussian_residual(0.3),
    D.gaussian_residual(0.7),
]


def density(spec):
    return lambda x: pdf(spec, x)


# --- strips and value types ------------------------------------------------

def test_strip_invariants():
    with pytest.raises(DomainError):
        AnalyticStrip(1.0, 1.0)
    s = AnalyticStrip(0.0, math.inf)
    assert s.contains(0.5 + 3j) and not s.contains(-0.1)
    with pytest.raises(StripError):
        s.require(0.0)
    assert s.power(0.5) == AnalyticStrip(-1.0, math.inf)
    assert s.power(-1.0) == AnalyticStrip(-math.inf, 2.0)


def test_mellin_value_checks_strip():
    with pytest.raises(StripError):
        MellinValue(2.0, 1.0, AnalyticStrip(0, 1), "closed-form")
    with pytest.raises(DomainError):
        MellinValue(0.5, 1.0, AnalyticStrip(0, 1), "guess")


def test_parse_complex():
    assert parse_complex("2") == 2
    assert parse_complex("2+1i") == 2 + 1j
    assert parse_complex("-0.5-3i") == -0.5 - 3j
    with pytest.raises(DomainError):
        parse_complex("two")


def test_quadrature_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(abs_tol=0)
    with pytest.raises(DomainError):
        QuadratureConfig(max_refinements=0)


# --- closed-form registry --------------------------------------------------

def test_registry_examples():
    assert analytic_mellin(D.foxh(2, 0.5), 1).value == pytest.approx(1.0, abs=1e-15)
    assert analytic_mellin(D.exponential(), 3).value == pytest.approx(2.0, rel=1e-15)
    assert analytic_mellin(D.halfnormal(), 1).value == pytest.approx(1.0, rel=1e-15)
    assert analytic_mellin(D.mwright(0.5), 2).value == pytest.approx(2 / math.sqrt(math.pi),
                                                                    rel=1e-14)
    v = analytic_mellin(D.gaussian_residual(0.4), 1)
    assert v.value == pytest.approx(1.0, abs=1e-15) and v.method == "closed-form"


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label())
def test_registry_normalised(spec):
    assert analytic_mellin(spec, 1.0).value == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label())
def test_conjugate_symmetry(spec):
    lo = spec.strip.lower
    x = 0.9 if spec.family.value == "stable" else max(lo, 0.0) + 0.7
    z = complex(x, 1.3)
    a = analytic_mellin(spec, z).value
    b = analytic_mellin(spec, z.conjugate()).value
    assert abs(b - a.conjugate()) <= 1e-12 * abs(a)


def test_strip_enforcement():
    with pytest.raises(StripError):
        analytic_mellin(D.gamma(0.5), 0.4)
    with pytest.raises(StripError):
        analytic_mellin(D.stable(0.5), 1.6)


def test_mellin_of_power():
    beta = 0.35
    for z in (0.5, 2.0, 3.0 + 1j):
        got = mellin_of_power(D.exponential(), beta, z).value
        want = cmath.exp(special.loggamma(beta * (z - 1) + 1))
        assert abs(got - want) <= 1e-13 * abs(want)
    for spec in ALL_SPECS[:4]:
        assert mellin_of_power(spec, 1.0, 2.0).value == analytic_mellin(spec, 2.0).value
    got = mellin_of_power(D.gamma(0.5), 0.4, 2.0).value
    assert got == pytest.approx(math.gamma(0.9) / math.gamma(0.5), rel=1e-13)
    with pytest.raises(StripError):
        mellin_of_power(D.gamma(0.5), 0.4, -0.3)  # 0.4*(-1.3)+1 = 0.48 < 0.5


# --- quadrature ------------------------------------------------------------

def test_numeric_examples():
    e = D.exponential()
    assert numeric_mellin(density(e), 2, e.strip).value.real == pytest.approx(1.0, rel=1e-9)
    m = D.mwright(0.5)
    v = numeric_mellin(density(m), 2, m.strip)
    assert v.method == "quadrature"
    assert v.value.real == pytest.approx(1.1283791670955126, rel=1e-9)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label())
def test_numeric_matches_closed_form(spec):
    for z in (0.8, 1.0, 1.5, 2.0, 3.0):
        if not spec.strip.contains(z):
            continue
        num = numeric_mellin(density(spec), z, spec.strip,
                             head_exponent=spec.head_exponent).value
        closed = analytic_mellin(spec, z).value
        assert abs(num - closed) <= 1e-6 * abs(closed), z


def test_numeric_complex_argument():
    spec = D.foxh(2.5, 0.7)
    z = 1.5 + 2j
    num = numeric_mellin(density(spec), z, spec.strip).value
    closed = analytic_mellin(spec, z).value
    assert abs(num - closed) <= 1e-8 * abs(closed)


def test_numeric_strip_violation():
    g = D.gamma(0.5)
    with pytest.raises(StripError):
        numeric_mellin(density(g), 0.4, g.strip)


def test_numeric_refinement_budget():
    e = D.exponential()
    cfg = QuadratureConfig(abs_tol=1e-15, rel_tol=1e-15, max_refinements=1)
    with pytest.raises(QuadratureError):
        numeric_mellin(lambda x: np.exp(-x) * (1 + np.sin(40 * x) ** 2), 1.5,
                       e.strip, cfg)


# --- convolution -----------------------------------------------------------

def test_convolution_exponential_decomposition():
    beta = 0.5
    m, g = density(D.mwright(beta)), density(D.weibull(1 / beta))
    for x in (0.05, 0.7, 3.0):
        assert mellin_convolve(m, g, x) == pytest.approx(math.exp(-x), abs=1e-9)


def test_convolution_symmetry():
    f, g = density(D.gamma(2.5)), density(D.mwright(0.3))
    for x in (0.2, 1.0, 4.0):
        assert mellin_convolve(f, g, x) == pytest.approx(mellin_convolve(g, f, x), rel=1e-9)


def test_convolution_exp_exp_exact():
    # density of the product of two unit exponentials: 2 K_0(2 sqrt(x))
    e = density(D.exponential())
    for x in (0.1, 1.0, 5.0):
        assert mellin_convolve(e, e, x) == pytest.approx(2 * special.k0(2 * math.sqrt(x)),
                                                         rel=1e-9)


def test_convolution_exp_exp_monte_carlo():
    rng = np.random.default_rng(20240611)
    n = 10_000_000
    prod = rng.exponential(size=n) * rng.exponential(size=n)
    h = 0.05
    p = np.count_nonzero(np.abs(prod - 1.0) < h / 2) / n
    est, se = p / h, math.sqrt(p * (1 - p) / n) / h
    e = density(D.exponential())
    assert abs(mellin_convolve(e, e, 1.0) - est) <= 3 * se


def test_convolution_domain():
    e = density(D.exponential())
    with pytest.raises(DomainError):
        mellin_convolve(e, e, 0.0)


@pytest.mark.parametrize("z", [1.0, 2.0])
def test_multiplicativity(z):
    m, w = D.mwright(0.5), D.weibull(2.0)
    fm, fw = density(m), density(w)
    strip = AnalyticStrip(0.0, math.inf)

    def conv(x):
        return mellin_convolve(fm, fw, x)

    lhs = numeric_mellin(conv, z, strip).value
    rhs = (numeric_mellin(fm, z, m.strip).value * numeric_mellin(fw, z, w.strip).value)
    assert abs(lhs - rhs) <= 1e-5 * abs(rhs)
