import math

import numpy as np
import pytest
from scipy import integrate, special, stats
from scipy.interpolate import PchipInterpolator

from selfdecomp.distributions import (
    BLOCK_SIZE,
    InverseCdfTable,
    SampleBatch,
    build_inverse_cdf_table,
    cdf_numeric,
    clear_tables,
    ensure_table,
    get_table,
    pdf,
    power_pdf,
    sample,
)
from selfdecomp.errors import DomainError, TableUnavailableError
from selfdecomp.families import DistributionSpec as D
from selfdecomp.families import Family
from selfdecomp.verify import ks_critical_value, ks_statistic


def ks_passes(a, b, level=0.01):
    n, m = len(a), len(b)
    return ks_statistic(a, b) <= ks_critical_value(level) * math.sqrt((n + m) / (n * m))


# --- specs -----------------------------------------------------------------

def test_spec_validation():
    with pytest.raises(DomainError):
        D.gamma(0.0)
    with pytest.raises(DomainError):
        D.mwright(1.0)
    with pytest.raises(DomainError):
        D.foxh(1.0, 1.2)
    with pytest.raises(DomainError):
        D.from_name("cauchy")
    assert D.from_name("exp") == D.exponential()
    assert D.from_name("foxh", r=2, alpha=0.5, beta=None) == D.foxh(2.0, 0.5)
    assert hash(D.gamma(2.5)) == hash(D.gamma(2.5))
    assert D.foxh(2, 0.5).alpha == 0.5


# --- densities -------------------------------------------------------------

def test_pdf_examples():
    assert pdf(D.exponential(), 0.0) == 1.0
    x = np.linspace(0.1, 8, 30)
    assert np.array_equal(pdf(D.gamma(1.0), x), pdf(D.exponential(), x))
    levy = math.exp(-0.25) / (2 * math.sqrt(math.pi))
    assert pdf(D.stable(0.5), 1.0) == pytest.approx(levy, rel=1e-13)
    assert pdf(D.stable(0.5), 1.0) == pytest.approx(0.21969564, abs=1e-8)


def test_levy_density_laplace_transform():
    # oracle for the stable density: Laplace transform exp(-sqrt(lambda))
    for lam in (0.5, 2.0):
        val, _ = integrate.quad(lambda x: math.exp(-lam * x) * pdf(D.stable(0.5), x), 0,
                                np.inf, epsabs=1e-12, limit=200)
        assert val == pytest.approx(math.exp(-math.sqrt(lam)), abs=1e-9)


def test_pdf_against_scipy():
    x = np.geomspace(0.01, 20, 40)
    assert np.allclose(pdf(D.gamma(2.5), x), stats.gamma(2.5).pdf(x), rtol=1e-13)
    assert np.allclose(pdf(D.weibull(0.7), x), stats.weibull_min(0.7).pdf(x), rtol=1e-13)
    assert np.allclose(pdf(D.halfnormal(), x), stats.halfnorm.pdf(x), rtol=1e-13)
    assert np.allclose(pdf(D.stable(0.5), x), stats.levy(scale=0.5).pdf(x), rtol=1e-10)


def test_pdf_domain():
    with pytest.raises(DomainError):
        pdf(D.exponential(), -1.0)
    with pytest.raises(DomainError):
        pdf(D.gamma(0.5), 0.0)
    assert pdf(D.gamma(2.0), 0.0) == 0.0


def test_power_pdf_weibull():
    beta = 0.4
    x = np.geomspace(0.01, 5, 30)
    got = power_pdf(D.exponential(), beta)(x)
    assert np.allclose(got, pdf(D.weibull(1 / beta), x), rtol=1e-12)
    with pytest.raises(DomainError):
        power_pdf(D.exponential(), 0.0)


# --- cdf -------------------------------------------------------------------

def test_cdf_examples():
    x = np.array([0.1, 1.0, 3.0, 12.0])
    assert np.allclose(cdf_numeric(D.exponential(), x), 1 - np.exp(-x), atol=1e-10)
    for spec in (D.gamma(0.5), D.mwright(0.3), D.foxh(2, 0.5), D.gaussian_residual(0.5),
                 D.halfnormal(), D.weibull(0.7)):
        assert cdf_numeric(spec, 500.0) == pytest.approx(1.0, abs=1e-6)
    assert cdf_numeric(D.stable(0.5), 1e14) == pytest.approx(1.0, abs=1e-6)
    f = cdf_numeric(D.foxh(0.5, 0.3), np.geomspace(1e-4, 30, 50))
    assert np.all(np.diff(f) >= -1e-12)


# --- inverse-CDF tables ----------------------------------------------------

@pytest.fixture(scope="module")
def foxh_table():
    return build_inverse_cdf_table(D.foxh(2.0, 0.5))


def test_table_round_trip(foxh_table):
    spec = foxh_table.spec
    for p in (0.01, 0.5, 0.99):
        assert cdf_numeric(spec, foxh_table.quantile(p)) == pytest.approx(p, abs=1e-6)
    p = special.expit(np.linspace(-20, 20, 41))
    err = np.abs(cdf_numeric(spec, foxh_table.quantile(p)) - p)
    assert err.max() <= 1e-6


def test_table_invariants(foxh_table):
    assert foxh_table.grid_size == 4096
    assert np.all(np.diff(foxh_table.probabilities) > 0)
    assert np.all(np.diff(foxh_table.quantiles) > 0)
    # extrapolation keeps monotonicity on both ends
    p = np.array([1e-14, 1e-12, 1e-10, 1 - 1e-10, 1 - 1e-12, 1 - 1e-14])
    assert np.all(np.diff(foxh_table.quantile(p)) > 0)
    with pytest.raises(DomainError):
        foxh_table.quantile(1.0)


def test_table_head_extrapolation():
    spec = D.foxh(0.5, 0.3)
    t = build_inverse_cdf_table(spec, grid_size=512, register=False)
    p = 1e-14
    # F(x) ~ x**r / (r Gamma(r(1-alpha))) near 0
    x = (p * 0.5 * math.gamma(0.5 * 0.7)) ** 2
    assert t.quantile(p) == pytest.approx(x, rel=1e-3)


def test_table_csv_round_trip(foxh_table, tmp_path):
    path = tmp_path / "t.csv"
    foxh_table.to_csv(path)
    back = InverseCdfTable.from_csv(path)
    assert back.spec == foxh_table.spec
    assert np.array_equal(back.probabilities, foxh_table.probabilities)
    assert np.array_equal(back.quantiles, foxh_table.quantiles)
    assert back.tail_slope == foxh_table.tail_slope
    bad = foxh_table.to_csv().replace("table v1", "table v9")
    with pytest.raises(DomainError):
        InverseCdfTable.from_csv(bad)


def test_table_median_matches_cdf(foxh_table):
    med = foxh_table.quantile(0.5)
    assert cdf_numeric(foxh_table.spec, med) == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("r,alpha", [(3.0, 0.7), (5.0, 0.2)])
def test_table_builds_for_other_parameters(r, alpha):
    t = build_inverse_cdf_table(D.foxh(r, alpha), grid_size=256, register=False)
    assert cdf_numeric(t.spec, t.quantile(0.5)) == pytest.approx(0.5, abs=1e-6)


def test_table_rejects_stable():
    with pytest.raises(DomainError):
        build_inverse_cdf_table(D.stable(0.5))


def test_table_unavailable_and_cache(tmp_path, monkeypatch, isolated_tables):
    spec = D.foxh(1.7, 0.45)
    with pytest.raises(TableUnavailableError):
        sample(spec, 10, 1)
    monkeypatch.setenv("SELFDECOMP_TABLE_DIR", str(tmp_path))
    built = build_inverse_cdf_table(spec, grid_size=256)
    assert list(tmp_path.iterdir())
    clear_tables()
    loaded = get_table(spec)
    assert np.array_equal(loaded.quantiles, built.quantiles)
    assert ensure_table(spec) is loaded


# --- samplers --------------------------------------------------------------

def test_sampler_determinism():
    spec = D.mwright(0.4)
    n = 2 * BLOCK_SIZE + 17
    a = sample(spec, n, 42)
    b = sample(spec, n, 42, workers=4)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, sample(spec, n, 43).values)
    assert not np.array_equal(a.values, sample(spec, n, 42, stream=1).values)
    # full blocks do not depend on n
    c = sample(spec, BLOCK_SIZE + 5, 42)
    assert np.array_equal(c.values[:BLOCK_SIZE], a.values[:BLOCK_SIZE])


def test_sampler_validation():
    with pytest.raises(DomainError):
        sample(D.exponential(), 0, 1)
    with pytest.raises(DomainError):
        sample(D.exponential(), 10, -1)
    with pytest.raises(DomainError):
        sample(D.exponential(), 10, 1.5)
    with pytest.raises(DomainError):
        sample(D.halfnormal(), 10, 1, method="box-muller")


def test_batch_read_only_and_positive():
    b = sample(D.gamma(0.3), 5000, 3)
    assert np.all(b.values > 0)
    with pytest.raises(ValueError):
        b.values[0] = 1.0
    assert len(b) == 5000


def test_batch_csv_round_trip(tmp_path):
    b = sample(D.weibull(0.7), 1000, 9)
    path = tmp_path / "s.csv"
    b.to_csv(path)
    assert path.read_text().startswith("value\n")
    back = SampleBatch.from_csv(path)
    assert np.array_equal(back.values, b.values)
    with pytest.raises(DomainError):
        SampleBatch.from_csv("x\n1\n")


def test_exponential_mean():
    v = sample(D.exponential(), 100_000, 1).values
    assert abs(v.mean() - 1) <= 4 / math.sqrt(1e5)


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.8])
def test_mwright_first_moment(beta):
    v = sample(D.mwright(beta), 100_000, 5).values
    want = 1 / math.gamma(1 + beta)
    assert abs(v.mean() - want) <= 4 * v.std() / math.sqrt(v.size)


@pytest.mark.parametrize("beta", [0.3, 0.6])
@pytest.mark.parametrize("z", [1.5, 2.0, 2.5])
def test_stable_power_mellin_moments(beta, z):
    s = sample(D.stable(beta), 200_000, 11).values
    y = s ** (-beta * (z - 1))
    want = math.gamma(z) / math.gamma(beta * (z - 1) + 1)
    assert abs(y.mean() - want) <= 4 * y.std() / math.sqrt(y.size)


def test_stable_small_moment():
    # E[S**q] = Gamma(1 - q/beta) / Gamma(1 - q) for q < beta
    beta, q = 0.6, 0.25
    v = sample(D.stable(beta), 200_000, 2).values ** q
    want = math.gamma(1 - q / beta) / math.gamma(1 - q)
    assert abs(v.mean() - want) <= 4 * v.std() / math.sqrt(v.size)


def test_mwright_half_is_half_gaussian():
    a = sample(D.mwright(0.5), 100_000, 7).values
    b = np.abs(np.random.default_rng(99).standard_normal(100_000)) * math.sqrt(2)
    assert ks_passes(a, b)


def test_weibull_identity():
    beta = 0.35
    a = sample(D.exponential(), 100_000, 3).values ** beta
    b = sample(D.weibull(1 / beta), 100_000, 4).values
    assert ks_passes(a, b)


def test_halfnormal_methods_agree():
    a = sample(D.halfnormal(), 100_000, 5, method="fold").values
    b = sample(D.halfnormal(), 100_000, 6, method="gamma").values
    assert ks_passes(a, b)


@pytest.mark.parametrize("r,alpha", [(0.5, 0.3), (2.5, 0.7)])
def test_foxh_sample_mean(r, alpha):
    spec = D.foxh(r, alpha)
    ensure_table(spec)
    v = sample(spec, 200_000, 8).values
    want = math.gamma(r + 1) / math.gamma(r + alpha)
    assert abs(v.mean() - want) <= 4 * v.std() / math.sqrt(v.size)


# --- pdf / sampler consistency via an independent fine-grid CDF ------------

_RANGES = {
    Family.EXPONENTIAL: (1e-8, 40), Family.GAMMA: (1e-12, 60), Family.WEIBULL: (1e-9, 200),
    Family.STABLE: (1e-5, 1e16), Family.MWRIGHT: (1e-8, 40), Family.FOXH: (1e-12, 60),
    Family.GAUSSIAN_RESIDUAL: (1e-8, 12), Family.HALFNORMAL: (1e-8, 9),
}


def oracle_draws(spec, n, seed):
    lo, hi = _RANGES[spec.family]
    x = np.geomspace(lo, hi, 600)
    f = cdf_numeric(spec, x)
    keep = np.concatenate(([True], np.diff(f) > 1e-15))
    inv = PchipInterpolator(f[keep], np.log(x[keep]))
    u = np.random.default_rng(seed).uniform(f[keep][0], f[keep][-1], n)
    return np.exp(inv(u))


@pytest.mark.parametrize("spec", [
    D.exponential(), D.gamma(0.5), D.gamma(2.5), D.weibull(0.7), D.stable(0.5),
    D.stable(0.3), D.mwright(0.3), D.mwright(0.8), D.foxh(0.5, 0.3), D.foxh(2.5, 0.7),
    D.gaussian_residual(0.5), D.halfnormal(),
], ids=lambda s: s.label())
def test_sampler_matches_pdf(spec):
    if spec.family in (Family.FOXH, Family.GAUSSIAN_RESIDUAL):
        ensure_table(spec)
    a = sample(spec, 50_000, 17).values
    b = oracle_draws(spec, 50_000, 1234)
    assert ks_passes(a, b)
