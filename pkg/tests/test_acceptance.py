"""Acceptance criteria, one test each.

Every test prints a single ``CRITERION n: PASS|FAIL`` line with the measured
quantities; the lines are repeated in the pytest terminal summary. The file
can also be run directly: ``python3 tests/test_acceptance.py``.

Pinned tolerances are the module constants below.
"""

import math
import time

import numpy as np

from selfdecomp.distributions import ensure_table, sample
from selfdecomp.families import DistributionSpec as D
from selfdecomp.specfun import m_wright
from selfdecomp.verify import (
    VerifyConfig,
    characterization_iteration,
    laplace_pair_check,
    limit_beta_zero_check,
    verify_exponential_decomposition,
    verify_gamma_decomposition,
    verify_gaussian_decomposition,
)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

# pinned tolerances
CONV_TOL = 1e-6
REGISTRY_TOL = 1e-12
IDENTITY_TOL = 1e-10
MELLIN_TOL = 1e-6
NORM_TOL = 1e-8
KS_LEVEL = 0.01
LAPLACE_TOL = 1e-8
REMARK_TOL = 1e-7
CONTRACTION_TOL = 1e-14
CONSTANCY_TOL = 1e-10
MOMENT_SE = 4.0
CLOSED_FORM_TOL = 1e-10
M13_TOL = 1e-12
EXP_RUNTIME = 30.0
GAMMA_RUNTIME = 120.0

BETAS = (0.2, 0.5, 0.8)
GAMMA_SETS = [(r, a) for r in (0.5, 1.0, 2.5) for a in (0.3, 0.7)]
GAUSS_ALPHAS = (0.3, 0.5, 0.7)
SEEDS = (1, 2, 3, 4, 5)

CFG = VerifyConfig(registry_tol=REGISTRY_TOL, convolution_tol=CONV_TOL,
                   identity_tol=IDENTITY_TOL, mellin_tol=MELLIN_TOL,
                   normalization_tol=NORM_TOL, ks_level=KS_LEVEL, n_samples=200_000,
                   grid_points=40)


def record(n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def test_criterion_1_exponential():
    t0 = time.perf_counter()
    conv, reg = [], []
    for b in BETAS:
        r = verify_exponential_decomposition(b, CFG, checks=("registry", "convolution"))
        conv.append(r.subcheck("convolution").metric)
        reg.append(r.subcheck("registry").metric)
    elapsed = time.perf_counter() - t0
    ok = max(conv) <= CONV_TOL and max(reg) <= REGISTRY_TOL and elapsed < EXP_RUNTIME
    assert record(1, ok, f"conv sup-err {max(conv):.2e} (tol {CONV_TOL:g}), registry rel-err "
                         f"{max(reg):.2e} (tol {REGISTRY_TOL:g}), {elapsed:.1f} s "
                         f"(limit {EXP_RUNTIME:g} s)")


def test_criterion_2_gamma():
    t0 = time.perf_counter()
    conv, reg = [], []
    for r, a in GAMMA_SETS:
        ensure_table(D.foxh(r, a), CFG.table_grid_size)
        rep = verify_gamma_decomposition(r, a, CFG, checks=("registry", "convolution"))
        conv.append(rep.subcheck("convolution").metric)
        reg.append(rep.subcheck("registry").metric)
    elapsed = time.perf_counter() - t0
    ok = max(conv) <= CONV_TOL and max(reg) <= REGISTRY_TOL and elapsed < GAMMA_RUNTIME
    assert record(2, ok, f"conv sup-err {max(conv):.2e} (tol {CONV_TOL:g}), registry rel-err "
                         f"{max(reg):.2e} (tol {REGISTRY_TOL:g}), {elapsed:.1f} s incl. "
                         f"tables (limit {GAMMA_RUNTIME:g} s)")


def test_criterion_3_gaussian():
    dens, mel, norm = [], [], []
    for a in GAUSS_ALPHAS:
        rep = verify_gaussian_decomposition(a, CFG, checks=("density", "mellin",
                                                            "normalization"))
        dens.append(rep.subcheck("density").metric)
        assert rep.subcheck("density").details["points"] == 40
        mel.append(rep.subcheck("mellin").metric)
        norm.append(rep.subcheck("normalization").metric)
    ok = max(dens) <= IDENTITY_TOL and max(mel) <= MELLIN_TOL and max(norm) <= NORM_TOL
    assert record(3, ok, f"forms agree to {max(dens):.2e} (tol {IDENTITY_TOL:g}), Mellin "
                         f"rel-err {max(mel):.2e} (tol {MELLIN_TOL:g}), |int - 1| "
                         f"{max(norm):.2e} (tol {NORM_TOL:g})")


def _ks_runs(fn, param_sets):
    passes, total, worst = 0, 0, 0.0
    for params in param_sets:
        for seed in SEEDS:
            cfg = VerifyConfig(ks_level=KS_LEVEL, n_samples=200_000, seed=seed)
            sub = fn(*params, cfg).subcheck("ks")
            passes += sub.passed
            total += 1
            worst = max(worst, sub.metric / sub.threshold)
    return passes, total, worst


def test_criterion_4_monte_carlo():
    exp = _ks_runs(lambda b, c: verify_exponential_decomposition(b, c, checks=("ks",)),
                   [(b,) for b in BETAS])
    gam = _ks_runs(lambda r, a, c: verify_gamma_decomposition(r, a, c, checks=("ks",)),
                   GAMMA_SETS)
    gau = _ks_runs(lambda a, c: verify_gaussian_decomposition(a, c, checks=("ks",)),
                   [(a,) for a in GAUSS_ALPHAS])
    # at least 13 of every 15 seed-runs; the gamma grid has 30 runs, so 26
    ok = all(passes >= math.ceil(13 * total / 15) for passes, total, _ in (exp, gam, gau))
    assert record(4, ok, "KS passes exp {}/{}, gamma {}/{}, gaussian {}/{} (need 13 of 15; "
                         "worst D/threshold {:.2f})".format(
                             exp[0], exp[1], gam[0], gam[1], gau[0], gau[1],
                             max(exp[2], gam[2], gau[2])))


def test_criterion_5_laplace():
    pair = max(laplace_pair_check(b, (0.5, 1.0, 2.0), t_values=(0.5, 2.0))
               .subcheck("pair").metric for b in BETAS)
    remark = max(laplace_pair_check(b, (0.5,), t_values=(0.5, 2.0))
                 .subcheck("remark").metric for b in (0.3, 0.7))
    ok = pair <= LAPLACE_TOL and remark <= REMARK_TOL
    assert record(5, ok, f"Laplace pair abs-err {pair:.2e} (tol {LAPLACE_TOL:g}), "
                         f"remark identity abs-err {remark:.2e} (tol {REMARK_TOL:g})")


def test_criterion_6_characterization():
    cases = ([("exp", {"beta": b}, z0) for b in BETAS for z0 in (4.0, 0.5 + 2j)]
             + [("gamma", {"r": r, "alpha": a}, z0) for r, a in GAMMA_SETS
                for z0 in (2.0 + 1j, 1.2 - r + 0.5)]
             + [("gaussian", {"alpha": a}, z0) for a in (0.3, 0.5, 0.6, 0.7)
                for z0 in (3.0, 0.5 + 1j)])
    contraction = constancy = 0.0
    gauss_limit = 0.0
    for kind, params, z0 in cases:
        tr = characterization_iteration(kind, params, z0, 60)
        contraction = max(contraction, tr.contraction_error)
        constancy = max(constancy, tr.constancy_error, tr.limit_error)
        if kind == "gaussian":
            gauss_limit = max(gauss_limit, abs(tr.limit - 1 / math.sqrt(math.pi)))
    ok = (contraction <= CONTRACTION_TOL and constancy <= CONSTANCY_TOL
          and gauss_limit <= CONSTANCY_TOL)
    assert record(6, ok, f"{len(cases)} orbits: contraction err {contraction:.1e} (tol "
                         f"{CONTRACTION_TOL:g}), h-constancy {constancy:.1e} (tol "
                         f"{CONSTANCY_TOL:g}), gaussian h(1) err {gauss_limit:.1e}")


def test_criterion_7_stable_representation():
    worst = 0.0
    for b in (0.3, 0.6):
        s = sample(D.stable(b), 200_000, 1).values
        for z in (1.5, 2.0, 2.5):
            y = s ** (-b * (z - 1))
            want = math.gamma(z) / math.gamma(b * (z - 1) + 1)
            se = y.std(ddof=1) / math.sqrt(y.size)
            worst = max(worst, abs(y.mean() - want) / se)
    assert record(7, worst <= MOMENT_SE, f"worst |mean - Mellin moment| = {worst:.2f} "
                                         f"standard errors (limit {MOMENT_SE:g})")


def test_criterion_8_special_values():
    t = np.linspace(0.0, 10.0, 1001)
    half = np.max(np.abs(m_wright(t, 0.5) - np.exp(-t * t / 4) / math.sqrt(math.pi)))
    third = abs(m_wright(0.0, 1 / 3) - 1 / math.gamma(2 / 3)) * math.gamma(2 / 3)
    lim = limit_beta_zero_check([0.4, 0.2, 0.1, 0.05], n=100_000, seed=1)
    ok = half <= CLOSED_FORM_TOL and third <= M13_TOL and lim.metric == 0
    assert record(8, ok, f"M_1/2 sup-err {half:.1e} (tol {CLOSED_FORM_TOL:g}), M_1/3(0) "
                         f"rel-err {third:.1e} (tol {M13_TOL:g}), beta->0 inversions "
                         f"{int(lim.metric)}")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
