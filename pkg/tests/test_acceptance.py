"""End-to-end acceptance checks, one test per criterion.

Each test reports a PASS/FAIL line (collected in the pytest terminal summary)
before asserting, so a failing run still shows every measured quantity.
"""
import csv
import io
import json
import math
import time

import numpy as np
import pytest

from emgmamp import cli, harness
from emgmamp.channels import GmPrior, NoiseModel, input_moments, input_posterior
from emgmamp.em import (
    EmConfig,
    em_gm_amp,
    em_update_lambda,
    em_update_omega,
    em_update_phi,
    em_update_psi,
    em_update_theta,
)
from emgmamp.gamp import gamp_run
from emgmamp.mos import MosConfig, mos_select
from emgmamp.signals import MatrixSpec, SignalSpec, add_noise, gen_matrix, gen_signal
from oracles import quadrature_posterior
from test_em import random_stats
from test_gamp import SMALL_CFG, mmse_instances


def db(v):
    return 10 * math.log10(v) if v > 0 else harness.NMSE_FLOOR_DB


def nmse(x, xh):
    return float(np.sum((x - xh) ** 2) / np.sum(x**2))


def payload_csv(text):
    """CSV text with the wall-clock columns removed."""
    rows = list(csv.reader(io.StringIO(text)))
    keep = [i for i, c in enumerate(rows[0]) if c not in harness.TIMING_COLUMNS]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([row[i] for i in keep])
    return buf.getvalue()


def test_c1_channel_oracle(report):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(200):
        L = 1 + i % 4
        prior = GmPrior(rng.uniform(0.05, 0.95), rng.dirichlet(np.ones(L)), rng.uniform(-3, 3, L),
                        rng.uniform(0.05, 3.0, L))
        r, mu_r = rng.uniform(-5, 5), rng.uniform(0.05, 3.0)
        st = input_posterior(np.array([r]), np.array([mu_r]), prior)
        mean, var = input_moments(st)
        pi_q, mean_q, var_q = quadrature_posterior(r, mu_r, prior.lam, prior.omega, prior.theta, prior.phi)
        worst = max(worst, abs(st.pi[0] - pi_q), abs(mean[0] - mean_q), abs(var[0] - var_q))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 10
    report("1 channel-oracle", ok, f"max abs error {worst:.2e}, {elapsed:.1f} s")
    assert ok


def test_c2_exact_mmse(report):
    t0 = time.perf_counter()
    wins = 0
    gaps = []
    for x, op, y, psi, x_mmse in mmse_instances(20):
        st, _, _ = gamp_run(op, y, GmPrior.bernoulli_gaussian(2 / 12), NoiseModel(psi), SMALL_CFG)
        gap = db(nmse(x, st.x_hat)) - db(nmse(x, x_mmse))
        gaps.append(gap)
        wins += gap <= 2.0
    elapsed = time.perf_counter() - t0
    ok = wins >= 16 and elapsed < 30
    report("2 exact-MMSE", ok, f"{wins}/20 seeds within 2 dB (worst gap {max(gaps):.2f} dB), {elapsed:.1f} s")
    assert ok


def test_c3_em_identities(report):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(50):
        stats = random_stats(rng, 200, 1)
        prior = GmPrior(0.3, [1.0], [rng.normal()], [rng.uniform(0.5, 2)])
        lam = em_update_lambda(stats)
        N = stats.n
        theta_bg = np.sum(stats.pi * stats.gamma[:, 0]) / (lam * N)
        phi_bg = np.sum(stats.pi * ((prior.theta[0] - stats.gamma[:, 0]) ** 2 + stats.nu[:, 0])) / (lam * N)
        worst = max(worst,
                    abs(em_update_theta(stats, prior, 0) - theta_bg) / max(abs(theta_bg), 1e-300),
                    abs(em_update_phi(stats, prior, 0) - phi_bg) / phi_bg,
                    abs(em_update_omega(stats, prior)[0] - 1.0))
    reduction_ok = worst <= 1e-13

    # surrogate maximisation: psi on a log grid, lambda by root finding
    grid = np.exp(np.linspace(np.log(1e-3), np.log(1e2), 20001))
    step = grid[1] / grid[0]
    grid_ok = True
    for _ in range(20):
        y, z, mz = rng.normal(0, 1, 40), rng.normal(0, 1, 40), rng.uniform(0, 0.5, 40)
        obj = [np.sum(-0.5 * np.log(2 * np.pi * g) - ((y - z) ** 2 + mz) / (2 * g)) for g in grid]
        best = grid[int(np.argmax(obj))]
        grid_ok &= best / step <= em_update_psi(y, z, mz) <= best * step
        pi = random_stats(rng, 50, 1).pi
        lam_grid = np.linspace(1e-4, 1 - 1e-4, 20001)
        q = [np.sum(pi * np.log(l) + (1 - pi) * np.log1p(-l)) for l in lam_grid]
        lam_best = lam_grid[int(np.argmax(q))]
        stats = random_stats(rng, 50, 1)
        stats.pi[:] = pi
        grid_ok &= abs(em_update_lambda(stats) - lam_best) <= lam_grid[1] - lam_grid[0]
    ok = reduction_ok and bool(grid_ok)
    report("3 EM identities", ok, f"L=1 vs BG max rel diff {worst:.1e}; surrogate grid checks {'ok' if grid_ok else 'off'}")
    assert ok


# criterion 4 and 10 share these runs
_RUNS = {}


def ptc_run(tmp, preset):
    out, js = tmp / f"{preset}.csv", tmp / f"{preset}.json"
    assert cli.main(["ptc", "--preset", preset, "--out", str(out), "--json", str(js)]) == 0
    return out.read_text(), json.loads(js.read_text())


def sweep_run(tmp, preset):
    out = tmp / f"{preset}.csv"
    assert cli.main(["sweep", "--preset", preset, "--out", str(out)]) == 0
    return out.read_text()


def test_c4_ptc_dominance(report, tmp_path):
    t0 = time.perf_counter()
    lines, ok = [], True
    for preset in ("desk-bg", "desk-bernoulli"):
        text, doc = ptc_run(tmp_path, preset)
        _RUNS[preset] = text
        assert len(text.splitlines()) == 65
        for c in doc["payload"]["extra"]["contour"]:
            above = c["k_over_m"] is not None and c["k_over_m"] >= c["lasso_k_over_m"]
            ok &= bool(above)
            lines.append(f"{preset} M/N={c['m_over_n']:.3f}: {c['k_over_m']:.3f} vs LASSO "
                         f"{c['lasso_k_over_m']:.3f}{'' if above else ' BELOW'}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30 * 60
    report("4 PTC dominance", ok, f"{elapsed / 60:.1f} min; " + "; ".join(l for l in lines if "BELOW" in l))
    print("\n".join(lines))
    assert ok


def test_c5_br_advantage(report, tmp_path):
    t0 = time.perf_counter()
    text = sweep_run(tmp_path, "desk-br-advantage")
    _RUNS["desk-br-advantage"] = text
    rows = {r["solver"]: float(r["median_nmse_db"]) for r in csv.DictReader(io.StringIO(text))}
    elapsed = time.perf_counter() - t0
    gain = rows["sparse-L1"] - rows["sparse-L3"]
    ok = gain >= 5.0 and elapsed < 20 * 60
    report("5 BR advantage", ok, f"L=3 {rows['sparse-L3']:.2f} dB vs L=1 {rows['sparse-L1']:.2f} dB "
           f"(gain {gain:.2f} dB), {elapsed:.0f} s")
    assert ok


def problem(kind, n, m, seed, index, r, snr, **sig):
    s_sig, s_mat, s_noise = harness.realization_seeds(seed, index, r)
    x = gen_signal(SignalSpec(kind, n, **sig), s_sig)
    op = gen_matrix(MatrixSpec("iid_gaussian", m, n), s_mat)
    y, _ = add_noise(op.forward(x), snr, s_noise)
    return x, op, y


def test_c6_heavy_tailed(report):
    heavy, sparse = [], []
    theta_zero = True
    for r in range(50):
        x, op, y = problem("students_t", 1000, 500, 6, 0, r, 25.0, q=1.67)
        res_h = em_gm_amp(y, op, EmConfig(mode="heavy_tailed"))
        res_s = em_gm_amp(y, op, EmConfig(mode="sparse"))
        heavy.append(db(nmse(x, res_h.x_hat)))
        sparse.append(db(nmse(x, res_s.x_hat)))
        theta_zero &= bool(np.all(res_h.prior.theta == 0.0))
        theta_zero &= all(np.all(np.asarray(t["theta"]) == 0.0) for t in res_h.trace)
    gain = np.median(sparse) - np.median(heavy)
    ok = gain >= 1.0 and theta_zero
    report("6 heavy-tailed", ok, f"heavy {np.median(heavy):.2f} dB vs sparse {np.median(sparse):.2f} dB "
           f"(gain {gain:.2f} dB), theta identically 0: {theta_zero}")
    assert ok


def test_c7_mos_demo(report):
    mos_db, fixed_db, L_sel = [], [], []
    within_jmax, monotone = 0, 0
    for s in range(20):
        x, op, y = problem("triangular_mixture", 1000, 500, 7, 0, s, 20.0, lam=0.1)
        res = mos_select(y, op, EmConfig(), MosConfig(L0=1, j_max=5), x_true=x)
        fixed = em_gm_amp(y, op, EmConfig(L=3))
        within_jmax += res.n_iter - 1 <= 5
        trace = [t["nmse"] for t in res.trace]
        monotone += all(b <= a for a, b in zip(trace, trace[1:]))
        mos_db.append(db(nmse(x, res.result.x_hat)))
        fixed_db.append(db(nmse(x, fixed.x_hat)))
        L_sel.append(res.L)
    gap = np.median(mos_db) - np.median(fixed_db)
    ok = within_jmax == 20 and gap <= 1.0 and monotone >= 14
    report("7 MOS demo", ok, f"median MOS {np.median(mos_db):.2f} dB vs L=3 {np.median(fixed_db):.2f} dB "
           f"(gap {gap:.2f} dB), non-increasing trace {monotone}/20, selected L {sorted(set(L_sel))}")
    assert ok


def test_c8_scaling(report):
    t0 = time.perf_counter()
    dense = harness.run_scaling([512, 1024, 2048, 4096], matrix="iid_gaussian")
    dct = harness.run_scaling(list(cli.PRESETS["desk-scaling-dct"][1]["n-list"]), matrix="row_sampled_dct")
    elapsed = time.perf_counter() - t0
    sd, sf = dense.extra["slope"], dct.extra["slope"]
    ok = 1.7 <= sd <= 2.3 and 0.8 <= sf <= 1.5 and elapsed < 15 * 60
    report("8 scaling", ok, f"dense slope {sd:.2f}, DCT slope {sf:.2f}, {elapsed:.0f} s")
    assert ok


def test_c9_ensembles(report):
    rates = {}
    for ens in ("iid_gaussian", "iid_uniform", "iid_bernoulli_rademacher", "row_sampled_dct", "iid_cauchy"):
        p = cli.resolve(cli.build_parser().parse_args(["ptc", "--preset", f"desk-ensemble-{ens.replace('_', '-')}"]))
        grid = harness.ExperimentGrid(n=p["n"], m_over_n=p["m_over_n"], k_over_m=p["k_over_m"],
                                      realizations=p["realizations"], base_seed=p["seed"], signal=p["signal"],
                                      matrix=p["matrix"], lam_a=p["lam_a"], snr_db=p["snr"],
                                      solver=cli.solver_from(p))
        rates[ens] = harness.run_ptc(grid).rows[0]["success_rate"]
    good = all(rates[e] >= 0.9 for e in ("iid_gaussian", "iid_uniform", "iid_bernoulli_rademacher",
                                         "row_sampled_dct"))
    ok = good and rates["iid_cauchy"] < rates["iid_gaussian"]
    report("9 ensembles", ok, ", ".join(f"{k} {v:.2f}" for k, v in rates.items()))
    assert ok


def test_c10_determinism(report, tmp_path):
    same = {}
    for preset in ("desk-bg", "desk-bernoulli"):
        first = _RUNS[preset] if preset in _RUNS else ptc_run(_mkdir(tmp_path / "a"), preset)[0]
        again = ptc_run(_mkdir(tmp_path / "b"), preset)[0]
        same[preset] = payload_csv(first) == payload_csv(again)
    preset = "desk-br-advantage"
    first = _RUNS[preset] if preset in _RUNS else sweep_run(_mkdir(tmp_path / "a"), preset)
    again = sweep_run(_mkdir(tmp_path / "b"), preset)
    same[preset] = payload_csv(first) == payload_csv(again)
    ok = all(same.values())
    report("10 determinism", ok, ", ".join(f"{k} {'identical' if v else 'DIFFERENT'}" for k, v in same.items()))
    assert ok


def _mkdir(p):
    p.mkdir(parents=True, exist_ok=True)
    return p
