"""The twelve acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed together in
the "acceptance criteria" section of the pytest terminal summary.
"""

import json
import math

import numpy as np
import pytest

from nullwave import (InitialDatum, TartarSolver, budget_sequence, contraction_budget,
                      estimate_sweep, indicator_bilinear_example, riccati_oracle)
from nullwave.cli import main
from nullwave.cli.config import config_dir, load_config, shipped_configs
from nullwave.cli.experiments import RUNNERS

from conftest import ACCEPTANCE_LINES

# order below this counts as "already exact"; exact-at-nodes transport hits it
ERROR_FLOOR = 1e-13


def record(n, ok, msg):
    ACCEPTANCE_LINES[n] = (bool(ok), msg)
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {msg}")
    assert ok, msg


@pytest.fixture(scope="module")
def sweep():
    return estimate_sweep(42, n_bilinear=100, n_lemma=50, dx=1e-3, dt=1e-3)


@pytest.fixture(scope="module")
def tartar_outcome():
    return RUNNERS["picard"](load_config("tartar-2x2", "picard"))


def _free_transport_errors(hat, dx):
    """L1 error at t = 0.5 of each component against the translated hat."""
    est = TartarSolver(speeds=(1.0, -1.0), coupling=[], dx=dx, dt=dx, horizon=0.5)
    est.fit([hat, hat])
    lo, hi = est.grid_.x_start, est.grid_.x_end
    x = np.linspace(lo, hi, 20 * est.grid_.nx + 1)
    t = np.full_like(x, 0.5)
    u = est.predict(np.column_stack([x, t]))
    errs = []
    for i, c in enumerate((1.0, -1.0)):
        errs.append(float(np.trapezoid(np.abs(u[:, i] - hat(x - c * 0.5)), x)))
    return errs


def _order(coarse, fine):
    if fine <= ERROR_FLOOR:
        return math.inf
    return math.log2(coarse / fine)


def test_criterion_01_free_transport():
    unit = InitialDatum.hat(0.0, 1.0, 1.0)
    # kinks at 0, 0.5, 1 land on nodes: errors sit at round-off
    e1, e2 = _free_transport_errors(unit, 1e-3), _free_transport_errors(unit, 5e-4)
    # grids are anchored at the support, so only an interior kink can sit off the lattice
    off = InitialDatum([(0.0, 0.0), (0.50037, 1.0), (1.0, 0.0)])
    f1, f2 = _free_transport_errors(off, 1e-3), _free_transport_errors(off, 5e-4)
    orders = [_order(a, b) for a, b in zip(e1, e2)] + [_order(a, b) for a, b in zip(f1, f2)]
    ok = max(e1 + f1) <= 5e-3 and min(orders) >= 0.9
    record(1, ok, f"errors at dx=1e-3: unit {max(e1):.3g}, off-lattice {max(f1):.3g} (<= 5e-3); "
                  f"orders {', '.join(f'{o:.2f}' for o in orders)} (>= 0.9)")


def test_criterion_02_riccati():
    est = TartarSolver(speeds=(1.0,), coupling=[(1, 1, 1, -1.0)], dx=1e-3, dt=1e-3, horizon=1.0)
    hat = InitialDatum.hat(0.0, 1.0, 0.5)
    est.fit([hat])
    x = est.grid_.x
    n = est.grid_.level(1.0)
    err = float(np.max(np.abs(est.fields_[0].level(n) - riccati_oracle(hat, 1.0, 1.0, x, 1.0))))
    record(2, err <= 1e-2, f"max error at t=1: {err:.3g} (<= 1e-2)")


def test_criterion_03_bilinear(sweep):
    ind = indicator_bilinear_example(1e-3, 1e-3)
    rows = sweep["bilinear"]
    worst = max(r["lhs"] / r["rhs"] for r in rows if r["rhs"] > 0)
    ok = (abs(ind.lhs - 0.25) <= 0.01 and abs(ind.rhs - 0.5) <= 0.01 and ind.holds
          and len(rows) == 100 and all(r["lhs"] <= r["rhs"] * (1 + 1e-3) for r in rows))
    record(3, ok, f"indicator lhs {ind.lhs:.4f} vs bound {ind.rhs:.4f}; "
                  f"100 random pairs, max lhs/rhs {worst:.3f}")


def test_criterion_04_lemma1(sweep):
    rows = sweep["lemma1"]
    worst = max(r["lhs"] / r["rhs"] for r in rows if r["rhs"] > 0)
    ok = len(rows) == 50 and all(r["lhs"] <= r["rhs"] * (1 + 1e-3) for r in rows)
    record(4, ok, f"50 random samples, max ||v||/(T* |||v|||) {worst:.3f}")


def test_criterion_05_norm_equivalence(sweep):
    rows = sweep["norm_equivalence"]
    gap = max(abs(r["residual_l1"] - (r["triple"] - r["eps"])) for r in rows)
    ok = len(rows) > 0 and gap <= 1e-12 and all(r["residual_l1"] <= r["triple"] for r in rows)
    record(5, ok, f"{len(rows)} samples, max identity gap {gap:.2g} (<= 1e-12)")


def test_criterion_06_contraction_budget(tartar_outcome):
    rep = tartar_outcome.result["report"]
    iters = rep["iterations"]
    budget = budget_sequence(0.5, 0.25, len(iters))
    r_star = contraction_budget(0.5, 0.25).r_star
    budget_ok = all(it["r_measured"] <= budget[it["m"]] + 1e-3 for it in iters)
    ratios = [it["ratio"] for it in iters[1:]]
    ratio_ok = all(r is not None and r <= 0.55 for r in ratios)
    final = iters[-1]["r_measured"]
    ok = (rep["verdict"] == "converged" and budget[:2] == [0.0, 0.03125]
          and abs(budget[2] - 0.0395508) < 1e-7 and abs(r_star - 0.0428932) < 1e-7
          and budget_ok and ratio_ok and final <= r_star + 1e-3)
    record(6, ok, f"{len(iters)} iterations within budget; max ratio {max(ratios):.3f} (<= 0.55); "
                  f"sum alpha {final:.5f} <= r_star + 1e-3 = {r_star + 1e-3:.5f}")


def test_criterion_07_k1_bound(tartar_outcome):
    rep = tartar_outcome.result["report"]
    final = rep["iterations"][-1]["r_measured"]
    eps_sum = sum(rep["epsilons"])
    k1_rhs = 4 * 0.5 * 0.25 * eps_sum + 1e-3
    # the stated numeric bound is stricter than 4 gamma E0 sum(eps); both are asserted
    ok = final <= k1_rhs and final <= 0.03125 + 1e-3
    record(7, ok, f"sum alpha {final:.5f} <= 4 gamma E0 sum eps + 1e-3 = {k1_rhs:.5f} "
                  f"and <= 0.03125 + 1e-3")


def test_criterion_08_stability():
    out = RUNNERS["stability"](load_config("tartar-2x2", "stability"))
    r = out.result
    ok = (abs(r["data_distance"] - 1e-3) <= 1e-12 and r["sup_solution_distance"] <= 2.2e-3
          and r["k2_predicted"] == pytest.approx(2.0))
    record(8, ok, f"data distance {r['data_distance']:.3g}, sup distance "
                  f"{r['sup_solution_distance']:.4g} (<= 2.2e-3), k2 observed "
                  f"{r['k2_observed']:.3f} vs predicted {r['k2_predicted']:.3f}")


def test_criterion_09_gluing():
    cfg = load_config("glue-two-bumps", "glue")
    out = RUNNERS["glue"](cfg)
    mismatch = out.result.get("mismatch")
    ok = (cfg.raw["glue"]["partition"] == [[0.0, 1.0], [1.0, 2.0]]
          and cfg.data[0].support == (0.0, 2.0) and mismatch is not None and mismatch <= 1e-6)
    record(9, ok, f"hat on [0,2] split at 1: mismatch {mismatch:.3g} (<= 1e-6)")


def test_criterion_10_wave_bridge():
    out = RUNNERS["wave-bridge"](load_config("wave-bridge-john", "wave-bridge"))
    r = out.result
    res, cmp_, ctrl = r["residual_ratio"], r["compat_ratio"], r["control_ratio"]
    ok = (0.4 <= res <= 0.7) and (0.4 <= cmp_ <= 0.7) and ctrl >= 0.5
    record(10, ok, f"residual ratio {res:.3f}, compat ratio {cmp_:.3f} (in [0.4, 0.7]); "
                   f"alpha=1, beta=2 ratio {ctrl:.3f} (>= 0.5)")


def test_criterion_11_blowup():
    res = RUNNERS["blowup"](load_config("resonant-2x2-blowup", "blowup")).result
    adm_cfg = load_config("tartar-2x2", "blowup")
    adm = RUNNERS["blowup"](adm_cfg).result
    t_star = 0.5
    ok = (res["blew_up"] and 0.45 <= res["t_detect"] <= 0.6 and not adm["blew_up"]
          and adm["horizon"] == pytest.approx(10 * t_star))
    record(11, ok, f"resonant blow-up at t={res['t_detect']} (in [0.45, 0.6]); admissible run "
                   f"bounded by {adm['max_abs']:.3f} up to t={adm['horizon']:g}")


def test_criterion_12_determinism(tmp_path):
    identical = []
    for name in shipped_configs():
        exp = json.loads(config_dir().joinpath(f"{name}.json").read_text())["experiment"]
        runs = []
        for k in range(2):
            out = tmp_path / f"{name}-{k}"
            code = main([exp, "--config", name, "--out", str(out)])
            files = {p.relative_to(out): p.read_bytes() for p in sorted(out.rglob("*.*"))}
            runs.append((code, files))
        identical.append(runs[0] == runs[1] and bool(runs[0][1]))
    ok = all(identical)
    record(12, ok, f"{sum(identical)}/{len(identical)} shipped configs byte-identical across runs")
