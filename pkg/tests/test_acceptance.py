"""The ten acceptance criteria, each at its stated tolerance and runtime budget.

Every test records a PASS/FAIL line (shown under "acceptance criteria" in the
terminal summary) before asserting, so failing criteria still report the
measured numbers.
"""
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

import acceptance_log
from specialstate import catmap, cli, decay, fields, kicks, special
from specialstate.catmap import Box, GrainGrid, TwoTimeProblem
from specialstate.kicks import KickModel

pytestmark = pytest.mark.acceptance


class Checks:
    def __init__(self):
        self.items = []

    def add(self, label, ok, detail=""):
        self.items.append((label, bool(ok), detail))


@contextmanager
def criterion(number, title, budget):
    checks = Checks()
    start = time.perf_counter()
    try:
        yield checks
    finally:
        elapsed = time.perf_counter() - start
        if budget is not None:
            checks.add(f"runtime < {budget:g} s", elapsed < budget, f"{elapsed:.2f} s")
        failed = [c for c in checks.items if not c[1]]
        status = "PASS" if checks.items and not failed else "FAIL"
        parts = "; ".join(f"{'ok' if ok else 'FAILED'} {label} ({detail})" for label, ok, detail in checks.items)
        acceptance_log.LINES[number] = f"[{status}] criterion {number}: {title} | {parts}"
    assert not failed, acceptance_log.LINES[number]


def test_c01_born_ratio():
    with criterion(1, "Born-ratio recovery", 1.0) as c:
        worst = 0.0
        for theta in (0.1, 0.5, 1.0, 2.0, 3.0):
            p = kicks.outcome_probabilities(KickModel(1e-4, theta))
            tan2 = math.tan(theta / 2) ** 2
            worst = max(worst, abs(p.ratio - tan2) / tan2)
        c.add("relative error <= 1e-4", worst <= 1e-4, f"max {worst:.2e}")


def test_c02_conditional_expectations():
    with criterion(2, "conditional expectations, closed form vs series", 10.0) as c:
        thetas = np.linspace(0.15, 3.0, 10)
        err_up = err_down = 0.0
        for theta in thetas:
            m = KickModel(1e-6, float(theta), 1_000_000)
            up_s, down_s = kicks.conditional_kick_expectation(m, "series")
            up_c, down_c = kicks.conditional_kick_expectation(m, "closed")
            err_up = max(err_up, abs(up_s - up_c))
            err_down = max(err_down, abs(down_s - down_c))
        c.add("UP within 1e-5", err_up <= 1e-5, f"max {err_up:.2e}")
        c.add("DOWN within 1e-5", err_down <= 1e-5, f"max {err_down:.2e}")


def test_c03_angle_optimisation():
    with criterion(3, "entry-angle optimisation", 1.0) as c:
        srt = kicks.optimize_entry_angle("sorted")
        tot = kicks.optimize_entry_angle("total")
        c.add("sorted 48.19 +- 0.1 deg", abs(srt.degrees - 48.19) <= 0.1, f"{srt.degrees:.4f}")
        c.add("total 54.74 +- 0.1 deg", abs(tot.degrees - 54.74) <= 0.1, f"{tot.degrees:.4f}")
        f = lambda deg: abs(float(kicks.angle_objective(math.radians(deg), "total")))
        c.add("local minimum at 90 deg", f(90) < f(85) and f(90) < f(95),
              f"{f(85):.4f} > {f(90):.4f} < {f(95):.4f}")


def test_c04_non_self_averaging():
    with criterion(4, "non-self-averaging of Cauchy means", 30.0) as c:
        cau = kicks.self_averaging_test(0.01, 100, 10_000, seed=2024)
        gau = kicks.self_averaging_test(0.01, 100, 10_000, seed=2024, distribution="gaussian")
        c.add("Cauchy KS passes at 1%", cau.passed, f"p={cau.pvalue:.3f}")
        c.add("Gaussian control fails", not gau.passed, f"p={gau.pvalue:.1e}")


def test_c05_cotangent_identity():
    with criterion(5, "cotangent identity and wrapped sum", 10.0) as c:
        worst = 0.0
        for zr, zi in ((math.pi / 2, 0.0), (1.0, 0.1), (0.3, 0.5), (2.5, 0.01), (-1.2, 1.0)):
            z = complex(zr, zi)
            s = kicks.cot_partial_sum(z, 1_000_000)
            exact = 1 / np.tan(z)
            worst = max(worst, abs(s.real - exact.real), abs(s.imag - exact.imag))
        c.add("real/imag parts within 1e-6", worst <= 1e-6, f"max {worst:.2e}")
        werr = 0.0
        for a in (1e-3, 0.1, 0.5):
            for psi in (0.0, 0.4, 1.3, 2.8):
                num = kicks.wrapped_sum_numeric(a, psi, 10_000)
                werr = max(werr, abs(num - float(kicks.wrapped_sum_closed(a, psi))))
        c.add("wrapped sum within 1e-10", werr <= 1e-10, f"max {werr:.2e}")


def test_c06_special_states():
    with criterion(6, "special states on the t0=16 preset", 30.0) as c:
        cfg = special.multilevel_model()
        s = special.special_states(cfg, 16.0)
        w = s.eigenvalues
        c.add("mean survival in [0.4, 0.6]", 0.4 <= w.mean() <= 0.6, f"{w.mean():.3f}")
        top = special.specialness_trace(cfg, 0, 16.0, [16.0], states=s).values[0]
        bottom = special.specialness_trace(cfg, cfg.n - 1, 16.0, [16.0], states=s).values[0]
        c.add("top S(16) >= 0.9", top >= 0.9, f"{top:.4f}")
        c.add("bottom S(16) <= 0.1", bottom <= 0.1, f"{bottom:.4f}")
        c.add("spectrum in [-1e-10, 1+1e-10]", w.min() >= -1e-10 and w.max() <= 1 + 1e-10,
              f"[{w.min():.3e}, {w.max():.12f}]")
        dev = max(abs(decay.survival_curve(cfg, s.embedded(k), [16.0]).values[0] - w[k])
                  for k in range(cfg.n))
        c.add("S(t0) = eigenvalue within 1e-8", dev <= 1e-8, f"max {dev:.1e}")


def test_c07_decay_phenomenology():
    with criterion(7, "decay phenomenology on the N=100 preset", 30.0) as c:
        m = decay.canonical_model()
        curve = decay.survival_curve(m, decay.excited_state(m), np.linspace(0, 600, 6001))
        d = decay.diagnose(m, curve)
        rel = abs(d.fitted_zeno_time - d.zeno_time) / d.zeno_time
        c.add("Zeno time by fit within 2%", rel <= 0.02, f"{d.fitted_zeno_time:.3f} vs {d.zeno_time:.3f}")
        c.add("log-linear RMS residual < 2%", d.loglinear_rms_residual < 0.02,
              f"{d.loglinear_rms_residual:.4f} on {d.windows['loglinear']}")
        near = abs(d.recurrence_peak_time - d.recurrence_time) <= 0.15 * d.recurrence_time
        c.add("recurrence peak S > 0.5 near 2 pi / spacing",
              d.recurrence_peak_value > 0.5 and near,
              f"S={d.recurrence_peak_value:.3f} at t={d.recurrence_peak_time:.1f}, T_rec={d.recurrence_time:.0f}")


def test_c08_two_time_catmap(frozen):
    with criterion(8, "cat-map two-time experiment", 60.0) as c:
        final = Box(0.4, 0.4, 0.6, 0.5)
        sol = catmap.solve_two_time(TwoTimeProblem(Box.unit(), final, 19, 5000, seed=8))
        se = math.sqrt(final.area * (1 - final.area) / sol.n_candidates)
        dev = abs(sol.acceptance_rate - final.area)
        c.add("acceptance 0.02 within 3 SE", dev <= 3 * se,
              f"{sol.acceptance_rate:.5f}, {dev / se:.2f} SE over {sol.n_candidates} candidates")

        corner = Box(0.0, 0.0, 0.1, 0.1)
        grid = GrainGrid.with_count(100)
        ref = frozen["entropy_multinomial"]
        cons, free = [], []
        for seed in range(20):
            exp = catmap.entropy_experiment(TwoTimeProblem(corner, corner, 19, 250, seed=seed), grid)
            cons.append(exp.constrained)
            free.append(exp.unconstrained)
        cons, free = np.array(cons), np.array(free)
        c.add("constrained S(T) = 0", np.all(cons[:, -1] == 0.0), f"max {cons[:, -1].max():.3g}")
        plateau_dev = np.abs(free[:, -1] - ref["mean"]).max() / ref["sd"]
        c.add("unconstrained S(T) at plateau", plateau_dev < 4,
              f"mean {free[:, -1].mean():.3f} vs {ref['mean']:.3f}, worst {plateau_dev:.1f} sd")
        half = 19 // 2 + 1
        diff = np.abs(cons[:, :half].mean(0) - free[:, :half].mean(0))
        pooled = np.sqrt(cons[:, :half].var(0, ddof=1) / 20 + free[:, :half].var(0, ddof=1) / 20)
        ok = np.all(diff <= 3 * pooled)
        ratio = np.max(np.where(pooled > 0, diff / np.where(pooled > 0, pooled, 1), 0))
        c.add("first-half traces within 3 pooled SE", ok, f"max {ratio:.2f} SE")


def test_c09_field_closed_forms():
    with criterion(9, "field closed forms and estimates", 10.0) as c:
        loop = fields.WireLoop(1.5e-3, 0.035, 10.0)
        ys = [-0.03, -0.012, 0.0, 0.009, 0.025]
        zs = [1e-3, 2e-3, 3e-3, 5e-3, 8e-3]
        e_bz = e_grad = e_bx = 0.0
        for y in ys:
            for z in zs:
                R = (0.0, y, z)
                B = fields.biot_savart_quadrature(loop, R, pieces=("T", "B"))
                G = fields.biot_savart_gradient_x(loop, R, pieces=("T", "B"))
                BL = fields.biot_savart_quadrature(loop, R, pieces=("L",))
                bz = fields.straight_wire_field(loop, y, z)[2]
                gx = fields.straight_wire_gradient_x(loop, y, z)[0]
                bx = fields.semicircle_bx(loop, y + loop.L / 2, z)
                e_bz = max(e_bz, abs(B[2] - bz) / abs(bz))
                e_grad = max(e_grad, abs(G[0] - gx) / abs(gx))
                e_bx = max(e_bx, abs(BL[0] - bx) / abs(bx))
        c.add("straight-wire Bz <= 1e-6 rel", e_bz <= 1e-6, f"{e_bz:.1e}")
        c.add("x-gradient <= 1e-6 rel", e_grad <= 1e-6, f"{e_grad:.1e}")
        c.add("semicircle Bx <= 1e-6 rel", e_bx <= 1e-6, f"{e_bx:.1e}")
        s_star, value = fields.bracket_maximum(np.linspace(0.05, 3.0, 60))
        c.add("bracket max 0.5 +- 5%", abs(value - 0.5) <= 0.025, f"{value:.4f}")
        c.add("at s/z 0.75 +- 10%", abs(s_star - 0.75) <= 0.075, f"{s_star:.4f}")
        ratio = fields.HBAR / fields.BOHR_MAGNETON
        c.add("hbar/mu_B = 1.14e-11 T s", round(ratio, 13) == 1.14e-11, f"{ratio:.4e}")


SUBCOMMANDS = [
    ["decay", "--preset", "fig1"],
    ["special", "--preset", "fig2"],
    ["catmap", "--preset", "fig3-5"],
    ["catmap", "--preset", "fig6"],
    ["kicks", "--preset", "angle-scan"],
    ["kicks", "expectation"],
    ["kicks", "selfavg"],
    ["kicks", "optimize", "--mode", "total"],
    ["fields", "--preset", "field-profile"],
]


def test_c10_determinism(tmp_path):
    with criterion(10, "byte-identical reruns across parallelism", None) as c:
        for args in SUBCOMMANDS:
            runs = []
            for i, workers in enumerate((1, 1, 4)):
                d = tmp_path / f"{'_'.join(args)}_{i}"
                code = cli.main([*args, "--seed", "7", "--workers", str(workers), "--out", str(d)])
                runs.append({p.name: p.read_bytes() for p in d.iterdir()} if code == 0 else None)
            ok = runs[0] is not None and runs[0] == runs[1] == runs[2]
            c.add(" ".join(args), ok, f"{len(runs[0] or {})} files")
