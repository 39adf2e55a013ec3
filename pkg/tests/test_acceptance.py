"""Acceptance suite: ten numbered criteria, one PASS/FAIL line each.

Run under pytest (the lines are written straight to the terminal) or as a
script: ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from kneadlab.families import LorenzAffine, PowerLaw, flat_beta, make_family
from kneadlab.kneading import Order, scan
from kneadlab.motionlab import (
    R_residual,
    iterate_lifts,
    lift_derivative,
    lift_motion,
    sector_lift_experiment,
    make_motion,
    odd_constants,
    separation_check,
)
from kneadlab.plmaps import (
    PLSpec,
    pl_ergodic,
    pl_from_values,
    pl_markov_matrix,
    tent_spec,
)
from kneadlab.solver import Relation, marked_orbit, solve_2d_from_scan, solve_superstable_1d, solve_word, superstable_roots
from kneadlab.transfer import build_A, char_identity_check
from kneadlab.transversality import fd_trans_identity, positively_oriented, trans_sum

PHI = (1 + 5 ** 0.5) / 2
QUAD = make_family("quad")
LORENZ_BOX = [(1.05, 2.0), (-0.9, 0.9)]


def _disk(n, seed):
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0, 1, n))
    r[0] = 1.0  # one sample on the boundary circle
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, n))


# number of real superstable parameters of minimal period q = 1..10
REAL_CENTERS = [1, 1, 1, 2, 3, 5, 9, 16, 28, 51]


def _quad_roots(max_q=10):
    # 1e5 cells: at 1e4 three period-10 pairs near c = -2 share a cell
    return [(q, c) for q in range(1, max_q + 1) for c in superstable_roots(QUAD, q, (-2.0, 0.25), 100_000)]


def _lorenz(rel):
    fam = LorenzAffine()
    res = solve_2d_from_scan(fam, rel, LORENZ_BOX, n=60)
    return marked_orbit(fam, res.params)


# ---------------------------------------------------------------------------
# criteria; each returns (ok, one-line detail)


def criterion_1():
    roots = _quad_roots()
    worst_sum, worst_fd = math.inf, 0.0
    for q, c in roots:
        s = trans_sum(marked_orbit(QUAD, [c]))
        worst_sum = min(worst_sum, s)
        worst_fd = max(worst_fd, abs(fd_trans_identity(QUAD, c, q) - s) / abs(s))
    a0 = trans_sum(marked_orbit(QUAD, [0.0]))
    a1 = trans_sum(marked_orbit(QUAD, [-1.0]))
    counts = [sum(1 for q, _ in roots if q == k) for k in range(1, 11)]
    ok = worst_sum > 0 and worst_fd <= 1e-6 and a0 == 1.0 and abs(a1 - 0.5) <= 1e-15 and counts == REAL_CENTERS
    return ok, f"{len(roots)} roots, min trans_sum {worst_sum:.3e}, max FD rel err {worst_fd:.2e}, anchors {a0}, {a1}"


def criterion_2():
    c3 = solve_superstable_1d(QUAD, 3, (-2.0, 0.0))
    fixtures = {
        "c=-1": marked_orbit(QUAD, [-1.0]),
        "c=-1.754878": marked_orbit(QUAD, [c3]),
        "c=-2": marked_orbit(QUAD, [-2.0]),
        "tent phi": marked_orbit(make_family("tent"), [PHI - 1.0]),
        "lorenz (2,3)": _lorenz((Relation(0, 2), Relation(1, 3))),
    }
    worst = 0.0
    for n, orbit in enumerate(fixtures.values()):
        out = char_identity_check(orbit, None, _disk(20, 100 + n))
        worst = max(worst, out["max_dev_AJ"])
    return worst <= 1e-9, f"max |det(I - rho A_J) - det D(rho)| = {worst:.2e} over {len(fixtures)} fixtures"


def criterion_3():
    rq = max(build_A(marked_orbit(QUAD, [c])).spectral_radius for _, c in _quad_roots(8))
    others = [
        _lorenz((Relation(0, 2), Relation(1, 3))),
        _lorenz((Relation(0, 3), Relation(1, 4))),
        marked_orbit(make_family("tent"), [PHI - 1.0]),
        marked_orbit(make_family("tent"), [1.0]),
    ]
    sp = pl_from_values(1, 2, (1, 1, 1), (0.5, -0.5))
    others.append(marked_orbit(sp.family(), list(sp.v)))
    ro, gap = 0.0, math.inf
    for orbit in others:
        A = build_A(orbit)
        ro = max(ro, A.spectral_radius)
        gap = min(gap, float(np.abs(A.eigenvalues - 1.0).min()))
    ok = rq <= 1 - 1e-6 and ro <= 1 + 1e-9 and gap > 1e-6
    return ok, f"quadratic rho <= {rq:.6f}; Lorenz/tent/PL rho <= {ro:.6f}, min |lambda - 1| = {gap:.3e}"


def criterion_4():
    col_err, rate_err = 0.0, 0.0
    for q, c in _quad_roots(5):
        orbit = marked_orbit(QUAD, [c])
        A = build_A(orbit)
        m = make_motion(orbit, 0.01, seed=q)
        col_err = max(col_err, float(np.abs(lift_derivative(lift_motion(m, orbit)) - A.matrix @ lift_derivative(m)).max()))
        _, rate = iterate_lifts(m, orbit, 40)
        rate_err = max(rate_err, abs(rate - A.spectral_radius))
    return col_err <= 1e-6 and rate_err <= 0.05, f"max column error {col_err:.2e}, max |rate - rho| = {rate_err:.4f}"


def criterion_5():
    recs = scan(QUAD, -2.0, 0.25, 2001, 40)
    greater = sum(r.compare_to_prev == Order.GREATER.value for r in recs)
    undecided = sum(r.compare_to_prev == Order.UNDECIDED.value for r in recs)
    return greater == 0, f"{len(recs)} points, {greater} decreases, {undecided} undecided prefixes"


def criterion_6():
    worst_res, worst_margin = 0.0, math.inf
    for ell in range(3, 32, 2):
        theta, R, margin = odd_constants(ell)
        worst_res = max(worst_res, abs(R_residual(R, ell)))
        worst_margin = min(worst_margin, margin)
    theta3, R3, _ = odd_constants(3)
    lhs = 2 * R3 * math.cos(theta3 / 9)
    rhs = 2 ** 0.5 + 2 ** (1 / 6)
    ok = worst_res <= 1e-13 and worst_margin > 0 and lhs > 2.61 and rhs < 2.54
    return ok, f"max residual {worst_res:.1e}, min margin {worst_margin:.4f}, ell=3: {lhs:.4f} > 2.61, {rhs:.4f} < 2.54"


def criterion_7():
    fam = make_family("flat")
    beta = flat_beta(1.0, 6.0)
    res = abs(2 * beta * math.exp(1 / beta) - 6.0)
    slope = fam.deriv(np.array([-beta]), beta)
    sep, rep = separation_check(fam)
    good = []
    for q in range(2, 7):
        for c in superstable_roots(fam, q, (-beta, -1e-9)):
            s = trans_sum(marked_orbit(fam, [c]))
            if s > 0:
                good.append((q, c, s))
    ok = res <= 1e-12 and slope > 2 and sep and 2 * rep["x0"] < rep["R"] < rep["b"] and bool(good)
    first = f"q={good[0][0]} c={good[0][1]:.6f} sum={good[0][2]:.4f}" if good else "none"
    return ok, f"beta={beta:.6f} (res {res:.1e}), slope {slope:.4f}, R={rep['R']:.4f}, superstable: {first}"


def criterion_8():
    fam = make_family("sin")
    a1 = solve_superstable_1d(fam, 1, (0.1, 3.1))
    s1 = trans_sum(marked_orbit(fam, [a1]))
    a2 = solve_superstable_1d(fam, 2, (1.6, 3.1))
    s2 = trans_sum(marked_orbit(fam, [a2]))
    ok = abs(a1 - math.pi / 2) <= 1e-12 and abs(s1 - 1.0) <= 1e-12 and abs(a2 * math.sin(a2) - math.pi / 2) <= 1e-12 and s2 > 0
    return ok, f"a=pi/2 sum {s1:.12f}; a={a2:.10f} sum {s2:.6f}"


def criterion_9():
    specs = [tent_spec(PHI), tent_spec(2.0), pl_from_values(1, 2, (1, 1, 1), (0.5, -0.5)),
             pl_from_values(1, 4, (1, 1, 1.5, 1, 1), (0, -1, 1, 0))]
    round_trip = all(PLSpec.from_json(sp.to_json()) == sp for sp in specs)
    det = max(abs(pl_markov_matrix(sp)["det"]) for sp in specs)
    resid = max(pl_markov_matrix(sp)["residual"] for sp in specs)
    tent = specs[0]
    ergodic = pl_ergodic(tent)
    positive, q = positively_oriented(marked_orbit(tent.family(), list(tent.v)))
    ok = round_trip and ergodic and det <= 1e-9 and resid <= 1e-12 and positive
    return ok, f"round trip {round_trip}, tent phi ergodic {ergodic}, max |det(I - A/s)| {det:.1e}, quotient {q:.4f}"


def criterion_10():
    fam = PowerLaw(60, 60)
    c = solve_word(fam, "-++0", (-(2 ** (1 / 59)), 0.0))
    res = sector_lift_experiment(fam, c, theta=0.05, sigma=1e-3, r_max=0.1, rays=16, radii=24, seed=0)
    ok = res["initial_theta_regular"] and res["all_lifts_theta_regular"] and res["final_half_regular"]
    worst = min(min(s["A1"], s["A2"]) for s in res["lifts"])
    return ok, f"word -++0 (q={res['q']}, c={c:.10f}), {res['minus_symbols']} minus symbol, min margin {worst:.2e}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]
NAMES = ["quadratic transversality", "characteristic identity", "spectral conclusions",
         "lift/operator consistency", "monotonicity scan", "odd-order constants", "flat family",
         "class E sine family", "piecewise-linear suite", "sector lifts at ell=60"]


def _line(n: int):
    t0 = time.perf_counter()
    ok, detail = CRITERIA[n - 1]()
    dt = time.perf_counter() - t0
    ok = ok and dt < 60.0
    return ok, f"[{'PASS' if ok else 'FAIL'}] {n:2d} {NAMES[n - 1]}: {detail} ({dt:.1f} s)"


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n, capsys):
    ok, line = _line(n)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [_line(n) for n in range(1, 11)]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
