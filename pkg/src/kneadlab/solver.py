"""Parameter solvers for critical relations and the marked-orbit builder."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    Diverged,
    InvalidFamily,
    KneadlabError,
    MonotonicityViolation,
    NoRoot,
    NotRealized,
    OrbitEscaped,
    OrbitNotFinite,
    PeriodCollision,
    SingularJacobian,
    TangentOrbit,
)
from .families import Family, Side, SidedPoint, critical_data
from .kneading import MAX_ORBIT, KneadingSequence, Order, kneading, mt_compare

ORBIT_TOL = 1e-9
FLAT_ORBIT_TOL = 1e-7
RESIDUAL_TOL = 1e-12


def default_tol(family: Family) -> float:
    return FLAT_ORBIT_TOL if family.kind in ("FlatExp", "LorenzFlat") else ORBIT_TOL


def _wrap(d: float, circle: bool) -> float:
    if circle:
        return d - round(d)
    return d


# ---------------------------------------------------------------------------
# marked orbits


@dataclass(frozen=True)
class CriticalRelation:
    """Either ``first`` (g^q hits the marked point mu) or ``second`` (g^q = g^l)."""

    kind: str
    q: int
    mu: Optional[int] = None
    l: Optional[int] = None


@dataclass(frozen=True)
class MarkedOrbit:
    """Finite invariant set P with its combinatorics.

    Indices j follow the marked convention (first-kind relations first);
    ``order[j]`` is the index of that critical point in ``critical_data``.
    ``points[j][i]`` is c_{i,j} for 0 <= i <= q_j, so the last entry repeats
    the point the orbit closes on.  ``dg[j][i]`` is Dg(c_{i,j}) (entry 0 is
    unused).  ``shifts[j][i]`` is the integer dropped when reducing the image
    of c_{i,j} mod 1 (circle maps only).
    """

    family: Family
    params: tuple
    order: tuple
    points: tuple
    relations: tuple
    dg: tuple
    shifts: tuple

    @property
    def nu(self) -> int:
        return len(self.relations)

    @property
    def r(self) -> int:
        return sum(1 for rel in self.relations if rel.kind == "first")

    def q(self, j: int) -> int:
        return self.relations[j].q

    def crit(self, j: int) -> SidedPoint:
        return self.points[j][0]

    def Dg_n(self, j: int, n: int, start: int = 1) -> float:
        """Dg^n at c_{start,j}: product of Dg(c_{i,j}) for start <= i < start+n."""
        out = 1.0
        for i in range(start, start + n):
            out *= self.dg[j][i]
        return out

    def c1(self) -> np.ndarray:
        """Critical values c_{1,j} in the deformation's own coordinate order."""
        w = np.zeros(self.nu, dtype=complex)
        for j, oj in enumerate(self.order):
            w[oj] = self.points[j][1].value + self.shifts[j][0]
        return w

    def word(self, j: int = 0) -> str:
        ref = self.points[j][0].value
        syms = []
        for x in self.points[j][1:]:
            d = x.value - ref
            syms.append("0" if abs(d) <= 1e-12 else ("+" if d > 0 else "-"))
        return "".join(syms)

    def summary(self) -> dict:
        rels = []
        for j, rel in enumerate(self.relations):
            d = {"j": j + 1, "kind": rel.kind, "q": rel.q}
            if rel.kind == "first":
                d["mu"] = rel.mu + 1
            else:
                d["l"] = rel.l
            rels.append(d)
        return {"nu": self.nu, "r": self.r, "relations": rels}


def _dist(x: float, y: float, circle: bool) -> float:
    return abs(_wrap(x - y, circle))


def marked_orbit(family: Family, params, tol: Optional[float] = None) -> MarkedOrbit:
    """Follow every critical orbit until it closes and record the combinatorics."""
    p = family.check_params(params)
    tol = default_tol(family) if tol is None else tol
    crit = critical_data(family, p)
    circle = family.circle
    lo, hi = family.bounds(p)
    raw = []
    for j, cp in enumerate(crit):
        pts = [cp.point]
        dg = [0.0]
        shifts = []
        x = cp.point
        rel = None
        for k in range(1, MAX_ORBIT + 1):
            y_lift = family.lift_value(p, x.value, x.side)
            y = family.value(p, x.value, x.side)
            if not math.isfinite(y) or (not circle and not (lo <= y <= hi)):
                raise OrbitEscaped(f"critical orbit {j} escaped at step {k}")
            shifts.append(int(round(y_lift - y)))
            hits = [m for m, cm in enumerate(crit) if _dist(y, cm.point.value, circle) <= tol]
            if hits:
                mu = j if j in hits else hits[0]
                pts.append(crit[mu].point)
                rel = CriticalRelation("first", k, mu=mu)
                break
            back = [i for i in range(1, k) if _dist(y, pts[i].value, circle) <= tol]
            if back:
                pts.append(pts[back[0]])
                rel = CriticalRelation("second", k, l=back[0])
                break
            yp = SidedPoint(float(y))
            der = family.deriv(p, y, Side.TWO)
            if abs(der) < tol:
                raise TangentOrbit(f"|Dg| = {abs(der):.2e} at c_({k},{j + 1})")
            if not math.isfinite(der):
                raise OrbitEscaped("derivative overflow along the critical orbit")
            pts.append(yp)
            dg.append(der)
            x = yp
        if rel is None:
            raise OrbitNotFinite(f"critical orbit {j} did not close within {MAX_ORBIT} steps")
        raw.append((j, tuple(pts), rel, tuple(dg), tuple(shifts)))

    order = [item[0] for item in raw if item[2].kind == "first"] + [item[0] for item in raw if item[2].kind == "second"]
    pos = {orig: new for new, orig in enumerate(order)}
    points, relations, dgs, shifts = [], [], [], []
    for orig in order:
        _, pts, rel, dg, sh = raw[orig]
        if rel.kind == "first":
            rel = CriticalRelation("first", rel.q, mu=pos[rel.mu])
        points.append(pts)
        relations.append(rel)
        dgs.append(dg)
        shifts.append(sh)
    return MarkedOrbit(family, tuple(float(x) for x in p), tuple(order), tuple(points), tuple(relations),
                       tuple(dgs), tuple(shifts))


# ---------------------------------------------------------------------------
# one-parameter superstable solving


def _single_crit(family: Family, params) -> float:
    crit = critical_data(family, params)
    if len(crit) != 1 or family.param_dim != 1:
        raise InvalidFamily("1D solving needs a one-parameter unimodal family")
    return crit[0].point.value


def _orbit_with_dc(family: Family, c: float, x0: float, n: int):
    """f_c^k(x0) for k = 0..n together with d/dc f_c^n(x0)."""
    p = np.array([c])
    y, dy = x0, 0.0
    ys = [y]
    for _ in range(n):
        dy = family.deriv(p, y, Side.TWO) * dy + family.dparam(p, y, Side.TWO)[0]
        y = family.value(p, y, Side.TWO)
        ys.append(y)
    return ys, dy


def _proper_divisors(q: int) -> list[int]:
    return [d for d in range(1, q) if q % d == 0]


def _grid_values(family: Family, q: int, grid: np.ndarray, x0: float) -> np.ndarray:
    y = np.full_like(grid, x0)
    with np.errstate(all="ignore"):
        for _ in range(q):
            y = family.value_vec(grid, y)
    return y - x0


def _refine_root(family: Family, q: int, a: float, b: float, x0: float) -> tuple[float, bool]:
    def F(c):
        y = x0
        for _ in range(q):
            y = family.value(np.array([c]), y, Side.TWO)
        return y - x0

    c = brentq(F, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    ys, dy = _orbit_with_dc(family, c, x0, q)
    scale = max(1.0, abs(c) * abs(dy))
    ok_res = abs(ys[q] - x0) <= RESIDUAL_TOL * scale
    minimal = all(abs(ys[d] - x0) > ORBIT_TOL * scale for d in _proper_divisors(q))
    return c, ok_res and minimal


def superstable_roots(family: Family, q: int, bracket: Sequence[float], subintervals: int = 10_000) -> list[float]:
    """All parameters in ``bracket`` (found on the grid) with a superstable
    critical cycle of minimal period exactly q."""
    if q < 1 or q > 64:
        raise ValueError("q must be in 1..64")
    lo, hi = map(float, bracket)
    x0 = _single_crit(family, [0.5 * (lo + hi)])
    grid = np.linspace(lo, hi, subintervals + 1)
    vals = _grid_values(family, q, grid, x0)
    roots = []
    for i in range(subintervals):
        fa, fb = vals[i], vals[i + 1]
        if not (np.isfinite(fa) and np.isfinite(fb)):
            continue
        if fa == 0:
            cands = [(grid[i], True)]
            ys, dy = _orbit_with_dc(family, grid[i], x0, q)
            scale = max(1.0, abs(grid[i] * dy))
            cands = [(grid[i], all(abs(ys[d] - x0) > ORBIT_TOL * scale for d in _proper_divisors(q)))]
        elif fa * fb < 0:
            cands = [_refine_root(family, q, grid[i], grid[i + 1], x0)]
        else:
            continue
        for c, ok in cands:
            if ok and (not roots or abs(c - roots[-1]) > 1e-13):
                roots.append(c)
    return roots


def solve_superstable_1d(family: Family, q: int, bracket: Sequence[float], subintervals: int = 10_000) -> float:
    """Leftmost parameter in ``bracket`` whose critical point has minimal period q."""
    lo, hi = map(float, bracket)
    x0 = _single_crit(family, [0.5 * (lo + hi)])
    vals = _grid_values(family, q, np.linspace(lo, hi, subintervals + 1), x0)
    finite = vals[np.isfinite(vals)]
    if not (np.any(finite == 0) or np.any(np.sign(finite[:-1]) * np.sign(finite[1:]) < 0)):
        raise NoRoot(f"no sign change of f^{q}(crit) - crit on {bracket}")
    roots = superstable_roots(family, q, bracket, subintervals)
    if not roots:
        raise PeriodCollision(f"every root in {bracket} has a smaller minimal period than {q}")
    return roots[0]


def solve_word(family: Family, word, bracket: Sequence[float], max_iter: int = 200) -> float:
    """Parameter whose kneading word equals ``word`` (which must end in 0)."""
    target = word if isinstance(word, KneadingSequence) else KneadingSequence.parse(word)
    if not target.symbols or target.symbols[-1] != 0:
        raise ValueError("solve_word needs a superstable word ending in 0")
    n = len(target)
    lo, hi = map(float, bracket)

    def cmp(c, delta=0.0):
        return mt_compare(kneading(family, [c], n, delta), target)

    c_lo, c_hi = cmp(lo, 1e-15), cmp(hi, 1e-15)
    if c_lo == Order.EQUAL:
        return lo
    if c_hi == Order.EQUAL:
        return hi
    if {c_lo, c_hi} != {Order.LESS, Order.GREATER}:
        raise NotRealized(f"word {target} is not bracketed by {bracket} ({c_lo.value}, {c_hi.value})")
    increasing = c_lo == Order.LESS
    width = hi - lo
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        c = cmp(mid)
        if c == Order.EQUAL:
            lo = hi = mid
            break
        if c == Order.UNDECIDED:
            raise MonotonicityViolation(f"undecided comparison at {mid}")
        if (c == Order.LESS) == increasing:
            lo = mid
        else:
            hi = mid
        if hi - lo > width:
            raise MonotonicityViolation("bracket failed to shrink")
        width = hi - lo
    x0 = _single_crit(family, [lo])
    c_star = 0.5 * (lo + hi)
    if lo != hi:
        try:
            c_star, _ = _refine_root(family, n, lo, hi, x0)
        except ValueError:
            pass
    got = kneading(family, [c_star], n)
    if got.symbols != target.symbols:
        raise NotRealized(f"bisection converged to {c_star} with word {got}, wanted {target}")
    return c_star


# ---------------------------------------------------------------------------
# two-parameter solving


@dataclass(frozen=True)
class Relation:
    """g^q(c_crit) = c_target (target defaults to crit itself)."""

    crit: int
    q: int
    target: Optional[int] = None


def relation_residual(family: Family, params, relations: Sequence[Relation]) -> np.ndarray:
    p = family.check_params(params)
    crit = critical_data(family, p)
    out = []
    for rel in relations:
        x = crit[rel.crit].point
        y, side = x.value, x.side
        for _ in range(rel.q):
            y = family.value(p, y, side)
            side = Side.TWO
        tgt = crit[rel.crit if rel.target is None else rel.target].point.value
        out.append(_wrap(y - tgt, family.circle))
    return np.array(out)


@dataclass
class Solve2DResult:
    params: np.ndarray
    residual: float
    iterations: int


def _fd_jacobian(fun, x: np.ndarray) -> np.ndarray:
    n = len(x)
    J = np.zeros((n, n))
    for k in range(n):
        h = 1e-6 * (1 + abs(x[k]))
        e = np.zeros(n)
        e[k] = h
        J[:, k] = (fun(x + e) - fun(x - e)) / (2 * h)
    return J


def solve_2d(family: Family, relations: Sequence[Relation], initial, tol: float = 1e-10,
             max_steps: int = 200) -> Solve2DResult:
    """Damped Newton with a central-difference Jacobian."""
    if family.param_dim != 2 or len(relations) != 2:
        raise InvalidFamily("solve_2d needs a two-parameter family and two relations")

    def fun(x):
        return relation_residual(family, x, relations)

    def norm_at(x):
        try:
            return float(np.linalg.norm(fun(x), np.inf))
        except (InvalidFamily, KneadlabError, ValueError, OverflowError):
            return math.inf

    x = family.check_params(initial).astype(float)
    res = norm_at(x)
    polish = 0
    for it in range(1, max_steps + 1):
        try:
            J = _fd_jacobian(fun, x)
        except (KneadlabError, ValueError):
            raise Diverged("Jacobian evaluation left the parameter region")
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > 1e12:
            raise SingularJacobian(f"condition number {np.linalg.cond(J):.3e}")
        step = -np.linalg.solve(J, fun(x))
        lam = 1.0
        for _ in range(40):
            trial = x + lam * step
            r = norm_at(trial)
            if r < res:
                break
            lam *= 0.5
        else:
            if res <= tol:
                return Solve2DResult(x, res, it)
            raise Diverged(f"damping could not reduce the residual {res:.3e}")
        x, res = trial, r
        if res <= tol:
            polish += 1
            if polish >= 2 or res == 0:
                return Solve2DResult(x, res, it)
    if res <= tol:
        return Solve2DResult(x, res, max_steps)
    raise Diverged(f"no convergence after {max_steps} damped steps (residual {res:.3e})")


def scan_seeds_2d(family: Family, relations: Sequence[Relation], box, n: int = 40, keep: int = 8) -> list[np.ndarray]:
    """Grid points with the smallest relation residual, used as Newton seeds."""
    (a0, a1), (b0, b1) = box
    cands = []
    for a in np.linspace(a0, a1, n):
        for b in np.linspace(b0, b1, n):
            try:
                r = float(np.linalg.norm(relation_residual(family, [a, b], relations), np.inf))
            except (KneadlabError, ValueError, OverflowError):
                continue
            if math.isfinite(r):
                cands.append((r, a, b))
    cands.sort()
    return [np.array([a, b]) for _, a, b in cands[:keep]]


def solve_2d_from_scan(family: Family, relations: Sequence[Relation], box, n: int = 40, tol: float = 1e-10) -> Solve2DResult:
    last = None
    for seed in scan_seeds_2d(family, relations, box, n):
        try:
            return solve_2d(family, relations, seed, tol)
        except (Diverged, SingularJacobian, InvalidFamily) as exc:
            last = exc
    raise Diverged(f"no seed converged ({last})")
