"""Holomorphic motions of finite orbits sampled on a polar grid, their lifts,
and the sector / separation predicates used to study them."""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from .errors import (
    BranchJump,
    DivergenceDetected,
    GeometryFailed,
    HypothesisViolated,
    InjectivityLost,
    KneadlabError,
    NoRootInBracket,
    SingularLift,
    TargetHitSingularValue,
)
from .families import Deformation, Family, Side, SidedPoint, critical_data, flat_beta
from .solver import MarkedOrbit
from .transfer import _same, image_points

DEFAULT_RAYS = 16
DEFAULT_RADII = 24
NOISE_FLOOR = 1e-13


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("KNEADLAB_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class MotionGrid:
    """Values h[point, ray, radius] of a motion at lambda = r e^{2 pi i a / n_rays}.

    ``base`` holds h at lambda = 0, which is the identity on the points.
    """

    points: tuple
    base: np.ndarray
    radii: np.ndarray
    n_rays: int
    values: np.ndarray

    def __post_init__(self):
        for arr in (self.base, self.radii, self.values):
            arr.setflags(write=False)

    @property
    def npts(self) -> int:
        return len(self.points)

    def lambdas(self) -> np.ndarray:
        ang = np.exp(2j * np.pi * np.arange(self.n_rays) / self.n_rays)
        return ang[:, None] * self.radii[None, :]

    def index(self, x: SidedPoint, circle: bool = False) -> int:
        for n, y in enumerate(self.points):
            if _same(x, y, circle):
                return n
        raise KeyError(f"{x!r} is not a point of this motion")

    def min_separation(self) -> float:
        if self.npts < 2:
            return math.inf
        v = self.values
        out = math.inf
        for a in range(self.npts):
            for b in range(a + 1, self.npts):
                if self.points[a].value == self.points[b].value:
                    continue  # one-sided copies of the same real point
                out = min(out, float(np.abs(v[a] - v[b]).min()))
        return out

    def sup_displacement(self) -> float:
        return float(np.abs(self.values - self.base[:, None, None]).max()) if self.npts else 0.0

    def real_axis_imag(self) -> float:
        """max |Im h| over samples with real lambda (rays at angle 0 and pi)."""
        rays = [0] + ([self.n_rays // 2] if self.n_rays % 2 == 0 else [])
        return float(np.abs(self.values[:, rays, :].imag).max())


def _radii(r_max: float, m: int) -> np.ndarray:
    return r_max * np.arange(1, m + 1) / m


def _check_injective(grid: MotionGrid) -> MotionGrid:
    if grid.min_separation() <= 1e-14:
        raise InjectivityLost("two points of the motion collide")
    return grid


def make_motion(points, sigma: float = 0.01, seed: int = 0, rays: int = DEFAULT_RAYS,
                radii: int = DEFAULT_RADII, r_max: float = 0.3, mode: str = "real",
                quadratic: bool = False, v=None) -> MotionGrid:
    """h_lambda(x) = x + lambda v(x) (+ lambda^2 u(x)) with v drawn from a seeded RNG.

    ``points`` is a MarkedOrbit (the motion then lives on g(P)) or a list of
    SidedPoints.  Pass ``v`` explicitly to get a prescribed first-order motion.
    """
    pts = image_points(points)[0] if isinstance(points, MarkedOrbit) else [p for p in points]
    rng = np.random.default_rng(seed)
    n = len(pts)
    if v is None:
        v = rng.uniform(-sigma, sigma, n)
        if mode == "complex":
            v = v + 1j * rng.uniform(-sigma, sigma, n)
    v = np.asarray(v, dtype=complex)
    u = np.zeros(n, dtype=complex)
    if quadratic:
        u = rng.uniform(-sigma, sigma, n).astype(complex)
        if mode == "complex":
            u += 1j * rng.uniform(-sigma, sigma, n)
    base = np.array([p.value for p in pts], dtype=complex)
    rr = _radii(r_max, radii)
    lam = np.exp(2j * np.pi * np.arange(rays) / rays)[:, None] * rr[None, :]
    vals = base[:, None, None] + lam[None] * v[:, None, None] + lam[None] ** 2 * u[:, None, None]
    return _check_injective(MotionGrid(tuple(pts), base, rr, rays, vals))


def identity_motion(points, rays: int = DEFAULT_RAYS, radii: int = DEFAULT_RADII, r_max: float = 0.3) -> MotionGrid:
    return make_motion(points, 0.0, rays=rays, radii=radii, r_max=r_max)


# ---------------------------------------------------------------------------
# lifting


def _newton(defo, w, z, t, anchor, max_iter=60):
    for _ in range(max_iter):
        d = defo.dG_dz(w, z, anchor)
        if abs(d) < 1e-12:
            raise SingularLift(f"|dG/dz| = {abs(d):.2e} near {z}")
        step = (defo.G(w, z, anchor) - t) / d
        z = z - step
        if abs(step) <= 1e-15 * (1.0 + abs(z)):
            break
    d = defo.dG_dz(w, z, anchor)
    if abs(d) < 1e-12:
        raise SingularLift(f"|dG/dz| = {abs(d):.2e} at the solution")
    return z


def _advance(defo, anchor, z, wa, wb, ta, tb, depth, max_refine):
    d = defo.dG_dz(wb, z, anchor)
    pred = (tb - defo.G(wb, z, anchor)) / d if d != 0 else np.inf
    try:
        zn = _newton(defo, wb, z, tb, anchor)
        if abs(zn - z) <= 3.0 * abs(pred) + 1e-13 * (1.0 + abs(z)):
            return zn
    except SingularLift:
        if depth >= max_refine:
            raise
    if depth >= max_refine:
        raise BranchJump(f"continuation jumped at anchor {anchor!r}")
    wm, tm = 0.5 * (wa + wb), 0.5 * (ta + tb)
    zm = _advance(defo, anchor, z, wa, wm, ta, tm, depth + 1, max_refine)
    return _advance(defo, anchor, zm, wm, wb, tm, tb, depth + 1, max_refine)


def _smooth_crit(family: Family, params) -> bool:
    return any(cp.degree is not None for cp in critical_data(family, params))


def _check_target(defo, w, t, anchor):
    for pk in np.atleast_1d(defo.p(w)):
        cv = defo.G(w, pk, anchor)
        if abs(cv - t) <= 1e-13 * (1.0 + abs(t)):
            raise TargetHitSingularValue(f"target {t} equals a critical value")


def lift_motion(motion: MotionGrid, orbit: MarkedOrbit, defo: Optional[Deformation] = None,
                max_refine: int = 10, threads: Optional[int] = None) -> MotionGrid:
    """Lift of a motion of g(P): solve G_{c_1(lambda)}(h^(x)) = h(g(x)) and put
    h^(x) = p(c_1(lambda)) on the marked points.

    Branches are followed by Newton continuation along each ray; PowerLaw
    maps use the closed-form principal power instead.
    """
    fam = orbit.family
    if fam.kind == "PowerLaw":
        return power_lift(motion, fam, orbit.params)
    defo = fam.deformation(orbit.params) if defo is None else defo
    circle = fam.circle
    pts, slot = image_points(orbit)
    if len(pts) != motion.npts:
        raise KneadlabError("motion points do not match g(P)")
    perm = [motion.index(x, circle) for x in pts]  # motion row of each g(P) point
    nu, R, M = orbit.nu, motion.n_rays, len(motion.radii)

    def h(n):  # values with lambda = 0 prepended, shape (R, M+1)
        row = motion.values[perm[n]]
        return np.concatenate([np.full((R, 1), motion.base[perm[n]]), row], axis=1)

    W = np.zeros((nu, R, M + 1), dtype=complex)
    for k in range(nu):
        W[orbit.order[k]] = h(slot[(1, k)]) + (orbit.shifts[k][0] if circle else 0)

    owner = {}
    for (i, j), n in sorted(slot.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        owner.setdefault(n, (i, j))
    smooth = _smooth_crit(fam, orbit.params)

    out = np.zeros((len(pts), R, M), dtype=complex)

    def do_ray(a):
        res = np.zeros((len(pts), M), dtype=complex)
        for n, x in enumerate(pts):
            i, j = owner[n]
            rel = orbit.relations[j]
            if i == rel.q and rel.kind == "first":
                o = orbit.order[rel.mu]
                for m in range(M):
                    res[n, m] = defo.p(W[:, a, m + 1])[o]
                continue
            if i == rel.q:
                i = rel.l
            t = h(slot[(i + 1, j)])[a] + (orbit.shifts[j][i] if circle else 0)
            z = complex(x.value)
            for m in range(M):
                wb = W[:, a, m + 1]
                if smooth:
                    _check_target(defo, wb, t[m + 1], x)
                z = _advance(defo, x, z, W[:, a, m], wb, t[m], t[m + 1], 0, max_refine)
                res[n, m] = z
        return a, res

    nthreads = _threads() if threads is None else threads
    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            results = list(ex.map(do_ray, range(R)))
    else:
        results = [do_ray(a) for a in range(R)]
    for a, res in sorted(results, key=lambda t: t[0]):
        out[:, a, :] = res
    vals = np.empty_like(out)
    for n in range(len(pts)):
        vals[perm[n]] = out[n]
    return _check_injective(MotionGrid(motion.points, motion.base.copy(), motion.radii.copy(), R, vals))


def _principal_root(z: np.ndarray, t: float) -> np.ndarray:
    return np.exp(t * np.log(z.astype(complex)))


def power_lift(motion: MotionGrid, family: Family, params) -> MotionGrid:
    """Closed-form lift for |x|^l- + c / |x|^l+ + c on any point set closed under f.

    h^(0) = 0 and h^(a) = +-(h(f(a)) - h(c_1))^(1/l+-) on the principal branch.
    """
    lm, lp = family.ell_minus, family.ell_plus
    c = float(params[0])
    c1 = motion.index(SidedPoint(c))
    vals = np.zeros_like(motion.values)
    for n, x in enumerate(motion.points):
        a = x.value
        if a == 0.0:
            continue
        fx = motion.index(SidedPoint(family.value([c], a, Side.TWO)))
        diff = motion.values[fx] - motion.values[c1]
        if np.any(np.abs(diff) <= 1e-300):
            raise TargetHitSingularValue(f"h(f({a})) meets h(c_1)")
        if a > 0:
            vals[n] = _principal_root(diff, 1.0 / lp)
        else:
            vals[n] = -_principal_root(diff, 1.0 / lm)
    return _check_injective(MotionGrid(motion.points, motion.base.copy(), motion.radii.copy(), motion.n_rays, vals))


def lift_derivative(motion: MotionGrid) -> np.ndarray:
    """d/dlambda h at 0, by the trapezoid rule for the Cauchy integral on the
    smallest sampled circle (all rays)."""
    r = motion.radii[0]
    phase = np.exp(-2j * np.pi * np.arange(motion.n_rays) / motion.n_rays)
    disp = motion.values[:, :, 0] - motion.base[:, None]
    return (disp * phase[None, :]).mean(axis=1) / r


def iterate_lifts(motion: MotionGrid, orbit: MarkedOrbit, k: int, defo: Optional[Deformation] = None):
    """Successive lifts; returns (d_1..d_k, fitted rate) where d_n is the sup
    distance of the n-th lift to the identity."""
    if k > 200:
        raise ValueError("k must be <= 200")
    defo = orbit.family.deformation(orbit.params) if defo is None and orbit.family.kind != "PowerLaw" else defo
    d = []
    cur = motion
    for n in range(k):
        cur = lift_motion(cur, orbit, defo)
        d.append(cur.sup_displacement())
        if len(d) >= 6 and all(d[-i] >= 2.0 * d[-i - 1] > 0 for i in range(1, 6)):
            raise DivergenceDetected(f"sup distance doubled five times in a row (step {n + 1})")
    return d, decay_rate(d)


def decay_rate(d: Sequence[float]) -> float:
    """exp of the log-linear slope over the tail half, ignoring values at the noise floor."""
    tail = [(n, x) for n, x in enumerate(d) if n >= len(d) // 2 and x > NOISE_FLOOR]
    if len(tail) < 2:
        tail = [(n, x) for n, x in enumerate(d) if x > NOISE_FLOOR][-max(2, len(d) // 2):]
    if len(tail) < 2:
        return 0.0
    n, x = np.array(tail).T
    slope = np.polyfit(n, np.log(x), 1)[0]
    return float(math.exp(slope))


# ---------------------------------------------------------------------------
# sectors


def angle_0z1(z: complex) -> float:
    """Angle at z between the rays towards 0 and towards 1, in [0, pi]."""
    return abs(cmath.phase((0 - z) / (1 - z)))


def in_D(z: complex, theta: float) -> bool:
    return z != 0 and z != 1 and angle_0z1(z) > math.pi - theta


def in_S(z: complex, theta: float) -> bool:
    return z != 0 and abs(cmath.phase(z)) < theta


def schwarz_property(z: complex, t: float, theta: float) -> bool:
    """z in D_theta implies z^t in D_theta (principal branch); vacuous otherwise."""
    if not in_D(z, theta):
        return True
    return in_D(cmath.exp(t * cmath.log(z)), theta)


@dataclass(frozen=True)
class SectorParams:
    theta: float
    ell: float

    def __post_init__(self):
        if not 0 < self.theta < math.pi:
            raise ValueError("theta must lie in (0, pi)")

    @property
    def a1_half_angle(self) -> float:
        return 4.0 * self.theta / self.ell


def theta_regular_check(motion: MotionGrid, sector: SectorParams) -> tuple[bool, dict]:
    """Sector condition on every nonzero point and the D_theta condition on
    same-sign pairs, at every sample.  Margins are the smallest angular slack."""
    half = sector.a1_half_angle
    a1, a2 = math.inf, math.inf
    off1 = off2 = None
    xs = [p.value for p in motion.points]
    for n, x in enumerate(xs):
        if x == 0:
            continue
        h = motion.values[n] if x > 0 else -motion.values[n]
        m = half - float(np.abs(np.angle(h)).max())
        if m < a1:
            a1, off1 = m, x
    for na, a in enumerate(xs):
        for nb, b in enumerate(xs):
            if not (abs(a) > abs(b) > 0 and a * b > 0):
                continue
            z = motion.values[nb] / motion.values[na]
            ang = np.abs(np.angle(-z / (1 - z)))
            m = float(ang.min()) - (math.pi - sector.theta)
            if m < a2:
                a2, off2 = m, (b, a)
    ok = a1 > 0 and a2 > 0
    return ok, {"A1": a1, "A2": a2, "A1_offender": off1, "A2_offender": off2}


# ---------------------------------------------------------------------------
# odd-order constants and admissibility


def odd_constants(ell: int) -> tuple[float, float, float]:
    """(theta_l, R_l, margin of the angle inequality) for an odd integer l >= 3."""
    if int(ell) != ell or ell < 3 or ell % 2 == 0:
        raise ValueError("ell must be an odd integer >= 3")
    ell = int(ell)
    theta = math.pi * ell ** 2 / (2.0 * (ell ** 3 - 1))
    R = solve_R(ell)
    rhs = 2.0 ** (1.0 / (ell - 1)) + 2.0 ** (1.0 / (ell ** 2 - ell))
    margin = 2.0 * R * math.cos(theta / ell ** 2) - rhs
    return theta, R, margin


def R_residual(R: float, ell: int) -> float:
    alpha = math.pi * (ell + 1) / (2.0 * (ell ** 3 - 1))
    return R ** (2 * ell) - R ** 2 - R ** (2.0 / ell) - 2.0 * R ** (1.0 + 1.0 / ell) * math.cos(alpha)


def solve_R(ell: int) -> float:
    f = lambda r: R_residual(r, ell)  # noqa: E731
    if not f(1.0) < 0 < f(2.0):
        raise NoRootInBracket(f"no sign change for R on (1, 2) at ell={ell}")
    r = bisect(f, 1.0, 2.0, xtol=1e-300, rtol=1e-15, maxiter=200)
    # settle on the float with the smallest residual among close neighbours
    cands = [r]
    for direction in (0.0, 3.0):
        x = r
        for _ in range(4):
            x = np.nextafter(x, direction)
            cands.append(float(x))
    return min(cands, key=lambda x: abs(f(x)))


@dataclass(frozen=True)
class OddOrbitData:
    ell: int
    c1: float
    q: int
    w: float
    z1: float
    orbit: tuple  # f^j(0), j = 0..q

    def point_set(self) -> list[SidedPoint]:
        vals = list(self.orbit) + [self.z1, -self.z1]
        out = []
        for v in vals:
            if not any(abs(v - u.value) <= 1e-12 for u in out):
                out.append(SidedPoint(float(v)))
        return out


def odd_orbit_data(family: Family, params, tol: float = 1e-9) -> OddOrbitData:
    """Check the combinatorial hypotheses for |x|^l + c_1 with l odd and
    return the orbit data (w, z_1, P)."""
    if family.kind != "PowerLaw" or family.ell_minus != family.ell_plus:
        raise HypothesisViolated("needs a symmetric PowerLaw family")
    ell = family.ell_minus
    if int(ell) != ell or int(ell) % 2 == 0 or ell < 3:
        raise HypothesisViolated("ell must be an odd integer >= 3")
    c1 = float(params[0])
    if c1 >= 0:
        raise HypothesisViolated("c_1 must be negative")
    orb = [0.0]
    x = 0.0
    for j in range(1, 4097):
        x = family.value([c1], x, Side.TWO)
        if abs(x) <= tol:
            break
        orb.append(x)
    else:
        raise HypothesisViolated("0 is not periodic")
    q = len(orb) - 1
    # orientation reversing fixed point -w: w^l + c_1 = -w
    w = bisect(lambda s: s ** ell + c1 + s, 0.0, abs(c1))
    for j, y in enumerate(orb[1:], start=1):
        if -w - tol <= y < 0:
            raise HypothesisViolated(f"f^{j}(0) = {y} lies in [-w, 0)")
    if len(orb) < 5 or not (orb[2] > orb[3] > orb[4] > 0):
        raise HypothesisViolated("needs c_2 > c_3 > c_4 > 0")
    z1 = abs(orb[q])
    return OddOrbitData(int(ell), c1, q, w, z1, tuple(orb))


def admissible_check(motion: MotionGrid, data: OddOrbitData, eq_tol: float = 1e-12) -> tuple[bool, dict]:
    """Evaluate the eight admissibility predicates; margins > 0 mean satisfied
    (the two equalities in A1 count as satisfied within ``eq_tol``)."""
    ell = data.ell
    theta, R, _ = odd_constants(ell)
    idx = {p.value: n for n, p in enumerate(motion.points)}

    def H(x):
        for v, n in idx.items():
            if abs(v - x) <= 1e-12:
                return motion.values[n]
        raise KeyError(x)

    hz, hmz, h0 = H(data.z1), H(-data.z1), H(0.0)
    c = data.orbit
    m = {}
    m["A1"] = eq_tol - max(float(np.abs(hmz + hz).max()), float(np.abs(h0).max()))
    xs = [p.value for p in motion.points]
    small = [x for x in xs if 0 < x < data.w]
    m["A2"] = min([float((np.abs(hz) - np.abs(H(x))).min()) for x in small], default=math.inf)
    big = [x for x in xs if x > data.w]
    m["A3"] = min([theta - float(np.abs(np.angle(H(x))).max()) for x in big], default=math.inf)
    neg = [x for x in xs if x < -data.w]
    m["A4"] = min([theta - float(np.abs(np.angle(-H(x))).max()) for x in neg], default=math.inf)
    m["A5"] = min(theta / ell ** 2 - float(np.abs(np.angle(-H(c[1]))).max()),
                  theta / ell - float(np.abs(np.angle(H(c[2]))).max()))
    m["A6"] = min(float(np.abs(H(c[1])).min()) - R, float(np.abs(H(c[2])).min()) - R ** (1.0 / ell))
    m["A7"] = 2.0 ** (1.0 / (ell - 1)) - max(float(np.abs(H(x)).max()) for x in xs)
    m["A8"] = 2.0 ** (1.0 / (ell ** 2 - ell)) - float(np.abs(hz).max())
    strict = {"A3", "A4", "A5", "A6"}
    ok = all((v > 0 if k in strict else v >= 0) for k, v in m.items())
    return ok, m


def odd_lift(motion: MotionGrid, family: Family, data: OddOrbitData) -> MotionGrid:
    """Lift on P = orbit + {z_1, -z_1}; the real odd root keeps h(-z_1) = -h(z_1)."""
    return power_lift(motion, family, [data.c1])


# ---------------------------------------------------------------------------
# separation geometry


def separation_check(family: Family, params=None) -> tuple[bool, dict]:
    """Explicit covering data for the separation property.

    PowerUnimodal: the covering is global, nothing to check.  FlatExp and
    LorenzFlat: pick x_0 > beta with f_{-beta}(x_0) = x_1 and
    x_1 - beta > 2 (x_0 - beta), set R = f_0(x_0) = x_1 + beta and check
    2 x_0 < R < b.
    """
    if family.kind == "PowerUnimodal":
        return True, {"kind": family.kind, "covering": "global"}
    if family.kind not in ("FlatExp", "LorenzFlat"):
        raise GeometryFailed(f"no separation recipe for {family.kind}")
    ell, b = family.ell, family.b
    beta = flat_beta(ell, b)
    core = lambda x: b * math.exp(-(x ** -ell))  # noqa: E731
    x0 = None
    delta = 0.5 * beta
    for _ in range(60):
        cand = beta + delta
        x1 = core(cand) - beta
        if x1 - beta > 2.0 * (cand - beta) and x1 + beta < b:
            x0 = cand
            break
        delta *= 0.5
    if x0 is None:
        raise GeometryFailed("no x_0 satisfies the doubling condition")
    x1 = core(x0) - beta
    R = core(x0)
    rep = {"kind": family.kind, "beta": beta, "x0": x0, "x1": x1, "R": R, "b": b,
           "diam_U": 2.0 * x0, "slope_at_beta": 2.0 * ell / beta ** ell}
    if not abs(R - (x1 + beta)) <= 1e-12 * R:
        raise GeometryFailed("R != x_1 + beta")
    if not 2.0 * x0 < R:
        raise GeometryFailed(f"diam U = {2 * x0} is not below R = {R}")
    if not R < b:
        raise GeometryFailed(f"R = {R} is not below b = {b}")
    return True, rep


# ---------------------------------------------------------------------------
# sector lifts at high even order


def sector_lift_experiment(family: Family, c: float, theta: float = 0.05, sigma: float = 1e-3,
                          r_max: float = 0.1, rays: int = DEFAULT_RAYS, radii: int = DEFAULT_RADII,
                          seed: int = 0) -> dict:
    """Lift a small theta-regular motion of P = orbit of 0 q times and record
    whether every lift is theta-regular and the q-th is theta/2-regular."""
    from .solver import marked_orbit

    orbit = marked_orbit(family, [c])
    rel = orbit.relations[0]
    if rel.kind != "first":
        raise HypothesisViolated("needs a superstable parameter")
    q = rel.q
    pts = [orbit.points[0][0]] + list(orbit.points[0][1:q])
    motion = make_motion(pts, sigma, seed, rays, radii, r_max, mode="complex")
    # keep 0 fixed: the critical point does not move
    vals = motion.values.copy()
    vals[0] = 0.0
    motion = MotionGrid(motion.points, motion.base.copy(), motion.radii.copy(), rays, vals)
    sec = SectorParams(theta, family.ell)
    ok0, m0 = theta_regular_check(motion, sec)
    steps = []
    cur = motion
    all_ok = True
    for n in range(1, q + 1):
        cur = power_lift(cur, family, [c])
        ok, marg = theta_regular_check(cur, sec)
        steps.append({"lift": n, "theta_regular": ok, **marg})
        all_ok = all_ok and ok
    half_ok, half_m = theta_regular_check(cur, SectorParams(theta / 2.0, family.ell))
    minus = sum(1 for x in pts[1:] if x.value < 0)
    return {
        "q": q, "c": c, "minus_symbols": minus, "initial_theta_regular": ok0, "initial": m0,
        "lifts": steps, "all_lifts_theta_regular": all_ok, "final_half_regular": half_ok,
        "final_half": half_m, "ell": family.ell, "theta": theta, "r_max": r_max,
    }


# ---------------------------------------------------------------------------
# serialization


def motion_to_json(m: MotionGrid) -> dict:
    side = {Side.MINUS: "-", Side.PLUS: "+", Side.TWO: ""}
    return {
        "points": [{"x": float(p.value), "side": side[p.side]} for p in m.points],
        "rays": m.n_rays,
        "radii": m.radii.tolist(),
        "re": m.values.real.tolist(),
        "im": m.values.imag.tolist(),
    }


def motion_from_json(obj: dict) -> MotionGrid:
    side = {"-": Side.MINUS, "+": Side.PLUS, "": Side.TWO}
    pts = tuple(SidedPoint(float(p["x"]), side[p.get("side", "")]) for p in obj["points"])
    vals = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    base = np.array([p.value for p in pts], dtype=complex)
    return MotionGrid(pts, base, np.asarray(obj["radii"], dtype=float), int(obj["rays"]), vals)


def odd_motion(data: OddOrbitData, sigma: float = 1e-3, seed: int = 0, rays: int = DEFAULT_RAYS,
               radii: int = DEFAULT_RADII, r_max: float = 0.1) -> MotionGrid:
    """Random complex motion of P with h(0) = 0 and h(-z_1) = -h(z_1)."""
    m = make_motion(data.point_set(), sigma, seed, rays, radii, r_max, mode="complex")
    xs = [p.value for p in m.points]
    vals = m.values.copy()
    iz = next(n for n, x in enumerate(xs) if abs(x - data.z1) <= 1e-12)
    imz = next(n for n, x in enumerate(xs) if abs(x + data.z1) <= 1e-12)
    vals[xs.index(0.0)] = 0.0
    vals[imz] = -vals[iz]
    return _check_injective(MotionGrid(m.points, m.base.copy(), m.radii.copy(), rays, vals))
