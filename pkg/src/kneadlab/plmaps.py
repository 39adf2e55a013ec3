"""Piecewise-linear maps with prescribed extremal values, their Markov data,
and the Lorenz-specific helpers (R map, tent/Lorenz entropy bridge)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidValueVector, OrbitNotFinite
from .families import (
    Family,
    LorenzAffine,
    PiecewiseLinear,
    Side,
    pl_geometry,
)
from .kneading import MAX_ORBIT
from .solver import marked_orbit

MERGE_TOL = 1e-12


@dataclass(frozen=True)
class PLSpec:
    eps: int
    kappa: tuple
    v: tuple
    s: float
    c: tuple  # c_0 = -1 < c_1 < ... < c_{nu+1} = 1
    slopes: tuple

    @property
    def nu(self) -> int:
        return len(self.v)

    def family(self) -> PiecewiseLinear:
        return PiecewiseLinear(self.eps, self.nu, self.kappa)

    def __call__(self, x: float, side: Side = Side.TWO) -> float:
        return self.family().value(list(self.v), x, side)

    def extremal_values(self) -> tuple:
        f = self.family()
        return tuple(f.value(list(self.v), ci) for ci in self.c[1:-1])

    def to_json(self) -> dict:
        return {"epsilon": self.eps, "kappa": list(self.kappa), "v": list(self.v)}

    @classmethod
    def from_json(cls, obj: dict) -> "PLSpec":
        return pl_from_values(obj["epsilon"], len(obj["v"]), obj["kappa"], obj["v"])


def pl_from_values(eps: int, nu: int, kappa: Sequence[float], v: Sequence[float]) -> PLSpec:
    """The map in the class with extremal values v (slopes eps_i kappa_i s)."""
    kappa = tuple(float(k) for k in kappa)
    v = tuple(float(x) for x in v)
    if len(v) != nu or len(kappa) != nu + 1:
        raise InvalidValueVector("need nu values and nu+1 slope ratios")
    s, c, vals, eps_i = pl_geometry(eps, kappa, v)
    steps = np.diff(vals) * eps_i
    if np.any(steps <= 0):
        i = int(np.argmin(steps)) + 1
        raise InvalidValueVector(f"eps_{i} (v_{i} - v_{i - 1}) must be positive")
    if not s > 0:
        raise InvalidValueVector("slope scale s must be positive")
    slopes = tuple(float(e * k * s) for e, k in zip(eps_i, kappa))
    return PLSpec(int(eps), kappa, v, float(s), tuple(float(x) for x in c), slopes)


def tent_spec(t: float) -> PLSpec:
    """f_t(x) = -t|x| + (t - 1) as a member of the one-turn class."""
    return pl_from_values(1, 1, (1.0, 1.0), (t - 1.0,))


# ---------------------------------------------------------------------------
# Markov partition


def orbit_points(spec: PLSpec) -> list[float]:
    """P: forward orbits of the turning points (plus -1 and 1), merged at MERGE_TOL."""
    f = spec.family()
    v = list(spec.v)
    pts = [-1.0, 1.0]

    def add(x):
        for y in pts:
            if abs(x - y) <= MERGE_TOL:
                return False
        pts.append(x)
        return True

    for ci in spec.c[1:-1]:
        add(ci)
        x = ci
        for _ in range(MAX_ORBIT):
            x = f.value(v, x)
            if not add(x):
                break
        else:
            raise OrbitNotFinite(f"orbit of turning point {ci} does not close")
    return sorted(pts)


def partition(spec: PLSpec) -> list[tuple[float, float]]:
    a = orbit_points(spec)
    return list(zip(a[:-1], a[1:]))


def cover_matrix(spec: PLSpec) -> tuple[np.ndarray, np.ndarray]:
    """0/1 cover matrix M (M[i,k] = 1 iff g(I_i) contains I_k) and the slope
    ratio kappa of the branch on each I_i."""
    f = spec.family()
    v = list(spec.v)
    ivs = partition(spec)
    n = len(ivs)
    M = np.zeros((n, n))
    kap = np.zeros(n)
    for i, (a, b) in enumerate(ivs):
        mid = 0.5 * (a + b)
        lap = int(np.searchsorted(spec.c, mid, side="right"))
        kap[i] = spec.kappa[lap - 1]
        ya, yb = sorted((f.value(v, a, Side.PLUS), f.value(v, b, Side.MINUS)))
        for k, (u, w) in enumerate(ivs):
            if u >= ya - MERGE_TOL and w <= yb + MERGE_TOL:
                M[i, k] = 1.0
    return M, kap


def pl_markov_matrix(spec: PLSpec) -> dict:
    """A = diag(1/kappa) M acting on the interval widths v, which satisfy A v = s v.

    Returns A, the widths, the residual max|v - A v / s| and det(I - A / s).
    """
    M, kap = cover_matrix(spec)
    A = M / kap[:, None]
    ivs = partition(spec)
    widths = np.array([b - a for a, b in ivs])
    s = spec.s
    resid = float(np.abs(widths - A @ widths / s).max())
    det = float(np.linalg.det(np.eye(len(widths)) - A / s))
    return {"A": A, "widths": widths, "s": s, "residual": resid, "det": det}


def _reach(M: np.ndarray) -> list[set]:
    n = M.shape[0]
    out = []
    for i in range(n):
        seen = {i}
        stack = [i]
        while stack:
            u = stack.pop()
            for k in np.nonzero(M[u])[0]:
                if int(k) not in seen:
                    seen.add(int(k))
                    stack.append(int(k))
        out.append(seen)
    return out


def pl_ergodic(spec: PLSpec) -> bool:
    """True iff the forward orbits of every two partition intervals meet."""
    M, _ = cover_matrix(spec)
    reach = _reach(M)
    n = len(reach)
    return all(reach[i] & reach[j] for i in range(n) for j in range(i + 1, n))


# ---------------------------------------------------------------------------
# Lorenz helpers


def lorenz_R(family: Family, w, params) -> dict:
    """R(w) for the two critical relations of the Lorenz orbit at ``params``,
    its central-difference Jacobian in w and the sign quotient."""
    from .transversality import R_map, orbit_product

    orbit = marked_orbit(family, params)
    defo = family.deformation(params)
    w = np.asarray(w, dtype=complex)
    R = R_map(orbit, defo, w)
    J = np.zeros((2, 2))
    w0 = np.asarray(defo.base_w, dtype=complex)
    for k in range(2):
        h = 1e-6 * max(1.0, abs(w0[k]))
        e = np.zeros(2, dtype=complex)
        e[k] = h
        J[:, k] = ((R_map(orbit, defo, w0 + e) - R_map(orbit, defo, w0 - e)) / (2 * h)).real
    # rows follow the marked order; columns follow coordinates: permute to match
    Jm = J[:, list(orbit.order)]
    quotient = float(np.linalg.det(Jm) / orbit_product(orbit))
    return {"R": R, "jacobian": Jm, "cond": float(np.linalg.cond(Jm)), "quotient": quotient,
            "positive": quotient > 0}


def lorenz_T(t: float, x: float) -> float:
    """Symmetric tent T_t(x) = t(1 - |x|) - 1 on [-1, 1]."""
    return t * (1.0 - abs(x)) - 1.0


def tent_lorenz_entropy_bridge(t: float) -> tuple[float, float]:
    """Both maps have constant slope t, so both entropies are log t."""
    if not 1.0 < t <= 2.0:
        raise ValueError("t must lie in (1, 2]")
    return math.log(t), math.log(t)


def lorenz_orbit_identity(t: float, x: float, n: int) -> tuple[float, float]:
    """(|f_t^n(x)|, |T_t^n(x)|) for the symmetric affine Lorenz map f_t (c = 0)."""
    fam = LorenzAffine()
    p = [t, 0.0]
    y = z = x
    for _ in range(n):
        side = Side.PLUS if y == 0 else Side.TWO
        y = fam.value(p, y, side)
        z = lorenz_T(t, z)
    return abs(y), abs(z)
