"""Interval-map families, their derivatives, critical structure and local
holomorphic deformations (G_w, p).

Every family is an immutable object describing the *shape* of the map; the
parameter vector is always passed separately.  The module-level functions
``eval``, ``d_dx``, ``d_dparam``, ``deformation`` and ``critical_data`` are
thin dispatchers kept for a functional call style.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateDeformation,
    DomainError,
    InvalidFamily,
    NonDifferentiable,
    SideRequired,
)

TWO_PI = 2.0 * math.pi


class Side(enum.IntEnum):
    MINUS = -1
    TWO = 0
    PLUS = 1


@dataclass(frozen=True, order=True)
class SidedPoint:
    """A real point, optionally tagged as a one-sided limit (0+, c-, ...)."""

    value: float
    side: Side = Side.TWO

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        tag = {Side.MINUS: "-", Side.PLUS: "+", Side.TWO: ""}[self.side]
        return f"{self.value!r}{tag}"


def as_point(x) -> SidedPoint:
    if isinstance(x, SidedPoint):
        return x
    return SidedPoint(float(x))


@dataclass(frozen=True)
class CriticalPoint:
    point: SidedPoint
    value: float
    degree: float | None  # local degree; None for jumps
    flat: bool = False


def _cpow(z, t):
    """Principal branch z**t with 1**t == 1 (also fine for real z > 0)."""
    if isinstance(z, complex) or isinstance(t, complex):
        if z == 0:
            return 0j
        return cmath.exp(t * cmath.log(z))
    if z > 0:
        return z ** t
    if z == 0:
        return 0.0
    return cmath.exp(t * cmath.log(complex(z)))


def _ipow(z, t):
    """Power used by the deformations: exact integer powers when possible."""
    if float(t).is_integer():
        return z ** int(t)
    return _cpow(z, t)


# ---------------------------------------------------------------------------
# deformation handles


class Deformation:
    """Local holomorphic deformation (g, G, p) around the base parameter.

    ``anchor`` arguments are the real base points at which a branch of G_w is
    used; they pick the lap (piecewise kinds) or the side (Lorenz kinds).
    Coordinates w are complex nu-vectors ordered like ``critical_data``.
    """

    nu: int
    base_w: np.ndarray

    def G(self, w, z, anchor: SidedPoint):
        raise NotImplementedError

    def dG_dz(self, w, z, anchor: SidedPoint):
        raise NotImplementedError

    def dG_dw(self, w, z, anchor: SidedPoint) -> np.ndarray:
        raise NotImplementedError

    def p(self, w) -> np.ndarray:
        raise NotImplementedError

    def dp_dw(self, w) -> np.ndarray:
        raise NotImplementedError


class _AdditiveDeformation(Deformation):
    """G_w(z) = g(z) + (w - g(0)) with p == crit (constant)."""

    def __init__(self, g, dg, c, crit=0.0):
        self._g, self._dg, self._c, self._crit = g, dg, c, crit
        self.nu = 1
        self.base_w = np.array([c], dtype=complex)

    def G(self, w, z, anchor):
        return self._g(z, anchor) + w[0]

    def dG_dz(self, w, z, anchor):
        return self._dg(z, anchor)

    def dG_dw(self, w, z, anchor):
        return np.ones(1, dtype=complex)

    def p(self, w):
        return np.array([self._crit], dtype=complex)

    def dp_dw(self, w):
        return np.zeros((1, 1), dtype=complex)


# ---------------------------------------------------------------------------
# families


class Family:
    kind: str = ""
    param_dim: int = 1
    circle: bool = False
    additive: bool = False

    def shape(self) -> dict:
        return {}

    def check_params(self, params) -> np.ndarray:
        p = np.atleast_1d(np.asarray(params, dtype=float))
        if p.shape != (self.param_dim,):
            raise InvalidFamily(f"{self.kind} expects {self.param_dim} parameter(s), got {p.shape}")
        return p

    # subclasses implement value/deriv/dparam for a real x with a side tag
    def value(self, params, x: float, side: Side) -> float:
        raise NotImplementedError

    def deriv(self, params, x: float, side: Side) -> float:
        raise NotImplementedError

    def dparam(self, params, x: float, side: Side) -> np.ndarray:
        raise NotImplementedError

    def critical(self, params) -> list[CriticalPoint]:
        raise NotImplementedError

    def deformation(self, params) -> Deformation:
        raise NotImplementedError

    def bounds(self, params) -> tuple[float, float]:
        """Region the orbit must stay in (OrbitEscaped otherwise)."""
        return (-math.inf, math.inf)

    def domain(self, params) -> tuple[float, float]:
        return (-math.inf, math.inf)

    def lift_value(self, params, x: float, side: Side) -> float:
        """Unreduced value; differs from ``value`` only on the circle."""
        return self.value(params, x, side)

    def value_vec(self, params: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Vectorised two-sided evaluation for 1-parameter families."""
        return np.array([self.value([c], xx, Side.TWO) for c, xx in zip(params, x)])

    def _in_domain(self, params, x):
        lo, hi = self.domain(params)
        if not (lo <= x <= hi):
            raise DomainError(f"x={x} outside {self.kind} domain [{lo}, {hi}]")

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.shape().items())
        return f"{self.kind}({args})"

    def __eq__(self, other):
        return isinstance(other, Family) and self.kind == other.kind and self.shape() == other.shape()

    def __hash__(self):
        return hash((self.kind, repr(sorted(self.shape().items()))))


class PowerUnimodal(Family):
    """x**d + c with d even."""

    kind = "PowerUnimodal"
    additive = True

    def __init__(self, d: int = 2):
        if int(d) != d or d < 2 or d % 2:
            raise InvalidFamily("PowerUnimodal needs an even integer degree >= 2")
        self.d = int(d)

    def shape(self):
        return {"d": self.d}

    def value(self, params, x, side=Side.TWO):
        return x ** self.d + params[0]

    def value_vec(self, params, x):
        return x ** self.d + params

    def deriv(self, params, x, side=Side.TWO):
        return self.d * x ** (self.d - 1)

    def dparam(self, params, x, side=Side.TWO):
        return np.ones(1)

    def bounds(self, params):
        r = 2.0 + abs(params[0])
        return (-r, r)

    def critical(self, params):
        return [CriticalPoint(SidedPoint(0.0), float(params[0]), float(self.d))]

    def deformation(self, params):
        d = self.d
        return _AdditiveDeformation(lambda z, a: z ** d, lambda z, a: d * z ** (d - 1), float(params[0]))


class PowerLaw(Family):
    """|x|**l_minus + c for x < 0 and x**l_plus + c for x > 0."""

    kind = "PowerLaw"
    additive = True

    def __init__(self, ell_minus: float, ell_plus: float):
        if ell_minus < 1 or ell_plus < 1:
            raise InvalidFamily("PowerLaw exponents must be >= 1")
        self.ell_minus = float(ell_minus)
        self.ell_plus = float(ell_plus)

    @property
    def ell(self) -> float:
        return min(self.ell_minus, self.ell_plus)

    def shape(self):
        return {"ell_minus": self.ell_minus, "ell_plus": self.ell_plus}

    def _exp(self, x, side):
        if x > 0 or (x == 0 and side == Side.PLUS):
            return self.ell_plus
        return self.ell_minus

    def value(self, params, x, side=Side.TWO):
        return abs(x) ** self._exp(x, side) + params[0]

    def value_vec(self, params, x):
        ax = np.abs(x)
        return np.where(x > 0, ax ** self.ell_plus, ax ** self.ell_minus) + params

    def deriv(self, params, x, side=Side.TWO):
        if x == 0:
            if min(self.ell_minus, self.ell_plus) < 2:
                raise NonDifferentiable("cusp at the turning point")
            return 0.0
        ell = self._exp(x, side)
        return math.copysign(ell * abs(x) ** (ell - 1), x)

    def dparam(self, params, x, side=Side.TWO):
        return np.ones(1)

    def bounds(self, params):
        r = 2.0 + abs(params[0])
        return (-r, r)

    def critical(self, params):
        return [CriticalPoint(SidedPoint(0.0), float(params[0]), self.ell)]

    def deformation(self, params):
        lm, lp = self.ell_minus, self.ell_plus

        def g(z, a):
            return _ipow(z, lp) if a.value > 0 else _ipow(-z, lm)

        def dg(z, a):
            return lp * _ipow(z, lp - 1) if a.value > 0 else -lm * _ipow(-z, lm - 1)

        return _AdditiveDeformation(g, dg, float(params[0]))


def flat_beta(ell: float, b: float) -> float:
    """Root of b = 2x e^{1/x^ell} on (0, ell^{1/ell}), by bisection."""
    def F(x):
        e = x ** -ell
        return math.inf if e > 700 else 2.0 * x * math.exp(e) - b

    hi = ell ** (1.0 / ell)
    # F -> +inf at 0+; F(hi) < 0 under the family hypothesis
    lo = 0.5 * hi
    while F(lo) < 0:
        lo *= 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if F(mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(F(lo)) <= abs(F(hi)) else hi


class FlatExp(Family):
    """b exp(-1/|x|**ell) + c, with f(0) = c (flat critical point)."""

    kind = "FlatExp"
    additive = True

    def __init__(self, ell: float = 1.0, b: float = 6.0):
        if ell < 1:
            raise InvalidFamily("FlatExp needs ell >= 1")
        if not b > 2.0 * (math.e * ell) ** (1.0 / ell):
            raise InvalidFamily("FlatExp needs b > 2(e ell)^(1/ell)")
        self.ell = float(ell)
        self.b = float(b)

    def shape(self):
        return {"ell": self.ell, "b": self.b}

    @property
    def beta(self) -> float:
        return flat_beta(self.ell, self.b)

    def _core(self, x):
        if x == 0:
            return 0.0
        return self.b * math.exp(-abs(x) ** -self.ell)

    def value(self, params, x, side=Side.TWO):
        return self._core(x) + params[0]

    def value_vec(self, params, x):
        ax = np.abs(x)
        with np.errstate(divide="ignore", over="ignore"):
            core = np.where(ax > 0, self.b * np.exp(-(ax ** -self.ell)), 0.0)
        return core + params

    def deriv(self, params, x, side=Side.TWO):
        if x == 0:
            return 0.0
        ax = abs(x)
        return math.copysign(self._core(x) * self.ell * ax ** (-self.ell - 1), x)

    def dparam(self, params, x, side=Side.TWO):
        return np.ones(1)

    def critical(self, params):
        return [CriticalPoint(SidedPoint(0.0), float(params[0]), None, flat=True)]

    def deformation(self, params):
        b, ell = self.b, self.ell

        def g(z, a):
            u = z if a.value > 0 else -z
            return b * cmath.exp(-_ipow(u, -ell))

        def dg(z, a):
            u = z if a.value > 0 else -z
            val = b * cmath.exp(-_ipow(u, -ell)) * ell * _ipow(u, -ell - 1)
            return val if a.value > 0 else -val

        return _AdditiveDeformation(g, dg, float(params[0]))


# ---------------------------------------------------------------------------
# class E cores


@dataclass(frozen=True)
class CoreMap:
    """A core f for the multiplicative family a*f(x)."""

    name: str
    f: object
    df: object
    c: float
    lo: float
    hi: float
    odd: bool

    def __call__(self, z):
        return self.f(z)


def _sin_core():
    return CoreMap("sin", lambda z: _csin(z), lambda z: _ccos(z), math.pi / 2, 0.0, math.pi, True)


def _csin(z):
    return cmath.sin(z) if isinstance(z, complex) else math.sin(z)


def _ccos(z):
    return cmath.cos(z) if isinstance(z, complex) else math.cos(z)


def _cexp(z):
    return cmath.exp(z) if isinstance(z, complex) else math.exp(z)


def core_map(name: str) -> CoreMap:
    """Look up a built-in core by id.

    Ids: ``sin``, ``logistic`` (4x(1-x)), ``explogistic`` (4e^x(1-e^x)),
    ``sin2`` (sin^2 x), ``gamma:m`` (m^-m (ex)^m e^-x, m even) and
    ``gauss:m`` ((m/2)^(-m/2) e^(m/2) x^m e^(-x^2), m odd).
    """
    if name == "sin":
        return _sin_core()
    if name == "logistic":
        return CoreMap(name, lambda z: 4 * z * (1 - z), lambda z: 4 - 8 * z, 0.5, 0.0, 1.0, False)
    if name == "explogistic":
        # maximum sits at -log 2, so the whole line is treated as the unimodal part
        return CoreMap(
            name,
            lambda z: 4 * _cexp(z) * (1 - _cexp(z)),
            lambda z: 4 * _cexp(z) - 8 * _cexp(2 * z),
            -math.log(2.0),
            -math.inf,
            math.inf,
            False,
        )
    if name == "sin2":
        return CoreMap(name, lambda z: _csin(z) ** 2, lambda z: _csin(2 * z), math.pi / 2, 0.0, math.pi, False)
    if name.startswith("gamma:"):
        m = int(name.split(":")[1])
        if m < 2 or m % 2:
            raise InvalidFamily("gamma core needs an even m >= 2")
        k = float(m) ** -m
        return CoreMap(
            name,
            lambda z: k * (math.e * z) ** m * _cexp(-z),
            lambda z: k * math.e ** m * z ** (m - 1) * (m - z) * _cexp(-z),
            float(m),
            0.0,
            math.inf,
            False,
        )
    if name.startswith("gauss:"):
        m = int(name.split(":")[1])
        if m < 1 or m % 2 == 0:
            raise InvalidFamily("gauss core needs an odd m >= 1")
        k = (m / 2.0) ** (-m / 2.0) * math.exp(m / 2.0)
        return CoreMap(
            name,
            lambda z: k * z ** m * _cexp(-z * z),
            lambda z: k * z ** (m - 1) * (m - 2 * z * z) * _cexp(-z * z),
            math.sqrt(m / 2.0),
            0.0,
            math.inf,
            True,
        )
    raise InvalidFamily(f"unknown core {name!r}")


class _MultiplicativeDeformation(Deformation):
    def __init__(self, core: CoreMap, a: float):
        self.core = core
        self.nu = 1
        self.base_w = np.array([a], dtype=complex)

    def G(self, w, z, anchor):
        return w[0] * self.core.f(z)

    def dG_dz(self, w, z, anchor):
        return w[0] * self.core.df(z)

    def dG_dw(self, w, z, anchor):
        return np.array([self.core.f(z)], dtype=complex)

    def p(self, w):
        return np.array([self.core.c], dtype=complex)

    def dp_dw(self, w):
        return np.zeros((1, 1), dtype=complex)


class MultiplicativeClassE(Family):
    """a * f(x) for a class-E (or odd class-E) core f."""

    kind = "MultiplicativeClassE"

    def __init__(self, core: str = "sin"):
        self.core = core_map(core)

    def shape(self):
        return {"core": self.core.name}

    def value(self, params, x, side=Side.TWO):
        return params[0] * self.core.f(x)

    def value_vec(self, params, x):
        name = self.core.name
        if name == "sin":
            return params * np.sin(x)
        if name == "sin2":
            return params * np.sin(x) ** 2
        if name == "logistic":
            return params * 4 * x * (1 - x)
        return super().value_vec(params, x)

    def deriv(self, params, x, side=Side.TWO):
        return params[0] * self.core.df(x)

    def dparam(self, params, x, side=Side.TWO):
        return np.array([self.core.f(x)])

    def bounds(self, params):
        return (self.core.lo, self.core.hi)

    def critical(self, params):
        return [CriticalPoint(SidedPoint(self.core.c), float(params[0]), 2.0)]

    def deformation(self, params):
        return _MultiplicativeDeformation(self.core, float(params[0]))


# ---------------------------------------------------------------------------
# piecewise linear


def pl_geometry(eps: int, kappa: Sequence[float], v: Sequence[float]):
    """Slope scale, turning points and extremal values of the PL map with
    extremal values ``v``.  Returns (s, c, vals, eps_i) with c and vals of
    length nu+2 (including the endpoints -1, 1)."""
    kappa = np.asarray(kappa, dtype=float)
    nu = len(kappa) - 1
    v = np.asarray(v, dtype=float)
    eps_i = np.array([eps * (-1) ** i for i in range(nu + 1)], dtype=float)
    vals = np.concatenate([[-eps_i[0]], v, [eps_i[nu]]])
    rise = np.diff(vals) * eps_i / kappa  # (v_i - v_{i-1}) eps_i / kappa_i
    s = rise.sum() / 2.0
    c = np.concatenate([[-1.0], -1.0 + np.cumsum(rise) / s])
    c[-1] = 1.0
    return s, c, vals, eps_i


class _PLDeformation(Deformation):
    def __init__(self, fam: "PiecewiseLinear", v):
        self.fam = fam
        self.nu = fam.nu
        self.base_w = np.asarray(v, dtype=complex)
        _, self.c, _, self.eps_i = pl_geometry(fam.eps, fam.kappa, v)
        k = fam.kappa
        self._r = self.eps_i / k  # eps_i / kappa_i, i = 1..nu+1

    def _full(self, w):
        return np.concatenate([[-self.eps_i[0]], np.asarray(w, dtype=complex), [self.eps_i[-1]]])

    def _S(self, w):
        return (np.diff(self._full(w)) * self._r).sum() / 2.0

    def _dS(self):
        # dS/dw_k, k = 1..nu
        return (self._r[:-1] - self._r[1:]) / 2.0

    def _lap(self, anchor):
        x = anchor.value
        i = int(np.searchsorted(self.c, x, side="right"))  # c[i-1] <= x < c[i]
        i = min(max(i, 1), self.nu + 1)
        if anchor.side == Side.MINUS and i > 1 and x == self.c[i - 1]:
            i -= 1
        return i

    def _pfull(self, w):
        wf = self._full(w)
        N = np.concatenate([[0.0], np.cumsum(np.diff(wf) * self._r)])
        return -1.0 + N / self._S(w), N

    def p(self, w):
        return self._pfull(w)[0][1 : self.nu + 1]

    def dp_dw(self, w):
        pf, N = self._pfull(w)
        S = self._S(w)
        dS = self._dS()
        nu = self.nu
        out = np.zeros((nu, nu), dtype=complex)
        for j in range(1, nu + 1):
            for k in range(1, nu + 1):
                dN = (self._r[k - 1] if k <= j else 0.0) - (self._r[k] if k + 1 <= j else 0.0)
                out[j - 1, k - 1] = (dN * S - N[j] * dS[k - 1]) / S ** 2
        return out

    def G(self, w, z, anchor):
        i = self._lap(anchor)
        wf = self._full(w)
        pf, _ = self._pfull(w)
        return wf[i - 1] + self.fam.kappa[i - 1] * self.eps_i[i - 1] * self._S(w) * (z - pf[i - 1])

    def dG_dz(self, w, z, anchor):
        i = self._lap(anchor)
        return self.fam.kappa[i - 1] * self.eps_i[i - 1] * self._S(w)

    def dG_dw(self, w, z, anchor):
        i = self._lap(anchor)
        pf, _ = self._pfull(w)
        S = self._S(w)
        dS = self._dS()
        dp = np.vstack([np.zeros(self.nu), self.dp_dw(w), np.zeros(self.nu)])
        ke = self.fam.kappa[i - 1] * self.eps_i[i - 1]
        out = ke * (dS * (z - pf[i - 1]) - S * dp[i - 1])
        if i - 1 >= 1:
            out[i - 2] += 1.0
        return out.astype(complex)


class PiecewiseLinear(Family):
    """Continuous nu-modal PL maps of [-1,1] parametrised by extremal values."""

    kind = "PiecewiseLinear"

    def __init__(self, eps: int = 1, nu: int = 1, kappa: Sequence[float] = (1.0, 1.0)):
        if eps not in (1, -1):
            raise InvalidFamily("eps must be +1 or -1")
        kappa = tuple(float(k) for k in kappa)
        if len(kappa) != nu + 1 or min(kappa) <= 0:
            raise InvalidFamily("kappa must have nu+1 positive entries")
        self.eps = int(eps)
        self.nu = int(nu)
        self.kappa = np.array(kappa)
        self.param_dim = self.nu

    def shape(self):
        return {"eps": self.eps, "nu": self.nu, "kappa": [float(k) for k in self.kappa]}

    def geometry(self, params):
        return pl_geometry(self.eps, self.kappa, params)

    def domain(self, params):
        return (-1.0, 1.0)

    bounds = domain

    def _lap(self, c, x, side):
        i = int(np.searchsorted(c, x, side="right"))
        i = min(max(i, 1), self.nu + 1)
        if side == Side.MINUS and i > 1 and x == c[i - 1]:
            i -= 1
        return i

    def value(self, params, x, side=Side.TWO):
        self._in_domain(params, x)
        s, c, vals, eps_i = self.geometry(params)
        i = self._lap(c, x, side)
        return vals[i - 1] + eps_i[i - 1] * self.kappa[i - 1] * s * (x - c[i - 1])

    def deriv(self, params, x, side=Side.TWO):
        s, c, vals, eps_i = self.geometry(params)
        if side == Side.TWO and np.any(np.abs(c[1:-1] - x) == 0):
            raise NonDifferentiable("turning point of a PL map")
        i = self._lap(c, x, side)
        return eps_i[i - 1] * self.kappa[i - 1] * s

    def dparam(self, params, x, side=Side.TWO):
        d = _PLDeformation(self, params)
        return d.dG_dw(d.base_w, x, SidedPoint(x, side)).real

    def critical(self, params):
        s, c, vals, eps_i = self.geometry(params)
        return [CriticalPoint(SidedPoint(float(c[i])), float(vals[i]), None) for i in range(1, self.nu + 1)]

    def deformation(self, params):
        return _PLDeformation(self, params)


# ---------------------------------------------------------------------------
# Lorenz kinds


class _LorenzAffineDeformation(Deformation):
    def __init__(self, t, c):
        self.nu = 2
        self.c = c
        self.base_w = np.array([t * c + t - 1, t * c - t + 1], dtype=complex)

    @staticmethod
    def t_of(w):
        return 1.0 + (w[0] - w[1]) / 2.0

    def _minus(self, anchor):
        if anchor.value == self.c:
            if anchor.side == Side.TWO:
                raise SideRequired("anchor at the discontinuity")
            return anchor.side == Side.MINUS
        return anchor.value < self.c

    def G(self, w, z, anchor):
        t = self.t_of(w)
        return t * z + (t - 1) if self._minus(anchor) else t * z - (t - 1)

    def dG_dz(self, w, z, anchor):
        return self.t_of(w)

    def dG_dw(self, w, z, anchor):
        dt = np.array([0.5, -0.5], dtype=complex)
        return dt * (z + 1) if self._minus(anchor) else dt * (z - 1)

    def p(self, w):
        t = self.t_of(w)
        pw = (w[0] + w[1]) / (2 * t)
        return np.array([pw, pw], dtype=complex)

    def dp_dw(self, w):
        t = self.t_of(w)
        pw = (w[0] + w[1]) / (2 * t)
        row = np.array([(1 - pw) / (2 * t), (1 + pw) / (2 * t)], dtype=complex)
        return np.vstack([row, row])


class LorenzAffine(Family):
    """t x + (t-1) left of c, t x - (t-1) right of c, on [-1, 1]."""

    kind = "LorenzAffine"
    param_dim = 2

    def check_params(self, params):
        p = super().check_params(params)
        t, c = p
        if not (1 < t <= 2 and -1 < c < 1):
            raise InvalidFamily("LorenzAffine needs t in (1,2] and c in (-1,1)")
        return p

    def domain(self, params):
        return (-1.0, 1.0)

    bounds = domain

    def _minus(self, params, x, side):
        c = params[1]
        if x == c:
            if side == Side.TWO:
                raise SideRequired("x is the discontinuity")
            return side == Side.MINUS
        return x < c

    def value(self, params, x, side=Side.TWO):
        self._in_domain(params, x)
        t = params[0]
        return t * x + (t - 1) if self._minus(params, x, side) else t * x - (t - 1)

    def deriv(self, params, x, side=Side.TWO):
        return float(params[0])

    def dparam(self, params, x, side=Side.TWO):
        left = self._minus(params, x, side)
        return np.array([x + 1.0 if left else x - 1.0, 0.0])

    def critical(self, params):
        t, c = params
        return [
            CriticalPoint(SidedPoint(float(c), Side.MINUS), t * c + t - 1, None),
            CriticalPoint(SidedPoint(float(c), Side.PLUS), t * c - t + 1, None),
        ]

    def deformation(self, params):
        t, c = self.check_params(params)
        return _LorenzAffineDeformation(t, c)

    @staticmethod
    def params_from_w(w) -> np.ndarray:
        """(t, c) from the critical-value coordinates (w1, w2)."""
        t = 1.0 + (w[0] - w[1]) / 2.0
        return np.array([t, (w[0] + w[1]) / (2.0 * t)])


class _LorenzFlatDeformation(Deformation):
    def __init__(self, fam, c1, c2):
        self.b, self.ell = fam.b, fam.ell
        self.nu = 2
        self.base_w = np.array([c1, c2], dtype=complex)

    def _minus(self, anchor):
        if anchor.value == 0:
            if anchor.side == Side.TWO:
                raise SideRequired("anchor at the discontinuity")
            return anchor.side == Side.MINUS
        return anchor.value < 0

    def G(self, w, z, anchor):
        if self._minus(anchor):
            return -self.b * cmath.exp(-_ipow(-z, -self.ell)) + w[0]
        return self.b * cmath.exp(-_ipow(z, -self.ell)) + w[1]

    def dG_dz(self, w, z, anchor):
        u = -z if self._minus(anchor) else z
        return self.b * cmath.exp(-_ipow(u, -self.ell)) * self.ell * _ipow(u, -self.ell - 1)

    def dG_dw(self, w, z, anchor):
        return np.array([1, 0] if self._minus(anchor) else [0, 1], dtype=complex)

    def p(self, w):
        return np.zeros(2, dtype=complex)

    def dp_dw(self, w):
        return np.zeros((2, 2), dtype=complex)


class LorenzFlat(Family):
    """-b e^{-1/|x|^ell} + c1 for x < 0 and b e^{-1/|x|^ell} + c2 for x > 0."""

    kind = "LorenzFlat"
    param_dim = 2

    def __init__(self, ell: float = 1.0, b: float = 6.0):
        if ell < 1:
            raise InvalidFamily("LorenzFlat needs ell >= 1")
        if not b > 2.0 * (math.e * ell) ** (1.0 / ell):
            raise InvalidFamily("LorenzFlat needs b > 2(e ell)^(1/ell)")
        self.ell = float(ell)
        self.b = float(b)

    def shape(self):
        return {"ell": self.ell, "b": self.b}

    @property
    def beta(self) -> float:
        return flat_beta(self.ell, self.b)

    def _minus(self, x, side):
        if x == 0:
            if side == Side.TWO:
                raise SideRequired("x is the discontinuity")
            return side == Side.MINUS
        return x < 0

    def _core(self, x):
        return 0.0 if x == 0 else self.b * math.exp(-abs(x) ** -self.ell)

    def value(self, params, x, side=Side.TWO):
        if self._minus(x, side):
            return -self._core(x) + params[0]
        return self._core(x) + params[1]

    def deriv(self, params, x, side=Side.TWO):
        if x == 0:
            return 0.0
        return self._core(x) * self.ell * abs(x) ** (-self.ell - 1)

    def dparam(self, params, x, side=Side.TWO):
        return np.array([1.0, 0.0]) if self._minus(x, side) else np.array([0.0, 1.0])

    def critical(self, params):
        return [
            CriticalPoint(SidedPoint(0.0, Side.MINUS), float(params[0]), None, flat=True),
            CriticalPoint(SidedPoint(0.0, Side.PLUS), float(params[1]), None, flat=True),
        ]

    def deformation(self, params):
        p = self.check_params(params)
        return _LorenzFlatDeformation(self, p[0], p[1])


# ---------------------------------------------------------------------------
# Arnol'd circle family


def arnold_critical_points(d: float, b) -> tuple:
    """Both solutions of d + 2 pi b cos(2 pi t) = 0, polished by Newton.

    Works for complex b as well (principal arccos branch)."""
    u = -d / (TWO_PI * b)
    if isinstance(b, complex):
        e1 = cmath.acos(u) / TWO_PI
    else:
        if abs(u) >= 1:
            raise InvalidFamily("Arnold family needs |b| > d/(2 pi)")
        e1 = math.acos(u) / TWO_PI
    cos, sin = (cmath.cos, cmath.sin) if isinstance(e1, complex) else (math.cos, math.sin)
    for _ in range(3):
        F = d + TWO_PI * b * cos(TWO_PI * e1)
        dF = -TWO_PI * TWO_PI * b * sin(TWO_PI * e1)
        if dF == 0:
            break
        e1 = e1 - F / dF
    return e1, 1.0 - e1


class _ArnoldDeformation(Deformation):
    def __init__(self, fam, a, b):
        self.d = fam.d
        self.nu = 2
        self.a0, self.b0 = a, b
        e1, e2 = arnold_critical_points(self.d, b)
        s1 = math.sin(TWO_PI * e1)
        if abs(s1) < 1e-12:
            raise DegenerateDeformation("critical values do not move independently")
        self.base_w = np.array([self._v(a, b, e1), self._v(a, b, e2)], dtype=complex)

    def _v(self, a, b, e):
        return self.d * e + a + b * cmath.sin(TWO_PI * e)

    def ab(self, w):
        """Invert (a, b) -> (v1, v2) by Newton on b (a then follows)."""
        target = w[0] - w[1]
        b = complex(self.b0)
        for _ in range(60):
            e1, _ = arnold_critical_points(self.d, b)
            phi = self.d * (2 * e1 - 1) + 2 * b * cmath.sin(TWO_PI * e1)
            dphi = 2 * cmath.sin(TWO_PI * e1)
            step = (phi - target) / dphi
            b -= step
            if abs(step) <= 1e-16 * (1 + abs(b)):
                break
        e1, _ = arnold_critical_points(self.d, b)
        a = w[0] - self.d * e1 - b * cmath.sin(TWO_PI * e1)
        return a, b

    def _jac(self, w):
        a, b = self.ab(w)
        e1, e2 = arnold_critical_points(self.d, b)
        s1, s2 = cmath.sin(TWO_PI * e1), cmath.sin(TWO_PI * e2)
        Dq = np.array([[1, s1], [1, s2]], dtype=complex)
        return a, b, e1, e2, np.linalg.inv(Dq)

    def G(self, w, z, anchor):
        a, b = self.ab(w)
        return self.d * z + a + b * cmath.sin(TWO_PI * z)

    def dG_dz(self, w, z, anchor):
        _, b = self.ab(w)
        return self.d + TWO_PI * b * cmath.cos(TWO_PI * z)

    def dG_dw(self, w, z, anchor):
        _, _, _, _, inv = self._jac(w)
        return inv[0] + cmath.sin(TWO_PI * z) * inv[1]

    def p(self, w):
        _, b = self.ab(w)
        return np.array(arnold_critical_points(self.d, b), dtype=complex)

    def dp_dw(self, w):
        _, b, e1, _, inv = self._jac(w)
        de1 = cmath.cos(TWO_PI * e1) / (TWO_PI * b * cmath.sin(TWO_PI * e1))
        return np.vstack([de1 * inv[1], -de1 * inv[1]])


class Arnold(Family):
    """Circle maps d t + a + b sin(2 pi t) (mod 1), parameters (a, b)."""

    kind = "Arnold"
    param_dim = 2
    circle = True

    def __init__(self, d: int = 1):
        if int(d) != d or d < 1:
            raise InvalidFamily("Arnold degree d must be a positive integer")
        self.d = int(d)

    def shape(self):
        return {"d": self.d}

    def check_params(self, params):
        p = super().check_params(params)
        if abs(p[1]) <= self.d / TWO_PI:
            raise InvalidFamily("Arnold family needs |b| > d/(2 pi)")
        return p

    def lift_value(self, params, x, side=Side.TWO):
        a, b = params
        return self.d * x + a + b * math.sin(TWO_PI * x)

    def value(self, params, x, side=Side.TWO):
        return self.lift_value(params, x, side) % 1.0

    def deriv(self, params, x, side=Side.TWO):
        return self.d + TWO_PI * params[1] * math.cos(TWO_PI * x)

    def dparam(self, params, x, side=Side.TWO):
        return np.array([1.0, math.sin(TWO_PI * x)])

    def domain(self, params):
        return (0.0, 1.0)

    def critical(self, params):
        p = self.check_params(params)
        es = arnold_critical_points(self.d, float(p[1]))
        return [CriticalPoint(SidedPoint(float(e)), self.value(p, e), 2.0) for e in sorted(es)]

    def deformation(self, params):
        p = self.check_params(params)
        return _ArnoldDeformation(self, float(p[0]), float(p[1]))


# ---------------------------------------------------------------------------
# registry and functional API

REGISTRY = {
    cls.kind: cls
    for cls in (PowerUnimodal, PowerLaw, FlatExp, MultiplicativeClassE, PiecewiseLinear, LorenzAffine, LorenzFlat, Arnold)
}

SHORTHANDS = {
    "quad": ("PowerUnimodal", {"d": 2}),
    "quartic": ("PowerUnimodal", {"d": 4}),
    "flat": ("FlatExp", {"ell": 1.0, "b": 6.0}),
    "sin": ("MultiplicativeClassE", {"core": "sin"}),
    "tent": ("PiecewiseLinear", {"eps": 1, "nu": 1, "kappa": [1.0, 1.0]}),
    "lorenz": ("LorenzAffine", {}),
    "lorenzflat": ("LorenzFlat", {"ell": 1.0, "b": 6.0}),
    "arnold": ("Arnold", {"d": 1}),
}


def make_family(kind: str, shape: dict | None = None) -> Family:
    if kind in SHORTHANDS and not shape:
        kind, shape = SHORTHANDS[kind]
    if kind not in REGISTRY:
        raise InvalidFamily(f"unknown family kind {kind!r}")
    return REGISTRY[kind](**(shape or {}))


def family_to_json(family: Family, params=None) -> dict:
    out = {"kind": family.kind, "shape": family.shape()}
    if params is not None:
        out["params"] = [float(x) for x in np.atleast_1d(params)]
    return out


def family_from_json(obj: dict) -> tuple[Family, np.ndarray | None]:
    fam = make_family(obj["kind"], obj.get("shape") or {})
    params = obj.get("params")
    return fam, (None if params is None else fam.check_params(params))


def eval(family: Family, params, x) -> float:  # noqa: A001 - mirrors the math name
    x = as_point(x)
    p = family.check_params(params)
    return family.value(p, x.value, x.side)


def d_dx(family: Family, params, x) -> float:
    x = as_point(x)
    return family.deriv(family.check_params(params), x.value, x.side)


def d_dparam(family: Family, params, x) -> np.ndarray:
    x = as_point(x)
    return np.asarray(family.dparam(family.check_params(params), x.value, x.side), dtype=float)


def deformation(family: Family, params) -> Deformation:
    return family.deformation(family.check_params(params))


def critical_data(family: Family, params) -> list[CriticalPoint]:
    return family.critical(family.check_params(params))
