"""The map R, its Jacobian, D(rho), exceptional values and the sign test.

All matrices here are indexed in the marked order of the orbit: row j is the
relation of marked critical point j and column k is the deformation
coordinate ``orbit.order[k]``.  Vectors ``w`` passed in are always in the
deformation's own coordinate order.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import OrbitLeftDomain, WrongShape, ZeroDeterminant
from .families import Deformation
from .solver import MarkedOrbit

ZERO_DET = 1e-10


def _iterate(orbit: MarkedOrbit, defo: Deformation, w, j: int, n: int, with_grad: bool):
    """G_w^(n-1)(w_j) using the lap anchors c_{1..n-1,j}; optional w-gradient."""
    oj = orbit.order[j]
    z = complex(w[oj])
    grad = np.zeros(orbit.nu, dtype=complex)
    grad[oj] = 1.0
    for i in range(1, n):
        anchor = orbit.points[j][i]
        if with_grad:
            grad = defo.dG_dz(w, z, anchor) * grad + defo.dG_dw(w, z, anchor)
        z = defo.G(w, z, anchor)
        if not cmath.isfinite(z):
            raise OrbitLeftDomain(f"G_w iterate of c_(1,{j + 1}) blew up at step {i}")
    return z, grad


def _raw_R(orbit, defo, w):
    w = np.asarray(w, dtype=complex)
    pw = defo.p(w)
    out = np.zeros(orbit.nu, dtype=complex)
    for j, rel in enumerate(orbit.relations):
        zq, _ = _iterate(orbit, defo, w, j, rel.q, False)
        if rel.kind == "first":
            out[j] = zq - pw[orbit.order[rel.mu]]
        else:
            zl, _ = _iterate(orbit, defo, w, j, rel.l, False)
            out[j] = zq - zl
    return out


def _lift_offsets(orbit, defo):
    # circle maps: the lifted relation closes up to an integer
    if not orbit.family.circle:
        return np.zeros(orbit.nu)
    return np.round(_raw_R(orbit, defo, defo.base_w).real)


def R_map(orbit: MarkedOrbit, defo: Deformation, w) -> np.ndarray:
    """R(w); vanishes at the base critical values."""
    return _raw_R(orbit, defo, w) - _lift_offsets(orbit, defo)


def jacobian_R(orbit: MarkedOrbit, defo: Deformation, w=None) -> np.ndarray:
    """Chain-rule Jacobian of R (marked order on both sides)."""
    w = defo.base_w if w is None else np.asarray(w, dtype=complex)
    dp = defo.dp_dw(w)
    rows = []
    for j, rel in enumerate(orbit.relations):
        _, gq = _iterate(orbit, defo, w, j, rel.q, True)
        if rel.kind == "first":
            row = gq - dp[orbit.order[rel.mu]]
        else:
            _, gl = _iterate(orbit, defo, w, j, rel.l, True)
            row = gq - gl
        rows.append(row)
    J = np.array(rows, dtype=complex)
    return J[:, list(orbit.order)]


def fd_jacobian_R(orbit: MarkedOrbit, defo: Deformation, h: float = 1e-6) -> np.ndarray:
    """Central differences of R_map, columns in marked order."""
    w0 = np.asarray(defo.base_w, dtype=complex)
    cols = []
    for k in range(orbit.nu):
        e = np.zeros(orbit.nu, dtype=complex)
        e[orbit.order[k]] = h * max(1.0, abs(w0[orbit.order[k]]))
        cols.append((R_map(orbit, defo, w0 + e) - R_map(orbit, defo, w0 - e)) / (2 * abs(e[orbit.order[k]])))
    return np.array(cols).T


def orbit_product(orbit: MarkedOrbit) -> float:
    """prod_j Dg^(q_j - 1)(c_{1,j})."""
    out = 1.0
    for j in range(orbit.nu):
        out *= orbit.Dg_n(j, orbit.q(j) - 1)
    return out


def _L(orbit, defo, j, i):
    w = defo.base_w
    v = defo.dG_dw(w, orbit.points[j][i].value, orbit.points[j][i])
    return np.asarray(v, dtype=complex)[list(orbit.order)]


def _calL(orbit, defo, j, m, rho):
    """sum_{n=1}^m rho^n L(c_{n,j}) / Dg^n(c_{1,j}) as a row vector."""
    out = np.zeros(orbit.nu, dtype=complex)
    for n in range(1, m + 1):
        out += rho ** n * _L(orbit, defo, j, n) / orbit.Dg_n(j, n)
    return out


def D_rho(orbit: MarkedOrbit, defo: Deformation, rho: complex) -> np.ndarray:
    nu = orbit.nu
    eye = np.eye(nu, dtype=complex)
    dp = defo.dp_dw(defo.base_w)[np.ix_(list(orbit.order), list(orbit.order))]
    D = np.zeros((nu, nu), dtype=complex)
    for j, rel in enumerate(orbit.relations):
        q = rel.q
        D[j] = eye[j] + _calL(orbit, defo, j, q - 1, rho)
        if rel.kind == "first":
            D[j] -= rho ** q * dp[rel.mu] / orbit.Dg_n(j, q - 1)
        else:
            l = rel.l
            tail = orbit.Dg_n(j, q - l, start=l)
            D[j] -= rho ** (q - l) / tail * (eye[j] + _calL(orbit, defo, j, l - 1, rho))
    return D


def trans_sum(orbit: MarkedOrbit, defo: Deformation | None = None) -> float:
    """1 + sum_{n=1}^{q-1} L(c_n)/Dg^n(c_1) for one first-kind critical point
    with a fixed marked point.  L == 1 for additive families, which gives the
    classical sum of 1/Df^n."""
    if orbit.nu != 1 or orbit.relations[0].kind != "first":
        raise WrongShape("trans_sum needs a single first-kind critical relation")
    fam = orbit.family
    if fam.additive:
        q = orbit.q(0)
        return float(sum(1.0 / orbit.Dg_n(0, n) for n in range(q)))
    defo = fam.deformation(orbit.params) if defo is None else defo
    if np.any(np.abs(defo.dp_dw(defo.base_w)) > 0):
        raise WrongShape("trans_sum needs a marked point that does not move")
    return float(D_rho(orbit, defo, 1.0)[0, 0].real)


def exceptional_values(orbit: MarkedOrbit, tol: float = 1e-9) -> list[complex]:
    """Roots rho of rho^(q_j - l_j) = Dg^(q_j - l_j)(c_{l_j,j}) over second-kind
    pairs whose cycles coincide."""
    second = [j for j, rel in enumerate(orbit.relations) if rel.kind == "second"]
    circ = orbit.family.circle

    def cycle(j):
        rel = orbit.relations[j]
        return [orbit.points[j][i].value for i in range(rel.l, rel.q)]

    def close(x, y):
        d = x - y
        if circ:
            d -= round(d)
        return abs(d) <= tol

    hit = set()
    for a, j in enumerate(second):
        for jp in second[a + 1:]:
            if any(close(x, y) for x in cycle(j) for y in cycle(jp)):
                hit.update((j, jp))
    out: list[complex] = []
    for j in sorted(hit):
        rel = orbit.relations[j]
        m = rel.q - rel.l
        mult = orbit.Dg_n(j, m, start=rel.l)
        for root in np.roots([1.0] + [0.0] * (m - 1) + [-mult]):
            if not any(abs(root - r) <= 1e-9 * max(1.0, abs(r)) for r in out):
                out.append(complex(root))
    return out


def det_quotient(orbit: MarkedOrbit, defo: Deformation) -> complex:
    return complex(np.linalg.det(jacobian_R(orbit, defo)) / orbit_product(orbit))


def positively_oriented(orbit: MarkedOrbit, defo: Deformation | None = None) -> tuple[bool, float]:
    """Sign of det DR(c_1) / prod Dg^(q_j-1)(c_{1,j}).

    Raises ZeroDeterminant when the quotient is numerically zero; that case
    is a finding (a degenerate direction), not a failed transversality proof.
    """
    defo = orbit.family.deformation(orbit.params) if defo is None else defo
    qt = det_quotient(orbit, defo)
    scale = max(1.0, abs(qt.imag))
    if abs(qt) < ZERO_DET * scale:
        raise ZeroDeterminant(qt)
    val = qt.real
    return val > 0, val


@dataclass
class DeformationMatrices:
    D: Callable[[complex], np.ndarray]
    R_jacobian: np.ndarray
    trans_quotient: float
    exceptional: list = field(default_factory=list)
    det_D1: complex = 0j


def deformation_matrices(orbit: MarkedOrbit, defo: Deformation | None = None) -> DeformationMatrices:
    defo = orbit.family.deformation(orbit.params) if defo is None else defo
    J = jacobian_R(orbit, defo)
    return DeformationMatrices(
        D=lambda rho: D_rho(orbit, defo, rho),
        R_jacobian=J,
        trans_quotient=float((np.linalg.det(J) / orbit_product(orbit)).real),
        exceptional=exceptional_values(orbit),
        det_D1=complex(np.linalg.det(D_rho(orbit, defo, 1.0))),
    )


def fd_trans_identity(family, c: float, q: int, h: float | None = None) -> float:
    """[d/dc f_c^q(crit)] / Df_c^(q-1)(c_1) by central differences (1D families).

    With ``h`` unset, Richardson-combined differences are taken on a halving
    ladder of steps and the estimate that moves least between rungs is kept.
    """
    from .families import Side, critical_data

    x0 = critical_data(family, [c])[0].point.value

    def fq(cc):
        y = x0
        for _ in range(q):
            y = family.value([cc], y, Side.TWO)
        return y

    def central(step):
        return (fq(c + step) - fq(c - step)) / (2 * step)

    if h is not None:
        num = central(h * max(1.0, abs(c)))
    else:
        step = 1e-3 * max(1.0, abs(c))
        prev, best, num = None, math.inf, 0.0
        d_prev = central(step)
        for _ in range(22):
            step /= 2
            d = central(step)
            rich = (4.0 * d - d_prev) / 3.0
            d_prev = d
            if prev is not None and abs(rich - prev) < best:
                best, num = abs(rich - prev), rich
            prev = rich
    y, den = family.value([c], x0, Side.TWO), 1.0
    for _ in range(q - 1):
        den *= family.deriv([c], y, Side.TWO)
        y = family.value([c], y, Side.TWO)
    return num / den


def report(orbit: MarkedOrbit, defo: Deformation | None = None) -> dict:
    """JSON-ready summary of the transversality data of one orbit."""
    defo = orbit.family.deformation(orbit.params) if defo is None else defo
    mats = deformation_matrices(orbit, defo)
    out = {
        "orbit": orbit.summary(),
        "params": list(orbit.params),
        "det_D1": [mats.det_D1.real, mats.det_D1.imag],
        "quotient": mats.trans_quotient,
        "exceptional": [[z.real, z.imag] for z in mats.exceptional],
        "zero_det_threshold": ZERO_DET,
    }
    if abs(mats.trans_quotient) < ZERO_DET:
        out["verdict"] = False
        out["finding"] = "det quotient vanishes: degenerate direction, transversality not asserted"
    else:
        out["verdict"] = bool(mats.trans_quotient > 0)
    try:
        out["trans_sum"] = trans_sum(orbit, defo)
    except WrongShape:
        pass
    return out
