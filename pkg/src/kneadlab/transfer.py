"""Transfer operators on the orbit of a marked map, and their spectra."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, WrongShape
from .families import Deformation, SidedPoint, Side
from .solver import MarkedOrbit
from .transversality import D_rho, exceptional_values

MAX_DIM = 256
MATCH_TOL = 1e-9


@dataclass
class TransferMatrix:
    """A dense operator together with the labels of its coordinates.

    For the operator on g(P) the labels are orbit points; for the J-indexed
    operator they are pairs (i, j) with j in marked order (0-based).
    """

    labels: list
    matrix: np.ndarray
    eigenvalues: np.ndarray = field(default=None)
    spectral_radius: float = 0.0
    collisions: bool = False

    def __post_init__(self):
        if self.eigenvalues is None:
            self.eigenvalues, self.spectral_radius = spectrum(self.matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def charpoly_det(self, rho: complex) -> complex:
        return complex(np.linalg.det(np.eye(self.dim) - rho * self.matrix))


def spectrum(matrix) -> tuple[np.ndarray, float]:
    """Eigenvalues sorted by decreasing modulus (ties broken by argument)."""
    M = np.asarray(matrix)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise WrongShape("spectrum needs a square matrix")
    if M.shape[0] > MAX_DIM:
        raise WrongShape(f"dimension {M.shape[0]} exceeds {MAX_DIM}")
    if M.shape[0] == 0:
        return np.zeros(0, dtype=complex), 0.0
    try:
        ev = np.linalg.eigvals(M).astype(complex)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    keys = [(-round(abs(z), 12), round(float(np.angle(z)), 12)) for z in ev]
    ev = ev[sorted(range(len(ev)), key=keys.__getitem__)]
    return ev, float(abs(ev[0]))


def _L_row(orbit: MarkedOrbit, defo: Deformation, x: SidedPoint) -> np.ndarray:
    v = np.asarray(defo.dG_dw(defo.base_w, x.value, x), dtype=complex)
    return v[list(orbit.order)]


def _dp(orbit: MarkedOrbit, defo: Deformation) -> np.ndarray:
    idx = list(orbit.order)
    return np.asarray(defo.dp_dw(defo.base_w), dtype=complex)[np.ix_(idx, idx)]


def _mu_targets(orbit: MarkedOrbit) -> set:
    return {rel.mu for rel in orbit.relations if rel.kind == "first"}


def J_labels(orbit: MarkedOrbit) -> list[tuple[int, int]]:
    mus = _mu_targets(orbit)
    out = []
    for j, rel in enumerate(orbit.relations):
        for i in range(rel.q):
            if i == 0 and j not in mus:
                continue
            out.append((i, j))
    return out


def build_AJ(orbit: MarkedOrbit, defo: Deformation | None = None) -> TransferMatrix:
    """Operator on the orbit positions (i, j) in J."""
    defo = orbit.family.deformation(orbit.params) if defo is None else defo
    labels = J_labels(orbit)
    pos = {lab: n for n, lab in enumerate(labels)}
    nu = orbit.nu
    dp = _dp(orbit, defo)

    def v1(k):
        # c_{1,k} coincides with c_{0,mu(k)} when the orbit closes at once
        rel = orbit.relations[k]
        if rel.q == 1:
            return pos[(0, rel.mu)]
        return pos[(1, k)]

    A = np.zeros((len(labels), len(labels)), dtype=complex)
    for (i, j), row in pos.items():
        rel = orbit.relations[j]
        if i == 0:
            for k in range(nu):
                A[row, v1(k)] += dp[j, k]
            continue
        x = orbit.points[j][i]
        dg = orbit.dg[j][i]
        if i < rel.q - 1:
            A[row, pos[(i + 1, j)]] += 1.0 / dg
        elif rel.kind == "first":
            A[row, pos[(0, rel.mu)]] += 1.0 / dg
        else:
            A[row, pos[(rel.l, j)]] += 1.0 / dg
        L = _L_row(orbit, defo, x)
        for k in range(nu):
            A[row, v1(k)] -= L[k] / dg
    return TransferMatrix(labels, _realify(A))


def _realify(A: np.ndarray) -> np.ndarray:
    return A.real.copy() if np.all(A.imag == 0) else A


def _same(x: SidedPoint, y: SidedPoint, circle: bool) -> bool:
    if x.side != y.side:
        return False
    d = x.value - y.value
    if circle:
        d -= round(d)
    return abs(d) <= MATCH_TOL * max(1.0, abs(x.value))


def image_points(orbit: MarkedOrbit) -> tuple[list[SidedPoint], dict]:
    """Distinct points of g(P) and a map (i, j) -> index for every orbit slot
    i >= 1 (slot q_j is the closing point)."""
    circle = orbit.family.circle
    pts: list[SidedPoint] = []
    slot = {}
    for j, rel in enumerate(orbit.relations):
        for i in range(1, rel.q + 1):
            x = orbit.points[j][i]
            for n, y in enumerate(pts):
                if _same(x, y, circle):
                    slot[(i, j)] = n
                    break
            else:
                slot[(i, j)] = len(pts)
                pts.append(x)
    return pts, slot


def build_A(orbit: MarkedOrbit, defo: Deformation | None = None, dg_scale: float = 1.0,
            dp_scale: float = 1.0) -> TransferMatrix:
    """Operator on g(P): sends the derivative of a motion to that of its lift.

    ``collisions`` is set when two slots of J share a point, i.e. when this
    operator differs from the J-indexed one.  The scale arguments rescale Dg
    and dp/dw, which is what conjugating by a contraction does.
    """
    defo = orbit.family.deformation(orbit.params) if defo is None else defo
    pts, slot = image_points(orbit)
    nu = orbit.nu
    dp = _dp(orbit, defo) * dp_scale
    c1 = [slot[(1, k)] for k in range(nu)]
    # one defining slot per point (any will do: the row only depends on x)
    owner = {}
    for (i, j), n in sorted(slot.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        owner.setdefault(n, (i, j))
    A = np.zeros((len(pts), len(pts)), dtype=complex)
    for n, x in enumerate(pts):
        i, j = owner[n]
        rel = orbit.relations[j]
        if i == rel.q and rel.kind == "first":
            # x is the marked point c_{0,mu}
            for k in range(nu):
                A[n, c1[k]] += dp[rel.mu, k]
            continue
        if i == rel.q:
            i = rel.l
        dg = orbit.dg[j][i] * dg_scale
        A[n, slot[(i + 1, j)]] += 1.0 / dg
        L = _L_row(orbit, defo, x)
        for k in range(nu):
            A[n, c1[k]] -= L[k] / dg
    collisions = len(pts) != len(J_labels(orbit))
    return TransferMatrix(pts, _realify(A), collisions=collisions)


def char_identity_check(orbit: MarkedOrbit, defo: Deformation | None, rhos) -> dict:
    """Max |det(I - rho A_J) - det D(rho)| (and the same for A when it applies)."""
    defo = orbit.family.deformation(orbit.params) if defo is None else defo
    AJ = build_AJ(orbit, defo)
    A = build_A(orbit, defo)
    exc = exceptional_values(orbit)
    dev_J = dev_A = 0.0
    used = 0
    for rho in rhos:
        if any(abs(rho - e) < 1e-6 for e in exc):
            continue
        used += 1
        dD = complex(np.linalg.det(D_rho(orbit, defo, rho)))
        dev_J = max(dev_J, abs(AJ.charpoly_det(rho) - dD))
        if not A.collisions:
            dev_A = max(dev_A, abs(A.charpoly_det(rho) - dD))
    return {"max_dev_AJ": dev_J, "max_dev_A": None if A.collisions else dev_A, "samples": used}


def scaled_triple_check(orbit: MarkedOrbit, defo: Deformation | None, xi: float, tol: float = 1e-12) -> bool:
    """Contracting the triple by (1 - xi) must scale the operator by 1/(1 - xi)."""
    if not 0.0 <= xi < 1.0:
        raise ValueError("xi must lie in [0, 1)")
    defo = orbit.family.deformation(orbit.params) if defo is None else defo
    base = build_A(orbit, defo).matrix
    scaled = build_A(orbit, defo, dg_scale=1.0 - xi, dp_scale=1.0 / (1.0 - xi)).matrix
    return bool(np.all(np.abs(scaled - base / (1.0 - xi)) <= tol * max(1.0, np.abs(base).max())))


def matrix_to_json(tm: TransferMatrix) -> dict:
    def lab(x):
        if isinstance(x, SidedPoint):
            return {"x": float(x.value), "side": {Side.MINUS: "-", Side.PLUS: "+", Side.TWO: ""}[x.side]}
        return list(x)

    M = np.asarray(tm.matrix, dtype=complex)
    return {
        "labels": [lab(x) for x in tm.labels],
        "matrix_re": M.real.tolist(),
        "matrix_im": M.imag.tolist(),
        "eigenvalues": [[z.real, z.imag] for z in tm.eigenvalues],
        "spectral_radius": tm.spectral_radius,
        "collisions": tm.collisions,
    }
