"""Itineraries, kneading sequences and the Milnor-Thurston order."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .errors import KneadlabError, OrbitEscaped
from .families import Family, Side, as_point, critical_data

MAX_ORBIT = 4096
DELTA_HIT = 1e-9

_CHARS = {-1: "-", 0: "0", 1: "+"}
_PARSE = {"-": -1, "−": -1, "0": 0, "+": 1, "L": -1, "R": 1, "C": 0}


@dataclass(frozen=True)
class KneadingSequence:
    """Symbols i_1, i_2, ... over {-1, 0, +1}.

    ``period`` is set when the word stops on a critical hit that closes a
    superstable cycle; ``truncated`` means the word was cut at the requested
    length without such a hit.
    """

    symbols: tuple[int, ...]
    period: Optional[int] = None
    truncated: bool = False

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return word_to_str(self.symbols)

    @classmethod
    def parse(cls, word: str) -> "KneadingSequence":
        syms = tuple(_PARSE[ch] for ch in word.strip())
        period = len(syms) if syms and syms[-1] == 0 else None
        return cls(syms, period, truncated=period is None)


@dataclass(frozen=True)
class KneadingPair:
    """The two one-sided itineraries of a Lorenz map (from c- and c+)."""

    minus: KneadingSequence
    plus: KneadingSequence

    def __str__(self):
        return f"{self.minus}|{self.plus}"


def word_to_str(symbols) -> str:
    return "".join(_CHARS[s] for s in symbols)


class Order(enum.Enum):
    LESS = "Less"
    EQUAL = "Equal"
    GREATER = "Greater"
    UNDECIDED = "UndecidedPrefix"


def _sign(y: float, ref: float, delta: float) -> int:
    if abs(y - ref) <= delta:
        return 0
    return 1 if y > ref else -1


def _turning_point(family: Family, params) -> float:
    crit = critical_data(family, params)
    if len(crit) == 1:
        return crit[0].point.value
    if family.kind in ("LorenzAffine", "LorenzFlat"):
        return crit[0].point.value
    raise KneadlabError("kneading words are defined for unimodal and Lorenz kinds")


def itinerary(family: Family, params, x0, n: int, delta_hit: float = DELTA_HIT) -> KneadingSequence:
    """Signs of f^k(x0) - t for k = 1..n, where t is the turning point.

    A value within ``delta_hit`` of t is recorded as 0 and ends the word; if
    x0 is itself the turning point that hit is reported as the period.
    """
    if n > MAX_ORBIT:
        raise ValueError(f"n must be <= {MAX_ORBIT}")
    if delta_hit < 0:
        raise ValueError("delta_hit must be >= 0")
    p = family.check_params(params)
    ref = _turning_point(family, p)
    x = as_point(x0)
    lo, hi = family.bounds(p)
    y, side = x.value, x.side
    syms = []
    for k in range(1, n + 1):
        y = family.value(p, y, side)
        side = Side.TWO
        if not (lo <= y <= hi) or not math.isfinite(y):
            raise OrbitEscaped(f"orbit left [{lo}, {hi}] at step {k}")
        s = _sign(y, ref, delta_hit)
        syms.append(s)
        if s == 0:
            period = k if abs(x.value - ref) <= delta_hit else None
            return KneadingSequence(tuple(syms), period, False)
    return KneadingSequence(tuple(syms), None, True)


def kneading(family: Family, params, n: int = 64, delta_hit: float = DELTA_HIT):
    """Kneading sequence of the critical point (pair of words for Lorenz kinds)."""
    crit = critical_data(family, params)
    if family.kind in ("LorenzAffine", "LorenzFlat"):
        minus, plus = (itinerary(family, params, cp.point, n, delta_hit) for cp in crit)
        return KneadingPair(minus, plus)
    if len(crit) != 1:
        raise KneadlabError("kneading words are defined for unimodal and Lorenz kinds")
    return itinerary(family, params, crit[0].point, n, delta_hit)


def mt_compare(k1, k2) -> Order:
    """Signed-lexicographic comparison using running products of symbols."""
    a = k1.symbols if isinstance(k1, KneadingSequence) else tuple(k1)
    b = k2.symbols if isinstance(k2, KneadingSequence) else tuple(k2)
    if not a or not b:
        raise ValueError("mt_compare needs nonempty words")
    prod_a = prod_b = 1
    for x, y in zip(a, b):
        prod_a *= x
        prod_b *= y
        if x != y:
            if prod_a < prod_b:
                return Order.LESS
            if prod_a > prod_b:
                return Order.GREATER
            return Order.UNDECIDED  # pragma: no cover - products differ when symbols do
    cut = any(getattr(k, "truncated", False) for k in (k1, k2))
    if len(a) == len(b) and not cut:
        return Order.EQUAL
    return Order.UNDECIDED


def constant_slope_entropy(s: float) -> float:
    """Topological entropy log s of a map with constant slope |s| >= 1."""
    if s < 1:
        raise ValueError("constant-slope entropy needs s >= 1")
    return math.log(s)


@dataclass
class ScanRecord:
    param: float
    word: str
    compare_to_prev: Optional[str] = None


def scan(family: Family, start: float, stop: float, steps: int, prefix: int = 40,
         delta_hit: float = DELTA_HIT) -> list[ScanRecord]:
    """Kneading words along a uniform parameter grid, each compared with the previous one."""
    out: list[ScanRecord] = []
    prev = None
    for i in range(steps):
        c = start + (stop - start) * i / (steps - 1) if steps > 1 else start
        k = kneading(family, [c], prefix, delta_hit)
        rec = ScanRecord(c, str(k), None if prev is None else mt_compare(prev, k).value)
        out.append(rec)
        prev = k
    return out
