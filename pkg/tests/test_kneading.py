from kneadlab.families import make_family
from kneadlab.kneading import (
    KneadingSequence,
    Order,
    constant_slope_entropy,
    itinerary,
    kneading,
    mt_compare,
    scan,
)

K = KneadingSequence


def test_basilica_itinerary():
    it = itinerary(make_family("quad"), [-1.0], 0.0, 6, 1e-9)
    assert it.symbols == (-1, 0) and it.period == 2


def test_fixed_critical_point():
    k = kneading(make_family("quad"), [0.0], 6)
    assert k.symbols == (0,) and k.period == 1


def test_airplane_word():
    k = kneading(make_family("quad"), [-1.7548776662466927], 6)
    assert k.symbols == (-1, 1, 0) and k.period == 3


def test_full_tent():
    assert str(kneading(make_family("tent"), [1.0], 6)) == "+-----"


def test_mt_order_examples():
    assert mt_compare(K.parse("-0"), K.parse("0")) == Order.LESS
    assert mt_compare(K.parse("-+0"), K.parse("-+0")) == Order.EQUAL
    assert mt_compare(K((-1, -1, 1)), K((-1, 1, 1))) == Order.GREATER


def test_truncated_prefixes_are_undecided():
    assert mt_compare(K.parse("-+"), K.parse("-+")) == Order.UNDECIDED


def test_entropy_values():
    assert constant_slope_entropy(2.0) == 0.6931471805599453
    assert abs(constant_slope_entropy((1 + 5 ** 0.5) / 2) - 0.481212) < 1e-6
    assert constant_slope_entropy(1.0) == 0.0


def test_short_scan_has_no_decrease():
    recs = scan(make_family("quad"), -2.0, 0.25, 101, 30)
    assert all(r.compare_to_prev != Order.GREATER.value for r in recs)
