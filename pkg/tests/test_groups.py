import math
import random
from fractions import Fraction

import pytest

from aperiodix.errors import UnknownFamily
from aperiodix.exactla import QuadExt
from aperiodix.groups import (
    contains,
    cyclic_group,
    group_for_family,
    localized_group,
    nearest_element,
    two_gen_group,
)

GOLDEN = (1 + math.sqrt(5)) / 2


def test_group_for_family_names():
    assert group_for_family("fibonacci").canonical_name == "Z+rho*Z(rho=0.6180339887)"
    assert group_for_family("thue-morse").canonical_name == "(1/3)Z[1/2]"
    assert group_for_family("period-doubling").canonical_name == "(1/3)Z[1/2]"
    assert group_for_family("rudin-shapiro").canonical_name == "Z[1/2]"
    assert group_for_family("periodic").canonical_name == "(1/2)Z"
    with pytest.raises(UnknownFamily):
        group_for_family("penrose")


def test_rational_two_gen_collapses_to_cyclic():
    g = two_gen_group(Fraction(3, 4))
    assert g.kind == "cyclic" and g.q == 4
    assert g == cyclic_group(4)


def test_localized_canonicalisation():
    assert localized_group(Fraction(2, 3), 2) == localized_group(Fraction(1, 6), 2)
    assert localized_group(Fraction(4), 2).canonical_name == "Z[1/2]"


def test_nearest_fibonacci_gap_label():
    g = group_for_family("fibonacci")
    elem, residual = nearest_element(0.382, g, q_max=3)
    assert elem.coordinates == (1, -1)
    assert residual < 1e-3


def test_nearest_thue_morse_exact():
    g = group_for_family("thue-morse")
    elem, residual = nearest_element(1 / 3, g)
    assert elem.coordinates == (1, 0)
    assert residual == 0.0


def test_nearest_rudin_shapiro_dyadic():
    g = group_for_family("rudin-shapiro")
    elem, residual = nearest_element(0.5, g)
    assert residual == 0.0
    assert elem.coordinates == (1, 1)


def test_contains_examples():
    fib = group_for_family("fibonacci")
    assert contains(1 / GOLDEN, fib, tol=1e-9)
    rs = group_for_family("rudin-shapiro")
    # 1/5 is not dyadic: at the default depth the best residual is 1/(5*2^12)
    assert not contains(1 / 5, rs, tol=1e-6)
    for family in ("periodic", "fibonacci", "thue-morse", "rudin-shapiro"):
        assert contains(0.0, group_for_family(family), tol=0.0)


def test_residual_monotone_in_bounds():
    g = group_for_family("fibonacci")
    x = 0.27182818
    residuals = [nearest_element(x, g, q_max=q)[1] for q in (2, 5, 10, 20, 30)]
    assert all(r1 >= r2 - 1e-15 for r1, r2 in zip(residuals, residuals[1:]))


def test_two_gen_exact_elements_and_floor():
    g = group_for_family("fibonacci")
    rho = g.rho
    rng = random.Random(11)
    # residuals vanish at true group elements
    for _ in range(50):
        p, q = rng.randint(-10, 10), rng.randint(-10, 10)
        _, res = nearest_element(p + q * rho, g)
        assert res < 1e-12
    # at random reals, bounded search leaves a strictly positive median gap
    residuals = sorted(nearest_element(rng.random(), g, q_max=30)[1]
                       for _ in range(200))
    median = residuals[100]
    assert median > 1e-5  # measured floor ~1e-4 at |p|,|q| <= 30


def test_group_element_round_trip():
    g = group_for_family("fibonacci")
    elem, _ = nearest_element(0.618, g)
    p, q = elem.coordinates
    assert abs(elem.value - (p + q * g.rho)) < 1e-14
    lg = group_for_family("thue-morse")
    elem, _ = nearest_element(0.4, lg)
    m, n = elem.coordinates
    assert abs(elem.value - float(lg.scale) * m / lg.prime**n) < 1e-14
    assert 0.0 <= elem.reduced_mod_1 < 1.0


def test_exact_equality_via_lattices():
    a = two_gen_group(QuadExt(Fraction(-1, 2), Fraction(1, 2), 5))
    # same group generated differently: Z + tau Z equals Z + (tau - 1) Z
    b = two_gen_group(QuadExt(Fraction(1, 2), Fraction(1, 2), 5))
    assert a == b
