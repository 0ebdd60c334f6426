import math
import random

import pytest
import sympy

from aperiodix.cohomology import (
    DirectLimitGroup,
    cech_h1,
    collar,
    direct_limit,
    fixed_point_period,
    smith_normal_form,
    trace_image,
)
from aperiodix.exactla import mat_mul
from aperiodix.groups import contains, group_for_family
from aperiodix.substitution import (
    SubstitutionRule,
    builtin_rule,
    int_det,
    perron_data,
)

FAMILIES = ("periodic", "fibonacci", "thue-morse", "period-doubling", "rudin-shapiro")


# -- collaring ---------------------------------------------------------------

def test_collar_fibonacci_stable():
    col = collar(builtin_rule("fibonacci"))
    # legal triples of the Fibonacci word: aab, aba, baa, bab
    assert {"".join(s) for s in col.symbols} == {"aab", "aba", "baa", "bab"}
    pd = perron_data(col.occurrence())
    assert pd.lambda1 == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-9)


def test_collar_periodic():
    col = collar(builtin_rule("periodic"))
    assert {"".join(s) for s in col.symbols} == {"bab", "aba"}


def test_collar_thue_morse():
    col = collar(builtin_rule("thue-morse"))
    assert col.size == 6
    pd = perron_data(col.occurrence())
    assert pd.lambda1 == pytest.approx(2.0, abs=1e-9)


def test_collar_column_sums_match_image_lengths():
    for name in FAMILIES:
        col = collar(builtin_rule(name))
        for j, img in enumerate(col.images):
            assert sum(col.matrix[i][j] for i in range(col.size)) == len(img)


# -- Smith normal form -------------------------------------------------------

def test_snf_examples():
    _, d, _ = smith_normal_form([[2, 4], [6, 8]])
    assert [d[0][0], d[1][1]] == [2, 4]
    _, d, _ = smith_normal_form([[1, 0], [0, 1]])
    assert d == [[1, 0], [0, 1]]
    _, d, _ = smith_normal_form([[0]])
    assert d == [[0]]


def test_snf_contract_random():
    rng = random.Random(3)
    for _ in range(60):
        rows = rng.randint(1, 5)
        cols = rng.randint(1, 5)
        a = [[rng.randint(-8, 8) for _ in range(cols)] for _ in range(rows)]
        u, d, v = smith_normal_form(a)
        assert mat_mul(mat_mul(u, a), v) == d
        assert abs(int_det(u)) == 1
        assert abs(int_det(v)) == 1
        diag = [d[i][i] for i in range(min(rows, cols))]
        for x, y in zip(diag, diag[1:]):
            assert (x == 0 and y == 0) or (x != 0 and y % x == 0)


# -- direct limits -----------------------------------------------------------

def test_direct_limit_unimodular():
    g = direct_limit([[1, 1], [1, 0]])
    assert g == DirectLimitGroup(2, (), ((1, 1), (1, 0)), True)
    assert g.structure_name == "Z^2"


def test_direct_limit_doubling():
    g = direct_limit([[2]])
    assert (g.free_rank, g.localized) == (0, ((2, 1),))
    assert g.structure_name == "Z[1/2]"


def test_direct_limit_identity():
    g = direct_limit([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert (g.free_rank, g.localized) == (3, ())


def test_direct_limit_zero_and_nilpotent():
    assert direct_limit([[0]]).free_rank == 0
    assert direct_limit([[0, 1], [0, 0]]).free_rank == 0


def test_direct_limit_mixed_block():
    # eigenvalues 2 and 1: Z[1/2] (+) Z
    g = direct_limit([[2, 1], [0, 1]])
    assert (g.free_rank, g.localized) == (1, ((2, 1),))


def test_direct_limit_cross_prime_glue_unrecognized():
    # eigenvalues 2 and 5 with eigenlattice of index 3: the limit is a
    # genuinely indecomposable rank-2 group, not Z[1/2] (+) Z[1/5]
    g = direct_limit([[4, -1], [-2, 3]])
    assert not g.recognized


def test_direct_limit_split_two_primes():
    g = direct_limit([[2, 0], [0, 3]])
    assert g.recognized
    assert (g.free_rank, g.localized) == (0, ((2, 1), (3, 1)))


def test_direct_limit_conjugation_invariant():
    rng = random.Random(5)
    base = [[2, 1], [0, 1]]
    for _ in range(20):
        # random unimodular conjugator from elementary operations
        u = [[1, 0], [0, 1]]
        for _ in range(4):
            q = rng.randint(-3, 3)
            if rng.random() < 0.5:
                u = mat_mul(u, [[1, q], [0, 1]])
            else:
                u = mat_mul(u, [[1, 0], [q, 1]])
        uinv = [[u[1][1], -u[0][1]], [-u[1][0], u[0][0]]]
        assert int_det(u) == 1
        conj = mat_mul(mat_mul(u, base), uinv)
        g = direct_limit(conj)
        assert (g.free_rank, g.localized) == (1, ((2, 1),))


# -- Cech H1 (Table 1 values) ------------------------------------------------

EXPECTED_H1 = {
    "periodic": (1, ()),
    "fibonacci": (2, ()),
    "thue-morse": (1, ((2, 1),)),
    "period-doubling": (1, ((2, 1),)),
    "rudin-shapiro": (1, ((2, 3),)),
}


@pytest.mark.parametrize("family", FAMILIES)
def test_cech_h1_table(family):
    g = cech_h1(builtin_rule(family))
    assert g.recognized
    assert (g.free_rank, g.localized) == EXPECTED_H1[family]


def test_cech_h1_rank_matches_nonzero_eigenvalues():
    # rank over Q of H1 equals the count of nonzero eigenvalues of the
    # induced matrix on its eventual image
    for family in ("fibonacci", "thue-morse", "period-doubling"):
        g = cech_h1(builtin_rule(family))
        mat = sympy.Matrix([list(r) for r in g.presentation])
        nonzero = sum(mult for val, mult in mat.eigenvals().items() if val != 0)
        assert g.free_rank + sum(m for _, m in g.localized) == nonzero


def test_common_unimodular_rank_equals_alphabet():
    g = cech_h1(builtin_rule("fibonacci"))
    assert g.free_rank == len(builtin_rule("fibonacci").alphabet)


def test_fixed_point_period_detection():
    assert fixed_point_period(builtin_rule("periodic")) == 2
    for family in ("fibonacci", "thue-morse", "period-doubling", "rudin-shapiro"):
        assert fixed_point_period(builtin_rule(family)) is None


# -- trace image (Table 1 values) ----------------------------------------------

EXPECTED_TRACE_NAME = {
    "periodic": "(1/2)Z",
    "fibonacci": "Z+rho*Z(rho=0.6180339887)",
    "thue-morse": "(1/3)Z[1/2]",
    "period-doubling": "(1/3)Z[1/2]",
    "rudin-shapiro": "Z[1/2]",
}


@pytest.mark.parametrize("family", FAMILIES)
def test_trace_image_table(family):
    group = trace_image(builtin_rule(family))
    assert group.canonical_name == EXPECTED_TRACE_NAME[family]
    assert group == group_for_family(family)


@pytest.mark.parametrize("family", FAMILIES)
def test_trace_group_contains_one(family):
    assert contains(1.0, trace_image(builtin_rule(family)), tol=1e-9)


def test_custom_rule_without_cp_counterpart():
    # two-letter rule with det = -2 (Pisot, not unimodular)
    rule = SubstitutionRule(("a", "b"), {"a": "abb", "b": "a"})
    h1 = cech_h1(rule)
    assert h1.recognized and (h1.free_rank, h1.localized) == (1, ((2, 1),))
    assert trace_image(rule).canonical_name == "Z[1/2]"


def test_tribonacci_h1_free_trace_unsupported():
    from aperiodix.errors import Unrecognized

    rule = SubstitutionRule(("a", "b", "c"), {"a": "ab", "b": "c", "c": "a"})
    h1 = cech_h1(rule)
    # unimodular cubic Pisot: free of rank = alphabet size
    assert h1.recognized and (h1.free_rank, h1.localized) == (3, ())
    with pytest.raises(Unrecognized):
        trace_image(rule)  # cubic Perron root is outside the supported kinds
