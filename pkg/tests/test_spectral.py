import math

import numpy as np
import pytest

from aperiodix.errors import SizeLimit
from aperiodix.spectral import (
    HoppingModel,
    OnsiteModel,
    TightBindingChain,
    _sturm_count,
    brute_force_eigs,
    build_chain,
    counting_function,
    detect_gaps,
    eigenvalues_tridiag,
)
from aperiodix.substitution import builtin_rule, expand_word

GOLDEN = (1 + math.sqrt(5)) / 2


def fibonacci_word(order):
    rule = builtin_rule("fibonacci")
    return rule.project(expand_word(rule, "a", order))


def test_build_chain_onsite():
    chain = build_chain("ab", OnsiteModel(0.0, 1.0))
    assert np.allclose(chain.onsite, [0.0, 1.0])
    assert np.allclose(chain.hopping, [1.0])


def test_build_chain_hopping():
    chain = build_chain("aaa", HoppingModel(1.0, 0.0, 1.0))
    assert np.allclose(chain.onsite, 0.0)
    assert np.allclose(chain.hopping, [math.exp(-1.0), math.exp(-1.0)])


def test_build_chain_fibonacci_size():
    chain = build_chain(fibonacci_word(10), OnsiteModel(0.0, 1.0))
    assert chain.size == 144


def test_eigenvalues_three_site_closed_form():
    chain = build_chain("aaa", OnsiteModel(0.0, 0.0))
    eigs = eigenvalues_tridiag(chain).eigenvalues
    expected = [-math.sqrt(2) / 2, 0.0, math.sqrt(2) / 2]
    assert np.allclose(eigs, expected, atol=1e-12)


def test_eigenvalues_single_site():
    chain = TightBindingChain(np.array([3.5]), np.array([]))
    assert np.allclose(eigenvalues_tridiag(chain).eigenvalues, [1.75])


def test_eigenvalues_open_chain_dispersion():
    # free chain of N sites: matrix eigenvalues 2 cos(j pi / (N+1))
    n = 6
    chain = build_chain("a" * n, OnsiteModel(0.0, 0.0))
    eigs = eigenvalues_tridiag(chain).eigenvalues
    expected = sorted(math.cos(j * math.pi / (n + 1)) for j in range(1, n + 1))
    assert np.allclose(eigs, expected, atol=1e-12)


def test_oracle_two_site():
    chain = build_chain("aa", OnsiteModel(0.0, 0.0))
    eigs = brute_force_eigs(chain).eigenvalues
    assert np.allclose(eigs, [-0.5, 0.5], atol=1e-12)


def test_oracle_size_limit():
    chain = build_chain("a" * 13, OnsiteModel(0.0, 0.0))
    with pytest.raises(SizeLimit):
        brute_force_eigs(chain)


def test_oracle_equivalence_randomised():
    rng = np.random.default_rng(7)
    for _ in range(60):
        n = int(rng.integers(2, 13))
        word = "".join(rng.choice(["a", "b"], n))
        va, vb = rng.uniform(-2.0, 2.0, 2)
        if rng.random() < 0.5:
            chain = build_chain(word, OnsiteModel(va, vb))
        else:
            chain = build_chain(word, HoppingModel(va, vb, float(rng.uniform(0.1, 1.5))))
        e_main = eigenvalues_tridiag(chain).eigenvalues
        e_oracle = brute_force_eigs(chain).eigenvalues
        assert np.max(np.abs(e_main - e_oracle)) < 1e-10


def test_counting_function():
    chain = build_chain("aaa", OnsiteModel(0.0, 0.0))
    spec = eigenvalues_tridiag(chain)
    assert counting_function(spec, -10.0) == 0.0
    assert counting_function(spec, 10.0) == 1.0
    assert counting_function(spec, 0.1) == pytest.approx(2 / 3)


def test_sturm_count_matches_counting_function():
    rng = np.random.default_rng(3)
    word = "".join(rng.choice(["a", "b"], 40))
    chain = build_chain(word, OnsiteModel(-0.7, 1.3))
    spec = eigenvalues_tridiag(chain)
    b2 = chain.hopping**2
    for e in rng.uniform(-1.5, 1.5, 25):
        # counts at 2e (matrix convention) equal N * counting at e, except
        # exactly on an eigenvalue; shift off by a hair
        x = 2 * e + 1e-13
        count = int(_sturm_count(chain.onsite, b2, np.array([x]))[0])
        assert count == round(spec.size * counting_function(spec, e))


def test_shift_covariance():
    word = fibonacci_word(8)
    base = build_chain(word, OnsiteModel(0.0, 1.0))
    shifted = build_chain(word, OnsiteModel(2.0, 3.0))  # v + 2
    e0 = eigenvalues_tridiag(base).eigenvalues
    e1 = eigenvalues_tridiag(shifted).eigenvalues
    assert np.max(np.abs(e1 - (e0 + 1.0))) < 1e-12


def test_gap_ids_invariant_under_shift():
    word = fibonacci_word(12)
    g0 = detect_gaps(eigenvalues_tridiag(build_chain(word, OnsiteModel(0.0, 1.0))))
    g1 = detect_gaps(eigenvalues_tridiag(build_chain(word, OnsiteModel(5.0, 6.0))))
    assert [g.ids_value for g in g0] == [g.ids_value for g in g1]


def test_interlacing_against_oracle():
    rng = np.random.default_rng(13)
    for _ in range(20):
        n = int(rng.integers(3, 13))
        word = "".join(rng.choice(["a", "b"], n))
        chain = build_chain(word, OnsiteModel(*rng.uniform(-2, 2, 2)))
        full = brute_force_eigs(chain).eigenvalues
        sub = brute_force_eigs(
            TightBindingChain(chain.onsite[:-1], chain.hopping[:-1])).eigenvalues
        for i in range(n - 1):
            assert full[i] <= sub[i] + 1e-10
            assert sub[i] <= full[i + 1] + 1e-10


def test_detect_gaps_periodic_two_band():
    chain = build_chain("ab" * 100, OnsiteModel(0.0, 2.0))
    spec = eigenvalues_tridiag(chain)
    gaps = detect_gaps(spec, rel_threshold=10.0)
    interior = [g for g in gaps if 0.0 < g.ids_value < 1.0]
    assert len(interior) == 1
    assert interior[0].ids_value == pytest.approx(0.5, abs=1e-12)


def test_detect_gaps_fibonacci_main_ids():
    word = fibonacci_word(14)  # N = 987
    spec = eigenvalues_tridiag(build_chain(word, OnsiteModel(0.0, 1.0)))
    gaps = sorted(detect_gaps(spec, 10.0), key=lambda g: -g.width)
    top2 = sorted(g.ids_value for g in gaps[:2])
    assert abs(top2[0] - (1 - 1 / GOLDEN)) < 2e-3
    assert abs(top2[1] - 1 / GOLDEN) < 2e-3


def test_detect_gaps_infinite_threshold():
    spec = eigenvalues_tridiag(build_chain("ab" * 20, OnsiteModel(0.0, 1.0)))
    assert detect_gaps(spec, rel_threshold=math.inf) == []


def test_eigenvalues_within_gershgorin():
    chain = build_chain(fibonacci_word(9), OnsiteModel(-1.0, 1.0))
    eigs = eigenvalues_tridiag(chain).eigenvalues * 2
    radius = np.zeros(chain.size)
    radius[:-1] += chain.hopping
    radius[1:] += chain.hopping
    assert eigs[0] >= np.min(chain.onsite - radius) - 1e-9
    assert eigs[-1] <= np.max(chain.onsite + radius) + 1e-9
