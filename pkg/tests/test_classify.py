import pytest

from rmcover import classify as cl
from rmcover.boolfn import BooleanFunction, apply_affine, concat, homogeneous_part
from rmcover.nonlin import nl_r_recursive
from rmcover.verify import random_affine_map


def F(anf, n=None):
    return BooleanFunction.from_anf_string(anf, n=n)


def test_fn_rep_examples():
    assert cl.fn_rep(0) == BooleanFunction.zero(6)
    assert cl.fn_rep(2) == F("x1x2x4x5+x1x2x3x6")
    fn9 = cl.fn_rep(9)
    assert homogeneous_part(fn9, 6) == F("x1x2x3x4x5x6")
    assert homogeneous_part(fn9, 4) == cl.fn_rep(2)
    assert cl.fn_rep(10) == F("x1x2x3x4x5x6") + cl.fn_rep(3)


def test_fn_rep_bad_index():
    with pytest.raises(ValueError):
        cl.fn_rep(11)


def test_invariant_pairs_distinct():
    pairs = set()
    for i in range(11):
        f = cl.fn_rep(i)
        d = cl._coset_degree(f)
        v = nl_r_recursive(f, 3) if i else 0
        pairs.add((d, v))
    assert len(pairs) == 11


def test_classify_coset_examples(rng):
    assert cl.classify_coset(BooleanFunction.zero(6)) == 0
    shifted = cl.fn_rep(5) + F("x1x2x3+x4", n=6)
    assert cl.classify_coset(shifted) == 5
    for _ in range(3):
        L = random_affine_map(rng)
        assert cl.classify_coset(apply_affine(cl.fn_rep(8), L)) == 8


def test_classify_coset_constant_on_cosets(rng):
    from rmcover.boolfn import monomial_masks

    low_masks = [m for r in range(4) for m in monomial_masks(6, r)]
    for _ in range(5):
        i = int(rng.integers(0, 11))
        anf = 0
        for m in low_masks:
            if rng.integers(0, 2):
                anf |= 1 << m
        g = BooleanFunction.from_anf(6, anf)
        assert cl.classify_coset(cl.fn_rep(i) + g) == i


def test_classify_requires_six_variables():
    with pytest.raises(ValueError):
        cl.classify_coset(BooleanFunction.zero(5))


def test_type_of_examples(rng):
    assert cl.type_of(concat(cl.fn_rep(2), cl.fn_rep(9))) == (2, 9)
    assert cl.type_of(concat(cl.fn_rep(9), cl.fn_rep(2))) == (2, 9)
    from rmcover.boolfn import MonomialSet

    L = random_affine_map(rng)
    p = MonomialSet.of(6, 3).function(int(rng.integers(0, 1 << 20)))
    f = concat(apply_affine(cl.fn_rep(6), L) + p, cl.fn_rep(10))
    assert cl.type_of(f) == (6, 10)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def stats(tables):
    return {i: cl.class_stats(i, tables[i]) for i in range(11)}


def test_exclusion_table(stats):
    bounds = cl.exclusion_table(stats)
    assert len(bounds) == 66
    assert cl.flagged_types(bounds) == [(2, 9), (2, 10), (3, 10), (6, 10)]
    assert bounds[(2, 9)] == 21
    # the published table carries ml_2(fn_0) = 0, which contradicts the
    # definition; the recomputed value is 18 (see the oracle test in
    # test_nonlin/test_acceptance), making bound(0,0) = 18, not 0
    assert bounds[(0, 0)] == 18


def test_rho_upper_bound(stats):
    assert cl.rho_upper_bound(stats) == 22
    attained = [i for i, s in stats.items() if s.nl3 + s.ml2 == 22]
    assert attained == [2, 3, 10]


def test_chain_bounds():
    b = cl.chain_bounds()
    assert b == {(3, 8): 60, (3, 9): 156, (3, 10): 372,
                 (4, 8): 28, (4, 9): 88, (4, 10): 244}


def test_class_stats_table_mismatch(tables):
    with pytest.raises(ValueError):
        cl.class_stats(1, tables[2])
