import numpy as np
import pytest

from rmcover import orbit as ob
from rmcover.boolfn import BooleanFunction, apply_affine, monomial_masks
from rmcover.classify import classify_coset, fn_rep
from rmcover.field import AffineMap, compose
from rmcover.verify import random_affine_map


def test_coset_key_examples():
    assert ob.coset_key(fn_rep(0)) == 0
    assert ob.coset_key(BooleanFunction.from_anf_string("x1+x2x3+1", n=6)) == 0
    k1 = ob.coset_key(fn_rep(1))
    assert k1.bit_count() == 1
    top = BooleanFunction.from_anf_string("x1x2x3x4x5x6")
    assert ob.coset_key(fn_rep(9)) == ob.coset_key(top) ^ ob.coset_key(fn_rep(2))


def test_key_lift_round_trip(rng):
    for _ in range(20):
        k = int(rng.integers(0, 1 << 22))
        assert ob.coset_key(ob.key_lift(k)) == k


def test_coset_act_identity_and_inverse(rng):
    ident = AffineMap.identity(6)
    for _ in range(5):
        k = int(rng.integers(0, 1 << 22))
        assert ob.coset_act(k, ident) == k
        L = random_affine_map(rng)
        assert ob.coset_act(ob.coset_act(k, L), L.inverse()) == k


def test_coset_act_is_right_action(rng):
    for _ in range(5):
        k = int(rng.integers(0, 1 << 22))
        l1, l2 = random_affine_map(rng), random_affine_map(rng)
        assert ob.coset_act(ob.coset_act(k, l1), l2) == ob.coset_act(k, compose(l1, l2))


def test_translations_fix_degree4_keys_only(rng):
    ident_rows = tuple(tuple(1 if i == j else 0 for j in range(6)) for i in range(6))
    deg4_positions = [i for i, m in enumerate(ob._KEY_MASKS) if m.bit_count() == 4]
    # a random key supported on degree-4 monomials is fixed by every translation
    key4 = 0
    for p in deg4_positions:
        if rng.integers(0, 2):
            key4 |= 1 << p
    for c in range(64):
        tau = AffineMap(2, 6, ident_rows, tuple(c >> i & 1 for i in range(6)))
        assert ob.coset_act(key4, tau) == key4
    # the degree-6 key is moved by every nonzero translation (the 64
    # translates are pairwise distinct cosets: Table 5's orbit length for the
    # full-monomial class)
    key6 = ob.coset_key(fn_rep(7))
    images = set()
    for c in range(64):
        tau = AffineMap(2, 6, ident_rows, tuple(c >> i & 1 for i in range(6)))
        images.add(ob.coset_act(key6, tau))
    assert len(images) == 64


def test_orbit_sizes_small(agl6_gens):
    assert ob.bfs_orbit(ob.coset_key(fn_rep(0)), agl6_gens,
                        collect_matrices=False).orbit_size == 1
    assert ob.bfs_orbit(ob.coset_key(fn_rep(7)), agl6_gens,
                        collect_matrices=False).orbit_size == 64
    assert ob.bfs_orbit(ob.coset_key(fn_rep(1)), agl6_gens,
                        collect_matrices=False).orbit_size == 651


def test_orbit_size_generator_independent(agl6_gens, rng):
    h = random_affine_map(rng)
    conj = [compose(compose(h.inverse(), g), h) for g in agl6_gens]
    start = ob.coset_key(fn_rep(1))
    assert ob.bfs_orbit(start, conj, collect_matrices=False).orbit_size == 651


def test_fn10_orbit(fn10_orbit):
    assert fn10_orbit.orbit_size == 888832
    # faithful queue search; the published run reports 130843 (see notes)
    assert len(fn10_orbit.matrix_set) in (130843, 130844)


def test_orbit_elements_classify_to_class_10(fn10_orbit, rng):
    keys = fn10_orbit.transcript.keys
    sample = rng.choice(keys, size=1000, replace=False)
    for k in sample:
        assert classify_coset(ob.key_lift(int(k))) == 10


def test_transcript_words_reach_their_cosets(fn10_orbit, agl6_gens):
    tr = fn10_orbit.transcript
    start = ob.coset_key(fn_rep(10))
    for pos in (0, 1, 5000, 888831):
        key = int(tr.keys[pos])
        cur = start
        for gi in tr.word_for(key):
            cur = ob.coset_act(cur, agl6_gens[gi])
        assert cur == key


def test_matrix_set_members_invertible(matrix_set):
    rows = matrix_set.rows()
    inv = ob.gf2_invert_rows(rows)
    # A * A^-1 = I, batched
    prod = np.zeros_like(rows)
    for i in range(6):
        acc = np.zeros(rows.shape[0], dtype=np.uint8)
        for j in range(6):
            acc ^= (((rows[:, i] >> j) & 1) * inv[:, j])
        prod[:, i] = acc
    ident = np.array([1, 2, 4, 8, 16, 32], dtype=np.uint8)
    assert (prod == ident[None, :]).all()


def test_gf2_invert_rejects_singular():
    singular = np.array([[3, 3, 4, 8, 16, 32]], dtype=np.uint8)
    with pytest.raises(ValueError):
        ob.gf2_invert_rows(singular)


def test_ams_round_trip(tmp_path, matrix_set):
    path = tmp_path / "a.ams"
    matrix_set.save(path, meta={"command": "unit test"})
    loaded, meta = ob.MatrixSet.load_with_meta(path)
    assert np.array_equal(loaded.members, matrix_set.members)
    assert meta["command"] == "unit test"


def test_ams_truncation_detected(tmp_path, matrix_set):
    path = tmp_path / "a.ams"
    matrix_set.save(path)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) - 2000])
    with pytest.raises(ValueError, match="input hash mismatch"):
        ob.MatrixSet.load(path)


def test_all_orbit_lengths_partition(agl6_gens):
    lengths = ob.all_orbit_lengths(agl6_gens)
    assert sum(lengths) == 1 << 22
    from rmcover.field import agl_order

    order = agl_order(6, 2)
    assert all(order % ln == 0 for ln in lengths)
