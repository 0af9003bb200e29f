"""Nonlinearity engines and the level-set tables that drive the proof.

nl_r(f) is the minimum Hamming distance from f to any function of degree at
most r.  Orders 0 and 1 are computed directly (weight, Walsh-Hadamard
spectrum); higher orders use the split recursion

    nl_r(f) = min over g in H_{n-1}^(r) u {0} of
              nl_{r-1}(f1 + g) + nl_{r-1}(f2 + g),

where f = f1 || f2 along the top variable.  The workhorse is the value
table of a base function: the full map g -> nl_{r-1}(base + g) over every
homogeneous degree-r coefficient word g (canonical monomial order).  Level
sets F(k) = {g : value = k} of these tables are the objects the covering
condition manipulates.

Everything heavy is vectorized: the degree-2 base case runs batched 2^n-point
Walsh transforms over all words at once, and the degree-3 tables combine the
two half-tables with a min-plus XOR convolution.  A full (n=6, r=3) table
(2^20 entries) builds in a few seconds.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .boolfn import (
    BooleanFunction,
    MonomialSet,
    monomial_masks,
    split,
    weight,
)

__all__ = [
    "nl0",
    "nl1",
    "nl_r",
    "nl_r_recursive",
    "nl_r_bruteforce",
    "ml_r",
    "NlTable",
    "LevelSet",
    "build_nl_table",
    "nl_table_values",
    "CoveringVerdict",
    "check_covering_condition",
    "ParityVerdict",
    "parity_check",
    "word_transform_columns",
    "transform_words",
    "TABLE_WORD_CAP",
    "BRUTE_FORCE_DIM_CAP",
]

# Largest 2^C(n,r) a value table may span (the (6,3) pipeline needs 2^20).
TABLE_WORD_CAP = 1 << 24
# Largest RM(r,n) dimension the brute-force oracle enumerates.  The (5,3)
# oracle-equivalence check needs dim RM(3,5) = 26.
BRUTE_FORCE_DIM_CAP = 26

NLT_MAGIC = b"NLT1"
NLT_ORDER_TAG = b"mask-asc"
_META_MAGIC = b"META"


# ---------------------------------------------------------------------------
# Orders 0 and 1
# ---------------------------------------------------------------------------


def nl0(f: BooleanFunction) -> int:
    """Distance to the nearest constant function."""
    w = weight(f)
    return min(w, (1 << f.n) - w)


def _wht(tt: int, n: int) -> list[int]:
    size = 1 << n
    w = [1 - 2 * (tt >> x & 1) for x in range(size)]
    h = 1
    while h < size:
        for start in range(0, size, 2 * h):
            for j in range(start, start + h):
                a, b = w[j], w[j + h]
                w[j], w[j + h] = a + b, a - b
        h <<= 1
    return w


def nl1(f: BooleanFunction) -> int:
    """First-order nonlinearity via the Walsh-Hadamard spectrum."""
    spectrum = _wht(f.tt, f.n)
    return (1 << (f.n - 1)) - max(abs(v) for v in spectrum) // 2


def _nl1_batch(tts: np.ndarray, n: int) -> np.ndarray:
    """nl1 of many functions given as packed uint64 truth tables."""
    size = 1 << n
    flat = np.ascontiguousarray(tts, dtype="<u8").reshape(-1)
    nfun = flat.shape[0]
    bits = np.unpackbits(flat.view(np.uint8).reshape(nfun, 8), axis=1,
                         bitorder="little", count=size)
    dtype = np.int16 if n >= 7 else np.int8
    a = (1 - 2 * bits.astype(dtype))
    for d in range(n):
        h = 1 << d
        a = a.reshape(nfun, size // (2 * h), 2, h)
        out = np.empty_like(a)
        out[:, :, 0, :] = a[:, :, 0, :] + a[:, :, 1, :]
        out[:, :, 1, :] = a[:, :, 0, :] - a[:, :, 1, :]
        a = out
    peak = np.abs(a.reshape(nfun, size)).max(axis=1)
    return ((size >> 1) - (peak >> 1)).astype(np.uint8)


# ---------------------------------------------------------------------------
# Word/truth-table machinery
# ---------------------------------------------------------------------------


def _monomial_tt(n: int, mask: int) -> int:
    tt = 0
    for x in range(1 << n):
        if x & mask == mask:
            tt |= 1 << x
    return tt


@lru_cache(maxsize=None)
def _word_tts(n: int, r: int) -> np.ndarray:
    """Truth tables (uint64) of every H_n^(r) coefficient word, by doubling."""
    masks = monomial_masks(n, r)
    out = np.zeros(1 << len(masks), dtype=np.uint64)
    width = 1
    for m in masks:
        out[width:2 * width] = out[:width] ^ np.uint64(_monomial_tt(n, m))
        width <<= 1
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _xor_index(m: int) -> np.ndarray:
    idx = np.arange(1 << m, dtype=np.intp)
    table = idx[:, None] ^ idx[None, :]
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _spread_tables(n: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Scatter tables embedding (u, v) half-words into the canonical word.

    A degree-r word g of n variables decomposes as g = u + x_n * v with
    u over H_{n-1}^(r) and v over H_{n-1}^(r-1); the tables map each half
    word to its bits' positions inside the canonical H_n^(r) index.
    """
    full_index = {m: i for i, m in enumerate(monomial_masks(n, r))}
    top = 1 << (n - 1)
    u_pos = [full_index[m] for m in monomial_masks(n - 1, r)]
    v_pos = [full_index[m | top] for m in monomial_masks(n - 1, r - 1)]

    def doubling(positions):
        out = np.zeros(1 << len(positions), dtype=np.uint32)
        width = 1
        for p in positions:
            out[width:2 * width] = out[:width] | np.uint32(1 << p)
            width <<= 1
        out.setflags(write=False)
        return out

    return doubling(u_pos), doubling(v_pos)


@lru_cache(maxsize=None)
def _scatter_index(n: int, r: int) -> np.ndarray:
    """Canonical word index for each (u, v) pair, ready for scattering."""
    spread_u, spread_v = _spread_tables(n, r)
    idx = (spread_u[:, None] | spread_v[None, :]).astype(np.intp)
    idx.setflags(write=False)
    return idx


def _nl1_matrix(base_tt: int, ttu: np.ndarray, ttw: np.ndarray, n: int,
                chunk: int = 1 << 18) -> np.ndarray:
    """nl1(base + u + w) for all (u, w) word pairs, as a (U, W) uint8 matrix."""
    tts = (np.uint64(base_tt) ^ ttu[:, None]) ^ ttw[None, :]
    flat = tts.reshape(-1)
    out = np.empty(flat.shape[0], dtype=np.uint8)
    for s in range(0, flat.shape[0], chunk):
        out[s:s + chunk] = _nl1_batch(flat[s:s + chunk], n)
    return out.reshape(tts.shape)


def _minplus_rows(n1: np.ndarray, n2: np.ndarray) -> np.ndarray:
    """Row-wise min-plus XOR convolution: C[u, v] = min_w n1[u,w] + n2[u, w^v].

    Walks v in Gray-code order; each step permutes n2's columns by one XOR
    bit, which is a pair of contiguous block swaps rather than a gather.
    """
    rows, width = n1.shape
    out = np.empty((rows, width), dtype=np.uint8)
    perm = n2.copy()
    buf = np.empty_like(n1)
    np.add(n1, perm, out=buf)
    out[:, 0] = buf.min(axis=1)
    v = 0
    for i in range(1, width):
        k = (i & -i).bit_length() - 1
        h = 1 << k
        perm = np.ascontiguousarray(
            perm.reshape(rows, width // (2 * h), 2, h)[:, :, ::-1, :]
        ).reshape(rows, width)
        v ^= h
        np.add(n1, perm, out=buf)
        out[:, v] = buf.min(axis=1)
    return out


def _check_table_size(n: int, r: int) -> int:
    if not 2 <= r <= n:
        raise ValueError(f"table order r={r} out of range 2..{n}")
    m = comb(n, r)
    if (1 << m) > TABLE_WORD_CAP:
        raise ValueError(
            f"value table for (n={n}, r={r}) spans 2^{m} words, over the cap"
        )
    return m


def nl_table_values(f: BooleanFunction, r: int,
                    u_range: tuple[int, int] | None = None) -> np.ndarray:
    """The value array nl_{r-1}(f + g) over all degree-r words g.

    Indexed by the canonical coefficient word.  `u_range` restricts the
    computation to a half-open range of the top-variable-free half-word u
    (used by multi-worker builds); the returned array is then the partial
    (u, v) block in canonical positions left to the caller to place.
    """
    n = f.n
    _check_table_size(n, r)
    if r == 2:
        if u_range is not None:
            raise ValueError("u_range applies to r >= 3 builds only")
        ttw = _word_tts(n, 2)
        return _nl1_batch(np.uint64(f.tt) ^ ttw, n)
    if r == 3:
        return _table_r3(f, u_range)
    if u_range is not None:
        raise ValueError("u_range applies to r == 3 builds only")
    return _table_generic(f, r)


def _table_r3(f: BooleanFunction, u_range=None) -> np.ndarray:
    n = f.n
    f1, f2 = split(f)
    ttu = _word_tts(n - 1, 3)
    ttw = _word_tts(n - 1, 2)
    if u_range is not None:
        ttu = ttu[u_range[0]:u_range[1]]
    n1 = _nl1_matrix(f1.tt, ttu, ttw, n - 1)
    n2 = _nl1_matrix(f2.tt, ttu, ttw, n - 1)
    c = _minplus_rows(n1, n2)
    if u_range is not None:
        return c  # caller scatters
    out = np.empty(1 << comb(n, 3), dtype=np.uint8)
    out[_scatter_index(n, 3)] = c
    return out


def _table_generic(f: BooleanFunction, r: int) -> np.ndarray:
    n = f.n
    f1, f2 = split(f)
    ms_u = MonomialSet.of(n - 1, r)
    xi = _xor_index(comb(n - 1, r - 1))
    spread_u, spread_v = _spread_tables(n, r)
    out = np.empty(1 << comb(n, r), dtype=np.uint8)
    for u in range(1 << comb(n - 1, r)):
        shift = ms_u.function(u)
        a = nl_table_values(f1 + shift, r - 1)
        b = nl_table_values(f2 + shift, r - 1)
        c = (b[xi] + a[None, :]).min(axis=1)
        out[spread_u[u] | spread_v] = c
    return out


# ---------------------------------------------------------------------------
# nl_r / ml_r
# ---------------------------------------------------------------------------


def nl_r_recursive(f: BooleanFunction, r: int) -> int:
    """Exact nl_r by the split recursion over homogeneous shifts."""
    if not 2 <= r <= f.n - 1:
        raise ValueError(f"recursive order r={r} out of range 2..{f.n - 1}")
    f1, f2 = split(f)
    a = nl_table_values(f1, r)
    b = nl_table_values(f2, r)
    return int((a.astype(np.uint16) + b).min())


def nl_r(f: BooleanFunction, r: int) -> int:
    """nl_r for any 0 <= r <= n, dispatching on the order."""
    if r == 0:
        return nl0(f)
    if r == 1:
        return nl1(f)
    if r >= f.n:
        return 0
    return nl_r_recursive(f, r)


def nl_r_bruteforce(f: BooleanFunction, r: int) -> int:
    """Exact nl_r by enumerating every RM(r, n) codeword (oracle scale)."""
    n = f.n
    if not 0 <= r <= n:
        raise ValueError(f"order r={r} out of range")
    masks = [m for m in range(1 << n) if m.bit_count() <= r]
    dim = len(masks)
    if dim > BRUTE_FORCE_DIM_CAP:
        raise ValueError(
            f"RM({r},{n}) has dimension {dim}; brute force capped at "
            f"{BRUTE_FORCE_DIM_CAP}"
        )
    tts = [_monomial_tt(n, m) for m in masks]
    if n == 7:
        # 128-bit truth tables; only tiny dimensions pass the cap here
        best = 1 << n
        for bits in range(1 << dim):
            acc = f.tt
            bb = bits
            while bb:
                lowbit = bb & -bb
                acc ^= tts[lowbit.bit_length() - 1]
                bb ^= lowbit
            best = min(best, acc.bit_count())
        return best
    lo_count = min(dim, 20)
    low = np.zeros(1 << lo_count, dtype=np.uint64)
    width = 1
    for t in tts[:lo_count]:
        low[width:2 * width] = low[:width] ^ np.uint64(t)
        width <<= 1
    hi_tts = tts[lo_count:]
    best = 1 << n
    for hi_bits in range(1 << len(hi_tts)):
        acc = f.tt
        hb = hi_bits
        while hb:
            lowbit = hb & -hb
            acc ^= hi_tts[lowbit.bit_length() - 1]
            hb ^= lowbit
        d = int(np.bitwise_count(np.uint64(acc) ^ low).min())
        best = min(best, d)
        if best == 0:
            break
    return best


def ml_r(f: BooleanFunction, r: int) -> int:
    """max over degree-(r+1) homogeneous shifts g (and 0) of nl_r(f + g)."""
    if not 1 <= r <= f.n - 1:
        raise ValueError(f"ml order r={r} out of range 1..{f.n - 1}")
    return int(nl_table_values(f, r + 1).max())


# ---------------------------------------------------------------------------
# Value tables as first-class objects
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelSet:
    """Membership bitset of F(k) = {g : nl_{r-1}(base + g) = k}."""

    k: int
    members: np.ndarray  # bool, one bit per coefficient word

    @property
    def cardinality(self) -> int:
        return int(self.members.sum())


@dataclass(frozen=True)
class NlTable:
    """Full map g -> nl_{r-1}(base + g) over H_n^(r) u {0} coefficient words."""

    base: BooleanFunction
    r: int
    values: np.ndarray  # uint8, length 2^C(n, r)

    def __post_init__(self) -> None:
        expect = 1 << comb(self.base.n, self.r)
        if self.values.shape != (expect,):
            raise ValueError(
                f"value array has {self.values.shape} entries, expected {expect}"
            )
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def nl_prev(self) -> int:
        """nl_{r-1}(base): the g = 0 entry."""
        return int(self.values[0])

    @property
    def ml_prev(self) -> int:
        """ml_{r-1}(base): the largest attained level."""
        return int(self.values.max())

    def level_counts(self) -> dict[int, int]:
        counts = np.bincount(self.values)
        return {k: int(c) for k, c in enumerate(counts) if c}

    def level_set(self, k: int) -> np.ndarray:
        """Indices (coefficient words) of F(k), ascending."""
        return np.flatnonzero(self.values == k).astype(np.uint32)

    def level(self, k: int) -> LevelSet:
        return LevelSet(k, self.values == k)

    def membership(self, ks) -> np.ndarray:
        """Boolean bitmap of the union of the given level sets."""
        mask = np.zeros(self.values.shape[0], dtype=bool)
        for k in ks:
            mask |= self.values == k
        return mask

    # ---- NLT1 serialization ----

    def to_bytes(self) -> bytes:
        hextt = self.base.to_hex().encode()
        head = (
            NLT_MAGIC
            + bytes([self.base.n, self.r, len(hextt)])
            + hextt
            + bytes([len(NLT_ORDER_TAG)])
            + NLT_ORDER_TAG
            + len(self.values).to_bytes(4, "little")
        )
        return head + self.values.tobytes()

    def save(self, path, meta: dict | None = None) -> None:
        payload = self.to_bytes()
        blob = dict(meta or {})
        blob["sha256"] = hashlib.sha256(payload).hexdigest()
        enc = json.dumps(blob, sort_keys=True).encode()
        with open(path, "wb") as fh:
            fh.write(payload)
            fh.write(_META_MAGIC + len(enc).to_bytes(4, "little") + enc)

    @classmethod
    def load(cls, path, verify: bool = True) -> "NlTable":
        table, _ = cls.load_with_meta(path, verify)
        return table

    @classmethod
    def load_with_meta(cls, path, verify: bool = True) -> tuple["NlTable", dict]:
        with open(path, "rb") as fh:
            raw = fh.read()
        if raw[:4] != NLT_MAGIC:
            raise ValueError(f"{path}: bad magic, not an NLT1 file")
        n, r, hexlen = raw[4], raw[5], raw[6]
        pos = 7
        hextt = raw[pos:pos + hexlen].decode()
        pos += hexlen
        taglen = raw[pos]
        pos += 1
        tag = raw[pos:pos + taglen]
        pos += taglen
        if tag != NLT_ORDER_TAG:
            raise ValueError(f"{path}: unknown monomial ordering tag {tag!r}")
        count = int.from_bytes(raw[pos:pos + 4], "little")
        pos += 4
        if count != 1 << comb(n, r):
            raise ValueError(f"{path}: count {count} inconsistent with (n={n}, r={r})")
        end = pos + count
        if len(raw) < end:
            raise ValueError(f"{path}: input hash mismatch (truncated payload)")
        values = np.frombuffer(raw[pos:end], dtype=np.uint8).copy()
        meta: dict = {}
        if raw[end:end + 4] == _META_MAGIC:
            mlen = int.from_bytes(raw[end + 4:end + 8], "little")
            meta = json.loads(raw[end + 8:end + 8 + mlen])
            if verify and "sha256" in meta:
                if hashlib.sha256(raw[:end]).hexdigest() != meta["sha256"]:
                    raise ValueError(f"{path}: input hash mismatch")
        base = BooleanFunction.from_hex(hextt, n)
        return cls(base, r, values), meta


def build_nl_table(base: BooleanFunction, r: int, workers: int = 1) -> NlTable:
    """Build the full value table for `base` at order r.

    With workers > 1 the u half-word range is partitioned into contiguous
    chunks computed in separate processes; chunk boundaries are fixed by the
    worker count only through the partition, and results are identical for
    any worker count.
    """
    _check_table_size(base.n, r)
    if workers <= 1 or r != 3:
        return NlTable(base, r, nl_table_values(base, r))
    n = base.n
    u_words = 1 << comb(n - 1, 3)
    bounds = [u_words * i // workers for i in range(workers + 1)]
    ranges = [(bounds[i], bounds[i + 1]) for i in range(workers)
              if bounds[i] < bounds[i + 1]]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=len(ranges)) as pool:
        blocks = list(pool.map(_table_block, [(base.n, base.tt, rng) for rng in ranges]))
    spread_u, spread_v = _spread_tables(n, 3)
    out = np.empty(1 << comb(n, 3), dtype=np.uint8)
    for rng, block in zip(ranges, blocks):
        out[spread_u[rng[0]:rng[1], None] | spread_v[None, :]] = block
    return NlTable(base, r, out)


def _table_block(args):
    n, tt, rng = args
    return _table_r3(BooleanFunction.from_tt(n, tt), rng)


# ---------------------------------------------------------------------------
# Covering condition and parity rule
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoveringVerdict:
    holds: bool
    h: int | None = None
    g_word: int | None = None


def check_covering_condition(t1: NlTable, t2: NlTable, t: int) -> CoveringVerdict:
    """Does F_{f1}(h) lie inside union_{k >= t-h} F_{f2}(k) for every h?

    Sound and complete for nl_r(f1 || f2) >= t.  The two tables are
    interchangeable.  On failure, returns the first violating (h, g) with h
    ascending and g the smallest coefficient word.
    """
    if (t1.n, t1.r) != (t2.n, t2.r):
        raise ValueError("tables have mismatched (n, r)")
    v1, v2 = t1.values, t2.values
    floor2 = int(v2.min())
    # h ascending; each test is an O(1) lookup against the suffix bitmap of t2
    for h in sorted(np.unique(v1).tolist()):
        theta = t - h
        if theta <= floor2:
            continue  # suffix union is the whole word space
        suffix_ok = v2 >= theta
        members = np.flatnonzero(v1 == h)
        bad = members[~suffix_ok[members]]
        if bad.size:
            return CoveringVerdict(False, int(h), int(bad[0]))
    return CoveringVerdict(True)


@dataclass(frozen=True)
class ParityVerdict:
    ok: bool
    nl_whole: int
    nl_low: int
    nl_high: int


def parity_check(f: BooleanFunction, r: int) -> ParityVerdict:
    """When nl_r(f) is odd, exactly one of nl_r(f1), nl_r(f2) must be odd."""
    if not 1 <= r <= f.n - 2:
        raise ValueError(f"parity rule needs 1 <= r <= n-2, got r={r}")
    f1, f2 = split(f)
    total = nl_r(f, r)
    a = nl_r(f1, r)
    b = nl_r(f2, r)
    ok = total % 2 == 0 or (a + b) % 2 == 1
    return ParityVerdict(ok, total, a, b)


# ---------------------------------------------------------------------------
# Induced action on coefficient words
# ---------------------------------------------------------------------------


def word_transform_columns(n: int, r: int, L, shift: BooleanFunction | None = None):
    """Images T_r(m o L) of each basis monomial, as coefficient words.

    The induced map on coefficient words is linear; together with an optional
    additive shift word T_r(shift) it realizes g -> T_r(g o L + shift).
    """
    from .boolfn import apply_affine, popcount_mask

    ms = MonomialSet.of(n, r)
    cols = []
    for mask in ms.members:
        g = BooleanFunction.from_anf(n, 1 << mask)
        img = apply_affine(g, L)
        cols.append(ms.anf_to_word(img.anf & popcount_mask(n, r)))
    shift_word = 0
    if shift is not None:
        shift_word = ms.anf_to_word(shift.anf)
    return cols, shift_word


def transform_words(words: np.ndarray, n: int, r: int, L,
                    shift: BooleanFunction | None = None) -> np.ndarray:
    """Apply g -> T_r(g o L) (+ optional shift word) to an array of words."""
    cols, shift_word = word_transform_columns(n, r, L, shift)
    m = len(cols)
    half = m // 2
    lo = np.zeros(1 << half, dtype=np.uint32)
    width = 1
    for c in cols[:half]:
        lo[width:2 * width] = lo[:width] ^ np.uint32(c)
        width <<= 1
    hi = np.zeros(1 << (m - half), dtype=np.uint32)
    width = 1
    for c in cols[half:]:
        hi[width:2 * width] = hi[:width] ^ np.uint32(c)
        width <<= 1
    w = np.asarray(words, dtype=np.uint32)
    out = lo[w & np.uint32((1 << half) - 1)] ^ hi[w >> np.uint32(half)]
    if shift_word:
        out ^= np.uint32(shift_word)
    return out
