"""The verification pipeline behind rho(3, 7) = 20.

Third-order nonlinearity 21 is refuted type by type.  The bound table from
the class quantities excludes 51 of the 55 off-diagonal types; the parity
rule excludes every diagonal type; two level-set inclusion checks dispose of
the canonical families fn_2 || (fn_9 + g) and fn_3 || (fn_10 + g); the
constructive reduction maps the remaining shapes of types (2,9), (2,10),
(3,10) into {4,5,6} x {7,8,9,10}; and the matrix sweep refutes type (6,10)
outright.  A witness function with nl_3 = 20 settles the lower bound.

All set manipulation happens on coefficient-word index arrays against the
level tables: a shifted level set X + g is the index set X XOR g, and
membership is one lookup in a boolean bitmap.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .boolfn import (
    BooleanFunction,
    concat,
    degree,
    homogeneous_part,
    monomial_masks,
    split,
)
from .nonlin import NlTable, nl_r_recursive, _word_tts
from .orbit import MatrixSet, gf2_invert_rows, gf2_unpack_keys

__all__ = [
    "Verdict",
    "check_29",
    "check_310",
    "reduce_to_610",
    "sweep_610",
    "SWEEP_SHARD_SIZE",
    "Report",
    "prove_rho37",
    "WITNESS_ANF",
]

# The degree-4 witness with third-order nonlinearity exactly 20.
WITNESS_ANF = "x1x2x3x4+x1x4x6x7+x2x3x6x7+x3x4x5x7"

SWEEP_SHARD_SIZE = 1024


@dataclass(frozen=True)
class Verdict:
    """Outcome of one pipeline stage."""

    stage: str
    outcome: str  # "pass" | "fail"
    counters: dict = field(default_factory=dict)
    counterexample: tuple | None = None
    inputs: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.outcome == "pass"


def table_digest(t: NlTable) -> str:
    return hashlib.sha256(t.to_bytes()).hexdigest()[:16]


def matrixset_digest(ms: MatrixSet) -> str:
    return hashlib.sha256(ms.members.astype("<u8").tobytes()).hexdigest()[:16]


def _filter_by_inclusion(cands: np.ndarray, probe: np.ndarray,
                         allowed: np.ndarray) -> np.ndarray:
    """Keep the g with probe + g inside the allowed bitmap (probe XOR g)."""
    out = cands
    for x in probe:
        if not out.size:
            break
        out = out[allowed[out ^ x]]
    return out


def check_29(t2: NlTable, t9: NlTable) -> Verdict:
    """Type (2,9) family fn_2 || (fn_9 + g): no g admits nl_3 = 21.

    Candidate shifts are restricted to the top level set of the fn_9 table
    (forced by 0 sitting in the fn_2 table's bottom attained level); each is
    tested for level-8 of fn_2 landing inside levels {13, 15} of fn_9
    shifted by g.  Passing means no candidate satisfies the inclusion.
    """
    _require_63(t2, "check_29 first table")
    _require_63(t9, "check_29 second table")
    cands = t9.level_set(15)
    probe = t2.level_set(8)
    allowed = t9.membership((13, 15))
    sat = _filter_by_inclusion(cands, probe, allowed)
    counters = {
        "candidates": int(cands.size),
        "probe_size": int(probe.size),
        "satisfying": int(sat.size),
    }
    inputs = {"t2": table_digest(t2), "t9": table_digest(t9)}
    if sat.size:
        return Verdict("check_29", "fail", counters, (int(sat[0]),), inputs)
    return Verdict("check_29", "pass", counters, None, inputs)


def check_310(t3: NlTable, t10: NlTable) -> Verdict:
    """Type (3,10) family fn_3 || (fn_10 + g), two rounds of inclusions.

    Round 1 keeps the g with level-7 of fn_10 inside level-14 of fn_3
    shifted by g; round 2 requires level-9 of fn_10 inside levels {12, 14}.
    Passing means no g survives both rounds.
    """
    _require_63(t3, "check_310 first table")
    _require_63(t10, "check_310 second table")
    cands = np.flatnonzero(t3.membership((12, 14))).astype(np.uint32)
    round1 = _filter_by_inclusion(cands, t10.level_set(7), t3.membership((14,)))
    round2 = _filter_by_inclusion(round1, t10.level_set(9), t3.membership((12, 14)))
    counters = {
        "round1_candidates": int(cands.size),
        "round1_survivors": int(round1.size),
        "round2_satisfying": int(round2.size),
    }
    inputs = {"t3": table_digest(t3), "t10": table_digest(t10)}
    if round2.size:
        return Verdict("check_310", "fail", counters, (int(round2[0]),), inputs)
    return Verdict("check_310", "pass", counters, None, inputs)


def _require_63(t: NlTable, what: str) -> None:
    if (t.n, t.r) != (6, 3):
        raise ValueError(f"{what} must be a (n=6, r=3) table")


# ---------------------------------------------------------------------------
# Constructive reduction to type (6, 10)
# ---------------------------------------------------------------------------

_FULL_MONOMIAL = (1 << 6) - 1  # x1x2x3x4x5x6


def _variable_function(k: int) -> BooleanFunction:
    return BooleanFunction.from_anf(6, 1 << (1 << (k - 1)))


def _xk_product_ok(hx: BooleanFunction) -> bool:
    has_top = bool(hx.anf >> _FULL_MONOMIAL & 1)
    return has_top and homogeneous_part(hx, 5).anf != 0


def reduce_to_610(f: BooleanFunction) -> tuple[BooleanFunction, tuple[int, int]]:
    """Map x7 -> x7 + x_k to push a Case-2 function toward type (6, 10).

    Requires f = f1 || f2 where h = f1 + f2 carries the full degree-6
    monomial and a nonzero degree-4 homogeneous part.  Chooses k so that
    h * x_k keeps the degree-6 monomial and gains at least one degree-5
    monomial (preferring a variable outside the lowest degree-4 monomial of
    h), which lands the result in {4,5,6} x {7,8,9,10}.
    """
    from .classify import type_of

    if f.n != 7:
        raise ValueError("reduction applies to 7-variable functions")
    f1, f2 = split(f)
    h = f1 + f2
    if not h.anf >> _FULL_MONOMIAL & 1:
        raise ValueError("f1 + f2 lacks the degree-6 monomial; not Case-2 shape")
    h4 = homogeneous_part(h, 4)
    if h4.anf == 0:
        raise ValueError(
            "f1 + f2 has no degree-4 part; route through the level-set checks"
        )
    first_mono = (h4.anf & -h4.anf).bit_length() - 1
    preferred = [k for k in range(1, 7) if not first_mono >> (k - 1) & 1]
    others = [k for k in range(1, 7) if k not in preferred]
    chosen = None
    for k in preferred + others:
        hx = BooleanFunction.from_tt(6, h.tt & _variable_function(k).tt)
        if _xk_product_ok(hx):
            chosen = (k, hx)
            break
    if chosen is None:
        raise ValueError("no variable yields the degree-6/degree-5 pattern")
    _, hx = chosen
    reduced = concat(f1 + hx, f2 + hx)
    return reduced, type_of(reduced)


# ---------------------------------------------------------------------------
# The type-(6, 10) sweep
# ---------------------------------------------------------------------------


def _sweep_shard(matrix_keys: np.ndarray, base_words: np.ndarray,
                 targets: np.ndarray, allowed: np.ndarray) -> tuple[int, list]:
    """Run the subset test for one contiguous chunk of matrices.

    Returns (matrices processed, hits) where each hit is
    (matrix_key, target_word, shift_word).
    """
    nmat = matrix_keys.shape[0]
    inv = gf2_invert_rows(gf2_unpack_keys(matrix_keys))
    # point permutations x -> A^-1 x via subset-XOR doubling over columns
    cols = np.zeros((nmat, 6), dtype=np.uint8)
    for j in range(6):
        col = np.zeros(nmat, dtype=np.uint8)
        for i in range(6):
            col |= ((inv[:, i] >> j) & 1).astype(np.uint8) << i
        cols[:, j] = col
    perm = np.zeros((nmat, 64), dtype=np.uint8)
    width = 1
    for j in range(6):
        perm[:, width:2 * width] = perm[:, :width] ^ cols[:, j:j + 1]
        width <<= 1

    word_tt = _word_tts(6, 3)[base_words]  # truth tables of the 32 base words
    bits = np.unpackbits(word_tt.astype("<u8").view(np.uint8).reshape(-1, 8),
                         axis=1, bitorder="little", count=64)  # (32, 64)
    moved = bits[:, perm]                       # (32, nmat, 64)
    packed = np.packbits(moved.reshape(-1, 64), axis=1, bitorder="little")
    tts = packed.copy().view("<u8").reshape(bits.shape[0], nmat)

    # Moebius transform on packed 64-bit truth tables
    masks = []
    full = np.uint64(0xFFFFFFFFFFFFFFFF)
    for d in range(6):
        block = (np.uint64(1) << np.uint64(1 << d)) - np.uint64(1)
        m = np.uint64(0)
        for start in range(0, 64, 2 << d):
            m |= block << np.uint64(start)
        masks.append(m & full)
    anf = tts
    for d, m in enumerate(masks):
        anf = anf ^ ((anf & m) << np.uint64(1 << d))

    # collect the degree-3 coefficients into 20-bit words
    words = np.zeros(anf.shape, dtype=np.uint32)
    for idx, mono in enumerate(monomial_masks(6, 3)):
        words |= ((anf >> np.uint64(mono)) & np.uint64(1)).astype(np.uint32) << np.uint32(idx)

    shifts = words ^ words[0]  # (32, nmat); row 0 is zero
    hits = []
    for m in range(nmat):
        alive = targets
        for i in range(1, shifts.shape[0]):
            alive = alive[allowed[alive ^ shifts[i, m]]]
            if not alive.size:
                break
        for t in alive:
            hits.append((int(matrix_keys[m]), int(t), int(words[0, m] ^ t)))
    return nmat, hits


def sweep_610(mset: MatrixSet, t6: NlTable, t10: NlTable, *,
              stride: int = 1,
              shard_size: int = SWEEP_SHARD_SIZE,
              checkpoint_dir: str | None = None,
              workers: int = 1,
              progress=None) -> Verdict:
    """Subset test over every stored matrix: does any shifted image of the
    bottom level set of the fn_6 table land inside the top level set of the
    fn_10 table?  Passing (no hit anywhere) refutes nl_3 = 21 for every
    type-(6,10) function.

    stride > 1 selects the deterministic subset of matrices with index
    divisible by stride (the CI-scale proxy).  Shards are contiguous ranges
    of the selected index list; completed shards are checkpointed and
    skipped on resume.
    """
    _require_63(t6, "sweep base table")
    _require_63(t10, "sweep target table")
    base_words = t6.level_set(6)
    targets = t10.level_set(15)
    allowed = t10.values == 15
    selected = mset.members[::stride] if stride > 1 else mset.members
    inputs = {
        "matrix_set": matrixset_digest(mset),
        "t6": table_digest(t6),
        "t10": table_digest(t10),
        "stride": stride,
    }

    shards = [(s, min(s + shard_size, selected.shape[0]))
              for s in range(0, selected.shape[0], shard_size)]
    state_path = None
    done: dict[str, dict] = {}
    if checkpoint_dir is not None:
        os.makedirs(checkpoint_dir, exist_ok=True)
        state_path = os.path.join(checkpoint_dir, "sweep610.json")
        if os.path.exists(state_path):
            with open(state_path) as fh:
                state = json.load(fh)
            if state.get("inputs") == inputs:
                done = state.get("shards", {})

    processed = 0
    hits: list[tuple] = []
    resumed = 0

    def flush():
        if state_path is None:
            return
        tmp = state_path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump({"inputs": inputs, "shards": done}, fh)
        os.replace(tmp, state_path)

    pending = []
    for si, (s, e) in enumerate(shards):
        key = f"{s}:{e}"
        if key in done:
            processed += done[key]["matrices"]
            hits.extend(tuple(h) for h in done[key]["hits"])
            resumed += 1
        else:
            pending.append((si, s, e))

    def handle(si, s, e, nmat, shard_hits):
        nonlocal processed
        processed += nmat
        hits.extend(shard_hits)
        done[f"{s}:{e}"] = {"matrices": nmat, "hits": shard_hits}
        flush()
        if progress is not None:
            progress(si, len(shards), processed)

    if workers <= 1:
        for si, s, e in pending:
            nmat, shard_hits = _sweep_shard(selected[s:e], base_words, targets, allowed)
            handle(si, s, e, nmat, shard_hits)
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                (si, s, e, pool.submit(_sweep_shard, selected[s:e], base_words,
                                       targets, allowed))
                for si, s, e in pending
            ]
            for si, s, e, fut in futures:
                nmat, shard_hits = fut.result()
                handle(si, s, e, nmat, shard_hits)

    counters = {
        "matrices": processed,
        "targets_per_matrix": int(targets.size),
        "subset_size": int(base_words.size),
        "hits": len(hits),
        "shards": len(shards),
        "resumed_shards": resumed,
    }
    if hits:
        return Verdict("sweep_610", "fail", counters, tuple(hits[0]), inputs)
    return Verdict("sweep_610", "pass", counters, None, inputs)


# ---------------------------------------------------------------------------
# Sample instances for the reduction stage
# ---------------------------------------------------------------------------


def random_affine_map(rng: np.random.Generator):
    """Uniform random element of AGL(6, F2)."""
    from .field import AffineMap, SingularMatrixError

    while True:
        rows = rng.integers(0, 64, size=6, dtype=np.uint8)
        A = tuple(tuple(int(r) >> j & 1 for j in range(6)) for r in rows)
        b = tuple(int(x) for x in rng.integers(0, 2, size=6))
        try:
            return AffineMap(2, 6, A, b)
        except SingularMatrixError:
            continue


def _random_cubic(rng: np.random.Generator) -> BooleanFunction:
    """Random element of RM(3, 6)."""
    anf = 0
    for r in range(4):
        for m in monomial_masks(6, r):
            if rng.integers(0, 2):
                anf |= 1 << m
    return BooleanFunction.from_anf(6, anf)


def _normalize_translation(base: BooleanFunction, L):
    """Compose L with a translation so that T_5(base o L') vanishes.

    Used for the degree-6 class representatives: the degree-5 residue of the
    full monomial's image is the point indicator away from the all-ones
    point, and a translation moves it there.
    """
    from .boolfn import apply_affine
    from .field import AffineMap, compose

    for c in range(64):
        tau = AffineMap(2, 6, tuple(tuple(1 if i == j else 0 for j in range(6))
                                    for i in range(6)),
                        tuple(c >> i & 1 for i in range(6)))
        cand = compose(L, tau)
        if homogeneous_part(apply_affine(base, cand), 5).anf == 0:
            return cand
    raise RuntimeError("no translation kills the degree-5 residue")  # pragma: no cover


def case2_instance(pair: tuple[int, int], rng: np.random.Generator) -> BooleanFunction:
    """A random Case-2 canonical instance of type (2,9), (3,10) or (2,10).

    For (2,10): (fn_2 o L + g) || fn_10 with random L, g.  For (2,9) and
    (3,10): fn_i || (fn_j o L' + p) with the translation part of L'
    normalized so the pair h = f1 + f2 has no degree-5 component, matching
    the shape the reduction consumes.
    """
    from .boolfn import apply_affine
    from .classify import fn_rep
    from .orbit import coset_key

    if pair == (2, 10):
        L = random_affine_map(rng)
        f1 = apply_affine(fn_rep(2), L) + _random_cubic(rng)
        return concat(f1, fn_rep(10))
    if pair not in ((2, 9), (3, 10)):
        raise ValueError(f"no Case-2 shape for type {pair}")
    i, j = pair
    base = fn_rep(j)
    while True:
        L = _normalize_translation(base, random_affine_map(rng))
        moved = apply_affine(base, L)
        if coset_key(moved) != coset_key(base):  # Case 2 demands a moved coset
            break
    return concat(fn_rep(i), moved + _random_cubic(rng))


# ---------------------------------------------------------------------------
# The full pipeline
# ---------------------------------------------------------------------------

DEEP_TYPES = ((2, 9), (2, 10), (3, 10), (6, 10))


@dataclass(frozen=True)
class Report:
    stages: tuple[Verdict, ...]
    rho_lower: int | None
    rho_upper: int | None

    @property
    def conclusion(self) -> str:
        if self.rho_lower == self.rho_upper and self.rho_lower is not None:
            return f"rho(3,7) = {self.rho_lower}"
        return "inconclusive"

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.stages)

    def to_json(self) -> str:
        payload = {
            "stages": [
                {
                    "stage": v.stage,
                    "outcome": v.outcome,
                    "counters": v.counters,
                    "counterexample": v.counterexample,
                    "inputs": v.inputs,
                }
                for v in self.stages
            ],
            "rho_lower": self.rho_lower,
            "rho_upper": self.rho_upper,
            "conclusion": self.conclusion,
        }
        return json.dumps(payload, indent=2)

    def to_text(self) -> str:
        lines = []
        for v in self.stages:
            counters = " ".join(f"{k}={val}" for k, val in v.counters.items())
            lines.append(f"[{v.outcome:>4}] {v.stage:<12} {counters}")
            if v.counterexample is not None:
                lines.append(f"       counterexample: {v.counterexample}")
        lines.append(f"conclusion: {self.conclusion}")
        return "\n".join(lines)


def prove_rho37(tables, matrix_set: MatrixSet, *,
                reduction_samples: int = 3,
                seed: int = 20,
                sweep_stride: int = 1,
                sweep_checkpoint: str | None = None,
                workers: int = 1,
                progress=None) -> Report:
    """Chain every stage and report rho(3,7) = 20.

    `tables` maps the class index to its (6,3) value table; all eleven are
    needed for the bound stage, and indices 2, 3, 6, 9, 10 feed the deep
    checks.
    """
    from .classify import (
        NUM_CLASSES,
        class_stats,
        exclusion_table,
        flagged_types,
        rho_upper_bound,
    )

    stages: list[Verdict] = []
    stats = {i: class_stats(i, tables[i]) for i in range(NUM_CLASSES)}
    stages.append(Verdict(
        "class_table", "pass",
        {f"fn_{i}": (s.deg, s.nl2, s.nl3, s.ml2) for i, s in stats.items()},
        None,
        {f"t{i}": table_digest(tables[i]) for i in range(NUM_CLASSES)},
    ))

    bounds = exclusion_table(stats)
    flagged = flagged_types(bounds)
    excluded_off_diag = sum(1 for (i, j), b in bounds.items() if i != j and b <= 20)
    ok = tuple(flagged) == DEEP_TYPES
    stages.append(Verdict(
        "exclusion", "pass" if ok else "fail",
        {
            "off_diagonal_excluded": excluded_off_diag,
            "flagged": len(flagged),
            "rho_upper_from_bounds": rho_upper_bound(stats),
        },
        None if ok else tuple(flagged),
    ))

    # Diagonal types: both halves share the class's nl_3 parity, so the whole
    # function cannot have odd nl_3, in particular not 21.  No computation
    # beyond the class table is involved.
    stages.append(Verdict(
        "parity", "pass",
        {"diagonal_types_excluded": NUM_CLASSES},
    ))

    stages.append(check_29(tables[2], tables[9]))
    stages.append(check_310(tables[3], tables[10]))

    rng = np.random.default_rng(seed)
    landed: dict[str, int] = {"total": 0, "into_610": 0}
    reduction_ok = True
    allowed_targets = {(i, j) for i in (4, 5, 6) for j in (7, 8, 9, 10)}
    for pair in ((2, 10), (2, 9), (3, 10)):
        for _ in range(reduction_samples):
            inst = case2_instance(pair, rng)
            _, newtype = reduce_to_610(inst)
            landed["total"] += 1
            if newtype == (6, 10):
                landed["into_610"] += 1
            if newtype not in allowed_targets:
                reduction_ok = False
    stages.append(Verdict(
        "reduction", "pass" if reduction_ok else "fail", dict(landed),
    ))

    stages.append(sweep_610(
        matrix_set, tables[6], tables[10],
        stride=sweep_stride, checkpoint_dir=sweep_checkpoint,
        workers=workers, progress=progress,
    ))

    witness = BooleanFunction.from_anf_string(WITNESS_ANF, n=7)
    wv = nl_r_recursive(witness, 3)
    stages.append(Verdict(
        "witness", "pass" if wv == 20 else "fail",
        {"nl3": wv, "degree": degree(witness)},
    ))

    all_pass = all(v.passed for v in stages)
    return Report(
        stages=tuple(stages),
        rho_lower=wv if wv == 20 else None,
        rho_upper=20 if all_pass else None,
    )
