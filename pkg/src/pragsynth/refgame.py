"""Reference-game substrate: meaning matrix and cached consistent-set queries.

A game is defined by a list of hypotheses, a list of utterances, and a boolean
consistency relation between them. Hypothesis and utterance payloads are opaque
here; everything downstream works on dense integer ids.

The matrix is stored twice: per-utterance hypothesis sets (the atomic listener)
and per-hypothesis utterance sets (the atomic speaker). Both are integer
bitsets, so intersecting consistent sets is word-parallel.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import bitset
from .errors import CacheFileError, GameBuildError

MATRIX_MAGIC = b"PRAGMM1\x00"


@dataclass
class OpCounters:
    """Instrumentation for the inference hot paths.

    intersections: bitset AND operations performed.
    l0_weight_evals: atomic literal-listener weight evaluations, one per
        (prefix, utterance) pair actually touched.
    speaker_evals: hypotheses whose full speaker sequence probability was
        evaluated inside a pragmatic-listener query.
    denominator_terms: terms accumulated into speaker normalizers.
    """

    intersections: int = 0
    l0_weight_evals: int = 0
    speaker_evals: int = 0
    denominator_terms: int = 0

    def reset(self) -> None:
        self.intersections = 0
        self.l0_weight_evals = 0
        self.speaker_evals = 0
        self.denominator_terms = 0


class MeaningMatrix:
    """Boolean consistency relation in row (listener) and column (speaker) form."""

    def __init__(self, rows: list[int], cols: list[int], n_hypotheses: int, n_utterances: int):
        if n_hypotheses <= 0 or n_utterances <= 0:
            raise GameBuildError("a game needs at least one hypothesis and one utterance")
        if len(rows) != n_utterances or len(cols) != n_hypotheses:
            raise GameBuildError("row/column counts do not match the id spaces")
        self.n_hypotheses = n_hypotheses
        self.n_utterances = n_utterances
        self.rows = rows
        self.cols = cols
        self.full_h_mask = bitset.full_mask(n_hypotheses)
        self.full_u_mask = bitset.full_mask(n_utterances)
        self._build_derived()

    def _build_derived(self) -> None:
        # Padded per-hypothesis utterance indices for vectorized normalizer
        # sums; the sentinel column n_utterances maps to weight 0.
        sizes = [c.bit_count() for c in self.cols]
        self.max_col_size = max(sizes) if sizes else 0
        self.max_row_size = max((r.bit_count() for r in self.rows), default=0)
        pad = np.full((self.n_hypotheses, max(self.max_col_size, 1)), self.n_utterances,
                      dtype=np.int64)
        for h, col in enumerate(self.cols):
            idx = bitset.to_indices(col, self.n_utterances)
            pad[h, : len(idx)] = idx
        self.col_index_pad = pad

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "MeaningMatrix":
        """Build from an (n_hypotheses, n_utterances) boolean array."""
        dense = np.asarray(dense, dtype=bool)
        if dense.ndim != 2 or dense.size == 0:
            raise GameBuildError("dense consistency matrix must be 2-d and non-empty")
        n_h, n_u = dense.shape
        row_bytes = np.packbits(dense.T, axis=1, bitorder="little")
        col_bytes = np.packbits(dense, axis=1, bitorder="little")
        rows = [int.from_bytes(row_bytes[u].tobytes(), "little") for u in range(n_u)]
        cols = [int.from_bytes(col_bytes[h].tobytes(), "little") for h in range(n_h)]
        return cls(rows, cols, n_h, n_u)

    def to_dense(self) -> np.ndarray:
        """Materialize the (n_hypotheses, n_utterances) boolean relation."""
        out = np.zeros((self.n_hypotheses, self.n_utterances), dtype=bool)
        for u, row in enumerate(self.rows):
            out[:, u] = bitset.to_bool_array(row, self.n_hypotheses)
        return out

    def consistent(self, h: int, u: int) -> bool:
        """Whether hypothesis h is consistent with utterance u."""
        self._check_u(u)
        self._check_h(h)
        return bool((self.rows[u] >> h) & 1)

    def _check_u(self, u: int) -> None:
        if not 0 <= u < self.n_utterances:
            raise IndexError(f"utterance id {u} out of range [0, {self.n_utterances})")

    def _check_h(self, h: int) -> None:
        if not 0 <= h < self.n_hypotheses:
            raise IndexError(f"hypothesis id {h} out of range [0, {self.n_hypotheses})")


def build_meaning_matrix(hypotheses: Sequence, utterances: Sequence,
                         consistent: Callable) -> MeaningMatrix:
    """Evaluate the consistency predicate over the full product of payloads."""
    if len(hypotheses) == 0 or len(utterances) == 0:
        raise GameBuildError("hypothesis and utterance lists must be non-empty")
    dense = np.empty((len(hypotheses), len(utterances)), dtype=bool)
    for i, h in enumerate(hypotheses):
        for j, u in enumerate(utterances):
            dense[i, j] = bool(consistent(h, u))
    return MeaningMatrix.from_dense(dense)


def atomic_listener(matrix: MeaningMatrix, u: int) -> int:
    """Bitset of hypotheses consistent with utterance u (matrix row)."""
    matrix._check_u(u)
    return matrix.rows[u]


def atomic_speaker(matrix: MeaningMatrix, h: int) -> int:
    """Bitset of utterances consistent with hypothesis h (matrix column)."""
    matrix._check_h(h)
    return matrix.cols[h]


def validate_example_sequence(matrix: MeaningMatrix, examples: Sequence[int]) -> tuple[int, ...]:
    """Check ids are in range and duplicate-free; return a normalized tuple."""
    seq = tuple(int(u) for u in examples)
    for u in seq:
        matrix._check_u(u)
    if len(set(seq)) != len(seq):
        raise ValueError("example sequences must not repeat an utterance")
    return seq


@dataclass
class ConsistentSetCache:
    """Per-session memo of consistent-set bitsets, keyed by example prefix.

    Extending a cached prefix by one utterance costs exactly one intersection.
    l0_weight_rows memoizes per-prefix atomic-listener weight rows for the
    pragmatic listener. Not safe to share between concurrent sessions.
    """

    matrix: MeaningMatrix
    entries: dict[tuple[int, ...], int] = field(default_factory=dict)
    l0_weight_rows: dict[tuple[int, ...], list] = field(default_factory=dict)
    counters: OpCounters = field(default_factory=OpCounters)

    def __post_init__(self):
        self.entries[()] = self.matrix.full_h_mask


def consistent_set(matrix: MeaningMatrix, examples: Sequence[int],
                   cache: ConsistentSetCache | None = None) -> int:
    """Bitset of hypotheses consistent with every example in the sequence.

    Empty sequence returns the full hypothesis set. An empty result is a legal
    value meaning no hypothesis satisfies the examples. All prefixes of the
    sequence end up cached.
    """
    seq = validate_example_sequence(matrix, examples)
    if cache is None:
        cache = ConsistentSetCache(matrix)
    elif cache.matrix is not matrix:
        raise ValueError("cache was built for a different matrix")
    start = 0
    current = matrix.full_h_mask
    for k in range(len(seq), 0, -1):
        hit = cache.entries.get(seq[:k])
        if hit is not None:
            current, start = hit, k
            break
    for i in range(start, len(seq)):
        current &= matrix.rows[seq[i]]
        cache.counters.intersections += 1
        cache.entries[seq[: i + 1]] = current
    return current


def _bitset_words(bs: int, nbits: int) -> bytes:
    nwords = (nbits + 63) // 64
    return bs.to_bytes(nwords * 8, "little")


def save_matrix(matrix: MeaningMatrix, path) -> None:
    """Write the matrix cache file: header, row bitsets, column bitsets."""
    payload = b"".join(_bitset_words(r, matrix.n_hypotheses) for r in matrix.rows)
    payload += b"".join(_bitset_words(c, matrix.n_utterances) for c in matrix.cols)
    header = MATRIX_MAGIC
    header += matrix.n_hypotheses.to_bytes(4, "little")
    header += matrix.n_utterances.to_bytes(4, "little")
    header += (zlib.crc32(payload) & 0xFFFFFFFF).to_bytes(4, "little")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def load_matrix(path) -> MeaningMatrix:
    """Read a matrix cache file written by save_matrix."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MATRIX_MAGIC) + 12 or not blob.startswith(MATRIX_MAGIC):
        raise CacheFileError(f"{path}: not a matrix cache file")
    off = len(MATRIX_MAGIC)
    n_h = int.from_bytes(blob[off: off + 4], "little")
    n_u = int.from_bytes(blob[off + 4: off + 8], "little")
    crc = int.from_bytes(blob[off + 8: off + 12], "little")
    payload = blob[off + 12:]
    if zlib.crc32(payload) & 0xFFFFFFFF != crc:
        raise CacheFileError(f"{path}: checksum mismatch")
    row_w = ((n_h + 63) // 64) * 8
    col_w = ((n_u + 63) // 64) * 8
    if len(payload) != n_u * row_w + n_h * col_w:
        raise CacheFileError(f"{path}: truncated payload")
    rows, cols = [], []
    for u in range(n_u):
        rows.append(int.from_bytes(payload[u * row_w: (u + 1) * row_w], "little"))
    base = n_u * row_w
    for h in range(n_h):
        cols.append(int.from_bytes(payload[base + h * col_w: base + (h + 1) * col_w], "little"))
    return MeaningMatrix(rows, cols, n_h, n_u)
