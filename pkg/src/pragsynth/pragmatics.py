"""Recursive-pragmatics listeners and speaker probabilities.

The stack, over a fixed meaning matrix:

  literal listener   : uniform over the hypotheses consistent with the examples
  incremental speaker: next-example probability proportional to the literal
                       listener's posterior on the grown sequence, normalized
                       over the hypothesis's own usable examples not yet used
  pragmatic listener : posterior proportional to the speaker's probability of
                       producing exactly this example sequence
  crafted-prior      : consistent hypotheses weighted by a hand-built score,
                       lower score preferred

Normalizer sums never run over the full utterance or hypothesis spaces: the
speaker sums over the hypothesis's usable-example set, the pragmatic listener
over the consistent set. Everything is exact; log space avoids underflow on
long sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import bitset
from .errors import InconsistentSpecError
from .refgame import (ConsistentSetCache, MeaningMatrix, consistent_set,
                      validate_example_sequence)


@dataclass
class Posterior:
    """Dense probability vector over hypothesis ids with its support bitset."""

    probs: np.ndarray
    consistent: int

    @property
    def n_consistent(self) -> int:
        return self.consistent.bit_count()

    def argmax(self) -> int:
        """Highest-probability hypothesis; ties break toward the lowest id."""
        return int(np.argmax(self.probs))

    def top_k(self, k: int) -> list[tuple[int, float]]:
        """The k most probable hypotheses, sorted by probability then id."""
        idx = np.nonzero(self.probs)[0]
        order = np.lexsort((idx, -self.probs[idx]))
        return [(int(idx[i]), float(self.probs[idx[i]])) for i in order[:k]]

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.choice(len(self.probs), p=self.probs))


def _ensure_cache(matrix: MeaningMatrix, cache: ConsistentSetCache | None) -> ConsistentSetCache:
    if cache is None:
        return ConsistentSetCache(matrix)
    if cache.matrix is not matrix:
        raise ValueError("cache was built for a different matrix")
    return cache


def l0_posterior(matrix: MeaningMatrix, examples: Sequence[int],
                 cache: ConsistentSetCache | None = None) -> Posterior:
    """Literal listener: uniform over the consistent set."""
    cache = _ensure_cache(matrix, cache)
    cons = consistent_set(matrix, examples, cache)
    if cons == 0:
        raise InconsistentSpecError("no hypothesis is consistent with the examples")
    mask = bitset.to_bool_array(cons, matrix.n_hypotheses)
    probs = mask / mask.sum()
    return Posterior(probs, cons)


def speaker_step_distribution(matrix: MeaningMatrix, h: int, used: Sequence[int],
                              cache: ConsistentSetCache | None = None) -> dict[int, float]:
    """Next-utterance distribution for a speaker of h after the used examples.

    Support is the h-consistent utterances not already used; empty dict means
    the speaker is exhausted. Weights are the literal listener's posterior on
    h after appending the candidate utterance.
    """
    cache = _ensure_cache(matrix, cache)
    seq = validate_example_sequence(matrix, used)
    matrix._check_h(h)
    cons = consistent_set(matrix, seq, cache)
    if not (cons >> h) & 1:
        raise ValueError(f"hypothesis {h} is inconsistent with the used examples")
    used_bits = 0
    for u in seq:
        used_bits |= 1 << u
    candidates = matrix.cols[h] & ~used_bits
    if candidates == 0:
        return {}
    weights: dict[int, float] = {}
    total = 0.0
    for u in bitset.iter_indices(candidates):
        count = (cons & matrix.rows[u]).bit_count()
        cache.counters.intersections += 1
        cache.counters.l0_weight_evals += 1
        cache.counters.denominator_terms += 1
        w = 1.0 / count  # count >= 1: h itself is consistent with prefix + u
        weights[u] = w
        total += w
    return {u: w / total for u, w in weights.items()}


def s1_step_prob(matrix: MeaningMatrix, h: int, prefix: Sequence[int], u: int,
                 cache: ConsistentSetCache | None = None) -> float:
    """Probability the incremental speaker of h emits u after the prefix."""
    matrix._check_u(u)
    seq = validate_example_sequence(matrix, prefix)
    if u in seq:
        raise ValueError("utterance already used in the prefix")
    dist = speaker_step_distribution(matrix, h, seq, cache)
    return dist.get(u, 0.0)


def s1_sequence_prob(matrix: MeaningMatrix, h: int, examples: Sequence[int],
                     cache: ConsistentSetCache | None = None) -> float:
    """Probability the incremental speaker of h produces the whole sequence.

    Zero when h is inconsistent with any example; one for the empty sequence.
    """
    cache = _ensure_cache(matrix, cache)
    seq = validate_example_sequence(matrix, examples)
    matrix._check_h(h)
    log_p = 0.0
    for i, u in enumerate(seq):
        if not matrix.consistent(h, u):
            return 0.0
        step = s1_step_prob(matrix, h, seq[:i], u, cache)
        if step == 0.0:
            return 0.0
        log_p += np.log(step)
    return float(np.exp(log_p))


def _weight_row(matrix: MeaningMatrix, cache: ConsistentSetCache,
                prefix: tuple[int, ...], eval_idx: list[int]) -> np.ndarray:
    """Atomic-listener weight row for one prefix, memoized on the cache.

    Entry u holds 1/|prefix-set ∩ row(u)|, zeroed for utterances already in
    the prefix (excluded from speaker normalizers) and for empty intersections.
    The trailing sentinel entry stays zero for padded gathers.
    """
    prefix_bits = 0
    for u in prefix:
        prefix_bits |= 1 << u
    entry = cache.l0_weight_rows.get(prefix)
    if entry is None:
        row = np.zeros(matrix.n_utterances + 1)
        entry = [row, prefix_bits]  # prefix entries are evaluated-as-zero
        cache.l0_weight_rows[prefix] = entry
    row, evaluated = entry
    prefix_set = cache.entries[prefix]
    missing = [u for u in eval_idx if not (evaluated >> u) & 1]
    for u in missing:
        count = (prefix_set & matrix.rows[u]).bit_count()
        cache.counters.intersections += 1
        if count:
            row[u] = 1.0 / count
        evaluated |= 1 << u
    cache.counters.l0_weight_evals += len(missing)
    entry[1] = evaluated
    return row


def l1_posterior(matrix: MeaningMatrix, examples: Sequence[int],
                 cache: ConsistentSetCache | None = None) -> Posterior:
    """Pragmatic listener: posterior over hypotheses given an example sequence.

    Proportional to the incremental speaker's probability of producing the
    sequence, evaluated only on the consistent set. The step numerators are
    shared by every consistent hypothesis, so the per-hypothesis work is one
    normalizer gather over its usable-example indices per step.
    """
    cache = _ensure_cache(matrix, cache)
    seq = validate_example_sequence(matrix, examples)
    n_h, n_u = matrix.n_hypotheses, matrix.n_utterances
    if not seq:
        return Posterior(np.full(n_h, 1.0 / n_h), matrix.full_h_mask)
    cons = consistent_set(matrix, seq, cache)
    if cons == 0:
        raise InconsistentSpecError("no hypothesis is consistent with the examples")
    cons_idx = bitset.to_indices(cons, n_h)
    n_cons = len(cons_idx)
    k = len(seq)

    # Utterances worth weighting: the union of usable-example sets over the
    # consistent hypotheses. When that union cannot be smaller than the
    # utterance space, skip computing it.
    if n_cons * matrix.max_col_size >= n_u:
        eval_idx = list(range(n_u))
    else:
        union = 0
        for h in cons_idx:
            union |= matrix.cols[int(h)]
        eval_idx = [int(u) for u in bitset.to_indices(union, n_u)]

    rows = np.empty((k, n_u + 1))
    for i in range(k):
        rows[i] = _weight_row(matrix, cache, seq[:i], eval_idx)

    # Step numerators 1/|consistent(prefix + next)| are hypothesis-independent.
    counts = np.array([cache.entries[seq[: i + 1]].bit_count() for i in range(k)], dtype=float)
    log_numer = -np.log(counts).sum()

    pad = matrix.col_index_pad[cons_idx]          # (n_cons, max usable examples)
    gathered = rows[:, pad]                       # (k, n_cons, max usable examples)
    z = gathered.sum(axis=2)                      # speaker normalizers per step
    cache.counters.speaker_evals += n_cons
    cache.counters.denominator_terms += int((pad < n_u).sum()) * k

    log_s1 = log_numer - np.log(z).sum(axis=0)
    log_s1 -= log_s1.max()
    w = np.exp(log_s1)
    probs = np.zeros(n_h)
    probs[cons_idx] = w / w.sum()
    return Posterior(probs, cons)


def lp_posterior(matrix: MeaningMatrix, examples: Sequence[int], scores: np.ndarray,
                 cache: ConsistentSetCache | None = None, mode: str = "rank") -> Posterior:
    """Crafted-prior listener: consistent hypotheses weighted by score rank.

    Lower scores are preferred; the top hypothesis is always the consistent one
    with the minimal score (ties toward the lowest id). mode="score" keeps the
    literal proportional-to-score weighting for comparison, even though it
    inverts the stated preference.
    """
    if mode not in ("rank", "score"):
        raise ValueError(f"unknown lp mode {mode!r}")
    cache = _ensure_cache(matrix, cache)
    cons = consistent_set(matrix, examples, cache)
    if cons == 0:
        raise InconsistentSpecError("no hypothesis is consistent with the examples")
    scores = np.asarray(scores)
    if scores.shape != (matrix.n_hypotheses,):
        raise ValueError("scores must cover every hypothesis id")
    cons_idx = bitset.to_indices(cons, matrix.n_hypotheses)
    probs = np.zeros(matrix.n_hypotheses)
    if mode == "rank":
        order = np.lexsort((cons_idx, scores[cons_idx]))
        ranked = cons_idx[order]
        weights = 1.0 / np.arange(1, len(ranked) + 1)
        probs[ranked] = weights / weights.sum()
    else:
        weights = scores[cons_idx].astype(float)
        total = weights.sum()
        if total == 0:
            probs[cons_idx] = 1.0 / len(cons_idx)
        else:
            probs[cons_idx] = weights / total
    return Posterior(probs, cons)
