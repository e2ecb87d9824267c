"""Reference oracles computing the listener stack by full summation.

These recompute everything from the dense boolean relation: no bitsets, no
prefix caching, no support restriction. Sums run over the whole hypothesis and
utterance spaces exactly as the defining equations read. They exist to check
the efficient implementations and stay deliberately naive.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InconsistentSpecError
from .pragmatics import Posterior
from .refgame import MeaningMatrix, validate_example_sequence

_FULL = -1  # sentinel support for the empty sequence


def _l0_vector(dense: np.ndarray, examples: Sequence[int]) -> np.ndarray:
    """Literal-listener posterior as a vector; all zeros when contradictory."""
    if len(examples) == 0:
        mask = np.ones(dense.shape[0], dtype=bool)
    else:
        mask = dense[:, list(examples)].all(axis=1)
    total = mask.sum()
    if total == 0:
        return np.zeros(dense.shape[0])
    return mask / total


def _support_bits(probs: np.ndarray) -> int:
    bs = 0
    for h in np.nonzero(probs)[0]:
        bs |= 1 << int(h)
    return bs


def brute_force_l0(matrix: MeaningMatrix, examples: Sequence[int]) -> Posterior:
    seq = validate_example_sequence(matrix, examples)
    probs = _l0_vector(matrix.to_dense(), seq)
    if probs.sum() == 0:
        raise InconsistentSpecError("no hypothesis is consistent with the examples")
    return Posterior(probs, _support_bits(probs))


def brute_force_s1_step(matrix: MeaningMatrix, h: int, prefix: Sequence[int], u: int) -> float:
    seq = validate_example_sequence(matrix, prefix)
    matrix._check_h(h)
    matrix._check_u(u)
    if u in seq:
        raise ValueError("utterance already used in the prefix")
    dense = matrix.to_dense()
    if len(seq) and not dense[h, list(seq)].all():
        raise ValueError(f"hypothesis {h} is inconsistent with the used examples")
    numer = _l0_vector(dense, seq + (u,))[h]
    if numer == 0.0:
        return 0.0
    denom = 0.0
    for u_alt in range(matrix.n_utterances):
        if u_alt in seq:
            continue
        denom += _l0_vector(dense, seq + (u_alt,))[h]
    return float(numer / denom)


def brute_force_s1_sequence(matrix: MeaningMatrix, h: int, examples: Sequence[int]) -> float:
    seq = validate_example_sequence(matrix, examples)
    matrix._check_h(h)
    dense = matrix.to_dense()
    prob = 1.0
    for i, u in enumerate(seq):
        if not dense[h, u]:
            return 0.0
        numer = _l0_vector(dense, seq[: i + 1])[h]
        if numer == 0.0:
            return 0.0
        denom = 0.0
        for u_alt in range(matrix.n_utterances):
            if u_alt in seq[:i]:
                continue
            denom += _l0_vector(dense, seq[:i] + (u_alt,))[h]
        prob *= numer / denom
    return float(prob)


def brute_force_l1(matrix: MeaningMatrix, examples: Sequence[int]) -> Posterior:
    seq = validate_example_sequence(matrix, examples)
    dense = matrix.to_dense()
    n_h = matrix.n_hypotheses
    if not seq:
        probs = np.full(n_h, 1.0 / n_h)
        return Posterior(probs, matrix.full_h_mask)
    seq_probs = np.ones(n_h)
    for i, u in enumerate(seq):
        numer = _l0_vector(dense, seq[: i + 1])
        denom = np.zeros(n_h)
        for u_alt in range(matrix.n_utterances):
            if u_alt in seq[:i]:
                continue
            denom += _l0_vector(dense, seq[:i] + (u_alt,))
        step = np.divide(numer, denom, out=np.zeros(n_h), where=denom > 0)
        seq_probs *= step
    total = seq_probs.sum()
    if total == 0:
        raise InconsistentSpecError("no hypothesis is consistent with the examples")
    probs = seq_probs / total
    return Posterior(probs, _support_bits(probs))
