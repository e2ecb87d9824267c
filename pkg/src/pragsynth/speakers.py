"""Machine speakers: random-consistent and incremental-pragmatic.

Speakers never repeat an utterance and never emit one inconsistent with
their target. Randomness comes from a counter-based Philox stream keyed by
(experiment seed, trial index), so every episode is independently
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bitset
from .errors import ExhaustedSpeakerError
from .pragmatics import speaker_step_distribution
from .refgame import ConsistentSetCache, MeaningMatrix


@dataclass
class SpeakerState:
    target: int
    rng: np.random.Generator
    cache: ConsistentSetCache
    used: list[int] = field(default_factory=list)


def make_speaker_state(matrix: MeaningMatrix, target: int, seed: int = 0,
                       trial: int = 0) -> SpeakerState:
    matrix._check_h(target)
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, trial], dtype=np.uint64)))
    return SpeakerState(target=target, rng=rng, cache=ConsistentSetCache(matrix))


def _unused_bits(matrix: MeaningMatrix, state: SpeakerState) -> int:
    used_bits = 0
    for u in state.used:
        used_bits |= 1 << u
    return matrix.cols[state.target] & ~used_bits


def s0_next(matrix: MeaningMatrix, state: SpeakerState) -> int:
    """Uniform draw from the target's unused consistent utterances."""
    candidates = _unused_bits(matrix, state)
    if candidates == 0:
        raise ExhaustedSpeakerError(f"speaker of {state.target} has no utterances left")
    ids = bitset.to_indices(candidates, matrix.n_utterances)
    u = int(state.rng.choice(ids))
    state.used.append(u)
    return u


def s1_next(matrix: MeaningMatrix, state: SpeakerState, mode: str = "sample") -> int:
    """Incremental pragmatic speaker step; mode is "sample" or "greedy".

    Greedy takes the argmax of the step distribution, breaking ties toward
    the lowest utterance id.
    """
    if mode not in ("sample", "greedy"):
        raise ValueError(f"unknown speaker mode {mode!r}")
    dist = speaker_step_distribution(matrix, state.target, state.used, state.cache)
    if not dist:
        raise ExhaustedSpeakerError(f"speaker of {state.target} has no utterances left")
    if mode == "greedy":
        u = max(dist.items(), key=lambda kv: (kv[1], -kv[0]))[0]
    else:
        ids = np.fromiter(dist.keys(), dtype=np.int64)
        probs = np.fromiter(dist.values(), dtype=float)
        u = int(state.rng.choice(ids, p=probs))
    state.used.append(u)
    return u
