"""Communication-efficiency experiments: episodes, success curves, mean symbols.

An episode pairs a speaker with a listener on a hidden target: each round the
speaker emits one example; the listener's guess is its posterior top-1 (or a
posterior sample in curve mode); the episode stops on a correct guess. Trials
are deterministic given (seed, trial index) and merge in trial order, so a
config always yields byte-identical CSV output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ExhaustedSpeakerError
from .pragmatics import Posterior, l0_posterior, l1_posterior, lp_posterior
from .refgame import ConsistentSetCache, MeaningMatrix
from .speakers import SpeakerState, make_speaker_state, s0_next, s1_next

SPEAKER_KINDS = ("s0", "s1-sample", "s1-greedy")
LISTENER_KINDS = ("l0", "l1", "lp")

CURVE_CSV_HEADER = ["speaker", "listener", "n_symbols", "trials", "successes", "rate", "seed"]
MEANS_CSV_HEADER = ["speaker", "listener", "trials", "mean", "std", "failures", "seed"]


@dataclass
class ExperimentConfig:
    speaker: str
    listener: str
    trials: int
    max_rounds: int = 40
    max_symbols: int = 10
    seed: int = 0
    targets: Sequence[int] | None = None  # uniform over hypotheses if None

    def __post_init__(self):
        if self.speaker not in SPEAKER_KINDS:
            raise ValueError(f"speaker must be one of {SPEAKER_KINDS}")
        if self.listener not in LISTENER_KINDS:
            raise ValueError(f"listener must be one of {LISTENER_KINDS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_rounds < 0:
            raise ValueError("max_rounds must be >= 0")


@dataclass
class EpisodeResult:
    target: int
    rounds_used: int
    success: bool
    transcript: list[int] = field(default_factory=list)
    guesses: list[int] = field(default_factory=list)


def make_listener(kind: str, scores: np.ndarray | None = None) -> Callable:
    """Listener callable (matrix, examples, cache) -> Posterior."""
    if kind == "l0":
        return l0_posterior
    if kind == "l1":
        return l1_posterior
    if kind == "lp":
        if scores is None:
            raise ValueError("the crafted-prior listener needs a score table")
        return lambda matrix, examples, cache: lp_posterior(matrix, examples, scores, cache)
    raise ValueError(f"unknown listener {kind!r}")


def _next_utterance(matrix: MeaningMatrix, speaker: str, state: SpeakerState) -> int:
    if speaker == "s0":
        return s0_next(matrix, state)
    return s1_next(matrix, state, mode="sample" if speaker == "s1-sample" else "greedy")


def _trial_rngs(seed: int, trial: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent Philox streams for the speaker and the listener's guesses.

    Keeping them separate makes transcripts identical across listener choices
    for the same (seed, trial), so listener comparisons are paired.
    """
    speaker = np.random.Generator(np.random.Philox(key=np.array([seed, 2 * trial], dtype=np.uint64)))
    guess = np.random.Generator(np.random.Philox(key=np.array([seed, 2 * trial + 1], dtype=np.uint64)))
    return speaker, guess


def _pick_target(cfg: ExperimentConfig, trial: int, rng: np.random.Generator, n_h: int) -> int:
    if cfg.targets is not None:
        return int(cfg.targets[trial % len(cfg.targets)])
    return int(rng.integers(n_h))


def run_episode(matrix: MeaningMatrix, cfg: ExperimentConfig, target: int,
                listener_fn: Callable, speaker_rng: np.random.Generator,
                guess_rng: np.random.Generator | None = None,
                sample_guess: bool = False) -> EpisodeResult:
    """Play one episode to success, speaker exhaustion, or the round cap."""
    if sample_guess and guess_rng is None:
        raise ValueError("sampled guesses need a guess rng")
    state = SpeakerState(target=target, rng=speaker_rng, cache=ConsistentSetCache(matrix))
    listener_cache = ConsistentSetCache(matrix)
    result = EpisodeResult(target=target, rounds_used=0, success=False)
    for _ in range(cfg.max_rounds):
        try:
            u = _next_utterance(matrix, cfg.speaker, state)
        except ExhaustedSpeakerError:
            break
        result.transcript.append(u)
        result.rounds_used += 1
        posterior = listener_fn(matrix, result.transcript, listener_cache)
        guess = posterior.sample(guess_rng) if sample_guess else posterior.argmax()
        result.guesses.append(guess)
        if guess == target:
            result.success = True
            break
    return result


def mean_symbols(matrix: MeaningMatrix, cfg: ExperimentConfig,
                 scores: np.ndarray | None = None):
    """Mean symbols to success with top-1 listeners.

    Failed episodes (cap or exhausted speaker) count as max_rounds and are
    reported separately. Returns (mean, std, per-target breakdown, failures).
    """
    listener_fn = make_listener(cfg.listener, scores)
    counts: list[int] = []
    failures = 0
    by_target: dict[int, list[int]] = {}
    for trial in range(cfg.trials):
        speaker_rng, _ = _trial_rngs(cfg.seed, trial)
        target = _pick_target(cfg, trial, speaker_rng, matrix.n_hypotheses)
        episode = run_episode(matrix, cfg, target, listener_fn, speaker_rng)
        n = episode.rounds_used if episode.success else cfg.max_rounds
        if not episode.success:
            failures += 1
        counts.append(n)
        by_target.setdefault(target, []).append(n)
    arr = np.array(counts, dtype=float)
    breakdown = {t: float(np.mean(v)) for t, v in sorted(by_target.items())}
    return float(arr.mean()), float(arr.std()), breakdown, failures


def success_curve(matrix: MeaningMatrix, cfg: ExperimentConfig,
                  scores: np.ndarray | None = None) -> list[dict]:
    """Success probability per symbol budget 1..max_symbols, sampled guesses.

    Each trial emits one transcript up to the budget cap (or until the speaker
    exhausts) and samples a listener guess at every prefix length; budgets
    past exhaustion reuse the full transcript.
    """
    listener_fn = make_listener(cfg.listener, scores)
    successes = np.zeros(cfg.max_symbols, dtype=np.int64)
    for trial in range(cfg.trials):
        speaker_rng, guess_rng = _trial_rngs(cfg.seed, trial)
        target = _pick_target(cfg, trial, speaker_rng, matrix.n_hypotheses)
        state = SpeakerState(target=target, rng=speaker_rng, cache=ConsistentSetCache(matrix))
        listener_cache = ConsistentSetCache(matrix)
        transcript: list[int] = []
        posterior: Posterior | None = None
        for k in range(1, cfg.max_symbols + 1):
            if len(transcript) < k:
                try:
                    transcript.append(_next_utterance(matrix, cfg.speaker, state))
                    posterior = None
                except ExhaustedSpeakerError:
                    pass  # keep guessing on the full transcript
            if posterior is None:
                posterior = listener_fn(matrix, transcript, listener_cache)
            if posterior.sample(guess_rng) == target:
                successes[k - 1] += 1
    return [
        {"speaker": cfg.speaker, "listener": cfg.listener, "n_symbols": k + 1,
         "trials": cfg.trials, "successes": int(successes[k]),
         "rate": float(successes[k] / cfg.trials), "seed": cfg.seed}
        for k in range(cfg.max_symbols)
    ]


def write_curve_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_CSV_HEADER)
        for r in rows:
            writer.writerow([r["speaker"], r["listener"], r["n_symbols"], r["trials"],
                             r["successes"], f"{r['rate']:.6f}", r["seed"]])


def write_means_csv(cfg: ExperimentConfig, mean: float, std: float,
                    failures: int, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MEANS_CSV_HEADER)
        writer.writerow([cfg.speaker, cfg.listener, cfg.trials, f"{mean:.6f}",
                         f"{std:.6f}", failures, cfg.seed])
