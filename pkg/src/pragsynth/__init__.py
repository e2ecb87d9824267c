"""Pragmatic program synthesis by example over reference games."""

from .errors import (CacheFileError, ExhaustedSpeakerError, GameBuildError,
                     InconsistentSpecError, PragsynthError)
from .estimator import GridPatternSynthesizer
from .griddsl import (CanonicalSpace, GridGame, Program, build_grid_game,
                      canonicalize, default_grid_game, render)
from .pragmatics import (Posterior, l0_posterior, l1_posterior, lp_posterior,
                         s1_sequence_prob, s1_step_prob, speaker_step_distribution)
from .refgame import (ConsistentSetCache, MeaningMatrix, atomic_listener,
                      atomic_speaker, build_meaning_matrix, consistent_set)
from .segment import build_segment_game

__version__ = "0.1.0"

__all__ = [
    "CacheFileError", "CanonicalSpace", "ConsistentSetCache", "ExhaustedSpeakerError",
    "GameBuildError", "GridGame", "GridPatternSynthesizer", "InconsistentSpecError",
    "MeaningMatrix", "Posterior", "PragsynthError", "Program", "atomic_listener",
    "atomic_speaker", "build_grid_game", "build_meaning_matrix", "build_segment_game",
    "canonicalize", "consistent_set", "default_grid_game", "l0_posterior",
    "l1_posterior", "lp_posterior", "render", "s1_sequence_prob", "s1_step_prob",
    "speaker_step_distribution",
]
