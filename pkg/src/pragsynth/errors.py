"""Exception types shared across the package."""


class PragsynthError(Exception):
    """Base class for all package errors."""


class GameBuildError(PragsynthError):
    """A game could not be constructed (empty hypothesis or utterance list)."""


class InconsistentSpecError(PragsynthError):
    """No hypothesis is consistent with the given example sequence."""


class ExhaustedSpeakerError(PragsynthError):
    """The speaker has no unused consistent utterances left to emit."""


class CacheFileError(PragsynthError):
    """A binary cache file is missing, truncated, or corrupt."""
