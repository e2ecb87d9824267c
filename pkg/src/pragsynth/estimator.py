"""Scikit-learn style estimator over the grid-pattern domain.

A grid program is a function from cell coordinates to symbols, so synthesis
by example is literally fit/predict shaped: fit on the observed
(coordinate -> symbol) pairs, predict the symbol the inferred pattern places
at any queried cell. predict_proba marginalizes over the full listener
posterior rather than just the top pattern.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import bitset
from .griddsl import (GRID, N_SYMBOLS, GridGame, default_grid_game, example_id)
from .pragmatics import l0_posterior, l1_posterior, lp_posterior
from .refgame import ConsistentSetCache
from .validation import check_coords, check_examples


class GridPatternSynthesizer(BaseEstimator):
    """Infers a full 7x7 pattern from sparse cell observations.

    Parameters
    ----------
    listener : "l1" (pragmatic, default), "l0" (literal), or "lp" (crafted prior).
    game : optional prebuilt GridGame; the shared default game otherwise.

    Attributes after fit
    --------------------
    pattern_ : (7, 7) symbol codes of the most probable program's rendering.
    posterior_ : dense probability vector over canonical pattern ids.
    n_consistent_ : number of patterns consistent with the observations.
    """

    def __init__(self, listener: str = "l1", game: GridGame | None = None):
        self.listener = listener
        self.game = game

    def _resolve_game(self) -> GridGame:
        return self.game if self.game is not None else default_grid_game()

    def fit(self, X, y):
        if self.listener not in ("l0", "l1", "lp"):
            raise ValueError(f"listener must be l0, l1, or lp, got {self.listener!r}")
        coords, codes = check_examples(X, y)
        game = self._resolve_game()
        examples = [example_id(int(x), int(yy), int(s))
                    for (x, yy), s in zip(coords.tolist(), codes.tolist())]
        cache = ConsistentSetCache(game.matrix)
        if self.listener == "l0":
            posterior = l0_posterior(game.matrix, examples, cache)
        elif self.listener == "l1":
            posterior = l1_posterior(game.matrix, examples, cache)
        else:
            posterior = lp_posterior(game.matrix, examples, game.scores, cache)
        self.posterior_ = posterior.probs
        self.n_consistent_ = posterior.n_consistent
        top = posterior.argmax()
        self.pattern_ = game.space.pattern(top)
        self._support_ids = bitset.to_indices(posterior.consistent, game.matrix.n_hypotheses)
        return self

    def _check_fitted(self):
        if not hasattr(self, "pattern_"):
            raise RuntimeError("this estimator is not fitted yet; call fit first")

    def predict(self, X) -> np.ndarray:
        """Symbol codes the inferred pattern places at the queried cells."""
        self._check_fitted()
        coords = check_coords(X)
        return self.pattern_[coords[:, 0], coords[:, 1]].astype(np.int64)

    def predict_proba(self, X) -> np.ndarray:
        """Per-cell symbol distributions marginalized over the posterior."""
        self._check_fitted()
        coords = check_coords(X)
        game = self._resolve_game()
        support = self._support_ids
        weights = self.posterior_[support]
        cells = coords[:, 0] * GRID + coords[:, 1]
        symbols_at = game.space.patterns[np.ix_(support, cells)]  # (n_support, n_query)
        proba = np.zeros((len(coords), N_SYMBOLS))
        for s in range(N_SYMBOLS):
            proba[:, s] = (weights[:, None] * (symbols_at == s)).sum(axis=0)
        return proba

    def score(self, X, y) -> float:
        """Accuracy of the inferred pattern on held-out cell observations."""
        coords, codes = check_examples(X, y)
        return float((self.predict(coords) == codes).mean())
