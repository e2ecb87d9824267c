"""Line-segment game: ten contiguous segments on four cells, eight examples.

Hypothesis ids order segments by (start, end) ascending; utterance ids
interleave positive/negative per cell, so 2i is "cell i occupied" and 2i+1 is
"cell i empty". Under this ordering every hand-worked probability in the
package's acceptance tests comes out on the published values.
"""

from __future__ import annotations

from dataclasses import dataclass

from .refgame import MeaningMatrix, build_meaning_matrix

N_CELLS = 4


@dataclass(frozen=True)
class SegmentGame:
    hypotheses: tuple[tuple[int, int], ...]   # (start, end) inclusive
    utterances: tuple[tuple[int, bool], ...]  # (cell, occupied)
    matrix: MeaningMatrix


def segment_consistent(segment: tuple[int, int], example: tuple[int, bool]) -> bool:
    start, end = segment
    cell, occupied = example
    return (start <= cell <= end) == occupied


def build_segment_game() -> SegmentGame:
    hypotheses = tuple((s, e) for s in range(N_CELLS) for e in range(s, N_CELLS))
    utterances = tuple((c, occ) for c in range(N_CELLS) for occ in (True, False))
    matrix = build_meaning_matrix(hypotheses, utterances, segment_consistent)
    return SegmentGame(hypotheses, utterances, matrix)


def parse_segment_examples(text: str) -> list[int]:
    """Parse "1:occ,2:occ" style example lists into utterance ids."""
    ids = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        cell_str, _, state = part.partition(":")
        try:
            cell = int(cell_str)
        except ValueError:
            raise ValueError(f"bad cell index in example {part!r}") from None
        if not 0 <= cell < N_CELLS:
            raise ValueError(f"cell index {cell} out of range 0..{N_CELLS - 1}")
        if state not in ("occ", "empty"):
            raise ValueError(f"example state must be 'occ' or 'empty', got {state!r}")
        ids.append(2 * cell + (0 if state == "occ" else 1))
    return ids


def format_segment_hypothesis(segment: tuple[int, int]) -> str:
    return f"segment[{segment[0]},{segment[1]}]"
