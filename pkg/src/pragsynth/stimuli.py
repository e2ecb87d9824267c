"""Deterministic selection of the ten interactive-task stimuli.

The published study used ten representative renderings spanning stripes vs
checkered colorings and solid vs hollow ring shapes; the exact patterns are
unpublished, so this module picks one pattern per structural family with a
seeded counter-based draw and freezes the result into a versioned fixture.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .griddsl import CanonicalSpace, Program, pattern_to_text, program_to_text, sym_kinds
from .service import Stimulus

STIMULI_SEED = 13
FIXTURE_NAME = "stimuli_v1.json"


def _box_dims(prog: Program) -> tuple[int, int]:
    xmin, ymin, xmax, ymax = prog.box
    return max(0, xmax - xmin + 1), max(0, ymax - ymin + 1)


def _families():
    def visible(sym, kinds):
        return sym >= 12

    return [
        ("stripes-vertical", lambda p, sym, kinds:
            p.arg == "x" and p.colorfn == "identity" and p.inner != "pebble"
            and kinds >= 3 and visible(sym, kinds)),
        ("stripes-horizontal", lambda p, sym, kinds:
            p.arg == "y" and p.colorfn == "identity" and p.inner != "pebble"
            and kinds >= 3 and visible(sym, kinds)),
        ("stripes-diagonal", lambda p, sym, kinds:
            p.arg == "x+y" and p.colorfn == "identity" and p.inner != "pebble"
            and kinds >= 3 and visible(sym, kinds)),
        ("checker", lambda p, sym, kinds:
            p.arg == "x+y" and p.colorfn == "twice_parity" and p.inner != "pebble"
            and kinds == 2 and visible(sym, kinds)),
        ("alternating-columns", lambda p, sym, kinds:
            p.arg == "x" and p.colorfn == "twice_parity" and p.inner != "pebble"
            and kinds == 2 and visible(sym, kinds)),
        ("hollow-thin", lambda p, sym, kinds:
            p.inner == "pebble" and p.thickness == 1
            and min(_box_dims(p)) >= 4 and visible(sym, kinds)),
        ("hollow-thick", lambda p, sym, kinds:
            p.inner == "pebble" and p.thickness == 2
            and min(_box_dims(p)) >= 5 and visible(sym, kinds)),
        ("solid-block", lambda p, sym, kinds:
            p.outer == p.inner and kinds == 1 and sym >= 16),
        ("two-shape-ring", lambda p, sym, kinds:
            p.outer != p.inner and p.inner != "pebble"
            and p.colorfn.startswith("const") and p.thickness <= 2
            and kinds == 2 and sym >= 16),
        ("two-shape-stripes", lambda p, sym, kinds:
            p.outer != p.inner and p.inner != "pebble"
            and p.colorfn == "identity" and p.thickness <= 2
            and kinds >= 4 and sym >= 16),
    ]


def select_stimuli(space: CanonicalSpace, seed: int = STIMULI_SEED) -> list[Stimulus]:
    """One pattern per family, drawn with a Philox stream keyed by the seed."""
    if space.rep_programs is None:
        raise ValueError("stimulus selection needs a space with representatives")
    stats = [sym_kinds(space.patterns[h]) for h in range(len(space))]
    chosen: list[int] = []
    stimuli: list[Stimulus] = []
    for fam_i, (name, pred) in enumerate(_families()):
        candidates = [h for h in range(len(space))
                      if h not in chosen and pred(space.rep_programs[h], *stats[h])]
        if not candidates:
            raise ValueError(f"stimulus family {name} has no candidates")
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, fam_i], dtype=np.uint64)))
        h = int(rng.choice(np.array(sorted(candidates))))
        chosen.append(h)
        stimuli.append(Stimulus(id=fam_i, pattern=space.pattern(h),
                                program_text=program_to_text(space.rep_programs[h])))
    return stimuli


def write_fixture(stimuli: list[Stimulus], path=None) -> Path:
    if path is None:
        path = Path(__file__).parent / "data" / FIXTURE_NAME
    payload = {
        "version": 1,
        "seed": STIMULI_SEED,
        "stimuli": [
            {"id": s.id, "pattern": pattern_to_text(s.pattern), "program": s.program_text}
            for s in stimuli
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return Path(path)
