"""Grid-layout DSL: programs that place symbols on a 7x7 grid.

A program fills an inclusive bounding box with a ring of one shape wrapped
around a fill of another, colored by a function of the cell coordinates; cells
outside the box are pebbles. Symbols: pebble (colorless), chicken and pig in
red/green/blue, seven in total.

Two programs are equivalent when they render to the same pattern, so the
canonical hypothesis space is the deduplicated set of rendered patterns.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import CacheFileError, GameBuildError
from .refgame import MeaningMatrix

GRID = 7
N_CELLS = GRID * GRID
N_SYMBOLS = 7

SYMBOL_NAMES = ("pebble", "chicken_red", "chicken_green", "chicken_blue",
                "pig_red", "pig_green", "pig_blue")
SYMBOL_CHARS = ".rgbRGB"
PEBBLE = 0

OUTER_SHAPES = ("chicken", "pig")
INNER_SHAPES = ("chicken", "pig", "pebble")
THICKNESSES = (1, 2, 3)
ARG_NAMES = ("x", "y", "x+y")

# The five coordinate-to-color maps; the result is reduced mod 3 before
# indexing [red, green, blue].
COLOR_FN_NAMES = ("const0", "const1", "const2", "identity", "twice_parity")
COLOR_FNS = {
    "const0": lambda z: 0,
    "const1": lambda z: 1,
    "const2": lambda z: 2,
    "identity": lambda z: z,
    "twice_parity": lambda z: 2 * (z % 2),
}

_SHAPE_BASE = {"chicken": 1, "pig": 4}

N_RAW_PROGRAMS = GRID ** 4 * len(OUTER_SHAPES) * len(INNER_SHAPES) \
    * len(THICKNESSES) * len(ARG_NAMES) * len(COLOR_FN_NAMES)

SPACE_MAGIC = b"PRAGGD1\x00"
CANONICAL_TARGET = 17976  # published size of the deduplicated program space


@dataclass(frozen=True)
class Program:
    """One instantiation of the grammar."""

    box: tuple[int, int, int, int]  # (xmin, ymin, xmax, ymax), inclusive
    outer: str
    inner: str
    thickness: int
    arg: str
    colorfn: str

    def __post_init__(self):
        if len(self.box) != 4 or not all(0 <= b < GRID for b in self.box):
            raise ValueError(f"box coordinates must be in 0..{GRID - 1}")
        if self.outer not in OUTER_SHAPES:
            raise ValueError(f"outer shape must be one of {OUTER_SHAPES}")
        if self.inner not in INNER_SHAPES:
            raise ValueError(f"inner shape must be one of {INNER_SHAPES}")
        if self.thickness not in THICKNESSES:
            raise ValueError(f"thickness must be one of {THICKNESSES}")
        if self.arg not in ARG_NAMES:
            raise ValueError(f"arg must be one of {ARG_NAMES}")
        if self.colorfn not in COLOR_FN_NAMES:
            raise ValueError(f"colorfn must be one of {COLOR_FN_NAMES}")


def arg_value(name: str, x: int, y: int) -> int:
    if name == "x":
        return x
    if name == "y":
        return y
    return x + y


def render(program: Program) -> np.ndarray:
    """Rasterize a program to a (GRID, GRID) symbol array indexed [x, y]."""
    xmin, ymin, xmax, ymax = program.box
    colorfn = COLOR_FNS[program.colorfn]
    pattern = np.zeros((GRID, GRID), dtype=np.uint8)
    for x in range(GRID):
        for y in range(GRID):
            if not (xmin <= x <= xmax and ymin <= y <= ymax):
                continue
            border = min(x - xmin, xmax - x, y - ymin, ymax - y)
            shape = program.outer if border < program.thickness else program.inner
            if shape == "pebble":
                continue
            color = colorfn(arg_value(program.arg, x, y)) % 3
            pattern[x, y] = _SHAPE_BASE[shape] + color
    return pattern


def enumerate_programs() -> Iterator[Program]:
    """Yield every grammar instantiation once, in canonical index order."""
    for box in itertools.product(range(GRID), repeat=4):
        for outer in OUTER_SHAPES:
            for inner in INNER_SHAPES:
                for thickness in THICKNESSES:
                    for arg in ARG_NAMES:
                        for colorfn in COLOR_FN_NAMES:
                            yield Program(box, outer, inner, thickness, arg, colorfn)


def program_at_index(index: int) -> Program:
    """Program at a flat enumeration index."""
    if not 0 <= index < N_RAW_PROGRAMS:
        raise IndexError(f"program index {index} out of range")
    index, cf = divmod(index, len(COLOR_FN_NAMES))
    index, ar = divmod(index, len(ARG_NAMES))
    index, th = divmod(index, len(THICKNESSES))
    index, inn = divmod(index, len(INNER_SHAPES))
    index, out = divmod(index, len(OUTER_SHAPES))
    index, b4 = divmod(index, GRID)
    index, b3 = divmod(index, GRID)
    b1, b2 = divmod(index, GRID)
    return Program((b1, b2, b3, b4), OUTER_SHAPES[out], INNER_SHAPES[inn],
                   THICKNESSES[th], ARG_NAMES[ar], COLOR_FN_NAMES[cf])


def program_index(program: Program) -> int:
    idx = 0
    for b in program.box:
        idx = idx * GRID + b
    idx = idx * len(OUTER_SHAPES) + OUTER_SHAPES.index(program.outer)
    idx = idx * len(INNER_SHAPES) + INNER_SHAPES.index(program.inner)
    idx = idx * len(THICKNESSES) + THICKNESSES.index(program.thickness)
    idx = idx * len(ARG_NAMES) + ARG_NAMES.index(program.arg)
    idx = idx * len(COLOR_FN_NAMES) + COLOR_FN_NAMES.index(program.colorfn)
    return idx


def render_all() -> np.ndarray:
    """Render the whole program space to an (N_RAW_PROGRAMS, 49) array.

    Row order matches enumerate_programs; cell order is x * GRID + y.
    """
    coords = np.arange(GRID)
    # region code per (box, thickness): 0 outside, 1 ring, 2 fill
    regions = np.empty((GRID ** 4, len(THICKNESSES), N_CELLS), dtype=np.uint8)
    box_i = 0
    for xmin, ymin, xmax, ymax in itertools.product(range(GRID), repeat=4):
        dx = np.minimum(coords - xmin, xmax - coords)        # < 0 outside columns
        dy = np.minimum(coords - ymin, ymax - coords)
        border = np.minimum(dx[:, None], dy[None, :])
        inside = (dx[:, None] >= 0) & (dy[None, :] >= 0)
        for t_i, t in enumerate(THICKNESSES):
            code = np.where(inside, np.where(border < t, np.uint8(1), np.uint8(2)),
                            np.uint8(0))
            regions[box_i, t_i] = code.reshape(N_CELLS)
        box_i += 1

    # color index per (arg, colorfn) over the grid
    xv = np.repeat(coords, GRID)
    yv = np.tile(coords, GRID)
    arg_grids = {"x": xv, "y": yv, "x+y": xv + yv}
    colors = np.empty((len(ARG_NAMES), len(COLOR_FN_NAMES), N_CELLS), dtype=np.uint8)
    for a_i, a in enumerate(ARG_NAMES):
        for c_i, c in enumerate(COLOR_FN_NAMES):
            vals = np.asarray(COLOR_FNS[c](arg_grids[a].astype(np.int64))) % 3
            colors[a_i, c_i] = np.broadcast_to(vals, (N_CELLS,)).astype(np.uint8)

    ring = np.empty((len(OUTER_SHAPES), len(ARG_NAMES), len(COLOR_FN_NAMES), N_CELLS),
                    dtype=np.uint8)
    for o_i, o in enumerate(OUTER_SHAPES):
        ring[o_i] = _SHAPE_BASE[o] + colors
    fill = np.empty((len(INNER_SHAPES), len(ARG_NAMES), len(COLOR_FN_NAMES), N_CELLS),
                    dtype=np.uint8)
    for i_i, i in enumerate(INNER_SHAPES):
        fill[i_i] = 0 if i == "pebble" else _SHAPE_BASE[i] + colors

    region_b = regions[:, None, None, :, None, None, :]
    ring_b = ring[None, :, None, None, :, :, :]
    fill_b = fill[None, None, :, None, :, :, :]
    out = np.where(region_b == 1, ring_b, np.where(region_b == 2, fill_b, np.uint8(0)))
    return out.reshape(-1, N_CELLS)


class CanonicalSpace:
    """Deduplicated pattern space with one representative program each."""

    def __init__(self, patterns: np.ndarray, rep_programs: list[Program] | None,
                 raw_count: int):
        self.patterns = np.ascontiguousarray(patterns, dtype=np.uint8)
        self.rep_programs = rep_programs
        self.raw_count = raw_count
        self._byte_index: dict[bytes, int] | None = None

    def __len__(self) -> int:
        return len(self.patterns)

    def pattern(self, h: int) -> np.ndarray:
        return self.patterns[h].reshape(GRID, GRID)

    def index_of(self, pattern: np.ndarray) -> int:
        """Hypothesis id of a pattern; KeyError if it is not in the space."""
        if self._byte_index is None:
            self._byte_index = {p.tobytes(): i for i, p in enumerate(self.patterns)}
        key = np.ascontiguousarray(pattern, dtype=np.uint8).reshape(N_CELLS).tobytes()
        if key not in self._byte_index:
            raise KeyError("pattern is not in the canonical space")
        return self._byte_index[key]


def canonicalize(programs: Iterable[Program] | None = None) -> CanonicalSpace:
    """Deduplicate programs by rendered pattern.

    With no argument the full grammar is enumerated via the vectorized
    renderer. Patterns come out sorted by byte order; the representative of
    each pattern is the first program encountered that renders to it.
    """
    if programs is None:
        flat = render_all()
        patterns, first_idx = np.unique(flat, axis=0, return_index=True)
        reps = [program_at_index(int(i)) for i in first_idx]
        return CanonicalSpace(patterns, reps, flat.shape[0])
    seen: dict[bytes, Program] = {}
    count = 0
    for prog in programs:
        count += 1
        key = render(prog).reshape(N_CELLS).tobytes()
        if key not in seen:
            seen[key] = prog
    keys = sorted(seen)
    patterns = np.frombuffer(b"".join(keys), dtype=np.uint8).reshape(-1, N_CELLS)
    return CanonicalSpace(patterns, [seen[k] for k in keys], count)


# --- atomic examples ---------------------------------------------------------

def example_id(x: int, y: int, symbol: int) -> int:
    if not (0 <= x < GRID and 0 <= y < GRID):
        raise ValueError(f"cell ({x},{y}) out of range")
    if not 0 <= symbol < N_SYMBOLS:
        raise ValueError(f"symbol code {symbol} out of range")
    return (x * GRID + y) * N_SYMBOLS + symbol


def example_at(uid: int) -> tuple[int, int, int]:
    """Decode an utterance id to (x, y, symbol)."""
    cell, symbol = divmod(uid, N_SYMBOLS)
    x, y = divmod(cell, GRID)
    return x, y, symbol


def example_consistent(pattern: np.ndarray, x: int, y: int, symbol: int) -> bool:
    return int(pattern[x, y]) == symbol


def build_grid_game(space: CanonicalSpace) -> MeaningMatrix:
    """Meaning matrix of the canonical patterns against all atomic examples."""
    n = len(space)
    if n == 0:
        raise GameBuildError("empty canonical space")
    cells = np.arange(N_CELLS)
    uids = cells[None, :] * N_SYMBOLS + space.patterns.astype(np.int64)
    dense = np.zeros((n, N_CELLS * N_SYMBOLS), dtype=bool)
    dense[np.arange(n)[:, None], uids] = True
    return MeaningMatrix.from_dense(dense)


# --- pattern statistics ------------------------------------------------------

def sym_kinds(pattern: np.ndarray) -> tuple[int, int]:
    """Count of non-pebble cells and of distinct non-pebble symbols."""
    flat = np.asarray(pattern).reshape(-1)
    non_pebble = flat[flat != PEBBLE]
    return int(non_pebble.size), int(np.unique(non_pebble).size)


def prior_scores(space: CanonicalSpace) -> np.ndarray:
    """Crafted-prior score 100 * sym + kinds for every canonical pattern."""
    pats = space.patterns
    sym = (pats != PEBBLE).sum(axis=1)
    kinds = np.zeros(len(pats), dtype=np.int64)
    for s in range(1, N_SYMBOLS):
        kinds += (pats == s).any(axis=1)
    return 100 * sym + kinds


# --- text formats ------------------------------------------------------------

def pattern_to_text(pattern: np.ndarray) -> str:
    """Seven lines of seven symbol characters; line index is y, column is x."""
    pattern = np.asarray(pattern, dtype=np.uint8).reshape(GRID, GRID)
    return "\n".join(
        "".join(SYMBOL_CHARS[pattern[x, y]] for x in range(GRID)) for y in range(GRID)
    )


def pattern_from_text(text: str) -> np.ndarray:
    lines = [ln for ln in text.strip().splitlines()]
    if len(lines) != GRID or any(len(ln) != GRID for ln in lines):
        raise ValueError(f"pattern text must be {GRID} lines of {GRID} characters")
    pattern = np.zeros((GRID, GRID), dtype=np.uint8)
    for y, line in enumerate(lines):
        for x, ch in enumerate(line):
            try:
                pattern[x, y] = SYMBOL_CHARS.index(ch)
            except ValueError:
                raise ValueError(f"unknown symbol character {ch!r}") from None
    return pattern


def program_to_text(program: Program) -> str:
    b = program.box
    return (f"(box {b[0]} {b[1]} {b[2]} {b[3]}) "
            f"(ring {program.outer} {program.inner} {program.thickness}) "
            f"(color {program.arg} {program.colorfn})")


def program_from_text(text: str) -> Program:
    tokens = text.replace("(", " ").replace(")", " ").split()
    expect = ["box", None, None, None, None, "ring", None, None, None,
              "color", None, None]
    if len(tokens) != len(expect):
        raise ValueError(f"cannot parse program text {text!r}")
    for tok, want in zip(tokens, expect):
        if want is not None and tok != want:
            raise ValueError(f"cannot parse program text {text!r}")
    try:
        box = tuple(int(t) for t in tokens[1:5])
        thickness = int(tokens[8])
    except ValueError:
        raise ValueError(f"cannot parse program text {text!r}") from None
    return Program(box, tokens[6], tokens[7], thickness, tokens[10], tokens[11])


def parse_grid_examples(text: str) -> list[int]:
    """Parse "x,y,symbol;x,y,symbol" example lists into utterance ids."""
    ids = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        fields = [f.strip() for f in part.split(",")]
        if len(fields) != 3:
            raise ValueError(f"grid example {part!r} must be x,y,symbol")
        try:
            x, y = int(fields[0]), int(fields[1])
        except ValueError:
            raise ValueError(f"bad coordinates in example {part!r}") from None
        name = fields[2]
        if name not in SYMBOL_NAMES:
            raise ValueError(f"unknown symbol {name!r}; choose from {SYMBOL_NAMES}")
        ids.append(example_id(x, y, SYMBOL_NAMES.index(name)))
    return ids


# --- game bundle ---------------------------------------------------------------

@dataclass
class GridGame:
    """Canonical space, meaning matrix, and crafted-prior scores together."""

    space: CanonicalSpace
    matrix: MeaningMatrix
    scores: np.ndarray


_default_game: list = []


def default_grid_game() -> GridGame:
    """Process-wide grid game, built once on first use."""
    if not _default_game:
        space = canonicalize()
        _default_game.append(GridGame(space, build_grid_game(space), prior_scores(space)))
    return _default_game[0]


# --- canonical-space file ----------------------------------------------------

def save_space(space: CanonicalSpace, path) -> None:
    with open(path, "wb") as fh:
        fh.write(SPACE_MAGIC)
        fh.write(len(space).to_bytes(4, "little"))
        fh.write(space.patterns.tobytes())


def load_space(path) -> CanonicalSpace:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(SPACE_MAGIC) + 4 or not blob.startswith(SPACE_MAGIC):
        raise CacheFileError(f"{path}: not a canonical-space file")
    count = int.from_bytes(blob[len(SPACE_MAGIC): len(SPACE_MAGIC) + 4], "little")
    body = blob[len(SPACE_MAGIC) + 4:]
    if len(body) != count * N_CELLS:
        raise CacheFileError(f"{path}: truncated canonical-space file")
    patterns = np.frombuffer(body, dtype=np.uint8).reshape(count, N_CELLS)
    return CanonicalSpace(patterns, None, N_RAW_PROGRAMS)
