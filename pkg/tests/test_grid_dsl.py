import hashlib
import itertools

import numpy as np
import pytest

from pragsynth.errors import CacheFileError
from pragsynth.griddsl import (CANONICAL_TARGET, GRID, N_RAW_PROGRAMS, Program,
                               build_grid_game, canonicalize, enumerate_programs,
                               example_at, example_consistent, example_id,
                               load_space, parse_grid_examples, pattern_from_text,
                               pattern_to_text, prior_scores, program_at_index,
                               program_from_text, program_index, program_to_text,
                               render, render_all, save_space, sym_kinds)

ACHIEVED_CANONICAL = 21045  # this reconstruction's deduplicated count


def test_raw_count_is_production_product():
    assert N_RAW_PROGRAMS == 7 ** 4 * 2 * 3 * 3 * 3 * 5 == 648270


def test_empty_box_renders_all_pebble():
    p = Program((5, 5, 1, 1), "pig", "chicken", 2, "x", "identity")
    assert not render(p).any()


def test_outside_box_is_pebble_inside_is_not():
    # pebble at (0,0), red pig at (3,3); blue pig at (6,6) is inconsistent
    p = Program((1, 1, 5, 5), "pig", "pig", 3, "x", "const0")
    pat = render(p)
    assert pat[0, 0] == 0
    assert pat[3, 3] == 4  # pig_red
    assert example_consistent(pat, 0, 0, 0)
    assert example_consistent(pat, 3, 3, 4)
    assert not example_consistent(pat, 6, 6, 6)


def test_full_grid_identity_stripes_have_period_three():
    p = Program((0, 0, 6, 6), "pig", "pig", 3, "x", "identity")
    pat = render(p)
    for x in range(GRID):
        assert (pat[x, :] == 4 + x % 3).all()


def test_ring_wraps_fill():
    p = Program((1, 1, 5, 5), "pig", "chicken", 1, "y", "const2")
    pat = render(p)
    assert pat[1, 1] == 6   # border cell: pig_blue
    assert pat[3, 3] == 3   # interior: chicken_blue
    assert pat[2, 1] == 6   # top edge is ring
    assert pat[0, 3] == 0   # outside


def test_pebble_inner_is_colorless_hollow():
    p = Program((2, 2, 5, 5), "chicken", "pebble", 1, "x", "identity")
    pat = render(p)
    assert pat[3, 3] == 0
    assert pat[2, 2] != 0


def test_enumerate_count_and_box_tuples():
    boxes = set()
    count = 0
    for prog in enumerate_programs():
        count += 1
        boxes.add(prog.box)
    assert count == N_RAW_PROGRAMS
    assert len(boxes) == 7 ** 4 == 2401


def test_enumeration_deterministic_and_indexable():
    sampled = []
    for i, prog in enumerate(enumerate_programs()):
        if i % 10000 == 0:
            sampled.append(prog)
            assert program_at_index(i) == prog
            assert program_index(prog) == i
    digest = hashlib.sha256("|".join(program_to_text(p) for p in sampled).encode()).hexdigest()
    assert digest == hashlib.sha256(
        "|".join(program_to_text(program_at_index(i))
                 for i in range(0, N_RAW_PROGRAMS, 10000)).encode()).hexdigest()


def test_render_all_matches_scalar_renderer():
    flat = render_all()
    rng = np.random.default_rng(0)
    for i in rng.integers(0, N_RAW_PROGRAMS, size=300):
        prog = program_at_index(int(i))
        assert np.array_equal(flat[int(i)].reshape(GRID, GRID), render(prog))


def test_canonicalize_full_space(grid_game):
    space = grid_game.space
    assert space.raw_count == N_RAW_PROGRAMS
    assert len(space) == ACHIEVED_CANONICAL
    assert len(space) != CANONICAL_TARGET  # known reconstruction discrepancy
    # sorted by byte order, no duplicates
    as_bytes = [p.tobytes() for p in space.patterns]
    assert as_bytes == sorted(as_bytes)
    assert len(set(as_bytes)) == len(as_bytes)
    # representative renders to its own pattern
    rng = np.random.default_rng(1)
    for h in rng.integers(0, len(space), size=100):
        rep = space.rep_programs[int(h)]
        assert np.array_equal(render(rep).reshape(-1), space.patterns[int(h)])


def test_all_pebble_appears_exactly_once(grid_game):
    space = grid_game.space
    zero_rows = np.nonzero(~space.patterns.any(axis=1))[0]
    assert len(zero_rows) == 1
    assert zero_rows[0] == 0  # byte order puts it first


def test_empty_box_programs_collapse_across_colorfns():
    base = dict(box=(4, 0, 2, 6), outer="pig", inner="chicken", thickness=1, arg="x")
    pats = {render(Program(colorfn=cf, **base)).tobytes()
            for cf in ("const0", "const1", "const2", "identity", "twice_parity")}
    assert len(pats) == 1


def test_const_color_ignores_arg():
    base = dict(box=(1, 1, 5, 5), outer="pig", inner="pig", thickness=2, colorfn="const1")
    pats = {render(Program(arg=a, **base)).tobytes() for a in ("x", "y", "x+y")}
    assert len(pats) == 1


def test_canonicalize_is_idempotent(grid_game):
    space = grid_game.space
    again = canonicalize(iter(space.rep_programs))
    assert len(again) == len(space)
    assert np.array_equal(again.patterns, space.patterns)


def test_every_pattern_has_one_consistent_example_per_cell(grid_game):
    matrix = grid_game.matrix
    sizes = {matrix.cols[h].bit_count() for h in range(matrix.n_hypotheses)}
    assert sizes == {49}


def test_bounding_box_property():
    rng = np.random.default_rng(2)
    for i in rng.integers(0, N_RAW_PROGRAMS, size=200):
        prog = program_at_index(int(i))
        pat = render(prog)
        xmin, ymin, xmax, ymax = prog.box
        for x, y in zip(*np.nonzero(pat)):
            assert xmin <= x <= xmax and ymin <= y <= ymax


def test_sym_kinds_published_example():
    # 7x4 box checkered in two pig colors: 28 symbols of 2 kinds
    p = Program((0, 0, 6, 3), "pig", "pig", 3, "x+y", "twice_parity")
    assert sym_kinds(render(p)) == (28, 2)


def test_sym_kinds_edges():
    assert sym_kinds(np.zeros((GRID, GRID), dtype=np.uint8)) == (0, 0)
    assert sym_kinds(np.full((GRID, GRID), 3, dtype=np.uint8)) == (49, 1)


def test_prior_scores_match_sym_kinds(grid_game):
    scores = grid_game.scores
    rng = np.random.default_rng(3)
    for h in rng.integers(0, len(grid_game.space), size=200):
        sym, kinds = sym_kinds(grid_game.space.patterns[int(h)])
        assert scores[int(h)] == 100 * sym + kinds
    assert scores[0] == 0  # the all-pebble pattern


def test_pattern_text_roundtrip():
    p = Program((1, 0, 5, 4), "chicken", "pig", 1, "x+y", "identity")
    pat = render(p)
    text = pattern_to_text(pat)
    assert len(text.splitlines()) == GRID
    assert np.array_equal(pattern_from_text(text), pat)
    with pytest.raises(ValueError):
        pattern_from_text("....\n..")
    with pytest.raises(ValueError):
        pattern_from_text(text.replace(".", "?"))


def test_pattern_text_frozen_example():
    p = Program((0, 0, 2, 2), "pig", "pebble", 1, "x", "const0")
    assert pattern_to_text(render(p)) == "\n".join([
        "RRR....",
        "R.R....",
        "RRR....",
        ".......",
        ".......",
        ".......",
        ".......",
    ])


def test_program_text_roundtrip():
    for prog in (program_at_index(i) for i in (0, 123456, N_RAW_PROGRAMS - 1)):
        assert program_from_text(program_to_text(prog)) == prog
    with pytest.raises(ValueError):
        program_from_text("(box 1 2 3) (ring pig pig 1) (color x const0)")
    with pytest.raises(ValueError):
        program_from_text("(box 0 0 6 6) (ring pig cow 1) (color x const0)")


def test_example_id_roundtrip():
    seen = set()
    for x, y, s in itertools.product(range(GRID), range(GRID), range(7)):
        uid = example_id(x, y, s)
        assert example_at(uid) == (x, y, s)
        seen.add(uid)
    assert seen == set(range(343))
    with pytest.raises(ValueError):
        example_id(7, 0, 0)
    with pytest.raises(ValueError):
        example_id(0, 0, 9)


def test_parse_grid_examples():
    assert parse_grid_examples("0,0,pebble;3,3,pig_red") == [
        example_id(0, 0, 0), example_id(3, 3, 4)]
    with pytest.raises(ValueError):
        parse_grid_examples("0,0,emerald_toad")
    with pytest.raises(ValueError):
        parse_grid_examples("9,0,pebble")
    with pytest.raises(ValueError):
        parse_grid_examples("1,2")


def test_space_file_roundtrip(tmp_path, grid_game):
    path = tmp_path / "space.bin"
    save_space(grid_game.space, path)
    loaded = load_space(path)
    assert np.array_equal(loaded.patterns, grid_game.space.patterns)
    assert loaded.rep_programs is None
    (tmp_path / "bad.bin").write_bytes(b"WRONG" + path.read_bytes()[5:])
    with pytest.raises(CacheFileError):
        load_space(tmp_path / "bad.bin")
    (tmp_path / "short.bin").write_bytes(path.read_bytes()[:-7])
    with pytest.raises(CacheFileError):
        load_space(tmp_path / "short.bin")


def test_grid_game_matrix_dimensions(grid_game):
    assert grid_game.matrix.n_hypotheses == len(grid_game.space)
    assert grid_game.matrix.n_utterances == 343


def test_index_of_lookup(grid_game):
    pat = grid_game.space.pattern(1234)
    assert grid_game.space.index_of(pat) == 1234
    # two isolated opposite corners force a full-grid box whose border could
    # not be pebble, so no program renders this
    impossible = np.zeros((GRID, GRID), dtype=np.uint8)
    impossible[0, 0] = 1
    impossible[6, 6] = 1
    with pytest.raises(KeyError):
        grid_game.space.index_of(impossible)


def test_program_field_validation():
    with pytest.raises(ValueError):
        Program((0, 0, 9, 0), "pig", "pig", 1, "x", "const0")
    with pytest.raises(ValueError):
        Program((0, 0, 6, 6), "cow", "pig", 1, "x", "const0")
    with pytest.raises(ValueError):
        Program((0, 0, 6, 6), "pig", "pig", 4, "x", "const0")
    with pytest.raises(ValueError):
        Program((0, 0, 6, 6), "pig", "pig", 1, "z", "const0")
    with pytest.raises(ValueError):
        Program((0, 0, 6, 6), "pig", "pig", 1, "x", "rainbow")
