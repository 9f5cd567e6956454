from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdftrans import synth
from pdftrans.layout import LayoutBox, LayoutClass, assign_runs, detect_layout_rules
from pdftrans.model import BBox, FontRef, TextRun, union_all
from pdftrans.pdf import parse_document
from pdftrans.segmenter import (
    PUA_FIRST,
    Paragraph,
    PlaceholderViolation,
    assemble_paragraphs,
    is_math_font,
    is_private_use,
    is_symbol_text,
    protect_elements,
    restore_elements,
)

FONTS = {
    "F1": FontRef("F1", "F1", "Helvetica", "simple-byte"),
    "FI": FontRef("FI", "FI", "Helvetica-Oblique", "simple-byte", italic=True),
    "M1": FontRef("M1", "M1", "CMMI10", "simple-byte", italic=True),
    "M2": FontRef("M2", "M2", "ABCDEF+CMSY10", "simple-byte"),
}


def mk(text: str, x: float, y: float, font: str = "F1", size: float = 10.0, upright: bool = True) -> TextRun:
    width = 5.0 * len(text)
    return TextRun(text, BBox(x, y - 2, x + width, y + 8), font, size, 0, origin=(x, y), upright=upright)


def one_box(runs, cls=LayoutClass.PLAIN_TEXT, warnings=None) -> list[Paragraph]:
    box = LayoutBox(cls, union_all(r.bbox for r in runs))
    return assemble_paragraphs(runs, [0] * len(runs), [box], warnings)


def paragraph_of(runs, warnings=None) -> Paragraph:
    (p,) = one_box(runs, warnings=warnings)
    return protect_elements(p, FONTS, warnings)


# -- assembly -----------------------------------------------------------------------


def test_rows_top_first():
    (p,) = one_box([mk("second", 72, 688), mk("first", 72, 700)])
    assert [r.text for r in p.runs] == ["first", "second"]
    assert p.text == "first second"


def test_single_run_paragraph():
    (p,) = one_box([mk("alone", 72, 700)])
    assert p.text == "alone" and p.masked_text == "alone"


def test_same_row_left_to_right_with_word_gap():
    a = mk("left", 72, 700)
    b = mk("right", a.bbox.x1 + 3, 701)  # small baseline jitter, gap 3pt > 0.15 x 10
    c = mk("tail", b.bbox.x1 + 0.5, 700)  # 0.5pt: same word
    (p,) = one_box([c, b, a])
    assert p.text == "left righttail"


def test_hyphen_merged_across_rows():
    (p,) = one_box([mk("transla-", 72, 700), mk("tion works", 72, 688)])
    assert p.text == "translation works"
    (q,) = one_box([mk("well-", 72, 700), mk("Known", 72, 688)])
    assert q.text == "well- Known"


def test_cjk_rows_join_without_space():
    (p,) = one_box([mk("版面保持", 72, 700), mk("翻译", 72, 688)])
    assert p.text == "版面保持翻译"


def test_unassigned_runs_dropped_and_empty_boxes_skipped():
    boxes = [LayoutBox(LayoutClass.PLAIN_TEXT, BBox(0, 0, 100, 100)), LayoutBox(LayoutClass.PLAIN_TEXT, BBox(200, 0, 300, 100))]
    paras = assemble_paragraphs([mk("x", 10, 10), mk("y", 500, 500)], [0, None], boxes)
    assert [p.text for p in paras] == ["x"]


def _signature(paras):
    return [(p.cls, p.box, [(r.text, r.bbox) for r in p.runs], p.separators) for p in paras]


def _paragraphs_for(runs):
    boxes = detect_layout_rules(runs, BBox(0, 0, 612, 792))
    return assemble_paragraphs(runs, assign_runs(runs, boxes), boxes)


@settings(max_examples=20, deadline=None)
@given(st.randoms(use_true_random=False))
def test_assembly_permutation_invariant(rnd):
    runs = parse_document(synth.build_pdf([synth.two_column_page(seed=5, page_number=2)])).pages[0].runs
    shuffled = list(runs)
    rnd.shuffle(shuffled)
    assert _signature(_paragraphs_for(shuffled)) == _signature(_paragraphs_for(sorted(runs, key=lambda r: r.index)))


def test_columns_read_left_before_right():
    runs = parse_document(synth.build_pdf([synth.two_column_page(seed=6)])).pages[0].runs
    paras = [p for p in _paragraphs_for(runs) if p.cls is LayoutClass.PLAIN_TEXT]
    xs = [p.box.x0 for p in paras]
    assert xs == sorted(xs)
    left = [p for p in paras if p.box.x0 < 300]
    assert [p.box.y1 for p in left] == sorted((p.box.y1 for p in left), reverse=True)


@pytest.mark.parametrize("cls", [LayoutClass.FIGURE, LayoutClass.TABLE, LayoutClass.ISOLATE_FORMULA, LayoutClass.ABANDON])
def test_non_translatable_classes(cls):
    (p,) = one_box([mk("text", 72, 700)], cls)
    assert not p.translatable


def test_rotated_run_makes_paragraph_verbatim():
    (p,) = one_box([mk("flat", 72, 700), mk("tilted", 72, 688, upright=False)])
    assert not p.translatable


# -- protection ------------------------------------------------------------------------


def test_inline_math_masked():
    a = mk("the relation ", 72, 700)
    m = mk("E=mc²", a.bbox.x1, 700, "M1")
    b = mk(" holds", m.bbox.x1, 700)
    p = paragraph_of([a, m, b])
    assert p.masked_text == "the relation  holds"
    assert [g.text for g in p.placeholders.groups] == ["E=mc²"]


def test_no_protected_runs():
    p = paragraph_of([mk("plain words only", 72, 700)])
    assert p.masked_text == "plain words only"
    assert len(p.placeholders) == 0


def test_existing_private_use_stripped():
    warnings: list[str] = []
    p = paragraph_of([mk("badchar", 72, 700)], warnings)
    assert p.masked_text == "badchar"
    assert warnings
    assert not any(is_private_use(c) for c in p.masked_text)


def test_adjacent_math_runs_share_a_token_per_row():
    a = mk("x", 72, 700, "M1")
    b = mk("+", a.bbox.x1, 700, "M2")
    c = mk("y", b.bbox.x1, 700, "M1")
    d = mk("z", 72, 688, "M1")
    p = paragraph_of([a, b, c, d])
    assert p.masked_text == " "
    assert [g.text for g in p.placeholders.groups] == ["x+y", "z"]


@pytest.mark.parametrize(
    "name, expected",
    [
        ("CMMI10", True),
        ("CMSY7", True),
        ("CMEX10", True),
        ("XYZABC+CMMI12", True),
        ("STIXMath-Regular", True),
        ("MSBM10", True),
        ("MSAM10", True),
        ("CMR10", False),
        ("CMBX12", False),
        ("Helvetica", False),
        ("TimesNewRoman", False),
    ],
)
def test_math_font_predicate(name, expected):
    assert is_math_font(FontRef("x", "x", name, "simple-byte")) is expected


def test_symbol_predicate():
    assert is_symbol_text("∑ ∫")
    assert is_symbol_text("≤")
    assert not is_symbol_text("a ≤ b")
    assert not is_symbol_text("   ")


def test_italic_single_letter_next_to_operator():
    a = mk("let ", 72, 700)
    x = mk("x", a.bbox.x1, 700, "FI")
    eq = mk("= 3 and ", x.bbox.x1, 700)
    v = mk("v", eq.bbox.x1, 700, "FI")
    tail = mk(" be fixed", v.bbox.x1, 700)
    p = paragraph_of([a, x, eq, v, tail])
    assert [g.text for g in p.placeholders.groups] == ["x"]


# -- restoration -----------------------------------------------------------------------


def _formula_paragraph() -> Paragraph:
    a = mk("the relation ", 72, 700)
    m = mk("E=mc²", a.bbox.x1, 700, "M1")
    b = mk(" holds", m.bbox.x1, 700)
    return paragraph_of([a, m, b])


def test_restore_splits_on_tokens():
    p = _formula_paragraph()
    segs = restore_elements("la relación  se cumple", p.placeholders)
    assert [s.protected for s in segs] == [False, True, False]
    assert segs[1].group.text == "E=mc²"


@pytest.mark.parametrize(
    "translated, kind",
    [("la relación se cumple", "missing"), (" y ", "duplicated"), (" ", "unknown")],
)
def test_restore_violations(translated, kind):
    with pytest.raises(PlaceholderViolation) as info:
        restore_elements(translated, _formula_paragraph().placeholders)
    assert info.value.kind == kind


# -- properties ---------------------------------------------------------------------------

_text_chars = st.sampled_from(list("abcdefg xyz-") + ["", "é", "版"])


@st.composite
def random_paragraphs(draw):
    runs = []
    y = 700.0
    for _ in range(draw(st.integers(1, 4))):
        x = 72.0
        for _ in range(draw(st.integers(1, 5))):
            text = draw(st.text(_text_chars, min_size=1, max_size=8))
            font = draw(st.sampled_from(sorted(FONTS)))
            r = mk(text, x, y, font)
            runs.append(r)
            x = r.bbox.x1 + draw(st.sampled_from([0.0, 3.0]))
        y -= 12
    return runs


def check_bijective_round_trip(runs) -> None:
    paras = one_box(runs)
    if not paras:
        return
    p = protect_elements(paras[0], FONTS, [])
    tokens = [c for c in p.masked_text if is_private_use(c)]
    # bijective: each token once, consecutive from U+E000
    assert sorted(tokens) == [chr(PUA_FIRST + k) for k in range(len(p.placeholders))]
    segs = restore_elements(p.masked_text, p.placeholders)
    protected_runs = [r for s in segs if s.protected for r in s.group.runs]
    assert protected_runs == p.protected_runs
    # rebuild the paragraph text: protected groups keep their own inner separators
    sep_of = {id(r): s for r, s in zip(p.runs, p.separators)}
    rebuilt = "".join(
        s.text if not s.protected else "".join((sep_of[id(r)] if k else "") + r.text for k, r in enumerate(s.group.runs))
        for s in segs
    )
    assert rebuilt == p.text


@settings(max_examples=200, deadline=None)
@given(random_paragraphs())
def test_placeholder_bijective_round_trip(runs):
    check_bijective_round_trip(runs)


def test_reverser_keeps_tokens_valid():
    rng = random.Random(5)
    p = _formula_paragraph()
    for _ in range(50):
        text = "".join(rng.choice("abc ") for _ in range(rng.randint(0, 6))) + "" + "xyz"
        segs = restore_elements(text[::-1], p.placeholders)
        assert sum(s.protected for s in segs) == 1
