import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hschwarz.analytic import Add, Compose, Constant, Div, Exp, Identity, Mobius, MobiusLeaf, Mul, Polynomial, Scale
from hschwarz.corpus import BASE_NAMES, build_documents, corpus_pairs, load_corpus
from hschwarz.documents import (
    MapSpec,
    emit_document,
    emit_expr,
    emit_text,
    fmt_float,
    merged,
    parse_expr,
    parse_text,
)
from hschwarz.errors import DocumentError
from hschwarz.grid import DEFAULT_GRID


def test_corpus_file_matches_generator():
    from importlib import resources

    text = resources.files("hschwarz").joinpath("data/corpus.jsonl").read_text(encoding="utf-8")
    assert text == emit_text(build_documents())
    assert len(load_corpus()) == 13 and len(BASE_NAMES) == 10


def test_round_trip_every_corpus_document():
    for doc in load_corpus():
        again = parse_text(emit_document(doc))[0]
        assert again.maps == doc.maps
        assert emit_document(again) == emit_document(doc)


def test_round_trip_preserves_values():
    pts = DEFAULT_GRID.points()
    for doc in load_corpus():
        again = parse_text(emit_document(doc))[0]
        for name in doc.names():
            assert np.array_equal(doc.harmonic(name)(pts), again.harmonic(name)(pts))


def test_every_tag_round_trips():
    e = Add((
        Mul(Polynomial((1, 2j)), Exp()),
        Div(Identity(), Constant(3 - 1j)),
        Compose(MobiusLeaf(Mobius(1, 0.5, 0.1, 2)), Scale(0.5j, Identity())),
    ))
    assert parse_expr(json.loads(emit_expr(e))) == e


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_float_is_lossless(x):
    s = fmt_float(x)
    assert float(s) == x and json.loads(s) == x


def test_fmt_float_rejects_non_finite():
    with pytest.raises(ValueError):
        fmt_float(math.inf)


def test_comments_and_blank_lines():
    text = "# corpus\n\n" + '{"maps": {"f": {"h": {"identity": {}}, "g": {"const": 0}}}}\n'
    (doc,) = parse_text(text)
    assert doc.line == 3 and doc.names() == ["f"]
    assert doc.maps["f"].g == Constant(0)


def test_omega_form():
    text = '{"maps": {"k": {"h": {"poly": [[0,0],[1,0],[0.5,0]]}, "omega": {"poly": [0, 1]}}}}'
    spec = parse_text(text)[0].maps["k"]
    assert spec.omega_form
    f = spec.build()
    z = 0.3 + 0.1j
    assert abs(f.g.jet(np.array([z])).d1[0] - z * (1 + z)) < 1e-15
    assert parse_text(emit_document({"k": spec}))[0].maps["k"] == spec


@pytest.mark.parametrize(
    "line, path, needle",
    [
        ('{"maps": {"f": {"h": {"exp": {}}, "omega": {"poly": [0, 1]}}}}', "$.maps.f.h", "polynomial"),
        ('{"maps": {"f": {"h": {"identity": {}}}}}', "$.maps.f", "keys"),
        ('{"maps": {"f": {"h": {"nope": 1}, "g": {"const": 0}}}}', "$.maps.f.h", "unknown tag"),
        ('{"maps": {"f": {"h": {"add": [{"identity": {}}, {"poly": [[1, 2, 3]]}]}, "g": {"const": 0}}}}',
         "$.maps.f.h.add[1].poly[0]", "complex"),
        ('{"maps": {"f": {"h": {"mobius": {"a": 1, "b": 0, "c": 0}}, "g": {"const": 0}}}}',
         "$.maps.f.h.mobius", "a, b, c, d"),
        ('{"maps": {"f": {"h": {"mul": [{"exp": {}}]}, "g": {"const": 0}}}}', "$.maps.f.h.mul", "2 items"),
        ('{"maps": {"f": {"h": {"const": true}, "g": {"const": 0}}}}', "$.maps.f.h.const", "complex"),
        ('{"maps": []}', "$", "maps"),
        ('{"maps": {"f": {"h": {"mobius": {"a": 1, "b": 2, "c": 2, "d": 4}}, "g": {"const": 0}}}}',
         "$.maps.f.h.mobius", "degenerate"),
    ],
)
def test_errors_carry_line_and_path(line, path, needle):
    with pytest.raises(DocumentError) as ei:
        parse_text("# header\n" + line + "\n")
    err = ei.value
    assert err.line == 2 and err.path == path
    assert needle in err.message.lower()


def test_invalid_json_reports_line():
    with pytest.raises(DocumentError) as ei:
        parse_text('{"maps": {}}\n{"maps": \n')
    assert ei.value.line == 2


def test_non_univalent_map_rejected_with_point():
    # h' vanishes at z = -0.5, inside the grid
    line = '{"maps": {"f": {"h": {"poly": [0, 1, 1]}, "g": {"const": 0}}}}'
    with pytest.raises(DocumentError) as ei:
        parse_text(line)
    assert ei.value.path == "$.maps.f" and "0.5" in str(ei.value)


def test_merged_later_documents_win():
    docs = load_corpus()
    m = merged(docs)
    assert m["f1"] == corpus_pairs()["constant_family"].maps["f1"]
    assert set(BASE_NAMES) <= set(m)


def test_mapspec_forms():
    s = MapSpec(h=Polynomial((0, 1)), g=Constant(0))
    assert not s.omega_form and s.build().g == Constant(0)
