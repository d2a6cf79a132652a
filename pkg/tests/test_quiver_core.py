from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arknit.errors import ComputationError, QuiverFormatError
from arknit.quiver import (
    Path,
    Quiver,
    TranslationQuiver,
    length_function,
    parse_quiver,
    serialize_quiver,
    validate,
)

# AR quiver of the A_2 path algebra (1 -> 2), laid out by hand:
# vertex 1 = P(2), vertex 2 = P(1) (also injective), vertex 3 = I(1);
# arrows 1: 1->2, 2: 2->3; tau(3) = 1, sigma(arrow 2) = arrow 1.
A2_AR_TEXT = """\
# AR quiver of the A_2 path algebra
v 1 P
v 2 P I
v 3 I
a 1 1 2
a 2 2 3
t 3 1
s 2 1
"""


def _a2_ar() -> TranslationQuiver:
    q = parse_quiver(A2_AR_TEXT)
    assert isinstance(q, TranslationQuiver)
    return q


def test_parse_basic_fields():
    tq = _a2_ar()
    assert tq.vertices == (1, 2, 3)
    assert tq.arrows == {1: (1, 2), 2: (2, 3)}
    assert tq.projectives == frozenset({1, 2})
    assert tq.injectives == frozenset({2, 3})
    assert tq.tau == {3: 1}
    assert tq.sigma == {2: 1}
    assert tq.out_arrows(1) == (1,)
    assert tq.in_arrows(3) == (2,)


def test_parse_ordinary_quiver():
    q = parse_quiver("v 1\nv 2\na 1 1 2\n")
    assert isinstance(q, Quiver)
    assert not isinstance(q, TranslationQuiver)
    assert q.is_acyclic()
    assert q.is_connected()


def test_serialize_round_trip():
    text = serialize_quiver(_a2_ar())
    again = serialize_quiver(parse_quiver(text))
    assert text == again
    assert "t 3 1" in text
    assert "s 2 1" in text


@pytest.mark.parametrize(
    "bad, hint",
    [
        ("x 1\n", "line 1"),
        ("v one\n", "line 1"),
        ("v 1\nv 1\n", "line 2"),
        ("v 1\na 1 1 2\n", "line 2"),
        ("v 1\nv 2\na 1 1 2\nt 3 1\n", "line 4"),
        ("v 1\nv 2\na 1 1 2\ns 2 1\n", "line 4"),
        ("v 1 Q\n", "line 1"),
        ("a\n", "line 1"),
    ],
)
def test_parse_errors_carry_line_numbers(bad, hint):
    with pytest.raises(QuiverFormatError) as err:
        parse_quiver(bad)
    assert hint in str(err.value)


def test_validate_accepts_a2():
    report = validate(_a2_ar())
    assert report.ok
    assert report.violations == []


def test_validate_catches_loop():
    tq = TranslationQuiver(
        vertices=[1],
        arrows={1: (1, 1)},
        projectives={1},
        injectives={1},
        tau={},
        sigma={},
    )
    report = validate(tq)
    assert not report.ok
    assert any("loop" in v for v in report.violations)


def test_validate_catches_missing_tau():
    tq = TranslationQuiver(
        vertices=[1, 2, 3],
        arrows={1: (1, 2), 2: (2, 3)},
        projectives={1, 2},
        injectives={2, 3},
        tau={},
        sigma={},
    )
    report = validate(tq)
    assert not report.ok
    assert any("tau" in v and "3" in v for v in report.violations)


def test_validate_catches_tau_hitting_injective():
    tq = TranslationQuiver(
        vertices=[1, 2, 3],
        arrows={1: (1, 2), 2: (2, 3)},
        projectives={1, 2},
        injectives={1, 2, 3},
        tau={3: 1},
        sigma={2: 1},
    )
    report = validate(tq)
    assert not report.ok
    assert any("injective" in v for v in report.violations)


def test_validate_catches_bad_sigma_endpoints():
    tq = TranslationQuiver(
        vertices=[1, 2, 3],
        arrows={1: (1, 2), 2: (2, 3)},
        projectives={1, 2},
        injectives={2, 3},
        tau={3: 1},
        sigma={2: 2},
    )
    report = validate(tq)
    assert not report.ok
    assert any("sigma" in v for v in report.violations)


def test_length_function_a2():
    tq = _a2_ar()
    lf = length_function(tq)
    assert lf == {1: 0, 2: 1, 3: 2}


def test_length_function_absent():
    q = parse_quiver("v 1\nv 2\nv 3\na 1 1 2\na 2 2 3\na 3 1 3\n")
    with pytest.raises(ComputationError):
        length_function(q)


def test_length_function_disconnected_components():
    q = parse_quiver("v 1\nv 2\nv 5\nv 6\na 1 1 2\na 2 5 6\n")
    lf = length_function(q)
    assert lf[1] == 0 and lf[2] == 1
    assert lf[5] == 0 and lf[6] == 1


def test_mesh_at():
    tq = _a2_ar()
    mesh = tq.mesh_at(3)
    assert mesh.end == 3
    assert mesh.start == 1
    assert mesh.arms == ((2, 1),)
    assert tq.mesh_at(1) is None


def test_hook_and_sectional():
    tq = _a2_ar()
    assert tq.is_hook(1, 2)
    assert not tq.is_sectional(Path(1, (1, 2)))
    assert tq.is_sectional(Path(1, (1,)))
    assert tq.is_sectional(Path(2, (2,)))
    assert tq.is_sectional(Path(1, ()))


def test_sectional_prefixes():
    # prefixes of a sectional path stay sectional
    tq = _a2_ar()
    p = Path(1, (1, 2))
    for k in range(len(p.arrows) + 1):
        pre = Path(1, p.arrows[:k])
        if not tq.is_sectional(p) and k == len(p.arrows):
            continue
        assert tq.is_sectional(pre) or k == len(p.arrows)


def test_path_endpoints():
    tq = _a2_ar()
    p = Path(1, (1, 2))
    assert tq.path_end(p) == 3
    assert p.length == 2
    with pytest.raises(ComputationError):
        tq.path_end(Path(1, (2,)))


def test_enumerate_paths():
    tq = _a2_ar()
    ps = tq.paths_between(1, 3)
    assert [p.arrows for p in ps] == [(1, 2)]
    assert tq.paths_between(3, 1) == []
    assert [p.arrows for p in tq.paths_between(2, 2)] == [()]


def test_opposite():
    q = parse_quiver("v 1\nv 2\na 1 1 2\n")
    op = q.opposite()
    assert op.arrows == {1: (2, 1)}


def test_parallel_classes():
    q = parse_quiver("v 1\nv 2\na 1 1 2\na 2 1 2\n")
    assert q.parallel_classes() == {(1, 2): (1, 2)}


@st.composite
def acyclic_quivers(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    verts = list(range(1, n + 1))
    arrows = {}
    aid = 1
    for i in verts:
        for j in verts:
            if i < j and draw(st.booleans()):
                arrows[aid] = (i, j)
                aid += 1
    return Quiver(verts, arrows)


@settings(max_examples=50, deadline=None)
@given(acyclic_quivers())
def test_serialize_parse_identity(q):
    text = serialize_quiver(q)
    q2 = parse_quiver(text)
    assert q2.vertices == q.vertices
    assert q2.arrows == q.arrows
    assert serialize_quiver(q2) == text


@settings(max_examples=50, deadline=None)
@given(acyclic_quivers())
def test_acyclic_generator_is_acyclic(q):
    assert q.is_acyclic()
    order = q.topological_order()
    pos = {v: i for i, v in enumerate(order)}
    for src, tgt in q.arrows.values():
        assert pos[src] < pos[tgt]
