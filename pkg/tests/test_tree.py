import pytest
from hypothesis import given
from hypothesis import strategies as st

from treeshift.tree import (
    INF,
    Br,
    Neg,
    TreeModel,
    ancestor,
    chi_n,
    children,
    depth_below,
    format_vertex,
    parent,
    parse_vertex,
    truncation_vertices,
)

vertices = st.one_of(
    st.builds(Neg, st.integers(0, 50)),
    st.builds(Br, st.integers(1, 50), st.integers(1, 50)),
)


@given(vertices)
def test_vertex_text_roundtrip(v):
    assert parse_vertex(format_vertex(v)) == v


def test_vertex_notation():
    assert format_vertex(Neg(0)) == "0"
    assert format_vertex(Neg(3)) == "-3"
    assert format_vertex(Br(2, 5)) == "(2,5)"
    for bad in ("3", "(0,1)", "x", "(1,)"):
        with pytest.raises(ValueError):
            parse_vertex(bad)


def test_parent_and_root():
    t = TreeModel(3, 2)
    assert t.root == Neg(2)
    assert parent(t, Neg(2)) is None
    assert parent(t, Neg(0)) == Neg(1)
    assert parent(t, Br(2, 1)) == Neg(0)
    assert parent(t, Br(2, 4)) == Br(2, 3)
    assert not t.contains(Neg(3))
    with pytest.raises(ValueError):
        parent(t, Br(4, 1))


def test_invalid_models():
    with pytest.raises(ValueError):
        TreeModel(1, 0)
    with pytest.raises(ValueError):
        TreeModel(2, -1)


def test_children_finite_and_infinite():
    assert list(children(TreeModel(3, 0), Neg(0))) == [Br(1, 1), Br(2, 1), Br(3, 1)]
    gen = children(TreeModel(INF, INF), Neg(0))
    assert [next(gen) for _ in range(4)] == [Br(i, 1) for i in range(1, 5)]


def test_generation_sets():
    t = TreeModel(INF, 2)
    assert chi_n(t, Neg(2), 1).vertices == (Neg(1),)
    s = chi_n(t, Neg(1), 3, branches=4)
    assert s.vertices == tuple(Br(i, 2) for i in range(1, 5))
    assert s.truncated
    with pytest.raises(ValueError):
        chi_n(t, Neg(0), 1)
    assert not chi_n(TreeModel(2, 0), Neg(0), 2).truncated


@given(st.integers(0, 5), st.integers(1, 5), st.integers(1, 6), st.integers(0, 8))
def test_generation_inverts_ancestor(kappa, i, j, n):
    t = TreeModel(5, kappa)
    v = Br(i, j)
    u = ancestor(t, v, n)
    if u is None:
        return
    assert v in chi_n(t, u, n).vertices
    assert depth_below(t, u, v) == n


def test_truncation_order():
    t = TreeModel(INF, 2)
    verts = truncation_vertices(t, 2, 2)
    assert verts == [Neg(2), Neg(1), Neg(0), Br(1, 1), Br(1, 2), Br(2, 1), Br(2, 2)]
