import random

import pytest

from polyvis.cones import (
    ChainNotConcave, chain_position, clip_interval, cone_contains,
    cones_through_chain, cones_through_diagonal, element_at_position,
    query_cone, through_diagonal_brute,
)
from polyvis.counters import measure
from polyvis.geom import (
    LSHAPE, OUTSIDE, P, Point, Polygon, Q, SQUARE, comb, cross, on_segment,
)
from polyvis.generators import gen_polygon
from polyvis.tripaths import triangulate


def far_side(poly, diag):
    """The subpolygon on the query side of the diagonal."""
    i, j = diag
    n = poly.n
    idx = [(j + t) % n for t in range((i - j) % n + 1)]
    return Polygon([poly.vertices[k] for k in idx])


def stabbed(cs, q):
    return frozenset(c.gen for c in cs.cones if cone_contains(c, q))


def test_square_vertex_cone_spans_diagonal():
    tri = triangulate(SQUARE)
    cs = cones_through_diagonal(SQUARE, tri, (0, 2))
    assert [c.gen for c in cs.cones] == [1, 2, 3, 4, 5]
    cone = next(c for c in cs.cones if c.gen == 3)
    # vertex (4,0) sees all of the diagonal: rays through its endpoints
    assert cone.ta == (P(4, 0), P(0, 0))
    assert cone.tb == (P(4, 0), P(4, 4))
    # a convex split: every element visible from anywhere on the far side
    for q in (P(1, 3), P(2, 3), P("1/2", "7/2")):
        assert stabbed(cs, q) == frozenset([1, 2, 3, 4, 5])


def test_lshape_quad_side_cones():
    tri = triangulate(LSHAPE)
    cs = cones_through_diagonal(LSHAPE, tri, (3, 0))
    assert [c.gen for c in cs.cones] == [7, 8, 9, 10, 11, 12, 1]
    by_gen = {c.gen: c for c in cs.cones}
    # the diagonal endpoints see everything on the query side
    assert by_gen[7].ta is None and by_gen[1].ta is None
    # vertex (2,4): one tangent along x=2, the other through (0,0)
    cone = by_gen[9]
    assert cone.ta == (P(2, 4), P(2, 2))
    assert cone.tb == (P(2, 4), P(0, 0))
    assert stabbed(cs, P(1, "1/2")) == frozenset([1, 7, 8, 9, 10, 11, 12])
    assert stabbed(cs, P(3, "1/2")) == frozenset([1, 7, 10, 11, 12])
    assert stabbed(cs, P("7/2", "3/2")) == frozenset([1, 7, 12])


def test_elements_invisible_to_diagonal_are_omitted():
    poly = comb(2)
    cs = cones_through_diagonal(poly, triangulate(poly), (5, 1))
    gens = [c.gen for c in cs.cones]
    assert gens == [11, 12, 13, 15, 16, 1, 2, 3]
    assert 14 not in gens   # edge (1,3)-(0,3) hidden behind the tooth


def test_grid_matches_brute():
    cases = ((LSHAPE, [(3, 0), (0, 3)]), (SQUARE, [(0, 2)]),
             (comb(2), [(5, 1), (0, 4)]))
    for poly, diags in cases:
        tri = triangulate(poly)
        xs = [v.x for v in poly.vertices]
        ys = [v.y for v in poly.vertices]
        for diag in diags:
            i, j = diag
            a, b = poly.vertices[i], poly.vertices[j]
            polyr = far_side(poly, diag)
            cs = cones_through_diagonal(poly, tri, diag)
            for xq in range(int(min(xs)) * 2, int(max(xs)) * 2 + 1):
                for yq in range(int(min(ys)) * 2, int(max(ys)) * 2 + 1):
                    q = Point(Q(xq, 2), Q(yq, 2))
                    if (polyr.locate_point(q) == OUTSIDE
                            or cross(a, b, q) <= 0 or q in (a, b)):
                        continue
                    want = through_diagonal_brute(poly, diag, q)
                    assert stabbed(cs, q) == want, (poly.n, diag, q)


def test_query_cone_full_span():
    tri = triangulate(LSHAPE)
    qc = query_cone(tri, P(3, "1/2"), (3, 0))
    assert qc.span == (P(2, 2), P(0, 0))
    assert qc.apex == P(3, "1/2")
    for p in (P(0, 4), P(1, 1), P("1/2", 3), P(0, 0), P(2, 2)):
        assert cone_contains(qc, p)
    assert not cone_contains(qc, P(2, 3))
    tri = triangulate(SQUARE)
    qc = query_cone(tri, P(3, 1), (2, 0))
    assert qc.span == (P(4, 4), P(0, 0))


def test_query_cone_blocked_and_grazing():
    poly = comb(3)
    tri = triangulate(poly)
    # the diagonal across the right tooth gap is invisible from the
    # left tooth cavity
    assert query_cone(tri, P("1/2", "5/2"), (5, 1)) is None
    # one tooth closer it degenerates to a single grazing sight line
    qc = query_cone(triangulate(comb(2)), P("1/2", "5/2"), (5, 1))
    assert qc.span == (P(1, 1), P(1, 1))


def test_clip_interval_examples():
    tri = triangulate(LSHAPE)
    cs = cones_through_diagonal(LSHAPE, tri, (3, 0))
    qc = query_cone(tri, P(3, "1/2"), (3, 0))
    assert clip_interval(cs, qc, tri) == (0, 6)

    tri = triangulate(SQUARE)
    cs = cones_through_diagonal(SQUARE, tri, (2, 0))
    qc = query_cone(tri, P(3, 1), (2, 0))
    assert clip_interval(cs, qc, tri) == (0, 4)

    assert clip_interval(cs, None, tri) is None


def test_clip_interval_partial_with_two_shots():
    poly = comb(2)
    tri = triangulate(poly)
    cs = cones_through_diagonal(poly, tri, (5, 1))
    qc = query_cone(tri, P("5/2", "5/2"), (5, 1))
    with measure() as m:
        lo, hi = clip_interval(cs, qc, tri)
    assert (lo, hi) == (7, 8)
    assert m.delta["ray_shoots"] <= 2
    # the clip keeps only the floor edge and vertex (3,0)
    assert element_at_position(cs, lo) == 2
    assert element_at_position(cs, hi) == 3
    assert chain_position(cs, 2) == 7 and chain_position(cs, 3) == 8


def _random_diagonal(poly, rng):
    n = poly.n
    for _ in range(40):
        i = rng.randrange(n)
        j = rng.randrange(n)
        if (j - i) % n in (0, 1, n - 1):
            continue
        a, b = poly.vertices[i], poly.vertices[j]
        if not poly.segment_inside(a, b):
            continue
        if any(on_segment(v, a, b)
               for k, v in enumerate(poly.vertices) if k not in (i, j)):
            continue
        return (i, j)
    return None


def test_random_triples_match_brute():
    rng = random.Random(11)
    triples = 0
    trial = 0
    while triples < 150:
        trial += 1
        kind = rng.choice(["random", "convex", "comb", "spiral"])
        poly = gen_polygon(kind, rng.randint(6, 20), trial)
        diag = _random_diagonal(poly, rng)
        if diag is None:
            continue
        tri = triangulate(poly)
        i, j = diag
        a, b = poly.vertices[i], poly.vertices[j]
        polyr = far_side(poly, diag)
        cs = cones_through_diagonal(poly, tri, diag)
        xs = [v.x for v in poly.vertices]
        ys = [v.y for v in poly.vertices]
        found = 0
        for _ in range(200):
            if found >= 3:
                break
            q = Point(Q(rng.randint(int(min(xs)) * 4, int(max(xs)) * 4), 4),
                      Q(rng.randint(int(min(ys)) * 4, int(max(ys)) * 4), 4))
            if (polyr.locate_point(q) == OUTSIDE or cross(a, b, q) <= 0
                    or q in (a, b)):
                continue
            found += 1
            triples += 1
            want = through_diagonal_brute(poly, diag, q)
            assert stabbed(cs, q) == want, (poly.vertices, diag, q)


def test_single_edge_chain_matches_diagonal():
    tri = triangulate(LSHAPE)
    cs_d = cones_through_diagonal(LSHAPE, tri, (3, 0))
    cs_c = cones_through_chain(LSHAPE, tri, [3, 0])
    assert [c.gen for c in cs_c.cones] == [c.gen for c in cs_d.cones]
    for q in (P(1, "1/2"), P(3, "1/2"), P("7/2", "3/2")):
        assert stabbed(cs_c, q) == stabbed(cs_d, q)


def test_concave_chain_cones():
    tri = triangulate(LSHAPE)
    cs = cones_through_chain(LSHAPE, tri, [4, 3, 1])
    assert cs.sep == (P(2, 4), P(2, 2), P(4, 0))
    assert [c.gen for c in cs.cones] == [9, 10, 11, 12, 1, 2, 3]
    # queries in the pocket behind the (2,2)-(4,0) segment see the two
    # chain endpoints plus vertex (2,4) through it
    for q in (P(3, "1/2"), P("7/2", "1/4")):
        assert stabbed(cs, q) == frozenset([1, 3, 9])


def test_chain_must_be_concave():
    poly = comb(2)
    tri = triangulate(poly)
    with pytest.raises(ChainNotConcave):
        cones_through_chain(poly, tri, [1, 5, 6])
