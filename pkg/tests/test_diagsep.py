import math
import random

import pytest

from polyvis.cones import cone_contains, cones_through_diagonal
from polyvis.counters import measure
from polyvis.diagsep import (
    QueryNotOnBoundary, _build_intervals, _cone_lines, _eager_cells, _line_y,
    build_boundary_1d, build_chain_1d, build_quadratic, cell_count,
    interval_count, locate_version, query_boundary_1d, query_quadratic,
)
from polyvis.geom import (
    INSIDE, LSHAPE, OUTSIDE, P, Point, Q, SQUARE, comb, cross,
)
from polyvis.generators import gen_polygon
from polyvis.tripaths import triangulate
from polyvis.visibility import vis_oracle


def chain_ids(poly, i, j):
    """Element ids of the far chain from vertex i to vertex j (ccw)."""
    n = poly.n
    ids = set()
    k = i
    while True:
        ids.add(poly.vertex_id(k))
        if k == j:
            return ids
        ids.add(poly.edge_id(k))
        k = (k + 1) % n


def oracle_restricted(poly, q, ids):
    return tuple(r for r in vis_oracle(poly, q).canonical() if r[0] in ids)


def cell_samples(idx):
    """One interior sample point per distinct arrangement cell."""
    out = {}
    for s, x in enumerate(idx.slabx):
        order = idx.orders[s]
        for k, cid in enumerate(idx.gapcells[s]):
            if cid in out:
                continue
            lo = _line_y(idx.lines, order[k - 1], x) if k > 0 else None
            hi = _line_y(idx.lines, order[k], x) if k < len(order) else None
            if lo is None and hi is None:
                y = Q(0)
            elif lo is None:
                y = hi - 1
            elif hi is None:
                y = lo + 1
            else:
                y = (lo + hi) / 2
            out[cid] = Point(x, y)
    return out


def boundary_params(bidx):
    """Breakpoints plus midpoints of every basic interval."""
    lo, hi = Q(0), Q(bidx.nedges)
    bps = [lo] + [p for p in bidx.breakpoints if lo < p < hi] + [hi]
    mids = [(a + b) / 2 for a, b in zip(bps, bps[1:]) if a < b]
    return sorted(set(bps + mids))


def param_point(poly, start, nedges, pm):
    t = int(pm)
    if t == nedges:
        t, frac = nedges - 1, Q(1)
    else:
        frac = pm - t
    a, b = poly.edge((start + t) % poly.n)
    return Point(a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y))


def far_subpolygon_contains(poly, diag, q):
    i, j = diag
    n = poly.n
    idx = [(j + t) % n for t in range((i - j) % n + 1)]
    from polyvis.geom import Polygon
    return Polygon([poly.vertices[k] for k in idx]).locate_point(q) != OUTSIDE


def test_lshape_cell_versions_match_membership():
    tri = triangulate(LSHAPE)
    idx = build_quadratic(LSHAPE, tri, (3, 0))
    assert cell_count(idx) == 13
    cs = idx.cs
    for cid, sample in cell_samples(idx).items():
        want = {c.gen for c in cs.cones if cone_contains(c, sample)}
        assert {v for _, v in idx.cells[cid].items()} == want


def test_single_cone_small_arrangement():
    tri = triangulate(LSHAPE)
    cs = cones_through_diagonal(LSHAPE, tri, (3, 0))
    one = cs._replace(cones=tuple(c for c in cs.cones if c.gen == 8))
    lines, conelines = _cone_lines(one)
    assert len(lines) == 2
    cells = _eager_cells(one, lines, conelines)[4]
    assert len(cells) <= 4
    one = cs._replace(cones=tuple(c for c in cs.cones if c.gen == 9))
    bidx = _build_intervals(LSHAPE, tri, one, ((3, 0),))
    assert interval_count(bidx) <= 3
    assert not bidx.residual


def test_empty_coneset_single_cell_and_interval():
    tri = triangulate(LSHAPE)
    cs = cones_through_diagonal(LSHAPE, tri, (3, 0))
    empty = cs._replace(cones=())
    lines, conelines = _cone_lines(empty)
    cells = _eager_cells(empty, lines, conelines)[4]
    assert len(cells) == 1
    assert not cells[0].items()
    bidx = _build_intervals(LSHAPE, tri, empty, ((3, 0),))
    assert interval_count(bidx) == 1
    assert len(bidx.versions[0]) == 0


def test_lshape_query_matches_oracle_restriction():
    tri = triangulate(LSHAPE)
    idx = build_quadratic(LSHAPE, tri, (3, 0))
    with measure() as m:
        rep = query_quadratic(idx, tri, P(3, "1/2"))
    assert rep.canonical() == (
        (1,), (7,), (10, P("2/3", 4), None), (11,), (12, None, None))
    assert rep.canonical() == oracle_restricted(
        LSHAPE, P(3, "1/2"), chain_ids(LSHAPE, 3, 0))
    assert m.delta["cell_locates"] == 1
    assert m.delta["ray_shoots"] <= 2


def test_square_query_sees_whole_far_side():
    tri = triangulate(SQUARE)
    idx = build_quadratic(SQUARE, tri, (2, 0))
    rep = query_quadratic(idx, tri, P(3, 1))
    assert rep.canonical() == ((1,), (5,), (6, None, None), (7,),
                               (8, None, None))


def test_query_off_side_is_empty():
    tri = triangulate(LSHAPE)
    idx = build_quadratic(LSHAPE, tri, (3, 0))
    # strictly on the far side of the diagonal: nothing is visible
    # through it by convention
    rep = query_quadratic(idx, tri, P("1/2", 3))
    assert rep.canonical() == ()


def test_grid_queries_match_oracle():
    cases = ((LSHAPE, [(3, 0), (0, 3)]), (SQUARE, [(2, 0)]),
             (comb(2), [(5, 1), (0, 4)]), (comb(3), [(5, 1)]))
    for poly, diags in cases:
        tri = triangulate(poly)
        xs = [v.x for v in poly.vertices]
        ys = [v.y for v in poly.vertices]
        for diag in diags:
            i, j = diag
            a, b = poly.vertices[i], poly.vertices[j]
            idx = build_quadratic(poly, tri, diag)
            ids = chain_ids(poly, i, j)
            checked = 0
            for xq in range(int(min(xs)) * 2, int(max(xs)) * 2 + 1):
                for yq in range(int(min(ys)) * 2, int(max(ys)) * 2 + 1):
                    q = Point(Q(xq, 2), Q(yq, 2))
                    if (cross(a, b, q) <= 0
                            or not far_subpolygon_contains(poly, diag, q)
                            or poly.locate_point(q) != INSIDE):
                        continue
                    checked += 1
                    got = query_quadratic(idx, tri, q).canonical()
                    assert got == oracle_restricted(poly, q, ids), (diag, q)
            assert checked > 0


def test_lazy_matches_eager():
    poly = comb(3)
    tri = triangulate(poly)
    diag = (5, 1)
    eager = build_quadratic(poly, tri, diag)
    lazy = build_quadratic(poly, tri, diag, eager_limit=0)
    assert not eager.lazy and lazy.lazy
    assert cell_count(lazy) is None
    rng = random.Random(2)
    for _ in range(40):
        q = Point(Q(rng.randint(0, 48), 4), Q(rng.randint(0, 12), 4))
        with measure() as m:
            ve = locate_version(eager, q)
        vl = locate_version(lazy, q)
        assert ve.items() == vl.items(), q
        assert m.delta["cell_locates"] == 1


def test_persistent_versions_share_nodes():
    def distinct_nodes(idx):
        seen = set()

        def walk(node):
            if node is None or id(node) in seen:
                return
            seen.add(id(node))
            walk(node.left)
            walk(node.right)

        for v in idx.cells.values():
            walk(v.root)
        return len(seen)

    cases = [(LSHAPE, (3, 0)), (SQUARE, (2, 0)), (comb(2), (5, 1)),
             (comb(3), (5, 1)), (comb(6), (9, 1))]
    rng = random.Random(5)
    for t in range(30):
        poly = gen_polygon(rng.choice(["random", "spiral", "comb"]),
                           rng.randint(8, 24), t)
        diag = _random_diagonal(poly, rng)
        if diag is not None:
            cases.append((poly, diag))
    for poly, diag in cases:
        idx = build_quadratic(poly, triangulate(poly), diag)
        m = max(len(idx.cs.cones), 2)
        bound = 3 * (cell_count(idx) + m * math.log2(m))
        assert distinct_nodes(idx) <= bound, (poly.n, diag)


def test_boundary_interval_structure():
    tri = triangulate(LSHAPE)
    bidx = build_boundary_1d(LSHAPE, tri, (3, 0))
    assert interval_count(bidx) == 4
    assert bidx.breakpoints == (Q(0), Q(1, 2), Q(1))


def test_boundary_query_on_bottom_edge():
    tri = triangulate(LSHAPE)
    bidx = build_boundary_1d(LSHAPE, tri, (3, 0))
    with measure() as m:
        rep = query_boundary_1d(bidx, tri, P(3, 0))
    assert rep.canonical() == (
        (1,), (7,), (10, P(1, 4), None), (11,), (12, None, None))
    assert rep.canonical() == oracle_restricted(
        LSHAPE, P(3, 0), chain_ids(LSHAPE, 3, 0))
    assert m.delta["cell_locates"] == 1


def test_boundary_query_at_diagonal_endpoints():
    tri = triangulate(LSHAPE)
    bidx = build_boundary_1d(LSHAPE, tri, (3, 0))
    ids = chain_ids(LSHAPE, 3, 0)
    for q in (P(0, 0), P(2, 2)):
        rep = query_boundary_1d(bidx, tri, q)
        assert rep.canonical() == oracle_restricted(LSHAPE, q, ids)
        # the diagonal endpoints see the whole far chain
        assert rep.canonical() == (
            (1,), (7,), (8, None, None), (9,), (10, None, None), (11,),
            (12, None, None))


def test_boundary_query_off_chain_raises():
    tri = triangulate(LSHAPE)
    bidx = build_boundary_1d(LSHAPE, tri, (3, 0))
    with pytest.raises(QueryNotOnBoundary):
        query_boundary_1d(bidx, tri, P(1, 4))


def test_convex_boundary_sees_everything():
    tri = triangulate(SQUARE)
    bidx = build_boundary_1d(SQUARE, tri, (2, 0))
    want = ((1,), (5,), (6, None, None), (7,), (8, None, None))
    for q in (P(2, 0), P(4, 2), P(4, 0), P(1, 0)):
        assert query_boundary_1d(bidx, tri, q).canonical() == want


def _boundary_check(poly, bidx, tri, ids):
    """Query every breakpoint and interval midpoint against the oracle."""
    sep = bidx.cs.sep
    checked = 0
    for pm in boundary_params(bidx):
        q = param_point(poly, bidx.start, bidx.nedges, pm)
        if q not in (sep[0], sep[-1]):
            # q must lie strictly inside the pocket of one separator
            # segment; skip points on the separator itself
            pockets = [t for t, (lo, hi) in enumerate(bidx.segparams)
                       if lo < pm < hi and cross(sep[t], sep[t + 1], q) > 0]
            onsep = any(cross(sep[t], sep[t + 1], q) == 0
                        for t in range(len(sep) - 1))
            if len(pockets) != 1 or onsep:
                continue
        checked += 1
        got = query_boundary_1d(bidx, tri, q).canonical()
        assert got == oracle_restricted(poly, q, ids), (poly.n, pm)
    assert checked > 0


def test_boundary_breakpoints_and_midpoints_match_oracle():
    cases = ((LSHAPE, [(3, 0), (0, 3)]), (SQUARE, [(2, 0), (0, 2)]),
             (comb(2), [(5, 1), (0, 4)]), (comb(3), [(5, 1), (0, 8)]))
    for poly, diags in cases:
        tri = triangulate(poly)
        for diag in diags:
            bidx = build_boundary_1d(poly, tri, diag)
            ids = chain_ids(poly, diag[0], diag[1])
            _boundary_check(poly, bidx, tri, ids)


def test_chain_index_mirrors_diagonal_cases():
    tri = triangulate(LSHAPE)
    bidx = build_chain_1d(LSHAPE, tri, [4, 3, 1])
    assert interval_count(bidx) == 3
    ids = chain_ids(LSHAPE, 4, 1)
    _boundary_check(LSHAPE, bidx, tri, ids)
    # chain endpoints see the whole far chain around the corner
    for q in (P(2, 4), P(4, 0)):
        assert query_boundary_1d(bidx, tri, q).canonical() == \
            oracle_restricted(LSHAPE, q, ids)
    # from the right wall only elements past the (2,2)-(4,0) gate show
    rep = query_boundary_1d(bidx, tri, P(4, 1))
    assert rep.canonical() == oracle_restricted(LSHAPE, P(4, 1), ids)


def _random_diagonal(poly, rng):
    from polyvis.geom import on_segment
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


def test_random_polygons_match_oracle():
    rng = random.Random(13)
    done = 0
    trial = 0
    while done < 40:
        trial += 1
        kind = rng.choice(["random", "convex", "comb", "spiral"])
        poly = gen_polygon(kind, rng.randint(6, 16), trial)
        diag = _random_diagonal(poly, rng)
        if diag is None:
            continue
        done += 1
        tri = triangulate(poly)
        i, j = diag
        a, b = poly.vertices[i], poly.vertices[j]
        ids = chain_ids(poly, i, j)
        idx = build_quadratic(poly, tri, diag)
        for q in cell_samples(idx).values():
            if (cross(a, b, q) <= 0
                    or not far_subpolygon_contains(poly, diag, q)
                    or poly.locate_point(q) != INSIDE):
                continue
            got = query_quadratic(idx, tri, q).canonical()
            assert got == oracle_restricted(poly, q, ids), (poly.vertices,
                                                            diag, q)
        bidx = build_boundary_1d(poly, tri, diag)
        _boundary_check(poly, bidx, tri, ids)
