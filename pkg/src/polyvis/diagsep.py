"""Visibility queries through a separating diagonal.

build_quadratic preprocesses the cones of a diagonal: the bounding
lines of all cones cut the query side into arrangement cells, and the
set of far-side elements visible through the diagonal is constant per
cell.  Each cell stores that set as a persistent sequence keyed by
chain position, so a query is point location plus one range extraction
clipped by the query cone's two bounding rays.

Small line counts materialize the arrangement with slab point location
(a version per cell, built by persistent insert/delete deltas between
neighboring cells).  Above the limit the index keeps the same interface
but evaluates the membership sequence directly at the located cell; a
location still counts as one cell_locates operation either way.  Points
exactly on arrangement lines are handled by re-testing the cones of the
incident lines at the query point itself, so no symbolic perturbation
is needed.

build_boundary_1d is the variant for queries on the far chain of a
second diagonal: restricted to a boundary chain the cones become
parameter intervals, one persistent sweep along the chain stores a
version per basic interval, and location is binary search on the
interval breakpoints.
"""

from collections import namedtuple

from .cones import (
    chain_position, clip_details, cone_contains, cones_through_chain,
    cones_through_diagonal, query_cone,
)
from .counters import COUNTERS
from .geom import (
    Point, Polygon, Q, cross, line_intersection, on_segment, seg_param, sub,
)
from .seq import EMPTY_SEQ, FunctionalSeq
from .tripaths import _ray_walk, triangulate
from .visibility import VisRep, WINDOW, rep_from_records
from .viswalk import vis_rayshoot


class QueryNotOnBoundary(ValueError):
    """Boundary-restricted query point is not on the query chain."""

# materialize the cell arrangement up to this many distinct lines; the
# quadratic growth of cells makes larger inputs use direct evaluation
EAGER_MAX_LINES = 160

# lines: ("nv", a, c) meaning y = c - a*x, or ("v", x); conelines maps
# a line index to the cone indices whose membership can flip across it.
# Eager fields: xs are breakpoint abscissas, slab s covers
# [xs[s-1], xs[s]) with interior sample slabx[s]; orders[s] lists the
# non-vertical lines bottom-to-top, gapcells[s] the cell id per gap,
# cells maps a cell id to its element version.  vxmap finds the
# vertical line at a given abscissa.
ArrangementIndex = namedtuple(
    "ArrangementIndex",
    "poly diag side cs lazy lines conelines xs slabx orders gapcells "
    "cells vxmap")

# segs: separator segments as vertex-index pairs (one for a diagonal);
# start/nedges give the query-side boundary chain; breakpoints are
# lexicographic (edge offset + fraction) parameters along it, versions
# holds one persistent element sequence per basic interval, atparam the
# cones whose interval ends at a breakpoint (re-tested for exact ties),
# residual the cones outside the interval model (re-tested always).
IntervalIndex = namedtuple(
    "IntervalIndex",
    "poly side cs segs segparams start nedges breakpoints versions atparam "
    "residual endreps")


def _norm_line(s, t):
    """Undirected canonical form of the line through s and t."""
    A = t.y - s.y
    B = s.x - t.x
    if B != 0:
        return ("nv", A / B, (A * s.x + B * s.y) / B)
    return ("v", s.x)


def _line_y(lines, i, x):
    _, a, c = lines[i]
    return c - a * x


def _cone_lines(cs):
    lines = []
    index = {}
    conelines = []
    for ci, cone in enumerate(cs.cones):
        recs = []
        for ln in (cone.ta, cone.tb):
            if ln is not None:
                recs.append(_norm_line(*ln))
        for u, v in cone.rd:
            recs.append(_norm_line(u, v))
        for rec in recs:
            if rec not in index:
                index[rec] = len(lines)
                lines.append(rec)
                conelines.append(set())
            conelines[index[rec]].add(ci)
    return lines, [tuple(sorted(s)) for s in conelines]


def _full_version(cs, p):
    pairs = sorted((chain_position(cs, c.gen), c.gen)
                   for c in cs.cones if cone_contains(c, p))
    return FunctionalSeq.from_sorted(pairs)


def _adjust(cs, version, cone_idxs, p):
    """Re-test the given cones at p and patch the version to match."""
    for ci in cone_idxs:
        cone = cs.cones[ci]
        pos = chain_position(cs, cone.gen)
        if cone_contains(cone, p):
            if pos not in version:
                version = version.insert(pos, cone.gen)
        elif pos in version:
            version = version.delete(pos)
    return version


def _eager_cells(cs, lines, conelines):
    nv = [i for i in range(len(lines)) if lines[i][0] == "nv"]
    vxmap = {lines[i][1]: i for i in range(len(lines))
             if lines[i][0] == "v"}
    events = {}
    for ii in range(len(nv)):
        for jj in range(ii + 1, len(nv)):
            i, j = nv[ii], nv[jj]
            _, a1, c1 = lines[i]
            _, a2, c2 = lines[j]
            if a1 == a2:
                continue
            x = (c1 - c2) / (a1 - a2)
            events.setdefault(x, set()).update((i, j))
    for x in vxmap:
        events.setdefault(x, set())
    xs = sorted(events)
    if xs:
        slabx = [xs[0] - 1]
        slabx += [(xs[t] + xs[t + 1]) / 2 for t in range(len(xs) - 1)]
        slabx.append(xs[-1] + 1)
    else:
        slabx = [Q(0)]

    order = sorted(nv, key=lambda i: _line_y(lines, i, slabx[0]))
    pos = {i: k for k, i in enumerate(order)}
    cells = {}
    orders = []
    gapcells = []

    def sample(k, x):
        lo = _line_y(lines, order[k - 1], x) if k > 0 else None
        hi = _line_y(lines, order[k], x) if k < len(order) else None
        if lo is None and hi is None:
            y = Q(0)
        elif lo is None:
            y = hi - 1
        elif hi is None:
            y = lo + 1
        else:
            y = (lo + hi) / 2
        return Point(x, y)

    def new_cell(version):
        cid = len(cells)
        cells[cid] = version
        return cid

    # leftmost slab: full scan for the bottom gap, one-line deltas up
    gapcell = []
    version = _full_version(cs, sample(0, slabx[0]))
    gapcell.append(new_cell(version))
    for k in range(1, len(order) + 1):
        version = _adjust(cs, version, conelines[order[k - 1]],
                          sample(k, slabx[0]))
        gapcell.append(new_cell(version))
    orders.append(tuple(order))
    gapcells.append(tuple(gapcell))

    for t, x in enumerate(xs):
        sx = slabx[t + 1]
        involved = events[x]
        groups = {}
        for i in involved:
            groups.setdefault(_line_y(lines, i, x), []).append(i)
        vline = vxmap.get(x)
        vcones = conelines[vline] if vline is not None else ()
        changed = {}   # gap index -> extra cone indices
        if vline is not None:
            for k in range(len(order) + 1):
                changed[k] = set(vcones)
        for grp in groups.values():
            if len(grp) < 2:
                continue
            ks = sorted(pos[i] for i in grp)
            assert ks == list(range(ks[0], ks[0] + len(ks)))
            lo, hi = ks[0], ks[-1]
            order[lo:hi + 1] = reversed(order[lo:hi + 1])
            for k in range(lo, hi + 1):
                pos[order[k]] = k
            delta = set()
            for i in grp:
                delta.update(conelines[i])
            for k in range(lo + 1, hi + 1):
                changed.setdefault(k, set()).update(delta)
        gapcell = list(gapcell)
        for k, delta in changed.items():
            version = _adjust(cs, cells[gapcell[k]], delta, sample(k, sx))
            gapcell[k] = new_cell(version)
        orders.append(tuple(order))
        gapcells.append(tuple(gapcell))
    return xs, slabx, orders, gapcells, cells, vxmap


def build_quadratic(poly, tri, diag, side="ccw", eager_limit=None):
    """Arrangement index of all far-side cones of diag; one persistent
    element version per cell of the bounding-line arrangement."""
    cs = cones_through_diagonal(poly, tri, diag, side)
    lines, conelines = _cone_lines(cs)
    limit = EAGER_MAX_LINES if eager_limit is None else eager_limit
    if len(lines) > limit:
        return ArrangementIndex(poly, diag, side, cs, True, lines,
                                conelines, None, None, None, None, None,
                                None)
    xs, slabx, orders, gapcells, cells, vxmap = \
        _eager_cells(cs, lines, conelines)
    return ArrangementIndex(poly, diag, side, cs, False, lines, conelines,
                            xs, slabx, orders, gapcells, cells, vxmap)


def cell_count(idx):
    """Number of distinct arrangement cells materialized."""
    return None if idx.lazy else len(idx.cells)


def locate_version(idx, q):
    """Element version of the arrangement cell containing q (exact on
    cell boundaries: cones of the incident lines are re-tested at q)."""
    COUNTERS.cell_locates += 1
    if idx.lazy:
        return _full_version(idx.cs, q)
    xs, lines = idx.xs, idx.lines
    lo, hi = 0, len(xs)
    while lo < hi:
        COUNTERS.locate_steps += 1
        mid = (lo + hi) // 2
        if q.x < xs[mid]:
            hi = mid
        else:
            lo = mid + 1
    s = lo
    order = idx.orders[s]
    lo, hi = 0, len(order)
    while lo < hi:
        COUNTERS.locate_steps += 1
        mid = (lo + hi) // 2
        if _line_y(lines, order[mid], q.x) > q.y:
            hi = mid
        else:
            lo = mid + 1
    gap = lo
    version = idx.cells[idx.gapcells[s][gap]]
    onq = set()
    k = gap - 1
    while k >= 0 and _line_y(lines, order[k], q.x) == q.y:
        onq.update(idx.conelines[order[k]])
        k -= 1
    vline = idx.vxmap.get(q.x)
    if vline is not None:
        onq.update(idx.conelines[vline])
    if onq:
        version = _adjust(idx.cs, version, sorted(onq), q)
    return version


def _extreme_clip(qcone, hit, a, b, own):
    """Explicit clip endpoint of the extreme visible edge (a, b): the
    ray's landing point when it is on the edge, else the bounding
    line's crossing; None when the edge is visible up to own end."""
    if hit is not None and on_segment(hit, a, b):
        return None if hit == own else hit
    if qcone.ta is None:
        return None
    ln = qcone.ta if own == a else qcone.tb
    pt = line_intersection(a, b, ln[0], ln[1])
    if pt is not None and 0 <= seg_param(a, b, pt) <= 1:
        return None if pt == own else pt
    return None


def _emit_rep(poly, q, qcone, det, version):
    """Clip a cell version by the query cone's extreme positions and
    attach window or explicit endpoints to the two extreme elements."""
    lo, hi = det[0], det[1]
    return _rep_from_items(poly, q, qcone, det,
                           version.range(lo, hi).items())


def _rep_from_items(poly, q, qcone, det, items):
    """VisRep from already clipped (chain position, element id) items in
    chain order, with windows attached to the two extreme elements."""
    hlo, hhi = det[2], det[3]
    if not items:
        return VisRep(poly, q, EMPTY_SEQ)
    records = []
    last = len(items) - 1
    for t, (pos, eid) in enumerate(items):
        if pos % 2 == 0:
            records.append((eid,))
            continue
        a, b = poly.edge_of_id(eid)
        lom = None if t > 0 and items[t - 1][0] == pos - 1 else WINDOW
        him = None if t < last and items[t + 1][0] == pos + 1 else WINDOW
        if t == 0:
            lom = _extreme_clip(qcone, hlo, a, b, a)
        if t == last:
            him = _extreme_clip(qcone, hhi, a, b, b)
        records.append((eid, lom, him))
    return rep_from_records(poly, q, records)


def query_quadratic(idx, tri, q):
    """Visibility representation of the far side of idx.diag as seen
    from q through the diagonal."""
    poly = idx.poly
    qcone = query_cone(tri, q, idx.diag, idx.side)
    if qcone is None:
        return VisRep(poly, q, EMPTY_SEQ)
    det = clip_details(idx.cs, qcone, tri)
    if det is None:
        return VisRep(poly, q, EMPTY_SEQ)
    return _emit_rep(poly, q, qcone, det, locate_version(idx, q))


# --- boundary-restricted 1D variant -------------------------------------------


def _near_param(poly, start, nedges, p):
    """Parameter of p along the query chain (edge offset plus fraction),
    or None if p is not on it."""
    n = poly.n
    for t in range(nedges):
        a, b = poly.edge((start + t) % n)
        if on_segment(p, a, b):
            return Q(t) + seg_param(a, b, p)
    return None


def _sep_side(sep, origin, d):
    """Sign of d against the separator segment containing origin."""
    for r in range(len(sep) - 1):
        if on_segment(origin, sep[r], sep[r + 1]):
            s = cross(sep[r], sep[r + 1],
                      Point(origin.x + d.x, origin.y + d.y))
            if s != 0:
                return s
    return 0


def _pos_gen(cs, ci):
    gen = cs.cones[ci].gen
    return chain_position(cs, gen), gen


def _endpoint_records(poly, cs, end):
    """Canonical records of the far side's visibility from a separator
    endpoint, computed by a direct walk of the far subpolygon."""
    n = poly.n
    last = cs.nedges
    verts = [poly.vertices[(cs.start + m) % n] for m in range(last + 1)]
    polyL = Polygon(verts + list(reversed(cs.sep[1:-1])))
    src = 0 if end == 0 else last
    rep = vis_rayshoot(triangulate(polyL), verts[src])
    out = []
    for rec in rep.canonical():
        eid = rec[0]
        if polyL.is_vertex_id(eid):
            m = polyL.vertex_index_of_id(eid)
            if m <= last:
                out.append((poly.vertex_id((cs.start + m) % n),))
        else:
            m = eid // 2 - 1
            if m < last:
                out.append((poly.edge_id((cs.start + m) % n),)
                           + tuple(rec[1:]))
    return tuple(out)


def _build_intervals(poly, tri, cs, segs):
    """Interval sweep: each cone's boundary interval comes from shooting
    its two bounding rays from their separator crossings into the query
    side; cones that fit no single interval go to the residual list."""
    n = poly.n
    start = (cs.start + cs.nedges) % n
    nedges = n - cs.nedges
    near = {(start + t) % n for t in range(nedges + 1)}
    residual = []
    base = []
    ivals = {}
    for ci, cone in enumerate(cs.cones):
        if cone.ta is None:
            base.append(ci)
            continue
        if (cone.span[0] is None or cone.span[1] is None
                or cone.span[0] == cone.span[1]):
            residual.append(ci)
            continue
        ps = []
        for ln, origin in ((cone.ta, cone.span[0]), (cone.tb, cone.span[1])):
            d = sub(ln[1], ln[0])
            s = _sep_side(cs.sep, origin, d)
            if s == 0:
                break
            if s < 0:
                d = Point(-d.x, -d.y)
            hit, eid, passed = _ray_walk(tri, origin, d)
            if any(k in near for k in passed):
                # the ray grazed along the query chain: membership can
                # flip more than once, the interval model does not fit
                break
            pm = _near_param(poly, start, nedges, hit)
            if pm is None:
                break
            ps.append(pm)
        if len(ps) < 2:
            residual.append(ci)
            continue
        ivals[ci] = tuple(sorted(ps))
    bps = sorted({p for iv in ivals.values() for p in iv})
    atparam = {p: [] for p in bps}
    entering = {p: [] for p in bps}
    leaving = {p: [] for p in bps}
    for ci, (lo, hi) in ivals.items():
        atparam[lo].append(ci)
        if hi != lo:
            atparam[hi].append(ci)
            entering[lo].append(ci)
            leaving[hi].append(ci)
    ver = FunctionalSeq.from_sorted(
        sorted(_pos_gen(cs, ci) for ci in base))
    versions = [ver]
    for p in bps:
        for ci in entering[p]:
            ver = ver.insert(*_pos_gen(cs, ci))
        for ci in leaving[p]:
            ver = ver.delete(_pos_gen(cs, ci)[0])
        versions.append(ver)
    atparam = {p: tuple(cs_) for p, cs_ in atparam.items()}
    endreps = (_endpoint_records(poly, cs, 0), _endpoint_records(poly, cs, 1))
    # the pocket of a separator segment covers the query-chain parameters
    # between its two endpoints (the chain runs opposite to the separator)
    segparams = tuple(
        (_near_param(poly, start, nedges, poly.vertices[j2]),
         _near_param(poly, start, nedges, poly.vertices[i2]))
        for i2, j2 in segs)
    return IntervalIndex(poly, "ccw", cs, segs, segparams, start, nedges,
                         tuple(bps), tuple(versions), atparam,
                         tuple(residual), endreps)


def build_boundary_1d(poly, tri, diag, side="ccw"):
    """Basic-interval index answering far-side visibility for query
    points on the boundary chain of the diagonal's query side."""
    cs = cones_through_diagonal(poly, tri, diag, side)
    i, j = diag if side == "ccw" else (diag[1], diag[0])
    return _build_intervals(poly, tri, cs, ((i % poly.n, j % poly.n),))


def build_chain_1d(poly, tri, chain, side="ccw"):
    """Basic-interval index for a concave separating chain; queries on
    the pocket boundary of any chain segment answer visibility of the
    whole far side through that segment."""
    ch = [k % poly.n for k in chain]
    if side == "cw":
        ch.reverse()
    cs = cones_through_chain(poly, tri, ch)
    segs = tuple((ch[t], ch[t + 1]) for t in range(len(ch) - 1))
    return _build_intervals(poly, tri, cs, segs)


def interval_count(bidx):
    """Number of basic intervals along the query chain."""
    return len(bidx.breakpoints) + 1


def _query_segment(bidx, pm, q):
    """Separator segment whose pocket holds q.  The pocket is decided by
    the chain parameter; q must also lie strictly inside it (left of the
    segment), else nothing is visible by convention."""
    sep = bidx.cs.sep
    for t, (lo, hi) in enumerate(bidx.segparams):
        if lo <= pm <= hi and cross(sep[t], sep[t + 1], q) > 0:
            return t
    for t in range(len(sep) - 1):
        if q == sep[t] or q == sep[t + 1]:
            return t
    return None


def query_boundary_1d(bidx, tri, q):
    """Visibility representation of the far side as seen from a query
    point on the boundary chain."""
    poly = bidx.poly
    pm = _near_param(poly, bidx.start, bidx.nedges, q)
    if pm is None:
        raise QueryNotOnBoundary(q)
    if q == bidx.cs.sep[0]:
        return rep_from_records(poly, q, bidx.endreps[0])
    if q == bidx.cs.sep[-1]:
        return rep_from_records(poly, q, bidx.endreps[1])
    r = _query_segment(bidx, pm, q)
    if r is None:
        return VisRep(poly, q, EMPTY_SEQ)
    qcone = query_cone(tri, q, bidx.segs[r], bidx.side)
    if qcone is None:
        return VisRep(poly, q, EMPTY_SEQ)
    det = clip_details(bidx.cs, qcone, tri)
    if det is None:
        return VisRep(poly, q, EMPTY_SEQ)
    COUNTERS.cell_locates += 1
    bps = bidx.breakpoints
    lo, hi = 0, len(bps)
    while lo < hi:
        COUNTERS.locate_steps += 1
        mid = (lo + hi) // 2
        if bps[mid] < pm:
            lo = mid + 1
        else:
            hi = mid
    version = bidx.versions[lo]
    retest = list(bidx.residual)
    if lo < len(bps) and bps[lo] == pm:
        retest.extend(bidx.atparam[pm])
    if retest:
        version = _adjust(bidx.cs, version, retest, q)
    return _emit_rep(poly, q, qcone, det, version)
