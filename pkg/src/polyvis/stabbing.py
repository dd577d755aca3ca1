"""Cone stabbing with canonical subsets, and the linear-space query.

Every far-side element contributes one membership cone bounded by two
lines.  Stabbing queries return the cones containing a point q as a
small list of disjoint canonical sequences instead of one element at a
time: each bounding line maps to a dual point, every cone becomes a
point in the 4-dimensional product of its two duals, and a balanced
median-split partition tree is built over those points.  The two sign
tests of a query are linear in the dual coordinates, so a tree cell
whose bounding box lies entirely on the passing side contributes its
whole subset as one presorted canonical handle; boxes entirely on the
failing side are pruned, and only boxes crossed by one of the two query
hyperplanes are opened further (O(m^(3/4)) of them for m cones).  Each
cone is stored in one subset per tree level, so total canonical storage
stays within O(m log m).

query_linear_space combines a stabbing query with the query-cone clip:
handles are range-restricted to the visible chain interval, the
surviving element ids are ordered by the index radix sort, and the
result is the same visibility representation the arrangement-based
solver produces.
"""

from collections import namedtuple

from .cones import chain_position, clip_details, cone_contains, query_cone
from .counters import COUNTERS
from .diagsep import _rep_from_items
from .geom import Q, cross
from .seq import EMPTY_SEQ, FunctionalSeq, radix_sort_indices
from .visibility import VisRep

# partition tree leaves hold at most this many cones
LEAF_SIZE = 8

StabbingIndex = namedtuple("StabbingIndex", "cs diag groups singles")

# cones sharing one restriction tuple; always holds the halfplane cones
# (membership decided by the restriction alone), buckets maps a family
# pair to the partition tree over the 4d dual points
Group = namedtuple("Group", "rd always buckets")

KdNode = namedtuple("KdNode", "mins maxs seq left right leaf")


def _dual(base, head):
    """Family tag and 2d dual point of the directed line through base
    and head; the side value of q is linear in the dual coordinates."""
    A = base.y - head.y
    B = head.x - base.x
    C = -(A * base.x + B * base.y)
    if abs(A) >= abs(B):
        g = abs(A)
        return ("x+" if A > 0 else "x-", B / g, C / g)
    g = abs(B)
    return ("y+" if B > 0 else "y-", A / g, C / g)


def _fam_terms(fam, q):
    """(const, coef) so the side value is const + coef*u1 + u2."""
    if fam == "x+":
        return q.x, q.y
    if fam == "x-":
        return -q.x, q.y
    if fam == "y+":
        return q.y, q.x
    return -q.y, q.x


def _pos_pairs(cs, cids):
    return sorted((chain_position(cs, cs.cones[ci].gen), cs.cones[ci].gen)
                  for ci in cids)


def _kd_build(cs, pts, depth):
    seq = FunctionalSeq.from_sorted(_pos_pairs(cs, [p[4] for p in pts]))
    mins = tuple(min(p[d] for p in pts) for d in range(4))
    maxs = tuple(max(p[d] for p in pts) for d in range(4))
    if len(pts) <= LEAF_SIZE:
        return KdNode(mins, maxs, seq, None, None,
                      tuple(p[4] for p in pts))
    pts = sorted(pts, key=lambda p: p[depth % 4])
    mid = len(pts) // 2
    return KdNode(mins, maxs, seq,
                  _kd_build(cs, pts[:mid], depth + 1),
                  _kd_build(cs, pts[mid:], depth + 1), ())


def build_stabbing(cs):
    """Stabbing index over all cones of a ConeSet."""
    poly = cs.poly
    diag = (cs.start, (cs.start + cs.nedges) % poly.n)
    bygroup = {}
    for ci, cone in enumerate(cs.cones):
        if cone.empty:
            continue
        bygroup.setdefault(cone.rd, []).append(ci)
    groups = []
    for rd, cids in bygroup.items():
        always = [ci for ci in cids if cs.cones[ci].ta is None]
        buckets = {}
        for ci in cids:
            cone = cs.cones[ci]
            if cone.ta is None:
                continue
            fa, u1, u2 = _dual(*cone.ta)
            fb, w1, w2 = _dual(*cone.tb)
            buckets.setdefault((fa, fb), []).append((u1, u2, w1, w2, ci))
        trees = {fams: _kd_build(cs, pts, 0)
                 for fams, pts in buckets.items()}
        aseq = FunctionalSeq.from_sorted(_pos_pairs(cs, always)) \
            if always else None
        groups.append(Group(rd, aseq, trees))
    singles = tuple(
        FunctionalSeq.from_sorted([(chain_position(cs, c.gen), c.gen)])
        for c in cs.cones)
    return StabbingIndex(cs, diag, tuple(groups), singles)


def _kd_query(idx, node, fa, fb, q, out):
    cones = idx.cs.cones
    ca, ka = _fam_terms(fa, q)
    cb, kb = _fam_terms(fb, q)
    stack = [node]
    while stack:
        nd = stack.pop()
        t1, t2 = ka * nd.mins[0], ka * nd.maxs[0]
        sa_min = ca + min(t1, t2) + nd.mins[1]
        sa_max = ca + max(t1, t2) + nd.maxs[1]
        t1, t2 = kb * nd.mins[2], kb * nd.maxs[2]
        sb_min = cb + min(t1, t2) + nd.mins[3]
        sb_max = cb + max(t1, t2) + nd.maxs[3]
        if sa_min > 0 or sb_max < 0:
            continue
        if sa_max < 0 and sb_min > 0:
            out.append(nd.seq)
        elif nd.left is None:
            # crossed leaf: settle each cone exactly (covers grazing
            # contacts that the strict box test cannot classify)
            for ci in nd.leaf:
                if cone_contains(cones[ci], q):
                    out.append(idx.singles[ci])
        else:
            stack.append(nd.left)
            stack.append(nd.right)


def query_stabbing(idx, q):
    """Disjoint canonical sequences whose union is exactly the set of
    cones containing q, plus the handle count."""
    out = []
    for g in idx.groups:
        if g.rd and not any(cross(u, v, q) >= 0 for u, v in g.rd):
            continue
        if g.always is not None:
            out.append(g.always)
        for (fa, fb), root in g.buckets.items():
            _kd_query(idx, root, fa, fb, q, out)
    COUNTERS.canonical_handles += len(out)
    return out, len(out)


def stored_size(idx):
    """Total canonical sequence entries stored across all tree nodes."""
    total = sum(len(s) for s in idx.singles)
    for g in idx.groups:
        if g.always is not None:
            total += len(g.always)
        stack = list(g.buckets.values())
        while stack:
            nd = stack.pop()
            total += len(nd.seq)
            if nd.left is not None:
                stack.append(nd.left)
                stack.append(nd.right)
    return total


def query_linear_space(idx, tri, q, eps=0.5):
    """Visibility representation of the far side as seen from q through
    the diagonal, assembled from clipped canonical handles."""
    cs = idx.cs
    poly = cs.poly
    qcone = query_cone(tri, q, idx.diag)
    if qcone is None:
        return VisRep(poly, q, EMPTY_SEQ)
    det = clip_details(cs, qcone, tri)
    if det is None:
        return VisRep(poly, q, EMPTY_SEQ)
    handles, _ = query_stabbing(idx, q)
    ids = []
    for h in handles:
        ids.extend(eid for _, eid in h.range(det[0], det[1]).items())
    if not ids:
        return VisRep(poly, q, EMPTY_SEQ)
    sids = radix_sort_indices(ids, poly.n, eps)
    # id order follows boundary index order; rotating at the chain start
    # turns it into chain-position order
    head = [eid for eid in sids if (eid - 1) // 2 >= cs.start]
    tail = [eid for eid in sids if (eid - 1) // 2 < cs.start]
    items = [(chain_position(cs, eid), eid) for eid in head + tail]
    return _rep_from_items(poly, q, qcone, det, items)
