"""Balanced decomposition tree and the assembled visibility structures.

The polygon is split recursively along triangulation diagonals chosen
at the centroid edge of the triangulation dual, so both sides of every
split keep at most 2/3 of the vertices plus a small constant, and the
tree has logarithmic height.  Leaves are single triangles.

A query walks from the leaf containing q up to the root.  At each node
the far side of the splitting diagonal is answered by a per-node
through-diagonal solver (arrangement-based, cone-stabbing, or the
boundary-restricted interval model depending on the structure) and
spliced into the accumulated representation with O(log n) split/join
operations (merge_vis).  Representations use global keys: (element id,
0) for polygon elements and (vertex id, 1) for subpolygon boundary
diagonals, keyed by the vertex where the region boundary departs onto
the diagonal, so every diagonal entry is replaced exactly once on the
way up.
"""

from collections import namedtuple
from math import ceil, log2

from .cones import cones_through_diagonal
from .counters import COUNTERS
from .diagsep import (
    QueryNotOnBoundary, build_boundary_1d, build_quadratic,
    query_boundary_1d, query_quadratic,
)
from .geom import PointOutside, Polygon, cross, on_segment
from .seq import FunctionalSeq
from .stabbing import build_stabbing, query_linear_space
from .tripaths import Triangulation, triangulate
from .visibility import V_ENTRY, VisRep, dkey, vkey


class DiagonalNotFound(KeyError):
    """merge_vis found no trace of the splice diagonal in the inner
    representation although the outer one is nonempty."""


class BDNode:
    """One subpolygon of the decomposition.

    idx: original vertex indices along the subpolygon boundary (ccw).
    Internal nodes carry the standalone polygon and its triangulation,
    the splitting diagonal as positions (pa, pb) into idx, the two
    children (child 0 is the chain pa..pb side), and lazily built
    per-side solvers."""

    __slots__ = ("idx", "poly", "tri", "pa", "pb", "children", "solvers")

    def __init__(self, idx, poly=None, tri=None, pa=None, pb=None,
                 children=None):
        self.idx = idx
        self.poly = poly
        self.tri = tri
        self.pa = pa
        self.pb = pb
        self.children = children
        self.solvers = {}


BDTree = namedtuple("BDTree", "poly tri root")


def _centroid_edge(tset, adj):
    """Dual-tree edge whose removal minimizes the larger side."""
    t0 = min(tset)
    order = [t0]
    parent = {t0: None}
    k = 0
    while k < len(order):
        t = order[k]
        k += 1
        for t2, pair in adj[t]:
            if t2 in tset and t2 not in parent:
                parent[t2] = (t, pair)
                order.append(t2)
    size = {t: 1 for t in order}
    for t in reversed(order[1:]):
        size[parent[t][0]] += size[t]
    total = len(order)
    best = None
    for t in order[1:]:
        up, pair = parent[t]
        score = (max(size[t], total - size[t]), tuple(sorted(pair)))
        if best is None or score < best[0]:
            best = (score, t, up, pair)
    _, t, up, pair = best
    # the BFS tree equals the dual tree, so the component of t after
    # cutting the edge to its parent is its subtree
    comp = {t}
    for t2 in order:
        if t2 not in comp and parent[t2] is not None \
                and parent[t2][0] in comp:
            comp.add(t2)
    return pair, comp


def _subnode(poly, tri, idx, tset):
    if len(tset) == 1:
        return BDNode(idx)
    pos = {oi: k for k, oi in enumerate(idx)}
    verts = [poly.vertices[oi] for oi in idx]
    polyu = Polygon(verts)
    local = sorted(tset)
    triu = Triangulation(polyu, [tuple(pos[v] for v in tri.triangles[t])
                                 for t in local])
    pair, comp = _centroid_edge(set(tset), tri.adj)
    u, v = sorted(pair, key=lambda oi: pos[oi])
    pa, pb = pos[u], pos[v]
    c0_idx = idx[pa:pb + 1]
    c1_idx = idx[pb:] + idx[:pa + 1]
    c0set = set(idx[pa:pb + 1])
    if comp and all(w in c0set for w in tri.triangles[next(iter(comp))]):
        t0set, t1set = comp, set(tset) - comp
    else:
        t0set, t1set = set(tset) - comp, comp
    node = BDNode(idx, polyu, triu, pa, pb,
                  (_subnode(poly, tri, c0_idx, t0set),
                   _subnode(poly, tri, c1_idx, t1set)))
    return node


def build_bdtree(poly, tri=None):
    """Balanced decomposition of poly down to single triangles."""
    tri = triangulate(poly) if tri is None else tri
    root = _subnode(poly, tri, tuple(range(poly.n)),
                    set(range(len(tri.triangles))))
    return BDTree(poly, tri, root)


def bd_nodes(bdt):
    """All nodes, parents before children."""
    out = []
    stack = [bdt.root]
    while stack:
        node = stack.pop()
        out.append(node)
        if node.children:
            stack.extend(node.children)
    return out


def _cyc_in(pa, pb, w, m):
    return (w - pa) % m <= (pb - pa) % m


def _descend_side(node, q):
    """Child index containing q; on the splitting diagonal the
    lexicographically first child wins."""
    a = node.poly.vertices[node.pa]
    b = node.poly.vertices[node.pb]
    s = cross(b, a, q)
    if s > 0:
        return 0
    if s < 0:
        return 1
    if on_segment(q, a, b):
        return 0 if node.children[0].idx <= node.children[1].idx else 1
    t = node.tri.locate(q)
    if t is None:
        raise PointOutside(q)
    m = len(node.idx)
    for w in node.tri.triangles[t]:
        if w not in (node.pa, node.pb):
            return 0 if _cyc_in(node.pa, node.pb, w, m) else 1
    raise PointOutside(q)


def leaf_path(bdt, q):
    """[(internal node, child side), ...] ending at the leaf holding q."""
    if bdt.tri.locate(q) is None:
        raise PointOutside(q)
    node = bdt.root
    path = []
    while node.children:
        COUNTERS.locate_steps += 1
        side = _descend_side(node, q)
        path.append((node, side))
        node = node.children[side]
    path.append((node, None))
    return path


# --- representation plumbing ---------------------------------------------------


def _entry_key(poly, idx, k, is_vertex):
    """Global key of the local element at boundary position k of the
    subpolygon with vertex cycle idx."""
    oi = idx[k]
    if is_vertex:
        return vkey(poly.vertex_id(oi))
    if idx[(k + 1) % len(idx)] == (oi + 1) % poly.n:
        return vkey(poly.edge_id(oi))
    return dkey(poly.vertex_id(oi))


def _global_rep(poly, idx, rep):
    """Remap a subpolygon-local representation to global keys."""
    pairs = []
    for (le, _tag), val in rep.seq.items():
        k = (le - 1) // 2
        pairs.append((_entry_key(poly, idx, k, le % 2 == 1), val))
    pairs.sort(key=lambda kv: kv[0])
    return VisRep(poly, rep.q, FunctionalSeq.from_sorted(pairs))


def _leaf_rep(poly, leaf, q):
    """Visibility inside a leaf triangle: everything."""
    pairs = []
    for k in range(3):
        pairs.append((_entry_key(poly, leaf.idx, k, True), V_ENTRY))
        pairs.append((_entry_key(poly, leaf.idx, k, False),
                      ("e", None, None)))
    pairs.sort(key=lambda kv: kv[0])
    return VisRep(poly, q, FunctionalSeq.from_sorted(pairs))


def merge_vis(rep_inner, rep_outer, d):
    """Splice the far-side representation into the inner one along the
    diagonal d = (depart, arrive), directed as traversed by the inner
    region's boundary.  Shared endpoint vertices are deduplicated.  An
    empty outer representation returns the inner one unchanged."""
    COUNTERS.merges += 1
    if not rep_outer.seq:
        return rep_inner
    poly = rep_inner.poly
    dep, arr = d
    kd = dkey(poly.vertex_id(dep))
    base = rep_inner.seq
    if kd in base:
        base = base.delete(kd)
    elif not (vkey(poly.vertex_id(dep)) in base
              or vkey(poly.vertex_id(arr)) in base):
        # a degenerate window still touches an endpoint vertex; with no
        # trace of the diagonal at all the inputs are inconsistent
        raise DiagonalNotFound(d)
    o = rep_outer.seq
    for oi in (dep, arr):
        k = vkey(poly.vertex_id(oi))
        if k in base and k in o:
            o = o.delete(k)
    if not base:
        return VisRep(poly, rep_inner.q, o)
    if not o:
        return VisRep(poly, rep_inner.q, base)
    bmin, bmax = base.min_item()[0], base.max_item()[0]
    omin, omax = o.min_item()[0], o.max_item()[0]
    if omin > bmax:
        seq = base.join(o)
    elif omax < bmin:
        seq = o.join(base)
    elif bmin < omin and omax < bmax:
        b1, b2 = base.split(omin)
        seq = b1.join(o).join(b2)
    else:
        o1, o2 = o.split(bmin)
        seq = o1.join(base).join(o2)
    return VisRep(poly, rep_inner.q, seq)


# --- assembled structures ------------------------------------------------------


def _build_quadratic_solver(node, far):
    return build_quadratic(node.poly, node.tri, far)


def _build_stabbing_solver(node, far):
    return build_stabbing(cones_through_diagonal(node.poly, node.tri, far))


def _build_boundary_solver(node, far):
    return build_boundary_1d(node.poly, node.tri, far)


_SOLVERS = {
    "agtz": (_build_quadratic_solver,
             lambda sol, node, q: query_quadratic(sol, node.tri, q)),
    "nearlinear": (_build_stabbing_solver,
                   lambda sol, node, q: query_linear_space(sol, node.tri,
                                                           q)),
    "boundary": (_build_boundary_solver,
                 lambda sol, node, q: query_boundary_1d(sol, node.tri, q)),
}

VisStructure = namedtuple("VisStructure", "bdt kind profile")


def _node_solver(node, kind, side):
    key = (kind, side)
    if key not in node.solvers:
        far = (node.pb, node.pa) if side == 0 else (node.pa, node.pb)
        node.solvers[key] = _SOLVERS[kind][0](node, far)
    return node.solvers[key]


def _build_structure(poly, kind, profile):
    if profile not in ("debug", "bench"):
        raise ValueError("unknown profile %r" % (profile,))
    bdt = build_bdtree(poly)
    st = VisStructure(bdt, kind, profile)
    if profile == "bench":
        for node in bd_nodes(bdt):
            if node.children:
                _node_solver(node, kind, 0)
                _node_solver(node, kind, 1)
    return st


def _vis_node(st, node, q):
    """Visibility of q within the node's subpolygon, in global keys.

    For q on the splitting diagonal a sight segment meets the
    diagonal's line only at q, so visibility splits exactly into the
    two children and both are merged.  The boundary solver answers
    diagonal-endpoint queries directly, so that structure never
    branches."""
    poly = st.bdt.poly
    if not node.children:
        return _leaf_rep(poly, node, q)
    COUNTERS.locate_steps += 1
    a = node.poly.vertices[node.pa]
    b = node.poly.vertices[node.pb]
    s = cross(b, a, q)
    if s == 0 and on_segment(q, a, b) and st.kind != "boundary":
        r0 = _vis_node(st, node.children[0], q)
        r1 = _vis_node(st, node.children[1], q)
        kd1 = dkey(poly.vertex_id(node.idx[node.pa]))
        if kd1 in r1.seq:
            r1 = VisRep(poly, q, r1.seq.delete(kd1))
        return merge_vis(r0, r1, (node.idx[node.pb], node.idx[node.pa]))
    if s > 0:
        side = 0
    elif s < 0:
        side = 1
    else:
        side = _descend_side(node, q)
    inner = _vis_node(st, node.children[side], q)
    sol = _node_solver(node, st.kind, side)
    outer = _global_rep(poly, node.idx,
                        _SOLVERS[st.kind][1](sol, node, q))
    if side == 0:
        d = (node.idx[node.pb], node.idx[node.pa])
    else:
        d = (node.idx[node.pa], node.idx[node.pb])
    return merge_vis(inner, outer, d)


def _query_structure(st, q):
    if st.bdt.tri.locate(q) is None:
        raise PointOutside(q)
    return _vis_node(st, st.bdt.root, q)


def build_agtz(poly, profile="debug"):
    """Arrangement-backed structure: quadratic space, fast queries."""
    return _build_structure(poly, "agtz", profile)


def query_agtz(st, q):
    return _query_structure(st, q)


def build_nearlinear(poly, profile="debug"):
    """Cone-stabbing-backed structure: near-linear space."""
    return _build_structure(poly, "nearlinear", profile)


def query_nearlinear(st, q):
    return _query_structure(st, q)


def build_boundary(poly, profile="debug"):
    """Interval-model-backed structure for queries on the boundary."""
    return _build_structure(poly, "boundary", profile)


def query_boundary(st, q):
    if st.bdt.poly.element_at(q) is None:
        raise QueryNotOnBoundary(q)
    return _query_structure(st, q)


VertexStructure = namedtuple("VertexStructure", "boundary stored threshold")


def build_vertex_corollary(poly, profile="debug"):
    """Store the representation of every vertex whose output size is at
    most ceil(log2(n)^2); larger ones delegate to the boundary
    structure at query time."""
    st = build_boundary(poly, profile)
    threshold = ceil(log2(poly.n) ** 2)
    stored = {}
    for i in range(poly.n):
        rep = query_boundary(st, poly.vertices[i])
        if len(rep) <= threshold:
            stored[i] = rep
    return VertexStructure(st, stored, threshold)


def query_vertex(vs, i):
    rep = vs.stored.get(i)
    if rep is not None:
        return rep
    return query_boundary(vs.boundary, vs.boundary.bdt.poly.vertices[i])
