"""Functional balanced ordered sequence and the index radix sort.

FunctionalSeq is an immutable weight-balanced search tree.  Every
operation returns a new version and leaves old versions intact; nodes
are shared by path copying.  Keys may be any comparable values (the
visibility code uses tuples).
"""

from math import ceil, floor, log2

from .counters import COUNTERS


class KeyOverlap(ValueError):
    pass


class DuplicateKey(ValueError):
    pass


class MissingKey(KeyError):
    pass


class IndexOutOfRange(ValueError):
    pass


class _Node:
    __slots__ = ("key", "value", "size", "left", "right")

    def __init__(self, key, value, left, right):
        self.key = key
        self.value = value
        self.size = 1 + _size(left) + _size(right)
        self.left = left
        self.right = right
        COUNTERS.seq_nodes += 1


def _size(node):
    return node.size if node is not None else 0


# weight-balance ratio: a subtree may be at most _RATIO times heavier
# than its sibling (weights counted as size+1)
_RATIO = 3


def _weight(node):
    return _size(node) + 1


def _mk(key, value, left, right):
    return _Node(key, value, left, right)


def _balance(key, value, left, right):
    lw, rw = _weight(left), _weight(right)
    if lw + rw <= 2:
        return _mk(key, value, left, right)
    if rw > _RATIO * lw:
        # right too heavy
        rl, rr = right.left, right.right
        if _weight(rl) < 2 * _weight(rr):
            return _mk(right.key, right.value,
                       _mk(key, value, left, rl), rr)
        return _mk(rl.key, rl.value,
                   _mk(key, value, left, rl.left),
                   _mk(right.key, right.value, rl.right, rr))
    if lw > _RATIO * rw:
        ll, lr = left.left, left.right
        if _weight(lr) < 2 * _weight(ll):
            return _mk(left.key, left.value,
                       ll, _mk(key, value, lr, right))
        return _mk(lr.key, lr.value,
                   _mk(left.key, left.value, ll, lr.left),
                   _mk(key, value, lr.right, right))
    return _mk(key, value, left, right)


def _join_with_mid(left, key, value, right):
    """Join assuming all keys in left < key < all keys in right."""
    if _weight(left) > _RATIO * _weight(right):
        return _balance(left.key, left.value, left.left,
                        _join_with_mid(left.right, key, value, right))
    if _weight(right) > _RATIO * _weight(left):
        return _balance(right.key, right.value,
                        _join_with_mid(left, key, value, right.left),
                        right.right)
    return _balance(key, value, left, right)


def _join(left, right):
    if left is None:
        return right
    if right is None:
        return left
    # pull out the minimum of the right tree as the middle
    k, v, rest = _pop_min(right)
    return _join_with_mid(left, k, v, rest)


def _pop_min(node):
    if node.left is None:
        return node.key, node.value, node.right
    k, v, rest = _pop_min(node.left)
    return k, v, _balance(node.key, node.value, rest, node.right)


def _split(node, key):
    """(keys < key, node-with-key-or-None, keys > key)."""
    if node is None:
        return None, None, None
    if key < node.key:
        l, m, r = _split(node.left, key)
        return l, m, _join_with_mid(r, node.key, node.value, node.right)
    if key > node.key:
        l, m, r = _split(node.right, key)
        return _join_with_mid(node.left, node.key, node.value, l), m, r
    return node.left, node, node.right


def _traverse(node, out):
    if node is not None:
        _traverse(node.left, out)
        out.append((node.key, node.value))
        _traverse(node.right, out)


class FunctionalSeq:
    """Immutable ordered sequence keyed by comparable keys."""

    __slots__ = ("root",)

    def __init__(self, root=None):
        self.root = root

    @staticmethod
    def from_sorted(pairs):
        """Build from (key, value) pairs sorted by strictly increasing key."""
        pairs = list(pairs)

        def build(lo, hi):
            if lo >= hi:
                return None
            mid = (lo + hi) // 2
            k, v = pairs[mid]
            return _mk(k, v, build(lo, mid), build(mid + 1, hi))

        return FunctionalSeq(build(0, len(pairs)))

    def __len__(self):
        return _size(self.root)

    def __bool__(self):
        return self.root is not None

    def items(self):
        out = []
        _traverse(self.root, out)
        return out

    def keys(self):
        return [k for k, _ in self.items()]

    def min_item(self):
        node = self.root
        if node is None:
            raise MissingKey("empty sequence")
        while node.left is not None:
            node = node.left
        return node.key, node.value

    def max_item(self):
        node = self.root
        if node is None:
            raise MissingKey("empty sequence")
        while node.right is not None:
            node = node.right
        return node.key, node.value

    def get(self, key, default=None):
        node = self.root
        while node is not None:
            if key < node.key:
                node = node.left
            elif key > node.key:
                node = node.right
            else:
                return node.value
        return default

    def __contains__(self, key):
        sentinel = object()
        return self.get(key, sentinel) is not sentinel

    def split(self, key):
        """(keys < key, keys >= key); the input version is unchanged."""
        COUNTERS.split_join += 1
        l, m, r = _split(self.root, key)
        if m is not None:
            r = _join_with_mid(None, m.key, m.value, r)
        return FunctionalSeq(l), FunctionalSeq(r)

    def join(self, other):
        """Concatenate; requires max key of self < min key of other."""
        COUNTERS.split_join += 1
        if self.root is not None and other.root is not None:
            if self.max_item()[0] >= other.min_item()[0]:
                raise KeyOverlap()
        return FunctionalSeq(_join(self.root, other.root))

    def range(self, lo, hi):
        """Version containing exactly the keys in [lo, hi]."""
        COUNTERS.split_join += 2
        _, mid = self._split_lt(lo)
        keep, _ = mid._split_gt(hi)
        return keep

    def _split_lt(self, key):
        l, m, r = _split(self.root, key)
        if m is not None:
            r = _join_with_mid(None, m.key, m.value, r)
        return FunctionalSeq(l), FunctionalSeq(r)

    def _split_gt(self, key):
        l, m, r = _split(self.root, key)
        if m is not None:
            l = _join_with_mid(l, m.key, m.value, None)
        return FunctionalSeq(l), FunctionalSeq(r)

    def insert(self, key, value=None):
        COUNTERS.split_join += 1
        if key in self:
            raise DuplicateKey(key)
        l, m, r = _split(self.root, key)
        return FunctionalSeq(_join_with_mid(l, key, value, r))

    def set(self, key, value):
        """Insert or replace."""
        COUNTERS.split_join += 1
        l, m, r = _split(self.root, key)
        return FunctionalSeq(_join_with_mid(l, key, value, r))

    def delete(self, key):
        COUNTERS.split_join += 1
        l, m, r = _split(self.root, key)
        if m is None:
            raise MissingKey(key)
        return FunctionalSeq(_join(l, r))

    def __repr__(self):
        return "FunctionalSeq(%r)" % (self.items(),)


EMPTY_SEQ = FunctionalSeq()


def radix_pass_count(n, eps):
    """Digit passes: ceil((floor(log2 n)+1) / ceil(eps*log2 n))."""
    bits = floor(log2(n)) + 1
    width = ceil(eps * log2(n))
    return ceil(bits / width), width


def radix_sort_indices(ids, n, eps):
    """LSD radix sort of element indices in [1, 2n].

    Uses the pass count from radix_pass_count; when the covered bit
    width would not reach the actual maximum id (possible for n that is
    not a power of two, since ids go up to 2n), extra passes are added
    to stay correct.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must be in (0, 1]")
    ids = list(ids)
    if not ids:
        return ids
    if any(i < 1 or i > 2 * n for i in ids):
        raise IndexOutOfRange()
    passes, width = radix_pass_count(n, eps)
    # sort the 0-based values id-1 in [0, 2n-1] so the top id 2n does
    # not need an extra bit
    vals = [i - 1 for i in ids]
    need = max(vals).bit_length()
    while passes * width < need:
        passes += 1
    mask = (1 << width) - 1
    for p in range(passes):
        COUNTERS.radix_passes += 1
        shift = p * width
        buckets = [[] for _ in range(mask + 1)]
        for v in vals:
            buckets[(v >> shift) & mask].append(v)
        vals = [v for b in buckets for v in b]
    return [v + 1 for v in vals]
