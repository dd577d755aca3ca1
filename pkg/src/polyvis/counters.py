"""Operation counters: the currency of every asymptotic claim.

Benchmarks and acceptance tests compare counter values, never wall
clock.  Counted primitives:

- split_join: persistent-tree split/join/insert/delete calls
- locate_steps: binary-search steps in point location / interval lookup
- cell_locates: cell/interval location operations (one per lookup)
- ray_shoots: ray_shoot invocations (their internal walk is not counted)
- canonical_handles: canonical subsets returned by a stabbing query
- merges: merge_vis invocations
- seq_nodes: persistent tree nodes allocated (space accounting)
- radix_passes: radix sort digit passes

Counters are process-global and meant for single-threaded measurement
runs; queries themselves never read them.
"""

FIELDS = ("split_join", "locate_steps", "cell_locates", "ray_shoots",
          "canonical_handles", "merges", "seq_nodes", "radix_passes")


class Counters:
    __slots__ = FIELDS

    def __init__(self):
        self.reset()

    def reset(self):
        for f in FIELDS:
            setattr(self, f, 0)

    def snapshot(self):
        return {f: getattr(self, f) for f in FIELDS}

    def query_ops(self):
        """Total per-query primitive operations (space fields excluded)."""
        return (self.split_join + self.locate_steps + self.cell_locates
                + self.ray_shoots + self.canonical_handles + self.merges)


COUNTERS = Counters()


class measure:
    """Context manager returning the counter delta of its block."""

    def __enter__(self):
        self.before = COUNTERS.snapshot()
        return self

    def __exit__(self, *exc):
        after = COUNTERS.snapshot()
        self.delta = {f: after[f] - self.before[f] for f in FIELDS}
        return False

    def query_ops(self):
        d = self.delta
        return (d["split_join"] + d["locate_steps"] + d["cell_locates"]
                + d["ray_shoots"] + d["canonical_handles"] + d["merges"])
