"""CSI map: a weighted directed graph over quantized channel states.

Nodes hold unique QCSI index pairs. Outgoing edge weights of a node always sum
to one and are learned online from consecutive observations of each UT; the
map predicts a UT's next state by following the heaviest outgoing edge.
"""

from dataclasses import dataclass

from .quantizer import Qcsi


class CsiMapError(LookupError):
    pass


class NoHistory(CsiMapError):
    """The UT has never been observed by this map."""


class ColdNode(CsiMapError):
    """The UT's current node has no outgoing edges yet."""


class MapFormatError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def reinforce(weights, winner, theta):
    """One learning step on the outgoing weights of a node.

    The winner gains ``min(theta, 1 - w_winner)`` and every other edge gives
    up that amount in proportion to its share of the non-winning mass.
    """
    if not 0 <= winner < len(weights):
        raise IndexError(f"winner index {winner} out of range for {len(weights)} edges")
    weights = [float(w) for w in weights]
    loser_mass = sum(w for k, w in enumerate(weights) if k != winner)
    # loser_mass equals 1 - w_winner exactly when the weights sum to one; using
    # it directly keeps every loser >= 0 under rounding.
    step = min(theta, loser_mass)
    if step <= 0:
        return weights
    scale = 1.0 - step / loser_mass
    out = [w * scale for w in weights]
    # w + (1 - w) can round one ulp above 1
    out[winner] = min(weights[winner] + step, 1.0)
    return out


@dataclass
class Observation:
    created_node: bool
    created_edge: bool
    node_id: int


class CsiMap:
    def __init__(self, theta=0.1, gc_threshold=0.02, gc_period=1000, codebook_version=0):
        if not 0 < theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if not 0 <= gc_threshold < 1:
            raise ValueError("gc_threshold must lie in [0, 1)")
        self.theta = theta
        self.gc_threshold = gc_threshold
        self.gc_period = gc_period
        self.codebook_version = codebook_version
        self.reset()

    def reset(self):
        self.node_of = {}   # Qcsi -> node id
        self.qcsi_of = {}   # node id -> Qcsi
        self.out_edges = {}  # node id -> {target id: weight}
        self.cursors = {}   # ut id -> node id
        self._next_id = 0
        self._num_edges = 0

    # -- queries -------------------------------------------------------

    @property
    def num_nodes(self):
        return len(self.qcsi_of)

    @property
    def num_edges(self):
        return self._num_edges

    def node(self, qcsi):
        return self.node_of.get(Qcsi(*qcsi))

    def edges(self):
        for src, targets in self.out_edges.items():
            for dst, w in targets.items():
                yield src, dst, w

    def cursor(self, ut):
        return self.cursors.get(ut)

    # -- learning ------------------------------------------------------

    def _get_or_create(self, qcsi):
        node = self.node_of.get(qcsi)
        if node is not None:
            return node, False
        node = self._next_id
        self._next_id += 1
        self.node_of[qcsi] = node
        self.qcsi_of[node] = qcsi
        self.out_edges[node] = {}
        return node, True

    def observe(self, ut, qcsi):
        """Record that ``ut`` was estimated at ``qcsi`` and learn the transition."""
        qcsi = Qcsi(*qcsi)
        node, created_node = self._get_or_create(qcsi)
        created_edge = False
        prev = self.cursors.get(ut)
        if prev is not None:
            edges = self.out_edges[prev]
            if not edges:
                edges[node] = 1.0
                created_edge = True
            elif len(edges) == 1 and node in edges:
                pass  # lone edge already saturated at weight 1
            else:
                if node not in edges:
                    edges[node] = 0.0
                    created_edge = True
                targets = list(edges)
                new = reinforce(list(edges.values()), targets.index(node), self.theta)
                for t, w in zip(targets, new):
                    edges[t] = w
        if created_edge:
            self._num_edges += 1
        self.cursors[ut] = node
        return Observation(created_node, created_edge, node)

    def predict_node(self, ut):
        node = self.cursors.get(ut)
        if node is None:
            raise NoHistory(f"UT {ut} has no history in the map")
        edges = self.out_edges[node]
        if not edges:
            raise ColdNode(f"node {node} of UT {ut} has no outgoing edges")
        # heaviest edge, ties to the smallest target id
        return min(edges.items(), key=lambda kv: (-kv[1], kv[0]))[0]

    def predict(self, ut):
        return self.qcsi_of[self.predict_node(ut)]

    def move_cursor(self, ut, node):
        if node not in self.qcsi_of:
            raise KeyError(f"no node {node}")
        self.cursors[ut] = node

    def garbage_collect(self, threshold=None):
        """Drop edges lighter than ``threshold`` and then free-standing nodes.

        Surviving out-weights are renormalised; nodes that are still some UT's
        cursor are kept even when isolated. Returns (edges_removed, nodes_removed).
        """
        th = self.gc_threshold if threshold is None else threshold
        if not 0 <= th < 1:
            raise ValueError("threshold must lie in [0, 1)")
        edges_removed = 0
        for src, edges in self.out_edges.items():
            weak = [t for t, w in edges.items() if w < th]
            if not weak:
                continue
            for t in weak:
                del edges[t]
            edges_removed += len(weak)
            self._num_edges -= len(weak)
            total = sum(edges.values())
            if total > 0:
                for t in edges:
                    edges[t] /= total
            else:
                edges.clear()
        has_in = {t for edges in self.out_edges.values() for t in edges}
        pinned = set(self.cursors.values())
        doomed = [n for n, edges in self.out_edges.items()
                  if not edges and n not in has_in and n not in pinned]
        for n in doomed:
            del self.out_edges[n]
            del self.node_of[self.qcsi_of.pop(n)]
        return edges_removed, len(doomed)

    # -- persistence -----------------------------------------------------

    def dumps(self):
        lines = [f"CSIMAP v1 {self.theta!r} {self.gc_threshold!r} {self.codebook_version}"]
        for node, q in sorted(self.qcsi_of.items()):
            lines.append(f"N {node} {q.i} {q.n}")
        for src in sorted(self.out_edges):
            for dst, w in self.out_edges[src].items():
                lines.append(f"E {src} {dst} {w:.17g}")
        for ut, node in self.cursors.items():
            lines.append(f"C {ut} {node}")
        lines.append(f"END {self.num_nodes} {self.num_edges} {len(self.cursors)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text):
        lines = text.splitlines()
        if not lines:
            raise MapFormatError("empty input", line=1)
        head = lines[0].split()
        if len(head) != 5 or head[:2] != ["CSIMAP", "v1"]:
            raise MapFormatError(f"bad header {lines[0]!r}", line=1)
        try:
            m = cls(theta=float(head[2]), gc_threshold=float(head[3]),
                    codebook_version=int(head[4]))
        except ValueError as exc:
            raise MapFormatError(f"bad header: {exc}", line=1) from None
        finished = False
        for lineno, raw in enumerate(lines[1:], start=2):
            parts = raw.split()
            if not parts:
                continue
            if finished:
                raise MapFormatError("content after END", line=lineno)
            try:
                tag = parts[0]
                if tag == "N" and len(parts) == 4:
                    node, i, n = map(int, parts[1:])
                    q = Qcsi(i, n)
                    if node in m.qcsi_of or q in m.node_of:
                        raise MapFormatError("duplicate node", line=lineno)
                    m.qcsi_of[node] = q
                    m.node_of[q] = node
                    m.out_edges[node] = {}
                    m._next_id = max(m._next_id, node + 1)
                elif tag == "E" and len(parts) == 4:
                    src, dst, w = int(parts[1]), int(parts[2]), float(parts[3])
                    if src not in m.qcsi_of or dst not in m.qcsi_of:
                        raise MapFormatError("edge references an unknown node", line=lineno)
                    if dst in m.out_edges[src]:
                        raise MapFormatError("duplicate edge", line=lineno)
                    if not 0 <= w <= 1:
                        raise MapFormatError("edge weight outside [0, 1]", line=lineno)
                    m.out_edges[src][dst] = w
                    m._num_edges += 1
                elif tag == "C" and len(parts) == 3:
                    ut, node = int(parts[1]), int(parts[2])
                    if node not in m.qcsi_of:
                        raise MapFormatError("cursor references an unknown node", line=lineno)
                    m.cursors[ut] = node
                elif tag == "END" and len(parts) == 4:
                    counts = tuple(map(int, parts[1:]))
                    if counts != (m.num_nodes, m.num_edges, len(m.cursors)):
                        raise MapFormatError("record counts do not match END trailer", line=lineno)
                    finished = True
                else:
                    raise MapFormatError(f"unrecognised record {raw!r}", line=lineno)
            except ValueError as exc:
                if isinstance(exc, MapFormatError):
                    raise
                raise MapFormatError(str(exc), line=lineno) from None
        if not finished:
            raise MapFormatError("truncated input: missing END trailer", line=len(lines) + 1)
        return m

    def structure(self):
        """Comparable snapshot of the full map state."""
        return (self.theta, self.gc_threshold, self.codebook_version,
                dict(self.qcsi_of), {s: dict(e) for s, e in self.out_edges.items()},
                dict(self.cursors))

    def __eq__(self, other):
        if not isinstance(other, CsiMap):
            return NotImplemented
        return self.structure() == other.structure()
