"""Feed-forward network graphs: data model, structural queries and JSON IO."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping

ZERO_TOL = 1e-12


def _freeze(d: Mapping) -> Mapping:
    return MappingProxyType(dict(d))


@dataclass(frozen=True, eq=False)
class Network:
    """A GFNN.

    edges maps (source, target) -> weight. scalars maps an output node to its
    D per-coordinate output scalars. Instances are never mutated; use the
    helpers below (or ``NetworkBuilder``) to derive new networks.
    """

    dim_out: int
    nodes: frozenset
    inputs: frozenset
    edges: Mapping[tuple[str, str], float]
    biases: Mapping[str, float]
    scalars: Mapping[str, tuple[float, ...]]
    constants: tuple[float, ...]
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "edges", _freeze({(str(a), str(b)): float(w) for (a, b), w in self.edges.items()}))
        object.__setattr__(self, "biases", _freeze({str(k): float(v) for k, v in self.biases.items()}))
        object.__setattr__(self, "scalars", _freeze({str(k): tuple(float(x) for x in v) for k, v in self.scalars.items()}))
        object.__setattr__(self, "constants", tuple(float(c) for c in self.constants))
        object.__setattr__(self, "meta", _freeze(self.meta))

    # structure -------------------------------------------------------------
    @property
    def outputs(self) -> frozenset:
        return frozenset(self.scalars)

    @property
    def hidden(self) -> list[str]:
        """Non-input nodes, sorted."""
        return sorted(self.nodes - self.inputs)

    @cached_property
    def parents(self) -> Mapping[str, tuple[str, ...]]:
        par: dict[str, list[str]] = {v: [] for v in self.nodes}
        for (a, b) in self.edges:
            par.setdefault(b, []).append(a)
        return MappingProxyType({v: tuple(sorted(p)) for v, p in par.items()})

    @cached_property
    def children(self) -> Mapping[str, tuple[str, ...]]:
        ch: dict[str, list[str]] = {v: [] for v in self.nodes}
        for (a, b) in self.edges:
            ch.setdefault(a, []).append(b)
        return MappingProxyType({v: tuple(sorted(c)) for v, c in ch.items()})

    @cached_property
    def topo_order(self) -> tuple[str, ...]:
        """Kahn order with lexicographic tie-breaking. Raises on cycles."""
        import heapq

        indeg = {v: len(self.parents.get(v, ())) for v in self.nodes}
        heap = [v for v, d in indeg.items() if d == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            v = heapq.heappop(heap)
            out.append(v)
            for c in self.children.get(v, ()):
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(heap, c)
        if len(out) != len(self.nodes):
            raise ValueError("network graph has a directed cycle")
        return tuple(out)

    @cached_property
    def levels(self) -> Mapping[str, int]:
        lv: dict[str, int] = {}
        for v in self.topo_order:
            ps = self.parents.get(v, ())
            lv[v] = 0 if not ps else 1 + max(lv[p] for p in ps)
        return MappingProxyType(lv)

    @property
    def depth(self) -> int:
        return max(self.levels.values(), default=0)

    def weight(self, src: str, dst: str) -> float:
        return self.edges.get((src, dst), 0.0)

    def input_order(self) -> list[str]:
        return sorted(self.inputs)

    def is_trivial(self) -> bool:
        return (self.nodes == self.inputs and not self.scalars
                and all(c == 0.0 for c in self.constants))

    # equality / hashing ----------------------------------------------------
    def to_dict(self) -> dict:
        d = {
            "dim_out": self.dim_out,
            "nodes": [{"id": v} if v in self.inputs else {"id": v, "bias": self.biases[v]}
                      for v in sorted(self.nodes)],
            "inputs": sorted(self.inputs),
            "edges": [{"from": a, "to": b, "weight": w} for (a, b), w in sorted(self.edges.items())],
            "outputs": [{"node": w, "scalars": list(s)} for w, s in sorted(self.scalars.items())],
            "constants": list(self.constants),
        }
        if self.meta:
            d.update({k: v for k, v in self.meta.items() if k not in d})
        return d

    def content_hash(self) -> str:
        d = self.to_dict()
        d = {k: d[k] for k in ("dim_out", "nodes", "inputs", "edges", "outputs", "constants")}
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return structurally_equal(self, other, tol=0.0)

    def __hash__(self) -> int:
        return hash(self.content_hash())

    def replace(self, **kw) -> "Network":
        base = dict(dim_out=self.dim_out, nodes=self.nodes, inputs=self.inputs, edges=self.edges,
                    biases=self.biases, scalars=self.scalars, constants=self.constants, meta=self.meta)
        base.update(kw)
        return Network(**base)


def structurally_equal(n1: Network, n2: Network, tol: float = ZERO_TOL) -> bool:
    """Same ids, same edge set, numbers within ``tol``."""
    if n1.dim_out != n2.dim_out or n1.nodes != n2.nodes or n1.inputs != n2.inputs:
        return False
    if set(n1.edges) != set(n2.edges) or set(n1.scalars) != set(n2.scalars):
        return False

    def close(a, b):
        return abs(a - b) <= tol

    return (all(close(w, n2.edges[k]) for k, w in n1.edges.items())
            and all(close(b, n2.biases[k]) for k, b in n1.biases.items())
            and all(close(x, y) for k, s in n1.scalars.items() for x, y in zip(s, n2.scalars[k]))
            and all(close(x, y) for x, y in zip(n1.constants, n2.constants)))


def trivial(inputs: Iterable[str], dim_out: int = 1) -> Network:
    inputs = list(inputs)
    return Network(dim_out, inputs, inputs, {}, {}, {}, [0.0] * dim_out)


class NetworkBuilder:
    """Mutable scratch space for assembling a network."""

    def __init__(self, dim_out: int = 1, net: Network | None = None):
        if net is not None:
            self.dim_out = net.dim_out
            self.inputs = set(net.inputs)
            self.nodes = set(net.nodes)
            self.edges = dict(net.edges)
            self.biases = dict(net.biases)
            self.scalars = {k: list(v) for k, v in net.scalars.items()}
            self.constants = list(net.constants)
            self.meta = dict(net.meta)
        else:
            self.dim_out = dim_out
            self.inputs, self.nodes = set(), set()
            self.edges, self.biases, self.scalars = {}, {}, {}
            self.constants = [0.0] * dim_out
            self.meta = {}

    def input(self, *names: str) -> "NetworkBuilder":
        for n in names:
            self.inputs.add(n)
            self.nodes.add(n)
        return self

    def node(self, name: str, bias: float = 0.0, **incoming: float) -> "NetworkBuilder":
        self.nodes.add(name)
        self.biases[name] = bias
        for src, w in incoming.items():
            self.edges[(src, name)] = w
        return self

    def edge(self, src: str, dst: str, w: float) -> "NetworkBuilder":
        self.edges[(src, dst)] = w
        return self

    def output(self, name: str, *scalars: float) -> "NetworkBuilder":
        if len(scalars) != self.dim_out:
            raise ValueError(f"expected {self.dim_out} scalars for {name}")
        self.scalars[name] = list(scalars)
        return self

    def remove(self, name: str) -> "NetworkBuilder":
        self.nodes.discard(name)
        self.inputs.discard(name)
        self.biases.pop(name, None)
        self.scalars.pop(name, None)
        self.edges = {k: w for k, w in self.edges.items() if name not in k}
        return self

    def build(self) -> Network:
        return Network(self.dim_out, self.nodes, self.inputs, self.edges, self.biases,
                       self.scalars, self.constants, self.meta)


# queries ------------------------------------------------------------------

def validate(net: Network) -> list[str]:
    """Return a list of human-readable invariant violations (empty if valid)."""
    out: list[str] = []
    if not isinstance(net.dim_out, int) or net.dim_out < 1:
        out.append("dim_out must be a positive integer")
    if not net.nodes:
        out.append("node set is empty")
    if any(not isinstance(v, str) or not v for v in net.nodes):
        out.append("node ids must be non-empty strings")
    if not net.inputs <= net.nodes:
        out.append("inputs not contained in nodes")
    for (a, b), w in net.edges.items():
        if a not in net.nodes or b not in net.nodes:
            out.append(f"edge ({a},{b}) references unknown node")
        if w == 0.0:
            out.append(f"nonzero-weight violation: edge ({a},{b}) has weight 0")
        elif not math.isfinite(w):
            out.append(f"edge ({a},{b}) weight not finite")
    try:
        net.topo_order
    except ValueError:
        out.append("acyclicity violation: graph has a directed cycle")
    parentless = {v for v in net.nodes if not any(b == v for (_, b) in net.edges)}
    if parentless != set(net.inputs):
        extra = sorted(parentless - net.inputs)
        bad = sorted(net.inputs - parentless)
        if extra:
            out.append(f"parentless non-input nodes: {extra}")
        if bad:
            out.append(f"input nodes with parents: {bad}")
    for v in net.nodes - net.inputs:
        if v not in net.biases:
            out.append(f"missing bias for {v}")
        elif not math.isfinite(net.biases[v]):
            out.append(f"bias of {v} not finite")
    for v in net.biases:
        if v in net.inputs or v not in net.nodes:
            out.append(f"bias given for input or unknown node {v}")
    for w, s in net.scalars.items():
        if w not in net.nodes or w in net.inputs:
            out.append(f"output {w} must be a non-input node")
        if len(s) != net.dim_out:
            out.append(f"output {w} has {len(s)} scalars, expected {net.dim_out}")
        if not all(math.isfinite(x) for x in s):
            out.append(f"output {w} has non-finite scalar")
    if len(net.constants) != net.dim_out:
        out.append("constants length differs from dim_out")
    if not all(math.isfinite(c) for c in net.constants):
        out.append("non-finite constant")
    return out


def level(net: Network, v: str) -> int:
    return net.levels[v]


def ancestors(net: Network, S: Iterable[str]) -> set[str]:
    seen = set()
    stack = list(S)
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(net.parents.get(v, ()))
    return seen


def descendants(net: Network, S: Iterable[str]) -> set[str]:
    seen = set()
    stack = list(S)
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(net.children.get(v, ()))
    return seen


def is_layered(net: Network) -> bool:
    lv = net.levels
    return all(lv[b] == lv[a] + 1 for (a, b) in net.edges)


def is_non_degenerate(net: Network) -> bool:
    hidden = net.nodes - net.inputs
    if hidden != ancestors(net, net.outputs) - net.inputs:
        return False
    return all(any(abs(x) > 0 for x in s) for s in net.scalars.values())


def is_strongly_non_degenerate(net: Network) -> bool:
    return is_non_degenerate(net) and set(net.nodes) == ancestors(net, net.outputs)


def prune(net: Network, tol: float = ZERO_TOL) -> Network:
    """Drop zero-scalar outputs and hidden nodes that do not feed an output."""
    scalars = {w: s for w, s in net.scalars.items() if any(abs(x) >= tol for x in s)}
    net = net.replace(scalars=scalars)
    keep = ancestors(net, net.outputs) | set(net.inputs)
    if keep == set(net.nodes):
        return net
    b = NetworkBuilder(net=net)
    for v in sorted(set(net.nodes) - keep):
        b.remove(v)
    return b.build()


def subnetwork(net: Network, S: Iterable[str], new_inputs=None, new_outputs=None,
               new_scalars: Mapping[str, Iterable[float]] | None = None,
               new_constants: Iterable[float] | None = None) -> Network:
    """Subnetwork spanned by ``anc(S)``.

    By default the inputs are the parentless nodes of the spanned graph (the
    original inputs), outputs are ``S`` minus inputs with the original
    scalars. ``new_scalars`` overrides scalars (and may change dim_out).
    """
    S = set(S)
    keep = ancestors(net, S)
    b = NetworkBuilder(net=net)
    for v in sorted(set(net.nodes) - keep):
        b.remove(v)
    if new_inputs is not None:
        b.inputs = set(new_inputs)
    outs = set(new_outputs) if new_outputs is not None else (S - set(net.inputs))
    if new_scalars is not None:
        sc = {k: list(v) for k, v in new_scalars.items()}
        dims = {len(v) for v in sc.values()}
        if new_constants is not None:
            dims.add(len(list(new_constants)))
        if len(dims) > 1:
            raise ValueError("inconsistent scalar lengths")
        if dims:
            b.dim_out = dims.pop()
    else:
        sc = {w: list(net.scalars.get(w, [0.0] * net.dim_out)) for w in outs}
    b.scalars = {w: sc.get(w, [0.0] * b.dim_out) for w in outs}
    b.constants = list(new_constants) if new_constants is not None else (
        list(net.constants) if b.dim_out == net.dim_out else [0.0] * b.dim_out)
    return b.build()


# JSON ---------------------------------------------------------------------

def from_dict(d: Mapping) -> Network:
    dim = int(d["dim_out"])
    ids = [n["id"] for n in d["nodes"]]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate node id")
    biases = {n["id"]: float(n["bias"]) for n in d["nodes"] if "bias" in n}
    inputs = d.get("inputs")
    if inputs is None:
        inputs = [n["id"] for n in d["nodes"] if "bias" not in n]
    edges = {(e["from"], e["to"]): float(e["weight"]) for e in d.get("edges", [])}
    scalars = {o["node"]: [float(x) for x in o["scalars"]] for o in d.get("outputs", [])}
    constants = [float(x) for x in d.get("constants", [0.0] * dim)]
    meta = {k: v for k, v in d.items()
            if k not in ("dim_out", "nodes", "inputs", "edges", "outputs", "constants")}
    return Network(dim, ids, inputs, edges, biases, scalars, constants, meta)


def dumps(net: Network, **kw) -> str:
    return json.dumps(net.to_dict(), **kw)


def loads(s: str) -> Network:
    return from_dict(json.loads(s))


def load(path) -> Network:
    with open(path) as fh:
        return from_dict(json.load(fh))


def save(net: Network, path) -> None:
    with open(path, "w") as fh:
        json.dump(net.to_dict(), fh, indent=1)
        fh.write("\n")
