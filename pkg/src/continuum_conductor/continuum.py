"""Edge-cloud continuum topology: tiered compute nodes, links, trust zones.

The continuum is a tree rooted at a single cloud node. Every query is
read-only; values are immutable after construction. Structural problems are
reported as data by :func:`validate` rather than raised, so a UI can show
them all at once.
"""

from __future__ import annotations

import enum
import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .errors import DomainError, ParseError, UnknownNode


class Tier(enum.IntEnum):
    """Compute layers, ordered by distance from the data source."""

    SENSOR = 0
    EDGE = 1
    FOG = 2
    CLOUD = 3

    @property
    def key(self) -> str:
        return self.name.lower()

    @classmethod
    def from_key(cls, key: str) -> "Tier":
        try:
            return cls[key.upper()]
        except KeyError:
            raise ValueError(f"unknown tier {key!r}") from None


@dataclass(frozen=True)
class NodeSpec:
    node_id: str
    tier: Tier
    compute_capacity: float  # compute units per second, > 0
    trust_zone: str
    parent: str | None = None
    clock_skew: float = 0.0


@dataclass(frozen=True)
class LinkSpec:
    child: str
    parent: str
    bandwidth: float  # bytes per second, > 0
    latency: float  # seconds, >= 0
    reliable: bool = True


@dataclass(frozen=True)
class TrustZone:
    zone_id: str
    member_nodes: frozenset[str]


class ViolationKind(str, enum.Enum):
    NO_ROOT = "no-root"
    MULTIPLE_ROOTS = "multiple-roots"
    ROOT_NOT_CLOUD = "root-not-cloud"
    UNKNOWN_PARENT = "unknown-parent"
    CYCLE = "cycle"
    TIER_INVERSION = "tier-inversion"
    LINK_MISMATCH = "link-mismatch"
    ORPHAN_ZONE = "orphan-zone"
    ZONE_PARTITION = "zone-partition"
    BAD_VALUE = "bad-value"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str


@dataclass(frozen=True)
class Topology:
    nodes: tuple[NodeSpec, ...]
    links: tuple[LinkSpec, ...]
    zones: tuple[TrustZone, ...]
    _by_id: dict[str, NodeSpec] = field(init=False, repr=False, compare=False)
    _link_by_child: dict[str, LinkSpec] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {n.node_id: n for n in self.nodes})
        object.__setattr__(self, "_link_by_child", {l.child: l for l in self.links})

    @classmethod
    def build(
        cls,
        nodes: Iterable[NodeSpec],
        links: Iterable[LinkSpec],
        zones: Iterable[TrustZone],
    ) -> "Topology":
        return cls(nodes=tuple(nodes), links=tuple(links), zones=tuple(zones))

    def node(self, node_id: str) -> NodeSpec:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise UnknownNode(f"no node with id {node_id!r}") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._by_id

    def link_above(self, node_id: str) -> LinkSpec | None:
        """The link connecting a node to its parent; None for the root."""
        self.node(node_id)
        return self._link_by_child.get(node_id)

    def root(self) -> NodeSpec:
        roots = [n for n in self.nodes if n.parent is None]
        if len(roots) != 1:
            raise DomainError(f"expected exactly one root, found {len(roots)}")
        return roots[0]

    def children_of(self, node_id: str) -> list[NodeSpec]:
        self.node(node_id)
        return [n for n in self.nodes if n.parent == node_id]

    def zone_of(self, node_id: str) -> str:
        return self.node(node_id).trust_zone


def validate(topology: Topology) -> list[Violation]:
    """All structural invariant violations; empty list means valid."""
    out: list[Violation] = []
    ids = {n.node_id for n in topology.nodes}

    roots = [n for n in topology.nodes if n.parent is None]
    if not roots:
        out.append(Violation(ViolationKind.NO_ROOT, "no parentless node"))
    elif len(roots) > 1:
        names = ", ".join(sorted(n.node_id for n in roots))
        out.append(Violation(ViolationKind.MULTIPLE_ROOTS, f"parentless nodes: {names}"))
    if len(roots) == 1 and roots[0].tier is not Tier.CLOUD:
        out.append(
            Violation(ViolationKind.ROOT_NOT_CLOUD, f"root {roots[0].node_id} is {roots[0].tier.key}")
        )

    for n in topology.nodes:
        if n.compute_capacity <= 0:
            out.append(Violation(ViolationKind.BAD_VALUE, f"{n.node_id}: capacity must be > 0"))
        if n.parent is None:
            continue
        if n.parent not in ids:
            out.append(Violation(ViolationKind.UNKNOWN_PARENT, f"{n.node_id} -> {n.parent}"))
            continue
        parent = topology.node(n.parent)
        if parent.tier < n.tier:
            out.append(
                Violation(
                    ViolationKind.TIER_INVERSION,
                    f"{n.node_id} ({n.tier.key}) under {parent.node_id} ({parent.tier.key})",
                )
            )

    # Cycle detection by walking parents with a visited set.
    for n in topology.nodes:
        seen = {n.node_id}
        cur = n
        while cur.parent is not None and cur.parent in ids:
            if cur.parent in seen:
                out.append(Violation(ViolationKind.CYCLE, f"cycle through {cur.parent}"))
                break
            seen.add(cur.parent)
            cur = topology.node(cur.parent)

    linked = set()
    for link in topology.links:
        if link.bandwidth <= 0 or link.latency < 0:
            out.append(
                Violation(ViolationKind.BAD_VALUE, f"link {link.child}->{link.parent}: bad bandwidth/latency")
            )
        if link.child in linked:
            out.append(Violation(ViolationKind.LINK_MISMATCH, f"duplicate link for child {link.child}"))
        linked.add(link.child)
        if link.child not in ids or link.parent not in ids:
            out.append(Violation(ViolationKind.LINK_MISMATCH, f"link {link.child}->{link.parent}: unknown node"))
            continue
        if topology.node(link.child).parent != link.parent:
            out.append(
                Violation(
                    ViolationKind.LINK_MISMATCH,
                    f"link {link.child}->{link.parent} disagrees with node parent",
                )
            )
    for n in topology.nodes:
        if n.parent is not None and n.node_id not in linked:
            out.append(Violation(ViolationKind.LINK_MISMATCH, f"{n.node_id} has a parent but no link"))

    zone_ids = {z.zone_id for z in topology.zones}
    membership: dict[str, list[str]] = {}
    for z in topology.zones:
        for member in z.member_nodes:
            membership.setdefault(member, []).append(z.zone_id)
            if member not in ids:
                out.append(Violation(ViolationKind.ZONE_PARTITION, f"zone {z.zone_id} lists unknown node {member}"))
    for n in topology.nodes:
        if n.trust_zone not in zone_ids:
            out.append(Violation(ViolationKind.ORPHAN_ZONE, f"{n.node_id} in undeclared zone {n.trust_zone}"))
        zones_holding = membership.get(n.node_id, [])
        if len(zones_holding) != 1 or (zones_holding and zones_holding[0] != n.trust_zone):
            out.append(
                Violation(
                    ViolationKind.ZONE_PARTITION,
                    f"{n.node_id} must appear in exactly its own zone, found {sorted(zones_holding)}",
                )
            )

    return out


def path_to_root(topology: Topology, node_id: str) -> list[LinkSpec]:
    """Links from the node upward to the root, in ascending order."""
    cur = topology.node(node_id)
    path: list[LinkSpec] = []
    seen = {cur.node_id}
    while cur.parent is not None:
        link = topology.link_above(cur.node_id)
        if link is None:
            raise DomainError(f"{cur.node_id} has a parent but no link")
        path.append(link)
        cur = topology.node(cur.parent)
        if cur.node_id in seen:
            raise DomainError(f"cycle through {cur.node_id}")
        seen.add(cur.node_id)
    return path


def depth(topology: Topology, node_id: str) -> int:
    return len(path_to_root(topology, node_id))


def ancestors(topology: Topology, node_id: str) -> list[str]:
    """Node ids from the node itself up to and including the root."""
    ids = [node_id]
    for link in path_to_root(topology, node_id):
        ids.append(link.parent)
    return ids


def path_between(topology: Topology, frm: str, to: str) -> list[LinkSpec]:
    """Tree links traversed from one node to another, via their meeting point."""
    up_from = ancestors(topology, frm)
    up_to = ancestors(topology, to)
    to_set = set(up_to)
    meet = next(n for n in up_from if n in to_set)

    hops: list[LinkSpec] = []
    for link in path_to_root(topology, frm):
        if link.child == meet:
            break
        hops.append(link)
        if link.parent == meet:
            break
    down: list[LinkSpec] = []
    for link in path_to_root(topology, to):
        if link.child == meet:
            break
        down.append(link)
        if link.parent == meet:
            break
    hops.extend(reversed(down))
    return hops


def crosses_zone(topology: Topology, frm: str, to: str) -> bool:
    """True iff the two nodes sit in different trust zones."""
    return topology.zone_of(frm) != topology.zone_of(to)


def zone_crossings(topology: Topology, hops: Iterable[LinkSpec]) -> int:
    """How many traversed links have endpoints in different zones."""
    return sum(1 for h in hops if crosses_zone(topology, h.child, h.parent))


# --- Serialization ----------------------------------------------------------

def topology_to_json(topology: Topology) -> dict:
    return {
        "nodes": [
            {
                "id": n.node_id,
                "tier": n.tier.key,
                "capacity": n.compute_capacity,
                "zone": n.trust_zone,
                "parent": n.parent,
                "clock_skew": n.clock_skew,
            }
            for n in topology.nodes
        ],
        "links": [
            {
                "child": l.child,
                "parent": l.parent,
                "bandwidth": l.bandwidth,
                "latency": l.latency,
                "reliable": l.reliable,
            }
            for l in topology.links
        ],
        "zones": [
            {"id": z.zone_id, "members": sorted(z.member_nodes)} for z in topology.zones
        ],
    }


def topology_from_json(record: Mapping) -> Topology:
    try:
        nodes = tuple(
            NodeSpec(
                node_id=r["id"],
                tier=Tier.from_key(r["tier"]),
                compute_capacity=float(r["capacity"]),
                trust_zone=r["zone"],
                parent=r.get("parent"),
                clock_skew=float(r.get("clock_skew", 0.0)),
            )
            for r in record["nodes"]
        )
        links = tuple(
            LinkSpec(
                child=r["child"],
                parent=r["parent"],
                bandwidth=float(r["bandwidth"]),
                latency=float(r["latency"]),
                reliable=bool(r.get("reliable", True)),
            )
            for r in record.get("links", [])
        )
        zones = tuple(
            TrustZone(zone_id=r["id"], member_nodes=frozenset(r["members"]))
            for r in record.get("zones", [])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad topology record: {exc}") from exc
    return Topology(nodes=nodes, links=links, zones=zones)


def load_topology(path) -> Topology:
    with open(path, encoding="utf-8") as fh:
        try:
            record = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc}", line=exc.lineno) from exc
    return topology_from_json(record)


def save_topology(topology: Topology, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(topology_to_json(topology), fh, indent=2, sort_keys=True)
        fh.write("\n")
