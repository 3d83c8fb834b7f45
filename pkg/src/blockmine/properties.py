"""Temporal block-pair properties of a script model.

A property "a before b" holds when some transition labeled a lands on a
location from which some transition labeled b departs, under the reflexive
transitive reachability of the model. The pair is ordered but not strict:
a block inside a loop can precede itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .blocks import BlockLabel
from .ingest import ScriptSource
from .model import ScriptModel


@dataclass(frozen=True, order=True)
class TemporalProperty:
    """An ordered pair: `first` can be followed by `second`."""

    first: BlockLabel
    second: BlockLabel

    @property
    def display(self) -> str:
        return f"{self.first.display} ≺ {self.second.display}"

    def __str__(self) -> str:
        return self.display

    def mentions(self, label: BlockLabel) -> bool:
        return self.first == label or self.second == label


@dataclass(frozen=True)
class PropertySet:
    """The temporal properties of one script, with provenance."""

    source: ScriptSource | None
    properties: frozenset[TemporalProperty]

    def __len__(self) -> int:
        return len(self.properties)

    def __contains__(self, prop: TemporalProperty) -> bool:
        return prop in self.properties


class ReachabilityRelation:
    """Reflexive transitive closure of a model's location graph.

    Labels are ignored, so epsilon transitions count as steps; on an
    epsilon-free model this is plain control-flow reachability.
    """

    def __init__(self, reach: dict[int, frozenset[int]]):
        self._reach = reach

    def __contains__(self, pair: tuple[int, int]) -> bool:
        src, dst = pair
        return dst in self._reach.get(src, frozenset())

    def reaches(self, location: int) -> frozenset[int]:
        return self._reach.get(location, frozenset())

    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (src, dst) for src, dsts in self._reach.items() for dst in dsts
        )


def reachability(model: ScriptModel) -> ReachabilityRelation:
    """Compute which locations can reach which, including each reaching itself."""
    adjacency: dict[int, set[int]] = {}
    for src, _, dst in model.transitions:
        adjacency.setdefault(src, set()).add(dst)
    reach: dict[int, frozenset[int]] = {}
    for loc in model.locations:
        seen = {loc}
        frontier = [loc]
        while frontier:
            node = frontier.pop()
            for nxt in adjacency.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        reach[loc] = frozenset(seen)
    return ReachabilityRelation(reach)


def props(model: ScriptModel) -> PropertySet:
    """All temporal properties of a model.

    For every pair of labeled transitions (la -a-> lb) and (lc -b-> ld)
    with lc reachable from lb, the property "a before b" holds. A model
    with fewer than two command transitions can only yield properties if a
    transition loops on itself, which straight-line scripts never do, so a
    one-block script has no properties at all.
    """
    reach = reachability(model)
    labeled = [(src, label, dst) for src, label, dst in model.transitions if label is not None]
    by_source: dict[int, set[BlockLabel]] = {}
    for src, label, _ in labeled:
        by_source.setdefault(src, set()).add(label)

    found: set[TemporalProperty] = set()
    for _, first, landing in labeled:
        for reachable in reach.reaches(landing):
            for second in by_source.get(reachable, ()):
                found.add(TemporalProperty(first, second))
    return PropertySet(source=model.source, properties=frozenset(found))


def sorted_properties(properties: Iterable[TemporalProperty]) -> list[TemporalProperty]:
    return sorted(properties)


def format_properties(properties: Iterable[TemporalProperty]) -> str:
    """One property per line, canonically ordered."""
    return "\n".join(p.display for p in sorted_properties(properties))


def properties_to_dot(
    properties: Iterable[TemporalProperty],
    missing: Iterable[TemporalProperty] = (),
    title: str = "temporal properties",
) -> str:
    """Property digraph in DOT: one node per block, one edge per property.

    Properties listed in `missing` (a subset of `properties`) are drawn red
    and dotted; a block that only occurs in missing properties gets a red
    node as well. Used both for plain property sets and for violation
    reports where the missing part is the deviation.
    """
    props_list = sorted_properties(properties)
    missing_set = frozenset(missing)
    present_labels: set[BlockLabel] = set()
    all_labels: set[BlockLabel] = set()
    for p in props_list:
        all_labels.update((p.first, p.second))
        if p not in missing_set:
            present_labels.update((p.first, p.second))

    def node_id(label: BlockLabel) -> str:
        safe = "".join(c if c.isalnum() else "_" for c in label.key())
        return f"b_{safe}"

    lines = [f"digraph {_quote(title)} {{"]
    lines.append("  rankdir=LR;")
    lines.append('  node [shape=box, style=rounded, fontname="Helvetica"];')
    for label in sorted(all_labels):
        attrs = f"label={_quote(label.display)}"
        if label not in present_labels:
            attrs += ', color="red", fontcolor="red", style="rounded,dotted"'
        lines.append(f"  {node_id(label)} [{attrs}];")
    for p in props_list:
        attrs = ""
        if p in missing_set:
            attrs = ' [color="red", style=dotted]'
        lines.append(f"  {node_id(p.first)} -> {node_id(p.second)}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def property_to_document(prop: TemporalProperty) -> dict:
    """JSON-ready rendering of one property."""
    return {
        "first": prop.first.key(),
        "second": prop.second.key(),
        "text": prop.display,
    }
