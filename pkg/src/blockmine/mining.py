"""Closed frequent pattern mining over script property sets.

Each script is a transaction whose items are its temporal properties. A
pattern is frequent when at least `min_support` scripts contain all of its
properties, and closed when no strict superset has the same support.
Mining only closed patterns loses nothing - every frequent pattern's
support is that of its closure - while keeping reports free of redundant
subsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidConfig
from .ingest import ScriptSource
from .properties import PropertySet, TemporalProperty


def _as_fraction(value: Fraction | float | int | str) -> Fraction:
    """Exact rational from user input; floats go through their decimal text
    so that 0.9 means nine tenths, not the nearest binary double."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class MiningConfig:
    """Detection parameters; defaults follow the standard classroom setting."""

    min_support: int = 20
    min_pattern_size: int = 2
    max_deviation_level: int = 10000
    min_confidence: Fraction = Fraction(9, 10)

    def __post_init__(self) -> None:
        if not isinstance(self.min_support, int) or self.min_support < 1:
            raise InvalidConfig(f"min_support must be a positive integer, got {self.min_support!r}")
        if not isinstance(self.min_pattern_size, int) or self.min_pattern_size < 1:
            raise InvalidConfig(
                f"min_pattern_size must be a positive integer, got {self.min_pattern_size!r}"
            )
        if not isinstance(self.max_deviation_level, int) or self.max_deviation_level < 1:
            raise InvalidConfig(
                f"max_deviation_level must be a positive integer, got {self.max_deviation_level!r}"
            )
        try:
            confidence = _as_fraction(self.min_confidence)
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise InvalidConfig(f"min_confidence is not a number: {self.min_confidence!r}") from exc
        if not 0 < confidence <= 1:
            raise InvalidConfig(f"min_confidence must lie in (0, 1], got {confidence}")
        object.__setattr__(self, "min_confidence", confidence)


# Default parameters for a full-size course, and the documented preset for
# small courses with few solutions per task. Presets are only ever applied
# when asked for; nothing adapts thresholds behind the user's back.
STANDARD_CONFIG = MiningConfig()
SMALL_CLASS_CONFIG = MiningConfig(min_support=10, min_confidence=Fraction(7, 10))
PRESETS = {"standard": STANDARD_CONFIG, "small-class": SMALL_CLASS_CONFIG}


@dataclass(frozen=True)
class Pattern:
    """A closed frequent set of temporal properties."""

    properties: frozenset[TemporalProperty]
    support: int
    supporters: frozenset[ScriptSource]

    @property
    def size(self) -> int:
        return len(self.properties)

    def sort_key(self) -> tuple:
        return (
            -self.support,
            -len(self.properties),
            tuple(sorted(self.properties)),
        )


def support(properties: Iterable[TemporalProperty], property_sets: Sequence[PropertySet]) -> int:
    """Number of scripts whose property set contains all given properties."""
    wanted = frozenset(properties)
    return sum(1 for ps in property_sets if wanted <= ps.properties)


def mine_closed_patterns(
    property_sets: Sequence[PropertySet], min_support: int
) -> list[Pattern]:
    """Mine exactly the closed patterns with support >= min_support.

    The empty pattern is never reported. Deterministic output order:
    support descending, then size descending, then property order.

    Uses closure extension over transaction-id bitmasks: a candidate built
    by adding item i to a closed set is kept only when its closure adds no
    item ordered before i, which visits every closed frequent itemset
    exactly once without storing candidates.
    """
    if min_support < 1:
        raise InvalidConfig(f"min_support must be >= 1, got {min_support}")
    n = len(property_sets)
    if n == 0:
        raise ValueError("property_sets must be nonempty")
    for ps in property_sets:
        if ps.source is None:
            raise ValueError("every PropertySet needs a source to identify supporters")
    if min_support > n:
        return []

    items: list[TemporalProperty] = sorted({p for ps in property_sets for p in ps.properties})
    index = {p: i for i, p in enumerate(items)}
    m = len(items)
    item_tids = [0] * m
    for t, ps in enumerate(property_sets):
        bit = 1 << t
        for p in ps.properties:
            item_tids[index[p]] |= bit

    all_tids = (1 << n) - 1
    k = min_support

    def closure(tidmask: int) -> frozenset[int]:
        return frozenset(i for i in range(m) if item_tids[i] & tidmask == tidmask)

    found: list[tuple[frozenset[int], int]] = []
    root = closure(all_tids)
    if root:
        found.append((root, all_tids))

    # Depth-first over prefix-preserving closure extensions.
    stack: list[tuple[frozenset[int], int, int]] = [(root, all_tids, -1)]
    while stack:
        intent, tidmask, core = stack.pop()
        for i in range(m - 1, core, -1):
            if i in intent:
                continue
            extended = item_tids[i] & tidmask
            if extended.bit_count() < k:
                continue
            new_intent = closure(extended)
            if any(j not in intent for j in new_intent if j < i):
                continue  # closure reaches back before i: seen on another branch
            found.append((new_intent, extended))
            stack.append((new_intent, extended, i))

    def supporters_of(tidmask: int) -> frozenset[ScriptSource]:
        result = []
        t = 0
        while tidmask:
            if tidmask & 1:
                source = property_sets[t].source
                assert source is not None
                result.append(source)
            tidmask >>= 1
            t += 1
        return frozenset(result)

    patterns = [
        Pattern(
            properties=frozenset(items[i] for i in intent),
            support=tidmask.bit_count(),
            supporters=supporters_of(tidmask),
        )
        for intent, tidmask in found
    ]
    patterns.sort(key=Pattern.sort_key)
    return patterns
