"""Independent reference implementations the optimized code is tested against.

These are deliberately naive: exhaustive enumeration instead of pruning,
determinization instead of structural comparison. They are slow but easy
to audit, which is the point.
"""

from __future__ import annotations

import random
from itertools import combinations

from blockmine import BlockLabel, ScriptModel, ScriptSource, TemporalProperty


def brute_force_closed(
    transactions: list[frozenset], min_support: int
) -> set[tuple[frozenset, int]]:
    """All nonempty closed itemsets with their supports, by enumerating the
    intersection of every nonempty subset of transactions.

    An itemset is closed exactly when it equals the intersection of the
    transactions that contain it, so the closed itemsets with support >= 1
    are precisely the nonempty-subset intersections.
    """
    intersections: set[frozenset] = set()
    for r in range(1, len(transactions) + 1):
        for combo in combinations(range(len(transactions)), r):
            inter = frozenset.intersection(*(transactions[i] for i in combo))
            if inter:
                intersections.add(inter)
    result = set()
    for itemset in intersections:
        supp = sum(1 for t in transactions if itemset <= t)
        if supp >= min_support:
            result.add((itemset, supp))
    return result


def random_mining_instance(
    rng: random.Random, max_transactions: int = 12, universe_size: int = 8
):
    """A random transaction list over a small property universe, plus a
    random support threshold (sometimes larger than the list)."""
    universe = [
        TemporalProperty(BlockLabel(f"op_{chr(97 + i)}"), BlockLabel(f"op_{chr(97 + j)}"))
        for i in range(universe_size)
        for j in range(universe_size)
    ][:universe_size]
    n = rng.randint(1, max_transactions)
    transactions = []
    for _ in range(n):
        size = rng.randint(0, universe_size)
        transactions.append(frozenset(rng.sample(universe, size)))
    min_support = rng.randint(1, n + 1)
    return transactions, min_support


def dummy_sources(n: int) -> list[ScriptSource]:
    return [
        ScriptSource(
            project_id=f"project_{i:03d}",
            actor_name="Sprite",
            script_index=0,
            root_block="b1",
        )
        for i in range(n)
    ]


def random_epsilon_model(rng: random.Random, max_locations: int = 12) -> ScriptModel:
    """A random model with epsilon moves, fully reachable from the entry.

    Reachability is guaranteed by a random spanning tree; extra edges
    (labeled or epsilon) are sprinkled on top.
    """
    n = rng.randint(2, max_locations)
    labels: list[BlockLabel | None] = [
        BlockLabel("op_a"), BlockLabel("op_b"), BlockLabel("op_c"), BlockLabel("op_d"),
        None, None,
    ]
    transitions: set[tuple[int, BlockLabel | None, int]] = set()
    for i in range(1, n):
        transitions.add((rng.randrange(i), rng.choice(labels), i))
    for _ in range(rng.randint(0, n)):
        transitions.add((rng.randrange(n), rng.choice(labels), rng.randrange(n)))
    n_exits = rng.randint(0, min(2, n))
    exits = frozenset(rng.sample(range(n), n_exits))
    return ScriptModel(
        entry=0, exits=exits, transitions=frozenset(transitions), source=None
    )


def label_path_language(model: ScriptModel, depth: int) -> frozenset[tuple]:
    """All label sequences of length <= depth readable from the entry,
    treating epsilon moves as free. Computed by determinizing on the fly."""
    eps_next: dict[int, set[int]] = {}
    for src, label, dst in model.transitions:
        if label is None:
            eps_next.setdefault(src, set()).add(dst)

    def closure(locations: set[int]) -> frozenset[int]:
        seen = set(locations)
        frontier = list(locations)
        while frontier:
            node = frontier.pop()
            for nxt in eps_next.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return frozenset(seen)

    language: set[tuple] = {()}
    frontier_sets: dict[tuple, frozenset[int]] = {(): closure({model.entry})}
    for _ in range(depth):
        next_frontier: dict[tuple, set[int]] = {}
        for word, locations in frontier_sets.items():
            by_label: dict[BlockLabel, set[int]] = {}
            for src, label, dst in model.transitions:
                if label is not None and src in locations:
                    by_label.setdefault(label, set()).add(dst)
            for label, dsts in by_label.items():
                extended = word + (label,)
                language.add(extended)
                next_frontier.setdefault(extended, set()).update(closure(dsts))
        frontier_sets = {w: frozenset(s) for w, s in next_frontier.items()}
    return frozenset(language)
