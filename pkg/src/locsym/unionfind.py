"""Disjoint-set forest over arbitrary hashable items."""

from __future__ import annotations

from typing import Hashable, Iterable


class DisjointSet:
    """Union-find with path halving.

    ``union`` keeps the root that was added first, so when items are added in
    a chosen order every class is represented by its earliest member.
    """

    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent: dict = {}
        self.order: dict = {}
        for item in items:
            self.add(item)

    def add(self, item: Hashable) -> None:
        if item not in self.parent:
            self.parent[item] = item
            self.order[item] = len(self.order)

    def find(self, item: Hashable) -> Hashable:
        parent = self.parent
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a: Hashable, b: Hashable) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.order[rb] < self.order[ra]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def same(self, a: Hashable, b: Hashable) -> bool:
        return self.find(a) == self.find(b)

    def classes(self) -> list[list]:
        """Classes in order of their first member; members in insertion order."""
        groups: dict = {}
        for item in self.parent:
            groups.setdefault(self.find(item), []).append(item)
        return sorted(groups.values(), key=lambda g: self.order[g[0]])
