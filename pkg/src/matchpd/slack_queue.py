"""Priority queue of right vertices keyed by their best slack to the forest."""

from __future__ import annotations

import heapq


class EmptyQueue(LookupError):
    """No right vertex is reachable from the forest: there is no finite epsilon."""


class SlackQueue:
    """Min-slack queue over right vertices outside an alternating forest.

    Keys are stored shifted by the running total of uniform dual shifts, so a
    shift is O(1) and no key needs rekeying.  Decrease-key is realised by lazy
    deletion on a binary heap.  Ties are broken towards the lower index, both
    for the extracted vertex and for the witnessing even vertex.
    """

    def __init__(self):
        self._heap: list[tuple[object, int]] = []
        self._key: dict[int, object] = {}
        self._witness: dict[int, int] = {}
        self._settled: set[int] = set()
        self.offset = 0

    def __len__(self) -> int:
        return len(self._key)

    def insert_even(self, u: int, slacks) -> None:
        """Relax every ``(v, current_slack)`` pair reached from even vertex ``u``."""
        for v, s in slacks:
            if v in self._settled:
                continue
            k = s + self.offset
            old = self._key.get(v)
            if old is None or k < old or (k == old and u < self._witness[v]):
                self._key[v] = k
                self._witness[v] = u
                heapq.heappush(self._heap, (k, v))

    def key_of(self, v: int):
        return self._key[v] - self.offset

    def witness(self, v: int) -> int:
        return self._witness[v]

    def apply_uniform_shift(self, eps) -> None:
        """Lower every pending slack by ``eps`` (a dual adjustment)."""
        self.offset += eps

    def extract_min(self) -> tuple[int, object]:
        """Remove and return ``(v, current_slack)`` of minimal slack.

        Raises :class:`EmptyQueue` when nothing is pending.
        """
        while self._heap:
            k, v = heapq.heappop(self._heap)
            if self._key.get(v) == k and v not in self._settled:
                del self._key[v]
                self._settled.add(v)
                return v, k - self.offset
        raise EmptyQueue("no right vertex reachable from the forest")
