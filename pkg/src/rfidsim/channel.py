"""Ideal additive superposition channel and the slotted outcome model."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .core import Population, TagId, decode_signs


class AnswerVector:
    """Per-position integer sums of the ±1 signals of every responder.

    Immutable. Supports ``+`` and ``-`` elementwise; compares equal to
    another AnswerVector or to any sequence with the same entries.
    """

    __slots__ = ("values", "prefix_enabled")

    def __init__(self, values, prefix_enabled: bool = False):
        arr = np.array(values, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("answer vectors are one-dimensional")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "prefix_enabled", bool(prefix_enabled))

    def __setattr__(self, name, value):
        raise AttributeError("AnswerVector is immutable")

    @property
    def responder_count_hint(self) -> int | None:
        """The prefix entry, which equals the responder count when enabled."""
        return int(self.values[0]) if self.prefix_enabled and len(self) else None

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, i):
        return int(self.values[i])

    def __iter__(self):
        return (int(v) for v in self.values)

    def _check_len(self, other: AnswerVector):
        if len(other) != len(self):
            raise ValueError(f"answer length mismatch: {len(self)} vs {len(other)}")

    def __add__(self, other: AnswerVector) -> AnswerVector:
        self._check_len(other)
        return AnswerVector(self.values + other.values, self.prefix_enabled)

    def __sub__(self, other: AnswerVector) -> AnswerVector:
        self._check_len(other)
        return AnswerVector(self.values - other.values, self.prefix_enabled)

    def __eq__(self, other) -> bool:
        if isinstance(other, AnswerVector):
            return np.array_equal(self.values, other.values)
        try:
            return len(other) == len(self) and all(
                int(a) == int(b) for a, b in zip(self.values, other)
            )
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(tuple(self))

    def __repr__(self) -> str:
        return f"AnswerVector({list(self)})"

    def render(self) -> str:
        """Space-separated entries, prefix entry split off with ``|``."""
        body = " ".join(str(v) for v in self)
        if self.prefix_enabled and len(self):
            head, _, rest = body.partition(" ")
            return f"{head} | {rest}" if rest else head
        return body

    def max_abs(self) -> int:
        return int(np.abs(self.values).max()) if len(self) else 0


def superpose(
    responders: Iterable[Sequence[int]], width: int | None = None, prefix_enabled=False
) -> AnswerVector:
    """Sum the signal forms of all responders position by position.

    ``width`` is needed only to shape the answer of an empty responder set.
    """
    rows = [tuple(r) for r in responders]
    if not rows:
        if width is None:
            raise ValueError("width is required for an empty responder set")
        return AnswerVector(np.zeros(width, dtype=np.int64), prefix_enabled)
    lengths = {len(r) for r in rows}
    if len(lengths) != 1 or (width is not None and lengths != {width}):
        raise ValueError(f"responders have mixed lengths {sorted(lengths)}")
    return AnswerVector(np.array(rows, dtype=np.int64).sum(axis=0), prefix_enabled)


def decode_if_singleton(answer: AnswerVector, prefix_enabled: bool) -> TagId | None:
    """Return the ID carried by ``answer`` if it looks like a lone response.

    With the prefix on, the prefix entry counts the responders exactly, so
    this never misfires. With it off, any all-±1 vector decodes, which lets
    an odd-sized collision masquerade as a tag that is not there.
    """
    if len(answer) == 0:
        return None
    if prefix_enabled:
        if answer[0] != 1 or len(answer) < 2:
            return None
    elif not all(v in (-1, 1) for v in answer):
        return None
    return decode_signs(list(answer), prefix_enabled)


class SlotKind(str, Enum):
    IDLE = "idle"
    SINGLE = "single"
    COLLISION = "collision"


@dataclass(frozen=True)
class SlotOutcome:
    kind: SlotKind
    identified: TagId | None = None

    def __post_init__(self):
        if (self.kind is SlotKind.SINGLE) != (self.identified is not None):
            raise ValueError("identified is set exactly for single slots")


def classify_slot(responder_count: int, sole_tag: TagId | None = None) -> SlotOutcome:
    if responder_count < 0:
        raise ValueError("responder_count must be non-negative")
    if (responder_count == 1) != (sole_tag is not None):
        raise ValueError("sole_tag must be given exactly when one tag responds")
    if responder_count == 0:
        return SlotOutcome(SlotKind.IDLE)
    if responder_count == 1:
        return SlotOutcome(SlotKind.SINGLE, sole_tag)
    return SlotOutcome(SlotKind.COLLISION)


class SuperpositionChannel:
    """A reader's view of one population over the ideal channel.

    Every :meth:`broadcast` is one reader query: each tag whose signal
    matches the mask replies, and the reader gets the sum. The channel
    keeps the query and bit counters; the reader never sees who replied.
    """

    def __init__(self, population: Population, prefix_enabled: bool = True):
        self.population = population
        self.prefix_enabled = prefix_enabled
        self.signals = np.ascontiguousarray(population.signals(prefix_enabled))
        self.width = self.signals.shape[1]
        self.queries = 0
        self.transmissions = 0

    def broadcast(self, mask: np.ndarray) -> AnswerVector:
        mask = np.ascontiguousarray(mask, dtype=np.int8)
        out = np.zeros(self.width, dtype=np.int64)
        count, _ = kernels.respond(self.signals, mask, out)
        self.queries += 1
        self.transmissions += count
        return AnswerVector(out, self.prefix_enabled)


class SlottedChannel:
    """Collision/no-collision channel used by the classical baselines."""

    def __init__(self, population: Population):
        self.population = population
        self.slots = 0
        self.transmissions = 0

    def slot(self, responders: Sequence[int]) -> SlotOutcome:
        """Resolve one slot given the indices of the transmitting tags."""
        return self.resolve(len(responders), responders[0] if responders else -1)

    def resolve(self, count: int, first: int) -> SlotOutcome:
        """Resolve one slot from a responder count and the first responder."""
        self.slots += 1
        self.transmissions += count
        sole = self.population.tags[first] if count == 1 else None
        return classify_slot(count, sole)
