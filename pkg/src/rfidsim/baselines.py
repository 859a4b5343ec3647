"""Classical anti-collision protocols used as comparison points.

All three run on the collision/no-collision slotted channel: the reader
only learns whether a slot was idle, held one tag (which it then reads),
or collided.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .channel import SlotKind, SlottedChannel
from .core import Population, TagId
from .results import MASK_BITS_PER_POSITION, BitAccounting, RunResult

# Slot feedback (idle / single / collision) is a ternary symbol: two bits.
FEEDBACK_BITS = 2
DEFAULT_MAX_CYCLES = 10_000
DEFAULT_MAX_FRAME_SIZE = 256
BS_SAFETY_FACTOR = 10_000


class StarvationError(RuntimeError):
    """A run hit its cycle bound with tags still unidentified.

    ``partial`` holds the RunResult accumulated up to that point.
    """

    def __init__(self, message, partial: RunResult):
        super().__init__(message)
        self.partial = partial


# -- Query Tree ---------------------------------------------------------------


@dataclass
class QtState:
    pending: deque = field(default_factory=lambda: deque([""]))
    queries_issued: int = 0


def _prefix_mask(prefix: str, k: int) -> np.ndarray:
    mask = np.zeros(k, dtype=np.int8)
    for i, c in enumerate(prefix):
        mask[i] = 1 if c == "1" else -1
    return mask


def run_query_tree(population: Population) -> RunResult:
    """Query prefixes breadth first, extending every collided prefix by one bit."""
    k = population.k
    signals = np.ascontiguousarray(population.signals(prefix_enabled=False))
    channel = SlottedChannel(population)
    state = QtState()
    identified: list[TagId] = []
    idle = collisions = 0
    scratch = np.zeros(k, dtype=np.int64)
    while state.pending:
        prefix = state.pending.popleft()
        count, first = kernels.respond(signals, _prefix_mask(prefix, k), scratch)
        state.queries_issued += 1
        outcome = channel.resolve(count, first)
        if outcome.kind is SlotKind.SINGLE:
            identified.append(population.tags[first])
        elif outcome.kind is SlotKind.COLLISION:
            collisions += 1
            if len(prefix) >= k:
                raise RuntimeError(f"collision on full-length prefix {prefix}: duplicate IDs")
            state.pending.append(prefix + "0")
            state.pending.append(prefix + "1")
        else:
            idle += 1
    return RunResult(
        protocol="QT",
        population_size=len(population),
        identified=identified,
        query_count=state.queries_issued,
        extra={"idle": idle, "collisions": collisions},
        bits=BitAccounting(
            reader_bits=state.queries_issued * MASK_BITS_PER_POSITION * k,
            tag_bits=channel.transmissions * k,
        ),
    )


# -- Framed Slotted Aloha -----------------------------------------------------


class FsaMode(str, Enum):
    FIXED = "fixed"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class FsaConfig:
    frame_size: int = 128
    mode: FsaMode = FsaMode.FIXED
    seed: int = 0
    max_cycles: int = DEFAULT_MAX_CYCLES
    max_frame_size: int = DEFAULT_MAX_FRAME_SIZE

    def __post_init__(self):
        object.__setattr__(self, "mode", FsaMode(self.mode))
        if self.frame_size < 1:
            raise ValueError("frame_size must be at least 1")
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be at least 1")
        if self.max_frame_size < self.frame_size:
            raise ValueError("max_frame_size must be at least frame_size")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def run_framed_slotted_aloha(population: Population, config: FsaConfig) -> RunResult:
    """Repeat read cycles until a frame passes with nobody left unread.

    Every slot of every frame counts as one query. In dynamic mode the
    frame doubles (up to ``max_frame_size``) after a cycle in which more
    than half of the slots collided.
    """
    rng = np.random.default_rng(config.seed)
    channel = SlottedChannel(population)
    pending = list(range(len(population)))
    identified: list[TagId] = []
    frame = config.frame_size
    cycles = 0
    frames: list[int] = []
    while pending:
        if cycles >= config.max_cycles:
            partial = _fsa_result(population, channel, identified, cycles, frames)
            partial.extra["unidentified"] = len(pending)
            raise StarvationError(
                f"{len(pending)} tag(s) still unread after {cycles} cycles", partial
            )
        cycles += 1
        frames.append(frame)
        picks = rng.integers(0, frame, size=len(pending))
        by_slot: dict[int, list[int]] = {}
        for tag_index, slot in zip(pending, picks):
            by_slot.setdefault(int(slot), []).append(tag_index)
        collided = []
        n_collided_slots = 0
        for slot in range(frame):
            outcome = channel.slot(by_slot.get(slot, ()))
            if outcome.kind is SlotKind.SINGLE:
                identified.append(outcome.identified)
            elif outcome.kind is SlotKind.COLLISION:
                n_collided_slots += 1
                collided.extend(by_slot[slot])
        pending = collided
        if config.mode is FsaMode.DYNAMIC and 2 * n_collided_slots > frame:
            frame = min(2 * frame, config.max_frame_size)
    return _fsa_result(population, channel, identified, cycles, frames)


def _fsa_result(population, channel, identified, cycles, frames) -> RunResult:
    return RunResult(
        protocol="FSA",
        population_size=len(population),
        identified=list(identified),
        query_count=channel.slots,
        extra={"cycles": cycles, "frames": list(frames)},
        bits=BitAccounting(
            reader_bits=channel.slots * FEEDBACK_BITS,
            tag_bits=channel.transmissions * population.k,
        ),
    )


# -- Binary splitting ---------------------------------------------------------


@dataclass
class BsState:
    counters: dict[int, int]
    seed: int = 0


def run_binary_splitting(population: Population, seed: int = 0) -> RunResult:
    """Counter-based random binary splitting.

    Tags with counter zero transmit. After a collision each of them adds a
    random bit to its counter while every other tag adds one; after any
    slot without a collision every tag subtracts one (the lone transmitter
    is read and drops out first).
    """
    rng = np.random.default_rng(seed)
    channel = SlottedChannel(population)
    state = BsState({i: 0 for i in range(len(population))}, seed)
    identified: list[TagId] = []
    idle = collisions = 0
    bound = BS_SAFETY_FACTOR * max(len(population), 1)
    while state.counters:
        if channel.slots >= bound:
            raise RuntimeError(f"binary splitting exceeded {bound} slots")
        talkers = [i for i, c in state.counters.items() if c == 0]
        outcome = channel.slot(talkers)
        if outcome.kind is SlotKind.COLLISION:
            collisions += 1
            bits = rng.integers(0, 2, size=len(talkers))
            for i in state.counters:
                if state.counters[i] > 0:
                    state.counters[i] += 1
            for i, b in zip(talkers, bits):
                state.counters[i] = int(b)
            continue
        if outcome.kind is SlotKind.SINGLE:
            identified.append(outcome.identified)
            del state.counters[talkers[0]]
        else:
            idle += 1
        for i in state.counters:
            state.counters[i] -= 1
    return RunResult(
        protocol="BS",
        population_size=len(population),
        identified=identified,
        query_count=channel.slots,
        extra={"idle": idle, "collisions": collisions},
        bits=BitAccounting(
            reader_bits=channel.slots * FEEDBACK_BITS,
            tag_bits=channel.transmissions * population.k,
        ),
    )
