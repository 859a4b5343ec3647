"""Result records shared by protocol P and the baselines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .core import TagId

# Each ternary mask position goes on the wire as two bits.
MASK_BITS_PER_POSITION = 2


@dataclass(frozen=True)
class BitAccounting:
    reader_bits: int = 0
    tag_bits: int = 0

    def __post_init__(self):
        if self.reader_bits < 0 or self.tag_bits < 0:
            raise ValueError("bit counts are non-negative")


@dataclass
class RunResult:
    protocol: str
    population_size: int
    identified: list[TagId]
    query_count: int
    trace: Any = None
    extra: dict[str, Any] = field(default_factory=dict)
    bits: BitAccounting = field(default_factory=BitAccounting)

    @property
    def identified_count(self) -> int:
        return len(self.identified)
