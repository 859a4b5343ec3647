"""Tag identifiers, signal encodings, masks and population generation."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEFAULT_K = 96


class TagParseError(ValueError):
    """A tag ID string contains something other than '0' and '1'."""


class TagLengthError(ValueError):
    """A tag ID does not have the configured bit length."""


class CapacityError(ValueError):
    """More distinct IDs were requested than the ID space holds."""


class DuplicateTagError(ValueError):
    """A population file or constructor was given the same ID twice."""


@dataclass(frozen=True, order=True)
class TagId:
    """A fixed-length binary identifier, most significant bit first."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 1:
            raise TagLengthError("tag IDs need at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise TagParseError(f"bits must be 0/1, got {self.bits!r}")

    @property
    def k(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def __repr__(self) -> str:
        return f"TagId({str(self)!r})"

    def to_int(self) -> int:
        return int(str(self), 2)

    @classmethod
    def from_int(cls, value: int, k: int) -> TagId:
        if not 0 <= value < (1 << k):
            raise TagLengthError(f"{value} does not fit in {k} bits")
        return cls(tuple((value >> (k - 1 - i)) & 1 for i in range(k)))


def make_tag_id(text: str, k: int | None = None) -> TagId:
    """Parse a 0/1 string into a :class:`TagId`.

    ``k`` defaults to the length of ``text``; pass it to enforce a
    configured ID length.
    """
    text = text.strip()
    bad = set(text) - {"0", "1"}
    if bad:
        raise TagParseError(f"invalid symbol(s) {sorted(bad)} in tag ID {text!r}")
    if k is not None and len(text) != k:
        raise TagLengthError(f"tag ID {text!r} has {len(text)} bits, expected {k}")
    if not text:
        raise TagLengthError("empty tag ID")
    return TagId(tuple(1 if c == "1" else 0 for c in text))


def encode_signal(tag: TagId, prefix_enabled: bool = True) -> tuple[int, ...]:
    """Map bit 1 to +1 and bit 0 to -1, optionally prepending a +1 prefix."""
    symbols = tuple(1 if b else -1 for b in tag.bits)
    return (1,) + symbols if prefix_enabled else symbols


def decode_signs(values: Sequence[int], prefix_enabled: bool) -> TagId:
    """Sign-decode a vector back to a TagId (non-negative reads as 1)."""
    body = values[1:] if prefix_enabled else values
    return TagId(tuple(1 if v >= 0 else 0 for v in body))


def matches(signal: Sequence[int], mask: Sequence[int]) -> bool:
    if len(signal) != len(mask):
        raise ValueError(f"signal length {len(signal)} != mask length {len(mask)}")
    return all(m == 0 or s == m for s, m in zip(signal, mask))


def empty_mask(width: int) -> np.ndarray:
    return np.zeros(width, dtype=np.int8)


def mask_to_str(mask: Iterable[int]) -> str:
    """Render a ternary mask over ``+``, ``-`` and ``.``."""
    return "".join("+" if m > 0 else "-" if m < 0 else "." for m in mask)


def mask_from_str(text: str) -> np.ndarray:
    lookup = {"+": 1, "-": -1, ".": 0}
    try:
        return np.array([lookup[c] for c in text], dtype=np.int8)
    except KeyError as exc:
        raise ValueError(f"mask symbol {exc.args[0]!r} not in '+-.'") from None


@dataclass(frozen=True)
class Population:
    """A set of distinct, equal-length tag IDs.

    Order is kept (it is the generation order) but plays no role in any
    protocol result; equality is set equality. ``strict=False`` admits
    repeated IDs, to simulate cloned tags in the field.
    """

    tags: tuple[TagId, ...]
    k: int = DEFAULT_K
    strict: bool = field(default=True, compare=False)
    _signals: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.tags:
            object.__setattr__(self, "k", self.tags[0].k)
        for t in self.tags:
            if t.k != self.k:
                raise TagLengthError(f"mixed ID lengths {t.k} and {self.k}")
        if self.strict and len(set(self.tags)) != len(self.tags):
            raise DuplicateTagError("population IDs must be pairwise distinct")

    @classmethod
    def from_strings(
        cls, ids: Iterable[str], k: int | None = None, strict: bool = True
    ) -> Population:
        tags = tuple(make_tag_id(s, k) for s in ids)
        return cls(tags, k if k is not None else (tags[0].k if tags else DEFAULT_K), strict)

    def __len__(self) -> int:
        return len(self.tags)

    def __iter__(self):
        return iter(self.tags)

    def __contains__(self, tag) -> bool:
        return tag in self.as_set()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Population):
            return NotImplemented
        return self.k == other.k and self.as_set() == other.as_set()

    def __hash__(self) -> int:
        return hash((self.k, self.as_set()))

    def as_set(self) -> frozenset[TagId]:
        return frozenset(self.tags)

    def signals(self, prefix_enabled: bool = True) -> np.ndarray:
        """Read-only ``(N, width)`` int8 matrix of encoded signals."""
        cached = self._signals.get(prefix_enabled)
        if cached is None:
            width = self.k + (1 if prefix_enabled else 0)
            cached = np.empty((len(self.tags), width), dtype=np.int8)
            for i, t in enumerate(self.tags):
                cached[i] = encode_signal(t, prefix_enabled)
            cached.flags.writeable = False
            self._signals[prefix_enabled] = cached
        return cached


class Distribution(str, Enum):
    UNIFORM = "uniform"
    SEQUENTIAL = "sequential"
    CLUSTERED = "clustered"


@dataclass(frozen=True)
class PopulationSpec:
    n: int
    k: int = DEFAULT_K
    distribution: Distribution = Distribution.UNIFORM
    seed: int = 0
    shared_prefix: int = 8  # only used by the clustered distribution

    def __post_init__(self):
        object.__setattr__(self, "distribution", Distribution(self.distribution))
        if self.k < 1:
            raise TagLengthError("k must be at least 1")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.distribution is Distribution.CLUSTERED and not (
            0 <= self.shared_prefix <= self.k
        ):
            raise ValueError("shared_prefix must lie in [0, k]")
        if self.n > self.capacity:
            raise CapacityError(
                f"cannot draw {self.n} distinct IDs from a space of {self.capacity}"
            )

    @property
    def capacity(self) -> int:
        free = self.k
        if self.distribution is Distribution.CLUSTERED:
            free -= self.shared_prefix
        return 1 << free


def _random_ints(rng: np.random.Generator, bits: int, n: int) -> list[int]:
    # 32-bit chunks keep this exact for any bit length
    words = -(-bits // 32)
    if words == 0:
        return [0] * n
    chunks = rng.integers(0, 1 << 32, size=(n, words), dtype=np.uint64)
    out = []
    for row in chunks:
        v = 0
        for w in row:
            v = (v << 32) | int(w)
        out.append(v >> (words * 32 - bits))
    return out


def _distinct_random(rng: np.random.Generator, bits: int, n: int) -> list[int]:
    space = 1 << bits
    if bits <= 24 and 2 * n >= space:
        # dense request: rejection sampling would crawl
        return [int(v) for v in rng.choice(space, size=n, replace=False)]
    seen: dict[int, None] = {}
    while len(seen) < n:
        for v in _random_ints(rng, bits, n - len(seen)):
            seen.setdefault(v, None)
    return list(seen)


def generate_population(spec: PopulationSpec) -> Population:
    """Draw ``spec.n`` distinct IDs. Same spec, same population."""
    rng = np.random.default_rng(spec.seed)
    k = spec.k
    if spec.n == 0:
        return Population((), k)
    if spec.distribution is Distribution.UNIFORM:
        values = _distinct_random(rng, k, spec.n)
    elif spec.distribution is Distribution.SEQUENTIAL:
        base = _random_ints(rng, k, 1)[0]
        values = [(base + i) % (1 << k) for i in range(spec.n)]
    else:
        free = k - spec.shared_prefix
        head = _random_ints(rng, spec.shared_prefix, 1)[0] << free
        values = [head | v for v in _distinct_random(rng, free, spec.n)]
    return Population(tuple(TagId.from_int(v, k) for v in values), k)


def load_population(path: str | Path, k: int | None = None) -> Population:
    """Read one 0/1 ID per line; blank lines and ``#`` comments are skipped."""
    ids = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line in seen:
                raise DuplicateTagError(f"{path}:{lineno}: duplicate ID {line}")
            seen.add(line)
            tag = make_tag_id(line, k)
            if k is None:
                k = tag.k
            ids.append(tag)
    return Population(tuple(ids), k if k is not None else DEFAULT_K)


def save_population(population: Population, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {len(population)} tags, K={population.k}\n")
        for t in population:
            fh.write(f"{t}\n")
