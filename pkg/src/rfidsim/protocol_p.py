"""Perfect tag identification by recursive max/second-max splitting.

The reader asks every tag for its ID at once and receives the sum of all
signals. Whenever the largest magnitude in an answer exceeds one, it picks
the first position holding the largest magnitude strictly below that
maximum; the responders disagree there, so querying the tags with the
matching sign splits the set in two. The other half costs no query: its
answer is the parent answer minus the queried one. Every query therefore
creates exactly one new leaf, and N tags take exactly N queries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .channel import AnswerVector, SuperpositionChannel, decode_if_singleton
from .core import Population, TagId, empty_mask, mask_to_str
from .results import MASK_BITS_PER_POSITION, BitAccounting, RunResult

PROTOCOL_NAME = "P"


class ProtocolAssumptionError(RuntimeError):
    """The channel produced an answer the protocol's premises rule out.

    Raised for duplicate IDs and for prefix-off anomalies. ``node`` is the
    trace node being processed when the problem surfaced, if tracing.
    """

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NoSplitError(ProtocolAssumptionError):
    """Every position ties at the maximum magnitude, so nothing splits."""


class TraceStructureError(ValueError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NodeKind(str, Enum):
    ROOT = "root"
    QUERIED_LEFT = "queried-left"
    DERIVED_RIGHT = "derived-right"


@dataclass(frozen=True)
class SplitDecision:
    m1: int
    p1: int
    m2: int
    p2: int
    s2: int

    def __post_init__(self):
        if not self.m1 > self.m2 >= 0:
            raise ValueError(f"need m1 > m2 >= 0, got m1={self.m1}, m2={self.m2}")
        if self.s2 not in (-1, 1):
            raise ValueError("s2 must be -1 or +1")


@dataclass(eq=False)
class TraceNode:
    kind: NodeKind
    mask: np.ndarray
    answer: AnswerVector
    depth: int = 0
    decision: SplitDecision | None = None
    children: list[TraceNode] = field(default_factory=list)
    identified: TagId | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self):
        """Pre-order traversal, left child before right."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


@dataclass(frozen=True)
class TreeStats:
    nodes: int
    leaves: int
    internal: int
    max_depth: int
    queried_left_count: int

    @property
    def queries(self) -> int:
        # one broadcast per queried-left edge plus the root broadcast
        return self.queried_left_count + 1


def select_split(answer) -> SplitDecision:
    """Choose the position and sign of the next query for ``answer``."""
    values = np.ascontiguousarray(
        answer.values if isinstance(answer, AnswerVector) else answer, dtype=np.int64
    )
    m1, p1, m2, p2 = kernels.split_scan(values)
    if m1 < 2:
        raise ValueError(f"select_split needs a maximum magnitude >= 2, got {m1}")
    if p2 < 0:
        raise NoSplitError(
            f"all positions tie at |value| == {m1}; the responders share one ID"
        )
    s2 = 1 if values[p2] >= 0 else -1
    return SplitDecision(int(m1), int(p1), int(m2), int(p2), s2)


def subtract(answer: AnswerVector, new_answer: AnswerVector) -> AnswerVector:
    return answer - new_answer


def check(
    answer: AnswerVector,
    mask: np.ndarray,
    channel: SuperpositionChannel,
    node: TraceNode | None = None,
) -> tuple[list[TagId], int]:
    """Resolve every tag behind ``answer`` and return them with the query cost.

    ``answer`` must be the superposition of exactly the tags matching
    ``mask``. The traversal is depth first with the queried side handled
    before the derived side, so identification order is the left-to-right
    leaf order of the execution tree. ``mask`` is left untouched.
    """
    prefix = channel.prefix_enabled
    queries_before = channel.queries
    found: list[TagId] = []
    stack = [(answer, np.array(mask, dtype=np.int8), node, node.depth if node else 0)]
    while stack:
        ans, cur_mask, cur_node, depth = stack.pop()
        m1 = ans.max_abs()
        if m1 == 1:
            tag = decode_if_singleton(ans, prefix)
            if tag is None:
                raise ProtocolAssumptionError(
                    f"unit-magnitude answer {ans.render()} does not decode", cur_node
                )
            found.append(tag)
            if cur_node is not None:
                cur_node.identified = tag
            continue
        if m1 == 0:
            raise ProtocolAssumptionError(
                "all-zero answer from a non-empty responder set "
                "(complementary IDs cancel without the prefix bit)",
                cur_node,
            )
        try:
            decision = select_split(ans)
        except NoSplitError as exc:
            exc.node = cur_node
            raise
        left_mask = cur_mask.copy()
        left_mask[decision.p2] = decision.s2
        new_answer = channel.broadcast(left_mask)
        right_answer = subtract(ans, new_answer)
        right_mask = cur_mask.copy()
        right_mask[decision.p2] = -decision.s2

        left_node = right_node = None
        if cur_node is not None:
            cur_node.decision = decision
            left_mask.flags.writeable = False
            right_mask.flags.writeable = False
            left_node = TraceNode(NodeKind.QUERIED_LEFT, left_mask, new_answer, depth + 1)
            right_node = TraceNode(
                NodeKind.DERIVED_RIGHT, right_mask, right_answer, depth + 1
            )
            cur_node.children = [left_node, right_node]
        stack.append((right_answer, right_mask, right_node, depth + 1))
        stack.append((new_answer, left_mask, left_node, depth + 1))
    return found, channel.queries - queries_before


def run_protocol_p(
    population: Population, prefix_enabled: bool = True, keep_trace: bool = True
) -> RunResult:
    """Identify every tag in ``population``; fully deterministic."""
    channel = SuperpositionChannel(population, prefix_enabled)
    mask = empty_mask(channel.width)
    root_answer = channel.broadcast(mask)
    root = None
    if keep_trace:
        frozen = mask.copy()
        frozen.flags.writeable = False
        root = TraceNode(NodeKind.ROOT, frozen, root_answer, 0)

    if prefix_enabled and root_answer[0] == 0:
        identified: list[TagId] = []
    else:
        identified, _ = check(root_answer, mask, channel, root)

    width = channel.width
    bits = BitAccounting(
        reader_bits=channel.queries * MASK_BITS_PER_POSITION * width,
        tag_bits=channel.transmissions * width,
    )
    return RunResult(
        protocol=PROTOCOL_NAME,
        population_size=len(population),
        identified=identified,
        query_count=channel.queries,
        trace=root,
        extra={"transmissions": channel.transmissions},
        bits=bits,
    )


def verify_trace(trace: TraceNode, n: int) -> TreeStats:
    """Check that ``trace`` is a full binary tree with 2n-1 nodes and n leaves."""
    if trace.kind is not NodeKind.ROOT:
        raise TraceStructureError("trace must start at a root node", trace)
    nodes = leaves = internal = queried_left = max_depth = 0
    for node in trace.walk():
        nodes += 1
        max_depth = max(max_depth, node.depth)
        if len(node.children) not in (0, 2):
            raise TraceStructureError(
                f"node at depth {node.depth} has {len(node.children)} children", node
            )
        if node.children:
            internal += 1
            left, right = node.children
            if left.kind is not NodeKind.QUERIED_LEFT:
                raise TraceStructureError("left child is not a queried node", left)
            if right.kind is not NodeKind.DERIVED_RIGHT:
                raise TraceStructureError("right child is not a derived node", right)
            if left.depth != node.depth + 1 or right.depth != node.depth + 1:
                raise TraceStructureError("child depth out of step", node)
            queried_left += 1
            if node.identified is not None:
                raise TraceStructureError("internal node carries an identified ID", node)
        else:
            leaves += 1
            if node.identified is None and n > 0:
                raise TraceStructureError("leaf without an identified ID", node)
    stats = TreeStats(nodes, leaves, internal, max_depth, queried_left)
    if n == 0:
        if nodes != 1 or trace.identified is not None:
            raise TraceStructureError("empty run must leave a bare root", trace)
        return stats
    if nodes != 2 * n - 1:
        raise TraceStructureError(f"{nodes} nodes, expected {2 * n - 1}", trace)
    if leaves != n:
        raise TraceStructureError(f"{leaves} leaves, expected {n}", trace)
    if queried_left != n - 1:
        raise TraceStructureError(
            f"{queried_left} queried edges, expected {n - 1}", trace
        )
    return stats


def serialize_trace(trace: TraceNode) -> str:
    """One node per line, pre-order: depth, kind, mask, answer, ID or ``-``."""
    lines = []
    for node in trace.walk():
        answer = ",".join(str(v) for v in node.answer)
        ident = str(node.identified) if node.identified is not None else "-"
        lines.append(
            f"{node.depth}\t{node.kind.value}\t{mask_to_str(node.mask)}\t{answer}\t{ident}"
        )
    return "\n".join(lines) + "\n"
