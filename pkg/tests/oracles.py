"""Independent reference computations for the test suite.

Nothing here imports the package's channel, kernels or protocol code: the
superposition is recomputed with plain loops from the known tag list, and
the expectations come from closed recurrences.
"""

from functools import lru_cache
from math import comb


def signal(bits: str, prefix: bool) -> list[int]:
    body = [1 if c == "1" else -1 for c in bits]
    return [1] + body if prefix else body


def brute_match(sig, mask) -> bool:
    return all(m == 0 or s == m for s, m in zip(sig, mask))


def brute_superpose(ids, mask, prefix: bool) -> list[int]:
    width = len(mask)
    total = [0] * width
    for t in ids:
        sig = signal(t, prefix)
        if brute_match(sig, mask):
            for i in range(width):
                total[i] += sig[i]
    return total


def literal_protocol_p(ids, prefix=True):
    """Straight recursive transcription of the reader procedure.

    Returns ``(identified, queries, nodes)`` where ``nodes`` lists
    ``(depth, kind, mask, answer)`` in pre-order.
    """
    ids = list(ids)
    k = len(ids[0]) if ids else 0
    width = k + (1 if prefix else 0)
    mask = [0] * width
    identified, nodes = [], []
    queries = 0

    def broadcast():
        nonlocal queries
        queries += 1
        return brute_superpose(ids, mask, prefix)

    def check(answer, depth, kind):
        nodes.append((depth, kind, tuple(mask), tuple(answer)))
        m1 = max(abs(v) for v in answer)
        if m1 == 1:
            body = answer[1:] if prefix else answer
            identified.append("".join("1" if v > 0 else "0" for v in body))
            return
        below = [abs(v) for v in answer if abs(v) < m1]
        m2 = max(below)
        p2 = [abs(v) for v in answer].index(m2)
        s2 = 1 if answer[p2] >= 0 else -1
        mask[p2] = s2
        new = broadcast()
        check(new, depth + 1, "queried-left")
        mask[p2] = -s2
        check([a - b for a, b in zip(answer, new)], depth + 1, "derived-right")
        mask[p2] = 0

    root = broadcast()
    if ids:
        check(root, 0, "root")
    return identified, queries, nodes


def literal_query_tree(ids):
    """Breadth-first prefix queries; returns the list of prefixes queried."""
    queue, asked, found = [""], [], []
    while queue:
        p = queue.pop(0)
        asked.append(p)
        hits = [t for t in ids if t.startswith(p)]
        if len(hits) == 1:
            found.append(hits[0])
        elif len(hits) > 1:
            queue += [p + "0", p + "1"]
    return asked, found


@lru_cache(maxsize=None)
def expected_tree_slots(n: int) -> float:
    """Expected slots for a fair random binary split tree over ``n`` tags.

    Covers Query Tree on uniform random IDs (long enough that prefixes never
    run out) and counter-based binary splitting: a collision splits the set
    by fair coin, an empty side costs one idle slot.
    """
    if n <= 1:
        return 1.0
    half = 0.5**n
    rest = sum(
        comb(n, k) * half * (expected_tree_slots(k) + expected_tree_slots(n - k))
        for k in range(1, n)
    )
    # k = 0 and k = n both yield an idle child plus the same n-tag subtree
    return (1 + rest + 2 * half * 1.0) / (1 - 2 * half)


def singleton_distributions(max_tags: int, frame: int) -> list[list[float]]:
    """``dist[m][s]``: probability that ``m`` tags in ``frame`` slots leave ``s`` singles.

    Tags are dropped one at a time, tracking (slots holding one tag, slots
    holding several).
    """
    state = {(0, 0): 1.0}
    out = [[1.0]]
    for _ in range(max_tags):
        nxt: dict = {}
        for (a, b), p in state.items():
            empty = frame - a - b
            if empty:
                key = (a + 1, b)
                nxt[key] = nxt.get(key, 0.0) + p * empty / frame
            if a:
                key = (a - 1, b + 1)
                nxt[key] = nxt.get(key, 0.0) + p * a / frame
            if b:
                nxt[(a, b)] = nxt.get((a, b), 0.0) + p * b / frame
        state = nxt
        dist = [0.0] * (max(a for a, _ in state) + 1)
        for (a, _), p in state.items():
            dist[a] += p
        out.append(dist)
    return out


def expected_fsa_cycles(n: int, frame: int) -> float:
    """Expected read cycles of fixed-frame slotted Aloha until ``n`` tags are read."""
    dist = singleton_distributions(n, frame)
    cycles = [0.0] * (n + 1)
    for m in range(1, n + 1):
        d = dist[m]
        acc = 1.0 + sum(d[s] * cycles[m - s] for s in range(1, len(d)))
        cycles[m] = acc / (1.0 - d[0])
    return cycles[n]
