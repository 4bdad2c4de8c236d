"""Pure-Python interval kernels.

Every function takes parallel integer sequences (``array('q')`` or lists)
of resolved interval bounds.  An interval with ``end < start`` is empty.
"""

from __future__ import annotations


def _order(groups, starts, ends) -> list[int]:
    return sorted(range(len(starts)), key=lambda i: (groups[i], starts[i], ends[i], i))


def contains_point(starts, ends, t: int) -> list[int]:
    """Indices of intervals containing ``t``, ascending."""
    return [i for i in range(len(starts)) if starts[i] <= t <= ends[i]]


def overlapping(starts, ends, lo: int, hi: int) -> list[int]:
    """Indices of non-empty intervals sharing at least one point with ``[lo, hi]``."""
    return [
        i
        for i in range(len(starts))
        if starts[i] <= ends[i] and max(starts[i], lo) <= min(ends[i], hi)
    ]


def overlap_pairs(groups, starts, ends) -> list[tuple[int, int]]:
    """All pairs ``(i, j)``, ``i < j``, in one group whose intervals intersect."""
    order = _order(groups, starts, ends)
    n = len(order)
    pairs = []
    for a in range(n):
        i = order[a]
        if starts[i] > ends[i]:
            continue
        g, e = groups[i], ends[i]
        for b in range(a + 1, n):
            j = order[b]
            if groups[j] != g or starts[j] > e:
                break
            if starts[j] <= ends[j]:
                pairs.append((i, j) if i < j else (j, i))
    pairs.sort()
    return pairs


def coalesce_runs(groups, starts, ends) -> tuple[list[int], list[int], list[int]]:
    """Merge overlapping or adjacent intervals within each group.

    Returns ``(run_of, run_starts, run_ends)``: ``run_of[i]`` is the run that
    input ``i`` belongs to; runs are numbered in (group, start) order.  Empty
    intervals form singleton runs and never extend a neighbour.
    """
    order = _order(groups, starts, ends)
    run_of = [0] * len(order)
    run_starts: list[int] = []
    run_ends: list[int] = []
    current = -1
    current_group = None
    current_end = 0
    for i in order:
        s, e = starts[i], ends[i]
        if s > e:
            run_of[i] = len(run_starts)
            run_starts.append(s)
            run_ends.append(e)
            continue
        if current >= 0 and groups[i] == current_group and s <= current_end + 1:
            if e > current_end:
                current_end = e
                run_ends[current] = e
        else:
            current = len(run_starts)
            current_group = groups[i]
            current_end = e
            run_starts.append(s)
            run_ends.append(e)
        run_of[i] = current
    return run_of, run_starts, run_ends
