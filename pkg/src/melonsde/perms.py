"""Permutations of {1..k} as 1-based image tuples."""

from __future__ import annotations

from itertools import permutations as _sym

Perm = tuple[int, ...]


def identity(k: int) -> Perm:
    return tuple(range(1, k + 1))


def compose(p: Perm, q: Perm) -> Perm:
    """p after q: (p*q)(i) = p(q(i))."""
    return tuple(p[q[i] - 1] for i in range(len(q)))


def invert(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, img in enumerate(p, 1):
        inv[img - 1] = i
    return tuple(inv)


def transposition(k: int, a: int, b: int) -> Perm:
    im = list(range(1, k + 1))
    im[a - 1], im[b - 1] = b, a
    return tuple(im)


def from_cycle(k: int, cycle: tuple[int, ...]) -> Perm:
    im = list(range(1, k + 1))
    for i, v in enumerate(cycle):
        im[v - 1] = cycle[(i + 1) % len(cycle)]
    return tuple(im)


def cycle_count(p: Perm) -> int:
    seen = [False] * len(p)
    n = 0
    for i in range(len(p)):
        if not seen[i]:
            n += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = p[j] - 1
    return n


def symmetric_group(k: int):
    """All permutations of {1..k} as image tuples."""
    for images in _sym(range(1, k + 1)):
        yield images


def is_permutation(p) -> bool:
    return sorted(p) == list(range(1, len(p) + 1))
