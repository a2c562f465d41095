"""Named rank-3 graph classes and exhaustive class enumeration.

The catalog fixes one representative per named class together with an
argument-order convention for its white vertices.  The 6-vertex families Q
and F are produced by registered edge-swap constructions on the melon-pillow
pair rather than hand-entered permutation data, so their codes and argument
conventions stay tied to the construction that defines them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, product

from .graphs import (
    ColoredGraph,
    GraphError,
    canonical_code,
    canonical_form,
    edge_swap,
    graph_from_dict,
    is_connected,
    join_graphs,
    make_graph,
)
from .perms import identity, invert


def melon(rank: int = 3) -> ColoredGraph:
    return make_graph(rank, [identity(1)] * rank)


def pillow(a: int, rank: int = 3) -> ColoredGraph:
    """Quartic vertex distinguished by colour a: colour a parallel, others crossing."""
    perms = []
    for c in range(1, rank + 1):
        perms.append(identity(2) if c == a else (2, 1))
    return make_graph(rank, perms)


def k33() -> ColoredGraph:
    return make_graph(3, [identity(3), (2, 3, 1), (3, 1, 2)])


def _swap_on_melon_pillow(a: int, c: int) -> ColoredGraph:
    """Colour-c swap joining the melon's black vertex to a pillow-a black vertex."""
    return edge_swap(join_graphs([melon(), pillow(a)]), c, 1, 2)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    graph: ColoredGraph  # defining representative; its white order is the name's argument order
    code: str

    def to_canonical_slots(self, args: tuple) -> tuple:
        """Reorder name-convention arguments into canonical white slots."""
        cf = canonical_form(self.graph)
        out = [None] * len(args)
        for i, arg in enumerate(args, 1):
            out[cf.white_map[i - 1] - 1] = arg
        return tuple(out)


@lru_cache(maxsize=1)
def catalog() -> dict[str, CatalogEntry]:
    entries: dict[str, CatalogEntry] = {}

    def register(name: str, graph: ColoredGraph):
        entries[name] = CatalogEntry(name, graph, canonical_code(graph))

    register("m", melon())
    for a in (1, 2, 3):
        register(f"V{a}", pillow(a))
    register("K33", k33())
    for a in (1, 2, 3):
        register(f"Q{a}", _swap_on_melon_pillow(a, a))
    for a, c in product((1, 2, 3), repeat=2):
        if a != c:
            e = 6 - a - c
            register(f"F{e};{c}{a}", _swap_on_melon_pillow(a, c))
    return entries


@lru_cache(maxsize=1)
def code_names() -> dict[str, str]:
    """Preferred display name per catalog class code."""
    out: dict[str, str] = {}
    for name, entry in catalog().items():
        if entry.code not in out or len(name) < len(out[entry.code]):
            out[entry.code] = name
    return out


def resolve_name(name: str) -> CatalogEntry:
    try:
        return catalog()[name]
    except KeyError:
        raise GraphError(f"unknown graph name {name!r}") from None


def display_name(code: str) -> str:
    return code_names().get(code, code)


def parse_word(spec: str) -> list[ColoredGraph]:
    """Parse a word like ``m|V1|K33`` into its factor graphs."""
    if not spec:
        raise GraphError("empty word spec")
    return [resolve_name(part.strip()).graph for part in spec.split("|")]


def word_from_dict(d: dict) -> list[ColoredGraph]:
    if "word" in d:
        return [resolve_name(n).graph for n in d["word"]]
    return [graph_from_dict(d)]


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def connected_classes(rank: int, k: int) -> tuple[str, ...]:
    """Codes of all connected rank-`rank` classes on 2k vertices.

    Exhausts colour tuples with the first colour normalised to the identity
    matching (every class has such a representative) and dedups by code.
    """
    if k == 0:
        return ()
    if k > 4:
        raise GraphError("connected-class enumeration supported for k <= 4")
    from .perms import symmetric_group

    seen = {}
    perm_pool = list(symmetric_group(k))
    for rest in product(perm_pool, repeat=rank - 1):
        g = make_graph(rank, [identity(k), *rest])
        if not is_connected(g):
            continue
        code = canonical_code(g)
        seen.setdefault(code, g)
    return tuple(sorted(seen))


def enumerate_boundaries(rank: int, max_vertices: int) -> list[tuple[str, ...]]:
    """All boundary-word classes with at most `max_vertices` vertices.

    A word class is a sorted tuple of connected component codes; the empty
    word is excluded.
    """
    if rank != 3:
        raise GraphError("boundary enumeration is curated for rank 3")
    if max_vertices % 2 or max_vertices < 2 or max_vertices > 8:
        raise GraphError("max_vertices must be an even number in 2..8")
    by_k: dict[int, tuple[str, ...]] = {
        k: connected_classes(rank, k) for k in range(1, max_vertices // 2 + 1)
    }
    words: set[tuple[str, ...]] = set()

    def extend(word: tuple[str, ...], remaining: int, min_k: int):
        for k in range(min_k, remaining // 2 + 1):
            for code in by_k[k]:
                new = tuple(sorted(word + (code,)))
                words.add(new)
                extend(new, remaining - 2 * k, k)

    extend((), max_vertices, 1)
    return sorted(words, key=lambda w: (sum(_code_k(c) for c in w), len(w), w))


def _code_k(code: str) -> int:
    return int(code.split(":", 2)[1])


def word_display(codes: tuple[str, ...]) -> str:
    return "|".join(display_name(c) for c in codes)
