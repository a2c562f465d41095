"""Closed, regularly edge-coloured, bipartite graphs and their basic moves.

A rank-D graph on 2k vertices (k white, k black) is stored as D bijections
{1..k} -> {1..k}, one per colour: each colour is a perfect matching sending a
white vertex to the black vertex at the other end of that colour's edge.
Closedness and regularity hold by construction; k = 0 is the empty graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations as _permutations, product as _product

from .perms import (
    Perm,
    compose,
    cycle_count,
    identity,
    invert,
    is_permutation,
    symmetric_group,
    transposition,
)

AUT_SEARCH_BOUND = 8  # k! search; desk scale is k <= 6


class GraphError(ValueError):
    """Malformed graph data or an operation outside its precondition."""


@dataclass(frozen=True)
class ColoredGraph:
    rank: int
    half_size: int
    colors: tuple[Perm, ...]  # colors[c-1] maps white index -> black index

    def __post_init__(self):
        if self.rank < 1:
            raise GraphError(f"rank must be >= 1, got {self.rank}")
        if len(self.colors) != self.rank:
            raise GraphError(
                f"expected {self.rank} colour maps, got {len(self.colors)}"
            )
        for c, p in enumerate(self.colors, 1):
            if len(p) != self.half_size or not is_permutation(p):
                raise GraphError(f"colour {c} is not a bijection on 1..{self.half_size}")

    @property
    def is_empty(self) -> bool:
        return self.half_size == 0

    def color(self, c: int) -> Perm:
        if not 1 <= c <= self.rank:
            raise GraphError(f"colour {c} out of range 1..{self.rank}")
        return self.colors[c - 1]

    def __repr__(self):
        if self.is_empty:
            return f"ColoredGraph(rank={self.rank}, empty)"
        return f"ColoredGraph(rank={self.rank}, k={self.half_size}, colors={self.colors})"


def make_graph(rank: int, perms) -> ColoredGraph:
    """Build a graph from per-colour white->black image lists.

    An empty list of maps is accepted as the empty graph of the given rank.
    """
    perms = [tuple(p) for p in perms]
    if not perms:
        return ColoredGraph(rank, 0, tuple(() for _ in range(rank)))
    if len(perms) != rank:
        raise GraphError(f"expected {rank} colour maps, got {len(perms)}")
    k = len(perms[0])
    for p in perms:
        if len(p) != k:
            raise GraphError("colour maps act on inconsistent vertex sets")
    return ColoredGraph(rank, k, tuple(perms))


def empty_graph(rank: int) -> ColoredGraph:
    return make_graph(rank, [])


# ---------------------------------------------------------------------------
# connectivity and components
# ---------------------------------------------------------------------------

def _white_blocks(g: ColoredGraph) -> list[list[int]]:
    """Partition white indices into connected blocks.

    Whites w, w' are linked when some pair of colours sends them to a common
    black vertex; a component's whites determine its blacks.
    """
    k = g.half_size
    parent = list(range(k + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    black_owner: dict[int, int] = {}
    for c in range(1, g.rank + 1):
        p = g.color(c)
        for w in range(1, k + 1):
            b = p[w - 1]
            if b in black_owner:
                union(w, black_owner[b])
            else:
                black_owner[b] = w
    blocks: dict[int, list[int]] = {}
    for w in range(1, k + 1):
        blocks.setdefault(find(w), []).append(w)
    return sorted(blocks.values(), key=min)


def is_connected(g: ColoredGraph) -> bool:
    """True when the 2k vertices form a single component; vacuously for k=0."""
    if g.is_empty:
        return True
    return len(_white_blocks(g)) == 1


@dataclass(frozen=True)
class Component:
    """A connected piece together with its original vertex labels."""

    graph: ColoredGraph
    whites: tuple[int, ...]  # original white index of local white i
    blacks: tuple[int, ...]  # original black index of local black j


def components(g: ColoredGraph) -> list[Component]:
    """Connected components, ordered by smallest original white index."""
    if g.is_empty:
        return []
    out = []
    for whites in _white_blocks(g):
        blacks = sorted(g.color(1)[w - 1] for w in whites)
        wpos = {w: i + 1 for i, w in enumerate(whites)}
        bpos = {b: i + 1 for i, b in enumerate(blacks)}
        perms = []
        for c in range(1, g.rank + 1):
            p = g.color(c)
            perms.append(tuple(bpos[p[w - 1]] for w in whites))
        out.append(Component(make_graph(g.rank, perms), tuple(whites), tuple(blacks)))
    return out


def join_graphs(parts: list[ColoredGraph]) -> ColoredGraph:
    """Disjoint union; white/black indices of later parts are shifted up."""
    if not parts:
        raise GraphError("join_graphs needs at least one part")
    rank = parts[0].rank
    if any(p.rank != rank for p in parts):
        raise GraphError("rank mismatch in union")
    perms = [[] for _ in range(rank)]
    offset = 0
    for part in parts:
        for c in range(rank):
            perms[c].extend(v + offset for v in part.colors[c])
        offset += part.half_size
    return make_graph(rank, [tuple(p) for p in perms])


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalForm:
    graph: ColoredGraph
    white_map: Perm  # original white -> canonical white
    black_map: Perm  # original black -> canonical black


def canonical_form(g: ColoredGraph) -> CanonicalForm:
    """Canonical representative of a connected graph's isomorphism class.

    Minimises the colour tuple lexicographically over white relabelings; the
    black relabeling is forced per candidate so that colour 1 becomes the
    identity matching.
    """
    if not g.is_empty and not is_connected(g):
        raise GraphError("canonical_form expects a connected graph")
    k = g.half_size
    if k == 0:
        return CanonicalForm(g, (), ())
    if k > AUT_SEARCH_BOUND:
        raise GraphError(f"canonicalization bound exceeded (k={k})")
    pi1_inv = invert(g.color(1))
    best = None
    for w in symmetric_group(k):
        b = compose(w, pi1_inv)  # forces colour 1 to the identity
        cand = tuple(compose(b, compose(g.color(c), invert(w))) for c in range(1, g.rank + 1))
        if best is None or cand < best[0]:
            best = (cand, w, b)
    cand, w, b = best
    return CanonicalForm(make_graph(g.rank, list(cand)), w, b)


@lru_cache(maxsize=None)
def canonical_code(g: ColoredGraph) -> str:
    """Stable string identifying the isomorphism class of any graph.

    Connected classes encode rank, k and the canonical colour maps; a
    disconnected class is the sorted multiset of its component codes.
    """
    if g.is_empty:
        return f"{g.rank}:0:"
    comps = components(g)
    if len(comps) == 1:
        cf = canonical_form(comps[0].graph)
        body = "|".join(",".join(str(v) for v in p) for p in cf.graph.colors)
        return f"{g.rank}:{g.half_size}:{body}"
    codes = sorted(canonical_code(c.graph) for c in comps)
    return f"{g.rank}:w:" + ";".join(codes)


def decode_code(code: str) -> ColoredGraph:
    """Rebuild the canonical representative of a connected class code."""
    rank_s, k_s, body = code.split(":", 2)
    rank, k = int(rank_s), int(k_s)
    if k == 0:
        return empty_graph(rank)
    perms = [tuple(int(v) for v in part.split(",")) for part in body.split("|")]
    return make_graph(rank, perms)


def is_isomorphic(g: ColoredGraph, h: ColoredGraph) -> bool:
    return g.rank == h.rank and canonical_code(g) == canonical_code(h)


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AutElement:
    white_perm: Perm
    black_perm: Perm

    def compose(self, other: "AutElement") -> "AutElement":
        return AutElement(
            compose(self.white_perm, other.white_perm),
            compose(self.black_perm, other.black_perm),
        )

    def inverse(self) -> "AutElement":
        return AutElement(invert(self.white_perm), invert(self.black_perm))


def _connected_automorphisms(g: ColoredGraph) -> list[AutElement]:
    k = g.half_size
    if k == 0:
        return [AutElement((), ())]
    if k > AUT_SEARCH_BOUND:
        raise GraphError(f"automorphism search bound exceeded (k={k})")
    out = []
    for w in symmetric_group(k):
        b = compose(g.color(1), compose(w, invert(g.color(1))))
        if all(compose(b, g.color(c)) == compose(g.color(c), w) for c in range(2, g.rank + 1)):
            out.append(AutElement(w, b))
    return out


def automorphism_group(g: ColoredGraph) -> list[AutElement]:
    """All colour- and bipartiteness-preserving automorphisms of g.

    For a disconnected graph the group combines each component's
    automorphisms with block permutations of isomorphic components.
    """
    comps = components(g)
    if len(comps) <= 1:
        return _connected_automorphisms(g)

    classes: dict[str, list[int]] = {}
    forms = []
    for i, comp in enumerate(comps):
        cf = canonical_form(comp.graph)
        forms.append(cf)
        classes.setdefault(canonical_code(comp.graph), []).append(i)

    per_class = []
    for code in sorted(classes):
        idxs = classes[code]
        rep_auts = _connected_automorphisms(forms[idxs[0]].graph)
        per_class.append((idxs, rep_auts))

    out = []

    def build(ci, chosen):
        if ci == len(per_class):
            wmap = [0] * (g.half_size + 1)
            bmap = [0] * (g.half_size + 1)
            for idxs, mu, sigmas in chosen:
                for a_pos, src in enumerate(idxs):
                    dst = idxs[mu[a_pos] - 1]
                    aut = sigmas[a_pos]
                    csrc, cdst = comps[src], comps[dst]
                    fs, fd = forms[src], forms[dst]
                    inv_wd = invert(fd.white_map)
                    inv_bd = invert(fd.black_map)
                    for j, worig in enumerate(csrc.whites, 1):
                        slot = aut.white_perm[fs.white_map[j - 1] - 1]
                        wmap[worig] = cdst.whites[inv_wd[slot - 1] - 1]
                    for j, borig in enumerate(csrc.blacks, 1):
                        slot = aut.black_perm[fs.black_map[j - 1] - 1]
                        bmap[borig] = cdst.blacks[inv_bd[slot - 1] - 1]
            out.append(AutElement(tuple(wmap[1:]), tuple(bmap[1:])))
            return
        idxs, rep_auts = per_class[ci]
        for mu in _permutations(range(1, len(idxs) + 1)):
            for sigmas in _product(rep_auts, repeat=len(idxs)):
                build(ci + 1, chosen + [(idxs, mu, sigmas)])

    build(0, [])
    return out


def aut_order(g: ColoredGraph) -> int:
    comps = components(g)
    if len(comps) <= 1:
        return len(_connected_automorphisms(g))
    classes: dict[str, int] = {}
    per_comp: dict[str, int] = {}
    for comp in comps:
        code = canonical_code(comp.graph)
        classes[code] = classes.get(code, 0) + 1
        if code not in per_comp:
            per_comp[code] = len(_connected_automorphisms(comp.graph))
    n = 1
    for code, alpha in classes.items():
        n *= per_comp[code] ** alpha
        for i in range(2, alpha + 1):
            n *= i
    return n


# ---------------------------------------------------------------------------
# edge swap, 2-bridges, induced map, genus
# ---------------------------------------------------------------------------

def edge_swap(g: ColoredGraph, c: int, beta: int, rho: int) -> ColoredGraph:
    """Exchange the colour-c edges ending at black vertices beta and rho."""
    if beta == rho:
        raise GraphError("edge swap needs two distinct black vertices")
    k = g.half_size
    if not (1 <= beta <= k and 1 <= rho <= k):
        raise GraphError(f"black index out of range 1..{k}")
    t = transposition(k, beta, rho)
    perms = list(g.colors)
    perms[c - 1] = compose(t, g.color(c))
    return make_graph(g.rank, perms)


def bridge_pairs(g: ColoredGraph, beta: int, c: int) -> set[int]:
    """Black vertices tau != beta whose colourrc swap with beta disconnects g."""
    if not is_connected(g) or g.is_empty:
        raise GraphError("bridge_pairs expects a non-empty connected graph")
    return {
        tau
        for tau in range(1, g.half_size + 1)
        if tau != beta and not is_connected(edge_swap(g, c, beta, tau))
    }


def induced_map(g: ColoredGraph) -> dict[tuple[int, int], int]:
    """Slot map (black alpha, colour c) -> white nu feeding that slot.

    Black vertex alpha takes its colour-c momentum entry from the white vertex
    at the other end of its colour-c edge.
    """
    out = {}
    for c in range(1, g.rank + 1):
        inv = invert(g.color(c))
        for alpha in range(1, g.half_size + 1):
            out[(alpha, c)] = inv[alpha - 1]
    return out


def genus_rank3(g: ColoredGraph) -> int:
    """Genus of a connected rank-3 graph via bicoloured-cycle face counting."""
    if g.rank != 3:
        raise GraphError("genus is defined here for rank 3 only")
    if not is_connected(g):
        raise GraphError("genus_rank3 expects a connected graph")
    if g.is_empty:
        raise GraphError("genus of the empty graph is undefined")
    k = g.half_size
    faces = 0
    for a in range(1, 4):
        for b in range(a + 1, 4):
            faces += cycle_count(compose(g.color(b), invert(g.color(a))))
    two_minus_2g = 2 * k - 3 * k + faces
    genus2 = 2 - two_minus_2g
    if genus2 % 2 != 0 or genus2 < 0:
        raise GraphError(f"non-integer or negative genus from face count {faces}")
    return genus2 // 2


# ---------------------------------------------------------------------------
# JSON graph spec
# ---------------------------------------------------------------------------

def graph_to_dict(g: ColoredGraph) -> dict:
    return {"rank": g.rank, "k": g.half_size, "colors": [list(p) for p in g.colors]}


def graph_from_dict(d: dict) -> ColoredGraph:
    g = make_graph(int(d["rank"]), d.get("colors", []))
    if "k" in d and int(d["k"]) != g.half_size:
        raise GraphError(f"declared k={d['k']} but colour maps act on 1..{g.half_size}")
    return g


@lru_cache(maxsize=None)
def cached_canonical_form(code: str) -> ColoredGraph:
    return decode_code(code)


def canonical_rep(g: ColoredGraph) -> ColoredGraph:
    """The canonical representative of g's class (g must be connected)."""
    return cached_canonical_form(canonical_code(g))


@lru_cache(maxsize=None)
def cached_white_auts(code: str) -> tuple[Perm, ...]:
    """White permutations of the automorphisms of a connected class code."""
    g = decode_code(code)
    return tuple(a.white_perm for a in _connected_automorphisms(g))
