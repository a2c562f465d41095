"""Disconnected-boundary Schwinger-Dyson equation generator.

Given a boundary word and a distinguished black vertex, ``generate_sde``
emits the equation for the word's connected correlation function as a sum of
five term families per colour: the coefficient-orbit term, edge-swap terms
over all other black vertices, the bound-index tadpole, two-bridge splitting
terms, and insertion terms over the ordered factorizations of the remainder
word.  All momentum routing is done on concrete graphs through canonical
forms, so equal classes always present their arguments in comparable slots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import graphs as G
from .perms import invert
from .expr import (
    BComp,
    Corr,
    CorrPart,
    Equation,
    ExprError,
    FCoef,
    IdxSum,
    LamPow,
    Prod,
    PropInv,
    Scalar,
    Sum,
    WComp,
    prop_diff,
    substitute,
)

WHITE_NAMES = ("x", "y", "z", "u", "v", "w", "r", "t")


class SdeError(ValueError):
    pass


@dataclass(frozen=True)
class Frame:
    """Momentum frame of a boundary word.

    White vertex i (global, 1-based) carries the vector symbol
    ``WHITE_NAMES[i-1]``; black-vertex momenta are induced componentwise by
    following each colour's edge back to its white vertex.
    """

    factors: tuple
    joined: G.ColoredGraph
    offsets: tuple[int, ...]

    @property
    def rank(self) -> int:
        return self.joined.rank

    def white_name(self, w: int) -> str:
        return WHITE_NAMES[w - 1]

    def white_vec(self, w: int) -> tuple:
        return tuple(WComp(self.white_name(w), c) for c in range(1, self.rank + 1))

    def outgoing_comp(self, beta: int, c: int) -> WComp:
        nu = invert(self.joined.color(c))[beta - 1]
        return WComp(self.white_name(nu), c)

    def outgoing_vec(self, beta: int) -> tuple:
        return tuple(self.outgoing_comp(beta, c) for c in range(1, self.rank + 1))

    def global_black(self, comp_idx: int, beta_local: int) -> int:
        return self.offsets[comp_idx - 1] + beta_local

    def assignment(self, white_perm=None) -> dict[int, tuple]:
        k = self.joined.half_size
        if white_perm is None:
            return {w: self.white_vec(w) for w in range(1, k + 1)}
        return {w: self.white_vec(white_perm[w - 1]) for w in range(1, k + 1)}


def momentum_frame(factors) -> Frame:
    factors = tuple(factors)
    if not factors:
        raise SdeError("the empty boundary word has no momentum frame")
    joined = G.join_graphs(list(factors))
    if joined.half_size > len(WHITE_NAMES):
        raise SdeError("boundary word too large for the symbol alphabet")
    offsets = []
    total = 0
    for f in factors:
        offsets.append(total)
        total += f.half_size
    return Frame(factors, joined, tuple(offsets))


def corr_of_graph(g: G.ColoredGraph, assignment: dict[int, tuple]) -> Corr:
    """Correlator reference for a graph whose whites carry assigned vectors."""
    parts = []
    for comp in G.components(g):
        cf = G.canonical_form(comp.graph)
        args = [None] * comp.graph.half_size
        for local, worig in enumerate(comp.whites, 1):
            args[cf.white_map[local - 1] - 1] = assignment[worig]
        parts.append(CorrPart(G.canonical_code(comp.graph), tuple(args)))
    return Corr(tuple(parts))


def _word_parts(factor_whites, assignment) -> tuple:
    """Canonically ordered coefficient-word components with routed arguments.

    ``factor_whites`` lists (graph, global whites) per component; components
    are presented sorted by class code (stable), each with its arguments in
    the class's canonical slot order.
    """
    entries = []
    for graph, whites in factor_whites:
        cf = G.canonical_form(graph)
        args = [None] * graph.half_size
        for local, worig in enumerate(whites, 1):
            args[cf.white_map[local - 1] - 1] = assignment[worig]
        entries.append((G.canonical_code(graph), tuple(args)))
    entries.sort(key=lambda e: e[0])
    return tuple(CorrPart(code, args) for code, args in entries)


def inequivalent_beta_choices(factors) -> list[tuple[int, int]]:
    """One (component, black vertex) representative per automorphism orbit."""
    frame = momentum_frame(factors)
    auts = G.automorphism_group(frame.joined)
    k = frame.joined.half_size
    seen = set()
    reps = []
    for beta in range(1, k + 1):
        if beta in seen:
            continue
        orbit = {a.black_perm[beta - 1] for a in auts}
        seen |= orbit
        comp_idx = max(i for i, off in enumerate(frame.offsets, 1) if off < beta)
        reps.append((comp_idx, beta - frame.offsets[comp_idx - 1]))
    return reps


def resolve_swap_correlator(factors, c: int, beta: int, rho: int) -> Corr:
    """Correlator of the boundary after a colour-c swap of two black vertices.

    Black indices are global over the word; the swap may merge two components
    (a connected sum) or split one.
    """
    frame = momentum_frame(factors)
    swapped = G.edge_swap(frame.joined, c, beta, rho)
    return corr_of_graph(swapped, frame.assignment())


@dataclass(frozen=True)
class SdeContext:
    frame: Frame
    comp_idx: int
    beta_local: int
    beta: int  # global black index

    @property
    def remainder(self) -> tuple:
        """(graph, global whites) for every component except the chosen one."""
        out = []
        for i, f in enumerate(self.frame.factors, 1):
            if i == self.comp_idx:
                continue
            off = self.frame.offsets[i - 1]
            out.append((f, tuple(range(off + 1, off + f.half_size + 1))))
        return tuple(out)

    @property
    def chosen(self) -> tuple:
        f = self.frame.factors[self.comp_idx - 1]
        off = self.frame.offsets[self.comp_idx - 1]
        return f, tuple(range(off + 1, off + f.half_size + 1))


def _remainder_auts(ctx: SdeContext):
    """Automorphisms of the remainder word, as maps on its global whites."""
    rem = ctx.remainder
    if not rem:
        return [{}]
    joined = G.join_graphs([g for g, _ in rem])
    whites = [w for _, ws in rem for w in ws]
    out = []
    for a in G.automorphism_group(joined):
        out.append({w: whites[a.white_perm[i] - 1] for i, w in enumerate(whites)})
    return out


def _class_splits(rem):
    """Ordered class-pair splits (C, B) of the remainder components."""
    n = len(rem)
    seen = set()
    out = []
    for mask in range(1 << n):
        left = tuple(rem[i] for i in range(n) if mask >> i & 1)
        right = tuple(rem[i] for i in range(n) if not mask >> i & 1)
        key = (
            tuple(sorted(G.canonical_code(g) for g, _ in left)),
            tuple(sorted(G.canonical_code(g) for g, _ in right)),
        )
        if key not in seen:
            seen.add(key)
            out.append((left, right))
    return out


def generate_sde(factors, comp_idx: int, beta_local: int) -> Equation:
    """The equation distinguished by one black vertex of one component."""
    factors = tuple(factors)
    frame = momentum_frame(factors)
    if not 1 <= comp_idx <= len(factors):
        raise SdeError(f"component index {comp_idx} out of range")
    chosen_graph = factors[comp_idx - 1]
    if not 1 <= beta_local <= chosen_graph.half_size:
        raise SdeError(f"black vertex {beta_local} out of range in component {comp_idx}")
    ctx = SdeContext(frame, comp_idx, beta_local, frame.global_black(comp_idx, beta_local))

    D = frame.rank
    base = frame.assignment()
    lhs = corr_of_graph(frame.joined, base)
    s_vec = frame.outgoing_vec(ctx.beta)
    all_factor_whites = [
        (f, tuple(range(off + 1, off + f.half_size + 1)))
        for f, off in zip(frame.factors, frame.offsets)
    ]

    word_auts = G.automorphism_group(frame.joined)
    rem = ctx.remainder
    rem_auts = _remainder_auts(ctx)
    splits = _class_splits(rem)
    r_graph, r_whites = ctx.chosen

    colour_sums = []
    for c in range(1, D + 1):
        s_c = frame.outgoing_comp(ctx.beta, c)
        terms = []

        # (1) coefficient-orbit term over the full word automorphism group
        for a in word_auts:
            assign = frame.assignment(a.white_perm)
            terms.append(FCoef(c, s_c, _word_parts(all_factor_whites, assign)))

        # (2) edge-swap terms over every other black vertex
        for rho in range(1, frame.joined.half_size + 1):
            if rho == ctx.beta:
                continue
            y_rho = frame.outgoing_comp(rho, c)
            swapped = corr_of_graph(G.edge_swap(frame.joined, c, ctx.beta, rho), base)
            terms.append(
                Prod(
                    (
                        prop_diff(y_rho, s_c),
                        Sum((swapped, Prod((Scalar(Fraction(-1)), substitute(swapped, s_c, y_rho))))),
                    )
                )
            )

        # (3) tadpole over the bound colour-c index
        b = BComp("b", c)
        terms.append(
            Prod(
                (
                    Scalar(Fraction(-1)),
                    IdxSum(
                        (b,),
                        Prod(
                            (
                                prop_diff(s_c, b),
                                Sum((lhs, Prod((Scalar(Fraction(-1)), substitute(lhs, s_c, b))))),
                            )
                        ),
                    ),
                )
            )
        )

        # (4) two-bridge splitting terms
        for tau_local in sorted(G.bridge_pairs(r_graph, beta_local, c)):
            tau = frame.global_black(comp_idx, tau_local)
            y_tau = frame.outgoing_comp(tau, c)
            halves = G.components(G.edge_swap(r_graph, c, beta_local, tau_local))
            rp, rpp = halves[0], halves[1]
            rp_whites = tuple(r_whites[w - 1] for w in rp.whites)
            rpp_whites = tuple(r_whites[w - 1] for w in rpp.whites)
            for left, right in splits:
                for omega in rem_auts:
                    assign = dict(base)
                    assign.update({w: base[omega[w]] for w in omega})
                    h_left = Corr(
                        _corr_parts_for((rp.graph, rp_whites), left, base, assign)
                    )
                    h_right = Corr(
                        _corr_parts_for((rpp.graph, rpp_whites), right, base, assign)
                    )
                    h = Prod((h_left, h_right))
                    h_sub = substitute(h, s_c, y_tau)
                    terms.append(
                        Prod(
                            (
                                prop_diff(y_tau, s_c),
                                Sum((h, Prod((Scalar(Fraction(-1)), h_sub)))),
                            )
                        )
                    )

        # (5) insertion terms over ordered factorizations of the remainder
        for left, right in splits:
            inv_aut = (
                Fraction(1)
                if not right
                else Fraction(1, G.aut_order(G.join_graphs([g for g, _ in right])))
            )
            for omega in rem_auts:
                assign = dict(base)
                assign.update({w: base[omega[w]] for w in omega})
                fcoef = FCoef(c, s_c, _word_parts(left, assign) if left else ())
                corr = Corr(_corr_parts_for((r_graph, r_whites), right, base, assign))
                term = Prod((fcoef, corr))
                terms.append(term if inv_aut == 1 else Prod((Scalar(inv_aut), term)))

        colour_sums.append(Sum(tuple(terms)))

    rhs = Prod(
        (
            Scalar(Fraction(-2)),
            LamPow(1),
            PropInv(s_vec),
            Sum(tuple(colour_sums)),
        )
    )
    return Equation(lhs, rhs)


def _corr_parts_for(r_entry, q_entries, base_assign, q_assign) -> tuple:
    """Correlator components for a chosen-part graph joined with Q-components.

    The chosen part keeps the base frame assignment; the Q-components read
    their vectors through the remainder-automorphism assignment.
    """
    parts = []
    graph, whites = r_entry
    cf = G.canonical_form(graph)
    args = [None] * graph.half_size
    for local, worig in enumerate(whites, 1):
        args[cf.white_map[local - 1] - 1] = base_assign[worig]
    parts.append(CorrPart(G.canonical_code(graph), tuple(args)))
    for g, ws in q_entries:
        cf = G.canonical_form(g)
        args = [None] * g.half_size
        for local, worig in enumerate(ws, 1):
            args[cf.white_map[local - 1] - 1] = q_assign[worig]
        parts.append(CorrPart(G.canonical_code(g), tuple(args)))
    return tuple(parts)
