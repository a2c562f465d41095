"""Symbolic expression trees for correlator equations.

Expressions are sums of products over a small set of atomic factors:
correlator references, Y-term coefficient references, propagator factors,
and bound-index sums.  ``normalize`` produces a canonical form strong enough
to compare machine-generated equations with hand-transcribed ones: it
flattens and distributes, orients propagator differences, renames bound
indices, minimises correlator arguments over automorphism orbits, reorders
correlator components canonically, and sorts summands totally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import graphs as G


class ExprError(ValueError):
    pass


# ---------------------------------------------------------------------------
# components and vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WComp:
    """Colour component of a frame (white-vertex) momentum vector."""

    vec: str
    colour: int


@dataclass(frozen=True)
class BComp:
    """Bound summation index of a fixed colour."""

    name: str
    colour: int


Component = object  # WComp | BComp
Vector = tuple  # tuple of D components


def comp_key(c) -> tuple:
    if isinstance(c, WComp):
        return (0, c.vec, c.colour)
    if isinstance(c, BComp):
        return (1, c.name, c.colour)
    raise ExprError(f"bad component {c!r}")


def comp_colour(c) -> int:
    return c.colour


def comp_str(c) -> str:
    if isinstance(c, WComp):
        return f"{c.vec}{c.colour}"
    return f"{c.name}{c.colour}"


def whole_vector(name: str, rank: int) -> Vector:
    return tuple(WComp(name, c) for c in range(1, rank + 1))


# ---------------------------------------------------------------------------
# nodes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scalar:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class LamPow:
    power: int = 1


@dataclass(frozen=True)
class PropInv:
    """1/E at a full momentum vector."""

    vec: Vector


@dataclass(frozen=True)
class PropDiff:
    """1/E(a, b) for two distinct colour-c entries; antisymmetric in (a, b)."""

    a: Component
    b: Component

    def __post_init__(self):
        if comp_colour(self.a) != comp_colour(self.b):
            raise ExprError("propagator difference needs matching colours")


@dataclass(frozen=True)
class CorrPart:
    """One connected boundary component: class code plus its argument vectors."""

    code: str
    args: tuple  # tuple of Vector, in the code's canonical white order


@dataclass(frozen=True)
class Corr:
    """Connected correlation function of a (possibly disconnected) boundary."""

    parts: tuple  # tuple of CorrPart


@dataclass(frozen=True)
class FCoef:
    """Y-term coefficient: colour, scalar slot, and boundary word with args."""

    colour: int
    s: Component
    parts: tuple  # tuple of CorrPart; empty for the pivotal coefficient


@dataclass(frozen=True)
class IdxSum:
    bounds: tuple  # tuple of BComp
    body: object


@dataclass(frozen=True)
class Sum:
    terms: tuple


@dataclass(frozen=True)
class Prod:
    factors: tuple


@dataclass(frozen=True)
class Equation:
    lhs: object
    rhs: object


def scalar(v) -> Scalar:
    return Scalar(Fraction(v))


def vsum(*terms):
    return Sum(tuple(terms))


def vprod(*factors):
    return Prod(tuple(factors))


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------

def substitute(e, target, replacement):
    """Eagerly replace one momentum component everywhere it occurs.

    The target must be a frame component; bound indices cannot be renamed
    through this interface.
    """
    if isinstance(target, BComp):
        raise ExprError("cannot substitute a bound index")

    def sub_comp(c):
        return replacement if c == target else c

    def sub_vec(v):
        return tuple(sub_comp(c) for c in v)

    def walk(x):
        if isinstance(x, (Scalar, LamPow)):
            return x
        if isinstance(x, PropInv):
            return PropInv(sub_vec(x.vec))
        if isinstance(x, PropDiff):
            return PropDiff(sub_comp(x.a), sub_comp(x.b))
        if isinstance(x, CorrPart):
            return CorrPart(x.code, tuple(sub_vec(v) for v in x.args))
        if isinstance(x, Corr):
            return Corr(tuple(walk(p) for p in x.parts))
        if isinstance(x, FCoef):
            return FCoef(x.colour, sub_comp(x.s), tuple(walk(p) for p in x.parts))
        if isinstance(x, IdxSum):
            return IdxSum(x.bounds, walk(x.body))
        if isinstance(x, Sum):
            return Sum(tuple(walk(t) for t in x.terms))
        if isinstance(x, Prod):
            return Prod(tuple(walk(f) for f in x.factors))
        raise ExprError(f"bad node {x!r}")

    return walk(e)


def free_components(e) -> list:
    """Multiset of free (frame) component occurrences."""
    out = []

    def walk(x):
        if isinstance(x, (Scalar, LamPow)):
            return
        if isinstance(x, PropInv):
            out.extend(c for c in x.vec if isinstance(c, WComp))
        elif isinstance(x, PropDiff):
            out.extend(c for c in (x.a, x.b) if isinstance(c, WComp))
        elif isinstance(x, CorrPart):
            for v in x.args:
                out.extend(c for c in v if isinstance(c, WComp))
        elif isinstance(x, Corr):
            for p in x.parts:
                walk(p)
        elif isinstance(x, FCoef):
            if isinstance(x.s, WComp):
                out.append(x.s)
            for p in x.parts:
                walk(p)
        elif isinstance(x, IdxSum):
            walk(x.body)
        elif isinstance(x, Sum):
            for t in x.terms:
                walk(t)
        elif isinstance(x, Prod):
            for f in x.factors:
                walk(f)
        else:
            raise ExprError(f"bad node {x!r}")

    walk(e)
    return out


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def _part_sort_key(p: CorrPart):
    return (p.code, tuple(tuple(comp_key(c) for c in v) for v in p.args))


def _min_over_auts(p: CorrPart) -> CorrPart:
    """Smallest argument routing in the component's automorphism orbit."""
    auts = G.cached_white_auts(p.code)
    if len(auts) == 1:
        return p
    best = None
    for w in auts:
        cand = tuple(p.args[w[i] - 1] for i in range(len(p.args)))
        key = tuple(tuple(comp_key(c) for c in v) for v in cand)
        if best is None or key < best[0]:
            best = (key, cand)
    return CorrPart(p.code, best[1])


def _canon_corr(x: Corr) -> Corr:
    parts = tuple(_min_over_auts(p) for p in x.parts)
    return Corr(tuple(sorted(parts, key=_part_sort_key)))


def _canon_fcoef(x: FCoef) -> FCoef:
    # The coefficient is generally not automorphism-symmetric in its
    # arguments, so only the component presentation order is normalised
    # (stable sort by class code, argument blocks carried along).
    order = sorted(range(len(x.parts)), key=lambda i: (x.parts[i].code, i))
    return FCoef(x.colour, x.s, tuple(x.parts[i] for i in order))


@dataclass(frozen=True)
class _Term:
    coeff: Fraction
    lam: int
    factors: tuple  # atomic factors, canonicalized and sorted


def _factor_key(f) -> tuple:
    return _json_key(to_json(f))


def _json_key(x):
    if isinstance(x, dict):
        return tuple(sorted((k, _json_key(v)) for k, v in x.items()))
    if isinstance(x, list):
        return tuple(_json_key(v) for v in x)
    return x


def _expand(e) -> list[_Term]:
    """Flatten into a list of scalar*lam^n*(atomic factors) terms."""
    if isinstance(e, Scalar):
        return [] if e.value == 0 else [_Term(e.value, 0, ())]
    if isinstance(e, LamPow):
        return [_Term(Fraction(1), e.power, ())]
    if isinstance(e, Sum):
        out = []
        for t in e.terms:
            out.extend(_expand(t))
        return out
    if isinstance(e, Prod):
        terms = [_Term(Fraction(1), 0, ())]
        for f in e.factors:
            sub = _expand(f)
            terms = [
                _Term(a.coeff * b.coeff, a.lam + b.lam, a.factors + b.factors)
                for a in terms
                for b in sub
            ]
        return terms
    if isinstance(e, IdxSum):
        out = []
        for t in _expand(e.body):
            inner = _canon_idxsum(e.bounds, t.factors)
            out.append(_Term(t.coeff, t.lam, (inner,)))
        return out
    if isinstance(e, PropDiff):
        ka, kb = comp_key(e.a), comp_key(e.b)
        if ka > kb:
            return [_Term(Fraction(-1), 0, (PropDiff(e.b, e.a),))]
        return [_Term(Fraction(1), 0, (e,))]
    if isinstance(e, Corr):
        return [_Term(Fraction(1), 0, (_canon_corr(e),))]
    if isinstance(e, FCoef):
        return [_Term(Fraction(1), 0, (_canon_fcoef(e),))]
    if isinstance(e, PropInv):
        return [_Term(Fraction(1), 0, (e,))]
    raise ExprError(f"bad node {e!r}")


def _bound_names(factors) -> set:
    names = set()

    def walk(x):
        if isinstance(x, IdxSum):
            names.update((b.name, b.colour) for b in x.bounds)
            walk(x.body)
        elif isinstance(x, (Sum, Prod)):
            for t in x.terms if isinstance(x, Sum) else x.factors:
                walk(t)

    for f in factors:
        walk(f)
    return names


def _rename_bound(factors, old: BComp, new: BComp):
    def sub_vec(v):
        return tuple(new if c == old else c for c in v)

    def walk(x):
        if isinstance(x, PropInv):
            return PropInv(sub_vec(x.vec))
        if isinstance(x, PropDiff):
            return PropDiff(
                new if x.a == old else x.a, new if x.b == old else x.b
            )
        if isinstance(x, CorrPart):
            return CorrPart(x.code, tuple(sub_vec(v) for v in x.args))
        if isinstance(x, Corr):
            return Corr(tuple(walk(p) for p in x.parts))
        if isinstance(x, FCoef):
            return FCoef(
                x.colour, new if x.s == old else x.s, tuple(walk(p) for p in x.parts)
            )
        if isinstance(x, IdxSum):
            return IdxSum(
                tuple(new if b == old else b for b in x.bounds), walk(x.body)
            )
        return x

    return tuple(walk(f) for f in factors)


def _canon_idxsum(bounds, body_factors) -> IdxSum:
    """Canonical bound naming (per colour) plus inner factor normalization."""
    by_colour: dict[int, list[BComp]] = {}
    for b in bounds:
        by_colour.setdefault(b.colour, []).append(b)

    def assignments(colour_groups):
        if not colour_groups:
            yield []
            return
        colour, group = colour_groups[0]
        from itertools import permutations

        base = [f"q{'' if len(group) == 1 else chr(ord('a') + i)}" for i in range(len(group))]
        for perm in permutations(range(len(group))):
            head = [(group[i], BComp(base[perm[i]], colour)) for i in range(len(group))]
            for rest in assignments(colour_groups[1:]):
                yield head + rest

    best = None
    groups = sorted(by_colour.items())
    for assign in assignments(groups):
        factors = body_factors
        # two-phase rename avoids collisions between old and new names
        tmp = [(old, BComp(f"#tmp{i}", old.colour)) for i, (old, _) in enumerate(assign)]
        for old, t in tmp:
            factors = _rename_bound(factors, old, t)
        for (_, new), (_, t) in zip(assign, tmp):
            factors = _rename_bound(factors, t, new)
        canon = tuple(sorted((_canonical_factor(f) for f in factors), key=_factor_key))
        new_bounds = tuple(sorted((new for _, new in assign), key=comp_key))
        key = _factor_key(IdxSum(new_bounds, Prod(canon)))
        if best is None or key < best[0]:
            best = (key, IdxSum(new_bounds, Prod(canon)))
    return best[1]


def _canonical_factor(f):
    if isinstance(f, Corr):
        return _canon_corr(f)
    if isinstance(f, FCoef):
        return _canon_fcoef(f)
    if isinstance(f, PropDiff):
        ka, kb = comp_key(f.a), comp_key(f.b)
        # sign handled by the caller during expansion; inside an index sum a
        # flipped difference should not appear (the generator orients them)
        if ka > kb:
            raise ExprError("unoriented propagator difference inside a sum")
        return f
    if isinstance(f, (PropInv, IdxSum)):
        return f
    raise ExprError(f"bad atomic factor {f!r}")


def normalize(e):
    """Canonical form: Sum of coefficient-sorted products of atomic factors."""
    if isinstance(e, Equation):
        return Equation(normalize(e.lhs), normalize(e.rhs))
    merged: dict[tuple, Fraction] = {}
    shapes: dict[tuple, tuple] = {}
    for t in _expand(e):
        factors = tuple(sorted(t.factors, key=_factor_key))
        key = (t.lam, tuple(_factor_key(f) for f in factors))
        merged[key] = merged.get(key, Fraction(0)) + t.coeff
        shapes[key] = factors
    terms = []
    for key in sorted(merged):
        coeff = merged[key]
        if coeff == 0:
            continue
        lam, _ = key
        factors = [Scalar(coeff)]
        if lam:
            factors.append(LamPow(lam))
        factors.extend(shapes[key])
        terms.append(Prod(tuple(factors)))
    if not terms:
        return Scalar(Fraction(0))
    return Sum(tuple(terms))


def equal_normalized(a, b) -> bool:
    return normalize(a) == normalize(b)


# ---------------------------------------------------------------------------
# sign-safe PropDiff construction: 1/E(a,b) = -1/E(b,a)
# ---------------------------------------------------------------------------

def prop_diff(a, b):
    """Oriented propagator difference as an expression (may carry a sign)."""
    if comp_key(a) > comp_key(b):
        return Prod((Scalar(Fraction(-1)), PropDiff(b, a)))
    return PropDiff(a, b)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def _comp_json(c):
    if isinstance(c, WComp):
        return ["w", c.vec, c.colour]
    return ["b", c.name, c.colour]


def _comp_from_json(j):
    tag, name, colour = j
    return WComp(name, colour) if tag == "w" else BComp(name, colour)


def _vec_json(v):
    return [_comp_json(c) for c in v]


def _vec_from_json(j):
    return tuple(_comp_from_json(c) for c in j)


def to_json(e):
    if isinstance(e, Equation):
        return {"node": "equation", "lhs": to_json(e.lhs), "rhs": to_json(e.rhs)}
    if isinstance(e, Scalar):
        return {"node": "scalar", "num": e.value.numerator, "den": e.value.denominator}
    if isinstance(e, LamPow):
        return {"node": "lam", "power": e.power}
    if isinstance(e, PropInv):
        return {"node": "propinv", "vec": _vec_json(e.vec)}
    if isinstance(e, PropDiff):
        return {"node": "propdiff", "a": _comp_json(e.a), "b": _comp_json(e.b)}
    if isinstance(e, CorrPart):
        return {"node": "part", "code": e.code, "args": [_vec_json(v) for v in e.args]}
    if isinstance(e, Corr):
        return {"node": "corr", "parts": [to_json(p) for p in e.parts]}
    if isinstance(e, FCoef):
        return {
            "node": "fcoef",
            "colour": e.colour,
            "s": _comp_json(e.s),
            "parts": [to_json(p) for p in e.parts],
        }
    if isinstance(e, IdxSum):
        return {
            "node": "idxsum",
            "bounds": [_comp_json(b) for b in e.bounds],
            "body": to_json(e.body),
        }
    if isinstance(e, Sum):
        return {"node": "sum", "terms": [to_json(t) for t in e.terms]}
    if isinstance(e, Prod):
        return {"node": "prod", "factors": [to_json(f) for f in e.factors]}
    raise ExprError(f"bad node {e!r}")


def from_json(j):
    node = j["node"]
    if node == "equation":
        return Equation(from_json(j["lhs"]), from_json(j["rhs"]))
    if node == "scalar":
        return Scalar(Fraction(j["num"], j["den"]))
    if node == "lam":
        return LamPow(j["power"])
    if node == "propinv":
        return PropInv(_vec_from_json(j["vec"]))
    if node == "propdiff":
        return PropDiff(_comp_from_json(j["a"]), _comp_from_json(j["b"]))
    if node == "part":
        return CorrPart(j["code"], tuple(_vec_from_json(v) for v in j["args"]))
    if node == "corr":
        return Corr(tuple(from_json(p) for p in j["parts"]))
    if node == "fcoef":
        return FCoef(
            j["colour"],
            _comp_from_json(j["s"]),
            tuple(from_json(p) for p in j["parts"]),
        )
    if node == "idxsum":
        return IdxSum(
            tuple(_comp_from_json(b) for b in j["bounds"]), from_json(j["body"])
        )
    if node == "sum":
        return Sum(tuple(from_json(t) for t in j["terms"]))
    if node == "prod":
        return Prod(tuple(from_json(f) for f in j["factors"]))
    raise ExprError(f"unknown node tag {node!r}")


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _word_label(parts) -> str:
    from .catalog import display_name

    return "|".join(display_name(p.code) for p in parts) if parts else "0"


def _vec_str(v) -> str:
    return ",".join(comp_str(c) for c in v)


def render(e, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(to_json(e), sort_keys=True)
    if fmt == "latex":
        return _render_latex(e)
    if fmt == "text":
        return _render_text(e)
    raise ExprError(f"unknown format {fmt!r}")


def _render_text(e) -> str:
    if isinstance(e, Equation):
        return f"{_render_text(e.lhs)} = {_render_text(e.rhs)}"
    if isinstance(e, Scalar):
        return str(e.value)
    if isinstance(e, LamPow):
        return "lam" if e.power == 1 else f"lam^{e.power}"
    if isinstance(e, PropInv):
        return f"1/E[{_vec_str(e.vec)}]"
    if isinstance(e, PropDiff):
        return f"1/E({comp_str(e.a)},{comp_str(e.b)})"
    if isinstance(e, Corr):
        args = "; ".join(_vec_str(v) for p in e.parts for v in p.args)
        return f"G[{_word_label(e.parts)}]({args})"
    if isinstance(e, FCoef):
        args = "; ".join(_vec_str(v) for p in e.parts for v in p.args)
        label = _word_label(e.parts) if e.parts else "0"
        inner = f"{comp_str(e.s)}" + (f"; {args}" if args else "")
        return f"f^{e.colour}[{label}]({inner})"
    if isinstance(e, IdxSum):
        return f"sum_{{{','.join(comp_str(b) for b in e.bounds)}}} {_render_text(e.body)}"
    if isinstance(e, Sum):
        return "(" + " + ".join(_render_text(t) for t in e.terms) + ")"
    if isinstance(e, Prod):
        return "*".join(_wrap_text(f) for f in e.factors)
    raise ExprError(f"bad node {e!r}")


def _wrap_text(e) -> str:
    s = _render_text(e)
    return s


def _vec_latex(v) -> str:
    return ",".join(
        f"{c.vec if isinstance(c, WComp) else c.name}_{{{c.colour}}}" for c in v
    )


def _render_latex(e) -> str:
    if isinstance(e, Equation):
        return f"{_render_latex(e.lhs)} = {_render_latex(e.rhs)}"
    if isinstance(e, Scalar):
        if e.value.denominator == 1:
            return str(e.value.numerator)
        return f"\\tfrac{{{e.value.numerator}}}{{{e.value.denominator}}}"
    if isinstance(e, LamPow):
        return "\\lambda" if e.power == 1 else f"\\lambda^{{{e.power}}}"
    if isinstance(e, PropInv):
        return f"\\frac{{1}}{{E_{{{_vec_latex(e.vec)}}}}}"
    if isinstance(e, PropDiff):
        a, b = e.a, e.b
        return (
            "\\frac{1}{E("
            + f"{a.vec if isinstance(a, WComp) else a.name}_{{{a.colour}}},"
            + f"{b.vec if isinstance(b, WComp) else b.name}_{{{b.colour}}})}}"
        )
    if isinstance(e, Corr):
        from .catalog import display_name

        degree = 2 * sum(len(p.args) for p in e.parts)
        label = "|".join(
            f"\\mathrm{{{display_name(p.code)}}}" for p in e.parts
        )
        args = ";".join(_vec_latex(v) for p in e.parts for v in p.args)
        return f"G^{{({degree})}}_{{{label}}}({args})"
    if isinstance(e, FCoef):
        from .catalog import display_name

        label = (
            "|".join(f"\\mathrm{{{display_name(p.code)}}}" for p in e.parts)
            if e.parts
            else "\\varnothing"
        )
        s = e.s
        sname = s.vec if isinstance(s, WComp) else s.name
        args = ";".join(_vec_latex(v) for p in e.parts for v in p.args)
        tail = f"({args})" if args else ""
        return f"\\mathfrak{{f}}^{{({e.colour})}}_{{{label};{sname}_{{{s.colour}}}}}{tail}"
    if isinstance(e, IdxSum):
        bounds = ",".join(f"{b.name}_{{{b.colour}}}" for b in e.bounds)
        return f"\\sum_{{{bounds}}} {_render_latex(e.body)}"
    if isinstance(e, Sum):
        return "\\Big(" + " + ".join(_render_latex(t) for t in e.terms) + "\\Big)"
    if isinstance(e, Prod):
        return " \\cdot ".join(_render_latex(f) for f in e.factors)
    raise ExprError(f"bad node {e!r}")
