"""Y-term coefficient expansion from the versioned rank-3 table.

The table stores templates over colour roles; instantiation assigns concrete
colours, resolves named classes through the catalog (carrying each name's
argument-order convention), and introduces fresh bound indices for the
summed momentum entries.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .catalog import resolve_name
from .expr import (
    BComp,
    Corr,
    CorrPart,
    Equation,
    ExprError,
    FCoef,
    IdxSum,
    Prod,
    Scalar,
    Sum,
)
from .graphs import canonical_code


class MissingYEntry(ExprError):
    """The boundary word lies beyond the tabulated expansion order."""


@lru_cache(maxsize=1)
def load_table() -> dict:
    with resources.files("melonsde.data").joinpath("y_term_rank3.json").open() as fh:
        return json.load(fh)


@lru_cache(maxsize=1)
def _class_codes() -> dict[str, str]:
    return {
        "m": resolve_name("m").code,
        "V1": resolve_name("V1").code,
        "V2": resolve_name("V2").code,
        "V3": resolve_name("V3").code,
    }


def _classify(fc: FCoef) -> tuple[str, dict[str, int]]:
    """Pick the table entry and the role->colour assignment for a coefficient."""
    codes = _class_codes()
    a = fc.colour
    others = sorted(c for c in (1, 2, 3) if c != a)
    word = tuple(p.code for p in fc.parts)
    if word == ():
        return "empty", {"a": a, "b": others[0], "c": others[1]}
    if word == (codes["m"],):
        return "m", {"a": a, "b": others[0], "c": others[1]}
    if len(word) == 1:
        for colour in (1, 2, 3):
            if word[0] == codes[f"V{colour}"]:
                if colour == a:
                    return "pillow_same", {"a": a, "b": others[0], "c": others[1]}
                b = colour
                c = next(x for x in (1, 2, 3) if x not in (a, b))
                return "pillow_other", {"a": a, "b": b, "c": c}
    if word == (codes["m"], codes["m"]):
        return "m|m", {"a": a, "b": others[0], "c": others[1]}
    raise MissingYEntry(f"no tabulated expansion for boundary word {word}")


def _resolve_word_name(name: str, roles: dict[str, int]) -> str:
    if name == "m" or name == "K33":
        return name
    if name.startswith("V"):
        return f"V{roles[name[1]]}"
    if name.startswith("Q"):
        return f"Q{roles[name[1]]}"
    if name.startswith("F[") and name.endswith("]"):
        e, pair = name[2:-1].split(";")
        return f"F{roles[e]};{roles[pair[0]]}{roles[pair[1]]}"
    raise ExprError(f"bad template word name {name!r}")


def _build_vector(spec, roles, caller_vecs, bound_by_role, rank=3):
    if isinstance(spec, str):
        idx = int(spec[1:])
        return caller_vecs[idx - 1]
    comps = [None] * rank
    for role, atom in spec.items():
        colour = roles[role]
        if atom == "s":
            comps[colour - 1] = "s"
        elif atom.startswith("q:"):
            comps[colour - 1] = bound_by_role[atom[2:]]
        else:
            vec_idx, vrole = atom.split(":")
            comps[colour - 1] = caller_vecs[int(vec_idx) - 1][roles[vrole] - 1]
    return tuple(comps)


def expand_fcoef(fc: FCoef):
    """Instantiate the tabulated expansion of one coefficient reference."""
    entry_name, roles = _classify(fc)
    entry = load_table()["entries"][entry_name]
    caller_vecs = [v for p in fc.parts for v in p.args]
    terms = []
    for t in entry["terms"]:
        bound_by_role = {
            role: BComp("q", roles[role]) for role in t["sums"]
        }
        parts = []
        names = [_resolve_word_name(n, roles) for n in t["word"]]
        for name, arg_specs in zip(names, t["args"]):
            cat = resolve_name(name)
            vecs = tuple(
                _build_vector(spec, roles, caller_vecs, bound_by_role)
                for spec in arg_specs
            )
            vecs = tuple(
                tuple(fc.s if c == "s" else c for c in v) for v in vecs
            )
            parts.append(CorrPart(cat.code, cat.to_canonical_slots(vecs)))
        body = Corr(tuple(parts))
        if bound_by_role:
            bounds = tuple(sorted(bound_by_role.values(), key=lambda b: b.colour))
            body = IdxSum(bounds, body)
        coeff = Fraction(t["coeff"])
        terms.append(body if coeff == 1 else Prod((Scalar(coeff), body)))
    return Sum(tuple(terms))


def y_expand(e, pivotal_only: bool = False):
    """Replace tabulated Y-coefficient references by their expansions.

    With ``pivotal_only`` set, only empty-word coefficients are expanded;
    this is the rewrite used when comparing against reference equations whose
    pivotal term appears in expanded form.
    """
    if isinstance(e, Equation):
        return Equation(y_expand(e.lhs, pivotal_only), y_expand(e.rhs, pivotal_only))
    if isinstance(e, FCoef):
        if pivotal_only and e.parts:
            return e
        return expand_fcoef(e)
    if isinstance(e, Sum):
        return Sum(tuple(y_expand(t, pivotal_only) for t in e.terms))
    if isinstance(e, Prod):
        return Prod(tuple(y_expand(f, pivotal_only) for f in e.factors))
    if isinstance(e, IdxSum):
        return IdxSum(e.bounds, y_expand(e.body, pivotal_only))
    return e


def expand_pivotal(e):
    return y_expand(e, pivotal_only=True)
