"""Multivariable graph calculus: words, group actions, derivatives, products.

A calculus instance is parametrised by an action system assigning each
connected variable a finite group acting on its momenta.  Coloured graphs
with their automorphism groups are the canonical system; opaque atoms with
externally supplied groups cover everything else (tables, roots of unity,
character sums, ...).

Functionals are finite sums of (coefficient, word) pairs held modulo
reordering: terms are stored on the word sorted by variable key, with the
coefficient's argument blocks transported along.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product

from . import graphs as G
from .perms import invert


class CalculusError(ValueError):
    pass


# ---------------------------------------------------------------------------
# variables and action systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    """Abstract connected variable; its group lives in the action system."""

    name: str

    @property
    def key(self) -> str:
        return f"atom:{self.name}"


def variable_key(v) -> str:
    if isinstance(v, Atom):
        return v.key
    if isinstance(v, G.ColoredGraph):
        return G.canonical_code(v)
    raise CalculusError(f"unsupported variable {v!r}")


class ActionSystem:
    """Interface: a finite group with a momentum action per variable."""

    def elements(self, var):
        raise NotImplementedError

    def identity(self, var):
        raise NotImplementedError

    def compose(self, var, a, b):
        """a after b."""
        raise NotImplementedError

    def inverse(self, var, a):
        raise NotImplementedError

    def act(self, var, elem, momentum):
        raise NotImplementedError


class CanonicalAutSystem(ActionSystem):
    """Coloured-graph automorphisms permuting white-vertex momentum columns.

    Variables must be connected graphs in canonical form; momenta are tuples
    with one entry per white vertex.
    """

    def elements(self, var):
        return G.cached_white_auts(variable_key(var))

    def identity(self, var):
        return tuple(range(1, var.half_size + 1))

    def compose(self, var, a, b):
        from .perms import compose as pc

        return pc(a, b)

    def inverse(self, var, a):
        return invert(a)

    def act(self, var, elem, momentum):
        inv = invert(elem)
        return tuple(momentum[inv[i] - 1] for i in range(len(momentum)))


@dataclass
class GroupSpec:
    elements: tuple
    compose: callable
    inverse: callable
    identity: object
    act: callable  # (elem, momentum) -> momentum


class MapSystem(ActionSystem):
    """Action system backed by an explicit per-atom table of group data."""

    def __init__(self, specs: dict[str, GroupSpec]):
        self.specs = specs

    def _spec(self, var) -> GroupSpec:
        return self.specs[variable_key(var)]

    def elements(self, var):
        return self._spec(var).elements

    def identity(self, var):
        return self._spec(var).identity

    def compose(self, var, a, b):
        return self._spec(var).compose(a, b)

    def inverse(self, var, a):
        return self._spec(var).inverse(a)

    def act(self, var, elem, momentum):
        return self._spec(var).act(elem, momentum)


def trivial_group_spec() -> GroupSpec:
    return GroupSpec(
        elements=(None,),
        compose=lambda a, b: None,
        inverse=lambda a: None,
        identity=None,
        act=lambda e, m: m,
    )


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GraphWord:
    factors: tuple

    def __post_init__(self):
        for f in self.factors:
            if isinstance(f, G.ColoredGraph):
                if f.is_empty:
                    raise CalculusError("the empty graph cannot be a word factor")
                if not G.is_connected(f):
                    raise CalculusError("word factors must be connected")
                if f != G.canonical_rep(f):
                    raise CalculusError(
                        "word factors must be canonical representatives; "
                        "use graphs.canonical_rep first"
                    )

    @staticmethod
    def empty() -> "GraphWord":
        return GraphWord(())

    @staticmethod
    def of(*factors) -> "GraphWord":
        return GraphWord(tuple(factors))

    @property
    def degree(self) -> int:
        return len(self.factors)

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(variable_key(f) for f in self.factors)

    @property
    def class_key(self) -> tuple[str, ...]:
        return tuple(sorted(self.keys))

    def delete(self, i: int) -> "GraphWord":
        if not 1 <= i <= self.degree:
            raise CalculusError(f"factor index {i} out of range 1..{self.degree}")
        return GraphWord(self.factors[: i - 1] + self.factors[i:])

    def concat(self, other: "GraphWord") -> "GraphWord":
        return GraphWord(self.factors + other.factors)

    def sorted(self) -> tuple["GraphWord", tuple[int, ...]]:
        """Word sorted by key, plus the source position of each sorted slot."""
        order = sorted(range(self.degree), key=lambda i: (variable_key(self.factors[i]), i))
        return GraphWord(tuple(self.factors[i] for i in order)), tuple(order)


def word_delete(word: GraphWord, i: int) -> GraphWord:
    return word.delete(i)


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------

class CoefFn:
    """Coefficient function on the word's momentum blocks (one per factor)."""

    __slots__ = ("fn", "nargs")

    def __init__(self, fn, nargs: int):
        self.fn = fn
        self.nargs = nargs

    def __call__(self, momenta: tuple):
        if len(momenta) != self.nargs:
            raise CalculusError(f"expected {self.nargs} momentum blocks, got {len(momenta)}")
        return self.fn(momenta)

    def __add__(self, other: "CoefFn") -> "CoefFn":
        if self.nargs != other.nargs:
            raise CalculusError("cannot add coefficients of different arity")
        return CoefFn(lambda M, f=self.fn, g=other.fn: f(M) + g(M), self.nargs)

    def scaled(self, s) -> "CoefFn":
        return CoefFn(lambda M, f=self.fn: s * f(M), self.nargs)

    def insert(self, r: int, X) -> "CoefFn":
        """Freeze momentum X into block r (1-based), lowering the arity."""
        if not 1 <= r <= self.nargs:
            raise CalculusError(f"block index {r} out of range 1..{self.nargs}")
        def fn(M, f=self.fn, r=r, X=X):
            return f(M[: r - 1] + (X,) + M[r - 1 :])
        return CoefFn(fn, self.nargs - 1)

    def reindexed(self, source_of: tuple[int, ...]) -> "CoefFn":
        """Precompose with a block rearrangement: new block j feeds old slot.

        ``source_of[j]`` is the new-order position (0-based) holding the
        momentum of old block j.
        """
        def fn(M, f=self.fn, src=source_of):
            return f(tuple(M[s] for s in src))
        return CoefFn(fn, self.nargs)


def constant_coef(value, nargs: int = 0) -> CoefFn:
    return CoefFn(lambda M: value, nargs)


def zero_coef(nargs: int) -> CoefFn:
    return CoefFn(lambda M: 0, nargs)


# ---------------------------------------------------------------------------
# word group elements (wreath products over component classes)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WordGroupElement:
    """Per-position group elements plus a class-respecting position pull map.

    Applying the element moves the momentum at position ``pull[p]`` to
    position p and then acts with ``sigma[p]`` there.
    """

    word: GraphWord
    sigma: tuple
    pull: tuple[int, ...]  # 0-based positions, permuting only equal-key slots

    def apply(self, system: ActionSystem, momenta: tuple) -> tuple:
        return tuple(
            system.act(self.word.factors[p], self.sigma[p], momenta[self.pull[p]])
            for p in range(self.word.degree)
        )

    def compose(self, system: ActionSystem, other: "WordGroupElement") -> "WordGroupElement":
        sigma = tuple(
            system.compose(
                self.word.factors[p], self.sigma[p], other.sigma[self.pull[p]]
            )
            for p in range(self.word.degree)
        )
        pull = tuple(other.pull[self.pull[p]] for p in range(self.word.degree))
        return WordGroupElement(self.word, sigma, pull)

    def inverse(self, system: ActionSystem) -> "WordGroupElement":
        push = invert(tuple(p + 1 for p in self.pull))
        pull = tuple(push[p] - 1 for p in range(self.word.degree))
        sigma = tuple(
            system.inverse(self.word.factors[pull[p]], self.sigma[pull[p]])
            for p in range(self.word.degree)
        )
        return WordGroupElement(self.word, sigma, pull)


def word_group(system: ActionSystem, word: GraphWord):
    """Iterate the full group of the word exactly once per element."""
    classes: dict[str, list[int]] = {}
    for p, f in enumerate(word.factors):
        classes.setdefault(variable_key(f), []).append(p)
    class_list = sorted(classes.items())

    def per_class_options(positions):
        var = word.factors[positions[0]]
        elems = tuple(system.elements(var))
        for mu in permutations(range(len(positions))):
            for sig in product(elems, repeat=len(positions)):
                yield mu, sig

    for combo in product(*(per_class_options(pos) for _, pos in class_list)):
        sigma = [None] * word.degree
        pull = [0] * word.degree
        for (key, positions), (mu, sig) in zip(class_list, combo):
            for a, p in enumerate(positions):
                sigma[p] = sig[a]
                pull[p] = positions[mu[a]]
        yield WordGroupElement(word, tuple(sigma), tuple(pull))


def word_group_identity(system: ActionSystem, word: GraphWord) -> WordGroupElement:
    return WordGroupElement(
        word,
        tuple(system.identity(f) for f in word.factors),
        tuple(range(word.degree)),
    )


def wreath_order(system: ActionSystem, word: GraphWord) -> int:
    counts: dict[str, list] = {}
    for f in word.factors:
        k = variable_key(f)
        if k not in counts:
            counts[k] = [len(tuple(system.elements(f))), 0]
        counts[k][1] += 1
    n = 1
    for size, alpha in counts.values():
        n *= size**alpha
        for i in range(2, alpha + 1):
            n *= i
    return n


def act(system: ActionSystem, omega: WordGroupElement, f: CoefFn) -> CoefFn:
    """Left action on coefficients: (omega . f)(M) = f(omega^{-1} M)."""
    inv = omega.inverse(system)
    return CoefFn(lambda M, inv=inv: f.fn(inv.apply(system, M)), f.nargs)


def orbit_sum(system: ActionSystem, word: GraphWord, f: CoefFn) -> CoefFn:
    elems = list(word_group(system, word))
    def fn(M):
        total = 0
        for omega in elems:
            total = total + f.fn(omega.apply(system, M))
        return total
    return CoefFn(fn, f.nargs)


# ---------------------------------------------------------------------------
# reordering
# ---------------------------------------------------------------------------

def reorder_match(from_word: GraphWord, to_word: GraphWord) -> tuple[int, ...]:
    """First-fit assignment of from-positions to to-positions of equal key.

    Returns, per from-position (0-based), the to-position holding the same
    factor class.  Raises when the words are not commutatively equivalent.
    """
    if from_word.class_key != to_word.class_key:
        raise CalculusError("words are not equal in the free commutative monoid")
    used = [False] * to_word.degree
    to_keys = to_word.keys
    assignment = []
    for key in from_word.keys:
        for j, tk in enumerate(to_keys):
            if not used[j] and tk == key:
                used[j] = True
                assignment.append(j)
                break
    return tuple(assignment)


def reorder_coeff(coef: CoefFn, from_word: GraphWord, to_word: GraphWord) -> CoefFn:
    """Express a from-word coefficient as a function of to-word momenta."""
    return coef.reindexed(reorder_match(from_word, to_word))


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------

class Functional:
    """Finite formal sum of (coefficient, word) pairs modulo reordering."""

    def __init__(self, system: ActionSystem):
        self.system = system
        self.terms: dict[tuple[str, ...], tuple[GraphWord, CoefFn]] = {}

    @staticmethod
    def from_terms(system: ActionSystem, pairs) -> "Functional":
        out = Functional(system)
        for coef, word in pairs:
            out.add_term(coef, word)
        return out

    def add_term(self, coef: CoefFn, word: GraphWord):
        if coef.nargs != word.degree:
            raise CalculusError("coefficient arity does not match word degree")
        sorted_word, order = word.sorted()
        # order[j] = original position now at sorted slot j; the coefficient's
        # old block i must read the momentum at the slot where i landed.
        slot_of = invert(tuple(o + 1 for o in order))
        moved = coef.reindexed(tuple(slot_of[i] - 1 for i in range(word.degree)))
        key = sorted_word.keys
        if key in self.terms:
            old_word, old_coef = self.terms[key]
            self.terms[key] = (old_word, old_coef + moved)
        else:
            self.terms[key] = (sorted_word, moved)

    def words(self) -> list[GraphWord]:
        return [w for w, _ in self.terms.values()]

    def coefficient(self, word: GraphWord) -> CoefFn:
        """Coefficient reordered onto the given word's factor order."""
        sorted_word, _ = word.sorted()
        entry = self.terms.get(sorted_word.keys)
        if entry is None:
            return zero_coef(word.degree)
        stored_word, coef = entry
        return reorder_coeff(coef, stored_word, word)

    def empty_coefficient(self):
        entry = self.terms.get(())
        return entry[1](()) if entry else 0

    def scaled(self, s) -> "Functional":
        out = Functional(self.system)
        for key, (w, c) in self.terms.items():
            out.terms[key] = (w, c.scaled(s))
        return out

    def __add__(self, other: "Functional") -> "Functional":
        out = Functional(self.system)
        for w, c in self.terms.values():
            out.add_term(c, w)
        for w, c in other.terms.values():
            out.add_term(c, w)
        return out


def functional_product(U: Functional, T: Functional) -> Functional:
    """Ordered convolution: the coefficient of g collects all splits of g."""
    out = Functional(U.system)
    for wu, cu in U.terms.values():
        for wt, ct in T.terms.values():
            word = wu.concat(wt)
            nu, nt = cu.nargs, ct.nargs
            def fn(M, f=cu.fn, g=ct.fn, nu=nu):
                return f(M[:nu]) * g(M[nu:])
            out.add_term(CoefFn(fn, nu + nt), word)
    return out


def functional_derivative(U: Functional, h, X) -> Functional:
    """Derivative with respect to a connected variable h, evaluated at X."""
    if isinstance(h, G.ColoredGraph) and (h.is_empty or not G.is_connected(h)):
        raise CalculusError("derivative variable must be connected and non-empty")
    hkey = variable_key(h)
    out = Functional(U.system)
    for word, coef in U.terms.values():
        for r, key in enumerate(word.keys, 1):
            if key != hkey:
                continue
            for sigma in U.system.elements(h):
                out.add_term(
                    coef.insert(r, U.system.act(h, sigma, X)), word.delete(r)
                )
    return out


def graph_derivative(U: Functional, word: GraphWord) -> CoefFn:
    """Empty-word coefficient of the iterated derivative along the word."""
    def fn(M):
        cur = U
        for factor, X in zip(word.factors, M):
            cur = functional_derivative(cur, factor, X)
        return cur.empty_coefficient()
    return CoefFn(fn, word.degree)


def borel(V: Functional) -> Functional:
    """Rescale each word's coefficient by 1/|G(word)|."""
    out = Functional(V.system)
    for key, (w, c) in V.terms.items():
        out.terms[key] = (w, c.scaled(Fraction(1, wreath_order(V.system, w))))
    return out


def leibniz_rhs(U: Functional, T: Functional, word: GraphWord) -> CoefFn:
    """Direct product-rule formula for the graph derivative of U*T."""
    target = word.class_key
    contributions: list[CoefFn] = []
    for wu, cu in U.terms.values():
        for wt, ct in T.terms.values():
            pair = wu.concat(wt)
            if pair.class_key != target:
                continue
            nu = cu.nargs
            def fn(M, f=cu.fn, g=ct.fn, nu=nu):
                return f(M[:nu]) * g(M[nu:])
            contributions.append(reorder_coeff(CoefFn(fn, pair.degree), pair, word))
    elems = list(word_group(U.system, word))
    def fn(M):
        total = 0
        for omega in elems:
            N = omega.apply(U.system, M)
            for c in contributions:
                total = total + c.fn(N)
        return total
    return CoefFn(fn, word.degree)


# ---------------------------------------------------------------------------
# factorization splits
# ---------------------------------------------------------------------------

def position_splits(word: GraphWord):
    """All ordered two-block position splits (C, B) of the word."""
    n = word.degree
    for mask in range(1 << n):
        left = tuple(word.factors[i] for i in range(n) if mask >> i & 1)
        right = tuple(word.factors[i] for i in range(n) if not mask >> i & 1)
        yield GraphWord(left), GraphWord(right)


def class_splits(word: GraphWord):
    """Ordered class pairs (C, B) with C ⊔ B equal to the word's class."""
    seen = set()
    for left, right in position_splits(word):
        key = (left.class_key, right.class_key)
        if key not in seen:
            seen.add(key)
            yield left, right
