"""Symmetric automorphisms as first-class values.

A symmetric automorphism sends each generator to a conjugate of a generator
(or of an inverse generator, in free contexts).  It is stored as one
``(conjugator, target, sign)`` triple per generator, with the conjugator in a
canonical form that never ends in a syllable of the target generator.

Automorphisms are usually built by evaluating a word in the presentation
letters

* ``a[i,j]``: conjugate generator i by generator j, fix the rest,
* ``r[i]``: invert generator i (the identity in torsion contexts),
* ``s[i,j]``: swap generators i and j,

and evaluation is a homomorphism: ``eval(uv) = eval(u) . eval(v)`` where
``.`` is composition acting on the right argument first.  Automorphisms built
by evaluation remember their source word, which gives exact inversion for
free; raw automorphisms fall back to a bounded greedy solver.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .words import (
    GroupContext,
    Word,
    WordError,
    coset_intersection,
    cyclic_reduce,
    format_word,
    generator,
    identity as identity_word,
)

# letters are ("a", i, j, exp) with exp = +-1, ("r", i) and ("s", i, j)
Letter = tuple


class InverseUnavailable(RuntimeError):
    """Inversion of a sourceless automorphism exceeded the solver bound."""


def letter_inverse(letter: Letter) -> Letter:
    if letter[0] == "a":
        _, i, j, e = letter
        return ("a", i, j, -e)
    return letter


def letter_str(letter: Letter) -> str:
    if letter[0] == "a":
        _, i, j, e = letter
        return f"a[{i},{j}]" + ("" if e == 1 else "^-1")
    if letter[0] == "r":
        return f"r[{letter[1]}]"
    return f"s[{letter[1]},{letter[2]}]"


_LETTER_RE = re.compile(r"^([ars])\[(\d+),?(\d+)?\](?:\^(-?1))?$")


@dataclass(frozen=True)
class GeneratorWord:
    """Word in the presentation letters; the input format of the pipelines."""

    rank: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self) -> None:
        for letter in self.letters:
            kind = letter[0]
            if kind == "a":
                _, i, j, e = letter
                ok = i != j and 1 <= i <= self.rank and 1 <= j <= self.rank and e in (1, -1)
            elif kind == "r":
                ok = len(letter) == 2 and 1 <= letter[1] <= self.rank
            elif kind == "s":
                _, i, j = letter
                ok = i != j and 1 <= i <= self.rank and 1 <= j <= self.rank
            else:
                ok = False
            if not ok:
                raise WordError(f"bad letter {letter!r} for rank {self.rank}")

    def __mul__(self, other: "GeneratorWord") -> "GeneratorWord":
        if self.rank != other.rank:
            raise WordError("rank mismatch")
        return GeneratorWord(self.rank, self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "GeneratorWord":
        return GeneratorWord(
            self.rank, tuple(letter_inverse(l) for l in reversed(self.letters))
        )

    def free_cancel(self) -> "GeneratorWord":
        """Cancel adjacent exactly-inverse letters (valid in any quotient)."""
        out: list[Letter] = []
        for letter in self.letters:
            if out and out[-1] == letter_inverse(letter):
                out.pop()
            else:
                out.append(letter)
        return GeneratorWord(self.rank, tuple(out))

    def __str__(self) -> str:
        return format_generator_word(self)


def parse_generator_word(text: str, rank: int) -> GeneratorWord:
    text = text.strip()
    if text in ("", "e"):
        return GeneratorWord(rank)
    letters: list[Letter] = []
    for token in text.split():
        m = _LETTER_RE.match(token)
        if m is None:
            raise WordError(f"bad generator letter {token!r}")
        kind, i, j, exp = m.group(1), int(m.group(2)), m.group(3), m.group(4)
        if kind == "a":
            if j is None:
                raise WordError(f"a-letter needs two indices: {token!r}")
            letters.append(("a", i, int(j), int(exp or 1)))
        elif kind == "r":
            if j is not None or exp is not None:
                raise WordError(f"bad r-letter {token!r}")
            letters.append(("r", i))
        else:
            if j is None or exp is not None:
                raise WordError(f"bad s-letter {token!r}")
            letters.append(("s", i, int(j)))
    return GeneratorWord(rank, tuple(letters))


def format_generator_word(gw: GeneratorWord) -> str:
    if not gw.letters:
        return "e"
    return " ".join(letter_str(l) for l in gw.letters)


def alpha(rank: int, i: int, j: int, exp: int = 1) -> GeneratorWord:
    return GeneratorWord(rank, (("a", i, j, exp),))


def rho_i(rank: int, i: int) -> GeneratorWord:
    return GeneratorWord(rank, (("r", i),))


def rho(rank: int) -> GeneratorWord:
    """The product r[1] ... r[n] inverting every generator."""
    return GeneratorWord(rank, tuple(("r", i) for i in range(1, rank + 1)))


def swap(rank: int, i: int, j: int) -> GeneratorWord:
    return GeneratorWord(rank, (("s", i, j),))


def all_letters(rank: int, include_r: bool = True) -> list[Letter]:
    letters: list[Letter] = []
    for i in range(1, rank + 1):
        for j in range(1, rank + 1):
            if i != j:
                letters.append(("a", i, j, 1))
                letters.append(("a", i, j, -1))
    if include_r:
        letters.extend(("r", i) for i in range(1, rank + 1))
    for i in range(1, rank + 1):
        for j in range(i + 1, rank + 1):
            letters.append(("s", i, j))
    return letters


# ---------------------------------------------------------------------------
# The automorphism value
# ---------------------------------------------------------------------------

Image = tuple[Word, int, int]  # (conjugator, target, sign)


def _canonical_image(conj: Word, target: int, sign: int) -> Image:
    # absorb a trailing target-power: (w g^m) g^s (w g^m)^{-1} = w g^s w^{-1}
    sylls = conj.syllables
    while sylls and sylls[-1][0] == target:
        sylls = sylls[:-1]
    return Word(conj.ctx, sylls), target, sign


@dataclass(frozen=True)
class SymmetricAut:
    """Automorphism with images ``g_i -> c_i g_{t_i}^{s_i} c_i^{-1}``."""

    ctx: GroupContext
    images: tuple[Image, ...]
    source: Optional[GeneratorWord] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        n = self.ctx.rank
        if len(self.images) != n:
            raise WordError(f"expected {n} images, got {len(self.images)}")
        targets = sorted(t for _, t, _ in self.images)
        if targets != list(range(1, n + 1)):
            raise WordError(f"targets are not a permutation: {targets}")
        for conj, target, sign in self.images:
            if conj.ctx != self.ctx:
                raise WordError("image conjugator context mismatch")
            if self.ctx.is_free:
                if sign not in (1, -1):
                    raise WordError(f"bad sign {sign}")
            elif sign != 1:
                raise WordError("torsion images cannot invert generators")
            if conj.syllables and conj.syllables[-1][0] == target:
                raise WordError("conjugator not canonical (ends in target)")

    # -- basic structure ----------------------------------------------------

    def image_word(self, i: int) -> Word:
        conj, target, sign = self.images[i - 1]
        return conj * generator(self.ctx, target, sign) * conj.inverse()

    def image_words(self) -> tuple[Word, ...]:
        return tuple(self.image_word(i) for i in range(1, self.ctx.rank + 1))

    def permutation(self) -> tuple[int, ...]:
        """One-line permutation: generator i maps into the class of t(i)."""
        return tuple(t for _, t, _ in self.images)

    def signs(self) -> tuple[int, ...]:
        return tuple(s for _, _, s in self.images)

    def is_identity(self) -> bool:
        return all(
            not conj and t == i and s == 1
            for i, (conj, t, s) in enumerate(self.images, start=1)
        )

    def apply(self, w: Word) -> Word:
        """Image of a word (substitute generator images and reduce)."""
        if w.ctx != self.ctx:
            raise WordError("context mismatch")
        out = identity_word(self.ctx)
        for gen, exp in w.syllables:
            conj, target, sign = self.images[gen - 1]
            out = out * conj * generator(self.ctx, target, sign * exp) * conj.inverse()
        return out

    def apply_basis(self, basis: Sequence[Word]) -> tuple[Word, ...]:
        return tuple(self.apply(b) for b in basis)

    def then(self, other: "SymmetricAut") -> "SymmetricAut":
        return compose(other, self)

    def inverse(self) -> "SymmetricAut":
        if self.source is not None:
            return eval_generator_word(self.source.inverse(), self.ctx)
        return _solve_inverse(self)

    def conjugator_size(self) -> int:
        return sum(len(conj) for conj, _, _ in self.images)

    def to_json(self) -> list[dict]:
        return [
            {"conjugator": format_word(conj), "target": t, "sign": s}
            for conj, t, s in self.images
        ]

    def __str__(self) -> str:
        parts = []
        letter = self.ctx.letter
        for i in range(1, self.ctx.rank + 1):
            parts.append(f"{letter}{i} -> {format_word(self.image_word(i))}")
        return "; ".join(parts)


def aut_from_json(data: Iterable[dict], ctx: GroupContext) -> SymmetricAut:
    from .words import parse_word

    images = []
    for entry in data:
        conj = parse_word(entry["conjugator"], ctx)
        images.append(_canonical_image(conj, int(entry["target"]), int(entry["sign"])))
    return SymmetricAut(ctx, tuple(images))


def identity_aut(ctx: GroupContext) -> SymmetricAut:
    e = identity_word(ctx)
    return SymmetricAut(
        ctx, tuple((e, i, 1) for i in range(1, ctx.rank + 1)), GeneratorWord(ctx.rank)
    )


def _decompose_image(w: Word) -> Image:
    prefix, core = cyclic_reduce(w)
    if len(core) != 1:
        raise WordError(f"image is not a conjugate of a generator: {w}")
    gen, exp = core.syllables[0]
    if w.ctx.is_free:
        if exp not in (1, -1):
            raise WordError(f"image core has exponent {exp}: {w}")
        return prefix, gen, exp
    if exp != 1:
        raise WordError(f"image core has exponent {exp}: {w}")
    return prefix, gen, 1


def act_letter(letter: Letter, ctx: GroupContext) -> SymmetricAut:
    n = ctx.rank
    e = identity_word(ctx)
    images: list[Image] = [(e, i, 1) for i in range(1, n + 1)]
    kind = letter[0]
    if kind == "a":
        _, i, j, exp = letter
        images[i - 1] = (generator(ctx, j, exp), i, 1)
    elif kind == "r":
        i = letter[1]
        if ctx.is_free:
            images[i - 1] = (e, i, -1)
        # in torsion contexts generators are involutions: r[i] acts trivially
    else:
        _, i, j = letter
        images[i - 1] = (e, j, 1)
        images[j - 1] = (e, i, 1)
    return SymmetricAut(ctx, tuple(images), GeneratorWord(n, (letter,)))


def compose(f: SymmetricAut, g: SymmetricAut) -> SymmetricAut:
    """f . g, acting as g first: (f.g)(w) = f(g(w))."""
    if f.ctx != g.ctx:
        raise WordError("context mismatch")
    images = tuple(
        _canonical_image(*_decompose_image(f.apply(g.image_word(i))))
        for i in range(1, f.ctx.rank + 1)
    )
    source = None
    if f.source is not None and g.source is not None:
        source = (f.source * g.source).free_cancel()
    return SymmetricAut(f.ctx, images, source)


def compose_all(auts: Sequence[SymmetricAut], ctx: GroupContext) -> SymmetricAut:
    out = identity_aut(ctx)
    for a in auts:
        out = compose(out, a)
    return out


def eval_generator_word(gw: GeneratorWord, ctx: GroupContext) -> SymmetricAut:
    if gw.rank != ctx.rank:
        raise WordError(f"rank mismatch: word has {gw.rank}, context {ctx.rank}")
    out = identity_aut(ctx)
    for letter in gw.letters:
        out = compose(out, act_letter(letter, ctx))
    return SymmetricAut(out.ctx, out.images, gw)


# ---------------------------------------------------------------------------
# Outer equality
# ---------------------------------------------------------------------------


def conjugating_witness(f: SymmetricAut, g: SymmetricAut) -> Optional[Word]:
    """Word w with f = conj_w . g, i.e. f(u) = w g(u) w^{-1} for all u.

    Since conjugation preserves each image's target and sign, those must
    match; what remains is a simultaneous-conjugacy coset intersection, which
    is exact in both contexts.  Any witness is unique for rank >= 2.
    """
    if f.ctx != g.ctx:
        raise WordError("context mismatch")
    ctx = f.ctx
    constraints = []
    for (cf, tf, sf), (cg, tg, sg) in zip(f.images, g.images):
        if tf != tg or sf != sg:
            return None
        constraints.append((cf, tf, cg))
    if ctx.rank == 1:
        return identity_word(ctx)  # rank 1: inner is trivial, images matched
    if ctx.torsion is not None:
        c1, t1, d1 = constraints[0]
        for j in range(ctx.torsion):
            w = c1 * generator(ctx, t1).pow(j) * d1.inverse()
            if all(
                f.image_word(i) == g.image_word(i).conjugated_by(w)
                for i in range(1, ctx.rank + 1)
            ):
                return w
        return None
    return coset_intersection(constraints, ctx)


def outer_equal(f: SymmetricAut, g: SymmetricAut) -> bool:
    """Equality in the outer quotient: is g^{-1} . f inner?"""
    return conjugating_witness(f, g) is not None


def inner_witness_of(f: SymmetricAut) -> Optional[Word]:
    return conjugating_witness(f, identity_aut(f.ctx))


def is_inner(f: SymmetricAut) -> bool:
    return inner_witness_of(f) is not None


def _solve_inverse(f: SymmetricAut, budget: int = 6000) -> SymmetricAut:
    """Bounded inversion for automorphisms without a source word.

    Best-first search over right-compositions with single letters, ordered
    by total conjugator size (peaks make pure greedy stall).  At size zero
    the remaining permutation/sign part inverts directly.  Past the node
    budget the failure is honest: InverseUnavailable, never a wrong answer.
    """
    import heapq

    ctx = f.ctx
    start = SymmetricAut(ctx, f.images, None)
    letters = all_letters(ctx.rank, include_r=ctx.is_free)
    counter = 0
    heap = [(start.conjugator_size(), 0, counter, start, ())]
    seen = {start.images}
    expanded = 0
    while heap and expanded < budget:
        size, _, _, current, trail = heapq.heappop(heap)
        expanded += 1
        if size == 0:
            perm = current.permutation()
            signs = current.signs()
            e = identity_word(ctx)
            inv_images: list[Image] = [None] * ctx.rank  # type: ignore[list-item]
            for i in range(1, ctx.rank + 1):
                inv_images[perm[i - 1] - 1] = (e, i, signs[i - 1])
            pure_inv = SymmetricAut(ctx, tuple(inv_images))
            word = GeneratorWord(ctx.rank, trail)
            result = compose(eval_generator_word(word, ctx), pure_inv)
            if not compose(f, result).is_identity():  # pragma: no cover
                raise InverseUnavailable("search produced a non-inverse")
            return result
        for letter in letters:
            cand = compose(current, act_letter(letter, ctx))
            if cand.images in seen:
                continue
            seen.add(cand.images)
            counter += 1
            heapq.heappush(
                heap,
                (cand.conjugator_size(), len(trail) + 1, counter, cand, trail + (letter,)),
            )
    raise InverseUnavailable(f"inverse search budget exhausted ({budget} nodes)")


# ---------------------------------------------------------------------------
# Semidirect normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalForm:
    """Decomposition word = pure . r-part . permutation, exact in Aut."""

    pure: GeneratorWord
    rho: tuple[int, ...]
    perm: tuple[int, ...]

    def recompose(self) -> GeneratorWord:
        rank = len(self.rho)
        letters = list(self.pure.letters)
        letters.extend(("r", i + 1) for i, bit in enumerate(self.rho) if bit)
        letters.extend(_transposition_letters(self.perm))
        return GeneratorWord(rank, tuple(letters))


def _transposition_letters(perm: tuple[int, ...]) -> list[Letter]:
    """Letters s[a,b] whose left-to-right evaluation is the permutation."""
    letters: list[Letter] = []
    seen = set()
    for start in range(1, len(perm) + 1):
        if start in seen or perm[start - 1] == start:
            seen.add(start)
            continue
        cycle = [start]
        nxt = perm[start - 1]
        while nxt != start:
            cycle.append(nxt)
            nxt = perm[nxt - 1]
        seen.update(cycle)
        # (c1 c2 ... cl) = (c1 c2)(c2 c3)...(c_{l-1} c_l) under left-first eval
        for a, b in zip(cycle, cycle[1:]):
            letters.append(("s", a, b))
    return letters


def permutation_aut(perm: tuple[int, ...], ctx: GroupContext) -> SymmetricAut:
    gw = GeneratorWord(ctx.rank, tuple(_transposition_letters(perm)))
    return eval_generator_word(gw, ctx)


def semidirect_normal_form(gw: GeneratorWord, cancel: bool = True) -> NormalForm:
    """Push every r- and s-letter to the right.

    Uses r_k a[i,j] r_k = a[i,j]^{-1 if k=j} and s a[i,j] s^{-1} =
    a[s(i),s(j)]; the result evaluates to the same automorphism exactly.
    With ``cancel`` the accumulated pure part is freely reduced.
    """
    n = gw.rank
    pure: list[Letter] = []
    rho_bits = [0] * n
    perm = list(range(1, n + 1))  # perm[i-1] = sigma(i)

    def emit(letter: Letter) -> None:
        if cancel and pure and pure[-1] == letter_inverse(letter):
            pure.pop()
        else:
            pure.append(letter)

    for letter in gw.letters:
        kind = letter[0]
        if kind == "a":
            _, i, j, e = letter
            si, sj = perm[i - 1], perm[j - 1]
            emit(("a", si, sj, e * (-1 if rho_bits[sj - 1] else 1)))
        elif kind == "r":
            rho_bits[perm[letter[1] - 1] - 1] ^= 1
        else:
            _, i, j = letter
            perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    return NormalForm(GeneratorWord(n, tuple(pure)), tuple(rho_bits), tuple(perm))


# ---------------------------------------------------------------------------
# Presentation verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelationCheck:
    family: str
    instance: tuple
    holds: bool
    witness: Optional[str] = None


def _exact_identity(gw: GeneratorWord, ctx: GroupContext) -> bool:
    return eval_generator_word(gw, ctx).is_identity()


def _commutator(u: GeneratorWord, v: GeneratorWord) -> GeneratorWord:
    return u * v * u.inverse() * v.inverse()


def _check_disjoint_commute(n, ctx):
    for i, j, k, l in itertools.permutations(range(1, n + 1), 4):
        gw = _commutator(alpha(n, i, j), alpha(n, k, l))
        yield RelationCheck("disjoint_commute", (i, j, k, l), _exact_identity(gw, ctx))


def _check_shared_head_commute(n, ctx):
    for i, j, k in itertools.permutations(range(1, n + 1), 3):
        gw = _commutator(alpha(n, i, k), alpha(n, j, k))
        yield RelationCheck("shared_head_commute", (i, j, k), _exact_identity(gw, ctx))


def _check_triple(n, ctx):
    for i, j, k in itertools.permutations(range(1, n + 1), 3):
        left = alpha(n, i, j) * alpha(n, j, k) * alpha(n, i, k)
        right = alpha(n, i, k) * alpha(n, j, k) * alpha(n, i, j)
        holds = eval_generator_word(left, ctx) == eval_generator_word(right, ctx)
        yield RelationCheck("triple", (i, j, k), holds)


def _check_r_conjugation(n, ctx):
    for k in range(1, n + 1):
        for i, j in itertools.permutations(range(1, n + 1), 2):
            conj = rho_i(n, k) * alpha(n, i, j) * rho_i(n, k)
            expected = alpha(n, i, j, -1 if k == j else 1)
            holds = eval_generator_word(conj, ctx) == eval_generator_word(expected, ctx)
            yield RelationCheck("r_conjugation", (k, i, j), holds)


def _check_s_conjugation(n, ctx):
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            tr = {a: b, b: a}
            for i, j in itertools.permutations(range(1, n + 1), 2):
                conj = swap(n, a, b) * alpha(n, i, j) * swap(n, a, b)
                expected = alpha(n, tr.get(i, i), tr.get(j, j))
                holds = eval_generator_word(conj, ctx) == eval_generator_word(expected, ctx)
                yield RelationCheck("s_conjugation", (a, b, i, j), holds)


def _check_orders(n, ctx):
    for i in range(1, n + 1):
        yield RelationCheck("r_involution", (i,), _exact_identity(rho_i(n, i) * rho_i(n, i), ctx))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            yield RelationCheck(
                "r_commute", (i, j), _exact_identity(_commutator(rho_i(n, i), rho_i(n, j)), ctx)
            )
            yield RelationCheck(
                "s_involution", (i, j), _exact_identity(swap(n, i, j) * swap(n, i, j), ctx)
            )


def _check_symmetric_group(n, ctx):
    for i, j, k in itertools.permutations(range(1, n + 1), 3):
        left = swap(n, i, j) * swap(n, j, k) * swap(n, i, j)
        right = swap(n, i, k)
        holds = eval_generator_word(left, ctx) == eval_generator_word(right, ctx)
        yield RelationCheck("s_braid", (i, j, k), holds)
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            tr = {a: b, b: a}
            for i in range(1, n + 1):
                conj = swap(n, a, b) * rho_i(n, i) * swap(n, a, b)
                holds = eval_generator_word(conj, ctx) == eval_generator_word(
                    rho_i(n, tr.get(i, i)), ctx
                )
                yield RelationCheck("s_r_conjugation", (a, b, i), holds)


def _check_inner_product(n, ctx):
    for j in range(1, n + 1):
        letters = tuple(("a", i, j, 1) for i in range(1, n + 1) if i != j)
        f = eval_generator_word(GeneratorWord(n, letters), ctx)
        w = inner_witness_of(f)
        expected = generator(ctx, j)
        yield RelationCheck(
            "outer_product",
            (j,),
            w is not None and w == expected,
            None if w is None else format_word(w),
        )


RELATION_FAMILIES = (
    _check_disjoint_commute,
    _check_shared_head_commute,
    _check_triple,
    _check_r_conjugation,
    _check_s_conjugation,
    _check_orders,
    _check_symmetric_group,
    _check_inner_product,
)


@dataclass(frozen=True)
class RelationReport:
    rank: int
    checks: tuple[RelationCheck, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.holds for c in self.checks)

    def failures(self) -> list[RelationCheck]:
        return [c for c in self.checks if not c.holds]

    def to_json(self) -> dict:
        families: dict[str, dict] = {}
        for c in self.checks:
            fam = families.setdefault(c.family, {"instances": 0, "failed": []})
            fam["instances"] += 1
            if not c.holds:
                fam["failed"].append(list(c.instance))
        return {"rank": self.rank, "all_pass": self.all_pass, "families": families}


def check_relations(n: int) -> RelationReport:
    """Evaluate every defining-relation instance at rank ``n`` (exact)."""
    if n < 2:
        raise WordError("check_relations needs rank >= 2")
    from .words import free_context

    ctx = free_context(n)
    checks: list[RelationCheck] = []
    for family in RELATION_FAMILIES:
        checks.extend(family(n, ctx))
    return RelationReport(n, tuple(checks))
