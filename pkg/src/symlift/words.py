"""Exact word algebra in free groups and free products of finite cyclic groups.

Two families of groups are supported, selected by a ``GroupContext``:

* the free group on ``n`` generators (``torsion is None``), and
* the free product of ``n`` copies of the cyclic group of order ``k``
  (``torsion == k``).

Words are stored in syllable normal form: a tuple of ``(generator, exponent)``
pairs with nonzero exponents (taken in ``1..k-1`` for torsion contexts) and no
two adjacent syllables on the same generator.  The empty tuple is the
identity.  Everything here is an immutable value and every operation is a
pure function, so words are safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

Syllable = tuple[int, int]


class WordError(ValueError):
    """Raised for malformed words, context mismatches and bad indices."""


@dataclass(frozen=True)
class GroupContext:
    """Ambient group: rank ``n`` plus optional torsion modulus ``k``.

    ``letter`` is presentation metadata only (how generators print); it does
    not participate in equality, so the even-word copy of a free group (letter
    ``x``) compares equal to the plain one of the same rank.
    """

    rank: int
    torsion: Optional[int] = None
    letter: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise WordError(f"rank must be >= 1, got {self.rank}")
        if self.torsion is not None and self.torsion < 2:
            raise WordError(f"torsion modulus must be >= 2, got {self.torsion}")
        if not self.letter:
            object.__setattr__(self, "letter", "z" if self.torsion else "y")

    @property
    def is_free(self) -> bool:
        return self.torsion is None

    def describe(self) -> str:
        if self.is_free:
            return f"F:{self.rank}"
        return f"H:{self.rank}:{self.torsion}"


def free_context(rank: int, letter: str = "y") -> GroupContext:
    return GroupContext(rank, None, letter)


def torsion_context(rank: int, modulus: int, letter: str = "z") -> GroupContext:
    return GroupContext(rank, modulus, letter)


def parse_context(text: str) -> GroupContext:
    parts = text.strip().split(":")
    if parts and parts[0] == "F" and len(parts) == 2:
        return free_context(int(parts[1]))
    if parts and parts[0] == "H" and len(parts) == 3:
        return torsion_context(int(parts[1]), int(parts[2]))
    raise WordError(f"bad context {text!r}; expected F:n or H:n:k")


def _push(out: list[Syllable], gen: int, exp: int, modulus: Optional[int]) -> None:
    if modulus is not None:
        exp %= modulus
    if exp == 0:
        return
    if out and out[-1][0] == gen:
        merged = out[-1][1] + exp
        if modulus is not None:
            merged %= modulus
        out.pop()
        if merged != 0:
            out.append((gen, merged))
        return
    out.append((gen, exp))


@dataclass(frozen=True)
class Word:
    """Reduced word.  Construct through :func:`normalize` or ``Word.of``."""

    ctx: GroupContext
    syllables: tuple[Syllable, ...]

    def __len__(self) -> int:
        return len(self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def __mul__(self, other: "Word") -> "Word":
        _require_same_ctx(self.ctx, other.ctx)
        out = list(self.syllables)
        for gen, exp in other.syllables:
            _push(out, gen, exp, self.ctx.torsion)
        return Word(self.ctx, tuple(out))

    def inverse(self) -> "Word":
        k = self.ctx.torsion
        inv = [(g, -e if k is None else (-e) % k) for g, e in reversed(self.syllables)]
        return Word(self.ctx, tuple(inv))

    def pow(self, m: int) -> "Word":
        if m == 0:
            return Word(self.ctx, ())
        base = self if m > 0 else self.inverse()
        out = base
        for _ in range(abs(m) - 1):
            out = out * base
        return out

    def conjugated_by(self, g: "Word") -> "Word":
        """g * self * g^{-1}."""
        return g * self * g.inverse()

    def letter_length(self) -> int:
        """Number of generator letters (sum of |exponents|)."""
        if self.ctx.is_free:
            return sum(abs(e) for _, e in self.syllables)
        return sum(e for _, e in self.syllables)

    def exponent_sum(self) -> int:
        return sum(e for _, e in self.syllables)

    def sort_key(self) -> tuple:
        return (len(self.syllables), self.syllables)

    def __str__(self) -> str:
        return format_word(self)


def _require_same_ctx(a: GroupContext, b: GroupContext) -> None:
    if a != b:
        raise WordError(f"context mismatch: {a.describe()} vs {b.describe()}")


def normalize(raw: Iterable[Syllable], ctx: GroupContext) -> Word:
    """Reduce a raw syllable sequence to normal form.

    Idempotent, and a monoid homomorphism from raw sequences to the group:
    interleaving normalization with concatenation never changes the result.
    """
    out: list[Syllable] = []
    for gen, exp in raw:
        if not 1 <= gen <= ctx.rank:
            raise WordError(f"generator index {gen} out of range 1..{ctx.rank}")
        if not isinstance(exp, int):
            raise WordError(f"exponent {exp!r} is not an integer")
        _push(out, gen, exp, ctx.torsion)
    return Word(ctx, tuple(out))


def identity(ctx: GroupContext) -> Word:
    return Word(ctx, ())


def generator(ctx: GroupContext, i: int, exp: int = 1) -> Word:
    return normalize([(i, exp)], ctx)


_SYLLABLE_RE = re.compile(r"^([xyz])(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str, ctx: GroupContext) -> Word:
    text = text.strip()
    if text in ("", "e"):
        return identity(ctx)
    raw: list[Syllable] = []
    letters = set()
    for token in text.split():
        m = _SYLLABLE_RE.match(token)
        if m is None:
            raise WordError(f"bad syllable {token!r}")
        letters.add(m.group(1))
        raw.append((int(m.group(2)), int(m.group(3) or 1)))
    if len(letters) > 1:
        raise WordError(f"mixed generator letters in {text!r}")
    return normalize(raw, ctx)


def format_word(w: Word) -> str:
    if not w.syllables:
        return "e"
    letter = w.ctx.letter
    parts = []
    for gen, exp in w.syllables:
        parts.append(f"{letter}{gen}" if exp == 1 else f"{letter}{gen}^{exp}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Conjugacy
# ---------------------------------------------------------------------------


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w = p * c * p^{-1}`` with ``c`` cyclically reduced.

    Returns ``(p, c)``.  A word is cyclically reduced when its first and last
    syllables involve distinct generators (or it has at most one syllable).
    """
    ctx = w.ctx
    prefix: list[Syllable] = []
    core = list(w.syllables)
    while len(core) >= 2 and core[0][0] == core[-1][0]:
        gen, a = core[0]
        _, b = core[-1]
        middle = core[1:-1]
        _push(prefix, gen, a, ctx.torsion)
        merged = a + b if ctx.torsion is None else (a + b) % ctx.torsion
        if merged != 0:
            # middle cannot end in `gen`, so this append stays reduced
            middle.append((gen, merged))
        core = middle
    return Word(ctx, tuple(prefix)), Word(ctx, tuple(core))


def primitive_root(core: Word) -> Word:
    """Smallest word r with core = r^d; requires core cyclically reduced."""
    sylls = core.syllables
    if not sylls:
        return core
    if len(sylls) == 1:
        gen, exp = sylls[0]
        e = 1 if (core.ctx.torsion is not None or exp > 0) else -1
        return Word(core.ctx, ((gen, e),))
    n = len(sylls)
    for d in range(1, n + 1):
        if n % d:
            continue
        if sylls == sylls[:d] * (n // d):
            return Word(core.ctx, sylls[:d])
    return core


def centralizer_root(w: Word) -> Word:
    """Generator r with centralizer(w) = <p r p^{-1}> for w = p c p^{-1}."""
    p, core = cyclic_reduce(w)
    root = primitive_root(core)
    return p * root * p.inverse()


@dataclass(frozen=True)
class ConjugacyWitness:
    conjugator: Word

    def check(self, u: Word, v: Word) -> bool:
        return u.conjugated_by(self.conjugator) == v


def _rotation_matches(cu: tuple[Syllable, ...], cv: tuple[Syllable, ...]) -> list[int]:
    return [j for j in range(len(cu)) if cu[j:] + cu[:j] == cv]


def conjugacy_witness(u: Word, v: Word) -> Optional[ConjugacyWitness]:
    """Conjugator g with g u g^{-1} = v, or None.

    Deterministic: among all valid conjugators the shortest is returned, ties
    broken by the syllable tuple.
    """
    _require_same_ctx(u.ctx, v.ctx)
    ctx = u.ctx
    if ctx.rank == 1:
        # rank-1 groups are abelian: conjugacy is equality
        return ConjugacyWitness(identity(ctx)) if u == v else None
    p, cu = cyclic_reduce(u)
    q, cv = cyclic_reduce(v)
    if len(cu) != len(cv):
        return None
    base: list[Word] = []
    if len(cu) <= 1:
        if cu != cv:
            return None
        base.append(q * p.inverse())
    else:
        rotations = _rotation_matches(cu.syllables, cv.syllables)
        if not rotations:
            return None
        for j in rotations:
            s = Word(ctx, cu.syllables[:j])
            base.append(q * s.inverse() * p.inverse())
    root = primitive_root(cu) if cu else identity(ctx)
    best: Optional[Word] = None
    for g0 in base:
        candidates = [g0]
        if root:
            # beyond this range |g0 p root^t p^{-1}| grows monotonically
            span = len(g0) + 2 * len(p) + len(root) + 2
            axis = p * root * p.inverse()
            if ctx.torsion is not None and len(root) == 1:
                span = min(span, ctx.torsion - 1)
            for t in range(1, span + 1):
                candidates.append(g0 * axis.pow(t))
                candidates.append(g0 * axis.pow(-t))
        for g in candidates:
            if u.conjugated_by(g) == v and (best is None or g.sort_key() < best.sort_key()):
                best = g
    return ConjugacyWitness(best) if best is not None else None


# ---------------------------------------------------------------------------
# Inner automorphism detection
# ---------------------------------------------------------------------------


def _trailing_exponent(w: Word, gen: int) -> int:
    if w.syllables and w.syllables[-1][0] == gen:
        return w.syllables[-1][1]
    return 0


def _leading_exponent(w: Word, gen: int) -> int:
    if w.syllables and w.syllables[0][0] == gen:
        return w.syllables[0][1]
    return 0


def coset_intersection(
    constraints: Sequence[tuple[Word, int, Word]], ctx: GroupContext
) -> Optional[Word]:
    """Solve ``w`` in the intersection of cosets ``A_i <g_{t_i}> B_i^{-1}``.

    ``constraints`` is a list of ``(A_i, t_i, B_i)`` whose targets ``t_i`` are
    pairwise distinct (as for generator images of a symmetric automorphism).

    Writing ``w = A_1 g^m B_1^{-1}``, membership in the second coset demands
    that the middle ``g_{t_1}``-syllable of ``A_2^{-1} A_1 g^m B_1^{-1} B_2``
    vanish (the reduced form otherwise retains a ``t_1``-syllable, while
    elements of ``<g_{t_2}>`` have none, and ``t_2 != t_1``).  That pins
    ``m = -(a+b)`` where ``a``/``b`` are the adjacent ``t_1``-exponents, so a
    single candidate remains; it is then verified against every constraint.
    Any two solutions differ by a central element, and centers here are
    trivial for rank >= 2, so the solution is unique when it exists.
    """
    if not constraints:
        return identity(ctx)
    a1, t1, b1 = constraints[0]
    if len(constraints) == 1:
        # one coset: any exponent works; take the shortest representative
        best = a1 * b1.inverse()
        span = len(a1) + len(b1) + 2
        if ctx.torsion is not None:
            span = min(span, ctx.torsion - 1)
        for m in range(-span, span + 1):
            cand = a1 * generator(ctx, t1).pow(m) * b1.inverse()
            if cand.sort_key() < best.sort_key():
                best = cand
        return best
    a2, t2, b2 = constraints[1]
    if t1 == t2:
        raise WordError("coset targets must be distinct")
    x = a2.inverse() * a1
    y = b1.inverse() * b2
    m = -(_trailing_exponent(x, t1) + _leading_exponent(y, t1))
    w = a1 * generator(ctx, t1).pow(m) * b1.inverse()
    for a_i, t_i, b_i in constraints:
        if not _is_power_of(a_i.inverse() * w * b_i, t_i):
            return None
    return w


def _is_power_of(w: Word, gen: int) -> bool:
    if len(w.syllables) == 0:
        return True
    return len(w.syllables) == 1 and w.syllables[0][0] == gen


def generator_conjugate_shape(w: Word) -> Optional[tuple[Word, int, int]]:
    """Decompose ``w = c * g_t^s * c^{-1}`` with ``s = +-1``; None otherwise."""
    p, core = cyclic_reduce(w)
    if len(core) != 1:
        return None
    gen, exp = core.syllables[0]
    if w.ctx.is_free:
        if exp not in (1, -1):
            return None
        return p, gen, exp
    if exp != 1:
        return None
    return p, gen, 1


def inner_witness(
    images: Sequence[Word], ctx: GroupContext, strict: bool = True
) -> Optional[Word]:
    """Word ``w`` with ``w g_i w^{-1} = images[i]`` for all i, or None.

    With ``strict`` any image that is not a conjugate of a generator or its
    inverse raises; otherwise such maps simply report None (not inner).  In
    torsion contexts the candidate conjugators form the finite coset
    ``c_1 <g_1>``; in free contexts the single viable exponent is pinned by
    the second constraint (see :func:`coset_intersection`).
    """
    if len(images) != ctx.rank:
        raise WordError(f"expected {ctx.rank} images, got {len(images)}")
    shapes = []
    for i, img in enumerate(images, start=1):
        _require_same_ctx(img.ctx, ctx)
        shape = generator_conjugate_shape(img)
        if shape is None:
            if strict:
                raise WordError(f"image {i} is not a conjugate of a generator: {img}")
            return None
        shapes.append(shape)
    e = identity(ctx)
    constraints = []
    for i, (conj, target, sign) in enumerate(shapes, start=1):
        if target != i or sign != 1:
            return None
        constraints.append((conj, target, e))
    if ctx.rank == 1:
        return e  # rank 1: conjugation is trivial, the map must be identity
    if ctx.torsion is not None:
        c1 = constraints[0][0]
        matches = []
        for j in range(ctx.torsion):
            w = c1 * generator(ctx, 1).pow(j)
            if all(generator(ctx, i).conjugated_by(w) == img for i, img in enumerate(images, 1)):
                matches.append(w)
        if not matches:
            return None
        return min(matches, key=Word.sort_key)
    return coset_intersection(constraints, ctx)


# ---------------------------------------------------------------------------
# Reduction mod k and the even-word basis
# ---------------------------------------------------------------------------


def project_mod_k(w: Word, k: int) -> Word:
    """Homomorphic image under generator-wise reduction mod ``k``."""
    if not w.ctx.is_free:
        raise WordError("project_mod_k expects a free-context word")
    if k < 2:
        raise WordError(f"modulus must be >= 2, got {k}")
    target = torsion_context(w.ctx.rank, k)
    return normalize(w.syllables, target)


def even_to_x(w: Word) -> Word:
    """Rewrite an even word of the order-2 free product in the basis
    ``x_i = z_i z_n`` (with ``x_n`` standing for the identity).

    The input pairs up as ``(z_a z_b)(z_c z_d)...`` and each pair ``z_a z_b``
    expands to ``z_a z_n . z_n z_b = x_a x_b^{-1}``.  Exact inverse of
    :func:`expand_x` after reduction.
    """
    ctx = w.ctx
    if ctx.is_free or ctx.torsion != 2:
        raise WordError("even_to_x expects a word over an order-2 free product")
    if ctx.rank < 2:
        raise WordError("even_to_x needs rank >= 2")
    if len(w) % 2:
        raise WordError(f"odd-length word: {w}")
    n = ctx.rank
    target = free_context(n - 1, letter="x")
    raw: list[Syllable] = []
    sylls = w.syllables
    for t in range(0, len(sylls), 2):
        a, b = sylls[t][0], sylls[t + 1][0]
        if a != n:
            raw.append((a, 1))
        if b != n:
            raw.append((b, -1))
    return normalize(raw, target)


def expand_x(w: Word, n: int) -> Word:
    """Substitute ``x_i -> z_i z_n`` into a rank ``n-1`` x-word."""
    if not w.ctx.is_free or w.ctx.rank != n - 1:
        raise WordError(f"expected a free word of rank {n - 1}")
    target = torsion_context(n, 2)
    raw: list[Syllable] = []
    for gen, exp in w.syllables:
        step = [(gen, 1), (n, 1)] if exp > 0 else [(n, 1), (gen, 1)]
        for _ in range(abs(exp)):
            raw.extend(step)
    return normalize(raw, target)
