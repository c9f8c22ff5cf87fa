"""The computable lifting pipeline.

Three maps are chained here:

* ``reduce_aut``: push a symmetric automorphism of the free group down to the
  order-2 free product by reducing every conjugator mod 2 (signs die because
  the generators become involutions);
* ``lift_restrict``: restrict an automorphism of the order-2 free product to
  its even-word subgroup, a free group of rank ``n-1`` with basis
  ``x_i = z_i z_n``;
* ``kernel_verdict``: decide membership in the kernel of the reduction, by
  the direct route (is the reduced automorphism inner?) and by the lift route
  (is the restriction inner, or inner after inverting every ``x_i``?).

For rank >= 3 the two routes provably agree; at rank 2 only the lift route is
authoritative (the generator swap restricts to the inverting map, collapsing
the direct route), and there the lift route reports everything in the kernel.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

from .symaut import GeneratorWord, SymmetricAut, eval_generator_word
from .words import (
    GroupContext,
    Word,
    WordError,
    even_to_x,
    free_context,
    format_word,
    generator,
    identity as identity_word,
    inner_witness,
    project_mod_k,
    torsion_context,
)

Route = Literal["inner-in-H", "lift", "both"]


def reduce_mod(f: SymmetricAut, k: int) -> SymmetricAut:
    """Reduce generators mod ``k``; conjugators project, targets survive.

    For ``k == 2`` signs are dropped (an involution equals its inverse).  For
    larger ``k`` an inverted generator has no symmetric image, so signs must
    all be +1 (braid images always are).
    """
    if not f.ctx.is_free:
        raise WordError("reduce_mod expects a free-context automorphism")
    if k < 2:
        raise WordError(f"modulus must be >= 2, got {k}")
    if k > 2 and any(s != 1 for s in f.signs()):
        raise WordError("cannot reduce a generator-inverting automorphism mod k > 2")
    ctx = torsion_context(f.ctx.rank, k)
    images = []
    for conj, target, _sign in f.images:
        pc = project_mod_k(conj, k)
        sylls = pc.syllables
        while sylls and sylls[-1][0] == target:
            sylls = sylls[:-1]
        images.append((Word(ctx, sylls), target, 1))
    return SymmetricAut(ctx, tuple(images), f.source)


def reduce_aut(f: SymmetricAut) -> SymmetricAut:
    """The mod-2 reduction of a symmetric automorphism of the free group."""
    return reduce_mod(f, 2)


@dataclass(frozen=True)
class Restriction:
    """Automorphism of the even-word free group, given by x-images."""

    ctx: GroupContext
    images: tuple[Word, ...]

    def apply(self, w: Word) -> Word:
        out = identity_word(self.ctx)
        for gen, exp in w.syllables:
            out = out * self.images[gen - 1].pow(exp)
        return out

    def then(self, other: "Restriction") -> "Restriction":
        """Composition acting with ``self`` first."""
        return Restriction(self.ctx, tuple(other.apply(img) for img in self.images))

    def compose_iota(self) -> "Restriction":
        """Post-inversion of arguments: x_i -> image(x_i)^{-1}."""
        return Restriction(self.ctx, tuple(img.inverse() for img in self.images))

    def inner_witness(self) -> Optional[Word]:
        return inner_witness(self.images, self.ctx, strict=False)

    def to_json(self) -> dict:
        return {
            "rank": self.ctx.rank,
            "images": {f"x{i}": format_word(w) for i, w in enumerate(self.images, 1)},
        }


def iota(ctx: GroupContext) -> Restriction:
    """The automorphism inverting every x-generator."""
    return Restriction(ctx, tuple(generator(ctx, i, -1) for i in range(1, ctx.rank + 1)))


def lift_restrict(h: SymmetricAut) -> Restriction:
    """Restriction of an order-2 free-product automorphism to even words.

    Computes ``h(x_i) = h(z_i) h(z_n)`` and rewrites it in the x-basis; exact
    because parity is preserved (each generator image has odd length).
    """
    ctx = h.ctx
    if ctx.is_free or ctx.torsion != 2:
        raise WordError("lift_restrict expects an order-2 free-product automorphism")
    if ctx.rank < 2:
        raise WordError("lift_restrict needs rank >= 2")
    n = ctx.rank
    hzn = h.image_word(n)
    images = tuple(even_to_x(h.image_word(i) * hzn) for i in range(1, n))
    return Restriction(free_context(n - 1, letter="x"), images)


@dataclass(frozen=True)
class LiftResult:
    restriction: Restriction
    inner_witness: Optional[Word]
    composed_with_iota: bool

    @property
    def in_kernel(self) -> bool:
        return self.inner_witness is not None


def lift_route(h: SymmetricAut) -> LiftResult:
    """Kernel test through the restriction: inner, or inner after iota."""
    r = lift_restrict(h)
    w = r.inner_witness()
    if w is not None:
        return LiftResult(r, w, False)
    w = r.compose_iota().inner_witness()
    return LiftResult(r, w, w is not None)


@dataclass(frozen=True)
class KernelVerdict:
    rank: int
    word: GeneratorWord
    route: Route
    verdict: Literal["in", "out", "unknown"]
    routes: dict
    agree: Optional[bool]
    h_witness: Optional[Word]
    lift_result: Optional[LiftResult]

    def to_json(self) -> dict:
        payload: dict = {
            "rank": self.rank,
            "word": str(self.word),
            "route": self.route,
            "verdict": self.verdict,
            "routes": self.routes,
        }
        if self.agree is not None:
            payload["agree"] = self.agree
        witnesses: dict = {}
        if self.h_witness is not None:
            witnesses["inner_in_h"] = format_word(self.h_witness)
        if self.lift_result is not None and self.lift_result.inner_witness is not None:
            witnesses["lift_inner"] = format_word(self.lift_result.inner_witness)
            witnesses["composed_with_iota"] = self.lift_result.composed_with_iota
        payload["witnesses"] = witnesses
        return payload


def kernel_verdict(gw: GeneratorWord, route: Route = "both") -> KernelVerdict:
    """Membership in the kernel of the mod-2 reduction, with witnesses.

    At rank 2 the ``both`` route still reports agreement, but the verdict
    follows the lift route alone.  The solvers are exact, so the ``unknown``
    verdict is never produced here; it remains in the schema for callers.
    """
    n = gw.rank
    if n < 2:
        raise WordError("kernel_verdict needs rank >= 2")
    # evaluate directly in the torsion context: equal to reducing the free
    # evaluation (letter actions commute with the projection), but immune to
    # the exponential image growth the free side can exhibit
    h = eval_generator_word(gw, torsion_context(n, 2))
    routes: dict = {}
    h_witness = None
    lift_result = None
    if route in ("inner-in-H", "both"):
        h_witness = inner_witness(h.image_words(), h.ctx, strict=False)
        routes["inner-in-H"] = h_witness is not None
    if route in ("lift", "both"):
        lift_result = lift_route(h)
        routes["lift"] = lift_result.in_kernel
    if route == "both":
        agree = routes["inner-in-H"] == routes["lift"]
        authoritative = routes["lift"] if n == 2 else routes["inner-in-H"]
    else:
        agree = None
        authoritative = routes[route]
    return KernelVerdict(
        rank=n,
        word=gw,
        route=route,
        verdict="in" if authoritative else "out",
        routes=routes,
        agree=agree,
        h_witness=h_witness,
        lift_result=lift_result,
    )


def kernel_verdict_batch(
    words: Sequence[GeneratorWord], route: Route = "both", threads: int = 1
) -> list[KernelVerdict]:
    """Batch verdicts, emitted in input order regardless of thread count."""
    if threads <= 1:
        return [kernel_verdict(gw, route) for gw in words]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda gw: kernel_verdict(gw, route), words))
