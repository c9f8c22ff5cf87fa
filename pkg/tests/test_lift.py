import itertools
import random

import pytest

from symlift.lift import (
    Restriction,
    iota,
    kernel_verdict,
    kernel_verdict_batch,
    lift_restrict,
    reduce_aut,
    reduce_mod,
)
from symlift.symaut import (
    GeneratorWord,
    all_letters,
    alpha,
    compose,
    eval_generator_word,
    parse_generator_word,
    rho,
    rho_i,
)
from symlift.words import (
    WordError,
    free_context,
    parse_word,
    torsion_context,
)

F2 = free_context(2)
F3 = free_context(3)
H3 = torsion_context(3, 2)


def random_gw(rng, n, max_len=12):
    letters = all_letters(n)
    return GeneratorWord(n, tuple(rng.choice(letters) for _ in range(rng.randint(0, max_len))))


# -- reduction ----------------------------------------------------------------


def test_reduce_examples():
    assert reduce_aut(eval_generator_word(rho(3), F3)).is_identity()
    h = reduce_aut(eval_generator_word(alpha(3, 1, 2), F3))
    assert h.image_word(1) == parse_word("z2 z1 z2", H3)
    assert h.image_word(2) == parse_word("z2", H3)
    # compose-then-reduce agrees with reduce-then-compose, and the square
    # of a conjugation move dies
    sq = reduce_aut(eval_generator_word(parse_generator_word("a[1,2] a[1,2]", 3), F3))
    assert sq == compose(h, h)
    assert sq.is_identity()


def test_reduce_requires_free_context():
    with pytest.raises(WordError):
        reduce_aut(eval_generator_word(alpha(3, 1, 2), H3))
    with pytest.raises(WordError):
        reduce_mod(eval_generator_word(rho_i(3, 1), F3), 3)


def test_reduce_is_homomorphism():
    rng = random.Random(1)
    for _ in range(300):
        f = eval_generator_word(random_gw(rng, 3), F3)
        g = eval_generator_word(random_gw(rng, 3), F3)
        assert reduce_aut(compose(f, g)) == compose(reduce_aut(f), reduce_aut(g))


def test_torsion_evaluation_is_reduction_of_free_evaluation():
    # the verdict pipeline evaluates directly downstairs; this is the
    # equivariance that justifies it
    for n in (2, 3, 4):
        rng = random.Random(40 + n)
        for _ in range(300):
            gw = random_gw(rng, n)
            lhs = reduce_aut(eval_generator_word(gw, free_context(n)))
            rhs = eval_generator_word(gw, torsion_context(n, 2))
            assert lhs == rhs


# -- restriction --------------------------------------------------------------


def test_restriction_examples():
    h = eval_generator_word(parse_generator_word("s[1,2]", 2), torsion_context(2, 2))
    r = lift_restrict(h)
    assert [str(w) for w in r.images] == ["x1^-1"]
    r_id = lift_restrict(eval_generator_word(GeneratorWord(3), H3))
    assert [str(w) for w in r_id.images] == ["x1", "x2"]
    r_a = lift_restrict(eval_generator_word(alpha(3, 1, 2), H3))
    assert [str(w) for w in r_a.images] == ["x2 x1^-1 x2", "x2"]


def test_restriction_is_homomorphism():
    rng = random.Random(2)
    for _ in range(200):
        h1 = eval_generator_word(random_gw(rng, 3), H3)
        h2 = eval_generator_word(random_gw(rng, 3), H3)
        composed = lift_restrict(compose(h1, h2))
        stacked = lift_restrict(h2).then(lift_restrict(h1))
        assert composed.images == stacked.images


def test_inverting_generators_commutator_is_inner():
    # the automorphism x1 -> x1^-1, xi -> xi x1^-1 commutes with generator
    # inversion up to inner
    ctx = free_context(3, letter="x")
    sigma = Restriction(
        ctx,
        (
            parse_word("x1^-1", ctx),
            parse_word("x2 x1^-1", ctx),
            parse_word("x3 x1^-1", ctx),
        ),
    )
    inv = iota(ctx)
    comm = sigma.then(inv).then(sigma).then(inv)
    assert comm.inner_witness() is not None


# -- kernel verdicts ----------------------------------------------------------


def test_kernel_examples():
    v = kernel_verdict(rho(3), "both")
    assert v.verdict == "in" and v.agree is True
    v = kernel_verdict(alpha(3, 1, 2), "both")
    assert v.verdict == "out" and v.agree is True
    v = kernel_verdict(parse_generator_word("a[2,3] r[1] r[2] r[3] a[2,3]^-1", 3), "both")
    assert v.verdict == "in" and v.agree is True


def test_kernel_single_routes():
    assert kernel_verdict(rho(4), "inner-in-H").verdict == "in"
    assert kernel_verdict(rho(4), "lift").verdict == "in"
    assert kernel_verdict(alpha(4, 2, 3), "lift").verdict == "out"


def test_route_agreement_random():
    for n in (3, 4):
        rng = random.Random(300 + n)
        for _ in range(250):
            gw = GeneratorWord(
                n, tuple(rng.choice(all_letters(n)) for _ in range(rng.randint(0, 20)))
            )
            v = kernel_verdict(gw, "both")
            assert v.agree is True and v.verdict in ("in", "out")


def test_conjugates_of_single_inversions_are_in_kernel():
    rng = random.Random(17)
    pure = [l for l in all_letters(3) if l[0] == "a"]
    for _ in range(100):
        conj = GeneratorWord(3, tuple(rng.choice(pure) for _ in range(rng.randint(0, 6))))
        gw = conj * rho_i(3, rng.randint(1, 3)) * conj.inverse()
        assert kernel_verdict(gw, "inner-in-H").verdict == "in"


def test_rank_two_collapses_through_the_lift_route():
    in_kernel = []
    for bits in itertools.product((0, 1), repeat=3):
        letters = []
        if bits[0]:
            letters.append(("r", 1))
        if bits[1]:
            letters.append(("r", 2))
        if bits[2]:
            letters.append(("s", 1, 2))
        gw = GeneratorWord(2, tuple(letters))
        v = kernel_verdict(gw, "both")
        in_kernel.append(v.routes["lift"])
        assert v.verdict == ("in" if v.routes["lift"] else "out")
    assert all(in_kernel) and len(in_kernel) == 8
    # the swap shows the direct route diverging at rank 2
    v = kernel_verdict(GeneratorWord(2, (("s", 1, 2),)), "both")
    assert v.routes["lift"] and not v.routes["inner-in-H"]
    assert v.verdict == "in"


def test_batch_matches_sequential_and_order():
    rng = random.Random(9)
    words = [random_gw(rng, 3) for _ in range(40)]
    seq = [v.to_json() for v in kernel_verdict_batch(words, "both", threads=1)]
    par = [v.to_json() for v in kernel_verdict_batch(words, "both", threads=4)]
    assert seq == par


def test_verdict_json_shape():
    payload = kernel_verdict(rho(3), "both").to_json()
    assert payload["verdict"] == "in"
    assert payload["agree"] is True
    assert set(payload["routes"]) == {"inner-in-H", "lift"}
