import random

import pytest

from symlift.braid import (
    BraidWord,
    artin_action,
    bounded_kernel_search,
    eta_image,
    parse_braid,
)
from symlift.symaut import compose, inner_witness_of
from symlift.words import WordError, free_context, parse_word, torsion_context

F3 = free_context(3)
H3 = torsion_context(3, 2)


def test_braid_word_reduction_and_parsing():
    b = BraidWord(3, (1, -1, 2))
    assert b.letters == (2,)
    assert parse_braid("1 2 -1", 3).letters == (1, 2, -1)
    assert parse_braid("e", 3).letters == ()
    with pytest.raises(WordError):
        BraidWord(3, (3,))
    with pytest.raises(WordError):
        parse_braid("x", 3)


def test_artin_generator_action():
    f = artin_action(BraidWord(3, (1,)))
    assert f.image_word(1) == parse_word("y1 y2 y1^-1", F3)
    assert f.image_word(2) == parse_word("y1", F3)
    assert f.image_word(3) == parse_word("y3", F3)
    assert artin_action(BraidWord(3)).is_identity()


def test_braid_relations_exhaustive():
    for n in (2, 3, 4, 5):
        for i in range(1, n - 1):
            assert artin_action(BraidWord(n, (i, i + 1, i))) == artin_action(
                BraidWord(n, (i + 1, i, i + 1))
            )
        for i in range(1, n - 1):
            for j in range(i + 2, n):
                assert artin_action(BraidWord(n, (i, j))) == artin_action(
                    BraidWord(n, (j, i))
                )


def test_inverse_braid_inverts_action():
    b = BraidWord(3, (1, -2, 1, 2))
    assert compose(artin_action(b), artin_action(b.inverse())).is_identity()


def test_eta_examples():
    e = eta_image(BraidWord(3, (1,)), 2)
    assert e.image_word(1) == parse_word("z1 z2 z1", H3)
    assert e.image_word(2) == parse_word("z1", H3)
    assert eta_image(BraidWord(3), 2).is_identity()
    # the square of a generator reduces to a non-inner automorphism
    assert inner_witness_of(eta_image(BraidWord(3, (1, 1)), 2)) is None
    with pytest.raises(WordError):
        eta_image(BraidWord(3, (1,)), 1)


def test_eta_is_homomorphism():
    rng = random.Random(4)
    for _ in range(100):
        u = BraidWord(3, tuple(rng.choice((1, 2, -1, -2)) for _ in range(rng.randint(0, 6))))
        v = BraidWord(3, tuple(rng.choice((1, 2, -1, -2)) for _ in range(rng.randint(0, 6))))
        for k in (2, 3):
            assert eta_image(u * v, k) == compose(eta_image(u, k), eta_image(v, k))


def test_central_braids_act_innerly_both_sides():
    # the full twist and generator squares at two strands are inner upstairs,
    # so the search must not mistake them for kernel elements
    full_twist = artin_action(BraidWord(3, (1, 2, 1, 2, 1, 2)))
    assert inner_witness_of(full_twist) is not None
    assert inner_witness_of(eta_image(BraidWord(2, (1, 1)), 2)) is not None
    assert inner_witness_of(artin_action(BraidWord(2, (1, 1)))) is not None


def test_search_reports_are_empty():
    for strands, modulus, max_len in ((2, 2, 4), (3, 2, 4), (3, 3, 3)):
        report = bounded_kernel_search(strands, modulus, max_len)
        assert report.flagged == ()
        assert report.words_checked > 0


def test_search_counts_reduced_words():
    report = bounded_kernel_search(2, 2, 4)
    # freely reduced words over one generator pair: 2 per length
    assert report.words_checked == 8
    report = bounded_kernel_search(3, 2, 3)
    assert report.words_checked == 4 + 4 * 3 + 4 * 9
