import itertools
import random

import pytest

from symlift.complexes import (
    NuclearVertex,
    VertexAutomorphismSpec,
    all_folds,
    components_without,
    enumerate_whitehead_poset,
    fold_apply,
    nuclear_ball,
    order_complex_homology,
    quotient_star_check,
    stabilizer_generators,
    stabilizer_soundness,
    tree_from_units,
    tree_symmetries,
    trivial_tree,
    vertex_aut_eval,
    _generated_subgroup,
)
from symlift.symaut import (
    compose,
    eval_generator_word,
    is_inner,
    outer_equal,
    parse_generator_word,
    rho_i,
)
from symlift.words import WordError, free_context, parse_word, torsion_context

F3 = free_context(3)
H3 = torsion_context(3, 2)
PATH3 = tree_from_units(3, [[1, 3], [3, 2]])  # b1 - u - b3 - u' - b2


# -- trees and validation -------------------------------------------------------


def test_tree_conditions_enforced():
    with pytest.raises(WordError):
        tree_from_units(3, [[1, 2]])  # label 3 missing
    with pytest.raises(WordError):
        tree_from_units(3, [[1, 2, 3], [1]])  # valence-1 unlabelled vertex
    with pytest.raises(WordError):
        tree_from_units(3, [[1, 2], [2, 3], [3, 1]])  # cycle


def test_tree_canonical_identifies_isomorphic_labelings():
    a = tree_from_units(3, [[1, 3], [3, 2]])
    b = tree_from_units(3, [[2, 3], [3, 1]])
    assert a == b
    c = tree_from_units(3, [[1, 2], [2, 3]])
    assert a != c
    assert a.type_encoding() == c.type_encoding()


# -- folds ----------------------------------------------------------------------


def test_fold_examples():
    assert fold_apply(PATH3, 3, 0, 1) == trivial_tree(3)
    with pytest.raises(WordError):
        fold_apply(trivial_tree(3), 1, 0, 0)
    with pytest.raises(WordError):
        fold_apply(PATH3, 1, 0, 1)  # label 1 not incident to both
    # a rank-4 tree whose fold at the doubly-attached label collapses it
    t4 = tree_from_units(4, [[1, 2, 3], [3, 4]])
    assert fold_apply(t4, 3, 0, 1) == trivial_tree(4)


def test_folds_reduce_unlabelled_count_by_one():
    poset = enumerate_whitehead_poset(4)
    for t in poset.elements:
        for _, _, _, folded in all_folds(t):
            assert folded.unlabelled_count == t.unlabelled_count - 1


# -- the poset -------------------------------------------------------------------


def test_poset_counts():
    assert len(enumerate_whitehead_poset(2).elements) == 1
    p3 = enumerate_whitehead_poset(3)
    assert len(p3.elements) == 4
    assert len(p3.covers()) == 3
    with pytest.raises(WordError):
        enumerate_whitehead_poset(1)


def test_poset_rank3_is_exactly_trivial_plus_paths():
    expected = {trivial_tree(3).canonical()}
    for center in (1, 2, 3):
        rest = [l for l in (1, 2, 3) if l != center]
        expected.add(
            tree_from_units(3, [[rest[0], center], [center, rest[1]]]).canonical()
        )
    got = {t.canonical() for t in enumerate_whitehead_poset(3).elements}
    assert got == expected


def test_max_chain_cardinality():
    for n in (2, 3, 4, 5):
        assert enumerate_whitehead_poset(n).max_chain_cardinality() == n - 1


def test_trivial_tree_is_unique_minimum():
    p = enumerate_whitehead_poset(4)
    bottom = p.index_of(trivial_tree(4))
    assert all(p.leq[bottom][j] for j in range(len(p.elements)))
    minima = [
        i
        for i in range(len(p.elements))
        if all(not p.leq[j][i] for j in range(len(p.elements)) if j != i)
    ]
    assert minima == [bottom]


# -- homology --------------------------------------------------------------------


def test_homology_point():
    report = order_complex_homology(enumerate_whitehead_poset(2))
    assert report.euler_characteristic == 1 and report.is_reduced_acyclic


def test_homology_rank_3_star():
    report = order_complex_homology(enumerate_whitehead_poset(3))
    assert report.simplex_counts == (4, 3)
    assert report.euler_characteristic == 1 and report.is_reduced_acyclic


def test_homology_rank_4():
    report = order_complex_homology(enumerate_whitehead_poset(4))
    assert report.euler_characteristic == 1 and report.is_reduced_acyclic


# -- vertex automorphisms ---------------------------------------------------------


def test_components_and_valences():
    comps = components_without(PATH3, 3)
    assert [sorted(c) for c in comps] == [[1], [2]]
    assert len(components_without(trivial_tree(3), 1)) == 1


def test_vertex_aut_example_matches_generator():
    spec = VertexAutomorphismSpec(PATH3, 3, (1, 0, 0))
    assert vertex_aut_eval(spec, F3) == eval_generator_word(
        parse_generator_word("a[1,3]", 3), F3
    )


def test_vertex_aut_on_trivial_tree_is_inner():
    spec = VertexAutomorphismSpec(trivial_tree(3), 1, (0, 2, 2))
    assert is_inner(vertex_aut_eval(spec, F3))


def test_vertex_aut_constancy_errors():
    # the trivial tree leaves a single component, so unequal powers fail
    with pytest.raises(WordError):
        VertexAutomorphismSpec(trivial_tree(3), 1, (0, 1, 2))
    with pytest.raises(WordError):
        VertexAutomorphismSpec(PATH3, 3, (1, 0, 1))  # base power must be 0


def test_vertex_aut_normalization_is_outer_equal():
    spec = VertexAutomorphismSpec(PATH3, 3, (1, 2, 0))
    norm = spec.normalized()
    assert norm.powers == (-1, 0, 0)
    assert outer_equal(vertex_aut_eval(spec, F3), vertex_aut_eval(norm, F3))


def test_vertex_aut_inverse_and_torsion_powers():
    spec = VertexAutomorphismSpec(PATH3, 3, (2, 0, 0))
    f = vertex_aut_eval(spec, F3)
    g = vertex_aut_eval(spec.inverse_spec(), F3)
    assert compose(f, g).is_identity()
    h = vertex_aut_eval(spec, H3)  # exponents collapse mod 2
    assert h.is_identity()


def test_rho_inversion_of_vertex_automorphisms():
    rng = random.Random(99)
    for n in (3, 4):
        ctx = free_context(n)
        poset = enumerate_whitehead_poset(n)
        samples = 0
        while samples < 40:
            t = rng.choice(poset.elements)
            v = rng.randint(1, n)
            comps = components_without(t, v)
            if len(comps) < 2:
                continue
            powers = [0] * n
            for comp in comps[:-1]:
                p = rng.randint(-2, 2)
                for l in comp:
                    powers[l - 1] = p
            spec = VertexAutomorphismSpec(t, v, tuple(powers))
            if not any(spec.powers):
                continue
            samples += 1
            f = vertex_aut_eval(spec, ctx)
            r = eval_generator_word(rho_i(n, v), ctx)
            assert compose(compose(r, f), r) == vertex_aut_eval(spec.inverse_spec(), ctx)
            # squares are commutators with the matching inversion
            assert compose(f, f) == compose(
                compose(compose(f, r), f.inverse()), r
            )


def test_distinct_vertex_automorphisms_commute_up_to_inner():
    rng = random.Random(101)
    poset = enumerate_whitehead_poset(4)
    ctx = free_context(4)
    checked = 0
    while checked < 25:
        t = rng.choice(poset.elements)
        vs = [v for v in range(1, 5) if len(components_without(t, v)) >= 2]
        if len(vs) < 2:
            continue
        v1, v2 = rng.sample(vs, 2)
        specs = []
        for v in (v1, v2):
            comps = components_without(t, v)
            powers = [0] * 4
            for comp in comps[:-1]:
                p = rng.randint(-2, 2)
                for l in comp:
                    powers[l - 1] = p
            specs.append(VertexAutomorphismSpec(t, v, tuple(powers)))
        f, g = (vertex_aut_eval(s, ctx) for s in specs)
        assert outer_equal(compose(f, g), compose(g, f))
        checked += 1


# -- stabilizers -------------------------------------------------------------------


def test_stabilizer_trivial_tree():
    gens = stabilizer_generators(trivial_tree(3))
    assert gens.vertex_auts == ()
    assert len(gens.inversions) == 3
    assert len(_generated_subgroup(gens.symmetries, 3)) == 6


def test_stabilizer_path_tree():
    gens = stabilizer_generators(PATH3)
    assert [str(s.generator_word()) for s in gens.vertex_auts] == ["a[1,3]"]
    group = _generated_subgroup(gens.symmetries, 3)
    assert group == {(1, 2, 3), (2, 1, 3)}


def test_stabilizer_rank4_example():
    t = tree_from_units(4, [[4, 1, 2], [4, 3]])
    gens = stabilizer_generators(t)
    assert len(gens.vertex_auts) == 1
    group = _generated_subgroup(gens.symmetries, 4)
    assert group == {(1, 2, 3, 4), (2, 1, 3, 4)}


def test_stabilizer_soundness_across_rank_4():
    for t in enumerate_whitehead_poset(4).elements:
        assert all(ok for _, ok in stabilizer_soundness(t))


def test_acts_without_rotations_on_chains():
    # a symmetry preserving a chain (as a set) must fix each member: members
    # of a chain have distinct unlabelled counts, hence distinct types
    for n in (3, 4):
        poset = enumerate_whitehead_poset(n)
        pairs = [
            (i, j)
            for i in range(len(poset.elements))
            for j in range(len(poset.elements))
            if i != j and poset.leq[i][j]
        ]
        for i, j in pairs:
            a, b = poset.elements[i], poset.elements[j]
            for perm in tree_symmetries(a):
                image_pair = {a.relabelled(perm).canonical(), b.relabelled(perm).canonical()}
                if image_pair == {a.canonical(), b.canonical()}:
                    assert a.relabelled(perm).canonical() == a.canonical()
                    assert b.relabelled(perm).canonical() == b.canonical()


# -- nuclear vertices ---------------------------------------------------------------


def test_nuclear_vertex_identifies_inner_translates():
    v = NuclearVertex.from_basis(
        (parse_word("z3 z1 z3", H3), parse_word("z2", H3), parse_word("z3", H3)), H3
    )
    w = NuclearVertex.from_basis(
        (parse_word("z1", H3), parse_word("z3 z2 z3", H3), parse_word("z3", H3)), H3
    )
    assert v == w


def test_nuclear_vertex_inversion_translate_is_fixed():
    v0 = NuclearVertex.standard(F3)
    r1 = eval_generator_word(rho_i(3, 1), F3)
    assert v0.translated(r1) == v0


def test_nuclear_ball_counts():
    assert nuclear_ball(H3, 0).counts() == [1]
    ball = nuclear_ball(H3, 1)
    assert ball.counts() == [1, 3]
    # each distance-1 vertex is the translate by a single conjugation move
    moves = [
        NuclearVertex.standard(H3)
        .translated(eval_generator_word(parse_generator_word(f"a[{i},{j}]", 3), H3))
        .encode()
        for i, j in itertools.permutations((1, 2, 3), 2)
    ]
    assert set(ball.levels[1]) <= set(moves)


def test_nuclear_ball_free_context_flagged():
    ball = nuclear_ball(F3, 1, bound=1)
    assert ball.bound_limited and ball.bound == 1
    assert ball.counts() == [1, 6]
    with pytest.raises(WordError):
        nuclear_ball(F3, 1)  # bound mandatory over the free group


# -- quotient map -------------------------------------------------------------------


def test_quotient_translates():
    v0 = NuclearVertex.standard(F3)
    q0 = v0.project()
    gk = eval_generator_word(parse_generator_word("a[2,3] r[1] a[2,3]^-1", 3), F3)
    assert v0.translated(gk).project() == q0
    ga = eval_generator_word(parse_generator_word("a[1,2]", 3), F3)
    assert v0.translated(ga).project() != q0


def test_quotient_star_check_passes():
    for n in (3, 4):
        report = quotient_star_check(n, random.Random(31 + n), samples=15)
        assert report.all_pass, report.to_json()

