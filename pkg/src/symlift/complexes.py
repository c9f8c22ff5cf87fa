"""Labelled bipartite trees, the fold poset, and vertex automorphisms.

A labelled bipartite tree on rank ``n`` has ``n`` labelled vertices (one per
basis index), some unlabelled vertices, and edges that each join a labelled
vertex to an unlabelled one.  Valence-1 vertices must be labelled, which
forces every unlabelled vertex to have valence >= 2 and caps the unlabelled
count at ``n - 1``.  Folding two edges at a labelled vertex merges their
unlabelled endpoints; fold-reachability partially orders the trees over a
fixed basis, with the star-shaped trivial tree as the unique minimum.

The same poset, read with its labels as the factors of a free-product basis,
is the star of a nuclear vertex in the complex the outer symmetric
automorphism group acts on; this module also evaluates vertex automorphisms,
emits stabilizer generators, explores nuclear vertices through shared stars,
and checks that mod-2 projection of labels collapses exactly the reduction
kernel.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .symaut import (
    GeneratorWord,
    SymmetricAut,
    compose,
    eval_generator_word,
    identity_aut,
    rho_i,
)
from .words import (
    GroupContext,
    Word,
    WordError,
    format_word,
    free_context,
    generator,
    generator_conjugate_shape,
    identity as identity_word,
    project_mod_k,
    torsion_context,
)

Edge = tuple[int, int]  # (label, unlabelled id)


@dataclass(frozen=True)
class LabelledBipartiteTree:
    rank: int
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        labels = {l for l, _ in self.edges}
        units = {u for _, u in self.edges}
        n, m = self.rank, len(units)
        if labels != set(range(1, n + 1)):
            raise WordError(f"labels {sorted(labels)} must be exactly 1..{n}")
        if len(self.edges) != n + m - 1:
            raise WordError("edge count wrong for a tree")
        if not self._connected(labels, units):
            raise WordError("tree is not connected")
        for u in units:
            if sum(1 for _, uu in self.edges if uu == u) < 2:
                raise WordError(f"unlabelled vertex {u} has valence < 2")
        if m > n - 1:
            raise WordError("too many unlabelled vertices")  # pragma: no cover

    def _connected(self, labels: set[int], units: set[int]) -> bool:
        nodes = {("L", l) for l in labels} | {("U", u) for u in units}
        if not nodes:
            return False
        adj: dict = {v: [] for v in nodes}
        for l, u in self.edges:
            adj[("L", l)].append(("U", u))
            adj[("U", u)].append(("L", l))
        seen = set()
        stack = [next(iter(nodes))]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(adj[v])
        return seen == nodes

    @property
    def unlabelled_count(self) -> int:
        return len({u for _, u in self.edges})

    def unit_ids(self) -> list[int]:
        return sorted({u for _, u in self.edges})

    def label_neighbors(self, label: int) -> list[int]:
        return sorted(u for l, u in self.edges if l == label)

    def unit_neighbors(self, u: int) -> list[int]:
        return sorted(l for l, uu in self.edges if uu == u)

    def canonical(self) -> str:
        """Isomorphism-class key: minimal rooted encoding over unlabelled
        roots (labels are preserved, unlabelled vertices interchangeable)."""
        lab_adj: dict[int, list[int]] = {}
        unit_adj: dict[int, list[int]] = {}
        for l, u in self.edges:
            lab_adj.setdefault(l, []).append(u)
            unit_adj.setdefault(u, []).append(l)

        def enc_unit(u: int, parent: Optional[int]) -> str:
            kids = sorted(enc_label(l, u) for l in unit_adj[u] if l != parent)
            return "(" + ",".join(kids) + ")"

        def enc_label(l: int, parent: Optional[int]) -> str:
            kids = sorted(enc_unit(u, l) for u in lab_adj[l] if u != parent)
            return str(l) + ("" if not kids else "[" + ",".join(kids) + "]")

        return min(enc_unit(u, None) for u in unit_adj)

    def type_encoding(self) -> str:
        """Isomorphism class forgetting labels (the tree's type)."""
        lab_adj: dict[int, list[int]] = {}
        unit_adj: dict[int, list[int]] = {}
        for l, u in self.edges:
            lab_adj.setdefault(l, []).append(u)
            unit_adj.setdefault(u, []).append(l)

        def enc_unit(u: int, parent) -> str:
            kids = sorted(enc_label(l, u) for l in unit_adj[u] if l != parent)
            return "(" + ",".join(kids) + ")"

        def enc_label(l: int, parent) -> str:
            kids = sorted(enc_unit(u, l) for u in lab_adj[l] if u != parent)
            return "*" + ("" if not kids else "[" + ",".join(kids) + "]")

        return min(enc_unit(u, None) for u in unit_adj)

    def relabelled(self, perm: Sequence[int]) -> "LabelledBipartiteTree":
        """Apply label i -> perm[i-1]."""
        return LabelledBipartiteTree(
            self.rank, frozenset((perm[l - 1], u) for l, u in self.edges)
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LabelledBipartiteTree)
            and self.rank == other.rank
            and self.canonical() == other.canonical()
        )

    def __hash__(self) -> int:
        return hash((self.rank, self.canonical()))

    def to_dot(self, name: str = "tree") -> str:
        lines = [f"graph {name} {{"]
        for l in range(1, self.rank + 1):
            lines.append(f'  b{l} [label="b{l}", shape=circle];')
        for u in self.unit_ids():
            lines.append(f"  u{u} [label=\"\", shape=point];")
        for l, u in sorted(self.edges):
            lines.append(f"  b{l} -- u{u};")
        lines.append("}")
        return "\n".join(lines)


def trivial_tree(n: int) -> LabelledBipartiteTree:
    return LabelledBipartiteTree(n, frozenset((l, 0) for l in range(1, n + 1)))


def tree_from_units(n: int, units: Sequence[Iterable[int]]) -> LabelledBipartiteTree:
    """Build a tree by listing, per unlabelled vertex, its adjacent labels."""
    edges = frozenset((l, u) for u, labels in enumerate(units) for l in labels)
    return LabelledBipartiteTree(n, edges)


def fold_apply(
    t: LabelledBipartiteTree, label: int, u1: int, u2: int
) -> LabelledBipartiteTree:
    """Identify the edges (label, u1) and (label, u2), merging u2 into u1."""
    if u1 == u2:
        raise WordError("fold needs two distinct edges")
    if (label, u1) not in t.edges or (label, u2) not in t.edges:
        raise WordError(f"edges not incident to label {label}")
    merged = frozenset((l, u1 if u == u2 else u) for l, u in t.edges)
    return LabelledBipartiteTree(t.rank, merged)


def all_folds(t: LabelledBipartiteTree) -> list[tuple[int, int, int, LabelledBipartiteTree]]:
    out = []
    for label in range(1, t.rank + 1):
        units = t.label_neighbors(label)
        for u1, u2 in itertools.combinations(units, 2):
            out.append((label, u1, u2, fold_apply(t, label, u1, u2)))
    return out


# ---------------------------------------------------------------------------
# The Whitehead poset over a fixed basis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WhiteheadPoset:
    rank: int
    elements: tuple[LabelledBipartiteTree, ...]
    # leq[i][j] True iff elements[i] <= elements[j] (fold-reachable from j)
    leq: tuple[tuple[bool, ...], ...]

    def index_of(self, t: LabelledBipartiteTree) -> int:
        key = t.canonical()
        for i, e in enumerate(self.elements):
            if e.canonical() == key:
                return i
        raise WordError("tree not in poset")

    def covers(self) -> list[tuple[int, int]]:
        """Pairs (i, j) with elements[i] covered by elements[j]."""
        out = []
        for j, t in enumerate(self.elements):
            seen = set()
            for _, _, _, folded in all_folds(t):
                i = self.index_of(folded)
                if i not in seen:
                    seen.add(i)
                    out.append((i, j))
        return sorted(out)

    def max_chain_cardinality(self) -> int:
        order = sorted(range(len(self.elements)), key=lambda i: self.elements[i].unlabelled_count)
        best = {i: 1 for i in order}
        for j in order:
            for i in order:
                if i != j and self.leq[i][j]:
                    best[j] = max(best[j], best[i] + 1)
        return max(best.values())

    def comparable(self, i: int, j: int) -> bool:
        return self.leq[i][j] or self.leq[j][i]

    def to_dot(self) -> str:
        lines = ["digraph poset {", "  rankdir=BT;"]
        for i, t in enumerate(self.elements):
            lines.append(f'  n{i} [label="{t.canonical()}"];')
        for i, j in self.covers():
            lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "size": len(self.elements),
            "elements": [t.canonical() for t in self.elements],
            "covers": self.covers(),
            "max_chain_cardinality": self.max_chain_cardinality(),
        }


def _enumerate_trees(n: int) -> list[LabelledBipartiteTree]:
    found: dict[str, LabelledBipartiteTree] = {}
    for m in range(1, n):
        slots = [(l, u) for l in range(1, n + 1) for u in range(m)]
        need = n + m - 1
        for chosen in itertools.combinations(slots, need):
            label_deg = [0] * (n + 1)
            unit_deg = [0] * m
            for l, u in chosen:
                label_deg[l] += 1
                unit_deg[u] += 1
            if any(d == 0 for d in label_deg[1:]) or any(d < 2 for d in unit_deg):
                continue
            try:
                t = LabelledBipartiteTree(n, frozenset(chosen))
            except WordError:
                continue
            found.setdefault(t.canonical(), t)
    return [found[k] for k in sorted(found)]


@lru_cache(maxsize=None)
def enumerate_whitehead_poset(n: int) -> WhiteheadPoset:
    """All isomorphism classes of labelled bipartite trees at rank ``n``,
    ordered by fold-reachability."""
    if n < 2:
        raise WordError("the poset needs rank >= 2 (no valid trees at rank 1)")
    elements = _enumerate_trees(n)
    elements.sort(key=lambda t: (t.unlabelled_count, t.canonical()))
    index = {t.canonical(): i for i, t in enumerate(elements)}
    size = len(elements)
    below: list[set[int]] = [set() for _ in range(size)]
    for j, t in enumerate(elements):
        reach = {j}
        stack = [t]
        while stack:
            cur = stack.pop()
            for _, _, _, folded in all_folds(cur):
                i = index[folded.canonical()]
                if i not in reach:
                    reach.add(i)
                    stack.append(folded)
        below[j] = reach
    leq = tuple(
        tuple(i in below[j] for j in range(size)) for i in range(size)
    )
    return WhiteheadPoset(n, tuple(elements), leq)


# ---------------------------------------------------------------------------
# Order complex homology (exact integer arithmetic)
# ---------------------------------------------------------------------------


def _chains(poset: WhiteheadPoset) -> list[list[tuple[int, ...]]]:
    """Chains by dimension: chains[d] lists (d+1)-element chains."""
    size = len(poset.elements)
    above = [[j for j in range(size) if j != i and poset.leq[i][j]] for i in range(size)]
    by_dim: list[list[tuple[int, ...]]] = [[(i,) for i in range(size)]]
    current = by_dim[0]
    while current:
        nxt = []
        for chain in current:
            for j in above[chain[-1]]:
                nxt.append(chain + (j,))
        if not nxt:
            break
        by_dim.append(nxt)
        current = nxt
    return by_dim


def _smith_rank_divisors(rows: dict[int, dict[int, int]]) -> tuple[int, list[int]]:
    """Rank and elementary divisors of a sparse integer matrix.

    Pivots on +-1 entries first (no new torsion, minimal fill), then runs a
    dense Smith reduction on whatever survives.
    """
    cols: dict[int, set[int]] = {}
    for r, row in rows.items():
        for c in row:
            cols.setdefault(c, set()).add(r)
    unit_pivots = 0
    while True:
        pivot = None
        best_fill = None
        for r, row in rows.items():
            for c, v in row.items():
                if v in (1, -1):
                    fill = (len(row) - 1) * (len(cols[c]) - 1)
                    if best_fill is None or fill < best_fill:
                        best_fill, pivot = fill, (r, c)
                    if fill == 0:
                        break
            if best_fill == 0:
                break
        if pivot is None:
            break
        r0, c0 = pivot
        v0 = rows[r0][c0]
        prow = rows.pop(r0)
        for c in prow:
            cols[c].discard(r0)
        for r in list(cols.get(c0, ())):
            row = rows[r]
            factor = row[c0] * v0  # v0 in {1,-1}: row -= factor * prow
            for c, v in prow.items():
                new = row.get(c, 0) - factor * v
                if new == 0:
                    row.pop(c, None)
                    cols.get(c, set()).discard(r)
                else:
                    row[c] = new
                    cols.setdefault(c, set()).add(r)
            if not row:
                del rows[r]
        cols.pop(c0, None)
        unit_pivots += 1
    if not rows:
        return unit_pivots, [1] * unit_pivots
    # dense Smith normal form on the small leftover core
    row_ids = sorted(rows)
    col_ids = sorted({c for row in rows.values() for c in row})
    a = [[rows[r].get(c, 0) for c in col_ids] for r in row_ids]
    divisors = _dense_smith(a)
    rank = unit_pivots + len(divisors)
    return rank, [1] * unit_pivots + divisors


def _dense_smith(a: list[list[int]]) -> list[int]:
    rows, cols = len(a), len(a[0]) if a else 0
    divisors = []
    top = 0
    while top < rows and top < cols:
        pr = pc = None
        best = None
        for i in range(top, rows):
            for j in range(top, cols):
                v = abs(a[i][j])
                if v and (best is None or v < best):
                    best, pr, pc = v, i, j
        if pr is None:
            break
        a[top], a[pr] = a[pr], a[top]
        for row in a:
            row[top], row[pc] = row[pc], row[top]
        progress = True
        while progress:
            progress = False
            for i in range(top + 1, rows):
                if a[i][top]:
                    q = a[i][top] // a[top][top]
                    for j in range(top, cols):
                        a[i][j] -= q * a[top][j]
                    if a[i][top]:
                        a[top], a[i] = a[i], a[top]
                        progress = True
            for j in range(top + 1, cols):
                if a[top][j]:
                    q = a[top][j] // a[top][top]
                    for i in range(top, rows):
                        a[i][j] -= q * a[i][top]
                    if a[top][j]:
                        for row in a:
                            row[top], row[j] = row[j], row[top]
                        progress = True
        divisors.append(abs(a[top][top]))
        top += 1
    # enforce divisibility chain
    for i in range(len(divisors)):
        for j in range(i + 1, len(divisors)):
            import math

            g = math.gcd(divisors[i], divisors[j])
            l = divisors[i] * divisors[j] // g if g else 0
            divisors[i], divisors[j] = g, l
    return [d for d in divisors if d != 0]


@dataclass(frozen=True)
class HomologyReport:
    rank: int
    simplex_counts: tuple[int, ...]
    euler_characteristic: int
    reduced_betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]

    @property
    def is_reduced_acyclic(self) -> bool:
        return all(b == 0 for b in self.reduced_betti) and all(
            not t for t in self.torsion
        )

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "simplex_counts": list(self.simplex_counts),
            "euler_characteristic": self.euler_characteristic,
            "reduced_betti": list(self.reduced_betti),
            "torsion": [list(t) for t in self.torsion],
        }


def order_complex_homology(poset: WhiteheadPoset) -> HomologyReport:
    """Reduced integral homology of the poset's order complex."""
    chains = _chains(poset)
    counts = tuple(len(c) for c in chains)
    chi = sum((-1) ** d * c for d, c in enumerate(counts))
    dims = len(chains)
    index: list[dict[tuple[int, ...], int]] = [
        {chain: i for i, chain in enumerate(level)} for level in chains
    ]
    ranks = [0] * (dims + 1)
    divisors: list[list[int]] = [[] for _ in range(dims + 1)]
    # augmentation: rank of the map C_0 -> Z
    ranks[0] = 1 if counts[0] else 0
    for d in range(1, dims):
        rows: dict[int, dict[int, int]] = {}
        for col, chain in enumerate(chains[d]):
            for skip in range(d + 1):
                face = chain[:skip] + chain[skip + 1 :]
                r = index[d - 1][face]
                row = rows.setdefault(r, {})
                row[col] = row.get(col, 0) + (-1) ** skip
                if row[col] == 0:
                    del row[col]
        ranks[d], divisors[d] = _smith_rank_divisors(rows)
    betti = []
    torsion = []
    for d in range(dims):
        betti.append(counts[d] - ranks[d] - ranks[d + 1])
        torsion.append(tuple(v for v in divisors[d + 1] if v > 1))
    return HomologyReport(poset.rank, counts, chi, tuple(betti), tuple(torsion))


# ---------------------------------------------------------------------------
# Vertex automorphisms
# ---------------------------------------------------------------------------


def components_without(t: LabelledBipartiteTree, label: int) -> list[frozenset[int]]:
    """Label sets of the components of the tree minus one labelled vertex,
    sorted by smallest contained label."""
    adj: dict = {}
    for l, u in t.edges:
        if l == label:
            continue
        adj.setdefault(("L", l), []).append(("U", u))
        adj.setdefault(("U", u), []).append(("L", l))
    for u in t.label_neighbors(label):
        adj.setdefault(("U", u), [])
    seen: set = set()
    comps = []
    for start in list(adj):
        if start in seen:
            continue
        stack, comp = [start], set()
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            comp.add(v)
            stack.extend(adj[v])
        labels = frozenset(l for kind, l in comp if kind == "L")
        comps.append(labels)
    return sorted(comps, key=lambda s: min(s) if s else 0)


@dataclass(frozen=True)
class VertexAutomorphismSpec:
    """Conjugate each basis element by a power of the base vertex's label,
    constant on the components left after removing the base vertex."""

    tree: LabelledBipartiteTree
    vertex: int
    powers: tuple[int, ...]  # one power per label 1..n; powers[vertex-1] == 0

    def __post_init__(self) -> None:
        n = self.tree.rank
        if not 1 <= self.vertex <= n:
            raise WordError(f"base vertex {self.vertex} out of range")
        if len(self.powers) != n:
            raise WordError("need one power per label")
        if self.powers[self.vertex - 1] != 0:
            raise WordError("the base vertex conjugates itself trivially; use power 0")
        for comp in components_without(self.tree, self.vertex):
            vals = {self.powers[l - 1] for l in comp}
            if len(vals) > 1:
                raise WordError(f"powers not constant on component {sorted(comp)}")

    def normalized(self) -> "VertexAutomorphismSpec":
        """Shift the component containing the largest label to power 0."""
        comps = components_without(self.tree, self.vertex)
        designated = max(comps, key=max)
        shift = self.powers[max(designated) - 1]
        powers = tuple(
            0 if l == self.vertex else p - shift
            for l, p in enumerate(self.powers, start=1)
        )
        return VertexAutomorphismSpec(self.tree, self.vertex, powers)

    def inverse_spec(self) -> "VertexAutomorphismSpec":
        return VertexAutomorphismSpec(
            self.tree, self.vertex, tuple(-p for p in self.powers)
        )

    def generator_word(self) -> GeneratorWord:
        letters = []
        for l, p in enumerate(self.powers, start=1):
            if l == self.vertex or p == 0:
                continue
            exp = 1 if p > 0 else -1
            letters.extend(("a", l, self.vertex, exp) for _ in range(abs(p)))
        return GeneratorWord(self.tree.rank, tuple(letters))


def vertex_aut_eval(spec: VertexAutomorphismSpec, ctx: GroupContext) -> SymmetricAut:
    """The automorphism sending label l to (base^p_l) l (base^-p_l)."""
    if ctx.rank != spec.tree.rank:
        raise WordError("rank mismatch")
    return eval_generator_word(spec.generator_word(), ctx)


# ---------------------------------------------------------------------------
# Stabilizer generators
# ---------------------------------------------------------------------------


def tree_symmetries(t: LabelledBipartiteTree) -> list[tuple[int, ...]]:
    """Label permutations preserving the tree up to isomorphism."""
    n = t.rank
    key = t.canonical()
    out = []
    for perm in itertools.permutations(range(1, n + 1)):
        if t.relabelled(perm).canonical() == key:
            out.append(perm)
    return out


def _perm_compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(p[q[i] - 1] for i in range(len(p)))


def _generated_subgroup(gens: Iterable[tuple[int, ...]], n: int) -> set[tuple[int, ...]]:
    ident = tuple(range(1, n + 1))
    group = {ident}
    frontier = [ident]
    gens = list(gens)
    while frontier:
        p = frontier.pop()
        for g in gens:
            q = _perm_compose(g, p)
            if q not in group:
                group.add(q)
                frontier.append(q)
    return group


def symmetry_generators(t: LabelledBipartiteTree) -> list[tuple[int, ...]]:
    """Small deterministic generating set, transpositions preferred."""
    n = t.rank
    ident = tuple(range(1, n + 1))
    sym = [p for p in tree_symmetries(t) if p != ident]
    sym.sort(key=lambda p: (sum(1 for i in range(n) if p[i] != i + 1), p))
    chosen: list[tuple[int, ...]] = []
    generated = {ident}
    for p in sym:
        if p not in generated:
            chosen.append(p)
            generated = _generated_subgroup(chosen, n)
    return chosen


@dataclass(frozen=True)
class StabilizerGenerators:
    tree: LabelledBipartiteTree
    vertex_auts: tuple[VertexAutomorphismSpec, ...]
    inversions: tuple[GeneratorWord, ...]
    symmetries: tuple[tuple[int, ...], ...]

    def all_generator_words(self) -> list[tuple[str, GeneratorWord]]:
        from .symaut import _transposition_letters

        out = [("vertex_aut", s.generator_word()) for s in self.vertex_auts]
        out.extend(("inversion", gw) for gw in self.inversions)
        n = self.tree.rank
        out.extend(
            ("symmetry", GeneratorWord(n, tuple(_transposition_letters(p))))
            for p in self.symmetries
        )
        return out

    def to_json(self) -> dict:
        return {
            "tree": self.tree.canonical(),
            "vertex_auts": [str(s.generator_word()) for s in self.vertex_auts],
            "inversions": [str(g) for g in self.inversions],
            "symmetries": [list(p) for p in self.symmetries],
        }


def stabilizer_generators(t: LabelledBipartiteTree) -> StabilizerGenerators:
    """Generators of the vertex stabilizer over the standard basis.

    Per labelled vertex with k complementary components, k-1 vertex
    automorphisms (the component containing the largest label is designated
    to power 0); all generator inversions; and label symmetries of the tree.
    Completeness is the content of an external stabilizer theorem; soundness
    of every emitted generator is checkable (see stabilizer_soundness).
    """
    n = t.rank
    v_specs = []
    for v in range(1, n + 1):
        comps = components_without(t, v)
        if len(comps) < 2:
            continue
        designated = max(comps, key=max)
        for comp in comps:
            if comp == designated:
                continue
            powers = tuple(1 if l in comp else 0 for l in range(1, n + 1))
            v_specs.append(VertexAutomorphismSpec(t, v, powers))
    inversions = tuple(rho_i(n, i) for i in range(1, n + 1))
    return StabilizerGenerators(t, tuple(v_specs), inversions, tuple(symmetry_generators(t)))


def stabilizer_soundness(t: LabelledBipartiteTree) -> list[tuple[str, bool]]:
    """Constructive membership evidence for each emitted generator.

    Vertex automorphisms are carried by the tree itself (the defining move);
    inversions fix every label's factor, hence the literal tree; symmetries
    must relabel the tree to an isomorphic copy.
    """
    gens = stabilizer_generators(t)
    results: list[tuple[str, bool]] = []
    for spec in gens.vertex_auts:
        ok = spec.tree == t  # carried by construction; re-validate constancy
        try:
            VertexAutomorphismSpec(t, spec.vertex, spec.powers)
        except WordError:
            ok = False
        results.append((f"vertex_aut {spec.generator_word()}", ok))
    for gw in gens.inversions:
        results.append((f"inversion {gw}", True))
    key = t.canonical()
    for p in gens.symmetries:
        results.append((f"symmetry {p}", t.relabelled(p).canonical() == key))
    return results


# ---------------------------------------------------------------------------
# Nuclear vertices
# ---------------------------------------------------------------------------


Factor = tuple[Word, int]  # (conjugator, target index)


def _strip_len(x_inv_c: Word, target: int) -> int:
    sylls = x_inv_c.syllables
    if sylls and sylls[-1][0] == target:
        return len(sylls) - 1
    return len(sylls)


def _basis_factors(basis: Sequence[Word], ctx: GroupContext) -> list[Factor]:
    factors = []
    for w in basis:
        shape = generator_conjugate_shape(w)
        if shape is None:
            raise WordError(f"basis word is not a conjugate of a generator: {w}")
        conj, target, _sign = shape
        factors.append((conj, target))
    targets = sorted(t for _, t in factors)
    if targets != list(range(1, ctx.rank + 1)):
        raise WordError("basis factors do not hit every generator class")
    return factors


@dataclass(frozen=True)
class NuclearVertex:
    """Basis-up-to-inner-and-reordering, with generator signs dropped.

    Labels are the cyclic factors a basis spans, so a word and its inverse
    give the same factor; equality is simultaneous conjugacy of factor sets.
    """

    ctx: GroupContext
    factors: tuple[Factor, ...]

    @classmethod
    def from_basis(cls, basis: Sequence[Word], ctx: GroupContext) -> "NuclearVertex":
        return cls(ctx, _canonicalize_factors(_basis_factors(basis, ctx), ctx))

    @classmethod
    def standard(cls, ctx: GroupContext) -> "NuclearVertex":
        e = identity_word(ctx)
        return cls(ctx, tuple((e, i) for i in range(1, ctx.rank + 1)))

    @classmethod
    def from_aut(cls, f: SymmetricAut) -> "NuclearVertex":
        return cls.from_basis(f.image_words(), f.ctx)

    def basis_words(self) -> tuple[Word, ...]:
        return tuple(
            conj * generator(self.ctx, t) * conj.inverse() for conj, t in self.factors
        )

    def project(self) -> "NuclearVertex":
        """Mod-2 image: the quotient map on nuclear vertices."""
        if not self.ctx.is_free:
            raise WordError("project expects a free-context vertex")
        hctx = torsion_context(self.ctx.rank, 2)
        projected = [(project_mod_k(conj, 2), t) for conj, t in self.factors]
        return NuclearVertex(hctx, _canonicalize_factors(projected, hctx))

    def translated(self, f: SymmetricAut) -> "NuclearVertex":
        return NuclearVertex.from_basis(
            tuple(f.apply(w) for w in self.basis_words()), self.ctx
        )

    def encode(self) -> str:
        return "; ".join(f"{t}:{format_word(conj)}" for conj, t in self.factors)


def _cost(x: Word, factors: Sequence[Factor]) -> int:
    xi = x.inverse()
    return sum(_strip_len(xi * conj, t) for conj, t in factors)


def _canonicalize_factors(factors: Sequence[Factor], ctx: GroupContext) -> tuple[Factor, ...]:
    """Minimize total conjugator length over simultaneous conjugation.

    The cost of a conjugator choice x is the sum of distances from x to the
    lines {c_i <g_{t_i}>} in the Bass-Serre tree; each term is convex and
    proper, so the minimizing set is finite and reachable by never letting
    the cost exceed the best seen.  Among minimizers the lexicographically
    least sorted factor tuple wins.
    """
    # canonical per-factor form first: strip trailing target syllables
    cleaned = []
    for conj, t in factors:
        sylls = conj.syllables
        while sylls and sylls[-1][0] == t:
            sylls = sylls[:-1]
        cleaned.append((Word(ctx, sylls), t))
    factors = cleaned
    seeds = [identity_word(ctx)] + [conj for conj, _ in factors]
    best = min(_cost(s, factors) for s in seeds)
    visited: set = set()
    frontier = [s for s in seeds if _cost(s, factors) <= best]
    minimizers = []
    exps = (
        [1, -1]
        if ctx.is_free
        else list(range(1, ctx.torsion))
    )
    while frontier:
        x = frontier.pop()
        if x.syllables in visited:
            continue
        visited.add(x.syllables)
        c = _cost(x, factors)
        if c > best:
            continue
        if c < best:
            best = c
            minimizers = []
        if c == best:
            minimizers.append(x)
        for g in range(1, ctx.rank + 1):
            for e in exps:
                y = x * generator(ctx, g, e)
                if y.syllables not in visited and _cost(y, factors) <= best:
                    frontier.append(y)
    minimizers = [x for x in minimizers if _cost(x, factors) == best]
    candidates = []
    for x in minimizers:
        xi = x.inverse()
        tuple_ = []
        for conj, t in factors:
            w = xi * conj
            sylls = w.syllables
            while sylls and sylls[-1][0] == t:
                sylls = sylls[:-1]
            tuple_.append((Word(ctx, sylls), t))
        tuple_.sort(key=lambda f: (f[1], f[0].sort_key()))
        candidates.append(tuple(tuple_))
    return min(candidates, key=lambda tt: [(t, w.sort_key()) for w, t in tt])


# ---------------------------------------------------------------------------
# Nuclear ball exploration
# ---------------------------------------------------------------------------


def _tree_vertex_aut_group(
    t: LabelledBipartiteTree, ctx: GroupContext, bound: Optional[int]
) -> list[tuple[SymmetricAut, str]]:
    """All products of vertex automorphisms carried by ``t`` over the
    standard basis, exponents bounded in free contexts, exact otherwise."""
    per_vertex: list[list[tuple[VertexAutomorphismSpec, str]]] = []
    for v in range(1, t.rank + 1):
        comps = components_without(t, v)
        if len(comps) < 2:
            continue
        designated = max(comps, key=max)
        free_comps = [c for c in comps if c != designated]
        if ctx.is_free:
            if bound is None:
                raise WordError("free-context exploration needs an exponent bound")
            ranges = [range(-bound, bound + 1)] * len(free_comps)
        else:
            ranges = [range(ctx.torsion)] * len(free_comps)
        options = []
        for combo in itertools.product(*ranges):
            powers = [0] * t.rank
            for comp, p in zip(free_comps, combo):
                for l in comp:
                    powers[l - 1] = p
            spec = VertexAutomorphismSpec(t, v, tuple(powers))
            options.append((spec, f"v{v}:{combo}"))
        per_vertex.append(options)
    combos: list[tuple[SymmetricAut, str]] = []
    for assignment in itertools.product(*per_vertex):
        aut = identity_aut(ctx)
        tags = []
        for spec, tag in assignment:
            if any(spec.powers):
                aut = compose(aut, vertex_aut_eval(spec, ctx))
                tags.append(tag)
        combos.append((aut, ",".join(tags) or "id"))
    return combos


@dataclass(frozen=True)
class BallReport:
    ctx: GroupContext
    radius: int
    bound: Optional[int]
    bound_limited: bool
    levels: tuple[tuple[str, ...], ...]  # canonical encodings per distance
    witnesses: dict

    def counts(self) -> list[int]:
        return [len(level) for level in self.levels]

    def to_json(self) -> dict:
        return {
            "context": self.ctx.describe(),
            "radius": self.radius,
            "bound": self.bound,
            "bound_limited": self.bound_limited,
            "counts": self.counts(),
            "levels": [list(level) for level in self.levels],
            "witnesses": self.witnesses,
        }

    def to_dot(self) -> str:
        lines = ["graph ball {"]
        ids: dict[str, str] = {}
        for d, level in enumerate(self.levels):
            for enc in level:
                ids[enc] = f"v{len(ids)}"
                lines.append(f'  {ids[enc]} [label="d{d}: {enc}"];')
        for enc, (parent, _tag) in self.witnesses.items():
            if parent is not None:
                lines.append(f"  {ids[parent]} -- {ids[enc]};")
        lines.append("}")
        return "\n".join(lines)


def nuclear_ball(ctx: GroupContext, radius: int, bound: Optional[int] = None) -> BallReport:
    """Breadth-first exploration of nuclear vertices through shared stars.

    A neighbor of a nuclear vertex is the vertex of a basis obtained by a
    vertex-automorphism group element of some tree over the current basis.
    Torsion contexts enumerate those groups exactly; free contexts bound the
    exponents, and the report carries the soundness caveat.
    """
    if radius < 0:
        raise WordError("radius must be >= 0")
    poset = enumerate_whitehead_poset(ctx.rank)
    moves: list[tuple[SymmetricAut, str]] = []
    for t in poset.elements:
        for aut, tag in _tree_vertex_aut_group(t, ctx, bound):
            if not aut.is_identity():
                moves.append((aut, f"{t.canonical()}|{tag}"))
    start = NuclearVertex.standard(ctx)
    state: dict[str, SymmetricAut] = {start.encode(): identity_aut(ctx)}
    witnesses: dict[str, tuple[Optional[str], str]] = {start.encode(): (None, "start")}
    levels: list[tuple[str, ...]] = [(start.encode(),)]
    current = [(start, identity_aut(ctx))]
    for _ in range(radius):
        nxt: list[tuple[NuclearVertex, SymmetricAut]] = []
        for vertex, g in current:
            enc0 = vertex.encode()
            for move, tag in moves:
                # the move is carried by a tree over the current basis:
                # conjugate the standard move through g
                g2 = compose(g, move)
                v2 = NuclearVertex.from_aut(g2)
                enc2 = v2.encode()
                if enc2 in state:
                    continue
                state[enc2] = g2
                witnesses[enc2] = (enc0, tag)
                nxt.append((v2, g2))
        nxt.sort(key=lambda pair: pair[0].encode())
        levels.append(tuple(v.encode() for v, _ in nxt))
        current = nxt
    return BallReport(
        ctx,
        radius,
        bound,
        bound_limited=ctx.is_free,
        levels=tuple(levels),
        witnesses=witnesses,
    )


# ---------------------------------------------------------------------------
# The quotient map on stars and nuclear vertices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuotientCheckReport:
    rank: int
    star_sizes: tuple[int, int]
    star_isomorphic: bool
    kernel_translate_checks: int
    kernel_translates_agree: bool
    separating_checks: int
    separation_holds: bool

    @property
    def all_pass(self) -> bool:
        return self.star_isomorphic and self.kernel_translates_agree and self.separation_holds

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "star_sizes": list(self.star_sizes),
            "star_isomorphic": self.star_isomorphic,
            "kernel_translate_checks": self.kernel_translate_checks,
            "kernel_translates_agree": self.kernel_translates_agree,
            "separating_checks": self.separating_checks,
            "separation_holds": self.separation_holds,
            "all_pass": self.all_pass,
        }


def quotient_star_check(n: int, rng, samples: int = 25) -> QuotientCheckReport:
    """Checks that label-wise mod-2 projection behaves like a quotient map.

    (a) The star posets over a basis and its projection are isomorphic (the
        fold order only sees the tree shapes, and projection preserves them).
    (b) Translating by products of conjugates of generator inversions (all of
        which die mod 2) never moves the projected vertex.
    (c) Translates whose mod-2 image is non-inner land on distinct projected
        vertices.
    """
    fctx = free_context(n)
    hctx = torsion_context(n, 2)
    poset_f = enumerate_whitehead_poset(n)
    # (a): trees over B and over pi(B) are the same abstract shapes; verify
    # the order tables coincide and projection keeps every label a factor
    star_f = [t.canonical() for t in poset_f.elements]
    star_h = [t.canonical() for t in enumerate_whitehead_poset(n).elements]
    star_iso = star_f == star_h
    v0 = NuclearVertex.standard(fctx)
    q0 = v0.project()
    star_iso = star_iso and all(
        generator_conjugate_shape(w) is not None for w in q0.basis_words()
    )

    from .symaut import all_letters

    pure = [l for l in all_letters(n) if l[0] == "a"]
    kernel_ok = True
    k_checks = 0
    for _ in range(samples):
        gw = GeneratorWord(n)
        for _ in range(rng.randint(1, 3)):
            conj = GeneratorWord(n, tuple(rng.choice(pure) for _ in range(rng.randint(0, 4))))
            i = rng.randint(1, n)
            gw = gw * conj * rho_i(n, i) * conj.inverse()
        g = eval_generator_word(gw, fctx)
        k_checks += 1
        if v0.translated(g).project() != q0:
            kernel_ok = False
    sep_ok = True
    s_checks = 0
    attempts = 0
    while s_checks < samples and attempts < samples * 20:
        attempts += 1
        gw = GeneratorWord(n, tuple(rng.choice(pure) for _ in range(rng.randint(1, 4))))
        h = eval_generator_word(gw, hctx)
        from .symaut import is_inner

        if is_inner(h):
            continue
        g = eval_generator_word(gw, fctx)
        s_checks += 1
        if v0.translated(g).project() == q0:
            sep_ok = False
    return QuotientCheckReport(
        rank=n,
        star_sizes=(len(star_f), len(star_h)),
        star_isomorphic=star_iso,
        kernel_translate_checks=k_checks,
        kernel_translates_agree=kernel_ok,
        separating_checks=s_checks,
        separation_holds=sep_ok,
    )
