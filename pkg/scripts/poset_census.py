#!/usr/bin/env python3
"""Census of the fold posets: sizes, chain lengths, order complex homology.

Usage: python scripts/poset_census.py [--max-rank 5]
"""

import argparse
import time

from symlift.complexes import enumerate_whitehead_poset, order_complex_homology


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--max-rank", type=int, default=5)
    args = parser.parse_args()
    header = f"{'n':>2} {'elements':>9} {'covers':>7} {'max chain':>9} {'chi':>4} {'acyclic':>8} {'time':>7}"
    print(header)
    print("-" * len(header))
    for n in range(2, args.max_rank + 1):
        t0 = time.time()
        poset = enumerate_whitehead_poset(n)
        hom = order_complex_homology(poset)
        print(
            f"{n:>2} {len(poset.elements):>9} {len(poset.covers()):>7} "
            f"{poset.max_chain_cardinality():>9} {hom.euler_characteristic:>4} "
            f"{str(hom.is_reduced_acyclic):>8} {time.time() - t0:>6.1f}s"
        )
        print(f"   simplices by dimension: {list(hom.simplex_counts)}")


if __name__ == "__main__":
    main()
