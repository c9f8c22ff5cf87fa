#!/usr/bin/env python3
"""Sweep the bounded braid kernel search over strand counts and moduli.

Every row is expected to report an empty flag list; a nonempty one would be
a counterexample to injectivity of the reduced outer action.

Usage: python scripts/braid_scan.py [--max-strands 4] [--max-modulus 3] [--max-len 5]
"""

import argparse
import time

from symlift.braid import bounded_kernel_search


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--max-strands", type=int, default=4)
    parser.add_argument("--max-modulus", type=int, default=3)
    parser.add_argument("--max-len", type=int, default=5)
    args = parser.parse_args()
    print(f"{'n':>2} {'k':>2} {'L':>2} {'checked':>8} {'trivial':>8} {'flagged':>8} {'time':>7}")
    for n in range(2, args.max_strands + 1):
        for k in range(2, args.max_modulus + 1):
            t0 = time.time()
            rep = bounded_kernel_search(n, k, args.max_len)
            print(
                f"{n:>2} {k:>2} {args.max_len:>2} {rep.words_checked:>8} "
                f"{rep.trivial_braids_skipped:>8} {len(rep.flagged):>8} {time.time() - t0:>6.1f}s"
            )
            for word in rep.flagged:
                print(f"   FLAGGED: {word}")


if __name__ == "__main__":
    main()
