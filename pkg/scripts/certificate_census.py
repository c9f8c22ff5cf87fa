#!/usr/bin/env python3
"""Sample products of conjugates of the full inversion and histogram the
certificates: factor counts, conjugator lengths, verification times.

Usage: python scripts/certificate_census.py [--samples 200] [--rank 3] [--seed 1729]
"""

import argparse
import random
import time
from collections import Counter

from symlift.kernel import certify, random_rho_conjugate_product, verify_certificate
from symlift.lift import kernel_verdict


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--rank", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1729)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    sizes = Counter()
    max_conj = Counter()
    t_total = 0.0
    for _ in range(args.samples):
        target = random_rho_conjugate_product(rng, args.rank)
        t0 = time.time()
        cert = certify(target)
        assert cert is not None and verify_certificate(cert, target)
        assert kernel_verdict(target, "both").verdict == "in"
        t_total += time.time() - t0
        sizes[len(cert.conjugators)] += 1
        max_conj[max((len(c) for c in cert.conjugators), default=0)] += 1
    print(f"{args.samples} samples at rank {args.rank}, {t_total:.1f}s certify+verify")
    print("certificate factor counts:", dict(sorted(sizes.items())))
    print("max conjugator lengths:   ", dict(sorted(max_conj.items())))


if __name__ == "__main__":
    main()
