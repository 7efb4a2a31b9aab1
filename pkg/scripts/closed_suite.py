"""Run the seeded closed and perturbed suites and print per-criterion statistics.

    python3 scripts/closed_suite.py --count 100 --order 12
"""

import argparse
import time
from collections import Counter

from symdiff3.criteria import is_closed
from symdiff3.fixtures import eta_of, gen_closed, gen_perturbed
from symdiff3.series import scale_of


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--order", type=int, default=12)
    ap.add_argument("--magnitude", type=float, default=1.0)
    args = ap.parse_args()

    start = time.perf_counter()
    kinds = Counter()
    worst = Counter()
    votes = Counter()
    for seed in range(args.count):
        ab = gen_closed(seed, order=args.order)
        for label, pair in (("closed", ab), ("perturbed", gen_perturbed(seed, ab, args.magnitude))):
            eta = eta_of(pair)
            v = is_closed(eta)
            kinds[label, v.kind] += 1
            scale = scale_of(*eta.coeffs)
            for c in v.criteria:
                if not c.applicable:
                    continue
                votes[label, c.name, c.vanishes] += 1
                if label == "closed" and c.name != "oracle":
                    worst[c.name] = max(worst[c.name], c.max_abs_residual / scale)
    print(f"{2 * args.count} instances in {time.perf_counter() - start:.1f}s")
    for key, n in sorted(kinds.items()):
        print("verdict", *key, n)
    for key, n in sorted(votes.items()):
        print("vanishes", *key, n)
    for name, r in sorted(worst.items()):
        print(f"worst {name} residual on closed inputs: {r:.2e} x scale")


if __name__ == "__main__":
    main()
