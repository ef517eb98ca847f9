"""Compare the compiled round-robin kernel with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--d 100] [--T 100000]
"""

import argparse
import json

from e2tc.bench import compare_backends


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, default=100)
    parser.add_argument("--T", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    print(json.dumps(compare_backends(args.d, args.T, args.seed), indent=2))


if __name__ == "__main__":
    main()
