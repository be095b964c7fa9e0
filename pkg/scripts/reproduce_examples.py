"""Replay every worked example and print its transcript."""
import sys

from dsssync.demos import DEMOS
from dsssync.errors import DemoMismatch


def main() -> int:
    status = 0
    for name, demo in DEMOS.items():
        try:
            print("\n".join(demo()))
            print(f"{name}: OK\n")
        except DemoMismatch as exc:
            print(f"{name}: MISMATCH {exc}\n")
            status = 2
    return status


if __name__ == "__main__":
    sys.exit(main())
