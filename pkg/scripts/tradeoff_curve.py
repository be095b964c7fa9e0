"""Communication versus storage-overhead tradeoff of the hybrid scheme, as CSV.

Optionally draws the curve with matplotlib (--plot out.png).
"""
import argparse
import csv
import sys

from dsssync.cli import cmd_tradeoff, tradeoff_ordering_ok


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ell", type=int, default=64)
    ap.add_argument("--q", type=int, default=5)
    ap.add_argument("--steps", type=int, default=32)
    ap.add_argument("--plot", help="write a PNG of the curve to this path")
    args = ap.parse_args(argv)

    rows = cmd_tradeoff({"ell": args.ell, "q": args.q, "steps": args.steps, "budget": None})
    w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot([r["hybrid_storage"] for r in rows], [r["hybrid_comm"] for r in rows], "o-", label="hybrid")
        r0 = rows[0]
        ax.plot([r0["V_storage"]], [r0["V_comm"]], "s", label="Scheme V")
        ax.plot([r0["P_storage"]], [r0["P_comm"]], "^", label="Scheme P")
        ax.plot([r0["T_storage"]], [r0["T_comm"]], "D", label="Scheme T")
        ax.axhline(r0["lower_bound"], ls="--", c="gray", label="lower bound")
        ax.set_xlabel("storage overhead per edit (bits)")
        ax.set_ylabel("communication per edit (bits)")
        ax.set_yscale("log")
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)
    if not tradeoff_ordering_ok(rows):
        print("ordering check failed", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
