"""Monte Carlo span fraction of Scheme T against the closed forms, over a grid of ell.

``protocol_exact`` is the exact expectation for the implemented protocol;
``eta`` is the order-statistics value ell - E[i_min] (or E[i_max - i_min] for UD).

Example: python3 scripts/scheme_t_expectation.py --B 2 --q 5 --trials 20000
"""
import argparse
import csv
import sys

from dsssync.analysis import EditModel, eta, eta_limit, expected_span_implemented
from dsssync.simnet import SchemeConfig, monte_carlo


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--B", type=int, default=2)
    ap.add_argument("--q", type=int, default=5)
    ap.add_argument("--ells", default="16,64,256,1024")
    ap.add_argument("--model", choices=["ud", "cnd", "pnd"], default="ud")
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["model", "ell", "B", "mc_span_fraction", "stderr", "protocol_exact", "z",
                "eta", "eta_limit_or_bound"])
    for ell in (int(x) for x in args.ells.split(",")):
        if args.model == "ud":
            model = EditModel.ud(ell, args.B)
        elif args.model == "cnd":
            model = EditModel.cnd(ell, args.B, args.B)
        else:
            model = EditModel.pnd(ell, args.B, 1 / ell)
        s = monte_carlo(SchemeConfig("T", args.B + 1, args.B, ell, args.q), model, args.trials,
                        seed=args.seed, check_every=max(1, args.trials // 20))
        exact = expected_span_implemented(model) / ell
        z = (s.mean_span_fraction - exact) / s.stderr_span_fraction
        w.writerow([model.variant, ell, args.B, f"{s.mean_span_fraction:.5f}", f"{s.stderr_span_fraction:.5f}",
                    f"{exact:.5f}", f"{z:+.2f}", f"{eta(model):.5f}", f"{eta_limit(model).value:.5f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
