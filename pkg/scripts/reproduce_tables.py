#!/usr/bin/env python3
"""Error/order tables for exponential claims at u = 5 (m = 2 and m = 3).

Writes one CSV per m with the three functionals side by side, and prints
them.  Ruin errors are sup errors against the ODE oracle; the other two
columns use the grid-doubling self-difference at u = 5.
"""

import argparse
import csv
from pathlib import Path

from gerber_shiu import ClaimCausingRuin, DeficitAtRuin, Exponential, RiskParams, RuinIndicator
from gerber_shiu.boundary import phi0
from gerber_shiu.convergence import DEFAULT_LADDER, fmt, run_study
from gerber_shiu.oracles import exponential_ode_oracle


def table(params, m, ladder, u_eval, T):
    model = Exponential(1.0)
    columns = {}
    for name, pen in (("ruin", RuinIndicator()), ("claimcause", ClaimCausingRuin()), ("deficit", DeficitAtRuin())):
        exact = None
        if name == "ruin":
            exact = exponential_ode_oracle(params, 1.0, pen, T, phi_zero=phi0(params, model, pen).value)
        columns[name] = run_study(params, model, pen, m, ladder=ladder, u_eval=u_eval, T=T, exact=exact).rows
    header = ["N"] + [f"{name}_{field}" for name in columns for field in ("value", "error", "order")]
    rows = []
    for i, N in enumerate(ladder):
        row = [N]
        for name in columns:
            r = columns[name][i]
            row += [r.value, r.error, r.order]
        rows.append(row)
    return header, rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/tables", help="output directory")
    ap.add_argument("--ladder", default=",".join(map(str, DEFAULT_LADDER)))
    ap.add_argument("--u", type=float, default=5.0)
    ap.add_argument("--T", type=float, default=30.0)
    args = ap.parse_args()

    params = RiskParams(c=1.2, lam=1.0, delta=0.01)
    ladder = [int(x) for x in args.ladder.split(",")]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for m in (2, 3):
        header, rows = table(params, m, ladder, args.u, args.T)
        path = out / f"table_exp_m{m}.csv"
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows([[fmt(x) for x in row] for row in rows])
        print(f"m={m}  ({path})")
        print("     N  ruin value    E1          p1      claim value  E2          p2      deficit value E2          p2")
        for row in rows:
            cells = [f"{row[0]:6d}"]
            for k in range(3):
                v, e, p = row[1 + 3 * k: 4 + 3 * k]
                cells.append(f"{v:.7f}  " + (f"{e:.4e}" if e is not None else " " * 10) + "  "
                             + (f"{p:.4f}" if p is not None else " " * 6))
            print("  ".join(cells))
        print()


if __name__ == "__main__":
    main()
