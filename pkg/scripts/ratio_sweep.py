"""V(k, 1/2) / sqrt(k) against k on the two-label grid DP.

    python3 scripts/ratio_sweep.py --h 1e-3 --out ratio_sweep.csv
"""

import argparse
import csv
import math
import sys
import time

from martvar.maxvar import LIMIT_RATIO, SUPPORTED_STEPS, _cells_for, maxvar_tables


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h", type=float, default=1e-3, choices=SUPPORTED_STEPS)
    ap.add_argument("--k-max", type=int, default=400)
    ap.add_argument("--every", type=int, default=10, help="emit every n-th k")
    ap.add_argument("--out", help="CSV path (default stdout)")
    a = ap.parse_args(argv)

    cells = _cells_for(a.h)
    t0 = time.perf_counter()
    tables = maxvar_tables(a.k_max, cells)
    print(f"DP to k={a.k_max} on {cells} cells: {time.perf_counter() - t0:.1f}s", file=sys.stderr)

    rows = []
    for k in range(1, a.k_max + 1):
        if k % a.every and k not in (1, 2, a.k_max):
            continue
        v = float(tables[k][cells // 2])
        r = v / math.sqrt(k)
        rows.append([k, v, r, r - LIMIT_RATIO])

    fh = open(a.out, "w", newline="") if a.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["k", "V_half", "ratio", "minus_limit"])
    w.writerows(rows)
    if a.out:
        fh.close()


if __name__ == "__main__":
    main()
