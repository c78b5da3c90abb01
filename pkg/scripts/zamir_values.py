"""Zamir game: v_k(1/2) from the recursion next to the exact LP where it fits.

Columns: k, recursive value, exact value (blank past --exact-max),
sqrt(k) v_k and the log-d upper bound 3 sqrt(2 ln 2 / k).
"""

import argparse
import csv
import math
import sys

from martvar.games import value_exact, value_recursive_tables, zamir_game


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--exact-max", type=int, default=5, help="largest k solved by the sequence-form LP")
    ap.add_argument("--oversample", type=int, default=10)
    a = ap.parse_args(argv)

    g = zamir_game()
    tables = value_recursive_tables(g, a.k, oversample=a.oversample)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["k", "v_recursive", "v_exact", "sqrt_k_v", "bound"])
    for k, t in enumerate(tables, start=1):
        v = t.at(0.5)
        ex = value_exact(g, k).value if k <= a.exact_max else ""
        w.writerow([k, repr(v), ex if ex == "" else repr(ex), repr(math.sqrt(k) * v), repr(3 * math.sqrt(2 * math.log(2) / k))])


if __name__ == "__main__":
    main()
