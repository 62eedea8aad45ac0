"""Regenerate both error tables and put them next to the published numbers.

The first table refines the mesh (J = 200..3200) at M = 6000.  The second refines the time
step (M = 375..6000) at J = 3200.  Each table has one block per boundary
treatment.  Expect roughly 40 s on one core.

    python demos/error_tables.py [--threads N]
"""
import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))

from reference import COLUMNS, TABLE1, TABLE2  # noqa: E402
from schrotbc.harness import experiments as ex  # noqa: E402
from schrotbc.harness import presets  # noqa: E402

ap = argparse.ArgumentParser()
ap.add_argument("--threads", type=int, default=1)
args = ap.parse_args()

for name, ref in (("table1", TABLE1), ("table2", TABLE2)):
    spec = presets.get(name).table
    table = ex.error_table(spec, threads=args.threads)
    for label, rows in table.items():
        print(f"\n{name} / {label}")
        print(ex.format_table(spec.axis, rows))
        worst = 0.0
        for row, printed in zip(rows, ref[label]):
            for col, want in zip(COLUMNS, printed[1:]):
                if want is not None and not col.startswith("R_"):
                    worst = max(worst, abs(row[col] - want) / want)
        print(f"largest deviation from the printed errors: {worst:.2%}")
