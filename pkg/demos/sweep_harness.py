"""Predicted versus observed behavior over a parameter grid.

Builds a sweep specification, runs the parallel harness through the
command line entry point, and prints the resulting agreement table.  Each
cell classifies its configuration, integrates it, and labels what the
integration actually did.
"""

import csv
import json
import os
import tempfile

from khessian import cli

workdir = tempfile.mkdtemp(prefix="khessian-sweep-")
spec_path = os.path.join(workdir, "spec.json")
out_path = os.path.join(workdir, "grid.csv")

spec = {
    "grid": {
        "N": [3],
        "k": [1],
        "m": [0.0],
        "p": {"start": 0.5, "stop": 3.0, "count": 5},
        "q": [1.0, 3.0],
        "s": [0.0],
    },
    "run": {"r_max": 50.0},
}
with open(spec_path, "w") as fh:
    json.dump(spec, fh, indent=2)
print(f"sweep spec: {spec_path}")

rc = cli.main(["sweep", "--spec", spec_path, "--out", out_path, "--jobs", "4"])
print(f"\nexit code {rc} (0 means every cell agreed with its prediction)")

with open(out_path) as fh:
    rows = list(csv.DictReader(fh))
print(f"\n{'p':>5} {'q':>5} {'delta':>7} {'predicted':>15} {'observed':>15} {'agree':>6} {'ext':>4}")
for row in rows:
    print(f"{float(row['p']):>5.3g} {float(row['q']):>5.3g} {float(row['delta']):>7.3g} "
          f"{row['predicted']:>15} {row['observed']:>15} {row['agree']:>6} {row['extended']:>4}")
print(f"\nfull table: {out_path}")
