#!/usr/bin/env python3
"""Export (2,2,2) linear heat, solve externally, compare objectives with the embedded solver."""
import json
import os
import subprocess
import sys

exe, script, work = sys.argv[1:4]
os.makedirs(work, exist_ok=True)
cfg = os.path.join(work, "cfg.json")
with open(cfg, "w") as fh:
    json.dump({"degrees": [2, 2, 2], "output_dir": work}, fh)

dat = os.path.join(work, "problem.dat-s")
sol = os.path.join(work, "external.txt")
subprocess.run([exe, "export-sdpa", "-c", cfg, "-o", dat], check=True)
ext = subprocess.run([sys.executable, script, dat, sol])
if ext.returncode == 3:
    sys.exit(3)
if ext.returncode != 0:
    sys.exit("external solver failed")
imported = json.loads(subprocess.run([exe, "import-solution", "-c", cfg, "-s", sol, "-o", os.path.join(work, "imp")],
                                     check=True, capture_output=True, text=True).stdout)
subprocess.run([exe, "solve", "-c", cfg], check=True)
with open(os.path.join(work, "report.json")) as fh:
    embedded = json.load(fh)
a, b = imported["primal_objective"], embedded["primal_objective"]
rel = abs(a - b) / abs(a)
print("external %.12g embedded %.12g relative %.3g" % (a, b, rel))
if imported["max_equality_residual"] > 1e-6 or rel > 1e-5:
    sys.exit("objectives disagree")
