"""Machine-readable reports from the command line.

Every number the library computes is reachable without writing Python:
the ``regsim`` CLI turns a small JSON config (or plain flags) into CSV
or JSON on disk, with the full resolved config embedded so a file can
be reproduced from itself.  This script shells out the same way a
plotting pipeline or a Makefile would.
"""

import json
import pathlib
import subprocess
import sys
import tempfile

OUT = pathlib.Path(tempfile.mkdtemp(prefix="regsim_reports_"))


def run(*args):
    cmd = [sys.executable, "-m", "regsim.cli", *args]
    subprocess.run(cmd, check=True)


# ---------------------------------------------------------------------
# 1. A fidelity curve as CSV, with provenance in the header comments
# ---------------------------------------------------------------------

# flags cover the common knobs; anything else (here: no bit rounds at
# all) goes in a JSON config file
base_cfg = OUT / "phase_only.json"
base_cfg.write_text(json.dumps({"n_bit": 0, "steps": 8}))
fig6a = OUT / "fig6a.csv"
run("fidelity-curve", "--model", "dephasing", "--config", str(base_cfg),
    "--out", str(fig6a))
lines = fig6a.read_text().splitlines()
print("fig6a.csv, first 6 lines:")
for line in lines[:6]:
    print(f"  {line}")
print(f"  ... ({len(lines)} lines total)")

# ---------------------------------------------------------------------
# 2. Config files, flag overrides, and exact round-trips
# ---------------------------------------------------------------------

# the config comment line is itself a valid config: strip the prefix,
# save it, and rerun to get a byte-identical file
cfg = json.loads(lines[1].removeprefix("# config: "))
cfg_path = OUT / "fig6a.json"
cfg_path.write_text(json.dumps(cfg))
again = OUT / "fig6a_again.csv"
run("fidelity-curve", "--config", str(cfg_path), "--out", str(again))
print(f"\nround trip byte-identical: {fig6a.read_bytes() == again.read_bytes()}")

# flags override config keys, so one base file serves a family of runs
variant = OUT / "fig6a_depol.csv"
run("fidelity-curve", "--config", str(cfg_path), "--model", "depolarizing",
    "--out", str(variant))
print("variant with --model depolarizing differs: "
      f"{fig6a.read_bytes() != variant.read_bytes()}")

# ---------------------------------------------------------------------
# 3. A small contour grid (JSON output carries the config too)
# ---------------------------------------------------------------------

grid = OUT / "fig7_grid.csv"
run("contours", "--figure", "fig7", "--model", "depolarizing",
    "--grid", "n_bit=0:4:5", "--grid", "n_phase=0:4:5",
    "--out", str(grid))
rows = grid.read_text().splitlines()
print(f"\nfig7 grid: {len(rows) - 3} data rows, header {rows[2]!r}")

# ---------------------------------------------------------------------
# 4. The register operating-point table
# ---------------------------------------------------------------------

table = OUT / "table1.json"
run("table1", "--out", str(table))
doc = json.loads(table.read_text())
print(f"\ntable1: {len(doc['cells'])} operating points")
cell = doc["cells"][0]
print(f"  first cell: model={cell['model']}, F={cell['f']}, "
      f"p_L={cell['p_l']:g} -> t_C = {cell['t_c_tep_us']:.0f} us, "
      f"gamma = {cell['gamma']:.2e}")

print(f"\nall reports in {OUT}")
