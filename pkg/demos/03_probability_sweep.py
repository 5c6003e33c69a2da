"""Sweep the measurement probability with common random numbers.

All ensembles share initial-state draws so the curves are directly
comparable; the per-probability CSVs feed the figure renderer in
frontend/ (decay kind, log axis).
"""

from pathlib import Path

from sparsectl import SimConfig, converter, design_uniform, sweep_p
from sparsectl.serialize import write_stats_csv

out_dir = Path("out/converter_sweep")
out_dir.mkdir(parents=True, exist_ok=True)

plant = converter()
plan = design_uniform(plant)
cfg = SimConfig(steps=200, runs=100, init_sigma=100.0, master_seed=7)

p_values = [round(plan.p_star, 4), 0.85, 1.0]
entries = sweep_p(plant, plan.cert, p_values, cfg)

print(f"{'p':>8}  {'verdict':>12}  {'crossing step':>13}  {'bound':>7}")
for entry in entries:
    csv_path = out_dir / f"p_{entry.p:g}.csv"
    write_stats_csv(entry.stats, csv_path)
    cross = entry.report.threshold_step
    print(f"{entry.p:8.4f}  {entry.report.verdict:>12}  "
          f"{str(cross):>13}  {entry.report.bound:7.4f}")

print(f"\nCSVs written to {out_dir}/")
print("render with: node frontend/dist/cli.js --kind decay "
      f"--inputs {out_dir}/p_*.csv --out decay.svg --log")
