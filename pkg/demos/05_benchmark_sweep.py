"""
A small benchmark sweep
=======================

The bench module runs one experiment family over a parameter grid and a list
of seeds, pairing algorithms on identical scenarios. The same thing is
available as ``agco bench --family vary_q --seeds 3``.
"""

import tempfile
from pathlib import Path

from agco.bench import ExperimentSpec, aggregate_path, run_experiment, write_result

spec = ExperimentSpec("vary_q", grid=[2, 3, 4], seeds=[0, 1, 2])
result = run_experiment(spec, workers=1)
print(f"{len(result.rows)} rows, {result.failed} failed")

for row in result.aggregate:
    print(f"q={row['value']}  {row['algorithm']:>8}  mean {row['mean_distance']:7.1f} m "
          f"(sd {row['std_distance']:.1f}) over {row['n']} seeds")

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "vary_q.csv"
    write_result(result, out)
    print("\n" + out.read_text().splitlines()[0])
    print(Path(aggregate_path(out)).read_text().splitlines()[1])
