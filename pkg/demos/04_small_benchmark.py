# A small evolving-target experiment and its data files.
#
# The system answers as t0 for 10000 queries and as t1 afterwards. Both
# learners see the same targets and the same random equivalence search; the
# ratio compares queries spent after the switch. Plot the .dat files with any
# tool; `kvadapt bench run` does the same from the command line.
import sys
import tempfile
from pathlib import Path

from kvadapt.bench import ScenarioConfig, run_benchmark

out = Path(sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="kvadapt-"))
cfg = ScenarioConfig(scenario="feature_add", sizes=(10, 20), repetitions=5, out=str(out))
records, curves, ratios = run_benchmark(cfg)

for point in ratios["feature_add"]:
    print(f"size {point.size}: incremental / classic queries after the switch = {point.ratio:.3f}")

print((out / "feat" / "summary.txt").read_text())
for path in sorted(out.rglob("*.dat")):
    print(path.relative_to(out), len(path.read_text().splitlines()), "points")
