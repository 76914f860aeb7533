"""Runs the corridor scenario for a full simulated day and prints the
report, a sample-log excerpt, and a round straight from the trace."""

from pathlib import Path

from wsn_pathosim import Simulation, load_scenario, report_text, samples_csv

scenario = Path(__file__).resolve().parent.parent / "scenarios" / "three_node_building.json"
config = load_scenario(scenario)

sim = Simulation(config, trace=True)
sim.run_until(86400.0)
print(report_text(sim), end="")
print()

rows = samples_csv(sim).splitlines()
print("sample log (first 5 of %d):" % (len(rows) - 1))
for row in rows[:6]:
    print(" ", row)
print()

print("the first collection round, from the trace:")
for line in sim.trace_lines:
    at, seq, kind, node, detail = line.split("\t")
    t = int(at) / 1e6
    if 1791.0 <= t <= 1793.0 and kind not in ("poll_wake",):
        print(f"  t={t:11.6f} s  {kind:<16} node {node:<2} {detail}")
