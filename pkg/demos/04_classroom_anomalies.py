"""
Finding the one student who went wrong
======================================

End-to-end run on a synthetic classroom: thirty students handed in the
intended solution, one handed in a near miss. The detector has no idea
what the assignment was - it only sees that thirty scripts agree on a
pattern and one almost agrees.
"""

import tempfile
from pathlib import Path

from blockmine import (
    AnomalyReport,
    MiningConfig,
    analyze_dataset,
    build_project,
    load_dataset,
    report_to_text,
    write_project_archive,
)

correct = [
    "event_whenflagclicked",
    ("control_forever", [
        {
            "opcode": "control_if",
            "reporters": {"CONDITION": ("sensing_keypressed", {"KEY_OPTION": "sensing_keyoptions"})},
            "body": ["motion_movesteps"],
        },
    ]),
]
near_miss = [
    "event_whenflagclicked",
    ("control_forever", [
        {
            "opcode": "control_if",
            "reporters": {"CONDITION": ("sensing_keypressed", {"KEY_OPTION": "sensing_keyoptions"})},
            "body": ["motion_gotoxy"],
        },
    ]),
]

# Write the classroom to disk exactly as a teacher would collect it:
# one .sb3 archive per student.
dataset = Path(tempfile.mkdtemp(prefix="classroom_"))
for i in range(30):
    project = build_project(f"student_{i:02d}", [("Cat", [correct])])
    write_project_archive(project, dataset / f"student_{i:02d}.sb3")
write_project_archive(
    build_project("student_30", [("Cat", [near_miss])]), dataset / "student_30.sb3"
)
print("dataset:", dataset)

# Default configuration: a pattern needs 20 supporters, an anomaly needs
# confidence 0.9. Confidence is support / (support + number of scripts
# sharing the same deviation) - an exact fraction, never a float.
config = MiningConfig()
projects = load_dataset(dataset)
result = analyze_dataset(projects, config)

print(f"\npatterns: {len(result.patterns)}")
print(f"violations: {len(result.violations)}")
print(f"anomalies: {len(result.anomalies)}")

anomaly = result.anomalies[0]
print(f"\nflagged: {anomaly.script.ident}")
print(f"confidence: {anomaly.confidence} (30 students agree, 1 deviates)")
print("what the script is missing:")
for prop in sorted(anomaly.deviation):
    print("  ", prop.display)

# The full report, as the command line tool would print it.
report = AnomalyReport(dataset=str(dataset), config=config, result=result)
print("\n" + report_to_text(report, top=5))
