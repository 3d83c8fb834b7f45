"""
Choosing thresholds with a parameter sweep
==========================================

How sensitive is the anomaly count to min_support and min_confidence?
A sweep answers that with one cheap pass: patterns are mined once at the
loosest support, then every grid cell just re-filters the scored
violations. Counts can only shrink as either threshold grows, so the
grid reads like a contour map.
"""

import tempfile
from pathlib import Path

from blockmine import (
    build_project,
    extract_property_sets,
    load_dataset,
    parameter_sweep,
    sweep_to_csv,
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

# A messier classroom this time: 24 correct, 3 identical near misses.
# Three students making the same mistake look a lot less anomalous than
# one student alone - confidence scoring captures exactly that.
dataset = Path(tempfile.mkdtemp(prefix="sweep_"))
for i in range(24):
    write_project_archive(
        build_project(f"s{i:02d}", [("Cat", [correct])]), dataset / f"s{i:02d}.sb3"
    )
for j in range(3):
    write_project_archive(
        build_project(f"x{j}", [("Cat", [near_miss])]), dataset / f"x{j}.sb3"
    )

transactions = extract_property_sets(load_dataset(dataset))

supports = [1, 5, 10, 15, 20]
confidences = ["0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9"]
cells = parameter_sweep(transactions, supports, confidences)

print(sweep_to_csv(cells))

# Read a few cells. The 24-supporter pattern scores each near miss at
# confidence 24 / (24 + 3) = 8/9 ~ 0.889: visible at 0.8, gone at 0.9.
by_cell = {(c.min_support, c.min_confidence): c.anomalies for c in cells}
from fractions import Fraction

print("at support 20, confidence 0.8:", by_cell[(20, Fraction("0.8"))], "anomalies")
print("at support 20, confidence 0.9:", by_cell[(20, Fraction("0.9"))], "anomalies")
print("at support 1,  confidence 0.1:", by_cell[(1, Fraction("0.1"))], "anomalies")
