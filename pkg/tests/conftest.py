"""Shared fixtures: the worked-example scripts and a synthetic classroom.

The "fig" script is the running example used across the test suite: a
when-green-flag hat over a forever loop that moves the sprite while a key
is pressed. The buggy variant jumps to a fixed position instead of moving,
which changes every temporal property that mentions the move block.
"""

from __future__ import annotations

import pathlib

import pytest

from blockmine import (
    BlockLabel,
    ScriptModel,
    TemporalProperty,
    build_project,
    write_project_archive,
)

WGF = "event_whenflagclicked"
FOREVER = "control_forever"
IF = "control_if"
MOVE = "motion_movesteps"
GOTO = "motion_gotoxy"

FIG_SCRIPT = [
    WGF,
    (FOREVER, [
        {
            "opcode": IF,
            "reporters": {"CONDITION": ("sensing_keypressed", {"KEY_OPTION": "sensing_keyoptions"})},
            "body": [MOVE],
        },
    ]),
]

FIG_BUGGY_SCRIPT = [
    WGF,
    (FOREVER, [
        {
            "opcode": IF,
            "reporters": {"CONDITION": ("sensing_keypressed", {"KEY_OPTION": "sensing_keyoptions"})},
            "body": [GOTO],
        },
    ]),
]


def prop(first: str, second: str) -> TemporalProperty:
    return TemporalProperty(BlockLabel(first), BlockLabel(second))


def _example_props(action: str) -> frozenset[TemporalProperty]:
    """The nine properties of the example script, parametric in the block
    inside the if-then body."""
    return frozenset({
        prop(WGF, FOREVER),
        prop(WGF, IF),
        prop(WGF, action),
        prop(FOREVER, IF),
        prop(FOREVER, action),
        prop(IF, IF),
        prop(IF, action),
        prop(action, IF),
        prop(action, action),
    })


FIG_PROPS = _example_props(MOVE)
FIG_BUGGY_PROPS = _example_props(GOTO)

# Exactly the properties of the pattern that mention the move block; the
# buggy script satisfies all the others.
FIG_DEVIATION = frozenset({
    p for p in FIG_PROPS if MOVE in (p.first.opcode, p.second.opcode)
})


def hand_built_fig_model(action: str = MOVE) -> ScriptModel:
    """The four-location model of the example script, written out by hand."""
    label = BlockLabel
    return ScriptModel(
        entry=0,
        exits=frozenset(),
        transitions=frozenset({
            (0, label(WGF), 1),
            (1, label(FOREVER), 2),
            (2, label(IF), 2),
            (2, label(IF), 3),
            (3, label(action), 2),
        }),
        source=None,
    )


def write_classroom(
    directory: pathlib.Path, n_correct: int = 30, n_buggy: int = 1
) -> pathlib.Path:
    """Write n_correct copies of the example solution plus buggy variants."""
    directory.mkdir(parents=True, exist_ok=True)
    for i in range(n_correct):
        project = build_project(f"student_{i:03d}", [("Cat", [FIG_SCRIPT])])
        write_project_archive(project, directory / f"student_{i:03d}.sb3")
    for j in range(n_buggy):
        name = f"student_{n_correct + j:03d}"
        project = build_project(name, [("Cat", [FIG_BUGGY_SCRIPT])])
        write_project_archive(project, directory / f"{name}.sb3")
    return directory


@pytest.fixture(scope="session")
def fig_project():
    return build_project("fig", [("Cat", [FIG_SCRIPT])])


@pytest.fixture(scope="session")
def fig_buggy_project():
    return build_project("fig-buggy", [("Cat", [FIG_BUGGY_SCRIPT])])


@pytest.fixture(scope="session")
def classroom_dir(tmp_path_factory) -> pathlib.Path:
    return write_classroom(tmp_path_factory.mktemp("classroom"))
