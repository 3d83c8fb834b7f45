"""
From blocks to a control-flow model
===================================

A Scratch solution is a bag of block stacks. This walkthrough builds one
small project in memory, looks at its raw blocks, and turns its script
into the finite model that all later analysis works on.
"""

from blockmine import (
    build_project,
    build_script_model,
    enumerate_scripts,
    model_to_dot,
    opcode_display_name,
)

# The classic "walk while a key is pressed" script: a when-green-flag hat,
# a forever loop, and inside it an if-then guarding a move.
script = [
    "event_whenflagclicked",
    ("control_forever", [
        {
            "opcode": "control_if",
            "reporters": {"CONDITION": ("sensing_keypressed", {"KEY_OPTION": "sensing_keyoptions"})},
            "body": ["motion_movesteps"],
        },
    ]),
]

project = build_project("walker", [("Cat", [script])])

# Every project has a stage plus its sprites. Reporter blocks (the key
# sensor and its dropdown) are stored too, but they never become part of
# a model.
print("actors:", [a.name for a in project.actors])
print("command blocks:", project.block_count())

for block in sorted(project.actor("Cat").blocks.values(), key=lambda b: b.id):
    flag = " (shadow)" if block.is_shadow else ""
    print(f"  {block.id}: {opcode_display_name(block.opcode)}{flag}")

# One script was found: the single stack owned by the Cat sprite.
(script_ref,) = enumerate_scripts(project)
print("\nscript:", script_ref.ident)

# The model is a labeled transition system over control locations. The
# forever loop produces a cycle; the if-then produces a fork whose two
# edges carry the same label (condition true / condition false).
model = build_script_model(script_ref, project)
print("entry location:", model.entry)
print("exit locations:", sorted(model.exits) or "none (the loop never ends)")
print("transitions:")
for src, label, dst in model.sorted_transitions():
    print(f"  l{src} --[{label.display}]--> l{dst}")

# The same model as Graphviz input, ready for `dot -Tpng`.
print("\n" + model_to_dot(model))
