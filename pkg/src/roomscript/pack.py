"""The bundled replay scenarios: ten referent scenes plus two worked examples.

Initial scenes are built with the real Scene API so their serialized form is
always settled and consistent; emit_pack writes them as byte-stable JSON.
"""

from __future__ import annotations

import json
import os

from .geometry import Vec3
from .scene import Scene
from .replay import SCENARIO_SCHEMA, validate_scenario


def _scene(*objects) -> dict:
    """Build an initial-scene doc from (kind, name, overrides) triples."""
    scene = Scene()
    for kind, name, overrides in objects:
        scene.create_object(kind, name=name, overrides=overrides)
    return scene.to_doc()


def _v(x, y, z):
    return Vec3(x, y, z)


def scene1_polite_chair() -> dict:
    return {
        "id": "scene1-polite-chair",
        "title": "A polite chair: create furniture, then it retreats when approached",
        "steps": [
            {
                "prompt": "create a coffee table",
                "assertions": [
                    {"kind": "exists", "selector": {"kind": "table"}},
                    {"kind": "property", "selector": {"name": "table-1"},
                     "path": "position.z", "cmp": "approx", "value": 1.5, "tol": 1e-9},
                ],
            },
            {
                "prompt": "create a chair behind me",
                "assertions": [
                    {"kind": "property", "selector": {"name": "chair-1"},
                     "path": "position.z", "cmp": "approx", "value": -1.5, "tol": 1e-9},
                ],
            },
            {
                "prompt": "move the chair to the table",
                "assertions": [
                    {"kind": "property", "selector": {"name": "chair-1"},
                     "path": "position.z", "cmp": "approx", "value": 0.85, "tol": 1e-6},
                    {"kind": "predicate", "relation": "near",
                     "a": {"name": "chair-1"}, "b": {"name": "table-1"}},
                ],
            },
            {
                "prompt": "when people get near the chair move it back",
                "pose": {"position": [-1.5, 0, -1.5]},
                "do": [{"walk": {"to": [0, 0, 0], "ticks": 10}}],
                "assertions": [
                    {"kind": "eventFired", "object": "chair-1",
                     "event": "OnNearEnter", "times": 1},
                    {"kind": "property", "selector": {"name": "chair-1"},
                     "path": "position.z", "cmp": "gt", "value": 1.25},
                ],
            },
        ],
    }


def scene2_growing_desk() -> dict:
    return {
        "id": "scene2-growing-desk",
        "title": "A growing desk: relative size edits",
        "steps": [
            {
                "prompt": "create a desk",
                "assertions": [
                    {"kind": "property", "selector": {"name": "desk-1"},
                     "path": "size.w", "cmp": "approx", "value": 1.2, "tol": 1e-9},
                ],
            },
            {
                "prompt": "make the desk wider",
                "assertions": [
                    {"kind": "property", "selector": {"name": "desk-1"},
                     "path": "size.w", "cmp": "approx", "value": 1.8, "tol": 1e-9},
                ],
            },
            {
                "prompt": "make the desk narrower",
                "assertions": [
                    {"kind": "property", "selector": {"name": "desk-1"},
                     "path": "size.w", "cmp": "approx", "value": 1.2, "tol": 1e-9},
                    {"kind": "property", "selector": {"name": "desk-1"},
                     "path": "size.h", "cmp": "approx", "value": 0.75, "tol": 1e-9},
                ],
            },
        ],
    }


def scene3_scaredy_cat() -> dict:
    return {
        "id": "scene3-scaredy-cat",
        "title": "Scaredy cat: wall placement, a misplaced sofa, and a proximity jump",
        "steps": [
            {
                "prompt": "create a sofa against the north wall",
                "assertions": [
                    {"kind": "property", "selector": {"name": "couch-1"},
                     "path": "position.z", "cmp": "approx", "value": 1.55, "tol": 1e-9},
                    {"kind": "property", "selector": {"name": "couch-1"},
                     "path": "rotation.yaw", "cmp": "approx", "value": 180.0},
                ],
            },
            {
                "note": "unexpected execution: the sofa lands mid-room; the user corrects it",
                "injectFault": {"sets": {"couch-1": {"position": [0, 0, 0]}}},
                "prompt": "move the couch against the north wall",
                "assertions": [
                    {"kind": "property", "selector": {"name": "couch-1"},
                     "path": "position.z", "cmp": "approx", "value": 1.55, "tol": 1e-6},
                ],
            },
            {
                "prompt": "create a coffee table in front of the couch with a flower pot on it",
                "assertions": [
                    {"kind": "predicate", "relation": "in_front_of",
                     "a": {"name": "table-1"}, "b": {"name": "couch-1"}},
                    {"kind": "predicate", "relation": "on_top_of",
                     "a": {"name": "plant-1"}, "b": {"name": "table-1"}},
                ],
            },
            {
                "prompt": "create a cat on the couch",
                "assertions": [
                    {"kind": "predicate", "relation": "on_top_of",
                     "a": {"name": "cat-1"}, "b": {"name": "couch-1"}},
                ],
            },
            {
                "prompt": "when people get near the cat the cat jumps on the coffee table",
                "pose": {"position": [0, 0, -1.8]},
                "do": [{"walk": {"to": [0, 0, 0.8], "ticks": 10}}],
                "assertions": [
                    {"kind": "eventFired", "object": "cat-1", "event": "OnNearEnter", "times": 1},
                    {"kind": "predicate", "relation": "on_top_of",
                     "a": {"name": "cat-1"}, "b": {"name": "table-1"}},
                ],
            },
        ],
    }


def scene4_sliding_door() -> dict:
    return {
        "id": "scene4-sliding-door",
        "title": "Sliding door: hinge behavior, with an injected slide-up fault",
        "steps": [
            {
                "prompt": "create a door against the north wall",
                "assertions": [
                    {"kind": "exists", "selector": {"kind": "door"}},
                    {"kind": "property", "selector": {"name": "door-1"},
                     "path": "rotation.yaw", "cmp": "approx", "value": 180.0},
                ],
            },
            {
                "prompt": "when someone gets near the door the door opens",
                "pose": {"position": [0, 0, -1.5]},
                "do": [{"walk": {"to": [0, 0, 1.2], "ticks": 10}}],
                "assertions": [
                    {"kind": "eventFired", "object": "door-1", "event": "OnNearEnter", "times": 1},
                    {"kind": "property", "selector": {"name": "door-1"},
                     "path": "rotation.yaw", "cmp": "approx", "value": 90.0},
                ],
            },
            {
                "note": "unexpected execution: the door slides upward instead of swinging",
                "injectFault": {"sets": {"door-1": {
                    "levitated": True, "rotation": 0,
                    "position": {"offset": [0, 1.2, 0]}}}},
                "prompt": "put the door back. open the door on its hinges.",
                "assertions": [
                    {"kind": "property", "selector": {"name": "door-1"},
                     "path": "levitated", "cmp": "eq", "value": False},
                    {"kind": "property", "selector": {"name": "door-1"},
                     "path": "position.y", "cmp": "approx", "value": 0.0, "tol": 1e-9},
                    {"kind": "property", "selector": {"name": "door-1"},
                     "path": "rotation.yaw", "cmp": "approx", "value": 90.0},
                ],
            },
        ],
    }


def scene5_alien_lamp() -> dict:
    return {
        "id": "scene5-alien-lamp",
        "title": "Alien lamp: touch toggles the light; it comes back the wrong color",
        "steps": [
            {
                "prompt": "create a lamp on a desk",
                "assertions": [
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "position.y", "cmp": "approx", "value": 0.75, "tol": 1e-9},
                    {"kind": "predicate", "relation": "on_top_of",
                     "a": {"name": "lamp-1"}, "b": {"name": "desk-1"}},
                ],
            },
            {
                "prompt": "when someone touches the lamp turn it on",
                "do": [
                    {"pose": {"position": [0, 0, 0.6], "hand": [0, 1.0, 1.33]}, "ticks": 3},
                ],
                "assertions": [
                    {"kind": "eventFired", "object": "lamp-1", "event": "OnTouchEnter", "times": 1},
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "illuminated", "cmp": "eq", "value": True},
                ],
            },
            {
                "note": "unexpected execution: the lamp lights up blue instead of yellow",
                "injectFault": {"sets": {"lamp-1": {"color": "blue", "illuminated": True}}},
                "prompt": "make the lamp yellow",
                "assertions": [
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "color.g", "cmp": "approx", "value": 0.9, "tol": 1e-9},
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "color.b", "cmp": "approx", "value": 0.0, "tol": 1e-9},
                ],
            },
        ],
    }


def scene6_rearranging_paintings() -> dict:
    initial = _scene(
        ("painting", "painting-1", {"wallMounted": "north", "position": _v(-0.8, 1.2, 2.0)}),
        ("painting", "painting-2", {"wallMounted": "north", "position": _v(0.8, 1.7, 2.0)}),
    )
    return {
        "id": "scene6-rearranging-paintings",
        "title": "Rearranging paintings: view-relative selection, undo, wall moves",
        "initialScene": initial,
        "initialPose": {"position": [0, 0, -0.5], "yaw": 0},
        "steps": [
            {
                "prompt": "align the painting on the left with the painting on the right",
                "assertions": [
                    {"kind": "property", "selector": {"name": "painting-1"},
                     "path": "position.y", "cmp": "approx", "value": 1.7, "tol": 1e-9},
                ],
            },
            {
                "note": "unexpected execution: the wrong painting moves; undo repairs it",
                "injectFault": {"sets": {"painting-2": {"position": [0.8, 1.1, 2.0]}}},
                "prompt": "undo that",
                "assertions": [
                    {"kind": "property", "selector": {"name": "painting-2"},
                     "path": "position.y", "cmp": "approx", "value": 1.7, "tol": 1e-9},
                    {"kind": "property", "selector": {"name": "painting-1"},
                     "path": "position.y", "cmp": "approx", "value": 1.7, "tol": 1e-9},
                ],
            },
            {
                "prompt": "move the painting on the right onto the east wall",
                "assertions": [
                    {"kind": "property", "selector": {"name": "painting-2"},
                     "path": "wallMounted", "cmp": "eq", "value": "east"},
                    {"kind": "property", "selector": {"name": "painting-1"},
                     "path": "wallMounted", "cmp": "eq", "value": "north"},
                ],
            },
        ],
    }


def scene7_organize_room() -> dict:
    initial = _scene(
        ("table", "table-1", {"position": _v(-1.4, 0, -1.4)}),
        ("chair", "chair-1", {"position": _v(-0.7, 0, -1.7)}),
        ("chair", "chair-2", {"position": _v(-0.6, 0, -1.1)}),
        ("lamp", "lamp-1", {"position": _v(-1.75, 0, -0.8)}),
        ("lamp", "lamp-2", {"position": _v(-1.2, 0, -0.6)}),
        ("plant", "plant-1", {"position": _v(-1.8, 0, -1.8)}),
    )
    return {
        "id": "scene7-organize-room",
        "title": "Organize a room: a layout macro, then put everything back",
        "initialScene": initial,
        "initialPose": {"position": [0, 0, -1.9], "yaw": 0},
        "steps": [
            {
                "prompt": "set up the living room",
                "assertions": [
                    {"kind": "property", "selector": {"name": "table-1"},
                     "path": "position.x", "cmp": "approx", "value": 0.0, "tol": 1e-9},
                    {"kind": "property", "selector": {"name": "table-1"},
                     "path": "position.z", "cmp": "approx", "value": 0.0, "tol": 1e-9},
                    {"kind": "predicate", "relation": "on_top_of",
                     "a": {"name": "plant-1"}, "b": {"name": "table-1"}},
                    {"kind": "predicate", "relation": "near",
                     "a": {"name": "chair-1"}, "b": {"name": "table-1"}},
                    {"kind": "predicate", "relation": "near",
                     "a": {"name": "chair-2"}, "b": {"name": "table-1"}},
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "position.x", "cmp": "approx", "value": -1.85, "tol": 1e-6},
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "position.z", "cmp": "approx", "value": 1.85, "tol": 1e-6},
                ],
            },
            {
                "prompt": "put the furniture back",
                "assertions": [
                    {"kind": "sceneEquals", "checkpoint": "initial"},
                ],
            },
        ],
    }


def scene8_roomshift_furniture() -> dict:
    return {
        "id": "scene8-roomshift-furniture",
        "title": "Roomshift furniture: a row of chairs, pointing levitates, growth fault",
        "initialPose": {"position": [0, 0, -1.2], "yaw": 0},
        "steps": [
            {
                "prompt": "create a row of 4 chairs",
                "assertions": [
                    {"kind": "count", "selector": {"kind": "chair"}, "n": 4},
                    {"kind": "property", "selector": {"name": "chair-1"},
                     "path": "position.x", "cmp": "approx", "value": -1.2, "tol": 1e-9},
                ],
            },
            {
                "prompt": "when someone points at a chair it levitates",
                "do": [
                    {"pose": {"position": [0, 0, -1.2], "pointAt": [-0.4, 0.45, 0]},
                     "ticks": 2},
                ],
                "assertions": [
                    {"kind": "eventFired", "object": "chair-2", "event": "OnPointEnter",
                     "times": 1},
                    {"kind": "property", "selector": {"name": "chair-2"},
                     "path": "levitated", "cmp": "eq", "value": True},
                ],
            },
            {
                "note": "unexpected execution: the pointed chair also triples in size",
                "injectFault": {"sets": {"chair-2": {"size": {"scale": 3}}}},
                "prompt": "put that chair back",
                "tokenTimestamps": [0, 150, 300, 450],
                "gestures": [{"t": 150, "pointAt": [-0.4, 1.0, 0]}],
                "assertions": [
                    {"kind": "property", "selector": {"name": "chair-2"},
                     "path": "size.w", "cmp": "approx", "value": 0.45, "tol": 1e-9},
                    {"kind": "property", "selector": {"name": "chair-2"},
                     "path": "levitated", "cmp": "eq", "value": False},
                    {"kind": "property", "selector": {"name": "chair-2"},
                     "path": "position.x", "cmp": "approx", "value": -0.4, "tol": 1e-9},
                ],
            },
            {
                "prompt": "when someone gets close to a chair spin it around",
                "pose": {"position": [0, 0, -1.9]},
                "do": [{"walk": {"to": [1.7, 0, -0.85], "ticks": 8}}],
                "assertions": [
                    {"kind": "eventFired", "object": "chair-4", "event": "OnNearEnter",
                     "times": 1},
                    {"kind": "property", "selector": {"name": "chair-4"},
                     "path": "rotation.yaw", "cmp": "approx", "value": 180.0},
                    {"kind": "property", "selector": {"name": "chair-3"},
                     "path": "rotation.yaw", "cmp": "approx", "value": 0.0},
                ],
            },
        ],
    }


def scene9_three_lights() -> dict:
    initial = _scene(
        ("switch", "switch-1", {"position": _v(-1.4, 0, 0.6), "color": "red"}),
        ("switch", "switch-2", {"position": _v(0, 0, 0.6), "color": "green"}),
        ("switch", "switch-3", {"position": _v(1.4, 0, 0.6), "color": "blue"}),
        ("lamp", "lamp-1", {"position": _v(-1.4, 0, 1.7), "color": "red"}),
        ("lamp", "lamp-2", {"position": _v(0, 0, 1.7), "color": "green"}),
        ("lamp", "lamp-3", {"position": _v(1.4, 0, 1.7), "color": "blue"}),
    )
    return {
        "id": "scene9-three-lights",
        "title": "There are three lights: walk-on switches, then the wrong light behavior",
        "initialScene": initial,
        "initialPose": {"position": [-1.4, 0, -1.5], "yaw": 0},
        "steps": [
            {
                "prompt": ("when someone walks on the red switch turn on the red lamp. "
                           "when someone walks on the green switch turn on the green lamp. "
                           "when someone walks on the blue switch turn on the blue lamp."),
                "do": [{"walk": {"to": [-1.4, 0, 0.3], "ticks": 10}}],
                "assertions": [
                    {"kind": "eventFired", "object": "switch-1", "event": "OnNearEnter",
                     "times": 1},
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "illuminated", "cmp": "eq", "value": True},
                    {"kind": "property", "selector": {"name": "lamp-2"},
                     "path": "illuminated", "cmp": "eq", "value": False},
                    {"kind": "property", "selector": {"name": "lamp-3"},
                     "path": "illuminated", "cmp": "eq", "value": False},
                ],
            },
            {
                "note": "unexpected execution: the wrong lamp lights up; the user fixes it",
                "injectFault": {"sets": {
                    "lamp-1": {"illuminated": False},
                    "lamp-2": {"illuminated": True},
                }},
                "prompt": "turn the green lamp off. turn the red lamp on.",
                "assertions": [
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "illuminated", "cmp": "eq", "value": True},
                    {"kind": "property", "selector": {"name": "lamp-2"},
                     "path": "illuminated", "cmp": "eq", "value": False},
                ],
            },
        ],
    }


def scene10_hiding_cubes() -> dict:
    initial = _scene(
        ("couch", "couch-1", {"position": _v(-1.0, 0, 0.5), "rotation": (180, 0, 0)}),
        ("cabinet", "cabinet-1", {"position": _v(1.5, 0, 1.5)}),
        ("cube", "cube-1", {"position": _v(-1.5, 0, -1.5), "color": "blue"}),
        ("cube", "cube-2", {"position": _v(-0.5, 0, -1.6), "color": "gray"}),
        ("cube", "cube-3", {"position": _v(1.0, 0, -1.6), "color": "white"}),
        ("cube", "cube-4", {"position": _v(1.6, 0, -1.0), "color": "purple"}),
        ("cube", "cube-5", {"position": _v(0.5, 0, -1.2), "color": "green"}),
    )
    return {
        "id": "scene10-hiding-cubes",
        "title": "Hiding cubes: moving color-selected cubes relative to other objects",
        "initialScene": initial,
        "initialPose": {"position": [0, 0, -0.5], "yaw": 0},
        "steps": [
            {
                "prompt": "move the blue cube behind the couch",
                "assertions": [
                    {"kind": "predicate", "relation": "behind",
                     "a": {"kind": "cube", "color": "blue"}, "b": {"name": "couch-1"}},
                ],
            },
            {
                "prompt": "move the gray cube on the cabinet",
                "assertions": [
                    {"kind": "predicate", "relation": "on_top_of",
                     "a": {"kind": "cube", "color": "gray"}, "b": {"name": "cabinet-1"}},
                    {"kind": "property", "selector": {"kind": "cube", "color": "gray"},
                     "path": "position.y", "cmp": "approx", "value": 1.8, "tol": 1e-9},
                ],
            },
            {
                "prompt": "move the white cube next to the green cube",
                "assertions": [
                    {"kind": "predicate", "relation": "near",
                     "a": {"kind": "cube", "color": "white"},
                     "b": {"kind": "cube", "color": "green"}},
                ],
            },
            {
                "prompt": "move the purple cube to the south east corner",
                "assertions": [
                    {"kind": "property", "selector": {"kind": "cube", "color": "purple"},
                     "path": "position.x", "cmp": "approx", "value": 1.75, "tol": 1e-9},
                    {"kind": "property", "selector": {"kind": "cube", "color": "purple"},
                     "path": "position.z", "cmp": "approx", "value": -1.75, "tol": 1e-9},
                ],
            },
            {
                "prompt": "move the green cube to the center of the room",
                "assertions": [
                    {"kind": "property", "selector": {"kind": "cube", "color": "green"},
                     "path": "position.x", "cmp": "approx", "value": 0.0, "tol": 1e-9},
                    {"kind": "property", "selector": {"kind": "cube", "color": "green"},
                     "path": "position.z", "cmp": "approx", "value": 0.0, "tol": 1e-9},
                ],
            },
        ],
    }


def example_lit_lamp() -> dict:
    return {
        "id": "example-lit-lamp",
        "title": "Worked example: table with a lamp that lights while grabbed",
        "steps": [
            {
                "prompt": ("create a table with a lamp on it. "
                           "when someone grabs the lamp turn it on."),
                "assertions": [
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "position.y", "cmp": "approx", "value": 0.8, "tol": 1e-9},
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "illuminated", "cmp": "eq", "value": False},
                ],
            },
            {
                "do": [{"grab": "lamp-1", "ticks": 2}],
                "assertions": [
                    {"kind": "eventFired", "object": "lamp-1", "event": "OnHoldEnter",
                     "times": 1},
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "illuminated", "cmp": "eq", "value": True},
                ],
            },
            {
                "do": [{"grab": None, "ticks": 2}],
                "assertions": [
                    {"kind": "eventFired", "object": "lamp-1", "event": "OnHoldExit",
                     "times": 1},
                    {"kind": "property", "selector": {"name": "lamp-1"},
                     "path": "illuminated", "cmp": "eq", "value": False},
                ],
            },
        ],
    }


def example_double_animals() -> dict:
    return {
        "id": "example-double-animals",
        "title": "Worked example: three kinds of animals made twice bigger",
        "steps": [
            {
                "prompt": "create three kinds of animals",
                "assertions": [
                    {"kind": "count", "selector": {"kind": "dog"}, "n": 1},
                    {"kind": "count", "selector": {"kind": "cat"}, "n": 1},
                    {"kind": "count", "selector": {"kind": "horse"}, "n": 1},
                ],
            },
            {
                "pose": {"position": [0, 0, 0], "pitch": -25},
                "prompt": "make these animals twice bigger",
                "assertions": [
                    {"kind": "property", "selector": {"kind": "dog"},
                     "path": "size.w", "cmp": "approx", "value": 0.8, "tol": 1e-9},
                    {"kind": "property", "selector": {"kind": "dog"},
                     "path": "size.h", "cmp": "approx", "value": 1.1, "tol": 1e-9},
                    {"kind": "property", "selector": {"kind": "cat"},
                     "path": "size.h", "cmp": "approx", "value": 0.7, "tol": 1e-9},
                    {"kind": "property", "selector": {"kind": "horse"},
                     "path": "size.d", "cmp": "approx", "value": 4.0, "tol": 1e-9},
                ],
            },
        ],
    }


SCENARIO_BUILDERS = [
    scene1_polite_chair,
    scene2_growing_desk,
    scene3_scaredy_cat,
    scene4_sliding_door,
    scene5_alien_lamp,
    scene6_rearranging_paintings,
    scene7_organize_room,
    scene8_roomshift_furniture,
    scene9_three_lights,
    scene10_hiding_cubes,
    example_lit_lamp,
    example_double_animals,
]


def bundled_scenarios() -> list[dict]:
    scenarios = [build() for build in SCENARIO_BUILDERS]
    for scenario in scenarios:
        validate_scenario(scenario)
    return scenarios


def emit_pack(target_dir: str) -> list[str]:
    """Write the scenario files plus the schema doc; byte-stable and idempotent."""
    os.makedirs(target_dir, exist_ok=True)
    written = []
    for scenario in bundled_scenarios():
        path = os.path.join(target_dir, scenario["id"] + ".json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(scenario, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    schema_path = os.path.join(target_dir, "scenario.schema.json")
    with open(schema_path, "w", encoding="utf-8") as fh:
        json.dump(SCENARIO_SCHEMA, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(schema_path)
    return written
