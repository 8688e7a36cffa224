"""Regenerates the replay fixtures and their target renders.

Run from anywhere after building; SCENELOOP_CLI overrides the binary path.
"""
import json, os, subprocess
HERE = os.path.dirname(os.path.abspath(__file__))
F = HERE
CLI = os.environ.get("SCENELOOP_CLI", os.path.join(HERE, "../../build/tools/sceneloop"))

def block(sign, lines):
    if not lines: return f"{sign}: []"
    if len(lines) == 1: return f"{sign}: [{lines[0]}]"
    return f"{sign}: [\n" + "\n".join(lines) + "\n]"

def diff(rem, add): return block("-", rem) + "\n" + block("+", add)

def call(name, content="", **args):
    return {"content": content, "tool_name": name, "arguments": args}

def execute(thought, code, rem, add):
    return call("execute_code", thought, thought=thought, code_diff=diff(rem, add), code=code)

def w(path, obj):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        if isinstance(obj, str): f.write(obj)
        else: f.write(json.dumps(obj, indent=2) + "\n")

def prog(lines): return "\n".join(lines) + "\n"

def render(scn, png, size=64):
    subprocess.run([CLI, "render", "--script", scn, "--out", png, "--width", str(size), "--height", str(size)],
                   check=True, stdout=subprocess.DEVNULL)

BG = 'set_background color=(0.05,0.05,0.05) ambient=0.3'
FLOOR = 'add_primitive name="floor" shape="plane" location=(0,0,0) scale=(6,6,1) color=(0.6,0.6,0.6)'
BOX_RED = 'add_primitive name="box" shape="cube" location=(0,0,0.5) color=(0.8,0.2,0.2)'
BOX_GREEN = 'add_primitive name="box" shape="cube" location=(0,0,0.5) color=(0.2,0.8,0.2)'
BALL = 'add_primitive name="ball" shape="sphere" location=(1.5,0.5,0.4) scale=(0.8,0.8,0.8) color=(0.2,0.3,0.9)'
SUN = 'add_light name="sun" kind="sun" direction=(-0.4,-0.3,-1) energy=2.5'
CAM = 'add_camera name="Camera" location=(5,-5,4) look_at=(0,0,0.4) fov_y=0.8'

# --- golden replay: reconstruction in three rounds -------------------------
g = F + "/golden_replay"
target = prog([BG, FLOOR, BOX_RED, BALL, SUN, CAM])
w(g + "/target.scn", target)
render(g + "/target.scn", g + "/target.png")
p0 = [BG, FLOOR, BOX_GREEN, SUN, CAM]
p1 = [BG, FLOOR, BOX_GREEN, BALL, SUN, CAM]
p2 = [BG, FLOOR, BOX_RED, BALL, SUN, CAM]
w(g + "/replay.json", {
    "version": 1,
    "generator": [
        call("make_plan", "Plan first.", overall_description="A cube and a sphere on a grey floor under one sun.",
             detailed_plan="1. floor, box, light, camera\n2. add the sphere\n3. match colours"),
        execute("Lay out the floor, the box, a sun and the camera.", prog(p0), [], p0),
        execute("Add the sphere next to the box.", prog(p1), [SUN], [BALL, SUN]),
        execute("The box should be red.", prog(p2), [BOX_GREEN], [BOX_RED]),
        call("end_process", "The render matches the target."),
    ],
    "verifier": [
        call("initialize_viewpoint", "Frame everything.", object_names=["floor", "box"]),
        call("investigate", "Closer look at the box.", operation="zoom", direction="in"),
        call("end_process", "", visual_difference="The target has a blue sphere to the right of the box.",
             edit_suggestion="Add a sphere at (1.5, 0.5, 0.4) with radius 0.4."),
        call("end_process", "", visual_difference="The box is green but should be red.",
             edit_suggestion="Set the box colour to (0.8, 0.2, 0.2)."),
        call("set_camera", "Check from above.", location=[0, 0, 8], rotation_euler=[0, 0, 0]),
        call("end_process", "", visual_difference="No visible difference.", edit_suggestion="None."),
    ],
})
w(g + "/task.json", {"schema_version": 1, "id": "golden-replay", "kind": "reconstruct",
                     "instruction": "Rebuild the scene shown in the target image.",
                     "target_images": ["target.png"], "replay": "replay.json"})

# --- error recovery: round 0 breaks at line 3, round 1 fixes it ------------
e = F + "/error_recovery"
broken = [BG, FLOOR, 'add_primitive name="box" shape="pyramid" location=(0,0,0.5)', SUN, CAM]
fixed = [BG, FLOOR, BOX_RED, SUN, CAM]
w(e + "/target.scn", prog(fixed))
render(e + "/target.scn", e + "/target.png")
w(e + "/replay.json", {
    "version": 1,
    "generator": [
        execute("First attempt.", prog(broken), [], broken),
        execute("pyramid is not a shape; use a cube.", prog(fixed), [broken[2]], [BOX_RED]),
        call("end_process"),
    ],
    "verifier": [call("end_process", "", visual_difference="None.", edit_suggestion="None.")],
})
w(e + "/task.json", {"schema_version": 1, "id": "error-recovery", "kind": "reconstruct",
                     "instruction": "Rebuild the scene shown in the target image.",
                     "target_images": ["target.png"], "replay": "replay.json"})

# --- never-ending: resubmits the same program forever ----------------------
n = F + "/never_ending"
w(n + "/replay.json", {
    "version": 1, "repeat": True,
    "generator": [execute("Again.", prog(fixed), [], fixed)],
    "verifier": [call("end_process", "", visual_difference="Still different.", edit_suggestion="Keep going.")],
})
w(n + "/task.json", {"schema_version": 1, "id": "never-ending", "kind": "reconstruct",
                     "instruction": "Rebuild the scene shown in the target image.",
                     "target_images": ["../error_recovery/target.png"], "replay": "replay.json"})

# --- end-to-end edit: three fixes, PL falls to zero ------------------------
d = F + "/e2e_edit"
LIGHT_BG = 'set_background color=(0.9,0.9,0.9) ambient=0.3'
BOX_OFF = 'add_primitive name="box" shape="cube" location=(1.2,-0.8,0.5) color=(0.2,0.8,0.2)'
BOX_OFF_RED = 'add_primitive name="box" shape="cube" location=(1.2,-0.8,0.5) color=(0.8,0.2,0.2)'
start = [LIGHT_BG, BOX_OFF, SUN, CAM]
e0 = [LIGHT_BG, BOX_OFF_RED, SUN, CAM]
e1 = [BG, BOX_OFF_RED, SUN, CAM]
e2 = [BG, BOX_RED, SUN, CAM]
w(d + "/initial.scn", prog(start))
w(d + "/target.scn", prog(e2))
render(d + "/target.scn", d + "/target.png")
w(d + "/replay.json", {
    "version": 1,
    "generator": [
        execute("Make the box red.", prog(e0), [BOX_OFF], [BOX_OFF_RED]),
        execute("Darken the background.", prog(e1), [LIGHT_BG], [BG]),
        execute("Move the box to the origin.", prog(e2), [BOX_OFF_RED], [BOX_RED]),
        call("end_process"),
    ],
    "verifier": [
        call("end_process", "", visual_difference="The background is far too bright.",
             edit_suggestion="Use a near-black background."),
        call("end_process", "", visual_difference="The box sits off centre.", edit_suggestion="Move it to (0,0,0.5)."),
        call("end_process", "", visual_difference="No visible difference.", edit_suggestion="None."),
    ],
})
w(d + "/task.json", {"schema_version": 1, "id": "e2e-edit", "kind": "edit",
                     "instruction": "Edit the program so its render matches the target image.",
                     "target_images": ["target.png"], "initial_program": "initial.scn", "replay": "replay.json"})

# --- six-task suite --------------------------------------------------------
s = F + "/suite"
tasks = []
def task(tid, kind, instr, initial, final, gen_extra=None, fails=False):
    tdir = s + "/" + tid
    w(tdir + "/target.scn", prog(final))
    render(tdir + "/target.scn", tdir + "/target.png")
    t = {"schema_version": 1, "id": tid, "kind": kind, "instruction": instr,
         "target_images": ["target.png"], "replay": "replay.json"}
    w(tdir + "/initial.scn", prog(initial))
    t["initial_program"] = "initial.scn"
    submitted = final if not fails else [BG, 'add_primitive name="x" shape="torus"', SUN, CAM]
    gen = [execute("Single revision.", prog(submitted), [], submitted), call("end_process")]
    w(tdir + "/replay.json", {"version": 1, "generator": gen,
                              "verifier": [call("end_process", "", visual_difference="None.", edit_suggestion="None.")]})
    w(tdir + "/task.json", t)
    tasks.append(tid + "/task.json")

CAM_FAR = 'add_camera name="Camera" location=(9,-9,7) look_at=(0,0,0.4) fov_y=0.8'
CAM_SIDE = 'add_camera name="Camera" location=(6,0,2) look_at=(0,0,0.5) fov_y=0.8'
task("camera-a", "camera_adjust", "Move the camera to reproduce the target view.",
     [BG, FLOOR, BOX_RED, SUN, CAM_FAR], [BG, FLOOR, BOX_RED, SUN, CAM])
task("camera-b", "camera_adjust", "Move the camera to reproduce the target view.",
     [BG, FLOOR, BOX_RED, BALL, SUN, CAM], [BG, FLOOR, BOX_RED, BALL, SUN, CAM_SIDE])
task("edit-a", "edit", "Change the box colour to match the target.",
     [BG, FLOOR, BOX_GREEN, SUN, CAM], [BG, FLOOR, BOX_RED, SUN, CAM])
task("edit-b", "edit", "Match the lighting of the target.",
     [BG, FLOOR, BOX_RED, 'add_light name="sun" kind="sun" direction=(-0.4,-0.3,-1) energy=0.8', CAM],
     [BG, FLOOR, BOX_RED, SUN, CAM])
task("compose-a", "compositional", "Add the sphere shown in the target.",
     [BG, FLOOR, BOX_RED, SUN, CAM], [BG, FLOOR, BOX_RED, BALL, SUN, CAM])
task("compose-b", "compositional", "Add the sphere shown in the target.",
     [BG, FLOOR, SUN, CAM], [BG, FLOOR, BALL, SUN, CAM], fails=True)
w(s + "/suite.json", {"schema_version": 1, "name": "mini", "tasks": tasks})
print("ok")
