"""Regenerate the bundled scenario files in src/sentinel/scenarios/.

Each script mirrors the event mix of one evaluation sequence (abandonment,
moved by owner, moved by someone else, theft). Run from the repository root:

    python3 tools/build_scenarios.py
"""

from __future__ import annotations

from pathlib import Path

from sentinel.scenario import (OBJECT_PALETTE, PERSON_PALETTE, BackgroundSpec, ScriptBuilder, derive_events,
                               save_scenario, stand_point)

OUT = Path(__file__).resolve().parents[1] / "src" / "sentinel" / "scenarios"
W, H = 320, 240
OFF = {-1: -14.0, +1: W + 14.0}
ROW1, ROW2 = 125, 195


def room(name, floor, wall, extra=(), door=None, description=""):
    regions = [((0, 0, W, 70), wall)] + list(extra)
    if door is not None:
        regions.append((door, (70, 50, 35)))
    b = ScriptBuilder(name, W, H, 25.0, BackgroundSpec(color=floor, noise=4, seed=sum(map(ord, name)), regions=regions),
                      description)
    if door is not None:
        b.exit_region(door)
    return b


def osize(b, oid):
    return b.sc.entity(oid).size


def arrive(b, p, oid, site, side, t):
    """Enter from the ``side`` edge and stop beside ``site`` on that side."""
    st = stand_point(site, side, obj_size=osize(b, oid))
    b.appear(p, t, (OFF[side], st[1]))
    b.walk(p, st)
    return b.wait(p, b.now(p) + 0.5)


def drop_here(b, p, oid, site, dwell=4.0):
    t = b.drop(p, oid, b.now(p), at=site)
    return b.wait(p, t + dwell)


def leave(b, p, side):
    return b.walk(p, (OFF[side], b.pos(p)[1]))


def aside(b, p, side, dist=40):
    x, y = b.pos(p)
    return b.walk(p, (x + side * dist, y))


def go_pick(b, p, oid, site, side, t):
    """Walk (back) to the stand point beside ``site`` and pick the object up."""
    st = stand_point(site, side, obj_size=osize(b, oid))
    x, y = b.pos(p)
    if x in OFF.values() and y != st[1]:
        b.wait(p, t)
        b.walk(p, (x, st[1]))
    b.wait(p, t)
    b.walk(p, st)
    tp = b.wait(p, b.now(p) + 0.5)
    b.pick(p, oid, tp)
    return b.wait(p, tp + 1.0)


def steal(b, q, oid, site, side, t):
    arrive(b, q, oid, site, side, t)
    tp = b.pick(q, oid)
    return b.wait(q, tp + 1.0)


def lab1_v1():
    """Narrative: work beside a bag, abandonment, owner pickup, swap, theft through the door."""
    door = (206, 36, 34, 50)
    b = room("lab1_v1", (122, 120, 112), (172, 170, 160), extra=[((20, 92, 60, 26), (95, 80, 60))], door=door,
             description="Lab1: A works beside her bag; B leaves his; A takes hers, swaps it for B's and exits by the door")
    b.person("A", PERSON_PALETTE[0])
    b.person("B", PERSON_PALETTE[1])
    b.obj("bag_a", "bag", OBJECT_PALETTE[0], carrier="A")
    b.obj("bag_b", "backpack", OBJECT_PALETTE[1], carrier="B")
    site_a, site_b = (100, ROW1 + 20), (236, ROW2)
    arrive(b, "A", "bag_a", site_a, -1, 1.0)
    b.drop("A", "bag_a", b.now("A"), at=site_a)
    arrive(b, "B", "bag_b", site_b, +1, 18.0)
    drop_here(b, "B", "bag_b", site_b)
    leave(b, "B", +1)                                    # abandonment (edge exit)
    b.wait("A", 60.0)
    b.pick("A", "bag_a", 60.0)                           # moved by owner
    st = stand_point(site_b, -1, obj_size=osize(b, "bag_b"))
    b.wait("A", 62.0)
    b.walk("A", st, speed=40)
    swap_site = (st[0] - 27, ROW2)
    drop_here(b, "A", "bag_a", swap_site, dwell=4.0)     # substitute bag, A becomes its owner
    tp = b.pick("A", "bag_b")                            # moved by non-owner (warning)
    b.wait("A", tp + 1.0)
    b.walk("A", (door[0] + door[2] / 2, door[1] + door[3] / 2 + 8), speed=40)   # theft through the door
    b.walk("A", (door[0] + door[2] / 2, door[1] + 14), speed=30)
    return b.build(tail=10.0)


def lab1_v2():
    b = room("lab1_v2", (122, 120, 112), (172, 170, 160), extra=[((200, 102, 60, 40), (80, 70, 55))],
             description="Lab1: two abandoned bags, one stolen, one collected by its owner; a monitor is carried off")
    for k in range(5):
        b.person(f"P{k + 1}", PERSON_PALETTE[k])
    b.obj("bag1", "bag", OBJECT_PALETTE[0], carrier="P1")
    b.obj("bag2", "suitcase", OBJECT_PALETTE[1], carrier="P3")
    b.obj("bag3", "laptop", OBJECT_PALETTE[2], carrier="P4")
    b.obj("monitor", "monitor", [(30, 30, 34)], at=(230, 122))
    s1, s2, s3 = (70, ROW1), (250, ROW2), (100, ROW2)
    arrive(b, "P1", "bag1", s1, -1, 1.0)
    drop_here(b, "P1", "bag1", s1)
    leave(b, "P1", -1)                                   # abandonment
    steal(b, "P2", "bag1", s1, +1, b.now("P1") + 4.0)
    leave(b, "P2", +1)                                   # theft (edge)
    arrive(b, "P3", "bag2", s2, +1, b.now("P2") + 4.0)
    drop_here(b, "P3", "bag2", s2)
    leave(b, "P3", +1)                                   # abandonment
    arrive(b, "P4", "bag3", s3, -1, b.now("P3") + 4.0)
    drop_here(b, "P4", "bag3", s3)
    aside(b, "P4", -1)
    go_pick(b, "P4", "bag3", s3, -1, b.now("P4") + 4.0)  # moved by owner
    leave(b, "P4", -1)
    m = stand_point((230, 122), +1, obj_size=(30, 24))
    b.appear("P5", b.now("P4") + 3.0, (OFF[+1], m[1]))
    b.walk("P5", m)
    tp = b.pick("P5", "monitor", b.wait("P5", b.now("P5") + 0.5))   # scene object moved: suspect
    b.wait("P5", tp + 1.0)
    leave(b, "P5", +1)
    return b.build(tail=6.0)


def library():
    b = room("library", (104, 96, 86), (150, 140, 120), extra=[((30, 150, 80, 14), (70, 55, 40))],
             description="Library: a reader sits next to her backpack all along; another bag is left and later stolen")
    for k in range(3):
        b.person(f"P{k + 1}", PERSON_PALETTE[k + 2])
    b.obj("backpack", "backpack", OBJECT_PALETTE[3], carrier="P1")
    b.obj("bag", "bag", OBJECT_PALETTE[4], carrier="P2")
    s1, s2 = (70, ROW2), (250, ROW1)
    arrive(b, "P1", "backpack", s1, -1, 1.0)
    b.drop("P1", "backpack", b.now("P1"), at=s1)         # reader stays: never abandoned
    arrive(b, "P2", "bag", s2, +1, 6.0)
    drop_here(b, "P2", "bag", s2)
    leave(b, "P2", +1)                                   # abandonment
    steal(b, "P3", "bag", s2, -1, b.now("P2") + 6.0)
    leave(b, "P3", -1)                                   # theft (edge)
    end = b.now("P3") + 8.0
    b.wait("P1", end)
    return b.build(duration=end)


def lab2_v1():
    b = room("lab2_v1", (128, 128, 124), (180, 186, 190),
             description="Lab2: one bag abandoned, one collected by its owner")
    b.person("P1", PERSON_PALETTE[3])
    b.person("P2", PERSON_PALETTE[4])
    b.obj("bag1", "bag", OBJECT_PALETTE[5], carrier="P1")
    b.obj("bag2", "box", OBJECT_PALETTE[6], carrier="P2")
    s1, s2 = (90, ROW2), (230, ROW1)
    arrive(b, "P1", "bag1", s1, -1, 1.0)
    drop_here(b, "P1", "bag1", s1)
    leave(b, "P1", -1)                                   # abandonment
    arrive(b, "P2", "bag2", s2, +1, b.now("P1") + 3.0)
    drop_here(b, "P2", "bag2", s2)
    aside(b, "P2", +1)
    go_pick(b, "P2", "bag2", s2, +1, b.now("P2") + 5.0)  # moved by owner
    leave(b, "P2", +1)
    return b.build(tail=6.0)


def lab2_v2():
    b = room("lab2_v2", (128, 128, 124), (180, 186, 190),
             description="Lab2: an owner leaves her bag and comes back for it; another owner picks his bag up")
    b.person("P1", PERSON_PALETTE[5])
    b.person("P2", PERSON_PALETTE[6])
    b.obj("bag1", "backpack", OBJECT_PALETTE[0], carrier="P1")
    b.obj("bag2", "suitcase", OBJECT_PALETTE[2], carrier="P2")
    s1, s2 = (70, ROW1), (240, ROW2)
    arrive(b, "P1", "bag1", s1, -1, 1.0)
    drop_here(b, "P1", "bag1", s1)
    leave(b, "P1", -1)                                   # abandonment
    arrive(b, "P2", "bag2", s2, +1, b.now("P1") + 3.0)
    drop_here(b, "P2", "bag2", s2)
    aside(b, "P2", +1)
    go_pick(b, "P2", "bag2", s2, +1, b.now("P2") + 4.0)  # moved by owner
    leave(b, "P2", +1)
    go_pick(b, "P1", "bag1", s1, -1, b.now("P2") + 3.0)  # owner returns: moved by owner
    leave(b, "P1", -1)
    return b.build(tail=6.0)


def lab2_v3():
    door = (150, 30, 36, 50)
    b = room("lab2_v3", (128, 128, 124), (180, 186, 190), door=door,
             description="Lab2: two thefts (edge and door), two owner pickups, two abandonments")
    for k in range(6):
        b.person(f"P{k + 1}", PERSON_PALETTE[k])
    b.obj("bag1", "bag", OBJECT_PALETTE[1], carrier="P1")
    b.obj("bag2", "suitcase", OBJECT_PALETTE[3], carrier="P3")
    b.obj("bag3", "backpack", OBJECT_PALETTE[4], carrier="P4")
    b.obj("bag4", "laptop", OBJECT_PALETTE[5], carrier="P6")
    s1, s2, s3, s4 = (70, ROW1), (250, ROW2), (90, ROW2), (230, ROW1)
    arrive(b, "P1", "bag1", s1, -1, 1.0)
    drop_here(b, "P1", "bag1", s1)
    leave(b, "P1", -1)                                   # abandonment
    steal(b, "P2", "bag1", s1, +1, b.now("P1") + 4.0)
    leave(b, "P2", +1)                                   # theft (edge)
    arrive(b, "P3", "bag2", s2, +1, b.now("P2") + 3.0)
    drop_here(b, "P3", "bag2", s2)
    leave(b, "P3", +1)                                   # abandonment
    go_pick(b, "P3", "bag2", s2, +1, b.now("P3") + 6.0)  # moved by owner
    leave(b, "P3", +1)
    arrive(b, "P4", "bag3", s3, -1, b.now("P3") + 3.0)
    drop_here(b, "P4", "bag3", s3)
    aside(b, "P4", -1)
    steal(b, "P5", "bag3", s3, +1, b.now("P4") + 3.0)
    b.walk("P5", (door[0] + door[2] / 2, door[1] + door[3] / 2 + 6), speed=40)   # theft (door)
    b.walk("P5", (door[0] + door[2] / 2, door[1] + 16), speed=30)
    b.wait("P4", b.now("P5") + 1.0)
    leave(b, "P4", -1)
    arrive(b, "P6", "bag4", s4, +1, b.now("P4") + 3.0)
    drop_here(b, "P6", "bag4", s4)
    aside(b, "P6", +1)
    go_pick(b, "P6", "bag4", s4, +1, b.now("P6") + 3.0)  # moved by owner
    leave(b, "P6", +1)
    return b.build(tail=6.0)


def lab2_v4():
    b = room("lab2_v4", (128, 128, 124), (180, 186, 190),
             description="Lab2: a left bag is carried elsewhere by a stranger who then leaves it; two owner pickups")
    for k in range(4):
        b.person(f"P{k + 1}", PERSON_PALETTE[k + 4])
    b.obj("bag1", "bag", OBJECT_PALETTE[6], carrier="P1")
    b.obj("bag2", "box", OBJECT_PALETTE[0], carrier="P3")
    b.obj("bag3", "backpack", OBJECT_PALETTE[2], carrier="P4")
    s1, s1b, s2, s3 = (70, ROW1), (250, ROW2), (90, ROW2), (230, ROW1)
    arrive(b, "P1", "bag1", s1, -1, 1.0)
    drop_here(b, "P1", "bag1", s1)
    leave(b, "P1", -1)                                   # abandonment
    steal(b, "P2", "bag1", s1, +1, b.now("P1") + 4.0)    # moved by non-owner
    b.walk("P2", stand_point(s1b, +1, obj_size=osize(b, "bag1")), speed=45)
    b.wait("P2", b.now("P2") + 0.5)
    drop_here(b, "P2", "bag1", s1b)                      # relocated, P2 now owns it
    leave(b, "P2", +1)                                   # abandonment by the new owner
    arrive(b, "P3", "bag2", s2, -1, b.now("P2") + 3.0)
    drop_here(b, "P3", "bag2", s2)
    aside(b, "P3", -1)
    go_pick(b, "P3", "bag2", s2, -1, b.now("P3") + 3.0)  # moved by owner
    leave(b, "P3", -1)
    arrive(b, "P4", "bag3", s3, +1, b.now("P3") + 3.0)
    drop_here(b, "P4", "bag3", s3)
    aside(b, "P4", +1)
    go_pick(b, "P4", "bag3", s3, +1, b.now("P4") + 3.0)  # moved by owner
    leave(b, "P4", +1)
    return b.build(tail=6.0)


def hall_v1():
    b = room("hall_v1", (140, 136, 126), (196, 192, 180),
             description="Hall: a bag is stolen while its owner stands a few steps away")
    b.person("P1", PERSON_PALETTE[1])
    b.person("P2", PERSON_PALETTE[7])
    b.obj("bag", "suitcase", OBJECT_PALETTE[4], carrier="P1")
    s = (120, ROW2)
    arrive(b, "P1", "bag", s, -1, 1.0)
    drop_here(b, "P1", "bag", s)
    aside(b, "P1", -1)
    steal(b, "P2", "bag", s, +1, b.now("P1") + 3.0)
    leave(b, "P2", +1)                                   # theft (edge)
    b.wait("P1", b.now("P2") + 2.0)
    leave(b, "P1", -1)
    return b.build(tail=6.0)


def hall_v2():
    door = (40, 30, 36, 50)
    b = room("hall_v2", (140, 136, 126), (196, 192, 180), door=door,
             description="Hall: a left bag is taken out through the door")
    b.person("P1", PERSON_PALETTE[2])
    b.person("P2", PERSON_PALETTE[3])
    b.obj("bag", "bag", OBJECT_PALETTE[7], carrier="P1")
    s = (230, ROW2)
    arrive(b, "P1", "bag", s, +1, 1.0)
    drop_here(b, "P1", "bag", s)
    leave(b, "P1", +1)                                   # abandonment
    steal(b, "P2", "bag", s, -1, b.now("P1") + 5.0)
    b.walk("P2", (door[0] + door[2] / 2, door[1] + door[3] / 2 + 6), speed=45)   # theft (door)
    b.walk("P2", (door[0] + door[2] / 2, door[1] + 16), speed=30)
    return b.build(tail=8.0)


def hall_v3():
    b = room("hall_v3", (140, 136, 126), (196, 192, 180), extra=[((150, 70, 24, 60), (90, 90, 96))],
             description="Hall: an owner disappears behind a pillar for good; another leaves and returns for his bag")
    b.person("P1", PERSON_PALETTE[5])
    b.person("P2", PERSON_PALETTE[0])
    b.obj("bag1", "backpack", OBJECT_PALETTE[1], carrier="P1")
    b.obj("bag2", "box", OBJECT_PALETTE[3], carrier="P2")
    s1, s2 = (80, ROW1), (240, ROW2)
    arrive(b, "P1", "bag1", s1, -1, 1.0)
    drop_here(b, "P1", "bag1", s1)
    b.walk("P1", (162, 100))                             # vanishes mid-frame: abandonment after 30 s
    arrive(b, "P2", "bag2", s2, +1, b.now("P1") + 3.0)
    drop_here(b, "P2", "bag2", s2)
    leave(b, "P2", +1)                                   # abandonment
    go_pick(b, "P2", "bag2", s2, +1, b.now("P2") + 8.0)  # moved by owner
    leave(b, "P2", +1)
    return b.build(duration=b.now("P1") + 38.0)


def hall_v4():
    b = room("hall_v4", (140, 136, 126), (196, 192, 180), extra=[((150, 70, 24, 60), (90, 90, 96))],
             description="Hall: one bag abandoned; another is stolen by someone who vanishes behind a pillar")
    for k in range(3):
        b.person(f"P{k + 1}", PERSON_PALETTE[k + 5])
    b.obj("bag1", "bag", OBJECT_PALETTE[2], carrier="P1")
    b.obj("bag2", "suitcase", OBJECT_PALETTE[6], carrier="P2")
    s1, s2 = (80, ROW2), (240, ROW1)
    arrive(b, "P1", "bag1", s1, -1, 1.0)
    drop_here(b, "P1", "bag1", s1)
    leave(b, "P1", -1)                                   # abandonment
    arrive(b, "P2", "bag2", s2, +1, b.now("P1") + 3.0)
    drop_here(b, "P2", "bag2", s2)
    aside(b, "P2", +1)
    steal(b, "P3", "bag2", s2, -1, b.now("P2") + 3.0)
    b.walk("P3", (162, 100))                             # track lost mid-frame: theft after 30 s
    b.wait("P2", b.now("P3") + 2.0)
    leave(b, "P2", +1)
    return b.build(duration=b.now("P3") + 36.0)


SUITE = [lab1_v1, lab1_v2, library, lab2_v1, lab2_v2, lab2_v3, lab2_v4, hall_v1, hall_v2, hall_v3, hall_v4]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for make in SUITE:
        sc = make()
        save_scenario(sc, OUT / f"{sc.name}.yaml")
        kinds = [e.kind.value for e in derive_events(sc)]
        print(f"{sc.name:10s} {sc.duration:6.1f}s  " + ", ".join(kinds))


if __name__ == "__main__":
    main()
