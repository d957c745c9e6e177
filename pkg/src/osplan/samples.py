"""Small hand-built tasks used by the tests, the CLI and the benchmark smoke runs."""

from __future__ import annotations

from .model import OspTask
from .taskio import parse_task

# Truck moving to location E while burning one fuel level per drive.  The
# truck can never be at D with a full tank.
TRUCK = """\
osp-sas 1
vars 2
var t 5
val A 0
val B 0
val C 0
val D 0
val E 2
var f 4
val 0 0
val 1 1
val 2 2
val 3 3
mutex 2 t=D f=3
init t=A f=3
budget-frac 1/1 cstar 1
actions 3
action drive_E_2 cost 1
pre 1 f=3
eff 2 t=E f=2
action drive_E_1 cost 1
pre 1 f=2
eff 2 t=E f=1
action drive_E_0 cost 1
pre 1 f=1
eff 2 t=E f=0
"""

T1 = """\
osp-sas 1
vars 1
var v 2
val a 0
val b 2
init v=a
budget-frac 1/1 cstar 1
actions 1
action o cost 1
pre 1 v=a
eff 1 v=b
"""

# One ambiguous action whose four precondition entries outnumber its single
# expected instance: count-based selection keeps it split.
SPLIT_FRIENDLY = """\
osp-sas 1
vars 5
var g 2
val off 0
val on 3
var x 3
val a 0
val b 4
val c 0
var k1 2
val no 0
val yes 0
var k2 2
val no 0
val yes 0
var k3 2
val no 0
val yes 0
init g=off x=a k1=yes k2=yes k3=yes
budget-frac 1/1 cstar 3
actions 4
action collect cost 1
pre 4 g=off k1=yes k2=yes k3=yes
eff 2 g=on x=c
action to_b cost 1
pre 1 x=a
eff 1 x=b
action to_a cost 1
pre 1 x=c
eff 1 x=a
action reset cost 1
pre 1 g=on
eff 1 g=off
"""

# One ambiguous action with two unconstrained effect variables, each with two
# values whose utility differs from the effect's: four expected instances
# against a single precondition entry.
SPLIT_HOSTILE = """\
osp-sas 1
vars 3
var g 2
val off 0
val on 2
var x 4
val x0 0
val x1 1
val x2 3
val x3 1
var z 4
val z0 0
val z1 1
val z2 3
val z3 1
init g=off x=x0 z=z0
budget-frac 1/1 cstar 3
actions 5
action sweep cost 1
pre 1 g=off
eff 3 g=on x=x3 z=z3
action x_up cost 1
pre 1 x=x0
eff 1 x=x2
action z_up cost 1
pre 1 z=z0
eff 1 z=z1
action z_top cost 1
pre 1 z=z1
eff 1 z=z2
action reset cost 1
pre 1 g=on
eff 1 g=off
"""


def truck_task() -> OspTask:
    return parse_task(TRUCK)


def t1_task() -> OspTask:
    return parse_task(T1)


def split_friendly_task() -> OspTask:
    return parse_task(SPLIT_FRIENDLY)


def split_hostile_task() -> OspTask:
    return parse_task(SPLIT_HOSTILE)


SAMPLES = {
    "truck": TRUCK,
    "t1": T1,
    "split-friendly": SPLIT_FRIENDLY,
    "split-hostile": SPLIT_HOSTILE,
}
