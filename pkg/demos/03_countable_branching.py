"""Countably branching trees, probed at a finite depth.

A branch map over all naturals is stored as a finite table plus a default,
so terms stay finite.  Equations over countable variable families are
truncated to the probed indices plus one default slot; deepening the probe
keeps every proved identification proved.
"""

from qitbench import new_qw, term_to_json
from qitbench.encodings import omega_tree_of
from qitbench.terms import Node, omega_table

transposition = ((0, 1), (1, 0))

for probe in (2, 3):
    inst = omega_tree_of(("a", "b"), probe, [transposition])
    state = new_qw(inst.signature, inst.system)

    leaf = Node("leaf", ())
    inner = Node("node(b)", omega_table([], leaf))
    # node(a) applied to the family sending 0 to the inner tree, all other
    # branches to leaf; then the same family with branches 0 and 1 swapped
    lhs = state.intern_term(Node("node(a)", omega_table([(0, inner)], leaf)))
    rhs = state.intern_term(Node("node(a)", omega_table([(1, inner)], leaf)))
    decision = state.decide_eq(lhs, rhs)
    print(f"probe {probe}: swap of the first two branches proved: {decision.proved}")

inst = omega_tree_of(("a", "b"), 2, [transposition])
state = new_qw(inst.signature, inst.system)

# An entry equal to the default normalises away, so a permuted constant
# family is the same term on arrival.
leaf = Node("leaf", ())
c1 = state.intern_term(Node("node(a)", omega_table([(0, leaf)], leaf)))
c2 = state.intern_term(Node("node(a)", omega_table([], leaf)))
print("constant family normalises:", c1 == c2)

classes = state.enumerate_classes(3)
print(f"classes of closed trees at size <= 3: {len(classes)}")
for _, rep in classes:
    print("  ", term_to_json(rep))
