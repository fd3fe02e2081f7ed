"""Classic constructions as signatures plus equations, and a hard instance.

Suspension-style cells, branch-collapsing reductions, and free algebras
over generators all arrive by translation.  The ordinal-notation instance
ships as a stress demo: its equality problem is genuinely hard, the engine
reports budget exhaustion as a normal outcome, and queries stay unknown.
"""

from qitbench import freeify, from_w_reductions, from_w_suspension, new_qw
from qitbench.encodings import bag_of, ordinal_notations
from qitbench.terms import Node, Var, omega_table

# Two nullary points joined by one cell: a single class remains.
sig, system = from_w_suspension([("t", 0), ("f", 0)], [("cell", "t", "f")])
state = new_qw(sig, system)
print("two points, one cell:", len(state.enumerate_classes(1)), "class")

# Every node collapses to its first branch.  Free over one generator v,
# everything folds down to v; with no generators there are no closed
# terms at all.
sig, system = from_w_reductions([("mk", 2)], {"mk": 0})
state = new_qw(sig, system, generators=("v",))
classes = state.enumerate_classes(5)
print("reductions, free over v:", [rep for _, rep in classes])
print("reductions, no generators:", new_qw(sig, system).enumerate_classes(5))

# The free construction over generators is the same construction over a
# signature extended with the generators as nullary operators.
bag = bag_of(("a", "b"))
free_sig, free_system = freeify(bag.signature, bag.system, ("c",))
print("freeified operators:", [name for name, _ in free_sig.ops])

# Ordinal notations: zero, successor, countable supremum, with demo-only
# supremum laws.  Provable collapses are proved; distinct notations stay
# unknown at any finite budget, and that answer is sound.
inst = ordinal_notations()
state = new_qw(inst.signature, inst.system, max_rounds=4)
zero = Node("zero", ())
one = Node("suc", (zero,))
sup_const_one = state.intern_term(Node("sup", omega_table([], one)))
target = state.intern_term(one)
print("sup of the constant-one family collapses:", state.decide_eq(sup_const_one, target).proved)
z = state.intern_term(zero)
print("zero vs one:", state.decide_eq(z, target).to_json())
print("saturation outcome is reported, never asserted:", state.saturate(max_rounds=2).to_json())
