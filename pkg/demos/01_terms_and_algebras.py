"""Terms over a signature, evaluation, and algebra maps.

A signature lists operators with arities; terms are trees of operator
nodes over variable leaves.  Evaluation folds a term through any algebra
(a carrier plus one step per operator layer).
"""

from qitbench import (
    Node,
    OpNode,
    Var,
    check_hom,
    eval_alg,
    signature,
    subst,
    term_to_json,
)
from qitbench.encodings import bag_term, length_algebra, parity_algebra

# The multiset vocabulary: an empty list and one prepend per element.
sig = signature([("nil", 0), ("cons(a)", 1), ("cons(b)", 1)])

t = bag_term(["a", "b", "a"])
print("term:", term_to_json(t))

# Evaluation is structural recursion: leaves through the environment,
# nodes through the algebra step.
print("length:", eval_alg(t, {}, length_algebra(4)))
print("parity:", eval_alg(t, {}, parity_algebra()))

# Substitution grafts terms onto leaves and satisfies the usual monad laws.
schema = Node("cons(a)", (Node("cons(b)", (Var("tail"),)),))
print("grafted:", term_to_json(subst(schema, {"tail": bag_term(["b"])})))

# An algebra map must commute with every operator layer.  Parity of a
# mod-6 count is one; the checker enumerates all layers over the carrier.
from qitbench import FiniteAlgebra

mod6 = FiniteAlgebra(tuple(range(6)), lambda op, br: 0 if op == "nil" else (tuple(br)[0] + 1) % 6)
h = {n: ("even" if n % 2 == 0 else "odd") for n in range(6)}
print("parity of mod-6 count is a map:", check_hom(h, mod6, parity_algebra(), sig).ok)

# A non-map is answered with the first offending operator layer.
ident = FiniteAlgebra(("even", "odd"), lambda op, br: "even" if op == "nil" else tuple(br)[0])
report = check_hom({v: v for v in ("even", "odd")}, parity_algebra(), ident, sig)
print("flip vs identity counterexample at:", report.counterexample.op)
