"""Finite multisets as a quotient of lists, end to end.

The declaration names the type, its constructors, and the swap equation;
elaboration compiles it to a signature plus equations; the engine builds
the quotient carrier by saturation and answers equality queries with
derivations or separating algebras.
"""

from qitbench import find_separator, new_qw, parse_decl, elaborate, parse_ground_term, term_to_json

SOURCE = """
data Bag : Set with X = {a, b} where
  nil  : Bag
  cons : (x : X) (ys : Bag) -> Bag
  swap : (x : X) (y : X) (ys : Bag) -> cons(x, cons(y, ys)) == cons(y, cons(x, ys))
"""

decl = parse_decl(SOURCE)
sig, system = elaborate(decl)
print("operators:", [name for name, _ in sig.ops])
print("equations:", [e.name for e in system.equations])

state = new_qw(sig, system)
ab = state.intern_term(parse_ground_term("a::b::[]", decl))
ba = state.intern_term(parse_ground_term("b::a::[]", decl))

# Before saturation the two spellings are distinct classes.
print("same class before saturation:", state.same_class(ab, ba))
result = state.saturate()
print("saturation:", result.to_json())

decision = state.decide_eq(ab, ba)
print("a::b::[] = b::a::[] ?", decision.to_json())

# Enumerating closed terms up to size 4 (lists of up to three elements)
# yields one class per occurrence multiset.
classes = state.enumerate_classes(4)
print(f"classes at size <= 4: {len(classes)}")
for _, rep in classes[:4]:
    print("  representative:", term_to_json(rep))

# Distinct multisets are certified distinct by a small separating algebra:
# one that satisfies the swaps yet evaluates the two terms differently.
t = parse_ground_term("a::[]", decl)
u = parse_ground_term("b::[]", decl)
alg = find_separator(sig, system, t, u, 3)
print("separator carrier size for a::[] vs b::[]:", len(alg.carrier))
print(
    "no separator exists for provably equal terms:",
    find_separator(sig, system, parse_ground_term("a::b::[]", decl), parse_ground_term("b::a::[]", decl), 3),
)
