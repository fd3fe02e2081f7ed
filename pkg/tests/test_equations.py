from __future__ import annotations

import itertools

import pytest

from qitbench.encodings import (
    NIL,
    bag_term,
    cons,
    length_algebra,
    one_point_algebra,
    parity_algebra,
)
from qitbench.equations import EquationSystem, lift, make_system, sat_check
from qitbench.errors import (
    BudgetExceededError,
    DuplicateNameError,
    FiberMismatchError,
    UnboundVariableError,
    UnknownOperatorError,
)
from qitbench.terms import (
    FiniteAlgebra,
    Node,
    Var,
    branch_values,
    canonical_dumps,
    eval_alg,
    signature,
)
from test_terms import law_terms


@pytest.fixture(scope="module")
def bag_sig():
    return signature([("nil", 0), ("cons(a)", 1), ("cons(b)", 1)])


def _swap_eqs():
    out = []
    for x in ("a", "b"):
        for y in ("a", "b"):
            out.append(
                (
                    f"swap({x},{y})",
                    1,
                    cons(x, cons(y, Var(0))),
                    cons(y, cons(x, Var(0))),
                )
            )
    return out


def test_make_system_accepts_bag(bag_sig):
    system = make_system(bag_sig, _swap_eqs(), probe=2)
    assert len(system.equations) == 4
    assert system.equation("swap(a,b)").var_count == 1


def test_make_system_rejects_unbound_variable(bag_sig):
    with pytest.raises(UnboundVariableError):
        make_system(bag_sig, [("bad", 1, Var(1), Var(0))])


def test_make_system_rejects_unknown_operator(bag_sig):
    with pytest.raises(UnknownOperatorError):
        make_system(bag_sig, [("bad", 1, Node("zap", ()), Var(0))])


def test_make_system_rejects_duplicate_names(bag_sig):
    eq = ("dup", 1, Var(0), Var(0))
    with pytest.raises(DuplicateNameError):
        make_system(bag_sig, [eq, eq])


def test_omega_tree_system_accepted(omega_tree):
    # countably indexed variables truncated at the probe: two probed slots
    # plus the default slot
    assert all(e.var_count == 3 for e in omega_tree.system.equations)
    assert omega_tree.system.probe == 2


def test_sat_parity_satisfied(bag_sig):
    system = make_system(bag_sig, _swap_eqs())
    assert sat_check(parity_algebra(), system).satisfied


def test_sat_length_satisfied(bag_sig):
    system = make_system(bag_sig, _swap_eqs())
    assert sat_check(length_algebra(4), system).satisfied


def test_sat_violation_witness(bag_sig):
    # prepending a adds one, prepending b resets: the swap breaks at the
    # empty environment value 0 with lhs 1 and rhs 0
    system = make_system(bag_sig, _swap_eqs())

    def interp(op, branches):
        if op == "nil":
            return 0
        (b,) = tuple(branch_values(branches))
        return min(b + 1, 2) if op == "cons(a)" else 0

    alg = FiniteAlgebra((0, 1, 2), interp)
    report = sat_check(alg, system)
    assert not report.satisfied
    assert report.eq_name == "swap(a,b)"
    assert report.env == (0,)
    assert (report.lhs_val, report.rhs_val) == (1, 0)


def test_sat_verdict_independent_of_enumeration_order(bag_sig):
    # permuting the carrier permutes the environments; the verdict and the
    # violated equation name stay put (the witness may move)
    system = make_system(bag_sig, _swap_eqs())

    def interp(op, branches):
        if op == "nil":
            return 0
        (b,) = tuple(branch_values(branches))
        return min(b + 1, 2) if op == "cons(a)" else 0

    for carrier in itertools.permutations((0, 1, 2)):
        report = sat_check(FiniteAlgebra(tuple(carrier), interp), system)
        assert not report.satisfied
        assert report.eq_name == "swap(a,b)"
    assert sat_check(
        FiniteAlgebra(("odd", "even"), parity_algebra().interp), system
    ).satisfied


def test_sat_budget(bag_sig):
    system = make_system(bag_sig, _swap_eqs())
    with pytest.raises(BudgetExceededError):
        sat_check(length_algebra(4), system, env_budget=3)


def test_sat_one_point_always(bag_sig, omega_tree):
    assert sat_check(one_point_algebra(), make_system(bag_sig, _swap_eqs())).satisfied
    assert sat_check(one_point_algebra(), omega_tree.system).satisfied


def test_system_json_round_trip(bag_sig):
    system = make_system(bag_sig, _swap_eqs(), probe=3)
    obj = system.to_json()
    assert obj["probe"] == 3
    again = EquationSystem.from_json(bag_sig, obj)
    assert again == system
    assert canonical_dumps(again.to_json()) == canonical_dumps(obj)


# -- dependent lifting -------------------------------------------------------


def test_lift_constant_singleton():
    alg = length_algebra(4)
    family = lambda idx: ("*",)
    step = lambda op, idxs, vals: "*"
    env = {"v": (0, "*")}
    for t in [Var("v"), cons("a", Var("v")), cons("b", cons("a", Var("v")))]:
        assert lift(family, step, env, t, alg) == "*"


def test_lift_constant_nat_ignoring_recursion():
    alg = length_algebra(4)
    family = lambda idx: tuple(range(10))
    step = lambda op, idxs, vals: 0
    env = {"v": (0, 9)}
    assert lift(family, step, env, Var("v"), alg) == 9
    assert lift(family, step, env, cons("a", Var("v")), alg) == 0


def test_lift_multiset_size_mirrors_length():
    # fiber over a length value: sizes that evaluate to it; the step mirrors
    # the length algebra, so the lifted value tracks the evaluated index
    alg = length_algebra(4)
    family = lambda idx: (idx,)
    step = lambda op, idxs, vals: (
        0 if op == "nil" else min(next(iter(branch_values(vals))) + 1, 4)
    )
    env = {}
    assert lift(family, step, env, bag_term(["a", "b"]), alg) == 2


def test_lift_fiber_mismatch_signals_bad_step():
    alg = length_algebra(4)
    family = lambda idx: (idx,)
    step = lambda op, idxs, vals: 99
    with pytest.raises(FiberMismatchError):
        lift(family, step, {}, NIL, alg)


def test_lift_degenerates_to_eval_on_small_terms():
    # with a constant family and a dependency-blind step, lifting is plain
    # evaluation; checked exhaustively over the reference signature
    def interp(op, branches):
        if op == "c":
            return 1
        a, b = tuple(branch_values(branches))
        return min(a + b, 5)

    alg = FiniteAlgebra(tuple(range(6)), interp)
    family = lambda idx: tuple(range(6))
    step = lambda op, idxs, vals: interp(op, vals)
    for t in law_terms(4):
        env = {"x": (2, 2), "y": (3, 3)}
        assert lift(family, step, env, t, alg) == eval_alg(t, {"x": 2, "y": 3}, alg)
