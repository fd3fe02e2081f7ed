"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

from __future__ import annotations

import functools
import itertools
import random
import time
from pathlib import Path

import pytest

from positivity_fuzz import (
    conforming_telescope,
    decl_with_telescope,
    violating_telescope,
)
from qitbench.encodings import bag_of, length_algebra, omega_tree_of, ordinal_notations
from qitbench.engine import closed_terms, check_equations_hold, find_separator, new_qw, replay_merges
from qitbench.errors import ConditionalUnsupportedError, PositivityError
from qitbench.initiality import (
    check_comp,
    check_rec_hom,
    check_uniq,
    dep_target,
    qw_rec,
    rec_target,
)
from qitbench.schema import check_positivity, classify, elaborate, parse_decl
from qitbench.terms import (
    Node,
    OpNode,
    Var,
    branch_values,
    canonical_dumps,
    map_opnode,
    map_term,
    omega_table,
    subst,
)
from qitbench.translate import freeify, from_w_reductions, from_w_suspension
from test_terms import law_terms

FIXTURES = Path(__file__).parent / "fixtures"


def criterion(number: int, label: str):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"criterion {number} ({label}): FAIL")
                raise
            print(f"criterion {number} ({label}): PASS")

        return wrapper

    return deco


@criterion(1, "oracle equivalence and separators")
def test_c1_oracle_equivalence():
    start = time.perf_counter()
    inst = bag_of(("a", "b"))
    terms = [t for t in closed_terms(inst.signature, 4)]  # lists of <= 3 elements
    assert len(terms) == 15  # 2^0 + 2^1 + 2^2 + 2^3, computed not assumed
    st = new_qw(inst.signature, inst.system)
    ids = {t: st.intern_term(t) for t in terms}
    st.saturate()
    pairs = list(itertools.combinations(terms, 2))
    assert len(pairs) == 105
    unknown = []
    for t, u in pairs:
        proved = st.same_class(ids[t], ids[u])
        assert proved == inst.oracle(t, u), (t, u)
        if not proved:
            unknown.append((t, u))
    for t, u in unknown:
        alg = find_separator(inst.signature, inst.system, t, u, 3)
        assert alg is not None, (t, u)
        assert len(alg.carrier) <= 3
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"took {elapsed:.2f}s"


@criterion(2, "elaboration fidelity, byte exact")
def test_c2_elaboration_fidelity():
    for decl_file, fixture in (
        ("bag.qit", "bag_sigeq.json"),
        ("omega_tree.qit", "omega_tree_sigeq.json"),
    ):
        decl = parse_decl((FIXTURES / decl_file).read_text())
        sig, system = elaborate(decl, probe=2)
        produced = canonical_dumps(
            {"signature": sig.to_json(), "equations": system.to_json()}
        )
        expected = (FIXTURES / fixture).read_text().strip()
        assert produced == expected, f"{decl_file} drifted from its fixture"


@criterion(3, "equations hold on the carrier")
def test_c3_equations_hold():
    bag = bag_of(("a", "b"))
    st = new_qw(bag.signature, bag.system)
    classes = [c for c, _ in st.enumerate_classes(3)]
    report = check_equations_hold(st, classes)
    assert report.ok, report.to_json()

    tree = omega_tree_of(("a", "b"), 2, [((0, 1), (1, 0))])
    st2 = new_qw(tree.signature, tree.system)
    classes2 = [c for c, _ in st2.enumerate_classes(3)]
    report2 = check_equations_hold(st2, classes2, env_budget=1_000_000)
    assert report2.ok, report2.to_json()


@criterion(4, "initiality suite on the four-class fragment")
def test_c4_initiality_suite():
    start = time.perf_counter()
    inst = bag_of(("a",))
    st = new_qw(inst.signature, inst.system)
    classes = st.enumerate_classes(4)
    assert len(classes) == 4
    fragment = [c for c, _ in classes]
    target = rec_target(length_algebra(3), inst.system)

    hom = check_rec_hom(st, target, classes=fragment)
    assert hom.ok, hom.to_json()

    recursion = {c: qw_rec(st, target, c) for c in fragment}
    assert sorted(recursion.values()) == [0, 1, 2, 3]
    homs = []
    for images in itertools.product(target.algebra.carrier, repeat=4):
        h = dict(zip(fragment, images))
        report = check_uniq(st, target, h)
        if report.premise_ok:
            homs.append(h)
            assert report.ok
    assert len(homs) == 1 and homs[0] == recursion

    def step(op, idxs, vals):
        if op == "nil":
            return 0
        return min(next(iter(branch_values(vals))) + 1, 3)

    dep = dep_target(st, lambda c: tuple(range(4)), step, classes=fragment)
    comp = check_comp(st, dep, classes=fragment)
    assert comp.ok and comp.checked >= 4, comp.to_json()
    for c in fragment:
        from qitbench.initiality import qw_elim

        assert qw_elim(st, dep, c) == recursion[c]
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"took {elapsed:.2f}s"


@criterion(5, "translated instances enumerate to the expected classes")
def test_c5_translations():
    sig, system = from_w_suspension([("t", 0), ("f", 0)], [("cell", "t", "f")])
    assert len(new_qw(sig, system).enumerate_classes(1)) == 1

    sig, system = from_w_reductions([("mk", 2)], {"mk": 0})
    st = new_qw(sig, system, generators=("v",))
    assert len(st.enumerate_classes(5)) == 1

    for bound in range(1, 6):
        assert new_qw(sig, system).enumerate_classes(bound) == []


@criterion(6, "free construction over no generators matches the direct one")
def test_c6_freeify_isomorphism():
    bag = bag_of(("a", "b"))
    free_sig, free_system = freeify(bag.signature, bag.system, ())
    for bound in (1, 2, 3, 4):
        direct = new_qw(bag.signature, bag.system).enumerate_classes(bound)
        tagged = new_qw(free_sig, free_system).enumerate_classes(bound)
        assert len(direct) == len(tagged), f"bound {bound}"


@criterion(7, "schema gatekeeping")
def test_c7_schema_gatekeeping():
    rng = random.Random(20260808)
    accepted = rejected = 0
    for _ in range(100):
        check_positivity(decl_with_telescope(conforming_telescope(rng)))
        accepted += 1
    for _ in range(100):
        with pytest.raises(PositivityError):
            check_positivity(decl_with_telescope(violating_telescope(rng)))
        rejected += 1
    assert accepted == rejected == 100

    conditional_sources = [
        (FIXTURES / "conditional.qit").read_text(),
        # a second shape: the condition constrains a recursive argument
        "data T : Set with X = {a} where\n"
        "  base : T\n"
        "  mk : (x : X) -> T\n"
        "  p : (u : T) (q : u == base) -> mk(a) == base\n",
    ]
    for src in conditional_sources:
        decl = parse_decl(src)
        assert classify(decl).conditional
        with pytest.raises(ConditionalUnsupportedError):
            elaborate(decl)


@criterion(8, "algebraic law suites and full proof replay")
def test_c8_laws_and_replay():
    terms = law_terms(4)
    small = law_terms(2)
    env_maps = [dict(zip(("x", "y"), imgs)) for imgs in itertools.product(small, repeat=2)]
    # monad laws: left unit, right unit, associativity
    for rho in env_maps:
        for v in ("x", "y"):
            assert subst(Var(v), rho) == rho[v]
    for t in terms:
        assert subst(t, {"x": Var("x"), "y": Var("y")}) == t
    for t in terms:
        for rho in env_maps:
            for rho2 in env_maps:
                assert subst(subst(t, rho), rho2) == subst(
                    t, {k: subst(v, rho2) for k, v in rho.items()}
                )
    # functor laws for the term action and the layer action
    renamings = [dict(zip(("x", "y"), imgs)) for imgs in itertools.product(("x", "y"), repeat=2)]
    for t in terms:
        assert map_term(lambda v: v, t) == t
        for f in renamings:
            for g in renamings:
                assert map_term(lambda v: g[f[v]], t) == map_term(
                    lambda v: g[v], map_term(lambda v: f[v], t)
                )
    layers = [OpNode("c", ()), OpNode("f", ("x", "y")), OpNode("f", ("x", "x"))]
    for s in layers:
        assert map_opnode(lambda v: v, s) == s
        for f in renamings:
            for g in renamings:
                assert map_opnode(lambda v: g[f[v]], s) == map_opnode(
                    lambda v: g[v], map_opnode(lambda v: f[v], s)
                )

    # proof-forest replay across every saturated fixture state
    fixtures = []
    bag = bag_of(("a", "b"))
    st = new_qw(bag.signature, bag.system)
    st.enumerate_classes(4)
    fixtures.append(st)
    tree = omega_tree_of(("a", "b"), 2, [((0, 1), (1, 0))])
    st = new_qw(tree.signature, tree.system)
    st.enumerate_classes(3)
    fixtures.append(st)
    sig, system = from_w_suspension([("t", 0), ("f", 0)], [("cell", "t", "f")])
    st = new_qw(sig, system)
    st.enumerate_classes(1)
    fixtures.append(st)
    sig, system = from_w_reductions([("mk", 2)], {"mk": 0})
    st = new_qw(sig, system, generators=("v",))
    st.enumerate_classes(5)
    fixtures.append(st)
    ords = ordinal_notations()
    st = new_qw(ords.signature, ords.system, max_rounds=3)
    st.intern_term(Node("suc", (Node("zero", ()),)))
    st.intern_term(Node("sup", omega_table([], Node("zero", ()))))
    st.saturate()
    fixtures.append(st)
    for st in fixtures:
        merges = sum(1 for e in st.log if e[0] == "merge")
        assert replay_merges(st) == merges  # raises on the first bad merge


@criterion(9, "infinitary witness stays proved as the probe deepens")
def test_c9_probe_monotonicity():
    for probe in (2, 3, 4):
        inst = omega_tree_of(("a", "b"), probe, [((0, 1), (1, 0))])
        st = new_qw(inst.signature, inst.system)
        leafy = Node("leaf", ())
        inner = Node("node(b)", omega_table([], leafy))
        lhs = st.intern_term(Node("node(a)", omega_table([(0, inner)], leafy)))
        rhs = st.intern_term(Node("node(a)", omega_table([(1, inner)], leafy)))
        decision = st.decide_eq(lhs, rhs)
        assert decision.proved, f"probe {probe}"
        assert {s.justification.kind for s in decision.steps} <= {"sqeq", "cong"}
