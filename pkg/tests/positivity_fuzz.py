"""Deterministic generator of telescopes for the positivity checker.

Conforming telescopes follow the strictly positive grammar: the declared
type may appear bare, under Sigma on either side, or in Pi codomains, and
Pi domains are built only from constant types.  Violations are produced by
grafting a self occurrence into some Pi domain.
"""

from __future__ import annotations

import random

from qitbench.schema import (
    Binder,
    ConstType,
    ElementCtor,
    PiType,
    QITDecl,
    SelfType,
    SigmaType,
)

CONSTS = ("X", "Nat")


def constant_type(rng: random.Random, depth: int):
    """A type expression with no self occurrence."""
    if depth == 0 or rng.random() < 0.5:
        return ConstType(rng.choice(CONSTS))
    if rng.random() < 0.5:
        return PiType(constant_type(rng, depth - 1), constant_type(rng, depth - 1))
    return SigmaType(constant_type(rng, depth - 1), constant_type(rng, depth - 1))


def conforming_type(rng: random.Random, depth: int):
    """A strictly positive type expression (self never in a Pi domain)."""
    roll = rng.random()
    if depth == 0:
        return SelfType() if roll < 0.5 else ConstType(rng.choice(CONSTS))
    if roll < 0.25:
        return SelfType()
    if roll < 0.4:
        return ConstType(rng.choice(CONSTS))
    if roll < 0.7:
        return PiType(constant_type(rng, depth - 1), conforming_type(rng, depth - 1))
    return SigmaType(conforming_type(rng, depth - 1), conforming_type(rng, depth - 1))


def conforming_telescope(rng: random.Random) -> tuple:
    n = rng.randint(1, 3)
    return tuple(
        Binder(f"b{i}", conforming_type(rng, rng.randint(1, 3))) for i in range(n)
    )


def _pi_with_poisoned_domain(rng: random.Random, depth: int):
    """A Pi whose domain contains a self occurrence."""
    poison = SelfType() if rng.random() < 0.5 else SigmaType(
        ConstType("X"), SelfType()
    )
    return PiType(poison, conforming_type(rng, depth))


def violating_telescope(rng: random.Random) -> tuple:
    """A conforming telescope with one entry's type replaced by a type that
    moves a self occurrence into a Pi domain (possibly nested)."""
    entries = list(conforming_telescope(rng))
    culprit = _pi_with_poisoned_domain(rng, rng.randint(0, 2))
    wrap = rng.random()
    if wrap < 0.33:
        bad = culprit
    elif wrap < 0.66:
        bad = SigmaType(conforming_type(rng, 1), culprit)
    else:
        bad = PiType(ConstType("X"), culprit)
    entries[rng.randrange(len(entries))] = Binder("bad", bad)
    return tuple(entries)


def decl_with_telescope(telescope: tuple) -> QITDecl:
    return QITDecl(
        "Y",
        (("X", ("a", "b")),),
        (),
        (ElementCtor("c", telescope),),
        (),
    )
