"""Substitution, alpha-equivalence and binding discipline.

The substitution oracle converts to a fully-named tree with globally
fresh binder names, replaces textually, and converts back; capture is
impossible because every binder is renamed first.
"""

import itertools
import random

import pytest

from conftest import gen_scoped_term, gen_type
from pilly import syntax as S
from pilly.parser import parse_term, parse_type
from pilly.syntax import (Bang, Forall, Lolli, Tensor, TyVar, Unit,
                          alpha_eq, subst_term_in_term, subst_type_in_type)

_counter = itertools.count()


def _fresh() -> str:
    return f"_o{next(_counter)}"


# --- named-tree oracle for types


def ty_to_named(t, env):
    if isinstance(t, TyVar):
        return ("fv", t.name)
    if isinstance(t, S.TyBound):
        return ("fv", env[-1 - t.index])
    if isinstance(t, Unit):
        return ("unit",)
    if isinstance(t, Lolli):
        return ("lolli", ty_to_named(t.dom, env), ty_to_named(t.cod, env))
    if isinstance(t, Tensor):
        return ("tensor", ty_to_named(t.left, env), ty_to_named(t.right, env))
    if isinstance(t, Bang):
        return ("bang", ty_to_named(t.body, env))
    if isinstance(t, Forall):
        n = _fresh()
        return ("forall", n, ty_to_named(t.body, env + [n]))
    raise AssertionError(t)


def named_subst_ty(t, var, rep):
    tag = t[0]
    if tag == "fv":
        return rep if t[1] == var else t
    if tag == "unit":
        return t
    if tag == "forall":
        return ("forall", t[1], named_subst_ty(t[2], var, rep))
    return (tag,) + tuple(named_subst_ty(c, var, rep) for c in t[1:])


def ty_from_named(t):
    tag = t[0]
    if tag == "fv":
        return TyVar(t[1])
    if tag == "unit":
        return Unit()
    if tag == "lolli":
        return Lolli(ty_from_named(t[1]), ty_from_named(t[2]))
    if tag == "tensor":
        return Tensor(ty_from_named(t[1]), ty_from_named(t[2]))
    if tag == "bang":
        return Bang(ty_from_named(t[1]))
    if tag == "forall":
        return S.forall(t[1], ty_from_named(t[2]))
    raise AssertionError(t)


def oracle_subst_ty(ty, var, rep):
    return ty_from_named(
        named_subst_ty(ty_to_named(ty, []), var, ty_to_named(rep, [])))


class TestSubstType:
    def test_direct_replacement(self):
        got = subst_type_in_type(parse_type("a -o b"), "a", Unit())
        assert got == parse_type("I -o b")

    def test_shadowed_binder(self):
        ty = parse_type("all a. a -o b")
        assert subst_type_in_type(ty, "a", Unit()) == ty

    def test_capture_avoided(self):
        ty = parse_type("all g. g -o a")
        got = subst_type_in_type(ty, "a", TyVar("g"))
        expect = oracle_subst_ty(ty, "a", TyVar("g"))
        assert got == expect
        assert got == S.forall("g2", Lolli(TyVar("g2"), TyVar("g")))

    def test_fuzz_against_oracle(self):
        rng = random.Random(11)
        for _ in range(300):
            ty = gen_type(rng, ["a", "b"], 4)
            rep = gen_type(rng, ["g"], 3)
            got = subst_type_in_type(ty, "a", rep)
            assert got == oracle_subst_ty(ty, "a", rep)


class TestSubstTerm:
    def test_tensor_component(self):
        got = subst_term_in_term(parse_term("x (*) y"), "x", S.Star())
        assert got == parse_term("<> (*) y")

    def test_fresh_rename(self):
        t = S.lin_lam("y", TyVar("s"), S.Var("x"))
        got = subst_term_in_term(t, "x", S.Var("y"))
        assert got == S.lin_lam("w", TyVar("s"), S.Var("y"))
        # the binder no longer captures: the substituted var stays free
        assert "y" in S.free_term_names(got)

    def test_let_bang_scrutinee(self):
        t = parse_term("let !z = x in z")
        got = subst_term_in_term(t, "x", parse_term("!<>"))
        assert got == parse_term("let !z = !<> in z")

    def test_composition(self):
        # t[u/x][v/y] == t[v/y][ u[v/y] /x]  when x not free in v
        rng = random.Random(5)
        for _ in range(200):
            t = gen_scoped_term(rng, ["s"], ["x", "y"], 4)
            u = gen_scoped_term(rng, ["s"], ["y"], 3)
            v = gen_scoped_term(rng, ["s"], [], 3)
            lhs = subst_term_in_term(subst_term_in_term(t, "x", u), "y", v)
            rhs = subst_term_in_term(
                subst_term_in_term(t, "y", v), "x",
                subst_term_in_term(u, "y", v))
            assert lhs == rhs


class TestAlphaEq:
    def test_binder_names_ignored(self):
        assert alpha_eq(parse_type("all a. a"), parse_type("all b. b"))
        assert alpha_eq(parse_term("fn x:I. x"), parse_term("fn y:I. y"))
        assert not alpha_eq(parse_type("a -o b"), parse_type("b -o a"))

    def test_annotations_matter(self):
        assert not alpha_eq(parse_term("fn x:I. x"),
                            parse_term("fn x:I -o I. x"))

    def test_equivalence_relation(self):
        rng = random.Random(3)
        terms = [gen_scoped_term(rng, ["s"], ["z"], 4) for _ in range(60)]
        for t in terms:
            assert alpha_eq(t, t)
        for t, u in zip(terms, terms[1:]):
            assert alpha_eq(t, u) == alpha_eq(u, t)

    def test_hint_scrambling_is_invisible(self):
        rng = random.Random(4)

        class Scramble(S.VarMap):
            pass

        for _ in range(50):
            t = gen_scoped_term(rng, ["s"], ["z"], 4)
            renamed = _scramble(t, rng)
            assert alpha_eq(t, renamed)


def _scramble(t, rng):
    if isinstance(t, S.LinLam):
        return S.LinLam(f"h{rng.randrange(99)}", t.ty, _scramble(t.body, rng))
    if isinstance(t, S.App):
        return S.App(_scramble(t.fn, rng), _scramble(t.arg, rng))
    if isinstance(t, S.TensorPair):
        return S.TensorPair(_scramble(t.left, rng), _scramble(t.right, rng))
    if isinstance(t, S.BangIntro):
        return S.BangIntro(_scramble(t.body, rng))
    if isinstance(t, S.TyLam):
        return S.TyLam(f"h{rng.randrange(99)}", _scramble(t.body, rng))
    if isinstance(t, S.TyApp):
        return S.TyApp(_scramble(t.fn, rng), t.ty)
    if isinstance(t, S.LetStar):
        return S.LetStar(_scramble(t.scrut, rng), _scramble(t.body, rng))
    if isinstance(t, S.LetTensor):
        return S.LetTensor(f"h{rng.randrange(99)}", f"k{rng.randrange(99)}",
                           t.tyx, t.tyy, _scramble(t.scrut, rng),
                           _scramble(t.body, rng))
    if isinstance(t, S.LetBang):
        return S.LetBang(f"h{rng.randrange(99)}", t.ty,
                         _scramble(t.scrut, rng), _scramble(t.body, rng))
    return t


class TestRelSignature:
    def test_compr(self):
        r = S.compr("x", Unit(), "y", TyVar("t"), S.Top())
        assert S.rel_signature(r) == (Unit(), TyVar("t"))

    def test_type_rel(self):
        rv = S.RelVar("R", Unit(), TyVar("t"), S.Flavor.REL)
        tr = S.type_rel(["a"], Lolli(TyVar("a"), TyVar("a")), [rv])
        dom, cod = S.rel_signature(tr)
        assert dom == Lolli(Unit(), Unit())
        assert cod == Lolli(TyVar("t"), TyVar("t"))
