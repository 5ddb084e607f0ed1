"""The dual-context discipline: golden judgements, designated failures,
structural properties and the substitution rules."""

import random

import pytest

from conftest import TypedGen, gen_well_typed
from pilly import syntax as S
from pilly.parser import parse_term, parse_type
from pilly.pretty import pp
from pilly.syntax import TermContext, TyVar, Unit
from pilly.typecheck import (LINEAR_IN_BANG, LINEAR_REUSED, LINEAR_UNUSED,
                             MISMATCH, NOT_A_FORALL, NOT_A_FUNCTION, UNBOUND,
                             CONTEXT_ILL_FORMED, SubstitutionLemmaFailure,
                             TypeCheckError, check_substitution_lemma,
                             check_type, infer_type, kind_check)

EMPTY = TermContext()


def ctx(xi=(), gamma=None, delta=None):
    return TermContext(tuple(xi), dict(gamma or {}), dict(delta or {}))


class TestKindCheck:
    def test_variable_in_scope(self):
        kind_check(("a",), parse_type("a -o a"))

    def test_fixed_point_type_is_closed(self):
        kind_check((), parse_type("all a. !(!a -o a) -o a"))

    def test_unbound(self):
        with pytest.raises(TypeCheckError) as e:
            kind_check((), parse_type("a * I"))
        assert e.value.kind == UNBOUND


class TestGoldenInference:
    def test_fixed_point_combinator(self):
        assert infer_type(EMPTY, S.Y()).ty == \
            parse_type("all a. !(!a -o a) -o a")

    def test_polymorphic_identity(self):
        assert infer_type(EMPTY, parse_term("/\\a. fn x:a. x")).ty == \
            parse_type("all a. a -o a")

    def test_bang_of_intuitionistic_variable(self):
        r = infer_type(ctx(["s"], gamma={"x": TyVar("s")}), parse_term("!x"))
        assert r.ty == parse_type("!s")

    def test_star(self):
        check_type(EMPTY, S.Star(), Unit())

    def test_intuitionistic_lambda_sugar(self):
        check_type(ctx(["s"]), parse_term("lam x:s. x"), parse_type("s -> s"))

    def test_usage_record(self):
        c = ctx(["s"], delta={"x": TyVar("s")})
        r = infer_type(c, parse_term("x"))
        assert r.usage == {"x": 1}

    def test_elaboration_fills_annotations(self):
        r = infer_type(EMPTY, parse_term("fn p:I * I. let x (*) y = p in "
                                         "let <> = x in y"))
        let = r.term.body
        assert let.tyx == Unit() and let.tyy == Unit()


NEGATIVE_CASES = [
    ("x (*) x", ctx(["s"], delta={"x": TyVar("s")}), LINEAR_REUSED),
    ("fn f:s -o s -o I. f x x", ctx(["s"], delta={"x": TyVar("s")}),
     LINEAR_REUSED),
    ("!x", ctx(["s"], delta={"x": TyVar("s")}), LINEAR_IN_BANG),
    ("!(x (*) <>)", ctx(["s"], delta={"x": TyVar("s")}), LINEAR_IN_BANG),
    ("<>", ctx(["s"], delta={"x": TyVar("s")}), LINEAR_UNUSED),
    ("fn x:s. <>", ctx(["s"]), LINEAR_UNUSED),
    ("let x (*) y = p in x", ctx(["s"], delta={"p": S.Tensor(TyVar("s"),
                                                             TyVar("s"))}),
     LINEAR_UNUSED),
    ("y", EMPTY, UNBOUND),
    ("fn x:q. x", EMPTY, UNBOUND),
    ("<> <>", EMPTY, NOT_A_FUNCTION),
    ("<> [I]", EMPTY, NOT_A_FORALL),
    ("(fn x:I. x) Y", EMPTY, MISMATCH),
]


class TestNegative:
    @pytest.mark.parametrize("src,c,kind", NEGATIVE_CASES,
                             ids=[k + str(i) for i, (_, _, k)
                                  in enumerate(NEGATIVE_CASES)])
    def test_designated_error(self, src, c, kind):
        with pytest.raises(TypeCheckError) as e:
            infer_type(c, parse_term(src))
        assert e.value.kind == kind

    def test_pattern_annotation_mismatch(self):
        c = ctx(["s"], delta={"p": S.Tensor(TyVar("s"), Unit())})
        with pytest.raises(TypeCheckError) as e:
            infer_type(c, parse_term("let x (*) y : I * I = p in "
                                     "let <> = y in x"))
        assert e.value.kind == MISMATCH

    def test_check_type_mismatch_carries_both(self):
        with pytest.raises(TypeCheckError) as e:
            check_type(EMPTY, S.Star(), parse_type("I -o I"))
        assert e.value.kind == MISMATCH
        assert e.value.expected == parse_type("I -o I")
        assert e.value.found == Unit()

    def test_ill_formed_context(self):
        with pytest.raises(TypeCheckError) as e:
            infer_type(TermContext((), {"x": Unit()}, {"x": Unit()}),
                       S.Star())
        assert e.value.kind == CONTEXT_ILL_FORMED


class TestStructuralProperties:
    def test_uniqueness_across_seeds(self):
        rng = random.Random(31)
        for _ in range(150):
            c, t, _ = gen_well_typed(rng, 4)
            a = infer_type(c, t, seed=1).ty
            b = infer_type(c, t, seed=2).ty
            assert a == b

    def test_gamma_weakening_invisible(self):
        rng = random.Random(32)
        for _ in range(100):
            c, t, ty = gen_well_typed(rng, 4)
            widened = TermContext(c.xi, {**c.gamma, "fresh_w": Unit()},
                                  dict(c.delta))
            assert infer_type(widened, t).ty == ty

    def test_delta_weakening_rejected(self):
        rng = random.Random(33)
        for _ in range(100):
            c, t, _ = gen_well_typed(rng, 4)
            widened = TermContext(c.xi, dict(c.gamma),
                                  {**c.delta, "fresh_w": Unit()})
            with pytest.raises(TypeCheckError) as e:
                infer_type(widened, t)
            assert e.value.kind == LINEAR_UNUSED


class TestSubstitutionLemmas:
    def test_linear_example(self):
        c = ctx(["s"], delta={"x": Unit()})
        check_substitution_lemma("linear", c, parse_term("x"), "x", S.Star())

    def test_intuitionistic_example(self):
        c = ctx(["s"], gamma={"x": Unit()})
        check_substitution_lemma("intuitionistic", c, parse_term("!x"), "x",
                                 S.Star())

    def test_type_example(self):
        c = ctx(["a"], delta={"x": TyVar("a")})
        check_substitution_lemma("type", c, parse_term("x"), "a", None,
                                 rep_ty=Unit())

    @pytest.mark.parametrize("which", ["linear", "intuitionistic", "type"])
    def test_fuzz(self, which):
        rng = random.Random(hash(which) % 1000)
        for _ in range(60):
            _run_lemma_instance(rng, which)


def _run_lemma_instance(rng, which):
    g = TypedGen(rng)
    xi = ["s"]
    if which == "linear":
        u, sigma = g.gen(xi, {}, {}, 3)
        c = ctx(xi, gamma={"gv": Unit()}, delta={"lx": sigma})
        t, _ = g.gen(xi, dict(c.gamma), dict(c.delta), 3)
        check_substitution_lemma("linear", c, t, "lx", u,
                                 ctx_u=ctx(xi, gamma={"gv": Unit()}))
    elif which == "intuitionistic":
        u, sigma = g.gen(xi, {}, {}, 3)
        c = ctx(xi, gamma={"gx": sigma})
        t, _ = g.gen(xi, dict(c.gamma), {}, 3)
        check_substitution_lemma("intuitionistic", c, t, "gx", u)
    else:
        c = ctx(["s", "b"], delta={"lx": TyVar("b")})
        t, _ = g.gen(["s", "b"], {}, dict(c.delta), 3)
        rep = g.type_(["s"], 2)
        check_substitution_lemma("type", c, t, "b", None, rep_ty=rep)


class TestLinearSoundness:
    def test_usage_marks_every_linear_variable_once(self):
        rng = random.Random(34)
        for _ in range(150):
            c, t, _ = gen_well_typed(rng, 4)
            usage = infer_type(c, t).usage
            assert set(usage) == set(c.delta)
            assert all(v == 1 for v in usage.values())
