"""Definable relations: constructions, the relational interpretation,
admissibility derivations, the closure operator and schema generators."""

import random

import pytest

from conftest import gen_type
from pilly import encodings as E
from pilly import syntax as S
from pilly.parser import parse_term, parse_type
from pilly.pretty import pp
from pilly.relations import (Derivation, FormationError, PurityError,
                             RelJudgement, arrow_rel, bang_rel, check_prop,
                             check_relation, closure_phi, derive_admissible,
                             eq_rel, graph_rel, identity_extension_instance,
                             lolli_rel, lrl_statement,
                             parametricity_schema_instance, prop_beta,
                             reindex, tensor_rel, type_rel_interp, unit_rel)
from pilly.syntax import (Flavor, Lolli, RelContext, RelVar, TermContext,
                          Tensor, TyConst, TyVar, Unit)

XI = ("s", "t")
THETA = RelContext(entries={
    "R": (TyVar("s"), TyVar("t"), Flavor.REL),
    "Sa": (TyVar("s"), TyVar("t"), Flavor.ADMREL),
})
RAW = RelVar("R", TyVar("s"), TyVar("t"), Flavor.REL)
ADM = RelVar("Sa", TyVar("s"), TyVar("t"), Flavor.ADMREL)


def wf(rel):
    return check_relation(XI, {}, THETA, rel)


def judge(rel, gamma=None):
    return RelJudgement(XI, gamma or {}, THETA, rel)


class TestConstructions:
    def test_graph_of_identity_is_equality(self):
        assert graph_rel(S.id_at(Unit()), Unit(), Unit()) == eq_rel(Unit())

    def test_graph_well_formed(self):
        g = graph_rel(parse_term("fn x:s. x"), TyVar("s"), TyVar("s"))
        assert wf(g) == (TyVar("s"), TyVar("s"))

    def test_identity_reindex_collapses(self):
        rho = eq_rel(TyVar("s"))
        r = reindex(rho, S.id_at(TyVar("s")), S.id_at(TyVar("s")),
                    TyVar("s"), TyVar("s"))
        assert r == rho

    def test_composite_reindexings_compose(self):
        f = parse_term("fn x:s. x")
        g = parse_term("fn y:t. y")
        inner = reindex(ADM, f, g, TyVar("s"), TyVar("t"))
        twice = reindex(inner, f, g, TyVar("s"), TyVar("t"))
        comp = reindex(ADM, S.compose(f, f, TyVar("s")),
                       S.compose(g, g, TyVar("t")), TyVar("s"), TyVar("t"))
        assert twice == comp

    def test_lolli_signature(self):
        r = lolli_rel(eq_rel(TyVar("s")), eq_rel(TyVar("t")))
        assert wf(r) == (parse_type("s -o t"), parse_type("s -o t"))

    def test_tensor_expansion_shape(self):
        r = tensor_rel(RAW, RAW)
        dom, cod = wf(r)
        assert dom == Tensor(TyVar("s"), TyVar("s"))
        body = pp(r)
        # the displayed comprehension quantifies two fresh types, an
        # admissible relation, and two eliminator functions
        assert "all" in body and "AdmRel" in body and "let" in body

    def test_unit_rel_matches_display(self):
        r = unit_rel()
        assert wf(r) == (Unit(), Unit())
        assert "let <> =" in pp(r)

    def test_bang_statement_emits(self):
        # the promotion lemma statement: related values have related boxes
        r = bang_rel(RAW)
        x, y = S.Var("x"), S.Var("y")
        stmt = S.forall_tm_p("x", TyVar("s"), S.forall_tm_p(
            "y", TyVar("t"), S.Implies(
                S.RelApp(RAW, x, y),
                S.RelApp(r, S.bang(x), S.bang(y)))))
        check_prop(XI, {}, THETA, prop_beta(stmt))

    def test_arrow_uses_boxed_application(self):
        r = arrow_rel(RAW, ADM)
        assert "!x" in pp(r)


class TestTypeRelInterp:
    def test_variable_slot(self):
        assert type_rel_interp(TyVar("a"), [RAW]) == RAW

    def test_unit_is_unit_rel(self):
        assert type_rel_interp(Unit(), []) == unit_rel()

    def test_arrow_unfolds_to_lolli(self):
        got = type_rel_interp(parse_type("a -o a"), [RAW])
        assert got == lolli_rel(RAW, RAW)

    def test_forall_unfolds_to_quantified(self):
        got = type_rel_interp(parse_type("all b. b"), [])
        s = pp(got)
        assert s.startswith("(t:all b. b, u:all b")
        assert "AdmRel" in s

    def test_opaque_constant_stays(self):
        got = type_rel_interp(TyConst("lists", (TyVar("a"),)), [RAW])
        assert isinstance(got, S.TypeRel)

    def test_arity_mismatch(self):
        with pytest.raises(FormationError):
            type_rel_interp(parse_type("a -o b"), [RAW])

    def test_substitution_homomorphism(self):
        # interpret(body[inner/a]) == interpret(body) with the slot for a
        # interpreted by interpret(inner)
        rng = random.Random(61)
        checked = 0
        while checked < 60:
            body = gen_type(rng, ["a", "b"], 4)
            inner = gen_type(rng, ["b"], 2)
            if "a" not in S.free_type_names(body):
                continue
            checked += 1
            substituted = S.subst_type_in_type(body, "a", inner)
            inner_rel = type_rel_interp(
                inner, [RAW for _ in S.free_type_names(inner)])
            direct = type_rel_interp(
                substituted, [RAW for _ in S.free_type_names(substituted)])
            table = {"a": inner_rel, "b": RAW}
            composed = type_rel_interp(
                body, [table[n] for n in S.free_type_names(body)])
            assert direct == composed


def _derivable(rel, gamma=None) -> bool:
    return derive_admissible(judge(rel, gamma)) is not None


class TestAdmissibility:
    def test_equality_derivable(self):
        d = derive_admissible(judge(eq_rel(TyVar("s"))))
        assert isinstance(d, Derivation)

    def test_graph_derivable(self):
        g = graph_rel(parse_term("fn x:s. x"), TyVar("s"), TyVar("s"))
        assert _derivable(g)

    def test_admissible_variable(self):
        assert _derivable(ADM)

    def test_raw_variable_not_derivable(self):
        assert not _derivable(RAW)

    def test_closure_properties(self):
        assert _derivable(reindex(ADM, parse_term("fn x:s. x"),
                                  parse_term("fn y:t. y"),
                                  TyVar("s"), TyVar("t")))
        assert _derivable(lolli_rel(RAW, ADM))
        assert not _derivable(lolli_rel(ADM, RAW))
        assert _derivable(arrow_rel(RAW, ADM))
        assert _derivable(tensor_rel(RAW, RAW))
        assert _derivable(bang_rel(RAW))
        assert _derivable(unit_rel())
        assert _derivable(closure_phi(RAW))

    def test_interpretation_with_admissible_arguments(self):
        rel = S.type_rel(["a"], TyConst("lists", (TyVar("a"),)), [ADM])
        assert _derivable(rel)
        raw = S.type_rel(["a"], TyConst("lists", (TyVar("a"),)), [RAW])
        assert not _derivable(raw)

    def test_conjunction_and_top(self):
        both = S.compr("x", TyVar("s"), "y", TyVar("t"), S.And(
            S.RelApp(ADM, S.Var("x"), S.Var("y")),
            S.RelApp(ADM, S.Var("x"), S.Var("y"))))
        assert _derivable(both)
        top = S.compr("x", TyVar("s"), "y", TyVar("t"), S.Top())
        assert _derivable(top)

    def test_swapped_arguments(self):
        sw = S.compr("x", TyVar("t"), "y", TyVar("s"),
                     S.RelApp(ADM, S.Var("y"), S.Var("x")))
        assert _derivable(sw)

    def test_negative_shapes(self):
        bad = [
            RAW,
            lolli_rel(ADM, RAW),
            arrow_rel(ADM, RAW),
            S.compr("x", TyVar("s"), "y", TyVar("t"),
                    S.Or(S.Top(), S.RelApp(ADM, S.Var("x"), S.Var("y")))),
            S.compr("x", TyVar("s"), "y", TyVar("t"),
                    S.exists_tm_p("z", Unit(),
                                  S.RelApp(ADM, S.Var("x"), S.Var("y")))),
        ]
        for rel in bad:
            assert not _derivable(rel)

    def test_phi_is_smallest_statement_emitted(self):
        # containment half that is pure formation: rho implies Phi(rho)
        phi = closure_phi(RAW)
        stmt = S.forall_tm_p("x", TyVar("s"), S.forall_tm_p(
            "y", TyVar("t"), S.Implies(
                S.RelApp(RAW, S.Var("x"), S.Var("y")),
                S.RelApp(phi, S.Var("x"), S.Var("y")))))
        check_prop(XI, {}, THETA, prop_beta(stmt))

    def test_derivation_renders(self):
        d = derive_admissible(judge(closure_phi(RAW)))
        text = d.render()
        assert "forall-type" in text and "reindex" in text


class TestSchemas:
    def test_identity_extension_variable(self):
        p = identity_extension_instance(TyVar("a"))
        check_prop((), {}, RelContext(), p)

    def test_identity_extension_tensor(self):
        p = identity_extension_instance(parse_type("a * a"))
        check_prop((), {}, RelContext(), p)

    def test_identity_extension_quantified_case(self):
        p = identity_extension_instance(parse_type("all b. a -o b"))
        check_prop((), {}, RelContext(), p)

    def test_parametricity_well_formed(self):
        p = parametricity_schema_instance("b", parse_type("(b -> b) -> b"))
        check_prop((), {}, RelContext(), p)

    def test_parametricity_instance_at_y_is_axiom(self):
        schema = parametricity_schema_instance("b",
                                               parse_type("(b -> b) -> b"))
        assert isinstance(schema, S.ForallTm)
        instantiated = prop_beta(S.instantiate_tm(schema.body, S.Y()))
        assert instantiated == lrl_statement(S.Y())

    def test_lrl_identity(self):
        p = lrl_statement(parse_term("/\\a. fn x:a. x"))
        check_prop((), {}, RelContext(), p)

    def test_lrl_successor(self):
        succ = E.encode_nat().combinators["succ"][0]
        p = lrl_statement(succ)
        check_prop((), {}, RelContext(), p)

    def test_lrl_open_term(self):
        ctx = TermContext(("a",), {"f": parse_type("a -o a")},
                          {"x": TyVar("a")})
        p = lrl_statement(parse_term("f x"), ctx)
        check_prop((), {}, RelContext(), p)

    def test_lrl_rejects_constants(self):
        t = S.lin_lam("x", TyConst("c0"), S.Var("x"))
        with pytest.raises(PurityError):
            lrl_statement(t)


class TestFormation:
    def test_relapp_argument_types_checked(self):
        bad = S.RelApp(RAW, S.Star(), S.Star())
        with pytest.raises(FormationError):
            check_prop(XI, {}, THETA, bad)

    def test_unbound_relation_variable(self):
        with pytest.raises(FormationError):
            check_relation((), {}, RelContext(),
                           RelVar("missing", Unit(), Unit(), Flavor.REL))

    def test_flavor_never_promoted(self):
        # a Rel-flavored variable stays underivable even when a same-name
        # AdmRel exists in another judgement
        assert not _derivable(RAW)
        assert _derivable(ADM)


class TestSchemaRelationship:
    def test_parametricity_is_the_unfolded_quantified_interpretation(self):
        # instantiating the schema's value quantifier reproduces the
        # self-relatedness statement produced through the interpretation
        sigma = parse_type("b -o b")
        schema = parametricity_schema_instance("b", sigma)
        ident = parse_term("/\\c. fn x:c. x")
        inst = prop_beta(S.instantiate_tm(schema.body, ident))
        assert inst == lrl_statement(ident)
