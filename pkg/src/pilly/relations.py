"""Definable relations, admissibility derivations and schema generators.

Relations are comprehensions, relation variables, or relational
interpretations of types.  The derived constructions (graph, reindexing,
the per-type-constructor constructions, the admissible closure) all
produce comprehensions whose bodies are kept in beta-normal form: a
comprehension applied to arguments is unfolded, and terms inside
propositions are normalized by the rewriter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax as S
from .pretty import print_rel, print_type
from .rewrite import FuelExhausted, RewriteConfig, normalize
from .syntax import (And, Bottom, Compr, ExistsRel, ExistsTm, ExistsTy,
                     Flavor, Forall, ForallRel, ForallTm, ForallTy, Implies,
                     InternalEq, Lolli, Or, Proposition, RelApp, Relation,
                     RelContext, RelVar, Tensor, TermContext, Top, TyConst,
                     TypeRel, TyVar, Type, Unit, Bang,
                     arrow, compr, forall, forall_rel_p, forall_tm_p,
                     forall_ty_p, free_term_names, free_type_names, fresh,
                     fresh_many, instantiate_tm, rel_signature, type_rel)
from .typecheck import TypeCheckError, infer_type, kind_check


class FormationError(Exception):
    pass


_NF_CFG = RewriteConfig(fuel=4000)


def _norm_term(t: S.Term) -> S.Term:
    try:
        return normalize(t, _NF_CFG)
    except FuelExhausted as e:
        return e.term


def prop_beta(p: Proposition) -> Proposition:
    """Unfold comprehension applications and normalize embedded terms."""
    if isinstance(p, RelApp):
        rel = rel_beta(p.rel)
        if isinstance(rel, Compr):
            return prop_beta(instantiate_tm(rel.body, p.lhs, p.rhs))
        return RelApp(rel, _norm_term(p.lhs), _norm_term(p.rhs))
    if isinstance(p, InternalEq):
        return InternalEq(p.ty, _norm_term(p.lhs), _norm_term(p.rhs))
    if isinstance(p, (Implies, And, Or)):
        return type(p)(prop_beta(p.left), prop_beta(p.right))
    if isinstance(p, (Top, Bottom)):
        return p
    if isinstance(p, (ForallTy, ExistsTy)):
        return type(p)(p.hint, prop_beta(p.body))
    if isinstance(p, (ForallTm, ExistsTm)):
        return type(p)(p.hint, p.ty, prop_beta(p.body))
    if isinstance(p, (ForallRel, ExistsRel)):
        return type(p)(p.hint, p.dom, p.cod, p.flavor, prop_beta(p.body))
    return p


def rel_beta(r: Relation) -> Relation:
    if isinstance(r, Compr):
        return Compr(r.hintx, r.hinty, r.tyx, r.tyy, prop_beta(r.body))
    if isinstance(r, TypeRel):
        return TypeRel(r.hints, r.body, tuple(rel_beta(a) for a in r.args))
    return r


# ---------------------------------------------------------------------------
# Formation checking


@dataclass
class RelJudgement:
    xi: tuple[str, ...]
    gamma: dict[str, Type]
    theta: RelContext
    relation: Relation
    dom: Type | None = None
    cod: Type | None = None
    flavor: Flavor = Flavor.REL


def check_relation(xi, gamma, theta: RelContext, r: Relation
                   ) -> tuple[Type, Type]:
    """Formation check; returns the relation's domain and codomain."""
    if isinstance(r, RelVar):
        if r.name in theta.entries:
            d, c, fl = theta.entries[r.name]
            if d != r.dom or c != r.cod:
                raise FormationError(
                    f"relation variable {r.name!r} used at "
                    f"({print_type(r.dom)}, {print_type(r.cod)}) but declared "
                    f"at ({print_type(d)}, {print_type(c)})")
        else:
            raise FormationError(f"relation variable {r.name!r} not in scope")
        kind_check(xi, r.dom)
        kind_check(xi, r.cod)
        return r.dom, r.cod
    if isinstance(r, Compr):
        kind_check(xi, r.tyx)
        kind_check(xi, r.tyy)
        x, y, body = S.open_compr(r, set(gamma) | set(xi) | theta.names())
        gamma2 = dict(gamma)
        gamma2[x] = r.tyx
        gamma2[y] = r.tyy
        check_prop(xi, gamma2, theta, body)
        return r.tyx, r.tyy
    if isinstance(r, TypeRel):
        for a in r.args:
            check_relation(xi, gamma, theta, a)
        dom, cod = rel_signature(r)
        kind_check(xi, dom)
        kind_check(xi, cod)
        return dom, cod
    raise FormationError(f"not a relation: {r!r}")


def check_prop(xi, gamma, theta: RelContext, p: Proposition) -> None:
    """Well-formedness of a proposition: terms are typed with the
    intuitionistic context only (no linear hypotheses in the logic)."""
    ctx = lambda: TermContext(tuple(xi), dict(gamma), {})
    if isinstance(p, InternalEq):
        kind_check(xi, p.ty)
        for t in (p.lhs, p.rhs):
            res = infer_type(ctx(), t)
            if res.ty != p.ty:
                raise FormationError(
                    f"equality at {print_type(p.ty)} applied to a term of "
                    f"type {print_type(res.ty)}")
        return
    if isinstance(p, RelApp):
        dom, cod = check_relation(xi, gamma, theta, p.rel)
        for t, want in ((p.lhs, dom), (p.rhs, cod)):
            res = infer_type(ctx(), t)
            if res.ty != want:
                raise FormationError(
                    f"relation with domain/codomain {print_type(want)} "
                    f"applied to a term of type {print_type(res.ty)}")
        return
    if isinstance(p, (Implies, And, Or)):
        check_prop(xi, gamma, theta, p.left)
        check_prop(xi, gamma, theta, p.right)
        return
    if isinstance(p, (Top, Bottom)):
        return
    avoid = set(xi) | set(gamma) | theta.names()
    if isinstance(p, (ForallTy, ExistsTy)):
        a = fresh(p.hint, avoid)
        check_prop(tuple(xi) + (a,), gamma, theta,
                   S.instantiate_ty(p.body, TyVar(a)))
        return
    if isinstance(p, (ForallTm, ExistsTm)):
        kind_check(xi, p.ty)
        x = fresh(p.hint, avoid)
        gamma2 = dict(gamma)
        gamma2[x] = p.ty
        check_prop(xi, gamma2, theta, instantiate_tm(p.body, S.Var(x)))
        return
    if isinstance(p, (ForallRel, ExistsRel)):
        kind_check(xi, p.dom)
        kind_check(xi, p.cod)
        rn = fresh(p.hint, avoid)
        theta2 = RelContext(dict(theta.entries))
        theta2.entries[rn] = (p.dom, p.cod, p.flavor)
        body = S.instantiate_rel(p.body, RelVar(rn, p.dom, p.cod, p.flavor))
        check_prop(xi, gamma, theta2, body)
        return
    raise FormationError(f"not a proposition: {p!r}")


# ---------------------------------------------------------------------------
# Derived constructions


def graph_rel(f: S.Term, dom: Type, cod: Type) -> Compr:
    """<f> = (x, y). f x =_cod y."""
    x, y = fresh_many(["x", "y"], S.all_free_names(f))
    return rel_beta(compr(x, dom, y, cod,
                          InternalEq(cod, S.App(f, S.Var(x)), S.Var(y))))


def eq_rel(ty: Type) -> Compr:
    """Equality as the graph of the identity."""
    return graph_rel(S.id_at(ty), ty, ty)


def reindex(rel: Relation, f: S.Term, g: S.Term,
            dom: Type | None = None, cod: Type | None = None,
            ctx: TermContext | None = None) -> Compr:
    """(f,g)* rel = (x:dom, y:cod). rel(f x, g y).

    dom and cod default to the domains of f's and g's inferred types.
    """
    if dom is None or cod is None:
        fty = infer_type(ctx or TermContext(), f).ty
        gty = infer_type(ctx or TermContext(), g).ty
        if not isinstance(fty, S.Lolli) or not isinstance(gty, S.Lolli):
            raise FormationError("reindexing maps must be linear functions")
        dom = fty.dom if dom is None else dom
        cod = gty.dom if cod is None else cod
    x, y = fresh_many(["x", "y"], S.all_free_names(f) | S.all_free_names(g))
    return rel_beta(compr(x, dom, y, cod,
                          RelApp(rel, S.App(f, S.Var(x)), S.App(g, S.Var(y)))))


def lolli_rel(rel: Relation, rel2: Relation) -> Compr:
    s, t = rel_signature(rel)
    s2, t2 = rel_signature(rel2)
    avoid = S.all_free_names(rel) | S.all_free_names(rel2)
    f, g, x, y = fresh_many(["f", "g", "x", "y"], avoid)
    body = forall_tm_p(x, s, forall_tm_p(y, t, Implies(
        RelApp(rel, S.Var(x), S.Var(y)),
        RelApp(rel2, S.App(S.Var(f), S.Var(x)), S.App(S.Var(g), S.Var(y))))))
    return rel_beta(compr(f, Lolli(s, s2), g, Lolli(t, t2), body))


def arrow_rel(rel: Relation, rel2: Relation) -> Compr:
    s, t = rel_signature(rel)
    s2, t2 = rel_signature(rel2)
    avoid = S.all_free_names(rel) | S.all_free_names(rel2)
    f, g, x, y = fresh_many(["f", "g", "x", "y"], avoid)
    body = forall_tm_p(x, s, forall_tm_p(y, t, Implies(
        RelApp(rel, S.Var(x), S.Var(y)),
        RelApp(rel2, S.App(S.Var(f), S.bang(S.Var(x))),
               S.App(S.Var(g), S.bang(S.Var(y)))))))
    return rel_beta(compr(f, arrow(s, s2), g, arrow(t, t2), body))


def forall_rel(a: str, b: str, rname: str, rel: Relation) -> Compr:
    """The quantified construction for polymorphic types.

    `rel` must have domain open in `a` and codomain open in `b`; the
    result relates all-a. dom to all-b. cod.
    """
    dom, cod = rel_signature(rel)
    avoid = S.all_free_names(rel) | {a, b, rname}
    t, u = fresh_many(["t", "u"], avoid)
    body = forall_ty_p(a, forall_ty_p(b, forall_rel_p(
        rname, TyVar(a), TyVar(b), Flavor.ADMREL,
        RelApp(rel, S.TyApp(S.Var(t), TyVar(a)), S.TyApp(S.Var(u), TyVar(b))))))
    return rel_beta(compr(t, forall(a, dom), u, forall(b, cod), body))


def tensor_rel(rel: Relation, rel2: Relation) -> Compr:
    """(f_ss', f_tt')* (all (a,b,R). (rel -o rel2 -o R) -o R)."""
    s, t = rel_signature(rel)
    s2, t2 = rel_signature(rel2)
    avoid = (S.all_free_names(rel) | S.all_free_names(rel2)
             | set(free_type_names(s)) | set(free_type_names(t)))
    a, b, rn = fresh_many(["a", "b", "R"], avoid)
    rv = RelVar(rn, TyVar(a), TyVar(b), Flavor.ADMREL)
    inner = lolli_rel(lolli_rel(rel, lolli_rel(rel2, rv)), rv)
    x, y, xp, xq, h = fresh_many(["x", "y", "x'", "x''", "h"], avoid | {a, b, rn})

    def embed(u: Type, v: Type) -> S.Term:
        # fn z:u*v. let x' (*) x'' = z in /\c. fn h:u -o v -o c. h x' x''
        c = fresh("c", avoid | {a, b, rn})
        return S.lin_lam(x, Tensor(u, v), S.let_tensor(
            xp, xq, u, v, S.Var(x),
            S.ty_lam(c, S.lin_lam(h, Lolli(u, Lolli(v, TyVar(c))),
                                  S.app(S.Var(h), S.Var(xp), S.Var(xq))))))

    closed = _close_quantified(a, b, rn, inner)
    return reindex(closed, embed(s, s2), embed(t, t2),
                   Tensor(s, s2), Tensor(t, t2))


def _close_quantified(a: str, b: str, rn: str, rel: Relation) -> Compr:
    """(x:dom, y:cod). all a. all b. all R:AdmRel(a,b). rel(x, y), where
    dom/cod are rel's signature with a/b generalized away.

    Used for the tensor/unit/bang constructions whose carrier types do
    not mention a, b."""
    dom, cod = rel_signature(rel)
    dom_g = S.forall(a, dom)
    cod_g = S.forall(b, cod)
    avoid = S.all_free_names(rel) | {a, b, rn}
    t, u = fresh_many(["t", "u"], avoid)
    body = forall_ty_p(a, forall_ty_p(b, forall_rel_p(
        rn, TyVar(a), TyVar(b), Flavor.ADMREL,
        RelApp(rel, S.TyApp(S.Var(t), TyVar(a)), S.TyApp(S.Var(u), TyVar(b))))))
    return rel_beta(compr(t, dom_g, u, cod_g, body))


def unit_rel() -> Compr:
    """(f,f)* (all (a,b,R). R -o R) along fn x:I. let <> = x in id."""
    a, b, rn = "a", "b", "R"
    rv = RelVar(rn, TyVar(a), TyVar(b), Flavor.ADMREL)
    inner = lolli_rel(rv, rv)
    closed = _close_quantified(a, b, rn, inner)
    f = S.lin_lam("x", Unit(), S.LetStar(S.Var("x"), S.poly_id()))
    return reindex(closed, f, f, Unit(), Unit())


def bang_rel(rel: Relation) -> Compr:
    """(f_s, f_t)* (all (a,b,R). (rel -> R) -o R)."""
    s, t = rel_signature(rel)
    avoid = S.all_free_names(rel)
    a, b, rn = fresh_many(["a", "b", "R"], avoid)
    rv = RelVar(rn, TyVar(a), TyVar(b), Flavor.ADMREL)
    inner = lolli_rel(arrow_rel(rel, rv), rv)
    closed = _close_quantified(a, b, rn, inner)

    def embed(u: Type) -> S.Term:
        x, g, c = fresh_many(["x", "g", "c"], avoid | {a, b, rn})
        return S.lin_lam(x, Bang(u), S.ty_lam(c, S.lin_lam(
            g, arrow(u, TyVar(c)), S.App(S.Var(g), S.Var(x)))))

    return reindex(closed, embed(s), embed(t), Bang(s), Bang(t))


def closure_phi(rel: Relation) -> Compr:
    """The least admissible relation containing rel."""
    s, t = rel_signature(rel)
    avoid = S.all_free_names(rel)
    a, b, sn, f, g, x, y = fresh_many(["a", "b", "S", "f", "g", "x", "y"],
                                      avoid)
    sv = RelVar(sn, TyVar(a), TyVar(b), Flavor.ADMREL)
    body = forall_ty_p(a, forall_ty_p(b, forall_rel_p(
        sn, TyVar(a), TyVar(b), Flavor.ADMREL,
        forall_tm_p(f, Lolli(s, TyVar(a)), forall_tm_p(
            g, Lolli(t, TyVar(b)),
            Implies(RelApp(lolli_rel(rel, sv), S.Var(f), S.Var(g)),
                    RelApp(sv, S.App(S.Var(f), S.Var(x)),
                           S.App(S.Var(g), S.Var(y)))))))))
    return rel_beta(compr(x, s, y, t, body))


# ---------------------------------------------------------------------------
# Relational interpretation of types


def type_rel_interp(ty: Type, args: list[Relation]) -> Relation:
    """sigma[rho...]: structural unfolding over ty's free type variables
    (first-occurrence order).  Opaque constants stay as TypeRel nodes."""
    names = free_type_names(ty)
    if len(names) != len(args):
        raise FormationError(
            f"type has {len(names)} free variable(s), got {len(args)} "
            "relation(s)")
    return _unfold(ty, dict(zip(names, args)))


def _unfold(ty: Type, mapping: dict[str, Relation]) -> Relation:
    if isinstance(ty, TyVar):
        if ty.name in mapping:
            return mapping[ty.name]
        raise FormationError(f"unbound variable {ty.name!r} in interpretation")
    if isinstance(ty, Unit):
        return unit_rel()
    if isinstance(ty, Lolli):
        return lolli_rel(_unfold(ty.dom, mapping), _unfold(ty.cod, mapping))
    if isinstance(ty, Tensor):
        return tensor_rel(_unfold(ty.left, mapping), _unfold(ty.right, mapping))
    if isinstance(ty, Bang):
        return bang_rel(_unfold(ty.body, mapping))
    if isinstance(ty, Forall):
        used = set(mapping) | set(free_type_names(ty))
        for r in mapping.values():
            used |= S.all_free_names(r)
        a = fresh(ty.hint, used)
        b = fresh(ty.hint + "'", used | {a})
        rn = fresh("R", used | {a, b})
        opened = S.instantiate_ty(ty.body, TyVar(a))
        # codomain side uses the second fresh variable
        inner = _unfold(opened, {**mapping,
                                 a: RelVar(rn, TyVar(a), TyVar(b),
                                           Flavor.ADMREL)})
        return forall_rel(a, b, rn, inner)
    if isinstance(ty, TyConst):
        sub_names = free_type_names(ty)
        return type_rel(sub_names, ty, [mapping[n] for n in sub_names])
    raise FormationError(f"cannot interpret type {ty!r}")


# ---------------------------------------------------------------------------
# Admissibility derivations


@dataclass
class Derivation:
    rule: str
    detail: str = ""
    children: list["Derivation"] = field(default_factory=list)

    def render(self, indent: int = 0) -> str:
        pad = "  " * indent
        line = f"{pad}{self.rule}" + (f": {self.detail}" if self.detail else "")
        return "\n".join([line] + [c.render(indent + 1) for c in self.children])


def derive_admissible(j: RelJudgement) -> Derivation | None:
    """Bottom-up, syntax-directed search over the admissibility rules.

    None means no derivation was found by this strategy, not a semantic
    refutation.
    """
    env = (tuple(j.xi), dict(j.gamma), dict(j.theta.entries))
    return _derive(j.relation, env)


def _derive(r: Relation, env) -> Derivation | None:
    xi, gamma, theta = env
    if isinstance(r, RelVar):
        declared = theta.get(r.name)
        flavor = declared[2] if declared else r.flavor
        if flavor is Flavor.ADMREL:
            return Derivation("admissible-variable", r.name)
        return None
    if isinstance(r, TypeRel):
        kids = []
        for a in r.args:
            d = _derive(a, env)
            if d is None:
                return None
            kids.append(d)
        return Derivation("type-interpretation", print_rel(r), kids)
    if isinstance(r, Compr):
        avoid = set(xi) | set(gamma) | set(theta) | S.all_free_names(r)
        x, y, body = S.open_compr(r, avoid)
        return _derive_body(x, r.tyx, y, r.tyy, body, env)
    return None


def _derive_body(x: str, tyx: Type, y: str, tyy: Type,
                 body: Proposition, env) -> Derivation | None:
    xi, gamma, theta = env
    if isinstance(body, Top):
        return Derivation("truth")
    if isinstance(body, And):
        l = _derive_body(x, tyx, y, tyy, body.left, env)
        if l is None:
            return None
        r = _derive_body(x, tyx, y, tyy, body.right, env)
        if r is None:
            return None
        return Derivation("conjunction", children=[l, r])
    if isinstance(body, Implies):
        if {x, y} & set(free_term_names(body.left)):
            return None
        inner = _derive_body(x, tyx, y, tyy, body.right, env)
        if inner is None:
            return None
        return Derivation("implication-antecedent", children=[inner])
    avoid = set(xi) | set(gamma) | set(theta) | {x, y}
    if isinstance(body, ForallTy):
        a = fresh(body.hint, avoid)
        inner = _derive_body(x, tyx, y, tyy,
                             S.instantiate_ty(body.body, TyVar(a)),
                             (xi + (a,), gamma, theta))
        if inner is None:
            return None
        return Derivation("forall-type", a, [inner])
    if isinstance(body, ForallTm):
        z = fresh(body.hint, avoid)
        gamma2 = dict(gamma)
        gamma2[z] = body.ty
        inner = _derive_body(x, tyx, y, tyy,
                             instantiate_tm(body.body, S.Var(z)),
                             (xi, gamma2, theta))
        if inner is None:
            return None
        return Derivation("forall-term", z, [inner])
    if isinstance(body, ForallRel):
        rn = fresh(body.hint, avoid)
        theta2 = dict(theta)
        theta2[rn] = (body.dom, body.cod, body.flavor)
        opened = S.instantiate_rel(
            body.body, RelVar(rn, body.dom, body.cod, body.flavor))
        inner = _derive_body(x, tyx, y, tyy, opened, (xi, gamma, theta2))
        if inner is None:
            return None
        kind = ("forall-admissible-relation" if body.flavor is Flavor.ADMREL
                else "forall-relation")
        return Derivation(kind, rn, [inner])
    if isinstance(body, InternalEq):
        return _derive_relapp(x, tyx, y, tyy, eq_rel(body.ty),
                              body.lhs, body.rhs, env,
                              leaf=Derivation("equality", print_type(body.ty)))
    if isinstance(body, RelApp):
        return _derive_relapp(x, tyx, y, tyy, body.rel, body.lhs, body.rhs,
                              env, leaf=None)
    return None


def _derive_relapp(x, tyx, y, tyy, rel, lhs, rhs, env,
                   leaf: Derivation | None) -> Derivation | None:
    xi, gamma, theta = env
    inner = leaf if leaf is not None else _derive(rel, env)
    if inner is None:
        return None
    if lhs == S.Var(x) and rhs == S.Var(y):
        return Derivation("applied-relation", children=[inner])
    if lhs == S.Var(y) and rhs == S.Var(x):
        return Derivation("converse", children=[inner])

    def linear_map(var, ty, body):
        f = S.lin_lam(var, ty, body)
        infer_type(TermContext(tuple(xi), dict(gamma), {}), f)
        return f

    # view the body as a reindexing along the lambda-abstracted argument
    # positions; the abstractions must be linear maps over Gamma only
    try:
        if (x not in free_term_names(rhs)
                and y not in free_term_names(lhs)):
            linear_map(x, tyx, lhs)
            linear_map(y, tyy, rhs)
            return Derivation("reindex", "via beta-unfolding", [inner])
        if (x not in free_term_names(lhs)
                and y not in free_term_names(rhs)):
            linear_map(y, tyy, lhs)
            linear_map(x, tyx, rhs)
            return Derivation("converse", "reindex via beta-unfolding",
                              [inner])
    except TypeCheckError:
        return None
    return None


# ---------------------------------------------------------------------------
# Schema generators


class PurityError(Exception):
    pass


def _interp_with(ty: Type, rel_for: dict[str, Relation]) -> Relation:
    names = free_type_names(ty)
    return type_rel_interp(ty, [rel_for[n] for n in names])


def identity_extension_instance(ty: Type) -> Proposition:
    """all as. ty[eq_as] == eq_ty, as a biimplication of applications."""
    names = free_type_names(ty)
    rel_for = {n: eq_rel(TyVar(n)) for n in names}
    interp = _interp_with(ty, rel_for)
    eq = eq_rel(ty)
    avoid = set(names) | set(free_type_names(ty))
    x, y = fresh_many(["x", "y"], avoid)
    body = forall_tm_p(x, ty, forall_tm_p(y, ty, And(
        Implies(RelApp(interp, S.Var(x), S.Var(y)),
                RelApp(eq, S.Var(x), S.Var(y))),
        Implies(RelApp(eq, S.Var(x), S.Var(y)),
                RelApp(interp, S.Var(x), S.Var(y))))))
    for n in reversed(names):
        body = forall_ty_p(n, body)
    return prop_beta(body)


def parametricity_schema_instance(var: str, body_ty: Type) -> Proposition:
    """all as. all u:(all var. body). all b,b'. all R:AdmRel(b,b').
       body[R, eq_as](u b, u b')."""
    others = [n for n in free_type_names(body_ty) if n != var]
    avoid = set(others) | {var}
    b, b2, rn, u = fresh_many([var, var + "'", "R", "u"], avoid)
    rel_for: dict[str, Relation] = {n: eq_rel(TyVar(n)) for n in others}
    rel_for[var] = RelVar(rn, TyVar(b), TyVar(b2), Flavor.ADMREL)
    interp = _interp_with(body_ty, rel_for)
    poly = forall(var, body_ty)
    prop = forall_tm_p(u, poly, forall_ty_p(b, forall_ty_p(b2, forall_rel_p(
        rn, TyVar(b), TyVar(b2), Flavor.ADMREL,
        RelApp(interp, S.TyApp(S.Var(u), TyVar(b)),
               S.TyApp(S.Var(u), TyVar(b2)))))))
    for n in reversed(others):
        prop = forall_ty_p(n, prop)
    return prop_beta(prop)


def lrl_statement(t: S.Term, ctx: TermContext | None = None) -> Proposition:
    """Relational self-relatedness of a pure term at its type."""
    ctx = ctx or TermContext()
    if S.contains_const(t) or any(S.contains_const(ty)
                                  for ty in list(ctx.gamma.values())
                                  + list(ctx.delta.values())):
        raise PurityError("term or context mentions signature constants")
    res = infer_type(ctx, t)
    tau = res.ty
    if not ctx.xi and not ctx.gamma and not ctx.delta:
        return prop_beta(RelApp(type_rel_interp(tau, []), t, t))
    alphas = list(ctx.xi)
    avoid = (set(alphas) | set(ctx.gamma) | set(ctx.delta)
             | S.all_free_names(t))
    betas = fresh_many([a + "'" for a in alphas], avoid)
    avoid |= set(betas)
    rels = fresh_many(["R" + a for a in alphas], avoid)
    avoid |= set(rels)
    rel_for = {a: RelVar(r, TyVar(a), TyVar(b), Flavor.ADMREL)
               for a, b, r in zip(alphas, betas, rels)}
    ren_ty = {a: TyVar(b) for a, b in zip(alphas, betas)}
    pairs = []  # (x, y, sigma)
    ren_tm = {}
    for x, sigma in list(ctx.gamma.items()) + list(ctx.delta.items()):
        y = fresh(x + "'", avoid)
        avoid.add(y)
        pairs.append((x, y, sigma))
        ren_tm[x] = S.Var(y)
    t2 = S.subst_types(S.subst_terms(t, ren_tm), ren_ty)
    prem = None
    for x, y, sigma in pairs:
        p = RelApp(_interp_with(sigma, rel_for), S.Var(x), S.Var(y))
        prem = p if prem is None else And(prem, p)
    concl = RelApp(_interp_with(tau, rel_for), t, t2)
    body = concl if prem is None else Implies(prem, concl)
    for x, y, sigma in reversed(pairs):
        body = forall_tm_p(y, S.subst_types(sigma, ren_ty), body)
        body = forall_tm_p(x, sigma, body)
    for a, b, r in reversed(list(zip(alphas, betas, rels))):
        body = forall_rel_p(r, TyVar(a), TyVar(b), Flavor.ADMREL, body)
    for b in reversed(betas):
        body = forall_ty_p(b, body)
    for a in reversed(alphas):
        body = forall_ty_p(a, body)
    return prop_beta(body)
