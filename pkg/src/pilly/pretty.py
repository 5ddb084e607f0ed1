"""Printers for the four syntactic categories.

Output re-parses to an alpha-equal object.  `sugar=True` additionally
folds `!s -o t` into `s -> t` and the intuitionistic-lambda pattern into
`lam x:s. t`; both forms re-parse to the identical core object.
"""

from __future__ import annotations

from .syntax import (
    And, App, Bang, BangIntro, Bottom, Bound, Compr, ExistsRel, ExistsTm,
    ExistsTy, Forall, ForallRel, ForallTm, ForallTy, Implies, InternalEq,
    LetBang, LetStar, LetTensor, LinLam, Lolli, Node, Or, Proposition, RelApp,
    Relation, RelVar, Star, Tensor, TensorPair, Term, Top, TyBound, Type,
    TypeRel, TyApp, TyConst, TyLam, TyVar, Unit, Var, Y,
    all_free_names, fresh, instantiate_rel, instantiate_tm, instantiate_ty,
    shift, uses_bound_tm,
)

# precedence levels; a node prints bare when its level >= the requested one
_BIND, _TENSOR, _APP, _BANG, _ATOM = 0, 1, 2, 3, 4


def _wrap(s: str, level: int, prec: int) -> str:
    return s if level >= prec else f"({s})"


# ---------------------------------------------------------------------------
# Types


def print_type(t: Type, sugar: bool = False) -> str:
    return _ty(t, 0, set(all_free_names(t)), sugar)


def _ty(t: Type, prec: int, avoid: set[str], sugar: bool) -> str:
    if isinstance(t, TyVar):
        return t.name
    if isinstance(t, Unit):
        return "I"
    if isinstance(t, Forall):
        n = fresh(t.hint, avoid)
        body = instantiate_ty(t.body, TyVar(n))
        s = f"all {n}. {_ty(body, 0, avoid | {n}, sugar)}"
        return _wrap(s, _BIND, prec)
    if isinstance(t, Lolli):
        if sugar and isinstance(t.dom, Bang):
            s = f"{_ty(t.dom.body, _APP, avoid, sugar)} -> {_ty(t.cod, _TENSOR, avoid, sugar)}"
        else:
            s = f"{_ty(t.dom, _APP, avoid, sugar)} -o {_ty(t.cod, _TENSOR, avoid, sugar)}"
        return _wrap(s, _TENSOR, prec)
    if isinstance(t, Tensor):
        s = f"{_ty(t.left, _APP, avoid, sugar)} * {_ty(t.right, _BANG, avoid, sugar)}"
        return _wrap(s, _APP, prec)
    if isinstance(t, Bang):
        return f"!{_ty(t.body, _ATOM, avoid, sugar)}"
    if isinstance(t, TyConst):
        if not t.args:
            return t.name
        inner = " ".join([t.name] + [_ty(a, _ATOM, avoid, sugar) for a in t.args])
        return f"({inner})"
    if isinstance(t, TyBound):
        raise ValueError("dangling type index while printing")
    return f"<?ty {t!r}>"


# Type levels reuse the term constants: binders 0, -o/-> at 1, * at 2,
# ! at 3, atoms at 4.


# ---------------------------------------------------------------------------
# Terms


def print_term(t: Term, sugar: bool = False) -> str:
    return _tm(t, 0, set(all_free_names(t)), sugar)


def _tm(t: Term, prec: int, avoid: set[str], sugar: bool) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Star):
        return "<>"
    if isinstance(t, Y):
        return "Y"
    if isinstance(t, LinLam):
        if sugar:
            folded = _try_lam_sugar(t, avoid, sugar)
            if folded is not None:
                return _wrap(folded, _BIND, prec)
        n = fresh(t.hint, avoid)
        body = instantiate_tm(t.body, Var(n))
        s = f"fn {n}:{_ty(t.ty, 0, avoid, sugar)}. {_tm(body, 0, avoid | {n}, sugar)}"
        return _wrap(s, _BIND, prec)
    if isinstance(t, TyLam):
        n = fresh(t.hint, avoid)
        body = instantiate_ty(t.body, TyVar(n))
        s = f"/\\{n}. {_tm(body, 0, avoid | {n}, sugar)}"
        return _wrap(s, _BIND, prec)
    if isinstance(t, App):
        s = f"{_tm(t.fn, _APP, avoid, sugar)} {_tm(t.arg, _BANG, avoid, sugar)}"
        return _wrap(s, _APP, prec)
    if isinstance(t, TyApp):
        s = f"{_tm(t.fn, _APP, avoid, sugar)} [{_ty(t.ty, 0, avoid, sugar)}]"
        return _wrap(s, _APP, prec)
    if isinstance(t, TensorPair):
        s = f"{_tm(t.left, _TENSOR, avoid, sugar)} (*) {_tm(t.right, _APP, avoid, sugar)}"
        return _wrap(s, _TENSOR, prec)
    if isinstance(t, BangIntro):
        return f"!{_tm(t.body, _ATOM, avoid, sugar)}"
    if isinstance(t, LetStar):
        s = (f"let <> = {_tm(t.scrut, 0, avoid, sugar)} in "
             f"{_tm(t.body, 0, avoid, sugar)}")
        return _wrap(s, _BIND, prec)
    if isinstance(t, LetTensor):
        x = fresh(t.hintx, avoid)
        y = fresh(t.hinty, avoid | {x})
        body = instantiate_tm(t.body, Var(x), Var(y))
        ann = ""
        if t.tyx is not None and t.tyy is not None:
            ann = f" : {_ty(Tensor(t.tyx, t.tyy), 0, avoid, sugar)}"
        s = (f"let {x} (*) {y}{ann} = {_tm(t.scrut, 0, avoid, sugar)} in "
             f"{_tm(body, 0, avoid | {x, y}, sugar)}")
        return _wrap(s, _BIND, prec)
    if isinstance(t, LetBang):
        x = fresh(t.hint, avoid)
        body = instantiate_tm(t.body, Var(x))
        ann = f" : {_ty(t.ty, 0, avoid, sugar)}" if t.ty is not None else ""
        s = (f"let !{x}{ann} = {_tm(t.scrut, 0, avoid, sugar)} in "
             f"{_tm(body, 0, avoid | {x}, sugar)}")
        return _wrap(s, _BIND, prec)
    if isinstance(t, Bound):
        raise ValueError("dangling index while printing")
    return f"<?tm {t!r}>"


def _try_lam_sugar(t: LinLam, avoid: set[str], sugar: bool) -> str | None:
    """Fold fn y:!s. let !x = y in b (y unused in b) into lam x:s. b."""
    if not isinstance(t.ty, Bang):
        return None
    inner = t.body
    if not (isinstance(inner, LetBang) and inner.scrut == Bound(0)):
        return None
    if inner.ty is not None and inner.ty != t.ty.body:
        return None
    if uses_bound_tm(inner.body, 1):
        return None
    x = fresh(inner.hint, avoid)
    body = instantiate_tm(inner.body, Var(x))
    body = shift(body, tm_by=-1)
    return f"lam {x}:{_ty(t.ty.body, 0, avoid, sugar)}. {_tm(body, 0, avoid | {x}, sugar)}"


# ---------------------------------------------------------------------------
# Relations


def print_rel(r: Relation, sugar: bool = False) -> str:
    return _rel(r, set(all_free_names(r)), sugar, atom=False)


def _rel(r: Relation, avoid: set[str], sugar: bool, atom: bool) -> str:
    if isinstance(r, RelVar):
        return r.name
    if isinstance(r, Compr):
        x = fresh(r.hintx, avoid)
        y = fresh(r.hinty, avoid | {x})
        body = instantiate_tm(r.body, Var(x), Var(y))
        s = (f"({x}:{_ty(r.tyx, 0, avoid, sugar)}, {y}:{_ty(r.tyy, 0, avoid, sugar)})."
             f" {_prop(body, 0, avoid | {x, y}, sugar)}")
        return f"({s})" if atom else s
    if isinstance(r, TypeRel):
        names = []
        av = set(avoid)
        for h in r.hints:
            n = fresh(h, av)
            av.add(n)
            names.append(n)
        body = instantiate_ty(r.body, *[TyVar(n) for n in names])
        args = ", ".join(_rel(a, avoid, sugar, atom=False) for a in r.args)
        return f"{_ty(body, _APP, av, sugar)}[{args}]"
    return f"<?rel {r!r}>"


# ---------------------------------------------------------------------------
# Propositions

_PBIND, _PIMP, _POR, _PAND, _PATOM = 0, 1, 2, 3, 4


def print_prop(p: Proposition, sugar: bool = False) -> str:
    return _prop(p, 0, set(all_free_names(p)), sugar)


def _prop(p: Proposition, prec: int, avoid: set[str], sugar: bool) -> str:
    if isinstance(p, Top):
        return "T"
    if isinstance(p, Bottom):
        return "F"
    if isinstance(p, InternalEq):
        s = (f"{_tm(p.lhs, _TENSOR, avoid, sugar)} =_{{{_ty(p.ty, 0, avoid, sugar)}}} "
             f"{_tm(p.rhs, _TENSOR, avoid, sugar)}")
        return _wrap(s, _PATOM, prec)
    if isinstance(p, RelApp):
        rel = _rel(p.rel, avoid, sugar, atom=True)
        return (f"{rel}({_tm(p.lhs, 0, avoid, sugar)}, "
                f"{_tm(p.rhs, 0, avoid, sugar)})")
    if isinstance(p, Implies):
        s = (f"{_prop(p.left, _POR, avoid, sugar)} => "
             f"{_prop(p.right, _PIMP, avoid, sugar)}")
        return _wrap(s, _PIMP, prec)
    if isinstance(p, Or):
        s = (f"{_prop(p.left, _POR, avoid, sugar)} \\/ "
             f"{_prop(p.right, _PAND, avoid, sugar)}")
        return _wrap(s, _POR, prec)
    if isinstance(p, And):
        s = (f"{_prop(p.left, _PAND, avoid, sugar)} /\\ "
             f"{_prop(p.right, _PATOM, avoid, sugar)}")
        return _wrap(s, _PAND, prec)
    if isinstance(p, (ForallTy, ExistsTy)):
        kw = "all" if isinstance(p, ForallTy) else "ex"
        n = fresh(p.hint, avoid)
        body = instantiate_ty(p.body, TyVar(n))
        s = f"{kw} {n}. {_prop(body, 0, avoid | {n}, sugar)}"
        return _wrap(s, _PBIND, prec)
    if isinstance(p, (ForallTm, ExistsTm)):
        kw = "all" if isinstance(p, ForallTm) else "ex"
        n = fresh(p.hint, avoid)
        body = instantiate_tm(p.body, Var(n))
        s = f"{kw} {n}:{_ty(p.ty, 0, avoid, sugar)}. {_prop(body, 0, avoid | {n}, sugar)}"
        return _wrap(s, _PBIND, prec)
    if isinstance(p, (ForallRel, ExistsRel)):
        kw = "all" if isinstance(p, ForallRel) else "ex"
        n = fresh(p.hint, avoid)
        body = instantiate_rel(p.body, RelVar(n, p.dom, p.cod, p.flavor))
        s = (f"{kw} {n} : {p.flavor.value}({_ty(p.dom, 0, avoid, sugar)}, "
             f"{_ty(p.cod, 0, avoid, sugar)}). {_prop(body, 0, avoid | {n}, sugar)}")
        return _wrap(s, _PBIND, prec)
    return f"<?prop {p!r}>"


def pp(n: Node, sugar: bool = False) -> str:
    if isinstance(n, Type):
        return print_type(n, sugar)
    if isinstance(n, Term):
        return print_term(n, sugar)
    if isinstance(n, Relation):
        return print_rel(n, sugar)
    return print_prop(n, sugar)
