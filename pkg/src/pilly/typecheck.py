"""Kind checking and type inference with a dual context.

Linear splitting uses leftover threading: inference of a subterm returns
the set of linear variables it consumed, and each node with several
subterms checks the consumed sets are disjoint.  The rules for <>, Y and
!t demand an empty linear context; under leftover threading that becomes
"consumes nothing", enforced at those nodes.  The root additionally
requires that the full linear context was consumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import syntax as S
from .pretty import print_term, print_type
from .syntax import Span, TermContext, Type

UNBOUND = "UnboundVariable"
LINEAR_UNUSED = "LinearVariableUnused"
LINEAR_REUSED = "LinearVariableReused"
LINEAR_IN_BANG = "LinearInBangBody"
MISMATCH = "TypeMismatch"
NOT_A_FUNCTION = "NotAFunction"
NOT_A_FORALL = "NotAForall"
ILL_KINDED = "IllKinded"
CONTEXT_ILL_FORMED = "ContextIllFormed"


class TypeCheckError(Exception):
    def __init__(self, kind: str, message: str, span: Optional[Span] = None,
                 expected: Optional[Type] = None, found: Optional[Type] = None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message
        self.span = span
        self.expected = expected
        self.found = found


@dataclass
class TypingResult:
    ty: Type
    usage: dict[str, int]
    term: S.Term  # elaborated: let-pattern annotations filled in


def kind_check(xi: tuple[str, ...] | list[str], ty: Type) -> None:
    """A type is well kinded iff all its free variables are in xi."""
    for name in S.free_type_names(ty):
        if name not in xi:
            raise TypeCheckError(
                UNBOUND, f"type variable {name!r} is not in scope",
                getattr(ty, "span", None))


def validate_context(ctx: TermContext) -> None:
    names: set[str] = set()
    for group in (ctx.gamma, ctx.delta):
        for n in group:
            if n in names:
                raise TypeCheckError(
                    CONTEXT_ILL_FORMED, f"repeated variable {n!r} in context")
            names.add(n)
    for group in (ctx.gamma, ctx.delta):
        for n, ty in group.items():
            try:
                kind_check(ctx.xi, ty)
            except TypeCheckError as e:
                raise TypeCheckError(
                    CONTEXT_ILL_FORMED,
                    f"type of {n!r} is not well kinded: {e.message}") from e


class _Inferencer:
    def __init__(self, ctx: TermContext, seed: int = 0):
        self.xi = list(ctx.xi)
        self.gamma = dict(ctx.gamma)
        self.delta = dict(ctx.delta)
        self.salt = seed
        self.counter = 0

    def fresh(self, hint: str) -> str:
        self.counter += 1
        return f"{hint}#{self.salt}.{self.counter}"

    def infer(self, t: S.Term) -> tuple[Type, dict[str, None], S.Term]:
        if isinstance(t, S.Var):
            if t.name in self.delta:
                return self.delta[t.name], {t.name: None}, t
            if t.name in self.gamma:
                return self.gamma[t.name], {}, t
            raise TypeCheckError(UNBOUND, f"variable {t.name!r} is not in scope",
                                 t.span)
        if isinstance(t, S.Star):
            return S.Unit(), {}, t
        if isinstance(t, S.Y):
            return S.y_type(), {}, t
        if isinstance(t, S.LinLam):
            kind_check(self.xi, t.ty)
            x = self.fresh(t.hint)
            body = S.instantiate_tm(t.body, S.Var(x))
            self.delta[x] = t.ty
            bty, used, belab = self.infer(body)
            del self.delta[x]
            if x not in used:
                raise TypeCheckError(
                    LINEAR_UNUSED,
                    f"linear variable {t.hint!r} is not used by the body",
                    t.span)
            used = {n: None for n in used if n != x}
            elab = S.LinLam(t.hint, t.ty, S.close_tm(belab, x), t.span)
            return S.Lolli(t.ty, bty), used, elab
        if isinstance(t, S.App):
            fty, fused, felab = self.infer(t.fn)
            if not isinstance(fty, S.Lolli):
                raise TypeCheckError(
                    NOT_A_FUNCTION,
                    f"application head has type {print_type(fty)}",
                    t.span, found=fty)
            aty, aused, aelab = self.infer(t.arg)
            used = self._join(fused, aused, t.span)
            if aty != fty.dom:
                raise TypeCheckError(
                    MISMATCH,
                    f"argument has type {print_type(aty)}, expected "
                    f"{print_type(fty.dom)}", t.span,
                    expected=fty.dom, found=aty)
            return fty.cod, used, S.App(felab, aelab, t.span)
        if isinstance(t, S.TensorPair):
            lty, lused, lelab = self.infer(t.left)
            rty, rused, relab = self.infer(t.right)
            used = self._join(lused, rused, t.span)
            return S.Tensor(lty, rty), used, S.TensorPair(lelab, relab, t.span)
        if isinstance(t, S.BangIntro):
            bty, used, belab = self.infer(t.body)
            if used:
                names = ", ".join(used)
                raise TypeCheckError(
                    LINEAR_IN_BANG,
                    f"linear variable(s) {names} consumed under '!'", t.span)
            return S.Bang(bty), {}, S.BangIntro(belab, t.span)
        if isinstance(t, S.TyLam):
            a = self.fresh(t.hint)
            body = S.instantiate_ty(t.body, S.TyVar(a))
            self.xi.append(a)
            bty, used, belab = self.infer(body)
            self.xi.pop()
            elab = S.TyLam(t.hint, S.close_ty(belab, a), t.span)
            return S.Forall(t.hint, S.close_ty(bty, a)), used, elab
        if isinstance(t, S.TyApp):
            fty, used, felab = self.infer(t.fn)
            if not isinstance(fty, S.Forall):
                raise TypeCheckError(
                    NOT_A_FORALL,
                    f"type application head has type {print_type(fty)}",
                    t.span, found=fty)
            kind_check(self.xi, t.ty)
            return (S.instantiate_ty(fty.body, t.ty), used,
                    S.TyApp(felab, t.ty, t.span))
        if isinstance(t, S.LetStar):
            sty, sused, selab = self.infer(t.scrut)
            if not isinstance(sty, S.Unit):
                raise TypeCheckError(
                    MISMATCH, f"let <> scrutinee has type {print_type(sty)}, "
                    "expected I", t.span, expected=S.Unit(), found=sty)
            bty, bused, belab = self.infer(t.body)
            used = self._join(sused, bused, t.span)
            return bty, used, S.LetStar(selab, belab, t.span)
        if isinstance(t, S.LetTensor):
            sty, sused, selab = self.infer(t.scrut)
            if not isinstance(sty, S.Tensor):
                raise TypeCheckError(
                    MISMATCH, f"tensor pattern scrutinee has type "
                    f"{print_type(sty)}", t.span, found=sty)
            for ann, actual, which in ((t.tyx, sty.left, t.hintx),
                                       (t.tyy, sty.right, t.hinty)):
                if ann is not None and ann != actual:
                    raise TypeCheckError(
                        MISMATCH,
                        f"pattern annotation on {which!r} is "
                        f"{print_type(ann)}, scrutinee component is "
                        f"{print_type(actual)}", t.span,
                        expected=actual, found=ann)
            x = self.fresh(t.hintx)
            y = self.fresh(t.hinty)
            body = S.instantiate_tm(t.body, S.Var(x), S.Var(y))
            self.delta[x] = sty.left
            self.delta[y] = sty.right
            bty, bused, belab = self.infer(body)
            del self.delta[x], self.delta[y]
            for n, hint in ((x, t.hintx), (y, t.hinty)):
                if n not in bused:
                    raise TypeCheckError(
                        LINEAR_UNUSED,
                        f"linear pattern variable {hint!r} is not used",
                        t.span)
            bused = {n: None for n in bused if n not in (x, y)}
            used = self._join(sused, bused, t.span)
            elab = S.LetTensor(t.hintx, t.hinty, sty.left, sty.right, selab,
                               S.close_tm(belab, x, y), t.span)
            return bty, used, elab
        if isinstance(t, S.LetBang):
            sty, sused, selab = self.infer(t.scrut)
            if not isinstance(sty, S.Bang):
                raise TypeCheckError(
                    MISMATCH, f"let ! scrutinee has type {print_type(sty)}, "
                    "expected a !-type", t.span, found=sty)
            if t.ty is not None and t.ty != sty.body:
                raise TypeCheckError(
                    MISMATCH, f"pattern annotation is {print_type(t.ty)}, "
                    f"scrutinee carries {print_type(sty.body)}", t.span,
                    expected=sty.body, found=t.ty)
            x = self.fresh(t.hint)
            body = S.instantiate_tm(t.body, S.Var(x))
            self.gamma[x] = sty.body
            bty, bused, belab = self.infer(body)
            del self.gamma[x]
            used = self._join(sused, bused, t.span)
            elab = S.LetBang(t.hint, sty.body, selab, S.close_tm(belab, x),
                             t.span)
            return bty, used, elab
        if isinstance(t, S.Bound):
            raise TypeCheckError(UNBOUND, "dangling bound variable", None)
        raise TypeCheckError(ILL_KINDED, f"unrecognized term node {t!r}")

    @staticmethod
    def _join(a: dict[str, None], b: dict[str, None],
              span: Optional[Span]) -> dict[str, None]:
        overlap = [n for n in b if n in a]
        if overlap:
            names = ", ".join(overlap)
            raise TypeCheckError(
                LINEAR_REUSED, f"linear variable(s) {names} consumed twice",
                span)
        out = dict(a)
        out.update(b)
        return out


def infer_type(ctx: TermContext, t: S.Term, seed: int = 0) -> TypingResult:
    """Infer the unique type of a term, enforcing full linear consumption."""
    validate_context(ctx)
    inf = _Inferencer(ctx, seed)
    ty, used, elab = inf.infer(t)
    leftover = [n for n in ctx.delta if n not in used]
    if leftover:
        names = ", ".join(leftover)
        raise TypeCheckError(
            LINEAR_UNUSED, f"linear variable(s) {names} not consumed",
            getattr(t, "span", None))
    return TypingResult(ty, {n: 1 for n in ctx.delta}, elab)


def check_type(ctx: TermContext, t: S.Term, expected: Type,
               seed: int = 0) -> TypingResult:
    kind_check(ctx.xi, expected)
    res = infer_type(ctx, t, seed)
    if res.ty != expected:
        raise TypeCheckError(
            MISMATCH, f"term has type {print_type(res.ty)}, expected "
            f"{print_type(expected)}", getattr(t, "span", None),
            expected=expected, found=res.ty)
    return res


class SubstitutionLemmaFailure(Exception):
    pass


def check_substitution_lemma(which: str, ctx: TermContext, t: S.Term,
                             x: str, u: S.Term,
                             ctx_u: TermContext | None = None,
                             rep_ty: Type | None = None) -> TypingResult:
    """Re-derive the conclusion of one of the three substitution rules.

    which="linear":          x in ctx.delta, u typed under ctx_u
    which="intuitionistic":  x in ctx.gamma, u typed under (xi | gamma-x ; -)
    which="type":            x in ctx.xi, rep_ty well kinded under xi-x
    """
    if which == "linear":
        sigma = ctx.delta[x]
        base = TermContext(ctx.xi, dict(ctx.gamma),
                           {n: ty for n, ty in ctx.delta.items() if n != x})
        ctx_u = ctx_u or TermContext(ctx.xi, dict(ctx.gamma), {})
        tau = infer_type(ctx, t).ty
        u_res = infer_type(ctx_u, u)
        if u_res.ty != sigma:
            raise SubstitutionLemmaFailure(
                f"replacement has type {print_type(u_res.ty)}, wanted "
                f"{print_type(sigma)}")
        merged = TermContext(ctx.xi, dict(ctx.gamma),
                             {**base.delta, **ctx_u.delta})
        result = infer_type(merged, S.subst_term_in_term(t, x, u))
        want = tau
    elif which == "intuitionistic":
        sigma = ctx.gamma[x]
        gamma2 = {n: ty for n, ty in ctx.gamma.items() if n != x}
        tau = infer_type(ctx, t).ty
        u_res = infer_type(TermContext(ctx.xi, gamma2, {}), u)
        if u_res.ty != sigma:
            raise SubstitutionLemmaFailure(
                f"replacement has type {print_type(u_res.ty)}, wanted "
                f"{print_type(sigma)}")
        result = infer_type(TermContext(ctx.xi, gamma2, dict(ctx.delta)),
                            S.subst_term_in_term(t, x, u))
        want = tau
    elif which == "type":
        if rep_ty is None:
            raise ValueError("type substitution needs rep_ty")
        xi2 = tuple(n for n in ctx.xi if n != x)
        kind_check(xi2, rep_ty)
        tau = infer_type(ctx, t).ty
        ctx2 = TermContext(
            xi2,
            {n: S.subst_type_in_type(ty, x, rep_ty)
             for n, ty in ctx.gamma.items()},
            {n: S.subst_type_in_type(ty, x, rep_ty)
             for n, ty in ctx.delta.items()})
        result = infer_type(ctx2, S.subst_types(t, {x: rep_ty}))
        want = S.subst_type_in_type(tau, x, rep_ty)
    else:
        raise ValueError(f"unknown substitution rule {which!r}")
    if result.ty != want:
        raise SubstitutionLemmaFailure(
            f"{which}: substituted term has type {print_type(result.ty)}, "
            f"lemma predicts {print_type(want)} for {print_term(t)}")
    return result
