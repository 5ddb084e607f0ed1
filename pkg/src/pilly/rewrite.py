"""Directed, fuel-bounded rewriting and the equality decision procedure.

One deterministic strategy: at each node in pre-order, try a beta step,
then an eta contraction, then hoisting a let-form out of one of the
node's linear child positions; otherwise recurse left to right.  Let
hoisting never crosses a binder or a '!', so no scope side conditions
arise.  Unrolling the fixed-point combinator is a separate operation
that `equal` may spend an explicit budget on; `normalize` never unrolls.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (App, BangIntro, Bound, LetBang, LetStar, LetTensor,
                     LinLam, Star, TensorPair, Term, TyApp, TyBound, TyLam, Y,
                     instantiate_tm, instantiate_ty, shift, uses_bound_tm,
                     uses_bound_ty)


@dataclass
class RewriteConfig:
    fuel: int = 10000
    y_unroll: int = 0
    eta: bool = True

    def __post_init__(self):
        if self.fuel <= 0:
            raise ValueError("fuel must be positive")


class FuelExhausted(Exception):
    def __init__(self, term: Term, steps: int):
        super().__init__(f"no normal form within {steps} steps")
        self.term = term
        self.steps = steps


class NoYRedex(Exception):
    pass


@dataclass(frozen=True)
class Equal:
    witness: Term


@dataclass(frozen=True)
class NotEqual:
    lhs_nf: Term
    rhs_nf: Term


@dataclass(frozen=True)
class Unknown:
    reason: str  # "fuel" or "yBudget"


EqResult = Equal | NotEqual | Unknown


def _beta(t: Term) -> Term | None:
    if isinstance(t, App) and isinstance(t.fn, LinLam):
        return instantiate_tm(t.fn.body, t.arg)
    if isinstance(t, TyApp) and isinstance(t.fn, TyLam):
        return instantiate_ty(t.fn.body, t.ty)
    if isinstance(t, LetStar) and isinstance(t.scrut, Star):
        return t.body
    if isinstance(t, LetTensor) and isinstance(t.scrut, TensorPair):
        return instantiate_tm(t.body, t.scrut.left, t.scrut.right)
    if isinstance(t, LetBang) and isinstance(t.scrut, BangIntro):
        return instantiate_tm(t.body, t.scrut.body)
    return None


def _eta(t: Term) -> Term | None:
    if (isinstance(t, LinLam) and isinstance(t.body, App)
            and t.body.arg == Bound(0) and not uses_bound_tm(t.body.fn)):
        return shift(t.body.fn, tm_by=-1)
    if (isinstance(t, TyLam) and isinstance(t.body, TyApp)
            and t.body.ty == TyBound(0) and not uses_bound_ty(t.body.fn)):
        return shift(t.body.fn, ty_by=-1)
    if isinstance(t, LetStar) and isinstance(t.body, Star):
        return t.scrut
    if (isinstance(t, LetTensor)
            and t.body == TensorPair(Bound(1), Bound(0))):
        return t.scrut
    if isinstance(t, LetBang) and t.body == BangIntro(Bound(0)):
        return t.scrut
    return None


def _rewrap_let(let_: Term, new_inner: Term) -> Term:
    """Rebuild the hoisted let with `new_inner` as its body."""
    if isinstance(let_, LetStar):
        return LetStar(let_.scrut, new_inner)
    if isinstance(let_, LetTensor):
        return LetTensor(let_.hintx, let_.hinty, let_.tyx, let_.tyy,
                         let_.scrut, new_inner)
    return LetBang(let_.hint, let_.ty, let_.scrut, new_inner)


def _let_binders(t: Term) -> int:
    if isinstance(t, LetStar):
        return 0
    if isinstance(t, LetTensor):
        return 2
    return 1


_LETS = (LetStar, LetTensor, LetBang)


def _hoist(t: Term) -> Term | None:
    """Pull a let-form out of a linear, binder-free child position."""
    if isinstance(t, App):
        if isinstance(t.fn, _LETS):
            k = _let_binders(t.fn)
            return _rewrap_let(t.fn, App(t.fn.body, shift(t.arg, tm_by=k)))
        if isinstance(t.arg, _LETS):
            k = _let_binders(t.arg)
            return _rewrap_let(t.arg, App(shift(t.fn, tm_by=k), t.arg.body))
        return None
    if isinstance(t, TyApp) and isinstance(t.fn, _LETS):
        return _rewrap_let(t.fn, TyApp(t.fn.body, t.ty))
    if isinstance(t, TensorPair):
        if isinstance(t.left, _LETS):
            k = _let_binders(t.left)
            return _rewrap_let(
                t.left, TensorPair(t.left.body, shift(t.right, tm_by=k)))
        if isinstance(t.right, _LETS):
            k = _let_binders(t.right)
            return _rewrap_let(
                t.right, TensorPair(shift(t.left, tm_by=k), t.right.body))
        return None
    if isinstance(t, LetStar) and isinstance(t.scrut, _LETS):
        k = _let_binders(t.scrut)
        return _rewrap_let(
            t.scrut, LetStar(t.scrut.body, shift(t.body, tm_by=k)))
    if isinstance(t, LetTensor) and isinstance(t.scrut, _LETS):
        k = _let_binders(t.scrut)
        inner = LetTensor(t.hintx, t.hinty, t.tyx, t.tyy, t.scrut.body,
                          shift(t.body, tm_by=k, md=2))
        return _rewrap_let(t.scrut, inner)
    if isinstance(t, LetBang) and isinstance(t.scrut, _LETS):
        k = _let_binders(t.scrut)
        inner = LetBang(t.hint, t.ty, t.scrut.body,
                        shift(t.body, tm_by=k, md=1))
        return _rewrap_let(t.scrut, inner)
    return None


def step(t: Term, eta: bool = True) -> Term | None:
    """One leftmost-outermost rewrite step, or None if t is normal."""
    r = _beta(t)
    if r is not None:
        return r
    if eta:
        r = _eta(t)
        if r is not None:
            return r
    r = _hoist(t)
    if r is not None:
        return r
    if isinstance(t, LinLam):
        b = step(t.body, eta)
        return None if b is None else LinLam(t.hint, t.ty, b, t.span)
    if isinstance(t, App):
        f = step(t.fn, eta)
        if f is not None:
            return App(f, t.arg)
        a = step(t.arg, eta)
        return None if a is None else App(t.fn, a)
    if isinstance(t, TensorPair):
        l = step(t.left, eta)
        if l is not None:
            return TensorPair(l, t.right)
        r2 = step(t.right, eta)
        return None if r2 is None else TensorPair(t.left, r2)
    if isinstance(t, BangIntro):
        b = step(t.body, eta)
        return None if b is None else BangIntro(b)
    if isinstance(t, TyLam):
        b = step(t.body, eta)
        return None if b is None else TyLam(t.hint, b, t.span)
    if isinstance(t, TyApp):
        f = step(t.fn, eta)
        return None if f is None else TyApp(f, t.ty)
    if isinstance(t, LetStar):
        s = step(t.scrut, eta)
        if s is not None:
            return LetStar(s, t.body)
        b = step(t.body, eta)
        return None if b is None else LetStar(t.scrut, b)
    if isinstance(t, LetTensor):
        s = step(t.scrut, eta)
        if s is not None:
            return LetTensor(t.hintx, t.hinty, t.tyx, t.tyy, s, t.body)
        b = step(t.body, eta)
        if b is None:
            return None
        return LetTensor(t.hintx, t.hinty, t.tyx, t.tyy, t.scrut, b)
    if isinstance(t, LetBang):
        s = step(t.scrut, eta)
        if s is not None:
            return LetBang(t.hint, t.ty, s, t.body)
        b = step(t.body, eta)
        return None if b is None else LetBang(t.hint, t.ty, t.scrut, b)
    return None


def normalize(t: Term, cfg: RewriteConfig | None = None) -> Term:
    cfg = cfg or RewriteConfig()
    for i in range(cfg.fuel):
        nxt = step(t, cfg.eta)
        if nxt is None:
            return t
        t = nxt
    if step(t, cfg.eta) is None:
        return t
    raise FuelExhausted(t, cfg.fuel)


def _is_y_redex(t: Term) -> bool:
    return (isinstance(t, App) and isinstance(t.fn, TyApp)
            and isinstance(t.fn.fn, Y) and isinstance(t.arg, BangIntro))


def unroll_y(t: Term) -> Term:
    """Unfold one outermost `Y [s] (!f)` to `f !(Y [s] (!f))`."""

    def go(x: Term) -> Term | None:
        if _is_y_redex(x):
            return App(x.arg.body, BangIntro(x))
        if isinstance(x, LinLam):
            b = go(x.body)
            return None if b is None else LinLam(x.hint, x.ty, b)
        if isinstance(x, App):
            f = go(x.fn)
            if f is not None:
                return App(f, x.arg)
            a = go(x.arg)
            return None if a is None else App(x.fn, a)
        if isinstance(x, TensorPair):
            l = go(x.left)
            if l is not None:
                return TensorPair(l, x.right)
            r = go(x.right)
            return None if r is None else TensorPair(x.left, r)
        if isinstance(x, BangIntro):
            b = go(x.body)
            return None if b is None else BangIntro(b)
        if isinstance(x, TyLam):
            b = go(x.body)
            return None if b is None else TyLam(x.hint, b)
        if isinstance(x, TyApp):
            f = go(x.fn)
            return None if f is None else TyApp(f, x.ty)
        if isinstance(x, LetStar):
            s = go(x.scrut)
            if s is not None:
                return LetStar(s, x.body)
            b = go(x.body)
            return None if b is None else LetStar(x.scrut, b)
        if isinstance(x, LetTensor):
            s = go(x.scrut)
            if s is not None:
                return LetTensor(x.hintx, x.hinty, x.tyx, x.tyy, s, x.body)
            b = go(x.body)
            if b is None:
                return None
            return LetTensor(x.hintx, x.hinty, x.tyx, x.tyy, x.scrut, b)
        if isinstance(x, LetBang):
            s = go(x.scrut)
            if s is not None:
                return LetBang(x.hint, x.ty, s, x.body)
            b = go(x.body)
            return None if b is None else LetBang(x.hint, x.ty, x.scrut, b)
        return None

    out = go(t)
    if out is None:
        raise NoYRedex("no Y redex to unroll")
    return out


def _contains_y(t: Term) -> bool:
    if isinstance(t, Y):
        return True
    if isinstance(t, (LinLam, BangIntro, TyLam)):
        return _contains_y(t.body)
    if isinstance(t, App):
        return _contains_y(t.fn) or _contains_y(t.arg)
    if isinstance(t, TensorPair):
        return _contains_y(t.left) or _contains_y(t.right)
    if isinstance(t, TyApp):
        return _contains_y(t.fn)
    if isinstance(t, (LetStar, LetTensor, LetBang)):
        return _contains_y(t.scrut) or _contains_y(t.body)
    return False


def _has_y_redex(t: Term) -> bool:
    if _is_y_redex(t):
        return True
    if isinstance(t, (LinLam, BangIntro, TyLam)):
        return _has_y_redex(t.body)
    if isinstance(t, App):
        return _has_y_redex(t.fn) or _has_y_redex(t.arg)
    if isinstance(t, TensorPair):
        return _has_y_redex(t.left) or _has_y_redex(t.right)
    if isinstance(t, TyApp):
        return _has_y_redex(t.fn)
    if isinstance(t, (LetStar, LetTensor, LetBang)):
        return _has_y_redex(t.scrut) or _has_y_redex(t.body)
    return False


def equal(a: Term, b: Term, cfg: RewriteConfig | None = None,
          ctx=None) -> EqResult:
    """Normalize-and-compare, with an optional unrolling budget.

    Equal only when the two sides reach alpha-equal normal forms within
    the budgets; NotEqual only when both normal forms are free of the
    fixed-point combinator; Unknown otherwise.
    """
    cfg = cfg or RewriteConfig()
    if ctx is not None:
        from .typecheck import infer_type
        tya = infer_type(ctx, a).ty
        tyb = infer_type(ctx, b).ty
        if tya != tyb:
            from .pretty import print_type
            from .typecheck import MISMATCH, TypeCheckError
            raise TypeCheckError(
                MISMATCH, "equality query between terms of different types: "
                f"{print_type(tya)} vs {print_type(tyb)}",
                expected=tya, found=tyb)
    try:
        nfa = [normalize(a, cfg)]
        nfb = [normalize(b, cfg)]
    except FuelExhausted:
        return Unknown("fuel")
    if nfa[0] == nfb[0]:
        return Equal(nfa[0])
    try:
        for _ in range(cfg.y_unroll):
            grew = False
            if _has_y_redex(nfa[-1]):
                nfa.append(normalize(unroll_y(nfa[-1]), cfg))
                grew = True
            if _has_y_redex(nfb[-1]):
                nfb.append(normalize(unroll_y(nfb[-1]), cfg))
                grew = True
            if not grew:
                break
            if any(x == y for x in nfa for y in nfb):
                wit = next(x for x in nfa for y in nfb if x == y)
                return Equal(wit)
    except FuelExhausted:
        return Unknown("fuel")
    if _contains_y(nfa[-1]) or _contains_y(nfb[-1]):
        return Unknown("yBudget")
    return NotEqual(nfa[-1], nfb[-1])
