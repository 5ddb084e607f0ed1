"""A polymorphic linear lambda calculus with a fixed-point combinator:
type checker, fuel-bounded rewriter, datatype encodings and the
relational layer used to state parametricity facts."""

__version__ = "0.1.0"

from . import encodings, functor, parser, pretty, relations, rewrite, \
    syntax, typecheck  # noqa: F401
