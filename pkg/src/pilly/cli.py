"""Batch command-line driver.

Commands: check, normalize, equal, encode, admissible, schema.
Global flags: --fuel N, --y-unroll N, --json, --strict, --config PATH.
Exit codes: 0 ok, 1 directive failure, 2 usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import encodings as E
from . import parser as P
from . import relations as RL
from . import syntax as S
from .pretty import print_prop, print_term, print_type
from .rewrite import (Equal, FuelExhausted, NotEqual, RewriteConfig, Unknown,
                      equal, normalize)
from .relations import RelJudgement, derive_admissible
from .syntax import RelContext, TermContext
from .typecheck import TypeCheckError, infer_type


@dataclass
class ReportEntry:
    target: str
    kind: str
    status: str  # ok | error | unknown
    message: str = ""
    seconds: float = 0.0

    def to_json(self) -> str:
        return json.dumps({"target": self.target, "kind": self.kind,
                           "status": self.status, "message": self.message,
                           "seconds": round(self.seconds, 6)})

    def render(self) -> str:
        mark = {"ok": "ok", "error": "FAIL", "unknown": "unknown"}[self.status]
        msg = f" -- {self.message}" if self.message else ""
        return f"[{mark}] {self.kind} {self.target}{msg}"


@dataclass
class RunReport:
    entries: list[ReportEntry] = field(default_factory=list)

    def add(self, entry: ReportEntry) -> None:
        self.entries.append(entry)

    def exit_code(self, strict: bool) -> int:
        if any(e.status == "error" for e in self.entries):
            return 1
        if strict and any(e.status == "unknown" for e in self.entries):
            return 1
        return 0


@dataclass
class Config:
    fuel: int = 10000
    y_unroll: int = 0
    strict: bool = False
    json_out: bool = False
    catalog: str | None = None

    def rewrite(self) -> RewriteConfig:
        return RewriteConfig(fuel=self.fuel, y_unroll=self.y_unroll)


def load_config_file(path: Path) -> dict:
    """pilly.toml-style key/value text: ints, booleans and bare strings."""
    out: dict = {}
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        val = val.strip("\"'")
        if val.lower() in ("true", "false"):
            out[key] = val.lower() == "true"
        elif val.lstrip("-").isdigit():
            out[key] = int(val)
        else:
            out[key] = val
    return out


# ---------------------------------------------------------------------------
# File elaboration


def _locate(text: str, e: Exception) -> str:
    span = getattr(e, "span", None)
    if span is None:
        return str(e)
    line = text.count("\n", 0, span.start) + 1
    col = span.start - (text.rfind("\n", 0, span.start) + 1) + 1
    return f"{line}:{col}: {e}"


@dataclass
class Elaborated:
    sig: P.Signature
    term_types: dict[str, S.Type] = field(default_factory=dict)
    inlined: dict[str, S.Term] = field(default_factory=dict)
    rel_defs: dict[str, S.Relation] = field(default_factory=dict)
    theta: RelContext = field(default_factory=RelContext)
    directives: list[P.Directive] = field(default_factory=list)

    def ctx(self) -> TermContext:
        return TermContext(xi=(), gamma=dict(self.term_types), delta={})

    def inline(self, t: S.Term) -> S.Term:
        return S.subst_terms(t, self.inlined)


def elaborate_file(text: str, target: str, cfg: Config,
                   report: RunReport, run_directives: bool = True
                   ) -> Elaborated | None:
    src, diags = P.parse_file(text)
    for d in diags:
        report.add(ReportEntry(target, "parse", "error", d.render(text)))
    if diags:
        return None
    elab = Elaborated(src.signature)
    for decl in src.decls:
        t0 = time.perf_counter()
        try:
            if isinstance(decl, P.TypeDecl):
                from .typecheck import kind_check
                kind_check(decl.params, decl.body)
                report.add(ReportEntry(f"{target}:{decl.name}", "type", "ok",
                                       seconds=time.perf_counter() - t0))
            elif isinstance(decl, P.TermDecl):
                res = infer_type(elab.ctx(), decl.body)
                if decl.claimed is not None and res.ty != decl.claimed:
                    report.add(ReportEntry(
                        f"{target}:{decl.name}", "term", "error",
                        f"declared type {print_type(decl.claimed)} but "
                        f"inferred {print_type(res.ty)}",
                        time.perf_counter() - t0))
                    continue
                elab.term_types[decl.name] = res.ty
                elab.inlined[decl.name] = elab.inline(res.term)
                report.add(ReportEntry(
                    f"{target}:{decl.name}", "term", "ok",
                    f": {print_type(res.ty)}", time.perf_counter() - t0))
            elif isinstance(decl, P.RelDecl):
                if decl.body is None:
                    from .typecheck import kind_check
                    kind_check((), decl.dom)
                    kind_check((), decl.cod)
                    elab.theta.entries[decl.name] = (decl.dom, decl.cod,
                                                     decl.flavor)
                else:
                    dom, cod = RL.check_relation((), elab.term_types,
                                                 elab.theta, decl.body)
                    elab.rel_defs[decl.name] = decl.body
                report.add(ReportEntry(f"{target}:{decl.name}", "rel", "ok",
                                       seconds=time.perf_counter() - t0))
            elif isinstance(decl, P.Directive):
                elab.directives.append(decl)
                if run_directives:
                    run_directive(decl, elab, target, cfg, report)
        except (TypeCheckError, RL.FormationError, P.ParseError) as e:
            name = getattr(decl, "name", type(decl).__name__)
            report.add(ReportEntry(f"{target}:{name}", "decl", "error",
                                   _locate(text, e),
                                   time.perf_counter() - t0))
    return elab


def run_directive(d: P.Directive, elab: Elaborated, target: str, cfg: Config,
                  report: RunReport) -> None:
    t0 = time.perf_counter()
    label = f"{target}:#{d.name}"

    def done(status: str, message: str = "") -> None:
        report.add(ReportEntry(label, f"#{d.name}", status, message,
                               time.perf_counter() - t0))

    try:
        if d.name == "check":
            (term,) = d.payload
            res = infer_type(elab.ctx(), term)
            done("ok", f"{print_term(term)} : {print_type(res.ty)}")
        elif d.name == "normalize":
            (term,) = d.payload
            infer_type(elab.ctx(), term)
            try:
                nf = normalize(elab.inline(term), cfg.rewrite())
                done("ok", print_term(nf))
            except FuelExhausted:
                done("unknown", "fuel exhausted")
        elif d.name == "equal":
            lhs, rhs = d.payload
            r = equal(elab.inline(lhs), elab.inline(rhs), cfg.rewrite(),
                      ctx=TermContext())
            if isinstance(r, Equal):
                done("ok")
            elif isinstance(r, NotEqual):
                done("error", f"distinct normal forms: "
                     f"{print_term(r.lhs_nf)} vs {print_term(r.rhs_nf)}")
            else:
                done("unknown", r.reason)
        elif d.name == "admissible":
            (name,) = d.payload
            rel = elab.rel_defs.get(name)
            if rel is None:
                if name not in elab.theta.entries:
                    done("error", f"no relation named {name!r}")
                    return
                dom, cod, flavor = elab.theta.entries[name]
                rel = S.RelVar(name, dom, cod, flavor)
            j = RelJudgement((), dict(elab.term_types), elab.theta, rel)
            deriv = derive_admissible(j)
            if deriv is None:
                done("error", "NotDerivable")
            else:
                done("ok", "\n" + deriv.render(1))
        elif d.name == "schema":
            kind, payload = d.payload
            prop = build_schema(kind, payload, elab)
            done("ok", print_prop(prop))
        else:
            done("error", f"unknown directive {d.name!r}")
    except (TypeCheckError, RL.FormationError, RL.PurityError,
            P.ParseError) as e:
        done("error", str(e))


def build_schema(kind: str, payload, elab: Elaborated | None) -> S.Proposition:
    if kind == "identity-extension":
        prop = RL.identity_extension_instance(payload)
    elif kind == "parametricity":
        if not isinstance(payload, S.Forall):
            raise RL.FormationError(
                "parametricity instances need a quantified type")
        avoid = S.free_type_names(payload)
        var, body = S.open_forall(payload, avoid)
        prop = RL.parametricity_schema_instance(var, body)
    elif kind == "lrl":
        term = payload if elab is None else elab.inline(payload)
        prop = RL.lrl_statement(term)
    else:
        raise RL.FormationError(f"unknown schema kind {kind!r}")
    RL.check_prop((), {}, RelContext(), prop)
    return prop


# ---------------------------------------------------------------------------
# Commands


def cmd_check(args, cfg: Config) -> RunReport:
    report = RunReport()
    files = list(args.files)
    if not files:
        # no arguments: fall back to the configured or shipped catalog
        root = Path(cfg.catalog) if cfg.catalog else \
            Path(__file__).parent / "catalog"
        files = sorted(str(p) for p in root.glob("*.pilly"))
        if not files:
            report.add(ReportEntry(str(root), "check", "error",
                                   "no .pilly files found"))
            return report
    texts = []
    for f in files:
        texts.append((f, Path(f).read_text()))
    if len(texts) > 1:
        # files are independent; directives within a file stay sequential
        subreports = [RunReport() for _ in texts]

        def worker(i: int) -> None:
            f, text = texts[i]
            elaborate_file(text, f, cfg, subreports[i])

        with ThreadPoolExecutor(max_workers=min(8, len(texts))) as ex:
            list(ex.map(worker, range(len(texts))))
        for sub in subreports:
            report.entries.extend(sub.entries)
    else:
        for f, text in texts:
            elaborate_file(text, f, cfg, report)
    return report


def cmd_normalize(args, cfg: Config) -> RunReport:
    report = RunReport()
    elab = elaborate_file(Path(args.file).read_text(), args.file, cfg,
                          RunReport(), run_directives=False)
    t0 = time.perf_counter()
    if elab is None or args.name not in elab.inlined:
        report.add(ReportEntry(args.name, "normalize", "error",
                               f"no term named {args.name!r}"))
        return report
    try:
        nf = normalize(elab.inlined[args.name], cfg.rewrite())
        report.add(ReportEntry(args.name, "normalize", "ok", print_term(nf),
                               time.perf_counter() - t0))
    except FuelExhausted as e:
        report.add(ReportEntry(args.name, "normalize", "unknown",
                               f"fuel exhausted at {print_term(e.term)[:200]}",
                               time.perf_counter() - t0))
    return report


def cmd_equal(args, cfg: Config) -> RunReport:
    report = RunReport()
    elab = elaborate_file(Path(args.file).read_text(), args.file, cfg,
                          RunReport(), run_directives=False)
    t0 = time.perf_counter()
    label = f"{args.lhs} == {args.rhs}"
    if elab is None:
        report.add(ReportEntry(label, "equal", "error", "file did not parse"))
        return report
    try:
        lhs = P.parse_term(args.lhs, elab.sig)
        rhs = P.parse_term(args.rhs, elab.sig)
        for t in (lhs, rhs):
            infer_type(elab.ctx(), t)
        r = equal(elab.inline(lhs), elab.inline(rhs), cfg.rewrite(),
                  ctx=TermContext())
        if isinstance(r, Equal):
            report.add(ReportEntry(label, "equal", "ok",
                                   seconds=time.perf_counter() - t0))
        elif isinstance(r, NotEqual):
            report.add(ReportEntry(label, "equal", "error",
                                   "distinct normal forms",
                                   time.perf_counter() - t0))
        else:
            report.add(ReportEntry(label, "equal", "unknown", r.reason,
                                   time.perf_counter() - t0))
    except (TypeCheckError, P.ParseError) as e:
        report.add(ReportEntry(label, "equal", "error", str(e),
                               time.perf_counter() - t0))
    return report


def _encode_bundle(kind: str, type_args: list[str]) -> E.EncodingBundle:
    tys = [P.parse_encode_type(s) for s in type_args]
    if kind == "iso-self":
        return E.encode_iso_self(tys[0])
    if kind == "tensor":
        return E.encode_tensor(tys[0], tys[1])
    if kind == "unit":
        return E.encode_unit()
    if kind == "zero":
        return E.encode_zero()
    if kind == "one":
        return E.encode_one()
    if kind == "sum":
        return E.encode_sum(tys[0], tys[1])
    if kind == "product":
        return E.encode_product(tys[0], tys[1])
    if kind == "nat":
        return E.encode_nat()
    if kind == "exists":
        return E.encode_exists("a", tys[0])
    if kind == "mu":
        return E.encode_mu("a", tys[0])
    if kind == "nu":
        return E.encode_nu("a", tys[0])
    if kind == "rec":
        return E.encode_rec("a", tys[0])
    if kind == "rec-params":
        body = tys[0]
        neg, pos = [], []
        for v in S.free_type_names(body):
            if v == "a":
                continue
            pol = E.polarity(body, v)
            if pol.negative and pol.positive:
                raise ValueError(f"parameter {v!r} has mixed variance")
            (neg if pol.negative else pos).append(v)
        return E.encode_rec_params(neg, pos, "a", body)
    raise ValueError(f"unknown encoding kind {kind!r}")


def cmd_encode(args, cfg: Config) -> RunReport:
    report = RunReport()
    t0 = time.perf_counter()
    label = " ".join([args.kind] + args.types)
    try:
        bundle = _encode_bundle(args.kind, args.types)
        rep = E.verify_bundle(bundle, cfg.rewrite())
        bad = ([k for k, v in rep.combinators.items() if not v]
               + [k for k, v in rep.beta.items() if not isinstance(v, Equal)]
               + [k for k, v in rep.schemas.items() if not v])
        unknowns = [k for k, v in rep.beta.items() if isinstance(v, Unknown)]
        if rep.ok:
            status, msg = "ok", f"{len(bundle.combinators)} combinator(s), " \
                f"{len(bundle.beta_laws)} law(s), " \
                f"{len(bundle.schema_laws)} schema(s)"
        elif bad == unknowns and bad:
            status, msg = "unknown", f"undecided laws: {', '.join(unknowns)}"
        else:
            status, msg = "error", f"failed: {', '.join(bad)}"
        if args.emit_bundle:
            Path(args.emit_bundle).write_text(E.bundle_to_source(bundle))
            msg += f"; wrote {args.emit_bundle}"
        report.add(ReportEntry(label, "encode", status, msg,
                               time.perf_counter() - t0))
    except (E.PolarityViolation, ValueError, P.ParseError, IndexError) as e:
        report.add(ReportEntry(label, "encode", "error", str(e),
                               time.perf_counter() - t0))
    return report


def cmd_admissible(args, cfg: Config) -> RunReport:
    report = RunReport()
    elab = elaborate_file(Path(args.file).read_text(), args.file, cfg,
                          RunReport(), run_directives=False)
    if elab is None:
        report.add(ReportEntry(args.name, "admissible", "error",
                               "file did not parse"))
        return report
    d = P.Directive("admissible", (args.name,), S.Span(0, 0))
    run_directive(d, elab, args.file, cfg, report)
    return report


def cmd_schema(args, cfg: Config) -> RunReport:
    report = RunReport()
    t0 = time.perf_counter()
    label = f"{args.kind} {args.target}"
    try:
        elab = None
        if args.file:
            elab = elaborate_file(Path(args.file).read_text(), args.file, cfg,
                                  RunReport(), run_directives=False)
        sig = elab.sig if elab else None
        if args.kind == "lrl":
            payload = P.parse_term(args.target, sig)
        else:
            payload = P.parse_type(args.target, sig)
        prop = build_schema(args.kind, payload, elab)
        report.add(ReportEntry(label, "schema", "ok", print_prop(prop),
                               time.perf_counter() - t0))
    except (TypeCheckError, RL.FormationError, RL.PurityError, P.ParseError,
            ValueError) as e:
        report.add(ReportEntry(label, "schema", "error", str(e),
                               time.perf_counter() - t0))
    return report


# ---------------------------------------------------------------------------
# Entry point


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pilly",
        description="check, normalize and reason about .pilly files")
    ap.add_argument("--fuel", type=int, default=None)
    ap.add_argument("--y-unroll", type=int, default=None)
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--strict", action="store_true",
                    help="treat unknown outcomes as failures")
    ap.add_argument("--config", type=str, default=None)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="typecheck files and run directives")
    c.add_argument("files", nargs="*",
                   help="defaults to the configured or shipped catalog")

    n = sub.add_parser("normalize", help="normalize a declared term")
    n.add_argument("file")
    n.add_argument("name")

    e = sub.add_parser("equal", help="decide equality of two expressions")
    e.add_argument("file")
    e.add_argument("lhs")
    e.add_argument("rhs")

    en = sub.add_parser("encode", help="generate and verify an encoding")
    en.add_argument("kind")
    en.add_argument("types", nargs="*")
    en.add_argument("--emit-bundle", type=str, default=None)

    ad = sub.add_parser("admissible", help="derive admissibility")
    ad.add_argument("file")
    ad.add_argument("name")

    sc = sub.add_parser("schema", help="emit a schema instance")
    sc.add_argument("kind",
                    choices=["identity-extension", "parametricity", "lrl"])
    sc.add_argument("target")
    sc.add_argument("--file", type=str, default=None)
    return ap


_COMMANDS = {
    "check": cmd_check,
    "normalize": cmd_normalize,
    "equal": cmd_equal,
    "encode": cmd_encode,
    "admissible": cmd_admissible,
    "schema": cmd_schema,
}


def main(argv: list[str] | None = None) -> int:
    ap = build_arg_parser()
    args = ap.parse_args(argv)
    cfg = Config()
    config_path = Path(args.config) if args.config else Path("pilly.toml")
    if config_path.exists():
        try:
            file_cfg = load_config_file(config_path)
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        cfg.fuel = int(file_cfg.get("fuel", cfg.fuel))
        cfg.y_unroll = int(file_cfg.get("y_unroll", cfg.y_unroll))
        cfg.strict = bool(file_cfg.get("strict", cfg.strict))
        cfg.catalog = file_cfg.get("catalog", cfg.catalog)
    if args.fuel is not None:
        cfg.fuel = args.fuel
    if args.y_unroll is not None:
        cfg.y_unroll = args.y_unroll
    if args.strict:
        cfg.strict = True
    cfg.json_out = args.json
    try:
        report = _COMMANDS[args.command](args, cfg)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # internal error
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    for entry in report.entries:
        print(entry.to_json() if cfg.json_out else entry.render())
    return report.exit_code(cfg.strict)


if __name__ == "__main__":
    sys.exit(main())
