"""Command-line front end.

Every subcommand parses its inputs, calls the library, and hands a payload to
:func:`emit`.  Reports are JSON by default; ``--format csv`` works for the
tabular payloads and ``--format text`` gives a short human-readable form.

Settings come from three layers, later ones winning: built-in defaults, a
``key = value`` config file (``--config`` or the ``STURMJSR_CONFIG``
environment variable), and command-line flags.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import os
import sys
import warnings
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import mpmath

from . import __version__
from .acceptance import run_suite
from .families import example_p2, jb_pair
from .jsr import extremality_diagnostic, growth_report, jsr_bounds
from .lift import (
    LiftError,
    decode_word,
    encode_word,
    normalize_phase,
    numeric_survives,
    survives,
    verify_encode_product,
    verify_feqt,
)
from .linalg import MatrixFamily, Poly, format_matrix, scalar_value
from .precision import ConvergenceError, constant_details
from .specs import SpecError, parse_family, parse_word_spec
from .words import WindowPolicy, Word, complexity_profile

CONFIG_ENV = "STURMJSR_CONFIG"
QUICK_CRITERIA = tuple(range(1, 11))

log = logging.getLogger("sturmjsr")


class UsageError(Exception):
    """Bad flags, config or output request; maps to exit code 2."""


@dataclass
class RunConfig:
    precision: int = 50
    depth: int = 10
    window_cap: int = 10**6
    n: int = 2000
    format: str = "json"
    out: str | None = None

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = cls()
        for k, v in values.items():
            if v is None:
                continue
            if k in ("precision", "depth", "window_cap", "n"):
                try:
                    v = int(float(v)) if isinstance(v, str) and "e" in v.lower() else int(v)
                except ValueError:
                    raise UsageError(f"{k} must be an integer, got {v!r}") from None
                if v <= 0:
                    raise UsageError(f"{k} must be positive")
            if k == "format" and v not in ("json", "csv", "text"):
                raise UsageError(f"format must be json, csv or text, got {v!r}")
            setattr(cfg, k, v)
        return cfg


def read_config_file(path: str | os.PathLike) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


@dataclass
class Outcome:
    payload: dict
    csv: str | None = None
    text: str | None = None
    ok: bool = True


@dataclass
class ReportEnvelope:
    command: list
    config: dict
    timestamp: str
    payload: dict
    warnings: list

    def as_dict(self) -> dict:
        return asdict(self)


def emit(report: ReportEnvelope, outcome: Outcome, fmt: str, envelope: bool = True) -> str:
    """Serialise a report; raises :class:`UsageError` when the format does not fit."""
    if fmt == "csv":
        if outcome.csv is None:
            raise UsageError("this payload is nested; csv output is not available")
        return outcome.csv
    if fmt == "text":
        body = outcome.text if outcome.text is not None else json.dumps(outcome.payload, indent=2)
        if envelope and report.warnings:
            body += "".join(f"\nwarning: {w}" for w in report.warnings)
        return body.rstrip("\n") + "\n"
    data = report.as_dict() if envelope else report.payload
    return json.dumps(data, indent=2) + "\n"


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def cmd_constants(args, cfg: RunConfig) -> Outcome:
    digits = args.digits or cfg.precision
    res = constant_details(args.which, digits)
    v = res.value
    err = f"1e-{digits}"
    agree = v.overlaps(res.product_form)
    payload = {
        "name": args.which,
        "digits": digits,
        "value": v.digits(digits),
        "error": err,
        "product_form_agrees": agree,
    }
    return Outcome(payload, text=f"{v.digits(digits)} ± {err}", ok=agree)


def _symbols_of(fam: MatrixFamily) -> list[str]:
    names = set()
    for M in fam:
        for x in [M.scale] + [e for row in M.pattern for e in row]:
            terms = getattr(x, "terms", None)
            if terms:
                for mono in terms:
                    names.update(name for name, _ in mono)
    return sorted(names)


def _manifest_entry(fam: MatrixFamily, digits: int) -> dict:
    return {
        "tag": fam.tag,
        "dimension": fam.dimension,
        "alphabet_size": fam.size,
        "constants": {s: mpmath.nstr(scalar_value(Poly.symbol(s), digits), digits) for s in _symbols_of(fam)},
    }


def cmd_family_build(args, cfg: RunConfig) -> Outcome:
    kind = args.kind
    if kind == "example-p2":
        D, pair = example_p2()
        fams = [D, pair.family]
    else:
        if args.source:
            spec = f"file:{args.source}"
        elif kind == "btv":
            spec = f"btv:alpha={args.alpha or '1'}"
        elif kind == "kron":
            if not args.alphas:
                raise UsageError("--alphas is required for kron")
            spec = "kron:alphas=" + args.alphas.replace(",", ";")
        elif kind == "toy":
            spec = "toy:" + (args.values or "2,3")
        else:  # jb
            if not args.inner:
                raise UsageError("jb needs --inner FAMILY or --from FILE")
            spec = args.inner
        base = parse_family(spec)
        fams = [jb_pair(base).family] if kind == "jb" else [base]
    manifest = [_manifest_entry(f, min(cfg.precision, 40)) for f in fams]
    mats = [[format_matrix(M) for M in f] for f in fams]
    lines = []
    for f, ms in zip(fams, mats):
        lines.append(f"# {f.tag} dimension={f.dimension} size={f.size}")
        lines.extend(ms)
    return Outcome({"manifest": manifest, "matrices": mats}, text="\n".join(lines))


def cmd_word(args, cfg: RunConfig) -> Outcome:
    src = parse_word_spec(args.spec)
    w = src.prefix(args.length)
    return Outcome({"spec": args.spec, "length": args.length, "word": str(w)}, text=str(w))


def cmd_complexity(args, cfg: RunConfig) -> Outcome:
    src = parse_word_spec(args.spec)
    prof = complexity_profile(src, args.n_max, WindowPolicy(cap=cfg.window_cap))
    rows = [{"n": n, "count": c, "window": L, "saturated": s} for n, (c, L, s) in sorted(prof.entries.items())]
    payload = {"spec": args.spec, "window_cap": cfg.window_cap, "all_saturated": prof.all_saturated, "profile": rows}
    if not prof.all_saturated:
        warnings.warn("some counts did not saturate below the window cap")
    return Outcome(payload, csv=prof.to_csv(), text=prof.to_csv())


def cmd_jsr_bounds(args, cfg: RunConfig) -> Outcome:
    fam = parse_family(args.family)
    depth = args.depth or cfg.depth
    b = jsr_bounds(fam, depth, budget=args.budget, digits=cfg.precision)
    d = b.as_dict(min(cfg.precision, 30))
    payload = {"family": fam.tag, **d}
    text = f"{d['lower']} <= jsr <= {d['upper']}  (depth {d['depth']}, witness {d['witness']})"
    csv = "lower,upper,depth,witness\n" + f"{d['lower']},{d['upper']},{d['depth']},{d['witness']}\n"
    return Outcome(payload, csv=csv, text=text)


def _growth_inputs(args, cfg: RunConfig):
    fam = parse_family(args.family)
    src = parse_word_spec(args.word_spec)
    n = args.n or cfg.n
    return fam, src, n


def cmd_jsr_growth(args, cfg: RunConfig) -> Outcome:
    fam, src, n = _growth_inputs(args, cfg)
    if args.rho is not None:
        rho = float(args.rho)
    else:
        rho = jsr_bounds(fam, args.depth or cfg.depth).lower
    rep = growth_report(fam, src, n, rho)
    series = [
        {"n": int(k), "log_norm": f"{ln:.12g}", "r_n": f"{r:.12g}", "residual": f"{res:.12g}"}
        for k, ln, r, res in zip(rep.n, rep.log_norm, rep.r_n, rep.residual)
    ]
    payload = {
        "family": fam.tag,
        "word_spec": args.word_spec,
        "rho_hat": f"{rep.rho_hat:.15g}",
        "annihilated_at": rep.annihilated_at,
        "summary": {k: f"{v:.12g}" for k, v in rep.summary.items()},
        "series": series,
    }
    return Outcome(payload, csv=rep.to_csv(), text=rep.to_csv())


def cmd_growth(args, cfg: RunConfig) -> Outcome:
    fam, src, n = _growth_inputs(args, cfg)
    bounds = jsr_bounds(fam, args.depth or cfg.depth)
    verdict = extremality_diagnostic(fam, src, n, bounds, tol=args.tol)
    rep = growth_report(fam, src, n, bounds.lower)
    payload = {
        "family": fam.tag,
        "word_spec": args.word_spec,
        "n": n,
        "bounds": bounds.as_dict(12),
        "verdict": verdict,
        "summary": {k: f"{v:.12g}" for k, v in rep.summary.items()},
    }
    return Outcome(payload, csv=rep.to_csv(), text=f"{verdict}\n")


def cmd_lift_code(args, cfg: RunConfig) -> Outcome:
    src = parse_word_spec(args.word_spec)
    if args.action == "encode":
        w = encode_word(src, args.m).prefix(args.length)
    else:
        w = decode_word(src, args.m).prefix(args.length)
    payload = {"action": args.action, "m": args.m, "word_spec": args.word_spec, "length": args.length, "word": str(w)}
    return Outcome(payload, text=str(w))


def cmd_lift_phase(args, cfg: RunConfig) -> Outcome:
    src = parse_word_spec(args.word_spec)
    k = normalize_phase(src, args.m, args.probe)
    return Outcome({"m": args.m, "word_spec": args.word_spec, "probe": args.probe, "shift": k}, text=str(k))


def cmd_lift_verify(args, cfg: RunConfig) -> Outcome:
    fam = parse_family(args.family)
    pair = jb_pair(fam)
    m = fam.size
    if args.check == "support":
        x = Word.parse(args.word, 2)
        j = m - 1 if args.start_block is None else args.start_block
        auto = survives(x, m, j)
        exact = numeric_survives(pair, x.symbols, j)
        payload = {"check": "support", "family": fam.tag, "word": str(x), "start_block": j,
                   "automaton": auto, "exact": exact, "agree": auto == exact}
        ok = auto == exact
    else:
        w = Word.parse(args.word, max(m, 2))
        if any(s >= m for s in w):
            raise UsageError(f"word uses symbols outside 0..{m - 1}")
        fn = verify_feqt if args.check == "feqt" else verify_encode_product
        ok = fn(fam, w, pair)
        payload = {"check": args.check, "family": fam.tag, "word": str(w), "holds": ok}
    return Outcome(payload, text="holds" if ok else "fails", ok=ok)


def _suite_payload(suite: str, criteria=None) -> tuple[dict, list]:
    ids = criteria or list(QUICK_CRITERIA)
    results = run_suite(ids)
    return {
        "suite": suite,
        "criteria": [r.payload() for r in results],
        "passed": all(r.passed for r in results),
    }, results


def cmd_verify(args, cfg: RunConfig) -> Outcome:
    chosen = None
    if args.criteria:
        chosen = sorted({int(c) for c in args.criteria.split(",")})
        bad = [c for c in chosen if c not in QUICK_CRITERIA]
        if bad:
            raise UsageError(f"unknown criteria {bad}")
    payload, results = _suite_payload(args.suite, chosen)
    if args.suite == "full":
        first = json.dumps(_suite_payload("quick")[0], indent=2)
        second = json.dumps(_suite_payload("quick")[0], indent=2)
        same = first == second
        payload["criteria"].append(
            {"id": 11, "name": "quick suite is byte-identical across runs", "passed": same, "detail": {}}
        )
        payload["passed"] = payload["passed"] and same
    lines = [f"criterion {c['id']:2d} {'PASS' if c['passed'] else 'FAIL'}  {c['name']}" for c in payload["criteria"]]
    for r in results:
        log.info("criterion %d took %.2fs", r.id, r.seconds)
    return Outcome(payload, text="\n".join(lines), ok=payload["passed"])


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    sup = argparse.SUPPRESS
    g.add_argument("--config", default=sup, help=f"key = value file (default: ${CONFIG_ENV})")
    g.add_argument("--precision", type=int, default=sup, help="working decimal digits")
    g.add_argument("--window-cap", dest="window_cap", type=float, default=sup)
    g.add_argument("--format", choices=["json", "csv", "text"], default=sup)
    g.add_argument("--out", default=sup, help="write the report here instead of stdout")
    g.add_argument("--no-envelope", dest="no_envelope", action="store_true", default=sup,
                   help="emit the bare payload without command echo, config or timestamp")
    g.add_argument("-v", "--verbose", action="store_true", default=sup)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="sturmjsr", description="Sturmian extremal words and lifted matrix pairs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", parents=[common], help="the two explicit BTV parameters")
    p.add_argument("--which", required=True, choices=["alpha-star", "alpha-double-star"])
    p.add_argument("--digits", type=int)
    p.set_defaults(handler=cmd_constants)

    fam = sub.add_parser("family", help="matrix families").add_subparsers(dest="action", required=True)
    p = fam.add_parser("build", parents=[common])
    p.add_argument("--kind", required=True, choices=["btv", "kron", "jb", "toy", "example-p2"])
    p.add_argument("--alpha")
    p.add_argument("--alphas", help="comma or semicolon separated")
    p.add_argument("--values", help="toy family entries, e.g. 2,3")
    p.add_argument("--inner", help="family spec to lift (jb)")
    p.add_argument("--from", dest="source", metavar="FILE")
    p.set_defaults(handler=cmd_family_build)

    p = sub.add_parser("word", parents=[common], help="prefix of a sequence spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--length", type=int, required=True)
    p.set_defaults(handler=cmd_word)

    p = sub.add_parser("complexity", parents=[common], help="windowed subword complexity")
    p.add_argument("--spec", required=True)
    p.add_argument("--n-max", dest="n_max", type=int, required=True)
    p.set_defaults(handler=cmd_complexity)

    jsr = sub.add_parser("jsr", help="joint spectral radius").add_subparsers(dest="action", required=True)
    p = jsr.add_parser("bounds", parents=[common])
    p.add_argument("--family", required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.set_defaults(handler=cmd_jsr_bounds)
    p = jsr.add_parser("growth", parents=[common])
    _growth_flags(p)
    p.add_argument("--rho", help="growth rate to compare against (default: lower JSR bound)")
    p.set_defaults(handler=cmd_jsr_growth)

    p = sub.add_parser("growth", parents=[common], help="extremality diagnostic along a sequence")
    _growth_flags(p)
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(handler=cmd_growth)

    lift = sub.add_parser("lift", help="binary encoding and block checks").add_subparsers(dest="action", required=True)
    for name in ("encode", "decode"):
        p = lift.add_parser(name, parents=[common])
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--word-spec", dest="word_spec", required=True)
        p.add_argument("--length", type=int, required=True)
        p.set_defaults(handler=cmd_lift_code)
    p = lift.add_parser("phase", parents=[common])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--word-spec", dest="word_spec", required=True)
    p.add_argument("--probe", type=int, default=256)
    p.set_defaults(handler=cmd_lift_phase)
    p = lift.add_parser("verify", parents=[common])
    p.add_argument("--family", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--check", required=True, choices=["feqt", "encode-product", "support"])
    p.add_argument("--start-block", dest="start_block", type=int)
    p.set_defaults(handler=cmd_lift_verify)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p.add_argument("--suite", choices=["quick", "full"], default="quick")
    p.add_argument("--criteria", help="comma separated subset, e.g. 1,5")
    p.set_defaults(handler=cmd_verify)
    return parser


def _growth_flags(p):
    p.add_argument("--family", required=True)
    p.add_argument("--word-spec", dest="word_spec", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--depth", type=int, help="enumeration depth for the JSR bracket")


def _resolve_config(ns: argparse.Namespace) -> RunConfig:
    values: dict = {}
    path = getattr(ns, "config", None) or os.environ.get(CONFIG_ENV)
    if path:
        values.update(read_config_file(path))
    for key in ("precision", "window_cap", "format", "out"):
        if hasattr(ns, key):
            values[key] = getattr(ns, key)
    if getattr(ns, "depth", None):
        values["depth"] = ns.depth
    if getattr(ns, "n", None):
        values["n"] = ns.n
    if "window_cap" in values and not isinstance(values["window_cap"], str):
        values["window_cap"] = int(values["window_cap"])
    return RunConfig.from_mapping(values)


def run(argv: list[str] | None = None, stdout=None) -> int:
    """Parse ``argv``, run one subcommand and write its report.  Returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if getattr(ns, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _resolve_config(ns)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            outcome = ns.handler(ns, cfg)
        report = ReportEnvelope(
            command=argv,
            config=asdict(cfg),
            timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            payload=outcome.payload,
            warnings=[str(w.message) for w in caught],
        )
        text = emit(report, outcome, cfg.format, envelope=not getattr(ns, "no_envelope", False))
    except (UsageError, SpecError) as exc:
        parser.print_usage(sys.stderr)
        print(f"sturmjsr: error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, LiftError, ArithmeticError) as exc:
        print(f"sturmjsr: computation failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"sturmjsr: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        stdout.write(text)
    return 0 if outcome.ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
