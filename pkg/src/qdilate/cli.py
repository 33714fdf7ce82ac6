import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from .anti import reduce_anti
from .classify import classify, strip_zeros
from .corpus import GENERATORS, demo_corpus, generate
from .documents import CertificateDocument, TupleDocument, dump_document, pretty_json
from .enums import DilationMode
from .exceptions import NotQCommutingError, QDilateException, VerificationFailure
from .qrel import check_row_contraction, detect_family, is_doubly_q
from .schemas import QFamily, Tol, TruncationConfig
from .tupledilate import dilate_general
from .verify import verify_certificate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_HYPOTHESIS = 2
EXIT_VERIFICATION = 3

DEFAULT_DEGREE = 5


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _emit(text: str, out: str | None = None):
    if out:
        Path(out).write_text(text + "\n")
        logger.info(f"Wrote {out}")
    else:
        print(text)


def _summary(text: str):
    print(text, file=sys.stderr)


def _tol(args: argparse.Namespace) -> Tol:
    return Tol.parse(args.tol) if args.tol else Tol.from_env()


def _config(args: argparse.Namespace) -> TruncationConfig:
    return TruncationConfig.for_degree(args.degree, (), DilationMode(args.mode), args.ring)


def _load_tuple(path: str) -> TupleDocument:
    return TupleDocument.model_validate_json(_read(path))


def _family(doc: TupleDocument, tol: Tol) -> QFamily:
    T = doc.to_tuple()
    detected = detect_family(T, tol)
    declared = doc.declared_family()
    if declared is not None:
        for i, j in declared.pairs():
            entry = detected.get(i, j)
            if entry.is_exact and abs(entry.constant() - declared.constant(i, j)) > tol.bound(1.0) ** 0.5:
                logger.warning(f"Declared q for ({i}, {j}) differs from the detected {entry!r}")
    return detected


def _q_summary(q: QFamily) -> str:
    values = sorted(q.values(), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    return "{" + ", ".join(f"{z.real:+.4g}{z.imag:+.4g}i" for z in values) + "}"


def cmd_detect(args: argparse.Namespace) -> int:
    tol = _tol(args)
    doc = _load_tuple(args.input)
    T = doc.to_tuple()
    try:
        family = _family(doc, tol)
    except NotQCommutingError as exc:
        _summary(f"Not q-commuting: members {exc.pair[0]} and {exc.pair[1]}")
        raise
    doubly = is_doubly_q(T, family, tol)
    _emit(
        pretty_json(
            {
                "q": family.to_dict(),
                "doubly_q": {f"{i},{j}": ok for (i, j), ok in sorted(doubly.items())},
                "row_contraction": check_row_contraction(T, tol),
            }
        ),
        args.out,
    )
    _summary(f"q values {_q_summary(family)}")
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    tol = _tol(args)
    doc = _load_tuple(args.input)
    family = _family(doc, tol)
    reduced, q, zeros = strip_zeros(doc.to_tuple(), family, tol)
    if not reduced:
        _emit(pretty_json({"verdict": None, "zeros": list(zeros)}), args.out)
        _summary("All members are zero")
        return EXIT_OK
    assert q is not None
    report = classify(reduced, q, tol)
    _emit(pretty_json({**report.to_dict(), "zeros": list(zeros)}), args.out)
    _summary(f"Verdict {report.verdict.value} ({', '.join(report.reason)})")
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    tol = _tol(args)
    doc = _load_tuple(args.input)
    reduced, _, zeros = strip_zeros(doc.to_tuple(), None, tol)
    red = reduce_anti(reduced, tol)
    _emit(pretty_json({**red.to_dict(), "zeros": list(zeros)}), args.out)
    _summary(f"Anti-commuting reduction {red.kind.value}, roles {red.roles}")
    return EXIT_OK


def cmd_dilate(args: argparse.Namespace) -> int:
    tol = _tol(args)
    doc = _load_tuple(args.input)
    outcome = dilate_general(doc.to_tuple(), _config(args), tol)
    cert = outcome.certificate
    if cert is None:
        _emit(pretty_json(outcome.to_dict()), args.out)
        _summary(f"Route {outcome.route.value}: {outcome.note}")
        return EXIT_OK
    _emit(dump_document(CertificateDocument.from_certificate(cert, doc, tol)), args.out)
    _summary(f"Route {outcome.route.value}, dimension {cert.dim}, {cert.report!r}")
    if cert.report is not None and not cert.report.passed:
        raise VerificationFailure("Freshly built certificate failed verification", cert.report)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    doc = _load_tuple(args.input)
    cert_doc = CertificateDocument.model_validate_json(_read(args.certificate))
    tol = Tol.parse(args.tol) if args.tol else cert_doc.tolerance()
    if not cert_doc.matches(doc):
        logger.warning("Certificate was issued for a different tuple document")
    cert = cert_doc.to_certificate()
    report = verify_certificate(doc.to_tuple(), cert, args.degree, tol)
    diff = {}
    if cert.report is not None:
        for key in ("unitarity", "isometry", "relation", "moment"):
            diff[key] = abs(getattr(report, key) - getattr(cert.report, key))
    _emit(pretty_json({"report": report.to_dict(), "stored_difference": diff}), args.out)
    _summary(repr(report))
    if not report.passed:
        raise VerificationFailure("Certificate failed verification", report)
    return EXIT_OK


def cmd_demo(args: argparse.Namespace) -> int:
    tol = _tol(args)
    cfg = _config(args)
    rows = []
    failed = False
    for name, T in demo_corpus(args.seed).items():
        outcome = dilate_general(T, cfg, tol)
        cert = outcome.certificate
        verdict = None if outcome.classification is None else outcome.classification.verdict.value
        beta = None if outcome.similarity is None else outcome.similarity.beta
        report = None if cert is None else cert.report
        failed |= report is None or not report.passed
        rows.append(
            {
                "name": name,
                "verdict": verdict,
                "route": outcome.route.value,
                "q_out": None if cert is None else _q_summary(cert.q_out),
                "beta": beta,
                "scales": None if cert is None else [[s.real, s.imag] for s in cert.scales],
                "max_residual": None if report is None else report.max_residual,
                "passed": report is not None and report.passed,
            }
        )
    _emit(pretty_json(rows), args.out)
    _summary(f"{'name':<10} {'verdict':<10} {'route':<12} {'q_out':<28} {'max residual':>12}")
    for row in rows:
        residual = "-" if row["max_residual"] is None else f"{row['max_residual']:.2e}"
        _summary(f"{row['name']:<10} {row['verdict']!s:<10} {row['route']:<12} {row['q_out']!s:<28} {residual:>12}")
    if failed:
        raise VerificationFailure("Demo pipeline failed verification")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    tuples = generate(args.kind, args.seed, args.count)
    docs = [
        TupleDocument.from_tuple(T, name=f"{args.kind}-{args.seed + s}", seed=args.seed + s)
        for s, T in enumerate(tuples)
    ]
    if args.out and args.count > 1:
        folder = Path(args.out)
        folder.mkdir(parents=True, exist_ok=True)
        for doc in docs:
            (folder / f"{doc.name}.json").write_text(dump_document(doc) + "\n")
        _summary(f"Wrote {len(docs)} tuples to {folder}")
        return EXIT_OK
    payload = docs[0].model_dump(mode="json") if len(docs) == 1 else [d.model_dump(mode="json") for d in docs]
    _emit(pretty_json(payload), args.out)
    return EXIT_OK


def _add_dilation_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--degree", type=int, default=DEFAULT_DEGREE, help="moment degree N to certify")
    parser.add_argument("--ring", type=int, default=None, help="minimal ring length M (default N + 2)")
    parser.add_argument("--mode", choices=[m.value for m in DilationMode], default=DilationMode.CYCLIC.value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdilate", description=__doc__ or "q-commuting tuple dilations")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--tol", default=None, help="tolerance 'rel' or 'rel,abs' (default QDILATE_TOL)")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_text in (
        ("detect", cmd_detect, "detect the relation constants of a tuple"),
        ("classify", cmd_classify, "classify a q-commuting tuple of 2x2 contractions"),
        ("reduce", cmd_reduce, "reduce an anti-commuting tuple"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="tuple document, '-' for stdin")
        p.add_argument("--out", default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("dilate", help="build and verify a dilation certificate")
    p.add_argument("input", help="tuple document, '-' for stdin")
    p.add_argument("--out", default=None)
    _add_dilation_flags(p)
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("verify", help="re-verify a certificate against its tuple")
    p.add_argument("input", help="tuple document")
    p.add_argument("certificate", help="certificate document")
    p.add_argument("--degree", type=int, default=None, help="degree to check (default: the certified one)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help="run the bundled pipelines")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default=None)
    _add_dilation_flags(p)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("gen", help="write seeded planted tuples")
    p.add_argument("--kind", choices=sorted(GENERATORS), required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="file, or folder when --count > 1")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except VerificationFailure as exc:
        logger.error(str(exc))
        return exc.exit_code
    except QDilateException as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_HYPOTHESIS
    except (ValidationError, json.JSONDecodeError, OSError, ValueError, KeyError) as exc:
        logger.error(f"Invalid input: {exc}")
        return EXIT_PARSE
