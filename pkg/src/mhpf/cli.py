"""Command-line front end: ``mhpf solve`` and ``mhpf analyze``.

Exit codes: 0 converged, 1 input error, 2 budget exhausted before the
bracket closed, 3 refused because the problem is expansive.
"""

from __future__ import annotations

import argparse
import sys

from .cone import REGIME_TOL, classify_regime, find_weight_vector, spectral_radius_nonneg
from .cone import equality_weight_vector
from .exceptions import ExpansiveRegimeError, MHPFError, NoWeightVectorError
from .io import TensorFileError, emit_json, read_tensor
from .irreducibility import diagnose
from .maps import ProblemSpec, homogeneity_matrix
from .solver import SolveOptions, solve

EXIT_OK, EXIT_INPUT, EXIT_UNCONVERGED, EXIT_EXPANSIVE = 0, 1, 2, 3


def _int_list(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mhpf", description="Maximal positive eigenpairs of nonnegative tensor maps."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tensor", required=True, help="tensor text file")
        p.add_argument("--nu", required=True, type=_int_list, help="block multiplicities, e.g. 1,1")
        p.add_argument("--p", required=True, type=_float_list, help="block exponents, e.g. 2,2")
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    s = sub.add_parser("solve", help="run the power method")
    common(s)
    s.add_argument("--tol", type=float, default=1e-10, help="bracket width at which to stop")
    s.add_argument("--max-iters", type=int, default=10000)
    s.add_argument("--delta-ladder", action="store_true",
                   help="use the shift ladder when plain iteration has no guarantee")
    s.add_argument("--diagnostics-only", action="store_true",
                   help="emit the structural analysis without solving")

    a = sub.add_parser("analyze", help="structural diagnostics only")
    common(a)
    return parser


def _load(args):
    for q in args.p:
        if not q > 1:
            raise MHPFError("exponent must exceed 1")
    tensor = read_tensor(args.tensor)
    return ProblemSpec(tensor, tuple(args.nu), tuple(args.p))


def _analysis(spec):
    A = homogeneity_matrix(spec)
    est = spectral_radius_nonneg(A)
    regime = classify_regime(est.rho)
    try:
        if regime.value == "nonexpansive":
            w = equality_weight_vector(A)
        else:
            w = find_weight_vector(A)
        weights = {"b": [float(v) for v in w.b], "r": float(w.r)}
    except NoWeightVectorError as exc:
        weights = {"b": None, "r": None, "error": str(exc)}
    return {
        "problem": {
            "m": spec.m,
            "dims": list(spec.tensor.dims),
            "nu": list(spec.nu),
            "p": [float(v) for v in spec.p],
        },
        "rho_A": float(est.rho),
        "regime": regime.value,
        "regime_tol": REGIME_TOL,
        "weights": weights,
        "diagnostics": diagnose(spec).to_dict(),
    }


def _write(args, payload):
    text = emit_json(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args):
    spec = _load(args)
    _write(args, _analysis(spec))
    return EXIT_OK


def cmd_solve(args):
    spec = _load(args)
    if args.diagnostics_only:
        _write(args, _analysis(spec))
        return EXIT_OK
    options = SolveOptions(
        tol_cw_gap=args.tol, max_iters=args.max_iters, allow_ladder=args.delta_ladder
    )
    try:
        report = solve(spec, options)
    except ExpansiveRegimeError as exc:
        print(f"mhpf: {exc}", file=sys.stderr)
        return EXIT_EXPANSIVE
    for w in report.warnings:
        print(f"mhpf: warning: {w}", file=sys.stderr)
    _write(args, report.to_dict())
    if not report.converged:
        print(
            f"mhpf: not converged after {report.iters} iterations "
            f"(bracket width {report.gap:.3g})",
            file=sys.stderr,
        )
        return EXIT_UNCONVERGED
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"solve": cmd_solve, "analyze": cmd_analyze}[args.command]
    try:
        return handler(args)
    except (MHPFError, TensorFileError, OSError, ValueError) as exc:
        print(f"mhpf: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
