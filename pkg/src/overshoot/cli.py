"""Command-line front end.

Exit codes:
    0  success / envelope verified
    1  I/O, parse or malformed-certificate failure
    2  plant not controllable
    3  lambda < 1
    4  envelope violated
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .canon import Plant
from .errors import DimensionError, LambdaDomainError, NotControllableError, OvershootError, ReductionError
from .fixtures import EXAMPLE_A, EXAMPLE_B, EXAMPLE_LAMBDA, PRINTED
from .matcore import DEFAULT_RANK_TOL, operator_norm
from .synth import closed_loop_in_basis, legacy_example_constant, placement_error, synthesize_gain
from .verify import certificate_envelope, cross_oracle_check, envelope_check

EXIT_OK = 0
EXIT_IO = 1
EXIT_NOT_CONTROLLABLE = 2
EXIT_LAMBDA = 3
EXIT_VIOLATION = 4

DEFAULT_SAMPLES = 10_000
SIG_DIGITS = 15
CROSS_ORACLE_POINTS = 20

CERT_KEYS = ("K", "L", "M", "M_total", "ladder", "T", "T_norm", "T_inv_norm", "lambda", "inputs")
SWEEP_HEADER = ("lambda", "l", "m_total", "sup_ratio", "peak_time", "gain_norm")


class InputError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.{SIG_DIGITS}g}"


def _round(obj):
    """Round every float in a nested structure to 15 significant digits."""
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [_round(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, np.floating):
        return float(fmt(float(obj)))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def load_plant_file(path) -> tuple[Plant, float | None, float | None]:
    """Read {"A": [[...]], "B": [[...]], "lambda"?: x, "tol"?: x}."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read plant file {path}: {exc}") from exc
    if not isinstance(data, dict) or "A" not in data or "B" not in data:
        raise InputError(f"plant file {path} needs keys 'A' and 'B'")
    try:
        plant = Plant(np.array(data["A"], dtype=float), np.array(data["B"], dtype=float))
    except (ValueError, TypeError, DimensionError) as exc:
        raise InputError(f"bad plant matrices in {path}: {exc}") from exc
    lam = data.get("lambda")
    tol = data.get("tol")
    return plant, (None if lam is None else float(lam)), (None if tol is None else float(tol))


def certificate_document(cert, tol: float) -> dict:
    doc = {
        "K": cert.k_gain,
        "L": cert.l_exponent,
        "M": cert.m_constant,
        "M_total": cert.m_total,
        "ladder": list(cert.ladder.values),
        "T": cert.canonical.t,
        "T_norm": cert.transform_norms[0],
        "T_inv_norm": cert.transform_norms[1],
        "lambda": cert.lambda_request,
        "inputs": {
            "A": cert.plant.a,
            "B": cert.plant.b,
            "lambda": cert.lambda_request,
            "tol": tol,
        },
        "k_canonical": cert.k_canonical,
        "beta": cert.beta,
        "v": cert.reduction.v,
        "K0": cert.reduction.k0,
        "rho": cert.ladder.rho,
    }
    return _round(doc)


def load_certificate(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read certificate {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("certificate must be a JSON object")
    missing = [k for k in CERT_KEYS if k not in doc]
    if missing:
        raise InputError(f"certificate is missing keys: {', '.join(missing)}")
    inputs = doc["inputs"]
    if not isinstance(inputs, dict) or "A" not in inputs or "B" not in inputs:
        raise InputError("certificate inputs need 'A' and 'B'")
    try:
        a = np.array(inputs["A"], dtype=float)
        b = np.array(inputs["B"], dtype=float)
        k = np.array(doc["K"], dtype=float)
        t = np.array(doc["T"], dtype=float)
        Plant(a, b)
        if k.shape != (b.shape[1], a.shape[0]):
            raise InputError(f"K has shape {k.shape}, expected {(b.shape[1], a.shape[0])}")
        if t.shape != (a.shape[0], a.shape[0]) or not np.all(np.isfinite(t)):
            raise InputError(f"T has shape {t.shape}, expected {a.shape}")
        float(doc["lambda"]), int(doc["L"]), float(doc["M_total"])
    except (ValueError, TypeError, DimensionError) as exc:
        raise InputError(f"malformed certificate: {exc}") from exc
    return doc


def write_trace_csv(path, samples) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("t", "norm", "envelope"))
        for t, nrm, env in samples:
            w.writerow((fmt(t), fmt(nrm), fmt(env)))


def _fail(code: int, msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_synthesize(input_path, lam=None, out=None, tol=None) -> int:
    try:
        plant, file_lam, file_tol = load_plant_file(input_path)
    except InputError as exc:
        return _fail(EXIT_IO, str(exc))
    lam = lam if lam is not None else file_lam
    if lam is None:
        return _fail(EXIT_IO, "no lambda given (use --lambda or a 'lambda' key in the plant file)")
    tol = tol if tol is not None else (file_tol if file_tol is not None else DEFAULT_RANK_TOL)
    try:
        cert = synthesize_gain(plant, lam, tol)
    except LambdaDomainError as exc:
        return _fail(EXIT_LAMBDA, str(exc))
    except (NotControllableError, ReductionError) as exc:
        return _fail(EXIT_NOT_CONTROLLABLE, str(exc))

    text = json.dumps(certificate_document(cert, tol), indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            return _fail(EXIT_IO, f"cannot write {out}: {exc}")
    return EXIT_OK


def cmd_verify(cert_path, samples=DEFAULT_SAMPLES, out=None, t_end=None) -> int:
    try:
        doc = load_certificate(cert_path)
    except InputError as exc:
        return _fail(EXIT_IO, str(exc))
    a = np.array(doc["inputs"]["A"], dtype=float)
    b = np.array(doc["inputs"]["B"], dtype=float)
    k = np.array(doc["K"], dtype=float)
    t = np.array(doc["T"], dtype=float)
    lam, l_exp, m_total = float(doc["lambda"]), int(doc["L"]), float(doc["M_total"])
    tol = float(doc["inputs"].get("tol", DEFAULT_RANK_TOL))

    try:
        # evaluate in the certificate's own basis T; see closed_loop_in_basis
        g = closed_loop_in_basis(a, b, k, t)
        report = envelope_check(g, lam, l_exp, m_total, t_end=t_end, base_samples=samples, basis=t)
    except LambdaDomainError as exc:
        return _fail(EXIT_LAMBDA, str(exc))
    except (ValueError, OverflowError, OvershootError) as exc:
        return _fail(EXIT_IO, f"malformed certificate: {exc}")

    summary = {
        "sup_ratio": report.sup_ratio,
        "peak_time": report.peak_time,
        "certified_bound": report.certified_bound,
        "margin": report.margin,
        "pass": report.passed,
        "step_control": report.step_control,
    }
    try:
        resynth = synthesize_gain(Plant(a, b), lam, tol)
        red = resynth.reduction
        times = np.linspace(0.0, 5.0 / lam, CROSS_ORACLE_POINTS)
        summary["cross_oracle_discrepancy"] = cross_oracle_check(
            a + b @ red.k0, red.b_single, resynth.k_canonical, resynth.canonical, resynth.ladder, times
        )
        summary["gain_matches_inputs"] = bool(np.allclose(resynth.k_gain, k, rtol=1e-9, atol=0))
    except (NotControllableError, ReductionError) as exc:
        summary["cross_oracle_discrepancy"] = None
        summary["cross_oracle_error"] = str(exc)

    if out is not None:
        try:
            write_trace_csv(out, report.samples)
        except OSError as exc:
            return _fail(EXIT_IO, f"cannot write {out}: {exc}")
    print(json.dumps(_round(summary), indent=2))
    return EXIT_OK if report.passed else EXIT_VIOLATION


def example_rows(samples: int = DEFAULT_SAMPLES):
    """Computed-vs-printed comparison for the built-in 3-state example.

    Returns (rows, envelope_report); each row is (quantity, computed, printed, note).
    """
    cert = synthesize_gain(Plant(EXAMPLE_A, EXAMPLE_B), EXAMPLE_LAMBDA)
    t = cert.canonical.t
    t_norm, t_inv_norm = cert.transform_norms
    report = certificate_envelope(cert, base_samples=samples)
    t_err = float(np.max(np.abs(t - PRINTED["T"])))
    legacy = legacy_example_constant(3, t_norm, t_inv_norm)

    def vec(x):
        return "(" + ", ".join(f"{v:.3f}" for v in np.ravel(x)) + ")"

    rows = [
        ("T", "max |T - T1| = " + fmt(t_err), "T1", "exact" if t_err <= 1e-9 else "MISMATCH"),
        ("||T||", fmt(t_norm), fmt(PRINTED["T_norm"]), f"diff {abs(t_norm - PRINTED['T_norm']):.3g}"),
        ("||T^-1||", fmt(t_inv_norm), fmt(PRINTED["T_inv_norm"]),
         f"diff {abs(t_inv_norm - PRINTED['T_inv_norm']):.3g}"),
        ("L", str(cert.l_exponent), str(PRINTED["L"]), "ok" if cert.l_exponent == PRINTED["L"] else "MISMATCH"),
        ("M (n n! rho^L)", fmt(cert.m_constant), "-", "certifying constant"),
        ("M_1", fmt(cert.m_total), "-", "M ||T|| ||T^-1||"),
        ("printed-formula constant", f"{legacy:.3f}", f"{PRINTED['M_example']:.3f}",
         "exponent (n-1)(n-2)/2; inconsistent with n n! rho^L, not used to certify"),
        ("k_canonical", vec(cert.k_canonical), vec(PRINTED["K_canonical"]),
         "fixture mismatch: printed values appear reversed, smallest entry off by 3"),
        ("K", vec(cert.k_gain), vec(PRINTED["K"]), "fixture mismatch: follows from k_canonical"),
        ("closed-loop spectrum", vec(sorted(np.linalg.eigvals(cert.canonical_closed_loop).real, reverse=True)),
         vec(cert.ladder.values), f"max rel err {placement_error(cert):.3g}"),
        ("sup ||e^Ft|| e^(lam t)", fmt(report.sup_ratio), "-", f"peak at t = {report.peak_time:.6g}"),
        ("M_1 lam^L", fmt(report.certified_bound), "-", f"margin {report.margin:.6g}"),
        ("envelope", "pass" if report.passed else "FAIL", "pass", ""),
    ]
    return rows, report


def cmd_example(samples: int = DEFAULT_SAMPLES) -> int:
    rows, report = example_rows(samples)
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    head = ("quantity", "computed", "printed", "note")
    widths = [max(w, len(h)) for w, h in zip(widths, head)]
    line = "  ".join(h.ljust(w) for h, w in zip(head[:3], widths)) + "  " + head[3]
    print(line)
    print("-" * len(line))
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r[:3], widths)) + "  " + r[3])
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_sweep(input_path, lambdas, out, samples=DEFAULT_SAMPLES, tol=None) -> int:
    try:
        plant, _, file_tol = load_plant_file(input_path)
    except InputError as exc:
        return _fail(EXIT_IO, str(exc))
    tol = tol if tol is not None else (file_tol if file_tol is not None else DEFAULT_RANK_TOL)
    out = Path(out)
    try:
        fh = open(out, "w", newline="")
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write {out}: {exc}")

    code = EXIT_OK
    with fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for lam in lambdas:
            try:
                cert = synthesize_gain(plant, lam, tol)
            except LambdaDomainError as exc:
                code = _fail(EXIT_LAMBDA, str(exc))
                break
            except (NotControllableError, ReductionError) as exc:
                code = _fail(EXIT_NOT_CONTROLLABLE, str(exc))
                break
            report = certificate_envelope(cert, base_samples=samples)
            w.writerow((
                fmt(cert.lambda_request), str(cert.l_exponent), fmt(cert.m_total),
                fmt(report.sup_ratio), fmt(report.peak_time), fmt(operator_norm(cert.k_gain)),
            ))
    if code != EXIT_OK:
        out.unlink(missing_ok=True)
    return code


def _finite_float(text: str) -> float:
    x = float(text)
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"{text} is not finite")
    return x


class _Parser(argparse.ArgumentParser):
    # argparse's default usage-error status (2) would collide with EXIT_NOT_CONTROLLABLE
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="overshoot",
        description="Pole placement with a certified polynomial overshoot bound.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="synthesize a gain and write its certificate")
    p.add_argument("input", help="plant JSON file")
    p.add_argument("--lambda", dest="lam", type=_finite_float, default=None)
    p.add_argument("--tol", type=_finite_float, default=None)
    p.add_argument("--out", default=None, help="certificate path (default: stdout)")

    p = sub.add_parser("verify", help="check a certificate's envelope numerically")
    p.add_argument("certificate")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--t-end", dest="t_end", type=_finite_float, default=None)
    p.add_argument("--out", default=None, help="trace CSV path")

    p = sub.add_parser("example", help="run the built-in 3-state example end to end")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)

    p = sub.add_parser("sweep", help="certificate and measured overshoot across several lambdas")
    p.add_argument("input")
    p.add_argument("--lambda", dest="lambdas", type=_finite_float, action="append", default=[])
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--tol", type=_finite_float, default=None)
    p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "synthesize":
        return cmd_synthesize(args.input, args.lam, args.out, args.tol)
    if args.command == "verify":
        return cmd_verify(args.certificate, args.samples, args.out, args.t_end)
    if args.command == "example":
        return cmd_example(args.samples)
    if args.command == "sweep":
        return cmd_sweep(args.input, args.lambdas, args.out, args.samples, args.tol)
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
