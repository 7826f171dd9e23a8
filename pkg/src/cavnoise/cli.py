"""Command-line front end.

Every subcommand prints a JSON report on stdout (or to ``--report``) and a
short human-readable table on stderr.  Exit codes: 0 success, 2 constraint
violation, 3 parse/IO error, 4 numeric domain error.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import cavity_commutator, extraction_efficiency, output_commutator_kernel, simulate
from .errors import CavityError, CoefficientError, DomainError, FormatError
from .families import FAMILIES
from .fileio import coefficients_to_dict, dumps, load_coefficients, load_scheme, save_coefficients
from .geometry import model_gram, reduce_basis
from .manifold import DEFAULT_FD_STEP, DEFAULT_RANK_RTOL, _DIMENSION_COUNTS, completeness_check
from .model import DEFAULT_TOL, constraint_residuals
from .oracle import convergence_study
from .schemes import compose

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_PARSE = 3
EXIT_DOMAIN = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _finite_or_none(obj):
    if isinstance(obj, dict):
        return {k: _finite_or_none(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_or_none(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _report(command: str, inputs=(), seed=None, **body) -> dict:
    return {
        "tool": "cavnoise",
        "version": __version__,
        "command": command,
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs],
        "seed": seed,
        **body,
    }


def _residual_table(c, tol: float) -> tuple[dict, str, bool]:
    rep = constraint_residuals(c, tol)
    lines = [f"{'residual':<24}{'value':>26}"]
    lines.append(f"{'decay':<24}{rep.decay_residual:>26.10g}")
    for i, u in enumerate(rep.unitarity_residual):
        lines.append(f"{f'unitarity[{i}]':<24}{u:>26.10g}")
    for i, x in enumerate(rep.cross_residual):
        lines.append(f"{f'cross[{i}] re':<24}{x.real:>26.10g}")
        lines.append(f"{f'cross[{i}] im':<24}{x.imag:>26.10g}")
    if rep.inequality_slacks is not None:
        for i, s in enumerate(rep.inequality_slacks, 1):
            lines.append(f"{f'slack{i}':<24}{s:>26.10g}")
    lines.append(f"{'physical':<24}{str(rep.passed):>26}")
    return rep.as_dict(), "\n".join(lines), rep.passed


def _positive(kind=float):
    def conv(s):
        try:
            v = kind(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
        if not (v > 0 and math.isfinite(v)):
            raise argparse.ArgumentTypeError(f"must be positive: {s!r}")
        return v

    return conv


def _nonneg(s):
    v = float(s)
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be non-negative: {s!r}")
    return v


def _complex_arg(s: str) -> complex:
    try:
        return complex(s.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}") from None


# -- subcommands ---------------------------------------------------------------

def run_compose(args):
    scheme = load_scheme(args.scheme)
    c = compose(scheme)
    save_coefficients(c, args.output)
    res, table, ok = _residual_table(c, args.tol)
    report = _report(
        "compose", [args.scheme], kind=scheme.kind, output=str(args.output),
        coefficients=coefficients_to_dict(c), residuals=res,
    )
    return report, table, EXIT_OK if ok else EXIT_VIOLATION


def run_verify(args):
    c = load_coefficients(args.coefficients)
    res, table, ok = _residual_table(c, args.tol)
    report = _report("verify", [args.coefficients], residuals=res, physical=ok)
    return report, table, EXIT_OK if ok else EXIT_VIOLATION


def run_rank(args):
    v = completeness_check(
        args.family, args.samples, args.seed, step=args.fd_step, rel_tol=args.rank_tol,
        target=args.target,
    )
    body = v.as_dict()
    body.pop("seed")
    report = _report("rank", seed=args.seed, fd_step=args.fd_step, rank_tol=args.rank_tol, **body)
    table = (
        f"family {v.family}: modal rank {v.rank} (expected {v.expected}) at "
        f"{v.fraction:.2%} of {v.samples_tested} samples, min gap {v.min_gap:.3g}, "
        f"complete={v.complete}"
    )
    return report, table, EXIT_OK


def run_simulate(args):
    c = load_coefficients(args.coefficients)
    n = int(round(args.t_max / args.dt))
    if n < 1:
        raise DomainError("t_max must cover at least one step")
    times = np.linspace(0.0, args.t_max, n + 1)
    drive_vals = args.drive if args.drive is not None else [0j] * c.n_ports
    if len(drive_vals) != c.n_ports:
        raise CoefficientError(f"--drive needs {c.n_ports} value(s), got {len(drive_vals)}")
    drive = None if not any(drive_vals) else (lambda t: drive_vals)
    traj = simulate(c, times, n0=args.n0, a0=args.a0, drive=drive)
    header = ["t", "re_mean", "im_mean", "photon_number"]
    header += [f"out_flux_p{i + 1}" for i in range(c.n_ports)]
    rows = [",".join(header)]
    for k in range(times.size):
        vals = [times[k], traj.mean_amp[k].real, traj.mean_amp[k].imag, traj.photon_number[k]]
        vals += list(traj.out_flux[:, k])
        rows.append(",".join(format(float(x), ".17g") for x in vals))
    Path(args.output).write_text("\n".join(rows) + "\n", encoding="utf-8")
    report = _report(
        "simulate", [args.coefficients], output=str(args.output), t_max=args.t_max, dt=args.dt,
        n0=args.n0, a0=args.a0, drive=list(drive_vals), n_rows=int(times.size),
        extraction_efficiency=[extraction_efficiency(c, i) for i in range(c.n_ports)],
        final_photon_number=float(traj.photon_number[-1]),
    )
    table = f"wrote {times.size} rows to {args.output}"
    return report, table, EXIT_OK


def run_reduce(args):
    c = load_coefficients(args.coefficients)
    r = reduce_basis(c)
    save_coefficients(r, args.output)
    gram_err = float(np.max(np.abs(model_gram(c) - model_gram(r))))
    res, table, ok = _residual_table(r, args.tol)
    report = _report(
        "reduce", [args.coefficients], output=str(args.output), noise_dim_before=c.noise_dim,
        noise_dim_after=r.noise_dim, gram_max_error=gram_err, residuals=res,
    )
    table = f"noise_dim {c.noise_dim} -> {r.noise_dim}, gram error {gram_err:.3g}\n" + table
    return report, table, EXIT_OK if ok else EXIT_VIOLATION


def run_commutator(args):
    c = load_coefficients(args.coefficients)
    if not 0 <= args.port < c.n_ports:
        raise CoefficientError(f"port {args.port} out of range for {c.n_ports} port(s)")
    if args.other is not None and not 0 <= args.other < c.n_ports:
        raise CoefficientError(f"port {args.other} out of range for {c.n_ports} port(s)")
    k = output_commutator_kernel(c, args.port, args.other)
    expected_singular = 1.0 if args.other in (None, args.port) else 0.0
    times = [0.0, 0.1 / c.gamma, 1.0 / c.gamma, 10.0 / c.gamma]
    cav = [cavity_commutator(c, t) for t in times]
    dev = max(
        abs(k.singular_coeff - expected_singular),
        abs(k.smooth_coeff), abs(k.transient_coeff),
        max(abs(x - 1.0) for x in cav),
    )
    body = {
        "port": args.port,
        "other": args.other,
        "kernel": {
            "singular_coeff": complex(k.singular_coeff),
            "smooth_coeff": k.smooth_coeff,
            "transient_coeff": k.transient_coeff,
            "smooth_coeff_reverse": k.smooth_coeff_reverse,
            "transient_coeff_reverse": k.transient_coeff_reverse,
            "pole": k.pole,
        },
        "cavity_commutator": {"times": times, "values": cav},
        "max_deviation": dev,
        "tol": args.tol,
    }
    if args.oracle_dt:
        body["oracle"] = convergence_study(c, args.oracle_dt, args.t_max, args.port)
    report = _report("commutator", [args.coefficients], **body)
    table = (
        f"singular {complex(k.singular_coeff):.17g}\nsmooth {k.smooth_coeff:.17g}\n"
        f"max deviation {dev:.3g}"
    )
    return report, table, EXIT_OK if dev <= args.tol else EXIT_VIOLATION


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cavnoise", description="Noisy cavity input-output models.")
    p.add_argument("--version", action="version", version=f"cavnoise {__version__}")
    p.add_argument("--report", type=Path, help="write the JSON report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("compose", help="compose coefficients from a scheme file")
    s.add_argument("scheme", type=Path)
    s.add_argument("-o", "--output", type=Path, required=True)
    s.add_argument("--tol", type=_positive(), default=DEFAULT_TOL)
    s.set_defaults(func=run_compose)

    s = sub.add_parser("verify", help="check a coefficient file against the constraints")
    s.add_argument("coefficients", type=Path)
    s.add_argument("--tol", type=_positive(), default=DEFAULT_TOL)
    s.set_defaults(func=run_verify)

    s = sub.add_parser("rank", help="Jacobian-rank completeness check of a scheme family")
    s.add_argument("--family", choices=sorted(FAMILIES), required=True)
    s.add_argument("--samples", type=_positive(int), default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--fd-step", type=_positive(), default=DEFAULT_FD_STEP)
    s.add_argument("--rank-tol", type=_positive(), default=DEFAULT_RANK_RTOL)
    s.add_argument("--target", choices=sorted(_DIMENSION_COUNTS), default="noisy_one_sided")
    s.set_defaults(func=run_rank)

    s = sub.add_parser("simulate", help="mean field and photon number on a uniform grid (CSV)")
    s.add_argument("coefficients", type=Path)
    s.add_argument("-o", "--output", type=Path, required=True)
    s.add_argument("--t-max", type=_positive(), default=5.0)
    s.add_argument("--dt", type=_positive(), default=0.01)
    s.add_argument("--n0", type=_nonneg, default=0.0)
    s.add_argument("--a0", type=_complex_arg, default=0j)
    s.add_argument("--drive", type=_complex_arg, nargs="+", help="constant drive amplitude per port")
    s.set_defaults(func=run_simulate)

    s = sub.add_parser("reduce", help="minimal noise basis with the same Gram data")
    s.add_argument("coefficients", type=Path)
    s.add_argument("-o", "--output", type=Path, required=True)
    s.add_argument("--tol", type=_positive(), default=DEFAULT_TOL)
    s.set_defaults(func=run_reduce)

    s = sub.add_parser("commutator", help="output commutator kernel, optionally with the binned oracle")
    s.add_argument("coefficients", type=Path)
    s.add_argument("--port", type=int, default=0)
    s.add_argument("--other", type=int, default=None)
    s.add_argument("--tol", type=_positive(), default=1e-12)
    s.add_argument("--oracle-dt", type=_positive(), nargs="*", default=None)
    s.add_argument("--t-max", type=_positive(), default=10.0)
    s.set_defaults(func=run_commutator)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"cavnoise: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report, table, code = args.func(args)
    except (FormatError, CoefficientError, OSError, UnicodeDecodeError) as exc:
        print(f"cavnoise: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, ArithmeticError) as exc:
        print(f"cavnoise: numeric error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except CavityError as exc:
        print(f"cavnoise: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception:
        # keep the exit-code contract even for unexpected failures
        traceback.print_exc()
        return EXIT_DOMAIN
    text = dumps(_finite_or_none(report))
    if args.report is not None:
        args.report.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(table, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
