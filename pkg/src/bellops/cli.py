"""Command line entry point.

Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 bad
input or usage.  Reports are JSON; with ``--out`` the JSON goes to that
file and a short summary is printed, otherwise the JSON goes to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import cv_wh
from .bell_measure import bell_observable, observable_tensor_form, spectral_match, znzn_povm
from .errors import ConsistencyError, InjectivityError
from .matrix_core import DEFAULT_TOL, dumps, fro, is_density, matrix_from_dict, matrix_to_dict, random_density
from .spanning import SpanningSet, check_all, std_ent_check, transposer_check, znzn_basis
from .teleport import (
    KrausChannel,
    amplitude_damping,
    correlated_flip,
    depolarizing,
    fidelity_sweep,
    ideal_teleport,
    noisy_teleport,
    on_second,
)

TOL_ENV = "BELLOPS_TOL"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def default_tol():
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError(f"{TOL_ENV} must be positive")
    return tol


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def _load_matrix(path):
    try:
        return matrix_from_dict(_load_json(path))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _builtin_dim(name):
    kind, _, arg = name.partition(":")
    if kind != "znzn" or not arg.isdigit() or int(arg) < 1:
        raise UsageError(f"unknown builtin basis {name!r} (expected znzn:N)")
    return int(arg)


def _basis(args):
    if getattr(args, "builtin", None):
        return znzn_basis(_builtin_dim(args.builtin))
    try:
        return SpanningSet.from_dict(_load_json(args.file))
    except ValueError as exc:
        raise UsageError(f"{args.file}: {exc}") from None


def _emit(args, report, summary):
    text = dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(summary)
    else:
        print(text)


# -- subcommands -------------------------------------------------------------

def cmd_check_basis(args):
    s = _basis(args)
    reports = check_all(s, args.trials, args.seed, args.tol)
    reports += [std_ent_check(s, args.tol), transposer_check(s, args.trials, args.seed, args.tol)]
    passed = all(r.passed for r in reports)
    report = {
        "command": "check-basis",
        "dim": s.dim,
        "size": len(s),
        "seed": args.seed,
        "checks": [r.to_dict() for r in reports],
        "pass": passed,
    }
    lines = [f"{r.statement:>10}: {'pass' if r.passed else 'FAIL'}  residual={r.max_residual:.3e}" for r in reports]
    _emit(args, report, "\n".join(lines))
    return EXIT_OK if passed else EXIT_FAIL


def _channel(args, n):
    if args.channel and args.channel_builtin:
        raise UsageError("give either --channel or --channel-builtin, not both")
    if args.channel:
        try:
            return KrausChannel.from_dict(_load_json(args.channel))
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"{args.channel}: {exc}") from None
    if args.channel_builtin:
        kind, _, arg = args.channel_builtin.partition(":")
        try:
            x = float(arg)
        except ValueError:
            raise UsageError(f"bad channel parameter in {args.channel_builtin!r}") from None
        try:
            if kind == "amp-damp":
                if n != 2:
                    raise UsageError("amp-damp is a qubit channel")
                return on_second(amplitude_damping(x), n)
            if kind == "depol":
                return on_second(depolarizing(n, x), n)
            if kind == "flip":
                if n != 2:
                    raise UsageError("flip is a two-qubit channel")
                return correlated_flip(x)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        raise UsageError(f"unknown builtin channel {kind!r} (amp-damp, depol, flip)")
    return None


def _rho(args):
    source = args.rho
    if source.startswith("random:"):
        arg = source.partition(":")[2]
        if not arg.isdigit() or int(arg) < 1:
            raise UsageError(f"bad random state source {source!r}")
        return random_density(int(arg), args.seed)
    rho = _load_matrix(source)
    if not is_density(rho, max(args.tol, 1e-8)):
        raise UsageError(f"{source}: not a valid density matrix")
    return rho


def cmd_teleport(args):
    rho = _rho(args)
    n = rho.shape[0]
    basis = znzn_basis(_builtin_dim(args.basis)) if args.basis else znzn_basis(n)
    if basis.dim != n:
        raise UsageError(f"basis dimension {basis.dim} does not match rho dimension {n}")
    channel = _channel(args, n)
    if channel is not None and channel.dim != n * n:
        raise UsageError(f"channel acts on dimension {channel.dim}, expected {n * n}")
    v = None
    if args.resource:
        if channel is not None:
            raise UsageError("--resource cannot be combined with a noise channel")
        v = _load_matrix(args.resource)
        if v.shape != (n, n):
            raise UsageError(f"resource is {v.shape}, expected {(n, n)}")
    try:
        if channel is None:
            records = ideal_teleport(rho, basis, v, args.tol)
        else:
            records = noisy_teleport(rho, basis, channel, args.tol)
    except ConsistencyError as exc:
        print(f"consistency check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = [r.to_dict(reference=rho) for r in records]
    fids = [r["fidelity"] for r in out if r["fidelity"] is not None]
    ok = True
    if channel is None:
        ok = all(abs(1 - f) < 1e-8 for f in fids)
    report = {
        "command": "teleport",
        "dim": n,
        "seed": args.seed,
        "input": matrix_to_dict(rho),
        "noisy": channel is not None,
        "records": out,
        "min_fidelity": min(fids),
        "total_probability": float(sum(r["probability"] for r in out)),
        "pass": ok,
    }
    _emit(args, report, f"{len(out)} outcomes, min corrected fidelity {min(fids):.12f}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_fidelity_sweep(args):
    eps = args.eps
    if any(not 0 <= e < 1 for e in eps):
        raise UsageError("epsilon values must lie in [0, 1)")
    rows = fidelity_sweep(eps, args.grid_size)
    dev_a = max(abs(r["F_analytic"] - r["F_expected"]) for r in rows)
    dev_b = max(abs(r["F_brute"] - r["F_expected"]) for r in rows)
    passed = dev_a < 1e-9 and dev_b < 1e-6
    report = {
        "command": "fidelity-sweep",
        "grid_size": args.grid_size,
        "rows": rows,
        "max_dev_analytic": dev_a,
        "max_dev_brute": dev_b,
        "pass": passed,
    }
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("epsilon,F_analytic,F_brute,F_expected\n")
            for r in rows:
                fh.write(f"{r['epsilon']!r},{r['F_analytic']!r},{r['F_brute']!r},{r['F_expected']!r}\n")
    _emit(args, report, f"max |F-(1-eps^2)|: analytic {dev_a:.3e}, brute {dev_b:.3e}")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_observable(args):
    n = args.dim
    if n < 1:
        raise UsageError("--dim must be >= 1")
    if args.f:
        raw = _load_json(args.f)
        f = raw.get("f") if isinstance(raw, dict) else raw
        try:
            f = np.asarray(f, dtype=float).reshape(-1)
        except (TypeError, ValueError):
            raise UsageError(f"{args.f}: f must be a list of real numbers") from None
        if f.size != n * n:
            raise UsageError(f"{args.f}: expected {n * n} values, got {f.size}")
    else:
        f = np.random.default_rng(args.seed).standard_normal(n * n)
    povm = znzn_povm(n)
    try:
        obs = bell_observable(povm, f)
    except InjectivityError as exc:
        print(str(exc), file=sys.stderr)
        _emit(args, {"command": "observable", "dim": n, "error": str(exc), "pass": False}, str(exc))
        return EXIT_FAIL
    tensor = observable_tensor_form(n, f)
    resid = fro(obs.operator - tensor)
    _, mismatch = spectral_match(obs, povm)
    passed = resid < args.tol and mismatch < args.tol
    report = {
        "command": "observable",
        "dim": n,
        "f": [float(x) for x in f],
        "direct": matrix_to_dict(obs.operator),
        "tensor": matrix_to_dict(tensor),
        "spectrum": [float(x) for x in np.linalg.eigvalsh(obs.operator)],
        "form_residual": resid,
        "eigenprojector_mismatch": mismatch,
        "pass": passed,
    }
    _emit(args, report, f"direct vs tensor residual {resid:.3e}, projector mismatch {mismatch:.3e}")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_cv_check(args):
    ladder = args.nmax_ladder
    if ladder != sorted(ladder) or len(set(ladder)) != len(ladder):
        raise UsageError("--nmax-ladder must be strictly ascending")
    if args.interior_cut >= ladder[0]:
        raise UsageError("--interior-cut must be below every n_max in the ladder")
    z = complex(args.z_re, args.z_im)
    eig = cv_wh.eigen_ladder(z, ladder, args.interior_cut)
    res = [row["residual"] for row in eig]
    ok = cv_wh.decreasing(res)
    report = {"command": "cv-check", "eigen_relation": eig, "eigen_decreasing": ok}
    if args.spacings:
        a_op = cv_wh.fock_projector(0, 0, args.quad_nmax)
        quad = cv_wh.quadrature_ladder(a_op, args.radius, args.spacings, args.quad_nmax, args.quad_cut)
        qres = [row["residual"] for row in quad]
        report["quadrature"] = quad
        report["quadrature_decreasing"] = cv_wh.decreasing(qres, floor=0.0)
        ok = ok and report["quadrature_decreasing"]
    report["pass"] = ok
    lines = [f"n_max={r['n_max']:>4}  eigen residual {r['residual']:.3e}" for r in eig]
    lines += [f"spacing={r['spacing']:<6} quadrature residual {r['residual']:.3e}" for r in report.get("quadrature", [])]
    _emit(args, report, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed")
    common.add_argument("--tol", type=float, default=None, help=f"tolerance (default {DEFAULT_TOL:g} or ${TOL_ENV})")
    common.add_argument("--out", help="write the JSON report here")

    p = argparse.ArgumentParser(prog="bellops", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check-basis", parents=[common], help="run the completeness checks on a spanning set")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--builtin", help="builtin set, e.g. znzn:3")
    g.add_argument("--file", help="spanning-set JSON file")
    c.add_argument("--trials", type=int, default=20)
    c.set_defaults(func=cmd_check_basis)

    t = sub.add_parser("teleport", parents=[common], help="simulate teleportation of a state")
    t.add_argument("--rho", required=True, help="density-matrix JSON file, or random:N")
    t.add_argument("--basis", help="builtin basis znzn:N (default matches rho)")
    t.add_argument("--resource", help="unitary V for the resource |V>>/sqrt(N)")
    t.add_argument("--channel", help="Kraus JSON file for noise on the resource")
    t.add_argument("--channel-builtin", help="amp-damp:GAMMA, depol:P (on system 3) or flip:P")
    t.set_defaults(func=cmd_teleport)

    f = sub.add_parser("fidelity-sweep", parents=[common], help="minimum fidelity for diag(1+eps, 1-eps) resources")
    f.add_argument("--eps", type=_floats, default=[round(0.1 * k, 1) for k in range(10)])
    f.add_argument("--grid-size", type=int, default=256)
    f.add_argument("--csv", help="also write the table as CSV")
    f.set_defaults(func=cmd_fidelity_sweep)

    o = sub.add_parser("observable", parents=[common], help="build a Bell observable for znzn:N")
    o.add_argument("--dim", type=int, required=True)
    o.add_argument("--f", help="JSON list (or {'f': [...]}) of N^2 eigenvalues, row-major in (m, n)")
    o.set_defaults(func=cmd_observable)

    v = sub.add_parser("cv-check", parents=[common], help="truncated Weyl-Heisenberg convergence tables")
    v.add_argument("--z-re", type=float, default=2.0)
    v.add_argument("--z-im", type=float, default=0.0)
    v.add_argument("--nmax-ladder", type=_ints, default=[40, 60, 80])
    v.add_argument("--interior-cut", type=int, default=36)
    v.add_argument("--radius", type=float, default=6.0)
    v.add_argument("--spacings", type=_floats, default=[1.0, 0.5, 0.25])
    v.add_argument("--quad-nmax", type=int, default=60)
    v.add_argument("--quad-cut", type=int, default=10)
    v.set_defaults(func=cmd_cv_check)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.tol is None:
            args.tol = default_tol()
        elif not args.tol > 0:
            raise UsageError("--tol must be positive")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
