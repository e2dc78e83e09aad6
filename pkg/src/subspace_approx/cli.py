"""Command-line interface: subspace-approx <command> [options].

Machine outputs (csv, json) embed the experiment descriptor hash and the
library version, use hex floats for reals and are written atomically.
Every common flag can also be set through SUBSPACE_APPROX_<FLAG> (for
example SUBSPACE_APPROX_PRECISION_BITS=256). Exit codes: 0 success,
1 internal error or exhausted work limit, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import __version__
from .angles import random_subspace
from .bounds import ProblemInstance, known_bounds, render_tables, tables_csv, tables_text
from .constructions.pipeline import CandidateNotFound, geometric_schedule, lower_bound_pipeline
from .constructions.r4 import construct_r4
from .constructions.r5 import construct_r5
from .constructions.spectrum import SpectrumConfig, spectrum_build
from .enumeration import (
    CSV_HEADER,
    DEFAULT_WORK_LIMIT,
    EnumerationPlan,
    WorkLimitExceeded,
    enumerate_subspaces,
    fit_exponent,
    frontier,
    records_from_csv,
)
from .exact_core import PreconditionError
from .grassmann import check_relations, from_basis, plucker_relations
from .serialization import atomic_write, canonical_json, content_hash, mpf_to_hex

ENV_PREFIX = "SUBSPACE_APPROX_"
EXIT_OK, EXIT_INTERNAL, EXIT_VALIDATION = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentDescriptor:
    command: str
    parameters: dict
    seed: int
    precision_bits: int
    height_max: str | None
    work_limit: int
    outputs: tuple = field(default=())

    def semantic(self) -> dict:
        """Fields that determine the output; paths and worker counts are excluded."""
        return {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "precision_bits": self.precision_bits,
            "height_max": self.height_max,
            "work_limit": self.work_limit,
        }

    @property
    def hash(self) -> str:
        return content_hash(self.semantic())


# -- argument parsing ----------------------------------------------------------------------


def _env(name: str, default, kind=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    try:
        return kind(raw)
    except ValueError as exc:
        raise UsageError(f"environment variable {ENV_PREFIX}{name.upper()}: {exc}") from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--precision-bits", type=int, default=_env("precision_bits", 128, int))
    parser.add_argument("--hmax", type=_rational, default=_env("hmax", None, _rational))
    parser.add_argument("--seed", type=int, default=_env("seed", 0, int))
    parser.add_argument("--work-limit", type=int, default=_env("work_limit", DEFAULT_WORK_LIMIT, int))
    parser.add_argument("--workers", type=int, default=_env("workers", os.cpu_count() or 1, int))
    parser.add_argument("--out", default=_env("out", None))
    parser.add_argument("--format", choices=("csv", "json", "table"), default=_env("format", None))
    parser.add_argument("--exact", action="store_true", default=_env("exact", False, lambda s: s == "1"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subspace-approx", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plucker", help="Plücker vector, relations and height of a rational basis")
    p.add_argument("--basis", help="columns separated by ';', entries by ',' (rationals allowed)")
    p.add_argument("--file", help="file with one basis column per line")
    _common(p)

    p = sub.add_parser("bounds", help="known bounds for an instance, or the tables")
    p.add_argument("instance", nargs="*", type=int, metavar="N D E J")
    p.add_argument("--table", type=int, metavar="N_MAX")
    p.add_argument("--table-min", type=int, default=2)
    _common(p)

    p = sub.add_parser("frontier", help="best-approximation frontier of a target subspace")
    _target_args(p)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--strategy", choices=("exhaustive", "heuristic"), default="exhaustive")
    p.add_argument("--effort", type=int, default=8)
    _common(p)

    p = sub.add_parser("fit", help="fit the exponent of a frontier CSV")
    p.add_argument("input", help="CSV with height_sq and psi_j columns")
    _common(p)

    p = sub.add_parser("construct", help="explicit constructions")
    kinds = p.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("r4")
    k.add_argument("--xi-squared", type=_rational, default=Fraction(2))
    _common(k)
    k = kinds.add_parser("r5")
    k.add_argument("--zeta3", type=_rational, default=Fraction(2))
    _common(k)
    k = kinds.add_parser("spectrum")
    k.add_argument("--l", type=int, default=1, dest="ell")
    k.add_argument("--beta", type=_rational, default=None, help="omit for the k^k tower")
    k.add_argument("--N", type=int, default=4, dest="count")
    k.add_argument("--truncation", type=int, default=None)
    _common(k)
    k = kinds.add_parser("pipeline")
    for name in ("n", "d", "e", "j"):
        k.add_argument(f"--{name}", type=int, required=True)
    k.add_argument("--q-start", type=int, default=10)
    k.add_argument("--q-stop", type=int, default=10**5)
    k.add_argument("--q-ratio", type=float, default=10**0.5)
    k.add_argument("--budget", type=_rational, default=Fraction(4))
    _common(k)

    p = sub.add_parser("enumerate", help="all rational subspaces up to a height")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    _common(p)
    return parser


def _target_args(p):
    p.add_argument("--target", choices=("r4", "spectrum", "random"), required=True)
    p.add_argument("--xi-squared", type=_rational, default=Fraction(2))
    p.add_argument("--l", type=int, default=1, dest="ell")
    p.add_argument("--beta", type=_rational, default=Fraction(3))
    p.add_argument("--truncation", type=int, default=4)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--d", type=int, default=2)


# -- output --------------------------------------------------------------------------------


def _emit(args, descriptor: ExperimentDescriptor, table: str, rows, header, payload: dict, partial=False):
    fmt = args.format or "table"
    meta = {"descriptor": descriptor.semantic(), "descriptor_hash": descriptor.hash, "version": __version__}
    if partial:
        meta["partial"] = True
    if fmt == "json":
        text = canonical_json({**meta, "result": payload}) + "\n"
    elif fmt == "csv":
        out = io.StringIO()
        out.write(f"# descriptor_hash={descriptor.hash}\n# version={__version__}\n")
        if partial:
            out.write("# partial=true\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        text = out.getvalue()
    else:
        text = table if table.endswith("\n") or not table else table + "\n"
        if args.out:
            lead = f"# descriptor_hash={descriptor.hash}\n# version={__version__}\n"
            text = lead + ("# partial=true\n" if partial else "") + text
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _descriptor(args, command: str, parameters: dict) -> ExperimentDescriptor:
    return ExperimentDescriptor(
        command,
        {k: (str(v) if isinstance(v, Fraction) else v) for k, v in parameters.items()},
        args.seed,
        args.precision_bits,
        None if args.hmax is None else str(args.hmax),
        args.work_limit,
        (args.out,) if args.out else (),
    )


def _parse_basis(text: str):
    columns = []
    for chunk in text.replace("\n", ";").split(";"):
        chunk = chunk.strip().strip("()")
        if chunk:
            columns.append([_rational(x) for x in chunk.replace(" ", ",").split(",") if x])
    if not columns or len({len(c) for c in columns}) != 1:
        raise UsageError("basis columns must be nonempty and of equal length")
    return [[int(x) if x.denominator == 1 else x for x in row] for row in zip(*columns)]


# -- commands ------------------------------------------------------------------------------


def cmd_plucker(args):
    if bool(args.basis) == bool(args.file):
        raise UsageError("give exactly one of --basis or --file")
    text = args.basis if args.basis else open(args.file, encoding="utf-8").read()
    matrix = _parse_basis(text)
    space = from_basis(matrix)
    check = check_relations(list(space.plucker), plucker_relations(space.e, space.n)) if 1 < space.e < space.n - 1 else None
    d = _descriptor(args, "plucker", {"basis": [[str(x) for x in row] for row in matrix]})
    with mpmath.workprec(args.precision_bits):
        height = space.height(args.precision_bits)
    table = "\n".join([
        f"plucker {' '.join(map(str, space.plucker))}",
        f"height_sq {space.height_squared}",
        f"height {mpmath.nstr(height, 20)}",
        f"relations {'none' if check is None else ('ok' if check.ok else 'violated')}",
        "zbasis " + "; ".join(",".join(map(str, col)) for col in space.columns()),
    ])
    rows = [[space.n, space.e, str(space.height_squared), " ".join(map(str, space.plucker))]]
    _emit(args, d, table, rows, ["n", "e", "height_sq", "plucker"],
          {**space.to_dict(), "height": mpf_to_hex(height)})


def cmd_bounds(args):
    if args.table is not None:
        if args.instance:
            raise UsageError("give either an instance or --table")
        if not 2 <= args.table_min <= args.table:
            raise UsageError("need 2 <= --table-min <= --table")
        rows = render_tables(args.table, args.table_min)
        d = _descriptor(args, "bounds", {"table": args.table, "table_min": args.table_min})
        text = tables_text(rows, args.exact)
        parsed = list(csv.reader(io.StringIO(tables_csv(rows))))
        payload = {"rows": [dict(zip(parsed[0], r)) for r in parsed[1:]]}
        _emit(args, d, text, parsed[1:], parsed[0], payload)
        return
    if len(args.instance) != 4:
        raise UsageError("expected N D E J or --table N_MAX")
    inst = ProblemInstance(*args.instance)
    b = known_bounds(inst)
    d = _descriptor(args, "bounds", {"instance": list(args.instance)})
    upper = "inf" if b.upper is None else str(b.upper)
    lines = [f"{b.lower} {upper}"]
    if not args.exact:
        lines.append(f"{float(b.lower):.6g} {'inf' if b.upper is None else f'{float(b.upper):.6g}'}")
    for c in b.contributions:
        if c.applies:
            lines.append(f"  {c.kind:5} {c.tag}: {c.value}")
    for name, value in b.annotations:
        lines.append(f"  note  {name}: {value}")
    payload = {
        "lower": str(b.lower),
        "upper": upper,
        "contributions": [
            {"tag": c.tag, "kind": c.kind, "value": None if c.value is None else str(c.value), "applies": c.applies}
            for c in b.contributions
        ],
        "annotations": {k: str(v) for k, v in b.annotations},
    }
    _emit(args, d, "\n".join(lines), [[*args.instance, str(b.lower), upper]],
          ["n", "d", "e", "j", "lower", "upper"], payload)


def _build_target(args):
    """(target subspace, optional Plücker structure, descriptor parameters)."""
    prec = args.precision_bits
    if args.target == "r4":
        with mpmath.workprec(prec):
            xi = mpmath.sqrt(mpmath.mpf(args.xi_squared.numerator) / args.xi_squared.denominator)
        c = construct_r4(xi, prec)
        return c.subspace, c.structure, {"target": "r4", "xi_squared": args.xi_squared}
    if args.target == "spectrum":
        cfg = SpectrumConfig(args.ell, args.beta, args.seed, 64)
        bits = max(prec, cfg.required_precision(args.truncation))
        state = spectrum_build(SpectrumConfig(args.ell, args.beta, args.seed, bits), args.truncation)
        return state.subspace, None, {"target": "spectrum", "ell": args.ell, "beta": args.beta,
                                      "truncation": args.truncation}
    rng = random.Random(args.seed)
    return random_subspace(args.n, args.d, rng, prec), None, {"target": "random", "n": args.n, "d": args.d}


def cmd_frontier(args):
    if args.hmax is None:
        raise UsageError("--hmax is required")
    target, structure, params = _build_target(args)
    params.update({"e": args.e, "j": args.j, "strategy": args.strategy, "effort": args.effort})
    d = _descriptor(args, "frontier", params)
    plan = EnumerationPlan(target.n, args.e, args.hmax, args.strategy, args.work_limit, args.workers, args.effort)
    if target.d + args.e != target.n:
        structure = None
    try:
        result = frontier(target, args.e, args.j, plan, structure=structure, prec=target.prec)
        records, partial, label = list(result.records), False, result.label
    except WorkLimitExceeded as exc:
        records, partial, label = list(exc.partial), True, "frontier"
    rows = [r.csv_row() for r in records]
    table = "\n".join(
        f"H^2={r.subspace.height_squared:>8} psi_{r.j}={mpmath.nstr(r.psi, 8):>14}  ({' '.join(map(str, r.subspace.plucker))})"
        for r in records
    )
    payload = {"label": label, "records": [dict(zip(CSV_HEADER, row)) for row in rows]}
    _emit(args, d, table, rows, CSV_HEADER, payload, partial)
    if partial:
        raise WorkLimitExceeded("work limit exceeded; partial frontier written")


def cmd_fit(args):
    try:
        text = open(args.input, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    lines = "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))
    with mpmath.workprec(args.precision_bits):
        pairs = [(mpmath.sqrt(h), p) for h, p in records_from_csv(lines)]
        fit = fit_exponent(pairs)
    d = _descriptor(args, "fit", {"input_hash": content_hash(lines)})
    table = f"beta {fit.beta:.6f}\nresidual {fit.residual:.3g}\nrecords {fit.records_used}\nmin_scaled {mpmath.nstr(fit.min_scaled, 8)}"
    _emit(args, d, table, [[repr(fit.beta), fit.records_used, repr(fit.residual)]],
          ["beta", "records_used", "residual"], fit.to_dict())


def cmd_construct(args):
    getattr(sys.modules[__name__], f"_construct_{args.kind}")(args)


def _construct_r4(args):
    prec = args.precision_bits
    with mpmath.workprec(prec):
        xi = mpmath.sqrt(mpmath.mpf(args.xi_squared.numerator) / args.xi_squared.denominator)
    c = construct_r4(xi, prec)
    d = _descriptor(args, "construct-r4", {"xi_squared": args.xi_squared})
    basis = [[mpf_to_hex(x) for x in col] for col in c.basis]
    table = "\n".join([f"xi {mpmath.nstr(c.xi, 20)}", f"sqrt(7 - xi^2) {mpmath.nstr(c.root, 20)}"]
                      + [f"X{i + 1} " + " ".join(mpmath.nstr(x, 12) for x in col) for i, col in enumerate(c.basis)])
    _emit(args, d, table, [[i + 1, *col] for i, col in enumerate(basis)], ["column", "x1", "x2", "x3", "x4"],
          {**c.descriptor(), "basis": basis})


def _construct_r5(args):
    prec = args.precision_bits if args.precision_bits > 128 else 256
    with mpmath.workprec(prec):
        zeta3 = mpmath.mpf(args.zeta3.numerator) / args.zeta3.denominator
    c = construct_r5(zeta3, prec)
    d = _descriptor(args, "construct-r5", {"zeta3": args.zeta3, "prec": prec})
    table = "\n".join(
        [f"zeta{i + 1} {mpmath.nstr(z, 20)}" for i, z in enumerate(c.zetas)]
        + [f"xi{i + 1} {mpmath.nstr(x, 20)}" for i, x in enumerate(c.xis)]
        + [f"max relation residual {mpmath.nstr(max(abs(r) for r in c.residuals), 5)}"]
    )
    rows = [[f"xi{i + 1}", mpf_to_hex(x)] for i, x in enumerate(c.xis)]
    payload = {
        **c.descriptor(),
        "zetas": [mpf_to_hex(z) for z in c.zetas],
        "xis": [mpf_to_hex(x) for x in c.xis],
        "residuals": [mpf_to_hex(r) for r in c.residuals],
    }
    _emit(args, d, table, rows, ["name", "value"], payload)


def _construct_spectrum(args):
    truncation = args.truncation or args.count + 1
    if args.count < 1 or truncation < args.count + 1:
        raise UsageError("need --N >= 1 and --truncation >= N + 1")
    probe = SpectrumConfig(args.ell, args.beta, args.seed, 64)
    bits = max(args.precision_bits, probe.required_precision(truncation))
    state = spectrum_build(SpectrumConfig(args.ell, args.beta, args.seed, bits), truncation)
    d = _descriptor(args, "construct-spectrum",
                    {"ell": args.ell, "beta": args.beta, "N": args.count, "truncation": truncation, "bits": bits})
    records = [state.record(N) for N in range(1, args.count + 1)]
    header = ["N", "minors_gcd", "height_squared", "height_ratio", "psi", "exponent", "scaled_psi"]
    rows = []
    for r in records:
        item = r.to_dict()
        rows.append([item[k] for k in header])
    table = "\n".join(
        f"N={r.N} gcd={r.minors_gcd} H/theta^(l a_N)={mpmath.nstr(r.height_ratio, 8)} "
        f"psi={mpmath.nstr(r.psi, 8)} exponent={mpmath.nstr(r.exponent, 10)}"
        for r in records
    )
    payload = {"config": state.config.descriptor(), "theta": state.config.theta,
               "records": [r.to_dict() for r in records]}
    _emit(args, d, table, rows, header, payload)


def _construct_pipeline(args):
    rng = random.Random(args.seed)
    target = random_subspace(args.n, args.d, rng, args.precision_bits)
    schedule = geometric_schedule(args.q_start, args.q_stop, args.q_ratio)
    d = _descriptor(args, "construct-pipeline", {
        "n": args.n, "d": args.d, "e": args.e, "j": args.j, "schedule": schedule, "budget": args.budget})
    emissions = list(lower_bound_pipeline(target, args.e, args.j, schedule, args.budget))
    header = ["Q", "q", "height_squared", "psi", "beta", "certificate", "plucker"]
    rows = []
    for em in emissions:
        item = em.to_dict()
        item["plucker"] = " ".join(item["plucker"])
        rows.append([item[k] for k in header])
    table = "\n".join(
        f"Q={em.Q:>8} q={em.q:>8} H^2={em.subspace.height_squared} psi_{args.j}={mpmath.nstr(em.psi, 8)} "
        f"psi*H^{em.beta}={mpmath.nstr(em.certificate, 8)}"
        for em in emissions
    )
    _emit(args, d, table, rows, header, {"emissions": [em.to_dict() for em in emissions]})


def cmd_enumerate(args):
    if args.hmax is None:
        raise UsageError("--hmax is required")
    plan = EnumerationPlan(args.n, args.e, args.hmax, "exhaustive", args.work_limit, args.workers)
    d = _descriptor(args, "enumerate", {"n": args.n, "e": args.e})
    spaces, partial = [], False
    try:
        for space in enumerate_subspaces(plan):
            spaces.append(space)
    except WorkLimitExceeded as exc:
        spaces, partial = exc.partial, True
    rows = [[s.n, s.e, str(s.height_squared), " ".join(map(str, s.plucker))] for s in spaces]
    table = "\n".join(f"{s.height_squared} {' '.join(map(str, s.plucker))}" for s in spaces)
    _emit(args, d, table, rows, ["n", "e", "height_sq", "plucker"],
          {"subspaces": [dict(zip(["n", "e", "height_sq", "plucker"], r)) for r in rows]}, partial)
    if partial:
        raise WorkLimitExceeded("work limit exceeded; partial enumeration written")


COMMANDS = {
    "plucker": cmd_plucker,
    "bounds": cmd_bounds,
    "frontier": cmd_frontier,
    "fit": cmd_fit,
    "construct": cmd_construct,
    "enumerate": cmd_enumerate,
}


def main(argv=None) -> int:
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    try:
        COMMANDS[args.command](args)
    except (UsageError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (WorkLimitExceeded, CandidateNotFound) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort reporting for the exit code contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
