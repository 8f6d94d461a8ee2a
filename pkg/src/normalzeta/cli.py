"""Command-line interface: normalzeta {pfaffian,fano,zeta,oracle,check,analyze}."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import guards
from .analysis import analysis_report
from .fpgeom import NeedsComponentData, fano_data, fano_table, parse_supplied
from .oracle import dirichlet_coeffs_direct, dirichlet_coeffs_lattice
from .polyring import series_expand
from .presentation import PRESET_NAMES, ValidationError, check, load_file, load_preset, pfaffian
from .zeta import Y_CONVENTIONS, MissingFanoData, assemble

EXIT_OK, EXIT_INTERNAL, EXIT_VALIDATION, EXIT_GUARD, EXIT_MISSING, EXIT_MISMATCH = range(6)

DEFAULT_PRIMES = "2,3,5,7"


class UsageError(ValueError):
    """Inconsistent command-line options."""


def _primes(text: str) -> list[int]:
    out = [int(x) for x in text.split(",") if x.strip()]
    for p in out:
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise argparse.ArgumentTypeError(f"{p} is not prime")
    if len(set(out)) != len(out):
        raise argparse.ArgumentTypeError("primes must be distinct")
    return out


def _prime(text: str) -> int:
    return _primes(text)[0]


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="normalzeta", description="Local normal zeta functions of class-two nilpotent groups.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--preset", help=f"one of {', '.join(PRESET_NAMES)} (suffix +zM adds Z^M)")
        src.add_argument("--file", type=Path, help="presentation file")
        sp.add_argument("--force", action="store_true", help="ignore enumeration guards")

    def fano_opts(sp):
        sp.add_argument("--primes", type=_primes, default=_primes(DEFAULT_PRIMES),
                        help=f"primes for Fano classification (default {DEFAULT_PRIMES})")
        sp.add_argument("--supplied", type=Path, help="component data: lines 'i corank dim count@p ...'")

    sp = sub.add_parser("pfaffian", help="print the Pfaffian polynomial")
    common(sp)
    sp.add_argument("--format", choices=["text", "latex"], default="text")

    sp = sub.add_parser("fano", help="CSV of plane counts by level and corank")
    common(sp)
    sp.add_argument("--primes", type=_primes, default=_primes("2,3,5"))
    sp.add_argument("--level", type=int, action="append", help="level i (planes of dimension i-1); repeatable")

    sp = sub.add_parser("zeta", help="assemble the closed form")
    common(sp)
    fano_opts(sp)
    sp.add_argument("--format", choices=["text", "latex", "csv"], default="text")
    sp.add_argument("--prime", type=_prime, help="fix point counts (and csv coefficients) at this prime")
    sp.add_argument("-K", type=_nonneg, default=8, help="series length for csv")
    sp.add_argument("--convention", choices=Y_CONVENTIONS, default="dimension")
    sp.add_argument("--metadata", action="store_true", help="print numerical data and deviation log")

    sp = sub.add_parser("oracle", help="brute-force Dirichlet coefficients")
    common(sp)
    sp.add_argument("--prime", type=_prime, required=True)
    sp.add_argument("-K", type=_nonneg, default=6)
    sp.add_argument("--direct", action="store_true", help="also run the direct ideal counter")
    sp.add_argument("--mode", choices=["pruned", "exhaustive"], default="pruned")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--compare", action="store_true", help="diff against the assembled closed form")
    sp.add_argument("--primes", type=_primes, default=_primes(DEFAULT_PRIMES), help=argparse.SUPPRESS)
    sp.add_argument("--supplied", type=Path, help=argparse.SUPPRESS)

    sp = sub.add_parser("check", help="closed form against the lattice oracle")
    common(sp)
    sp.add_argument("--primes", type=_primes, default=_primes("2,3"), help="primes to check")
    sp.add_argument("--fano-primes", type=_primes, default=_primes(DEFAULT_PRIMES))
    sp.add_argument("--supplied", type=Path)
    sp.add_argument("-K", type=_nonneg, default=8)
    sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("analyze", help="abscissa, poles and functional equation")
    common(sp)
    fano_opts(sp)
    return ap


def _load(args):
    pres = load_preset(args.preset) if args.preset else load_file(args.file)
    return check(pres)


def _fano(args, pres, primes=None):
    supplied = parse_supplied(args.supplied.read_text()) if getattr(args, "supplied", None) else None
    return fano_data(pres, primes or args.primes, supplied, args.force)


def _write_csv(header, rows):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def cmd_pfaffian(args) -> int:
    pf = pfaffian(_load(args))
    print(pf.poly.to_latex() if args.format == "latex" else pf.poly.to_text())
    return EXIT_OK


def cmd_fano(args) -> int:
    pres = _load(args)
    levels = args.level or list(range(1, pres.dprime))
    for i in levels:
        if not 1 <= i <= pres.dprime:
            raise UsageError(f"level {i} outside 1..{pres.dprime}")
    rows = fano_table(pres, levels, args.primes, args.force)
    _write_csv(["prime", "i", "corank", "count", "inferred_dimension"],
               [[r["prime"], r["i"], r["corank"], r["count"],
                 "" if r["inferred_dimension"] is None else r["inferred_dimension"]] for r in rows])
    return EXIT_OK


def cmd_zeta(args) -> int:
    pres = _load(args)
    fd = _fano(args, pres)
    z = assemble(pres, fd, prime=args.prime, convention=args.convention)
    if args.format == "csv":
        if args.prime is None:
            raise UsageError("zeta --format csv needs --prime")
        _write_csv(["k", "a_p^k"], enumerate(z.series(args.K)))
        return EXIT_OK
    show = (lambda f: f.to_latex()) if args.format == "latex" else (lambda f: f.to_text())
    print(f"# {pres.name or 'presentation'}: d={pres.d} d'={pres.dprime} m={pres.m}")
    print(f"prefactor abelian = {show(z.prefactors[0])}")
    print(f"prefactor homothety = {show(z.prefactors[1])}")
    print(f"W0 = {show(z.W0)}")
    for cls, W in z.W_components:
        n = z.counts[cls.key]
        print(f"W[i={cls.i}, corank={cls.corank}, dim={cls.dimension}] (count {n.to_text() if hasattr(n, 'to_text') else n}) = {show(W)}")
    print(f"A = {show(z.A)}")
    print(f"zeta = {show(z.zeta)}")
    if args.metadata:
        for line in z.metadata():
            print(f"# {line}")
    return EXIT_OK


def _first_diff(a, b):
    return next((k for k, (x, y) in enumerate(zip(a, b)) if x != y), None)


def cmd_oracle(args) -> int:
    pres = _load(args)
    lat = dirichlet_coeffs_lattice(pres, args.prime, args.K, args.jobs, args.force)
    header, cols = ["k", "lattice"], [lat]
    if args.direct:
        header.append("direct")
        cols.append(dirichlet_coeffs_direct(pres, args.prime, args.K, args.mode, args.force))
    if args.compare:
        fd = _fano(args, pres)
        try:
            z = assemble(pres, fd)
        except MissingFanoData:
            z = assemble(pres, fd, prime=args.prime)
        header.append("closed")
        cols.append(series_expand(z.zeta, args.K, args.prime))
    _write_csv(header, [[k] + [c[k] for c in cols] for k in range(args.K + 1)])
    for c in cols[1:]:
        k = _first_diff(lat, c)
        if k is not None:
            print(f"MISMATCH at k={k}", file=sys.stderr)
            return EXIT_MISMATCH
    return EXIT_OK


def cmd_check(args) -> int:
    pres = _load(args)
    fd = _fano(args, pres, args.fano_primes)
    z = assemble(pres, fd)
    status = EXIT_OK
    for p in args.primes:
        closed = z.series(args.K, p)
        lat = dirichlet_coeffs_lattice(pres, p, args.K, args.jobs, args.force)
        k = _first_diff(closed, lat)
        if k is None:
            print(f"p={p} K={args.K}: MATCH")
        else:
            print(f"p={p} K={args.K}: MISMATCH at k={k} (closed {closed[k]}, oracle {lat[k]})")
            status = EXIT_MISMATCH
    return status


def cmd_analyze(args) -> int:
    pres = _load(args)
    fd = _fano(args, pres)
    z = assemble(pres, fd)
    for line in analysis_report(z, fd):
        print(line)
    return EXIT_OK


COMMANDS = {"pfaffian": cmd_pfaffian, "fano": cmd_fano, "zeta": cmd_zeta, "oracle": cmd_oracle,
            "check": cmd_check, "analyze": cmd_analyze}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        for v in exc.violations:
            print(f"validation: {v}", file=sys.stderr)
        return EXIT_VALIDATION
    except guards.ResourceGuardError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (NeedsComponentData, MissingFanoData) as exc:
        print(f"missing data: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
