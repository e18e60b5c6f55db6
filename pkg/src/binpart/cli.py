"""Command-line front end: sequences, verification campaigns, tables and figure data."""

from __future__ import annotations

import argparse
import csv
import inspect
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

SEQUENCES = ("b", "b3", "bm", "ptm", "T", "sigma", "chi", "beta", "f", "gaps", "c_a")


class UsageError(Exception):
    pass


def _load_registry():
    from .report import load_families

    return load_families()


def _resource_errors() -> tuple[type[BaseException], ...]:
    from .partitions import ResourceLimitError
    from .squares import FactorizationError, SearchBudgetExceeded

    return ResourceLimitError, FactorizationError, SearchBudgetExceeded, MemoryError


def _threads(value: int | None) -> int:
    if value is None:
        env = os.environ.get("BINPART_THREADS")
        try:
            value = int(env) if env else 1
        except ValueError:
            raise UsageError(f"BINPART_THREADS must be an integer, got {env!r}") from None
    if value < 1:
        raise UsageError("thread count must be at least 1")
    return value


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str | bytes, out_dir: str | None, filename: str) -> None:
    if out_dir is None:
        if isinstance(text, bytes):
            sys.stdout.buffer.write(text)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(text)
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    if isinstance(text, bytes):
        (path / filename).write_bytes(text)
    else:
        with open(path / filename, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("ranges must be non-negative")
    return v


# --- seq -------------------------------------------------------------------------------


def _seq_values(args) -> tuple[str, list[tuple[int, int]], object]:
    from . import characterizations as ch
    from . import partitions as pa
    from . import sequences as sq

    n = args.max
    name = args.name
    stream = None
    if name in ("b", "b3", "bm"):
        m = {"b": 1, "b3": 3}.get(name, args.m)
        if m is None:
            raise UsageError("seq bm needs --m")
        if args.mod is not None:
            stream = pa.bm_mod_stream(m, n, args.mod)
            vals = [int(v) for v in stream.values]
        else:
            vals = pa.b_stream(n) if m == 1 else pa.bm_stream(m, n)
        label = name if name != "bm" else f"b{m}"
        return label, list(enumerate(vals)), stream
    if args.format == "raw":
        raise UsageError("raw dumps exist for b, b3 and bm with --mod")
    if name == "ptm":
        return name, [(i, sq.ptm(i)) for i in range(n + 1)], None
    if name == "T":
        return name, [(i, sq.ptm_bit(i)) for i in range(n + 1)], None
    if name == "sigma":
        return name, [(i, sq.sigma(i)) for i in range(n + 1)], None
    if name == "chi":
        return name, [(i, int(v)) for i, v in enumerate(ch.s1_prime_array(n))], None
    if name == "beta":
        return name, [(i, int(v)) for i, v in enumerate(ch.beta_array(n))], None
    if name == "f":
        return name, [(r.index, r.f) for r in ch.f_and_gaps(n + 1)], None
    if name == "gaps":
        return name, [(r.index, r.g) for r in ch.f_and_gaps(n + 1)], None
    if name == "c_a":
        if args.a is None:
            raise UsageError("seq c_a needs --a (1, 3, 5 or 7)")
        return f"c_{args.a}", [(l, ch.c_a(args.a, l)) for l in range(n + 1)], None
    raise UsageError(f"unknown sequence {name!r}")


def cmd_seq(args) -> int:
    if args.mod is not None and args.name not in ("b", "b3", "bm"):
        raise UsageError("--mod applies to b, b3 and bm")
    if args.format == "raw" and args.mod is None:
        raise UsageError("--format raw needs --mod")
    label, rows, stream = _seq_values(args)
    if args.format == "raw":
        _emit(stream.to_bytes(), args.out, f"{label}.bin")
    elif args.format == "json":
        doc = {"sequence": label, "values": [v for _, v in rows]}
        if args.mod is not None:
            doc["modulus"] = 1 << args.mod
        _emit(json.dumps(doc) + "\n", args.out, f"{label}.json")
    else:
        _emit(_csv_text(["n", "value"], rows), args.out, f"{label}.csv")
    return EXIT_OK


# --- verify ----------------------------------------------------------------------------

# flag -> parameter names it may set, in order of preference
OVERRIDES = {
    "max": ("max", "x_max", "x"),
    "xmax": ("x_max", "x", "max"),
    "nmax": ("n_max",),
    "mmax": ("m_max",),
    "k": ("ks", "k"),
    "m": ("m", "ms"),
    "a": ("a",),
}


def _apply_overrides(fam, kwargs: dict, args) -> dict:
    params = inspect.signature(fam.run).parameters
    for flag, targets in OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        target = next((t for t in targets if t in params), None)
        if target is None:
            raise UsageError(f"--{flag} does not apply to family {fam.name!r}")
        kwargs[target] = (value,) if target in ("ks", "ms") else value
    if "seed" in params:
        kwargs["seed"] = args.seed
    return kwargs


def _run_family(fam, kwargs):
    try:
        return fam.run(**kwargs).to_dict(), None
    except _resource_errors() as exc:
        return {"family": fam.name, "range": kwargs, "status": "error", "error": str(exc)}, exc


def cmd_verify(args) -> int:
    from .characterizations import ALIASES

    registry = _load_registry()
    threads = _threads(args.threads)
    if args.all == bool(args.families):
        raise UsageError("name families to run, or pass --all")
    overrides = [f for f in OVERRIDES if getattr(args, f, None) is not None]
    if args.all:
        if overrides:
            raise UsageError("range overrides need named families, not --all")
        names = sorted(registry)
    else:
        names = []
        for given in args.families:
            name = ALIASES.get(given, given)
            if name not in registry:
                raise UsageError(f"unknown verifier family {given!r}")
            names.append(name)
    jobs = []
    for name in names:
        fam = registry[name]
        config = fam.small if args.budget == "small" else fam.full
        if config is None:
            if args.all:
                continue
            config = fam.full
        jobs.append((fam, _apply_overrides(fam, dict(config), args)))

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda job: _run_family(*job), jobs))

    lines = [json.dumps(doc, sort_keys=True, default=_jsonable) for doc, _ in results]
    text = "\n".join(lines) + "\n"
    _emit(text, args.out, "verify.jsonl")
    if args.out is not None:
        sys.stdout.write(text)
    statuses = [doc["status"] for doc, _ in results]
    if "fail" in statuses:
        return EXIT_FAIL
    if "error" in statuses:
        return EXIT_RESOURCE
    return EXIT_OK


def _jsonable(obj):
    from .report import _jsonable as conv

    return conv(obj)


# --- tables ----------------------------------------------------------------------------


def cmd_tables(args) -> int:
    from . import counting as co

    threads = _threads(args.threads)
    mismatches: list[str] = []
    which = args.which
    if which in ("T4", "T5", "T6"):
        if which == "T6":
            n_max = args.mmax if args.mmax is not None else 12
        else:
            n_max = args.nmax if args.nmax is not None else 12
        r2_values = co.r2_of_b2n(1 << n_max, args.checkpoint_dir, threads)
    if which == "T4":
        rows = co.table_T(n_max, r2_values)
        for n, t in rows:
            if n in co.TABLE4 and t != co.TABLE4[n]:
                mismatches.append(f"T(2^{n}) = {t}, table has {co.TABLE4[n]}")
        text = _csv_text(["n", "T2n"], rows)
    elif which == "T5":
        x = 1 << n_max
        rows = co.r2_stats(x, r2_values)
        first = {s: f for s, _, f in rows}
        for s, (_, n_i) in sorted(co.TABLE5.items()):
            if n_i <= x and first.get(s) != n_i:
                mismatches.append(f"s = {s}: first n = {first.get(s)}, table has {n_i}")
        for s in sorted(set(first) - set(co.TABLE5)):
            mismatches.append(f"s = {s} first at n = {first[s]} is not in the table")
        text = _csv_text(["s", "count", "first_n"], rows)
    elif which == "T6":
        ratios = co.table_T_ratios(co.table_T(n_max, r2_values))
        for m, r in ratios:
            if m in co.TABLE6 and abs(r - co.TABLE6[m]) > co.TABLE6_TOLERANCE:
                mismatches.append(f"m = {m}: ratio {r:.4f}, table has {co.TABLE6[m]:.2f}")
        text = _csv_text(["m", "ratio"], [(m, f"{r:.4f}") for m, r in ratios])
    else:
        n_max = args.nmax if args.nmax is not None else 1000
        got = co.representation_census(n_max, args.checkpoint_dir, threads)
        keys = ("three_squares", "x2y2z4", "x2y4z4")
        if n_max == 1000:
            for key in keys:
                if got[key] != co.CENSUS[key]:
                    mismatches.append(f"{key}: {got[key]}, expected {co.CENSUS[key]}")
        text = _csv_text(list(keys), [[got[k] for k in keys]])
    _emit(text, args.out, f"{which}.csv")
    for line in mismatches:
        print(f"mismatch: {line}", file=sys.stderr)
    return EXIT_FAIL if args.assert_ and mismatches else EXIT_OK


# --- figure / histogram ---------------------------------------------------------------


def cmd_figure(args) -> int:
    from .counting import figure_data

    xmax = args.xmax if args.xmax is not None else 1024
    if xmax < 1:
        raise UsageError("--xmax must be at least 1")
    _emit(figure_data(args.which, xmax).to_csv(), args.out, f"figure_{args.which}.csv")
    return EXIT_OK


def cmd_histogram(args) -> int:
    """Residues of b(n) modulo an odd m, for 0 <= n <= max."""
    from .partitions import b_stream

    m = args.mod
    if m is None or m < 3 or m % 2 == 0:
        raise UsageError("histogram needs an odd modulus --mod >= 3")
    counts = [0] * m
    for v in b_stream(args.max):
        counts[v % m] += 1
    _emit(_csv_text(["residue", "count"], enumerate(counts)), args.out, f"histogram_{m}.csv")
    return EXIT_OK


# --- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="binpart", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("seq", help="emit a sequence as n,value rows")
    s.add_argument("name", choices=SEQUENCES)
    s.add_argument("--max", type=_nonneg, default=20, help="last index (default 20)")
    s.add_argument("--m", type=int, help="number of colours for bm")
    s.add_argument("--a", type=int, help="residue class for c_a")
    s.add_argument("--mod", type=int, help="reduce b / b3 / bm mod 2^MOD")
    s.add_argument("--format", choices=("csv", "json", "raw"), default="csv")
    s.add_argument("--out", metavar="DIR")
    s.set_defaults(func=cmd_seq)

    v = sub.add_parser("verify", help="run verifier families, one JSON report per line")
    v.add_argument("families", nargs="*", help="family names or theorem aliases")
    v.add_argument("--all", action="store_true")
    v.add_argument("--budget", choices=("small", "full"), default="small")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--threads", type=int)
    for flag in ("max", "xmax", "nmax", "mmax", "k", "m", "a"):
        v.add_argument(f"--{flag}", type=_nonneg)
    v.add_argument("--out", metavar="DIR")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tables", help="reproduce the two-squares tables and the census")
    t.add_argument("which", choices=("T4", "T5", "T6", "census"))
    t.add_argument("--nmax", type=_nonneg)
    t.add_argument("--mmax", type=_nonneg)
    t.add_argument("--threads", type=int)
    t.add_argument("--checkpoint-dir", metavar="DIR")
    t.add_argument("--assert", dest="assert_", action="store_true", help="exit 1 on a mismatch")
    t.add_argument("--format", choices=("csv",), default="csv")
    t.add_argument("--out", metavar="DIR")
    t.set_defaults(func=cmd_tables)

    f = sub.add_parser("figure", help="count deviations and bound curves as CSV")
    f.add_argument("which", choices=("S1", "S3"))
    f.add_argument("--xmax", type=_nonneg)
    f.add_argument("--out", metavar="DIR")
    f.set_defaults(func=cmd_figure)

    h = sub.add_parser("histogram", help="b(n) mod an odd modulus")
    h.add_argument("--mod", type=int)
    h.add_argument("--max", type=_nonneg, default=10**4)
    h.add_argument("--out", metavar="DIR")
    h.set_defaults(func=cmd_histogram)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"binpart: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _resource_errors() as exc:
        print(f"binpart: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"binpart: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
