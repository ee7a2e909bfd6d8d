"""Command line: match, oracle, compare, decompose and bench.

Exit status is 0 on success, 2 on usage errors and 3 on runtime failures.
"""

from __future__ import annotations

import argparse
import codecs
import dataclasses
import csv
import json
import math
import os
import random
import stat
import sys
import time
from typing import IO, Iterator, Sequence

from .bk_decompose import DecompParams, decompose_batch
from .grammar_core import dump
from .oracle import BudgetExceeded, oracle_all_positions
from .rand_hash import SeedTree
from .stream_matcher import INF, Ensemble, EnsembleFailure, MatchConfig, StreamTooLong
from .workloads import planted_case

EXIT_USAGE = 2
EXIT_RUNTIME = 3

ENGINES = ("reference",)


class UsageError(Exception):
    pass


# -- input ----------------------------------------------------------------


def _open_binary(path: str) -> IO[bytes]:
    if path == "-":
        return sys.stdin.buffer
    return open(path, "rb")


def stream_symbols(fh: IO[bytes], utf8: bool = False, limit: int | None = None) -> Iterator[str]:
    """Yield symbols one at a time: bytes as chr(0..255), or UTF-8 code points."""
    dec = codecs.getincrementaldecoder("utf-8")() if utf8 else None
    n = 0
    while limit is None or n < limit:
        b = fh.read(1)
        if not b:
            break
        if dec is None:
            n += 1
            yield chr(b[0])
            continue
        for ch in dec.decode(b):
            n += 1
            yield ch
    if dec is not None:
        try:
            tail = dec.decode(b"", final=True)
        except UnicodeDecodeError as exc:
            raise OSError(f"invalid UTF-8 after {n} symbols: {exc}") from exc
        yield from tail


def _read_all(path: str, utf8: bool, limit: int | None = None) -> str:
    fh = _open_binary(path)
    try:
        return "".join(stream_symbols(fh, utf8, limit))
    finally:
        if fh is not sys.stdin.buffer:
            fh.close()


def _file_size(path: str) -> int | None:
    if path == "-":
        return None
    st = os.stat(path)
    return st.st_size if stat.S_ISREG(st.st_mode) else None


# -- output ---------------------------------------------------------------


def _fmt_record(pos: int, dist: float, fmt: str) -> str:
    finite = dist != INF
    if fmt == "json":
        return json.dumps({"pos": pos, "dist": int(dist) if finite else None, "finite": finite})
    return f"{pos}\t{int(dist) if finite else '>k'}"


# -- config ---------------------------------------------------------------


def _add_match_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-k", type=int, required=True, help="edit threshold (k >= 0)")
    p.add_argument("--N", type=int, default=None, help="bound on |P| + |T| (default: from file sizes)")
    p.add_argument("--seed", type=int, default=None, help="master seed (env STREAMEDIT_SEED)")
    p.add_argument("--copies", type=int, default=None, help="ensemble size (env STREAMEDIT_COPIES)")
    p.add_argument("--beta", type=int, default=None, help="target block length")
    p.add_argument("--rwin", type=int, default=None, help="definiteness window R in blocks")
    p.add_argument("--scap", type=int, default=None, help="grammar size cap S")
    p.add_argument("--independence", type=int, default=None, help="independence degree of the marking hashes")
    p.add_argument("--failure-exponent", type=int, default=2, help="failure budgets use N**e")
    p.add_argument("--engine", choices=ENGINES, default="reference")


def _config(args: argparse.Namespace, N: int) -> MatchConfig:
    if args.k < 0:
        raise UsageError("k must be non-negative")
    for name in ("copies", "beta", "rwin", "scap", "independence"):
        v = getattr(args, name)
        if v is not None and v < 1:
            raise UsageError(f"--{name} must be positive")
    if args.failure_exponent < 1:
        raise UsageError("--failure-exponent must be positive")
    try:
        return MatchConfig.from_env(
            k=args.k,
            N=max(N, 1),
            seed=args.seed,
            copies=args.copies,
            beta=args.beta,
            R=args.rwin,
            S=args.scap,
            independence=args.independence,
            failure_exponent=args.failure_exponent,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# -- subcommands ----------------------------------------------------------


def _pattern_and_text(args: argparse.Namespace) -> tuple[str, Iterator[str], int | None, object]:
    """Pattern string, text symbol iterator, text length bound if known, and the handle to close."""
    src = args.text
    fh = _open_binary(src)
    if args.pattern is not None:
        P = _read_all(args.pattern, args.utf8, args.pattern_len)
    elif args.pattern_len is not None:
        P = "".join(stream_symbols(fh, args.utf8, args.pattern_len))
    else:
        raise UsageError("give --pattern or --pattern-len")
    size = _file_size(src)
    return P, stream_symbols(fh, args.utf8), size, fh


def cmd_match(args: argparse.Namespace, out: IO[str]) -> int:
    P, text, tsize, fh = _pattern_and_text(args)
    try:
        N = args.N if args.N is not None else len(P) + (tsize if tsize is not None else 1 << 20)
        cfg = _config(args, N)
        ens = Ensemble(cfg)
        for a in P:
            ens.push_pattern_symbol(a)
        ens.end_pattern()
        for pos, a in enumerate(text, 1):
            out.write(_fmt_record(pos, ens.push_text_symbol(a), args.format) + "\n")
    finally:
        if fh is not sys.stdin.buffer:
            fh.close()
    return 0


def cmd_oracle(args: argparse.Namespace, out: IO[str]) -> int:
    P = _read_all(args.pattern, args.utf8)
    T = _read_all(args.text, args.utf8)
    row = oracle_all_positions(P, T, args.budget)
    for pos, d in enumerate(row, 1):
        if args.format == "json":
            out.write(json.dumps({"pos": pos, "dist": d, "finite": True}) + "\n")
        else:
            out.write(f"{pos}\t{d}\n")
    return 0


def _compare_one(P: str, T: str, cfg: MatchConfig) -> tuple[int, int, int]:
    """(agreeing positions, sound positions, positions) for one pattern/text pair."""
    orc = oracle_all_positions(P, T)
    ens = Ensemble(cfg)
    for a in P:
        ens.push_pattern_symbol(a)
    ens.end_pattern()
    agree = sound = 0
    for a, o in zip(T, orc):
        v = ens.push_text_symbol(a)
        want = o if o <= cfg.k else INF
        agree += v == want
        sound += v >= o
    return agree, sound, len(T)


def cmd_compare(args: argparse.Namespace, out: IO[str]) -> int:
    cases: list[tuple[str, str]] = []
    if args.random:
        rnd = random.Random(args.seed or 0)
        for _ in range(args.random):
            c = planted_case(
                rnd,
                sigma=args.alphabet,
                k=args.k,
                pattern_len=(args.pattern_min, args.pattern_max),
                prefix_len=(20, 200),
                suffix_len=(20, 200),
            )
            cases.append((c.pattern, c.text))
    else:
        if args.pattern is None or args.text is None:
            raise UsageError("compare needs --pattern and --text, or --random")
        cases.append((_read_all(args.pattern, args.utf8), _read_all(args.text, args.utf8)))
    agree = sound = total = 0
    for i, (P, T) in enumerate(cases):
        N = args.N if args.N is not None else len(P) + len(T)
        cfg = _config(args, N)
        if args.random:
            cfg = dataclasses.replace(cfg, seed=cfg.seed + i)
        a, s, n = _compare_one(P, T, cfg)
        agree, sound, total = agree + a, sound + s, total + n
    t = max(total, 1)
    out.write(f"cases={len(cases)} positions={total} agree={agree / t:.6f} sound={sound / t:.6f}\n")
    return 0


def cmd_decompose(args: argparse.Namespace, out: IO[str]) -> int:
    x = _read_all(args.input, args.utf8)
    if args.k < 0:
        raise UsageError("k must be non-negative")
    n = args.n if args.n is not None else max(len(x), 2)
    try:
        params = DecompParams.for_bounds(
            n, args.k, SeedTree(args.seed or 0), beta=args.beta, R=args.rwin, S=args.scap,
            independence=args.independence,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    bs = decompose_batch(x, params)
    if args.json:
        blocks = [
            {"index": i + 1, "start": lo + 1, "end": hi, "size": g.size, "oversize": i in bs.oversize}
            for i, ((lo, hi), g) in enumerate(zip(bs.intervals, bs.grammars))
        ]
        json.dump({"length": bs.total_len, "blocks": blocks, "S": params.S, "beta": params.beta}, out)
        out.write("\n")
        return 0
    out.write(f"length {bs.total_len} blocks {len(bs)} S {params.S} beta {params.beta}\n")
    for i, ((lo, hi), g) in enumerate(zip(bs.intervals, bs.grammars)):
        flag = " OVERSIZE" if i in bs.oversize else ""
        out.write(f"block {i + 1} [{lo + 1},{hi}] size {g.size}{flag}\n")
        if not args.no_dump:
            for line in dump(g).splitlines():
                out.write(f"  {line}\n")
    return 0


def _percentile(xs: Sequence[float], q: float) -> float:
    s = sorted(xs)
    if not s:
        return 0.0
    return s[min(len(s) - 1, int(math.ceil(q * len(s))) - 1)]


def bench_run(
    k: int,
    text_len: int,
    pattern_len: int,
    sigma: int,
    seed: int,
    copies: int | None,
    sample_every: int = 100,
    N: int | None = None,
    **knobs,
) -> dict:
    """Time one matcher run on a random text with a planted occurrence and track peak state sizes."""
    rnd = random.Random(seed)
    half = max(0, (text_len - pattern_len) // 2)
    c = planted_case(
        rnd, sigma=sigma, k=k, pattern_len=(pattern_len, pattern_len),
        prefix_len=(half, half), suffix_len=(0, 0),
    )
    T = (c.text + "".join(rnd.choice("abcdefghijklmnopqrstuvwxyz"[:sigma]) for _ in range(text_len)))[:text_len]
    cfg = MatchConfig(k=k, N=N or len(c.pattern) + text_len, seed=seed, copies=copies, **knobs)
    ens = Ensemble(cfg, shortcut_fallback=False)
    for a in c.pattern:
        ens.push_pattern_symbol(a)
    ens.end_pattern()
    lat = []
    peak_state = peak_window = peak_engine_pat = 0
    samples: list[int] = []
    clock = time.perf_counter
    t0 = clock()
    for i, a in enumerate(T):
        s = clock()
        try:
            ens.push_text_symbol(a)
        except EnsembleFailure:
            pass  # reported through the poisoned count
        lat.append(clock() - s)
        if i % sample_every == 0 or i == len(T) - 1:
            for w in ens.state_words():
                peak_window = max(peak_window, w["engine_window"])
                peak_engine_pat = max(peak_engine_pat, w["engine_pattern"])
                own = sum(v for key, v in w.items() if not key.startswith("engine"))
                peak_state = max(peak_state, own)
                if i >= len(T) // 10:  # skip the warm-up
                    samples.append(own)
    total = clock() - t0
    return {
        "k": k,
        "text_len": text_len,
        "beta": ens.copies[0].params.beta,
        "R": ens.copies[0].R,
        "pattern_len": len(c.pattern),
        "copies": cfg.n_copies,
        "fallback_copies": sum(cp.phase == "fallback" for cp in ens.copies),
        "poisoned_copies": sum(cp.poisoned for cp in ens.copies),
        "total_s": round(total, 4),
        "p50_us": round(_percentile(lat, 0.5) * 1e6, 1),
        "p90_us": round(_percentile(lat, 0.9) * 1e6, 1),
        "p99_us": round(_percentile(lat, 0.99) * 1e6, 1),
        "max_us": round(max(lat, default=0.0) * 1e6, 1),
        "mean_state_words": round(sum(samples) / max(len(samples), 1)),
        "peak_state_words": peak_state,
        "peak_engine_window_words": peak_window,
        "engine_pattern_words": peak_engine_pat,
    }


def cmd_bench(args: argparse.Namespace, out: IO[str]) -> int:
    if args.k < 0:
        raise UsageError("k must be non-negative")
    knobs = {"beta": args.beta, "R": args.rwin, "S": args.scap, "independence": args.independence,
             "failure_exponent": args.failure_exponent}
    w = None
    for k in args.ks or [args.k]:
        for n in args.text_len:
            row = bench_run(k, n, args.pattern_len, args.alphabet, args.seed or 0, args.copies, N=args.N, **knobs)
            if w is None:
                w = csv.DictWriter(out, fieldnames=list(row))
                w.writeheader()
            w.writerow(row)
            out.flush()
    return 0


# -- parser ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit with status 2 and the help text
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="streamedit", description="Streaming k-edit pattern matching.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    m = sub.add_parser("match", help="report the capped min-suffix edit distance after every text symbol")
    m.add_argument("--pattern", help="pattern file ('-' for stdin)")
    m.add_argument("--text", default="-", help="text file (default stdin)")
    m.add_argument("--pattern-len", type=int, default=None,
                   help="read at most this many pattern symbols; without --pattern they come from the text source")
    m.add_argument("--utf8", action="store_true", help="symbols are UTF-8 code points instead of bytes")
    m.add_argument("--format", choices=("tsv", "json"), default="tsv")
    _add_match_flags(m)

    o = sub.add_parser("oracle", help="exact per-position distances by full dynamic programming")
    o.add_argument("--pattern", required=True)
    o.add_argument("--text", required=True)
    o.add_argument("--utf8", action="store_true")
    o.add_argument("--format", choices=("tsv", "json"), default="tsv")
    o.add_argument("--budget", type=int, default=10**8, help="cell budget |P|*|T|")

    c = sub.add_parser("compare", help="run the matcher and the oracle and summarize agreement")
    c.add_argument("--pattern")
    c.add_argument("--text")
    c.add_argument("--utf8", action="store_true")
    c.add_argument("--random", type=int, default=0, help="number of random planted-edit cases instead of files")
    c.add_argument("--alphabet", type=int, default=4, choices=range(1, 27), metavar="SIGMA")
    c.add_argument("--pattern-min", type=int, default=200)
    c.add_argument("--pattern-max", type=int, default=600)
    _add_match_flags(c)

    d = sub.add_parser("decompose", help="print the block decomposition of a string")
    d.add_argument("--input", default="-")
    d.add_argument("--utf8", action="store_true")
    d.add_argument("-k", type=int, default=1)
    d.add_argument("--n", type=int, default=None, help="length bound (default |x|)")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--beta", type=int, default=None)
    d.add_argument("--rwin", type=int, default=None)
    d.add_argument("--scap", type=int, default=None)
    d.add_argument("--independence", type=int, default=None)
    d.add_argument("--json", action="store_true")
    d.add_argument("--no-dump", action="store_true", help="omit the grammar dumps")

    b = sub.add_parser("bench", help="latency percentiles and peak state per copy, as CSV")
    b.add_argument("--text-len", type=int, nargs="+", default=[10_000])
    b.add_argument("--pattern-len", type=int, default=2000)
    b.add_argument("--alphabet", type=int, default=4, choices=range(1, 27), metavar="SIGMA")
    b.add_argument("--ks", type=int, nargs="+", default=None, help="sweep several thresholds")
    _add_match_flags(b)
    b.set_defaults(copies=None)
    return ap


COMMANDS = {"match": cmd_match, "oracle": cmd_oracle, "compare": cmd_compare,
            "decompose": cmd_decompose, "bench": cmd_bench}


def run_command(argv: Sequence[str] | None = None, out: IO[str] | None = None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.cmd](args, out)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"streamedit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StreamTooLong as exc:
        print(f"streamedit: stream too long at position {exc.pos}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (EnsembleFailure, BudgetExceeded, OSError, ValueError) as exc:
        print(f"streamedit: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
