"""Command-line driver: ``spinlb {table1,table2,verify,gram,deps}``.

Exit codes: 0 success, 1 verification or bound failure, 2 usage error.
Every JSON document written carries a ``manifest`` block (command, config,
seed, cache paths, timings, version) next to a ``payload`` block; timings
live only in the manifest so payloads are byte-reproducible.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .algebra import check_dependencies, enumerate_basis, k_count
from .bounds import BETHE_PER_SPIN, ClusterModel, OptimizerConfig, anderson_bound, sandwich_check, variational_bound
from .cache import DEFAULT_CACHE_DIR, ArtifactCache
from .errors import CapacityError
from .oracle import MAX_SITES
from . import verify as verify_mod

log = logging.getLogger("spinlb")

TABLE1_MAX = 60
ENUMERATE_MAX = 12


class UsageError(Exception):
    pass


def fmt(x: float | None, digits: int = 5) -> str:
    if x is None:
        return "FAILED"
    return f"{x:.{digits}g}"


def fmt_int(k: int) -> str:
    return str(k) if k < 10**7 else f"{float(k):.5g}"


def aligned(rows: list[list[str]]) -> str:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines)


def manifest(args: argparse.Namespace, started: float, **extra) -> dict:
    doc = {
        "command": args.command,
        "argv": sys.argv[1:],
        "tool_version": __version__,
        "started_at": datetime.fromtimestamp(started, timezone.utc).isoformat(),
        "finished_at": datetime.now(timezone.utc).isoformat(),
        "wall_time": time.time() - started,
    }
    doc.update(extra)
    return doc


def write_json(path: str | None, manifest_doc: dict, payload: dict) -> None:
    if not path:
        return
    doc = {"manifest": manifest_doc, "payload": payload}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"cannot parse sizes {text!r}")
    if not sizes:
        raise UsageError("no cluster sizes given")
    bad = [s for s in sizes if not 2 <= s <= MAX_SITES]
    if bad:
        raise UsageError(f"cluster sizes must lie in [2, {MAX_SITES}], got {bad}")
    return sizes


def cmd_table1(args) -> int:
    started = time.time()
    if not 2 <= args.n_max <= TABLE1_MAX:
        raise UsageError(f"--n-max must lie in [2, {TABLE1_MAX}]")
    rows = [["N", "K(N)", "K(N)+identity", "4^N", "enumerated"]]
    payload_rows = []
    ok = True
    for n in range(2, args.n_max + 1):
        k = k_count(n, include_identity=False)
        enumerated = None
        if n <= min(args.enumerate_max, ENUMERATE_MAX):
            enumerated = len(enumerate_basis(n)) - 1
            ok &= enumerated == k
        rows.append([str(n), fmt_int(k), fmt_int(k + 1), fmt_int(4**n), "-" if enumerated is None else str(enumerated)])
        payload_rows.append({"N": n, "K": k, "K_with_identity": k + 1, "four_pow_N": 4**n, "enumerated": enumerated})
    print(aligned(rows))
    print("K(N) excludes the identity; K(N)+identity is the full basis size.")
    write_json(args.out, manifest(args, started), {"rows": payload_rows})
    return 0 if ok else 1


def load_config(args) -> OptimizerConfig:
    try:
        config = OptimizerConfig.load(args.config) if args.config else OptimizerConfig()
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad config {args.config}: {exc}")
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.restarts is not None:
        config = replace(config, restarts=args.restarts)
    if args.jobs is not None:
        config = replace(config, jobs=args.jobs)
    return config


def cmd_table2(args) -> int:
    started = time.time()
    sizes = parse_sizes(args.sizes)
    config = load_config(args)
    cache = ArtifactCache(args.cache_dir)
    reports, timings, cache_paths = [], {}, {}
    for n in sizes:
        t0 = time.perf_counter()
        model = ClusterModel(n)
        anderson = anderson_bound(model)
        tensor, constraints, hit = cache.get_or_build(n)
        cache_paths[str(n)] = {"path": str(cache.path_for(n)), "hit": hit}
        report = variational_bound(model, tensor, constraints, config, anderson=anderson)
        timings[str(n)] = time.perf_counter() - t0
        reports.append(report)

    rows = [["cluster size", "Anderson bound", "symmetric bound", "sandwich"]]
    failed = False
    for r in reports:
        ok = sandwich_check(r)
        failed |= not ok
        status = "ok" if ok else "FAIL"
        rows.append([str(r.cluster_size), fmt(r.anderson_per_spin), fmt(r.variational_per_spin), status])
    rows.append(["exact (Bethe)", fmt(BETHE_PER_SPIN), fmt(BETHE_PER_SPIN), ""])
    print(aligned(rows))
    for r in reports:
        if r.low_basin_hits:
            print(f"warning: n={r.cluster_size} best basin hit by {r.best_basin_hits} restart(s) only")

    payload = {
        "config": config.to_json(),
        "bethe_reference": BETHE_PER_SPIN,
        "rows": [dict(r.to_json(), sandwich=sandwich_check(r)) for r in reports],
    }
    payload["config"].pop("jobs")
    write_json(
        args.out,
        manifest(
            args,
            started,
            config=config.to_json(),
            config_path=args.config,
            seed=config.seed,
            cache=cache_paths,
            row_wall_times=timings,
        ),
        payload,
    )
    return 1 if failed else 0


def cmd_verify(args) -> int:
    started = time.time()
    checks = verify_mod.run(args.level)
    for c in checks:
        print(c.line())
    passed = all(c.passed for c in checks)
    print(f"{'PASS' if passed else 'FAIL'}: {sum(c.passed for c in checks)}/{len(checks)} checks")
    write_json(
        args.out,
        manifest(args, started),
        {"level": args.level, "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]},
    )
    return 0 if passed else 1


def cmd_gram(args) -> int:
    started = time.time()
    if not 1 <= args.n <= 10:
        raise UsageError("--n must lie in [1, 10]")
    elems, g = verify_mod.gram_matrix(args.n, sector=args.sector, full_support=not args.all)
    payload = {
        "n": args.n,
        "normalization": "tr(X Y) / 2^N",
        "labels": [str(m) for m in elems],
        "matrix": [[int(v) if float(v).is_integer() else float(v) for v in row] for row in g],
    }
    print(json.dumps(payload, indent=2))
    write_json(args.out, manifest(args, started), payload)
    return 0


def cmd_deps(args) -> int:
    started = time.time()
    try:
        report = check_dependencies(args.n, cap=args.cap)
    except CapacityError as exc:
        raise UsageError(str(exc))
    payload = report.to_json()
    print(json.dumps(payload, indent=2))
    verdict = "PASS" if report.verified else "FAIL"
    print(f"{verdict}: n={args.n} gram rank {report.gram_rank}, predicted {report.predicted_rank}")
    write_json(args.out, manifest(args, started), payload)
    return 0 if report.verified else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinlb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"spinlb {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="optimizer seed (overrides config)")
    common.add_argument("--cache-dir", default=DEFAULT_CACHE_DIR, help="artifact cache directory")
    common.add_argument("--restarts", type=int, default=None, help="optimizer restarts (overrides config)")
    common.add_argument("--out", default=None, help="write a JSON result document here")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table1", parents=[common], help="basis sizes K(N) vs 4^N")
    p.add_argument("--n-max", type=int, default=TABLE1_MAX)
    p.add_argument("--enumerate-max", type=int, default=ENUMERATE_MAX)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("table2", parents=[common], help="Anderson vs symmetric-cluster bounds")
    p.add_argument("--sizes", default="3,4,5,6,7")
    p.add_argument("--config", default=None, help="optimizer config JSON")
    p.add_argument("--jobs", type=int, default=None, help="parallel restart workers")
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("verify", parents=[common], help="run the self-verification suites")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gram", parents=[common], help="Gram matrix of full-support monomials")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sector", choices=["A", "AB"], default="A")
    p.add_argument("--all", action="store_true", help="include every support, not only the full one")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("deps", parents=[common], help="check the linear-dependency hypothesis")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cap", type=int, default=8)
    p.set_defaults(func=cmd_deps)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"spinlb {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
