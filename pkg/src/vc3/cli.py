"""Command-line front end: compress/decompress stream files and run the
numerical studies.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analysis, bench, codec, stream
from .errors import Vc3Error
from .layout import DEFAULT_LAYOUT, parse_layout, parse_policy

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _parse_domain(text: str, count: int, seed: int) -> analysis.SampleDomain:
    if text == "sphere":
        return analysis.SampleDomain("unit_sphere", count, seed)
    if text in ("sphere-angles", "sphere_angles"):
        return analysis.SampleDomain("sphere_angles", count, seed)
    if text == "cube":
        return analysis.SampleDomain("cube", count, seed)
    if text.startswith("shell:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad shell spec {text!r}; expected shell:MIN:MAX")
        return analysis.SampleDomain("shell", count, seed,
                                     r_min=float(parts[1]), r_max=float(parts[2]))
    raise ValueError(f"unknown domain {text!r}")


def _emit(doc: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for k, v in doc.items():
            print(f"{k} = {v}")


def _add_common(p, domain=True):
    p.add_argument("--layout", default=DEFAULT_LAYOUT.spec(),
                   help="bit layout, e.g. 0,7,22-17-18 (optional @bias)")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    if domain:
        p.add_argument("--domain", default="sphere",
                       help="sphere | sphere-angles | cube | shell:MIN:MAX")
    p.add_argument("--json", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="vc3", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", parents=[], help="pack vectors into a stream file")
    p.add_argument("--input", default="-", help="raw f32 triplets or CSV ('-': stdin)")
    p.add_argument("--output", default="-", help="stream file ('-': stdout)")
    p.add_argument("--layout", default=DEFAULT_LAYOUT.spec())
    p.add_argument("--policy", default="theta=S,phi=D,quant=S")
    p.add_argument("--input-format", choices=("f32", "csv"), default="f32")

    p = sub.add_parser("decompress", help="unpack a stream file into vectors")
    p.add_argument("--input", default="-")
    p.add_argument("--output", default="-")
    p.add_argument("--output-format", choices=("f32", "csv"), default="f32")

    p = sub.add_parser("analyze", help="round-trip error statistics")
    _add_common(p)
    p.add_argument("--policy", default="theta=S,phi=D,quant=S")
    p.add_argument("--normalised", action="store_true")

    p = sub.add_parser("misses", help="single vs double bucket-index misses")
    _add_common(p)

    p = sub.add_parser("anisotropy", help="per-cell mean error heat-map data (CSV)")
    p.add_argument("--layout", default=DEFAULT_LAYOUT.spec())
    p.add_argument("--policy", default="theta=D,phi=D,quant=D")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", default="32x16", help="theta x phi cell counts")

    p = sub.add_parser("sweep", help="fractional-split error sweep")
    _add_common(p)
    p.add_argument("--bits", type=int, default=35, help="joint angle bits")
    p.add_argument("--splits", default="65536,98304,131072,196608,262144",
                   help="comma-separated n_phi_max+1 values")

    p = sub.add_parser("compand", help="companded quantiser error study")
    _add_common(p)
    p.add_argument("--kind", choices=("uniform", "cosine", "tanh"), default="tanh")
    p.add_argument("--gamma", type=float, default=0.5)

    p = sub.add_parser("idempotence", help="repeated round-trip word stability")
    _add_common(p)
    p.add_argument("--policy", default="theta=S,phi=D,quant=S")
    p.add_argument("--u", type=int, default=8, help="inverse-trig ulp budget")

    p = sub.add_parser("bench", help="raw vs compressed vector-add bandwidth")
    p.add_argument("--sizes", default="16384,262144,4194304,16777216",
                   help="comma-separated element counts")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--layout", default=DEFAULT_LAYOUT.spec())
    p.add_argument("--policy", default="theta=S,phi=S,quant=S")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    return ap


def _read_vectors(path: str, fmt: str) -> np.ndarray:
    if path == "-":
        if fmt == "csv":
            return stream.read_csv(sys.stdin)
        return stream.read_f32(sys.stdin.buffer)
    if fmt == "csv":
        return stream.read_csv(path)
    return stream.read_f32(path)


def _cmd_compress(args) -> int:
    layout = parse_layout(args.layout)
    policy = parse_policy(args.policy)
    vectors = _read_vectors(args.input, args.input_format)
    words = codec.compress(vectors, layout, policy)
    flushed, saturated = codec.magnitude_event_counts(vectors, layout)
    if args.output == "-":
        stream.write_stream(sys.stdout.buffer, words, layout)
    else:
        stream.write_stream(args.output, words, layout)
    print(f"compressed {words.size} vectors with {layout}; "
          f"flushed {flushed}, saturated {saturated}", file=sys.stderr)
    return 0


def _cmd_decompress(args) -> int:
    if args.input == "-":
        words, layout = stream.read_stream(sys.stdin.buffer)
    else:
        words, layout = stream.read_stream(args.input)
    vectors = codec.decompress(words, layout)
    if args.output == "-":
        if args.output_format == "csv":
            stream.write_csv(sys.stdout, vectors)
        else:
            stream.write_f32(sys.stdout.buffer, vectors)
    elif args.output_format == "csv":
        stream.write_csv(args.output, vectors)
    else:
        stream.write_f32(args.output, vectors)
    print(f"decompressed {words.size} vectors with {layout}", file=sys.stderr)
    return 0


def _cmd_analyze(args) -> int:
    layout = parse_layout(args.layout)
    policy = parse_policy(args.policy)
    domain = _parse_domain(args.domain, args.samples, args.seed)
    stats = analysis.error_study(domain, layout, policy, normalised=args.normalised)
    _emit(analysis.report(domain, layout, policy, **stats.to_dict()), args.json)
    return 0


def _cmd_misses(args) -> int:
    layout = parse_layout(args.layout)
    domain = _parse_domain(args.domain, args.samples, args.seed)
    mt, mp = analysis.bin_miss_study(domain, layout)
    doc = analysis.report(domain, layout, analysis.ALL_SINGLE_POLICY,
                          misses_theta=mt, misses_phi=mp)
    _emit(doc, args.json)
    return 0


def _cmd_anisotropy(args) -> int:
    layout = parse_layout(args.layout)
    policy = parse_policy(args.policy)
    try:
        tc, pc = (int(x) for x in args.grid.lower().split("x"))
    except ValueError:
        raise ValueError(f"bad grid {args.grid!r}; expected e.g. 32x16") from None
    means, _, _, _ = analysis.anisotropy_map(layout, policy, (tc, pc),
                                             args.samples, args.seed)
    print("theta_cell,phi_cell,mean_error")
    for i, j, m in analysis.anisotropy_rows(means):
        print(f"{i},{j},{m:.8e}")
    return 0


def _cmd_sweep(args) -> int:
    layout = parse_layout(args.layout)
    domain = _parse_domain(args.domain, args.samples, args.seed)
    splits = [int(s) for s in args.splits.split(",") if s]
    rows = []
    for cfg, stats in analysis.split_sweep(args.bits, splits, domain, layout):
        rows.append({
            "n_phi_max": cfg.n_phi_max,
            "n_theta_max": cfg.n_theta_max,
            **stats.to_dict(),
        })
    doc = analysis.report(domain, layout, analysis.ORACLE_POLICY,
                          bits=args.bits, rows=rows)
    if args.json:
        _emit(doc, True)
    else:
        for row in rows:
            print(f"n_phi_max+1={row['n_phi_max'] + 1:>8}  mean={row['mean']:.6e}  "
                  f"stddev={row['stddev']:.6e}")
    return 0


def _cmd_compand(args) -> int:
    layout = parse_layout(args.layout)
    domain = _parse_domain(args.domain, args.samples, args.seed)
    compander = analysis.Compander(args.kind, args.gamma)
    stats = analysis.compand_study(domain, compander, layout)
    uniform = analysis.compand_study(domain, analysis.Compander("uniform"), layout)
    doc = analysis.report(domain, layout, analysis.ORACLE_POLICY,
                          kind=args.kind, gamma=args.gamma,
                          **stats.to_dict(),
                          uniform_mean=uniform.mean, uniform_stddev=uniform.stddev)
    _emit(doc, args.json)
    return 0


def _cmd_idempotence(args) -> int:
    layout = parse_layout(args.layout)
    policy = parse_policy(args.policy)
    domain = _parse_domain(args.domain, args.samples, args.seed)
    result = analysis.idempotence_study(domain, layout, policy, u=args.u)
    _emit(analysis.report(domain, layout, policy, **result.to_dict()), args.json)
    return 0


def _cmd_bench(args) -> int:
    layout = parse_layout(args.layout)
    policy = parse_policy(args.policy)
    sizes = tuple(int(s) for s in args.sizes.split(",") if s)
    config = bench.BenchConfig(sizes, args.repeats, layout, policy, args.seed)
    results = bench.sweep(config)
    if args.json:
        doc = {
            "layout": str(layout),
            "policy": policy.spec(),
            "llc_bytes": bench.llc_bytes(),
            "knee_elements": bench.knee_elements(results),
            "rows": [r.to_dict() for r in results],
        }
        _emit(doc, True)
    else:
        print("n,time_raw_ns,time_comp_ns,speedup,bytes_ratio")
        for r in results:
            print(f"{r.n},{r.time_raw_ns:.0f},{r.time_compressed_ns:.0f},"
                  f"{r.speedup:.4f},{r.bytes_ratio}")
    return 0


_COMMANDS = {
    "compress": _cmd_compress,
    "decompress": _cmd_decompress,
    "analyze": _cmd_analyze,
    "misses": _cmd_misses,
    "anisotropy": _cmd_anisotropy,
    "sweep": _cmd_sweep,
    "compand": _cmd_compand,
    "idempotence": _cmd_idempotence,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (Vc3Error, ValueError, OSError) as exc:
        print(f"vc3: error: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
