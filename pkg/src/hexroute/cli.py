"""Command-line interface.

Subcommands:
    compile  route one OpenQASM file for a device and emit stats
    bench    run benchmark classes through the full pipeline, writing
             results.csv, results.json (five-number summaries) and
             box-plot figures
    gen      write a benchmark corpus as .qasm files plus a manifest

Exit codes: 0 ok, 1 I/O error, 2 parse error, 3 validation error.
Diagnostics go to stderr; tabular data goes to stdout.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .benchgen import CLASSES, BenchSpec, corpus_gate_stats, gen_corpus, generate
from .circuit import cnot_count, cnot_depth, without_measurements
from .device import (
    CouplingMap,
    DeviceError,
    DeviceModel,
    UniformProfile,
    heavy_hex_7q,
    load_calibration,
    load_coupling,
    synthetic_calibration,
)
from .metrics import merit_report
from .placement import Mapping, PlacementError, place
from .qasm import QasmError, emit_qasm, parse_qasm
from .report import RunRecord, csv_text, render_figures, write_csv, write_summary_json
from .routing import RoutingError, RoutingParams, lower_to_cnot, route
from .sim import NoiseModel, empirical_distribution, ideal_distribution, relabel_bits, sample_noisy

_CONFIG_KEYS = ("alpha", "beam_width", "search_depth", "lookahead", "seed")
_DEFAULTS = {"alpha": 0.5, "beam_width": 4, "search_depth": 4, "lookahead": 5, "seed": 7}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        raw = json.loads(text)
    else:
        try:
            import tomllib  # type: ignore[import-not-found]
        except ModuleNotFoundError:
            import tomli as tomllib
        raw = tomllib.loads(text)
    unknown = set(raw) - set(_CONFIG_KEYS)
    if unknown:
        raise DeviceError(f"unknown config keys: {sorted(unknown)}")
    return raw


def _setting(args, config: dict, key: str):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return _DEFAULTS[key]


def _parse_sizes(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part]


def _parse_alphas(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _workers() -> int:
    cap = os.environ.get("HEXROUTE_THREADS")
    limit = int(cap) if cap else 4
    return max(1, min(limit, os.cpu_count() or 1))


# ---------------------------------------------------------------------------
# device setup shared by subcommands


def _build_device(device_path, calib_path, seed: int, include_readout: bool) -> DeviceModel:
    coupling = load_coupling(device_path) if device_path else heavy_hex_7q()
    if calib_path:
        calib = load_calibration(calib_path, coupling)
    else:
        calib = synthetic_calibration(coupling, seed, UniformProfile(0.99))
    return DeviceModel.build(coupling, calib, include_readout=include_readout)


_DEVICE_CACHE: dict[tuple, DeviceModel] = {}


def _device_cached(key: tuple) -> DeviceModel:
    if key not in _DEVICE_CACHE:
        _DEVICE_CACHE[key] = _build_device(*key)
    return _DEVICE_CACHE[key]


# ---------------------------------------------------------------------------
# compile


def cmd_compile(args) -> int:
    config = _load_config(args.config)
    params = RoutingParams(
        alpha=float(_setting(args, config, "alpha")),
        beam_width=int(_setting(args, config, "beam_width")),
        search_depth=int(_setting(args, config, "search_depth")),
        lookahead=int(_setting(args, config, "lookahead")),
    )
    circuit = parse_qasm(Path(args.input).read_text(encoding="utf-8"))
    device = _build_device(
        args.device, args.calibration, int(_setting(args, config, "seed")),
        args.readout_in_reliability,
    )
    lowered = lower_to_cnot(circuit)
    before_count, before_depth = cnot_count(lowered), cnot_depth(lowered)
    start = time.perf_counter()
    if args.layout == "identity":
        mapping = Mapping(tuple(range(circuit.num_qubits)), device.coupling.num_qubits)
    else:
        mapping = place(circuit, device.coupling, device.calibration)
    routed, final = route(circuit, mapping, device, params)
    compile_ms = (time.perf_counter() - start) * 1000.0
    after_count, after_depth = cnot_count(routed), cnot_depth(routed)
    out_path = Path(args.out)
    out_path.write_text(emit_qasm(routed), encoding="utf-8")
    stats = {
        "input": str(args.input),
        "output": str(out_path),
        "alpha": params.alpha,
        "beam_width": params.beam_width,
        "search_depth": params.search_depth,
        "lookahead": params.lookahead,
        "cnot_count_before": before_count,
        "cnot_depth_before": before_depth,
        "cnot_count_after": after_count,
        "cnot_depth_after": after_depth,
        "swaps_added": (after_count - before_count) // 3,
        "initial_mapping": list(mapping.virtual_to_physical),
        "final_mapping": list(final.virtual_to_physical),
        "compile_ms": compile_ms,
    }
    stats_path = Path(args.stats) if args.stats else out_path.with_suffix(".stats.json")
    stats_path.write_text(json.dumps(stats, indent=1) + "\n", encoding="utf-8")
    print(json.dumps(stats, indent=1))
    return 0


# ---------------------------------------------------------------------------
# bench


def _sample_seed(root: int, cls: str, n: int, cid: int, alpha: float, w: int, k: int) -> int:
    abits = int(np.float64(alpha).view(np.uint64))
    ss = np.random.SeedSequence(
        root,
        spawn_key=(CLASSES.index(cls), n, cid, abits & 0xFFFFFFFF, abits >> 32, w, k),
    )
    return int(ss.generate_state(1, np.uint64)[0])


def _bench_one(task: tuple) -> RunRecord:
    (cls, n, cid, circ_seed, depth, alpha, w, k, lookahead, shots, sample_seed, dev_key) = task
    device = _device_cached(dev_key)
    spec = BenchSpec(cls, n, depth, circ_seed)
    circuit = generate(spec)
    start = time.perf_counter()
    mapping = place(circuit, device.coupling, device.calibration)
    routed, final = route(
        circuit, mapping, device,
        RoutingParams(alpha=alpha, beam_width=w, search_depth=k, lookahead=lookahead),
    )
    compile_ms = (time.perf_counter() - start) * 1000.0
    ideal = ideal_distribution(without_measurements(circuit))
    noise = NoiseModel.from_calibration(device.coupling, device.calibration)
    samples = sample_noisy(routed, noise, shots, sample_seed)
    observed = empirical_distribution(relabel_bits(samples, final.virtual_to_physical))
    report = merit_report(routed, observed, ideal)
    return RunRecord(
        circuit_class=cls,
        num_qubits=n,
        circuit_id=cid,
        alpha=alpha,
        beam_width=w,
        search_depth=k,
        fidelity=report.hellinger_fidelity,
        hog=report.hog,
        l1=report.l1,
        cnot_count=report.cnot_count,
        cnot_depth=report.cnot_depth,
        compile_ms=compile_ms,
    )


def run_bench(
    classes,
    sizes,
    count: int,
    device_key: tuple,
    alphas,
    beam_width: int,
    search_depth: int,
    lookahead: int,
    shots: int,
    seed: int,
    depth: int | None = None,
    workers: int = 1,
) -> list[RunRecord]:
    """Library entry point behind `hexroute bench`."""
    from .benchgen import circuit_seed, shallow_middle_depth

    tasks = []
    for cls in classes:
        for n in sizes:
            for cid in range(count):
                if cls == "deep":
                    d = depth if depth is not None else n
                elif cls == "square":
                    d = n
                else:
                    d = shallow_middle_depth(n)
                cseed = circuit_seed(seed, cls, n, cid)
                for alpha in alphas:
                    tasks.append(
                        (
                            cls, n, cid, cseed, d, alpha, beam_width, search_depth,
                            lookahead, shots,
                            _sample_seed(seed, cls, n, cid, alpha, beam_width, search_depth),
                            device_key,
                        )
                    )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_bench_one, tasks, chunksize=8))
    else:
        records = [_bench_one(t) for t in tasks]
    return records


def cmd_bench(args) -> int:
    config = _load_config(args.config)
    seed = int(_setting(args, config, "seed"))
    classes = [args.circuit_class] if args.circuit_class else list(CLASSES)
    sizes = _parse_sizes(args.sizes)
    alphas = _parse_alphas(str(_setting(args, config, "alpha")))
    device_key = (args.device, args.calibration, seed, args.readout_in_reliability)
    _device_cached(device_key)  # validate inputs before spawning workers
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    records = run_bench(
        classes,
        sizes,
        args.count,
        device_key,
        alphas,
        int(_setting(args, config, "beam_width")),
        int(_setting(args, config, "search_depth")),
        int(_setting(args, config, "lookahead")),
        args.shots,
        seed,
        depth=args.depth,
        workers=_workers(),
    )
    config_out = {
        "classes": classes,
        "sizes": sizes,
        "count": args.count,
        "alphas": alphas,
        "beam_width": int(_setting(args, config, "beam_width")),
        "search_depth": int(_setting(args, config, "search_depth")),
        "lookahead": int(_setting(args, config, "lookahead")),
        "shots": args.shots,
        "seed": seed,
        "device": args.device or "heavy_hex_7q",
        "calibration": args.calibration or "synthetic uniform 0.99",
    }
    write_csv(records, outdir / "results.csv")
    write_summary_json(records, outdir / "results.json", config_out)
    if args.plots:
        paths = render_figures(records, outdir / "figures")
        print(f"wrote {len(paths)} figures under {outdir / 'figures'}", file=sys.stderr)
    if args.format == "json":
        print(json.dumps([r.__dict__ for r in records], indent=1, default=str))
    else:
        sys.stdout.write(csv_text(records))
    print(f"wrote {outdir / 'results.csv'} and {outdir / 'results.json'}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    outdir = Path(args.out)
    if outdir.exists() and any(outdir.iterdir()) and not args.force:
        raise DeviceError(f"{outdir} exists and is not empty (use --force)")
    outdir.mkdir(parents=True, exist_ok=True)
    seed = args.seed if args.seed is not None else _DEFAULTS["seed"]
    sizes = _parse_sizes(args.sizes)
    corpus = gen_corpus(args.circuit_class, sizes, args.count, seed, depth=args.depth)
    entries = []
    for spec, circuit in corpus:
        idx = len([e for e in entries if e["n"] == spec.num_qubits])
        name = f"{spec.circuit_class}_n{spec.num_qubits}_{idx:03d}.qasm"
        (outdir / name).write_text(emit_qasm(circuit), encoding="utf-8")
        entries.append(
            {
                "file": name,
                "class": spec.circuit_class,
                "n": spec.num_qubits,
                "depth": spec.depth,
                "seed": spec.seed,
                "num_gates": len(circuit),
                "cnot_count": sum(1 for g in circuit.gates if g.kind.value == "cx"),
            }
        )
    manifest = {
        "class": args.circuit_class,
        "sizes": sizes,
        "count": args.count,
        "seed": seed,
        "circuits": entries,
        "gate_stats": corpus_gate_stats(corpus),
    }
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, indent=1) + "\n", encoding="utf-8"
    )
    print(json.dumps(manifest["gate_stats"], indent=1))
    print(f"wrote {len(entries)} circuits to {outdir}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hexroute", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def routing_flags(p):
        p.add_argument("--alpha", default=None, help="reliability weight in [0,1]")
        p.add_argument("--beam-width", dest="beam_width", type=int, default=None)
        p.add_argument("--search-depth", dest="search_depth", type=int, default=None)
        p.add_argument("--lookahead", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--config", default=None, help="TOML or JSON config file")
        p.add_argument("--device", default=None, help="coupling map JSON (default: 7-qubit heavy-hex fragment)")
        p.add_argument("--calibration", default=None, help="calibration JSON (default: synthetic uniform 0.99)")
        p.add_argument(
            "--readout-in-reliability",
            action="store_true",
            help="fold readout fidelity into per-swap reliability",
        )

    pc = sub.add_parser("compile", help="route one QASM circuit")
    pc.add_argument("input")
    pc.add_argument("--out", required=True)
    pc.add_argument("--stats", default=None, help="stats JSON path (default: <out>.stats.json)")
    pc.add_argument("--layout", choices=("auto", "identity"), default="auto")
    routing_flags(pc)
    pc.set_defaults(func=cmd_compile)

    pb = sub.add_parser("bench", help="run benchmark classes end to end")
    pb.add_argument("--class", dest="circuit_class", choices=CLASSES, default=None,
                    help="restrict to one class (default: all three)")
    pb.add_argument("--sizes", default="2..5", help="e.g. 2..7 or 2,4,6")
    pb.add_argument("--count", type=int, default=20)
    pb.add_argument("--depth", type=int, default=None, help="deep-class gadget count (default n)")
    pb.add_argument("--shots", type=int, default=8192)
    pb.add_argument("--out", default="bench_results")
    pb.add_argument("--format", choices=("csv", "json"), default="csv")
    pb.add_argument("--plots", dest="plots", action="store_true", default=True)
    pb.add_argument("--no-plots", dest="plots", action="store_false")
    routing_flags(pb)
    pb.set_defaults(func=cmd_bench)

    pg = sub.add_parser("gen", help="write a benchmark corpus")
    pg.add_argument("--class", dest="circuit_class", choices=CLASSES, required=True)
    pg.add_argument("--sizes", default="2..7")
    pg.add_argument("--count", type=int, default=200)
    pg.add_argument("--depth", type=int, default=None)
    pg.add_argument("--seed", type=int, default=None)
    pg.add_argument("--out", required=True)
    pg.add_argument("--force", action="store_true")
    pg.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QasmError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (DeviceError, PlacementError, RoutingError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
