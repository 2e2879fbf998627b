"""Command-line driver: generate targets, inspect runs, pre-screen built targets."""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .api_model import parse_api_spec
from .config import DEFAULT_FRONTIER_CAP, GenerationConfig
from .depgraph import build_graph
from .errors import FrontierExplosionError, ParseError
from .seqgen import CoverageStats, dump_sequences, generate
from .synth import plan_input_layout, plan_program, render_target, target_file_name
from .synth.render import crate_ident
from .toolchain import compile_library, compile_target, find_rustc

log = logging.getLogger("fuzztarget")

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_FRONTIER = 3
EXIT_NO_TOOLCHAIN = 4

MANIFEST_NAME = "manifest.json"
DUMP_NAME = "targets.txt"


@dataclass
class TargetRecord:
    file: str
    sequence: list[str]
    min_buffer_len: int


@dataclass
class RunManifest:
    spec_path: str
    library: str
    library_version: str
    config: GenerationConfig
    out_dir: str
    targets: list[TargetRecord]
    coverage: CoverageStats
    tool_version: str = __version__
    rng_seed: int = 0

    def to_dict(self) -> dict:
        return {
            "spec_path": self.spec_path,
            "library": self.library,
            "library_version": self.library_version,
            "config": self.config.to_dict(),
            "out_dir": self.out_dir,
            "targets": [vars(t) for t in self.targets],
            "coverage": self.coverage.to_dict(),
            "tool_version": self.tool_version,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        if not isinstance(data, dict):
            raise ParseError("manifest must be a JSON object", field="$")
        for key in ("spec_path", "library", "library_version", "config", "out_dir",
                    "targets", "coverage", "tool_version", "rng_seed"):
            if key not in data:
                raise ParseError(f"missing field {key!r}", field=key)
        targets = []
        for i, t in enumerate(data["targets"]):
            for key in ("file", "sequence", "min_buffer_len"):
                if key not in t:
                    raise ParseError(f"missing field {key!r}", field=f"targets[{i}].{key}")
            targets.append(TargetRecord(t["file"], list(t["sequence"]), int(t["min_buffer_len"])))
        try:
            coverage = CoverageStats.from_dict(data["coverage"])
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}",
                             field=f"coverage.{exc.args[0]}") from None
        try:
            config = GenerationConfig.from_dict(data["config"])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"invalid config: {exc}", field="config") from None
        return cls(data["spec_path"], data["library"], data["library_version"], config,
                   data["out_dir"], targets, coverage, data["tool_version"], int(data["rng_seed"]))


# ---------------------------------------------------------------------------
# generate

def cmd_generate(spec_path: str, out_dir: str, config: GenerationConfig,
                 emit_dot: str | None = None) -> int:
    try:
        text = Path(spec_path).read_text(encoding="utf-8")
        spec = parse_api_spec(text)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: cannot read {spec_path}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ParseError as exc:
        print(f"error: {spec_path}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT

    graph = build_graph(spec, config)
    try:
        result = generate(graph, config)
    except FrontierExplosionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FRONTIER

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    for k, seq in enumerate(result.selected, start=1):
        plan = plan_program(seq, graph)
        layout = plan_input_layout(plan)
        name = target_file_name(k, seq.calls[0])
        (out / name).write_text(render_target(plan, layout), encoding="utf-8")
        records.append(TargetRecord(name, list(seq.calls), layout.min_buffer_len))

    manifest = RunManifest(spec_path, spec.library_name, spec.library_version, config,
                           out_dir, records, result.stats, rng_seed=config.rng_seed)
    (out / MANIFEST_NAME).write_text(json.dumps(manifest.to_dict(), indent=2) + "\n",
                                     encoding="utf-8")
    notes = [f"{r.file} min_buffer_len={r.min_buffer_len}" for r in records]
    (out / DUMP_NAME).write_text(dump_sequences(result.selected, result.stats, notes),
                                 encoding="utf-8")
    if emit_dot:
        Path(emit_dot).write_text(graph.to_dot(), encoding="utf-8")
    print(f"{spec.library_name}: {result.stats.summary()}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# stats

def load_manifest(path: str) -> RunManifest:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read manifest: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return RunManifest.from_dict(data)


def format_stats(manifest: RunManifest) -> str:
    c = manifest.coverage
    return "\n".join([
        f"library {manifest.library} {manifest.library_version}",
        f"apis_total {c.apis_total}",
        c.summary(),
        f"producer_edges {c.producer_edges_covered}/{c.producer_edges_total}",
        f"avg_visits_per_api {float(c.avg_visits_per_api):.2f}",
    ]) + "\n"


def cmd_stats(manifest_path: str) -> int:
    try:
        manifest = load_manifest(manifest_path)
    except ParseError as exc:
        print(f"error: {manifest_path}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    sys.stdout.write(format_stats(manifest))
    return EXIT_OK


# ---------------------------------------------------------------------------
# screen

@dataclass
class ScreenResult:
    target: str
    clean: list[int] = field(default_factory=list)
    crashed: list[int] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return bool(self.clean)


def _executables(targets_dir: Path) -> list[Path]:
    if not targets_dir.is_dir():
        return []
    return sorted(p for p in targets_dir.iterdir()
                  if p.is_file() and os.access(p, os.X_OK))


def screen_target(exe: Path, n_inputs: int, max_input_len: int, seed: int,
                  timeout: float) -> tuple[ScreenResult, list[bytes]]:
    rng = random.Random(f"{seed}:{exe.name}")
    inputs = [rng.randbytes(rng.randint(0, max_input_len)) for _ in range(n_inputs)]
    result = ScreenResult(exe.name)
    for i, data in enumerate(inputs):
        try:
            proc = subprocess.run([str(exe)], input=data, capture_output=True, timeout=timeout)
            ok = proc.returncode == 0
        except subprocess.TimeoutExpired:
            ok = False
        (result.clean if ok else result.crashed).append(i)
    return result, inputs


def cmd_screen(targets_dir: str, n_inputs: int = 500, max_input_len: int = 4096,
               seed: int = 0, jobs: int = 1, out_dir: str | None = None,
               timeout: float = 10.0) -> int:
    exes = _executables(Path(targets_dir))
    if not exes:
        print(f"error: no built targets in {targets_dir}; build them first "
              "(screening is optional)", file=sys.stderr)
        return EXIT_NO_TOOLCHAIN
    out = Path(out_dir or targets_dir)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [pool.submit(screen_target, e, n_inputs, max_input_len, seed, timeout)
                   for e in exes]
        outcomes = [f.result() for f in futures]
    report = []
    for result, inputs in sorted(outcomes, key=lambda o: o[0].target):
        seed_dir = out / "seeds" / result.target
        if result.valid:
            seed_dir.mkdir(parents=True, exist_ok=True)
            for i in result.clean:
                (seed_dir / f"{i}.bin").write_bytes(inputs[i])
        status = "valid" if result.valid else "invalid"
        print(f"{result.target}: {status} ({len(result.clean)}/{n_inputs} clean)")
        report.append({"target": result.target, "valid": result.valid,
                       "clean": len(result.clean), "crashed": len(result.crashed)})
    (out / "screen_report.json").write_text(json.dumps(report, indent=2) + "\n",
                                            encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# build

def cmd_build(out_dir: str, library_source: str) -> int:
    if find_rustc() is None:
        print("error: rustc not found", file=sys.stderr)
        return EXIT_NO_TOOLCHAIN
    try:
        manifest = load_manifest(str(Path(out_dir) / MANIFEST_NAME))
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    out = Path(out_dir)
    bin_dir = out / "bin"
    bin_dir.mkdir(exist_ok=True)
    crate = crate_ident(manifest.library)
    lib = compile_library(Path(library_source), crate, bin_dir)
    if not lib.ok:
        print(lib.stderr, file=sys.stderr)
        return EXIT_BAD_INPUT
    status = EXIT_OK
    for record in manifest.targets:
        res = compile_target(out / record.file, crate, lib.output, bin_dir)
        if not res.ok:
            print(f"{record.file}: compile failed\n{res.stderr}", file=sys.stderr)
            status = EXIT_BAD_INPUT
    return status


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzztarget", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate fuzz targets from an API spec")
    g.add_argument("spec", help="API-spec JSON file")
    g.add_argument("out_dir", help="directory for targets and manifest")
    g.add_argument("--max-len", type=int, default=3, help="BFS depth bound (default 3)")
    g.add_argument("--seed", type=int, default=0, help="tie-break seed")
    g.add_argument("--max-chain-depth", type=int, default=2,
                   help="longest adapter chain between producer and slot")
    g.add_argument("--allow-pointer-deref", action="store_true",
                   help="permit raw-pointer dereference steps")
    g.add_argument("--frontier-cap", type=int, default=DEFAULT_FRONTIER_CAP,
                   help="abort when a BFS level exceeds this many sequences")
    g.add_argument("--emit-dot", metavar="PATH", help="also write the graph as Graphviz dot")

    s = sub.add_parser("stats", help="summarise a generation manifest")
    s.add_argument("manifest", help="manifest.json written by generate")

    sc = sub.add_parser("screen", help="run built targets on random inputs")
    sc.add_argument("targets_dir", help="directory of built target executables")
    sc.add_argument("--inputs", type=int, default=500, help="random inputs per target")
    sc.add_argument("--max-input-len", type=int, default=4096)
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--jobs", type=int, default=1, help="targets screened in parallel")
    sc.add_argument("--out-dir", help="where to write the report and seeds (default targets_dir)")
    sc.add_argument("--timeout", type=float, default=10.0, help="seconds per run; a timeout counts as a crash")

    b = sub.add_parser("build", help="compile generated targets with rustc")
    b.add_argument("out_dir", help="output directory of generate")
    b.add_argument("library_source", help="single-file Rust source of the library")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "generate":
        try:
            config = GenerationConfig(max_len=args.max_len, rng_seed=args.seed,
                                      max_chain_depth=args.max_chain_depth,
                                      allow_pointer_deref=args.allow_pointer_deref,
                                      frontier_cap=args.frontier_cap)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_INPUT
        return cmd_generate(args.spec, args.out_dir, config, args.emit_dot)
    if args.command == "stats":
        return cmd_stats(args.manifest)
    if args.command == "screen":
        return cmd_screen(args.targets_dir, args.inputs, args.max_input_len, args.seed,
                          args.jobs, args.out_dir, args.timeout)
    if args.command == "build":
        return cmd_build(args.out_dir, args.library_source)
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
