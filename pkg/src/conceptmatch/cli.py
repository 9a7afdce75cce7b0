"""Command-line front end: ingest, mine, match and gen.

Every command that writes a directory also writes ``manifest.txt`` with the
command line, the effective configuration, SHA-256 digests of inputs and
outputs, the tool version and the wall-clock duration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
import time
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .corpusgen import GenConfig, generate_twins, read_truth, write_twins
from .ingest import BUILTIN_BASES, BasisMap, Library, ParseError, prepare_library, serialize_library
from .matcher import (
    MatchConfig, evaluate_against_truth, metrics_text, pairs_tsv, run_match, types_tsv,
)
from .normalize import NormConfig
from .pattern import build_index, property_report, report_tsv
from .scoring import ScoreConfig

log = logging.getLogger("conceptmatch")

EXIT_PARSE = 1
EXIT_USAGE = 2  # bad flags, bad config, missing or unreadable files


class CliError(Exception):
    def __init__(self, msg: str, code: int = EXIT_USAGE):
        super().__init__(msg)
        self.code = code


# -- helpers ------------------------------------------------------------------

def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CliError(f"no such file: {path}") from None
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None


def _sha256(data: str | bytes) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def _basis(spec: str | None) -> BasisMap:
    if spec is None:
        return BasisMap()
    if spec in BUILTIN_BASES:
        return BUILTIN_BASES[spec]
    return BasisMap.parse(_read(spec))


def _load(paths: list[str], basis: str | None, name: str | None = None,
          equalities: list[str] | None = None) -> tuple[Library, dict[str, str]]:
    """Read one library from one or more files; returns it with input digests."""
    texts = [_read(p) for p in paths]
    digests = {p: _sha256(t) for p, t in zip(paths, texts)}
    if basis and basis not in BUILTIN_BASES:
        digests[basis] = _sha256(_read(basis))
    lib_name = name or Path(paths[0]).stem
    try:
        lib = prepare_library("\n".join(texts), lib_name, _basis(basis), equalities or ())
    except ParseError as e:
        raise CliError(f"{', '.join(paths)}: {e}", EXIT_PARSE) from None
    return lib, digests


def _write_outputs(out_dir: Path, files: dict[str, str], manifest: dict[str, object]) -> None:
    """Write every output then the manifest; each file lands atomically."""
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = dict(manifest)
    manifest["outputs"] = {name: _sha256(text) for name, text in sorted(files.items())}
    files = dict(files)
    files["manifest.txt"] = _manifest_text(manifest)
    for name, text in files.items():
        fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out_dir / name)


def _manifest_text(m: dict[str, object]) -> str:
    lines = []
    for key, value in m.items():
        if isinstance(value, dict):
            for k, v in value.items():
                lines.append(f"{key}.{k}: {v}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _manifest(args: argparse.Namespace, config: dict, inputs: dict[str, str], start: float) -> dict:
    return {
        "command": args.command,
        "argv": " ".join(args.argv),
        "version": __version__,
        "config": {k: json.dumps(v, sort_keys=True) for k, v in sorted(config.items())},
        "inputs": inputs,
        "duration_seconds": f"{time.perf_counter() - start:.3f}",
    }


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------

def cmd_ingest(args: argparse.Namespace) -> int:
    lib, _ = _load(args.paths, args.basis, args.name, args.equal)
    used = lib.constants_used()
    print(f"library: {lib.name}")
    print(f"theorems: {len(lib.theorems)}")
    print(f"constants: {len(lib.constants)}")
    print(f"constants_used: {len(used)}")
    if args.out:
        Path(args.out).write_text(serialize_library(lib), encoding="utf-8")
    return 0


def cmd_mine(args: argparse.Namespace) -> int:
    lib, _ = _load([args.library], args.basis)
    cfg = NormConfig(level=args.norm, ac_constants=None if args.norm == 2 else ())
    idx = build_index(lib, cfg, jobs=args.jobs)
    rows = property_report(idx)
    _emit(report_tsv(rows, include_empty=args.all), args.out)
    members = sum(len(ps) for ps in idx.pset.values())
    print(f"{len(lib.theorems)} theorems, {len(idx.cset)} relative patterns, "
          f"{members} constant-pattern memberships", file=sys.stderr)
    return 0


_MATCH_DEFAULTS = {"norm": 2, "score": 2, "mode": "iter", "iterations": None,
                   "typecheck": "on", "jobs": None}


def _match_config(args: argparse.Namespace) -> tuple[MatchConfig, dict]:
    merged = dict(_MATCH_DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(_read(args.config))
        except json.JSONDecodeError as e:
            raise CliError(f"{args.config}: invalid JSON ({e.msg})") from None
        unknown = set(loaded) - set(_MATCH_DEFAULTS)
        if unknown:
            raise CliError(f"{args.config}: unknown keys {sorted(unknown)}")
        merged.update(loaded)
    for key in _MATCH_DEFAULTS:
        value = getattr(args, key)
        if value is not None:
            merged[key] = value
    mode = {"iter": "iterative", "single": "single_pass"}.get(merged["mode"], merged["mode"])
    iterations = merged["iterations"]
    if iterations is None:
        iterations = 1 if mode == "single_pass" else MatchConfig.iterations
    jobs = merged["jobs"] or os.cpu_count() or 1
    try:
        cfg = MatchConfig(
            norm=NormConfig(level=int(merged["norm"]),
                            ac_constants=None if int(merged["norm"]) == 2 else ()),
            score=ScoreConfig(f"score{merged['score']}"),
            mode=mode,
            iterations=int(iterations),
            typecheck={"on": True, "off": False}.get(merged["typecheck"], merged["typecheck"]),
            jobs=int(jobs),
        )
    except (ValueError, TypeError) as e:
        raise CliError(f"invalid configuration: {e}") from None
    if not isinstance(cfg.typecheck, bool):
        raise CliError("typecheck must be 'on' or 'off'")
    effective = dict(merged, mode=mode, iterations=cfg.iterations, jobs=cfg.jobs)
    return cfg, effective


def cmd_match(args: argparse.Namespace) -> int:
    start = time.perf_counter()
    cfg, effective = _match_config(args)
    lib1, d1 = _load([args.lib1], args.basis1 or args.basis)
    lib2, d2 = _load([args.lib2], args.basis2 or args.basis)
    inputs = {**d1, **d2}
    truth = None
    if args.truth:
        text = _read(args.truth)
        inputs[args.truth] = _sha256(text)
        truth = read_truth(text)
    state = run_match(lib1, lib2, cfg)
    files = {"pairs.tsv": pairs_tsv(state), "types.tsv": types_tsv(state)}
    if truth is not None:
        metrics = metrics_text(evaluate_against_truth(state, truth))
    else:
        metrics = (f"accepted_pairs: {len(state.const_pairs)}\n"
                   f"discarded_by_type: {state.discarded_by_type}\n")
    files["metrics.txt"] = metrics + f"type_conflicts: {state.type_conflicts}\n"
    _write_outputs(Path(args.out), files, _manifest(args, effective, inputs, start))
    print(f"accepted {len(state.const_pairs)} constant pairs, "
          f"{len(state.type_pairs)} type pairs -> {args.out}")
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    start = time.perf_counter()
    params: dict = {}
    inputs: dict[str, str] = {}
    if args.config:
        text = _read(args.config)
        inputs[args.config] = _sha256(text)
        try:
            params = json.loads(text)
        except json.JSONDecodeError as e:
            raise CliError(f"{args.config}: invalid JSON ({e.msg})") from None
    for key in ("seed", "n_constants", "n_theorems", "noise"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    if args.keep_types:
        params["rename_types"] = False
    try:
        cfg = GenConfig(**params)
    except (TypeError, ValueError) as e:
        raise CliError(f"invalid generator configuration: {e}") from None
    lib1, lib2, truth = write_twins(generate_twins(cfg))
    files = {"lib1.txt": lib1, "lib2.txt": lib2, "truth.tsv": truth}
    _write_outputs(Path(args.out), files, _manifest(args, asdict(cfg), inputs, start))
    print(f"wrote twin corpus to {args.out}")
    return 0


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conceptmatch", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    basis_help = f"basis map file or one of {sorted(BUILTIN_BASES)}"

    sp = sub.add_parser("ingest", help="parse a library and print its statistics")
    sp.add_argument("paths", nargs="+", help="exchange-format files forming one library")
    sp.add_argument("--basis", help=basis_help)
    sp.add_argument("--name", help="library name (default: first file's stem)")
    sp.add_argument("--equal", action="append", metavar="NAME", default=None,
                    help="treat constant NAME as extensionally equal to equality; may repeat")
    sp.add_argument("-o", "--out", help="write the normalized library here")
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("mine", help="report the most frequent properties of one library")
    sp.add_argument("library")
    sp.add_argument("--norm", type=int, choices=(0, 1, 2), default=1)
    sp.add_argument("--basis", help=basis_help)
    sp.add_argument("--all", action="store_true", help="include properties with no instances")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("-o", "--out", help="TSV output file (default: stdout)")
    sp.set_defaults(func=cmd_mine)

    sp = sub.add_parser("match", help="match the constants of two libraries")
    sp.add_argument("lib1")
    sp.add_argument("lib2")
    sp.add_argument("-o", "--out", required=True, help="output directory")
    sp.add_argument("--config", help="JSON file with defaults for the flags below")
    sp.add_argument("--norm", type=int, choices=(0, 1, 2))
    sp.add_argument("--score", type=int, choices=(0, 1, 2))
    sp.add_argument("--mode", choices=("single", "iter"))
    sp.add_argument("--iterations", type=int)
    sp.add_argument("--typecheck", choices=("on", "off"))
    sp.add_argument("--jobs", type=int, help="worker processes (default: available cores)")
    sp.add_argument("--basis", help=basis_help + " (both libraries)")
    sp.add_argument("--basis1", help="basis for the first library")
    sp.add_argument("--basis2", help="basis for the second library")
    sp.add_argument("--truth", help="ground-truth TSV; enables first-error metrics")
    sp.set_defaults(func=cmd_match)

    sp = sub.add_parser("gen", help="generate a synthetic twin corpus with ground truth")
    sp.add_argument("config", nargs="?", help="JSON generator configuration")
    sp.add_argument("-o", "--out", required=True, help="output directory")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--n-constants", dest="n_constants", type=int)
    sp.add_argument("--n-theorems", dest="n_theorems", type=int)
    sp.add_argument("--noise", type=float)
    sp.add_argument("--keep-types", action="store_true", help="do not rename types in the twin")
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as e:
        print(f"conceptmatch {args.command}: error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
