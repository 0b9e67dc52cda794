"""Command line front end.

Subcommands: tower, classify, unfold, levels, correspond, expand, samples.
Exit codes: 0 success, 2 invalid configuration, 3 pipeline contract
violation, 4 diagnostic failure.  The GERMTOWER_OUTDIR environment variable,
when set, prefixes relative output paths.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .cuspidal import EllipticSemimodule, Mode
from .germs import (
    CATALOGUE,
    classify_germ,
    format_germ,
    germ_from_json,
    versal_unfold,
)
from .pipeline import (
    PipelineConfig,
    PipelineError,
    config_from_json,
    dumps_canonical,
    emit_expansion,
    normalize_scenario,
    run_pipeline,
    samples_csv,
)
from .tower import LEFT, RIGHT, TowerConfig, build_tower, tower_config_from_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONTRACT = 3
EXIT_DIAGNOSTIC = 4


def _out_path(raw: str) -> Path:
    path = Path(raw)
    outdir = os.environ.get("GERMTOWER_OUTDIR")
    if outdir and not path.is_absolute():
        path = Path(outdir) / path
    return path


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip() != "")


def _tower_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--modulus", "-N", type=int, help="quantum size N")
    parser.add_argument("--offset", type=int, default=0)
    parser.add_argument("--depth", type=int)
    parser.add_argument("--multiplicity", help="comma list, one entry per class")
    parser.add_argument("--complex-multiplicity", dest="complex_multiplicity")


def _pipeline_flags(parser: argparse.ArgumentParser) -> None:
    _tower_flags(parser)
    parser.add_argument(
        "--scenario",
        default="none",
        help="none | fold | cusp | swallowtail | elliptic-umbilic | hyperbolic-umbilic",
    )
    parser.add_argument("--reduce", default="mu<=H", help="reduce rule, e.g. mu<=2")
    parser.add_argument("--orth-dims", type=int, default=3, choices=(2, 3))
    parser.add_argument(
        "--amplitude", default="unit", help="unit | mu | path to a JSON class table"
    )
    parser.add_argument("--covering-depths", help="comma pair, e.g. 3,2")
    parser.add_argument("--even-classes", action="store_true")
    parser.add_argument(
        "--config", help="JSON config file ('-' for stdin); overrides the flags"
    )


def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _tower_config_from_args(args) -> TowerConfig:
    if args.modulus is None or args.depth is None:
        raise ValueError("--modulus and --depth are required without --config")
    return TowerConfig(
        quantum_modulus=args.modulus,
        offset=args.offset,
        depth=args.depth,
        multiplicity=_parse_int_list(args.multiplicity) if args.multiplicity else (),
        complex_multiplicity=_parse_int_list(args.complex_multiplicity)
        if args.complex_multiplicity
        else (),
    )


def _pipeline_config_from_args(args) -> PipelineConfig:
    if args.config:
        return config_from_json(_load_json(args.config))
    amplitude = args.amplitude
    if amplitude not in ("unit", "mu"):
        amplitude = _load_json(amplitude)
    return PipelineConfig(
        tower=_tower_config_from_args(args),
        scenario=normalize_scenario(args.scenario),
        reduce_rule=args.reduce,
        orth_dims=args.orth_dims,
        amplitude=amplitude,
        covering_depths=_parse_int_list(args.covering_depths)
        if args.covering_depths
        else None,
        even_classes=args.even_classes,
    )


def _cmd_tower(args) -> int:
    if args.config:
        config = tower_config_from_json(_load_json(args.config))
    else:
        config = _tower_config_from_args(args)
    tower = build_tower(config)
    print(
        f"tower: N={tower.quantum_modulus} offset={tower.offset} depth={tower.depth}"
    )
    for idx in tower.class_indices():
        print(f"  class ({idx.mu},{idx.m})  degree {tower.real_degree(idx)}")
    for mu in range(1, tower.depth + 1):
        place = ", ".join(f"({i.mu},{i.m})" for i in tower.place(mu, LEFT))
        print(f"  place mu={mu}: {place}  complex degree {tower.complex_degree(mu)}")
    if args.out:
        payload = {
            "config": {
                "quantum_modulus": tower.quantum_modulus,
                "offset": tower.offset,
                "depth": tower.depth,
                "multiplicity": list(config.multiplicity),
                "complex_multiplicity": list(config.complex_multiplicity),
            },
            "classes": [
                {"mu": i.mu, "m": i.m, "degree": tower.real_degree(i)}
                for i in tower.class_indices()
            ],
            "complex": [
                {"mu": mu, "degree": tower.complex_degree(mu)}
                for mu in range(1, tower.depth + 1)
            ],
        }
        _out_path(args.out).write_text(dumps_canonical(payload) + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_classify(args) -> int:
    stream = sys.stdin if args.file in (None, "-") else open(args.file, "r", encoding="utf-8")
    try:
        for line in stream:
            line = line.strip()
            if not line:
                continue
            cls = classify_germ(germ_from_json(json.loads(line)))
            print(f"{cls.name} corank={cls.corank} codim={cls.codim}")
    finally:
        if stream is not sys.stdin:
            stream.close()
    return EXIT_OK


def _cmd_unfold(args) -> int:
    if args.name:
        name = normalize_scenario(args.name)
        if name is None:
            raise ValueError("unfold needs a catalogue class name")
    else:
        cls = classify_germ(germ_from_json(json.loads(args.germ)))
        if cls.name not in CATALOGUE:
            raise ValueError(f"germ classifies {cls.name}; no unfolding to print")
        name = cls.name
    unfolding = versal_unfold(name)
    print(f"{name}: base {format_germ(unfolding.base)}  codim {unfolding.codim}")
    for slot, (coeff, mono) in enumerate(unfolding.parameters, start=1):
        print(f"  slot {slot}: {coeff} * ({format_germ(mono)})")
    full = unfolding.instantiate({n: 1 for n, _ in unfolding.parameters})
    print(f"  unfolded (all slots = 1): {format_germ(full)}")
    return EXIT_OK


def _print_level_summary(report) -> None:
    print(f"rule {report.rule}; levels: {', '.join(r['label'] for r in report.level_rows)}")
    for row in report.level_rows:
        orth = 0 if row["orthogonal"] is None else len(row["orthogonal"]["right"])
        print(
            f"  {row['label']}: {len(row['weil_side'])} weil classes = "
            f"{len(row['reduced']['right'])} reduced + {orth} orthogonal mode pairs"
        )
    for line in report.cascade:
        print(f"  cascade: {line}")


def _cmd_levels(args) -> int:
    report = run_pipeline(_pipeline_config_from_args(args))
    _print_level_summary(report)
    return EXIT_OK


def _cmd_correspond(args) -> int:
    report = run_pipeline(_pipeline_config_from_args(args))
    _print_level_summary(report)
    passed = sum(1 for d in report.diagnostics if d["passed"])
    print(f"diagnostics: {passed}/{len(report.diagnostics)} passed")
    if args.out:
        _out_path(args.out).write_text(report.json_text(), encoding="utf-8")
    if not report.all_diagnostics_passed():
        for diag in report.diagnostics:
            if not diag["passed"]:
                print(f"FAILED diagnostic: {diag['name']} ({diag['detail']})", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    return EXIT_OK


def _cmd_expand(args) -> int:
    labels = [part.strip() for part in args.levels.split(",") if part.strip()]
    fragment = emit_expansion(labels)
    for term in fragment["terms"]:
        print(f"{term['kind']:<12} {term['right']} x {term['left']}")
    print(
        f"total {len(fragment['terms'])} = {fragment['free_count']} free "
        f"+ {fragment['interaction_count']} interaction"
    )
    return EXIT_OK


def _cmd_samples(args) -> int:
    data = _load_json(args.modes_file)
    modes = tuple(
        Mode(int(m["mu"]), int(m["m"]), float(m["amplitude"]), int(m["sign"]))
        for m in data
    )
    if not modes:
        raise ValueError("the modes file holds no modes")
    side = LEFT if modes[0].sign == 1 else RIGHT
    esm = EllipticSemimodule(side, modes, "ST", "Tp", 1)
    csv_text = samples_csv(esm, args.n, args.x0, args.x1)
    if args.csv:
        _out_path(args.csv).write_text(csv_text, encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="germtower",
        description="Completion towers, germ cascades, and cuspidal correspondences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tower", help="print a tower's classes and degrees")
    _tower_flags(p)
    p.add_argument("--config", help="tower JSON file ('-' for stdin)")
    p.add_argument("--out", help="write the tower JSON here")
    p.set_defaults(fn=_cmd_tower)

    p = sub.add_parser("classify", help="classify germs, one JSON per line")
    p.add_argument("--file", help="input path (default stdin)")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("unfold", help="print a versal unfolding")
    p.add_argument("--name", help="catalogue class name")
    p.add_argument("--germ", help="inline germ JSON to classify first")
    p.set_defaults(fn=_cmd_unfold)

    p = sub.add_parser("levels", help="run the cascade and print the level stack")
    _pipeline_flags(p)
    p.set_defaults(fn=_cmd_levels)

    p = sub.add_parser("correspond", help="full pipeline; write the report JSON")
    _pipeline_flags(p)
    p.add_argument("--out", help="report path")
    p.set_defaults(fn=_cmd_correspond)

    p = sub.add_parser("expand", help="expand a level sum product")
    p.add_argument("--levels", required=True, help="comma list, e.g. ST,MG")
    p.set_defaults(fn=_cmd_expand)

    p = sub.add_parser("samples", help="sample an elliptic semimodule to CSV")
    p.add_argument("--modes-file", required=True, help="JSON array of modes")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--x1", type=float, default=1.0)
    p.add_argument("--csv", help="output path (default stdout)")
    p.set_defaults(fn=_cmd_samples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
