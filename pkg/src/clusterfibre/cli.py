"""Command-line driver.

Exit codes: 0 success, 1 validation failure or oracle mismatch, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, TextIO

from . import __version__
from .cluster_model import ClusterPicture, PictureError
from .fibre_graph import (
    FibreGraph,
    IntegralityError,
    canonical_form,
    derive_self_intersections,
    from_json,
    render_ascii,
    render_dot,
    to_json,
    validate,
)
from .invariants import InvariantTable
from .newton_oracle import newton_model
from .oracles import golden_corpus, semistable_model
from .poly_frontend import DslError, load_picture, parse_dsl, picture_from_dsl, rerooted_picture
from .snc_assembler import AssemblyError, assemble, kodaira_type

EXIT_OK, EXIT_INVALID, EXIT_INPUT = 0, 1, 2

METHODS = ("assembler", "newton", "semistable", "reroot", "golden")


class InputError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    source: str | None
    dsl: str | None
    input_format: str
    out: str
    method: str
    verbose: bool


def _read_source(cfg: CliConfig) -> tuple[str, str]:
    """Text of the input and its format."""
    if cfg.dsl is not None:
        return cfg.dsl, "dsl"
    if cfg.source is None:
        raise InputError("no input: give a file path, '-' for stdin, or --dsl")
    if cfg.source == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(cfg.source).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {cfg.source}: {exc}") from exc
    return text, cfg.input_format


def _picture(cfg: CliConfig) -> ClusterPicture:
    text, fmt = _read_source(cfg)
    return load_picture(text.strip(), fmt)


def _emit_graph(g: FibreGraph, fmt: str, out: TextIO) -> None:
    if fmt == "json":
        g = derive_self_intersections(g)
        out.write(json.dumps(to_json(g), indent=1, sort_keys=True) + "\n")
    elif fmt == "dot":
        out.write(render_dot(g) + "\n")
    else:
        out.write(render_ascii(g) + "\n")


def _report(g: FibreGraph, err: TextIO) -> int:
    rep = validate(g)
    if rep:
        return EXIT_OK
    for v in rep.violations:
        err.write(f"invalid: {v}\n")
    return EXIT_INVALID


def _model_by(method: str, pic: ClusterPicture) -> FibreGraph:
    if method == "newton":
        return newton_model(pic)
    if method == "semistable":
        return semistable_model(pic)
    if method == "assembler":
        return assemble(pic)
    raise InputError(f"method {method!r} does not build a model")


def cmd_model(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    g = _model_by(cfg.method, _picture(cfg))
    _emit_graph(g, cfg.out, out)
    return _report(g, err)


def cmd_invariants(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    pic = _picture(cfg)
    rows = InvariantTable(pic).rows()
    if cfg.out == "json":
        doc = {"genus": pic.genus, "leading_val": str(pic.leading_val), "clusters": rows}
        out.write(json.dumps(doc, indent=1) + "\n")
        return EXIT_OK
    cols = ["id", "orbit", "size", "depth", "nu", "lambda", "b", "eps", "e", "g_ss", "g", "classes"]
    table = [cols] + [[_cell(r[c]) for c in cols] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
    for row in table:
        out.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")
    out.write(f"genus {pic.genus}\n")
    return EXIT_OK


def _cell(v) -> str:
    return ",".join(v) if isinstance(v, list) else str(v)


def cmd_kodaira(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    out.write(kodaira_type(_picture(cfg)) + "\n")
    return EXIT_OK


def cmd_check(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    """Validate a fibre-graph document, or the model of a picture."""
    text, fmt = _read_source(cfg)
    if fmt == "json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
        if isinstance(doc, dict) and "components" in doc:
            g = from_json(doc)
        else:
            g = assemble(load_picture(text, "json"))
    else:
        g = assemble(picture_from_dsl(text.strip()))
    code = _report(g, err)
    if code == EXIT_OK:
        out.write(f"ok: {len(g.components)} components, {len(g.edges)} edges\n")
    return code


def cmd_oracle(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    if cfg.method == "golden":
        bad = 0
        for case in golden_corpus():
            got = assemble(picture_from_dsl(case.dsl))
            same = canonical_form(got) == canonical_form(case.fibre)
            bad += not same
            out.write(f"{'ok  ' if same else 'FAIL'} {case.name}\n")
        return EXIT_INVALID if bad else EXIT_OK
    if cfg.method == "reroot":
        text, fmt = _read_source(cfg)
        if fmt != "dsl":
            raise InputError("the reroot oracle needs DSL input")
        expr = parse_dsl(text.strip())
        base = assemble(picture_from_dsl(text.strip()))
        other = assemble(rerooted_picture(expr))
    else:
        if cfg.method == "assembler":
            raise InputError("choose an oracle method: newton, semistable, reroot or golden")
        pic = _picture(cfg)
        base = assemble(pic)
        other = _model_by(cfg.method, pic)
    same = canonical_form(base) == canonical_form(other)
    out.write(f"{cfg.method}: {'agree' if same else 'DISAGREE'}\n")
    if not same or cfg.verbose:
        out.write("assembler:\n" + render_ascii(base) + "\n")
        out.write(f"{cfg.method}:\n" + render_ascii(other) + "\n")
    return EXIT_OK if same else EXIT_INVALID


COMMANDS: dict[str, Callable[[CliConfig, TextIO, TextIO], int]] = {
    "model": cmd_model,
    "invariants": cmd_invariants,
    "kodaira": cmd_kodaira,
    "check": cmd_check,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterfibre",
        description="Special fibres of minimal SNC models from cluster pictures.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "model": "print the special fibre",
        "invariants": "print the cluster and orbit invariants",
        "kodaira": "print the Kodaira type (genus 1)",
        "check": "validate a fibre graph (JSON) or the model of a picture",
        "oracle": "compare the assembler with an independent construction",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("source", nargs="?", help="input file, or - for stdin")
        p.add_argument("--dsl", help="inline polynomial, e.g. \"(x^3-p^2)(x^4-p^11)\"")
        p.add_argument("--input", dest="input_format", choices=("json", "dsl"), default="json")
        p.add_argument("--out", choices=("json", "dot", "ascii"), default="ascii")
        default = "newton" if name == "oracle" else "assembler"
        p.add_argument("--method", choices=METHODS, default=default)
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def run(cfg: CliConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    if cfg.dsl is not None and cfg.source is not None:
        err.write("error: give either a source file or --dsl, not both\n")
        return EXIT_INPUT
    try:
        return COMMANDS[cfg.command](cfg, out, err)
    except (InputError, DslError, PictureError, ValueError) as exc:
        if isinstance(exc, (AssemblyError, IntegralityError)):
            err.write(f"invalid: {exc}\n")
            return EXIT_INVALID
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = CliConfig(ns.command, ns.source, ns.dsl, ns.input_format, ns.out, ns.method, ns.verbose)
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
