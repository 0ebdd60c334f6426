"""Command-line interface: deterministic CSV/JSON/SVG emission.

Every subcommand writes byte-identical output for identical invocations:
numeric output is rounded to 15 significant digits, there are no
timestamps, and the numerical kernels use fixed reduction orders (the
--threads flag is accepted for interface compatibility; the kernels are
deterministic regardless of its value).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

from .cohomology import cech_h1, trace_image
from .diffraction import contrast_spectrum, scaled_chain, structure_factor_grid
from .errors import AperiodixError
from .geometry import chain_from_rule, chain_to_csv
from .groups import nearest_element
from .report import bloch_report, hull_averaged_gaps, report_to_dict
from .spectral import HoppingModel, OnsiteModel, build_chain, eigenvalues_tridiag
from .substitution import (
    FAMILY_NAMES,
    SubstitutionRule,
    builtin_rule,
    expand_word,
)
from .svgplot import Series, emit_svg, render_svg

SCHEMA = 1


def fmt(x: float) -> str:
    return f"{x:.15g}"


def round15(x: float) -> float:
    return float(fmt(x))


def _add_rule_args(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--family", choices=FAMILY_NAMES)
    group.add_argument("--rule-file", help="JSON file with a substitution rule")


def _add_model_args(parser: argparse.ArgumentParser):
    parser.add_argument("--model", choices=("onsite", "hopping"), default="onsite")
    parser.add_argument("--va", type=float, default=0.0)
    parser.add_argument("--vb", type=float, default=1.0)
    parser.add_argument("--eps", type=float, default=1.0)


def _resolve_rule(args) -> SubstitutionRule:
    if args.family:
        return builtin_rule(args.family)
    with open(args.rule_file, "r", encoding="utf-8") as fh:
        return SubstitutionRule.from_json(fh.read())


def _resolve_model(args):
    if args.model == "onsite":
        return OnsiteModel(args.va, args.vb)
    return HoppingModel(args.va, args.vb, args.eps)


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(data: dict, path: str | None):
    _write(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
           path)


# -- subcommands ---------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.slope:
        return _generate_cut_project(args)
    rule = _resolve_rule(args)
    seed = args.seed_letter or rule.alphabet[0]
    word = expand_word(rule, seed, args.order)
    projected = rule.project(word)
    data = {
        "schema": SCHEMA,
        "rule": rule.name or "custom",
        "seed": seed,
        "order": args.order,
        "length": len(word),
        "word": projected,
    }
    _dump_json(data, args.out)
    if args.chain_csv:
        chain = chain_from_rule(rule, args.order, seed=seed)
        _write(chain_to_csv(chain), args.chain_csv)
    return 0


def _generate_cut_project(args) -> int:
    from .cutproject import CPParams, check_periodicity, cp_word
    from .geometry import positions_from_word

    params = CPParams.from_text(args.slope, phason=args.phason)
    word = cp_word(params, args.n0, args.count)
    horizon = min(10000, max(64, 2 * args.count))
    periodicity = check_periodicity(params, horizon)
    data = {
        "schema": SCHEMA,
        "slope": args.slope,
        "phason": round15(params.phason),
        "n0": args.n0,
        "length": len(word),
        "word": word,
        "periodic": periodicity["periodic"],
        "period": periodicity["period"],
    }
    _dump_json(data, args.out)
    if args.chain_csv:
        chain = positions_from_word(word, {"a": 1.0, "b": 1.0})
        _write(chain_to_csv(chain), args.chain_csv)
    return 0


def cmd_diffract(args) -> int:
    rule = _resolve_rule(args)
    if args.contrast:
        spec = contrast_spectrum(rule, args.order, args.kmin, args.kmax, args.samples)
    else:
        chain = scaled_chain(rule, args.order)
        spec = structure_factor_grid(chain, args.kmin, args.kmax, args.samples)
    out = io.StringIO()
    out.write("k,S\n")
    for k, s in zip(spec.k_values, spec.S):
        out.write(f"{fmt(k)},{fmt(s)}\n")
    _write(out.getvalue(), args.out)
    if args.svg:
        series = [Series(tuple(float(k) for k in spec.k_values),
                         tuple(float(s) for s in spec.S))]
        emit_svg(series, "k", "S(k)", args.svg)
    return 0


def cmd_spectrum(args) -> int:
    rule = _resolve_rule(args)
    word = rule.project(expand_word(rule, rule.alphabet[0], args.order))
    spec = eigenvalues_tridiag(build_chain(word, _resolve_model(args)))
    out = io.StringIO()
    out.write("index,eigenvalue\n")
    for i, e in enumerate(spec.eigenvalues):
        out.write(f"{i},{fmt(e)}\n")
    _write(out.getvalue(), args.out)
    return 0


def cmd_gaps(args) -> int:
    rule = _resolve_rule(args)
    family = args.family
    group = trace_image(rule)
    if args.spectrum_file:
        import numpy as np

        from .spectral import EnergySpectrum, bulk_gaps

        with open(args.spectrum_file, "r", encoding="utf-8") as fh:
            rows = [line.split(",") for line in fh.read().strip().splitlines()[1:]]
        eigs = np.array([float(r[1]) for r in rows])
        gaps = bulk_gaps(EnergySpectrum(np.sort(eigs)), args.rel_threshold)
    else:
        gaps = hull_averaged_gaps(rule, args.order, _resolve_model(args),
                                  args.rel_threshold)
    payload = []
    for gap in gaps:
        element, residual = nearest_element(gap.ids_value, group,
                                            q_max=args.q_max, n_max=args.nmax)
        payload.append({
            "lower": round15(gap.lower),
            "upper": round15(gap.upper),
            "width": round15(gap.width),
            "ids": round15(gap.ids_value),
            "label": {
                "coordinates": list(element.coordinates),
                "value": round15(element.value),
                "residual": round15(residual),
                "in_group": residual <= args.tol,
            },
        })
    _dump_json({"schema": SCHEMA, "family": family or rule.name or "custom",
                "group": group.canonical_name, "gaps": payload}, args.out)
    return 0


def cmd_cohomology(args) -> int:
    rule = _resolve_rule(args)
    h1 = cech_h1(rule)
    _dump_json({
        "schema": SCHEMA,
        "family": args.family or rule.name or "custom",
        "H1": h1.structure_name,
        "free_rank": h1.free_rank,
        "localized": [list(pair) for pair in h1.localized],
        "recognized": h1.recognized,
        "note": h1.note,
    }, args.out)
    return 0


def cmd_trace(args) -> int:
    rule = _resolve_rule(args)
    group = trace_image(rule)
    _dump_json({
        "schema": SCHEMA,
        "family": args.family or rule.name or "custom",
        "trace_group": group.canonical_name,
    }, args.out)
    return 0


def cmd_bloch(args) -> int:
    report = bloch_report(args.family, tol=args.tol, q_max=args.q_max,
                          n_max=args.nmax, rel_threshold=args.rel_threshold)
    data = report_to_dict(report)
    if args.gaps_file:
        with open(args.gaps_file, "r", encoding="utf-8") as fh:
            gaps_doc = json.load(fh)
        data["gaps_file_ids"] = [g["ids"] for g in gaps_doc.get("gaps", [])]
    _dump_json(data, args.out)
    if args.svg:
        rule = builtin_rule(args.family)
        spec = contrast_spectrum(rule, 12, 0.05, 4 * math.pi, 1024)
        word = rule.project(expand_word(rule, rule.alphabet[0],
                                        report.spectral_order))
        eigs = eigenvalues_tridiag(build_chain(word, OnsiteModel(0.0, 1.0)))
        n = eigs.size
        top = [Series(tuple(float(k) for k in spec.k_values),
                      tuple(float(s) for s in spec.S))]
        bottom = [Series(tuple(float(e) for e in eigs.eigenvalues),
                         tuple((i + 1) / n for i in range(n)), color="#d62728")]
        _write(render_svg([(top, "k", "S(k)"),
                           (bottom, "e", "N(e)")]), args.svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aperiodix",
        description="one-dimensional aperiodic tilings: diffraction, spectra, "
                    "gap labels, cohomology invariants")
    parser.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; output does not depend on it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate",
                       help="expand a substitution word, or cut a C&P word")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--family", choices=FAMILY_NAMES)
    group.add_argument("--rule-file", help="JSON file with a substitution rule")
    group.add_argument("--slope",
                       help='cut-and-project slope: "p/q", decimal, or "1/golden"')
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--seed-letter", default=None)
    p.add_argument("--phason", type=float, default=0.0,
                   help="cut offset in radians (with --slope)")
    p.add_argument("--count", type=int, default=100,
                   help="letters to generate (with --slope)")
    p.add_argument("--n0", type=int, default=0,
                   help="starting integer index (with --slope)")
    p.add_argument("--out", default=None)
    p.add_argument("--chain-csv", default=None)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("diffract", help="structure factor on a k grid")
    _add_rule_args(p)
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--kmin", type=float, default=0.0)
    p.add_argument("--kmax", type=float, default=4 * math.pi)
    p.add_argument("--samples", type=int, default=2048)
    p.add_argument("--contrast", action="store_true",
                   help="species-contrast weights instead of plain atoms")
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)
    p.set_defaults(fn=cmd_diffract)

    p = sub.add_parser("spectrum", help="tight-binding eigenvalues")
    _add_rule_args(p)
    _add_model_args(p)
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("gaps", help="spectral gaps with group labels")
    _add_rule_args(p)
    _add_model_args(p)
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--rel-threshold", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--q-max", type=int, default=30)
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--spectrum-file", default=None,
                   help="reuse eigenvalues from a spectrum CSV")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_gaps)

    p = sub.add_parser("cohomology", help="Cech H^1 of the tiling space")
    _add_rule_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_cohomology)

    p = sub.add_parser("trace", help="cohomology trace image group")
    _add_rule_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("bloch", help="gap-label / trace / Bragg correspondence")
    p.add_argument("--family", choices=FAMILY_NAMES, required=True)
    p.add_argument("--rel-threshold", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--q-max", type=int, default=30)
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--gaps-file", default=None,
                   help="attach gap ids from a gaps JSON document")
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)
    p.set_defaults(fn=cmd_bloch)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (AperiodixError, ValueError, OSError) as exc:
        print(f"aperiodix: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
