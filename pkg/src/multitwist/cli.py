"""Command line interface.

Usage:
    multitwist example fuzzy-torus2 --q 3 -o t.json
    multitwist check t.json [--assert mt_epsilon_prime,regularity] [--format json]
    multitwist tensor even.json odd.json -o product.json
    multitwist fluctuate t.json --form random:3 [--eps-preserving] -o f.json
    multitwist rescale t.json --k exp:0.4 --k exp:0.2 -o r.json
    multitwist rescale t.json --clifford --k exp:0.3 -o c.json
    multitwist spectrum t.json

Exit codes: 0 asserted conditions pass, 1 a condition is violated,
2 invalid input or usage.
"""

import argparse
import json
import sys

import numpy as np

from . import constructions, document, models
from .numat import DEFAULT_TOL, herm_exp
from .triple import CONDITIONS, report

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class UsageError(ValueError):
    pass


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)


def _save(model, out):
    _write(document.dumps(model), out)


def _read_matrix_file(path):
    with open(path, encoding="utf-8") as fh:
        return document.matrix_from_json(json.load(fh), path)


def parse_k(spec, q, rng):
    """``exp:SCALE`` (seeded), ``identity``, or a path to a JSON matrix."""
    if spec is None:
        return None
    if spec == "identity":
        return np.eye(q, dtype=np.complex128)
    if spec.startswith("exp:"):
        try:
            scale = float(spec[4:])
        except ValueError:
            raise UsageError(f"bad k spec {spec!r}") from None
        return models.random_positive_element(q, rng, scale)
    return _read_matrix_file(spec)


def cmd_example(args):
    if args.name not in models.BUILDERS:
        raise UsageError(f"unknown example {args.name!r}; choose from {', '.join(models.BUILDERS)}")
    params = models.FuzzyModelParams(q=args.q, p=args.p, h_choice=args.h_choice, t=args.t, seed=args.seed)
    if args.name == "fuzzy-torus2":
        model = models.fuzzy_torus2(params)
    elif args.name == "fuzzy-circle-even":
        model = models.fuzzy_circle_even(args.q, args.p)
    elif args.name == "fuzzy-torus3":
        model = models.fuzzy_torus3(split=args.split, params=params)
    elif args.name == "asymmetric-torus":
        rng = np.random.default_rng([args.seed, 1])
        k1 = parse_k(args.k1, args.q, rng)
        k2 = parse_k(args.k2, args.q, rng)
        model = models.asymmetric_torus(params, k1, k2)
    else:
        model = models.circle_bundle(params, twist=args.twist)
    _save(model, args.output)
    return EXIT_OK


def _asserted(model, spec):
    if spec:
        ids = tuple(c.strip() for c in spec.split(",") if c.strip())
        unknown = [c for c in ids if c not in CONDITIONS]
        if unknown:
            raise UsageError(f"unknown condition ids {unknown}")
        return ids
    return model.asserts or tuple(CONDITIONS)


def cmd_check(args):
    model = document.load(args.path)
    rep = report(model, args.tol)
    asserted = _asserted(model, args.assert_set)
    present = {e.condition_id for e in rep.entries}
    missing = [c for c in asserted if c not in present]
    if missing:
        raise UsageError(f"asserted conditions {missing} do not apply to this triple")
    ok = rep.passes(asserted)
    if args.format == "json":
        out = rep.to_dict()
        out["asserted"] = list(asserted)
        out["ok"] = ok
        out["provenance"] = model.provenance
        sys.stdout.write(json.dumps(out, indent=1) + "\n")
    else:
        sys.stdout.write(f"provenance: {model.provenance}\n")
        sys.stdout.write(rep.render_table(asserted) + "\n")
        sys.stdout.write(("OK" if ok else "VIOLATION") + "\n")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_tensor(args):
    first = document.load(args.even)
    second = document.load(args.odd)
    _save(constructions.tensor_product(first, second), args.output)
    return EXIT_OK


def load_form(model, spec, rng):
    if spec.startswith("random:"):
        try:
            n = int(spec[7:])
        except ValueError:
            raise UsageError(f"bad form spec {spec!r}") from None
        return constructions.random_one_form(model, rng, n)
    with open(spec, encoding="utf-8") as fh:
        data = json.load(fh)
    terms = [
        (document.matrix_from_json(t["a"], f"{spec}: a"), document.matrix_from_json(t["b"], f"{spec}: b"))
        for t in data["terms"]
    ]
    return constructions.make_one_form(model, terms, symmetrize=bool(data.get("symmetrize", False)))


def cmd_fluctuate(args):
    model = document.load(args.path)
    form = load_form(model, args.form, np.random.default_rng(args.seed))
    fn = constructions.fluctuate_eps if args.eps_preserving else constructions.fluctuate_plain
    _save(fn(model, form, args.tol), args.output)
    return EXIT_OK


def cmd_rescale(args):
    model = document.load(args.path)
    rng = np.random.default_rng(args.seed)
    specs = args.k or []
    if args.clifford:
        if len(specs) != 1:
            raise UsageError("--clifford takes exactly one --k")
        spec = specs[0]
        if spec.startswith("exp:"):
            x = constructions.clifford_direction(model, args.seed)
            k = herm_exp(float(spec[4:]) * x)
        else:
            k = _read_matrix_file(spec)
        out = constructions.clifford_rescale(model, k, args.tol)
    else:
        if len(specs) != len(model.mt):
            raise UsageError(f"need one --k per summand ({len(model.mt)})")
        ks = []
        for spec in specs:
            if spec == "identity":
                ks.append(np.eye(model.triple.dim_h, dtype=np.complex128))
            elif spec.startswith("exp:"):
                ks.append(constructions.exp_element(model.triple.algebra, float(spec[4:]), rng))
            else:
                ks.append(_read_matrix_file(spec))
        out = constructions.multiconformal_rescale(model, ks, args.tol)
    _save(out, args.output)
    return EXIT_OK


def cmd_spectrum(args):
    model = document.load(args.path)
    lam = np.linalg.eigvalsh(0.5 * (model.triple.d + model.triple.d.conj().T))
    if args.format == "json":
        sys.stdout.write(json.dumps([float(x) for x in lam]) + "\n")
    else:
        sys.stdout.write("".join(f"{x!r}\n" for x in lam))
    return EXIT_OK


def _common(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--tol", type=float, default=default if suppress else DEFAULT_TOL)
    parser.add_argument("--format", choices=("table", "json"), default=default if suppress else "table")
    parser.add_argument("--seed", type=int, default=default if suppress else 0)


def build_parser():
    parser = argparse.ArgumentParser(prog="multitwist", description="Multitwisted real spectral triples")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("example", help="build an example triple")
    p.add_argument("name")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--t", type=float, default=0.3)
    p.add_argument("--k1")
    p.add_argument("--k2")
    p.add_argument("--split", action="store_true", help="fuzzy-torus3: one summand per direction")
    p.add_argument("--h-choice", default="default", choices=("default", "random"))
    p.add_argument("--twist", default="full", choices=("full", "reduced"), help="circle-bundle twist")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("check", help="run every condition and assert a subset")
    p.add_argument("path")
    p.add_argument("--assert", dest="assert_set", help="comma-separated condition ids")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("tensor", help="tensor an even triple with another")
    p.add_argument("even")
    p.add_argument("odd")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("fluctuate", help="fluctuate by a selfadjoint one-form")
    p.add_argument("path")
    p.add_argument("--form", required=True, help="random:N or a JSON file of terms")
    p.add_argument("--eps-preserving", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fluctuate)

    p = sub.add_parser("rescale", help="multiconformal or Clifford rescaling")
    p.add_argument("path")
    p.add_argument("--k", action="append", help="exp:SCALE, identity or a JSON matrix file")
    p.add_argument("--clifford", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rescale)

    p = sub.add_parser("spectrum", help="ascending eigenvalues of D")
    p.add_argument("path")
    p.set_defaults(func=cmd_spectrum)

    for sp in sub.choices.values():
        _common(sp, suppress=True)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
