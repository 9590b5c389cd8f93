"""``nikmon`` command line: lattice queries and verification suites.

Exit codes: 0 success or passing suite, 1 failing suite, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import suites
from .discriminant import discriminant_module
from .intlinalg import imat, invariant_factors
from .isometry import Isometry, signature, spinor_norm
from .lattice import Lattice, determinant, from_symbols

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(ValueError):
    pass


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def lattice_from_json(data) -> Lattice:
    if isinstance(data, list):
        data = {"gram": data}
    if not isinstance(data, dict):
        raise InputError("lattice JSON must be an object")
    try:
        if "sum" in data:
            return from_symbols(data["sum"], data.get("label"))
        if "gram" in data:
            return Lattice(imat(data["gram"]), data.get("label", ""))
    except (ValueError, TypeError) as exc:
        raise InputError(f"invalid lattice: {exc}") from exc
    raise InputError('lattice JSON needs a "gram" or a "sum" field')


def resolve_lattice(spec: str) -> Lattice:
    named = suites.named_lattices()
    if spec in named:
        return named[spec]
    if Path(spec).exists():
        return lattice_from_json(_read_json(spec))
    raise InputError(f"unknown lattice {spec!r}; built-in names: {', '.join(named)}")


def _group_string(factors) -> str:
    if not factors:
        return "0"
    parts = []
    for d in sorted(set(factors)):
        k = factors.count(d)
        parts.append(f"(Z/{d})" + (f"^{k}" if k > 1 else ""))
    return " + ".join(parts)


def cmd_info(args) -> tuple[int, dict]:
    L = resolve_lattice(args.lattice)
    factors = [d for d in invariant_factors(L.gram) if d != 1]
    pos, neg = signature(L)
    return EXIT_OK, {
        "label": L.label, "rank": L.rank, "determinant": determinant(L), "even": L.is_even,
        "signature": [pos, neg], "discriminant_group": factors, "discriminant": _group_string(factors),
    }


def cmd_discriminant(args) -> tuple[int, dict]:
    L = resolve_lattice(args.lattice)
    if not L.is_even:
        raise InputError("discriminant form needs an even lattice")
    A = discriminant_module(L)
    return EXIT_OK, {
        "invariant_factors": list(A.invariant_factors),
        "q": [str(x) for x in A.gen_q],
        "b": [[str(x) for x in row] for row in A.gen_b],
        "generators": [[str(x) for x in A.lift(A.basis_element(i))] for i in range(A.ngens)],
    }


def cmd_spinor(args) -> tuple[int, dict]:
    L = resolve_lattice(args.lattice)
    data = _read_json(args.matrix)
    m = data.get("matrix") if isinstance(data, dict) else data
    try:
        f = Isometry(L, imat(m))
    except (ValueError, TypeError) as exc:
        raise InputError(f"not an isometry of {L.label or 'the lattice'}: {exc}") from exc
    return EXIT_OK, {"spinor_norm": spinor_norm(f)}


def cmd_invariants(args) -> tuple[int, dict]:
    from . import nikulin

    data = _read_json(args.vector)
    v = data.get("vector") if isinstance(data, dict) else data
    try:
        inv = nikulin.orbit_invariants(v)
    except (ValueError, TypeError) as exc:
        raise InputError(f"invalid vector: {exc}") from exc
    return EXIT_OK, {"square": inv.square, "divisibility": inv.divisibility,
                     "lambda1_ray_div1": inv.lambda1_ray_div1, "e8_mod4_zero": inv.e8_mod4_zero}


def cmd_verify(args) -> tuple[int, dict]:
    kw = {}
    if args.emit_words:
        if suites.ALIASES.get(args.suite, args.suite) != "surjectivity":
            raise InputError("--emit-words only applies to the surjectivity suite")
        kw["emit_words"] = args.emit_words
    report = suites.run_suite(args.suite, seed=args.seed, trials=args.trials, **kw)
    return (EXIT_OK if report.passed else EXIT_FAIL), report.to_json()


def _human(out: dict) -> str:
    if "suite" in out and "pass" in out:
        lines = [f"{out['suite']}: {'PASS' if out['pass'] else 'FAIL'} "
                 f"({out['trials']} trials, {out['elapsed_ms']} ms)"]
        for k, v in out["values"].items():
            if k != "certificates":
                lines.append(f"  {k}: {v}")
        for f in out["failures"][:20]:
            where = "" if f["trial"] is None else f" [trial {f['trial']}, seed {f['seed']}]"
            lines.append(f"  failure{where}: {f['description']}")
        if len(out["failures"]) > 20:
            lines.append(f"  ... {len(out['failures']) - 20} more failures")
        return "\n".join(lines)
    if set(out) == {"spinor_norm"}:
        return f"{out['spinor_norm']:+d}"
    return "\n".join(f"{k}: {v}" for k, v in out.items())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="base seed (default 0)")
    common.add_argument("--trials", type=int, default=argparse.SUPPRESS, help="number of random trials")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print JSON")
    common.add_argument("--out", default=argparse.SUPPRESS, help="also write the JSON output to FILE")

    p = argparse.ArgumentParser(prog="nikmon", parents=[common],
                                description="Exact lattice computations for Nikulin-type orbifold monodromy.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("info", parents=[common], help="rank, determinant, discriminant group")
    s.add_argument("lattice")
    s = sub.add_parser("discriminant", parents=[common], help="discriminant quadratic module")
    s.add_argument("lattice")
    s = sub.add_parser("spinor", parents=[common], help="real spinor norm of an isometry")
    s.add_argument("--lattice", required=True)
    s.add_argument("--matrix", required=True)
    s = sub.add_parser("invariants", parents=[common], help="orbit invariants of a lambda_nik vector")
    s.add_argument("--vector", required=True)
    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite", choices=suites.suite_names())
    s.add_argument("--emit-words", metavar="FILE", help="dump transversal words (surjectivity suite)")
    return p


COMMANDS = {"info": cmd_info, "discriminant": cmd_discriminant, "spinor": cmd_spinor,
            "invariants": cmd_invariants, "verify": cmd_verify}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    args.seed = getattr(args, "seed", 0)
    args.trials = getattr(args, "trials", None)
    as_json = getattr(args, "json", False)
    out_file = getattr(args, "out", None)
    if args.seed < 0 or args.seed >= 2 ** 64:
        print("nikmon: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_USAGE
    if args.trials is not None and args.trials < 0:
        print("nikmon: --trials must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    try:
        code, out = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"nikmon: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(out, indent=2)
    print(text if as_json else _human(out))
    if out_file:
        Path(out_file).write_text(text + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
