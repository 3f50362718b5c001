"""Command-line front end: ``gbta <subcommand> [options]``.

Exit codes: 0 success, 1 domain error, 2 usage error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import acceptance, classify, dynamics, enveloping, ideals, iso, linalg
from .algebra import Basis, Element, multiply, table
from .params import DEFAULT_TOL, Mode, ParamsError, from_alpha, new_params, p_membership

DEFAULT_SEED = 42

OK, DOMAIN_ERROR, USAGE_ERROR, VERIFICATION_FAILED = 0, 1, 2, 3


class UsageError(Exception):
    pass


# output ----------------------------------------------------------------------


def _num(x) -> str:
    if isinstance(x, Fraction):
        return json.dumps(str(x) if x.denominator != 1 else str(x.numerator))
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not np.isfinite(x):
        return "null"
    return f"{x:.17g}"


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits.

    Exact rationals are written as strings such as "3/10".
    """
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + to_json(v, indent, _level + 1) for v in seq) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    return _num(obj)


def _coords(x) -> list:
    return [v if isinstance(v, Fraction) else float(v) for v in np.asarray(x).ravel()]


def _csv(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(str(v) if isinstance(v, (int, str, Fraction)) else f"{float(v):.17g}" for v in row) + "\n")
    return out.getvalue()


def _text(obj, _level: int = 0) -> str:
    pad = "  " * _level
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if (isinstance(v, dict) and v) or (isinstance(v, list) and any(isinstance(e, (dict, list)) for e in v)):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, _level + 1))
            else:
                lines.append(f"{pad}{k}: {_text(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        if any(isinstance(e, (dict, list)) for e in obj):
            return "\n".join(_text(e, _level) if isinstance(e, dict) else pad + _text(e) for e in obj)
        return ", ".join(_text(e) for e in obj)
    if isinstance(obj, float):
        return f"{obj:.17g}"
    return str(obj)


# argument handling -----------------------------------------------------------


def _vector(text: str, name: str) -> list[str]:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 4 or not all(parts):
        raise UsageError(f"{name} must be 4 comma-separated numbers, got {text!r}")
    return parts


def _pair(text: str, name: str) -> tuple[str, str]:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise UsageError(f"{name} must be 'lambda,beta', got {text!r}")
    return parts[0], parts[1]


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("GBTA_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"GBTA_SEED must be an integer, got {env!r}") from None


def _params(args):
    if args.beta is None:
        raise UsageError("--beta is required")
    if (args.lam is None) == (args.alpha is None):
        raise UsageError("give exactly one of --lambda or --alpha")
    if args.lam is not None:
        return new_params(args.lam, args.beta, args.tol, args.mode)
    return from_alpha(args.alpha, args.beta, args.tol, args.mode)


def _element(p, text: str, name: str, basis: Basis) -> Element:
    vals = _vector(text, name)
    coords = [p.scalar(Fraction(v) if p.exact else float(Fraction(v) if "/" in v else v)) for v in vals]
    return Element.of(coords, basis, exact=p.exact)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", help="lambda = 1 - alpha, in (0, 1)")
    common.add_argument("--alpha", help="alpha = 1 - lambda, in (0, 1)")
    common.add_argument("--beta", help="beta in (0, 1)")
    common.add_argument("--basis", choices=["phenotype", "transformed"], default=None,
                        help="basis of element input and output")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.FLOAT64.value,
                        help="float64 or exact rational arithmetic")
    common.add_argument("--seed", type=int, default=None, help=f"random seed (default $GBTA_SEED or {DEFAULT_SEED})")
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--output", help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="gbta", description="Generalized ABO-blood-type algebras.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, description=help_)

    s = add("multiply", "product x . y")
    s.add_argument("--x", required=True, help="4 comma-separated coordinates")
    s.add_argument("--y", required=True, help="4 comma-separated coordinates")
    add("table", "structure constants of the multiplication")
    s = add("evolve", "one step of the evolution operator V")
    s.add_argument("--x0", required=True, help="phenotype frequencies O,A,B,AB")
    s = add("trajectory", "iterate V from a starting state")
    s.add_argument("--x0", required=True, help="phenotype frequencies O,A,B,AB")
    s.add_argument("--steps", type=int, required=True)
    s = add("idempotents", "all nonzero idempotents")
    s.add_argument("--search", action="store_true", help="also run the Newton cross-check")
    s = add("nilpotents", "absolute nilpotents, optionally with a Newton search")
    s.add_argument("--seeds", type=int, default=0, help="number of Newton starts (0 skips the search)")
    s = add("solvable", "solvability index of an element or a solvable family")
    s.add_argument("--x", help="element whose solvability index is wanted")
    s.add_argument("--index", type=int, help="index n of the family to list")
    s.add_argument("--cap", type=int, default=classify.DEFAULT_CAP)
    s = add("ideals", "ideal lattice and its Hasse diagram")
    s.add_argument("--trials", type=int, default=0, help="random closures for the falsifier (0 skips it)")
    add("enveloping", "associative algebra generated by left multiplications")
    s = add("isomorphic", "decide whether two algebras are isomorphic")
    s.add_argument("--lhs", required=True, help="lambda,beta of the target")
    s.add_argument("--rhs", required=True, help="lambda,beta of the source")
    s.add_argument("--trials", type=int, default=0, help="also run the numeric witness search")
    s = add("verify", "run every acceptance check")
    s.add_argument("--only", help="comma-separated criterion numbers")
    return parser


# subcommands -----------------------------------------------------------------


def _basis(args, default: Basis) -> Basis:
    return Basis(args.basis) if args.basis else default


def cmd_multiply(args, p):
    basis = _basis(args, Basis.TRANSFORMED)
    x, y = _element(p, args.x, "--x", basis), _element(p, args.y, "--y", basis)
    z = multiply(table(p, basis), x, y)
    return {"basis": basis.value, "x": _coords(x.coords), "y": _coords(y.coords), "product": _coords(z.coords)}, None


def cmd_table(args, p):
    basis = _basis(args, Basis.TRANSFORMED)
    t = table(p, basis)
    names = basis.names
    rows = [(names[i], names[j], *_coords(t.c[i, j])) for i in range(4) for j in range(i, 4)]
    data = {"basis": basis.value, "lambda": p.lam, "beta": p.beta,
            "products": {f"{r[0]}*{r[1]}": list(r[2:]) for r in rows}}
    return data, (["left", "right", *names], rows)


def _state(p, text):
    vals = _vector(text, "--x0")
    if p.exact:
        return np.array([Fraction(v) for v in vals], dtype=object)
    return np.array([float(Fraction(v)) for v in vals])


def cmd_evolve(args, p):
    s = _state(p, args.x0)
    if not dynamics.on_simplex(s, p.tol):
        raise dynamics.NotOnSimplex(f"{args.x0} is not a probability vector")
    nxt = dynamics.evolve(p, s)
    a = dynamics.allele_freqs(p, s)
    return {"state": _coords(s), "next": _coords(nxt),
            "allele_freqs": {"O": a.p_O, "A": a.p_A, "B": a.p_B}}, (["x1", "x2", "x3", "x4"], [_coords(nxt)])


def cmd_trajectory(args, p):
    traj = dynamics.trajectory(p, _state(p, args.x0), args.steps)
    rows = [(k, *_coords(s)) for k, s in enumerate(traj.states)]
    data = {"steps": traj.steps, "converged": traj.converged, "converged_at": traj.converged_at, "states": [_coords(s) for s in traj.states]}
    return data, (["step", "x1", "x2", "x3", "x4"], rows)


def cmd_idempotents(args, p):
    s = classify.idempotents(p)
    m = p_membership(p)
    coords = [_coords(e.coords) for e in s.items]
    data = {"lambda": p.lam, "beta": p.beta, "in_P": m.in_p, "count": len(s), "basis": "transformed",
            "labels": list(s.labels), "idempotents": coords, "verified": True, "merged": list(s.merged)}
    if args.search:
        r = classify.idempotent_search(p)
        data["search"] = {"roots": len(r.roots), "unexpected": [list(v) for v in r.unexpected], "missed": r.missed}
    rows = [(lab, *c) for lab, c in zip(s.labels, coords)]
    return data, (["label", "o", "a", "b", "ab"], rows)


def cmd_nilpotents(args, p, seed):
    space = classify.absolute_nilpotents(p)
    data = {"subspace": "⟨ab⟩", "basis": [_coords(r) for r in space.basis_rows]}
    if args.seeds:
        r = classify.nilpotent_search(p, seeds=args.seeds, seed=seed)
        data["search"] = {"seeds": r.seeds, "converged": r.converged, "outside": r.outside,
                          "max_distance": r.max_distance}
    return data, None


def cmd_solvable(args, p):
    if args.x is None and args.index is None:
        raise UsageError("give --x or --index")
    data = {"in_P": p_membership(p).in_p}
    if args.x is not None:
        x = _element(p, args.x, "--x", Basis.TRANSFORMED)
        data["element"] = _coords(x.coords)
        data["index"] = classify.solvability_index(classify.transformed_table(p), x, args.cap)
    if args.index is not None:
        fam = classify.solvable_family(p, args.index)
        data["family"] = None if fam is None else {
            "index": fam.index, "form": "a_coeff*t*a + t*b + s*ab" if fam.index > 2 else "s*ab",
            "a_coeff": fam.a_coeff}
    return data, None


def cmd_ideals(args, p, seed):
    rep = ideals.lattice(p)
    data = rep.to_json()
    if args.trials:
        f = ideals.falsify_lattice(p, args.trials, seed)
        data["falsification"] = {"trials": f.trials, "violations": f.violations, "closures": f.counts}
    if rep.warning:
        print(f"warning: {rep.warning}", file=sys.stderr)
    return data, None


def cmd_enveloping(args, p):
    rep = enveloping.enveloping(p)
    return rep.to_json(), None


def cmd_isomorphic(args, seed):
    mode = args.mode
    p1 = new_params(*_pair(args.lhs, "--lhs"), args.tol, mode)
    p2 = new_params(*_pair(args.rhs, "--rhs"), args.tol, mode)
    rep = iso.decide_isomorphic(p1, p2)
    data = rep.to_json()
    if args.trials:
        w = iso.search_isomorphism(p1, p2, args.trials, seed)
        data["search_witness"] = None if w is None else [list(r) for r in w]
        if w is not None and not rep.isomorphic:
            raise classify.VerificationFailed("numeric search found a witness for a pair ruled non-isomorphic")
    return data, None


def cmd_verify(args, seed):
    numbers = None
    if args.only:
        try:
            numbers = [int(v) for v in args.only.split(",")]
        except ValueError:
            raise UsageError(f"--only takes criterion numbers, got {args.only!r}") from None
        if any(n not in acceptance.CHECKS for n in numbers):
            raise UsageError(f"criteria are numbered 1..{len(acceptance.CHECKS)}")
    results = []
    for n in numbers or sorted(acceptance.CHECKS):
        r = acceptance.run(n, seed)
        print(r.line(), file=sys.stderr, flush=True)
        results.append(r)
    data = {"passed": all(r.passed for r in results),
            "criteria": [{"number": r.number, "title": r.title, "passed": r.passed,
                          "detail": r.detail, "seconds": round(r.seconds, 3)} for r in results]}
    return data, None


# entry point -----------------------------------------------------------------


def _render(data, table_rows, fmt: str) -> str:
    if fmt == "json":
        return to_json(data) + "\n"
    if fmt == "csv":
        if table_rows is None:
            raise UsageError("this subcommand has no CSV output; use --format json or text")
        return _csv(*table_rows)
    return _text(data) + "\n"


def run(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code else OK
    try:
        seed = _seed(args)
        cmd = args.command
        if cmd == "isomorphic":
            data, rows = cmd_isomorphic(args, seed)
        elif cmd == "verify":
            data, rows = cmd_verify(args, seed)
        else:
            p = _params(args)
            if cmd in ("nilpotents", "ideals"):
                data, rows = globals()[f"cmd_{cmd}"](args, p, seed)
            else:
                data, rows = globals()[f"cmd_{cmd}"](args, p)
        text = _render(data, rows, args.format)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"gbta: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (classify.VerificationFailed, enveloping.NoConvergence) as exc:
        print(f"gbta: verification failed: {exc}", file=sys.stderr)
        return VERIFICATION_FAILED
    except (ParamsError, dynamics.NotOnSimplex, classify.DenominatorVanishes, classify.BadIndex,
            linalg.DimensionMismatch, ValueError, ArithmeticError) as exc:
        print(f"gbta: {exc}", file=sys.stderr)
        return DOMAIN_ERROR

    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cmd == "verify" and not data["passed"]:
        return VERIFICATION_FAILED
    return OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
