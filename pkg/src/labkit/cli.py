"""Command-line front end.

Exit codes: 0 success, 1 a mathematical check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import algebra as alg_mod
from .algebra import (
    AlgebraError,
    LieAlgebra,
    adjoint_matrix,
    berezin_bracket,
    diffop_apply,
    invariant_count,
    is_invariant,
    validate,
)
from .enveloping import (
    filtration_degree,
    format_ncpoly,
    nc_commutator,
    normal_order,
    parse_ncpoly,
    project,
    symmetrize,
)
from .labeling import (
    ChainError,
    OracleBudget,
    ReductionChain,
    certify_commuting,
    functional_independence,
    grading_split,
    is_subgroup_scalar,
    mlp_count,
    validate_chain,
)
from .linalg import generic_rank
from .poly import format_poly, parse_poly, parse_scalar
from .text import ParseError

BUILTIN = {
    "so3": alg_mod.so3,
    "heisenberg": alg_mod.heisenberg,
    "sl3": alg_mod.sl3,
}

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class CliConfig:
    seed: int
    output: str
    oracle_budget: int | None


def _seed_default() -> int:
    raw = os.environ.get("LABKIT_SEED")
    if raw is None:
        return 0
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"LABKIT_SEED must be an unsigned integer, got {raw!r}") from None
    if value < 0:
        raise InputError("LABKIT_SEED must be non-negative")
    return value


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _read_text(arg: str) -> str:
    """Literal text, ``@path`` for a file, or ``-`` for stdin."""
    if arg == "-":
        return sys.stdin.read()
    if arg.startswith("@"):
        try:
            return Path(arg[1:]).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {arg[1:]}: {exc.strerror}") from None
    return arg


def _load_json(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_algebra(ref: str) -> LieAlgebra:
    if ref in BUILTIN and not Path(ref).exists():
        return BUILTIN[ref]()
    return LieAlgebra.from_json(_load_json(ref))


def load_chain(ref: str) -> ReductionChain:
    data = _load_json(ref)
    base = Path(ref).parent if ref != "-" else None
    return ReductionChain.from_json(data, base)


def _algebra(args) -> LieAlgebra:
    if getattr(args, "algebra", None):
        return load_algebra(args.algebra)
    if getattr(args, "chain", None):
        return load_chain(args.chain).ambient
    raise InputError("--algebra or --chain is required")


def _poly(arg: str | None, alg: LieAlgebra, flag: str):
    if arg is None:
        raise InputError(f"{flag} is required")
    text = _read_text(arg)
    try:
        return parse_poly(text, alg.dim)
    except ParseError as exc:
        raise InputError(f"{flag}: {exc}\n  {text.strip()}\n  {' ' * exc.pos}^") from None


def _ncpoly(arg: str | None, alg: LieAlgebra, flag: str):
    if arg is None:
        raise InputError(f"{flag} is required")
    text = _read_text(arg)
    try:
        return parse_ncpoly(text, alg.dim)
    except ParseError as exc:
        raise InputError(f"{flag}: {exc}\n  {text.strip()}\n  {' ' * exc.pos}^") from None


def _emit(cfg: CliConfig, payload: dict, text: str) -> None:
    if cfg.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


# -- subcommands ----------------------------------------------------------------

def cmd_validate(args, cfg):
    if args.chain:
        chain = load_chain(args.chain)
        rep = validate(chain.ambient)
        cv = validate_chain(chain)
        payload = {"jacobi": rep.to_json(), "chain": cv.to_json()}
        ok = rep.ok and cv.ok
        text = f"jacobi: {'ok' if rep.ok else 'FAILED'}; chain: {'ok' if cv.ok else cv.error}"
    else:
        rep = validate(_algebra(args))
        payload = rep.to_json()
        ok = rep.ok
        text = f"ok ({rep.checked} triples)" if ok else "FAILED: Jacobi fails on " + ", ".join(
            str(t) for t in rep.failures)
    _emit(cfg, payload, text)
    return OK if ok else FAILED


def cmd_rank(args, cfg):
    alg = _algebra(args)
    r = generic_rank(adjoint_matrix(alg), alg.dim, seed=cfg.seed)
    _emit(cfg, {"rank": r, "dim": alg.dim}, str(r))
    return OK


def cmd_invariant_count(args, cfg):
    alg = _algebra(args)
    n = invariant_count(alg, seed=cfg.seed)
    _emit(cfg, {"invariant_count": n}, str(n))
    return OK


def cmd_apply_op(args, cfg):
    alg = _algebra(args)
    f = _poly(args.f, alg, "--f")
    parts = [p for p in args.op.split(",") if p.strip()]
    if len(parts) == 1:
        try:
            idx = int(parts[0])
        except ValueError:
            raise InputError("--op takes a generator index or a comma-separated coefficient list") from None
        if not 0 <= idx < alg.dim:
            raise InputError(f"generator index {idx} out of range")
        coeffs = [1 if k == idx else 0 for k in range(alg.dim)]
    else:
        if len(parts) != alg.dim:
            raise InputError(f"--op needs {alg.dim} coefficients, got {len(parts)}")
        try:
            coeffs = [parse_scalar(p) for p in parts]
        except ParseError as exc:
            raise InputError(f"--op: {exc}") from None
    out = diffop_apply(alg, coeffs, f)
    _emit(cfg, {"result": format_poly(out)}, format_poly(out))
    return OK


def cmd_is_invariant(args, cfg):
    alg = _algebra(args)
    f = _poly(args.f, alg, "--f")
    ok = is_invariant(alg, f)
    _emit(cfg, {"invariant": ok}, "true" if ok else "false")
    return OK if ok else FAILED


def cmd_berezin(args, cfg):
    alg = _algebra(args)
    f, g = _poly(args.f, alg, "--f"), _poly(args.g, alg, "--g")
    pb = berezin_bracket(alg, f, g)
    _emit(cfg, {"bracket": format_poly(pb), "terms": len(pb)}, format_poly(pb))
    return OK


def cmd_symmetrize(args, cfg):
    alg = _algebra(args)
    out = symmetrize(alg, _poly(args.f, alg, "--f"))
    _emit(cfg, {"result": format_ncpoly(out)}, format_ncpoly(out))
    return OK


def cmd_normal_order(args, cfg):
    alg = _algebra(args)
    out = normal_order(alg, _ncpoly(args.f, alg, "--f"))
    _emit(cfg, {"result": format_ncpoly(out)}, format_ncpoly(out))
    return OK


def cmd_commutator(args, cfg):
    alg = _algebra(args)
    if args.symmetrize:
        a = symmetrize(alg, _poly(args.f, alg, "--f"))
        b = symmetrize(alg, _poly(args.g, alg, "--g"))
    else:
        a, b = _ncpoly(args.f, alg, "--f"), _ncpoly(args.g, alg, "--g")
    out = nc_commutator(alg, a, b)
    _emit(cfg, {"result": format_ncpoly(out), "filtration_degree": filtration_degree(out)},
          format_ncpoly(out))
    return OK


def cmd_project(args, cfg):
    alg = _algebra(args)
    out = project(normal_order(alg, _ncpoly(args.f, alg, "--f")))
    _emit(cfg, {"result": format_poly(out)}, format_poly(out))
    return OK


def cmd_mlp_count(args, cfg):
    if not args.chain:
        raise InputError("--chain is required")
    rep = mlp_count(load_chain(args.chain), seed=cfg.seed)
    payload = rep.to_json()
    _emit(cfg, payload, "\n".join(f"{k}: {v}" for k, v in payload.items()))
    return OK


def cmd_scalar_check(args, cfg):
    if not args.chain:
        raise InputError("--chain is required")
    chain = load_chain(args.chain)
    f = _poly(args.f, chain.ambient, "--f")
    ok = is_subgroup_scalar(chain, f)
    _emit(cfg, {"subgroup_scalar": ok}, "true" if ok else "false")
    return OK if ok else FAILED


def cmd_split(args, cfg):
    if args.complement:
        alg = _algebra(args)
        try:
            cv = [int(v) for v in args.complement.split(",") if v.strip()]
        except ValueError:
            raise InputError("--complement takes comma-separated variable indices") from None
    elif args.chain:
        chain = load_chain(args.chain)
        alg = chain.ambient
        if chain.complement_vars is None:
            raise InputError("the chain has no complement_vars; pass --complement")
        cv = sorted(chain.complement_vars)
    else:
        raise InputError("--chain or --complement (with --algebra) is required")
    parts = grading_split(_poly(args.f, alg, "--f"), cv)
    payload = {str(k): format_poly(v) for k, v in sorted(parts.items())}
    _emit(cfg, {"components": payload},
          "\n".join(f"[{k}] {v}" for k, v in payload.items()))
    return OK


def cmd_independence(args, cfg):
    alg = _algebra(args)
    if not args.polys:
        raise InputError("--polys needs at least one polynomial")
    polys = [_poly(p, alg, "--polys") for p in args.polys]
    r = functional_independence(polys, alg.dim, seed=cfg.seed)
    _emit(cfg, {"rank": r, "count": len(polys), "independent": r == len(polys)}, str(r))
    return OK


def cmd_certify(args, cfg):
    alg = _algebra(args)
    f, g = _poly(args.f, alg, "--f"), _poly(args.g, alg, "--g")
    if not f.is_homogeneous() or not g.is_homogeneous():
        raise InputError("certify needs homogeneous polynomials")
    budget = OracleBudget() if cfg.oracle_budget is None else (
        OracleBudget(max_degree=cfg.oracle_budget) if cfg.oracle_budget > 0 else None)
    cert = certify_commuting(alg, f, g, budget, pair_id=args.pair_id, cross_check=args.cross_check)
    payload = cert.to_json()
    _emit(cfg, payload, f"{cert.verdict.value} ({cert.nonfactorizable}, bracket "
                        f"{'vanishes' if cert.bracket_vanishes else 'nonzero'}"
                        f"{', oracle' if cert.oracle_used else ''})")
    return OK


def cmd_sp6_verify(args, cfg):
    from .sp6 import verify_all

    report = verify_all(seed=cfg.seed)
    if cfg.output == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for c in report["checks"]:
            print(f"{'ok  ' if c['ok'] else 'FAIL'} {c['name']}")
        for c in report["certificates"]:
            print(f"cert {c['pair_id']}: {c['verdict']} ({c['nonfactorizable']})")
        tc = report["term_counts"]
        print(f"terms {tc['computed']} vs reported {tc['reported']} [{tc['normalization']}]")
    return OK if report["ok"] else FAILED


def cmd_sp6_export(args, cfg):
    from .sp6 import build_artifacts

    out = Path(args.dir)
    out.mkdir(parents=True, exist_ok=True)
    art = build_artifacts()
    (out / "sp6.json").write_text(json.dumps(art.algebra.to_json(), indent=1))
    (out / "sp6_su3u1.json").write_text(json.dumps(art.adapted.to_json(), indent=1))
    (out / "sp6_u3.json").write_text(json.dumps(art.chain.to_json("sp6.json"), indent=1))
    (out / "sp6_su3u1_chain.json").write_text(
        json.dumps(art.adapted_chain.to_json("sp6_su3u1.json"), indent=1))
    polys = {
        "C2": art.casimirs.C2, "C4": art.casimirs.C4, "C6": art.casimirs.C6,
        "C2_h": art.h_basis_casimirs[0], "C4_h": art.h_basis_casimirs[1],
        "C6_h": art.h_basis_casimirs[2], **art.labels, **art.sub,
    }
    for name, p in polys.items():
        (out / f"{name}.poly").write_text(format_poly(p) + "\n")
    written = sorted(x.name for x in out.iterdir())
    _emit(cfg, {"dir": str(out), "files": written}, "\n".join(written))
    return OK


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=None,
                        help="seed for randomized rank checks (default: $LABKIT_SEED or 0)")
    common.add_argument("--output", choices=("text", "json"), default="text")
    common.add_argument("--oracle-budget", type=int, default=None,
                        help="max degree for the enveloping-algebra oracle (0 disables it)")

    p = argparse.ArgumentParser(prog="labkit", description="Exact Berezin-bracket toolkit for missing-label operators.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help, *flags):
        sp = sub.add_parser(name, parents=[common], help=help)
        if "alg" in flags:
            sp.add_argument("--algebra", help="algebra JSON file or builtin name (so3, heisenberg, sl3)")
            sp.add_argument("--chain", help="reduction chain JSON file")
        if "chain" in flags and "alg" not in flags:
            sp.add_argument("--chain", help="reduction chain JSON file")
        if "f" in flags:
            sp.add_argument("--f", help="polynomial text, @file or -")
        if "g" in flags:
            sp.add_argument("--g", help="polynomial text, @file or -")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "Jacobi check (and chain closure with --chain)", "alg")
    add("rank", cmd_rank, "generic rank of the adjoint matrix", "alg")
    add("invariant-count", cmd_invariant_count, "number of functionally independent invariants", "alg")
    sp = add("apply-op", cmd_apply_op, "apply a differential operator to --f", "alg", "f")
    sp.add_argument("--op", required=True, help="generator index, or comma-separated coefficients")
    add("is-invariant", cmd_is_invariant, "is --f annihilated by every generator", "alg", "f")
    add("berezin", cmd_berezin, "Berezin bracket of --f and --g", "alg", "f", "g")
    add("symmetrize", cmd_symmetrize, "symmetrized enveloping element of --f", "alg", "f")
    add("normal-order", cmd_normal_order, "PBW normal form of a word polynomial", "alg", "f")
    sp = add("commutator", cmd_commutator, "commutator in the enveloping algebra", "alg", "f", "g")
    sp.add_argument("--symmetrize", action="store_true",
                    help="read commutative polynomials and symmetrize them first")
    add("project", cmd_project, "commutative image of a word polynomial", "alg", "f")
    add("mlp-count", cmd_mlp_count, "missing label count for a chain", "chain")
    add("scalar-check", cmd_scalar_check, "is --f a subgroup scalar of the chain", "chain", "f")
    sp = add("split", cmd_split, "split --f by degree in the complement variables", "alg", "f")
    sp.add_argument("--complement", help="comma-separated complement variable indices")
    sp = add("independence", cmd_independence, "Jacobian rank of a list of polynomials", "alg")
    sp.add_argument("--polys", nargs="+", help="polynomials (text, @file or -)")
    sp = add("certify", cmd_certify, "commutativity certificate for a pair", "alg", "f", "g")
    sp.add_argument("--pair-id", default="")
    sp.add_argument("--cross-check", action="store_true",
                    help="run the enveloping oracle whenever the budget allows")

    sp6 = sub.add_parser("sp6", help="the sp(6) > su(3) x u(1) pipeline")
    sp6_sub = sp6.add_subparsers(dest="sp6_command", required=True)
    v = sp6_sub.add_parser("verify", parents=[common], help="run every check and report")
    v.set_defaults(func=cmd_sp6_verify)
    e = sp6_sub.add_parser("export", parents=[common], help="write algebra, chain and polynomials")
    e.add_argument("--dir", default="sp6_export")
    e.set_defaults(func=cmd_sp6_export)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        seed = args.seed if args.seed is not None else _seed_default()
        cfg = CliConfig(seed, args.output, args.oracle_budget)
        return args.func(args, cfg)
    except (InputError, ParseError, AlgebraError, ChainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
