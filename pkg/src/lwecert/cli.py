"""Command-line entry point.

Every command produces one JSON artifact. With ``--out`` it is written to a
file, with ``--json`` it is printed; otherwise a one-line summary is printed.
Exit status: 0 success, 1 domain outcome (no inverse, invalid certificate,
rejected proof, mismatches), 2 usage or malformed input, 3 resource ceiling.
Diagnostics go to stderr as a JSON object. No colour is ever emitted, so
``NO_COLOR`` is honoured trivially.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

from . import inverter, lattice, owf
from .laq import kernel as laq_kernel
from .laq.scripts import LEMMA_IDS, ScriptError, generate_script
from .laq.semantics import EvalError, Valuation, eval_formula
from .laq.syntax import LaqSyntaxError, parse_formula, show
from .lattice import BoundTooSmallError, LatticeBasis, ResourceLimitError
from .matrix import MatrixError, ModMatrix, RatMatrix, format_rational, matrix_from_json, matrix_to_json, parse_rational
from .prop import cnf as prop_cnf
from .prop.check import check_equivalence
from .prop.translate import ObjectAssignment, TranslationError, translate

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DomainOutcome(Exception):
    """A well-formed run whose answer is negative; carries the artifact."""

    def __init__(self, artifact: dict, message: str):
        super().__init__(message)
        self.artifact = artifact


# -- argument helpers ------------------------------------------------------------------

def _rational(text: str):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError, MatrixError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r} ({exc})") from None


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _read_text(path_or_text: str) -> str:
    p = Path(path_or_text)
    if p.is_file():
        return p.read_text()
    return path_or_text


def _params(args) -> owf.OwfParams:
    try:
        return owf.OwfParams(args.n, args.m, args.q, args.alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _unwrap(d, key: str) -> dict:
    """Accept either a bare object or the artifact of the command that made it."""
    return d[key] if isinstance(d, dict) and isinstance(d.get(key), dict) else d


def _instance(args) -> owf.LweInstance:
    try:
        return owf.LweInstance.from_json(_unwrap(_read_json(args.instance), "instance"))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed instance: {exc}") from None


def _certificate(path: str) -> owf.InjectivityCertificate:
    try:
        return owf.InjectivityCertificate.from_json(_unwrap(_read_json(path), "certificate"))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed certificate: {exc}") from None


def _matrix(path: str):
    try:
        return matrix_from_json(_read_json(path))
    except MatrixError as exc:
        raise UsageError(f"malformed matrix: {exc}") from None


def _seed(args) -> int:
    """The explicit seed, or a recorded draw from OS entropy."""
    if args.seed is None:
        args.seed = secrets.randbits(64)
    return args.seed


# -- commands ----------------------------------------------------------------------------

def cmd_sample(args) -> dict:
    params = _params(args)
    seed = _seed(args)
    inst = owf.sample_instance(params, seed, args.max_resamples)
    return {"command": "sample", "seed": seed, "instance": inst.to_json()}


def cmd_cert_gen(args) -> dict:
    inst = _instance(args)
    cert = owf.generate_certificate(inst.A, inst.params, args.max_nodes)
    if cert is None:
        raise DomainOutcome({"command": "cert gen", "certificate": None},
                            "no certificate within the norm bound")
    return {"command": "cert gen", "certificate": cert.to_json()}


def cmd_cert_verify(args) -> dict:
    inst = _instance(args)
    cert = _certificate(args.cert)
    v = owf.verify_certificate(inst.A, cert, inst.params)
    out = {"command": "cert verify", "valid": v.ok, "reason": v.reason}
    if not v.ok:
        raise DomainOutcome(out, f"certificate rejected: {v.reason}")
    return out


def cmd_invert(args) -> dict:
    inst = _instance(args)
    z = tuple(int(x) for x in args.z.split(",")) if args.z else inst.z
    if len(z) != inst.A.rows:
        raise UsageError(f"z must have {inst.A.rows} coordinates")
    method = args.method
    queries = None
    if method == "bruteforce":
        p = inverter.invert_bruteforce(inst.A, z, inst.params, args.max_nodes)
    elif method in ("trapdoor", "oracle:trapdoor"):
        if not args.cert:
            raise UsageError(f"--method {method} needs --cert")
        cert = _certificate(args.cert)
        if method == "trapdoor":
            try:
                p = inverter.invert_with_trapdoor(inst.A, cert, z, inst.params)
            except inverter.CertificateError as exc:
                raise DomainOutcome({"command": "invert", "method": method, "preimage": None,
                                     "reason": str(exc)}, str(exc)) from None
        else:
            oracle = inverter.TrapdoorOracle(inst.params, cert)
            p = inverter.invert_bitwise(oracle, inst.A, z, inst.params)
            queries = oracle.calls
    elif method == "oracle:bruteforce":
        oracle = inverter.BruteForceOracle(inst.params, args.max_nodes)
        p = inverter.invert_bitwise(oracle, inst.A, z, inst.params)
        queries = oracle.calls
    else:
        raise UsageError(f"unknown method {method!r}")
    out = {"command": "invert", "method": method, "z": list(z),
           "preimage": None if p is None else p.to_json()}
    if queries is not None:
        out["queries"] = queries
    if p is None:
        out["reason"] = "no preimage in the domain"
        raise DomainOutcome(out, "no preimage")
    return out


def _basis(args) -> LatticeBasis:
    M = _matrix(args.matrix)
    kind = args.kind
    if kind == "integer":
        return LatticeBasis.integer(M if isinstance(M, RatMatrix) else M.lift())
    if not isinstance(M, ModMatrix):
        raise UsageError(f"a {kind} lattice needs a matrix with a modulus")
    return LatticeBasis.modular(M) if kind == "modular" else LatticeBasis.qary(M)


def _report_json(r) -> dict:
    return {"index": r.index, "length_squared": format_rational(r.length_squared),
            "witness": [format_rational(x) for x in r.witness],
            "coefficients": list(r.coefficients)}


def cmd_lattice(args) -> dict:
    op = args.lattice_op
    if op == "dual-basis":
        M = _matrix(args.matrix)
        B = M if isinstance(M, RatMatrix) else M.lift()
        try:
            return {"command": "lattice dual-basis", "dual": matrix_to_json(lattice.dual_basis(B))}
        except (lattice.RankDeficientError, MatrixError) as exc:
            raise DomainOutcome({"command": "lattice dual-basis", "dual": None}, str(exc)) from None
    if op == "qary-basis":
        M = _matrix(args.matrix)
        if not isinstance(M, ModMatrix):
            raise UsageError("qary-basis needs a matrix with a modulus")
        try:
            return {"command": "lattice qary-basis", "basis": matrix_to_json(lattice.qary_basis(M))}
        except lattice.RankDeficientError as exc:
            raise DomainOutcome({"command": "lattice qary-basis", "basis": None}, str(exc)) from None
    basis = _basis(args)
    try:
        if op == "lambda1":
            r = lattice.lambda1_enum(basis, args.bound, args.max_nodes)
            return {"command": "lattice lambda1", "kind": args.kind, "minimum": _report_json(r)}
        rs = lattice.successive_minima_enum(basis, args.k, args.bound, args.max_nodes)
        return {"command": "lattice minima", "kind": args.kind, "minima": [_report_json(r) for r in rs]}
    except BoundTooSmallError as exc:
        raise DomainOutcome({"command": f"lattice {op}", "minimum": None}, str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_experiment(args) -> dict:
    kind = args.experiment
    seed = None
    if kind == "count-lattices":
        out = {"command": "experiment count-lattices", "n": args.n, "m": args.m, "q": args.q,
               "count": owf.count_lattices(args.n, args.m, args.q)}
        return out
    params = _params(args)
    seed = _seed(args)
    if kind == "rank":
        rep = owf.experiment_rank(params, args.trials, seed)
    elif kind == "short":
        rep = owf.experiment_short_vectors(params, args.r, args.trials, seed, args.max_nodes)
    elif kind == "tail":
        rep = owf.experiment_gaussian_tail(params, args.trials, seed)
    else:
        rep = owf.experiment_transference(params, args.trials, seed, args.max_nodes)
    return {"command": f"experiment {kind}", "params": params.to_json(), "report": rep.to_json()}


def cmd_laq_check(args) -> dict:
    try:
        proof = laq_kernel.parse_script(_read_text(args.file))
    except (LaqSyntaxError, laq_kernel.KernelError) as exc:
        raise UsageError(f"cannot parse script: {exc}") from None
    v = laq_kernel.check_proof(proof)
    out = {"command": "laq check", "proof": proof.name, "theorem": proof.theorem.show(proof.sorts),
           "steps": len(proof.steps), "lemmas": sorted(proof.lemmas), "accepted": v.ok,
           "step": v.step, "reason": v.reason, "fingerprint": proof.fingerprint()}
    if not v.ok:
        raise DomainOutcome(out, f"rejected at step {v.step}: {v.reason}")
    return out


def cmd_laq_eval(args) -> dict:
    try:
        phi = parse_formula(_read_text(args.formula))
        val = Valuation.from_json(_read_json(args.valuation))
    except (LaqSyntaxError, EvalError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    try:
        value = eval_formula(phi, val)
    except EvalError as exc:
        raise UsageError(str(exc)) from None
    return {"command": "laq eval", "formula": show(phi), "value": value}


def cmd_laq_gen(args) -> dict:
    sizes = (args.n, args.m) if args.lemma == "cert_implies_inj" else (args.n,)
    try:
        proof = generate_script(args.lemma, sizes)
    except ScriptError as exc:
        raise UsageError(str(exc)) from None
    text = laq_kernel.proof_to_text(proof)
    return {"command": "laq gen-script", "proof": proof.name, "steps": len(proof.steps),
            "fingerprint": proof.fingerprint(), "script": text}


def cmd_translate(args) -> dict:
    try:
        phi = parse_formula(_read_text(args.formula))
        sigma = ObjectAssignment.from_json(_read_json(args.sigma) if args.sigma else {}, args.precision)
    except TranslationError:
        raise
    except (LaqSyntaxError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    circuit = translate(phi, sigma, args.printed_comparator)
    out = {"command": "translate", "formula": show(phi), "sigma": sigma.to_json(),
           "printed_comparator": args.printed_comparator, "inputs": len(circuit.inputs),
           "gates": circuit.size()}
    if args.export == "cnf":
        out["cnf"] = prop_cnf.export_cnf(circuit).dimacs()
    elif args.export == "json":
        out["circuit"] = circuit.to_json()
    if args.check_equiv:
        seed = _seed(args)
        rep = check_equivalence(phi, sigma, args.check_equiv, seed, args.printed_comparator)
        out["seed"] = seed
        out["equivalence"] = rep.to_json()
        if rep.mismatches:
            raise DomainOutcome(out, f"{rep.mismatches} mismatches in {rep.trials} trials")
    return out


# -- parser -------------------------------------------------------------------------------

def _globals(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(None), help="64-bit seed (default: OS entropy, recorded)")
    p.add_argument("--out", default=d(None), help="write the JSON artifact to this path")
    p.add_argument("--max-nodes", type=int, default=d(lattice.DEFAULT_MAX_NODES),
                   help="enumeration / brute-force work ceiling")
    p.add_argument("--json", action="store_true", default=d(False), help="print the JSON artifact")


def _owf_args(p, alpha=True):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    if alpha:
        p.add_argument("--alpha", type=_rational, default=_rational("0"))


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="lwecert", description=__doc__.split("\n")[0])
    _globals(top, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, suppress=True)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[common], help="sample an LWE instance")
    _owf_args(p)
    p.add_argument("--max-resamples", type=int, default=owf.DEFAULT_MAX_RESAMPLES)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("cert", parents=[common], help="generate or verify certificates")
    cs = p.add_subparsers(dest="cert_op", required=True)
    g = cs.add_parser("gen", parents=[common])
    g.add_argument("--instance", required=True)
    g.set_defaults(fn=cmd_cert_gen)
    v = cs.add_parser("verify", parents=[common])
    v.add_argument("--instance", required=True)
    v.add_argument("--cert", required=True)
    v.set_defaults(fn=cmd_cert_verify)

    p = sub.add_parser("invert", parents=[common], help="invert f_A on z")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", required=True,
                   choices=("bruteforce", "trapdoor", "oracle:bruteforce", "oracle:trapdoor"))
    p.add_argument("--cert")
    p.add_argument("--z", help="comma-separated image (default: the instance's z)")
    p.set_defaults(fn=cmd_invert)

    p = sub.add_parser("lattice", parents=[common], help="lattice bases and minima")
    ls = p.add_subparsers(dest="lattice_op", required=True)
    for name in ("dual-basis", "qary-basis"):
        q = ls.add_parser(name, parents=[common])
        q.add_argument("--matrix", required=True)
        q.set_defaults(fn=cmd_lattice)
    for name in ("lambda1", "minima"):
        q = ls.add_parser(name, parents=[common])
        q.add_argument("--matrix", required=True)
        q.add_argument("--kind", choices=("integer", "modular", "qary"), default="integer")
        q.add_argument("--bound", type=_rational, required=True, help="squared length bound")
        if name == "minima":
            q.add_argument("--k", type=int, required=True)
        q.set_defaults(fn=cmd_lattice)

    p = sub.add_parser("experiment", parents=[common], help="Monte Carlo and counting checks")
    es = p.add_subparsers(dest="experiment", required=True)
    for name in ("rank", "short", "tail", "transference", "count-lattices"):
        q = es.add_parser(name, parents=[common])
        _owf_args(q, alpha=name != "count-lattices")
        if name != "count-lattices":
            q.add_argument("--trials", type=int, required=True)
        if name == "short":
            q.add_argument("--r", type=_rational, required=True)
        q.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("laq", parents=[common], help="LA_Q proof scripts")
    qs = p.add_subparsers(dest="laq_op", required=True)
    c = qs.add_parser("check", parents=[common])
    c.add_argument("file")
    c.set_defaults(fn=cmd_laq_check)
    e = qs.add_parser("eval", parents=[common])
    e.add_argument("formula", help="formula text or a file holding it")
    e.add_argument("valuation", help="valuation JSON file")
    e.set_defaults(fn=cmd_laq_eval)
    gs = qs.add_parser("gen-script", parents=[common])
    gs.add_argument("lemma", choices=LEMMA_IDS)
    gs.add_argument("--n", type=int, required=True)
    gs.add_argument("--m", type=int)
    gs.set_defaults(fn=cmd_laq_gen)

    p = sub.add_parser("translate", parents=[common], help="propositional translation")
    p.add_argument("--formula", required=True, help="formula text or a file holding it")
    p.add_argument("--sigma", help="object assignment JSON {index, dims}")
    p.add_argument("--precision", type=int, required=True)
    p.add_argument("--export", choices=("cnf", "json"))
    p.add_argument("--check-equiv", type=int, metavar="TRIALS")
    p.add_argument("--printed-comparator", action="store_true",
                   help="compare numerator*numerator with denominator*denominator")
    p.set_defaults(fn=cmd_translate)
    return top


def _summary(artifact: dict) -> str:
    keys = [k for k in artifact if k not in ("command", "script", "cnf", "circuit", "instance",
                                             "certificate")]
    parts = []
    for k in keys:
        v = artifact[k]
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
            if len(v) > 120:
                v = v[:117] + "..."
        parts.append(f"{k}={v}")
    if "certificate" in artifact:
        parts.append("certificate=" + ("none" if artifact["certificate"] is None else "found"))
    return f"{artifact.get('command', '')}: " + " ".join(parts)


def _emit(args, artifact: dict):
    text = json.dumps(artifact, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    if args.json:
        sys.stdout.write(text)
    elif not args.out and "script" in artifact:
        sys.stdout.write(artifact["script"])
    else:
        print(_summary(artifact))


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.max_nodes < 1:
        return _fail("usage", "--max-nodes must be positive", EXIT_USAGE)
    try:
        artifact = args.fn(args)
    except DomainOutcome as exc:
        _emit(args, exc.artifact)
        return _fail("domain", str(exc), EXIT_DOMAIN)
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except (ResourceLimitError, RecursionError) as exc:
        return _fail("resource", str(exc) or type(exc).__name__, EXIT_RESOURCE)
    except inverter.InconsistentOracleError as exc:
        return _fail("domain", str(exc), EXIT_DOMAIN)
    except (owf.DomainError, TranslationError) as exc:
        return _fail("domain", str(exc), EXIT_DOMAIN)
    _emit(args, artifact)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
