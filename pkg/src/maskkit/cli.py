"""Command line interface.

Subcommands operate on JSON documents (files or "-" for stdin) and print
JSON results. Exit codes: 0 when the requested check passes or a
certificate is produced, 1 when a check fails or certification is refused,
2 for malformed input or usage errors. The MASKKIT_LOG environment
variable (error, warn, info, debug) controls stderr diagnostics.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import io as mio
from .gram import StateSet, certify_hadamard_set, gram_matrix
from .linalg import partial_trace, random_state
from .masking import (
    Infeasible,
    build_masker,
    combination_condition,
    fixed_reducing_states,
    maskable_with,
    sample_maskable,
    solve_qubit_phases,
    torus_residuals,
    verify_masking,
)

log = logging.getLogger("maskkit")

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def _configure_logging() -> None:
    logger = logging.getLogger("maskkit")
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)
    name = os.environ.get("MASKKIT_LOG", "warn").strip().lower()
    level = _LOG_LEVELS.get(name)
    logger.setLevel(level if level is not None else logging.WARNING)
    if level is None and name not in ("", "warn"):
        logger.warning("unknown MASKKIT_LOG level %r, using warn", name)


def _read_json(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise mio.InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise mio.InputError(f"{path}: invalid JSON ({exc})") from exc


def _write_doc(doc: dict, path: str | None) -> None:
    text = mio.dumps(doc)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_mu(text: str, n: int) -> np.ndarray:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise mio.InputError(f"--mu needs {n} comma-separated entries, got {len(parts)}")
    values = []
    for part in parts:
        re_part, _, im_part = part.partition(":")
        try:
            values.append(complex(float(re_part), float(im_part) if im_part else 0.0))
        except ValueError as exc:
            raise mio.InputError(f"bad --mu entry {part!r} (want re or re:im)") from exc
    return np.array(values, dtype=complex)


def _basis_anchor(dim_b: int, index: int) -> np.ndarray:
    if not 0 <= index < dim_b:
        raise mio.InputError(f"--anchor-index {index} out of range for dB={dim_b}")
    anchor = np.zeros(dim_b, dtype=complex)
    anchor[index] = 1.0
    return anchor


def _certify(states: StateSet, args):
    return certify_hadamard_set(
        states,
        tol=args.tol,
        grouping_tol=args.grouping_tol,
        flat_tol=args.flat_tol,
        max_iters=args.max_iters,
        restarts=args.restarts,
        seed=args.seed,
    )


def cmd_gram(args) -> int:
    states = mio.parse_states(_read_json(args.input), tol=args.tol)
    doc = {
        "schema": mio.SCHEMA,
        "n": states.n,
        "dim": states.dim,
        "gram": mio.matrix_json(gram_matrix(states)),
    }
    _write_doc(doc, args.output)
    return 0


def cmd_certify(args) -> int:
    states = mio.parse_states(_read_json(args.input), tol=args.tol)
    result = _certify(states, args)
    if result:
        _write_doc(mio.certificate_json(result), args.output)
        return 0
    _write_doc(mio.refusal_json(result), args.output)
    return 1


def cmd_mask(args) -> int:
    states = mio.parse_states(_read_json(args.input), tol=args.tol)
    result = _certify(states, args)
    if not result:
        _write_doc(mio.refusal_json(result), args.output)
        return 1
    frs = fixed_reducing_states(states=states, cert=result, dim_b=args.dim_b, tol=args.tol)
    anchor = _basis_anchor(frs.dim_b, args.anchor_index)
    masker = build_masker(states, result, frs, anchor=anchor, tol=args.tol)
    report = verify_masking(masker, states, tol=max(args.tol, 10.0 * result.residual))
    doc = {
        "schema": mio.SCHEMA,
        "certificate": mio.certificate_json(result),
        "masker": mio.masker_json(masker),
        "fixed_reducing": mio.frs_json(frs),
        "verification": {
            "passed": report.passed,
            "max_deviation": report.max_deviation,
            "tol": report.tol,
        },
    }
    _write_doc(doc, args.output)
    return 0 if report.passed else 1


def cmd_verify(args) -> int:
    masker = mio.parse_masker(_read_json(args.masker))
    states = mio.parse_states(_read_json(args.states), tol=args.tol)
    if states.dim != masker.dim_a:
        raise mio.InputError(
            f"state dimension {states.dim} does not match masker dA={masker.dim_a}"
        )
    report = verify_masking(masker, states, tol=args.tol)
    doc = {
        "schema": mio.SCHEMA,
        "passed": report.passed,
        "max_deviation": report.max_deviation,
        "tol": report.tol,
        "per_state_deviations": [float(x) for x in report.per_state_deviations],
        "rho_a": mio.matrix_json(report.rho_a),
        "rho_b": mio.matrix_json(report.rho_b),
    }
    _write_doc(doc, args.output)
    return 0 if report.passed else 1


def _combine_states(doc, args) -> tuple[dict, int]:
    states = mio.parse_states(doc, tol=args.tol)
    mu = _parse_mu(args.mu, states.n)
    result = _certify(states, args)
    if not result:
        return mio.refusal_json(result), 1
    combined = states.combine(mu)
    residuals = torus_residuals(result, mu, tol=args.tol)
    ok = maskable_with(result, mu, tol=args.tol)
    out = {
        "schema": mio.SCHEMA,
        "kind": "states",
        "maskable": bool(ok),
        "norm": float(np.linalg.norm(combined)),
        "residual": float(residuals["residual"]),
        "row_sums": [float(x) for x in residuals["row_sums"]],
        "combined": mio.vector_json(combined),
        "certificate": mio.certificate_json(result),
    }
    return out, 0 if ok else 1


def _combine_certificate(doc, args) -> tuple[dict, int]:
    cert = mio.parse_certificate(doc)
    mu = _parse_mu(args.mu, cert.n)
    residuals = torus_residuals(cert, mu, tol=args.tol)
    ok = maskable_with(cert, mu, tol=args.tol)
    gram = cert.gram()
    norm_sq = float(np.real(np.conj(mu) @ gram @ mu))
    out = {
        "schema": mio.SCHEMA,
        "kind": "certificate",
        "maskable": bool(ok),
        "norm": float(np.sqrt(max(norm_sq, 0.0))),
        "residual": float(residuals["residual"]),
        "row_sums": [float(x) for x in residuals["row_sums"]],
    }
    return out, 0 if ok else 1


def _combine_frs(doc, args) -> tuple[dict, int]:
    frs = mio.parse_frs(doc)
    mu = _parse_mu(args.mu, frs.n)
    psis = np.stack([frs.psi_vectors(k) for k in range(frs.n)])
    check = combination_condition(psis, mu, tol=args.tol * np.sqrt(frs.n))
    combined = frs.combine(mu)
    dev_a = float(
        np.linalg.norm(partial_trace(combined, frs.dim_a, frs.dim_b, "A") - frs.rho_a())
    )
    dev_b = float(
        np.linalg.norm(partial_trace(combined, frs.dim_a, frs.dim_b, "B") - frs.rho_b())
    )
    out = {
        "schema": mio.SCHEMA,
        "kind": "fixed_reducing",
        "maskable": bool(check.ok),
        "frame_deviation": float(check.max_deviation),
        "norm": float(np.linalg.norm(combined)),
        "marginal_deviation_a": dev_a,
        "marginal_deviation_b": dev_b,
    }
    return out, 0 if check.ok else 1


def cmd_combine(args) -> int:
    doc = _read_json(args.input)
    if not isinstance(doc, dict):
        raise mio.InputError("input document must be a JSON object")
    if "states" in doc:
        out, code = _combine_states(doc, args)
    elif "certified" in doc and "fixed_reducing" not in doc:
        out, code = _combine_certificate(doc, args)
    elif "fixed_reducing" in doc or "weights" in doc:
        out, code = _combine_frs(doc, args)
    else:
        raise mio.InputError(
            "input must be a states, certificate, or fixed-reducing document"
        )
    _write_doc(out, args.output)
    return code


def cmd_sample(args) -> int:
    cert = mio.parse_certificate(_read_json(args.certificate))
    mus = sample_maskable(cert, args.count, seed=args.seed)
    gram = cert.gram()
    samples = []
    all_ok = True
    for mu in mus:
        residuals = torus_residuals(cert, mu, tol=args.tol)
        ok = maskable_with(cert, mu, tol=args.tol)
        all_ok = all_ok and ok
        norm_sq = float(np.real(np.conj(mu) @ gram @ mu))
        samples.append(
            {
                "mu": mio.vector_json(mu),
                "maskable": bool(ok),
                "norm": float(np.sqrt(max(norm_sq, 0.0))),
                "residual": float(residuals["residual"]),
            }
        )
    doc = {
        "schema": mio.SCHEMA,
        "count": args.count,
        "seed": args.seed,
        "samples": samples,
    }
    _write_doc(doc, args.output)
    return 0 if all_ok else 1


def cmd_qubit_demo(args) -> int:
    rng = np.random.default_rng(args.seed)
    first = random_state(2, rng)
    second = random_state(2, rng)
    # resample until the pair is usable as a basis for the third state
    while abs(np.linalg.det(np.column_stack([first, second]))) < 1e-3:
        second = random_state(2, rng)
    third = random_state(2, rng)
    pair = StateSet.from_vectors(np.vstack([first, second]))
    result = _certify(pair, args)
    if not result:
        _write_doc(mio.refusal_json(result), args.output)
        return 1
    frs = fixed_reducing_states(result, pair, tol=args.tol)
    pair_masker = build_masker(pair, result, frs, tol=args.tol)
    pair_report = verify_masking(pair_masker, pair, tol=args.tol)
    solution = solve_qubit_phases(pair, third, args.omega1, args.omega2, tol=args.tol)
    triple = np.vstack([pair.vectors, third])
    triple_report = verify_masking(solution.masker, triple, tol=args.tol)
    doc = {
        "schema": mio.SCHEMA,
        "seed": args.seed,
        "pair": mio.states_json(pair),
        "third": mio.vector_json(third),
        "overlap_modulus": float(abs(np.vdot(pair.vectors[0], pair.vectors[1]))),
        "pair_certificate": mio.certificate_json(result),
        "pair_masker": mio.masker_json(pair_masker),
        "pair_masking": {
            "passed": pair_report.passed,
            "max_deviation": pair_report.max_deviation,
        },
        "triple": {
            "mu": mio.vector_json(solution.mu),
            "omega1": solution.omega1,
            "omega2": solution.omega2,
            "circle_weight": solution.weight,
            "pole": mio.vector_json(solution.pole),
            "aux_pair": mio.states_json(solution.aux_pair),
            "masker": mio.masker_json(solution.masker),
            "masking": {
                "passed": triple_report.passed,
                "max_deviation": triple_report.max_deviation,
            },
        },
    }
    _write_doc(doc, args.output)
    return 0 if (pair_report.passed and triple_report.passed) else 1


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", metavar="PATH", default=None,
                   help="write the JSON result here instead of stdout")


def _add_tol(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-9, metavar="X",
                   help="numerical equality tolerance (default 1e-9)")


def _add_certify_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grouping-tol", type=float, default=1e-8, metavar="X",
                   help="eigenvalue grouping tolerance (default 1e-8)")
    p.add_argument("--flat-tol", type=float, default=1e-7, metavar="X",
                   help="entry-modulus flatness tolerance (default 1e-7)")
    p.add_argument("--max-iters", type=int, default=500, metavar="N",
                   help="iterations per flattening attempt (default 500)")
    p.add_argument("--restarts", type=int, default=20, metavar="N",
                   help="flattening restarts per eigenspace (default 20)")


def _add_flatten_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, metavar="N",
                   help="base seed for the flattening restarts (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maskkit",
        description="Certify Hadamard state sets and build masking unitaries.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("gram", help="print the Gram matrix of a state set")
    p.add_argument("input", help="states JSON file, or - for stdin")
    _add_tol(p)
    _add_output(p)
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("certify", help="certify that a Gram matrix is Hadamard-diagonalizable")
    p.add_argument("input", help="states JSON file, or - for stdin")
    _add_tol(p)
    _add_certify_flags(p)
    _add_flatten_seed(p)
    _add_output(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("mask", help="certify a set and build its masking unitary")
    p.add_argument("input", help="states JSON file, or - for stdin")
    p.add_argument("--dim-b", type=int, default=None, metavar="D",
                   help="second subsystem dimension (default: same as the states)")
    p.add_argument("--anchor-index", type=int, default=0, metavar="K",
                   help="basis index of the fixed input state on side B (default 0)")
    _add_tol(p)
    _add_certify_flags(p)
    _add_flatten_seed(p)
    _add_output(p)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("verify", help="check that a masker hides a state set")
    p.add_argument("masker", help="masker JSON file (or mask output), or - for stdin")
    p.add_argument("states", help="states JSON file")
    _add_tol(p)
    _add_output(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("combine", help="test whether a linear combination stays maskable")
    p.add_argument("input", help="states, certificate, or mask/fixed-reducing JSON file")
    p.add_argument("--mu", required=True, metavar="LIST",
                   help="coefficients as comma-separated re:im pairs, e.g. 0.6:0,0:0.8 "
                        "(write --mu=-0.6:0,... when the first entry is negative)")
    _add_tol(p)
    _add_certify_flags(p)
    _add_flatten_seed(p)
    _add_output(p)
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("sample", help="draw coefficient vectors that stay maskable")
    p.add_argument("certificate", help="certificate JSON file (or mask output)")
    p.add_argument("--count", type=int, default=10, metavar="N",
                   help="number of samples (default 10)")
    p.add_argument("--seed", type=int, required=True, metavar="N",
                   help="random seed (required)")
    _add_tol(p)
    _add_output(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("qubit-demo", help="mask a random qubit pair plus a third state")
    p.add_argument("--seed", type=int, required=True, metavar="N",
                   help="random seed (required)")
    p.add_argument("--omega1", type=float, default=0.0, metavar="X",
                   help="first free phase of the auxiliary family (default 0)")
    p.add_argument("--omega2", type=float, default=0.0, metavar="X",
                   help="second free phase of the auxiliary family (default 0)")
    _add_tol(p)
    _add_certify_flags(p)
    _add_output(p)
    p.set_defaults(func=cmd_qubit_demo)

    return parser


def run(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except mio.InputError as exc:
        print(f"maskkit: error: {exc}", file=sys.stderr)
        return 2
    except Infeasible as exc:
        print(f"maskkit: infeasible: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"maskkit: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
