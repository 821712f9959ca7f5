"""Reproducible experiment runner.

One subcommand per artifact; every run is fully determined by its flags and
seed.  Exit status: 0 for an affirmative verdict, 2 when the run succeeded
but the verdict is negative (violated / inapplicable / indeterminate / no
hits), 1 on input errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from . import criteria as cr
from . import dynamics as dyn
from . import grading as gr
from . import nilpotent as nil
from . import operators as op
from .errors import ShiftlabError
from .rational import Poly, RationalFunction
from .reports import (
    ExperimentReport,
    canonical_json,
    default_output_dir,
    trace_csv,
    write_text,
)

NEGATIVE_VERDICTS = {
    "violated-at-horizon",
    "inconclusive",
    "inapplicable",
    "indeterminate",
    "mismatch",
    "no-hits",
    "not-b-symmetric",
}


def _weights_from_args(args) -> op.WeightSequence:
    kind = args.weights
    if kind == "genshi-hc":
        return op.genshi_hypercyclic_weights(args.c, args.m0)
    if kind == "genshi-sc":
        return op.genshi_supercyclic_weights(args.c, args.m0)
    if kind == "const":
        return op.constant_weights(args.value)
    if kind == "symmetric-decay":
        return op.symmetric_decay_weights()
    if kind.startswith("file:"):
        import json

        with open(kind[5:], encoding="utf-8") as fh:
            return op.WeightSequence.from_dict(json.load(fh))
    raise ShiftlabError(f"unknown weight family {kind!r}")


def cmd_detan(args) -> ExperimentReport:
    cells = []
    exact = True
    for n in range(1, args.max_n + 1):
        for k in range(1, args.max_k + 1):
            rec, direct = nil.det_mnk(n, k)
            same = rec == direct
            exact &= same
            cells.append({"n": n, "k": k, "value": str(rec), "match": same})
    return ExperimentReport(
        "detan",
        {"max_n": args.max_n, "max_k": args.max_k},
        verdict="recurrence = direct" if exact else "mismatch",
        data={"cells": cells},
    )


def cmd_jordan(args) -> ExperimentReport:
    rng = np.random.default_rng(args.seed)
    rows = []
    worst_exact = 0.0
    bound_ok = True
    for n in range(1, args.n_max + 1):
        for _ in range(args.pairs):
            u = [Fraction(x).limit_denominator(2**20) for x in rng.uniform(0, 1, n)]
            v = [Fraction(x).limit_denominator(2**20) for x in rng.uniform(0, 1, n)]
            c_fit = None
            for e in range(1, args.z_max_exp + 1):
                z = Fraction(2) ** e
                x = nil.jordan_solve_exact(n, z, u, v)
                r1, r2 = nil.jordan_residuals_exact(n, z, u, v, x)
                worst_exact = max(worst_exact, float(r1), float(r2))
                tail = [abs(complex(x[n + j - 1])) for j in range(1, n + 1)]
                if e == 1:
                    # data at |z| = 2 underestimates the uniform constant;
                    # apply the standard 16x margin (observed worst ~9)
                    c_fit = max(t * float(z) ** j for j, t in enumerate(tail, 1))
                else:
                    for j, t in enumerate(tail, 1):
                        if t > 16.0 * (c_fit + 1e-12) * float(z) ** (-j):
                            bound_ok = False
        rows.append({"n": n, "worst_residual": worst_exact, "decay_bound_ok": bound_ok})
    verdict = "satisfied" if worst_exact <= 1e-10 and bound_ok else "violated-at-horizon"
    return ExperimentReport(
        "jordan",
        {
            "n_max": args.n_max,
            "pairs": args.pairs,
            "z_max_exp": args.z_max_exp,
        },
        seed=args.seed,
        verdict=verdict,
        data={"rows": rows},
    )


def cmd_tensor(args) -> ExperimentReport:
    dims = tuple(int(d) for d in args.dims.split(","))
    tt = nil.TensorShiftTuple(dims)
    u = np.zeros(tt.dim)
    u[0] = 1.0
    v = u.copy()
    if args.mode == "diag":
        zs = lambda m: tuple(float(m) for _ in dims)  # noqa: E731
    else:
        zs = lambda m: tuple(  # noqa: E731
            float(m) if j == 0 else 1.0 for j in range(len(dims))
        )
    steps = [int(s) for s in args.steps.split(",")]
    rows = []
    for m in steps:
        r1, r2 = nil.tensor_approach_residuals(tt, zs, u, v, m)
        rows.append({"m": m, "residual_u": r1, "residual_v": r2})
    decreasing = all(
        rows[i]["residual_u"] >= rows[i + 1]["residual_u"] - 1e-12
        for i in range(len(rows) - 1)
    )
    return ExperimentReport(
        "tensor",
        {"dims": list(dims), "mode": args.mode, "steps": steps},
        verdict="satisfied" if decreasing else "inconclusive",
        data={"rows": rows},
    )


def cmd_kerim(args) -> ExperimentReport:
    z = complex(args.z)
    a = nil.backward_shift(2 * args.n)
    x = np.zeros(2 * args.n)
    x[args.n - 1] = 1.0  # top of the length-n chain
    rows = []
    for e in range(2, args.k_max_exp + 1):
        k = 2**e
        res = nil.unimodular_residuals(a, z, x, k)
        rows.append({"k": k, "residuals": list(res)})
    last = max(rows[-1]["residuals"])
    first = max(rows[0]["residuals"])
    verdict = "satisfied" if last < first else "inconclusive"
    return ExperimentReport(
        "kerim",
        {"n": args.n, "z": [z.real, z.imag], "k_max_exp": args.k_max_exp},
        verdict=verdict,
        data={"rows": rows},
    )


def cmd_salas(args) -> ExperimentReport:
    w = _weights_from_args(args)
    fn = cr.salas_hypercyclic if args.variant == "hypercyclic" else cr.salas_supercyclic
    cert = fn(w, args.m_max, args.n_max, args.tol)
    return ExperimentReport(
        "salas",
        {
            "weights": args.weights,
            "variant": args.variant,
            "m_max": args.m_max,
            "n_max": args.n_max,
            "tol": args.tol,
            "c": args.c,
            "m0": args.m0,
        },
        verdict=cert.verdict,
        data=cert.to_dict(full_traces=args.full_traces),
    )


def _subspace_operator(args):
    n = args.n
    if args.op == "shift":
        return nil.backward_shift(2 * n)
    if args.op == "unipotent":
        return np.eye(2 * n) + nil.backward_shift(2 * n)
    if args.op == "diag":
        rng = np.random.default_rng(args.seed)
        return np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, n)))
    raise ShiftlabError(f"unknown operator preset {args.op!r}")


def cmd_subspaces(args) -> ExperimentReport:
    if args.which == "ebsk":
        dims = tuple(int(d) for d in args.dims.split(","))
        tt = nil.TensorShiftTuple(dims)
        space = cr.ebs_tuple_kernel(tt.operators(), tol=args.tol)
        data = {"dim": space.dim, "ambient": space.ambient}
        verdict = "nontrivial" if space.dim else "trivial"
    else:
        t = _subspace_operator(args)
        space = (
            cr.ker_dagger(t, args.tol)
            if args.which == "kerdagger"
            else cr.lambda_t(t, args.tol)
        )
        data = {"dim": space.dim, "ambient": space.ambient}
        verdict = "nontrivial" if space.dim else "trivial"
    return ExperimentReport(
        "subspaces",
        {"which": args.which, "op": args.op, "n": args.n, "tol": args.tol},
        seed=args.seed,
        verdict=verdict,
        data=data,
    )


def _shaped_nilpotent_tensor(rng, dim: int):
    """Random exact tensor element with T^2 = 0 and room for the ladder."""
    f0 = Fraction(0)

    def unit(i, c):
        v = np.array([f0] * dim, dtype=object)
        v[i] = c
        return v

    pairing = np.array(
        [[Fraction(1) if i == j else f0 for j in range(dim)] for i in range(dim)],
        dtype=object,
    )
    c1 = Fraction(int(rng.integers(1, 8)), int(rng.integers(1, 8)))
    c2 = -Fraction(int(rng.integers(1, 8)), int(rng.integers(1, 8)))
    pairs = ((unit(dim - 5, c1), unit(0, Fraction(1))), (unit(dim - 4, c2), unit(1, Fraction(1))))
    xi = op.TensorElement(pairs, pairing)
    x1 = unit(dim - 3, Fraction(1))
    x2 = unit(dim - 2, Fraction(1))
    return xi, x1, x2


def cmd_perturb(args) -> ExperimentReport:
    rng = np.random.default_rng(args.seed)
    s = Fraction(args.s)
    all_exact = True
    rows = []
    for trial in range(args.trials):
        xi, x1, x2 = _shaped_nilpotent_tensor(rng, args.dim)
        pert = cr.ebs_perturb(xi, x1, x2, s, n=2)
        t_s, _ = op.tensor_op(pert.xi_s)
        ok1 = (t_s.pow(2) @ list(pert.u_n)) == [s**2 * a for a in x1]
        ok2 = (t_s.pow(2) @ list(pert.u_2n)) == [s**2 * a for a in x2]
        ok3 = t_s.pow(4).is_zero()
        all_exact &= ok1 and ok2 and ok3
        rows.append({"trial": trial, "chain": ok1 and ok2, "nilpotent": ok3})
    return ExperimentReport(
        "perturb",
        {"dim": args.dim, "s": str(s), "trials": args.trials},
        seed=args.seed,
        verdict="exact" if all_exact else "mismatch",
        data={"rows": rows},
    )


def cmd_regions(args) -> ExperimentReport:
    region = cr.builtin_region(args.builtin)
    verdict = cr.gs_region_verdict(region, args.transform, args.samples, args.seed)
    return ExperimentReport(
        "regions",
        {
            "builtin": args.builtin,
            "transform": args.transform,
            "samples": args.samples,
        },
        seed=args.seed,
        verdict=verdict.verdict,
        data=verdict.to_dict(),
    )


def cmd_symmetry(args) -> ExperimentReport:
    if args.mode == "weights":
        w = _weights_from_args(args)
        coeffs = {"t": [0.0, 1.0], "1+t": [1.0, 1.0]}[args.p]
        rep = cr.symmetry_obstruction(
            w, coeffs, trials=args.trials, horizon=args.N, seed=args.seed
        )
        return ExperimentReport(
            "symmetry",
            {
                "mode": "weights",
                "weights": args.weights,
                "p": args.p,
                "trials": args.trials,
                "N": args.N,
            },
            seed=args.seed,
            verdict=rep.verdict,
            data=rep.to_dict(),
        )
    n = args.n
    t = op.bilateral_shift(op.constant_weights(1.0, n), n)
    b = cr.flip_pairing(n)
    x = np.eye(2 * n + 1)[n]
    y = np.eye(2 * n + 1)[n + 1]
    rep = cr.b_symmetry_check(t, b, x, y, horizon=args.N, seed=args.seed)
    return ExperimentReport(
        "symmetry",
        {"mode": "pairing", "n": n, "N": args.N},
        seed=args.seed,
        verdict="b-symmetric" if rep.symmetric else "not-b-symmetric",
        data=rep.to_dict(),
    )


def cmd_grading(args) -> ExperimentReport:
    one = RationalFunction.one()
    if args.preset == "powers":
        gens = [
            gr.GradedVector([RationalFunction(Poly.monomial(d))])
            for d in range(args.degree + 1)
        ]
    elif args.preset == "split":
        zero = RationalFunction.zero()
        gens = [
            gr.GradedVector([one, zero]),
            gr.GradedVector([zero, RationalFunction(Poly.monomial(args.degree))]),
        ]
    else:
        rng = np.random.default_rng(args.seed)
        gens = [gr.random_graded_vector(rng, 2, args.degree) for _ in range(3)]
    rep = gr.n0_bound(gens)
    return ExperimentReport(
        "grading",
        {"preset": args.preset, "degree": args.degree},
        seed=args.seed,
        verdict="verified",
        data={
            "delta_plus": rep.delta_plus,
            "delta_minus": rep.delta_minus,
            "n0": rep.n0,
            "verified_degrees": list(rep.verified_degrees),
            "counterexample_degree": rep.counterexample_degree,
        },
    )


def cmd_mixing(args) -> ExperimentReport:
    n = args.n
    t = np.eye(2 * n) + nil.backward_shift(2 * n)
    u_c = np.zeros(2 * n)
    u_c[0] = 1.0
    v_c = np.zeros(2 * n)
    v_c[min(1, 2 * n - 1)] = 1.0
    rep = dyn.mixing_window(
        t,
        dyn.Ball(u_c, args.radius),
        dyn.Ball(v_c, args.radius),
        args.horizon,
        seed=args.seed,
    )
    verdict = "mixing-window-found" if rep.first_window_start is not None else "no-hits"
    return ExperimentReport(
        "mixing",
        {"n": n, "radius": args.radius, "horizon": args.horizon},
        seed=args.seed,
        verdict=verdict,
        data=rep.to_dict(),
    )


def cmd_density(args) -> ExperimentReport:
    if args.family == "genshi-sc":
        w = op.genshi_supercyclic_weights()
        half = 10
        t = op.bilateral_shift(w, half)
        net = dyn.NetSpec(cells=args.cells, box=args.box, x_coord=half, y_coord=half)
        rep = dyn.u3_density(
            t,
            net,
            args.horizon,
            seed=args.seed,
            scale_grid=dyn.default_scale_grid(),
            base_count=40,
        )
    else:
        dim = 9
        net = dyn.NetSpec(cells=args.cells, box=args.box, x_coord=0, y_coord=0)
        rep = dyn.u3_density(np.eye(dim), net, args.horizon, seed=args.seed)
    verdict = "dense-at-net" if rep.fraction >= args.threshold else "inconclusive"
    return ExperimentReport(
        "density",
        {
            "family": args.family,
            "horizon": args.horizon,
            "cells": args.cells,
            "box": args.box,
            "threshold": args.threshold,
        },
        seed=args.seed,
        verdict=verdict,
        data=rep.to_dict(),
    )


def load_grid_function(path: str, ngrid: int):
    """Grid function from the documented JSON form: {"values": [...]}"""
    import json

    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    values = np.asarray(data["values"], dtype=float)
    if values.shape[0] != ngrid + 1:
        raise ShiftlabError(
            f"grid function has {values.shape[0]} samples; expected ngrid+1 = {ngrid + 1}"
        )
    return values


def cmd_volterra(args) -> ExperimentReport:
    f = load_grid_function(args.f_file, args.ngrid) if args.f_file else None
    trace = dyn.volterra_dist(args.ngrid, args.q, f=f, n_max=args.n_max)
    dmin = min(d / trace.f_norm for d in trace.distances)
    # 1e-8 is the contract at ngrid = 2048; the leading trapezoid cells of
    # the adjoint quadrature scale cubically, so rescale for other grids
    adjoint_tol = 1e-8 * (2048.0 / args.ngrid) ** 3
    verdict = (
        "satisfied"
        if trace.adjoint_residual <= adjoint_tol and dmin <= 0.05
        else "violated-at-horizon"
    )
    return ExperimentReport(
        "volterra",
        {"ngrid": args.ngrid, "q": args.q, "n_max": args.n_max},
        verdict=verdict,
        data=trace.to_dict(),
    )


def cmd_saan_group(args) -> ExperimentReport:
    import math

    count = math.comb(args.degree + args.k, args.k)  # all |m| <= degree
    indices = op.graded_lex_indices(args.k, count)
    mats = op.saan_generators(args.k, len(indices))
    rng = np.random.default_rng(args.seed)
    z = rng.uniform(-1, 1, args.k)
    w = rng.uniform(-1, 1, args.k)
    residual = dyn.group_law_residual(mats, z, w)
    exact_mats = op.saan_generators(args.k, min(len(indices), 45), exact=True)
    comm_zero = all(
        (exact_mats[i] @ exact_mats[j] - exact_mats[j] @ exact_mats[i]).is_zero()
        for i in range(args.k)
        for j in range(i + 1, args.k)
    )
    verdict = "satisfied" if residual <= 1e-10 and comm_zero else "violated-at-horizon"
    return ExperimentReport(
        "saan-group",
        {"k": args.k, "degree": args.degree, "basis": len(indices)},
        seed=args.seed,
        verdict=verdict,
        data={"group_law_residual": residual, "commutators_exact_zero": comm_zero},
    )


GOLDEN_SUITES = ("nilpotent", "volterra", "salas", "regions")


def emit_goldens(suite: str, out_dir: str) -> list[str]:
    """Regenerate golden files for a regression suite; byte-stable per seed."""
    if suite not in GOLDEN_SUITES:
        raise ShiftlabError(f"unknown golden suite {suite!r}; have {GOLDEN_SUITES}")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if suite == "nilpotent":
        rows = []
        for n in (1, 2, 3):
            for j in (4, 64, 1024):
                r1, r2 = nil.discrete_pair_errors_exact(
                    n, j, [Fraction(1)] + [Fraction(0)] * (n - 1), [Fraction(0)] * n
                )
                rows.append({"n": n, "j": j, "err_u": r1, "err_v": r2})
        path = os.path.join(out_dir, "nilpotent_residuals.json")
        write_text(path, canonical_json({"suite": "nilpotent", "rows": rows}))
        written.append(path)
    elif suite == "volterra":
        trace = dyn.volterra_dist(512, 0.5, n_max=24)
        path = os.path.join(out_dir, "volterra_dist.csv")
        write_text(
            path,
            trace_csv(
                {
                    "n": list(range(len(trace.distances))),
                    "d_n": list(trace.distances),
                }
            ),
        )
        written.append(path)
        path2 = os.path.join(out_dir, "volterra_meta.json")
        write_text(path2, canonical_json(trace.to_dict()))
        written.append(path2)
    elif suite == "salas":
        out = {}
        for name, w, fn in (
            ("genshi-hc", op.genshi_hypercyclic_weights(), cr.salas_hypercyclic),
            ("genshi-sc", op.genshi_supercyclic_weights(), cr.salas_supercyclic),
            ("const-1", op.constant_weights(1.0), cr.salas_hypercyclic),
        ):
            cert = fn(w, 4, 2**10)
            out[name] = cert.to_dict()
        path = os.path.join(out_dir, "salas_certificates.json")
        write_text(path, canonical_json(out))
        written.append(path)
    else:
        out = {}
        for reg, tr in (("U", "shift1"), ("U", "exp"), ("V", "shift1"), ("V", "exp")):
            verdict = cr.gs_region_verdict(cr.builtin_region(reg), tr, 10**4, seed=0)
            out[f"{reg}/{tr}"] = verdict.to_dict()
        path = os.path.join(out_dir, "region_verdicts.json")
        write_text(path, canonical_json(out))
        written.append(path)
    return written


def cmd_emit_goldens(args) -> ExperimentReport:
    files = emit_goldens(args.suite, args.out_dir)
    return ExperimentReport(
        "emit-goldens",
        {"suite": args.suite, "out_dir": args.out_dir},
        verdict="written",
        data={"files": files},
    )


def argv_from_config(path: str) -> list[str]:
    """Translate the documented JSON config form into an argv list.

    The config mirrors the flags: {"command": "salas", "out": ..., "format":
    ..., "threads": ..., "args": {"weights": "genshi-hc", "n-max": 4096,
    "full-traces": true}}.  Boolean values toggle flag presence.
    """
    import json

    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if "command" not in cfg:
        raise ShiftlabError("config file must name a command")
    argv = []
    for key in ("out", "format", "threads"):
        if key in cfg and cfg[key] is not None:
            argv.extend([f"--{key}", str(cfg[key])])
    argv.append(str(cfg["command"]))
    for key, value in cfg.get("args", {}).items():
        flag = f"--{key}"
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    return argv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftlab",
        description="Desk-scale experiments on hypercyclic/mixing operator dynamics",
        epilog=(
            "A JSON config mirroring the flags can replace the command line: "
            'shiftlab --config cfg.json, with cfg.json like {"command": '
            '"salas", "args": {"weights": "genshi-hc", "n-max": 4096}}. '
            "Reports land in $SHIFTLAB_OUTDIR when set and no --out is given."
        ),
    )
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    parser.add_argument(
        "--format",
        choices=("json", "csv", "jsonl"),
        default="json",
        help="report format (csv/jsonl need a trace-bearing subcommand)",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker count; 1 guarantees byte-stable output (and is the only "
        "implemented mode)",
    )
    # the same options are accepted after the subcommand; SUPPRESS keeps the
    # child from clobbering a value parsed before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS)
    common.add_argument(
        "--format", choices=("json", "csv", "jsonl"), default=argparse.SUPPRESS
    )
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)

    sub = parser.add_subparsers(dest="command", required=True)

    def sub_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = sub_parser("detan", help="determinant recurrence vs direct exact sweep")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--max-k", type=int, default=8)
    p.set_defaults(fn=cmd_detan)

    p = sub_parser("jordan", help="approach-pair solver residuals and tail decay")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--z-max-exp", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_jordan)

    p = sub_parser("tensor", help="tensor-tuple approach residual trace")
    p.add_argument("--dims", default="1,1")
    p.add_argument("--mode", choices=("diag", "bounded"), default="diag")
    p.add_argument("--steps", default="4,16,64,256")
    p.set_defaults(fn=cmd_tensor)

    p = sub_parser("kerim", help="unimodular twisted approach residuals")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--z", default="1", help="unimodular complex (python literal)")
    p.add_argument("--k-max-exp", type=int, default=10)
    p.set_defaults(fn=cmd_kerim)

    p = sub_parser("salas", help="weight-product criteria with certificates")
    p.add_argument(
        "--weights",
        default="genshi-hc",
        help="genshi-hc | genshi-sc | const | symmetric-decay | file:PATH",
    )
    p.add_argument("--variant", choices=("hypercyclic", "supercyclic"), default="hypercyclic")
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--m0", type=int, default=3)
    p.add_argument("--value", type=float, default=1.0)
    p.add_argument("--m-max", type=int, default=8)
    p.add_argument("--n-max", type=int, default=2**14)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument(
        "--full-traces", action="store_true", help="embed the full log traces"
    )
    p.set_defaults(fn=cmd_salas)

    p = sub_parser("subspaces", help="ker-dagger / unimodular-chain / EBS spans")
    p.add_argument("--which", choices=("kerdagger", "lambda", "ebsk"), default="kerdagger")
    p.add_argument("--op", choices=("shift", "unipotent", "diag"), default="shift")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--dims", default="1,1", help="tensor block dims for ebsk")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_subspaces)

    p = sub_parser("perturb", help="exact nilpotent tensor perturbation identities")
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--s", default="1/2", help="exact rational scale")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_perturb)

    p = sub_parser("regions", help="plane-region vs unit-circle verdicts")
    p.add_argument("--builtin", choices=("U", "V"), default="U")
    p.add_argument("--transform", choices=("shift1", "exp", "identity"), default="shift1")
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_regions)

    p = sub_parser("symmetry", help="symmetry obstructions to cyclicity")
    p.add_argument("--mode", choices=("weights", "pairing"), default="weights")
    p.add_argument("--weights", default="symmetric-decay")
    p.add_argument("--p", choices=("t", "1+t"), default="1+t")
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--m0", type=int, default=3)
    p.add_argument("--value", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--N", type=int, default=50)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_symmetry)

    p = sub_parser("grading", help="degree bounds n0 in the rational-function model")
    p.add_argument("--preset", choices=("powers", "split", "random"), default="powers")
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_grading)

    p = sub_parser("mixing", help="mixing-window hit report for I + shift")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--radius", type=float, default=0.25)
    p.add_argument("--horizon", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_mixing)

    p = sub_parser("density", help="pair-set net coverage (universality probe)")
    p.add_argument("--family", choices=("genshi-sc", "identity"), default="genshi-sc")
    p.add_argument("--horizon", type=int, default=1000)
    p.add_argument("--cells", type=int, default=6)
    p.add_argument("--box", type=float, default=4.0)
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_density)

    p = sub_parser("volterra", help="adjoint identity and distance trace")
    p.add_argument("--ngrid", type=int, default=2048)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument(
        "--f-file", default=None, help='JSON grid function {"values": [...]}'
    )
    p.set_defaults(fn=cmd_volterra)

    p = sub_parser("saan-group", help="commuting generators and the group law")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--degree", type=int, default=8, help="multi-index degree box")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_saan_group)

    p = sub_parser("emit-goldens", help="regenerate golden regression files")
    p.add_argument("--suite", choices=GOLDEN_SUITES, required=True)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(fn=cmd_emit_goldens)

    return parser


def _trace_rows(report: ExperimentReport):
    """Per-step row dicts for trace-bearing subcommands, or None."""
    data = report.data
    if report.command == "volterra":
        return [
            {"n": n, "d_n": d} for n, d in enumerate(data["distances"])
        ]
    if report.command == "kerim":
        return [
            {"k": r["k"], **{f"residual_{i}": r["residuals"][i] for i in range(4)}}
            for r in data["rows"]
        ]
    if report.command == "tensor":
        return [
            {"m": r["m"], "residual_u": r["residual_u"], "residual_v": r["residual_v"]}
            for r in data["rows"]
        ]
    if report.command == "mixing":
        return [
            {"n": n + 1, "hit": bool(h)} for n, h in enumerate(data["hits"])
        ]
    if report.command == "jordan":
        return list(data["rows"])
    return None


def _csv_of_report(report: ExperimentReport) -> str | None:
    rows = _trace_rows(report)
    if not rows:
        return None
    names = list(rows[0])
    return trace_csv({n: [r[n] for r in rows] for n in names})


def _jsonl_of_report(report: ExperimentReport) -> str | None:
    import json

    rows = _trace_rows(report)
    if not rows:
        return None
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    if argv[:1] == ["--config"] or (argv and argv[0].startswith("--config=")):
        try:
            if argv[0].startswith("--config="):
                path, rest = argv[0].split("=", 1)[1], argv[1:]
            else:
                path, rest = argv[1], argv[2:]
            argv = argv_from_config(path) + rest
        except (ShiftlabError, OSError, ValueError, KeyError, IndexError) as exc:
            print(f"error: bad config: {exc}", file=sys.stderr)
            return 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the runner contract reserves 2
        # for negative verdicts and reports input errors as 1
        return 0 if exc.code in (0, None) else 1
    if args.threads != 1:
        print("note: only --threads 1 is implemented; continuing single-threaded", file=sys.stderr)
    if getattr(args, "out_dir", "sentinel") is None:
        args.out_dir = default_output_dir() or "goldens"
    try:
        report = args.fn(args)
    except ShiftlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.format in ("csv", "jsonl"):
        text = _csv_of_report(report) if args.format == "csv" else _jsonl_of_report(report)
        if text is None:
            print(
                "error: this subcommand has no trace rows; use --format json",
                file=sys.stderr,
            )
            return 1
    else:
        text = report.to_json()

    out = args.out
    if out is None and default_output_dir():
        out = os.path.join(
            default_output_dir(), f"{report.command}.{args.format}"
        )
    if out:
        try:
            write_text(out, text)
        except OSError as exc:
            print(f"error: cannot write {out}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 2 if report.verdict in NEGATIVE_VERDICTS else 0


if __name__ == "__main__":
    sys.exit(main())
