"""Command-line front end.

Every subcommand prints a JSON report (or writes it to ``--out``). Exit
codes: 0 success, 2 invalid input, 3 solver hit its numerical limit.
Randomized subcommands refuse to run without ``--seed``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .errors import InvalidInput, SolverError
from .hermit import density_matrix, ginibre, herm
from .measure import (
    GeneralPovmFamily,
    add_white_noise,
    is_compatible,
    is_compatible_marginal_form,
    random_effect_tuple,
    robustness,
)
from .norms import (
    ObservableTuple,
    compat_dual_norm,
    compat_norm,
    inj_norm_l1,
    inj_norm_linf,
    proj_norm_l1,
    wit_norm,
    wit_norm_sample_lb,
)
from .regions import (
    gamma_probe,
    phase_diagram,
    phase_diagram_csv,
    qc_contains,
    simplex_contains,
    tau_star,
)
from .witness import classify, max_violation, witness_from_pair

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 2, 3
SIG_DIGITS = 12


class UsageError(InvalidInput):
    pass


def _round(x):
    """Round floats to 12 significant digits, recursively."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.{SIG_DIGITS}g}") if np.isfinite(x) else str(x)
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _vector(text: str | None, name: str, length: int | None = None) -> np.ndarray:
    if text is None:
        raise UsageError(f"--{name} is required")
    try:
        v = np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated numbers, got {text!r}") from None
    if length is not None and v.size != length:
        raise UsageError(f"--{name}: expected {length} entries, got {v.size}")
    return v


def _require(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n} is required for this subcommand")


class Context:
    """Collects inputs, results and emitted files for one invocation."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.inputs: dict[str, str] = {}
        self.files: dict[str, str] = {}
        self.solver: dict[str, float] = {}
        self.report_path = args.out

    def load(self, path, key="input"):
        if path is None:
            raise UsageError(f"--{key} is required for this subcommand")
        raw = Path(path).read_bytes() if Path(path).is_file() else None
        if raw is None:
            raise InvalidInput(f"cannot read {path}")
        self.inputs[key] = hashlib.sha256(raw).hexdigest()
        return io.load_json(path)

    def cert_path(self, suffix: str) -> Path:
        a = self.args
        if a.cert_dir is not None:
            base = Path(a.cert_dir)
        elif a.out is not None:
            base = Path(a.out).parent
        elif getattr(a, "input", None):
            base = Path(a.input).parent
        else:
            base = Path(".")
        stem = Path(a.out).stem if a.out else (Path(a.input).stem if getattr(a, "input", None) else a.command)
        return base / f"{stem}.{suffix}.json"

    def emit(self, suffix: str, doc: dict) -> str:
        path = io.save_json(doc, self.cert_path(suffix))
        self.files[suffix] = path
        return path

    def record_solver(self, info) -> None:
        self.solver = {"iterations": int(info.iterations), "gap": float(info.gap)}


# --- handlers --------------------------------------------------------------------


def _tuple(ctx) -> ObservableTuple:
    return io.tuple_from_json(ctx.load(ctx.args.input), "input")


def cmd_norm(ctx) -> dict:
    a = ctx.args
    x = _tuple(ctx)
    which = a.which
    if which == "c":
        res = compat_norm(x, g_max=a.g_max)
        ctx.record_solver(res.info)
        ctx.emit("decomposition", io.decomposition_to_json(res.primal))
        ctx.emit("witness", io.witness_to_json(res.dual))
        return {"norm": "c", "value": res.value, "dual_pairing": res.dual.value}
    if which == "cstar":
        res = compat_dual_norm(x, g_max=a.g_max)
        ctx.record_solver(res.info)
        ctx.emit("state", io.matrix_to_json(res.state))
        return {"norm": "cstar", "value": res.value}
    if which == "wit":
        res = wit_norm(x)
        ctx.record_solver(res.info)
        out = {"norm": "wit", "value": res.value}
        if a.samples is not None:
            if a.seed is None:
                raise UsageError("--seed is required with --samples")
            out["sample_lower_bound"] = wit_norm_sample_lb(x, a.samples, a.seed)
        return out
    fn = {"injl1": inj_norm_l1, "projl1": proj_norm_l1, "injlinf": inj_norm_linf}[which]
    return {"norm": which, "value": fn(x)}


def cmd_compat(ctx) -> dict:
    a = ctx.args
    tol = a.tol
    if a.action == "marginal":
        fam = io.family_from_json(ctx.load(a.input), "input")
        res = is_compatible_marginal_form(fam, tol=tol if tol is not None else 1e-7)
        out = {"verdict": "compatible" if res.verdict else "incompatible", "visibility": res.visibility}
        if res.joint is not None:
            out["joint"] = ctx.emit("joint", io.joint_to_json(res.joint))
        return out
    e = io.effects_from_json(ctx.load(a.input), "input")
    if a.action == "robustness":
        direction = _vector(a.direction, "direction", e.g)
        res = robustness(e, direction, tol=tol if tol is not None else 1e-5, g_max=a.g_max)
        return {"threshold": res.threshold, "bisection_steps": res.steps, "search_upper": res.upper}
    if a.s is not None:
        e = add_white_noise(e, _vector(a.s, "s", e.g))
    res = is_compatible(e, tol=tol if tol is not None else 1e-7, g_max=a.g_max)
    out = {
        "verdict": "compatible" if res.verdict else "incompatible",
        "value": res.value,
        "margin": res.margin,
    }
    if res.joint is not None:
        out["joint"] = ctx.emit("joint", io.joint_to_json(res.joint))
    elif a.action == "check":
        out["witness"] = ctx.emit("witness", io.witness_to_json(res.witness))
        out["witness_pairing"] = res.witness.value
    return out


def cmd_witness(ctx) -> dict:
    a = ctx.args
    x = _tuple(ctx)
    if a.action == "classify":
        return classify(x, tol=a.tol if a.tol is not None else 1e-7, g_max=a.g_max).to_json()
    if a.action == "make":
        if a.state is None:
            raise UsageError("--state is required for 'witness make'")
        rho = density_matrix(io.matrix_from_json(ctx.load(a.state, "state"), "state"))
        phi = witness_from_pair(x, rho)
        path = ctx.emit("phi", io.tuple_to_json(phi))
        return {"witness": path, "proj_l1": proj_norm_l1(phi)}
    res = max_violation(x)
    path = ctx.emit("maximizer", io.effects_to_json(res.maximizer))
    return {"value": res.value, "maximizer": path}


def cmd_region(ctx) -> dict:
    a = ctx.args
    if a.action == "qc":
        s = _vector(a.s if a.s is not None else a.direction, "s")
        return {"s": s.tolist(), "qc": qc_contains(s), "simplex": simplex_contains(s)}
    if a.action == "tau":
        _require(a, "d")
        t = tau_star(a.d)
        return {"d": a.d, "tau_star": t.value, "exact": f"{t.exact.numerator}/{t.exact.denominator}", "asymptotic": t.asymptotic}
    if a.action == "diagram":
        _require(a, "g", "d")
        cells = phase_diagram(a.g, a.d)
        if a.csv is not None:
            Path(a.csv).parent.mkdir(parents=True, exist_ok=True)
            Path(a.csv).write_text(phase_diagram_csv(cells))
            ctx.files["csv"] = a.csv
        return {"cells": [c.to_json() for c in cells]}
    _require(a, "g", "d", "samples")
    if a.seed is None:
        raise UsageError("--seed is required for 'region probe'")
    s = _vector(a.s if a.s is not None else a.direction, "s", a.g)
    res = gamma_probe(a.g, a.d, s, a.samples, a.seed, workers=a.workers, g_max=a.g_max)
    out = {"verdict": res.verdict, "note": res.note, "max_norm": res.norm, "samples": res.samples}
    if res.found:
        out["counterexample"] = ctx.emit("counterexample", io.effects_to_json(res.counterexample))
    return out


def cmd_gen(ctx) -> dict:
    a = ctx.args
    _require(a, "g", "d")
    if a.seed is None:
        raise UsageError("--seed is required for 'gen'")
    if a.g < 1 or a.d < 1:
        raise UsageError("--g and --d must be positive")
    rng = np.random.default_rng(a.seed)
    if a.kind == "effect":
        doc = io.effects_to_json(random_effect_tuple(a.g, a.d, rng))
    elif a.kind == "tuple":
        doc = io.tuple_to_json(ObservableTuple.random(a.g, a.d, rng))
    else:
        if a.k < 2:
            raise UsageError("--k must be >= 2")
        doc = io.povms_to_json(random_povm_family(a.g, a.d, a.k, rng))
    if a.out is None:
        return {"generated": doc}
    # for gen, --out receives the instance itself; the report goes to stdout
    ctx.files["generated"] = io.save_json(doc, a.out)
    ctx.report_path = None
    return {"generated": a.out}


def random_povm_family(g: int, d: int, k: int, rng: np.random.Generator) -> GeneralPovmFamily:
    """``E_v = S^-1/2 G_v S^-1/2`` with Wishart ``G_v`` and ``S = sum_v G_v``."""
    povms = []
    for _ in range(g):
        gs = np.array([w @ w.conj().T for w in (ginibre(d, rng) for _ in range(k))])
        vals, vecs = np.linalg.eigh(gs.sum(axis=0))
        inv_root = (vecs / np.sqrt(vals)) @ vecs.conj().T
        povms.append(herm(inv_root[None] @ gs @ inv_root[None]))
    return GeneralPovmFamily(tuple(povms))


HANDLERS = {"norm": cmd_norm, "compat": cmd_compat, "witness": cmd_witness, "region": cmd_region, "gen": cmd_gen}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="input JSON file")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--cert-dir", help="directory for emitted certificate files")
    common.add_argument("--seed", type=int, help="RNG seed (required for randomized commands)")
    common.add_argument("--tol", type=float)
    common.add_argument("--samples", type=int)
    common.add_argument("--g", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--direction", help="comma-separated noise direction")
    common.add_argument("--s", help="comma-separated noise vector")
    common.add_argument("--g-max", type=int, default=8, help="enumeration guard for 2^g SDP blocks")
    common.add_argument("--no-timestamp", action="store_true", help="omit timing fields")

    p = argparse.ArgumentParser(prog="compatnorm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    norm = sub.add_parser("norm", parents=[common], help="tensor norms of a tuple")
    norm.add_argument("which", choices=["c", "cstar", "wit", "injl1", "projl1", "injlinf"])

    compat = sub.add_parser("compat", parents=[common], help="compatibility of effects")
    compat.add_argument("action", choices=["check", "joint", "robustness", "marginal"])

    wit = sub.add_parser("witness", parents=[common], help="incompatibility witnesses")
    wit.add_argument("action", choices=["classify", "make", "violate"])
    wit.add_argument("--state", help="density-matrix JSON for 'make'")

    region = sub.add_parser("region", parents=[common], help="compatibility-region bounds")
    region.add_argument("action", choices=["qc", "tau", "diagram", "probe"])
    region.add_argument("--csv", help="also write the diagram as CSV")
    region.add_argument("--workers", type=int, default=1)

    gen = sub.add_parser("gen", parents=[common], help="random instances")
    gen.add_argument("kind", choices=["effect", "povm", "tuple"])
    gen.add_argument("--k", type=int, default=3, help="outcomes per POVM for 'gen povm'")
    return p


def run(argv=None, stdout=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_INPUT
    ctx = Context(args, argv)
    t0 = time.perf_counter()
    try:
        results = HANDLERS[args.command](ctx)
    except SolverError as exc:
        print(f"compatnorm: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (InvalidInput, OSError) as exc:
        print(f"compatnorm: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = {
        "command": argv,
        "inputs": ctx.inputs,
        "results": results,
        "files": ctx.files,
        "seed": args.seed,
        "solver": ctx.solver,
    }
    if not args.no_timestamp:
        report["wall_time_s"] = time.perf_counter() - t0
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    text = json.dumps(_round(report), indent=1, sort_keys=False) + "\n"
    if ctx.report_path is not None:
        Path(ctx.report_path).parent.mkdir(parents=True, exist_ok=True)
        Path(ctx.report_path).write_text(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
