"""Command-line front end: one subcommand per plottable data table.

Exit status: 0 on success, 1 on invalid input, 2 on numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from .protocol import NumericalError, ProtocolConfig

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (endpoints inclusive within 1e-12) or a comma list."""
    text = str(text).strip()
    if ":" not in text:
        return [float(t) for t in text.split(",") if t.strip()]
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} is not start:stop:step")
    start, stop, step = (float(p) for p in parts)
    if not step > 0 or stop < start:
        raise UsageError(f"grid {text!r} needs step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-12))
    return [round(start + i * step, 12) for i in range(n + 1)]


def parse_j_list(text: str) -> list[str]:
    from .spin import SpinValue
    out = []
    for tok in str(text).split(","):
        tok = tok.strip()
        if tok:
            out.append(str(SpinValue.of(tok)))
    if not out:
        raise UsageError("empty j list")
    return out


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def emit(rows, columns, args, meta=None):
    """Write rows as CSV (LF endings) or JSON ``{meta, rows}`` to the output target."""
    meta = dict(version=__version__, command=args.command, config=_echo(args), **(meta or {}))
    if args.format == "json":
        doc = dict(meta=meta, rows=[{c: _jsonable(r[c]) for c in columns} for r in rows])
        text = json.dumps(doc, indent=2, default=_jsonable) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])
        text = buf.getvalue()
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _echo(args):
    skip = {"func", "output", "format", "config"}
    return {k: v for k, v in vars(args).items() if k not in skip}


# -- subcommands -------------------------------------------------------------

def cmd_classical_field(args):
    from .classical import classical_score_field
    cfg = ProtocolConfig(args.k, args.delta)
    res = args.resolution if len(args.resolution) == 2 else args.resolution * 2
    field = classical_score_field(cfg, tuple(args.x_range), tuple(args.y_range), tuple(res))
    emit(list(field.rows()), ["ax", "ay", "score"], args)


def cmd_classical_mc(args):
    from .classical import mc_bound_check
    rep = mc_bound_check(ProtocolConfig(args.k, args.delta), args.n, args.seed)
    rows = [dict(score=s, count=c) for s, c in rep["counts"].items()]
    emit(rows, ["score", "count"], args, meta=dict(report=rep))


def cmd_cv_scan(args):
    from .oscillator import delta_scan_cv
    grid = parse_grid(args.delta_grid)
    for d in grid:
        ProtocolConfig(args.k, d)
    if any(0 < d < 0.5 for d in grid):
        print(f"warning: delta < 0.5 needs much larger truncation than dim={args.dim}; "
              "scores there are truncation-limited", file=sys.stderr)
    rows = delta_scan_cv(args.k, grid, args.dim, threads=args.threads,
                         convergence_check=args.convergence)
    cols = ["delta", "score", "bound", "violation", "dim", "residual"]
    if args.convergence:
        cols.append("truncation_shift")
    emit(rows, cols, args)


def cmd_cv_wigner(args):
    from .oscillator import GridSpec, delta_scan_cv, max_quantum_score_cv, negativity_volume, wigner_function
    if args.delta == "opt":
        scan = delta_scan_cv(args.k, parse_grid(args.opt_grid), args.dim, threads=args.threads)
        delta = max(scan, key=lambda r: r["score"])["delta"]
    else:
        delta = float(args.delta)
    cfg = ProtocolConfig(args.k, delta)
    report, state = max_quantum_score_cv(cfg, args.dim)
    lo, hi = args.range
    box = GridSpec(lo, hi, args.points, lo, hi, args.points)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RuntimeWarning)
        grid = wigner_function(state, box)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    meta = dict(delta=delta, score=report.value, negativity_volume=negativity_volume(grid),
                wigner_total=grid.total)
    emit(list(grid.rows()), ["x", "p", "w"], args, meta=meta)


def cmd_cv_gaussian_bound(args):
    from .oscillator import gaussian_lower_bound
    cfg = ProtocolConfig(args.k, args.delta)
    rows = [dict(sigma=s, bound=gaussian_lower_bound(cfg, s)) for s in parse_grid(args.sigma_grid)]
    emit(rows, ["sigma", "bound"], args)


SPIN_COLUMNS = ["j", "delta", "score", "bound", "sep_bound", "violation", "gme_flag"]


def cmd_spin_scan(args):
    from .spin import SpinValue, gme_separable_bound, optimal_delta_scan
    grid = parse_grid(args.delta_grid)
    rows, meta = [], {}
    for j in parse_j_list(args.j_list):
        sv = SpinValue.of(j)
        scan = optimal_delta_scan(args.k, sv, grid, eps=args.eps)
        meta[j] = dict(argmax=scan["argmax"], max_score=scan["max_score"],
                       near_max=scan["near_max"], secondary_peak=scan["secondary_peak"])
        for r in scan["rows"]:
            cfg = ProtocolConfig(args.k, r["delta"])
            sep = gme_separable_bound(cfg) if sv.two_j == args.k else float("nan")
            rows.append(dict(r, sep_bound=sep, violation=r["score"] > r["bound"] + 1e-9,
                             gme_flag=bool(sv.two_j == args.k and r["score"] > sep)))
    emit(rows, SPIN_COLUMNS, args, meta=dict(scans=meta))


def cmd_spin_vs_j(args):
    from .spin import spin_vs_j
    delta = args.delta if args.delta == "opt" else float(args.delta)
    emit(spin_vs_j(args.k, args.j_max, delta), SPIN_COLUMNS, args)


def cmd_spin_convergence(args):
    from .spin import spin_cv_convergence_report
    rep = spin_cv_convergence_report(args.k, parse_j_list(args.j_list), args.dim,
                                     include_curves=args.curves)
    meta = dict(cv_max=rep["cv_max"], cv_argmax=rep["cv_argmax"], summary=rep["summary"])
    if args.curves:
        emit(rep["curves"], ["j", "delta", "score", "delta_over_sqrt_j", "cv_score"], args, meta=meta)
    else:
        emit(rep["summary"], ["j", "delta", "score", "cv_max", "difference", "bound", "violation"],
             args, meta=meta)


def cmd_gme_witness(args):
    from .spin import depolarized_ghz_score, gme_separable_bound
    if args.n % 2 or args.n < 4:
        raise UsageError("--n must be an even number of qubits >= 4")
    cfg = ProtocolConfig(args.n, args.delta)
    score, detected = depolarized_ghz_score(cfg, args.pg)
    row = dict(n=args.n, K=cfg.K, delta=cfg.delta, pg=args.pg, score=score,
               sep_bound=gme_separable_bound(cfg), detected=detected,
               gme_limit=1.0 / (2.0 * (1.0 - 2.0 ** -cfg.K)))
    emit([row], list(row), args)


def _sample_state(args):
    from .classical import ClassicalEnsemble, ClassicalState
    from .oscillator import FockState
    from .spin import QubitEnsembleState, SpinState

    sys_ = args.system
    if sys_ == "classical":
        return ClassicalState.from_xy(args.ax, args.ay)
    if sys_ == "mixture":
        comps = json.loads(args.mixture)
        return ClassicalEnsemble(tuple((w, ClassicalState.from_xy(x, y)) for w, x, y in comps))
    if sys_ == "spin-cat":
        return SpinState.cat(args.k, args.delta)
    if sys_ == "ghz":
        return QubitEnsembleState.ghz(args.k)
    if sys_ == "vacuum":
        return FockState.vacuum(args.dim)
    if sys_ == "fock":
        return FockState.number(args.n_photons, max(args.dim, args.n_photons + 1))
    raise UsageError(f"unknown system {sys_!r}")


def _oracle(state, cfg):
    from .classical import ClassicalEnsemble, ClassicalState, classical_score, ensemble_score
    from .oscillator import FockState, build_score_operator_cv
    from .spin import QubitEnsembleState, build_score_operator_qubit_ensemble, build_score_operator_spin

    if isinstance(state, ClassicalState):
        return classical_score(cfg, state).value
    if isinstance(state, ClassicalEnsemble):
        return ensemble_score(cfg, state).value
    if isinstance(state, FockState):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return build_score_operator_cv(cfg, state.dim).expectation(state)
    if isinstance(state, QubitEnsembleState):
        S = build_score_operator_qubit_ensemble(state.n_qubits, cfg)
        a = state.amplitudes
        return float(np.vdot(a, S @ a).real)
    return build_score_operator_spin(cfg, state.j).expectation(state.amplitudes)


def cmd_sample(args):
    from .sampler import simulate_rounds

    cfg = ProtocolConfig(args.k, args.delta)
    state = _sample_state(args)
    k, inside, contrib = simulate_rounds(state, cfg, args.rounds, args.seed)
    c = contrib.astype(float)
    mean = float(np.sum(c) / args.rounds)
    stderr = float(np.std(c, ddof=1) / math.sqrt(args.rounds)) if args.rounds > 1 else 0.0
    oracle = _oracle(state, cfg)
    z = (mean - oracle) / stderr if stderr > 0 else 0.0
    summary = dict(mean=mean, stderr=stderr, rounds=args.rounds, seed=args.seed, oracle=oracle, z=z)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    rows = [dict(round=i, k=int(k[i]), inside=bool(inside[i]), contribution=int(contrib[i]))
            for i in range(args.rounds)]
    emit(rows, ["round", "k", "inside", "contribution"], args, meta=dict(summary=summary))
    if not args.summary and args.format == "csv":
        print(json.dumps(summary), file=sys.stderr)


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .oscillator import DEFAULT_DIM, default_threads

    p = _Parser(prog="evenprec", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
        sp.add_argument("--config", default=None, help="JSON file of option defaults")
        sp.add_argument("--threads", type=int, default=default_threads(),
                        help="worker threads for scans (env EVENPREC_THREADS)")
        return sp

    sp = add("classical-field", cmd_classical_field, "classical score over initial points")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--x-range", type=float, nargs=2, default=[-3.0, 3.0])
    sp.add_argument("--y-range", type=float, nargs=2, default=[-3.0, 3.0])
    sp.add_argument("--resolution", type=int, nargs="+", default=[201])

    sp = add("classical-mc", cmd_classical_mc, "Monte Carlo check of the classical bound")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--n", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("cv-scan", cmd_cv_scan, "oscillator maximal score against delta")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--delta-grid", default="0.1:6:0.05")
    sp.add_argument("--dim", type=int, default=DEFAULT_DIM)
    sp.add_argument("--convergence", action="store_true", help="also report the shift at 2*dim")

    sp = add("cv-wigner", cmd_cv_wigner, "Wigner function of the maximal oscillator state")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--delta", default="opt", help="window width or 'opt'")
    sp.add_argument("--opt-grid", default="0.02:0.98:0.02")
    sp.add_argument("--dim", type=int, default=DEFAULT_DIM)
    sp.add_argument("--range", type=float, nargs=2, default=[-8.0, 8.0])
    sp.add_argument("--points", type=int, default=801)

    sp = add("cv-gaussian-bound", cmd_cv_gaussian_bound, "Gaussian-family lower bound against sigma")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--sigma-grid", default="0.1:10:0.1")

    sp = add("spin-scan", cmd_spin_scan, "spin maximal score against delta for each j")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--j-list", default="2")
    sp.add_argument("--delta-grid", default="0:20:0.05")
    sp.add_argument("--eps", type=float, default=2.0 ** -8)

    sp = add("spin-vs-j", cmd_spin_vs_j, "spin maximal score against j")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--j-max", default="10")
    sp.add_argument("--delta", default="opt", help="window width or 'opt'")

    sp = add("spin-convergence", cmd_spin_convergence, "spin maxima against the oscillator maximum")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--j-list", default="10,50,100,200")
    sp.add_argument("--dim", type=int, default=DEFAULT_DIM)
    sp.add_argument("--curves", action="store_true", help="emit rescaled score curves")

    sp = add("gme-witness", cmd_gme_witness, "GHZ detection under depolarizing noise")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--delta", type=float, default=0.0)
    sp.add_argument("--pg", type=float, default=0.0)

    sp = add("sample", cmd_sample, "simulate protocol rounds")
    sp.add_argument("--system", choices=["classical", "mixture", "spin-cat", "ghz", "vacuum", "fock"],
                    default="classical")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--rounds", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--ax", type=float, default=0.0)
    sp.add_argument("--ay", type=float, default=10.0)
    sp.add_argument("--mixture", default="[[0.7, 0, 10], [0.3, 7.0710678118654755, 7.0710678118654755]]",
                    help="JSON list of [weight, ax, ay]")
    sp.add_argument("--dim", type=int, default=8)
    sp.add_argument("--n-photons", type=int, default=1)
    sp.add_argument("--summary", default=None, help="write the summary JSON here")
    return p


def _validate(args):
    for name in ("n", "rounds", "dim", "points"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            raise UsageError(f"--{name} must be >= 1")
    if getattr(args, "threads", 1) < 1:
        raise UsageError("--threads must be >= 1")


def dispatch(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return EXIT_INVALID
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                defaults = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"evenprec: error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_INVALID
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in defaults.items()})
        args = parser.parse_args(argv)
    try:
        _validate(args)
        args.func(args)
    except NumericalError as exc:
        print(f"evenprec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError) as exc:
        print(f"evenprec: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
