"""Command line experiment harness.

Subcommands ``reduce``, ``sample-edge``, ``airy``, ``limit``, ``validate`` and
``crossvalidate``.  Tabular output goes to CSV (``--out file.csv``, stdout
when omitted); every CSV written to a file gets a JSON sidecar
``file.csv.json`` with the configuration echo, wall time and, for suites,
the pass/fail verdict.  The CSV itself carries no timing, so the same
configuration and seed give byte-identical CSVs.

Exit codes: 0 success, 1 suite failure, 2 non-unique band form (``reduce``),
64 invalid configuration, 65 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .algebra import (
    ConfigurationError,
    DegenerateInputError,
    DomainError,
    NumericError,
    Rng,
    SelfAdjointMatrix,
    check_beta,
    embed,
    read_matrix_text,
    unembed,
    write_matrix_text,
)
from .band_reduction import band_jacobi_form, lower_band_form
from .dyson_sde import DEFAULT_DT_BASE, DEFAULT_HORIZON, THREADS_ENV, default_workers, estimate_F
from .ensembles import SpikeConfig
from .suites import (
    SUITES,
    SuiteResult,
    compare_routes,
    parse_grid,
    route_cdf,
)

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_NONUNIQUE = 2
EXIT_USAGE = 64
EXIT_NUMERIC = 65


@dataclass
class ExperimentConfig:
    """Validated parameters of one run; echoed verbatim into the JSON sidecar."""

    subcommand: str
    beta: int | None = None
    n: int | None = None
    p: int | None = None
    r: int | None = None
    spikes: tuple | None = None
    h: float | None = None
    L: float | None = None
    dt: float | None = None
    horizon: float | None = None
    reps: int | None = None
    seed: int | None = None
    out: str | None = None
    threads: int = 1
    options: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = asdict(self)
        if d["spikes"] is not None:
            d["spikes"] = ["inf" if math.isinf(v) else v for v in d["spikes"]]
        return d


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be positive")
    return v


def _add_common(p: argparse.ArgumentParser, seed_required: bool = True) -> None:
    p.add_argument("--seed", type=int, required=seed_required, help="master seed")
    p.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help=f"worker processes (default ${THREADS_ENV} or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spiked-edge", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("reduce", help="band Jacobi / lower band form of a matrix file")
    p.add_argument("--input", required=True, help="matrix text file")
    p.add_argument("--r", type=_positive_int, required=True)
    p.add_argument("--mode", choices=("hermitian", "data"), default="hermitian")
    p.add_argument("--out", default=None, help="output prefix (PREFIX.B.txt, ...); stdout if omitted")

    p = sub.add_parser("sample-edge", help="edge-scaled top eigenvalues of the band models")
    p.add_argument("--model", choices=("gaussian", "wishart"), required=True)
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--p", type=_positive_int, default=None)
    p.add_argument("--r", type=_positive_int, default=None)
    p.add_argument("--spike", required=True, help="w values, e.g. 0,inf")
    p.add_argument("--reps", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, default=1, help="number of top eigenvalues")
    _add_common(p)

    p = sub.add_parser("airy", help="low eigenvalues of the discretized stochastic Airy operator")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--r", type=_positive_int, default=None)
    p.add_argument("--w", required=True)
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--L", type=float, default=15.0)
    p.add_argument("--reps", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, default=1)
    _add_common(p)

    p = sub.add_parser("limit", help="limit law F_beta^k(x; w) by the SDE or Painleve route")
    p.add_argument("--method", choices=("sde", "painleve"), required=True)
    p.add_argument("--beta", type=int, default=2)
    p.add_argument("--r", type=_positive_int, default=None)
    p.add_argument("--w", required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--x", required=True, help="grid a:b:step (inclusive) or a comma list")
    p.add_argument("--reps", type=_positive_int, default=None)
    p.add_argument("--dt", type=float, default=DEFAULT_DT_BASE)
    p.add_argument("--horizon", type=float, default=DEFAULT_HORIZON)
    p.add_argument("--seed", type=int, default=None, help="master seed (required for sde)")
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=_positive_int, default=None)

    p = sub.add_parser("validate", help="run a validation suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true", help="reduced sizes for a smoke run")
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=_positive_int, default=None)

    p = sub.add_parser("crossvalidate", help="compare two routes on a shared x grid")
    p.add_argument("--routes", required=True, help="two of finite-n,sde,painleve,airy, comma separated")
    p.add_argument("--model", choices=("gaussian", "wishart"), default="gaussian")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--p", type=_positive_int, default=None)
    p.add_argument("--w", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--reps", type=_positive_int, default=2000)
    p.add_argument("--sde-reps", type=_positive_int, default=None, help="SDE paths per grid point (default --reps)")
    p.add_argument("--dt", type=float, default=1e-2)
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--L", type=float, default=15.0)
    p.add_argument("--tol", type=float, default=None, help="PASS iff max |dF| <= tol")
    p.add_argument("--sigmas", type=float, default=None, help="PASS iff |dF| <= sigmas * pooled stderr")
    _add_common(p)
    return parser


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(header, rows) -> str:
    """CSV with floats in ``repr`` form; rows are tuples or dicts keyed by header."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        vals = [row.get(h, "") for h in header] if isinstance(row, dict) else row
        wr.writerow([_fmt(v) for v in vals])
    return buf.getvalue()


def emit(cfg: ExperimentConfig, header, rows, summary: dict, t0: float) -> None:
    text = csv_text(header, rows)
    if cfg.out in (None, "-"):
        sys.stdout.write(text)
        return
    with open(cfg.out, "w", newline="") as fh:
        fh.write(text)
    side = {"config": cfg.to_json(), "columns": list(header), "rows": len(rows),
            "wall_time_s": time.perf_counter() - t0, "version": __version__, **summary}
    with open(cfg.out + ".json", "w") as fh:
        json.dump(side, fh, indent=2, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _threads(args) -> int:
    t = getattr(args, "threads", None)
    return default_workers() if t is None else int(t)


def _spike(text: str, r: int | None) -> SpikeConfig:
    sp = SpikeConfig.parse(text)
    if r is not None and sp.r != r:
        raise ConfigurationError(f"--r {r} but {sp.r} w values given")
    return sp


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_reduce(args, t0) -> int:
    cfg = ExperimentConfig("reduce", r=args.r, out=args.out, options={"input": args.input, "mode": args.mode})
    try:
        with open(args.input) as fh:
            beta, comps = read_matrix_text(fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read {args.input}: {exc}") from exc
    cfg.beta = beta
    outputs = {}
    if args.mode == "hermitian":
        if comps.shape[0] != comps.shape[1]:
            raise ConfigurationError("hermitian mode needs a square matrix")
        res = band_jacobi_form(SelfAdjointMatrix.from_components(beta, comps), args.r)
        outputs["B"] = unembed(res.B.dense(), beta)
        outputs["U"] = unembed(res.U, beta)
        unique = res.uniqueness_flag
    else:
        res = lower_band_form(embed(comps, beta), beta, args.r)
        outputs["L"] = unembed(res.L, beta)
        outputs["U"] = unembed(res.U, beta)
        outputs["V"] = unembed(res.V, beta)
        unique = res.uniqueness_flag
    if args.out in (None, "-"):
        for name, c in outputs.items():
            sys.stdout.write(f"# {name}\n{write_matrix_text(c, beta)}")
    else:
        for name, c in outputs.items():
            with open(f"{args.out}.{name}.txt", "w") as fh:
                fh.write(write_matrix_text(c, beta))
        side = {"config": cfg.to_json(), "uniqueness_flag": bool(unique),
                "files": [f"{args.out}.{k}.txt" for k in outputs], "wall_time_s": time.perf_counter() - t0}
        with open(f"{args.out}.json", "w") as fh:
            json.dump(side, fh, indent=2)
            fh.write("\n")
    if not unique:
        sys.stderr.write("band form is not unique (a pivot vanished)\n")
        return EXIT_NONUNIQUE
    return EXIT_OK


def _edge_chunk(job):
    seed, model, beta, n, p, w, k, start, stop = job
    spike = SpikeConfig(tuple(w))
    from .edge_solver import sample_gaussian_edge, sample_wishart_edge

    out = []
    for i in range(start, stop):
        rng = Rng(seed, i)
        vals = (sample_gaussian_edge(rng, beta, n, spike, k) if model == "gaussian"
                else sample_wishart_edge(rng, beta, n, p, spike, k))
        out.append(vals)
    return out


def _parallel_chunks(fn, jobs, threads):
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def _chunk_bounds(N: int, threads: int):
    m = min(N, threads * 4) if threads > 1 else 1
    b = np.linspace(0, N, m + 1).astype(int)
    return [(int(x), int(y)) for x, y in zip(b[:-1], b[1:]) if y > x]


def _cmd_sample_edge(args, t0) -> int:
    beta = check_beta(args.beta)
    spike = _spike(args.spike, args.r)
    if args.model == "wishart" and args.p is None:
        raise ConfigurationError("--p is required for the wishart model")
    threads = _threads(args)
    cfg = ExperimentConfig("sample-edge", beta=beta, n=args.n, p=args.p, r=spike.r, spikes=spike.w,
                           reps=args.reps, seed=args.seed, out=args.out, threads=threads,
                           options={"model": args.model, "k": args.k})
    jobs = [(args.seed, args.model, beta, args.n, args.p, spike.w, args.k, a, b)
            for a, b in _chunk_bounds(args.reps, threads)]
    parts = _parallel_chunks(_edge_chunk, jobs, threads)
    rows = []
    rep = 0
    for part in parts:
        for vals in part:
            for j, v in enumerate(vals):
                rows.append((rep, j, float(v)))
            rep += 1
    emit(cfg, ("replica", "k", "scaled_eigenvalue"), rows, {}, t0)
    return EXIT_OK


def _airy_chunk(job):
    from .airy_operator import discretize, smallest_eigenvalues

    seed, beta, w, k, h, L, start, stop = job
    spike = SpikeConfig(tuple(w))
    out = []
    for i in range(start, stop):
        _, H = discretize(Rng(seed, i), beta, spike.r, spike, h, L)
        out.append(smallest_eigenvalues(H, k))
    return out


def _cmd_airy(args, t0) -> int:
    beta = check_beta(args.beta)
    spike = _spike(args.w, args.r)
    threads = _threads(args)
    cfg = ExperimentConfig("airy", beta=beta, r=spike.r, spikes=spike.w, h=args.h, L=args.L, reps=args.reps,
                           seed=args.seed, out=args.out, threads=threads, options={"k": args.k})
    jobs = [(args.seed, beta, spike.w, args.k, args.h, args.L, a, b) for a, b in _chunk_bounds(args.reps, threads)]
    parts = _parallel_chunks(_airy_chunk, jobs, threads)
    rows = []
    rep = 0
    for part in parts:
        for vals in part:
            for j, v in enumerate(vals):
                rows.append((rep, j, float(v)))
            rep += 1
    emit(cfg, ("replica", "k", "eigenvalue"), rows, {}, t0)
    return EXIT_OK


def _cmd_limit(args, t0) -> int:
    spike = _spike(args.w, args.r)
    x = parse_grid(args.x)
    threads = _threads(args)
    cfg = ExperimentConfig("limit", beta=args.beta, r=spike.r, spikes=spike.w, dt=args.dt, horizon=args.horizon,
                           reps=args.reps, seed=args.seed, out=args.out, threads=threads,
                           options={"method": args.method, "k": args.k, "x": args.x})
    if args.method == "sde":
        beta = check_beta(args.beta)
        if args.seed is None:
            raise ConfigurationError("--seed is required for the sde method")
        if args.reps is None:
            raise ConfigurationError("--reps is required for the sde method")
        if not (0 < args.dt <= 0.1) or args.horizon <= 0:
            raise ConfigurationError("need 0 < dt <= 0.1 and horizon > 0")
        est = estimate_F(args.seed, beta, spike.r, spike, args.k, x, args.reps, args.dt, workers=threads,
                         horizon=args.horizon)
        rows = [(float(a), float(b), float(c), int(d)) for a, b, c, d in est.rows()]
        emit(cfg, ("x", "estimate", "stderr", "N"), rows, {"discarded": est.discarded.tolist()}, t0)
        return EXIT_OK
    cdf = route_cdf("painleve", x, beta=args.beta, w=spike, k=args.k)
    rows = [(float(a), float(b), 0.0, 0) for a, b in zip(cdf.x, cdf.F)]
    emit(cfg, ("x", "estimate", "stderr", "N"), rows, {}, t0)
    return EXIT_OK


QUICK = {
    "spectrum": dict(trials=6, n_max=40),
    "commutation": dict(trials=9),
    "law-equivalence": dict(reps=100),
    "oscillation": dict(paths=30),
    "painleve-pde": dict(pde_x=(-1.0, 0.0), pde_w=((-1.0, 0.5),)),
    "monotonicity": dict(N=50, x_values=(-1.0,), red_N=2000, red_w=(0.0,)),
    "triangle": dict(N=2000, points=[(1, (0.0,), -1.0), (2, (-1.0, 1.0), 0.0)]),
}

SEEDLESS = {"painleve-pde"}


def _suite_csv(res: SuiteResult):
    header = []
    for row in res.rows:
        for k in row:
            if k not in header:
                header.append(k)
    return header, res.rows


def _cmd_validate(args, t0) -> int:
    fn = SUITES[args.suite]
    kwargs = dict(QUICK.get(args.suite, {})) if args.quick else {}
    if args.suite not in SEEDLESS:
        kwargs["seed"] = args.seed
    if args.suite in ("monotonicity", "triangle"):
        kwargs["workers"] = _threads(args)
    cfg = ExperimentConfig("validate", seed=args.seed, out=args.out, threads=_threads(args),
                           options={"suite": args.suite, "quick": args.quick})
    res = fn(**kwargs)
    header, rows = _suite_csv(res)
    emit(cfg, header, rows, _suite_summary(res), t0)
    sys.stderr.write(res.summary_line() + "\n")
    return EXIT_OK if res.passed else EXIT_SUITE_FAILED


def _suite_summary(res: SuiteResult) -> dict:
    return {"suite": res.name, "passed": bool(res.passed), "statistic": res.statistic,
            "tolerance": res.tolerance, "details": res.details, "suite_wall_time_s": res.wall_time}


def _cmd_crossvalidate(args, t0) -> int:
    routes = [r.strip() for r in args.routes.split(",") if r.strip()]
    if len(routes) != 2 or routes[0] == routes[1]:
        raise ConfigurationError("--routes needs two different routes")
    beta = check_beta(args.beta)
    spike = SpikeConfig.parse(args.w)
    x = parse_grid(args.x)
    threads = _threads(args)
    sde_reps = args.sde_reps or args.reps
    cfg = ExperimentConfig("crossvalidate", beta=beta, n=args.n, p=args.p, r=spike.r, spikes=spike.w, h=args.h,
                           L=args.L, dt=args.dt, reps=args.reps, seed=args.seed, out=args.out, threads=threads,
                           options={"routes": routes, "model": args.model, "x": args.x, "tol": args.tol,
                                    "sigmas": args.sigmas, "sde_reps": sde_reps})
    if args.tol is None and args.sigmas is None:
        raise ConfigurationError("give --tol and/or --sigmas")
    cdfs = []
    for j, route in enumerate(routes):
        reps = sde_reps if route == "sde" else args.reps
        cdfs.append(route_cdf(route, x, beta=beta, w=spike, seed=args.seed, reps=reps, model=args.model,
                              n=args.n, p=args.p, dt_base=args.dt, h=args.h, L=args.L, workers=threads,
                              stream0=10_000_000 * j))
    res = compare_routes(cdfs[0], cdfs[1], tol=args.tol, sigmas=args.sigmas, name="-vs-".join(routes))
    header, rows = _suite_csv(res)
    emit(cfg, header, rows, _suite_summary(res), t0)
    sys.stderr.write(res.summary_line() + "\n")
    return EXIT_OK if res.passed else EXIT_SUITE_FAILED


COMMANDS = {
    "reduce": _cmd_reduce,
    "sample-edge": _cmd_sample_edge,
    "airy": _cmd_airy,
    "limit": _cmd_limit,
    "validate": _cmd_validate,
    "crossvalidate": _cmd_crossvalidate,
}


VALUE_OPTIONS = ("--x", "--w", "--spike")


def _attach_negative_values(argv):
    """Rewrite ``--x -4:2:0.25`` as ``--x=-4:2:0.25`` so argparse keeps the value."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            elif nxt.startswith("-") and not nxt.startswith("--"):
                out.append(f"{tok}={nxt}")
            else:
                out.extend([tok, nxt])
        else:
            out.append(tok)
    return out


def run(argv=None) -> int:
    """Parse ``argv`` and run; returns the exit code."""
    parser = build_parser()
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    t0 = time.perf_counter()
    try:
        return COMMANDS[args.subcommand](args, t0)
    except (ConfigurationError, DomainError, DegenerateInputError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (NumericError, FloatingPointError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
