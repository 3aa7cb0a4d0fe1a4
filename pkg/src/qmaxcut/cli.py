"""Command-line entry point: ``qmaxcut {solve,ratios,gadget,verify}``.

Exit codes: 0 ok, 1 input error, 2 size cap, 3 verification failure.
Reports are deterministic for a fixed configuration; wall-clock timings are
only embedded with ``--timings``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import __version__, checks, classical, exact, gadget, ratios, rounding, sdp
from .graph import InstanceError, WeightedGraph, generate, load_instance, total_weight
from .spin import as_spin

log = logging.getLogger("qmaxcut")

EXIT_OK, EXIT_INPUT, EXIT_SIZE, EXIT_VERIFY = 0, 1, 2, 3


class _Timer:
    def __init__(self):
        self.spent: dict[str, float] = {}

    @contextmanager
    def __call__(self, name: str):
        start = time.perf_counter()
        yield
        self.spent[name] = time.perf_counter() - start


def _plain(x):
    """Convert numpy scalars/arrays recursively so json.dumps is stable."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def _dump_json(report: dict) -> str:
    return json.dumps(_plain(report), indent=2, sort_keys=True) + "\n"


def _flat_csv(report: dict) -> str:
    """key,value rows for a nested report."""
    rows = []

    def walk(prefix, value):
        if isinstance(value, dict):
            for k in sorted(value):
                walk(f"{prefix}.{k}" if prefix else str(k), value[k])
        else:
            rows.append((prefix, json.dumps(value) if isinstance(value, list) else value))

    walk("", _plain(report))
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["key", "value"])
    out.writerows(rows)
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _header(args, command: str) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "verbose")}
    return {"tool": "qmaxcut", "version": __version__, "command": command, "config": config}


def _load_graph(args) -> WeightedGraph:
    if args.instance:
        return load_instance(args.instance)
    return generate(args.generate)


def cmd_solve(args) -> int:
    g = _load_graph(args)
    spin = as_spin(args.two_s / 2)
    timer = _Timer()
    report = _header(args, "solve")
    report["instance"] = g.summary()
    w_total = total_weight(g)
    report["total_weight"] = w_total
    report["seeds"] = {"sdp": args.seed, "rounding": args.seed, "local_search": args.seed, "lanczos": args.seed}

    qmc = qha = None
    if not args.skip_exact:
        with timer("exact"):
            qha = exact.qha_value(g, spin, seed=args.seed, max_dim=args.max_dim)
            qmc = exact.qmaxcut_value(g, spin, seed=args.seed, max_dim=args.max_dim)
    report["qmaxcut_value"] = qmc
    report["qha_value"] = qha

    with timer("classical"):
        prod, _ = classical.prod_local_search(g, seed=args.seed)
    report["prod_value"] = prod
    report["cha_value"] = w_total - prod

    with timer("sdp"):
        mc = sdp.solve_sdp(g, 1.0, seed=args.seed)
        ss = sdp.solve_sdp(g, sdp.spin_coefficient(spin), seed=args.seed)
    report["sdp_mc"] = mc.value
    report["sdp_s"] = ss.value
    report["sdp_stationarity"] = {"mc": mc.stationarity_residual, "s": ss.stationarity_residual,
                                  "certified": bool(mc.certified and ss.certified)}

    gram = mc.gram if args.algorithm == "lieb_bov" else ss.gram
    with timer("rounding"):
        rr = rounding.round_and_evaluate(g, gram, args.trials, args.seed)
    report["rounded"] = {
        "algorithm": args.algorithm,
        "trials": rr.trials,
        "best": rr.best_value,
        "mean": rr.mean_value,
        "std_error": rr.std_error,
        "best_assignment": rr.best_assignment,
    }
    if args.algorithm == "lieb_bov":
        guarantee = ratios.alpha_lieb(spin)
    else:
        guarantee = ratios.alpha_gp(spin)[0]
    realized = {"guarantee": guarantee, "upper_bound_alpha_star": ratios.alpha_star(spin)}
    if qmc is not None:
        realized["best_over_exact"] = rr.best_value / qmc if qmc else 1.0
        realized["mean_over_exact"] = rr.mean_value / qmc if qmc else 1.0
    if args.algorithm == "gp_s":
        realized["mean_over_sdp_s"] = rr.mean_value / ss.value if ss.value else 1.0
    report["ratios"] = realized
    if args.timings:
        report["timings"] = timer.spent
    log.info("solve finished: %s", {k: round(v, 3) for k, v in timer.spent.items()})
    _emit(_dump_json(report) if args.format == "json" else _flat_csv(report), args.out)
    return EXIT_OK


def cmd_ratios(args) -> int:
    timer = _Timer()
    with timer("table"):
        table = ratios.ratio_table(args.two_s)
    if args.format == "csv":
        text = table.to_csv()
        th = table.thresholds
        text += f"# two_s where alpha_gp >= {th['fraction']} alpha_bov: {th['two_s_gp']}\n"
        text += f"# two_s where alpha_lieb >= {th['fraction']} alpha_bov: {th['two_s_lieb']}\n"
    else:
        report = _header(args, "ratios")
        report["table"] = table.to_dict()
        if args.timings:
            report["timings"] = timer.spent
        text = _dump_json(report)
    _emit(text, args.out)
    return EXIT_OK


def _parse_deltas(text: str) -> list[float]:
    try:
        deltas = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InstanceError(f"bad --deltas list {text!r}") from None
    if not deltas or any(not d > 0 for d in deltas) or any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise InstanceError("--deltas must be positive and strictly increasing")
    return deltas


def cmd_gadget(args) -> int:
    deltas = _parse_deltas(args.deltas)
    if args.two_s > gadget.MAX_TWO_S:
        raise exact.SizeCapError(f"gadget diagonalisation limited to 2S <= {gadget.MAX_TWO_S}")
    spin = as_spin(args.two_s / 2)
    timer = _Timer()
    with timer("gadget"):
        _, fit = gadget.effective_hamiltonian(spin, args.include_h1)
        norm = gadget.projected_h2_norm(spin)
        rows = gadget.spectral_convergence(spin, deltas, args.include_h1)
    ratio = fit.coupling / gadget.reference_coupling(spin)
    if args.format == "csv":
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["two_s", "delta", "spec_error", "scaled_error", "coupling", "offset",
                      "fit_residual", "coupling_ratio", "ph2p_norm"])
        for r in rows:
            out.writerow([r.two_s, repr(r.delta), repr(r.spec_error), repr(r.scaled_error), repr(fit.coupling),
                          repr(fit.offset), repr(fit.residual), repr(ratio), repr(norm)])
        text = buf.getvalue()
    else:
        corr = gadget.mediator_correlations(spin)
        report = _header(args, "gadget")
        report.update({
            "coupling": fit.coupling,
            "offset": fit.offset,
            "fit_residual": fit.residual,
            "reference_coupling": gadget.reference_coupling(spin),
            "coupling_ratio": ratio,
            "ph2p_norm": norm,
            "mediator_correlations": {"singlet_diag": np.diag(corr["singlet"]),
                                      "unsigned_diag": np.diag(corr["unsigned"]),
                                      "reference": corr["reference"]},
            "convergence": [vars(r) for r in rows],
        })
        if args.timings:
            report["timings"] = timer.spent
        text = _dump_json(report)
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = checks.run_all(args.seed)
    if args.instance or args.generate:
        g = _load_graph(args)
        results += checks.instance_suite(g, args.two_s, args.seed).results
    failed = [r for r in results if not r.ok]
    for r in results:
        log.info("%s %s/%s", "PASS" if r.ok else "FAIL", r.suite, r.name)
    report = _header(args, "verify")
    report["passed"] = len(results) - len(failed)
    report["failed"] = len(failed)
    report["checks"] = [r.to_dict() for r in results]
    _emit(_dump_json(report) if args.format == "json" else _flat_csv(report), args.out)
    return EXIT_VERIFY if failed else EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmaxcut", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, two_s_default=1, two_s_help="2S (spin times two)"):
        p.add_argument("--two-s", type=_positive_int, default=two_s_default, help=two_s_help)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--timings", action="store_true", help="embed wall-clock timings (breaks byte-identity)")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("solve", help="exact, classical, SDP and rounded values for one instance")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--instance", help="edge-list file")
    source.add_argument("--generate", help="generator spec, e.g. complete:3:1 or random:8:0.5:1:7")
    common(p)
    p.add_argument("--algorithm", choices=rounding.ALGORITHMS, default="gp_s")
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--skip-exact", action="store_true", help="skip exact diagonalisation")
    p.add_argument("--max-dim", type=_positive_int, default=exact.MAX_DIM, help="Hilbert-space dimension cap")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("ratios", help="table of approximation ratios for 2S = 1..--two-s")
    common(p, 10, "largest 2S in the table")
    p.set_defaults(func=cmd_ratios)

    p = sub.add_parser("gadget", help="mediator gadget coupling and spectral convergence")
    common(p)
    p.add_argument("--deltas", default="100,1000,10000", help="comma-separated increasing list")
    p.add_argument("--include-h1", action="store_true", help="add the identity offset term")
    p.set_defaults(func=cmd_gadget, format="csv")

    p = sub.add_parser("verify", help="run all invariant suites")
    source = p.add_mutually_exclusive_group()
    source.add_argument("--instance", help="also check this instance")
    source.add_argument("--generate", help="also check this generated instance")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except exact.SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (InstanceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
