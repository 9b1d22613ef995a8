"""Command-line entry point: ``hyperuniverse <stage> [action] ...``.

Exit codes: 0 success, 1 internal error, 2 precondition, 3 certification,
4 retries or capacity exhausted, 5 verification failed, 6 unreadable input.
Every artifact is a pure function of the arguments and the seed;
HYPERUNIVERSE_SEED, when set, replaces --seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import branchwalk as bw
from .core import Hypergraph, RootedTree, max_density
from .decompose import DecompositionCertificate, choose_ab, decompose, verify_certificate
from .embed import CapacityError, EmbeddingResult, run_embedding, verify_embedding
from .errors import (
    CertificationError,
    FormatError,
    HyperUniverseError,
    ParameterError,
    RetryExhaustedError,
)
from .expander import SpectralGraph, certify_expander
from .generators import random_hypergraph
from .matroid import CapTransversalMatroid, edmonds_partition
from .pipeline import DEFAULT_C, construct, run_pipeline
from .universal import GammaPrime, check_witness, gamma_edge_count_bound, is_gamma_prime_edge, materialize_gamma_prime

EXIT_OK, EXIT_INTERNAL, EXIT_PRECONDITION, EXIT_CERT, EXIT_RETRY, EXIT_VERIFY, EXIT_PARSE = 0, 1, 2, 3, 4, 5, 6
VERSION = "1.0"

# column names are part of the output contract
TAIL_COLUMNS = ["K", "empirical_exceedance", "wilson_lo", "wilson_hi", "paper_bound"]
PLOT_TAIL_COLUMNS = ["K", "empirical", "lo", "hi", "bound"]
PLOT_EDGE_COLUMNS = ["n", "m", "copies", "base_edges", "edges", "bound"]


class VerificationFailed(HyperUniverseError):
    pass


# --- io helpers -----------------------------------------------------------------------


def _read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _load(path, loader):
    obj = _read_json(path)
    try:
        return loader(obj)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_json(path, obj):
    if isinstance(obj, dict) and "version" not in obj:
        obj = {"version": VERSION, **obj}
    _write(path, _dump(obj))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{x:.10g}" if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _vertex_list(obj, what="subset"):
    if isinstance(obj, dict):
        obj = obj.get("vertices")
    if not isinstance(obj, list) or not all(isinstance(v, int) for v in obj):
        raise FormatError(f"{what} must be a list of integers or {{'vertices': [...]}}")
    return obj


def _points(obj):
    if isinstance(obj, dict):
        obj = obj.get("points")
    if not isinstance(obj, list) or not all(isinstance(p, list) and all(isinstance(x, int) for x in p) for p in obj):
        raise FormatError("points must be a list of integer lists")
    return [tuple(p) for p in obj]


def _hypergraph(path) -> Hypergraph:
    return _load(path, Hypergraph.from_json)


def _spectral(path) -> SpectralGraph:
    return _load(path, SpectralGraph.from_json)


def _tree(path) -> RootedTree:
    return _load(path, RootedTree.from_json)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _seed(args) -> int:
    env = os.environ.get("HYPERUNIVERSE_SEED")
    if env is not None and env != "":
        try:
            return int(env)
        except ValueError:
            raise ParameterError(f"HYPERUNIVERSE_SEED must be an integer, got {env!r}") from None
    return int(getattr(args, "seed", 0) or 0)


def _ab(args) -> tuple[int, int]:
    if getattr(args, "q", None) is not None:
        return choose_ab(args.r, args.q)
    if args.a is None or args.b is None:
        raise ParameterError("give --q, or both --a and --b")
    return args.a, args.b


def _apply_threads(n):
    if n is None:
        return
    if n < 1:
        raise ParameterError("--threads must be >= 1")
    try:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    except ImportError:
        pass


# --- commands -------------------------------------------------------------------------


def cmd_expander(args):
    seed = _seed(args)
    lam_max = args.lambda_max if args.lambda_max is not None else args.d - 1e-9
    G = certify_expander(args.n, args.d, lam_max, seed, attempts=args.attempts)
    _write_json(args.out, G.to_json())


def cmd_matroid(args):
    H = _hypergraph(args.hypergraph)
    M = CapTransversalMatroid(H, args.b)
    res = edmonds_partition(M, args.k)
    if res is None:
        raise ParameterError(f"no partition into {args.k} independent sets exists")
    parts = [[[M.edge_of(u), u % args.b] for u in sorted(p)] for p in res.parts]
    _write_json(args.out, {"b": args.b, "k": args.k, "parts": parts})


def cmd_decompose(args):
    H = _hypergraph(args.hypergraph)
    if args.action == "verify":
        cert = _load(args.cert, DecompositionCertificate.from_json)
        ok, why = verify_certificate(H, cert)
        _write_json(args.out, {"ok": ok, "reason": why})
        if not ok:
            raise VerificationFailed(why)
        return
    a, b = _ab(args)
    cert = decompose(H, a, b)
    _write_json(args.out, cert.to_json())


def cmd_walk(args):
    seed = _seed(args)
    T = _tree(args.tree)
    if args.action == "encode-roundtrip":
        k_max = args.k
        failures, count = 0, 0
        for k in range(1, min(k_max, T.n) + 1):
            for W in itertools.combinations(range(T.n), k):
                enc = bw.encode(T, W)
                for f in itertools.product((0, 1), repeat=k - 1):
                    count += 1
                    try:
                        ok = bw.decode(T, f, bw.uncoded_part(enc, f), bw.restrict(enc, f)) == frozenset(W)
                    except HyperUniverseError:
                        ok = False
                    failures += not ok
        _write_json(args.out, {"cases": count, "failures": failures})
        if failures:
            raise VerificationFailed(f"{failures} of {count} round trips failed")
        return
    G = _spectral(args.graph)
    if args.action == "sample":
        walk = bw.sample_twalk(T, G, seed)
        _write_json(args.out, {"phi": list(walk.phi), "seed": seed})
        return
    U = _vertex_list(_read_json(args.subset))
    if args.action == "moment-check":
        mc = bw.moment_sum_exact(T, G, U, args.target, args.k)
        _write_json(
            args.out,
            {
                "k": args.k,
                "lhs": str(mc.lhs),
                "lhs_float": float(mc.lhs),
                "rhs": mc.rhs,
                "holds": mc.holds,
                "hypothesis": mc.hypothesis,
            },
        )
        return
    res = bw.tail_experiment(
        T, G, U, args.target, args.trials, seed, K0_overrides=args.k0_override or (), alpha=args.alpha
    )
    _write(args.out, _csv_text(TAIL_COLUMNS, res.csv_rows()))
    if args.summary:
        _write_json(
            args.summary,
            {
                "trials": res.trials,
                "mu": res.mu,
                "mean": res.mean,
                "std_err": res.std_err,
                "kappa": res.kappa,
                "strict_regime": res.strict_regime,
                "decay_rate": res.decay_rate,
                "fitted_K0": res.fitted_K0,
                "K0": res.K0,
            },
        )


def cmd_gamma(args):
    if args.action == "member":
        gp = _load(args.gp, GammaPrime.from_json)
        pts = _points(_read_json(args.points))
        ok, wit = is_gamma_prime_edge(gp, pts)
        out = {"member": ok}
        if ok:
            out["witness"] = {"forests": [[list(e) for e in F] for F in wit.forests], "g": list(wit.g)}
            if not check_witness(gp, pts, wit)[0]:
                raise VerificationFailed("oracle returned an invalid witness")
        _write_json(args.out, out)
        return
    G = _spectral(args.graph)
    if args.explicit:
        gp = materialize_gamma_prime(G.graph, args.a, args.r, args.b, args.loops)
    else:
        gp = GammaPrime(G.graph, args.a, args.r, args.b, args.loops)
    _write_json(args.out, gp.to_json())


def cmd_embed(args):
    H = _hypergraph(args.hypergraph)
    gp = _load(args.gp, GammaPrime.from_json)
    cert = _load(args.cert, DecompositionCertificate.from_json) if args.cert else None
    if args.action == "verify":
        emb = _load(args.emb, EmbeddingResult.from_json)
        ok, report = verify_embedding(H, emb, gp, args.copies, cert)
        _write_json(args.out, report)
        if not ok:
            raise VerificationFailed(report["reason"])
        return
    if cert is None:
        raise ParameterError("embed run needs --cert")
    G = _spectral(args.graph)
    emb = run_embedding(H, cert, G, args.K, args.copies, _seed(args), args.retries, args.padded)
    _write_json(args.out, emb.to_json())


def cmd_pipeline(args):
    seed = _seed(args)
    if args.q <= Fraction(1, args.r - 1):
        raise ParameterError(f"need q > 1/(r-1), got q = {args.q} with r = {args.r}")
    if args.hypergraph:
        H = _hypergraph(args.hypergraph)
        if H.r != args.r:
            raise ParameterError(f"hypergraph has r = {H.r}, expected {args.r}")
    else:
        H = random_hypergraph(args.n, args.r, args.D, seed)
    dens = max_density(H)
    if dens > args.q:
        raise ParameterError(f"m(H) = {dens} exceeds q = {args.q}")
    out = run_pipeline(H, args.q, args.d, seed, args.lambda_max, args.K, args.C, args.retries, args.padded)
    result = {
        "ok": out.ok,
        "report": out.report,
        "hypergraph": H.to_json(),
        "certificate": out.cert.to_json(),
        "graph": out.host.to_json(),
        "embedding": out.embedding.to_json(),
    }
    _write_json(args.out, result)
    if not out.ok:
        raise VerificationFailed(out.report["reason"])


def cmd_emit(args):
    if args.action == "tail":
        rows = []
        if args.input:
            try:
                text = Path(args.input).read_text()
            except OSError as exc:
                raise FormatError(f"{args.input}: {exc.strerror}") from None
            reader = csv.DictReader(io.StringIO(text))
            if reader.fieldnames and reader.fieldnames != TAIL_COLUMNS:
                raise FormatError(f"{args.input}: expected columns {TAIL_COLUMNS}, got {reader.fieldnames}")
            for line, row in enumerate(reader, start=2):
                try:
                    rows.append([float(row[c]) for c in TAIL_COLUMNS])
                except (TypeError, ValueError):
                    raise FormatError(f"{args.input}: line {line}: non-numeric field") from None
        _write(args.out, _csv_text(PLOT_TAIL_COLUMNS, rows))
        return
    rows = []
    for n in sorted(args.ns):
        c = construct(n, args.r, args.q, args.d, args.C, _seed(args))
        rows.append(
            [n, c.m, c.copies, len(c.gamma_prime.edges), c.edge_count(), gamma_edge_count_bound(n, args.r, args.q, 1.0)]
        )
    _write(args.out, _csv_text(PLOT_EDGE_COLUMNS, rows))


# --- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperuniverse", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True, out=True):
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        if out:
            sp.add_argument("--out", default=None, help="output path (default stdout)")

    e = sub.add_parser("expander", help="certified random regular graph")
    e.add_argument("action", choices=["gen"])
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--d", type=int, required=True)
    e.add_argument("--lambda-max", type=float, default=None)
    e.add_argument("--attempts", type=int, default=20)
    common(e)
    e.set_defaults(func=cmd_expander)

    m = sub.add_parser("matroid", help="partition hyperedge copies into independent sets")
    m.add_argument("action", choices=["partition"])
    m.add_argument("--hypergraph", required=True)
    m.add_argument("--b", type=int, required=True)
    m.add_argument("--k", type=int, required=True)
    common(m, seed=False)
    m.set_defaults(func=cmd_matroid)

    d = sub.add_parser("decompose", help="unicyclic decomposition with certificate")
    d.add_argument("action", nargs="?", choices=["run", "verify"], default="run")
    d.add_argument("--hypergraph", required=True)
    d.add_argument("--r", type=int, default=None)
    d.add_argument("--q", type=_fraction, default=None)
    d.add_argument("--a", type=int, default=None)
    d.add_argument("--b", type=int, default=None)
    d.add_argument("--cert", default=None)
    common(d, seed=False)
    d.set_defaults(func=cmd_decompose)

    w = sub.add_parser("walk", help="random tree walks")
    w.add_argument("action", choices=["sample", "tail", "encode-roundtrip", "moment-check"])
    w.add_argument("--tree", required=True)
    w.add_argument("--graph", default=None)
    w.add_argument("--subset", default=None)
    w.add_argument("--target", type=int, default=0)
    w.add_argument("--trials", type=int, default=10**5)
    w.add_argument("--k", type=int, default=2)
    w.add_argument("--k0-override", type=float, action="append")
    w.add_argument("--alpha", type=float, default=bw.DEFAULT_ALPHA)
    w.add_argument("--summary", default=None, help="JSON summary path (tail only)")
    common(w)
    w.set_defaults(func=cmd_walk)

    g = sub.add_parser("gamma", help="base hypergraph on [m]^a")
    g.add_argument("action", choices=["build", "member"])
    g.add_argument("--graph", default=None)
    g.add_argument("--a", type=int, default=None)
    g.add_argument("--r", type=int, default=None)
    g.add_argument("--b", type=int, default=None)
    g.add_argument("--explicit", action="store_true")
    g.add_argument("--loops", action="store_true", help="use the closed square")
    g.add_argument("--gp", default=None)
    g.add_argument("--points", default=None)
    common(g, seed=False)
    g.set_defaults(func=cmd_gamma)

    b = sub.add_parser("embed", help="embed a decomposed hypergraph")
    b.add_argument("action", choices=["run", "verify"])
    b.add_argument("--hypergraph", required=True)
    b.add_argument("--cert", default=None)
    b.add_argument("--graph", default=None)
    b.add_argument("--gp", required=True)
    b.add_argument("--emb", default=None)
    b.add_argument("--K", type=float, default=None)
    b.add_argument("--copies", type=int, required=True)
    b.add_argument("--retries", type=int, default=100)
    b.add_argument("--padded", action="store_true")
    common(b)
    b.set_defaults(func=cmd_embed)

    pl = sub.add_parser("pipeline", help="decompose, build host and base hypergraph, embed, verify")
    pl.add_argument("--r", type=int, required=True)
    pl.add_argument("--q", type=_fraction, required=True)
    pl.add_argument("--n", type=int, default=None)
    pl.add_argument("--D", type=int, default=2)
    pl.add_argument("--d", type=int, default=8)
    pl.add_argument("--hypergraph", default=None)
    pl.add_argument("--lambda-max", type=float, default=None)
    pl.add_argument("--K", type=float, default=None)
    pl.add_argument("--C", type=float, default=DEFAULT_C)
    pl.add_argument("--retries", type=int, default=100)
    pl.add_argument("--padded", action="store_true")
    common(pl)
    pl.set_defaults(func=cmd_pipeline)

    em = sub.add_parser("emit", help="tidy CSV for plotting")
    em.add_argument("action", choices=["tail", "edges"])
    em.add_argument("--input", default=None, help="CSV written by 'walk tail'")
    em.add_argument("--r", type=int, default=3)
    em.add_argument("--q", type=_fraction, default=Fraction(2, 3))
    em.add_argument("--d", type=int, default=8)
    em.add_argument("--C", type=float, default=DEFAULT_C)
    em.add_argument("--ns", type=lambda s: [int(x) for x in s.split(",") if x], default=[16, 32, 64])
    common(em)
    em.set_defaults(func=cmd_emit)
    return p


def _check_args(args):
    cmd = args.command
    if cmd == "pipeline" and args.hypergraph is None and args.n is None:
        raise ParameterError("pipeline needs --n or --hypergraph")
    if cmd == "decompose" and args.action == "verify" and not args.cert:
        raise ParameterError("decompose verify needs --cert")
    if cmd == "decompose" and args.action == "run" and args.q is not None and args.r is None:
        args.r = _hypergraph(args.hypergraph).r
    if cmd == "walk" and args.action != "encode-roundtrip" and not args.graph:
        raise ParameterError("walk needs --graph")
    if cmd == "walk" and args.action in ("tail", "moment-check") and not args.subset:
        raise ParameterError("walk tail/moment-check need --subset")
    if cmd == "gamma" and args.action == "build" and (args.graph is None or None in (args.a, args.r, args.b)):
        raise ParameterError("gamma build needs --graph, --a, --r, --b")
    if cmd == "gamma" and args.action == "member" and (args.gp is None or args.points is None):
        raise ParameterError("gamma member needs --gp and --points")
    if cmd == "embed" and args.action == "run" and (args.graph is None or args.K is None):
        raise ParameterError("embed run needs --graph and --K")
    if cmd == "embed" and args.action == "verify" and args.emb is None:
        raise ParameterError("embed verify needs --emb")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PRECONDITION if exc.code else EXIT_OK
    try:
        _apply_threads(args.threads)
        _check_args(args)
        args.func(args)
    except FormatError as exc:
        return _fail(exc, EXIT_PARSE)
    except ParameterError as exc:
        return _fail(exc, EXIT_PRECONDITION)
    except CertificationError as exc:
        return _fail(exc, EXIT_CERT)
    except (RetryExhaustedError, CapacityError) as exc:
        return _fail(exc, EXIT_RETRY)
    except VerificationFailed as exc:
        return _fail(exc, EXIT_VERIFY)
    except HyperUniverseError as exc:
        return _fail(exc, EXIT_INTERNAL)
    return EXIT_OK


def _fail(exc, code) -> int:
    print(f"hyperuniverse: error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
