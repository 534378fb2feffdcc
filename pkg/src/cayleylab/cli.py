"""Batch front door: one subcommand per experiment, deterministic end to end.

Reproducibility contract: a report is a pure function of (config, seed,
thread_count); no timestamps, no machine state.  Per-task random streams are
derived from the master seed by a counter-based split,
``SeedSequence(seed, spawn_key=(stream,))`` feeding a Philox generator, so
task i sees the same stream no matter how many tasks run or in what order.
Exit codes: 0 success, 2 when a verdict-level invariant fails (an assertion
or certificate violation), 1 for usage errors.
"""

import argparse
import csv
import json
import math
import os
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import combinat, groups, nonconc, pingpong, spectral, sz, walk
from .errors import CayleyLabError, InclusionFailedError

_FAMILIES = ("sl2", "sl3", "sp4", "su3", "cyclic")


def package_version():
    """git describe when run from a checkout, else the installed version."""
    root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=root, capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    try:
        from importlib.metadata import version
        return version("cayleylab")
    except Exception:
        return "unknown"


def task_rng(seed, stream):
    """Philox stream ``stream`` of the master seed (counter-based split)."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(stream),)))
    )


def _run_tasks(fn, tasks, threads):
    """Map fn over tasks, optionally on a thread pool; order is preserved."""
    if threads <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, tasks))


def _factor_prime_power(q):
    q = int(q)
    if q < 2:
        raise ValueError("q must be a prime power >= 2")
    p = 2
    while p * p <= q:
        if q % p == 0:
            break
        p += 1
    else:
        p = q
    k = 0
    t = q
    while t % p == 0:
        t //= p
        k += 1
    if t != 1:
        raise ValueError("q = %d is not a prime power" % q)
    return p, k


def make_ctx(family, q=None, n=None):
    family = family.lower()
    if family == "cyclic":
        if n is None:
            raise ValueError("cyclic needs --n")
        return groups.make_cyclic(int(n))
    if q is None:
        raise ValueError("matrix families need --q")
    p, k = _factor_prime_power(q)
    if family == "sl2":
        return groups.make_sl(2, p, k)
    if family == "sl3":
        return groups.make_sl(3, p, k)
    if family == "sp4":
        return groups.make_sp4(p, k)
    if family == "su3":
        if k % 2:
            raise ValueError("su3 entries live in a quadratic extension; --q must be a square")
        return groups.make_su3(p, k)
    raise ValueError("unknown family %r (choose from %s)" % (family, ", ".join(_FAMILIES)))


def default_gens(ctx, rng):
    """Symmetric generator list: +-1 for a cycle, a random pair with inverses else."""
    if ctx.family == "Cyclic":
        one = groups.element_at(ctx, 1 % ctx.n)
        return [one, groups.inv(one)]
    a, b = groups.random_pair(ctx, rng)
    return [a, groups.inv(a), b, groups.inv(b)]


# ---------------------------------------------------------------------------
# config plumbing


def _load_config(path):
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    return cfg


def merge_config(defaults, args):
    """defaults < config file < explicit flags."""
    cfg = dict(defaults)
    cfg["thread_count"] = int(os.environ.get("CAYLEYLAB_THREADS", "1"))
    if getattr(args, "config", None):
        file_cfg = _load_config(args.config)
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise ValueError("unknown config keys: %s" % ", ".join(sorted(unknown)))
        cfg.update(file_cfg)
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if getattr(args, "threads", None) is not None:
        cfg["thread_count"] = int(args.threads)
    return cfg


def _report(command, cfg, payload):
    return {
        "command": command,
        "config": cfg,
        "seed": cfg.get("seed"),
        "version": package_version(),
        **payload,
    }


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _outdir(cfg):
    d = cfg.get("output_dir") or "."
    os.makedirs(d, exist_ok=True)
    return d


def _parse_int_list(s):
    return [int(tok) for tok in str(s).split(",") if tok.strip()]


# ---------------------------------------------------------------------------
# minimal SVG emitter (polyline + axes; no plotting dependency)

_SVG_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def svg_polyline(series, path, title="", xlabel="", ylabel="", logy=False,
                 width=640, height=400):
    """Write a static plot of one or more (label, xs, ys) series."""
    ml, mr, mt, mb = 60, 20, 30, 45
    pw, ph = width - ml - mr, height - mt - mb
    pts = []
    for _, xs, ys in series:
        for x, y in zip(xs, ys):
            y = math.log10(y) if logy else y
            if math.isfinite(x) and math.isfinite(y):
                pts.append((x, y))
    if not pts:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    x0 = min(p[0] for p in pts); x1 = max(p[0] for p in pts)
    y0 = min(p[1] for p in pts); y1 = max(p[1] for p in pts)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return mt + ph - (y - y0) / (y1 - y0) * ph

    out = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
           'font-family="sans-serif" font-size="11">' % (width, height)]
    out.append('<rect width="%d" height="%d" fill="white"/>' % (width, height))
    if title:
        out.append('<text x="%d" y="18" text-anchor="middle" font-size="13">%s</text>'
                   % (width // 2, title))
    out.append('<line x1="%g" y1="%g" x2="%g" y2="%g" stroke="black"/>'
               % (ml, mt + ph, ml + pw, mt + ph))
    out.append('<line x1="%g" y1="%g" x2="%g" y2="%g" stroke="black"/>'
               % (ml, mt, ml, mt + ph))
    for i in range(5):
        xv = x0 + i * (x1 - x0) / 4
        yv = y0 + i * (y1 - y0) / 4
        out.append('<text x="%g" y="%g" text-anchor="middle">%.4g</text>'
                   % (sx(xv), mt + ph + 16, xv))
        lab = "1e%.2g" % yv if logy else "%.4g" % yv
        out.append('<text x="%g" y="%g" text-anchor="end">%s</text>'
                   % (ml - 6, sy(yv) + 4, lab))
        out.append('<line x1="%g" y1="%g" x2="%g" y2="%g" stroke="#ddd"/>'
                   % (ml, sy(yv), ml + pw, sy(yv)))
    if xlabel:
        out.append('<text x="%d" y="%d" text-anchor="middle">%s</text>'
                   % (ml + pw // 2, height - 8, xlabel))
    if ylabel:
        out.append('<text x="14" y="%d" text-anchor="middle" transform="rotate(-90 14 %d)">%s</text>'
                   % (mt + ph // 2, mt + ph // 2, ylabel))
    for ci, (label, xs, ys) in enumerate(series):
        col = _SVG_COLORS[ci % len(_SVG_COLORS)]
        coords = []
        for x, y in zip(xs, ys):
            y = math.log10(y) if logy else y
            if math.isfinite(x) and math.isfinite(y):
                coords.append("%g,%g" % (sx(x), sy(y)))
        if coords:
            out.append('<polyline points="%s" fill="none" stroke="%s" stroke-width="1.5"/>'
                       % (" ".join(coords), col))
        if label:
            out.append('<text x="%g" y="%g" fill="%s">%s</text>'
                       % (ml + pw - 120, mt + 14 + 14 * ci, col, label))
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_group_info(args):
    cfg = merge_config(
        {"family": None, "q": None, "n": None, "output_dir": None, "seed": 0}, args
    )
    ctx = make_ctx(cfg["family"], cfg["q"], cfg["n"])
    info = {
        "family": ctx.family,
        "order": ctx.order,
    }
    if ctx.family == "Cyclic":
        info["n"] = ctx.n
    else:
        info["m"] = ctx.m
        info["field"] = {"p": ctx.field.p, "k": ctx.field.k, "q": ctx.field.q}
        if ctx.family == "SU3":
            info["q_twisted"] = ctx.qt
    report = _report("group-info", cfg, info)
    print(json.dumps(report, indent=2, sort_keys=True))
    if cfg["output_dir"]:
        _write_json(report, os.path.join(_outdir(cfg), "group_info.json"))
    return 0


def cmd_spectral_sweep(args):
    cfg = merge_config(
        {
            "family": "sl2", "q": None, "n": None, "seed": 0, "n_seeds": 5,
            "tol": 1e-8, "max_iter": None, "output_dir": ".",
        },
        args,
    )
    sizes = _parse_int_list(cfg["n"] if cfg["family"] == "cyclic" else cfg["q"])
    tasks = list(enumerate(
        (size, s) for size in sizes for s in range(int(cfg["n_seeds"]))
    ))

    def one(task):
        stream, (size, s) = task
        rng = task_rng(cfg["seed"], stream)
        if cfg["family"] == "cyclic":
            ctx = make_ctx("cyclic", n=size)
        else:
            ctx = make_ctx(cfg["family"], q=size)
        gens = default_gens(ctx, rng)
        rep = spectral.spectral_norm_meanzero(
            ctx, gens, tol=cfg["tol"], max_iter=cfg["max_iter"], rng=rng
        )
        bip = spectral.bipartite_detect(ctx, gens)
        return {
            "p": size, "seed": s, "lambda_abs": rep.lambda_abs,
            "epsilon": rep.epsilon, "iterations": rep.iterations,
            "lambda_signed_min": rep.lambda_signed_min,
            "converged": rep.converged, "bipartite": bool(bip),
        }

    rows = _run_tasks(one, tasks, cfg["thread_count"])
    outdir = _outdir(cfg)
    csv_path = os.path.join(outdir, "spectral_sweep.csv")
    spectral.write_sweep_csv(rows, csv_path)
    med = {
        size: float(np.median([r["epsilon"] for r in rows if r["p"] == size]))
        for size in sizes
    }
    svg_path = os.path.join(outdir, "spectral_sweep.svg")
    svg_polyline(
        [("median epsilon", sizes, [med[s] for s in sizes])],
        svg_path, title="spectral gap sweep", xlabel="size", ylabel="epsilon",
    )
    report = _report("spectral-sweep", cfg, {
        "rows": rows,
        "median_epsilon": {str(k): v for k, v in med.items()},
        "csv": csv_path, "svg": svg_path,
    })
    _write_json(report, os.path.join(outdir, "spectral_sweep.json"))
    print(json.dumps({k: report[k] for k in ("command", "median_epsilon", "csv")},
                     indent=2, sort_keys=True))
    return 0


def cmd_walk_trace(args):
    cfg = merge_config(
        {
            "family": "sl2", "q": None, "n": None, "seed": 0, "kappa": 0.4,
            "n_max": 400, "output_dir": ".",
        },
        args,
    )
    ctx = make_ctx(cfg["family"], cfg["q"], cfg["n"])
    rng = task_rng(cfg["seed"], 0)
    gens = default_gens(ctx, rng)
    rep = walk.phase_trace(ctx, gens, cfg["kappa"], int(cfg["n_max"]))
    outdir = _outdir(cfg)
    csv_path = os.path.join(outdir, "walk_trace.csv")
    rep.to_csv(csv_path)
    ns = [r[0] for r in rep.trajectory]
    svg_path = os.path.join(outdir, "walk_trace.svg")
    svg_polyline(
        [
            ("l2 norm", ns, [r[1] for r in rep.trajectory]),
            ("sup distance", ns, [max(r[2], 1e-16) for r in rep.trajectory]),
        ],
        svg_path, title="random walk trace (|G| = %d)" % ctx.order,
        xlabel="step", ylabel="log10 value", logy=True,
    )
    payload = rep.as_dict()
    payload.update({"csv": csv_path, "svg": svg_path})
    report = _report("walk-trace", cfg, payload)
    _write_json(report, os.path.join(outdir, "walk_trace.json"))
    print(json.dumps({"hits": payload["hits"], "unreached": payload["unreached"],
                      "csv": csv_path}, indent=2, sort_keys=True))
    return 0


def cmd_nonconc(args):
    cfg = merge_config(
        {
            "family": "sl2", "q": None, "n": None, "seed": 0, "n_pairs": 5,
            "gamma": nonconc.DEFAULT_GAMMA, "samples": nonconc.DEFAULT_SAMPLES,
            "word_len_factor": 2.0, "word_len": None, "output_dir": ".",
        },
        args,
    )
    ctx = make_ctx(cfg["family"], cfg["q"], cfg["n"])

    def one(i):
        rng = task_rng(cfg["seed"], i)
        a, b = groups.random_pair(ctx, rng)
        reports = nonconc.nonconc_verdict(
            a, b, n=cfg["word_len"], gamma=cfg["gamma"],
            samples=int(cfg["samples"]), rng=rng, c0=cfg["word_len_factor"],
        )
        return {"pair": i, "reports": reports}

    results = _run_tasks(one, list(range(int(cfg["n_pairs"]))), cfg["thread_count"])
    outdir = _outdir(cfg)
    flat = [r for res in results for r in res["reports"]]
    csv_path = os.path.join(outdir, "nonconc_traps.csv")
    nonconc.write_trap_csv(flat, csv_path)
    payload = {
        "pairs": [
            {"pair": res["pair"],
             "reports": [r.as_dict() for r in res["reports"]],
             "all_pass": all(r.verdict for r in res["reports"])}
            for res in results
        ],
        "csv": csv_path,
    }
    payload["pass_fraction"] = (
        sum(p["all_pass"] for p in payload["pairs"]) / max(len(results), 1)
    )
    report = _report("nonconc", cfg, payload)
    _write_json(report, os.path.join(outdir, "nonconc.json"))
    print(json.dumps({"pass_fraction": payload["pass_fraction"], "csv": csv_path},
                     indent=2, sort_keys=True))
    return 0


def cmd_sz_audit(args):
    cfg = merge_config(
        {
            "n_polys": 1000, "seed": 0, "corpus": None, "save_corpus": None,
            "family": None, "q": None, "n_group_polys": 20, "output_dir": ".",
        },
        args,
    )
    outdir = _outdir(cfg)
    if cfg["corpus"]:
        polys = sz.load_corpus(cfg["corpus"])
    else:
        polys = sz.fuzz_corpus(int(cfg["n_polys"]), seed=cfg["seed"])
    if cfg["save_corpus"]:
        sz.save_corpus(polys, cfg["save_corpus"])
    csv_path = os.path.join(outdir, "sz_audit.csv")
    rows = sz.affine_audit(polys, csv_path)
    finite = [r["ratio"] for r in rows if math.isfinite(r["ratio"])]
    payload = {
        "n_polys": len(rows),
        "max_ratio": max(finite) if finite else 0.0,
        "identically_zero": sum(1 for r in rows if not math.isfinite(r["ratio"])),
        "csv": csv_path,
    }
    if cfg["family"] and cfg["family"] != "cyclic":
        group_rows = []
        for gi, qv in enumerate(_parse_int_list(cfg["q"])):
            ctx = make_ctx(cfg["family"], q=qv)
            rng = task_rng(cfg["seed"], 1000 + gi)
            nv = ctx.m * ctx.m
            for pi in range(int(cfg["n_group_polys"])):
                terms = {}
                for _ in range(int(rng.integers(1, 4))):
                    e = tuple(int(x) for x in rng.integers(0, 2, size=nv))
                    terms[e] = int(rng.integers(1, ctx.field.q))
                rep = sz.zero_count_group(sz.Poly(ctx.field, nv, terms), ctx)
                group_rows.append({
                    "q": qv, "poly": pi, "count": rep["count"],
                    "ratio": rep["ratio"] if math.isfinite(rep["ratio"]) else None,
                    "identically_zero": rep["identically_zero"],
                })
        payload["group_rows"] = group_rows
        finite_g = [r["ratio"] for r in group_rows
                    if r["ratio"] is not None and not r["identically_zero"]]
        payload["group_max_ratio"] = max(finite_g) if finite_g else 0.0
    report = _report("sz-audit", cfg, payload)
    _write_json(report, os.path.join(outdir, "sz_audit.json"))
    print(json.dumps({k: payload[k] for k in ("n_polys", "max_ratio", "csv")},
                     indent=2, sort_keys=True))
    return 0


def cmd_bsg_audit(args):
    cfg = merge_config(
        {
            "family": "sl2", "q": None, "n": None, "seed": 0, "n_sets": 100,
            "set_size": 24, "output_dir": ".",
        },
        args,
    )
    ctx = make_ctx(cfg["family"], cfg["q"], cfg["n"])
    rows = []
    for i in range(int(cfg["n_sets"])):
        rng = task_rng(cfg["seed"], i)
        size = int(rng.integers(2, int(cfg["set_size"]) + 1))
        idx = rng.choice(ctx.order, size=size, replace=False)
        A = combinat.ElemSet.from_indices(ctx, np.sort(idx.astype(np.int64)))
        AA = combinat.product_set(A, A)
        E = combinat.multiplicative_energy(A)
        assert E * len(AA) >= len(A) ** 4, "energy lower bound violated"
        rows.append({
            "set_id": i, "size": len(A), "product_size": len(AA),
            "energy": E, "tripling": combinat.tripling(A),
            "K": combinat.approx_K(A),
        })
    sub_rows = []
    for i in range(5):
        rng = task_rng(cfg["seed"], 10_000 + i)
        g = groups.random_uniform(ctx, rng)
        H = combinat.ElemSet(ctx, groups.generate_subgroup(ctx, [g]))
        E = combinat.multiplicative_energy(H)
        tri = combinat.tripling(H)
        assert E == len(H) ** 3 and tri == 1.0, "subgroup identities failed"
        sub_rows.append({"subgroup": i, "size": len(H), "energy": E, "tripling": tri})
    outdir = _outdir(cfg)
    csv_path = os.path.join(outdir, "bsg_audit.csv")
    with open(csv_path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=[
            "set_id", "size", "product_size", "energy", "tripling", "K"])
        w.writeheader()
        w.writerows(rows)
    payload = {
        "rows": rows, "subgroups": sub_rows, "csv": csv_path,
        "max_tripling": max(r["tripling"] for r in rows),
    }
    report = _report("bsg-audit", cfg, payload)
    _write_json(report, os.path.join(outdir, "bsg_audit.json"))
    print(json.dumps({"n_sets": len(rows), "max_tripling": payload["max_tripling"],
                      "csv": csv_path}, indent=2, sort_keys=True))
    return 0


def cmd_pingpong_cert(args):
    cfg = merge_config(
        {
            "L": 100, "max_len": 8, "word_len": 8, "trials": 100, "seed": 0,
            "output_dir": ".",
        },
        args,
    )
    a, b = pingpong.build_pair(int(cfg["L"]))
    inc = pingpong.verify_inclusions(a, b, int(cfg["L"]), pingpong.DEFAULT_H,
                                     raise_on_failure=True)
    fr = pingpong.freeness_certificate(a, b, int(cfg["max_len"]))
    rng = task_rng(cfg["seed"], 0)
    lc = pingpong.locally_commutative_check(
        a, b, int(cfg["word_len"]), int(cfg["trials"]), rng
    )
    assert fr.all_nontrivial and lc.all_pass, "certificate failed"
    cert = json.loads(pingpong.certificate_json(fr, lc))
    payload = dict(cert)
    payload["inclusions_checked"] = inc.checked
    report = _report("pingpong-cert", cfg, payload)
    outdir = _outdir(cfg)
    _write_json(report, os.path.join(outdir, "pingpong_cert.json"))
    print(json.dumps(cert, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage problems exit 1 (2 is reserved for verdict failures)
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        raise SystemExit(1)


def _add_common(sp):
    sp.add_argument("--config", help="JSON file with defaults (flags override)")
    sp.add_argument("--seed", type=int, help="master seed (default 0)")
    sp.add_argument("--output-dir", dest="output_dir", help="directory for reports")
    sp.add_argument("--threads", type=int,
                    help="task-level threads (default: CAYLEYLAB_THREADS or 1)")


def _add_group_flags(sp):
    sp.add_argument("--family", choices=_FAMILIES, help="group family")
    sp.add_argument("--q", help="field size (prime power; comma list where a sweep applies)")
    sp.add_argument("--n", help="cycle length for --family cyclic")


def build_parser():
    ap = _Parser(prog="cayleylab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd")

    sp = sub.add_parser("group-info", parents=[], help="order and parameters of a group")
    _add_group_flags(sp); _add_common(sp)

    sp = sub.add_parser("spectral-sweep", help="spectral gap across sizes and seeds")
    _add_group_flags(sp); _add_common(sp)
    sp.add_argument("--n-seeds", dest="n_seeds", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--max-iter", dest="max_iter", type=int)

    sp = sub.add_parser("walk-trace", help="convolution walk with phase thresholds")
    _add_group_flags(sp); _add_common(sp)
    sp.add_argument("--kappa", type=float)
    sp.add_argument("--n-max", dest="n_max", type=int)

    sp = sub.add_parser("nonconc", help="trap battery on random pairs")
    _add_group_flags(sp); _add_common(sp)
    sp.add_argument("--n-pairs", dest="n_pairs", type=int)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--word-len-factor", dest="word_len_factor", type=float)
    sp.add_argument("--word-len", dest="word_len", type=int)

    sp = sub.add_parser("sz-audit", help="zero-count audit over a polynomial corpus")
    _add_common(sp)
    sp.add_argument("--n-polys", dest="n_polys", type=int)
    sp.add_argument("--corpus", help="load polynomials from this JSON file")
    sp.add_argument("--save-corpus", dest="save_corpus", help="write the corpus JSON here")
    sp.add_argument("--family", choices=_FAMILIES, help="optional group-ratio section")
    sp.add_argument("--q", help="group sizes for the ratio section (comma list)")
    sp.add_argument("--n-group-polys", dest="n_group_polys", type=int)

    sp = sub.add_parser("bsg-audit", help="product sets, energy, tripling, covering")
    _add_group_flags(sp); _add_common(sp)
    sp.add_argument("--n-sets", dest="n_sets", type=int)
    sp.add_argument("--set-size", dest="set_size", type=int)

    sp = sub.add_parser("pingpong-cert", help="exact freeness certificate")
    _add_common(sp)
    sp.add_argument("--L", type=int)
    sp.add_argument("--max-len", dest="max_len", type=int)
    sp.add_argument("--word-len", dest="word_len", type=int)
    sp.add_argument("--trials", type=int)

    return ap


_DISPATCH = {
    "group-info": cmd_group_info,
    "spectral-sweep": cmd_spectral_sweep,
    "walk-trace": cmd_walk_trace,
    "nonconc": cmd_nonconc,
    "sz-audit": cmd_sz_audit,
    "bsg-audit": cmd_bsg_audit,
    "pingpong-cert": cmd_pingpong_cert,
}


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if not args.cmd:
        ap.print_help(sys.stderr)
        return 1
    try:
        return _DISPATCH[args.cmd](args)
    except (AssertionError, InclusionFailedError) as e:
        print("verdict failure: %s" % e, file=sys.stderr)
        return 2
    except (CayleyLabError, ValueError, OSError, json.JSONDecodeError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
