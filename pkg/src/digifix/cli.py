"""Command-line front end.

Every run writes exactly one JSON result document (stdout or ``--out``) and
the exit code encodes the verdict class: 0 HOLDS or success, 1 FAILS,
2 INCONCLUSIVE, 3 input error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

from . import __version__
from . import fixsets, homotopy, io, spectra
from .lattice import ImageError, boundary, diameter, is_connected
from .maps import Budget, MapError, Status, is_continuous

EXIT = {Status.HOLDS: 0, Status.FAILS: 1, Status.INCONCLUSIVE: 2}
INPUT_ERROR = 3
DEFAULT_NODES = 10**7
VERBS = ("info", "continuity", "rigidity", "reducible", "contractible", "spectrum",
         "freezing", "cold", "minimal", "minimum", "generate", "batch")


class InputError(Exception):
    pass


def _json_arg(value: Any, base: Path | None = None) -> Any:
    """Inline JSON text, a path to a JSON file, or an already parsed value."""
    if not isinstance(value, str):
        return value
    text = value.strip()
    if text[:1] in "{[" or text.lstrip("-").isdigit():
        return io.loads(text, "<inline>")
    path = Path(value)
    if base is not None and not path.is_absolute():
        path = base / path
    return io.load_file(str(path))


def default_budget() -> dict:
    env_nodes = os.environ.get("DIGIFIX_BUDGET_NODES")
    env_secs = os.environ.get("DIGIFIX_BUDGET_SECONDS")
    try:
        nodes = int(env_nodes) if env_nodes else DEFAULT_NODES
        secs = float(env_secs) if env_secs else None
    except ValueError:
        raise InputError("DIGIFIX_BUDGET_NODES / DIGIFIX_BUDGET_SECONDS must be numbers") from None
    return {"nodes": nodes, "seconds": secs}


def _point(value, X) -> int | None:
    if value is None:
        return None
    if isinstance(value, str):
        value = io.loads(value, "--point")
    if isinstance(value, list):
        try:
            return X.index_of(tuple(value))
        except (KeyError, ImageError):
            raise InputError(f"point {value} is not in the image") from None
    i = int(value)
    if not 0 <= i < len(X):
        raise InputError(f"point index {i} is outside the image")
    return i


def _need(q: dict, key: str):
    if q.get(key) is None:
        raise InputError(f"verb {q['verb']!r} needs --{key.replace('_', '-')}")
    return q[key]


def _verdict_doc(v) -> dict:
    d = io.verdict_to_json(v)
    d.pop("format")
    return d


def run_query(q: dict, base: Path | None = None) -> tuple[int, dict]:
    """Execute one query and return (exit code, result document)."""
    verb = q.get("verb")
    doc: dict = {"format": io.FORMAT, "tool": "digifix", "version": __version__, "verb": verb}
    t0 = time.perf_counter()
    try:
        code, body = _dispatch(q, base)
    except (InputError, io.DocumentError, ImageError, MapError, fixsets.HypothesisError) as e:
        doc.update(status="ERROR", error=str(e))
        return INPUT_ERROR, doc
    doc.update(body)
    if q.get("timing"):
        doc["timing"] = {"seconds": round(time.perf_counter() - t0, 6)}
    return code, doc


def _dispatch(q: dict, base: Path | None) -> tuple[int, dict]:
    verb = q.get("verb")
    if verb not in VERBS or verb == "batch":
        raise InputError(f"unknown verb {verb!r}")
    if verb == "generate":
        X = io.generate(_json_arg(_need(q, "family"), base))
        return 0, {"status": "OK", "image": io.image_to_json(X)}

    X = io.image_from_json(_json_arg(_need(q, "image"), base))
    b = dict(default_budget())
    b.update({k: v for k, v in (q.get("budget") or {}).items() if v is not None})
    budget = Budget(max_nodes=b.get("nodes"), max_seconds=b.get("seconds"))
    echo = {"image": io.image_to_json(X), "budget": {"nodes": b.get("nodes"), "seconds": b.get("seconds")}}
    x0 = _point(q.get("point"), X)
    if x0 is not None:
        echo["point"] = x0
    A = None
    if q.get("candidate") is not None:
        A = io.candidate_from_json(_json_arg(q["candidate"], base), X)
        echo["candidate"] = sorted(A)
    f = None
    if q.get("map") is not None:
        f = io.map_from_json(_json_arg(q["map"], base), X)
        echo["map"] = list(f.assignment)
    out: dict = {"query": echo}

    if verb == "info":
        info = {"points": len(X), "dim": X.dim, "edges": len(X.edges), "connected": is_connected(X),
                "reduction_points": sorted(homotopy.reduction_points_fast(X))}
        if info["connected"]:
            info["diameter"] = diameter(X)
        if X.is_lattice:
            info["boundary"] = sorted(boundary(X))
        out.update(status="OK", info=info)
        return 0, out

    if verb == "continuity":
        if f is None:
            raise InputError("verb 'continuity' needs --map")
        ok = is_continuous(f)
        bad = [[a, b] for a, b in X.edges if not X.adjacent_or_equal(f(a), f(b))]
        out.update(status="HOLDS" if ok else "FAILS", witness=None,
                   certificate={"broken_edges": bad}, stats={"nodes": 0, "maps": 0})
        return (0 if ok else 1), out

    if verb == "spectrum":
        mode = q.get("mode") or "full"
        out["query"]["mode"] = mode
        if f is not None:
            sp = spectra.homotopy_spectrum(f, x0, budget)
        elif x0 is not None:
            sp = spectra.pointed_fixed_point_spectrum(X, x0, budget, mode, int(q.get("threads") or 1))
        else:
            sp = spectra.fixed_point_spectrum(X, budget, mode, int(q.get("threads") or 1))
        out.update(status="HOLDS" if sp.complete else "INCONCLUSIVE", spectrum=sp.sorted(),
                   complete=sp.complete, mode=sp.mode, stats=sp.stats.to_dict(),
                   certificate={"realizing_maps": {str(k): list(sp.witnesses[k]) for k in sp.sorted()}})
        return (0 if sp.complete else 2), out

    if verb == "minimum":
        m = fixsets.find_minimum_freezing(X, budget)
        out.update(status="HOLDS" if m.complete else "INCONCLUSIVE", size=m.size,
                   example=None if m.example is None else sorted(m.example),
                   bounds={"lower": m.lower, "upper": m.upper}, stats=m.stats.to_dict(),
                   certificate={"subsets_tested": m.tested})
        return (0 if m.complete else 2), out

    if verb == "rigidity":
        v = homotopy.is_rigid(X, budget) if x0 is None else homotopy.is_pointed_rigid(X, x0, budget)
    elif verb == "reducible":
        v = homotopy.is_reducible(X, budget)
    elif verb == "contractible":
        v = homotopy.is_contractible(X, budget)
    elif verb == "freezing":
        v = fixsets.verify_freezing(X, _need({**q, "candidate": A}, "candidate"), budget)
    elif verb == "cold":
        s = q.get("s")
        if s is None:
            raise InputError("verb 'cold' needs --s")
        out["query"]["s"] = int(s)
        pin = bool(q.get("pin_interior"))
        v = fixsets.verify_cold(X, _need({**q, "candidate": A}, "candidate"), int(s), budget,
                                assume_interior_fixed=pin)
    else:  # minimal
        v = fixsets.is_minimal_freezing(X, _need({**q, "candidate": A}, "candidate"), budget)
    out.update(_verdict_doc(v))
    return EXIT[v.status], out


# --------------------------------------------------------------------------
# batch


def _batch_worker(args):
    q, base = args
    return run_query(q, base)


def run_batch(manifest_path: str, threads: int = 1) -> tuple[int, dict]:
    """Run every query of a manifest and compare against expected verdicts.

    A manifest is ``{"format": 1, "budget": {...}, "queries": [...]}``; each
    query holds the same keys as the command-line flags plus ``name`` and
    ``expect``. A budget is required, either manifest-wide or per query.
    """
    doc: dict = {"format": io.FORMAT, "tool": "digifix", "version": __version__, "verb": "batch"}
    try:
        manifest = io.load_file(manifest_path)
        if not isinstance(manifest, dict) or not isinstance(manifest.get("queries", []), list):
            raise InputError("manifest must be an object with a 'queries' array")
        queries = manifest.get("queries", [])
        shared = manifest.get("budget")
        for i, q in enumerate(queries):
            if not isinstance(q, dict) or "verb" not in q:
                raise InputError(f"query {i} needs a 'verb'")
            if q["verb"] != "generate" and not (q.get("budget") or shared):
                raise InputError(f"query {q.get('name', i)!r} has no budget and the manifest sets none")
    except (InputError, io.DocumentError) as e:
        doc.update(status="ERROR", error=str(e))
        return INPUT_ERROR, doc

    base = Path(manifest_path).resolve().parent
    jobs = [({**q, "budget": q.get("budget") or shared}, base) for q in queries]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(threads) as pool:
            results = list(pool.map(_batch_worker, jobs))
    else:
        results = [_batch_worker(j) for j in jobs]

    summary, mismatched = [], []
    for i, (q, (code, res)) in enumerate(zip(queries, results)):
        name = q.get("name", f"query-{i}")
        expect = q.get("expect")
        ok = expect is None or expect == res.get("status")
        if ok and "expect_spectrum" in q:
            ok = sorted(q["expect_spectrum"]) == res.get("spectrum")
        summary.append({"name": name, "verb": q["verb"], "expected": expect,
                        "status": res.get("status"), "match": ok})
        if not ok:
            mismatched.append(name)
    doc.update(status="OK" if not mismatched else "MISMATCH", summary=summary,
               mismatched=mismatched, results=[r for _, r in results])
    return (1 if mismatched else 0), doc


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="digifix", description="Fixed point invariants of finite digital images.")
    ap.add_argument("verb", choices=VERBS)
    ap.add_argument("manifest", nargs="?", help="manifest file for the batch verb")
    ap.add_argument("--image", help="image JSON file, inline JSON, or family descriptor")
    ap.add_argument("--family", help="family descriptor for generate")
    ap.add_argument("--candidate", help="candidate set: index array or {\"points\": [...]}")
    ap.add_argument("--map", help="map document {\"assignment\": [...]}")
    ap.add_argument("--s", type=int, help="distance bound for the cold verb")
    ap.add_argument("--point", help="basepoint as an index or a coordinate array")
    ap.add_argument("--budget-nodes", type=int)
    ap.add_argument("--budget-seconds", type=float)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--mode", choices=("full", "targeted"), default="full")
    ap.add_argument("--pin-interior", action="store_true",
                    help="pin Int(X) when the c_2 rectangle hypotheses hold (cold verb)")
    ap.add_argument("--timing", action="store_true", help="add wall-clock timing to the result")
    ap.add_argument("--out", help="write the result document here instead of stdout")
    return ap


def _emit(doc: dict, out: str | None) -> None:
    text = io.dumps(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "batch":
        if not args.manifest:
            code, doc = INPUT_ERROR, {"format": io.FORMAT, "verb": "batch", "status": "ERROR",
                                      "error": "batch needs a manifest path"}
        else:
            code, doc = run_batch(args.manifest, args.threads)
        for name in doc.get("mismatched", []):
            print(f"unexpected verdict for query {name!r}", file=sys.stderr)
    else:
        q = {"verb": args.verb, "image": args.image, "family": args.family, "candidate": args.candidate,
             "map": args.map, "s": args.s, "point": args.point, "mode": args.mode,
             "threads": args.threads, "pin_interior": args.pin_interior, "timing": args.timing,
             "budget": {"nodes": args.budget_nodes, "seconds": args.budget_seconds}}
        code, doc = run_query(q)
    if doc.get("status") == "ERROR":
        print(f"digifix: {doc['error']}", file=sys.stderr)
    _emit(doc, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
