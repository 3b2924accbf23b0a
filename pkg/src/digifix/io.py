"""JSON documents for images, maps, verdicts and family descriptors.

Every document carries ``"format": 1``. Indices always refer to the
canonical point order of the image they belong to.
"""

from __future__ import annotations

import json
import math
from typing import Any

from . import lattice as L
from .lattice import CU, NPU, DigitalImage, Explicit, ImageError
from .maps import PointMap, SearchStats, Status, Verdict

FORMAT = 1


class DocumentError(ValueError):
    """A JSON document is malformed or does not describe a valid object."""


def loads(text: str, source: str = "<input>") -> Any:
    """json.loads with line/column information in the error message."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{source}: malformed JSON at line {e.lineno} column {e.colno} "
                            f"(char {e.pos}): {e.msg}") from None


def load_file(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e.strerror}") from None
    return loads(text, path)


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _check_format(doc: dict) -> None:
    fmt = doc.get("format", FORMAT)
    if fmt != FORMAT:
        raise DocumentError(f"unsupported format version {fmt!r}")


# --------------------------------------------------------------------------
# adjacency and images


def adjacency_to_json(spec) -> dict:
    if isinstance(spec, CU):
        return {"type": "cu", "u": spec.u}
    if isinstance(spec, NPU):
        return {"type": "npu", "u": spec.u,
                "components": [{"dim": d, "adjacency": adjacency_to_json(s)} for d, s in spec.components]}
    if isinstance(spec, Explicit):
        out = {"type": "explicit", "edges": [list(e) for e in sorted(spec.edges)]}
        if spec.points is not None:
            out["points"] = [list(p) for p in spec.points]
        return out
    raise DocumentError(f"unknown adjacency {spec!r}")


def adjacency_from_json(doc: Any):
    if not isinstance(doc, dict) or "type" not in doc:
        raise DocumentError("adjacency must be an object with a 'type'")
    kind = doc["type"]
    try:
        if kind == "cu":
            return CU(int(doc["u"]))
        if kind == "npu":
            comps = tuple((int(c["dim"]), adjacency_from_json(c["adjacency"])) for c in doc["components"])
            return NPU(int(doc["u"]), comps)
        if kind == "explicit":
            return L.explicit(doc["edges"], doc.get("points"))
    except (KeyError, TypeError) as e:
        raise DocumentError(f"bad {kind} adjacency: missing or invalid {e}") from None
    raise DocumentError(f"unknown adjacency type {kind!r}")


def image_to_json(X: DigitalImage) -> dict:
    return {"format": FORMAT, "dim": X.dim, "points": [list(p) for p in X.points],
            "adjacency": adjacency_to_json(X.adjacency)}


def _product_factors(X: DigitalImage):
    """Rebuild factor images of a full NP_u product, or None."""
    factors, start = [], 0
    for d, spec in X.adjacency.components:
        block = sorted({p[start:start + d] for p in X.points})
        if isinstance(spec, Explicit):
            if spec.points is None:
                return None
            block = list(spec.points)
            factors.append(L.make_image(block, Explicit(spec.edges), dim=d))
        else:
            factors.append(L.make_image(block, spec, dim=d))
        start += d
    if math.prod(len(F) for F in factors) != len(X):
        return None
    return tuple(factors)


def image_from_json(doc: Any) -> DigitalImage:
    if not isinstance(doc, dict):
        raise DocumentError("image must be a JSON object")
    if "family" in doc:
        return generate(doc)
    if "points" not in doc and isinstance(doc.get("image"), dict):
        # a generate result or a query document wrapping the image
        return image_from_json(doc["image"])
    _check_format(doc)
    try:
        points = [tuple(int(c) for c in p) for p in doc["points"]]
        spec = adjacency_from_json(doc["adjacency"])
        dim = int(doc["dim"]) if "dim" in doc else None
    except (KeyError, TypeError, ValueError) as e:
        raise DocumentError(f"bad image document: {e}") from None
    try:
        X = L.make_image(points, spec, dim=dim)
    except ImageError as e:
        raise DocumentError(f"invalid image: {e}") from None
    if isinstance(spec, NPU):
        factors = _product_factors(X)
        if factors is not None:
            X.info.update(family="product", factors=factors, u=spec.u)
    return X


# --------------------------------------------------------------------------
# family descriptors


def contract_not_pointed() -> DigitalImage:
    """([0,2]^2 x [0,1]) minus (1,1,1) under c_1; 17 points."""
    return L.box([(0, 2), (0, 2), (0, 1)], 1).without([(1, 1, 1)])


def irreducible_at_point() -> DigitalImage:
    """Five points in Z^2 under c_2 whose centre (0,0) is not dominated."""
    return L.make_image([(0, 0), (0, -1), (1, 0), (0, 1), (-1, 1)], CU(2), dim=2)


NAMED = {"contract_not_pointed": contract_not_pointed, "irreducible_at_point": irreducible_at_point}


def generate(desc: dict) -> DigitalImage:
    """Build an image from a family descriptor such as ``{"family": "cycle", "n": 9}``.

    Families: interval (a, b), box (ranges, u), cube (m, u), cycle (n),
    tree (edges, n), graph (n, edges), product (factors, u),
    wedge (left, right, x0, x1) and the named images in ``NAMED``.
    """
    if not isinstance(desc, dict) or "family" not in desc:
        raise DocumentError("family descriptor needs a 'family' key")
    _check_format(desc)
    fam = desc["family"]
    try:
        if fam == "interval":
            return L.interval(int(desc["a"]), int(desc["b"]))
        if fam == "box":
            return L.box(desc["ranges"], int(desc.get("u", 1)))
        if fam == "cube":
            return L.cube(desc["m"], int(desc.get("u", 1)))
        if fam == "cycle":
            return L.cycle(int(desc["n"]))
        if fam == "tree":
            return L.tree(desc["edges"], desc.get("n"))
        if fam == "graph":
            return L.graph(int(desc["n"]), desc["edges"])
        if fam == "product":
            return L.product([image_from_json(f) for f in desc["factors"]], desc.get("u"))
        if fam == "wedge":
            x0 = desc["x0"]
            x0 = tuple(x0) if isinstance(x0, list) else x0
            return L.wedge(image_from_json(desc["left"]), image_from_json(desc["right"]), x0, desc.get("x1"))
        if fam in NAMED:
            return NAMED[fam]()
    except (KeyError, TypeError) as e:
        raise DocumentError(f"bad {fam} descriptor: missing or invalid {e}") from None
    except ImageError as e:
        raise DocumentError(f"invalid {fam} image: {e}") from None
    raise DocumentError(f"unknown family {fam!r}")


# --------------------------------------------------------------------------
# maps and verdicts


def map_to_json(f: PointMap) -> dict:
    return {"format": FORMAT, "assignment": list(f.assignment)}


def map_from_json(doc: Any, X: DigitalImage, Y: DigitalImage | None = None) -> PointMap:
    if isinstance(doc, list):
        doc = {"assignment": doc}
    if not isinstance(doc, dict) or "assignment" not in doc:
        raise DocumentError("map document needs an 'assignment' array")
    _check_format(doc)
    try:
        return PointMap(X, X if Y is None else Y, tuple(int(v) for v in doc["assignment"]))
    except (TypeError, ValueError) as e:
        raise DocumentError(f"invalid map: {e}") from None


def candidate_from_json(doc: Any, X: DigitalImage) -> frozenset[int]:
    """Candidate set as indices, or as coordinates (``{"points": [...]}``)."""
    if isinstance(doc, dict):
        _check_format(doc)
        if "points" in doc:
            try:
                return X.indices_of(tuple(p) for p in doc["points"])
            except (KeyError, ImageError) as e:
                raise DocumentError(f"candidate point not in image: {e}") from None
        doc = doc.get("candidate", doc.get("indices"))
    if not isinstance(doc, list):
        raise DocumentError("candidate must be an index array or {\"points\": [...]}")
    out = frozenset(int(i) for i in doc)
    bad = sorted(i for i in out if not 0 <= i < len(X))
    if bad:
        raise DocumentError(f"candidate indices {bad} are outside the image")
    return out


def _plain(v):
    if isinstance(v, (frozenset, set)):
        return sorted(_plain(x) for x in v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if hasattr(v, "item"):  # numpy scalars
        return v.item()
    return v


def verdict_to_json(v: Verdict) -> dict:
    return {"format": FORMAT, "status": v.status.value,
            "witness": None if v.witness is None else list(v.witness.assignment),
            "certificate": _plain(v.certificate), "stats": v.stats.to_dict()}


def verdict_from_json(doc: dict, X: DigitalImage) -> Verdict:
    _check_format(doc)
    try:
        status = Status(doc["status"])
    except (KeyError, ValueError):
        raise DocumentError("verdict needs a status of HOLDS, FAILS or INCONCLUSIVE") from None
    w = doc.get("witness")
    stats = SearchStats(**doc.get("stats", {}))
    return Verdict(status, None if w is None else PointMap(X, X, tuple(w)), stats,
                   dict(doc.get("certificate", {})))
