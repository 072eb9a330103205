"""JSON documents for sets, functions, monotone operators and operator trees.

Operators carry an ``"op"`` discriminator; sets, functions and monotone
operators carry ``"type"``. Infinite bounds are written as the strings
``"inf"`` and ``"-inf"``. :func:`serialize_operator` inverts
:func:`parse_operator` up to canonical formatting.
"""
import numpy as np

from ..errors import AveragednessError, ParseError
from ..operators import functions as F
from ..operators import monotone as M
from ..operators import nonexpansive as N
from ..operators import sets as S

SCHEMA_VERSION = 1


# ---------------------------------------------------------------- primitives


def _get(doc, key, path, default=...):
    if not isinstance(doc, dict):
        raise ParseError("expected an object", path)
    if key not in doc:
        if default is ...:
            raise ParseError(f"missing required field {key!r}", path)
        return default
    return doc[key]


def _number(v, path):
    if isinstance(v, bool):
        raise ParseError("expected a number", path)
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str) and v in ("inf", "+inf", "-inf"):
        return float(v)
    raise ParseError(f"expected a number, got {v!r}", path)


def _int(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ParseError(f"expected an integer, got {v!r}", path)
    return int(v)


def _vector(v, path):
    if not isinstance(v, list):
        raise ParseError("expected an array of numbers", path)
    return np.array([_number(t, f"{path}[{i}]") for i, t in enumerate(v)], dtype=float)


def _matrix(v, path):
    if not isinstance(v, list) or not v:
        raise ParseError("expected a nonempty array of rows", path)
    rows = [_vector(r, f"{path}[{i}]") for i, r in enumerate(v)]
    if len({r.shape[0] for r in rows}) != 1:
        raise ParseError("rows have different lengths", path)
    return np.vstack(rows)


def _list(v, path):
    if not isinstance(v, list):
        raise ParseError("expected an array", path)
    return v


def _num_out(x):
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _vec_out(v):
    return [_num_out(t) for t in np.asarray(v).reshape(-1)]


def _mat_out(m):
    return [_vec_out(r) for r in np.asarray(m)]


def _wrap(fn, doc, path):
    """Run a constructor, turning invariant violations into errors with a path."""
    try:
        return fn()
    except ParseError:
        raise
    except AveragednessError as exc:
        exc.args = (f"{path}: {exc.args[0] if exc.args else exc}",)
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), path) from exc


# ---------------------------------------------------------------- sets


def parse_set(doc, path="$"):
    kind = _get(doc, "type", path)
    p = path
    if kind == "box":
        return _wrap(lambda: S.Box(_vector(_get(doc, "lower", p), p + ".lower"),
                                   _vector(_get(doc, "upper", p), p + ".upper")), doc, p)
    if kind == "ball":
        return _wrap(lambda: S.Ball(_vector(_get(doc, "center", p), p + ".center"),
                                    _number(_get(doc, "radius", p), p + ".radius")), doc, p)
    if kind == "halfspace":
        return _wrap(lambda: S.Halfspace(_vector(_get(doc, "normal", p), p + ".normal"),
                                         _number(_get(doc, "offset", p), p + ".offset")), doc, p)
    if kind in ("subspace", "affine_subspace"):
        anchor = None
        if kind == "affine_subspace":
            anchor = _vector(_get(doc, "anchor", p), p + ".anchor")
        if "span" in doc:
            span = _list(doc["span"], p + ".span")
            vecs = _matrix(span, p + ".span") if span else np.zeros((0, 0))
            if kind == "subspace":
                dim = _int(doc["dim"], p + ".dim") if "dim" in doc else None
                return _wrap(lambda: S.LinearSubspace.span(vecs, dim), doc, p)
            return _wrap(lambda: S.AffineSubspace.span(vecs, anchor), doc, p)
        basis = _matrix(_get(doc, "basis", p), p + ".basis")
        if kind == "subspace":
            return _wrap(lambda: S.LinearSubspace(basis), doc, p)
        return _wrap(lambda: S.AffineSubspace(basis, anchor), doc, p)
    if kind == "singleton":
        return _wrap(lambda: S.Singleton(_vector(_get(doc, "point", p), p + ".point")), doc, p)
    if kind == "halfspace_intersection":
        hs = [parse_set(h, f"{p}.halfspaces[{i}]") for i, h in enumerate(_list(_get(doc, "halfspaces", p), p))]
        tol = _number(doc.get("tol", 1e-10), p + ".tol")
        sweeps = _int(doc.get("max_sweeps", 100_000), p + ".max_sweeps")
        return _wrap(lambda: S.HalfspaceIntersection(tuple(hs), tol, sweeps), doc, p)
    raise ParseError(f"unknown set type {kind!r}", path + ".type")


def _subspace_out(C, kind):
    g, b = C._generators, C.basis
    if g.shape == b.shape and np.array_equal(g, b):
        out = {"type": kind, "basis": _mat_out(b)}
    else:
        out = {"type": kind, "span": _mat_out(g.T)}
    if g.shape[1] == 0 and kind == "subspace":
        out = {"type": kind, "span": [], "dim": C.dim}
    return out


def serialize_set(C):
    if isinstance(C, S.Box):
        return {"type": "box", "lower": _vec_out(C.lower), "upper": _vec_out(C.upper)}
    if isinstance(C, S.Ball):
        return {"type": "ball", "center": _vec_out(C.center), "radius": _num_out(C.radius)}
    if isinstance(C, S.Halfspace):
        return {"type": "halfspace", "normal": _vec_out(C.normal), "offset": _num_out(C.offset)}
    if isinstance(C, S.LinearSubspace):
        return _subspace_out(C, "subspace")
    if isinstance(C, S.AffineSubspace):
        out = _subspace_out(C, "affine_subspace")
        out["anchor"] = _vec_out(C.anchor)
        return out
    if isinstance(C, S.Singleton):
        return {"type": "singleton", "point": _vec_out(C.point)}
    if isinstance(C, S.HalfspaceIntersection):
        return {"type": "halfspace_intersection", "halfspaces": [serialize_set(h) for h in C.halfspaces],
                "tol": _num_out(C.tol), "max_sweeps": C.max_sweeps}
    raise TypeError(f"cannot serialize {type(C).__name__}")


# ---------------------------------------------------------------- functions


def parse_function(doc, path="$"):
    kind = _get(doc, "type", path)
    p = path
    if kind == "indicator":
        return F.Indicator(parse_set(_get(doc, "set", p), p + ".set"))
    if kind == "quadratic":
        return _wrap(lambda: F.Quadratic(_matrix(_get(doc, "Q", p), p + ".Q")), doc, p)
    if kind == "half_distance_squared":
        C = parse_set(_get(doc, "set", p), p + ".set")
        return _wrap(lambda: F.HalfDistanceSquared(C, _number(doc.get("scale", 1.0), p + ".scale")), doc, p)
    if kind == "huber":
        return _wrap(lambda: F.Huber(_number(_get(doc, "mu", p), p + ".mu"),
                                     _number(doc.get("scale", 1.0), p + ".scale")), doc, p)
    if kind == "support":
        C = parse_set(_get(doc, "set", p), p + ".set")
        return _wrap(lambda: F.Support(C, _number(doc.get("scale", 1.0), p + ".scale")), doc, p)
    if kind == "moreau_envelope":
        inner = parse_function(_get(doc, "inner", p), p + ".inner")
        return _wrap(lambda: F.MoreauEnvelope(inner, _number(_get(doc, "mu", p), p + ".mu"),
                                              _number(doc.get("scale", 1.0), p + ".scale")), doc, p)
    if kind == "scalar_piecewise_convex":
        return _wrap(lambda: F.ScalarPiecewiseConvex(
            _vector(_get(doc, "breakpoints", p), p + ".breakpoints"),
            _vector(_get(doc, "slopes", p), p + ".slopes"),
            _number(doc.get("offset", 0.0), p + ".offset")), doc, p)
    raise ParseError(f"unknown function type {kind!r}", path + ".type")


def serialize_function(f):
    if isinstance(f, F.Indicator):
        return {"type": "indicator", "set": serialize_set(f.set)}
    if isinstance(f, F.Quadratic):
        return {"type": "quadratic", "Q": _mat_out(f.Q)}
    if isinstance(f, F.HalfDistanceSquared):
        return {"type": "half_distance_squared", "set": serialize_set(f.set), "scale": f.scale}
    if isinstance(f, F.Huber):
        return {"type": "huber", "mu": f.mu, "scale": f.scale}
    if isinstance(f, F.Support):
        return {"type": "support", "set": serialize_set(f.set), "scale": f.scale}
    if isinstance(f, F.MoreauEnvelope):
        return {"type": "moreau_envelope", "inner": serialize_function(f.inner), "mu": f.mu, "scale": f.scale}
    if isinstance(f, F.ScalarPiecewiseConvex):
        return {"type": "scalar_piecewise_convex", "breakpoints": _vec_out(f.breakpoints),
                "slopes": _vec_out(f.slopes), "offset": f.offset}
    raise TypeError(f"cannot serialize {type(f).__name__}")


# ---------------------------------------------------------------- monotone operators


def parse_monotone(doc, path="$"):
    kind = _get(doc, "type", path)
    p = path
    if kind == "subdifferential":
        return M.Subdifferential(parse_function(_get(doc, "function", p), p + ".function"))
    if kind == "linear":
        return _wrap(lambda: M.LinearMonotone(_matrix(_get(doc, "M", p), p + ".M")), doc, p)
    if kind == "normal_cone":
        return M.NormalCone(parse_set(_get(doc, "set", p), p + ".set"))
    if kind == "scaled":
        inner = parse_monotone(_get(doc, "operator", p), p + ".operator")
        return _wrap(lambda: M.Scaled(_number(_get(doc, "beta", p), p + ".beta"), inner), doc, p)
    if kind == "yosida":
        inner = parse_monotone(_get(doc, "operator", p), p + ".operator")
        return _wrap(lambda: M.Yosida(_number(_get(doc, "mu", p), p + ".mu"), inner), doc, p)
    raise ParseError(f"unknown monotone operator type {kind!r}", path + ".type")


def serialize_monotone(A):
    if isinstance(A, M.Subdifferential):
        return {"type": "subdifferential", "function": serialize_function(A.function)}
    if isinstance(A, M.LinearMonotone):
        return {"type": "linear", "M": _mat_out(A.M)}
    if isinstance(A, M.NormalCone):
        return {"type": "normal_cone", "set": serialize_set(A.set)}
    if isinstance(A, M.Scaled):
        return {"type": "scaled", "beta": A.beta, "operator": serialize_monotone(A.operator)}
    if isinstance(A, M.Yosida):
        return {"type": "yosida", "mu": A.mu, "operator": serialize_monotone(A.operator)}
    raise TypeError(f"cannot serialize {type(A).__name__}")


# ---------------------------------------------------------------- operators


def parse_operator(doc, path="$"):
    kind = _get(doc, "op", path)
    p = path
    if kind == "identity":
        return N.Identity(_int(doc["dim"], p + ".dim") if "dim" in doc else None)
    if kind == "constant":
        return _wrap(lambda: N.Constant(_vector(_get(doc, "point", p), p + ".point")), doc, p)
    if kind == "shift":
        return _wrap(lambda: N.Shift(_vector(_get(doc, "vector", p), p + ".vector")), doc, p)
    if kind == "matrix":
        return _wrap(lambda: N.LinearMatrix(_matrix(_get(doc, "data", p), p + ".data")), doc, p)
    if kind == "affine":
        return _wrap(lambda: N.Affine(_matrix(_get(doc, "data", p), p + ".data"),
                                      _vector(_get(doc, "shift", p), p + ".shift")), doc, p)
    if kind == "projection":
        return N.Projection(parse_set(_get(doc, "set", p), p + ".set"))
    if kind == "proj_subspace":
        sub = {"type": "affine_subspace" if "anchor" in doc else "subspace"}
        sub.update({k: v for k, v in doc.items() if k != "op"})
        return N.Projection(parse_set(sub, p))
    if kind == "reflector":
        return N.Reflector(parse_set(_get(doc, "set", p), p + ".set"))
    if kind == "prox":
        return N.Prox(parse_function(_get(doc, "function", p), p + ".function"))
    if kind in ("resolvent", "reflected_resolvent"):
        A = parse_monotone(_get(doc, "operator", p), p + ".operator")
        alpha = _number(doc.get("alpha", 1.0), p + ".alpha")
        cls = N.Resolvent if kind == "resolvent" else N.ReflectedResolvent
        return _wrap(lambda: cls(A, alpha), doc, p)
    if kind == "relaxation":
        inner = parse_operator(_get(doc, "inner", p), p + ".inner")
        return _wrap(lambda: N.Relaxation(_number(_get(doc, "lam", p), p + ".lam"), inner), doc, p)
    if kind == "compose":
        ops = [parse_operator(o, f"{p}.inner[{i}]") for i, o in enumerate(_list(_get(doc, "inner", p), p + ".inner"))]
        return _wrap(lambda: N.Compose(tuple(ops)), doc, p)
    if kind == "convex_combination":
        ops = [parse_operator(o, f"{p}.inner[{i}]") for i, o in enumerate(_list(_get(doc, "inner", p), p + ".inner"))]
        w = _vector(_get(doc, "weights", p), p + ".weights")
        return _wrap(lambda: N.ConvexCombination(tuple(w), tuple(ops)), doc, p)
    if kind == "douglas_rachford":
        a = parse_set(_get(doc, "first", p), p + ".first")
        b = parse_set(_get(doc, "second", p), p + ".second")
        return _wrap(lambda: N.DouglasRachford(a, b), doc, p)
    if kind == "scalar_piecewise":
        return _wrap(lambda: N.ScalarPiecewise(
            _vector(_get(doc, "breakpoints", p), p + ".breakpoints"),
            _vector(_get(doc, "slopes", p), p + ".slopes"),
            _vector(_get(doc, "intercepts", p), p + ".intercepts")), doc, p)
    if kind == "limit":
        inner = parse_operator(_get(doc, "inner", p), p + ".inner")
        tol = _number(doc.get("tol", 1e-10), p + ".tol")
        max_iter = _int(doc.get("max_iter", 1_000_000), p + ".max_iter")
        return _wrap(lambda: N.LimitOperator(inner, tol, max_iter), doc, p)
    raise ParseError(f"unknown operator {kind!r}", path + ".op")


def serialize_operator(T):
    if isinstance(T, N.Identity):
        return {"op": "identity"} if T.dim is None else {"op": "identity", "dim": T.dim}
    if isinstance(T, N.Constant):
        return {"op": "constant", "point": _vec_out(T.point)}
    if isinstance(T, N.Shift):
        return {"op": "shift", "vector": _vec_out(T.vector)}
    if isinstance(T, N.LinearMatrix):
        return {"op": "matrix", "data": _mat_out(T.matrix)}
    if isinstance(T, N.Affine):
        return {"op": "affine", "data": _mat_out(T.matrix), "shift": _vec_out(T.shift)}
    if isinstance(T, N.Projection):
        if isinstance(T.set, (S.LinearSubspace, S.AffineSubspace)):
            out = serialize_set(T.set)
            del out["type"]
            return {"op": "proj_subspace", **out}
        return {"op": "projection", "set": serialize_set(T.set)}
    if isinstance(T, N.Reflector):
        return {"op": "reflector", "set": serialize_set(T.set)}
    if isinstance(T, N.Prox):
        return {"op": "prox", "function": serialize_function(T.function)}
    if isinstance(T, (N.Resolvent, N.ReflectedResolvent)):
        kind = "resolvent" if isinstance(T, N.Resolvent) else "reflected_resolvent"
        return {"op": kind, "operator": serialize_monotone(T.operator), "alpha": T.alpha}
    if isinstance(T, N.Relaxation):
        return {"op": "relaxation", "lam": T.lam, "inner": serialize_operator(T.inner)}
    if isinstance(T, N.Compose):
        return {"op": "compose", "inner": [serialize_operator(o) for o in T.operators]}
    if isinstance(T, N.ConvexCombination):
        return {"op": "convex_combination", "weights": list(T.weights),
                "inner": [serialize_operator(o) for o in T.operators]}
    if isinstance(T, N.DouglasRachford):
        return {"op": "douglas_rachford", "first": serialize_set(T.first), "second": serialize_set(T.second)}
    if isinstance(T, N.ScalarPiecewise):
        return {"op": "scalar_piecewise", "breakpoints": _vec_out(T.breakpoints),
                "slopes": _vec_out(T.slopes), "intercepts": _vec_out(T.intercepts)}
    if isinstance(T, N.LimitOperator):
        return {"op": "limit", "inner": serialize_operator(T.inner), "tol": T.tol, "max_iter": T.max_iter}
    raise TypeError(f"cannot serialize {type(T).__name__}")


# ---------------------------------------------------------------- documents


def check_schema(doc, path="$"):
    if not isinstance(doc, dict):
        raise ParseError("a document must be a JSON object", path)
    version = doc.get("schema")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})", path + ".schema")
    return doc


def parse_vector(doc, key, path="$", default=...):
    v = _get(doc, key, path, default)
    if v is None or v is default:
        return v
    return _vector(v, f"{path}.{key}")


def parse_points(doc, key, path="$"):
    if key not in doc:
        return None
    return _matrix(doc[key], f"{path}.{key}")
