"""JSON descriptors for algebras, quadrics, spheres and vector fields.

All scalars travel as exact "p/q" strings, a complex number as the pair
[re, im].  Descriptors round-trip: loading the dump of an object rebuilds
it with identical structure constants, and every constructor-level check
(hermitian, invertible, associative, ...) reruns on load, so a descriptor
is either rejected with a diagnostic or yields a validated object.
"""

from __future__ import annotations

import json

from .errors import BadDescriptor
from .quadric import (
    Quadric,
    make_hyperquadric,
    make_matrix_quadric,
    make_type_II,
    make_type_V,
    product_quadric,
    tensor_quadric,
)
from .poly import Poly
from .rationals import qq, qq_str
from .scalars import QQi
from .star_algebra import (
    StarAlgebra,
    make_complex,
    make_dual_numbers,
    make_matrix_algebra,
    make_octonion_container,
    make_product,
    make_swap_product,
)

ALGEBRA_NAMES = {
    "complex": make_complex,
    "dual": make_dual_numbers,
    "m2": lambda: make_matrix_algebra(2),
    "m3": lambda: make_matrix_algebra(3),
    "cxc": lambda: make_product(make_complex(), make_complex()),
    "swap": lambda: make_swap_product(make_complex()),
    "octonion": make_octonion_container,
}


# --- scalars ---------------------------------------------------------------------


def scalar_to_json(c):
    return [qq_str(c.re), qq_str(c.im)]


def scalar_from_json(v):
    """A complex scalar from [re, im], a bare rational string, or an int."""
    try:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ValueError("expected [re, im]")
            return QQi(qq(v[0]), qq(v[1]))
        return QQi(qq(v))
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise BadDescriptor(f"bad scalar {v!r}: {exc}") from None


def _vec_to_json(v):
    return [scalar_to_json(c) for c in v]


def _vec_from_json(v):
    if not isinstance(v, (list, tuple)):
        raise BadDescriptor(f"expected a list of scalars, got {v!r}")
    return tuple(scalar_from_json(c) for c in v)


def _mat_to_json(m):
    return [_vec_to_json(row) for row in m]


def _mat_from_json(m):
    if not isinstance(m, (list, tuple)):
        raise BadDescriptor(f"expected a matrix, got {m!r}")
    return tuple(_vec_from_json(row) for row in m)


# --- star-algebras ------------------------------------------------------------------


def algebra_to_json(A):
    out = {
        "dim": A.dim,
        "unit": _vec_to_json(A.unit),
        "mult": [_mat_to_json(plane) for plane in A.mult],
        "star": _mat_to_json(A.star_matrix),
        "associative": A.associative,
    }
    if A.label:
        out["label"] = A.label
    return out


def algebra_from_json(obj):
    """An algebra from a registry name or a full structure-constant dict."""
    if isinstance(obj, str):
        try:
            return ALGEBRA_NAMES[obj]()
        except KeyError:
            known = ", ".join(sorted(ALGEBRA_NAMES))
            raise BadDescriptor(f"unknown algebra {obj!r} (known: {known})") from None
    if not isinstance(obj, dict):
        raise BadDescriptor("algebra descriptor must be a name or an object")
    missing = {"dim", "unit", "mult", "star"} - set(obj)
    if missing:
        raise BadDescriptor(f"algebra descriptor lacks {sorted(missing)}")
    dim = _as_int(obj["dim"], "dim")
    mult = obj["mult"]
    if not isinstance(mult, list) or len(mult) != dim:
        raise BadDescriptor("mult must hold dim planes")
    try:
        return StarAlgebra(
            dim,
            [_mat_from_json(plane) for plane in mult],
            _vec_from_json(obj["unit"]),
            _mat_from_json(obj["star"]),
            associative=bool(obj.get("associative", True)),
            label=obj.get("label"),
        )
    except ValueError as exc:
        raise BadDescriptor(f"algebra rejected: {exc}") from None


def _as_int(v, what):
    if isinstance(v, bool) or not isinstance(v, int):
        raise BadDescriptor(f"{what} must be an integer, got {v!r}")
    return v


# --- quadrics -------------------------------------------------------------------


def quadric_to_json(Q):
    if Q.family == "ex":
        params = {"n": Q.params["n"], "k": Q.params["k"]}
    elif Q.family == "ey":
        params = {
            "m": Q.params["m"],
            "n": Q.params["n"],
            "beta": _mat_to_json(Q.params["beta"]),
        }
    elif Q.family == "type2":
        params = {"m": Q.params["m"]}
    elif Q.family == "type5":
        params = {}
    elif Q.family == "tensor":
        params = {
            "base": quadric_to_json(Q.params["base"]),
            "algebra": algebra_to_json(Q.params["algebra"]),
        }
    elif Q.family == "product":
        params = {"factors": [quadric_to_json(f) for f in Q.params["factors"]]}
    else:
        params = {
            "dim_w": Q.dim_w,
            "dim_z": Q.dim_z,
            "conj_w": _mat_to_json(Q.conj_w),
            "h": [[_vec_to_json(Q.h[i][j]) for j in range(Q.dim_z)] for i in range(Q.dim_z)],
            "v_basis": [_vec_to_json(v) for v in Q.v_basis],
        }
        return {"family": "custom", "params": params}
    return {"family": Q.family, "params": params}


def quadric_from_json(obj):
    if not isinstance(obj, dict) or "family" not in obj:
        raise BadDescriptor("quadric descriptor must be an object with a family")
    family = obj["family"]
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise BadDescriptor("params must be an object")
    if family == "ex":
        return make_hyperquadric(_as_int(params.get("n"), "n"), _as_int(params.get("k"), "k"))
    if family == "ey":
        return make_matrix_quadric(
            _as_int(params.get("m"), "m"),
            _as_int(params.get("n"), "n"),
            _mat_from_json(params.get("beta")),
        )
    if family == "type2":
        return make_type_II(_as_int(params.get("m"), "m"))
    if family == "type5":
        return make_type_V()
    if family == "tensor":
        if "base" not in params or "algebra" not in params:
            raise BadDescriptor("tensor descriptor needs base and algebra")
        return tensor_quadric(
            quadric_from_json(params["base"]), algebra_from_json(params["algebra"])
        )
    if family == "product":
        factors = params.get("factors")
        if not isinstance(factors, list) or len(factors) != 2:
            raise BadDescriptor("product descriptor needs exactly two factors")
        return product_quadric(*(quadric_from_json(f) for f in factors))
    if family == "custom":
        for key in ("dim_w", "dim_z", "conj_w", "h", "v_basis"):
            if key not in params:
                raise BadDescriptor(f"custom descriptor lacks {key}")
        dim_w = _as_int(params["dim_w"], "dim_w")
        dim_z = _as_int(params["dim_z"], "dim_z")
        h = params["h"]
        if not isinstance(h, list) or len(h) != dim_z:
            raise BadDescriptor("h must hold dim_z planes")
        Q = Quadric(
            dim_w=dim_w,
            dim_z=dim_z,
            conj_w=_mat_from_json(params["conj_w"]),
            h=tuple(tuple(_vec_from_json(hv) for hv in row) for row in h),
            v_basis=tuple(_vec_from_json(v) for v in params["v_basis"]),
        )
        return Q.require_valid()
    raise BadDescriptor(f"unknown quadric family {family!r}")


# --- spheres ---------------------------------------------------------------------


def sphere_to_json(S):
    return {
        "algebra": algebra_to_json(S.A),
        "m": S.m,
        "r": S.r,
        "alpha": _mat_to_json(S.alpha),
    }


def sphere_from_json(obj):
    from .cayley import make_sphere

    if not isinstance(obj, dict):
        raise BadDescriptor("sphere descriptor must be an object")
    missing = {"algebra", "m", "r", "alpha"} - set(obj)
    if missing:
        raise BadDescriptor(f"sphere descriptor lacks {sorted(missing)}")
    return make_sphere(
        algebra_from_json(obj["algebra"]),
        _as_int(obj["m"], "m"),
        _as_int(obj["r"], "r"),
        _mat_from_json(obj["alpha"]),
    )


# --- vector fields --------------------------------------------------------------


def field_to_json(xi):
    """A field as a sorted list of {component, exponents, re, im} terms."""
    sp = xi.space
    items = []
    for label, comps in (("w", xi.w_comp), ("z", xi.z_comp)):
        for c, p in enumerate(comps):
            for e, coeff in p.terms.items():
                items.append(
                    {
                        "component": f"{label}{c}",
                        "exponents": list(e),
                        "re": qq_str(coeff.re),
                        "im": qq_str(coeff.im),
                    }
                )
    items.sort(key=lambda t: (t["component"], t["exponents"]))
    return items


def field_from_json(space, items):
    from .crvec import PolyVecField

    ring = space.ring
    wt = [dict() for _ in range(space.dim_w)]
    zt = [dict() for _ in range(space.dim_z)]
    if not isinstance(items, list):
        raise BadDescriptor("field descriptor must be a list of terms")
    for t in items:
        if not isinstance(t, dict) or {"component", "exponents"} - set(t):
            raise BadDescriptor(f"bad field term {t!r}")
        comp = t["component"]
        exps = t["exponents"]
        if not isinstance(exps, list) or len(exps) != ring.nvars:
            raise BadDescriptor(f"exponents must list all {ring.nvars} variables")
        coeff = QQi(qq(t.get("re", 0)), qq(t.get("im", 0)))
        if not coeff:
            continue
        kind, idx = comp[:1], comp[1:]
        try:
            target = {"w": wt, "z": zt}[kind][int(idx)]
        except (KeyError, ValueError, IndexError):
            raise BadDescriptor(f"unknown component {comp!r}") from None
        e = tuple(_as_int(x, "exponent") for x in exps)
        target[e] = target.get(e, QQi(0)) + coeff
    return PolyVecField(
        space,
        tuple(Poly(ring, {e: c for e, c in d.items() if c}) for d in wt),
        tuple(Poly(ring, {e: c for e, c in d.items() if c}) for d in zt),
    )


# --- canonical dumps -------------------------------------------------------------


def canonical_json(data):
    """Stable serialization: sorted keys, fixed separators, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def load_json(text, what="input"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadDescriptor(f"{what} is not valid JSON: {exc}") from None
