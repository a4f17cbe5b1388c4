"""JSON documents holding a multitwisted triple.

Matrices are ``{"rows", "cols", "data": [[re, im], ...]}`` in row-major order.
Floats are written with ``repr`` precision, so a save/load round trip is
bit-exact.
"""

import json

import numpy as np

from .algebra import StarAlgebraBasis, product_defect, span_closure
from .numat import AntilinearOp
from .triple import (
    InvariantError,
    MultitwistedStructure,
    MultitwistedTriple,
    RealSpectralTriple,
    Summand,
    validate,
)

FORMAT_VERSION = 1


class DocumentError(ValueError):
    pass


def matrix_to_json(m):
    m = np.asarray(m, dtype=np.complex128)
    flat = m.reshape(-1)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj, where="matrix"):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"{where}: malformed matrix ({exc})") from None
    if len(data) != rows * cols:
        raise DocumentError(f"{where}: {len(data)} entries for a {rows}x{cols} matrix")
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in data], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{where}: bad entry ({exc})") from None
    if not np.all(np.isfinite(arr)):
        raise DocumentError(f"{where}: non-finite entry")
    return arr.reshape(rows, cols)


def provenance_string(model):
    prov = model.provenance
    if model.asserts:
        prov = f"{prov}; asserts={','.join(model.asserts)}"
    return prov


def split_provenance(text):
    """Return (provenance, asserted ids) from a stored provenance string."""
    head, sep, tail = text.rpartition("; asserts=")
    if not sep:
        return text, ()
    return head, tuple(c for c in tail.split(",") if c)


def to_document(model):
    t, mt = model
    return {
        "format_version": FORMAT_VERSION,
        "hilbert_dim": t.dim_h,
        "algebra": {
            "generators": [matrix_to_json(g) for g in t.algebra.generators],
            "basis": [matrix_to_json(b) for b in t.algebra.basis],
        },
        "d": matrix_to_json(t.d),
        "j": {"unitary": matrix_to_json(t.j.unitary), "square_sign": t.j.square_sign},
        "grading": None if t.grading is None else matrix_to_json(t.grading),
        "grading_sign": t.grading_sign,
        "epsilon_prime": t.epsilon_prime,
        "multitwist": [{"d_ell": matrix_to_json(s.d), "nu_ell": matrix_to_json(s.nu)} for s in mt.summands],
        "provenance": provenance_string(model),
        "notes": list(model.notes),
    }


def _sign(value, where):
    if value not in (1, -1):
        raise DocumentError(f"{where} must be +1 or -1, got {value!r}")
    return int(value)


def from_document(doc, tol=1e-8):
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {version!r} (expected {FORMAT_VERSION})")
    try:
        n = int(doc["hilbert_dim"])
        alg = doc["algebra"]
        gens = [matrix_from_json(g, f"algebra.generators[{i}]") for i, g in enumerate(alg["generators"])]
        d = matrix_from_json(doc["d"], "d")
        u = matrix_from_json(doc["j"]["unitary"], "j.unitary")
        eps = _sign(doc["j"]["square_sign"], "j.square_sign")
        eps_prime = _sign(doc["epsilon_prime"], "epsilon_prime")
        grading = None if doc.get("grading") is None else matrix_from_json(doc["grading"], "grading")
        gsign = None if grading is None else _sign(doc.get("grading_sign"), "grading_sign")
        summands = [
            Summand(matrix_from_json(s["d_ell"], f"multitwist[{i}].d_ell"), matrix_from_json(s["nu_ell"], f"multitwist[{i}].nu_ell"))
            for i, s in enumerate(doc["multitwist"])
        ]
        provenance, asserts = split_provenance(str(doc.get("provenance", "")))
        notes = [str(x) for x in doc.get("notes", [])]
    except KeyError as exc:
        raise DocumentError(f"missing field {exc}") from None
    except TypeError as exc:
        raise DocumentError(f"malformed document ({exc})") from None
    if not summands:
        raise DocumentError("multitwist must list at least one summand")
    for name, m in [("d", d), ("j.unitary", u)] + [(f"generator {i}", g) for i, g in enumerate(gens)]:
        if m.shape != (n, n):
            raise DocumentError(f"{name} has shape {m.shape}, expected ({n}, {n})")

    if alg.get("basis") is not None:
        basis = np.array([matrix_from_json(b, f"algebra.basis[{i}]") for i, b in enumerate(alg["basis"])])
        algebra = StarAlgebraBasis(n, gens, basis)
        if basis.shape[1:] != (n, n):
            raise DocumentError("algebra basis has the wrong shape")
        if algebra.orthonormality_defect() > 1e-10:
            raise InvariantError(f"algebra basis is not orthonormal (defect {algebra.orthonormality_defect():.3e})")
        gap = product_defect(algebra)
        if gap > tol:
            raise InvariantError(f"algebra basis is not closed under products (residual {gap:.3e})")
    else:
        algebra = span_closure(gens)

    try:
        j = AntilinearOp(u, eps).validate(tol)
        t = RealSpectralTriple(algebra, d, j, eps_prime, grading, gsign)
    except ValueError as exc:
        raise InvariantError(str(exc)) from None
    mt = MultitwistedStructure(summands)
    validate(t, mt, tol)
    return MultitwistedTriple(t, mt, provenance=provenance, asserts=asserts, notes=notes)


def dumps(model):
    return json.dumps(to_document(model), separators=(",", ":")) + "\n"


def loads(text, tol=1e-8):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"parse error at byte offset {exc.pos}: {exc.msg}") from None
    return from_document(doc, tol)


def save(model, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps(model))


def load(path, tol=1e-8):
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError as exc:
        raise DocumentError(f"parse error at byte offset {exc.start}: non-ASCII byte") from None
    return loads(text, tol)


def models_equal(a, b):
    """Bit-exact equality of every stored array and field."""
    return dumps(a) == dumps(b)
