"""Real spectral triples with multitwisted real structure and their checkers.

Each checker returns :class:`Entry` objects carrying an absolute residual
(operator norm of the defect of an identity), the natural scale of the
factors, and the relative residual used for pass/fail.
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .algebra import StarAlgebraBasis
from .numat import (
    DEFAULT_TOL,
    AntilinearOp,
    DimensionError,
    adjoint,
    al_compose_sign,
    al_conjugate,
    as_cmatrix,
    condition_number,
    inverse,
    op_norm,
)

MAX_TWIST_COND = 1e8

# condition id -> identity it measures; order fixes the report layout
CONDITIONS = {
    "d_hermitian": "D = D*",
    "summands_sum": "sum_l D_l = D",
    "j_isometry": "U U* = 1",
    "j_square": "J^2 = eps",
    "grading_involution": "gamma^2 = 1",
    "grading_anticommutes_d": "gamma D = -D gamma",
    "grading_commutes_a": "[gamma, a] = 0",
    "grading_j_sign": "gamma J = +-J gamma",
    "zero_order": "[a, J b J^-1] = 0",
    "first_order": "[[D, a], J b J^-1] = 0",
    "epsilon_prime": "D J = eps' J D",
    "mt_zero_order": "[a, J nu(b) J^-1] = 0 = [a, J nu^-1(b) J^-1]",
    "grading_twist": "gamma nu_l^2 = nu_l^2 gamma",
    "mt_first_order": "[D_l, a] J nu(b) J^-1 = J nu^-1(b) J^-1 [D_l, a]",
    "mt_epsilon_prime": "D_l J nu_l = eps' nu_l J D_l",
    "regularity": "nu_l J nu_l = J",
}
STRUCTURAL = [c for c in CONDITIONS if c.startswith(("d_", "summands", "j_", "grading_")) and c != "grading_twist"]
TWISTED = ["mt_zero_order", "grading_twist", "mt_first_order", "mt_epsilon_prime", "regularity"]
CLASSICAL = ["zero_order", "first_order", "epsilon_prime"]

FINITE_DIM_NOTE = "compact resolvent: finite-dimensional: automatic"


class InvariantError(ValueError):
    pass


@dataclass(eq=False)
class RealSpectralTriple:
    algebra: StarAlgebraBasis
    d: np.ndarray
    j: AntilinearOp
    epsilon_prime: int
    grading: np.ndarray = None
    grading_sign: int = None

    def __post_init__(self):
        self.d = as_cmatrix(self.d)
        n = self.algebra.dim_h
        if self.d.shape != (n, n) or self.j.dim != n:
            raise DimensionError(f"D {self.d.shape}, J {self.j.dim} and algebra {n} disagree")
        if self.epsilon_prime not in (1, -1):
            raise ValueError("epsilon_prime must be +1 or -1")
        if self.grading is not None:
            self.grading = as_cmatrix(self.grading)
            if self.grading.shape != (n, n):
                raise DimensionError("grading has the wrong shape")
            if self.grading_sign not in (1, -1):
                raise ValueError("an even triple needs grading_sign = +1 or -1")

    @property
    def dim_h(self):
        return self.algebra.dim_h

    @property
    def epsilon(self):
        return self.j.square_sign

    @property
    def is_even(self):
        return self.grading is not None


@dataclass(eq=False)
class Summand:
    d: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        self.d = as_cmatrix(self.d)
        self.nu = as_cmatrix(self.nu)


@dataclass(eq=False)
class MultitwistedStructure:
    summands: list

    @classmethod
    def untwisted(cls, ds):
        ds = [as_cmatrix(d) for d in ds]
        return cls([Summand(d, np.eye(d.shape[0], dtype=np.complex128)) for d in ds])

    def __len__(self):
        return len(self.summands)

    def total(self):
        return sum(s.d for s in self.summands)


@dataclass(eq=False)
class MultitwistedTriple:
    """A triple together with its splitting, as produced by builders and constructions."""

    triple: RealSpectralTriple
    mt: MultitwistedStructure
    provenance: str = ""
    asserts: tuple = ()
    notes: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.triple, self.mt))


@dataclass
class Entry:
    condition_id: str
    tag: str
    summand_index: int
    absolute_residual: float
    scale: float
    relative_residual: float
    passed: bool
    witness: tuple = None
    vacuous: bool = False
    measured_sign: int = None
    note: str = ""


def _entry(cid, residual, natural_scale, tol, reference=None, summand=None, witness=None, **extra):
    residual = float(residual)
    natural_scale = float(natural_scale)
    ref = natural_scale if reference is None else float(reference)
    vacuous = natural_scale <= 1e-13 * ref or natural_scale == 0.0
    scale = 1.0 if vacuous else natural_scale
    rel = residual / scale
    return Entry(
        condition_id=cid,
        tag=CONDITIONS[cid],
        summand_index=summand,
        absolute_residual=residual,
        scale=scale,
        relative_residual=rel,
        passed=bool(rel <= tol),
        witness=None if witness is None else tuple(int(w) for w in witness),
        vacuous=bool(vacuous),
        **extra,
    )


def twist_ad(nu, b, nu_inv=None):
    """Adjoint action ``nu b nu^-1``."""
    if nu_inv is None:
        nu_inv = inverse(nu)
    return nu @ b @ nu_inv


def _twist_pair(nu):
    cond = condition_number(nu)
    if cond > MAX_TWIST_COND:
        raise InvariantError(f"twist is numerically singular (condition number {cond:.3e})")
    return nu, inverse(nu)


def _conjugated_stack(t, mats):
    return np.array([al_conjugate(t.j, m) for m in mats])


def _sweep(cs, ls, rs):
    grid = _kernels.intertwine_grid(cs, ls, rs)
    flat = int(np.argmax(grid))
    i, j = divmod(flat, grid.shape[1])
    return float(grid[i, j]), (i, j), grid


def _basis_scale(t):
    n = t.algebra.op_norms()
    return float(n.max() ** 2)


def check_zero_order(t, tol=DEFAULT_TOL):
    basis = t.algebra.basis
    jb = _conjugated_stack(t, basis)
    res, wit, _ = _sweep(basis, jb, jb)
    return _entry("zero_order", res, _basis_scale(t), tol, witness=wit)


def check_first_order(t, tol=DEFAULT_TOL):
    basis = t.algebra.basis
    cs = np.array([t.d @ a - a @ t.d for a in basis])
    jb = _conjugated_stack(t, basis)
    res, wit, _ = _sweep(cs, jb, jb)
    cn = _kernels.stack_norms(cs)
    bn = t.algebra.op_norms()
    ref = op_norm(t.d) * bn.max() ** 2
    return _entry("first_order", res, cn.max() * bn.max(), tol, reference=ref, witness=wit)


def check_epsilon_prime_untwisted(t, tol=DEFAULT_TOL):
    u = t.j.unitary
    m_plus = t.d @ u
    m_conj = u @ np.conj(t.d)
    res = op_norm(m_plus - t.epsilon_prime * m_conj)
    sign = 1 if op_norm(m_plus - m_conj) <= op_norm(m_plus + m_conj) else -1
    return _entry("epsilon_prime", res, op_norm(t.d), tol, measured_sign=sign)


def check_mt_zero_order(t, mt, tol=DEFAULT_TOL):
    basis = t.algebra.basis
    scale = _basis_scale(t)
    out = []
    for ell, s in enumerate(mt.summands):
        nu, nu_inv = _twist_pair(s.nu)
        bp = _conjugated_stack(t, [twist_ad(nu, b, nu_inv) for b in basis])
        bm = _conjugated_stack(t, [twist_ad(nu_inv, b, nu) for b in basis])
        r1, w1, _ = _sweep(basis, bp, bp)
        r2, w2, _ = _sweep(basis, bm, bm)
        res, wit = (r1, w1) if r1 >= r2 else (r2, w2)
        out.append(_entry("mt_zero_order", res, scale, tol, summand=ell, witness=wit))
    return out


def check_mt_first_order(t, mt, tol=DEFAULT_TOL):
    basis = t.algebra.basis
    bn = t.algebra.op_norms()
    out = []
    for ell, s in enumerate(mt.summands):
        nu, nu_inv = _twist_pair(s.nu)
        cs = np.array([s.d @ a - a @ s.d for a in basis])
        bp = _conjugated_stack(t, [twist_ad(nu, b, nu_inv) for b in basis])
        bm = _conjugated_stack(t, [twist_ad(nu_inv, b, nu) for b in basis])
        res, wit, _ = _sweep(cs, bp, bm)
        cn = _kernels.stack_norms(cs)
        ref = op_norm(s.d) * bn.max() ** 2
        out.append(_entry("mt_first_order", res, cn.max() * bn.max(), tol, reference=ref, summand=ell, witness=wit))
    return out


def check_epsilon_prime(t, mt, tol=DEFAULT_TOL):
    out = []
    for ell, s in enumerate(mt.summands):
        lhs = al_compose_sign(s.d, t.j, s.nu)
        rhs = al_compose_sign(s.nu, t.j, s.d)
        res = op_norm(lhs - t.epsilon_prime * rhs)
        sign = 1 if op_norm(lhs - rhs) <= op_norm(lhs + rhs) else -1
        out.append(
            _entry("mt_epsilon_prime", res, op_norm(s.d) * op_norm(s.nu), tol, summand=ell, measured_sign=sign)
        )
    return out


def check_regularity(t, mt, tol=DEFAULT_TOL):
    u = t.j.unitary
    out = []
    for ell, s in enumerate(mt.summands):
        res = op_norm(s.nu @ u @ np.conj(s.nu) - u)
        out.append(_entry("regularity", res, op_norm(s.nu) ** 2, tol, summand=ell))
    return out


def check_grading_twist(t, mt, tol=DEFAULT_TOL):
    if not t.is_even:
        raise ValueError("grading condition requested on an odd triple")
    g = t.grading
    out = []
    for ell, s in enumerate(mt.summands):
        nu2 = s.nu @ s.nu
        out.append(_entry("grading_twist", op_norm(g @ nu2 - nu2 @ g), op_norm(nu2), tol, summand=ell))
    return out


def structural_entries(t, mt, tol=DEFAULT_TOL):
    d = t.d
    dn = op_norm(d)
    u = t.j.unitary
    eye = np.eye(t.dim_h)
    out = [
        _entry("d_hermitian", op_norm(d - adjoint(d)), dn, tol),
        _entry("summands_sum", op_norm(mt.total() - d), dn, tol),
        _entry("j_isometry", op_norm(u @ adjoint(u) - eye), 1.0, tol),
        _entry("j_square", op_norm(u @ np.conj(u) - t.epsilon * eye), 1.0, tol),
    ]
    if t.is_even:
        g = t.grading
        bn = t.algebra.op_norms()
        comm = max(op_norm(g @ b - b @ g) for b in t.algebra.basis)
        out += [
            _entry("grading_involution", op_norm(g @ g - eye), 1.0, tol),
            _entry("grading_anticommutes_d", op_norm(g @ d + d @ g), dn, tol),
            _entry("grading_commutes_a", comm, bn.max(), tol),
            _entry("grading_j_sign", op_norm(g @ u - t.grading_sign * u @ np.conj(g)), 1.0, tol),
        ]
    return out


@dataclass
class ConditionReport:
    tol: float
    entries: list
    notes: list = field(default_factory=list)

    def select(self, condition_id):
        return [e for e in self.entries if e.condition_id == condition_id]

    def worst(self, condition_id):
        sel = self.select(condition_id)
        if not sel:
            raise KeyError(f"report has no entries for {condition_id!r}")
        return max(e.relative_residual for e in sel)

    def passes(self, condition_ids=None):
        ids = set(condition_ids) if condition_ids is not None else None
        missing = (ids or set()) - {e.condition_id for e in self.entries}
        if missing:
            raise KeyError(f"report has no entries for {sorted(missing)}")
        return all(e.passed for e in self.entries if ids is None or e.condition_id in ids)

    def failures(self, condition_ids=None):
        return [e for e in self.entries if not e.passed and (condition_ids is None or e.condition_id in condition_ids)]

    def to_dict(self):
        return {"tol": self.tol, "notes": list(self.notes), "entries": [asdict(e) for e in self.entries]}

    @classmethod
    def from_dict(cls, data):
        entries = []
        for e in data["entries"]:
            e = dict(e)
            if e.get("witness") is not None:
                e["witness"] = tuple(e["witness"])
            entries.append(Entry(**e))
        return cls(tol=data["tol"], entries=entries, notes=list(data.get("notes", [])))

    def render_table(self, asserted=None):
        head = f"{'condition':<24}{'l':>3}  {'absolute':>10}  {'scale':>10}  {'relative':>10}  {'status':<8} witness"
        lines = [head, "-" * len(head)]
        for e in self.entries:
            status = "pass" if e.passed else "FAIL"
            if e.vacuous:
                status += "*"
            if asserted is not None and e.condition_id not in asserted:
                status = f"({status})"
            ell = "" if e.summand_index is None else str(e.summand_index)
            wit = "" if e.witness is None else str(e.witness)
            lines.append(
                f"{e.condition_id:<24}{ell:>3}  {e.absolute_residual:10.3e}  {e.scale:10.3e}  "
                f"{e.relative_residual:10.3e}  {status:<8} {wit}"
            )
        lines.append(f"tol = {self.tol:g}; * vacuous (zero scale); (..) reported, not asserted")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def run_all(t, mt, tol=DEFAULT_TOL, notes=()):
    """Every structural, classical and twisted check, in a fixed order."""
    entries = structural_entries(t, mt, tol)
    entries.append(check_zero_order(t, tol))
    entries.append(check_first_order(t, tol))
    entries.append(check_epsilon_prime_untwisted(t, tol))
    entries += check_mt_zero_order(t, mt, tol)
    if t.is_even:
        entries += check_grading_twist(t, mt, tol)
    entries += check_mt_first_order(t, mt, tol)
    entries += check_epsilon_prime(t, mt, tol)
    entries += check_regularity(t, mt, tol)

    all_notes = [FINITE_DIM_NOTE]
    for ell, s in enumerate(mt.summands):
        asym = op_norm(s.d - adjoint(s.d))
        if asym > tol * max(1.0, op_norm(s.d)):
            all_notes.append(f"summand {ell} is not Hermitian (||D_l - D_l*|| = {asym:.3e}); only the sum must be")
        all_notes.append(f"summand {ell} twist condition number {condition_number(s.nu):.6g}")
    all_notes += list(notes)
    return ConditionReport(tol=tol, entries=entries, notes=all_notes)


def report(model, tol=DEFAULT_TOL):
    return run_all(model.triple, model.mt, tol, notes=model.notes)


def conjugate_by(model, w):
    """Transport every operator of ``model`` along the unitary ``w``."""
    w = as_cmatrix(w)
    wa = adjoint(w)

    def lin(m):
        return w @ m @ wa

    t = model.triple
    t2 = RealSpectralTriple(
        algebra=t.algebra.mapped(lin),
        d=lin(t.d),
        j=AntilinearOp(w @ t.j.unitary @ w.T, t.j.square_sign),
        epsilon_prime=t.epsilon_prime,
        grading=None if t.grading is None else lin(t.grading),
        grading_sign=t.grading_sign,
    )
    mt2 = MultitwistedStructure([Summand(lin(s.d), lin(s.nu)) for s in model.mt.summands])
    return MultitwistedTriple(t2, mt2, model.provenance, model.asserts, list(model.notes))


def validate(t, mt, tol=1e-8):
    """Raise InvariantError if a structural invariant fails beyond ``tol`` (relative)."""
    for e in structural_entries(t, mt, tol):
        if not e.passed:
            raise InvariantError(
                f"invariant {e.condition_id} ({e.tag}) violated: measured gap {e.absolute_residual:.3e}"
                f" (relative {e.relative_residual:.3e})"
            )
    for ell, s in enumerate(mt.summands):
        if s.d.shape != t.d.shape or s.nu.shape != t.d.shape:
            raise InvariantError(f"summand {ell} has the wrong shape")
        cond = condition_number(s.nu)
        if cond > MAX_TWIST_COND:
            raise InvariantError(f"twist {ell} is numerically singular (condition number {cond:.3e})")
