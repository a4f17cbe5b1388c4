"""Tensor products, fluctuations and conformal rescalings of multitwisted triples."""

from dataclasses import dataclass, field

import numpy as np

from .algebra import membership_residual, span_closure
from .numat import (
    DEFAULT_TOL,
    adjoint,
    al_conjugate,
    al_tensor,
    as_cmatrix,
    herm_eig,
    inverse,
    op_norm,
    random_hermitian,
)
from .triple import (
    CLASSICAL,
    InvariantError,
    MultitwistedStructure,
    MultitwistedTriple,
    RealSpectralTriple,
    Summand,
    check_mt_first_order,
    check_regularity,
    twist_ad,
)

POSITIVITY_RATIO = 1e-6
BOUNDEDNESS_NOTE = "boundedness of the correction term: automatic (finite-dimensional)"


class ConstructionError(ValueError):
    pass


def _asserts(even, *groups):
    from .models import default_asserts

    return default_asserts(even, *groups)


def _keep_grading(t, d, tol, notes):
    """Grading (and its sign) if it still anticommutes with ``d``, else drop it."""
    if not t.is_even:
        return None, None
    g = t.grading
    gap = op_norm(g @ d + d @ g)
    if gap <= tol * max(1.0, op_norm(d)):
        return g, t.grading_sign
    notes.append(f"grading dropped: it no longer anticommutes with D (gap {gap:.3e})")
    return None, None


def _in_algebra(x, algebra, tol):
    return membership_residual(x, algebra) <= tol * max(1.0, float(np.linalg.norm(x)))


def tensor_product(first, second):
    """Product of an even triple (gamma J = J gamma) with a second triple.

    D = D' (x) 1 + gamma' (x) D''; summands D'_l (x) 1 twisted by nu'_l (x) 1,
    then gamma' (x) D''_l twisted by 1 (x) nu''_l. The result is odd.
    """
    t1, m1 = first
    t2, m2 = second
    if not t1.is_even:
        raise ConstructionError("the first factor must be even")
    if t1.grading_sign != 1:
        raise ConstructionError("the first factor must satisfy gamma J = J gamma (grading_sign = +1)")
    if t1.epsilon_prime != t2.epsilon_prime:
        raise ConstructionError(
            f"eps' of the factors differ ({t1.epsilon_prime:+d} vs {t2.epsilon_prime:+d})"
        )
    n1, n2 = t1.dim_h, t2.dim_h
    e1 = np.eye(n1, dtype=np.complex128)
    e2 = np.eye(n2, dtype=np.complex128)
    gens = [np.kron(g, e2) for g in t1.algebra.generators] + [np.kron(e1, g) for g in t2.algebra.generators]
    g1 = t1.grading
    summands = [Summand(np.kron(s.d, e2), np.kron(s.nu, e2)) for s in m1.summands]
    summands += [Summand(np.kron(g1, s.d), np.kron(e1, s.nu)) for s in m2.summands]
    t = RealSpectralTriple(
        algebra=span_closure(gens),
        d=np.kron(t1.d, e2) + np.kron(g1, t2.d),
        j=al_tensor(t1.j, t2.j),
        epsilon_prime=t1.epsilon_prime,
    )
    return MultitwistedTriple(
        t,
        MultitwistedStructure(summands),
        provenance=f"tensor({first.provenance} | {second.provenance})",
        asserts=_asserts(False, ["zero_order", "mt_zero_order", "mt_first_order", "mt_epsilon_prime", "regularity"]),
        notes=sorted(set(first.notes) | set(second.notes)) + ["product of an even and an odd triple carries no grading"],
    )


@dataclass(eq=False)
class OneForm:
    total: np.ndarray
    per_summand: list
    terms: list = field(default_factory=list)
    selfadjoint: bool = False


def _formal_adjoint_terms(terms):
    # (a [D, b])* = b* [D, a*] - [D, b* a*] for Hermitian D
    out = []
    for a, b in terms:
        eye = np.eye(a.shape[0], dtype=np.complex128)
        bs, as_ = adjoint(b), adjoint(a)
        out += [(0.5 * a, b), (0.5 * bs, as_), (-0.5 * eye, bs @ as_)]
    return out


def make_one_form(model, terms, symmetrize=False, per_summand_terms=None, tol=DEFAULT_TOL):
    """omega_l = sum_i a_i [D_l, b_i]; ``per_summand_terms`` fluctuates each summand separately."""
    t, mt = model
    groups = per_summand_terms if per_summand_terms is not None else [terms] * len(mt)
    if len(groups) != len(mt):
        raise ConstructionError(f"{len(groups)} term lists for {len(mt)} summands")
    clean_groups = []
    for group in groups:
        clean = []
        for a, b in group:
            a, b = as_cmatrix(a), as_cmatrix(b)
            for x in (a, b):
                if not _in_algebra(x, t.algebra, tol):
                    raise ConstructionError(
                        f"one-form coefficient is not in the algebra (residual {membership_residual(x, t.algebra):.3e})"
                    )
            clean.append((a, b))
        clean_groups.append(_formal_adjoint_terms(clean) if symmetrize else clean)
    per = []
    for s, group in zip(mt.summands, clean_groups):
        w = np.zeros_like(t.d)
        for a, b in group:
            w = w + a @ (s.d @ b - b @ s.d)
        per.append(w)
    total = sum(per)
    sa = op_norm(total - adjoint(total)) <= 1e-12 * max(1.0, op_norm(total))
    kept = clean_groups[0] if per_summand_terms is None else clean_groups
    return OneForm(total=total, per_summand=per, terms=kept, selfadjoint=sa)


def random_one_form(model, rng, n_terms=3, tol=DEFAULT_TOL):
    """Seeded selfadjoint one-form with random algebra coefficients."""
    alg = model.triple.algebra
    terms = []
    for _ in range(n_terms):
        ca = rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)
        cb = rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)
        terms.append((alg.combine(ca), alg.combine(cb)))
    return make_one_form(model, terms, symmetrize=True, tol=tol)


def _require_selfadjoint(form, tol):
    gap = op_norm(form.total - adjoint(form.total))
    if gap > tol * max(1.0, op_norm(form.total)):
        raise ConstructionError(f"one-form is not selfadjoint (||w - w*|| = {gap:.3e})")


def fluctuate_plain(model, form, tol=DEFAULT_TOL):
    """D_l -> D_l + omega_l with the twists unchanged."""
    _require_selfadjoint(form, tol)
    t, mt = model
    notes = list(model.notes)
    d = t.d + form.total
    grading, gsign = _keep_grading(t, d, tol, notes)
    t2 = RealSpectralTriple(t.algebra, d, t.j, t.epsilon_prime, grading, gsign)
    mt2 = MultitwistedStructure([Summand(s.d + w, s.nu) for s, w in zip(mt.summands, form.per_summand)])
    return MultitwistedTriple(
        t2,
        mt2,
        provenance=f"fluctuate-plain({model.provenance})",
        asserts=_asserts(grading is not None, ["mt_zero_order", "grading_twist", "mt_first_order", "regularity"]),
        notes=notes,
    )


def fluctuate_eps(model, form, tol=DEFAULT_TOL, regularity_tol=1e-8):
    """D_l -> D_l + omega_l + eps' nu_l J omega_l J^-1 nu_l, twists unchanged."""
    _require_selfadjoint(form, tol)
    t, mt = model
    bad = [e for e in check_regularity(t, mt, regularity_tol) if not e.passed]
    if bad:
        worst = max(e.relative_residual for e in bad)
        raise ConstructionError(f"input is not regular (relative residual {worst:.3e})")
    notes = list(model.notes) + [BOUNDEDNESS_NOTE]
    summands = []
    for ell, (s, w) in enumerate(zip(mt.summands, form.per_summand)):
        corr = t.epsilon_prime * s.nu @ al_conjugate(t.j, w) @ s.nu
        asym = op_norm(corr - adjoint(corr))
        notes.append(f"summand {ell}: ||correction - correction*|| = {asym:.3e}")
        summands.append(Summand(s.d + w + corr, s.nu))
    mt2 = MultitwistedStructure(summands)
    d = mt2.total()
    d_asym = op_norm(d - adjoint(d))
    notes.append(f"fluctuated D: ||D - D*|| = {d_asym:.3e}")
    grading, gsign = _keep_grading(t, d, tol, notes)
    t2 = RealSpectralTriple(t.algebra, d, t.j, t.epsilon_prime, grading, gsign)
    return MultitwistedTriple(
        t2,
        mt2,
        provenance=f"fluctuate-eps({model.provenance})",
        asserts=_asserts(
            grading is not None,
            ["mt_zero_order", "grading_twist", "mt_first_order", "mt_epsilon_prime", "regularity"],
        ),
        notes=notes,
    )


def commutator_gap(model_a, model_b):
    """(absolute, scale, relative) of max_{l,a} ||[A_l, a] - [B_l, a]|| over basis a."""
    basis = model_a.triple.algebra.basis
    worst, scale = 0.0, 0.0
    for sa, sb in zip(model_a.mt.summands, model_b.mt.summands):
        for a in basis:
            ca = sa.d @ a - a @ sa.d
            cb = sb.d @ a - a @ sb.d
            worst = max(worst, op_norm(ca - cb))
            scale = max(scale, op_norm(cb))
    scale = scale if scale > 0 else 1.0
    return worst, scale, worst / scale


def _check_positive(k, tol):
    lam, _ = herm_eig(k, tol=max(tol, 1e-9))
    if lam[0] <= POSITIVITY_RATIO * lam[-1]:
        raise ConstructionError(
            f"rescaling element is not positive with bounded inverse (eigenvalues in [{lam[0]:.3e}, {lam[-1]:.3e}])"
        )


def multiconformal_rescale(model, ks, tol=DEFAULT_TOL):
    """Rescale summand l by J k_l J^-1 on both sides; twist nu_l = k_l^-1 J k_l J^-1."""
    t, mt = model
    eye = np.eye(t.dim_h)
    if len(ks) != len(mt):
        raise ConstructionError(f"{len(ks)} rescaling elements for {len(mt)} summands")
    for ell, s in enumerate(mt.summands):
        if op_norm(s.nu - eye) > tol:
            raise ConstructionError(f"summand {ell} is already twisted")
    fo = check_mt_first_order(t, mt, 1e-8)
    if not all(e.passed for e in fo):
        raise ConstructionError("a summand violates the untwisted first-order condition")
    summands = []
    for ell, (s, k) in enumerate(zip(mt.summands, ks)):
        k = as_cmatrix(k)
        _check_positive(k, tol)
        if not _in_algebra(k, t.algebra, tol):
            raise ConstructionError(f"k_{ell} is not in the algebra (residual {membership_residual(k, t.algebra):.3e})")
        kj = al_conjugate(t.j, k)
        summands.append(Summand(kj @ s.d @ kj, inverse(k) @ kj))
    mt2 = MultitwistedStructure(summands)
    notes = list(model.notes)
    d = mt2.total()
    grading, gsign = _keep_grading(t, d, tol, notes)
    t2 = RealSpectralTriple(t.algebra, d, t.j, t.epsilon_prime, grading, gsign)
    return MultitwistedTriple(
        t2,
        mt2,
        provenance=f"multiconformal({model.provenance})",
        asserts=_asserts(
            grading is not None,
            ["zero_order", "mt_zero_order", "grading_twist", "mt_first_order", "mt_epsilon_prime", "regularity"],
        ),
        notes=notes,
    )


def clifford_algebra(t, tol=DEFAULT_TOL):
    """Closure of A together with the commutators [D, a]."""
    basis = list(t.algebra.basis)
    return span_closure(basis + [t.d @ a - a @ t.d for a in basis], tol=tol)


def clifford_direction(model, seed=0, tol=DEFAULT_TOL):
    """Unit-norm Hermitian gamma * y with y a seeded Hermitian element of A.

    Such an x lies outside A but commutes with its J-conjugate, which is what
    the twisted eps' identity needs from the rescaling factor.
    """
    t = model.triple
    if not t.is_even:
        raise ConstructionError("a Clifford direction gamma * y needs an even triple")
    rng = np.random.default_rng(seed)
    alg = t.algebra
    y = alg.combine(rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim))
    y = 0.5 * (y + adjoint(y))
    x = t.grading @ y
    x = 0.5 * (x + adjoint(x))
    cl = clifford_algebra(t, tol)
    if not _in_algebra(x, cl, 1e-8):
        raise ConstructionError("gamma * y is not in the Clifford algebra of this triple")
    return x / op_norm(x)


def clifford_rescale(model, k, tol=DEFAULT_TOL):
    """Single-twist rescaling D_k = JkJ^-1 D JkJ^-1, nu = k^-1 JkJ^-1 for k in Cl_D(A)."""
    t, _ = model
    k = as_cmatrix(k)
    cl = clifford_algebra(t, tol)
    res = membership_residual(k, cl)
    if res > 1e-8 * max(1.0, float(np.linalg.norm(k))):
        raise ConstructionError(f"k is not in the Clifford algebra (residual {res:.3e})")
    k_inv = inverse(k)
    notes = list(model.notes)
    if op_norm(k - adjoint(k)) > tol * op_norm(k):
        notes.append("k is not Hermitian: D_k need not be selfadjoint")
    else:
        lam, _ = herm_eig(k)
        if lam[0] <= POSITIVITY_RATIO * lam[-1]:
            notes.append("k is not positive")
    kj = al_conjugate(t.j, k)
    gap = op_norm(k @ kj - kj @ k)
    if gap > tol * op_norm(k) * op_norm(kj):
        notes.append(f"k does not commute with J k J^-1 (gap {gap:.3e}); twisted eps' is not guaranteed")
    d = kj @ t.d @ kj
    nu = k_inv @ kj
    grading, gsign = _keep_grading(t, d, tol, notes)
    t2 = RealSpectralTriple(t.algebra, d, t.j, t.epsilon_prime, grading, gsign)
    out = MultitwistedTriple(
        t2,
        MultitwistedStructure([Summand(d, nu)]),
        provenance=f"clifford({model.provenance})",
        asserts=_asserts(grading is not None, ["mt_zero_order", "mt_first_order", "mt_epsilon_prime", "regularity"]),
        notes=notes,
    )
    out.extras = {"k": k, "clifford_dim": cl.dim}
    return out


def automorphism_defect(model, summand=0):
    """max over basis b of the distance of nu(b) from A, with the worst index."""
    t, mt = model
    nu = mt.summands[summand].nu
    nu_inv = inverse(nu)
    vals = [membership_residual(twist_ad(nu, b, nu_inv), t.algebra) for b in t.algebra.basis]
    i = int(np.argmax(vals))
    return vals[i], i


def exp_element(algebra, scale, rng):
    """exp(scale * x) for a seeded Hermitian x in ``algebra`` of unit norm."""
    c = rng.standard_normal(algebra.dim) + 1j * rng.standard_normal(algebra.dim)
    x = algebra.combine(c)
    x = 0.5 * (x + adjoint(x))
    x = x / op_norm(x)
    lam, v = herm_eig(x)
    return (v * np.exp(scale * lam)) @ adjoint(v)


__all__ = [
    "CLASSICAL",
    "ConstructionError",
    "InvariantError",
    "OneForm",
    "automorphism_defect",
    "clifford_algebra",
    "clifford_direction",
    "clifford_rescale",
    "commutator_gap",
    "exp_element",
    "fluctuate_eps",
    "fluctuate_plain",
    "make_one_form",
    "multiconformal_rescale",
    "random_hermitian",
    "random_one_form",
    "tensor_product",
]
