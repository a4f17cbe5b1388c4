"""Finite "fuzzy" stand-ins for the torus examples.

The smooth noncommutative torus is replaced by the rational one
(theta = p/q) acting on its own GNS space: H0 = q x q matrices with the
Hilbert-Schmidt inner product, vectorized by column stacking. Derivations
are inner, d_j = ad(h_j). Every builder records this modelling gap in its
notes.
"""

from dataclasses import dataclass
from math import gcd

import numpy as np

from .algebra import span_closure
from .numat import (
    DEFAULT_TOL,
    PAULI,
    AntilinearOp,
    adjoint,
    al_conjugate,
    as_cmatrix,
    herm_exp,
    inverse,
    op_norm,
    principal_sqrt,
    random_hermitian,
)
from .triple import (
    CLASSICAL,
    STRUCTURAL,
    MultitwistedStructure,
    MultitwistedTriple,
    RealSpectralTriple,
    Summand,
)

SIGMA1, SIGMA2, SIGMA3 = PAULI
I2 = np.eye(2, dtype=np.complex128)

MODEL_NOTE = (
    "fuzzy model: rational theta = p/q on the finite GNS space; derivations modelled as inner ad(h_j)"
)


def structural_ids(even):
    return [c for c in STRUCTURAL if even or not c.startswith("grading_")]


def default_asserts(even, *groups):
    ids = structural_ids(even)
    for g in groups:
        ids += [c for c in g if c not in ids and (even or c != "grading_twist")]
    return tuple(ids)


TWISTED_EVEN = ["mt_zero_order", "grading_twist", "mt_first_order", "mt_epsilon_prime", "regularity"]


@dataclass(frozen=True)
class FuzzyModelParams:
    q: int = 2
    p: int = 1
    h_choice: str = "default"
    t: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"q must be at least 2, got {self.q}")
        if gcd(self.p, self.q) != 1:
            raise ValueError(f"p={self.p} and q={self.q} are not coprime")
        if self.h_choice not in ("default", "random"):
            raise ValueError(f"unknown h_choice {self.h_choice!r}")

    def describe(self):
        return f"q={self.q} p={self.p} h={self.h_choice} t={self.t!r} seed={self.seed}"


def clock_shift(q, p=1):
    """Clock and shift unitaries with ``S C = exp(2 pi i p / q) C S``."""
    if q < 1 or gcd(p, q) != 1:
        raise ValueError(f"p={p} and q={q} must be coprime")
    lam = np.exp(2j * np.pi * p / q)
    c = np.diag(lam ** np.arange(q)).astype(np.complex128)
    s = np.roll(np.eye(q, dtype=np.complex128), 1, axis=1)
    return c, s


def transposition(q):
    """Permutation P with ``P vec(X) = vec(X^T)`` for column stacking."""
    p = np.zeros((q * q, q * q), dtype=np.complex128)
    for i in range(q):
        for j in range(q):
            p[i + q * j, j + q * i] = 1.0
    return p


def leftmult(a):
    a = as_cmatrix(a)
    return np.kron(np.eye(a.shape[0]), a)


def rightmult(b):
    b = as_cmatrix(b)
    return np.kron(b.T, np.eye(b.shape[0]))


def ad(h):
    return leftmult(h) - rightmult(h)


def gns_space(q):
    """(leftmult, Tomita conjugation X -> X*) on the GNS space of M_q."""
    return leftmult, AntilinearOp(transposition(q), 1)


def derivation_generators(params):
    c, s = clock_shift(params.q, params.p)
    if params.h_choice == "random":
        rng = np.random.default_rng(params.seed)
        hs = [random_hermitian(params.q, rng) for _ in range(3)]
        return [h / op_norm(h) for h in hs]
    h3 = np.diag(np.arange(params.q)).astype(np.complex128)
    return [0.5 * (c + adjoint(c)), 0.5 * (s + adjoint(s)), h3]


def spinor_lift(spin, x):
    return np.kron(spin, x)


def torus_algebra(q, p=1):
    """Spinor-trivial left multiplications by the clock and shift, closed."""
    c, s = clock_shift(q, p)
    return span_closure([spinor_lift(I2, leftmult(c)), spinor_lift(I2, leftmult(s))])


def lift_element(k, q):
    """Accept an element of M_q or an operator on C^2 (x) H0."""
    k = as_cmatrix(k)
    if k.shape == (q, q):
        return spinor_lift(I2, leftmult(k))
    if k.shape == (2 * q * q, 2 * q * q):
        return k
    raise ValueError(f"element of shape {k.shape} fits neither M_{q} nor the Hilbert space")


def random_positive_element(q, rng, scale=0.5):
    """exp(scale * x) for a random Hermitian x in M_q of unit norm."""
    x = random_hermitian(q, rng)
    return herm_exp(scale * x / op_norm(x))


def _provenance(name, params, extra=""):
    return f"builder={name} {params.describe()}{(' ' + extra) if extra else ''}"


def fuzzy_torus2(params=None):
    """Even two-summand fuzzy torus, D = s1 (x) ad(h1) + s2 (x) ad(h2)."""
    params = params or FuzzyModelParams()
    q = params.q
    h1, h2, _ = derivation_generators(params)
    d1 = spinor_lift(SIGMA1, ad(h1))
    d2 = spinor_lift(SIGMA2, ad(h2))
    j = AntilinearOp(np.kron(1j * SIGMA2, transposition(q)), -1)
    t = RealSpectralTriple(
        algebra=torus_algebra(q, params.p),
        d=d1 + d2,
        j=j,
        epsilon_prime=1,
        grading=spinor_lift(SIGMA3, np.eye(q * q)),
        grading_sign=-1,
    )
    return MultitwistedTriple(
        t,
        MultitwistedStructure.untwisted([d1, d2]),
        provenance=_provenance("fuzzy-torus2", params),
        asserts=default_asserts(True, CLASSICAL, TWISTED_EVEN),
        notes=[MODEL_NOTE],
    )


def fuzzy_circle_even(q=2, p=1):
    """Even one-summand factor whose real structure commutes with the grading."""
    params = FuzzyModelParams(q=q, p=p)
    h1 = derivation_generators(params)[0]
    d = spinor_lift(SIGMA1, ad(h1))
    t = RealSpectralTriple(
        algebra=torus_algebra(q, p),
        d=d,
        j=AntilinearOp(np.kron(SIGMA3, transposition(q)), 1),
        epsilon_prime=1,
        grading=spinor_lift(SIGMA3, np.eye(q * q)),
        grading_sign=1,
    )
    return MultitwistedTriple(
        t,
        MultitwistedStructure.untwisted([d]),
        provenance=_provenance("fuzzy-circle-even", params),
        asserts=default_asserts(True, CLASSICAL, TWISTED_EVEN),
        notes=[MODEL_NOTE],
    )


def _torus3_parts(params):
    hs = derivation_generators(params)
    return [spinor_lift(s, ad(h)) for s, h in zip(PAULI, hs)]


def torus3_real_structure(q):
    return AntilinearOp(np.kron(SIGMA2, transposition(q)), -1)


def fuzzy_torus3(q=2, p=1, split=False, params=None):
    """Odd fuzzy 3-torus, D = sum_j s_j (x) ad(h_j); ``split`` gives one summand per direction."""
    params = params or FuzzyModelParams(q=q, p=p)
    parts = _torus3_parts(params)
    t = RealSpectralTriple(
        algebra=torus_algebra(params.q, params.p),
        d=sum(parts),
        j=torus3_real_structure(params.q),
        epsilon_prime=1,
    )
    mt = MultitwistedStructure.untwisted(parts if split else [sum(parts)])
    return MultitwistedTriple(
        t,
        mt,
        provenance=_provenance("fuzzy-torus3", params, f"split={int(split)}"),
        asserts=default_asserts(False, CLASSICAL, TWISTED_EVEN),
        notes=[MODEL_NOTE],
    )


def asymmetric_torus(params=None, k1=None, k2=None):
    """Fuzzy torus rescaled by J k_l J^-1 on each of its two summands.

    ``k1``/``k2`` may be elements of M_q or full operators; ``None`` draws a
    seeded random positive element.
    """
    from .constructions import multiconformal_rescale

    params = params or FuzzyModelParams()
    rng = np.random.default_rng(params.seed)
    ks = []
    for k in (k1, k2):
        # draw both so that the stream does not depend on which k is given
        drawn = random_positive_element(params.q, rng)
        ks.append(lift_element(drawn if k is None else k, params.q))
    base = fuzzy_torus2(params)
    out = multiconformal_rescale(base, ks)
    out.provenance = _provenance(
        "asymmetric-torus", params, "k1=" + ("random" if k1 is None else "given") + " k2=" + ("random" if k2 is None else "given")
    )
    out.asserts = default_asserts(True, ["zero_order"], TWISTED_EVEN)
    return out


def invariant_polynomials(params, h3):
    """Default U(1)-invariant stand-ins: seeded degree-2 polynomials in h3, scaled by t."""
    rng = np.random.default_rng(params.seed)
    coeffs = rng.uniform(-1.0, 1.0, size=(2, 3))
    hh = h3 / max(1.0, op_norm(h3))
    eye = np.eye(params.q)
    return [params.t * (c[0] * eye + c[1] * hh + c[2] * hh @ hh) for c in coeffs]


def circle_bundle(params=None, omega1=None, omega2=None, twist="full", tol=DEFAULT_TOL):
    """Fuzzy 3-torus as a circle bundle with connection-compatible Dirac operator.

    D = s1 ad(h1) + s2 ad(h2) + (J w J^-1) d3, w = s3 - s1 w1 - s2 w2, split into
    the horizontal part (untwisted) and the vertical part twisted by
    nu = w^-1/2 J w^1/2 J^-1 (principal branch). The fibre derivation d3 is
    oriented as -ad(h3), so that the flat connection (t = 0) reproduces
    ``fuzzy_torus3`` entrywise.

    ``twist="reduced"`` uses nu = w^-1/2 instead. It induces the same map
    b -> w^-1/2 b w^1/2 on the algebra, but its inverse map differs: with the
    full twist, nu^-1 b nu = S^-1 (w^1/2 b w^-1/2) S where S = J w^1/2 J^-1
    does not commute with Clifford elements.
    """
    if twist not in ("full", "reduced"):
        raise ValueError(f"unknown twist {twist!r}")
    params = params or FuzzyModelParams(q=3)
    q = params.q
    h1, h2, h3 = derivation_generators(params)
    defaults = invariant_polynomials(params, h3)
    omegas = [as_cmatrix(o) if o is not None else dflt for o, dflt in zip((omega1, omega2), defaults)]
    for i, o in enumerate(omegas, 1):
        if op_norm(o - adjoint(o)) > tol * max(1.0, op_norm(o)):
            raise ValueError(f"omega{i} is not Hermitian")
        gap = op_norm(o @ h3 - h3 @ o)
        if gap > tol * max(1.0, op_norm(o) * op_norm(h3)):
            raise ValueError(f"omega{i} does not commute with h3 (||[omega, h3]|| = {gap:.3e})")
    w1, w2 = omegas
    if op_norm(w1 @ w2 - w2 @ w1) > tol * max(1.0, op_norm(w1) * op_norm(w2)):
        raise ValueError("omega1 and omega2 do not commute")

    eye_h0 = np.eye(q * q)
    j = torus3_real_structure(q)
    w = spinor_lift(SIGMA3, eye_h0) - spinor_lift(SIGMA1, leftmult(w1)) - spinor_lift(SIGMA2, leftmult(w2))
    connection = spinor_lift(SIGMA1, leftmult(w1)) + spinor_lift(SIGMA2, leftmult(w2)) + spinor_lift(SIGMA3, eye_h0)
    fibre = spinor_lift(I2, -ad(h3))

    d_horizontal = spinor_lift(SIGMA1, ad(h1)) + spinor_lift(SIGMA2, ad(h2))
    d_vertical = al_conjugate(j, w) @ fibre
    root = principal_sqrt(w)
    nu2 = inverse(root) @ al_conjugate(j, root) if twist == "full" else inverse(root)
    t = RealSpectralTriple(
        algebra=torus_algebra(q, params.p),
        d=d_horizontal + d_vertical,
        j=j,
        epsilon_prime=1,
    )
    mt = MultitwistedStructure([Summand(d_horizontal, np.eye(t.dim_h, dtype=np.complex128)), Summand(d_vertical, nu2)])
    model = MultitwistedTriple(
        t,
        mt,
        provenance=_provenance("circle-bundle", params, f"twist={twist}"),
        asserts=default_asserts(False, ["zero_order", "mt_zero_order", "mt_first_order"]),
        notes=[
            MODEL_NOTE,
            "circle bundle: w^1/2 taken on the principal branch (i sqrt|lam| for lam < 0)",
            "circle bundle: twisted eps' and regularity are reported, not asserted",
        ],
    )
    model.extras = {"w": w, "connection": connection, "omega": (w1, w2), "sqrt_w": root}
    return model


BUILDERS = {
    "fuzzy-torus2": "fuzzy_torus2",
    "fuzzy-circle-even": "fuzzy_circle_even",
    "fuzzy-torus3": "fuzzy_torus3",
    "asymmetric-torus": "asymmetric_torus",
    "circle-bundle": "circle_bundle",
}
