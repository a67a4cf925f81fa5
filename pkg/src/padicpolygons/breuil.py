"""Strongly divisible lattices for the two-dimensional family (n1 = n2 = 1),
their verification, reduction mod p, the rank-2 classification recipes, the
tame inertia polygon, and the pseudo-module counterexample without the
monodromy operator.

The ambient module is D(L) = S_{K0} e_1 + S_{K0} e_2 with phi(e_i) = p e_i
and top filtration generated by L_2 e_1 + e_2.  The lattice is spanned by
f_1 = Z e_1 + e_2 and f_2 = p e_1, with Fil^2 generated by

    m(A) = A f_1 + (1/p) tronc_2(A (L_2 - Z)) f_2

for A running over p + tE(u) and U E(u), together with E(u)^2 f_1, f_2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import adapted, fontaine, polygons
from .arith import (INF, DivisibilityError, K0Elem, KElem, PrecisionError,
                    RingConfig, SK0Elem, STrunc)
from .polygons import Polygon


class VerificationError(ArithmeticError):
    """A postcondition of the lattice construction failed (bad input or
    exhausted precision)."""


class ClassificationError(ValueError):
    """The reduced object does not match any of the normalized shapes."""


# ---------------------------------------------------------------------------
# Normalization of the parameter L


@dataclass
class NormalizedL:
    """L' = p^shift * (L + translate) landing in case (i) or (ii)."""

    L: KElem
    case_tag: str            # "i" or "ii"
    j: int                   # e * v_p(L) in case (ii), else 0
    shift: int
    translate: K0Elem
    log: list


def normalize_L(L):
    """Reduce L through the isomorphisms L -> L + a (a in Q_p) and
    L -> p^n L until either v_p(L) = 0 with residue outside F_p (case i)
    or 0 < v_p(L) < 1 (case ii).

    Raises ValueError when L is indistinguishable from a Q_p element at
    working precision (the reduction would strip digits forever).
    """
    cfg = L.cfg
    shift = 0
    translate = cfg.k0(0)
    log = []
    cur = L
    for _ in range(cfg.e * cfg.prec + 2):
        v = cur.val_p()
        if v == INF:
            raise ValueError("L lies in Q_p at working precision")
        k = math.floor(v)
        if k != 0:
            cur = cur.mul_p_power(-k)
            shift -= k
            log.append(("scale", -k))
            v = v - k
        if 0 < v < 1:
            return NormalizedL(cur, "ii", int(v * cfg.e), shift, translate, log)
        res = cur.residue()
        if not res.in_prime_field():
            return NormalizedL(cur, "i", 0, shift, translate, log)
        c = res.coords[0] % cfg.p
        # subtracting c now translates the original L by -c * p^{-shift}
        if shift <= 0:
            delta = K0Elem(cfg.witt, cfg.witt.elem(-c).scale_p(-shift), 0)
        else:
            delta = K0Elem(cfg.witt, cfg.witt.elem(-c), shift)
        cur = cur - cfg.k_elem([c])
        translate = translate + delta
        log.append(("translate", -c))
    raise ValueError("L lies in Q_p at working precision")


# ---------------------------------------------------------------------------
# The family elements t, Z, U, V, B_1, B_2


@dataclass
class FamilyElements:
    cfg: object
    case_tag: str
    j: int
    v: object                # Fraction or INF
    v_exact: bool
    L: KElem                 # normalized parameter
    L0: STrunc               # degree-< e representative of L
    L1: STrunc
    lam: object              # WittElem: constant term of L0
    mu: object               # sigma(lam) - lam
    t: STrunc
    Z: STrunc
    U: STrunc
    V: STrunc
    B1: STrunc
    B2: STrunc
    PL2: STrunc              # p * L_2 as an element of S
    L2: SK0Elem
    warnings: list = field(default_factory=list)


def _as_integral_poly(cfg, x):
    """Degree-< e Witt-coefficient polynomial representing a K element."""
    return cfg.s(list(x.to_integral()))


def build_elements(params, norm):
    """Construct t, Z, U, V, B_1, B_2 for n1 = n2 = 1 and verify on the way:
    the three defining properties of t, the congruence Z = sigma(lambda)
    mod (p, Fil^2), and the case (ii) residue identities.  Any failure is a
    hard error."""
    cfg = params.cfg
    if (params.n1, params.n2) != (1, 1):
        raise ValueError("the lattice construction is implemented for "
                         "n1 = n2 = 1 only")
    if cfg.prec < params.r + 4:
        raise ValueError(f"precision {cfg.prec} is too small for the lattice "
                         f"pipeline (need >= {params.r + 4})")
    warnings = []
    L = norm.L
    case = norm.case_tag
    L0 = _as_integral_poly(cfg, L)
    lam = L0.coeffs[0]
    slam = lam.frobenius()
    mu = slam - lam

    # L_2 = L_0 + (1/p) L_1 E(u) with L_1(pi) = -p L_0'(pi)/E'(pi)
    L2 = fontaine.hermite_interpolant(L, 2)
    PL2 = L2.mul_p_power(1).to_strunc()
    L1 = (PL2 - L0.scale_p(1)).div_exact_E(1).tronc(1)

    if case == "i":
        if not mu.is_unit():
            raise VerificationError("case (i) needs sigma(lambda) - lambda "
                                    "to be a unit")
        denom = L0.mul_w(-1) + slam          # sigma(lambda) - L_0, a unit of S
        t = (L1 * denom.unit_inverse()).tronc(1)
    else:
        denom_pi = (-L0.mod_E()) + slam
        t = _as_integral_poly(cfg, L1.mod_E() * denom_pi.inverse())

    if ((L0.mul_w(-1) + slam) * t - L1).val_E() < 1:
        raise VerificationError("t does not satisfy its defining congruence")
    one_plus_cphit = cfg.s_one() + cfg.c * t.phi()
    if not one_plus_cphit.is_unit():
        raise VerificationError("1 + c phi(t) is not a unit")
    if case == "i" and t.coeffs[0].val() < 1:
        raise VerificationError("case (i) needs t in uS + pS")
    if case == "ii":
        expect = -(cfg.gf.elem(norm.j) *
                   (cfg.gf.elem(cfg.e) * cfg.c0.residue()).inverse())
        if t.coeffs[0].residue() != expect:
            raise VerificationError("constant term of t is not -j/(e c_0) mod p")

    # v = v_p(t(pi)); exact when L_0 is constant (then L_1 = 0 identically)
    if L0.degree() <= 0:
        if not t.is_zero():
            raise VerificationError("constant L_0 must give t = 0")
        v, v_exact = INF, True
    else:
        v = t.mod_E().val_p()
        v_exact = v != INF
        if not v_exact:
            warnings.append("t(pi) = 0 at working precision: "
                            "v = infinity is precision-bounded")

    Z = (L0.phi() + cfg.c * (t * cfg.s([slam])).phi()) * \
        one_plus_cphit.unit_inverse()
    if (Z + cfg.s([-slam])).tronc(2).val_p() < 1:
        raise VerificationError("Z - sigma(lambda) is not in pS + Fil^2 S")

    # U (L_0 - sigma(lambda)) = p + V E(u), both of degree < e
    diff = L0 + cfg.s([-slam])
    U = _as_integral_poly(cfg, diff.mod_E().inverse().mul_p_power(1))
    V = (U * diff + cfg.s([-cfg.p])).div_exact_E(1).tronc(1)
    if not ((U * diff) - (cfg.s([cfg.p]) + V * cfg.s_E())).is_zero():
        raise VerificationError("U, V do not satisfy U(L_0 - sigma(lambda)) "
                                "= p + V E(u)")
    if case == "ii":
        if V.coeffs[0].residue() != -cfg.c0.residue().inverse():
            raise VerificationError("constant term of V is not -1/c_0 mod p")

    slam_minus_Z = cfg.s([slam]) - Z
    B1 = diff + (t * slam_minus_Z).tronc(1).div_exact_p(1).shift_u(cfg.e)
    B2 = (cfg.s_one() +
          (U * slam_minus_Z).tronc(1).div_exact_p(1)).shift_u(cfg.e)

    return FamilyElements(cfg, case, norm.j, v, v_exact, L, L0, L1, lam, mu,
                          t, Z, U, V, B1, B2, PL2, L2, warnings)


# ---------------------------------------------------------------------------
# The lattice and its verification


@dataclass
class StrongLattice:
    """Lattice spanned by f_1 = Z e_1 + p^{n2-n1} e_2 and f_2 = p^n e_1,
    with its Fil^r generators stored as (f_1, f_2)-coordinate pairs."""

    cfg: object
    n1: int
    n2: int
    n: int
    Z: STrunc
    fil_gens: list           # [(name, (A, B))], or (name, Exception)
    elements: object = None  # FamilyElements when built from the family

    def e_coords(self, A, B):
        """(x, y) with A f_1 + B f_2 = x e_1 + y e_2."""
        x = A * self.Z + B.scale_p(self.n)
        y = A.scale_p(self.n2 - self.n1)
        return x, y

    def f_coords(self, x, y):
        """(A, B) with x e_1 + y e_2 = A f_1 + B f_2 (exact divisions)."""
        A = y.div_exact_p(self.n2 - self.n1) if self.n2 > self.n1 else y
        B = (x - A * self.Z).div_exact_p(self.n)
        return A, B


def _m_of(elements, A, Z=None):
    """m(A) = A f_1 + (1/p) tronc_2(A (L_2 - Z)) f_2, as (f_1, f_2)-coords."""
    Z = elements.Z if Z is None else Z
    Y = A * (elements.PL2 - Z.scale_p(1))
    B = Y.tronc(2).div_exact_p(2)
    return (A, B)


def strong_lattice(elements, n=1):
    """The strongly divisible lattice for n1 = n2 = 1 (so n = 1)."""
    if n != 1:
        raise ValueError("only n = 1 is constructed for n1 = n2 = 1")
    cfg = elements.cfg
    E = cfg.s_E()
    A1 = cfg.s([cfg.p]) + elements.t * E
    A2 = elements.U * E
    gens = [
        ("m(p+tE)", _m_of(elements, A1)),
        ("m(UE)", _m_of(elements, A2)),
        ("E^2*f1", (E * E, cfg.s_zero())),
        ("E^2*f2", (cfg.s_zero(), E * E)),
    ]
    return StrongLattice(cfg, 1, 1, 1, elements.Z, gens, elements)


def sabotaged_lattice(elements):
    """Negative control: the same construction with Z replaced by Z + 1.
    The m(A) division by p may fail; a failed generator is recorded and
    counts as a verification failure."""
    cfg = elements.cfg
    E = cfg.s_E()
    Zbad = elements.Z + cfg.s_one()
    gens = []
    for name, A in (("m(p+tE)", cfg.s([cfg.p]) + elements.t * E),
                    ("m(UE)", elements.U * E)):
        try:
            gens.append((name, _m_of(elements, A, Z=Zbad)))
        except (DivisibilityError, PrecisionError) as exc:
            gens.append((name, exc))
    gens.append(("E^2*f1", (E * E, cfg.s_zero())))
    gens.append(("E^2*f2", (cfg.s_zero(), E * E)))
    return StrongLattice(cfg, 1, 1, 1, Zbad, gens, elements)


@dataclass
class DivisibilityReport:
    entries: list            # (name, passed, detail)
    images_generate: bool
    phi2_images: list        # [(name, (TildePoly, TildePoly))] of passing gens

    @property
    def all_passed(self):
        return self.images_generate and all(ok for _, ok, _ in self.entries)


def verify_strong_divisibility(lat, r=2):
    """Check phi(g) in p^r M generator by generator, and that the divided
    images generate the reduction mod p."""
    entries = []
    images = []
    for name, data in lat.fil_gens:
        if isinstance(data, Exception):
            entries.append((name, False, f"construction failed: {data}"))
            continue
        A, B = data
        x, y = lat.e_coords(A, B)
        phix = x.phi().scale_p(lat.n1)
        phiy = y.phi().scale_p(lat.n2)
        try:
            fA, fB = lat.f_coords(phix, phiy)
        except (DivisibilityError, PrecisionError) as exc:
            entries.append((name, False, f"phi(g) is not in the lattice: {exc}"))
            continue
        vA, vB = fA.val_p(), fB.val_p()
        if vA >= r and vB >= r:
            entries.append((name, True, f"phi(g) in p^{r} M"))
            images.append((name, (fA.div_exact_p(r).reduce_mod_p(),
                                  fB.div_exact_p(r).reduce_mod_p())))
        else:
            entries.append((name, False,
                            f"phi(g) f-coordinate valuations ({vA}, {vB}) < {r}"))
    # the divided images must generate mod (p, u): some 2x2 minor is a unit
    gen_ok = False
    cols = [img for _, img in images]
    for i in range(len(cols)):
        for j in range(i + 1, len(cols)):
            det = cols[i][0] * cols[j][1] - cols[i][1] * cols[j][0]
            if det.is_unit():
                gen_ok = True
    return DivisibilityReport(entries, gen_ok, images)


# ---------------------------------------------------------------------------
# Reduction mod p


@dataclass
class TildeObject:
    """Rank-d object over k[u]/u^{ep}: filtration generators, their divided
    Frobenius images, and the monodromy marker."""

    cfg: object
    rank: int
    fil_gens: list           # list of coordinate tuples (TildePoly, ...)
    phi_images: list         # parallel list
    n_op: object = "zero"    # "zero" or a rank x rank matrix of TildePoly

    def n_of(self, vec):
        """Coordinate Leibniz monodromy against the stored basis action."""
        out = [c.monodromy() for c in vec]
        if self.n_op != "zero":
            for i in range(self.rank):
                for j in range(self.rank):
                    out[i] = out[i] + vec[j] * self.n_op[i][j]
        return tuple(out)


def _phi2_direct(lat, A, B):
    x, y = lat.e_coords(A, B)
    fA, fB = lat.f_coords(x.phi().scale_p(lat.n1), y.phi().scale_p(lat.n2))
    return (fA.div_exact_p(2).reduce_mod_p(), fB.div_exact_p(2).reduce_mod_p())


def _pairs_equal(a, b):
    return (a[0] - b[0]).is_zero() and (a[1] - b[1]).is_zero()


def reduce_mod_p(lat, report=None):
    """The mod-p object of a verified lattice, with the case-dependent pair
    of Fil^2 generators and both computations of their phi_2-images (direct
    reduction and the C-formula), which must agree."""
    elements = lat.elements
    if elements is None:
        raise ValueError("reduction needs the family elements")
    cfg = lat.cfg
    if report is None:
        report = verify_strong_divisibility(lat, r=2)
    if not report.all_passed:
        raise VerificationError("cannot reduce an unverified lattice")
    direct = dict(report.phi2_images)
    gens = dict(lat.fil_gens)
    E = cfg.s_E()
    A1 = cfg.s([cfg.p]) + elements.t * E
    g1 = tuple(c.reduce_mod_p() for c in gens["m(p+tE)"])
    if elements.case_tag == "i":
        A2 = E * E
        g2 = (A2.reduce_mod_p(), cfg.tilde_zero())
        img2 = _phi2_direct(lat, A2, cfg.s_zero())
    else:
        A2 = elements.U * E
        g2 = tuple(c.reduce_mod_p() for c in gens["m(UE)"])
        img2 = direct["m(UE)"]
    img1 = direct["m(p+tE)"]
    if not _pairs_equal(img1, phi2_image(A1, lat)) or \
            not _pairs_equal(img2, phi2_image(A2, lat)):
        raise VerificationError("direct phi_2 images disagree with the "
                                "C-formula")
    return TildeObject(cfg, 2, [g1, g2], [img1, img2])


def ideal_membership(A, elements):
    """Decompose A = s1 (p + tE) + s2 (U E) + Fil^2-part, or None.

    Constructive membership in the premise ideal: tronc_1(A) must be
    divisible by p, and the reduced E-coefficient divisible by U at pi.
    """
    cfg = elements.cfg
    A2 = A.tronc(2)
    try:
        A0 = A2.tronc(1).div_exact_p(1)
    except (DivisibilityError, PrecisionError):
        return None
    A1cand = (A2 - A0.scale_p(1)).div_exact_E(1).tronc(1)
    s1 = A0
    A1prime = A1cand - (A0 * elements.t).tronc(1)
    A1pi = A1prime.mod_E()
    if A1pi.is_zero():
        return s1, cfg.s_zero()
    ratio = A1pi * elements.U.mod_E().inverse()
    vr = ratio.val_p()
    if vr == INF or vr < 0:
        return None
    return s1, _as_integral_poly(cfg, ratio)


def phi2_image(A, lat):
    """phi_2 of m(A)-bar through the closed formula

        phi_2(m(A)) = (phi(A)/p) f_1 + C f_2,
        C = (phi tronc_2(A L_2) - phi(A) Z
             + sigma^2(lambda) phi(A - tronc_2(A))) / p^2.
    """
    elements = lat.elements
    if ideal_membership(A, elements) is None:
        raise ValueError("A is not in the premise ideal")
    term1 = (A * elements.PL2).tronc(2).phi().div_exact_p(1)
    term2 = A.phi() * elements.Z
    slam2 = elements.lam.frobenius().frobenius()
    term3 = (A - A.tronc(2)).phi().mul_w(slam2)
    C = (term1 - term2 + term3).div_exact_p(2)
    f1_coeff = A.phi().div_exact_p(1)
    return (f1_coeff.reduce_mod_p(), C.reduce_mod_p())


# ---------------------------------------------------------------------------
# Rank <= 2 classification and inertia polygons


def solve_eqX(rho, alpha, mu, e, j):
    """The unique X in k[u]/u^{ep} with

        rho X (-phi(alpha) + phi(X) u^{p((p+1)(e-j)-2e)}) = mu.

    rho, alpha, mu must be units and j < e; the correction term has strictly
    positive u-valuation, so fixed-point iteration stabilizes within ep
    steps, and the result is rechecked by substitution.  The constant term
    of X is that of -mu/(rho phi(alpha))."""
    cfg = rho.cfg
    ep = cfg.e * cfg.p
    if not (rho.is_unit() and alpha.is_unit() and mu.is_unit()):
        raise ValueError("rho, alpha, mu must be units")
    if j >= e:
        raise ValueError("need j < e")
    q = cfg.p * ((cfg.p + 1) * (e - j) - 2 * e)
    if q <= 0:
        raise ValueError("the correction exponent must be positive")
    phialpha = alpha.phi()
    X = -(mu * (rho * phialpha).unit_inverse())
    if q < ep:
        uq = cfg.tilde_u(q)
        for _ in range(ep // q + 2):
            Xn = mu * (rho * (-phialpha + X.phi() * uq)).unit_inverse()
            if (Xn - X).is_zero():
                break
            X = Xn
        check = rho * X * (-phialpha + X.phi() * uq)
    else:
        check = rho * X * (-phialpha)
    if not (check - mu).is_zero():
        raise ArithmeticError("fixed point failed to satisfy the equation")
    return X


def rank1_inertia_weight(s, e, r):
    """Tame inertia weight of a rank-1 object with Fil^r = u^s:
    the Hodge weight r - s/e."""
    if not 0 <= s <= e * r:
        raise ValueError(f"exponent {s} outside [0, {e * r}]")
    return Fraction(e * r - s, e)


def inertia_polygon(case_tag, v, e, r=2):
    """Slopes (1-v, 1+v) for 0 <= v < 1, and (0, 2) for v >= 1 or infinite."""
    if r != 2:
        raise ValueError("the family polygon is only defined for r = 2")
    if v == INF or v >= 1:
        return polygons.from_slopes([0, 2])
    v = Fraction(v)
    if v < 0:
        raise ValueError("v must be nonnegative")
    return polygons.from_slopes([1 - v, 1 + v])


@dataclass
class Classification:
    shape: str               # "0", "1" or "2"
    irreducible: bool
    slopes: tuple            # ascending pair of Fractions
    j: int = 0
    sub_generator: object = None   # coordinate pair of the rank-1 sub-object
    sub_fil_exponent: object = None
    checks: dict = field(default_factory=dict)


def _unit_part_or_none(x):
    return None if x.is_zero() else x.unit_part()


def _normalize_generators(obj):
    """Unit-rescale and order the two Fil^2 generators to one of the
    normalized shapes; returns (shape, data) or raises."""
    cfg = obj.cfg
    e = cfg.e
    if obj.rank != 2 or len(obj.fil_gens) != 2:
        raise ClassificationError("normalization needs a rank-2 object with "
                                  "two filtration generators")
    for first in (0, 1):
        second = 1 - first
        ga, ia = obj.fil_gens[first], obj.phi_images[first]
        gb, ib = obj.fil_gens[second], obj.phi_images[second]
        # shapes (0)/(1): gb a unit multiple of u^{2e} e_1, ga_2 a unit
        okb = (not gb[0].is_zero()) and gb[1].is_zero() and \
            gb[0].u_val() == 2 * e
        if okb and ga[1].is_unit():
            sa = ga[1].unit_inverse()
            gan = (ga[0] * sa, cfg.tilde_one())
            ian = (ia[0] * sa.phi(), ia[1] * sa.phi())
            _, gbu = gb[0].unit_part()
            sb = gbu.unit_inverse()
            ibn = (ib[0] * sb.phi(), ib[1] * sb.phi())
            if not (ian[0].is_unit() and ian[1].is_zero()):
                continue
            if not (ibn[0].is_zero() and ibn[1].is_unit()):
                continue
            mu_, rho = ian[0], ibn[1]
            if gan[0].is_zero():
                return "0", {"mu": mu_, "rho": rho}
            jv, aunit = gan[0].unit_part()
            if jv <= e:
                continue
            return "1", {"mu": mu_, "rho": rho, "alpha": aunit, "j": jv - e}
        # shape (2): valuation pattern (e, j) and (2e-j, e) with j < e
        pa0 = _unit_part_or_none(ga[0])
        pa1 = _unit_part_or_none(ga[1])
        pb0 = _unit_part_or_none(gb[0])
        pb1 = _unit_part_or_none(gb[1])
        if None in (pa0, pa1, pb0, pb1):
            continue
        if pa0[0] != e or pb1[0] != e:
            continue
        jv = pa1[0]
        if jv >= e or pb0[0] != 2 * e - jv:
            continue
        alpha, beta = pa0[1], pa1[1]
        gamma, delta = pb0[1], pb1[1]
        if not (alpha * delta - beta * gamma).is_unit():
            continue
        if not (ia[0].is_unit() and ia[1].is_zero()):
            continue
        rho = ib[1]
        if not rho.is_unit():
            continue
        qexp = cfg.p * (e - jv)
        if qexp >= cfg.e * cfg.p:
            if not ib[0].is_zero():
                continue
            sigma = None
        else:
            try:
                sigma = ib[0].div_exact_u(qexp)
            except DivisibilityError:
                continue
        return "2", {"mu": ia[0], "rho": rho, "sigma": sigma, "alpha": alpha,
                     "beta": beta, "gamma": gamma, "delta": delta, "j": jv}
    raise ClassificationError(
        "generators do not match any normalized shape: "
        + "; ".join(f"gen{i}=(u-val {g[0].u_val()}, u-val {g[1].u_val()})"
                    for i, g in enumerate(obj.fil_gens)))


def _phi2_of_member(obj, vec):
    """phi_2 of an element of Fil^2 expressed against the generators."""
    carrier = adapted.UCarrier(obj.cfg)
    coeffs = adapted.solve_in_span([list(g) for g in obj.fil_gens],
                                   list(vec), carrier)
    if coeffs is None:
        return None
    out = [obj.cfg.tilde_zero(), obj.cfg.tilde_zero()]
    for s, img in zip(coeffs, obj.phi_images):
        fs = s.phi()
        out[0] = out[0] + fs * img[0]
        out[1] = out[1] + fs * img[1]
    return tuple(out)


def _proportional_unit(a, b):
    """Unit lambda with a = lambda * b, or None."""
    if (a[0] * b[1] - a[1] * b[0]).is_zero():
        for i in (0, 1):
            if b[i].is_unit():
                lam = a[i] * b[i].unit_inverse()
                return lam if lam.is_unit() else None
    return None


def classify_rank2(obj):
    """Classify a rank-2 reduced object against the three normalized shapes.

    Reducible cases return the rank-1 sub-object generator m with Fil^2 of
    the sub-object equal to u^{sub_fil_exponent} times it; its membership,
    the unit proportionality of phi_2, and N-stability are verified.
    Unrecognized shapes raise (no guessing)."""
    cfg = obj.cfg
    e = cfg.e
    ep = cfg.e * cfg.p
    shape, data = _normalize_generators(obj)
    checks = {}
    if shape == "0":
        return Classification("0", True, (Fraction(0), Fraction(2)))
    if shape == "1":
        j = data["j"]
        if j >= e:
            return Classification("1", True, (Fraction(0), Fraction(2)), j=j)
        X = solve_eqX(data["rho"], data["alpha"], data["mu"], e, j)
        checks["X_unit"] = X.is_unit()
        qexp = cfg.p * (e - j)
        m_vec = (X * cfg.tilde_u(qexp) if qexp < ep else cfg.tilde_zero(),
                 cfg.tilde_one())
        sub_exp = e - j
        slopes = (1 - Fraction(j, e), 1 + Fraction(j, e))
    else:
        j = data["j"]
        qexp = cfg.p * (e - j)
        if qexp >= ep or data["sigma"] is None:
            X = cfg.tilde_zero()
        else:
            num = data["alpha"].phi() * data["sigma"] - \
                data["gamma"].phi() * data["mu"]
            X = num * (data["rho"] * data["alpha"].phi()).unit_inverse()
        m_vec = (X * cfg.tilde_u(qexp) if qexp < ep else cfg.tilde_zero(),
                 cfg.tilde_one())
        sub_exp = e
        slopes = (Fraction(1), Fraction(1))

    # the sub-object: Fil^2 M' = u^{sub_exp} M', generated by u^{sub_exp} m
    gen_fil = tuple(c.shift_u(sub_exp) for c in m_vec)
    img = _phi2_of_member(obj, gen_fil)
    checks["fil_member"] = img is not None
    lam = _proportional_unit(img, m_vec) if img is not None else None
    checks["phi2_proportional_unit"] = lam is not None
    # N-stability through the commutation rule: phi_2(u^e N(u^{sub_exp} m)) = 0
    nvec = obj.n_of(gen_fil)
    nshift = tuple(c.shift_u(e) for c in nvec)
    nimg = _phi2_of_member(obj, nshift)
    checks["n_stable"] = nimg is not None and nimg[0].is_zero() and \
        nimg[1].is_zero()
    if not all(checks.values()):
        raise ClassificationError(f"sub-object verification failed: {checks}")
    return Classification(shape, False, tuple(sorted(slopes)), j=j,
                          sub_generator=m_vec, sub_fil_exponent=sub_exp,
                          checks=checks)


# ---------------------------------------------------------------------------
# End-to-end family analysis


@dataclass
class FamilyAnalysis:
    cfg: object
    params: object
    norm: NormalizedL
    elements: FamilyElements
    lattice: StrongLattice
    report: DivisibilityReport
    tilde: TildeObject
    classification: Classification
    hodge_V: Polygon
    newton_V: Polygon
    hodge_Mbar: Polygon
    inertia: Polygon
    exponents_E: list
    exponents_u: list
    verdicts: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def all_passed(self):
        return all(ok for _, ok, _ in self.verdicts)


def _family_exponents(cfg, lat):
    """Adapted exponents of Fil^2 on the E(u)-adic and u-adic carriers."""
    ec = adapted.ECarrier(cfg)
    # (p L_2, p) spans the same K0[u]/E^p-submodule as the true generator
    E2 = cfg.s_E() * cfg.s_E()
    cols_E = [
        (lat.elements.PL2, cfg.s([cfg.p])),
        (E2, cfg.s_zero()),
        (cfg.s_zero(), E2),
    ]
    exps_E = adapted.divisor_exponents(
        [[c[i] for c in cols_E] for i in range(2)], ec)
    uc = adapted.UCarrier(cfg)
    u2e = cfg.tilde_u(2 * cfg.e)
    cols_u = [tuple(c.reduce_mod_p() for c in data)
              for _, data in lat.fil_gens if not isinstance(data, Exception)]
    cols_u += [(u2e, cfg.tilde_zero()), (cfg.tilde_zero(), u2e)]
    exps_u = adapted.divisor_exponents(
        [[c[i] for c in cols_u] for i in range(2)], uc)
    return exps_E, exps_u


def analyze_family(params):
    """Run the whole pipeline on one admissible family instance and collect
    every instance check the comparison theorems make."""
    cfg = params.cfg
    D = fontaine.family_module(params)
    hodge_V = fontaine.hodge_polygon(D)
    newton_V = fontaine.newton_polygon_phi(D)
    norm = normalize_L(params.L)
    elements = build_elements(params, norm)
    lat = strong_lattice(elements)
    report = verify_strong_divisibility(lat, r=2)
    tilde = reduce_mod_p(lat, report)
    classification = classify_rank2(tilde)
    exps_E, exps_u = _family_exponents(cfg, lat)
    hodge_Mbar = polygons.from_slopes(
        adapted.hodge_weights(exps_u, 2, cfg.e, "modp"))
    inertia = inertia_polygon(elements.case_tag, elements.v, cfg.e)

    verdicts = []
    vL = norm.L.val_p()
    verdicts.append((
        "weakly_admissible",
        fontaine.weakly_admissible_dim2(D, family=params),
        "closed-form family criterion"))
    verdicts.append((
        "newton_above_hodge_V",
        polygons.lies_above(newton_V, hodge_V) and
        polygons.same_endpoint(newton_V, hodge_V),
        f"Newton {newton_V.slopes} vs Hodge {hodge_V.slopes}"))
    expected_Mbar = polygons.from_slopes([vL, 2 - vL])
    verdicts.append((
        "hodge_Mbar_equals_vL",
        hodge_Mbar == expected_Mbar,
        f"Hodge(Mbar) {hodge_Mbar.slopes} vs (v_p(L), 2 - v_p(L)) "
        f"{expected_Mbar.slopes}"))
    h_sums = [cfg.e * hodge_V.ordinate(k) for k in (1, 2)]
    i_sums = [cfg.e * inertia.ordinate(k) for k in (1, 2)]
    verdicts.append((
        "inertia_above_hodge_thm",
        h_sums[0] <= i_sums[0] and h_sums[1] == i_sums[1],
        f"e*(h-sums) {h_sums} vs i-sums {i_sums}"))
    verdicts.append((
        "inertia_above_hodge_Mbar",
        polygons.lies_above(inertia, hodge_Mbar) and
        polygons.same_endpoint(inertia, hodge_Mbar),
        f"inertia {inertia.slopes} vs Hodge(Mbar) {hodge_Mbar.slopes}"))
    # first-slope coincidence: wherever Hodge and Newton agree up to k, the
    # inertia slope is pinned to them
    coincide_ok = True
    for k in range(1, 3):
        if all(hodge_V.slopes[i] == newton_V.slopes[i] for i in range(k)):
            if inertia.slopes[k - 1] != cfg.e * hodge_V.slopes[k - 1]:
                coincide_ok = False
    verdicts.append((
        "newton_coincidence_thm",
        coincide_ok,
        f"Hodge {hodge_V.slopes}, Newton {newton_V.slopes}, "
        f"inertia {inertia.slopes}"))
    verdicts.append((
        "strong_divisibility",
        report.all_passed,
        "; ".join(f"{n}: {'ok' if ok else d}" for n, ok, d in report.entries)))
    verdicts.append((
        "classification_matches_v",
        tuple(classification.slopes) == tuple(inertia.slopes),
        f"classified {classification.slopes}, v gives {inertia.slopes}"))
    desc_E = sorted(exps_E, reverse=True)
    desc_u = sorted(exps_u, reverse=True)
    step_ok = all(
        cfg.e * sum(desc_E[k:]) <= sum(desc_u[k:]) for k in range(2)) and \
        cfg.e * sum(desc_E) == sum(desc_u)
    verdicts.append((
        "exponent_comparison_step",
        step_ok,
        f"e * {desc_E} against {desc_u}"))

    return FamilyAnalysis(cfg, params, norm, elements, lat, report, tilde,
                          classification, hodge_V, newton_V, hodge_Mbar,
                          inertia, exps_E, exps_u, verdicts,
                          list(elements.warnings))


# ---------------------------------------------------------------------------
# The pseudo-module counterexample (no monodromy operator)


@dataclass
class PseudoAnalysis:
    cfg: object
    n: int
    r: int
    hodge_Mbar: Polygon
    newton: Polygon
    inertia_bound: Polygon
    exponents: list
    verdicts: list
    strict_at_1: bool
    coincide: bool

    @property
    def all_passed(self):
        return all(ok for _, ok, _ in self.verdicts)


def pseudo_counterexample(n, p, prec=None):
    """The rank-2 pseudo-module with e = 1, E(u) = u - p, r = 2n:
    Fil^r generated by E^n e_1, p e_1 + E^n e_2 (and Fil^p), with
    phi(e_1) = c^n p^n e_2 and phi(e_2) = c^n p^n e_1 - p e_2.

    Its mod-p Hodge polygon is (n, n), which forces the tame inertia polygon
    to equal (n, n) as well, while the Frobenius slopes are (1, r-1):
    strictly below the inertia bound at k = 1 once n >= 2."""
    r = 2 * n
    if r >= p - 1:
        raise ValueError("need 2n < p - 1")
    cfg = RingConfig(p, 1, 1, [-p, 1], prec=prec, r=r)
    E = cfg.s_E()
    En = cfg.s_one()
    cpow = cfg.s_one()
    for _ in range(n):
        En = En * E
        cpow = cpow * cfg.c

    # mod-p adapted exponents of Fil^r
    uc = adapted.UCarrier(cfg)
    ur = cfg.tilde_u(r)
    cols = [
        (En.reduce_mod_p(), cfg.tilde_zero()),
        (cfg.tilde([p]), En.reduce_mod_p()),
        (ur, cfg.tilde_zero()),
        (cfg.tilde_zero(), ur),
    ]
    exps = adapted.divisor_exponents([[c[i] for c in cols] for i in range(2)],
                                     uc)
    hodge_Mbar = polygons.from_slopes(
        adapted.hodge_weights(exps, r, 1, "modp"))
    inertia_bound = hodge_Mbar

    # Newton polygon of the Frobenius matrix over K0 (u -> 0 sends c to c(0))
    c0n_pn = K0Elem(cfg.witt, cpow.constant_term().scale_p(n), 0)
    zero = K0Elem(cfg.witt, cfg.witt.zero(), 0)
    minus_p = K0Elem(cfg.witt, cfg.witt.elem(-p), 0)
    phi = ((zero, c0n_pn), (c0n_pn, minus_p))
    coeffs = fontaine._charpoly_k0(cfg, phi, 2)
    newton = polygons.newton_polygon([c.val_p() for c in coeffs])

    # strong divisibility of the two main filtration generators
    cnpn = cpow.scale_p(n)
    sd = []
    for x, y in ((En, cfg.s_zero()), (cfg.s([p]), En)):
        imx = y.phi() * cnpn
        imy = x.phi() * cnpn - y.phi().scale_p(1)
        sd.append(imx.val_p() >= r and imy.val_p() >= r)

    verdicts = [
        ("hodge_Mbar_is_n_n",
         hodge_Mbar == polygons.from_slopes([n, n]),
         f"exponents {exps} give {hodge_Mbar.slopes}"),
        ("newton_is_1_rminus1",
         newton == polygons.from_slopes([1, r - 1]),
         f"Newton {newton.slopes}"),
        ("strong_divisibility",
         all(sd),
         f"phi(Fil^r) in p^{r} M: {sd}"),
    ]
    strict = newton.ordinate(1) < inertia_bound.ordinate(1)
    coincide = newton == inertia_bound
    if n >= 2:
        verdicts.append((
            "newton_strictly_below_inertia",
            strict and polygons.same_endpoint(newton, inertia_bound),
            f"Newton ordinate {newton.ordinate(1)} < bound "
            f"{inertia_bound.ordinate(1)} at k = 1"))
    else:
        verdicts.append((
            "degenerate_coincidence",
            coincide,
            "n = 1: the polygons coincide"))
    return PseudoAnalysis(cfg, n, r, hodge_Mbar, newton, inertia_bound,
                          exps, verdicts, strict, coincide)
