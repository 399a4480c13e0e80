"""Symbolic-then-numeric evaluation of the sharp constants.

Every constant is a `GammaProduct`: rational prefactor, powers of pi and 2,
a product of Gamma factors with real exponents, and (for the logarithmic
uncertainty bound) affine digamma / log terms.  Evaluation happens in
log-space so large Gamma arguments never overflow.

Several constants are stored in two variants: the internally consistent
one (used by the verifier) and a `_printed` companion preserving an
alternative normalization that the numerical identity checks reject.
`consistency_suite` exercises the cross-constant relations tying the
family together.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable

from .report import VerificationReport
from .specfn import digamma, log_gamma, sphere_measure

__all__ = [
    "GammaProduct",
    "ConstantId",
    "ConstraintViolation",
    "constant",
    "formula",
    "gamma_product",
    "parse_gamma_product",
    "constant_ids",
    "constant_info",
    "consistency_suite",
]


class ConstraintViolation(ValueError):
    """A theorem's parameter constraint failed; `.relation` names it."""

    def __init__(self, relation: str):
        super().__init__(f"parameter constraint violated: requires {relation}")
        self.relation = relation


class GammaPoleError(ArithmeticError):
    pass


def _signed_log_gamma(x: float) -> tuple[float, float]:
    """(sign, log|Gamma(x)|), extending to negative non-integer x by reflection."""
    if x > 0:
        return 1.0, log_gamma(x)
    if x == math.floor(x):
        raise GammaPoleError(f"Gamma pole at argument {x!r}")
    # Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
    s = math.sin(math.pi * x)
    sign = 1.0 if s > 0 else -1.0
    return sign, math.log(math.pi) - math.log(abs(s)) - log_gamma(1.0 - x)


@dataclass(frozen=True)
class GammaProduct:
    """c * pi^a * 2^b * prod Gamma(x_i)^{e_i}  [+ affine digamma/log terms]."""

    rational_prefactor: Fraction = Fraction(1)
    pi_exponent: float = 0.0
    two_exponent: float = 0.0
    gamma_terms: tuple[tuple[float, float], ...] = ()
    digamma_terms: tuple[tuple[float, float], ...] = ()  # (coefficient, argument)
    log_pi_coeff: float = 0.0
    log_two_coeff: float = 0.0

    # -- evaluation ----------------------------------------------------

    def _product_sign_log(self) -> tuple[float, float]:
        if self.rational_prefactor == 0:
            return 0.0, -math.inf
        sign = 1.0 if self.rational_prefactor > 0 else -1.0
        total = (
            math.log(abs(float(self.rational_prefactor)))
            + self.pi_exponent * math.log(math.pi)
            + self.two_exponent * math.log(2.0)
        )
        for arg, expo in self.gamma_terms:
            s, lg = _signed_log_gamma(arg)
            if s < 0:
                if expo == math.floor(expo):
                    if int(expo) % 2:
                        sign = -sign
                else:
                    raise GammaPoleError(
                        f"negative Gamma({arg!r}) under non-integer exponent {expo!r}"
                    )
            total += expo * lg
        return sign, total

    def value(self) -> float:
        """Numeric value via summed log terms plus affine extensions."""
        out = 0.0
        if self.rational_prefactor != 0:
            sign, total = self._product_sign_log()
            out = sign * math.exp(total)
        for coeff, arg in self.digamma_terms:
            out += coeff * digamma(arg)
        out += self.log_pi_coeff * math.log(math.pi)
        out += self.log_two_coeff * math.log(2.0)
        return out

    def value_direct(self) -> float:
        """Same value by multiplying the factors one by one (cross-check path)."""
        out = 0.0
        if self.rational_prefactor != 0:
            acc = float(self.rational_prefactor)
            acc *= math.pi**self.pi_exponent
            acc *= 2.0**self.two_exponent
            for arg, expo in self.gamma_terms:
                s, lg = _signed_log_gamma(arg)
                acc *= s ** (int(expo) if expo == math.floor(expo) else 1) * math.exp(expo * lg)
            out = acc
        for coeff, arg in self.digamma_terms:
            out += coeff * digamma(arg)
        out += self.log_pi_coeff * math.log(math.pi)
        out += self.log_two_coeff * math.log(2.0)
        return out

    # -- algebra (product parts only) ----------------------------------

    def __mul__(self, other: "GammaProduct") -> "GammaProduct":
        if self.digamma_terms or other.digamma_terms or self.log_pi_coeff or other.log_pi_coeff \
                or self.log_two_coeff or other.log_two_coeff:
            raise ValueError("cannot multiply GammaProducts with affine terms")
        merged: dict[float, float] = {}
        for arg, expo in self.gamma_terms + other.gamma_terms:
            merged[arg] = merged.get(arg, 0.0) + expo
        terms = tuple(sorted((a, e) for a, e in merged.items() if e != 0.0))
        return GammaProduct(
            self.rational_prefactor * other.rational_prefactor,
            self.pi_exponent + other.pi_exponent,
            self.two_exponent + other.two_exponent,
            terms,
        )

    def scaled(self, c: Fraction | int) -> "GammaProduct":
        return replace(self, rational_prefactor=self.rational_prefactor * Fraction(c))

    # -- printing / parsing --------------------------------------------

    def print_formula(self) -> str:
        parts = []
        if self.rational_prefactor != 0:
            frac = self.rational_prefactor
            if frac.denominator < 10**6 and frac.numerator < 10**12:
                parts.append(f"{frac.numerator}/{frac.denominator}" if frac.denominator != 1 else f"{frac.numerator}")
            else:
                parts.append(repr(float(frac)))
            if self.pi_exponent:
                parts.append(f"pi^{self.pi_exponent!r}")
            if self.two_exponent:
                parts.append(f"2^{self.two_exponent!r}")
            for arg, expo in self.gamma_terms:
                parts.append(f"G({arg!r})^{expo!r}")
        prod = " * ".join(parts) if parts else "0"
        tail = []
        for coeff, arg in self.digamma_terms:
            tail.append(f"{coeff!r}*psi({arg!r})")
        if self.log_pi_coeff:
            tail.append(f"{self.log_pi_coeff!r}*ln(pi)")
        if self.log_two_coeff:
            tail.append(f"{self.log_two_coeff!r}*ln(2)")
        return prod + ("" if not tail else " + " + " + ".join(tail))


_TOKEN = re.compile(
    r"""^(?:
        (?P<frac>-?\d+(?:/\d+)?) |
        (?P<float>-?\d+\.\d+(?:e-?\d+)?) |
        pi\^(?P<pi>[-\d.e]+) |
        2\^(?P<two>[-\d.e]+) |
        G\((?P<garg>[-\d.e]+)\)\^(?P<gexp>[-\d.e]+)
    )$""",
    re.VERBOSE,
)


def parse_gamma_product(text: str) -> GammaProduct:
    """Invert `print_formula`; round-trips within 1e-15 (exactly, in fact)."""
    text = text.strip()
    affine = text.split(" + ")
    prod_part = affine[0]
    pre = Fraction(1)
    pi_e = 0.0
    two_e = 0.0
    gammas: list[tuple[float, float]] = []
    digammas: list[tuple[float, float]] = []
    logpi = 0.0
    log2 = 0.0
    if prod_part != "0":
        for tok in prod_part.split(" * "):
            m = _TOKEN.match(tok.strip())
            if not m:
                raise ValueError(f"cannot parse token {tok!r}")
            if m.group("frac") is not None:
                if "/" in m.group("frac"):
                    num, den = m.group("frac").split("/")
                    pre = Fraction(int(num), int(den))
                else:
                    pre = Fraction(int(m.group("frac")))
            elif m.group("float") is not None:
                pre = Fraction(float(m.group("float")))
            elif m.group("pi") is not None:
                pi_e = float(m.group("pi"))
            elif m.group("two") is not None:
                two_e = float(m.group("two"))
            else:
                gammas.append((float(m.group("garg")), float(m.group("gexp"))))
    else:
        pre = Fraction(0)
    for term in affine[1:]:
        term = term.strip()
        if term.endswith("*ln(pi)"):
            logpi = float(term[: -len("*ln(pi)")])
        elif term.endswith("*ln(2)"):
            log2 = float(term[: -len("*ln(2)")])
        else:
            m = re.match(r"^(?P<c>[-\d.e]+)\*psi\((?P<a>[-\d.e]+)\)$", term)
            if not m:
                raise ValueError(f"cannot parse affine term {term!r}")
            digammas.append((float(m.group("c")), float(m.group("a"))))
    return GammaProduct(pre, pi_e, two_e, tuple(gammas), tuple(digammas), logpi, log2)


# ----------------------------------------------------------------------
# constant registry
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantId:
    name: str
    params: dict

    def key(self) -> tuple:
        return (self.name, tuple(sorted((k, tuple(v) if isinstance(v, (list, tuple)) else v) for k, v in self.params.items())))


@dataclass(frozen=True)
class ConstantSpec:
    name: str
    param_names: tuple[str, ...]
    statement: str
    build: Callable[[dict], GammaProduct]
    sharp: bool = True


def _req(cond: bool, relation: str) -> None:
    if not cond:
        raise ConstraintViolation(relation)


def _gp(pre=1, pi=0.0, two=0.0, num: Iterable[float] = (), den: Iterable[float] = (), powers: Iterable[tuple[float, float]] = ()) -> GammaProduct:
    terms = [(float(a), 1.0) for a in num] + [(float(a), -1.0) for a in den] + [(float(a), float(e)) for a, e in powers]
    merged: dict[float, float] = {}
    for a, e in terms:
        merged[a] = merged.get(a, 0.0) + e
    return GammaProduct(Fraction(pre), float(pi), float(two), tuple(sorted((a, e) for a, e in merged.items() if e)))


def _alphas(params: dict, m: int) -> list[float]:
    a = params["alpha"]
    if isinstance(a, (int, float)):
        a = [float(a)] * m
    a = [float(x) for x in a]
    _req(len(a) == m, "len(alpha) = m")
    return a


# -- individual builders (formulas verified by the identity suite) ------


def _b_gamma_alpha_n(p: dict) -> GammaProduct:
    n, a = p["n"], p["alpha"]
    _req(n >= 1, "n >= 1")
    _req(0 < a < 2, "0 < alpha < 2")
    return _gp(Fraction(a) / 2, pi=-a - n / 2, num=[(n + a) / 2], den=[1 - a / 2])


def _b_D_beta(p: dict) -> GammaProduct:
    n, b = p["n"], p["beta"]
    _req(n >= 1, "n >= 1")
    _req(0 < b < 2, "0 < beta < 2 (difference-quotient identity; iterated use further needs beta < n)")
    return _gp(Fraction(4) / Fraction(b), pi=n / 2 + b, num=[1 - b / 2], den=[(n + b) / 2])


def _b_D_beta_printed(p: dict) -> GammaProduct:
    g = _b_D_beta(p)
    return replace(g, pi_exponent=g.pi_exponent - p["n"])


def _b_C_pitt_weight(p: dict) -> GammaProduct:
    n, b = p["n"], p["beta"]
    _req(0 < b < n, "0 < beta < n")
    return _gp(1, pi=b, powers=[((n - b) / 4, 2.0), ((n + b) / 4, -2.0)])


def _b_mult_pitt_factor(p: dict) -> GammaProduct:
    n, a = p["n"], p["alpha"]
    _req(0 < a < min(1.0, n / 2), "0 < alpha < min{1, n/2}")
    d = _b_D_beta({"n": n, "beta": 2 * a})
    c = _b_C_pitt_weight({"n": n, "beta": 2 * a})
    inv_c = _gp(1, pi=-c.pi_exponent, powers=[(arg, -e) for arg, e in c.gamma_terms])
    return d * inv_c


def _b_c_n2(p: dict) -> GammaProduct:
    n, b = p["n"], p["beta"]
    _req(0 < b < 1, "0 < beta < 1")
    _req(b < n / 2, "beta < n/2")
    return _gp(Fraction(2) / Fraction(b), pi=n / 2 + b,
               num=[1 - b], den=[n / 2 - b],
               powers=[(n / 2, 2 * b / n), (n, -2 * b / n)])


def _b_c_n2_printed(p: dict) -> GammaProduct:
    g = _b_c_n2(p)
    return replace(g, pi_exponent=0.0)


def _b_C_diag_pitt(p: dict) -> GammaProduct:
    n, m = p["n"], int(p["m"])
    al = _alphas(p, m)
    asum = sum(al)
    beta = n - m * n + 2 * asum
    _req(0 < beta < n, "0 < beta < n with n - beta = m n - 2 sum(alpha)")
    for a in al:
        _req(0 < a < n / 2, "0 < alpha_k < n/2")
    g = _gp(1, pi=-(m - 1) * n / 2 + 2 * asum,
            num=[beta / 2], den=[(n - beta) / 2],
            powers=[((n - beta) / 4, 2.0), ((n + beta) / 4, -2.0)])
    for a in al:
        g = g * _gp(1, num=[n / 2 - a], den=[a])
    return g


def _b_F_diag_hls(p: dict) -> GammaProduct:
    n, m = p["n"], int(p["m"])
    al = _alphas(p, m)
    asum = sum(al)
    _req((m - 1) * n / 2 < asum < m * n / 2, "(m-1)n/2 < sum(alpha) < mn/2 (i.e. q > 2... with mn - 2 alpha = 2n/q)")
    for a in al:
        _req(0 < a < n / 2, "0 < alpha_k < n/2")
    g = _gp(1, pi=asum,
            num=[asum - (m - 1) * n / 2], den=[asum - (m - 2) * n / 2],
            powers=[(n, (2 * asum - (m - 1) * n) / n), (n / 2, -(2 * asum - (m - 1) * n) / n)])
    for a in al:
        g = g * _gp(1, num=[n / 2 - a], den=[a])
    return g


def _b_K_sphere(p: dict) -> GammaProduct:
    n, m = p["n"], int(p["m"])
    _req(n > 1, "n > 1")
    al = _alphas(p, m)
    asum = sum(al)
    q = 2 * (n - 1) / (m * n - 2 * asum) if m * n - 2 * asum > 0 else math.inf
    _req(m * n - 2 * asum > 0 and q > 2, "m n - 2 sum(alpha) = 2(n-1)/q with q > 2")
    for a in al:
        _req(0 < a < n / 2, "0 < alpha_k < n/2")
    pp = q / (q - 1)
    g = _gp(1, pi=2 * asum - m * n / 2, two=2 * asum - m * n,
            num=[n - 1, (n - 1) * (0.5 - 1 / q)], den=[(n - 1) / 2, (n - 1) / pp])
    for a in al:
        g = g * _gp(1, num=[n / 2 - a], den=[a])
    return g


def _b_B_sphere(p: dict) -> GammaProduct:
    n, a = p["n"], p["alpha"]
    _req(n > 1, "n > 1")
    q = 2 * (n - 1) / (n - 2 * a) if n - 2 * a > 0 else math.inf
    _req(n - 2 * a > 0 and q > 2, "n - 2 alpha = 2(n-1)/q with q > 2")
    _req(0 < a < n / 2, "0 < alpha < n/2")
    pp = q / (q - 1)
    s = (n - 1) * (0.5 - 1 / q)
    return _gp(1, pi=2 * a - n / 2, two=2 * a - n,
               num=[(n - 1) / q, n - 1, s], den=[(n - 1) / pp, (n - 1) / 2, s + 0.5])


def _b_b_n_sphere(p: dict) -> GammaProduct:
    n = p["n"]
    _req(n > 1, "n > 1 (sphere S^n, gradient on R^{n+1})")
    return _gp(Fraction(1, 4), pi=-(n + 1) / 2, num=[(n - 1) / 2])


def _b_A_flat(p: dict) -> GammaProduct:
    n, m, k = p["n"], int(p["m"]), int(p["k"])
    _req(1 <= k <= n - 1, "1 <= k <= n-1")
    al = _alphas(p, m)
    asum = sum(al)
    q = 2 * k / (m * n - 2 * asum) if m * n - 2 * asum > 0 else math.inf
    _req(m * n - 2 * asum > 0 and q > 2, "m n - 2 sum(alpha) = 2k/q with q > 2")
    for a in al:
        _req(0 < a < n / 2, "0 < alpha_k < n/2")
    pp = q / (q - 1)
    g = _gp(1, pi=asum,
            num=[k * (1 / pp - 0.5)], den=[k / pp],
            powers=[(k / 2, 1 - 2 / pp), (k, -(1 - 2 / pp))])
    for a in al:
        g = g * _gp(1, num=[n / 2 - a], den=[a])
    return g


def _b_C_flat_pitt(p: dict) -> GammaProduct:
    n, m, k = p["n"], int(p["m"]), int(p["k"])
    _req(1 <= k <= n - 1, "1 <= k <= n-1")
    al = _alphas(p, m)
    asum = sum(al)
    beta = k - m * n + 2 * asum
    _req(0 < beta < k, "0 < beta < k with m n - 2 sum(alpha) = k - beta")
    for a in al:
        _req(0 < a < n / 2, "0 < alpha_k < n/2")
    g = _gp(1, pi=(-m * n + k) / 2 + 2 * asum,
            num=[beta / 2], den=[(k - beta) / 2],
            powers=[((k - beta) / 4, 2.0), ((k + beta) / 4, -2.0)])
    for a in al:
        g = g * _gp(1, num=[n / 2 - a], den=[a])
    return g


def _b_B_product_spheres(p: dict) -> GammaProduct:
    m, k, l = int(p["m"]), int(p["k"]), int(p["l"])
    _req(k >= 1 and l >= 1, "k, l >= 1")
    n = k + l + 2
    al = _alphas(p, m)
    asum = sum(al)
    q = 2 * (k + l) / (m * n - 2 * asum) if m * n - 2 * asum > 0 else math.inf
    _req(m * n - 2 * asum > 0 and q > 2, "m n - 2 sum(alpha) = 2(k+l)/q with q > 2 (n = k+l+2)")
    for a in al:
        _req(0 < a < n / 2, "0 < alpha_k < n/2")
    pp = q / (q - 1)
    g = _gp(1, pi=asum - (k + l) / q, two=-2 * (k + l) / q,
            num=[k, l, k * (0.5 - 1 / q), l * (0.5 - 1 / q)],
            den=[k / 2, l / 2, k / pp, l / pp])
    for a in al:
        g = g * _gp(1, num=[n / 2 - a], den=[a])
    return g


def _b_A_flat_m1(p: dict) -> GammaProduct:
    n, a = p["n"], p["alpha"]
    _req(n > 1, "n > 1")
    _req(2 * a > 1, "2 alpha > 1")
    q = 2 * (n - 1) / (n - 2 * a) if n - 2 * a > 0 else math.inf
    _req(n - 2 * a > 0 and q > 2, "n - 2 alpha = 2(n-1)/q with q > 2")
    return _gp(1, pi=a,
               num=[a - 0.5, n / 2 - a], den=[n / 2 + a - 1, a],
               powers=[(n - 1, (2 * a - 1) / (n - 1)), ((n - 1) / 2, -(2 * a - 1) / (n - 1))])


def _b_c_halfspace(p: dict) -> GammaProduct:
    n = p["n"]
    _req(n > 1, "n > 1")
    return _gp(Fraction(1) / (2 * (Fraction(n) - 1)), pi=-0.5, powers=[(n, 1 / n), (n / 2, -1 / n)])


def _lam_bracket(n: float, lam: float) -> list[tuple[float, float]]:
    return [((n - lam) / 4, 2.0), ((n + lam) / 4, -2.0)]


def _b_C_coulomb(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(0 < lam < n, "0 < lambda < n")
    return _gp(1, pi=lam, two=-lam / 2, powers=_lam_bracket(n, lam))


def _b_D_mixing(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(0 < lam < n, "0 < lambda < n")
    return _gp(1, pi=lam, powers=_lam_bracket(n, lam))


def _b_F_pitt_as(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(0 < lam < n, "0 < lambda < n")
    return _gp(1, pi=lam, two=-lam, powers=_lam_bracket(n, lam))


def _b_G_pitt_as(p: dict) -> GammaProduct:
    # F_lambda / D_lambda(canonical): constant for the shared-variable
    # difference form (see operators.pitt_as_difference_form).
    n, lam = p["n"], p["lambda"]
    _req(0 < lam < min(2.0, n), "0 < lambda < min{2, n}")
    return _gp(Fraction(lam) / 4, pi=-n / 2, two=-lam,
               num=[(n + lam) / 2], den=[1 - lam / 2],
               powers=_lam_bracket(n, lam))


def _b_G_pitt_as_printed(p: dict) -> GammaProduct:
    g = _b_G_pitt_as(p)
    n, lam = p["n"], p["lambda"]
    return replace(g, two_exponent=g.two_exponent + n / 2 + lam)


def _b_D_log_uncertainty(p: dict) -> GammaProduct:
    n = p["n"]
    _req(n >= 1, "n >= 1")
    return GammaProduct(Fraction(0), digamma_terms=((1.0, n / 4),), log_pi_coeff=-1.0, log_two_coeff=1.0)


def _b_D_log_uncertainty_general(p: dict) -> GammaProduct:
    n = p["n"]
    _req(n >= 1, "n >= 1")
    return GammaProduct(Fraction(0), digamma_terms=((1.0, n / 4),), log_pi_coeff=-1.0)


def _b_C_conformal(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(0 < lam < n, "0 < lambda < n")
    return _gp(1, pi=n, two=lam, powers=[(n / 2, 2.0), (n, -2.0)])


def _b_C_conformal_pos(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(lam > 0, "lambda > 0")
    return _gp(1, pi=n, two=-lam, powers=[(n / 2, 2.0), (n, -2.0)])


def _contrast_p(n: float, lam: float) -> float:
    return 2 * n / (n - lam / 2)


def _b_b_contrast(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(0 < lam < n, "0 < lambda < n")
    pp = _contrast_p(n, lam)
    return _gp(1, pi=lam / 2, num=[2 * n / pp - n / 2], den=[2 * n / pp],
               powers=[(n, 4 / pp - 1), (n / 2, -(4 / pp - 1))])


def _b_b_contrast_printed(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(0 < lam < n, "0 < lambda < n")
    pp = _contrast_p(n, lam)
    return _gp(1, pi=-2 * n / pp, num=[2 * n / pp - n / 2], den=[2 * n / pp],
               powers=[(n, 2 / pp - 1), (n / 2, -(2 / pp - 1))])


def _b_d_contrast(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(0 < lam < n, "0 < lambda < n")
    pp = _contrast_p(n, lam)
    pd = pp / (pp - 1)
    return _gp(1, pi=2 * (n / pd - n / 2),
               powers=[(n / pp, 2.0), (n / pd, -2.0), (n, 2 * (1 - 2 / pp)), (n / 2, -2 * (1 - 2 / pp))])


def _b_d_contrast_printed(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    g = _b_d_contrast(p)
    pp = _contrast_p(n, lam)
    pd = pp / (pp - 1)
    return replace(g, pi_exponent=2 * (n / pp - n / 2))


def _b_A_inverting(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(0 < lam < n, "0 < lambda < n")
    riesz4 = _gp(1, pi=2 * n - lam, powers=[(lam / 8, 4.0), (n / 2 - lam / 8, -4.0)])
    return _b_b_contrast(p) * _b_d_contrast(p) * riesz4


def _b_A_inverting_printed(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(0 < lam < n, "0 < lambda < n")
    pp = _contrast_p(n, lam)
    pd = pp / (pp - 1)
    return _gp(1, pi=-4 * n / pp,
               num=[n * (2 / pp - 0.5)], den=[2 * n / pp],
               powers=[
                   (n * (1 + 2 / pp) / 4, 4.0),
                   (n * (1 - 2 / pp) / 4, -4.0),
                   (n / pp, 2.0),
                   (n / pd, -2.0),
                   (n, 1 - 2 / pp),
                   (n / 2, -(1 - 2 / pp)),
               ])


def _b_F_reverse_estimates(p: dict) -> GammaProduct:
    n, m, lam = p["n"], int(p["m"]), p["lambda"]
    _req(0 < lam < n, "0 < lambda < n")
    _req(m >= 1, "m >= 1")
    return _gp(Fraction(float(m) ** -lam), pi=lam, powers=_lam_bracket(n, lam))


def _b_omega_coulomb(p: dict) -> GammaProduct:
    n = int(p["n"])
    _req(n > 2, "n > 2")
    return _gp(Fraction(4, (n - 2) ** 2), pi=2.0)


def _b_C_smoothness(p: dict) -> GammaProduct:
    n, pe = p["n"], p["p"]
    _req(1 < pe < 2, "1 < p < 2")
    pd = pe / (pe - 1)
    return _gp(1, pi=n / pe - n / 2, num=[n / pd], den=[n / pe],
               powers=[(n, 2 / pe - 1), (n / 2, -(2 / pe - 1))])


def _b_C_smoothness_printed(p: dict) -> GammaProduct:
    n, pe = p["n"], p["p"]
    g = _b_C_smoothness(p)
    pd = pe / (pe - 1)
    return replace(g, pi_exponent=n / pd - n / 2)


def _b_A_hls_sharp(p: dict) -> GammaProduct:
    n, pe = p["n"], p["p"]
    _req(1 < pe < 2, "1 < p < 2")
    pd = pe / (pe - 1)
    return _gp(1, pi=n / pd, num=[n * (1 / pe - 0.5)], den=[n / pe],
               powers=[(n, 2 / pe - 1), (n / 2, -(2 / pe - 1))])


def _b_A_reverse_hls(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(lam > 0, "lambda > 0")
    return _gp(1, pi=-lam / 2, num=[(n + lam) / 2], den=[n + lam / 2],
               powers=[(n, 1 + lam / n), (n / 2, -(1 + lam / n))])


def _b_A_reverse_hls_printed(p: dict) -> GammaProduct:
    g = _b_A_reverse_hls(p)
    return replace(g, pi_exponent=p["lambda"] / 2)


def _b_B_reverse_hls_sphere(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(lam > 0, "lambda > 0")
    return _gp(1, two=lam, num=[n, (n + lam) / 2], den=[n / 2, n + lam / 2])


def _b_A_sphere_kernel(p: dict) -> GammaProduct:
    n, lam = p["n"], p["lambda"]
    _req(0 < lam < n + 2 and lam != n, "0 < lambda < n+2, lambda != n (analytic continuation past n)")
    return _gp(1, two=-lam, num=[n, (n - lam) / 2], den=[n / 2, n - lam / 2])


def _b_two_A_hat(p: dict) -> GammaProduct:
    n, b = p["n"], p["beta"]
    _req(0 < b < min(1.0, n / 2), "0 < beta < min{1, n/2}")
    return _gp(Fraction(1) / Fraction(b), two=-n - 2 * b, num=[n + 1, 1 - b], den=[n / 2 + 1, n / 2 - b])


_REGISTRY: dict[str, ConstantSpec] = {}


def _register(name: str, params: tuple[str, ...], statement: str, build, sharp: bool = True) -> None:
    _REGISTRY[name] = ConstantSpec(name, params, statement, build, sharp)


_register("gamma_alpha_n", ("n", "alpha"),
          "normalizer of the pointwise nonlocal form of |xi|^alpha: (alpha/2) pi^{-alpha-n/2} G((n+alpha)/2)/G(1-alpha/2)",
          _b_gamma_alpha_n)
_register("D_beta", ("n", "beta"),
          "squared-difference seminorm over multiplier-norm ratio: (4/beta) pi^{n/2+beta} G(1-beta/2)/G((n+beta)/2) = 2/gamma_{beta,n}",
          _b_D_beta)
_register("D_beta_printed", ("n", "beta"),
          "alternative normalization of D_beta carrying pi^{-n/2+beta}; rejected by the difference/multiplier identity checks",
          _b_D_beta_printed)
_register("C_pitt_weight", ("n", "beta"),
          "sharp weighted-L2 constant: int |x|^-beta |f|^2 <= C int |xi|^beta |fhat|^2",
          _b_C_pitt_weight)
_register("mult_pitt_factor", ("n", "alpha"),
          "per-factor constant D_{2a}/C_{2a} in the weighted lower bound for the difference functional (p = 2)",
          _b_mult_pitt_factor)
_register("c_n2", ("n", "beta"),
          "sharp L2 fractional embedding constant: seminorm >= c ||f||_{q*}^2, q* = 2n/(n-2beta)",
          _b_c_n2)
_register("c_n2_printed", ("n", "beta"),
          "embedding constant without the pi^{n/2+beta} normalizer; rejected by the bubble equality check",
          _b_c_n2_printed, sharp=False)
_register("C_diag_pitt", ("n", "m", "alpha"),
          "diagonal weighted trace constant, n - beta = m n - 2 sum(alpha)",
          _b_C_diag_pitt)
_register("F_diag_hls", ("n", "m", "alpha"),
          "diagonal trace embedding constant, m n - 2 sum(alpha) = 2n/q",
          _b_F_diag_hls)
_register("K_sphere_restrict", ("n", "m", "alpha"),
          "diagonal sphere-restriction constant on S^{n-1}, m n - 2 sum(alpha) = 2(n-1)/q",
          _b_K_sphere)
_register("B_sphere_restrict", ("n", "alpha"),
          "single-factor sphere restriction constant, n - 2 alpha = 2(n-1)/q",
          _b_B_sphere)
_register("b_n_sphere", ("n",),
          "sphere trace vs full gradient energy: ||f||_{L^q(S^n)}^2 <= b_n int_{R^{n+1}} |grad f|^2, q = 2n/(n-1)",
          _b_b_n_sphere)
_register("A_flat", ("n", "m", "k", "alpha"),
          "flat submanifold diagonal restriction constant, m n - 2 sum(alpha) = 2k/q",
          _b_A_flat)
_register("C_flat_pitt", ("n", "m", "k", "alpha"),
          "weighted flat restriction constant, m n - 2 sum(alpha) = k - beta",
          _b_C_flat_pitt)
_register("B_product_spheres", ("m", "k", "l", "alpha"),
          "product-of-spheres restriction bound (upper bound only; geometric-mean step is lossy)",
          _b_B_product_spheres, sharp=False)
_register("A_flat_m1", ("n", "alpha"),
          "hyperplane restriction constant (single factor), n - 2 alpha = 2(n-1)/q",
          _b_A_flat_m1)
_register("c_halfspace", ("n",),
          "boundary trace vs gradient energy on R^{n+1}: (4 pi)^{-1/2} (n-1)^{-1} [G(n)/G(n/2)]^{1/n}",
          _b_c_halfspace)
_register("C_coulomb", ("n", "lambda"),
          "interaction-weight bound (pi/sqrt2)^lambda [G((n-l)/4)/G((n+l)/4)]^2; sharp, not attained",
          _b_C_coulomb)
_register("D_mixing", ("n", "lambda"),
          "mixed-variable weighted bound pi^lambda [G((n-l)/4)/G((n+l)/4)]^2, independent of the spectator dimension",
          _b_D_mixing)
_register("F_pitt_as", ("n", "lambda"),
          "difference-weight vs difference-frequency bound (pi/2)^lambda [G((n-l)/4)/G((n+l)/4)]^2",
          _b_F_pitt_as)
_register("G_pitt_as", ("n", "lambda"),
          "constant for the shared-variable squared-difference form: F_lambda / D_lambda",
          _b_G_pitt_as)
_register("G_pitt_as_printed", ("n", "lambda"),
          "variant carrying the extra 2^{(n+lambda)/2+lambda/2} of the unconstrained (divergent) difference form",
          _b_G_pitt_as_printed, sharp=False)
_register("D_log_uncertainty", ("n",),
          "logarithmic uncertainty constant psi(n/4) - ln(pi/2) for difference weights",
          _b_D_log_uncertainty)
_register("D_log_uncertainty_general", ("n",),
          "logarithmic uncertainty constant psi(n/4) - ln(pi) for unit-combination weights",
          _b_D_log_uncertainty_general)
_register("C_conformal", ("n", "lambda"),
          "flat-to-sphere transport factor for the kernel |x-y|^{-lambda}: 2^l pi^n [G(n/2)/G(n)]^2",
          _b_C_conformal)
_register("C_conformal_pos", ("n", "lambda"),
          "flat-to-sphere transport factor for the kernel |x-y|^{+lambda}: 2^{-l} pi^n [G(n/2)/G(n)]^2",
          _b_C_conformal_pos)
_register("b_contrast", ("n", "lambda"),
          "bilinear product-state bound: int phi^2 |x-y|^{-l} phi^2 <= b [int phi^p]^{4/p}, p = 2n/(n-l/2)",
          _b_b_contrast)
_register("b_contrast_printed", ("n", "lambda"),
          "variant without pi^{l/2} and with halved bracket exponent; fails the bubble equality check",
          _b_b_contrast_printed, sharp=False)
_register("d_contrast", ("n", "lambda"),
          "squared embedding factor linking [int phi^p]^{4/p} to the quartic smoothness norm",
          _b_d_contrast)
_register("d_contrast_printed", ("n", "lambda"),
          "variant with the pi exponent swapped p <-> p'; fails the bubble equality check",
          _b_d_contrast_printed, sharp=False)
_register("A_inverting", ("n", "lambda"),
          "sextuple potential-form bound assembled as b * d * (Riesz normalizer)^4",
          _b_A_inverting)
_register("A_inverting_printed", ("n", "lambda"),
          "variant with inverted Riesz bracket and pi sign; fails the direction check",
          _b_A_inverting_printed, sharp=False)
_register("F_reverse_estimates", ("n", "m", "lambda"),
          "sum-variable weighted bound (pi/m)^lambda [G((n-l)/4)/G((n+l)/4)]^2",
          _b_F_reverse_estimates)
_register("omega_coulomb", ("n",),
          "pairwise inverse-square interaction constant 4 pi^2/(n-2)^2",
          _b_omega_coulomb)
_register("C_smoothness", ("n", "p"),
          "square-integrable paradigm constant pi^{n/p-n/2} [G(n/p')/G(n/p)] [G(n)/G(n/2)]^{2/p-1}",
          _b_C_smoothness)
_register("C_smoothness_printed", ("n", "p"),
          "variant with pi exponent n/p' - n/2; fails the bubble equality check",
          _b_C_smoothness_printed, sharp=False)
_register("A_hls_sharp", ("n", "p"),
          "sharp Riesz potential operator norm pi^{n/p'} [G(n(1/p-1/2))/G(n/p)] [G(n)/G(n/2)]^{2/p-1}",
          _b_A_hls_sharp)
_register("A_reverse_hls", ("n", "lambda"),
          "reverse bilinear bound with growing kernel; bubbles achieve equality",
          _b_A_reverse_hls)
_register("A_reverse_hls_printed", ("n", "lambda"),
          "variant with pi^{+lambda/2}; rejected by the bubble equality and transport checks",
          _b_A_reverse_hls_printed, sharp=False)
_register("B_reverse_hls_sphere", ("n", "lambda"),
          "sphere form of the reverse bound; equals the zonal mean of |xi-eta|^lambda",
          _b_B_reverse_hls_sphere)
_register("A_sphere_kernel", ("n", "lambda"),
          "zonal mean of |xi-eta|^{-lambda} on S^n (analytic in lambda up to n+2)",
          _b_A_sphere_kernel)
_register("two_A_hat", ("n", "beta"),
          "prefactor of the supercritical sphere seminorm expansion (2 A-hat_beta)",
          _b_two_A_hat)


def constant_ids() -> list[str]:
    return sorted(_REGISTRY)


def constant_info(name: str) -> ConstantSpec:
    if name not in _REGISTRY:
        raise KeyError(f"unknown constant id {name!r}")
    return _REGISTRY[name]


def gamma_product(cid: ConstantId) -> GammaProduct:
    spec = constant_info(cid.name)
    missing = [p for p in spec.param_names if p not in cid.params]
    if missing:
        raise ConstraintViolation(f"parameters {missing} for {cid.name}")
    return spec.build(cid.params)


def constant(cid: ConstantId) -> float:
    """Numeric value of the Gamma product; relative error <= 1e-12."""
    return gamma_product(cid).value()


def formula(cid: ConstantId) -> str:
    return gamma_product(cid).print_formula()


# ----------------------------------------------------------------------
# cross-constant consistency checks
# ----------------------------------------------------------------------


def _report(check_id: str, params: dict, lhs: float, rhs: float, tol: float) -> VerificationReport:
    ratio = lhs / rhs if rhs != 0 else math.inf
    return VerificationReport(
        timestamp="1970-01-01T00:00:00Z",
        registry_id=check_id,
        params=params,
        test_function={"form": "none"},
        lhs=lhs,
        rhs=rhs,
        constant=None,
        ratio=ratio,
        error_estimate=abs(ratio - 1.0),
        tolerance=tol,
        passed=abs(ratio - 1.0) <= tol,
        seed=0,
        node_counts={},
    )


def consistency_suite() -> list[VerificationReport]:
    """Cross-constant identities, each within 1e-12 relative.

    (a) gamma_{beta,n} * D_beta = 2
    (b) 2 lambda b_n sigma(S^n) = 1 at lambda = (n-1)/2
    (c) K(m=1) = B for the sphere restriction constants
    (d) C_coulomb = 2^{-lambda/2} D_mixing
    """
    tol = 1e-12
    out: list[VerificationReport] = []
    for n in (1, 2, 3, 4):
        for beta in (0.3, 0.7, 1.1, 1.7):
            g = constant(ConstantId("gamma_alpha_n", {"n": n, "alpha": beta}))
            d = constant(ConstantId("D_beta", {"n": n, "beta": beta}))
            out.append(_report("consistency:gamma_times_D", {"n": n, "beta": beta}, g * d, 2.0, tol))
    for n in (2, 3, 4, 5, 6):
        lam = (n - 1) / 2.0
        b = constant(ConstantId("b_n_sphere", {"n": n}))
        out.append(_report("consistency:two_lambda_b_sigma", {"n": n}, 2 * lam * b * sphere_measure(n), 1.0, tol))
    for n in (2, 3, 4):
        for a in (0.35, 0.6, 0.8):
            if not (0 < a < n / 2 and n - 2 * a > 0 and 2 * (n - 1) / (n - 2 * a) > 2):
                continue
            k1 = constant(ConstantId("K_sphere_restrict", {"n": n, "m": 1, "alpha": [a]}))
            b1 = constant(ConstantId("B_sphere_restrict", {"n": n, "alpha": a}))
            out.append(_report("consistency:K_m1_equals_B", {"n": n, "alpha": a}, k1, b1, tol))
    for n in (2, 3, 4):
        for lam in (0.5, 1.0, 1.5):
            if not lam < n:
                continue
            c = constant(ConstantId("C_coulomb", {"n": n, "lambda": lam}))
            d = constant(ConstantId("D_mixing", {"n": n, "lambda": lam}))
            out.append(_report("consistency:C_equals_halfpow_D", {"n": n, "lambda": lam}, c, 2 ** (-lam / 2) * d, tol))
    return out
