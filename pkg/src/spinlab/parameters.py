"""The four order/disorder ratios, the derived alpha exponents, and the
quantitative condition checkers.

All thresholds involve unspecified universal constants C, c; these are always
caller-supplied inputs (default 1) and every checker reports per-inequality
margins, so verdicts are relative to the supplied constants.

Conventions: a maximum over an empty candidate set is 0, and -log 0 is +inf
with saturating comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import errors, patterns

INF = math.inf


def neg_log(x):
    """-log(x) with -log(0) = +inf."""
    x = float(x)
    if x < 0:
        raise ValueError("negative argument")
    if x == 0.0:
        return INF
    return -math.log(x)


# ---------------------------------------------------------------------------
# raw ratio computations (exact in rational mode)

def interaction_ratio(system):
    """Second largest over largest pair interaction (0 if all are equal)."""
    vals = {v for row in system.interactions for v in row}
    top = max(vals)
    below = [v for v in vals if v < top]
    if not below:
        return system.zero()
    return max(below) / top


def _sides(pats):
    """Distinct sides (either coordinate) of a pattern list, as bitmasks."""
    out = set()
    for p in pats:
        out.add(p.a)
        out.add(p.b)
    return out


def pattern_ratios(system):
    """(omega_dom, rho_bulk, rho_bdry, rho_act), exact in rational mode."""
    maximal = patterns.maximal_patterns(system)
    dom, omega, _ = patterns.dominant_patterns(system)
    dom_set = set(dom)
    zero = system.zero()

    non_dom = [p for p in maximal if p not in dom_set]
    rho_bulk = zero
    for p in non_dom:
        rho_bulk = max(rho_bulk, patterns.weight(system, p) / omega)

    r_sides = {p.a for p in maximal}  # sides of maximal patterns
    rho_bdry = zero
    for a in _sides(dom):
        la = system.lambda_mask(a)
        for ap in r_sides:
            if ap != a and ap & ~a == 0:  # strict subset
                rho_bdry = max(rho_bdry, system.lambda_mask(ap) / la)

    lam_s = system.lambda_mask(system.full_mask())
    rho_act = system.one()
    for a in r_sides:
        if a != 0:
            rho_act = max(rho_act, lam_s / system.lambda_mask(a))

    return omega, rho_bulk, rho_bdry, rho_act


# ---------------------------------------------------------------------------
# report

@dataclass
class ParameterReport:
    rho_int: object
    rho_pat_bulk: object
    rho_pat_bdry: object
    rho_act: object
    omega_dom: object
    alpha0: float
    frak_q: float
    n_maximal: int
    n_dominant: int
    n_small_side: int
    n_large_side: int
    rho_hat_act: object
    d: int = None
    s: int = None
    alpha1: float = None
    rho_hat_bulk: float = None
    alpha2: float = None
    rho_bulk_star: float = None
    alpha3: float = None
    alpha_tilde_simple: float = None

    def to_dict(self):
        from .system import emit_number

        def num(x):
            if isinstance(x, Fraction):
                return emit_number(x)
            if x == INF:
                return "inf"
            return x

        return {k: num(v) for k, v in self.__dict__.items()}


def _alpha_arg(rho_bulk, rho_bdry, rho_int):
    """max{rho_bulk, 1-(1-rho_bdry)(1-sqrt(rho_int))}."""
    return max(float(rho_bulk),
               1.0 - (1.0 - float(rho_bdry)) * (1.0 - math.sqrt(float(rho_int))))


def alpha0_of(system):
    _, rho_bulk, rho_bdry, _ = pattern_ratios(system)
    rho_int = interaction_ratio(system)
    return neg_log(_alpha_arg(rho_bulk, rho_bdry, rho_int))


def rho_hat_bulk_of(system, d, s):
    """Bulk ratio adjusted for a soft-interaction window of length s."""
    maximal = patterns.maximal_patterns(system)
    dom, omega, _ = patterns.dominant_patterns(system)
    dom_set = set(dom)
    rho_int = float(interaction_ratio(system))
    lam_s = float(system.lambda_mask(system.full_mask()))
    n = system.n
    best = 0.0
    for p in maximal:
        if p in dom_set or p.a == 0 or p.b == 0:
            continue
        la = float(system.lambda_mask(p.a))
        lb = float(system.lambda_mask(p.b))
        val = (la * lb / float(omega)
               * (1.0 + rho_int ** s * lam_s / la)
               * (2 * d * lam_s / lb) ** ((s - 1) * n / (2 * d)))
        best = max(best, val)
    return best


def rho_bulk_star_of(system, d):
    """Bulk ratio with image-restricted weight counts (homomorphism only)."""
    from . import kbipartite
    if interaction_ratio(system) != 0:
        raise errors.Alt3OnWeightedSystem(
            "rho_bulk_star is defined for homomorphism systems only")
    maximal = patterns.maximal_patterns(system)
    dom, omega, _ = patterns.dominant_patterns(system)
    dom_set = set(dom)
    total = Fraction(0) if system.mode == "rational" else 0.0
    for p in maximal:
        if p in dom_set:
            continue
        total += (kbipartite.lambda_restricted_power(system, p.a, 2 * d)
                  * system.lambda_mask(p.b) ** (2 * d))
    if total == 0:
        return 0.0
    return float(total) ** (1.0 / (2 * d)) / float(omega)


def compute_parameters(system, d=None, s=None) -> ParameterReport:
    omega, rho_bulk, rho_bdry, rho_act = pattern_ratios(system)
    rho_int = interaction_ratio(system)
    maximal = patterns.maximal_patterns(system)
    dom, _, _ = patterns.dominant_patterns(system)
    fq = patterns.frak_q(system)
    n_small, n_large = patterns.small_large_side_counts(system)
    lam_s = system.lambda_mask(system.full_mask())
    rep = ParameterReport(
        rho_int=rho_int,
        rho_pat_bulk=rho_bulk,
        rho_pat_bdry=rho_bdry,
        rho_act=rho_act,
        omega_dom=omega,
        alpha0=neg_log(_alpha_arg(rho_bulk, rho_bdry, rho_int)),
        frak_q=fq,
        n_maximal=len(maximal),
        n_dominant=len(dom),
        n_small_side=n_small,
        n_large_side=n_large,
        rho_hat_act=lam_s * lam_s / omega,
    )
    if d is not None:
        if d < 2:
            raise errors.ParamOutOfRange("d must be >= 2")
        rep.d = d
        pen = (1.0 + (1.0 / 3.0 if rho_int != 0 else 0.0)) / (2 * d) \
            * math.log(len(maximal))
        rep.alpha1 = rep.alpha0 - pen
        rep.alpha_tilde_simple = rep.alpha0 * min(
            1.0, rep.alpha0 / (system.n + math.log(d))) if rep.alpha0 < INF else INF
        if s is not None:
            rep.s = s
            rep.rho_hat_bulk = rho_hat_bulk_of(system, d, s)
            rep.alpha2 = neg_log(max(
                rep.rho_hat_bulk,
                1.0 - (1.0 - float(rho_bdry)) * (1.0 - math.sqrt(float(rho_int)))
            )) - pen
        if rho_int == 0:
            rep.rho_bulk_star = rho_bulk_star_of(system, d)
            rep.alpha3 = neg_log(max(rep.rho_bulk_star, float(rho_bdry)))
    return rep


def alpha2_of(system, d, s):
    rep = compute_parameters(system, d=d, s=s)
    return rep.alpha2


# ---------------------------------------------------------------------------
# condition checkers

@dataclass
class Inequality:
    name: str
    lhs: float
    rhs: float
    holds: bool
    vacuous: bool = False

    @property
    def margin(self):
        if self.vacuous:
            return INF
        if self.rhs == 0:
            return INF if self.lhs >= 0 else -INF
        return self.lhs / self.rhs

    def to_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "holds": self.holds, "vacuous": self.vacuous,
                "margin": self.margin}


@dataclass
class ConditionReport:
    condition: str
    d: int
    C: float
    c: float
    s: int
    inequalities: list
    passes: bool

    def to_dict(self):
        return {"condition": self.condition, "d": self.d, "C": self.C,
                "c": self.c, "s": self.s,
                "inequalities": [iq.to_dict() for iq in self.inequalities],
                "pass": self.passes}


def _ge(name, lhs, rhs, vacuous=False):
    return Inequality(name, lhs, rhs, holds=bool(vacuous or lhs >= rhs),
                      vacuous=vacuous)


def check_condition(system, d, which, C=1.0, c=1.0, s=None) -> ConditionReport:
    """Evaluate one of the quantitative long-range-order conditions literally
    with the supplied constants."""
    if d < 2:
        raise errors.ParamOutOfRange("d must be >= 2")
    rep = compute_parameters(system, d=d)
    n = system.n
    fq = rep.frak_q
    rho_int = float(rep.rho_int)
    rho_act = float(rep.rho_act)
    logd = math.log(d)
    ineqs = []
    s_used = None

    if which == "simple":
        ineqs.append(_ge("alpha0", rep.alpha0,
                         C * n * logd ** 1.5 / d ** 0.25))
        rhs2 = n * math.log(d * rho_act) ** 2 / d ** 0.75
        ineqs.append(_ge("interaction", neg_log(rho_int), rhs2,
                         vacuous=(rho_int == 0)))
    elif which == "alt1":
        thr = C * (fq + logd) * math.sqrt(logd) / d ** 0.25
        ineqs.append(_ge("alpha1", rep.alpha1, thr))
        if rho_int == 0:
            ineqs.append(_ge("interaction", INF, 0.0, vacuous=True))
        else:
            lhs = neg_log(rho_int) / (4.0 * math.log(d * rho_act))
            if rep.alpha1 > 0:
                term = n / (2.0 * d) + 5.0 * n * math.log(2 * d * rho_act) / (rep.alpha1 * d)
            else:
                term = INF
            ineqs.append(_ge("interaction", lhs, min(1.0, term)))
    elif which == "alt2":
        thr = C * (fq + logd) * math.sqrt(logd) / d ** 0.25
        rho_hat_act = float(rep.rho_hat_act)
        if rho_int == 0:
            s_lo = 0.0
        else:
            s_lo = 2.0 * math.log(d * rho_hat_act) / neg_log(rho_int)
        s_cap = math.ceil(2 * d / n)
        candidates = [s] if s is not None else list(
            range(max(1, math.ceil(s_lo)), max(1, math.ceil(s_lo)) + min(s_cap, 10 ** 4)))
        best = None
        for cand in candidates:
            if cand > s_cap and best is not None:
                break
            a2 = alpha2_of(system, d, cand)
            window_hi = min(s_cap,
                            1.0 + a2 * d / (2.0 * n * math.log(2 * d * rho_hat_act))
                            if a2 > 0 and 2 * d * rho_hat_act > 1 else 1.0)
            window = [
                _ge("s_window_low", cand, s_lo),
                Inequality("s_window_high", cand, window_hi, holds=cand <= window_hi),
                _ge("alpha2", a2, thr),
            ]
            if all(iq.holds for iq in window):
                best = (cand, window)
                break
            if best is None:
                best = (cand, window)
        s_used, ineqs = best
    elif which == "alt3":
        if rho_int != 0:
            raise errors.Alt3OnWeightedSystem(
                "alt3 applies to homomorphism systems only")
        thr = C * (fq + logd) * math.sqrt(logd) / d ** 0.25
        ineqs.append(_ge("alpha3", rep.alpha3, thr))
    else:
        raise errors.ParamOutOfRange(f"unknown condition {which!r}")

    return ConditionReport(condition=which, d=d, C=C, c=c, s=s_used,
                           inequalities=ineqs,
                           passes=all(iq.holds for iq in ineqs))


# ---------------------------------------------------------------------------
# closed-form inequality report for the composition-function reduction

def section_defaults(system, d):
    """Default (alpha, gamma, eps, eps_bar, s) used by the closed-form
    inequality check and the abstract-condition verifier.

    For weighted systems both gamma variants are reported: `gamma` uses
    rho_act and `gamma_hat` uses rho_hat_act; the two appear in different
    places of the source derivation and the discrepancy is surfaced, not
    resolved.
    """
    rep = compute_parameters(system, d=d)
    rho_int = float(rep.rho_int)
    logd = math.log(d)
    if rho_int == 0:
        alpha = rep.alpha3 if rep.alpha3 is not None else rep.alpha1
        eps = min(alpha / (64.0 * logd), 0.125) if alpha > 0 else 1.0 / (4 * d)
        eps = max(eps, 1.0 / (4 * d))
        return {"alpha": alpha, "gamma": 0.0, "gamma_hat": 0.0,
                "eps": eps, "eps_bar": 1.0 / (4 * d), "s": 1}
    cond = check_condition(system, d, "alt2")
    s = cond.s if cond.s is not None else 1
    alpha = alpha2_of(system, d, s)
    eps = min(alpha / (64.0 * logd), 0.125) if alpha > 0 else 1.0 / (4 * d)
    eps = max(eps, 1.0 / (4 * d))
    eps_bar = max(s / (4.0 * d),
                  alpha * eps / neg_log(rho_int) if alpha > 0 else 0.0)
    eps_bar = max(eps_bar, 1.0 / (4 * d))
    gamma = float(rep.rho_act) * rho_int ** s
    gamma_hat = float(rep.rho_hat_act) * rho_int ** s
    return {"alpha": alpha, "gamma": gamma, "gamma_hat": gamma_hat,
            "eps": eps, "eps_bar": eps_bar, "s": s}


def check_closed_form_bounds(system, d, alpha=None, gamma=None, eps=None,
                             eps_bar=None, c=1.0) -> dict:
    """Arithmetic check of the closed-form inequalities that reduce the
    explicit conditions to the abstract one: the alpha budget, the epsilon
    chain, and the two boundary-entropy bounds."""
    rep = compute_parameters(system, d=d)
    defaults = section_defaults(system, d)
    if alpha is None:
        alpha = defaults["alpha"]
    if gamma is None:
        gamma = defaults["gamma"]
    if eps is None:
        eps = defaults["eps"]
    if eps_bar is None:
        eps_bar = defaults["eps_bar"]
    fq = rep.frak_q
    rho_int = float(rep.rho_int)
    rho_bdry = float(rep.rho_pat_bdry)
    logd = math.log(d)
    hom = rho_int == 0

    budget = ((fq + logd) * math.sqrt(logd) / d ** 0.25
              + (fq + logd) * logd / (eps * eps * d)
              + gamma * d
              + math.sqrt(gamma * (fq + logd) * d ** 1.5 * logd))
    ineqs = [
        _ge("alpha_budget", c * alpha, budget),
        _ge("eps_chain_low", eps_bar, 1.0 / (4 * d)),
        _ge("eps_chain_mid", eps, eps_bar),
        _ge("eps_chain_high", 0.125, eps),
    ]

    def powz(base, expo):
        if base == 0.0:
            return 0.0 if expo > 0 else 1.0
        return base ** expo

    lhs1 = 2.0 ** (fq + 1) * (math.e / (2 * eps)) ** (4 * eps * d) \
        * powz(rho_bdry, 2 * d - 4 * eps * d)
    ineqs.append(Inequality("bdry_entropy", lhs1, 0.25 * math.exp(-alpha * d),
                            holds=lhs1 <= 0.25 * math.exp(-alpha * d)))
    if hom:
        ineqs.append(Inequality("bdry_entropy_weighted", 0.0, 0.0,
                                holds=True, vacuous=True))
    else:
        n_max = rep.n_maximal
        lhs2 = n_max * (math.e / (2 * eps_bar)) ** (4 * eps_bar * d) \
            * powz(rho_bdry, 2 * d - 4 * eps_bar * d)
        ineqs.append(Inequality("bdry_entropy_weighted", lhs2,
                                0.25 * math.exp(-alpha * d),
                                holds=lhs2 <= 0.25 * math.exp(-alpha * d)))
    return {
        "d": d, "alpha": alpha, "gamma": gamma,
        "gamma_hat": defaults["gamma_hat"], "eps": eps, "eps_bar": eps_bar,
        "c": c, "s": defaults["s"],
        "inequalities": [iq.to_dict() for iq in ineqs],
        "pass": all(iq.holds for iq in ineqs),
    }
