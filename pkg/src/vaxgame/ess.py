"""Evolutionary-stability layer: utility gaps at the candidate limits,
stability classification, policy admissibility, and the eradication
threshold on the number of vaccinated influencers."""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

from .epidemic import admissibility_gap, psi_co_occurring, psi_eradicating
from .params import DiseaseParams, InsufficientInfluenceError, PublicCostModel, VaRatePolicy

# Utility gaps this close to zero are classified by their exact sign but
# flagged, since the strict/non-strict split is then numerically fragile.
H_BOUNDARY_BAND = 1e-12


class Admissibility(enum.Enum):
    ADMISSIBLE = "admissible"
    NOT_ADMISSIBLE = "not-admissible"
    NO_INTERVENTION_NEEDED = "no-intervention-needed"

    def __bool__(self) -> bool:
        return self is Admissibility.ADMISSIBLE


def is_admissible(nu: VaRatePolicy, disease: DiseaseParams) -> Admissibility:
    """Whether the VA policy can support eradication at all.

    Requires nu_e > b*rho - nu_b/theta_star (strict) and nu_e >= 0. For
    rho <= 1 the disease dies out on its own and the question is moot;
    a distinguished status is returned instead of a boolean.
    """
    if disease.rho <= 1.0:
        return Admissibility.NO_INTERVENTION_NEEDED
    if nu.nu_e >= 0.0 and admissibility_gap(nu, disease) > 0.0:
        return Admissibility.ADMISSIBLE
    return Admissibility.NOT_ADMISSIBLE


def _infection_term(theta: float, va_rate: float, lam: float, c_i: float) -> float:
    return lam * theta * c_i / (lam * theta + va_rate)


def _side_effect_term(psi: float, costs: PublicCostModel) -> float:
    if psi <= 0.0:
        return costs.c_v2_bar
    return min(costs.c_v2_bar, costs.c_v2 / psi)


def h_values(z: int, nu: VaRatePolicy, costs: PublicCostModel,
             disease: DiseaseParams, m: int) -> tuple[float, float, float]:
    """Utility gaps (h_i, h_v, h_v_o) of vaccinating at the three candidate
    limits, for z vaccinated influencers out of m.

    h_i is evaluated at the non-vaccinating limit, h_v at the eradicating
    one, h_v_o at the co-occurring one. Negative h means vaccinating is
    strictly preferred there. Raises when rho <= 1 (no endemic limit) or
    when the co-occurring limit does not exist (b*rho - nu_e <= 0).
    """
    if not 0 <= z <= m:
        raise ValueError("z must lie in 0..m")
    theta_star = disease.theta_star
    share = 1.0 - z / m
    cf = costs.c_f(z)

    h_i = (costs.c_v1 + share * costs.c_v2_bar
           - _infection_term(theta_star, nu.nu_b, disease.lam, costs.c_i) - cf)

    psi_e = psi_eradicating(nu, disease.b)
    h_v = costs.c_v1 + share * _side_effect_term(psi_e, costs) - cf

    psi_o = psi_co_occurring(nu, disease)
    theta_o = theta_star - psi_o
    h_v_o = (costs.c_v1 + share * _side_effect_term(psi_o, costs)
             - _infection_term(theta_o, nu.rate(psi_o), disease.lam, costs.c_i)
             - cf)
    return h_i, h_v, h_v_o


def _warn_boundary(name: str, value: float) -> None:
    if abs(value) < H_BOUNDARY_BAND:
        warnings.warn(
            f"{name} = {value:.3e} sits within {H_BOUNDARY_BAND} of the "
            "strict/non-strict boundary; classification may be fragile",
            stacklevel=3)


@dataclass(frozen=True)
class EssReport:
    z: int
    h_i: float
    h_v: float
    h_v_o: float | None
    esss_set: frozenset[str]
    eradication_conditional: int
    admissibility: Admissibility
    beta_witness: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "z": self.z,
            "h_i": self.h_i,
            "h_v": self.h_v,
            "h_v_o": self.h_v_o,
            "esss_set": sorted(self.esss_set),
            "eradication_conditional": self.eradication_conditional,
            "admissibility": self.admissibility.value,
            "beta_witness": dict(self.beta_witness),
        }


def classify_esss(z: int, nu: VaRatePolicy, costs: PublicCostModel,
                  disease: DiseaseParams, m: int) -> EssReport:
    """Which candidate limits are evolutionarily stable at (z, nu).

    Classification does not need the crowd-sensitivity beta: each stable
    case admits a witness response (recorded in beta_witness). The set
    holds 'none' when no candidate qualifies.
    """
    adm = is_admissible(nu, disease)
    witness: dict[str, str] = {}

    if disease.rho <= 1.0:
        witness["self_eradicating"] = f"beta < b/nu_b = {disease.b / nu.nu_b:.6g}" \
            if nu.nu_b > 0 else "any beta"
        return EssReport(z, math.nan, math.nan, None,
                         frozenset({"self_eradicating"}),
                         eradication_conditional=0, admissibility=adm,
                         beta_witness=witness)

    stable: set[str] = set()
    gap = admissibility_gap(nu, disease)
    co_exists = disease.b * disease.rho - nu.nu_e > 0

    if co_exists:
        h_i, h_v, h_v_o = h_values(z, nu, costs, disease, m)
    else:
        h_i, h_v = _h_iv_only(z, nu, costs, disease, m)
        h_v_o = None

    _warn_boundary("h_i", h_i)
    _warn_boundary("h_v", h_v)

    if h_i > 0.0:
        stable.add("non_vaccinating")
        witness["non_vaccinating"] = (
            f"beta < b*rho/nu_b = {disease.b * disease.rho / nu.nu_b:.6g}"
            if nu.nu_b > 0 else "any beta")
    if h_v < 0.0 and gap > 0.0 and nu.nu_e >= 0.0:
        stable.add("eradicating")
        psi_e = psi_eradicating(nu, disease.b)
        witness["eradicating"] = f"beta > 1/psi_e = {1.0 / psi_e:.6g}"
    if h_v_o is not None:
        _warn_boundary("h_v_o", h_v_o)
        if h_v_o < 0.0 and 0.0 <= nu.nu_e and gap < 0.0:
            stable.add("co_occurring")
            psi_o = psi_co_occurring(nu, disease)
            witness["co_occurring"] = f"beta > 1/psi_o = {1.0 / psi_o:.6g}"

    erad = int(h_i <= 0.0 and h_v < 0.0 and bool(adm))
    return EssReport(z, h_i, h_v, h_v_o,
                     frozenset(stable) if stable else frozenset({"none"}),
                     eradication_conditional=erad, admissibility=adm,
                     beta_witness=witness)


def _h_iv_only(z, nu, costs, disease, m):
    theta_star = disease.theta_star
    share = 1.0 - z / m
    cf = costs.c_f(z)
    h_i = (costs.c_v1 + share * costs.c_v2_bar
           - _infection_term(theta_star, nu.nu_b, disease.lam, costs.c_i) - cf)
    h_v = costs.c_v1 + share * _side_effect_term(
        psi_eradicating(nu, disease.b), costs) - cf
    return h_i, h_v


def eradication_probability(z: int, nu: VaRatePolicy, costs: PublicCostModel,
                            disease: DiseaseParams, m: int) -> int:
    """Conditional certainty of complete eradication given Z = z (0 or 1)."""
    if not is_admissible(nu, disease):
        return 0
    h_i, h_v = _h_iv_only(z, nu, costs, disease, m)
    return int(h_i <= 0.0 and h_v < 0.0)


def eradication_threshold(nu: VaRatePolicy, costs: PublicCostModel,
                          disease: DiseaseParams, m: int) -> int:
    """Least z with h_v(z) < 0 and h_i(z) <= 0; eradication is certain
    exactly from this count upward.

    The scan over z = 0..m is cheap and safe at the boundaries; both gaps
    are monotone in z so the first hit is the threshold. Raises
    InsufficientInfluenceError when c_v1 - c_f(m) >= 0 and ValueError for
    a non-admissible policy.
    """
    costs.require_influence(m)
    status = is_admissible(nu, disease)
    if not status:
        raise ValueError(f"policy is not admissible ({status.value})")
    for z in range(m + 1):
        h_i, h_v = _h_iv_only(z, nu, costs, disease, m)
        if h_v < 0.0 and h_i <= 0.0:
            return z
    raise AssertionError("unreachable: h_i(m) < h_v(m) < 0 under A.1")
