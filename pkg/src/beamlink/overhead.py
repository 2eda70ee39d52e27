"""Feedback-overhead accounting per selection epoch.

Counts the scalars every user population must report for each scheme
family: omni non-precoded feeds back one SINR per user (K reals), omni ZF
the full channel (K^2 complex), and the beam-domain variants repeat those
counts for each of the L**K beam combinations.  Scalars, not bits;
quantization is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigurationError

__all__ = ["FeedbackBudget", "feedback_budget", "BUDGET_FAMILIES"]

# Scheme-family keys plus the concrete scheme identifiers that map to them.
BUDGET_FAMILIES = ("omni-np", "omni-zf", "beam-np", "beam-zf")
_FAMILY_OF = {
    "omni-np": "omni-np",
    "omni-zf": "omni-zf",
    "omni-zf-erp": "omni-zf",
    "omni-zf-etp": "omni-zf",
    "beam-np": "beam-np",
    "beam-zf": "beam-zf",
    "beam-zf-erp": "beam-zf",
    "beam-zf-etp": "beam-zf",
    "beam-zf-imperfect": "beam-zf",
}


@dataclass(frozen=True)
class FeedbackBudget:
    scheme: str
    real_scalars: int
    complex_scalars: int


def feedback_budget(k: int, l: int, scheme: str) -> FeedbackBudget:
    """Scalar feedback counts for one scheme (family or concrete id).

    omni-np -> K reals, omni-zf -> K^2 complex, beam-np -> K*L**K reals,
    beam-zf -> K^2*L**K complex.  L is ignored for the omni families.
    """
    if k < 1 or l < 1:
        raise ConfigurationError(f"need k >= 1 and l >= 1, got k={k}, l={l}")
    family = _FAMILY_OF.get(scheme)
    if family is None:
        raise ConfigurationError(f"unknown scheme {scheme!r} for feedback budget")
    if family == "omni-np":
        return FeedbackBudget(scheme, k, 0)
    if family == "omni-zf":
        return FeedbackBudget(scheme, 0, k * k)
    if family == "beam-np":
        return FeedbackBudget(scheme, k * l**k, 0)
    return FeedbackBudget(scheme, 0, k * k * l**k)
