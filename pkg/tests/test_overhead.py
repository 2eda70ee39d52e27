import pytest
from hypothesis import given
from hypothesis import strategies as st

from beamlink import ConfigurationError, feedback_budget


@pytest.mark.parametrize("scheme,real,cplx", [
    ("omni-np", 2, 0),
    ("omni-zf", 0, 4),
    ("beam-np", 32, 0),
    ("beam-zf", 0, 64),
])
def test_reference_counts_k2_l4(scheme, real, cplx):
    budget = feedback_budget(2, 4, scheme)
    assert (budget.real_scalars, budget.complex_scalars) == (real, cplx)


def test_omni_budgets_ignore_l():
    for l in (1, 4, 9):
        assert feedback_budget(2, l, "omni-np").real_scalars == 2
        assert feedback_budget(2, l, "omni-zf").complex_scalars == 4


def test_concrete_scheme_ids_map_to_families():
    assert feedback_budget(2, 4, "omni-zf-etp").complex_scalars == 4
    assert feedback_budget(2, 4, "beam-zf-imperfect").complex_scalars == 64
    assert feedback_budget(2, 4, "beam-zf-erp").complex_scalars == 64


def test_unknown_scheme_rejected():
    with pytest.raises(ConfigurationError, match="unknown scheme"):
        feedback_budget(2, 4, "carrier-pigeon")


@given(k=st.integers(1, 6), l=st.integers(1, 6))
def test_beam_to_omni_ratio_is_l_to_the_k(k, l):
    assert feedback_budget(k, l, "beam-np").real_scalars \
        == l**k * feedback_budget(k, l, "omni-np").real_scalars
    assert feedback_budget(k, l, "beam-zf").complex_scalars \
        == l**k * feedback_budget(k, l, "omni-zf").complex_scalars


@given(k=st.integers(1, 5), l=st.integers(1, 5))
def test_budgets_monotone_in_k_and_l(k, l):
    for scheme in ("omni-np", "omni-zf", "beam-np", "beam-zf"):
        base = feedback_budget(k, l, scheme)
        up_k = feedback_budget(k + 1, l, scheme)
        up_l = feedback_budget(k, l + 1, scheme)
        for grown in (up_k, up_l):
            assert grown.real_scalars >= base.real_scalars
            assert grown.complex_scalars >= base.complex_scalars
