import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from factoroid import constructors as mk
from factoroid.cocycle import (
    CocycleIdentityViolated,
    NotUnitModulus,
    apply_coboundary,
    as_complex,
    central_set_search,
    is_omega_regular,
    kleppner_holds,
    normalize_cocycle,
    trivial_cocycle,
    twisted_icc,
    validate_cocycle,
    verify_central_certificate,
)
from factoroid.conjugacy import is_icc


def klein_pair(exact=False):
    return mk.klein_four_twisted(exact=exact)


def test_trivial_cocycle_is_normalized(full2):
    w = trivial_cocycle(full2)
    assert w.normalized
    assert set(w.values) == set(full2.composable_pairs())


def test_klein_cocycle_identity_oracle():
    # independent check of the associativity phase identity on all triples
    g, w = klein_pair()
    for (y, z), yz in g.compose.items():
        for x in g.by_source(g.tgt[y]):
            lhs = as_complex(w.values[(x, yz)]) * as_complex(w.values[(y, z)])
            rhs = as_complex(w.values[(g.compose[(x, y)], z)]) * as_complex(
                w.values[(x, y)]
            )
            assert lhs == pytest.approx(rhs, abs=1e-12)


def test_validate_rejects_non_unit_modulus(z2):
    values = {pair: complex(1.0) for pair in z2.composable_pairs()}
    values[("pt.1", "pt.1")] = 0.5 + 0j
    with pytest.raises(NotUnitModulus):
        validate_cocycle(z2, values)


def test_validate_rejects_random_phases(full2):
    import random

    rng = random.Random(7)
    values = {
        pair: cmath.exp(2j * cmath.pi * rng.random())
        for pair in full2.composable_pairs()
    }
    with pytest.raises(CocycleIdentityViolated):
        validate_cocycle(full2, values)


def test_validate_requires_all_pairs(z2):
    with pytest.raises(CocycleIdentityViolated):
        validate_cocycle(z2, {})


def test_normalize_klein():
    g, w = klein_pair()
    assert not w.normalized
    wn = normalize_cocycle(g, w)
    assert wn.normalized
    for x in g.arrow_order:
        assert as_complex(wn.values[(x, g.inverse[x])]) == pytest.approx(1.0)
    # normalizing again is the identity
    wn2 = normalize_cocycle(g, wn)
    for pair in wn.values:
        assert as_complex(wn2.values[pair]) == pytest.approx(
            as_complex(wn.values[pair])
        )


def test_normalize_fixes_trivial(z3):
    w = trivial_cocycle(z3)
    wn = normalize_cocycle(z3, w)
    for pair in w.values:
        assert as_complex(wn.values[pair]) == 1.0


def test_normalized_cocycle_inverse_symmetry():
    # after full normalization, conj(w(x, y)) = w(y^-1, x^-1)
    g, w = klein_pair()
    wn = normalize_cocycle(g, w)
    for (x, y) in wn.values:
        lhs = as_complex(wn.values[(x, y)]).conjugate()
        rhs = as_complex(wn.values[(g.inverse[y], g.inverse[x])])
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_apply_coboundary_round_trip(full3):
    import random

    rng = random.Random(3)
    w = trivial_cocycle(full3)
    rho = mk.random_coboundary(full3, rng)
    w1 = apply_coboundary(full3, w, rho)
    back = apply_coboundary(full3, w1, {a: v.conjugate() for a, v in rho.items()})
    for pair in w.values:
        assert as_complex(back.values[pair]) == pytest.approx(1.0, abs=1e-12)


def test_cocycle_identity_preserved_by_normalize_and_coboundary():
    import random

    g, w = klein_pair()
    rng = random.Random(11)
    w1 = apply_coboundary(g, w, mk.random_coboundary(g, rng))
    w2 = normalize_cocycle(g, w1)
    for (y, z), yz in g.compose.items():
        for x in g.by_source(g.tgt[y]):
            lhs = as_complex(w2.values[(x, yz)]) * as_complex(w2.values[(y, z)])
            rhs = as_complex(w2.values[(g.compose[(x, y)], z)]) * as_complex(
                w2.values[(x, y)]
            )
            assert abs(lhs - rhs) < 1e-10


def test_omega_regular_examples(full2):
    g, w = klein_pair()
    verdict = is_omega_regular(g, w, ["pt.0.1"])
    assert not verdict.regular
    assert verdict.witness == ("pt.1.0", "pt.0.1", "pt.0.1")
    assert is_omega_regular(g, trivial_cocycle(g), ["pt.0.1"]).regular
    assert is_omega_regular(g, w, [g.unit_arrow["pt"]]).regular
    assert is_omega_regular(
        full2, trivial_cocycle(full2), full2.unit_arrow_set
    ).regular


def test_central_set_untwisted_exists(z2, s3_bundle):
    for g in (z2, s3_bundle):
        cert = central_set_search(g, trivial_cocycle(g))
        assert cert is not None
        verify_central_certificate(g, trivial_cocycle(g), cert)
        assert all(abs(v) == pytest.approx(1.0) for v in cert.f.values())


def test_central_set_klein_twisted_none():
    g, w = klein_pair()
    assert central_set_search(g, w) is None


def test_central_set_principal_none(full3):
    assert central_set_search(full3, trivial_cocycle(full3)) is None


def test_central_set_skips_null_isotropy(null_orbit_groupoid):
    # isotropy exists only over null units; no central set should be found
    g = null_orbit_groupoid
    assert central_set_search(g, trivial_cocycle(g)) is None


def test_kleppner_examples(full3):
    z2g = mk.group_groupoid(mk.cyclic_group(2))
    v = kleppner_holds(z2g, trivial_cocycle(z2g))
    assert not v.holds and v.witness == "pt.1"
    g, w = klein_pair()
    assert kleppner_holds(g, w).holds
    assert not kleppner_holds(g, trivial_cocycle(g)).holds
    assert kleppner_holds(full3, trivial_cocycle(full3)).holds


def test_twisted_icc_examples():
    g, w = klein_pair()
    assert twisted_icc(g, w).icc
    verdict = twisted_icc(g, trivial_cocycle(g))
    assert not verdict.icc
    assert verdict.certificate is not None


def test_exact_mode_matches_floats():
    g, w_exact = klein_pair(exact=True)
    _, w_float = klein_pair(exact=False)
    assert w_exact.exact
    assert isinstance(next(iter(w_exact.values.values())), Fraction)
    wn = normalize_cocycle(g, w_exact)
    assert wn.exact and wn.normalized
    assert twisted_icc(g, w_exact).icc == twisted_icc(g, w_float).icc
    assert kleppner_holds(g, w_exact).holds == kleppner_holds(g, w_float).holds


@settings(max_examples=50, deadline=None)
@given(rho_seed=st.integers(0, 100000))
def test_normalize_survives_any_coboundary(rho_seed):
    # phases can land exactly on the square-root branch cut; normalization
    # must still produce phase 1 on every (x, x^-1)
    import random

    g, w = klein_pair()
    rng = random.Random(f"branch-{rho_seed}")
    w1 = apply_coboundary(g, w, mk.random_coboundary(g, rng))
    wn = normalize_cocycle(g, w1)
    assert wn.normalized
    for x in g.arrow_order:
        assert as_complex(wn.values[(x, g.inverse[x])]) == pytest.approx(
            1.0, abs=1e-12
        )


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 3000))
def test_twisted_icc_specializes_to_icc(seed):
    g = mk.random_groupoid(seed)
    assert twisted_icc(g, trivial_cocycle(g)).icc == is_icc(g).icc


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 1000), rho_seed=st.integers(0, 1000))
def test_central_verdict_coboundary_invariant(seed, rho_seed):
    import random

    g, w = mk.random_twisted_pair(seed)
    rng = random.Random(f"rho-{rho_seed}")
    w2 = apply_coboundary(g, w, mk.random_coboundary(g, rng))
    assert (central_set_search(g, w) is None) == (central_set_search(g, w2) is None)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 1000))
def test_certificates_verify(seed):
    g, w = mk.random_twisted_pair(seed)
    wn = normalize_cocycle(g, w)
    cert = central_set_search(g, wn)
    if cert is not None:
        verify_central_certificate(g, wn, cert)
