import numpy as np
from hypothesis import given, settings, strategies as st

from gbta import iso
from gbta.algebra import Element, transformed_table
from gbta.classify import idempotents
from gbta.params import new_params

unit = st.floats(0.05, 0.95)


def test_decide_examples():
    r = iso.decide_isomorphic(new_params(0.6, 0.3), new_params(0.6, 0.7))
    assert r.isomorphic and r.reason is iso.Reason.SWAP_BETA
    np.testing.assert_array_equal(r.witness, iso.SWAP)
    r = iso.decide_isomorphic(new_params(0.6, 0.3), new_params(0.5, 0.3))
    assert not r.isomorphic and r.witness is None and r.reason is iso.Reason.NOT_ISOMORPHIC
    r = iso.decide_isomorphic(new_params(0.6, 0.3), new_params(0.6, 0.3))
    assert r.isomorphic and r.same_algebra and r.reason is iso.Reason.IDENTITY
    np.testing.assert_array_equal(r.witness, np.eye(4))


def test_decide_uses_first_tol():
    p1 = new_params(0.6, 0.3, tol=1e-3)
    p2 = new_params(0.6, 0.7 + 1e-4)
    assert iso.decide_isomorphic(p1, p2).isomorphic
    assert not iso.decide_isomorphic(new_params(0.6, 0.3), p2).isomorphic


def test_decide_exact():
    a = new_params("3/5", "3/10", mode="rational")
    assert iso.decide_isomorphic(a, new_params("3/5", "7/10", mode="rational")).isomorphic
    assert not iso.decide_isomorphic(a, new_params("3/5", "7/10", mode="rational").with_beta("701/1000")).isomorphic


@settings(max_examples=200, deadline=None)
@given(unit, unit, unit, unit)
def test_decide_symmetric_reflexive(l1, b1, l2, b2):
    p, q = new_params(l1, b1), new_params(l2, b2)
    assert iso.decide_isomorphic(p, q).isomorphic == iso.decide_isomorphic(q, p).isomorphic
    assert iso.decide_isomorphic(p, p).isomorphic


def test_verify_examples():
    assert iso.verify_homomorphism(new_params(0.6, 0.3), new_params(0.6, 0.7), iso.SWAP)
    assert not iso.verify_homomorphism(new_params(0.6, 0.3), new_params(0.5, 0.3), np.eye(4))
    assert not iso.verify_homomorphism(new_params(0.6, 0.3), new_params(0.6, 0.3), np.zeros((4, 4)))
    assert not iso.verify_homomorphism(new_params(0.6, 0.3), new_params(0.6, 0.3), np.full((4, 4), np.nan))


def test_verify_identity_mismatch_on_o_a():
    # oracle: o.a = 0.6 a in the target against 0.5 a in the source
    t1, t2 = transformed_table(new_params(0.6, 0.3)), transformed_table(new_params(0.5, 0.3))
    o, a = np.eye(4)[0], np.eye(4)[1]
    gap = t2.product(o, a) - t1.product(o, a)
    np.testing.assert_allclose(gap, [0, -0.1, 0, 0], atol=1e-15)
    assert iso.homomorphism_defect(new_params(0.6, 0.3), new_params(0.5, 0.3), np.eye(4)) >= 0.1


def test_search_finds_swap():
    rng = np.random.default_rng(0)
    for lam, beta in rng.uniform(0.05, 0.95, size=(5, 2)):
        p = new_params(lam, beta)
        w = iso.search_isomorphism(p, p.swapped(), trials=100, seed=1)
        assert w is not None and iso.verify_homomorphism(p, p.swapped(), w)


def test_search_self():
    p = new_params(0.4, 0.2)
    w = iso.search_isomorphism(p, p, trials=100, seed=2)
    assert w is not None and iso.verify_homomorphism(p, p, w)


def test_search_finds_nothing_across_lambda():
    assert iso.search_isomorphism(new_params(0.6, 0.3), new_params(0.5, 0.3), trials=1000, seed=3) is None


def test_search_agrees_with_decision():
    rng = np.random.default_rng(4)
    for k in range(20):
        l1, b1, l2, b2 = rng.uniform(0.05, 0.95, 4)
        if k % 3 == 0:
            l2 = l1
        p, q = new_params(l1, b1), new_params(l2, b2)
        if iso.search_isomorphism(p, q, trials=50, seed=k) is not None:
            assert iso.decide_isomorphic(p, q).isomorphic


def test_transport_of_idempotents():
    for lam, beta in [(0.6, 0.3), (0.2, 0.9), (0.75, 0.4)]:
        p1, p2 = new_params(lam, beta), new_params(lam, 1 - beta)
        phi = iso.decide_isomorphic(p1, p2).witness
        src = idempotents(p2).arrays()
        dst = idempotents(p1).arrays()
        assert len(src) == len(dst)
        for e in src:
            img = e @ phi
            assert min(np.abs(img - f).max() for f in dst) < 1e-9


def test_json():
    d = iso.decide_isomorphic(new_params(0.6, 0.3), new_params(0.6, 0.7)).to_json()
    assert d["isomorphic"] is True and d["reason"] == "SwapBeta"
    assert d["witness"][1] == [0.0, 0.0, 1.0, 0.0]
