import numpy as np
import pytest

from cabf import _kernels as K
from cabf.affine import (
    AffineError,
    AffineTransform,
    ClassRegistry,
    LimitExceeded,
    SignatureCollision,
    SingularMatrix,
    UnknownClass,
    UnknownSignature,
    apply_transform,
    classify,
    gf2_rank,
    orbit_enumerate,
    signature,
)
from cabf.boolfn import TruthTable, WrongArity, from_hex

from oracles import python_orbit


def test_gf2_rank():
    assert gf2_rank([1, 2, 4]) == 3
    assert gf2_rank([3, 5, 6]) == 2
    assert gf2_rank([0, 0]) == 0


def test_singular_matrix_rejected():
    with pytest.raises(SingularMatrix):
        AffineTransform((1, 2, 3, 8, 16))
    with pytest.raises(AffineError):
        AffineTransform((1, 2, 4, 8, 16), b=32)


def test_identity_is_neutral(rng):
    t = TruthTable(5, int(rng.integers(0, 1 << 32)))
    assert apply_transform(t, AffineTransform.identity()) == t


def test_transform_formula_pointwise(rng):
    for _ in range(20):
        g = TruthTable(5, int(rng.integers(0, 1 << 32)))
        T = AffineTransform.random(rng)
        f = apply_transform(g, T)
        for x in range(32):
            y = T.b
            for i, row in enumerate(T.A):
                y ^= ((row & x).bit_count() & 1) << i
            assert f[x] == g[y] ^ ((T.c & x).bit_count() & 1) ^ T.d


def test_composition_law(rng):
    for _ in range(200):
        g = TruthTable(5, int(rng.integers(0, 1 << 32)))
        T1, T2 = AffineTransform.random(rng), AffineTransform.random(rng)
        # f = apply(g, T1) then h = apply(f, T2): h(x) = f(A2x+b2)+..., one transform.
        assert apply_transform(apply_transform(g, T1), T2) == apply_transform(g, T1.then(T2))


def test_signature_invariance(rng):
    for _ in range(300):
        g = TruthTable(5, int(rng.integers(0, 1 << 32)))
        assert signature(apply_transform(g, AffineTransform.random(rng))) == signature(g)


def test_signature_degree_floor_of_one():
    x0 = TruthTable.variable(5, 0)
    assert signature(x0) == signature(TruthTable.zero(5))
    assert signature(x0).degree == 1


def test_registry_shape(registry):
    assert len(registry) == 48
    assert len(set(registry.ids)) == 48
    assert sum(e.expected_count for e in registry) == 1 << 32
    assert len(registry.signatures) == 48
    for e in registry:
        assert registry.classify(e.rep) == e.rep_hex


def test_registry_lookup_errors(registry):
    with pytest.raises(UnknownClass):
        registry["deadbeef"]
    with pytest.raises(WrongArity):
        classify(TruthTable.zero(4))


def test_registry_rejects_duplicate_signatures(registry):
    entries = list(registry)
    dup = entries[:47] + [entries[0].__class__(47, "55aa55aa", "", 64)]
    with pytest.raises(SignatureCollision):
        ClassRegistry(dup)
    with pytest.raises(AffineError):
        ClassRegistry(entries[:47])


def test_unknown_signature_raised():
    class Partial(ClassRegistry):
        def __init__(self, inner):
            self.signatures = {k: v for k, v in inner.signatures.items() if v.rep_hex != "aa55aa55"}

    from cabf.affine import default_registry

    with pytest.raises(UnknownSignature):
        Partial(default_registry()).classify(TruthTable.zero(5))


def test_anf_column_matches_representative(registry):
    from cabf.transforms import anf, anf_text, parse_anf

    for e in registry:
        assert parse_anf(e.anf, 5) == anf(e.rep), e.rep_hex
        assert anf_text(parse_anf(e.anf, 5)) == anf_text(anf(e.rep))


def test_degenerate_members():
    assert classify(TruthTable.zero(5)) == "aa55aa55"
    assert classify(TruthTable.variable(5, 3)) == "aa55aa55"


@pytest.mark.parametrize("rep_hex, size", [("aa55aa55", 64), ("aa55ab55", 2048), ("88ddbb11", 9920)])
def test_orbit_matches_python_search(rep_hex, size):
    rep = from_hex(rep_hex, 5)
    fast = orbit_enumerate(rep)
    slow = python_orbit(rep.bits)
    assert len(fast) == size
    assert set(fast.tolist()) == slow


def test_orbit_members_classify_consistently(rng):
    members = orbit_enumerate(from_hex("288d1b41", 5))
    for bits in rng.choice(members, size=300, replace=False):
        assert classify(TruthTable(5, int(bits))) == "288d1b41"


def test_orbit_limit_exceeded():
    with pytest.raises(LimitExceeded):
        orbit_enumerate(from_hex("aa55ab55", 5), limit=2047)
    assert len(orbit_enumerate(from_hex("aa55ab55", 5), limit=2048)) == 2048
    with pytest.raises(ValueError):
        orbit_enumerate(from_hex("aa55ab55", 5), limit=0)


def test_kernel_classification_matches_generic(registry, rng):
    keys, order, sigs = registry.kernel_tables
    rules = rng.integers(0, 1 << 32, size=3000, dtype=np.int64)
    out = np.zeros((len(rules), 5), dtype=np.int64)
    K.analyze5_batch(rules, keys, order, sigs, out)
    for bits, row in zip(rules, out):
        assert registry.entries[row[4]].rep_hex == classify(TruthTable(5, int(bits)))


def test_kernel_signature_matches_generic(registry, rng):
    rules = rng.integers(0, 1 << 32, size=500, dtype=np.int64)
    out = np.zeros((len(rules), K.SIG_LEN), dtype=np.int64)
    K.signatures5_batch(rules, out)
    for bits, row in zip(rules, out):
        s = signature(TruthTable(5, int(bits)))
        walsh = np.bincount(np.array(s.walsh_abs_multiset) // 2, minlength=17)
        auto = np.bincount(np.array(s.autocorr_abs_multiset) // 4, minlength=9)
        assert row.tolist() == [s.degree, *walsh.tolist(), *auto.tolist()]
