import numpy as np
import pytest

from charfield.errors import NonPrime, SizeExceeded
from charfield.tower import FFElement, build_tower, field_arith


def elems(ctx):
    return [FFElement(ctx, h) for h in range(ctx.Q)]


def test_construction_basics(tower):
    c4 = tower(2, 1, 2)
    assert (c4.p, c4.q, c4.Q, c4.N) == (2, 2, 4, 3)
    assert FFElement(c4, int(c4.exp[1])).mult_order() == 3  # gamma generates
    c9 = tower(3, 1, 2)
    assert len(c9.subfield) == 3
    with pytest.raises(NonPrime):
        build_tower(4, 1, 2)


def test_size_cap():
    with pytest.raises(SizeExceeded):
        build_tower(2, 1, 23)
    # explicit higher cap admits a field the default would reject
    with pytest.raises(SizeExceeded):
        build_tower(2, 1, 5, size_cap=16)


def test_arithmetic_in_quartic_group():
    c4 = build_tower(2, 1, 2)
    for a in elems(c4):
        if a.h in (0, 1):
            continue
        assert (a * a * a).h == 1  # cube of either non-subfield element is 1
        assert (a * (a * a)).h == 1


def test_inverse_and_lagrange(tower):
    for p, s, m in [(2, 1, 3), (3, 1, 2), (2, 2, 2), (5, 1, 2)]:
        ctx = tower(p, s, m)
        with pytest.raises(ZeroDivisionError):
            ctx.inv(0)
        for a in elems(ctx):
            if a.h == 0:
                continue
            assert (a ** (ctx.Q - 1)).h == 1
            assert (a * FFElement(ctx, ctx.inv(a.h))).h == 1


def test_log_is_a_group_homomorphism(tower):
    for p, s, m in [(2, 1, 4), (3, 1, 2), (2, 2, 2)]:
        ctx = tower(p, s, m)
        for a in range(1, ctx.Q):
            for b in range(1, ctx.Q):
                lhs = int(ctx.log[ctx.mul(a, b)])
                rhs = (int(ctx.log[a]) + int(ctx.log[b])) % ctx.N
                assert lhs == rhs
        # exp/log round trip
        for k in range(ctx.N):
            assert int(ctx.log[ctx.exp[k]]) == k


def test_frobenius(tower):
    c4 = tower(2, 1, 2)
    for a in elems(c4):
        assert a.frobenius(0) == a
        assert a.frobenius(c4.m) == a
        if not a.in_subfield():
            # x -> x^2 sends each non-subfield element to the other one
            assert a.frobenius(1).h != a.h
            assert a.frobenius(1) == a * a
    c = tower(3, 1, 3)
    for a in elems(c):
        assert a.frobenius(1) == a ** c.q
        assert a.frobenius(2) == a ** (c.q**2)


def test_trace_surjective_linear(tower):
    for p, s, m in [(2, 1, 2), (2, 1, 4), (3, 1, 2), (2, 2, 2)]:
        ctx = tower(p, s, m)
        zeros = sum(1 for a in elems(ctx) if a.trace_to_base().h == 0)
        assert zeros == ctx.q ** (ctx.m - 1)
        for a in elems(ctx):
            t = a.trace_to_base()
            assert t.in_subfield()
            # trace equals the sum of Galois conjugates
            acc = FFElement(ctx, 0)
            for k in range(ctx.m):
                acc = acc + a.frobenius(k)
            assert acc == t


def test_trace_in_quartic_field():
    c4 = build_tower(2, 1, 2)
    for a in elems(c4):
        if not a.in_subfield():
            assert a.trace_to_base().h == 1


def test_trace_transitivity_through_intermediate_field():
    # both towers share deg(modulus) = 4 and the same seed, hence one handle space
    big = build_tower(2, 1, 4)
    mid = build_tower(2, 2, 2)
    assert big.modulus == mid.modulus
    for h in range(16):
        inner = mid.tr_q[h]  # trace to the 4-element field, still a 16-space handle
        outer = mid.add(int(inner), mid.mul(int(inner), int(inner)))  # y + y^2
        assert int(big.tr_p[h]) == outer


def test_mult_order(tower):
    for p, s, m in [(2, 1, 3), (3, 1, 2), (5, 1, 2)]:
        ctx = tower(p, s, m)
        assert FFElement(ctx, 1).mult_order() == 1
        assert FFElement(ctx, int(ctx.exp[1])).mult_order() == ctx.N
        if ctx.p != 2:
            minus_one = FFElement(ctx, ctx.neg(1))
            assert minus_one.mult_order() == 2
        for a in elems(ctx):
            if a.h == 0:
                continue
            o = a.mult_order()
            assert (a**o).h == 1
            assert all((a**d).h != 1 for d in range(1, o))


def test_extension_generators(tower):
    c4 = tower(2, 1, 2)
    assert all(not FFElement(c4, int(h)).is_extension_generator() for h in c4.subfield)
    assert all(
        FFElement(c4, h).is_extension_generator() for h in range(4) if h not in (0, 1)
    )
    for p, s, m in [(2, 1, 3), (3, 1, 3), (2, 2, 3), (2, 1, 5)]:
        ctx = tower(p, s, m)  # m prime: the only proper intermediate field is the base
        non_gens = sum(1 for a in elems(ctx) if not a.is_extension_generator())
        assert non_gens == ctx.q


def test_field_arith_dispatch(tower):
    ctx = tower(3, 1, 2)
    a, b = FFElement(ctx, 4), FFElement(ctx, 7)
    assert field_arith(a, b, "add") == a + b
    assert field_arith(a, b, "sub") == a - b
    assert field_arith(a, b, "mul") == a * b
    assert field_arith(a, b, "div") == a / b
    with pytest.raises(ValueError):
        field_arith(a, b, "xor")


def test_seed_determinism_and_digit_decoding():
    a = build_tower(2, 1, 3, seed=5)
    b = build_tower(2, 1, 3, seed=5)
    assert a is b or a.modulus == b.modulus
    ctx = build_tower(3, 1, 2)
    for h in range(ctx.Q):
        d = FFElement(ctx, h).digits()
        assert len(d) == ctx.n
        assert sum(c * 3**i for i, c in enumerate(d)) == h


def test_subfield_is_closed(tower):
    for p, s, m in [(2, 2, 2), (3, 1, 2), (2, 2, 3)]:
        ctx = tower(p, s, m)
        sub = set(int(h) for h in ctx.subfield)
        assert len(sub) == ctx.q and 0 in sub and 1 in sub
        for a in sub:
            for b in sub:
                assert ctx.add(a, b) in sub
                assert ctx.mul(a, b) in sub


def test_vectorized_ops_match_scalar(tower):
    ctx = tower(2, 2, 2)
    A = np.arange(ctx.Q, dtype=np.int64)
    for b in range(ctx.Q):
        va = ctx.vadd(b, A)
        vm = ctx.vmul(b, A)
        for a in range(ctx.Q):
            assert int(va[a]) == ctx.add(b, a)
            assert int(vm[a]) == ctx.mul(b, a)
