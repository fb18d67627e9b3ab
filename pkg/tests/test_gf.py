import numpy as np
import pytest

from sparsepriv.gf import (
    Field,
    FieldElement,
    FieldMismatchError,
    add,
    get_field,
    neg,
    sample_uniform,
)


def carryless_mul_oracle(a: int, b: int) -> int:
    """Shift-and-add multiplication in GF(2)[x] / (x^8 + x^4 + x^3 + x + 1)."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & 0x100:
            a ^= 0x11B
    return out


def test_add_examples():
    f7, f256 = get_field(7), get_field(256)
    assert add(f7.element(3), f7.element(5)).value == 1
    assert add(f256.element(0x53), f256.element(0xCA)).value == 0x99
    for a in range(256):
        assert (f256.element(a) + f256.element(a)).value == 0


def test_neg_examples():
    assert neg(get_field(7).element(3)).value == 4
    assert neg(get_field(2).element(1)).value == 1
    f256 = get_field(256)
    assert all(neg(f256.element(a)).value == a for a in range(256))


def test_known_aes_products():
    f = get_field(256)
    assert f.mul(0x57, 0x83) == 0xC1
    assert f.mul(0x53, 0xCA) == 0x01


def test_mismatched_fields_rejected():
    with pytest.raises(FieldMismatchError):
        get_field(7).element(1) + get_field(3).element(1)


@pytest.mark.parametrize("q", [4, 8, 9, 100, 1, 0])
def test_unsupported_sizes(q):
    with pytest.raises(ValueError):
        Field(q)


def test_element_range_checked():
    with pytest.raises(ValueError):
        FieldElement(get_field(7), 7)


def test_neg_is_involution_and_inverse(field):
    a = np.arange(field.q)
    assert np.array_equal(field.neg(field.neg(a)), a)
    assert np.all(field.add(a, field.neg(a)) == 0)


def test_multiplicative_inverses(field):
    a = np.arange(1, field.q)
    assert np.all(field.mul(a, field.inv(a)) == 1)
    with pytest.raises(ZeroDivisionError):
        field.inv(0)


def test_field_axioms_random_triples(field, rng):
    a, b, c = field.sample(rng, size=(3, 10_000))
    assert np.array_equal(field.add(field.add(a, b), c), field.add(a, field.add(b, c)))
    assert np.array_equal(field.mul(field.mul(a, b), c), field.mul(a, field.mul(b, c)))
    assert np.array_equal(field.add(a, b), field.add(b, a))
    assert np.array_equal(field.mul(a, b), field.mul(b, a))
    assert np.array_equal(field.mul(a, field.add(b, c)), field.add(field.mul(a, b), field.mul(a, c)))


def test_gf256_mul_matches_shift_and_add(rng):
    f = get_field(256)
    a, b = f.sample(rng, size=(2, 1000))
    expected = [carryless_mul_oracle(int(x), int(y)) for x, y in zip(a, b)]
    assert f.mul(a, b).tolist() == expected


def test_gf256_power_matches_repeated_multiplication(rng):
    f = get_field(256)
    for a, e in zip(f.sample(rng, size=200), rng.integers(0, 600, size=200)):
        slow = 1
        for _ in range(int(e)):
            slow = carryless_mul_oracle(slow, int(a))
        assert f.power(int(a), int(e)) == slow


def test_sample_gf2_nonzero_is_always_one(rng):
    f = get_field(2)
    assert {sample_uniform(f, True, rng).value for _ in range(100)} == {1}


def test_sample_gf256_excludes_zero(rng):
    draws = get_field(256).sample(rng, size=1_000_000, exclude_zero=True)
    assert draws.min() == 1 and draws.max() == 255


def test_sample_gf7_is_uniform(rng):
    n = 1_000_000
    counts = np.bincount(get_field(7).sample(rng, size=n), minlength=7)
    sigma = np.sqrt((1 / 7) * (6 / 7) / n)
    assert np.all(np.abs(counts / n - 1 / 7) < 4 * sigma)


def test_sampling_is_seed_deterministic():
    f = get_field(256)
    a = f.sample(np.random.default_rng(5), size=50)
    b = f.sample(np.random.default_rng(5), size=50)
    assert np.array_equal(a, b)
