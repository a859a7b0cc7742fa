import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from birkspec.constructions import example_indicator
from birkspec.dimension import BlockAlphabet, eggleston_dimension, moran_dimension
from birkspec.shift_core import PreconditionError, word
from birkspec.thermo import spectrum_at


def test_moran_examples():
    assert moran_dimension(["000", "001"]) == pytest.approx(1 / 3, abs=1e-12)
    assert moran_dimension(["0110"]) == 0.0
    assert moran_dimension(["0", "10", "11"]) == pytest.approx(1.0, abs=1e-12)


def test_moran_equal_length_closed_form():
    blocks = ["0000", "0101", "1111"]
    assert moran_dimension(blocks) == pytest.approx(math.log(3) / (4 * math.log(2)), abs=1e-12)


def test_separation_enforced():
    with pytest.raises(PreconditionError):
        BlockAlphabet(("0", "01"))
    with pytest.raises(PreconditionError):
        BlockAlphabet(("01", "01"))
    with pytest.raises(PreconditionError):
        BlockAlphabet(())


def test_blocks_json():
    b = BlockAlphabet.from_json({"blocks": ["000", "001"]})
    assert b.to_json() == {"blocks": ["000", "001"]}
    with pytest.raises(PreconditionError):
        BlockAlphabet.from_json({"words": []})


def test_eggleston_examples():
    assert eggleston_dimension(0.5) == 1.0
    assert eggleston_dimension(0.0) == 0.0
    assert eggleston_dimension(1.0) == 0.0
    assert eggleston_dimension(0.25) == pytest.approx(0.8112781244591328, abs=1e-15)
    with pytest.raises(PreconditionError):
        eggleston_dimension(1.5)


def test_eggleston_matches_spectrum():
    f = example_indicator()
    for i in range(1, 100):
        a = i / 100
        assert abs(eggleston_dimension(a) - spectrum_at(f, a)) <= 1e-8


@st.composite
def equal_length_blocks(draw):
    L = draw(st.integers(1, 6))
    ints = draw(st.sets(st.integers(0, (1 << L) - 1), min_size=1, max_size=1 << L))
    return [format(i, f"0{L}b") for i in sorted(ints)]


@given(equal_length_blocks())
def test_moran_invariant_under_block_pairing(blocks):
    # the pairs u v generate the same set as the blocks themselves
    pairs = [u + v for u in blocks for v in blocks]
    assert moran_dimension(pairs) == pytest.approx(moran_dimension(blocks), abs=1e-12)


@given(st.integers(1, 6))
def test_one_symbol_extension_of_full_block_set(L):
    blocks = [format(i, f"0{L}b") for i in range(1 << L)]
    ext = [b + c for b in blocks for c in "01"]
    assert moran_dimension(ext) == pytest.approx(moran_dimension(blocks), abs=1e-12)
    assert moran_dimension(blocks) == pytest.approx(1.0, abs=1e-12)


def test_one_symbol_extension_changes_dimension_below_one():
    blocks = ["000", "001"]
    ext = [b + c for b in blocks for c in "01"]
    assert moran_dimension(ext) == pytest.approx(0.5, abs=1e-12)


@given(equal_length_blocks())
def test_moran_in_unit_interval(blocks):
    s = moran_dimension(blocks)
    assert 0.0 <= s <= 1.0 + 1e-15
    L = len(blocks[0])
    assert s == pytest.approx(math.log(len(blocks)) / (L * math.log(2)), abs=1e-12)
