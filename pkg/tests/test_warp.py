import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridflow.errors import DimensionMismatchError
from hybridflow.flowio import FlowField, Frame, warp_frame


def random_frame(h, w, seed):
    rng = np.random.default_rng(seed)
    return Frame(values=rng.random((h, w, 3)).astype(np.float32))


def test_zero_flow_identity():
    frame = random_frame(5, 7, 0)
    out, covered = warp_frame(frame, FlowField.uniform(5, 7, 0.0, 0.0))
    np.testing.assert_array_equal(out.values, frame.values)
    assert covered.all()


def test_integer_shift():
    frame = random_frame(4, 6, 1)
    out, covered = warp_frame(frame, FlowField.uniform(4, 6, 1.0, 0.0))
    # output(x) = frame(x + 1); last column samples outside
    np.testing.assert_allclose(out.values[:, :-1], frame.values[:, 1:],
                               atol=1e-7)
    assert covered[:, :-1].all()
    assert not covered[:, -1].any()
    np.testing.assert_array_equal(out.values[:, -1], 0.0)


def test_half_pixel_average():
    # two-pixel row 0.2 / 0.6, shift +0.5 -> first output pixel is the mean
    vals = np.zeros((1, 2, 3), dtype=np.float32)
    vals[0, 0] = 0.2
    vals[0, 1] = 0.6
    frame = Frame(values=vals)
    out, covered = warp_frame(frame, FlowField.uniform(1, 2, 0.5, 0.0))
    np.testing.assert_allclose(out.values[0, 0], 0.4, atol=1e-7)
    assert covered[0, 0]
    assert not covered[0, 1]


def test_vertical_shift():
    frame = random_frame(5, 3, 2)
    out, covered = warp_frame(frame, FlowField.uniform(5, 3, 0.0, 2.0))
    np.testing.assert_allclose(out.values[:-2], frame.values[2:], atol=1e-7)
    assert not covered[-2:].any()


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        warp_frame(random_frame(2, 2, 0), FlowField.uniform(2, 3, 0, 0))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 31 - 1),
       dx=st.integers(-2, 2), dy=st.integers(-2, 2))
def test_integer_shift_exact_on_interior(seed, dx, dy):
    frame = random_frame(8, 8, seed)
    out, covered = warp_frame(frame, FlowField.uniform(8, 8, float(dx),
                                                       float(dy)))
    ys, xs = np.nonzero(covered)
    for y, x in zip(ys, xs):
        np.testing.assert_allclose(out.values[y, x],
                                   frame.values[y + dy, x + dx], atol=1e-6)
