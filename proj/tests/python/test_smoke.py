import os
from pathlib import Path

import numpy as np
import pytest

import l3fuse

MACHINES = Path(__file__).resolve().parents[2] / "data" / "machines"


def correlate(x, w, pad):
    """Direct cross-correlation in float64 via numpy, independent of the library."""
    xp = np.pad(x.astype(np.float64), ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    k = w.shape[2]
    oh, ow = xp.shape[2] - k + 1, xp.shape[3] - k + 1
    out = np.zeros((x.shape[0], w.shape[0], oh, ow))
    for a in range(k):
        for b in range(k):
            out += np.einsum("bchw,oc->bohw", xp[:, :, a:a + oh, b:b + ow], w[:, :, a, b])
    return out


@pytest.mark.parametrize("engine", ["direct", "three_stage", "fused"])
@pytest.mark.parametrize("tile", [4, 6, 8])
def test_conv_matches_numpy(engine, tile):
    rng = np.random.default_rng(tile)
    x = rng.uniform(-1, 1, (2, 5, 17, 13)).astype(np.float32)
    w = rng.uniform(-1, 1, (7, 5, 3, 3)).astype(np.float32)
    out, stats = l3fuse.conv2d(x, w, pad_lo=1, engine=engine, tile=tile, tiles_per_task=5,
                               workers=2)
    ref = correlate(x, w, 1)
    assert out.shape == ref.shape
    assert np.abs(out - ref).max() / np.abs(ref).max() <= 1e-4
    if engine != "direct":
        assert stats["flops"] == 2 * stats["tiles"] * 5 * 7 * tile * tile


def test_fused_equals_three_stage_bitwise():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((1, 9, 20, 20)).astype(np.float32)
    w = rng.standard_normal((4, 9, 3, 3)).astype(np.float32)
    fused, stats = l3fuse.conv2d(x, w, engine="fused", instrumented=True, workers=3)
    staged, _ = l3fuse.conv2d(x, w, engine="three_stage")
    assert np.array_equal(fused, staged)
    assert stats["overwrite_violations"] == 0


def test_basis():
    basis = l3fuse.make_basis(4, 3, points="0,1,-1")
    assert basis["out_tile"] == 2
    assert basis["B"].shape == (4, 4)
    assert basis["G"].shape == (4, 3)
    assert basis["A"].shape == (4, 2)
    assert basis["exact"]["G"][3] == "1/2"
    with pytest.raises(l3fuse.InvalidParameter):
        l3fuse.make_basis(9)


def test_buffer_layout():
    layout = l3fuse.buffer_layout(24, 64, 64, 7)
    assert layout["capacity"] == 49 * 4 * 24 * 64 + 4 * 24 * 64
    assert len(layout["left_offsets"]) == 49


def test_plan():
    spec = l3fuse.LayerSpec(64, 64, 64, 56, 56)
    report = l3fuse.plan(MACHINES / "skylakex.json", spec)
    assert (report["r_lower"], report["r_upper"], report["chosen_r"]) == (20, 40, 40)
    assert report["feasible"]
    assert l3fuse.r_lower_bound(4.0) == 8
    assert l3fuse.l2_element_budget(256 * 1024) == 32768
    with pytest.raises(l3fuse.ParseError):
        l3fuse.plan(MACHINES / "missing.json", spec)


def test_errors():
    with pytest.raises(l3fuse.InvalidDimension):
        l3fuse.LayerSpec(0, 1, 1, 8, 8)
    x = np.zeros((1, 3, 8, 8), np.float32)
    w = np.zeros((2, 4, 3, 3), np.float32)
    with pytest.raises(l3fuse.ShapeMismatch):
        l3fuse.conv2d(x, w)
    with pytest.raises(l3fuse.ShapeMismatch):
        l3fuse.conv2d(np.zeros((3, 8, 8), np.float32), w)


def test_verify_case():
    result = l3fuse.verify_case(l3fuse.LayerSpec(1, 6, 10, 15, 12, pad_lo=0), tile=7,
                                tiles_per_task=3, workers=2)
    assert result["pass"]
    assert result["fused_equals_three_stage"]
