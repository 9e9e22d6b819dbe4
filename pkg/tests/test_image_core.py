"""Image containers, deterministic I/O, convolution, and pooling."""

import numpy as np
import pytest

from conftest import random_image
from oracles import conv2d_naive, downsample2_naive

from restorekit.image import (
    FormatError,
    Kernel2D,
    RasterImage,
    box_kernel,
    gaussian_kernel,
    identity_kernel,
    load_image,
    motion_kernel,
    save_image,
)
from restorekit.ops import conv2d_array, convolve2d, downsample2


class TestRasterImage:
    def test_shape_and_fields(self):
        img = random_image(0, 5, 7, 3)
        assert (img.height, img.width, img.channels) == (5, 7, 3)
        assert img.data.size == 5 * 7 * 3

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="clamp explicitly"):
            RasterImage(np.full((2, 2, 1), 1.5))

    def test_rejects_non_finite(self):
        data = np.zeros((2, 2, 1))
        data[0, 0, 0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            RasterImage(data)

    def test_rejects_bad_channel_count(self):
        with pytest.raises(FormatError):
            RasterImage(np.zeros((2, 2, 4)))

    def test_2d_input_promoted_to_single_channel(self):
        img = RasterImage(np.zeros((3, 4)))
        assert img.channels == 1


class TestKernel2D:
    def test_rejects_even_dims(self):
        with pytest.raises(ValueError, match="odd"):
            Kernel2D(np.full((2, 3), 1.0 / 6.0))

    def test_normalized_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum"):
            Kernel2D(np.full((3, 3), 0.2))

    def test_normalized_rejects_negative_taps(self):
        taps = np.full((3, 3), 1.0 / 9.0)
        taps[0, 0] = -taps[0, 0]
        taps[1, 1] += 2.0 / 9.0
        with pytest.raises(ValueError, match="non-negative"):
            Kernel2D(taps)

    def test_unnormalized_allows_anything_finite(self):
        Kernel2D(np.array([[1.0, -2.0, 3.0]]).T @ np.array([[1.0]]), normalized=False)

    def test_builders_are_normalized(self):
        for k in (identity_kernel(), box_kernel(5), gaussian_kernel(1.3), motion_kernel(9, 30.0)):
            assert abs(k.taps.sum() - 1.0) < 1e-9
            assert k.taps.min() >= 0.0


class TestImageIO:
    def test_8bit_extremes(self, tmp_path):
        # 255 -> 1.0 and 0 -> 0.0 under the bit-depth maximum mapping
        img = RasterImage(np.array([[[1.0], [0.0]]]))
        path = tmp_path / "extremes.png"
        save_image(img, path, bit_depth=8)
        back = load_image(path)
        assert back.data[0, 0, 0] == 1.0
        assert back.data[0, 1, 0] == 0.0

    def test_16bit_midpoint_value(self, tmp_path):
        # 16-bit sample 32768 maps to 32768/65535
        img = RasterImage(np.full((2, 2, 1), 32768.0 / 65535.0))
        path = tmp_path / "mid.png"
        save_image(img, path, bit_depth=16)
        back = load_image(path)
        assert back.data[0, 0, 0] == pytest.approx(0.50000763, abs=1e-8)
        assert back.data[0, 0, 0] == 32768.0 / 65535.0

    @pytest.mark.parametrize("ext", ["png", "ppm"])
    @pytest.mark.parametrize("channels", [1, 3])
    def test_8bit_round_trip_bit_exact(self, tmp_path, ext, channels):
        rng = np.random.default_rng(11)
        raw = rng.integers(0, 256, size=(9, 13, channels)).astype(np.float64)
        img = RasterImage(raw / 255.0)
        name = "img.pgm" if (ext == "ppm" and channels == 1) else f"img.{ext}"
        path = tmp_path / name
        save_image(img, path, bit_depth=8)
        back = load_image(path)
        assert np.array_equal(back.data, img.data)

    @pytest.mark.parametrize("ext", ["png", "ppm"])
    def test_16bit_round_trip_bit_exact(self, tmp_path, ext):
        rng = np.random.default_rng(12)
        raw = rng.integers(0, 65536, size=(6, 5, 3)).astype(np.float64)
        img = RasterImage(raw / 65535.0)
        path = tmp_path / f"img.{ext}"
        save_image(img, path, bit_depth=16)
        back = load_image(path)
        assert np.array_equal(back.data, img.data)

    def test_load_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            load_image(tmp_path / "nope.png")

    def test_load_garbage_raises(self, tmp_path):
        path = tmp_path / "bad.png"
        path.write_bytes(b"not an image")
        with pytest.raises(OSError):
            load_image(path)


class TestConvolve2D:
    def test_identity_kernel_is_exact(self):
        img = random_image(3, 8, 6, 3)
        out = convolve2d(img, identity_kernel())
        assert np.array_equal(out.data, img.data)

    def test_constant_image_stays_constant(self):
        img = RasterImage.constant(8, 8, 0.37)
        out = convolve2d(img, gaussian_kernel(1.0))
        assert np.allclose(out.data, 0.37, atol=1e-12)

    def test_normalized_kernel_preserves_constant_mean(self):
        img = RasterImage.constant(10, 10, 0.5)
        for k in (box_kernel(3), gaussian_kernel(0.8), motion_kernel(5, 45.0)):
            out = convolve2d(img, k)
            assert abs(out.data.mean() - 0.5) < 1e-12

    def test_matches_naive_oracle_on_ramp(self):
        # 3x3 ramp image, 3x3 box kernel, reflect boundary
        ramp = np.arange(9, dtype=np.float64).reshape(3, 3) / 8.0
        taps = np.full((3, 3), 1.0 / 9.0)
        expected = conv2d_naive(ramp, taps, "reflect")
        got = conv2d_array(ramp, taps, "reflect")
        assert np.allclose(got, expected, atol=1e-12)

    @pytest.mark.parametrize("boundary", ["reflect", "replicate"])
    def test_matches_naive_oracle_randomized(self, boundary):
        rng = np.random.default_rng(5)
        for _ in range(10):
            h, w = rng.integers(3, 12, size=2)
            arr = rng.uniform(0.0, 1.0, size=(h, w))
            taps = rng.uniform(-1.0, 1.0, size=(3, 3))
            got = conv2d_array(arr, taps, boundary)
            assert np.allclose(got, conv2d_naive(arr, taps, boundary), atol=1e-10)

    def test_asymmetric_kernel_orientation(self):
        # Convolving an impulse stamps the kernel at the impulse location.
        arr = np.zeros((5, 5))
        arr[2, 2] = 1.0
        taps = np.zeros((3, 3))
        taps[0, 1] = 1.0  # one tap above center
        out = conv2d_array(arr, taps, "replicate", force="direct")
        expected = conv2d_naive(arr, taps, "replicate")
        assert np.allclose(out, expected, atol=1e-12)
        assert out[1, 2] == 1.0

    def test_fft_and_direct_agree(self):
        rng = np.random.default_rng(6)
        arr = rng.uniform(0.0, 1.0, size=(24, 17))
        for taps in (rng.uniform(0.0, 1.0, size=(9, 9)), rng.uniform(-1.0, 1.0, size=(5, 11))):
            direct = conv2d_array(arr, taps, "reflect", force="direct")
            fft = conv2d_array(arr, taps, "reflect", force="fft")
            assert np.allclose(direct, fft, atol=1e-5)
            assert np.max(np.abs(direct - fft)) < 1e-10

    def test_kernel_larger_than_image_raises(self):
        img = random_image(0, 3, 3, 1)
        with pytest.raises(ValueError, match="larger"):
            convolve2d(img, box_kernel(5))


class TestDownsample2:
    def test_constant_4x4(self):
        out = downsample2(RasterImage.constant(4, 4, 0.5))
        assert out.data.shape == (2, 2, 3)
        assert np.all(out.data == 0.5)

    def test_2x2_block_mean(self):
        img = RasterImage(np.array([[0.0, 0.0], [1.0, 1.0]])[:, :, None])
        out = downsample2(img)
        assert out.data.shape == (1, 1, 1)
        assert out.data[0, 0, 0] == 0.5

    def test_64_to_4_after_four_applications(self):
        img = random_image(9, 64, 64, 3)
        for _ in range(4):
            img = downsample2(img)
        assert (img.height, img.width) == (4, 4)

    def test_odd_sizes_replicate_padded(self):
        img = random_image(10, 5, 7, 1)
        out = downsample2(img)
        assert (out.height, out.width) == (3, 4)
        assert np.allclose(out.data, downsample2_naive(img.data), atol=1e-12)

    def test_preserves_global_mean_for_even_sizes(self):
        img = random_image(11, 32, 16, 3)
        out = downsample2(img)
        assert abs(out.data.mean() - img.data.mean()) < 1e-6
