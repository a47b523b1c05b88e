import numpy as np
import pytest
from PIL import Image as PILImage

from wavesal.errors import FixationParseError, FormatError
from wavesal.imagedata import (
    FixationSet,
    Image,
    SaliencyMap,
    load_fixations,
    load_image,
    write_map,
)


def write_pgm_p5(path, arr, maxval=255):
    with open(path, "wb") as fh:
        fh.write(f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode())
        fh.write(arr.astype(np.uint8).tobytes())


class TestLoadImage:
    def test_p5_extremes_scale_linearly(self, tmp_path):
        p = tmp_path / "a.pgm"
        write_pgm_p5(p, np.array([[0, 255], [255, 0]]))
        img = load_image(p)
        np.testing.assert_array_equal(img.data, [[0.0, 1.0], [1.0, 0.0]])

    def test_p2_parses_with_comments(self, tmp_path):
        p = tmp_path / "a.pgm"
        p.write_text("P2\n# comment\n2 2\n255\n0 128\n# more\n255 64\n")
        img = load_image(p)
        np.testing.assert_allclose(img.data, [[0, 128 / 255], [1.0, 64 / 255]])

    def test_pure_red_png_gives_bt601_luma(self, tmp_path):
        p = tmp_path / "red.png"
        PILImage.new("RGB", (1, 1), (255, 0, 0)).save(p)
        img = load_image(p)
        assert img.data[0, 0] == pytest.approx(0.299, abs=1e-12)

    def test_grayscale_png(self, tmp_path):
        p = tmp_path / "g.png"
        PILImage.fromarray(np.array([[0, 127], [255, 10]], dtype=np.uint8), "L").save(p)
        img = load_image(p)
        np.testing.assert_allclose(img.data, np.array([[0, 127], [255, 10]]) / 255.0)

    def test_truncated_png_is_format_error(self, tmp_path):
        p = tmp_path / "t.png"
        PILImage.new("L", (32, 32), 10).save(p)
        raw = p.read_bytes()
        p.write_bytes(raw[: len(raw) // 2])
        with pytest.raises(FormatError):
            load_image(p)

    def test_16bit_pgm_rejected(self, tmp_path):
        p = tmp_path / "deep.pgm"
        p.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
        with pytest.raises(FormatError, match="bit depth"):
            load_image(p)

    def test_unknown_magic_rejected(self, tmp_path):
        p = tmp_path / "x.img"
        p.write_bytes(b"GARBAGE!")
        with pytest.raises(FormatError):
            load_image(p)

    def test_missing_file_is_io_error(self, tmp_path):
        with pytest.raises(OSError):
            load_image(tmp_path / "nope.pgm")

    def test_deterministic(self, tmp_path, rng):
        p = tmp_path / "a.pgm"
        write_pgm_p5(p, (rng.random((9, 7)) * 255).astype(np.uint8))
        a = load_image(p)
        b = load_image(p)
        assert np.array_equal(a.data, b.data)


class TestLoadFixations:
    def _mk(self, tmp_path, text):
        p = tmp_path / "img.csv"
        p.write_text(text)
        return p

    def test_in_bounds_passthrough(self, tmp_path):
        img = Image(np.zeros((10, 10)))
        fx = load_fixations(self._mk(tmp_path, "x,y\n3,4\n0,0\n"), img)
        assert fx.points == ((3, 4), (0, 0))
        assert fx.image_id == "img"

    def test_out_of_bounds_clamps(self, tmp_path):
        img = Image(np.zeros((10, 10)))
        fx = load_fixations(self._mk(tmp_path, "x,y\n12,5\n"), img)
        assert fx.points == ((9, 5),)

    def test_header_only_gives_empty_set(self, tmp_path):
        img = Image(np.zeros((10, 10)))
        fx = load_fixations(self._mk(tmp_path, "x,y\n"), img)
        assert len(fx) == 0

    def test_duplicates_preserved(self, tmp_path):
        img = Image(np.zeros((10, 10)))
        fx = load_fixations(self._mk(tmp_path, "x,y\n1,1\n1,1\n"), img)
        assert fx.points == ((1, 1), (1, 1))

    def test_non_numeric_row_names_line(self, tmp_path):
        img = Image(np.zeros((10, 10)))
        with pytest.raises(FixationParseError, match="line 3"):
            load_fixations(self._mk(tmp_path, "x,y\n1,2\nfoo,3\n"), img)


class TestWriteMap:
    def test_rescale_rounds_half_up(self, tmp_path):
        m = SaliencyMap(np.array([[0.0, 0.5, 1.0]]), "t", "d")
        out = tmp_path / "m.pgm"
        write_map(m, out)
        img = load_image(out)
        np.testing.assert_array_equal(img.data * 255, [[0, 128, 255]])

    def test_header_contract(self, tmp_path):
        m = SaliencyMap(np.zeros((2, 3)), "t", "d")
        out = tmp_path / "m.pgm"
        write_map(m, out)
        assert out.read_bytes().startswith(b"P5\n3 2\n255\n")

    def test_constant_map_writes_zeros_and_sidecar(self, tmp_path):
        m = SaliencyMap(np.full((2, 2), 0.7), "tag", "dig")
        out = tmp_path / "m.pgm"
        write_map(m, out)
        img = load_image(out)
        assert (img.data == 0).all()
        sidecar = (out.parent / "m.pgm.txt").read_text()
        assert "method_tag=tag" in sidecar
        assert "min=0.7" in sidecar and "max=0.7" in sidecar

    def test_roundtrip_within_one_level(self, tmp_path, rng):
        values = rng.random((12, 9)) * 3.0
        m = SaliencyMap(values, "t", "d")
        out = tmp_path / "m.pgm"
        write_map(m, out)
        back = load_image(out).data
        rescaled = (values - values.min()) / (values.max() - values.min())
        assert np.abs(back - rescaled).max() <= 1.0 / 255.0


class TestInvariants:
    def test_image_rejects_out_of_range(self):
        with pytest.raises(Exception):
            Image(np.array([[0.0, 1.5]]))

    def test_saliency_map_rejects_negative(self):
        with pytest.raises(Exception):
            SaliencyMap(np.array([[-0.1]]), "t", "d")

    def test_fixation_len(self):
        assert len(FixationSet("a", ((1, 2),))) == 1
