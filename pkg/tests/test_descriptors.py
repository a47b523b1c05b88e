import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavesal.descriptors import (
    GGDParams,
    StackLayer,
    SubbandStack,
    energy_stack,
    fit_ggd,
    fit_ggd_table,
    ggd_density,
    ggd_log2_density,
    ggd_table_rows,
    interband_pdf,
)
from wavesal.errors import DegenerateDistributionError, ParameterError
from wavesal.imagedata import Image
from wavesal.wavelet import best_basis, dwpt_full, dwt2, qwt2


def make_stack(energy_by_depth):
    """Hand-rolled stack: {depth: [2-D grids]} -> SubbandStack."""
    layers = []
    for depth in sorted(energy_by_depth):
        for i, grid in enumerate(energy_by_depth[depth]):
            layers.append(StackLayer(depth, f"{depth}.{i}", np.asarray(grid, dtype=float)))
    first = layers[0].energy
    return SubbandStack(
        width=first.shape[1],
        height=first.shape[0],
        layers=tuple(layers),
        depth_schedule=tuple(sorted(energy_by_depth)),
    )


class TestEnergyStack:
    def test_constant_image_all_detail_layers_zero(self):
        tree = dwt2(Image(np.full((16, 16), 0.5)), levels=2)
        stack = energy_stack(tree)
        for layer in stack.layers:
            assert np.abs(layer.energy).max() < 1e-20

    def test_squaring(self):
        from wavesal.wavelet import _node_energies

        assert _node_energies(np.array([[-3.0]]))[0, 0] == 9.0
        quad = np.array([[[1.0, 1.0, 1.0, 1.0]]])
        assert _node_energies(quad)[0, 0] == 4.0

    def test_dwt_s3_layer_layout(self, rng):
        tree = dwt2(Image(rng.random((16, 16))), levels=3)
        stack = energy_stack(tree)
        assert len(stack.layers) == 9
        assert stack.depth_schedule == (1, 2, 3)

    def test_layers_are_full_resolution(self, rng):
        tree = dwt2(Image(rng.random((16, 16))), levels=2)
        stack = energy_stack(tree)
        assert all(layer.energy.shape == (16, 16) for layer in stack.layers)

    def test_total_energy_matches_tree(self, rng):
        """Sum over a layer divided by its replication factor recovers the
        source node's energy."""
        for tree in (
            dwt2(Image(rng.random((16, 16))), levels=2),
            qwt2(Image(rng.random((16, 16))), levels=2),
        ):
            stack = energy_stack(tree)
            total = sum(
                layer.energy.sum() / 4**layer.depth for layer in stack.layers
            )
            assert total == pytest.approx(tree.detail_energy(), rel=1e-6)

    def test_best_basis_schedule_lists_chosen_depths(self, rng):
        tree = best_basis(dwpt_full(Image(rng.random((16, 16))), levels=2))
        stack = energy_stack(tree)
        chosen_depths = sorted({n.depth for n in tree.nodes})
        assert list(stack.depth_schedule) == chosen_depths

    def test_nearest_neighbor_replication(self, rng):
        tree = dwt2(Image(rng.random((8, 8))), levels=1)
        stack = energy_stack(tree)
        layer = stack.layers[0]
        node = tree.nodes[0]
        block = layer.energy[0:2, 0:2]
        assert (block == node.coeffs[0, 0] ** 2).all()


class TestInterbandPdf:
    def test_equal_energies_uniform(self):
        stack = make_stack({1: [np.full((2, 2), 1.0)] * 3})
        np.testing.assert_allclose(interband_pdf(stack, 0, 0, 0), [1 / 3] * 3)

    def test_zero_energies_default_uniform(self):
        stack = make_stack({1: [np.zeros((2, 2))] * 3})
        np.testing.assert_allclose(interband_pdf(stack, 1, 1, 0), [1 / 3] * 3)

    def test_normalization_arithmetic(self):
        grids = [np.full((1, 1), v) for v in (2.0, 6.0, 0.0, 0.0, 4.0, 0.0)]
        stack = make_stack({1: grids[:3], 2: grids[3:]})
        np.testing.assert_allclose(
            interband_pdf(stack, 0, 0, 1), [1 / 6, 1 / 2, 0, 0, 1 / 3, 0]
        )

    def test_sums_to_one_for_every_prefix(self, rng):
        tree = dwt2(Image(rng.random((16, 16))), levels=3)
        stack = energy_stack(tree)
        for pos in range(len(stack.depth_schedule)):
            for _ in range(20):
                x = int(rng.integers(0, 16))
                y = int(rng.integers(0, 16))
                assert interband_pdf(stack, x, y, pos).sum() == pytest.approx(1.0, abs=1e-12)

    def test_out_of_bounds_pixel(self):
        stack = make_stack({1: [np.ones((2, 2))]})
        with pytest.raises(ParameterError):
            interband_pdf(stack, 5, 0, 0)

    def test_bad_depth_position(self):
        stack = make_stack({1: [np.ones((2, 2))]})
        with pytest.raises(ParameterError):
            interband_pdf(stack, 0, 0, 3)


class TestFitGgd:
    def test_gaussian_recovery(self, rng):
        x = rng.normal(0.0, 1.0, 100_000)
        params = fit_ggd(x)
        assert params.beta == pytest.approx(2.0, abs=0.1)
        assert params.alpha == pytest.approx(np.sqrt(2.0), abs=0.05)
        assert not params.clipped

    def test_laplacian_recovery(self, rng):
        x = rng.laplace(0.0, 1.0, 100_000)
        params = fit_ggd(x)
        assert params.beta == pytest.approx(1.0, abs=0.05)
        assert not params.clipped

    def test_constant_samples_hit_upper_bracket(self):
        params = fit_ggd(np.full(100, 0.7))
        assert params.beta == 5.0
        assert params.clipped

    def test_all_zero_rejected(self):
        with pytest.raises(DegenerateDistributionError):
            fit_ggd(np.zeros(100))

    def test_small_sample_rejected(self):
        with pytest.raises(ParameterError):
            fit_ggd(np.ones(10))

    @given(scale=st.floats(min_value=1e-3, max_value=1e3))
    @settings(max_examples=25, deadline=None)
    def test_scale_equivariance(self, scale):
        rng = np.random.default_rng(7)
        x = rng.normal(0.0, 1.0, 5000)
        base = fit_ggd(x)
        scaled = fit_ggd(scale * x)
        assert scaled.beta == pytest.approx(base.beta, abs=1e-6)
        assert scaled.alpha == pytest.approx(scale * base.alpha, rel=1e-6)


class TestGgdDensity:
    def test_gaussian_at_zero(self):
        params = GGDParams(alpha=np.sqrt(2.0), beta=2.0)
        assert ggd_density(params, 0.0) == pytest.approx(1.0 / np.sqrt(2 * np.pi), abs=1e-10)

    def test_laplacian_at_zero(self):
        params = GGDParams(alpha=1.0, beta=1.0)
        assert ggd_density(params, 0.0) == pytest.approx(0.5, abs=1e-12)

    def test_monotone_decreasing_in_magnitude(self, rng):
        params = GGDParams(alpha=0.7, beta=1.3)
        m = np.sort(rng.random(50) * 10)
        d = ggd_density(params, m)
        assert (np.diff(d) < 0).all()

    @pytest.mark.parametrize("alpha,beta", [(1.0, 2.0), (0.5, 1.0), (2.0, 0.7)])
    def test_integrates_to_one(self, alpha, beta):
        params = GGDParams(alpha=alpha, beta=beta)
        x = np.linspace(0.0, 50.0 * alpha, 400_001)
        density = ggd_density(params, x)
        integral = 2.0 * np.trapezoid(density, x)  # symmetric in x
        assert integral == pytest.approx(1.0, abs=1e-4)

    def test_log_density_finite_for_huge_magnitude(self):
        params = GGDParams(alpha=0.01, beta=2.0)
        val = ggd_log2_density(params, 1e6)
        assert np.isfinite(val)
        assert ggd_density(params, 1e6) == 0.0  # underflows, hence the log form


class TestGgdTable:
    def test_keys_cover_detail_bands(self, rng):
        tree = dwt2(Image(rng.random((32, 32))), levels=2)
        table = fit_ggd_table(tree)
        assert set(table) == {(d, o) for d in (1, 2) for o in ("V", "H", "D")}

    def test_zero_bands_get_none(self):
        tree = dwt2(Image(np.zeros((32, 32))), levels=2)
        table = fit_ggd_table(tree)
        assert all(v is None for v in table.values())
        assert ggd_table_rows(table) == []

    def test_rows_sorted_and_complete(self, rng):
        tree = dwt2(Image(rng.random((32, 32))), levels=2)
        rows = ggd_table_rows(fit_ggd_table(tree))
        assert len(rows) == 6
        assert rows == sorted(rows)
