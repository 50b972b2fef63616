import math

import numpy as np
import pytest

from conftest import enumerate_min_cut, gray
from mist import gmm, graphcut
from mist.raster import BinaryMask, Raster, Trimap, TrimapLabel


def _uniform_model(mean, var=64.0):
    return gmm._model_from_params(np.array([1.0]),
                                  np.array([list(mean)], dtype=float),
                                  np.eye(3)[None] * var)


def _random_network(rng, max_nodes=12):
    n = int(rng.integers(2, max_nodes + 1))
    src = rng.uniform(0, 8, n)
    snk = rng.uniform(0, 8, n)
    m = int(rng.integers(1, 2 * n))
    edges = []
    caps = []
    for _ in range(m):
        a, b = rng.choice(n, 2, replace=False)
        edges.append((int(a), int(b)))
        caps.append(float(rng.uniform(0.1, 5.0)))
    return graphcut.FlowNetwork(n, src, snk,
                                np.array(edges, dtype=np.int64),
                                np.array(caps), np.inf, (1, n))


class TestBeta:
    def test_constant_image_zero(self):
        assert graphcut.estimate_beta(gray(np.full((6, 6), 9))) == 0.0

    def test_single_pair_hand_value(self):
        # one horizontal pair with squared color distance 100
        img = Raster(np.array([[[0, 0, 0], [10, 0, 0]]], dtype=np.uint8))
        assert math.isclose(graphcut.estimate_beta(img), 1.0 / 200.0, rel_tol=1e-12)

    def test_checkerboard_hand_value(self):
        # 6x6 board: the 60 axis pairs differ by 3*255^2 (replicated
        # channels); the 50 diagonal pairs join equal-parity cells, so they
        # contribute zero. beta = 1 / (2 * mean) over all 110 pairs.
        board = np.indices((6, 6)).sum(0) % 2 * 255
        beta = graphcut.estimate_beta(gray(board))
        mean = 60 * 3 * 255 ** 2 / 110
        assert math.isclose(beta, 1.0 / (2 * mean), rel_tol=1e-12)

    def test_stripes_axis_and_diagonal_pairs(self):
        # vertical stripes: horizontal and both diagonal pairs differ,
        # vertical pairs are equal: 5*6 + 2*25 = 80 of 110 pairs differ
        stripes = (np.indices((6, 6))[1] % 2) * 255
        beta = graphcut.estimate_beta(gray(stripes))
        mean = 80 * 3 * 255 ** 2 / 110
        assert math.isclose(beta, 1.0 / (2 * mean), rel_tol=1e-12)

    def test_invariant_under_rotation_and_translation(self):
        rng = np.random.default_rng(3)
        patch = rng.integers(0, 255, (5, 7)).astype(np.uint8)
        base = np.full((20, 20), 100, dtype=np.uint8)
        a = base.copy()
        a[2:7, 3:10] = patch
        b = base.copy()
        b[9:14, 8:15] = patch
        assert graphcut.estimate_beta(gray(a)) == graphcut.estimate_beta(gray(b))
        assert graphcut.estimate_beta(gray(a)) == \
            graphcut.estimate_beta(gray(np.rot90(a).copy()))


class TestSmoothnessWeight:
    def test_equal_colors_give_gamma(self):
        assert graphcut.smoothness_weight((5, 5, 5), (5, 5, 5), 1.0, 0.01, 50.0) == 50.0

    def test_diagonal_divides_by_sqrt2(self):
        w = graphcut.smoothness_weight((5, 5, 5), (5, 5, 5), math.sqrt(2), 0.01, 50.0)
        assert math.isclose(w, 50.0 / math.sqrt(2), rel_tol=1e-12)

    def test_unit_exponent_hand_value(self):
        # beta * ||dz||^2 = 1 -> 50 / e
        w = graphcut.smoothness_weight((10, 0, 0), (0, 0, 0), 1.0, 0.01, 50.0)
        assert math.isclose(w, 50.0 * math.exp(-1), rel_tol=1e-12)


class TestBuildNetwork:
    def test_all_hard_background(self):
        img = gray(np.full((3, 3), 50))
        trimap = Trimap(np.zeros((3, 3), dtype=np.uint8))
        model = _uniform_model((50, 50, 50))
        net = graphcut.build_network(img, trimap, model, model, 0.001, 50.0)
        labels, _ = graphcut.min_cut(net)
        assert labels.area() == 0

    def test_two_pixel_hard_fg_pulls_neighbor(self):
        img = Raster(np.array([[[50, 50, 50], [52, 50, 50]]], dtype=np.uint8))
        trimap = Trimap(np.array([[TrimapLabel.HARD_FG, TrimapLabel.PROB_FG]],
                                 dtype=np.uint8))
        fg = _uniform_model((51, 50, 50))
        bg = _uniform_model((51, 50, 50))
        net = graphcut.build_network(img, trimap, fg, bg, 0.0, 50.0)
        # free pixel: equal data terms; the gamma edge to the hard FG pixel
        # makes joining the foreground strictly cheaper
        labels, _ = graphcut.min_cut(net)
        assert labels.bits.all()

    def test_label_swap_symmetry(self):
        rng = np.random.default_rng(4)
        img = Raster(rng.integers(0, 255, (4, 4, 3)).astype(np.uint8))
        labels = rng.integers(0, 4, (4, 4)).astype(np.uint8)
        swap = {0: 1, 1: 0, 2: 3, 3: 2}
        swapped = np.vectorize(swap.get)(labels).astype(np.uint8)
        fg = gmm.init_from_pixels(rng.uniform(0, 255, (40, 3)), 2, 0)
        bg = gmm.init_from_pixels(rng.uniform(0, 255, (40, 3)), 2, 1)
        beta = graphcut.estimate_beta(img)
        net = graphcut.build_network(img, Trimap(labels), fg, bg, beta, 50.0)
        net_sw = graphcut.build_network(img, Trimap(swapped), bg, fg, beta, 50.0)
        a, flow_a = graphcut.min_cut(net)
        b, flow_b = graphcut.min_cut(net_sw)
        assert math.isclose(flow_a, flow_b, rel_tol=1e-9)
        assert np.array_equal(a.bits, ~b.bits)

    def test_infinite_sentinel_exceeds_finite_sum(self):
        rng = np.random.default_rng(5)
        img = Raster(rng.integers(0, 255, (5, 5, 3)).astype(np.uint8))
        labels = rng.integers(0, 4, (5, 5)).astype(np.uint8)
        fg = gmm.init_from_pixels(rng.uniform(0, 255, (30, 3)), 2, 0)
        net = graphcut.build_network(img, Trimap(labels), fg, fg, 0.001, 50.0)
        free = (labels.ravel() != TrimapLabel.HARD_FG) & \
               (labels.ravel() != TrimapLabel.HARD_BG)
        finite = net.source_cap[free].sum() + net.sink_cap[free].sum() \
            + net.edge_caps.sum()
        assert net.infinite > finite


class TestMinCut:
    def test_zero_sink_caps_all_foreground(self):
        n = 6
        rng = np.random.default_rng(6)
        edges = np.array([[i, i + 1] for i in range(n - 1)], dtype=np.int64)
        net = graphcut.FlowNetwork(n, rng.uniform(0, 3, n), np.zeros(n),
                                   edges, rng.uniform(0.1, 1, n - 1), np.inf, (1, n))
        labels, flow = graphcut.min_cut(net)
        assert labels.bits.all()
        assert flow == 0.0

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_enumeration(self, seed):
        rng = np.random.default_rng(100 + seed)
        for _ in range(10):
            net = _random_network(rng)
            labels, flow = graphcut.min_cut(net)
            best, argmin = enumerate_min_cut(net.num_nodes, net.source_cap,
                                             net.sink_cap, net.edges,
                                             net.edge_caps)
            assert math.isclose(flow, best, rel_tol=1e-6, abs_tol=1e-9)
            code = sum(1 << i for i in range(net.num_nodes)
                       if labels.bits.ravel()[i])
            assert code in argmin

    def test_doubling_capacities_doubles_flow(self):
        rng = np.random.default_rng(31)
        net = _random_network(rng)
        labels, flow = graphcut.min_cut(net)
        doubled = graphcut.FlowNetwork(net.num_nodes, net.source_cap * 2,
                                       net.sink_cap * 2, net.edges,
                                       net.edge_caps * 2, np.inf, net.grid_shape)
        labels2, flow2 = graphcut.min_cut(doubled)
        assert math.isclose(flow2, 2 * flow, rel_tol=1e-9)
        assert np.array_equal(labels.bits, labels2.bits)

    def test_pure_backend_agrees(self):
        from mist._kernels import PURE_BACKEND, compiled_backend
        compiled = compiled_backend()
        if compiled is None:
            pytest.skip("compiled extension not built")
        rng = np.random.default_rng(32)
        for _ in range(40):
            net = _random_network(rng)
            fa, la = compiled["maxflow"](net.num_nodes, net.source_cap,
                                         net.sink_cap, net.edges, net.edge_caps)
            fb, lb = PURE_BACKEND["maxflow"](net.num_nodes, net.source_cap,
                                             net.sink_cap, net.edges, net.edge_caps)
            assert math.isclose(fa, fb, rel_tol=1e-9, abs_tol=1e-9)
            assert np.array_equal(la, lb)


class TestEnergy:
    def test_uniform_labeling_no_smoothness(self):
        rng = np.random.default_rng(7)
        img = Raster(rng.integers(0, 255, (5, 5, 3)).astype(np.uint8))
        model = gmm.init_from_pixels(rng.uniform(0, 255, (50, 3)), 2, 0)
        e = graphcut.energy_of(img, BinaryMask(np.ones((5, 5), bool)),
                               model, model, 0.001, 50.0)
        assert e.smoothness == 0.0
        assert math.isclose(e.total, e.data, rel_tol=1e-12)

    def test_2x2_checkerboard_enumerated(self):
        img = gray(np.full((2, 2), 40))
        labeling = BinaryMask(np.array([[True, False], [False, True]]))
        model = _uniform_model((40, 40, 40))
        e = graphcut.energy_of(img, labeling, model, model, 0.5, 50.0)
        # constant image: exp term is 1. Discordant pairs: all 4 axis pairs;
        # both diagonal pairs are concordant.
        assert math.isclose(e.smoothness, 4 * 50.0, rel_tol=1e-12)

    def test_min_cut_is_energy_argmin(self):
        rng = np.random.default_rng(8)
        for _ in range(15):
            h, w = int(rng.integers(2, 4)), int(rng.integers(2, 4))
            img = Raster(rng.integers(0, 255, (h, w, 3)).astype(np.uint8))
            labels = rng.integers(0, 4, (h, w)).astype(np.uint8)
            trimap = Trimap(labels)
            fg = gmm.init_from_pixels(rng.uniform(0, 255, (30, 3)), 2, 0)
            bg = gmm.init_from_pixels(rng.uniform(0, 255, (30, 3)), 2, 1)
            beta = graphcut.estimate_beta(img)
            net = graphcut.build_network(img, trimap, fg, bg, beta, 50.0)
            cut_labels, _ = graphcut.min_cut(net)
            e_cut = graphcut.energy_of(img, cut_labels, fg, bg, beta, 50.0).total

            n = h * w
            flat = labels.ravel()
            hard_fg = flat == TrimapLabel.HARD_FG
            hard_bg = flat == TrimapLabel.HARD_BG
            best = np.inf
            for code in range(2 ** n):
                bits = np.array([(code >> i) & 1 for i in range(n)], dtype=bool)
                if np.any(bits[hard_bg]) or np.any(~bits[hard_fg]):
                    continue
                e = graphcut.energy_of(img, bits.reshape(h, w), fg, bg,
                                       beta, 50.0).total
                best = min(best, e)
            assert e_cut <= best * (1 + 1e-9) + 1e-9

    def test_terminal_weight_dump_roundtrip(self, tmp_path):
        rng = np.random.default_rng(13)
        img = Raster(rng.integers(0, 255, (4, 5, 3)).astype(np.uint8))
        trimap = Trimap(rng.integers(0, 4, (4, 5)).astype(np.uint8))
        model = gmm.init_from_pixels(rng.uniform(0, 255, (30, 3)), 2, 0)
        net = graphcut.build_network(img, trimap, model, model, 0.001, 50.0)
        path = tmp_path / "weights.f32"
        graphcut.dump_terminal_weights(net, path)
        raw = np.frombuffer(path.read_bytes(), dtype="<f4").reshape(2, 4, 5)
        assert np.allclose(raw[0], net.source_cap.reshape(4, 5).astype(np.float32))
        assert np.allclose(raw[1], net.sink_cap.reshape(4, 5).astype(np.float32))

    def test_flow_equals_energy_minus_hard_terms(self):
        rng = np.random.default_rng(9)
        img = Raster(rng.integers(0, 255, (6, 6, 3)).astype(np.uint8))
        labels = rng.integers(0, 4, (6, 6)).astype(np.uint8)
        trimap = Trimap(labels)
        fg = gmm.init_from_pixels(rng.uniform(0, 255, (60, 3)), 3, 0)
        bg = gmm.init_from_pixels(rng.uniform(0, 255, (60, 3)), 3, 1)
        beta = graphcut.estimate_beta(img)
        net = graphcut.build_network(img, trimap, fg, bg, beta, 50.0)
        cut_labels, flow = graphcut.min_cut(net)
        energy = graphcut.energy_of(img, cut_labels, fg, bg, beta, 50.0).total

        colors = graphcut.color_values(img).reshape(-1, 3)
        flat = labels.ravel()
        hard_terms = gmm.mixture_nll(fg, colors[flat == TrimapLabel.HARD_FG]).sum() \
            + gmm.mixture_nll(bg, colors[flat == TrimapLabel.HARD_BG]).sum()
        assert math.isclose(flow + hard_terms, energy, rel_tol=1e-6)
