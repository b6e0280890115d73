"""3-term one-port model, 3-standard solve, plane shift, 8-term correction."""

import numpy as np
import pytest

from mpcal import (
    DegenerateStandards,
    ErrorBox3,
    FrequencyGrid,
    GridMismatch,
    ModelPole,
    PairTracking,
    StandardSeparationWarning,
    ZeroTracking,
    ZeroTransmission,
    box_to_two_port,
    cascade,
    correct_reflection,
    correct_two_port,
    embed_reflection,
    flip_two_port,
    identity_box,
    input_reflection,
    make_two_port,
    s_to_t,
    shift_reference_plane,
    solve_three_standards,
    t_to_s,
)
from mpcal.errormodel import _n_receiver, _n_source, _n_receiver_inv, _n_source_inv


def grid(n=9):
    return FrequencyGrid(np.linspace(1e9, 9e9, n))


def random_box(rng, g):
    npts = len(g)

    def disk(r):
        return r * np.sqrt(rng.uniform(0, 1, npts)) * np.exp(2j * np.pi * rng.uniform(0, 1, npts))

    p = np.exp(rng.uniform(np.log(0.25), np.log(4.0), npts)) \
        * np.exp(2j * np.pi * rng.uniform(0, 1, npts))
    return ErrorBox3(g, disk(0.3), disk(0.5), p)


def random_two_port(rng, g, s21_min=0.1):
    npts = len(g)
    s = (rng.standard_normal((npts, 2, 2)) + 1j * rng.standard_normal((npts, 2, 2))) * 0.35
    small = np.abs(s[:, 1, 0]) < s21_min
    s[small, 1, 0] += 2 * s21_min
    small = np.abs(s[:, 0, 1]) < s21_min
    s[small, 0, 1] += 2 * s21_min
    from mpcal import NPortNetwork
    return NPortNetwork(g, s)


class TestContainers:
    def test_scalars_broadcast_and_freeze(self):
        b = ErrorBox3(grid(), 0.1, 0.2j, 0.8)
        assert b.e00.shape == (9,) and b.p[0] == 0.8
        with pytest.raises(ValueError):
            b.e00[0] = 1.0

    def test_zero_tracking_rejected(self):
        with pytest.raises(ZeroTracking):
            ErrorBox3(grid(), 0.1, 0.1, 0.0)
        with pytest.raises(ZeroTracking):
            PairTracking(grid(), 0.0)


class TestEmbedCorrect:
    def test_identity_box_passthrough(self):
        assert np.allclose(embed_reflection(identity_box(grid()), 0.5), 0.5)

    def test_hand_value(self):
        box = ErrorBox3(grid(), 0.1, 0.2, 1.0)
        got = embed_reflection(box, 0.5)
        assert np.allclose(got, 0.1 + 0.5 / 0.9, atol=1e-15)

    def test_embed_pole(self):
        box = ErrorBox3(grid(), 0.0, 0.2, 1.0)
        with pytest.raises(ModelPole):
            embed_reflection(box, 5.0)

    def test_correct_is_inverse(self):
        rng = np.random.default_rng(89)
        g = grid()
        for _ in range(10):
            box = random_box(rng, g)
            gam = 0.9 * np.sqrt(rng.uniform(0, 1, len(g))) \
                * np.exp(2j * np.pi * rng.uniform(0, 1, len(g)))
            back = correct_reflection(box, embed_reflection(box, gam))
            assert np.max(np.abs(back - gam)) < 1e-12

    def test_measured_directivity_is_zero_reflection(self):
        rng = np.random.default_rng(97)
        box = random_box(rng, grid())
        assert np.max(np.abs(correct_reflection(box, box.e00))) == 0.0

    def test_correct_pole(self):
        box = ErrorBox3(grid(), 0.0, 0.5, 1.0)
        with pytest.raises(ModelPole):
            correct_reflection(box, -2.0)

    def test_matches_two_port_view(self):
        # embedding equals the input reflection of the split-form two-port
        rng = np.random.default_rng(101)
        box = random_box(rng, grid())
        gam = 0.6 * np.exp(1j * np.linspace(0, 3, len(box.grid)))
        want = input_reflection(box_to_two_port(box), gam)
        assert np.max(np.abs(embed_reflection(box, gam) - want)) < 1e-15


class TestSolveThreeStandards:
    def test_identity_recovery(self):
        g = grid()
        box = solve_three_standards(g, [(0.0, 0.0), (0.9, 0.9), (-0.9, -0.9)])
        assert np.max(np.abs(box.e00)) < 1e-12
        assert np.max(np.abs(box.e11)) < 1e-12
        assert np.max(np.abs(box.p - 1.0)) < 1e-12

    def test_forward_model_oracle(self):
        g = grid()
        f = g.points
        e00 = 0.05 - 0.02j + 0.01 * np.sin(f / 1e9)
        e11 = 0.15 + 0.1j * np.cos(f / 2e9)
        p = 0.8 * np.exp(-2j * np.pi * f * 30e-12)
        want = ErrorBox3(g, e00, e11, p)
        actual = [0.95 * np.exp(-2j * np.pi * f * 35e-12),
                  -0.95 * np.exp(-2j * np.pi * f * 28e-12),
                  np.full(len(g), 0.02 + 0j)]
        standards = [(ga, embed_reflection(want, ga)) for ga in actual]
        got = solve_three_standards(g, standards)
        assert np.max(np.abs(got.e00 - want.e00)) < 1e-10
        assert np.max(np.abs(got.e11 - want.e11)) < 1e-10
        assert np.max(np.abs(got.p - want.p)) < 1e-10
        for ga, gm in standards:
            assert np.max(np.abs(embed_reflection(got, ga) - gm)) < 1e-10

    def test_random_boxes_recovered(self):
        rng = np.random.default_rng(103)
        g = grid()
        for _ in range(10):
            want = random_box(rng, g)
            # well separated standards on the unit disk
            actual = [0.9 + 0j, -0.45 + 0.75j, -0.45 - 0.75j]
            standards = [(ga, embed_reflection(want, ga)) for ga in actual]
            got = solve_three_standards(g, standards)
            assert np.max(np.abs(got.e00 - want.e00)) < 1e-10
            assert np.max(np.abs(got.e11 - want.e11)) < 1e-10
            assert np.max(np.abs(got.p - want.p)) < 1e-10

    @pytest.mark.filterwarnings("ignore::mpcal.StandardSeparationWarning")
    def test_two_identical_standards_degenerate(self):
        g = grid()
        with pytest.raises(DegenerateStandards):
            solve_three_standards(g, [(0.5, 0.5), (0.5, 0.5), (-0.5, -0.5)])

    def test_close_standards_warn(self):
        g = grid()
        want = ErrorBox3(g, 0.05, 0.1, 0.9)
        actual = [0.9 + 0j, 0.9 + 0.04j, -0.9 + 0j]
        standards = [(ga, embed_reflection(want, ga)) for ga in actual]
        with pytest.warns(StandardSeparationWarning):
            got = solve_three_standards(g, standards)
        assert np.max(np.abs(got.p - 0.9)) < 1e-6

    def test_exactly_three_required(self):
        with pytest.raises(ValueError):
            solve_three_standards(grid(), [(0.0, 0.0), (0.9, 0.9)])


class TestShiftReferencePlane:
    def test_ideal_thru_no_change(self):
        rng = np.random.default_rng(107)
        g = grid()
        box = random_box(rng, g)
        thru = make_two_port(g, 0.0, 1.0, 1.0, 0.0)
        got = shift_reference_plane(box, thru)
        assert np.max(np.abs(got.e00 - box.e00)) < 1e-14
        assert np.max(np.abs(got.e11 - box.e11)) < 1e-14
        assert np.max(np.abs(got.p - box.p)) < 1e-14

    def test_hand_example(self):
        g = grid()
        adapter = make_two_port(g, 0.0, 0.9, 0.9, 0.1)
        got = shift_reference_plane(identity_box(g), adapter)
        assert np.allclose(got.e00, 0.0, atol=1e-15)
        assert np.allclose(got.e11, 0.1, atol=1e-15)
        assert np.allclose(got.p, 0.81, atol=1e-15)

    def test_embedding_composition(self):
        rng = np.random.default_rng(109)
        g = grid()
        box = random_box(rng, g)
        adapter = random_two_port(rng, g)
        gam = 0.7 * np.exp(1j * np.linspace(-1, 2, len(g)))
        shifted = shift_reference_plane(box, adapter)
        want = embed_reflection(box, input_reflection(adapter, gam))
        assert np.max(np.abs(embed_reflection(shifted, gam) - want)) < 1e-12

    def test_two_shifts_equal_cascade(self):
        rng = np.random.default_rng(113)
        g = grid()
        box = random_box(rng, g)
        a1 = random_two_port(rng, g)
        a2 = random_two_port(rng, g)
        once = shift_reference_plane(shift_reference_plane(box, a1), a2)
        both = shift_reference_plane(box, t_to_s(cascade(s_to_t(a1), s_to_t(a2))))
        assert np.max(np.abs(once.e00 - both.e00)) < 1e-12
        assert np.max(np.abs(once.e11 - both.e11)) < 1e-12
        assert np.max(np.abs(once.p - both.p)) < 1e-12

    def test_zero_transmission(self):
        g = grid()
        dead = make_two_port(g, 0.1, 0.0, 0.0, 0.1)
        with pytest.raises(ZeroTransmission):
            shift_reference_plane(identity_box(g), dead)

    def test_grid_guard(self):
        adapter = make_two_port(grid(5), 0.0, 1.0, 1.0, 0.0)
        with pytest.raises(GridMismatch):
            shift_reference_plane(identity_box(grid(9)), adapter)


class TestNormalizedMatrices:
    def test_det_equals_p(self):
        rng = np.random.default_rng(127)
        box = random_box(rng, grid())
        for n in (_n_source(box), _n_receiver(box)):
            det = n[:, 0, 0] * n[:, 1, 1] - n[:, 0, 1] * n[:, 1, 0]
            assert np.max(np.abs(det - box.p)) < 1e-12

    def test_closed_form_inverse(self):
        rng = np.random.default_rng(131)
        box = random_box(rng, grid())
        eye = np.eye(2)
        assert np.max(np.abs(_n_source(box) @ _n_source_inv(box) - eye)) < 1e-12
        assert np.max(np.abs(_n_receiver(box) @ _n_receiver_inv(box) - eye)) < 1e-12


def embed_pair(adapter_i, adapter_j, dut):
    """Raw two-port as the VNA sees it: adapter_i, DUT, flipped adapter_j."""
    t = cascade(s_to_t(adapter_i), cascade(s_to_t(dut), s_to_t(flip_two_port(adapter_j))))
    return t_to_s(t)


def boxes_and_k(adapter_i, adapter_j):
    gi, gj = adapter_i.s, adapter_j.s
    box_i = ErrorBox3(adapter_i.grid, gi[:, 0, 0], gi[:, 1, 1], gi[:, 0, 1] * gi[:, 1, 0])
    box_j = ErrorBox3(adapter_j.grid, gj[:, 0, 0], gj[:, 1, 1], gj[:, 0, 1] * gj[:, 1, 0])
    k = PairTracking(adapter_i.grid, gi[:, 1, 0] * gj[:, 0, 1])
    return box_i, box_j, k


class TestCorrectTwoPort:
    def test_identity_passthrough(self):
        rng = np.random.default_rng(137)
        g = grid()
        dut = random_two_port(rng, g)
        got = correct_two_port(identity_box(g), identity_box(g),
                               PairTracking(g, 1.0), dut)
        assert np.max(np.abs(got.s - dut.s)) < 1e-13

    def test_recovers_embedded_dut(self):
        rng = np.random.default_rng(139)
        g = grid()
        for _ in range(10):
            dut = random_two_port(rng, g)
            ai = random_two_port(rng, g)
            aj = random_two_port(rng, g)
            raw = embed_pair(ai, aj, dut)
            box_i, box_j, k = boxes_and_k(ai, aj)
            got = correct_two_port(box_i, box_j, k, raw)
            assert np.max(np.abs(got.s - dut.s)) < 1e-10

    def test_reciprocal_stays_reciprocal(self):
        rng = np.random.default_rng(149)
        g = grid()
        dut = random_two_port(rng, g)
        sym = (dut.s + dut.s.transpose(0, 2, 1)) / 2
        from mpcal import NPortNetwork, reciprocity_deviation
        dut = NPortNetwork(g, sym)
        ai = random_two_port(rng, g)
        aj = random_two_port(rng, g)
        box_i, box_j, k = boxes_and_k(ai, aj)
        got = correct_two_port(box_i, box_j, k, embed_pair(ai, aj, dut))
        assert reciprocity_deviation(got) < 1e-9

    def test_wrong_sign_k_flips_transmission(self):
        rng = np.random.default_rng(151)
        g = grid()
        dut = random_two_port(rng, g)
        ai = random_two_port(rng, g)
        aj = random_two_port(rng, g)
        raw = embed_pair(ai, aj, dut)
        box_i, box_j, k = boxes_and_k(ai, aj)
        flipped = correct_two_port(box_i, box_j, PairTracking(g, -k.k), raw)
        assert np.max(np.abs(flipped.s[:, 1, 0] + dut.s[:, 1, 0])) < 1e-10
        assert np.max(np.abs(flipped.s[:, 0, 1] + dut.s[:, 0, 1])) < 1e-10
        assert np.max(np.abs(flipped.s[:, 0, 0] - dut.s[:, 0, 0])) < 1e-10

    def test_zero_transmission_guard(self):
        g = grid()
        dead = make_two_port(g, 0.1, 0.1, 0.0, 0.1)
        with pytest.raises(ZeroTransmission):
            correct_two_port(identity_box(g), identity_box(g),
                             PairTracking(g, 1.0), dead)
