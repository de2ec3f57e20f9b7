import numpy as np
import pytest

from femin import FiniteDistribution, total_variation
from femin.figure1 import (
    BUILTIN_LOSSES,
    figure1_table,
    grid_prior,
    scale_loss,
)
from femin.free_energy import HALF_SQ_L2, KL_TO_PRIOR, NEG_ENTROPY


class TestLossTables:
    def test_bimodal_loss_has_two_roots(self):
        f = BUILTIN_LOSSES["bimodal"]
        assert f(np.array([1.0]))[0] == 0.0
        assert f(np.array([-1.5]))[0] == 0.0

    def test_scaling_spans_zero_to_five(self):
        x = np.linspace(-4, 4, 81)
        scaled = scale_loss(BUILTIN_LOSSES["bimodal"](x))
        assert scaled.min() == 0.0
        assert scaled.max() == 5.0

    def test_constant_loss_scales_to_zero(self):
        assert np.array_equal(scale_loss(np.full(12, 3.3)), np.zeros(12))

    def test_prior_is_normalized_gaussian_shape(self):
        x = np.linspace(-4, 4, 41)
        prior = grid_prior(x)
        assert abs(prior.probs.sum() - 1.0) <= 1e-12
        assert prior.probs.argmax() == 20  # centered at x = 0


class TestFigure1Table:
    def test_high_temperature_limits(self):
        table = figure1_table(-4.0, 4.0, 41, [10.0, 1000.0], loss="bimodal")
        n = 41
        q_h = table.solutions[(NEG_ENTROPY, 10.0)]
        q_kl = table.solutions[(KL_TO_PRIOR, 10.0)]
        assert total_variation(q_h, FiniteDistribution.uniform(n)) <= 0.05
        assert total_variation(q_kl, table.prior) <= 0.05
        # the quadratic penalty compares loss/T against per-cell prior masses
        # (~1/41 here), so tracking the prior needs a much larger T
        q_l2 = table.solutions[(HALF_SQ_L2, 1000.0)]
        assert total_variation(q_l2, table.prior) <= 0.05
        closer = total_variation(table.solutions[(HALF_SQ_L2, 1000.0)], table.prior)
        farther = total_variation(table.solutions[(HALF_SQ_L2, 10.0)], table.prior)
        assert closer <= farther

    def test_low_temperature_concentration_unique_argmin(self):
        table = figure1_table(-4.0, 4.0, 41, [0.01], loss="quadratic")
        argmin = int(np.argmin(table.loss))
        for kind in (NEG_ENTROPY, KL_TO_PRIOR, HALF_SQ_L2):
            q = table.solutions[(kind, 0.01)]
            window = q.probs[max(0, argmin - 3) : argmin + 4]
            assert window.sum() >= 0.99

    def test_constant_loss_gives_penalty_baselines(self):
        table = figure1_table(-4.0, 4.0, 21, [1.0, 0.1], loss=np.full(21, 2.0))
        for t in (1.0, 0.1):
            assert total_variation(
                table.solutions[(NEG_ENTROPY, t)], FiniteDistribution.uniform(21)
            ) <= 1e-9
            assert total_variation(table.solutions[(KL_TO_PRIOR, t)], table.prior) <= 1e-9
            assert total_variation(table.solutions[(HALF_SQ_L2, t)], table.prior) <= 1e-9

    def test_custom_loss_table_accepted(self):
        values = np.linspace(0.0, 1.0, 15)
        table = figure1_table(0.0, 1.0, 15, [1.0], loss=values)
        assert table.loss.max() == 5.0

    def test_columns_are_deterministic(self):
        table = figure1_table(-4.0, 4.0, 11, [10.0, 0.1])
        names = [name for name, _ in table.columns()]
        assert names == [
            "x",
            "loss",
            "prior",
            "q_neg_entropy_T10",
            "q_neg_entropy_T0.1",
            "q_kl_T10",
            "q_kl_T0.1",
            "q_half_sq_l2_T10",
            "q_half_sq_l2_T0.1",
        ]

    def test_input_validation(self):
        with pytest.raises(ValueError):
            figure1_table(-4.0, 4.0, 9, [1.0])
        with pytest.raises(ValueError):
            figure1_table(4.0, -4.0, 41, [1.0])
        with pytest.raises(ValueError):
            figure1_table(-4.0, 4.0, 41, [])
        with pytest.raises(ValueError):
            figure1_table(-4.0, 4.0, 41, [1.0], loss="no-such-loss")
        with pytest.raises(ValueError):
            figure1_table(-4.0, 4.0, 41, [1.0], loss=np.zeros(7))
