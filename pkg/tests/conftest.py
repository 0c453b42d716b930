"""Shared fixtures for hetnet_realize tests."""
import pytest

from custom_components.hetnet_realize.book_embed import UPPER
from custom_components.hetnet_realize.book_embed import BookEmbedding
from custom_components.hetnet_realize.book_embed import EdgePlacement
from custom_components.hetnet_realize.book_embed import SpineOrder
from custom_components.hetnet_realize.common.config import RealizationConfig
from custom_components.hetnet_realize.graph_core import fan_network
from custom_components.hetnet_realize.graph_core import figure_two_network
from custom_components.hetnet_realize.synth.realize import realize_almost_complete
from custom_components.hetnet_realize.synth.realize import realize_book

LOWER = -UPPER

# Coarse integration keeps the end-to-end runs affordable
COARSE = {"rk_step": 0.005, "t_max": 150.0}


@pytest.fixture(name="fig2")
def fig2_fixture():
    return figure_two_network()


@pytest.fixture(name="fig2_embedding")
def fig2_embedding_fixture():
    """Spine a, b, c with a<->b split over both pages and b<->c likewise"""
    placements = (
        EdgePlacement(1, UPPER),  # a->b
        EdgePlacement(2, UPPER),  # b->a
        EdgePlacement(2, LOWER),  # b->c
        EdgePlacement(1, UPPER),  # c->b
    )
    return BookEmbedding(SpineOrder.identity(3), placements, 2)


@pytest.fixture(name="fig2_real")
def fig2_real_fixture(fig2, fig2_embedding):
    return realize_book(fig2, fig2_embedding, RealizationConfig.from_dict(COARSE))


@pytest.fixture(name="fan_real")
def fan_real_fixture():
    return realize_almost_complete(fan_network(3), RealizationConfig.from_dict(COARSE))
