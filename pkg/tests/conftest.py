"""Shared helpers for the test suite."""

import numpy as np
import pytest

from relaysim.propagation import PropagationModel, realize_link_gains
from relaysim.scenario import (MACRO, RELAY, NetworkLayout, Node,
                               drop_rng_streams)


def tiny_network_state(seed=19, n_terminals=5):
    """Hand-built 2-site, 1-relay network without wraparound.

    Small enough for plain-python oracle recomputation, rich enough to
    exercise macro and relay links.
    """
    nodes = [Node(0, MACRO, (0.0, 0.0), 0.0, 46.0, 14.0, 5.0),
             Node(1, MACRO, (1000.0, 0.0), 180.0, 46.0, 14.0, 5.0),
             Node(2, RELAY, (500.0, 200.0), 0.0, 30.0, 5.0, 5.0)]
    layout = NetworkLayout(nodes, [(0.0, 0.0), (1000.0, 0.0)], [(0.0, 0.0)],
                           1000.0)
    rng = np.random.default_rng(seed)
    pts = rng.uniform((0.0, -300.0), (1000.0, 400.0), size=(n_terminals, 2))
    model = PropagationModel.for_scenario("urban")
    table = realize_link_gains(layout, pts, model,
                               drop_rng_streams(seed, 0)[1:5])
    return layout, table, model
