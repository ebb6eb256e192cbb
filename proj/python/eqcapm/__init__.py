"""Equilibrium pricing with affine factor models and information-based assets."""

import json

from ._core import (
    EqcapmError,
    HestonParams,
    OUJumpParams,
    binary_bond_price,
    exponential_price,
    heston_max_horizon,
    heston_price,
    heston_stock_oracle,
    implied_vol,
    oujump_price,
    oujump_stock_oracle,
    oujump_t_star,
    price_options,
    zero_supply_call,
)
from ._core import run_recipe as _run_recipe


def run_recipe(subcommand, config_path="", out_dir=".", figure="", seed=None):
    """Run a CLI recipe in-process; returns the summary the CLI prints."""
    kwargs = {} if seed is None else {"seed": seed}
    return json.loads(_run_recipe(subcommand, config_path, str(out_dir), figure, **kwargs))


__all__ = [
    "EqcapmError",
    "HestonParams",
    "OUJumpParams",
    "binary_bond_price",
    "exponential_price",
    "heston_max_horizon",
    "heston_price",
    "heston_stock_oracle",
    "implied_vol",
    "oujump_price",
    "oujump_stock_oracle",
    "oujump_t_star",
    "price_options",
    "run_recipe",
    "zero_supply_call",
]
