"""Multi-objective building thermal control environment."""

from pathlib import Path

from . import _bemorl
from ._bemorl import (
    AssetError,
    BemorlError,
    ConfigError,
    EnvHandle,
    IngestError,
    LifecycleError,
    StabilityError,
    ValidationError,
    reward_cost,
    reward_thermal,
    scalarize,
)

__all__ = [
    "AssetError",
    "BemorlError",
    "ConfigError",
    "EnvHandle",
    "IngestError",
    "LifecycleError",
    "StabilityError",
    "ValidationError",
    "asset_dir",
    "make_env",
    "native_rollout",
    "reward_cost",
    "reward_thermal",
    "scalarize",
]

_PACKAGED_ASSETS = Path(__file__).parent / "assets"


def asset_dir():
    """Asset library bundled with the package, or None to use the native default."""
    return _PACKAGED_ASSETS if _PACKAGED_ASSETS.is_dir() else None


def make_env(config_path, context_path, seed=0, assets=None):
    """Create an environment from an env config JSON and a context JSON."""
    return _bemorl.make_env(str(config_path), str(context_path), seed, assets or asset_dir())


def native_rollout(config_path, context_path, seed, actions, assets=None):
    """Run the same episode entirely in native code; used for parity checks."""
    rows = [[float(x) for x in a] for a in actions]
    return _bemorl.native_rollout(str(config_path), str(context_path), seed, rows, assets or asset_dir())
