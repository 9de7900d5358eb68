"""Forward-mode automatic differentiation helpers.

Every smooth object in the package (metrics, graph maps) is written as a pure
``jax.numpy`` function ``fn(params, x)``.  Derivatives of any order are taken
by nesting ``jax.jacfwd`` (forward dual arithmetic), so they carry no
truncation error.  New derivative axes are appended at the end.
"""

from functools import lru_cache

import jax
import jax.numpy as jnp
import numpy as np

jax.config.update("jax_enable_x64", True)

__all__ = ["jnp", "jax", "derivative", "jet", "to_numpy"]


def derivative(fn, order=1):
    """Return ``(params, x) -> d^order fn(params, x)`` (derivative axes last)."""
    out = fn
    for _ in range(order):
        out = jax.jacfwd(out, argnums=1)
    return out


def jet(fn, order):
    """Return ``(params, x) -> (fn, dfn, ..., d^order fn)``."""

    def _jet(params, x):
        return tuple(derivative(fn, k)(params, x) for k in range(order + 1))

    return _jet


@lru_cache(maxsize=None)
def compiled_jet(fn, order):
    return jax.jit(jet(fn, order))


@lru_cache(maxsize=None)
def compiled(fn):
    return jax.jit(fn)


def to_numpy(tree):
    return jax.tree_util.tree_map(lambda a: np.asarray(a, dtype=float), tree)


def as_params(params):
    """Convert nested params to a pytree of float64 arrays (hashable-free)."""
    return jax.tree_util.tree_map(lambda a: jnp.asarray(a, dtype=jnp.float64), params)
