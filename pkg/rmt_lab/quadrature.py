"""
Copyright 2025 Samapriya Roy

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.

Quadrature rules: tanh-sinh with level doubling and panel-adaptive Gauss-Legendre
"""

import logging
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from rmt_lab.errors import ConvergenceError

logger = logging.getLogger("rmt-lab.quadrature")


@lru_cache(maxsize=16)
def tanh_sinh_rule(level, t_max=3.2):
    """
    Nodes and weights of the tanh-sinh rule on [-1, 1]

    Args:
        level (int): Step h = 2^-level in the t variable
        t_max (float): Truncation of the t axis

    Returns:
        tuple: (nodes, weights) as read-only numpy arrays
    """
    h = 2.0 ** -level
    count = int(np.ceil(t_max / h))
    t = h * np.arange(-count, count + 1)
    s = (np.pi / 2.0) * np.sinh(t)
    nodes = np.tanh(s)
    weights = h * (np.pi / 2.0) * np.cosh(t) / np.cosh(s) ** 2
    keep = (np.abs(nodes) < 1.0) & (weights > 0.0)
    nodes, weights = nodes[keep], weights[keep]
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def tanh_sinh(f, a, b, rtol=1e-11, atol=0.0, min_level=3, max_level=9):
    """
    Integrate f over [a, b] with the tanh-sinh rule, halving h until two
    consecutive levels agree

    Args:
        f (callable): Vectorized integrand, maps an array of nodes to values
        a (float): Lower limit
        b (float): Upper limit
        rtol (float): Relative tolerance between consecutive levels
        atol (float): Absolute tolerance
        min_level (int): First level evaluated
        max_level (int): Last level before giving up

    Returns:
        tuple: (integral, error estimate)

    Raises:
        ConvergenceError: If max_level is reached without agreement
    """
    center, half = (a + b) / 2.0, (b - a) / 2.0
    previous = None
    for level in range(min_level, max_level + 1):
        x, w = tanh_sinh_rule(level)
        value = half * np.sum(w * f(center + half * x))
        if previous is not None:
            error = abs(value - previous)
            if error <= max(atol, rtol * abs(value)):
                logger.debug(f"tanh-sinh converged at level {level}")
                return value, error
        previous = value
    raise ConvergenceError(f"tanh-sinh did not converge on [{a}, {b}] by level {max_level}",
                           iterations=max_level)


def tanh_sinh_2d(f, x_range, y_range, rtol=1e-11, atol=0.0, min_level=3, max_level=8):
    """
    Tensor-product tanh-sinh over a rectangle

    Args:
        f (callable): Vectorized integrand f(X, Y) on broadcast node grids
        x_range (tuple): (a, b) for the first variable
        y_range (tuple): (c, d) for the second variable

    Returns:
        tuple: (integral, error estimate)
    """
    (a, b), (c, d) = x_range, y_range
    cx, hx = (a + b) / 2.0, (b - a) / 2.0
    cy, hy = (c + d) / 2.0, (d - c) / 2.0
    previous = None
    for level in range(min_level, max_level + 1):
        x, w = tanh_sinh_rule(level)
        values = f((cx + hx * x)[:, None], (cy + hy * x)[None, :])
        value = hx * hy * np.sum(w[:, None] * w[None, :] * values)
        if previous is not None:
            error = abs(value - previous)
            if error <= max(atol, rtol * abs(value)):
                logger.debug(f"2D tanh-sinh converged at level {level} ({x.size}² nodes)")
                return value, error
        previous = value
    raise ConvergenceError(f"2D tanh-sinh did not converge by level {max_level}", iterations=max_level)


@lru_cache(maxsize=8)
def _legendre(order):
    x, w = roots_legendre(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(f, a, b, order=64):
    """Fixed-order Gauss-Legendre on [a, b]"""
    x, w = _legendre(order)
    half = (b - a) / 2.0
    return half * np.sum(w * f((a + b) / 2.0 + half * x))


def gauss_legendre_adaptive(f, a, b, order=64, tol=1e-12, max_depth=30):
    """
    Panel-adaptive Gauss-Legendre

    Each panel is compared with the sum over its two halves and split until
    the two estimates agree to tol relative to the running integral scale.

    Args:
        f (callable): Vectorized integrand
        a (float): Lower limit
        b (float): Upper limit
        order (int): Points per panel
        tol (float): Relative tolerance
        max_depth (int): Bisection depth limit

    Returns:
        tuple: (integral, error estimate)

    Raises:
        ConvergenceError: If a panel cannot be resolved within max_depth
    """
    whole = gauss_legendre(f, a, b, order)
    scale = max(abs(whole), np.finfo(float).tiny)
    stack = [(a, b, whole, 0)]
    total = 0.0
    error = 0.0
    while stack:
        lo, hi, coarse, depth = stack.pop()
        mid = (lo + hi) / 2.0
        left = gauss_legendre(f, lo, mid, order)
        right = gauss_legendre(f, mid, hi, order)
        fine = left + right
        scale = max(scale, abs(fine))
        difference = abs(fine - coarse)
        if difference <= tol * scale * (hi - lo) / (b - a) or difference == 0.0:
            total += fine
            error += difference
        elif depth >= max_depth:
            raise ConvergenceError(f"Gauss-Legendre panel [{lo}, {hi}] unresolved", iterations=depth)
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total, error
