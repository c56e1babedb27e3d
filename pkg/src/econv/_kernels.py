"""Grid supremum kernels: the hot inner loops of every GRID-mode operation.

Each kernel exists in two equivalent flavours:

* a numba ``@njit`` build (default), and
* a pure-numpy build, selected with ``ECONV_BACKEND=numpy`` or used
  automatically when numba is unavailable.

Conventions baked into the kernels (see :mod:`econv.extreal`):

* function values are extended reals in R u {+inf} (a proper model is never
  -inf), so a node with value +inf contributes -inf to a conjugate supremum;
* a node where the coupling is +inf while the function value is finite
  contributes +inf (the supremum short-circuits there);
* strict coupling feasibility <x, u*> < alpha is accepted in GRID mode only
  with the relative margin ``margin * max(1, |lhs|, |rhs|)``.

Max reductions are order independent, so results never depend on chunking
or thread counts.
"""

from __future__ import annotations

import os

import numpy as np

_CHUNK = 1 << 22  # rows per numpy chunk; bounds temporary memory

__all__ = [
    "backend_name",
    "coupling_sup",
    "wgrid_sup",
    "wgrid_sup_many",
    "dc_grid_min",
    "NUMPY_KERNELS",
    "NUMBA_KERNELS",
]


# ---------------------------------------------------------------------------
# pure numpy builds
# ---------------------------------------------------------------------------


def _feasible_mask_np(du: np.ndarray, alpha: float, margin: float) -> np.ndarray:
    if margin == 0.0:
        return du < alpha
    scale = np.maximum(1.0, np.maximum(np.abs(du), abs(alpha)))
    return du <= alpha - margin * scale


def _coupling_sup_np(points, fvals, xstar, ustar, alpha, margin):
    """sup over grid nodes of  c(x, (x*, u*, alpha)) - f(x)."""
    best = -np.inf
    best_idx = -1
    n_nodes = points.shape[0]
    for lo in range(0, n_nodes, _CHUNK):
        hi = min(lo + _CHUNK, n_nodes)
        pts = points[lo:hi]
        fv = fvals[lo:hi]
        finite_f = np.isfinite(fv)
        du = pts @ ustar
        feas = _feasible_mask_np(du, alpha, margin)
        # coupling +inf at a finite-f node dominates everything
        blown = finite_f & ~feas
        if blown.any():
            return np.inf, lo + int(np.argmax(blown))
        vals = np.where(finite_f & feas, pts @ xstar - np.where(finite_f, fv, 0.0), -np.inf)
        idx = int(np.argmax(vals))
        if vals[idx] > best:
            best = float(vals[idx])
            best_idx = lo + idx
    return best, best_idx


def _wgrid_sup_np(xs, us, alphas, gvals, xq, margin):
    """sup over W-grid nodes of  c'((x*, u*, alpha), xq) - g(x*, u*, alpha)."""
    vals = _wgrid_vals_np(xs, us, alphas, gvals, xq, margin)
    idx = int(np.argmax(vals))
    return float(vals[idx]), idx


def _wgrid_vals_np(xs, us, alphas, gvals, xq, margin):
    du = us @ xq
    if margin == 0.0:
        feas = du < alphas
    else:
        scale = np.maximum(1.0, np.maximum(np.abs(du), np.abs(alphas)))
        feas = du <= alphas - margin * scale
    finite_g = np.isfinite(gvals)
    out = np.full(gvals.shape, -np.inf)
    blown = finite_g & ~feas
    out[blown] = np.inf
    ok = finite_g & feas
    if ok.any():
        out[ok] = xs[ok] @ xq - gvals[ok]
    return out


def _wgrid_sup_many_np(xs, us, alphas, gvals, queries, margin):
    n_q = queries.shape[0]
    out = np.empty(n_q)
    for i in range(n_q):
        out[i], _ = _wgrid_sup_np(xs, us, alphas, gvals, queries[i], margin)
    return out


def _dc_grid_min_np(fvals, gvals):
    """min over nodes of  f(x) - g(x)  under the DC convention."""
    finite_f = np.isfinite(fvals)
    vals = np.full(fvals.shape, np.inf)
    g_inf = np.isposinf(gvals)
    vals[finite_f & g_inf] = -np.inf
    ok = finite_f & ~g_inf
    vals[ok] = fvals[ok] - gvals[ok]
    idx = int(np.argmin(vals))
    return float(vals[idx]), idx


NUMPY_KERNELS = {
    "coupling_sup": _coupling_sup_np,
    "wgrid_sup": _wgrid_sup_np,
    "wgrid_sup_many": _wgrid_sup_many_np,
    "dc_grid_min": _dc_grid_min_np,
}


# ---------------------------------------------------------------------------
# numba builds
# ---------------------------------------------------------------------------

NUMBA_KERNELS: dict | None = None


def _build_numba():
    from numba import njit

    @njit(cache=True)
    def _feasible(du, alpha, margin):
        if margin == 0.0:
            return du < alpha
        scale = 1.0
        if abs(du) > scale:
            scale = abs(du)
        if abs(alpha) > scale:
            scale = abs(alpha)
        return du <= alpha - margin * scale

    @njit(cache=True)
    def coupling_sup_nb(points, fvals, xstar, ustar, alpha, margin):
        n_nodes, n_dim = points.shape
        best = -np.inf
        best_idx = -1
        for i in range(n_nodes):
            fv = fvals[i]
            du = 0.0
            for k in range(n_dim):
                du += points[i, k] * ustar[k]
            feas = _feasible(du, alpha, margin)
            if fv == np.inf:
                continue
            if not feas:
                return np.inf, i
            v = -fv
            for k in range(n_dim):
                v += points[i, k] * xstar[k]
            if v > best:
                best = v
                best_idx = i
        return best, best_idx

    @njit(cache=True)
    def wgrid_sup_nb(xs, us, alphas, gvals, xq, margin):
        n_nodes, n_dim = xs.shape
        best = -np.inf
        best_idx = -1
        for i in range(n_nodes):
            gv = gvals[i]
            if gv == np.inf:
                continue
            du = 0.0
            for k in range(n_dim):
                du += us[i, k] * xq[k]
            if not _feasible(du, alphas[i], margin):
                return np.inf, i
            v = -gv
            for k in range(n_dim):
                v += xs[i, k] * xq[k]
            if v > best:
                best = v
                best_idx = i
        return best, best_idx

    @njit(cache=True)
    def wgrid_sup_many_nb(xs, us, alphas, gvals, queries, margin):
        n_q = queries.shape[0]
        out = np.empty(n_q)
        for i in range(n_q):
            v, _ = wgrid_sup_nb(xs, us, alphas, gvals, queries[i], margin)
            out[i] = v
        return out

    @njit(cache=True)
    def dc_grid_min_nb(fvals, gvals):
        n_nodes = fvals.shape[0]
        best = np.inf
        best_idx = 0
        for i in range(n_nodes):
            fv = fvals[i]
            if fv == np.inf:
                v = np.inf
            elif gvals[i] == np.inf:
                v = -np.inf
            else:
                v = fv - gvals[i]
            if v < best:
                best = v
                best_idx = i
        return best, best_idx

    return {
        "coupling_sup": coupling_sup_nb,
        "wgrid_sup": wgrid_sup_nb,
        "wgrid_sup_many": wgrid_sup_many_nb,
        "dc_grid_min": dc_grid_min_nb,
    }


_requested = os.environ.get("ECONV_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"ECONV_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

_active = NUMPY_KERNELS
_backend = "numpy"
if _requested == "numba":
    try:
        NUMBA_KERNELS = _build_numba()
        _active = NUMBA_KERNELS
        _backend = "numba"
    except ImportError:
        pass


def backend_name() -> str:
    """Name of the kernel backend in use ('numba' or 'numpy')."""
    return _backend


def _as_c(arr, dims=None):
    out = np.ascontiguousarray(arr, dtype=np.float64)
    if dims is not None and out.ndim != dims:
        raise ValueError(f"expected {dims}-d array, got {out.ndim}-d")
    return out


def coupling_sup(points, fvals, xstar, ustar, alpha, margin=0.0):
    """sup over X-grid nodes of the coupling minus the function value.

    Returns ``(value, argmax_index)``; the index is -1 when every node
    contributed -inf, and points at a witness node when the sup is +inf.
    """
    points = _as_c(points, 2)
    fvals = _as_c(fvals, 1)
    xstar = _as_c(xstar, 1)
    ustar = _as_c(ustar, 1)
    val, idx = _active["coupling_sup"](points, fvals, xstar, ustar, float(alpha), float(margin))
    return float(val), int(idx)


def wgrid_sup(xs, us, alphas, gvals, xq, margin=0.0):
    """sup over W-grid nodes of the flipped coupling minus g."""
    val, idx = _active["wgrid_sup"](
        _as_c(xs, 2), _as_c(us, 2), _as_c(alphas, 1), _as_c(gvals, 1), _as_c(xq, 1), float(margin)
    )
    return float(val), int(idx)


def wgrid_sup_many(xs, us, alphas, gvals, queries, margin=0.0):
    """Vector of W-grid suprema for a batch of query points (rows)."""
    return _active["wgrid_sup_many"](
        _as_c(xs, 2),
        _as_c(us, 2),
        _as_c(alphas, 1),
        _as_c(gvals, 1),
        _as_c(queries, 2),
        float(margin),
    )


def dc_grid_min(fvals, gvals):
    """min over nodes of f - g under the DC convention; returns (value, argmin)."""
    val, idx = _active["dc_grid_min"](_as_c(fvals, 1), _as_c(gvals, 1))
    return float(val), int(idx)
