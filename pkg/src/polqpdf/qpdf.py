"""Quasi-probability distributions of the s-ordered kernel family.

Two evaluation routes are kept deliberately separate:

* `qpdf_coherent_closed` is the analytic product-Gaussian value for a
  two-mode coherent state, exact for all -1 <= s < 1;
* `qpdf_trace` is the brute-force trace of the state against the
  two-mode kernel in the truncated Fock space.

Tests and the CLI `oracle` command compare the two; nothing in this
module ever substitutes one for the other.

Values carry no 1/pi factors: normalization is (1/pi) * integral(W) = 1
per mode, and the 1/pi is applied by whoever integrates (see
`normalization_check`).  Sweeps return `QpdfGrid`, which the CLI
serializes to CSV.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import fock
from .errors import TruncationError, ValidationError
from .fock import (
    OrderParameter,
    TwoModeState,
    _displacement_block,
    _kernel_diagonal,
    _order_value,
    required_dim,
)
from .poincare import PolarizationIndex

__all__ = [
    "AxisKind",
    "Method",
    "GridMeta",
    "QpdfGrid",
    "PlaneQuadrature",
    "RadialQuadrature",
    "NormalizationResult",
    "MEASURE_NOTE",
    "qpdf_trace",
    "qpdf_trace_single",
    "qpdf_coherent_closed",
    "qpdf_polarization_section",
    "sweep_phase",
    "sweep_modulus",
    "plane_grid_qpdf",
    "normalization_check",
    "poincare_sphere_qpdf",
]

_IMAG_TOL = 1e-9
# mode vectors are trimmed at this amplitude inside the quadrature engine;
# the induced error on any reported integral is O(1e-8)
_TRIM_TOL = 1e-9

MEASURE_NOTE = "d2alpha=dRe*dIm; values carry no 1/pi factors"


class AxisKind(enum.Enum):
    PHASE = "phase_sweep"
    MODULUS = "amplitude_sweep"
    PLANE = "plane"


class Method(enum.Enum):
    CLOSED_FORM = "closed_form"
    TRACE_ORACLE = "trace_oracle"


@dataclass(frozen=True)
class GridMeta:
    """Parameters a grid was produced with (enough to reproduce it)."""

    s: float
    p: complex
    q: complex
    beta: complex
    dim_used: int | None
    method: Method
    measure: str = MEASURE_NOTE


@dataclass(frozen=True)
class QpdfGrid:
    """Sampled distribution values over one axis (or a square plane).

    For PHASE/MODULUS sweeps `values[i]` belongs to `axis_values[i]`.
    For PLANE grids the axis holds the shared Re/Im nodes and `values`
    is row-major with index i*n + j -> point axis[i] + 1j*axis[j].
    """

    axis_kind: AxisKind
    axis_values: np.ndarray
    values: np.ndarray
    meta: GridMeta

    def __post_init__(self) -> None:
        ax = np.array(self.axis_values, dtype=float)
        vals = np.array(self.values, dtype=float)
        if ax.ndim != 1 or ax.size < 2:
            raise ValidationError("axis_values must be a 1-D array of >= 2 points")
        if not np.all(np.isfinite(ax)):
            raise ValidationError("axis_values must be finite")
        if not np.all(np.diff(ax) > 0.0):
            raise ValidationError("axis_values must be strictly increasing")
        expected = ax.size * ax.size if self.axis_kind is AxisKind.PLANE else ax.size
        if vals.shape != (expected,):
            raise ValidationError(
                f"values must have length {expected} for {self.axis_kind.value}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValidationError("values must be finite")
        ax.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "axis_values", ax)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class PlaneQuadrature:
    """Tensor Gauss-Legendre rule on the square [-L, L]^2."""

    nodes_per_axis: int = 200
    half_width: float = 6.0

    def __post_init__(self) -> None:
        if self.nodes_per_axis < 2:
            raise ValidationError("nodes_per_axis must be >= 2")
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise ValidationError("half_width must be finite and > 0")


@dataclass(frozen=True)
class RadialQuadrature:
    """Polar rule: Gauss-Legendre in radius, uniform in angle."""

    n_radial: int = 160
    n_angular: int = 256
    max_radius: float | None = None

    def __post_init__(self) -> None:
        if self.n_radial < 2 or self.n_angular < 4:
            raise ValidationError("need n_radial >= 2 and n_angular >= 4")
        if self.max_radius is not None and not (
            math.isfinite(self.max_radius) and self.max_radius > 0
        ):
            raise ValidationError("max_radius must be finite and > 0")


@dataclass(frozen=True)
class NormalizationResult:
    """Outcome of the plane-integral normalization check."""

    total: float
    mode_x: float
    mode_y: float
    half_width: float
    recommended_half_width: float
    warnings: tuple[str, ...] = field(default=())

    @property
    def box_ok(self) -> bool:
        return self.half_width >= self.recommended_half_width


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def qpdf_coherent_closed(beta: complex, gamma: complex, alpha_x, alpha_y, s):
    """Distribution of |beta, gamma> at (alpha_x, alpha_y), closed form.

    (2/(1-s))^2 * exp(-2(|ax-beta|^2 + |ay-gamma|^2)/(1-s)).  Vectorized
    over alpha_x/alpha_y.
    """
    sv = _order_value(s)
    kappa = 2.0 / (1.0 - sv)
    ax = np.asarray(alpha_x, dtype=complex)
    ay = np.asarray(alpha_y, dtype=complex)
    val = kappa**2 * np.exp(
        -kappa * (np.abs(ax - complex(beta)) ** 2 + np.abs(ay - complex(gamma)) ** 2)
    )
    if val.ndim == 0:
        return float(val)
    return val


def qpdf_polarization_section(beta: complex, q, p, alpha_x, s):
    """Closed-form distribution on the section alpha_y = p * alpha_x.

    The state is the coherent pair (beta, q*beta); p fixes the slice of
    the four-dimensional phase space that is scanned.
    """
    pv = complex(p)
    qv = complex(q)
    ax = np.asarray(alpha_x, dtype=complex)
    return qpdf_coherent_closed(beta, qv * complex(beta), ax, pv * ax, s)


# ---------------------------------------------------------------------------
# brute-force traces
# ---------------------------------------------------------------------------

def _check_point_dim(dim: int, alpha: complex, label: str) -> None:
    need = required_dim(abs(alpha))
    if dim < need:
        raise TruncationError(
            f"dim={dim} is too small for |{label}|={abs(alpha):.4g}; need >= {need}"
        )


def _trace_many_kets(state: TwoModeState, axs, ays, sv: float) -> np.ndarray:
    """Tr[rho T(ax, ay, s)] for ket-backed states, batched over points.

    Uses Tr[|v><v| (t_x (x) t_y)] = sum_kl r_k r_l |(D(-ax) V D(-ay)^T)_kl|^2
    with V the ket reshaped to dim x dim; identical to the dense kron
    route, point by point, at the state's own truncation.
    """
    d = state.dim
    axs = np.asarray(axs, dtype=complex).reshape(-1)
    ays = np.asarray(ays, dtype=complex).reshape(-1)
    kappa = 2.0 / (1.0 - sv)
    r = _kernel_diagonal(sv, d)
    out = np.zeros(axs.size, dtype=float)
    same_y = bool(np.all(ays == ays[0]))
    chunk = max(1, int(1e6 // (d * d)))
    for lo in range(0, axs.size, chunk):
        hi = min(lo + chunk, axs.size)
        bx = _displacement_block(-axs[lo:hi], d, d)
        if same_y:
            by = _displacement_block(-ays[:1], d, d)
        else:
            by = _displacement_block(-ays[lo:hi], d, d)
        for w, v in state.components:
            V = v.reshape(d, d)
            t = bx @ V  # (g, d, d)
            if same_y:
                m = t @ by[0].T
            else:
                m = np.einsum("gml,gnl->gmn", t, by)
            out[lo:hi] += (w * kappa * kappa) * np.einsum(
                "k,l,gkl->g", r, r, np.abs(m) ** 2
            )
    return out


def qpdf_trace(state: TwoModeState, alpha_x: complex, alpha_y: complex, s) -> float:
    """Tr[rho T(alpha_x, alpha_y, s)] in the state's truncated space.

    The imaginary residue of the trace must stay below 1e-9; the real
    part is returned.  dim must satisfy the truncation rule for both
    phase-space moduli.
    """
    sv = _order_value(s)
    ax, ay = complex(alpha_x), complex(alpha_y)
    _check_point_dim(state.dim, ax, "alpha_x")
    _check_point_dim(state.dim, ay, "alpha_y")
    if state.components is not None:
        return float(_trace_many_kets(state, [ax], [ay], sv)[0])
    d = state.dim
    tx = fock.kernel(ax, sv, d).entries
    ty = fock.kernel(ay, sv, d).entries
    rho4 = state.density.reshape(d, d, d, d)
    val = complex(np.einsum("abcd,ca,db->", rho4, tx, ty, optimize=True))
    if abs(val.imag) > _IMAG_TOL:
        raise ValidationError(
            f"trace has imaginary residue {val.imag:.3e}; state or s is unphysical"
        )
    return val.real


def qpdf_trace_single(rho: np.ndarray, alpha: complex, s) -> float:
    """Single-mode W(alpha, s) = Tr[rho t(alpha, s)] for a dense rho."""
    sv = _order_value(s)
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"rho must be square, got {rho.shape}")
    d = rho.shape[0]
    _check_point_dim(d, complex(alpha), "alpha")
    t = fock.kernel(alpha, sv, d).entries
    val = complex(np.einsum("ij,ji->", rho, t))
    if abs(val.imag) > _IMAG_TOL:
        raise ValidationError(f"trace has imaginary residue {val.imag:.3e}")
    return val.real


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def _sweep_dim(modulus_x: float, modulus_y: float, beta: complex, gamma: complex) -> int:
    # displaced moduli: the kernel shifts the state by the sweep point,
    # so size the space for |alpha| + |amplitude| per mode
    return max(
        required_dim(modulus_x + abs(beta)),
        required_dim(modulus_y + abs(gamma)),
    )


def _sweep_values(
    axs: np.ndarray,
    ays: np.ndarray,
    beta: complex,
    gamma: complex,
    sv: float,
    method: Method,
    dim: int | None,
) -> tuple[np.ndarray, int | None]:
    if method is Method.CLOSED_FORM:
        return qpdf_coherent_closed(beta, gamma, axs, ays, sv), None
    use_dim = dim or _sweep_dim(
        float(np.max(np.abs(axs))), float(np.max(np.abs(ays))), beta, gamma
    )
    state = fock.two_mode_coherent_density(beta, gamma, use_dim)
    for a in (axs[np.argmax(np.abs(axs))], ays[np.argmax(np.abs(ays))]):
        _check_point_dim(use_dim, complex(a), "sweep point")
    return _trace_many_kets(state, axs, ays, sv), use_dim


def sweep_phase(
    beta: complex,
    q: complex,
    p: complex,
    modulus: float,
    s,
    n_points: int = 512,
    method: Method = Method.CLOSED_FORM,
    dim: int | None = None,
) -> QpdfGrid:
    """Scan arg(alpha_x) over [0, 2*pi) at fixed |alpha_x| = modulus."""
    sv = _order_value(s)
    if not (math.isfinite(modulus) and modulus >= 0):
        raise ValidationError(f"modulus must be finite and >= 0, got {modulus}")
    if n_points < 2:
        raise ValidationError("n_points must be >= 2")
    pv, qv = complex(p), complex(q)
    gamma = qv * complex(beta)
    axis = np.arange(n_points) * (2.0 * math.pi / n_points)
    axs = modulus * np.exp(1j * axis)
    ays = pv * axs
    vals, dim_used = _sweep_values(axs, ays, complex(beta), gamma, sv, method, dim)
    meta = GridMeta(sv, pv, qv, complex(beta), dim_used, method)
    return QpdfGrid(AxisKind.PHASE, axis, vals, meta)


def sweep_modulus(
    beta: complex,
    q: complex,
    p: complex,
    phase: float,
    s,
    max_modulus: float = 8.0,
    n_points: int = 512,
    method: Method = Method.CLOSED_FORM,
    dim: int | None = None,
) -> QpdfGrid:
    """Scan |alpha_x| over [0, max_modulus] at fixed arg(alpha_x) = phase."""
    sv = _order_value(s)
    if not (math.isfinite(max_modulus) and max_modulus > 0):
        raise ValidationError(f"max_modulus must be finite and > 0, got {max_modulus}")
    if n_points < 2:
        raise ValidationError("n_points must be >= 2")
    pv, qv = complex(p), complex(q)
    gamma = qv * complex(beta)
    axis = np.linspace(0.0, float(max_modulus), n_points)
    axs = axis * complex(math.cos(phase), math.sin(phase))
    ays = pv * axs
    vals, dim_used = _sweep_values(axs, ays, complex(beta), gamma, sv, method, dim)
    meta = GridMeta(sv, pv, qv, complex(beta), dim_used, method)
    return QpdfGrid(AxisKind.MODULUS, axis, vals, meta)


def plane_grid_qpdf(
    state: TwoModeState,
    s,
    half_width: float,
    n_points: int = 64,
    alpha_y: complex = 0j,
) -> QpdfGrid:
    """Trace-route values on an n x n grid in the alpha_x plane.

    alpha_y is held fixed; values are row-major over (Re, Im) nodes.
    """
    sv = _order_value(s)
    if not (math.isfinite(half_width) and half_width > 0):
        raise ValidationError("half_width must be finite and > 0")
    axis = np.linspace(-float(half_width), float(half_width), n_points)
    re, im = np.meshgrid(axis, axis, indexing="ij")
    pts = (re + 1j * im).reshape(-1)
    _check_point_dim(state.dim, complex(abs(pts).max()), "alpha_x")
    _check_point_dim(state.dim, complex(alpha_y), "alpha_y")
    if state.components is not None:
        vals = _trace_many_kets(state, pts, np.full(pts.size, complex(alpha_y)), sv)
    else:
        vals = np.array(
            [qpdf_trace(state, z, complex(alpha_y), sv) for z in pts], dtype=float
        )
    meta = GridMeta(sv, 0j, 0j, complex(alpha_y), state.dim, Method.TRACE_ORACLE)
    return QpdfGrid(AxisKind.PLANE, axis, vals, meta)


# ---------------------------------------------------------------------------
# plane-integral normalization
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _plane_nodes(quad: PlaneQuadrature) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gl_nodes(quad.nodes_per_axis)
    L = quad.half_width
    xs = L * x
    ws = L * w
    re, im = np.meshgrid(xs, xs, indexing="ij")
    ww = np.outer(ws, ws)
    return (re + 1j * im).reshape(-1), ww.reshape(-1)


def _engine_rows(sv: float, dim_work: int) -> int:
    """Kernel diagonal length that keeps the discarded weight < 1e-18."""
    if sv == -1.0:
        return 1
    ratio = abs((sv + 1.0) / (sv - 1.0))
    if ratio < 1.0:
        cut = int(math.ceil(18.0 * math.log(10.0) / -math.log(ratio))) + 5
        return min(dim_work, cut)
    return dim_work


def _overlap_integral_matrix(
    vecs: np.ndarray, sv: float, nodes: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    """(1/pi) * integral of <u_i| t(alpha, s) |u_j> over the plane nodes.

    vecs is (support_dim, J).  At s = 0 the kernel is 2 D(2 alpha) Pi
    (parity), so matrix elements between the truncated vectors are exact
    with support x support displacement blocks.  For other s the kernel
    diagonal forces a working dimension that grows with the node radius;
    chunks are processed in order of increasing radius so only the outer
    ring pays for it.
    """
    support, nvec = vecs.shape
    kappa = 2.0 / (1.0 - sv)
    chunk = 512

    if sv == 0.0:
        acc = np.zeros((support, support), dtype=complex)
        for lo in range(0, nodes.size, chunk):
            sl = slice(lo, lo + chunk)
            acc += np.tensordot(
                weights[sl], _displacement_block(2.0 * nodes[sl], support, support), 1
            )
        signs = np.power(-1.0, np.arange(support))
        return (kappa / math.pi) * (vecs.conj().T @ acc @ (signs[:, None] * vecs))

    order = np.argsort(np.abs(nodes))
    out = np.zeros((nvec, nvec), dtype=complex)
    for lo in range(0, nodes.size, chunk):
        idx = order[lo : lo + chunk]
        rmax = float(np.abs(nodes[idx]).max())
        dim_work = int(math.ceil((rmax + math.sqrt(support) + 2.0) ** 2)) + 30
        rows = _engine_rows(sv, dim_work)
        r = _kernel_diagonal(sv, rows)
        block = _displacement_block(-nodes[idx], rows, support)
        phi = (block @ vecs).reshape(-1, nvec)  # (g*rows, J)
        scale = (weights[idx][:, None] * r[None, :]).reshape(-1)
        out += (kappa / math.pi) * (phi.conj().T @ (scale[:, None] * phi))
    return out


def _schmidt(v: np.ndarray, dim: int):
    """Trimmed Schmidt decomposition of a two-mode ket."""
    V = v.reshape(dim, dim)
    rx = int(np.max(np.nonzero(np.abs(V).max(axis=1) > _TRIM_TOL)[0], initial=0)) + 1
    ry = int(np.max(np.nonzero(np.abs(V).max(axis=0) > _TRIM_TOL)[0], initial=0)) + 1
    u, sig, wh = np.linalg.svd(V[:rx, :ry], full_matrices=False)
    keep = sig > _TRIM_TOL
    return sig[keep], u[:, keep], wh[keep, :].T


def normalization_check(
    state: TwoModeState, s, quadrature: PlaneQuadrature = PlaneQuadrature()
) -> NormalizationResult:
    """Check (1/pi per mode) * integral of W over the quadrature box.

    Returns the full 4-D integral estimate together with the two
    single-mode integrals of the reduced states.  For product states the
    total is exactly the product of the mode integrals (the tensor
    quadrature factorizes); entangled states are handled through the
    Schmidt decomposition of each component.  A box smaller than
    (max amplitude + 5) is flagged, not fatal.  Accuracy is only
    established for s <= 0.
    """
    sv = _order_value(s)
    nodes, weights = _plane_nodes(quadrature)
    comps = fock.state_components(state)

    total = 0.0
    mode_x = 0.0
    mode_y = 0.0
    nbar_x = 0.0
    nbar_y = 0.0
    for w, v in comps:
        sig, ux, uy = _schmidt(v, state.dim)
        ox = _overlap_integral_matrix(ux, sv, nodes, weights)
        oy = _overlap_integral_matrix(uy, sv, nodes, weights)
        quad_form = sig @ (ox * oy) @ sig
        total += w * float(quad_form.real)
        mode_x += w * float((sig**2 @ np.diag(ox).real))
        mode_y += w * float((sig**2 @ np.diag(oy).real))
        n_row = np.arange(ux.shape[0])
        nbar_x += w * float(sig**2 @ (n_row @ (np.abs(ux) ** 2)))
        n_row = np.arange(uy.shape[0])
        nbar_y += w * float(sig**2 @ (n_row @ (np.abs(uy) ** 2)))

    recommended = math.sqrt(max(nbar_x, nbar_y)) + 5.0
    warnings: tuple[str, ...] = ()
    if quadrature.half_width < recommended:
        warnings = (
            f"quadrature box half-width {quadrature.half_width:.3g} is below "
            f"the recommended {recommended:.3g} for this state",
        )
    return NormalizationResult(
        total=total,
        mode_x=mode_x,
        mode_y=mode_y,
        half_width=quadrature.half_width,
        recommended_half_width=recommended,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# polarization-sphere section integral
# ---------------------------------------------------------------------------

def poincare_sphere_qpdf(
    beta: complex,
    q,
    p_direction: tuple[float, float],
    s,
    radial: RadialQuadrature = RadialQuadrature(),
) -> float:
    """Integral of the closed-form section over the alpha_x plane.

    p_direction = (chi0, delta0) fixes p = tan(chi0/2) exp(i delta0); the
    measure is the plane one written in polar form,
    integral over r in [0, inf), phi in [0, 2pi) of W(r e^{i phi}) r.
    No 1/pi factor is applied.  chi0 = pi is a pole of p and rejected.
    """
    sv = _order_value(s)
    pv = PolarizationIndex.from_angles(*p_direction).value
    qv = complex(q)
    bv = complex(beta)
    kappa = 2.0 / (1.0 - sv)
    a_quad = kappa * (1.0 + abs(pv) ** 2)
    center = abs(1.0 + pv.conjugate() * qv) * abs(bv) / (1.0 + abs(pv) ** 2)
    r_max = radial.max_radius
    if r_max is None:
        r_max = center + 10.0 / math.sqrt(a_quad) + 1.0

    xr, wr = _gl_nodes(radial.n_radial)
    rr = 0.5 * r_max * (xr + 1.0)
    wr = 0.5 * r_max * wr
    th = np.arange(radial.n_angular) * (2.0 * math.pi / radial.n_angular)
    wth = 2.0 * math.pi / radial.n_angular
    pts = rr[:, None] * np.exp(1j * th[None, :])
    vals = qpdf_polarization_section(bv, qv, pv, pts, sv)
    return float(np.einsum("rt,r,r->", vals, rr, wr)) * wth
