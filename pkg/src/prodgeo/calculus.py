"""Connections induced on the submanifold and the derived identity suites.

The tangential connection is the tangent part of the ambient covariant
derivative, the normal connection its normal part (Gauss and Weingarten
splits).  On top of those sit the covariant derivatives of the
product-structure projections,

    (nabla_X omega) Y = nabla^perp_X (omega Y) - omega (nabla_X Y)
    (nabla_X C) xi    = nabla^perp_X (C xi)    - C (nabla^perp_X xi)

and the two identities every submanifold of a locally product Riemannian
space satisfies:

    (nabla_X omega) Y + h(X, phi Y) = C h(X, Y)
    (nabla_X C) xi = - omega A_xi X - h(X, B xi)

``check_lemma1`` / ``check_lemma2`` measure the worst residual of these
identities over samples and frame directions; a corrupted ambient space
(one with nabla F != 0) breaks them by an O(1) margin, which is the
engine's negative control.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import jets
from .ambient import AmbientSpace
from .subgeom import Immersion, _JetGeometry

__all__ = [
    "DirectionalContext",
    "LemmaReport",
    "tangential_connection",
    "normal_connection",
    "nabla_omega",
    "nabla_C",
    "check_lemma1",
    "check_lemma2",
    "check_lemmas",
]


@dataclass(frozen=True)
class DirectionalContext:
    """Base point and parameter-space direction for one derivative."""

    base: tuple[float, ...]
    direction: tuple[float, ...]
    order: int = 1

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(float(v) for v in self.base))
        object.__setattr__(self, "direction", tuple(float(v) for v in self.direction))
        if len(self.base) != len(self.direction):
            raise ValueError("base point and direction have different dimensions")
        if not any(self.direction):
            raise ValueError("direction must be nonzero")
        if self.order < 1:
            raise jets.InsufficientJetOrder("directional derivatives need order >= 1")


def _geometry(immersion: Immersion, space: AmbientSpace, base) -> _JetGeometry:
    return _JetGeometry(immersion, space, base, order=3)


def _tangent_field(geo: _JetGeometry, y):
    """Resolve a tangent-field spec: coordinate index or parameter components."""
    if isinstance(y, (int, np.integer)):
        if not 0 <= int(y) < geo.n:
            raise ValueError(f"coordinate index {y} out of range")
        coefficients = [1.0 if b == int(y) else 0.0 for b in range(geo.n)]
        return geo.coordinate_field(coefficients)
    return geo.coordinate_field(list(y))


def _normal_field(geo: _JetGeometry, xi):
    """Resolve a normal-field spec: frame index, 'H', or frame coefficients."""
    if isinstance(xi, str):
        if xi != "H":
            raise ValueError("normal field must be a frame index, 'H', or coefficients")
        return geo.H_field
    if isinstance(xi, (int, np.integer)):
        if not 0 <= int(xi) < geo.m:
            raise ValueError(f"normal frame index {xi} out of range")
        return geo.xi_field[int(xi)]
    coefficients = [float(c) for c in xi]
    if len(coefficients) != geo.m:
        raise ValueError(f"expected {geo.m} normal frame coefficients")
    out = []
    for i in range(geo.N):
        total = coefficients[0] * geo.xi_field[0][i]
        for a in range(1, geo.m):
            total = total + coefficients[a] * geo.xi_field[a][i]
        out.append(total)
    return out


def tangential_connection(
    immersion: Immersion, space: AmbientSpace, ctx: DirectionalContext, y
) -> np.ndarray:
    """nabla_X Y: tangent part of the ambient covariant derivative."""
    geo = _geometry(immersion, space, ctx.base)
    return geo.nabla_tan(_tangent_field(geo, y), ctx.direction)


def normal_connection(
    immersion: Immersion, space: AmbientSpace, ctx: DirectionalContext, xi
) -> np.ndarray:
    """nabla^perp_X xi: normal part of the ambient covariant derivative."""
    geo = _geometry(immersion, space, ctx.base)
    return geo.nabla_perp(_normal_field(geo, xi), ctx.direction)


def _nabla_omega(geo: _JetGeometry, direction, y_field) -> np.ndarray:
    omega_y = geo.normal_part_field(geo.apply_F_field(y_field))
    d_perp = geo.nabla_perp(omega_y, direction)
    nab_y = geo.nabla_tan(y_field, direction)
    return d_perp - geo.f_normal_part(nab_y)


def _nabla_C(geo: _JetGeometry, direction, xi_field) -> np.ndarray:
    c_xi = geo.normal_part_field(geo.apply_F_field(xi_field))
    d_perp = geo.nabla_perp(c_xi, direction)
    nab_xi = geo.nabla_perp(xi_field, direction)
    return d_perp - geo.f_normal_part(nab_xi)


def nabla_omega(
    immersion: Immersion, space: AmbientSpace, ctx: DirectionalContext, y
) -> np.ndarray:
    """(nabla_X omega) Y as an ambient (normal) vector."""
    geo = _geometry(immersion, space, ctx.base)
    return _nabla_omega(geo, ctx.direction, _tangent_field(geo, y))


def nabla_C(
    immersion: Immersion, space: AmbientSpace, ctx: DirectionalContext, xi
) -> np.ndarray:
    """(nabla_X C) xi as an ambient (normal) vector."""
    geo = _geometry(immersion, space, ctx.base)
    return _nabla_C(geo, ctx.direction, _normal_field(geo, xi))


@dataclass(frozen=True)
class LemmaReport:
    lemma: str
    max_residual: float
    per_point: tuple[tuple[tuple[float, ...], float], ...]
    passed: bool
    tol: float


def _default_directions(n: int) -> np.ndarray:
    return np.eye(n)


def _lemma1_point(geo: _JetGeometry, directions) -> float:
    worst = 0.0
    y_fields = [_tangent_field(geo, b) for b in range(geo.n)]
    for x in directions:
        x = np.asarray(x, dtype=float)
        for b in range(geo.n):
            lhs = _nabla_omega(geo, x, y_fields[b])
            phi_y = geo.f_tangent_part(geo.J0[:, b])
            h_x_phiy = geo.h_bilinear(x, phi_y)
            y_params = np.eye(geo.n)[b]
            c_h = geo.f_normal_part(geo.h_params(x, y_params))
            worst = max(worst, geo.norm_g(lhs + h_x_phiy - c_h))
    return worst


def _lemma2_point(geo: _JetGeometry, directions, xi_choices) -> float:
    worst = 0.0
    for xi_spec in xi_choices:
        xi_field = _normal_field(geo, xi_spec)
        xi0 = np.array([j.value for j in xi_field])
        b_xi = geo.f_tangent_part(xi0)
        for x in directions:
            x = np.asarray(x, dtype=float)
            lhs = _nabla_C(geo, x, xi_field)
            rhs = -geo.f_normal_part(geo.shape_operator(x, xi0)) - geo.h_bilinear(x, b_xi)
            worst = max(worst, geo.norm_g(lhs - rhs))
    return worst


def check_lemma1(
    immersion: Immersion,
    space: AmbientSpace,
    samples: Sequence[Sequence[float]] | None = None,
    directions: Sequence[Sequence[float]] | None = None,
    tol: float = 1e-8,
) -> LemmaReport:
    """Residuals of (nabla_X omega) Y + h(X, phi Y) - C h(X, Y) over samples."""
    if samples is None:
        samples = immersion.samples
    per_point = []
    for u in samples:
        geo = _geometry(immersion, space, u)
        dirs = _default_directions(geo.n) if directions is None else directions
        per_point.append((tuple(float(v) for v in u), _lemma1_point(geo, dirs)))
    worst = max(r for _, r in per_point)
    return LemmaReport("lemma1", worst, tuple(per_point), worst <= tol, tol)


def check_lemma2(
    immersion: Immersion,
    space: AmbientSpace,
    samples: Sequence[Sequence[float]] | None = None,
    directions: Sequence[Sequence[float]] | None = None,
    xi_choices: Sequence | None = None,
    tol: float = 1e-8,
) -> LemmaReport:
    """Residuals of (nabla_X C) xi + omega A_xi X + h(X, B xi) over samples.

    ``xi_choices`` defaults to every normal frame field plus the mean
    curvature field.
    """
    if samples is None:
        samples = immersion.samples
    per_point = []
    for u in samples:
        geo = _geometry(immersion, space, u)
        dirs = _default_directions(geo.n) if directions is None else directions
        choices = list(range(geo.m)) + ["H"] if xi_choices is None else xi_choices
        per_point.append((tuple(float(v) for v in u), _lemma2_point(geo, dirs, choices)))
    worst = max(r for _, r in per_point)
    return LemmaReport("lemma2", worst, tuple(per_point), worst <= tol, tol)


def check_lemmas(
    immersion: Immersion,
    space: AmbientSpace,
    samples: Sequence[Sequence[float]] | None = None,
    tol: float = 1e-8,
) -> tuple[LemmaReport, LemmaReport]:
    """Both lemma suites sharing one geometry build per sample."""
    if samples is None:
        samples = immersion.samples
    points1, points2 = [], []
    for u in samples:
        geo = _geometry(immersion, space, u)
        dirs = _default_directions(geo.n)
        choices = list(range(geo.m)) + ["H"]
        key = tuple(float(v) for v in u)
        points1.append((key, _lemma1_point(geo, dirs)))
        points2.append((key, _lemma2_point(geo, dirs, choices)))
    worst1 = max(r for _, r in points1)
    worst2 = max(r for _, r in points2)
    return (
        LemmaReport("lemma1", worst1, tuple(points1), worst1 <= tol, tol),
        LemmaReport("lemma2", worst2, tuple(points2), worst2 <= tol, tol),
    )
