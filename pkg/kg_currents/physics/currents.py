"""格点上的流 J_a^μ, 𝒥_a^μ 与守恒、协变、非相对论极限实验

时间导数一律来自精确演化后的中心差分 (一级 Richardson), 不代入场方程.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
from loguru import logger
from numpy.typing import NDArray

from kg_currents.core.constants import DEFAULT_TIME_STEP
from kg_currents.core.errors import ParameterError
from kg_currents.physics.hilbert_space import _check_params, ip_a, rho_a
from kg_currents.physics.mode_engine import (
    LorentzBoost,
    ModeField,
    ModeSpec,
    SpacetimePoint,
    boost,
    boost_point,
    boost_vector,
    eval_field,
    eval_field_gradient,
    eval_J,
    eval_J_script,
)
from kg_currents.physics.params import InnerParams
from kg_currents.physics.spectral_grid import (
    ComplexArray,
    GridState,
    Lattice,
    _multiplier,
    apply_D_power,
    charge_conjugate_grid,
    evolve,
    sector_split,
    spectral_gradient,
)

Which = Literal["J", "script"]


@dataclass(frozen=True, eq=False)
class FourField:
    """(C⁰, C¹, C², C³) 上指标; 降维时多余空间分量恒为零"""

    lattice: Lattice
    components: tuple[NDArray, NDArray, NDArray, NDArray]
    which: Which
    params: InnerParams
    x0: float

    def __getitem__(self, mu: int) -> NDArray:
        return self.components[mu]

    def as_array(self) -> NDArray:
        return np.stack(self.components)

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(c)) for c in self.components))

    @property
    def real(self) -> FourField:
        return self._map(np.real)

    @property
    def imag(self) -> FourField:
        return self._map(np.imag)

    def _map(self, fn) -> FourField:  # noqa: ANN001
        c0, c1, c2, c3 = (np.asarray(fn(c)) for c in self.components)
        return FourField(self.lattice, (c0, c1, c2, c3), self.which, self.params, self.x0)


def _pack(s: GridState, params: InnerParams, which: Which, time: NDArray, space: list[NDArray]) -> FourField:
    zero = np.zeros(s.lattice.shape, dtype=time.dtype)
    spatial = [*space, *([zero] * (3 - len(space)))]
    return FourField(s.lattice, (time, spatial[0], spatial[1], spatial[2]), which, params, s.x0)


def _gradients(arr: NDArray, lattice: Lattice) -> list[ComplexArray]:
    return [spectral_gradient(arr, lattice, i) for i in range(lattice.dims)]


# ---------------------------------------------------------------- J


def current_J(s: GridState, params: InnerParams, form: Literal["split", "covariant"] = "split") -> FourField:
    """J_a^μ; split 按 J⁰/J⃗ 分量公式, covariant 按 −(iκ/2M)[ψ*∂^μψ̃ − (∂^μψ)*ψ̃]"""
    _check_params(s, params)
    lat, m, a = s.lattice, s.mass, params.a
    pref = params.kappa / (2.0 * m)
    psi, dot = s.psi, s.psidot
    grad_psi = _gradients(psi, lat)

    if form == "split":
        inv_half_dot = apply_D_power(dot, lat, m, -0.5)
        time = pref * (
            np.conj(psi) * apply_D_power(psi, lat, m, 0.5)
            + np.conj(dot) * inv_half_dot
            + 1j * a * (np.conj(psi) * dot - np.conj(dot) * psi)
        )
        grad_inv = _gradients(inv_half_dot, lat)
        space = [
            pref
            * (
                np.conj(psi) * gi
                - np.conj(gp) * inv_half_dot
                - 1j * a * (np.conj(psi) * gp - np.conj(gp) * psi)
            )
            for gi, gp in zip(grad_inv, grad_psi, strict=True)
        ]
    elif form == "covariant":
        c = charge_conjugate_grid(s)
        tilde, tilde_dot = c.psi + a * psi, c.psidot + a * dot
        grad_tilde = _gradients(tilde, lat)
        # ∂^0 = −∂₀
        time = -1j * pref * (-np.conj(psi) * tilde_dot + np.conj(dot) * tilde)
        space = [
            -1j * pref * (np.conj(psi) * gt - np.conj(gp) * tilde)
            for gt, gp in zip(grad_tilde, grad_psi, strict=True)
        ]
    else:
        raise ParameterError(f"unknown current form: {form!r}")
    return _pack(s, params, "J", time, space)


def decompose_J_grid(s: GridState, params: InnerParams) -> tuple[FourField, FourField]:
    """由 ψ± 计算 Re J 与 Im J"""
    _check_params(s, params)
    lat, a = s.lattice, params.a
    plus, minus = sector_split(s)

    def _up(st: GridState) -> list[NDArray]:
        return [-st.psidot, *_gradients(st.psi, lat)]

    dp, dm = _up(plus), _up(minus)
    pref = params.kappa / params.mass
    re, im = [], []
    for gp, gm in zip(dp, dm, strict=True):
        cross = np.conj(plus.psi) * gm - np.conj(gp) * minus.psi
        re.append(
            pref
            * (
                (1.0 + a) * (np.conj(plus.psi) * gp).imag
                - (1.0 - a) * (np.conj(minus.psi) * gm).imag
                + a * cross.imag
            )
        )
        im.append(pref * cross.real)
    return _pack(s, params, "J", re[0], re[1:]), _pack(s, params, "J", im[0], im[1:])


def density_views(j: FourField) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """J⁰ 的两种密度候选 (Re J⁰, |J⁰|)"""
    return np.real(j[0]), np.abs(j[0])


# ---------------------------------------------------------------- 𝒥


def current_J_script(s: GridState, params: InnerParams) -> FourField:
    """𝒥_a^μ = (κ/2M)·Im{z(ψ,ψ_c)+z(ψ_c,ψ)+a[z(ψ,ψ)+z(ψ_c,ψ_c)]}, z(u,v) = (D^{1/4}u)*∂^μD^{−1/4}v"""
    _check_params(s, params)
    lat, m, a = s.lattice, s.mass, params.a
    c = charge_conjugate_grid(s)
    fields = {"psi": s, "psi_c": c}
    quarter = {k: apply_D_power(v.psi, lat, m, 0.25) for k, v in fields.items()}
    down = {k: apply_D_power(v.psi, lat, m, -0.25) for k, v in fields.items()}
    down_dot = {k: apply_D_power(v.psidot, lat, m, -0.25) for k, v in fields.items()}
    up = {k: [-down_dot[k], *_gradients(down[k], lat)] for k in fields}

    pairs = (("psi", "psi_c", 1.0), ("psi_c", "psi", 1.0), ("psi", "psi", a), ("psi_c", "psi_c", a))
    comps = []
    for mu in range(lat.dims + 1):
        z = sum(w * np.conj(quarter[u]) * up[v][mu] for u, v, w in pairs)
        comps.append(params.kappa / (2.0 * m) * np.imag(z))
    return _pack(s, params, "script", comps[0], comps[1:])


def _current(s: GridState, params: InnerParams, which: Which) -> FourField:
    if which == "J":
        return current_J(s, params)
    if which == "script":
        return current_J_script(s, params)
    raise ParameterError(f"unknown current: {which!r}")


# ---------------------------------------------------------------- 连续性


def divergence_field(s: GridState, params: InnerParams, which: Which = "J", h: float | None = None) -> NDArray:
    """∂_μC^μ 逐点: ∂₀C⁰ 由演化差分, 空间散度取谱导数"""
    step = h if h is not None else DEFAULT_TIME_STEP / s.mass
    if step <= 0.0:
        raise ParameterError(f"difference step must be positive: h={step}")

    def _rate(hh: float) -> NDArray:
        fwd = _current(evolve(s, hh), params, which)[0]
        bwd = _current(evolve(s, -hh), params, which)[0]
        return (fwd - bwd) / (2.0 * hh)

    time_rate = (4.0 * _rate(step / 2.0) - _rate(step)) / 3.0
    here = _current(s, params, which)
    space = sum(
        (spectral_gradient(here[i + 1], s.lattice, i) for i in range(s.lattice.dims)),
        start=np.zeros(s.lattice.shape, dtype=complex),
    )
    total = time_rate + space
    return np.real(total) if which == "script" else total


def _frequency_scale(s: GridState) -> float:
    """占据谱中最大的 ω"""
    w = _multiplier(s.lattice, s.mass, 0.5)
    weight = np.abs(np.fft.fftn(s.psi)) + np.abs(np.fft.fftn(s.psidot)) / w
    peak = float(np.max(weight))
    if peak == 0.0:
        return s.mass
    return float(np.max(w[weight > 1e-14 * peak]))


def continuity_residual(s: GridState, params: InnerParams, which: Which = "J", h: float | None = None) -> float:
    """max|∂_μC^μ| / (ω_max · max|C^μ|)"""
    here = _current(s, params, which)
    scale = _frequency_scale(s) * here.max_abs()
    if scale == 0.0:
        return 0.0
    residual = float(np.max(np.abs(divergence_field(s, params, which, h)))) / scale
    logger.debug("continuity residual: which={} residual={:.3e}", which, residual)
    return residual


def probability_identity(s: GridState, params: InnerParams) -> tuple[float, complex, complex]:
    """(∫ρ_a, ∫J⁰, (ψ,ψ)_a), 三者分别独立计算"""
    cell = s.lattice.cell_volume
    j0 = current_J(s, params)[0].ravel()
    total_j0 = complex(cell * math.fsum(j0.real), cell * math.fsum(j0.imag))
    total_rho = cell * math.fsum(rho_a(s, params).ravel())
    return total_rho, total_j0, ip_a(s, s, params)


# ---------------------------------------------------------------- 协变性


@dataclass(frozen=True)
class CovarianceRow:
    point: SpacetimePoint
    defect_J: float
    defect_script: float
    scale_J: float
    scale_script: float


def _vector_defect(moved: NDArray, transformed: NDArray) -> tuple[float, float]:
    defect = float(np.max(np.abs(moved - transformed)))
    scale = float(max(np.max(np.abs(moved)), np.max(np.abs(transformed))))
    return defect, scale


def covariance_experiment(
    f: ModeField,
    params: InnerParams,
    boost_: LorentzBoost,
    points: Sequence[SpacetimePoint],
) -> list[CovarianceRow]:
    """‖C(Λf)(Λx) − Λ·C(f)(x)‖, J 与 𝒥 各一列"""
    boosted = boost(f, boost_)
    rows = []
    for x in points:
        bx = boost_point(boost_, x)
        dj, sj = _vector_defect(
            eval_J(boosted, params, bx).as_array(), boost_vector(boost_, eval_J(f, params, x)).as_array()
        )
        ds, ss = _vector_defect(
            eval_J_script(boosted, params, bx).as_array(),
            boost_vector(boost_, eval_J_script(f, params, x)).as_array(),
        )
        rows.append(CovarianceRow(point=x, defect_J=dj, defect_script=ds, scale_J=sj, scale_script=ss))
    return rows


# ---------------------------------------------------------------- 非相对论极限


@dataclass(frozen=True)
class NonrelRow:
    scale: float
    temporal_J: float
    spatial_J: float
    temporal_script: float
    spatial_script: float
    ratio_J: float

    @property
    def deviation_J(self) -> float:
        return max(self.temporal_J, self.spatial_J)

    @property
    def deviation_script(self) -> float:
        return max(self.temporal_script, self.spatial_script)


@dataclass(frozen=True)
class NonrelScan:
    rows: list[NonrelRow]
    slope_J: float
    slope_script: float


def default_sample_points(box_length: float, count: int = 16, seed: int = 0) -> list[SpacetimePoint]:
    rng = np.random.default_rng(seed)
    return [
        SpacetimePoint(x0=float(t), xvec=(float(p[0]), float(p[1]), float(p[2])))
        for t, p in zip(rng.uniform(0.0, 1.0, count), rng.uniform(0.0, box_length, (count, 3)), strict=True)
    ]


def _fit_slope(scales: Sequence[float], deviations: Sequence[float]) -> float:
    tiny = np.finfo(float).tiny
    return float(np.polyfit(np.log(scales), np.log(np.maximum(deviations, tiny)), 1)[0])


def _limit_deviation(
    f: ModeField,
    params: InnerParams,
    points: Sequence[SpacetimePoint],
    evaluate,  # noqa: ANN001
) -> tuple[float, float, float, float]:
    """(max|C⁰−ϱ|/max ϱ, max‖C⃗−j⃗‖/max‖j⃗‖, ΣC⁰, Σϱ)"""
    rho, cur, c0, c_vec = [], [], [], []
    for x in points:
        psi = eval_field(f, x)
        grad = eval_field_gradient(f, x)
        rho.append(abs(psi) ** 2)
        cur.append((np.conj(psi) * grad[1:]).imag / params.mass)
        c = evaluate(f, params, x).as_array()
        c0.append(c[0])
        c_vec.append(c[1:])
    rho_arr, cur_arr = np.array(rho), np.array(cur)
    c0_arr, cvec_arr = np.array(c0), np.array(c_vec)
    temporal = float(np.max(np.abs(c0_arr - rho_arr)) / np.max(rho_arr))
    j_norm = float(np.max(np.linalg.norm(cur_arr, axis=1)))
    spatial_abs = float(np.max(np.linalg.norm(cvec_arr - cur_arr, axis=1)))
    spatial = spatial_abs / j_norm if j_norm > 0.0 else spatial_abs
    return temporal, spatial, float(np.sum(c0_arr.real)), float(np.sum(rho_arr))


def nonrel_limit_scan(
    base: ModeField,
    params: InnerParams,
    scales: Sequence[float],
    points: Sequence[SpacetimePoint] | None = None,
) -> NonrelScan:
    """k → k/s, x⃗ → s·x⃗, x⁰ → s²·x⁰; 偏差对 s 的双对数斜率"""
    if any(m.eps != 1 for m in base.modes) or not base.modes:
        raise ParameterError("nonrelativistic limit needs a nonempty positive-energy field")
    if any(s <= 1.0 for s in scales) or len(scales) < 2:
        raise ParameterError(f"scales must be at least two values > 1: {list(scales)}")
    samples = list(points) if points is not None else default_sample_points(base.box_length)

    rows = []
    for s in scales:
        field = base.with_modes(
            [ModeSpec(amplitude=m.amplitude, wavevec=tuple(k / s for k in m.wavevec), eps=1) for m in base.modes],
            boxed=False,
        )
        scaled = [SpacetimePoint(x0=s * s * x.x0, xvec=tuple(s * t for t in x.xvec)) for x in samples]
        tj, sj, c0, rho = _limit_deviation(field, params, scaled, eval_J)
        ts, ss, _, _ = _limit_deviation(field, params, scaled, eval_J_script)
        rows.append(
            NonrelRow(scale=s, temporal_J=tj, spatial_J=sj, temporal_script=ts, spatial_script=ss, ratio_J=c0 / rho)
        )
        logger.debug("nonrel scale={} dev_J={:.3e} dev_script={:.3e}", s, max(tj, sj), max(ts, ss))

    return NonrelScan(
        rows=rows,
        slope_J=_fit_slope(scales, [r.deviation_J for r in rows]),
        slope_script=_fit_slope(scales, [r.deviation_script for r in rows]),
    )
