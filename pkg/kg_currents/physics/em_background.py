"""静磁背景下的最小耦合: D_q = −(∇−iqA⃗)² + M², 稠密本征分解给出分数幂

只处理静态磁场; 一般背景只提供规范因子 u 与 χ = uψ 变换.
"""

from __future__ import annotations

import math
import threading
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from loguru import logger
from numpy.typing import NDArray
from scipy.integrate import quad_vec

from kg_currents.core.constants import GAUGE_FACTOR_TOLERANCE, HERMITIAN_TOLERANCE, MAX_DENSE_POINTS
from kg_currents.core.errors import DocumentError, LatticeMismatchError, ParameterError, QuadratureError, SpectrumError
from kg_currents.physics.params import InnerParams, require_mass
from kg_currents.physics.spectral_grid import ComplexArray, GridState, Lattice, require_compatible, spectral_gradient

_BLOCK = 256


@dataclass(frozen=True)
class ScalarPotential:
    """φ(x⁰, x⃗): zero / constant / 按时间给出格点数组的 profile"""

    kind: Literal["zero", "constant", "profile"] = "zero"
    constant: float = 0.0
    profile: Callable[[float], NDArray[np.float64]] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind == "profile" and self.profile is None:
            raise ParameterError("profile potential needs a callable")
        if self.kind == "constant" and not math.isfinite(self.constant):
            raise ParameterError(f"constant potential must be finite: {self.constant}")

    @classmethod
    def zero(cls) -> ScalarPotential:
        return cls()

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind == "constant" and self.constant == 0.0)

    def at(self, x0: float, lattice: Lattice) -> NDArray[np.float64]:
        if self.kind == "zero":
            return np.zeros(lattice.shape)
        if self.kind == "constant":
            return np.full(lattice.shape, self.constant)
        assert self.profile is not None
        values = np.asarray(self.profile(x0), dtype=float)
        if values.shape != lattice.shape:
            raise LatticeMismatchError(f"phi profile shape {values.shape} != lattice shape {lattice.shape}")
        return values


def _real_field(arr: Any, lattice: Lattice, name: str) -> NDArray[np.float64]:
    values = np.asarray(arr)
    if np.iscomplexobj(values):
        if np.any(values.imag != 0.0):
            raise ParameterError(f"{name} must be real")
        values = values.real
    values = np.array(values, dtype=float)
    if values.size != lattice.size:
        raise LatticeMismatchError(f"{name} has {values.size} values, lattice needs {lattice.size}")
    values = values.reshape(lattice.shape)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class EMConfig:
    """耦合 q 与静态矢势 A⃗ (每轴一个格点数组)"""

    lattice: Lattice
    q: float
    vector_potential: tuple[NDArray[np.float64], ...]
    scalar_potential: ScalarPotential = field(default_factory=ScalarPotential.zero)

    def __post_init__(self) -> None:
        if not math.isfinite(self.q):
            raise ParameterError(f"coupling must be finite: q={self.q}")
        if len(self.vector_potential) != self.lattice.dims:
            raise LatticeMismatchError(
                f"vector potential has {len(self.vector_potential)} axes, lattice has {self.lattice.dims}"
            )
        fields = tuple(_real_field(a, self.lattice, f"A[{i}]") for i, a in enumerate(self.vector_potential))
        object.__setattr__(self, "vector_potential", fields)

    @classmethod
    def free(cls, lattice: Lattice) -> EMConfig:
        return cls(lattice=lattice, q=0.0, vector_potential=tuple(np.zeros(lattice.shape) for _ in range(lattice.dims)))

    @classmethod
    def from_document(cls, doc: Mapping[str, Any], lattice: Lattice, path: str = "") -> EMConfig:
        """{"q": real, "A": [[...每轴...]], "phi": "zero" | {"constant": real}}"""
        try:
            q = float(doc["q"])
            axes = doc["A"]
            raw_phi = doc.get("phi", "zero")
            if raw_phi == "zero":
                phi = ScalarPotential.zero()
            elif isinstance(raw_phi, Mapping) and set(raw_phi) == {"constant"}:
                phi = ScalarPotential(kind="constant", constant=float(raw_phi["constant"]))
            else:
                raise DocumentError(f"unsupported phi entry {raw_phi!r}", path=path)
            return cls(lattice=lattice, q=q, vector_potential=tuple(axes), scalar_potential=phi)
        except DocumentError:
            raise
        except (KeyError, TypeError, ValueError) as err:
            raise DocumentError(f"invalid EM document ({err})", path=path) from err

    def to_document(self) -> dict[str, Any]:
        phi: Any = "zero" if self.scalar_potential.kind == "zero" else {"constant": self.scalar_potential.constant}
        if self.scalar_potential.kind == "profile":
            raise DocumentError("profile potentials are not serializable")
        return {"q": self.q, "A": [a.ravel().tolist() for a in self.vector_potential], "phi": phi}


class DenseOperator:
    """稠密 Hermitian 矩阵, 本征分解首次使用时缓存"""

    def __init__(self, matrix: NDArray[np.complex128], lattice: Lattice, mass: float):
        n = lattice.size
        if matrix.shape != (n, n):
            raise LatticeMismatchError(f"operator shape {matrix.shape} != ({n}, {n})")
        scale = float(np.max(np.abs(matrix))) or 1.0
        asym = float(np.max(np.abs(matrix - matrix.conj().T)))
        if asym > HERMITIAN_TOLERANCE * scale:
            raise SpectrumError(f"operator is not Hermitian: |D−D†|={asym:.3e}")
        self.matrix = 0.5 * (matrix + matrix.conj().T)
        self.matrix.setflags(write=False)
        self.lattice = lattice
        self.mass = mass
        self.hermitian = True
        self._eig: tuple[NDArray[np.float64], NDArray[np.complex128]] | None = None
        self._lock = threading.Lock()

    def eigh(self) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
        if self._eig is None:
            with self._lock:
                if self._eig is None:
                    logger.debug("dense eigendecomposition: n={}", self.lattice.size)
                    vals, vecs = np.linalg.eigh(self.matrix)
                    if vals[0] <= 0.0:
                        raise SpectrumError(f"non-positive eigenvalue {vals[0]:.3e}")
                    vals.setflags(write=False)
                    vecs.setflags(write=False)
                    self._eig = (vals, vecs)
        return self._eig

    def apply(self, v: NDArray) -> ComplexArray:
        flat = np.asarray(v, dtype=complex).reshape(-1)
        return (self.matrix @ flat).reshape(self.lattice.shape)

    def eigenvalues(self) -> NDArray[np.float64]:
        return self.eigh()[0]


# ---------------------------------------------------------------- 构造


def _covariant_laplacian_block(block: NDArray, lattice: Lattice, mass: float, em: EMConfig) -> NDArray:
    """Σ_j (∂_j − iqA_j)†(∂_j − iqA_j)v + M²v, 对一批格点数组同时作用"""
    axes = tuple(range(1, lattice.dims + 1))
    out = mass * mass * block
    for k, a in zip(lattice.wavevectors(), em.vector_potential, strict=True):
        ik = 1j * k

        def grad(v: NDArray, ik: NDArray = ik) -> NDArray:
            return np.fft.ifftn(np.fft.fftn(v, axes=axes) * ik, axes=axes)

        cov = grad(block) - 1j * em.q * a * block
        # C† = −∂ + iqA
        out = out - grad(cov) + 1j * em.q * a * cov
    return out


def build_Dq(lattice: Lattice, mass: float, em: EMConfig) -> DenseOperator:
    """φ ≡ 0 时的 D_q 稠密矩阵"""
    require_mass(mass)
    if em.lattice != lattice:
        raise LatticeMismatchError("EM config lives on a different lattice")
    if not em.scalar_potential.is_zero:
        raise SpectrumError("D_q is defined for stationary magnetic backgrounds only (phi must vanish)")
    n = lattice.size
    if n > MAX_DENSE_POINTS:
        raise SpectrumError(f"dense operator limited to {MAX_DENSE_POINTS} points: {n}")
    matrix = np.empty((n, n), dtype=complex)
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        block = np.zeros((stop - start, *lattice.shape), dtype=complex)
        block.reshape(stop - start, n)[np.arange(stop - start), np.arange(start, stop)] = 1.0
        matrix[:, start:stop] = _covariant_laplacian_block(block, lattice, mass, em).reshape(stop - start, n).T
    logger.debug("built D_q: n={} q={}", n, em.q)
    return DenseOperator(matrix, lattice, mass)


def free_operator(lattice: Lattice, mass: float) -> DenseOperator:
    return build_Dq(lattice, mass, EMConfig.free(lattice))


def dq_power_apply(op: DenseOperator, alpha: float, v: NDArray) -> ComplexArray:
    """V·diag(λ^α)·V†·v"""
    if alpha == 0.0:
        return np.array(v, dtype=complex).reshape(op.lattice.shape)
    vals, vecs = op.eigh()
    flat = np.asarray(v, dtype=complex).reshape(-1)
    return (vecs @ (vals**alpha * (vecs.conj().T @ flat))).reshape(op.lattice.shape)


def _check_op(s: GridState, op: DenseOperator) -> None:
    if s.lattice != op.lattice or not math.isclose(s.mass, op.mass, rel_tol=1e-14):
        raise LatticeMismatchError("state and operator disagree on lattice or mass")


def ip_a_magnetic(s1: GridState, s2: GridState, params: InnerParams, op: DenseOperator) -> complex:
    """(·,·)_a 中 D → D_q"""
    require_compatible(s1, s2)
    _check_op(s1, op)
    cell = s1.lattice.cell_volume
    plain = np.vdot(s1.psi, dq_power_apply(op, 0.5, s2.psi)) + np.vdot(s1.psidot, dq_power_apply(op, -0.5, s2.psidot))
    kg = np.vdot(s1.psi, s2.psidot) - np.vdot(s1.psidot, s2.psi)
    return complex(params.kappa / (2.0 * params.mass) * cell * (plain + 1j * params.a * kg))


def evolve_magnetic(s: GridState, delta: float, op: DenseOperator) -> GridState:
    """本征基上两个扇区分别乘 e^{∓i√λΔ}"""
    _check_op(s, op)
    if delta == 0.0:
        return s
    vals, vecs = op.eigh()
    w = np.sqrt(vals)
    psi_e = vecs.conj().T @ s.psi.reshape(-1)
    dot_e = vecs.conj().T @ s.psidot.reshape(-1)
    plus = 0.5 * (psi_e + 1j * dot_e / w) * np.exp(-1j * w * delta)
    minus = 0.5 * (psi_e - 1j * dot_e / w) * np.exp(1j * w * delta)
    return s.replace(psi=vecs @ (plus + minus), psidot=vecs @ (-1j * w * (plus - minus)), x0=s.x0 + delta)


def rho_a_magnetic(s: GridState, params: InnerParams, op: DenseOperator) -> NDArray[np.float64]:
    _check_op(s, op)
    quarter = dq_power_apply(op, 0.25, s.psi)
    inv_quarter_dot = dq_power_apply(op, -0.25, s.psidot)
    dens = np.abs(quarter) ** 2 + np.abs(inv_quarter_dot) ** 2 - 2.0 * params.a * (np.conj(quarter) * inv_quarter_dot).imag
    return params.kappa / (2.0 * params.mass) * dens


# ---------------------------------------------------------------- 规范


def gauge_factor(em: EMConfig, x0_0: float, x0: float) -> ComplexArray:
    """u(x⁰, x⃗) = exp[iq∫_{x⁰₀}^{x⁰} φ(τ, x⃗) dτ]"""
    phi = em.scalar_potential
    lat = em.lattice
    if phi.kind == "zero" or x0 == x0_0:
        return np.ones(lat.shape, dtype=complex)
    if phi.kind == "constant":
        return np.full(lat.shape, np.exp(1j * em.q * phi.constant * (x0 - x0_0)))
    integral, err = quad_vec(lambda t: phi.at(t, lat), x0_0, x0, epsabs=GAUGE_FACTOR_TOLERANCE, epsrel=0.0)
    if not np.all(np.isfinite(integral)) or err > GAUGE_FACTOR_TOLERANCE:
        raise QuadratureError("gauge factor", error=float(err), tolerance=GAUGE_FACTOR_TOLERANCE)
    return np.exp(1j * em.q * np.asarray(integral, dtype=float))


def gauge_transform(psi: NDArray, u: NDArray) -> ComplexArray:
    """χ = u·ψ"""
    if np.shape(psi) != np.shape(u):
        raise LatticeMismatchError(f"field shape {np.shape(psi)} != gauge factor shape {np.shape(u)}")
    return np.asarray(u) * np.asarray(psi)


def gauge_shift(em: EMConfig, chi: NDArray) -> EMConfig:
    """A⃗ → A⃗ + ∇χ, χ 为格点周期实函数"""
    lat = em.lattice
    chi_arr = _real_field(chi, lat, "chi")
    shifted = tuple(a + spectral_gradient(chi_arr, lat, i).real for i, a in enumerate(em.vector_potential))
    return EMConfig(lattice=lat, q=em.q, vector_potential=shifted, scalar_potential=em.scalar_potential)


def magnetic_field(em: EMConfig) -> tuple[NDArray[np.float64], ...]:
    """B = ∇×A⃗; 2D 只有 B_z"""
    lat = em.lattice

    def d(arr: NDArray, axis: int) -> NDArray[np.float64]:
        return spectral_gradient(arr, lat, axis).real

    a = em.vector_potential
    if lat.dims == 1:
        raise ParameterError("a 1d background carries no magnetic field")
    if lat.dims == 2:
        return (d(a[1], 0) - d(a[0], 1),)
    return (d(a[2], 1) - d(a[1], 2), d(a[0], 2) - d(a[2], 0), d(a[1], 0) - d(a[0], 1))
