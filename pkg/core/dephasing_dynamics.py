#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
纯退相干动力学模块
退相干函数 I(t) 的闭式解与数值积分、1/f 极限探针，以及量子比特约化密度矩阵的演化

闭式解中的 (1 + iΩ_c t/2) 与 2^{−(s−1)} 恰好是阻尼因子 e^{−2ω/Ω_c} 的积分变换，
数值积分使用同一个阻尼，两种方法计算的是同一个函数。
"""

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from core.bath_models import BathSpec
from utils.logger import get_logger
from utils.validators import validate_in_range, validate_non_negative, validate_positive

logger = get_logger(__name__)

DEFAULT_REL_TOL = 1e-8

# 数值积分的上限取 1/t + QUAD_TAIL_SPAN·Ω_c，e^{−2ω/Ω_c} 在此已小于 1e−17
QUAD_TAIL_SPAN = 20.0


class CurveMethod(str, Enum):
    """退相干曲线的计算方法"""
    CLOSED_FORM = 'ClosedForm'
    QUADRATURE = 'Quadrature'


class QuadratureConvergenceError(RuntimeError):
    """数值积分不收敛"""

    def __init__(self, subinterval: str, abserr: float, detail: str = ''):
        super().__init__(f"数值积分未收敛: 最差子区间 {subinterval}, 误差估计 {abserr:.3g} {detail}".strip())
        self.subinterval = subinterval
        self.abserr = abserr


@dataclass(frozen=True, eq=False)
class DecoherenceCurve:
    """退相干曲线"""
    times: np.ndarray
    values: np.ndarray
    method: CurveMethod
    spec: BathSpec

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if times.shape != values.shape or times.ndim != 1:
            raise ValueError("times 与 values 必须为等长一维数组")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times 必须严格升序")
        if np.any(np.abs(values) > 1.0 + 1e-9):
            raise ValueError("退相干函数的模不能超过1")
        if len(times) and times[0] == 0 and abs(values[0] - 1.0) > 1e-12:
            raise ValueError("I(0) 必须等于1")

        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'method', CurveMethod(self.method))

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass(frozen=True, eq=False)
class QubitState:
    """量子比特约化密度矩阵"""
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError(f"密度矩阵必须是2×2: {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=1e-12, rtol=0):
            raise ValueError("密度矩阵不是厄米的")
        if abs(np.trace(rho) - 1.0) > 1e-12:
            raise ValueError(f"密度矩阵迹不为1: {np.trace(rho)}")
        if np.linalg.eigvalsh(rho).min() < -1e-12:
            raise ValueError("密度矩阵存在负本征值")
        rho.setflags(write=False)
        object.__setattr__(self, 'rho', rho)

    @classmethod
    def from_amplitudes(cls, alpha: complex, beta: complex) -> 'QubitState':
        """纯态 α|↑⟩ + β|↓⟩"""
        norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        vector = np.array([alpha, beta], dtype=complex) / norm
        return cls(rho=np.outer(vector, vector.conj()))

    @classmethod
    def plus(cls) -> 'QubitState':
        return cls.from_amplitudes(1.0, 1.0)

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def coherence(self) -> complex:
        return complex(self.rho[0, 1])


def _check_inputs(spec: BathSpec, t: float) -> None:
    if spec.s == 0:
        raise ValueError("s = 0 是 1/f 极限，请使用 one_over_f_divergence_probe")
    if not validate_non_negative(t):
        raise ValueError(f"t 必须 ≥ 0: {t}")


def decoherence_exponent_closed_form(spec: BathSpec, t: float) -> complex:
    """
    闭式退相干指数 E(t) = −log I(t)

    s ≠ 1: λ²·Γ(s−1)·2^{−(s−1)}·(1 − (1 + iΩ_c t/2)^{−(s−1)})
    s = 1: λ²·log(1 + iΩ_c t/2) (Γ(0) 的极点与括号的零点相消)

    Args:
        spec: 热库参数 (s > 0)
        t: 时间 (≥ 0)

    Returns:
        complex: 指数
    """
    _check_inputs(spec, t)
    if t == 0 or spec.lam == 0:
        return 0j

    log_base = np.log(1.0 + 0.5j * spec.omega_uc * t)
    if spec.s == 1:
        return complex(spec.lam ** 2 * log_base)

    shift = spec.s - 1.0
    bracket = -np.expm1(-shift * log_base)
    return complex(spec.lam ** 2 * special.gamma(shift) * 2.0 ** (-shift) * bracket)


def decoherence_closed_form(spec: BathSpec, t: float) -> complex:
    """
    闭式退相干函数 I(t) = exp(−E(t))

    Args:
        spec: 热库参数 (s > 0)
        t: 时间 (≥ 0)

    Returns:
        complex: I(t)
    """
    return complex(np.exp(-decoherence_exponent_closed_form(spec, t)))


def long_time_plateau(spec: BathSpec) -> float:
    """
    t → ∞ 时 |I| 的极限: 超欧姆 (s > 1) 为 exp[−λ²Γ(s−1)·2^{−(s−1)}]，其余为 0

    Args:
        spec: 热库参数

    Returns:
        float: 平台值
    """
    if spec.s <= 1:
        return 0.0
    shift = spec.s - 1.0
    return float(math.exp(-spec.lam ** 2 * special.gamma(shift) * 2.0 ** (-shift)))


def _quad_piece(label: str, func, low: float, high: float, rel_tol: float, **kwargs) -> Tuple[float, float]:
    with warnings.catch_warnings():
        warnings.simplefilter('error', integrate.IntegrationWarning)
        try:
            value, abserr = integrate.quad(func, low, high, epsabs=1e-14,
                                           epsrel=rel_tol, limit=1000, **kwargs)[:2]
        except integrate.IntegrationWarning as e:
            raise QuadratureConvergenceError(label, math.inf, str(e).splitlines()[0])
    return value, abserr


def decoherence_quadrature(spec: BathSpec, t: float, rel_tol: float = DEFAULT_REL_TOL) -> complex:
    """
    数值积分 E = λ²Ω_c^{1−s}∫₀^∞ ω^{s−2}e^{−2ω/Ω_c}(1 − e^{−iωt}) dω，返回 exp(−E)

    在 ω = 1/t 处分段: [0, 1/t] 用端点代数权 ω^{s−1} 处理 ω→0 的可积奇点，
    [1/t, ∞) 用余弦/正弦振荡权。

    Args:
        spec: 热库参数 (s > 0)
        t: 时间 (≥ 0)
        rel_tol: 相对容差

    Returns:
        complex: I(t)
    """
    _check_inputs(spec, t)
    if not validate_positive(rel_tol):
        raise ValueError(f"rel_tol 必须大于0: {rel_tol}")
    if t == 0 or spec.lam == 0:
        return 1.0 + 0j

    s = spec.s
    damping = 2.0 / spec.omega_uc
    split = 1.0 / t
    upper = split + QUAD_TAIL_SPAN * spec.omega_uc
    piece_tol = min(rel_tol * 1e-2, 1e-10)

    def low_real(w):
        # (1 − cos ωt)/ω 乘以阻尼，去掉了 ω^{s−1} 权
        return math.exp(-damping * w) * 0.5 * w * t * t * np.sinc(w * t / (2.0 * math.pi)) ** 2

    def low_imag(w):
        return math.exp(-damping * w) * t * np.sinc(w * t / math.pi)

    def tail(w):
        return w ** (s - 2.0) * math.exp(-damping * w)

    pieces = {
        '[0, 1/t] Re': _quad_piece('[0, 1/t] Re', low_real, 0.0, split, piece_tol,
                                   weight='alg', wvar=(s - 1.0, 0.0)),
        '[0, 1/t] Im': _quad_piece('[0, 1/t] Im', low_imag, 0.0, split, piece_tol,
                                   weight='alg', wvar=(s - 1.0, 0.0)),
        '[1/t, ∞) flat': _quad_piece('[1/t, ∞) flat', tail, split, upper, piece_tol),
        '[1/t, ∞) cos': _quad_piece('[1/t, ∞) cos', tail, split, upper, piece_tol,
                                    weight='cos', wvar=t),
        '[1/t, ∞) sin': _quad_piece('[1/t, ∞) sin', tail, split, upper, piece_tol,
                                    weight='sin', wvar=t),
    }

    real_part = pieces['[0, 1/t] Re'][0] + pieces['[1/t, ∞) flat'][0] - pieces['[1/t, ∞) cos'][0]
    imag_part = pieces['[0, 1/t] Im'][0] + pieces['[1/t, ∞) sin'][0]
    prefactor = spec.lam ** 2 * spec.omega_uc ** (1.0 - s)

    total_err = prefactor * sum(err for _, err in pieces.values())
    if total_err > rel_tol:
        worst = max(pieces, key=lambda key: pieces[key][1])
        raise QuadratureConvergenceError(worst, prefactor * pieces[worst][1])

    exponent = prefactor * complex(real_part, imag_part)
    return complex(np.exp(-exponent))


def decoherence_curve(spec: BathSpec, times: Sequence[float],
                      method: CurveMethod = CurveMethod.CLOSED_FORM,
                      rel_tol: float = DEFAULT_REL_TOL) -> DecoherenceCurve:
    """
    在时间网格上计算退相干曲线

    Args:
        spec: 热库参数
        times: 升序时间网格
        method: 计算方法
        rel_tol: 数值积分相对容差

    Returns:
        DecoherenceCurve: 曲线
    """
    method = CurveMethod(method)
    if method == CurveMethod.CLOSED_FORM:
        values = [decoherence_closed_form(spec, t) for t in times]
    else:
        values = [decoherence_quadrature(spec, t, rel_tol) for t in times]

    logger.debug(f"退相干曲线: s={spec.s}, lam={spec.lam}, {len(values)} 个时间点, method={method.value}")
    return DecoherenceCurve(times=np.asarray(times, dtype=float), values=np.asarray(values),
                            method=method, spec=spec)


@dataclass(frozen=True)
class ProbePoint:
    """1/f 探针的一点: 模与总指数的模"""
    s: float
    modulus: float
    exponent_magnitude: float


def one_over_f_divergence_probe(lam: float, omega_uc: float, t: float,
                                s_grid: Sequence[float]) -> List[ProbePoint]:
    """
    s → 0⁺ 时的发散探针

    Γ(s−1) ≈ −1/s 的极点在 log I 的虚部 (相位) 上发散；模的实部指数中
    括号的实部随 s 线性趋零与极点相消，因此 |log I| ∝ 1/s，而 |I| 趋于有限值。

    Args:
        lam: 耦合 λ
        omega_uc: 紫外截断 Ω_c
        t: 时间 (> 0)
        s_grid: 降序、取值在 (0, 0.2] 内的 s 网格

    Returns:
        List[ProbePoint]: 每个 s 对应的 (s, |I|, |log I|)
    """
    if not validate_positive(t):
        raise ValueError(f"t 必须大于0: {t}")
    grid = [float(s) for s in s_grid]
    if not grid:
        raise ValueError("s_grid 不能为空")
    if any(not validate_in_range(s, 0.0, 0.2, include_low=False) for s in grid):
        raise ValueError(f"s_grid 取值必须在 (0, 0.2] 内: {grid}")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"s_grid 必须严格降序: {grid}")

    points = []
    for s in grid:
        spec = BathSpec(s=s, lam=lam, omega_c=omega_uc, omega_uc=omega_uc)
        exponent = decoherence_exponent_closed_form(spec, t)
        points.append(ProbePoint(s=s, modulus=float(math.exp(-exponent.real)),
                                 exponent_magnitude=float(abs(exponent))))
    return points


def evolve_offdiagonal(initial: QubitState, curve: DecoherenceCurve) -> List[QubitState]:
    """
    纯退相干演化: 对角元不变，非对角元乘以 I(t)

    Args:
        initial: 初态
        curve: 退相干曲线

    Returns:
        List[QubitState]: 每个时间点的态
    """
    states = []
    for value in curve.values:
        rho = np.array(initial.rho)
        rho[0, 1] = initial.rho[0, 1] * value
        rho[1, 0] = initial.rho[1, 0] * np.conj(value)
        states.append(QubitState(rho=rho))
    return states


def cross_validation_report(s_values: Sequence[float], lambdas: Sequence[float],
                            omega_t_values: Sequence[float], omega_uc: float = 1.0,
                            rel_tol: float = DEFAULT_REL_TOL) -> Dict:
    """
    闭式解与数值积分的交叉验证矩阵

    Args:
        s_values: 谱指数列表
        lambdas: 耦合列表
        omega_t_values: Ω_c·t 列表
        omega_uc: 紫外截断
        rel_tol: 数值积分容差

    Returns:
        Dict: 可直接写成JSON的报告
    """
    entries = []
    worst = 0.0
    for s in s_values:
        for lam in lambdas:
            spec = BathSpec(s=float(s), lam=float(lam), omega_c=omega_uc, omega_uc=omega_uc)
            for omega_t in omega_t_values:
                t = float(omega_t) / omega_uc
                closed = decoherence_closed_form(spec, t)
                quad = decoherence_quadrature(spec, t, rel_tol)
                error = abs(quad - closed) / abs(closed)
                worst = max(worst, error)
                entries.append({
                    's': float(s), 'lambda': float(lam), 'omega_t': float(omega_t),
                    'closed_form': [closed.real, closed.imag],
                    'quadrature': [quad.real, quad.imag],
                    'relative_error': error,
                })

    logger.info(f"交叉验证完成: {len(entries)} 个组合, 最大相对误差 {worst:.3g}")
    return {'rel_tol': rel_tol, 'max_relative_error': worst, 'entries': entries}
