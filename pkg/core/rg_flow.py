#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
重整化群流模块
双热库受挫模型的 β 函数 ∂λ/∂ℓ = (1−s)λ − λ³、不动点、流方程积分 (RK4 与 Bernoulli 闭式解)，
以及退相干相的分类

局域相与临界相的边界 s* 来自外部数值结果，只作为配置常数使用
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence, Tuple

import numpy as np

from utils.logger import get_logger
from utils.validators import validate_in_range, validate_non_negative, validate_positive

logger = get_logger(__name__)

S_STAR = 0.76
S_STAR_UNCERTAINTY = 0.01
OHMIC_TOL = 1e-12

# 每个名义步长内的相对误差容限，以及细分到的最小子步长
STEP_TOL = 1e-12
MIN_SUBSTEP = 1e-7


class FlowMethod(str, Enum):
    RK4 = 'RK4'
    CLOSED_FORM = 'ClosedForm'


class Stability(str, Enum):
    STABLE = 'Stable'
    UNSTABLE = 'Unstable'
    MARGINAL = 'Marginal'


class PhaseName(str, Enum):
    """退相干相"""
    SUPER_OHMIC_PERTURBATIVE = 'SuperOhmicPerturbative'
    OHMIC_FRUSTRATED = 'OhmicFrustrated'
    CRITICAL_INTERMEDIATE = 'CriticalIntermediate'
    LOCALIZED = 'Localized'


class EntropyClass(str, Enum):
    """基态熵的类别"""
    LN2 = 'Ln2'
    BETWEEN_ZERO_AND_LN2 = 'BetweenZeroAndLn2'
    ZERO = 'Zero'


ENTROPY_CLASS = {
    PhaseName.SUPER_OHMIC_PERTURBATIVE: EntropyClass.LN2,
    PhaseName.OHMIC_FRUSTRATED: EntropyClass.LN2,
    PhaseName.CRITICAL_INTERMEDIATE: EntropyClass.BETWEEN_ZERO_AND_LN2,
    PhaseName.LOCALIZED: EntropyClass.ZERO,
}


class FlowIntegrationError(RuntimeError):
    """流方程积分在最小子步长下仍未达到容差"""


@dataclass(frozen=True)
class FixedPoint:
    lambda_star: float
    stability: Stability


@dataclass(frozen=True, eq=False)
class RGTrajectory:
    """
    流轨迹

    Attributes:
        ell: 严格升序的标度参数
        lam: 对应的耦合 λ(ℓ)
        s: 谱指数
        method: RK4 或闭式解
    """
    ell: np.ndarray
    lam: np.ndarray
    s: float
    method: FlowMethod

    def __post_init__(self):
        ell = np.array(self.ell, dtype=float)
        lam = np.array(self.lam, dtype=float)
        if ell.shape != lam.shape or ell.ndim != 1 or ell.size == 0:
            raise ValueError("ell 与 lam 必须为等长非空一维数组")
        if ell[0] < 0 or np.any(np.diff(ell) <= 0):
            raise ValueError("ell 必须从非负值开始严格升序")
        if np.any(lam < 0):
            raise ValueError("lam 必须非负")

        ell.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, 'ell', ell)
        object.__setattr__(self, 'lam', lam)
        object.__setattr__(self, 'method', FlowMethod(self.method))

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return list(zip(self.ell.tolist(), self.lam.tolist()))

    @property
    def terminal_lambda(self) -> float:
        return float(self.lam[-1])

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.ell, self.lam


@dataclass(frozen=True)
class PhaseLabel:
    """
    相分类结果

    Attributes:
        label: 相名称
        entropy_class: 基态熵类别，与相名称一一对应
        free_coupling: λ₀ = 0 (无耦合)
        perturbative_warning: 临界相但 λ₀ > √(1−s)，超出微扰可信范围
    """
    label: PhaseName
    entropy_class: EntropyClass
    s: float
    lambda0: float
    s_star: float = S_STAR
    s_star_uncertainty: float = S_STAR_UNCERTAINTY
    free_coupling: bool = False
    perturbative_warning: bool = False

    def __post_init__(self):
        label = PhaseName(self.label)
        entropy = EntropyClass(self.entropy_class)
        if ENTROPY_CLASS[label] != entropy:
            raise ValueError(f"相 {label.value} 的熵类别应为 {ENTROPY_CLASS[label].value}，实际为 {entropy.value}")
        object.__setattr__(self, 'label', label)
        object.__setattr__(self, 'entropy_class', entropy)

    def as_dict(self) -> Dict:
        return {
            'label': self.label.value,
            'entropy_class': self.entropy_class.value,
            's': self.s,
            'lambda0': self.lambda0,
            's_star': self.s_star,
            's_star_uncertainty': self.s_star_uncertainty,
            'free_coupling': self.free_coupling,
            'perturbative_warning': self.perturbative_warning,
        }


def _is_ohmic(s: float) -> bool:
    return abs(s - 1.0) <= OHMIC_TOL


def beta_function(lam: float, s: float) -> float:
    """
    β(λ) = (1−s)λ − λ³

    Args:
        lam: 耦合 (≥ 0)
        s: 谱指数

    Returns:
        float: ∂λ/∂ℓ
    """
    if not validate_non_negative(lam):
        raise ValueError(f"lam 必须 ≥ 0: {lam}")
    return (1.0 - s) * lam - lam ** 3


def fixed_points(s: float) -> List[FixedPoint]:
    """
    β 函数的非负不动点及稳定性

    Args:
        s: 谱指数

    Returns:
        List[FixedPoint]: 按 λ* 升序
    """
    if _is_ohmic(s):
        return [FixedPoint(0.0, Stability.MARGINAL)]
    if s < 1.0:
        return [FixedPoint(0.0, Stability.UNSTABLE), FixedPoint(math.sqrt(1.0 - s), Stability.STABLE)]
    return [FixedPoint(0.0, Stability.STABLE)]


def _closed_form_value(lambda0: float, s: float, ell: float) -> float:
    if lambda0 == 0:
        return 0.0

    a = 1.0 - s
    lam2 = lambda0 * lambda0
    if abs(a) < OHMIC_TOL:
        return math.sqrt(lam2 / (1.0 + lam2 * 2.0 * ell))
    if a > 0:
        # 除以 e^{2aℓ}，避免大 ℓ 溢出
        return math.sqrt(lam2 / (math.exp(-2.0 * a * ell) - lam2 * math.expm1(-2.0 * a * ell) / a))
    return math.sqrt(lam2 * math.exp(2.0 * a * ell) / (1.0 + lam2 * math.expm1(2.0 * a * ell) / a))


def closed_form_flow(lambda0: float, s: float, ell_grid: Sequence[float]) -> RGTrajectory:
    """
    Bernoulli闭式解 λ(ℓ)² = (1−s)λ₀²e^{2(1−s)ℓ} / [(1−s) + λ₀²(e^{2(1−s)ℓ} − 1)]，
    s = 1 时为 λ₀²/(1 + 2λ₀²ℓ)

    Args:
        lambda0: 初始耦合
        s: 谱指数
        ell_grid: 升序标度网格

    Returns:
        RGTrajectory: 闭式解轨迹
    """
    if not validate_non_negative(lambda0):
        raise ValueError(f"lambda0 必须 ≥ 0: {lambda0}")

    ell = np.asarray(ell_grid, dtype=float)
    lam = np.array([_closed_form_value(lambda0, s, float(x)) for x in ell])
    return RGTrajectory(ell=ell, lam=lam, s=s, method=FlowMethod.CLOSED_FORM)


def _rk4(lam: float, s: float, h: float, n_steps: int) -> float:
    def rhs(x):
        return (1.0 - s) * x - x ** 3

    for _ in range(n_steps):
        k1 = rhs(lam)
        k2 = rhs(lam + 0.5 * h * k1)
        k3 = rhs(lam + 0.5 * h * k2)
        k4 = rhs(lam + h * k3)
        lam = lam + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return lam


def _advance(lam: float, s: float, interval: float, tol: float) -> Tuple[float, int]:
    n_sub = 1
    while True:
        coarse = _rk4(lam, s, interval / n_sub, n_sub)
        fine = _rk4(lam, s, interval / (2 * n_sub), 2 * n_sub)
        error = abs(fine - coarse) / 15.0
        if error <= tol * max(abs(fine), 1e-300):
            # Richardson外推
            return fine + (fine - coarse) / 15.0, 2 * n_sub

        n_sub *= 2
        if interval / (2 * n_sub) < MIN_SUBSTEP:
            raise FlowIntegrationError(
                f"流方程积分未收敛: 子步长 {interval / (2 * n_sub):.3g} 低于下限, 误差估计 {error:.3g}")


def integrate_flow(lambda0: float, s: float, ell_max: float, step: float,
                   tol: float = STEP_TOL) -> RGTrajectory:
    """
    四阶Runge-Kutta积分流方程

    每个名义步长内用步长加倍法估计局部误差，超过容差时把子步数加倍重算，
    接受时做Richardson外推。

    Args:
        lambda0: 初始耦合 (≥ 0)
        s: 谱指数
        ell_max: 积分终点
        step: 名义步长 (> 0)
        tol: 每步相对容差

    Returns:
        RGTrajectory: 在 0, step, 2·step, …, ell_max 上的轨迹
    """
    if not validate_non_negative(lambda0):
        raise ValueError(f"lambda0 必须 ≥ 0: {lambda0}")
    if not validate_positive(step):
        raise ValueError(f"step 必须大于0: {step}")
    if not validate_positive(ell_max):
        raise ValueError(f"ell_max 必须大于0: {ell_max}")

    n_full = int(math.floor(ell_max / step + 1e-9))
    grid = [k * step for k in range(n_full + 1)]
    if ell_max - grid[-1] > 1e-9 * step:
        grid.append(float(ell_max))
    elif n_full:
        grid[-1] = float(ell_max)

    values = [float(lambda0)]
    max_sub = 1
    for left, right in zip(grid, grid[1:]):
        value, n_sub = _advance(values[-1], s, right - left, tol)
        values.append(max(value, 0.0))
        max_sub = max(max_sub, n_sub)

    logger.debug(f"RG流积分完成: s={s}, lambda0={lambda0}, {len(grid)} 个采样点, 最大子步数 {max_sub}")
    return RGTrajectory(ell=np.array(grid), lam=np.array(values), s=s, method=FlowMethod.RK4)


def classify_phase(s: float, lambda0: float, s_star: float = S_STAR,
                   s_star_uncertainty: float = S_STAR_UNCERTAINTY) -> PhaseLabel:
    """
    退相干相分类

    s > 1 微扰超欧姆相；s = 1 欧姆受挫相；s* < s < 1 临界中间相；0 ≤ s ≤ s* 局域相。
    λ₀ = 0 视为无耦合，返回 SuperOhmicPerturbative 并标记 free_coupling。

    Args:
        s: 谱指数 (≥ 0)
        lambda0: 初始耦合 (≥ 0)
        s_star: 局域相边界
        s_star_uncertainty: 边界误差 (只随结果输出)

    Returns:
        PhaseLabel: 分类结果
    """
    if not validate_non_negative(s):
        raise ValueError(f"s 必须 ≥ 0: {s}")
    if not validate_non_negative(lambda0):
        raise ValueError(f"lambda0 必须 ≥ 0: {lambda0}")
    if not validate_in_range(s_star, 0.0, 1.0, include_low=False, include_high=False):
        raise ValueError(f"s_star 必须在 (0, 1) 内: {s_star}")

    common = {'s': float(s), 'lambda0': float(lambda0), 's_star': float(s_star),
              's_star_uncertainty': float(s_star_uncertainty)}

    if lambda0 == 0:
        label = PhaseName.SUPER_OHMIC_PERTURBATIVE
        return PhaseLabel(label=label, entropy_class=ENTROPY_CLASS[label], free_coupling=True, **common)

    warning = False
    if _is_ohmic(s):
        label = PhaseName.OHMIC_FRUSTRATED
    elif s > 1.0:
        label = PhaseName.SUPER_OHMIC_PERTURBATIVE
    elif s > s_star:
        label = PhaseName.CRITICAL_INTERMEDIATE
        warning = lambda0 > math.sqrt(1.0 - s)
    else:
        label = PhaseName.LOCALIZED

    return PhaseLabel(label=label, entropy_class=ENTROPY_CLASS[label], perturbative_warning=warning, **common)


def phase_diagram(s_values: Sequence[float], lambda0_values: Sequence[float],
                  s_star: float = S_STAR) -> List[Dict]:
    """
    (s, λ₀) 网格上的相图，行顺序为 s 外层、λ₀ 内层

    Args:
        s_values: 谱指数列表
        lambda0_values: 初始耦合列表
        s_star: 局域相边界

    Returns:
        List[Dict]: 行 (s, lambda0, label, entropy_class, perturbative_warning)
    """
    rows = []
    for s in s_values:
        for lambda0 in lambda0_values:
            phase = classify_phase(float(s), float(lambda0), s_star)
            rows.append({
                's': phase.s,
                'lambda0': phase.lambda0,
                'label': phase.label.value,
                'entropy_class': phase.entropy_class.value,
                'perturbative_warning': phase.perturbative_warning,
            })
    return rows
