#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
热库模型模块
谱指数模型 S(ω)、J(ω)，耦合函数 F(ω) 与极化子核 G(ω)，双热库受挫模型参数，
以及随机电报噪声 (RTN) 涨落子系综和功率谱估计

截断约定: Ω_c 是所有指数因子中唯一的紫外截断，ω_c 只作为把求和换成积分的模式密度归一化
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import signal, special

from utils.logger import StructuredLogger
from utils.validators import (
    validate_finite,
    validate_non_negative,
    validate_positive,
    validate_seed,
)

logger = StructuredLogger(__name__)

# rate·dt 超过该值时认为时间步长分辨不了最快的涨落子
RTN_RESOLUTION_LIMIT = 0.1


class BathRegime(str, Enum):
    """谱指数区间"""
    ONE_OVER_F = 'OneOverF'
    SUB_OHMIC = 'SubOhmic'
    OHMIC = 'Ohmic'
    SUPER_OHMIC = 'SuperOhmic'


class RateDistribution(str, Enum):
    """涨落子速率分布"""
    LOG_UNIFORM = 'LogUniform'
    EXPLICIT = 'Explicit'


@dataclass(frozen=True)
class BathSpec:
    """
    热库参数

    Attributes:
        s: 谱指数 (≥ 0)
        lam: 无量纲耦合 λ (≥ 0)
        omega_c: 红外截断 ω_c
        omega_uc: 紫外截断 Ω_c
    """
    s: float
    lam: float
    omega_c: float = 1.0
    omega_uc: float = 1.0

    def __post_init__(self):
        if not validate_non_negative(self.s):
            raise ValueError(f"s 必须为非负有限值: {self.s}")
        if not validate_non_negative(self.lam):
            raise ValueError(f"lam 必须为非负有限值: {self.lam}")
        if not validate_positive(self.omega_c):
            raise ValueError(f"omega_c 必须大于0: {self.omega_c}")
        if not validate_positive(self.omega_uc):
            raise ValueError(f"omega_uc 必须大于0: {self.omega_uc}")
        if self.omega_c > self.omega_uc:
            raise ValueError(f"要求 omega_c ≤ omega_uc: {self.omega_c} > {self.omega_uc}")

    @property
    def regime(self) -> BathRegime:
        if self.s == 0:
            return BathRegime.ONE_OVER_F
        if self.s < 1:
            return BathRegime.SUB_OHMIC
        if self.s == 1:
            return BathRegime.OHMIC
        return BathRegime.SUPER_OHMIC


@dataclass(frozen=True)
class FrustratedPair:
    """σ^z 与 σ^x 两个热库"""
    bath_z: BathSpec
    bath_x: BathSpec
    symmetric: bool = False

    def __post_init__(self):
        if self.symmetric and self.bath_z != self.bath_x:
            raise ValueError("symmetric=True 要求两个热库逐字段相同")

    @classmethod
    def symmetric_from(cls, spec: BathSpec) -> 'FrustratedPair':
        return cls(bath_z=spec, bath_x=spec, symmetric=True)

    def swapped(self) -> 'FrustratedPair':
        """交换两个热库"""
        return FrustratedPair(bath_z=self.bath_x, bath_x=self.bath_z, symmetric=self.symmetric)


@dataclass(frozen=True)
class RTNEnsemble:
    """
    涨落子系综

    Attributes:
        fluctuators: (翻转速率, 幅度) 序列
        rate_distribution: 速率分布
        seed: 随机种子
        rate_min/rate_max: LogUniform 分布的速率范围
    """
    fluctuators: Tuple[Tuple[float, float], ...]
    rate_distribution: RateDistribution = RateDistribution.EXPLICIT
    seed: int = 0
    rate_min: Optional[float] = None
    rate_max: Optional[float] = None

    def __post_init__(self):
        fluctuators = tuple((float(rate), float(amplitude)) for rate, amplitude in self.fluctuators)
        if not fluctuators:
            raise ValueError("fluctuators 不能为空")
        for rate, amplitude in fluctuators:
            if not validate_positive(rate):
                raise ValueError(f"翻转速率必须大于0: {rate}")
            if not validate_finite(amplitude):
                raise ValueError(f"幅度必须为有限值: {amplitude}")
        if not validate_seed(self.seed):
            raise ValueError(f"seed 必须为非负整数: {self.seed}")

        distribution = RateDistribution(self.rate_distribution)
        if distribution == RateDistribution.LOG_UNIFORM:
            if not (validate_positive(self.rate_min) and validate_positive(self.rate_max)
                    and self.rate_min < self.rate_max):
                raise ValueError(f"LogUniform 要求 0 < rate_min < rate_max: {self.rate_min}, {self.rate_max}")

        object.__setattr__(self, 'fluctuators', fluctuators)
        object.__setattr__(self, 'rate_distribution', distribution)

    @classmethod
    def log_uniform(cls, n: int, rate_min: float, rate_max: float,
                    amplitude: float = 1.0, seed: int = 0) -> 'RTNEnsemble':
        """
        速率在 [rate_min, rate_max] 上对数均匀分布的系综

        每个涨落子的幅度取 amplitude/√n，使系综方差与涨落子数目无关

        Args:
            n: 涨落子数目
            rate_min: 最小速率
            rate_max: 最大速率
            amplitude: 总幅度
            seed: 随机种子

        Returns:
            RTNEnsemble: 系综
        """
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ValueError(f"涨落子数目必须为正整数: {n}")
        if not (validate_positive(rate_min) and validate_positive(rate_max) and rate_min < rate_max):
            raise ValueError(f"要求 0 < rate_min < rate_max: {rate_min}, {rate_max}")

        rng = np.random.default_rng(seed)
        rates = np.exp(rng.uniform(math.log(rate_min), math.log(rate_max), size=n))
        each = amplitude / math.sqrt(n)
        return cls(fluctuators=tuple((float(r), each) for r in rates),
                   rate_distribution=RateDistribution.LOG_UNIFORM,
                   seed=seed, rate_min=rate_min, rate_max=rate_max)

    @classmethod
    def explicit(cls, rates: Sequence[float], amplitudes: Sequence[float], seed: int = 0) -> 'RTNEnsemble':
        if len(rates) != len(amplitudes):
            raise ValueError("rates 与 amplitudes 长度不一致")
        return cls(fluctuators=tuple(zip(rates, amplitudes)), seed=seed)

    @property
    def rates(self) -> np.ndarray:
        return np.array([rate for rate, _ in self.fluctuators])

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([amplitude for _, amplitude in self.fluctuators])


def _check_frequency(omega: float, allow_zero: bool) -> None:
    if not validate_finite(omega):
        raise ValueError(f"omega 必须为有限值: {omega}")
    if omega < 0 or (omega == 0 and not allow_zero):
        bound = "≥ 0" if allow_zero else "> 0"
        raise ValueError(f"omega 必须 {bound}: {omega}")


def coupling_f(spec: BathSpec, omega: float) -> float:
    """
    F(ω) = √ω_c · Ω_c^{(1−s)/2} · ω^{s/2} · e^{−ω/2Ω_c}

    Args:
        spec: 热库参数
        omega: 频率 (≥ 0)

    Returns:
        float: F(ω)
    """
    _check_frequency(omega, allow_zero=True)
    return (math.sqrt(spec.omega_c) * spec.omega_uc ** ((1.0 - spec.s) / 2.0)
            * omega ** (spec.s / 2.0) * math.exp(-omega / (2.0 * spec.omega_uc)))


def polaron_g(spec: BathSpec, omega: float) -> float:
    """G(ω) = F(ω)/ω，ω > 0"""
    _check_frequency(omega, allow_zero=False)
    return coupling_f(spec, omega) / omega


def spectral_density(spec: BathSpec, omega: float) -> float:
    """J(ω) = F(ω)² ∝ ω^s"""
    return coupling_f(spec, omega) ** 2


def noise_spectrum(spec: BathSpec, omega: float) -> float:
    """
    S(ω) = ω^{s−1}·e^{−ω/Ω_c}，前置因子取 1 (只有斜率和比值有意义)

    Args:
        spec: 热库参数
        omega: 频率 (> 0)

    Returns:
        float: S(ω)
    """
    _check_frequency(omega, allow_zero=False)
    return omega ** (spec.s - 1.0) * math.exp(-omega / spec.omega_uc)


def polaron_energy_shift(spec: BathSpec) -> float:
    """
    极化子旋转后热库哈密顿量产生的常数能移 −(λ²/4)·Γ(s)·Ω_c

    s = 0 时积分发散，返回 −inf
    """
    if spec.s == 0:
        return -math.inf if spec.lam > 0 else 0.0
    return -(spec.lam ** 2 / 4.0) * special.gamma(spec.s) * spec.omega_uc


def _telegraph(rate: float, amplitude: float, n_samples: int, dt: float,
               rng: np.random.Generator) -> np.ndarray:
    t_max = n_samples * dt
    state0 = 1.0 if rng.random() < 0.5 else -1.0

    # 按块生成指数等待时间直到覆盖整段时间
    expected = int(rate * t_max * 1.2) + 16
    waits = rng.exponential(1.0 / rate, size=expected)
    switch_times = np.cumsum(waits)
    while switch_times[-1] <= t_max:
        more = rng.exponential(1.0 / rate, size=expected)
        switch_times = np.concatenate([switch_times, switch_times[-1] + np.cumsum(more)])

    grid = np.arange(n_samples) * dt
    flips = np.searchsorted(switch_times, grid, side='right')
    return amplitude * state0 * (1.0 - 2.0 * (flips & 1))


def simulate_rtn(ensemble: RTNEnsemble, t_max: float, dt: float) -> np.ndarray:
    """
    模拟涨落子系综的叠加轨迹

    每个涨落子以 ±amplitude 取值，等待时间服从指数分布，初态等概率取 ±1。
    第 i 个涨落子使用 default_rng([seed, i])，按编号顺序求和，结果只由种子决定。

    Args:
        ensemble: 涨落子系综
        t_max: 总时长
        dt: 采样间隔

    Returns:
        np.ndarray: 采样值，时间网格为 k·dt，k = 0 … round(t_max/dt)−1
    """
    if not validate_positive(dt):
        raise ValueError(f"dt 必须大于0: {dt}")
    if not validate_finite(t_max) or t_max < dt:
        raise ValueError(f"要求 t_max ≥ dt: t_max={t_max}, dt={dt}")

    n_samples = int(round(t_max / dt))
    fastest = float(ensemble.rates.max())
    if fastest * dt > RTN_RESOLUTION_LIMIT:
        logger.warning("时间步长不足以分辨最快涨落子", rate_dt=fastest * dt, limit=RTN_RESOLUTION_LIMIT)

    total = np.zeros(n_samples)
    for index, (rate, amplitude) in enumerate(ensemble.fluctuators):
        rng = np.random.default_rng([ensemble.seed, index])
        total += _telegraph(rate, amplitude, n_samples, dt, rng)

    logger.debug("RTN模拟完成", fluctuators=len(ensemble.fluctuators), samples=n_samples)
    return total


def psd_estimate(samples: Sequence[float], dt: float, averaging: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """
    分段平均周期图 (单边，角频率)

    先扣除全局均值，矩形窗、不重叠、不逐段去趋势，
    使 Σ power·Δω 恰好等于样本方差。

    Args:
        samples: 采样序列
        dt: 采样间隔
        averaging: 分段数

    Returns:
        Tuple[np.ndarray, np.ndarray]: (omega, power)
    """
    data = np.asarray(samples, dtype=float)
    if data.size == 0:
        raise ValueError("采样序列为空")
    if isinstance(averaging, bool) or not isinstance(averaging, (int, np.integer)) or averaging < 1:
        raise ValueError(f"分段数必须为正整数: {averaging}")
    if data.size % averaging != 0:
        raise ValueError(f"采样长度 {data.size} 不能被分段数 {averaging} 整除")
    if not validate_positive(dt):
        raise ValueError(f"dt 必须大于0: {dt}")

    segment = data.size // averaging
    freqs, density = signal.welch(data - data.mean(), fs=1.0 / dt, window='boxcar',
                                  nperseg=segment, noverlap=0, detrend=False,
                                  return_onesided=True, scaling='density', average='mean')
    return 2.0 * np.pi * freqs, density / (2.0 * np.pi)


def telegraph_psd(rate: float, amplitude: float, omega) -> np.ndarray:
    """
    单个涨落子的单边洛伦兹谱 (a²/π)·4γ/(ω² + 4γ²)

    Args:
        rate: 翻转速率 γ
        amplitude: 幅度 a
        omega: 角频率

    Returns:
        np.ndarray: 功率谱密度
    """
    omega = np.asarray(omega, dtype=float)
    return (amplitude ** 2 / np.pi) * 4.0 * rate / (omega ** 2 + 4.0 * rate ** 2)


def ensemble_psd(ensemble: RTNEnsemble, omega) -> np.ndarray:
    """系综解析谱: 各涨落子洛伦兹谱之和"""
    omega = np.asarray(omega, dtype=float)
    total = np.zeros_like(omega)
    for rate, amplitude in ensemble.fluctuators:
        total += telegraph_psd(rate, amplitude, omega)
    return total


def psd_slope(omega, power, low: float, high: float, bins: Optional[int] = None) -> float:
    """
    功率谱在 [low, high] 频带内的对数斜率

    Args:
        omega: 角频率
        power: 功率谱密度
        low: 频带下限
        high: 频带上限
        bins: 给定时先在对数等分的频段内取平均再拟合，各数量级权重相同

    Returns:
        float: log(power) 对 log(omega) 的拟合斜率
    """
    omega = np.asarray(omega, dtype=float)
    power = np.asarray(power, dtype=float)
    band = (omega >= low) & (omega <= high) & (power > 0)
    if band.sum() < 2:
        raise ValueError(f"频带 [{low}, {high}] 内的有效点不足")

    x, y = np.log(omega[band]), power[band]
    if bins:
        edges = np.linspace(math.log(low), math.log(high), bins + 1)
        which = np.clip(np.digitize(x, edges) - 1, 0, bins - 1)
        filled = [k for k in range(bins) if np.any(which == k)]
        if len(filled) < 2:
            raise ValueError(f"频带 [{low}, {high}] 内的非空频段不足")
        x = np.array([x[which == k].mean() for k in filled])
        y = np.array([y[which == k].mean() for k in filled])

    return float(np.polyfit(x, np.log(y), 1)[0])
