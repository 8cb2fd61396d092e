#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
虚时Ising映射模块
把退相干模型和双热库受挫模型离散成一维长程Ising链，计算耦合核、
小尺寸精确枚举配分函数，并给出铁磁/顺磁倾向判据

符号约定: 权重为 exp[+Σ_{i<j} J(i,j)σ_iσ_j]，J ≥ 0 时自旋倾向平行 (铁磁)
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np
from scipy import linalg, special

from core.bath_models import BathSpec
from utils.logger import get_logger
from utils.validators import validate_non_negative, validate_positive

logger = get_logger(__name__)

MAX_ENUMERATION_SLICES = 24
BLOCK_BITS = 16
OHMIC_TOL = 1e-12
MARGINAL_TOL = 1e-12


class KernelVariant(str, Enum):
    """耦合核类型"""
    PURE_DEPHASING = 'PureDephasing'
    FRUSTRATED_OHMIC = 'FrustratedOhmic'
    FRUSTRATED_SUB_OHMIC = 'FrustratedSubOhmic'


class Tendency(str, Enum):
    """长程Ising链的有序倾向"""
    FERROMAGNETIC = 'FerromagneticTendency'
    PARAMAGNETIC = 'ParamagneticTendency'
    MARGINAL = 'Marginal'


def _is_ohmic(s: float) -> bool:
    return abs(s - 1.0) <= OHMIC_TOL


@dataclass(frozen=True)
class KernelSpec:
    """耦合核: 类型 + 热库参数 (受挫核内部复用 λ)"""
    variant: KernelVariant
    spec: BathSpec

    def __post_init__(self):
        variant = KernelVariant(self.variant)
        object.__setattr__(self, 'variant', variant)

        if variant == KernelVariant.FRUSTRATED_SUB_OHMIC and not 0 < self.spec.s < 1:
            raise ValueError(f"FrustratedSubOhmic 要求 0 < s < 1: {self.spec.s}")
        if variant == KernelVariant.FRUSTRATED_OHMIC and not _is_ohmic(self.spec.s):
            raise ValueError(f"FrustratedOhmic 要求 s = 1: {self.spec.s}")

    @property
    def lam(self) -> float:
        return self.spec.lam


@dataclass(frozen=True, eq=False)
class IsingInstance:
    """离散化后的Ising链，J 对称、对角为零、只依赖 |i−j|"""
    n_slices: int
    delta_tau: float
    couplings: np.ndarray
    lam: float

    def __post_init__(self):
        couplings = np.array(self.couplings, dtype=float)
        n = self.n_slices
        if couplings.shape != (n, n):
            raise ValueError(f"couplings 形状应为 ({n}, {n})，实际为 {couplings.shape}")
        if not np.allclose(np.diag(couplings), 0.0, atol=0.0):
            raise ValueError("couplings 对角元必须为0")
        if not np.allclose(couplings, couplings.T, rtol=0.0, atol=1e-14):
            raise ValueError("couplings 必须对称")
        if not np.allclose(couplings, linalg.toeplitz(couplings[0]), rtol=1e-12, atol=1e-14):
            raise ValueError("couplings 必须只依赖 |i−j|")

        couplings.setflags(write=False)
        object.__setattr__(self, 'couplings', couplings)


@dataclass(frozen=True, eq=False)
class PartitionResult:
    """
    精确枚举结果

    Attributes:
        z_ratio: Z / 2^L
        log_z_ratio: log(Z / 2^L)
        correlations: ⟨σ_0σ_r⟩，r = 0 … L−1
        magnetization: ⟨σ_r⟩，r = 0 … L−1
    """
    z_ratio: float
    log_z_ratio: float
    correlations: np.ndarray
    magnetization: np.ndarray


def kernel_g(spec: BathSpec, dtau: float) -> float:
    """
    传播子 G(Δτ) = Γ(s+1)/2^{s+1}·Ω_c²·(1 + Ω_cΔτ/2)^{−(s+1)}

    Args:
        spec: 热库参数
        dtau: 虚时间隔 (≥ 0)

    Returns:
        float: G(Δτ)
    """
    if not validate_non_negative(dtau):
        raise ValueError(f"dtau 必须 ≥ 0: {dtau}")

    order = spec.s + 1.0
    omega = spec.omega_uc
    return float(special.gamma(order) / 2.0 ** order * omega ** 2 * (1.0 + omega * dtau / 2.0) ** (-order))


def kernel_g_asymptotic(spec: BathSpec, dtau: float) -> float:
    """Ω_cΔτ ≫ 1 的渐近形式 Γ(s+1)·Ω_c²·(Ω_cΔτ)^{−(s+1)}"""
    if not validate_positive(dtau):
        raise ValueError(f"dtau 必须大于0: {dtau}")

    order = spec.s + 1.0
    omega = spec.omega_uc
    return float(special.gamma(order) * omega ** 2 * (omega * dtau) ** (-order))


def frustrated_kernel(lam: float, s: float, dtau: float) -> float:
    """
    受挫模型畴壁间相互作用

    s = 1: λ²/Δτ^{2(1+λ²)}
    s < 1: λ²·e^{−λ²Δτ^{1−s}}/Δτ²

    Args:
        lam: 耦合 λ
        s: 谱指数 (≤ 1)
        dtau: 虚时间隔 (> 0)

    Returns:
        float: 核函数值
    """
    if not validate_positive(dtau):
        raise ValueError(f"dtau 必须大于0: {dtau}")
    if not validate_non_negative(lam):
        raise ValueError(f"lam 必须 ≥ 0: {lam}")
    if s > 1.0 + OHMIC_TOL:
        raise ValueError(f"s > 1 时没有受挫核: {s}")
    if not validate_positive(s):
        raise ValueError(f"s 必须大于0: {s}")

    lam2 = lam * lam
    if _is_ohmic(s):
        return lam2 / dtau ** (2.0 * (1.0 + lam2))
    return lam2 * math.exp(-lam2 * dtau ** (1.0 - s)) / dtau ** 2


def kernel_value(kernel: KernelSpec, dtau: float) -> float:
    """
    按核类型求值；纯退相干返回 G(Δτ) (不含 λ²)，受挫核已含 λ²

    Args:
        kernel: 核参数
        dtau: 虚时间隔

    Returns:
        float: 核函数值
    """
    if kernel.variant == KernelVariant.PURE_DEPHASING:
        return kernel_g(kernel.spec, dtau)
    return frustrated_kernel(kernel.lam, kernel.spec.s, dtau)


def decay_exponent(kernel: KernelSpec) -> float:
    """
    核函数的渐近衰减幂次；指数衰减返回 inf

    Args:
        kernel: 核参数

    Returns:
        float: 幂次
    """
    if kernel.variant == KernelVariant.PURE_DEPHASING:
        return kernel.spec.s + 1.0
    if kernel.variant == KernelVariant.FRUSTRATED_OHMIC:
        return 2.0 * (1.0 + kernel.lam ** 2)
    return math.inf


def ferro_para_diagnostic(kernel: KernelSpec) -> Tendency:
    """
    按衰减幂次与 2 比较: 慢于 1/Δτ² 为铁磁倾向，快于为顺磁倾向

    Args:
        kernel: 核参数

    Returns:
        Tendency: 判据结果
    """
    exponent = decay_exponent(kernel)
    if abs(exponent - 2.0) <= MARGINAL_TOL:
        return Tendency.MARGINAL
    if exponent < 2.0:
        return Tendency.FERROMAGNETIC
    return Tendency.PARAMAGNETIC


def build_instance(kernel: KernelSpec, L: int, delta_tau: float,
                   for_enumeration: bool = True) -> IsingInstance:
    """
    中点法离散虚时双重积分，得到 J(i,j)

    纯退相干: J = λ²·G(|i−j|Δτ)·Δτ²；受挫核: J = kernel(|i−j|Δτ)·Δτ²

    Args:
        kernel: 核参数
        L: 时间片数
        delta_tau: 时间片宽度
        for_enumeration: 是否用于精确枚举 (限制 L ≤ 24)

    Returns:
        IsingInstance: Ising链
    """
    if isinstance(L, bool) or not isinstance(L, int) or L < 2:
        raise ValueError(f"L 必须为不小于2的整数: {L}")
    if for_enumeration and L > MAX_ENUMERATION_SLICES:
        raise ValueError(f"精确枚举要求 L ≤ {MAX_ENUMERATION_SLICES}: {L}")
    if not validate_positive(delta_tau):
        raise ValueError(f"delta_tau 必须大于0: {delta_tau}")

    weight = kernel.lam ** 2 if kernel.variant == KernelVariant.PURE_DEPHASING else 1.0
    row = np.zeros(L)
    for distance in range(1, L):
        row[distance] = weight * kernel_value(kernel, distance * delta_tau) * delta_tau ** 2

    couplings = linalg.toeplitz(row)
    return IsingInstance(n_slices=L, delta_tau=float(delta_tau), couplings=couplings, lam=kernel.lam)


def _block_partials(couplings: np.ndarray, low_spins: np.ndarray,
                    high: int, high_bits: int) -> Tuple[float, float, np.ndarray, np.ndarray]:
    n = couplings.shape[0]
    rows = low_spins.shape[0]
    high_spins = 1.0 - 2.0 * ((high >> np.arange(high_bits)) & 1)

    half = np.empty((rows, n))
    half[:, :low_spins.shape[1]] = low_spins
    half[:, low_spins.shape[1]:n - 1] = high_spins
    half[:, n - 1] = 1.0
    # 镜像半区 σ → −σ
    spins = np.concatenate([half, -half])

    # Σ_{i<j} Jσσ = σ^T J σ / 2
    energies = 0.5 * np.einsum('ki,ij,kj->k', spins, couplings, spins)
    peak = float(energies.max())
    weights = np.exp(energies - peak)
    total = float(weights.sum())
    correlated = (weights[:, None] * spins[:, :1] * spins).sum(axis=0)
    magnetized = (weights[:, None] * spins).sum(axis=0)
    return peak, total, correlated, magnetized


def enumerate_partition(instance: IsingInstance, max_workers: int = 1) -> PartitionResult:
    """
    精确枚举配分函数与两点关联

    固定最后一个自旋为 +1 枚举其余 2^{L−1} 个构型，每块同时对镜像构型 σ → −σ 求值，
    按 2^16 一块向量化求和，块间以 log-sum-exp 按编号顺序累积。磁化由构型直接求和得到。

    Args:
        instance: Ising链
        max_workers: 并行块计算的线程数

    Returns:
        PartitionResult: 归一化配分函数、关联和磁化
    """
    n = instance.n_slices
    if n > MAX_ENUMERATION_SLICES:
        raise ValueError(f"精确枚举要求 L ≤ {MAX_ENUMERATION_SLICES}: {n}")

    free = n - 1
    low_bits = min(free, BLOCK_BITS)
    high_bits = free - low_bits
    codes = np.arange(2 ** low_bits)
    low_spins = 1.0 - 2.0 * ((codes[:, None] >> np.arange(low_bits)) & 1)

    couplings = np.asarray(instance.couplings)
    blocks = range(2 ** high_bits)
    if max_workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            partials = list(executor.map(
                lambda high: _block_partials(couplings, low_spins, high, high_bits), blocks))
    else:
        partials = [_block_partials(couplings, low_spins, high, high_bits) for high in blocks]

    running_max = -math.inf
    running_total = 0.0
    running_corr = np.zeros(n)
    running_mag = np.zeros(n)
    for peak, total, correlated, magnetized in partials:
        if peak > running_max:
            scale = math.exp(running_max - peak) if running_total else 0.0
            running_total = running_total * scale + total
            running_corr = running_corr * scale + correlated
            running_mag = running_mag * scale + magnetized
            running_max = peak
        else:
            scale = math.exp(peak - running_max)
            running_total += total * scale
            running_corr += correlated * scale
            running_mag += magnetized * scale

    log_z_ratio = running_max + math.log(running_total) - n * math.log(2.0)
    try:
        z_ratio = math.exp(log_z_ratio)
    except OverflowError:
        z_ratio = math.inf

    correlations = running_corr / running_total
    logger.debug(f"精确枚举完成: L={n}, {len(partials)} 个块, log(Z/2^L)={log_z_ratio:.6g}")
    return PartitionResult(z_ratio=z_ratio, log_z_ratio=log_z_ratio,
                           correlations=correlations, magnetization=running_mag / running_total)


def correlation_rows(result: PartitionResult) -> List[dict]:
    """关联表的行 (r, correlation, magnetization)"""
    return [{'r': r, 'correlation': float(c), 'magnetization': float(m)}
            for r, (c, m) in enumerate(zip(result.correlations, result.magnetization))]
