#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Majorana链参数构造模块
构造均匀Kitaev链、短π结和长π结的键参数 (α_n, β_n)，并组装单粒子矩阵M

约定:
    格点编号 n = −N/2 … N/2−1，键 n 连接格点 n 与 n+1
    α_n = t_n + γ_n，β_n = t_n − γ_n
    体内跃迁振幅固定为 1，所有能量以此为单位
    完整哈密顿量为 (1/4)·v†[[0, iM], [−iM^t, 0]]v，v = (η, ν)
"""

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from utils.logger import get_logger
from utils.validators import validate_even_sites, validate_finite, validate_positive

logger = get_logger(__name__)

# 玻尔磁子 (自然单位制)，有效配对公式只用于比值和相位
BOHR_MAGNETON = 1.0


class JunctionKind(str, Enum):
    """链的结构类型"""
    UNIFORM_KITAEV = 'UniformKitaev'
    SHORT_JUNCTION = 'ShortJunction'
    LONG_JUNCTION = 'LongJunction'


@dataclass(frozen=True)
class WireParameters:
    """
    链参数

    bonds[k] 对应键 n = k − N/2
    """
    n_sites: int
    mu: float
    bonds: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        if not validate_even_sites(self.n_sites):
            raise ValueError(f"n_sites 必须为不小于4的偶数: {self.n_sites}")

        if not validate_finite(self.mu):
            raise ValueError(f"mu 必须为有限实数: {self.mu}")

        bonds = tuple((float(alpha), float(beta)) for alpha, beta in self.bonds)
        if len(bonds) != self.n_sites - 1:
            raise ValueError(f"bonds 长度应为 N−1={self.n_sites - 1}，实际为 {len(bonds)}")

        for alpha, beta in bonds:
            if not (math.isfinite(alpha) and math.isfinite(beta)):
                raise ValueError(f"bonds 含非有限值: ({alpha}, {beta})")

        object.__setattr__(self, 'mu', float(self.mu))
        object.__setattr__(self, 'bonds', bonds)

    @classmethod
    def from_hopping_pairing(cls, n_sites: int, mu: float,
                             hopping: Sequence[float],
                             pairing: Sequence[float]) -> 'WireParameters':
        """
        由 (t_n, γ_n) 组合出键参数

        Args:
            n_sites: 格点数
            mu: 化学势
            hopping: 每个键的跃迁 t_n
            pairing: 每个键的配对 γ_n

        Returns:
            WireParameters: 链参数
        """
        if len(hopping) != len(pairing):
            raise ValueError("hopping 与 pairing 长度不一致")

        bonds = tuple((t + g, t - g) for t, g in zip(hopping, pairing))
        return cls(n_sites=n_sites, mu=mu, bonds=bonds)

    def site_indices(self) -> np.ndarray:
        """格点编号 −N/2 … N/2−1"""
        half = self.n_sites // 2
        return np.arange(-half, half)

    def bond_indices(self) -> np.ndarray:
        """键编号 −N/2 … N/2−2"""
        half = self.n_sites // 2
        return np.arange(-half, half - 1)

    def bond(self, n: int) -> Tuple[float, float]:
        """
        按物理编号取键参数

        Args:
            n: 键编号

        Returns:
            Tuple[float, float]: (α_n, β_n)
        """
        k = n + self.n_sites // 2
        if k < 0 or k >= len(self.bonds):
            raise IndexError(f"键编号越界: {n}")
        return self.bonds[k]

    def alphas(self) -> np.ndarray:
        return np.array([alpha for alpha, _ in self.bonds])

    def betas(self) -> np.ndarray:
        return np.array([beta for _, beta in self.bonds])

    def hopping(self) -> np.ndarray:
        """t_n = (α_n + β_n)/2"""
        return (self.alphas() + self.betas()) / 2.0

    def pairing(self) -> np.ndarray:
        """γ_n = (α_n − β_n)/2"""
        return (self.alphas() - self.betas()) / 2.0


@dataclass(frozen=True)
class JunctionProfile:
    """π结参数剖面"""
    kind: JunctionKind
    gamma: float = 1.0
    tunneling: float = 0.5
    upsilon: float = 0.2
    normal_length: int = 0
    normal_hopping: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'kind', JunctionKind(self.kind))

        for name in ('gamma', 'tunneling', 'upsilon', 'normal_hopping'):
            if not validate_finite(getattr(self, name)):
                raise ValueError(f"{name} 必须为有限实数: {getattr(self, name)}")

        if self.kind == JunctionKind.SHORT_JUNCTION:
            if not self.tunneling < 1.0:
                raise ValueError(f"短结要求 tunneling < 1: {self.tunneling}")
            if not self.upsilon < self.gamma:
                raise ValueError(f"短结要求 upsilon < gamma: upsilon={self.upsilon}, gamma={self.gamma}")

        if self.kind == JunctionKind.LONG_JUNCTION:
            if isinstance(self.normal_length, bool) or not isinstance(self.normal_length, int) \
                    or self.normal_length < 1:
                raise ValueError(f"长结要求 normal_length ≥ 1: {self.normal_length}")
            if self.gamma == 0:
                raise ValueError("长结要求 gamma ≠ 0")


@dataclass(frozen=True, eq=False)
class SingleParticleMatrix:
    """
    单粒子矩阵M

    对角元 μ，下次对角 M[i+1, i] = α_n，上次对角 M[i, i+1] = β_n
    """
    matrix: np.ndarray
    params: WireParameters

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        n = self.params.n_sites
        if matrix.shape != (n, n):
            raise ValueError(f"矩阵形状应为 ({n}, {n})，实际为 {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @property
    def n_sites(self) -> int:
        return self.params.n_sites

    def bdg_matrix(self) -> np.ndarray:
        """
        完整的 2N×2N 厄米矩阵 (1/2)[[0, iM], [−iM^t, 0]]，本征值为 ±Λ_k

        Returns:
            np.ndarray: 复矩阵
        """
        n = self.n_sites
        block = np.zeros((2 * n, 2 * n), dtype=complex)
        block[:n, n:] = 1j * self.matrix
        block[n:, :n] = -1j * self.matrix.T
        return block / 2.0


@dataclass(frozen=True)
class PairingParameters:
    """有效p波配对的输入参数"""
    alpha_so: float
    delta: complex
    g_factor: float
    b_field: float
    e_hat_arg: float = 0.0

    def __post_init__(self):
        if not validate_positive(self.b_field):
            raise ValueError(f"b_field 必须大于0: {self.b_field}")
        if not validate_finite(self.g_factor) or self.g_factor == 0:
            raise ValueError(f"g_factor 不能为0: {self.g_factor}")


def build_uniform_kitaev(N: int, t: float, gamma: float, mu: float) -> WireParameters:
    """
    构造均匀Kitaev链

    Args:
        N: 格点数 (偶数, ≥ 4)
        t: 跃迁振幅
        gamma: 配对
        mu: 化学势

    Returns:
        WireParameters: 所有键为 (t+γ, t−γ)
    """
    if not validate_even_sites(N):
        raise ValueError(f"N 必须为不小于4的偶数: {N}")

    bonds = tuple((t + gamma, t - gamma) for _ in range(N - 1))
    return WireParameters(n_sites=N, mu=mu, bonds=bonds)


def _short_junction_bond(n: int, profile: JunctionProfile) -> Tuple[float, float]:
    gamma, t, upsilon = profile.gamma, profile.tunneling, profile.upsilon

    if n <= -2:
        return 1.0 - gamma, 1.0 + gamma
    if n == -1:
        return t - upsilon, t + upsilon
    if n == 0:
        return t + upsilon, t - upsilon
    return 1.0 + gamma, 1.0 - gamma


def _long_junction_bonds(N: int, profile: JunctionProfile) -> List[Tuple[float, float]]:
    length = profile.normal_length
    first_normal = -((length + 1) // 2)
    last_normal = length // 2 - 1

    half = N // 2
    left_count = first_normal + half
    right_count = (half - 2) - last_normal
    if left_count < 1 or right_count < 1:
        raise ValueError(f"N={N} 容纳不下 normal_length={length} 的正常区和两段超导段")

    gamma = profile.gamma
    t_normal = profile.normal_hopping
    bonds = []
    for n in range(-half, half - 1):
        if n < first_normal:
            bonds.append((1.0 - gamma, 1.0 + gamma))
        elif n <= last_normal:
            bonds.append((t_normal, t_normal))
        else:
            bonds.append((1.0 + gamma, 1.0 - gamma))
    return bonds


def build_pi_junction(N: int, profile: JunctionProfile, mu: float) -> WireParameters:
    """
    构造π结链

    短结按四段表格: n ≤ −2 为 (1−γ, 1+γ)，n = −1 为 (t−υ, t+υ)，
    n = 0 为 (t+υ, t−υ)，n ≥ 1 为 (1+γ, 1−γ)。
    长结为两段配对符号相反的Kitaev链，中间夹 normal_length 个 γ = 0 的键。

    Args:
        N: 格点数
        profile: 结剖面
        mu: 化学势

    Returns:
        WireParameters: 链参数
    """
    if not validate_even_sites(N):
        raise ValueError(f"N 必须为不小于4的偶数: {N}")

    if profile.kind == JunctionKind.UNIFORM_KITAEV:
        return build_uniform_kitaev(N, 1.0, profile.gamma, mu)

    if profile.kind == JunctionKind.SHORT_JUNCTION:
        bonds = [_short_junction_bond(n, profile) for n in range(-(N // 2), N // 2 - 1)]
    else:
        bonds = _long_junction_bonds(N, profile)

    params = WireParameters(n_sites=N, mu=mu, bonds=tuple(bonds))
    logger.debug(f"构造π结: kind={profile.kind.value}, N={N}, 配对变号次数={pairing_sign_changes(params)}")
    return params


def pairing_sign_changes(params: WireParameters) -> int:
    """
    统计配对 γ_n 沿链的变号次数 (忽略 γ_n = 0 的键)

    Args:
        params: 链参数

    Returns:
        int: 变号次数
    """
    signs = [np.sign(g) for g in params.pairing() if g != 0]
    return int(sum(1 for a, b in zip(signs, signs[1:]) if a != b))


def assemble_m(params: WireParameters) -> SingleParticleMatrix:
    """
    组装三对角矩阵M

    Args:
        params: 链参数

    Returns:
        SingleParticleMatrix: 单粒子矩阵
    """
    n = params.n_sites
    matrix = np.zeros((n, n))
    matrix[np.arange(n), np.arange(n)] = params.mu
    rows = np.arange(n - 1)
    matrix[rows + 1, rows] = params.alphas()
    matrix[rows, rows + 1] = params.betas()
    return SingleParticleMatrix(matrix=matrix, params=params)


def effective_pairing(p: PairingParameters, bohr_magneton: float = BOHR_MAGNETON) -> complex:
    """
    有效p波配对 αΔ·e^{i·arg(ê)} / (g μ_B |B₀|)

    Args:
        p: 配对参数
        bohr_magneton: 玻尔磁子取值

    Returns:
        complex: 有效配对
    """
    if not validate_positive(bohr_magneton):
        raise ValueError(f"bohr_magneton 必须大于0: {bohr_magneton}")

    phase = cmath.exp(1j * p.e_hat_arg)
    return p.alpha_so * complex(p.delta) * phase / (p.g_factor * bohr_magneton * p.b_field)


def bond_table(params: WireParameters) -> Iterable[Tuple[int, float, float]]:
    """按物理编号逐键输出 (n, α_n, β_n)"""
    for n, (alpha, beta) in zip(params.bond_indices(), params.bonds):
        yield int(n), alpha, beta
