#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
单粒子模式求解模块
提供MM^t谱分解、零模递推、结处Majorana解析形式、边缘劈裂扫描以及色散关系
"""

import concurrent.futures
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from core.wire_builder import (
    JunctionKind,
    JunctionProfile,
    SingleParticleMatrix,
    WireParameters,
    assemble_m,
    build_pi_junction,
)
from utils.logger import StructuredLogger
from utils.validators import validate_even_sites, validate_positive

logger = StructuredLogger(__name__)

# 零模容差 (跃迁振幅单位)
DEFAULT_ZERO_TOL = 1e-10

# 宇称/定位分类容差
SYMMETRY_TOL = 1e-6

# 低于该值的劈裂不参与指数拟合
SPLITTING_FIT_FLOOR = 1e-14

_SVD_DRIVERS = ('gesdd', 'gesvd')


class Sector(str, Enum):
    """Majorana分量所属的子空间"""
    ETA = 'EtaSector'
    NU = 'NuSector'


class Symmetry(str, Enum):
    """零模的对称性标签"""
    SYMMETRIC = 'Symmetric'
    ANTISYMMETRIC = 'Antisymmetric'
    EDGE_LEFT = 'EdgeLeft'
    EDGE_RIGHT = 'EdgeRight'
    UNCLASSIFIED = 'Unclassified'


class SolverConvergenceError(RuntimeError):
    """本征求解不收敛"""

    def __init__(self, message: str, diagnostics: Dict):
        super().__init__(f"{message} | diagnostics={diagnostics}")
        self.diagnostics = diagnostics


@dataclass(frozen=True, eq=False)
class ModeSet:
    """
    单粒子解: Λ_k 升序排列，phi/xi 的第k列为对应的 φ_k、ξ_k
    """
    lambdas: np.ndarray
    phi: np.ndarray
    xi: np.ndarray
    matrix: SingleParticleMatrix
    method: str = 'svd'

    @property
    def n_levels(self) -> int:
        return len(self.lambdas)

    @property
    def levels(self) -> List[Tuple[float, np.ndarray, np.ndarray]]:
        """(Λ_k, φ_k, ξ_k)，按 Λ 升序"""
        return [(float(self.lambdas[k]), self.phi[:, k], self.xi[:, k]) for k in range(self.n_levels)]

    def bdg_energies(self) -> np.ndarray:
        """完整BdG谱 {±Λ_k}，共2N个值"""
        return np.sort(np.concatenate([-self.lambdas, self.lambdas]))

    def zero_count(self, tol: float = DEFAULT_ZERO_TOL) -> int:
        """BdG谱中 |E| < tol 的个数，即零能Majorana数"""
        return int(np.sum(np.abs(self.bdg_energies()) < tol))

    def zero_levels(self, tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
        return np.flatnonzero(self.lambdas < tol)

    def band_minimum(self, tol: float = DEFAULT_ZERO_TOL) -> float:
        """零容差以上的最小 Λ"""
        above = self.lambdas[self.lambdas >= tol]
        return float(above[0]) if len(above) else math.nan

    def pairing_residuals(self) -> np.ndarray:
        """
        每个能级的配对残差 max(‖M^tφ − Λξ‖, ‖Mξ − Λφ‖)

        Returns:
            np.ndarray: 残差数组
        """
        m = self.matrix.matrix
        forward = np.linalg.norm(m.T @ self.phi - self.xi * self.lambdas, axis=0)
        backward = np.linalg.norm(m @ self.xi - self.phi * self.lambdas, axis=0)
        return np.maximum(forward, backward)


@dataclass(frozen=True, eq=False)
class ZeroMode:
    """零模"""
    profile: np.ndarray
    sector: Sector
    symmetry: Symmetry
    energy_residual: float
    pivot_count: int = 0

    def parity_partner(self) -> np.ndarray:
        """n → −n 映射后的剖面"""
        return parity_reflect(self.profile)


@dataclass(frozen=True)
class DispersionPoint:
    """色散关系上的一点"""
    k: float
    e_plus: float
    e_minus: float


@dataclass(frozen=True)
class EdgeSplittingScan:
    """边缘劈裂扫描结果"""
    points: Tuple[Tuple[int, float, float], ...]
    decay_slope: Optional[float] = None

    def __iter__(self) -> Iterator[Tuple[int, float]]:
        for n_sites, splitting, _ in self.points:
            yield n_sites, splitting

    def __len__(self) -> int:
        return len(self.points)


def parity_reflect(vector: np.ndarray) -> np.ndarray:
    """
    关于结中心的宇称变换 n → −n

    格点 −N/2 没有伙伴，映射后置零
    """
    vector = np.asarray(vector)
    reflected = np.zeros_like(vector)
    reflected[1:] = vector[:0:-1]
    return reflected


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    pivot = np.argmax(np.abs(vector))
    return vector if vector[pivot] >= 0 else -vector


def _svd_with_fallback(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    attempts = []
    for driver in _SVD_DRIVERS:
        try:
            return linalg.svd(matrix, lapack_driver=driver)
        except (linalg.LinAlgError, ValueError) as e:
            attempts.append({'driver': driver, 'error': str(e)})
            logger.warning("SVD驱动未收敛，尝试下一个", driver=driver, n_sites=matrix.shape[0], error=e)

    raise SolverConvergenceError("奇异值分解未收敛", {'n_sites': matrix.shape[0], 'attempts': attempts})


def solve_modes(m: SingleParticleMatrix, method: str = 'svd',
                zero_tol: float = DEFAULT_ZERO_TOL) -> ModeSet:
    """
    求解 MM^t φ_k = Λ_k² φ_k 及配对向量 ξ_k

    默认走奇异值分解: M = U·diag(Λ)·V^t，φ_k、ξ_k 为左右奇异向量，
    与 MM^t 的本征分解等价且保留近零能级的全部精度。
    method='eigh' 直接对 MM^t 做对称本征分解，ξ_k = M^tφ_k/Λ_k，
    零能级的 ξ_k 取自 M^tM 的核。

    Args:
        m: 单粒子矩阵
        method: 'svd' 或 'eigh'
        zero_tol: 零能级判据

    Returns:
        ModeSet: 升序排列的能级
    """
    matrix = m.matrix
    n = m.n_sites

    if method == 'svd':
        u, sigma, vt = _svd_with_fallback(matrix)
        order = np.argsort(sigma, kind='stable')
        lambdas = sigma[order]
        phi = u[:, order]
        xi = vt.T[:, order]

    elif method == 'eigh':
        try:
            eigvals, phi = linalg.eigh(matrix @ matrix.T)
            kernel_vals, kernel_vecs = linalg.eigh(matrix.T @ matrix)
        except linalg.LinAlgError as e:
            raise SolverConvergenceError("对称本征分解未收敛",
                                         {'n_sites': n, 'attempts': [{'driver': 'eigh', 'error': str(e)}]})

        lambdas = np.sqrt(np.clip(eigvals, 0.0, None))
        # MM^t 的本征值误差约为 eps·‖M‖²，开方后决定零能级的分辨下限
        floor = max(zero_tol, math.sqrt(n * np.finfo(float).eps) * np.linalg.norm(matrix, 2))
        xi = np.zeros_like(phi)
        zero_idx = np.flatnonzero(lambdas < floor)
        for rank, k in enumerate(zero_idx):
            xi[:, k] = kernel_vecs[:, rank]
        for k in np.flatnonzero(lambdas >= floor):
            xi[:, k] = matrix.T @ phi[:, k] / lambdas[k]

    else:
        raise ValueError(f"未知的求解方法: {method}")

    modes = ModeSet(lambdas=lambdas, phi=phi, xi=xi, matrix=m, method=method)
    logger.debug("谱求解完成", N=n, method=method, zero_count=modes.zero_count(zero_tol))
    return modes


def _propagate(operator: np.ndarray) -> Tuple[np.ndarray, int]:
    """
    沿三对角方程 A[m,m−1]x_{m−1} + A[m,m]x_m + A[m,m+1]x_{m+1} = 0 从第一个格点向后递推

    上对角元为零 (主元消失) 时，x_{m+1} 与前段解耦，在该点引入新的自由参数重新开始递推。

    Returns:
        Tuple[np.ndarray, int]: (解族的基, 重启次数)
    """
    n = operator.shape[0]
    scale = max(np.abs(operator).max(), 1.0)
    family = np.zeros((n, n))
    family[0, 0] = 1.0
    n_params = 1
    pivots = 0

    for row in range(n - 1):
        rhs = operator[row, row] * family[row]
        if row > 0:
            rhs = rhs + operator[row, row - 1] * family[row - 1]

        upper = operator[row, row + 1]
        if abs(upper) > 1e-12 * scale:
            family[row + 1] = -rhs / upper
        else:
            family[row + 1, n_params] = 1.0
            n_params += 1
            pivots += 1
            logger.debug("递推主元为零，在解耦段上重新开始", row=row)

        peak = np.abs(family[row + 1]).max()
        if peak > 1e150:
            column_peak = np.abs(family[:row + 2, :n_params]).max(axis=0)
            family[:, :n_params] /= np.where(column_peak > 0, column_peak, 1.0)

    return family[:, :n_params], pivots


def _low_residual_directions(operator: np.ndarray, family: np.ndarray, tol: float) -> np.ndarray:
    """在解族张成的空间中挑出 ‖A x‖ ≤ tol 的单位向量"""
    basis, _ = np.linalg.qr(family)
    _, sigma, vt = linalg.svd(operator @ basis, full_matrices=False)
    keep = sigma <= tol
    return basis @ vt[keep].T


def _classify(vectors: np.ndarray, site_indices: np.ndarray) -> List[Tuple[np.ndarray, Symmetry]]:
    """
    对简并核空间做宇称分类，无确定宇称的部分按位置局域化后标注边缘
    """
    if vectors.shape[1] == 0:
        return []

    n = vectors.shape[0]
    reflected = np.column_stack([parity_reflect(vectors[:, j]) for j in range(vectors.shape[1])])
    parity_sub = vectors.T @ reflected
    parity_sub = (parity_sub + parity_sub.T) / 2.0
    eigvals, rotation = np.linalg.eigh(parity_sub)
    rotated = vectors @ rotation

    labelled = []
    leftovers = []
    for value, vector in zip(eigvals, rotated.T):
        if abs(value - 1.0) < SYMMETRY_TOL:
            labelled.append((vector, Symmetry.SYMMETRIC))
        elif abs(value + 1.0) < SYMMETRY_TOL:
            labelled.append((vector, Symmetry.ANTISYMMETRIC))
        else:
            leftovers.append(vector)

    if leftovers:
        rest = np.column_stack(leftovers)
        position_sub = rest.T @ (site_indices[:, None] * rest)
        _, localizer = np.linalg.eigh((position_sub + position_sub.T) / 2.0)
        for vector in (rest @ localizer).T:
            centroid = float(np.sum(site_indices * vector ** 2))
            if centroid < -n / 4:
                labelled.append((vector, Symmetry.EDGE_LEFT))
            elif centroid > n / 4:
                labelled.append((vector, Symmetry.EDGE_RIGHT))
            else:
                labelled.append((vector, Symmetry.UNCLASSIFIED))

    return labelled


def _sector_kernel(operator: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray, int]:
    forward, forward_pivots = _propagate(operator)
    reversed_op = operator[::-1, ::-1]
    backward, backward_pivots = _propagate(reversed_op)
    backward = backward[::-1]

    candidates = np.column_stack([
        _low_residual_directions(operator, forward, tol),
        _low_residual_directions(operator, backward, tol),
    ])
    if candidates.shape[1] == 0:
        return np.zeros((operator.shape[0], 0)), np.zeros(0), forward_pivots + backward_pivots

    u, sigma, _ = linalg.svd(candidates, full_matrices=False)
    span = u[:, sigma > 1e-6 * sigma[0]]

    # 在合并后的子空间内重新取残差主方向
    _, residuals, vt = linalg.svd(operator @ span, full_matrices=False)
    kernel = span @ vt.T
    keep = residuals <= tol
    return kernel[:, keep], residuals[keep], forward_pivots + backward_pivots


def zero_modes_by_recursion(params: WireParameters, tol: float = DEFAULT_ZERO_TOL) -> List[ZeroMode]:
    """
    用三项递推求两个子空间的零模

    η 分量满足 M^tφ = 0，ν 分量满足 Mξ = 0。两端各自向内递推，
    β_n = 0 (或 α_n = 0) 的主元处在解耦段上重新开始。

    Args:
        params: 链参数
        tol: 残差容差

    Returns:
        List[ZeroMode]: 先 η 后 ν，各自按分类排列
    """
    m = assemble_m(params).matrix
    sites = params.site_indices().astype(float)
    modes: List[ZeroMode] = []

    for sector, operator in ((Sector.ETA, m.T), (Sector.NU, m)):
        kernel, _, pivots = _sector_kernel(operator, tol)
        if pivots:
            logger.info("递推中因主元为零重启", sector=sector.value, restarts=pivots)

        for vector, symmetry in _classify(kernel, sites):
            vector = _fix_sign(vector / np.linalg.norm(vector))
            residual = float(np.linalg.norm(operator @ vector))
            if residual > tol:
                continue
            modes.append(ZeroMode(profile=vector, sector=sector, symmetry=symmetry,
                                  energy_residual=residual, pivot_count=pivots))

    logger.debug("递推完成", modes=len(modes), N=params.n_sites, mu=params.mu)
    return modes


def analytic_junction_modes(mu: float, t: float, upsilon: float, N: int) -> Tuple[ZeroMode, ZeroMode]:
    """
    Kitaev极限 (γ = 1) 短结中结处两个Majorana的级数解

    系数由四段键表的核方程逐项解出，体内每格衰减因子为 −μ/2:
        ζ_s: φ₀ = 1, φ_{±1} = −μ/(2(t+υ)), φ_{±2} = −[(t−υ)/2 − μ²/(4(t+υ))],
             φ_{±n} = (−μ/2)^{n−2}·φ_{±2} (n ≥ 3)
        ζ_a: φ_{±n} = ±(−μ/2)^{n−1}/2 (n ≥ 1)
    截断到 N 个格点，无伙伴的格点 −N/2 取零，归一化为单位范数。

    Args:
        mu: 化学势 (|μ| < 1)
        t: 结处跃迁
        upsilon: 结处配对
        N: 格点数

    Returns:
        Tuple[ZeroMode, ZeroMode]: (ζ_s, ζ_a)
    """
    if not abs(mu) < 1.0:
        raise ValueError(f"级数要求 |mu| < 1: {mu}")
    if not validate_even_sites(N):
        raise ValueError(f"N 必须为不小于4的偶数: {N}")

    profile = JunctionProfile(kind=JunctionKind.SHORT_JUNCTION, gamma=1.0, tunneling=t, upsilon=upsilon)
    if not validate_positive(t + upsilon):
        raise ValueError(f"级数要求 t + upsilon > 0: t={t}, upsilon={upsilon}")

    params = build_pi_junction(N, profile, mu)
    operator = assemble_m(params).matrix.T
    sites = params.site_indices()
    distance = np.abs(sites)
    ratio = -mu / 2.0

    c1 = -mu / (2.0 * (t + upsilon))
    c2 = -((t - upsilon) / 2.0 - mu ** 2 / (4.0 * (t + upsilon)))
    symmetric = np.where(distance == 0, 1.0,
                         np.where(distance == 1, c1,
                                  c2 * np.power(ratio, np.clip(distance - 2, 0, None).astype(float))))
    antisymmetric = np.where(distance == 0, 0.0,
                             np.sign(sites) * np.power(ratio, np.clip(distance - 1, 0, None).astype(float)) / 2.0)

    symmetric[0] = 0.0
    antisymmetric[0] = 0.0

    modes = []
    for vector, symmetry in ((symmetric, Symmetry.SYMMETRIC), (antisymmetric, Symmetry.ANTISYMMETRIC)):
        vector = vector / np.linalg.norm(vector)
        modes.append(ZeroMode(profile=vector, sector=Sector.ETA, symmetry=symmetry,
                              energy_residual=float(np.linalg.norm(operator @ vector))))

    return modes[0], modes[1]


def subspace_overlap(vector: np.ndarray, basis: np.ndarray) -> float:
    """
    向量在正交基张成子空间上的投影长度

    Args:
        vector: 待比较向量
        basis: 列正交的基

    Returns:
        float: 0 到 1 之间的重叠
    """
    vector = np.asarray(vector, dtype=float)
    return float(np.linalg.norm(basis.T @ vector) / np.linalg.norm(vector))


def quasi_zero_splitting(modes: ModeSet, kind: JunctionKind) -> Tuple[float, float]:
    """
    准零流形 (均匀链1个、π结2个能级) 中最大的 Λ 与其上的带底

    Args:
        modes: 单粒子解
        kind: 链的结构类型

    Returns:
        Tuple[float, float]: (劈裂, 带底)
    """
    n_quasi = 1 if JunctionKind(kind) == JunctionKind.UNIFORM_KITAEV else 2
    return float(modes.lambdas[:n_quasi].max()), float(modes.lambdas[n_quasi])


def _splitting_point(profile: JunctionProfile, mu: float, n_sites: int) -> Tuple[int, float, float]:
    params = build_pi_junction(n_sites, profile, mu)
    splitting, band_minimum = quasi_zero_splitting(solve_modes(assemble_m(params)), profile.kind)
    return n_sites, splitting, band_minimum


def fit_decay_slope(n_values: Sequence[int], splittings: Sequence[float]) -> Optional[float]:
    """
    log(劈裂) 对 N 的线性拟合斜率；少于两个点或存在低于拟合下限的劈裂时返回 None
    """
    values = np.asarray(splittings, dtype=float)
    if len(values) < 2 or not np.all(values > SPLITTING_FIT_FLOOR):
        return None
    return float(np.polyfit(np.asarray(n_values, dtype=float), np.log(values), 1)[0])


def edge_splitting_scan(profile: JunctionProfile, mu: float, N_list: Sequence[int],
                        max_workers: int = 1) -> EdgeSplittingScan:
    """
    有限链长下准零能级的劈裂随 N 的变化

    π结中每个准零能级都由 η 子空间的结处组合与 ν 子空间的边缘组合配对而成，
    因此取准零流形 (均匀链1个、π结2个能级) 中最大的 Λ 作为劈裂，并同时给出带底。

    Args:
        profile: 结剖面
        mu: 化学势
        N_list: 升序的链长列表
        max_workers: 并发数

    Returns:
        EdgeSplittingScan: 每个 N 的 (N, 劈裂, 带底) 以及 log(劈裂) 对 N 的斜率
    """
    n_values = [int(n) for n in N_list]
    if not n_values:
        raise ValueError("N_list 不能为空")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError(f"N_list 必须严格升序: {n_values}")

    if max_workers > 1 and len(n_values) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
            points = list(executor.map(lambda n: _splitting_point(profile, mu, n), n_values))
    else:
        points = [_splitting_point(profile, mu, n) for n in n_values]

    slope = fit_decay_slope(n_values, [p[1] for p in points])

    logger.info("边缘劈裂扫描完成", lengths=len(points), slope=slope)
    return EdgeSplittingScan(points=tuple(points), decay_slope=slope)


def dispersion(k: float, k_so: float, delta_abs: float) -> DispersionPoint:
    """
    E(k) = k² + k_so² ± sqrt((2 k_so k)² + |Δ|²)，单位 ħ²/2m = 1
    """
    root = math.hypot(2.0 * k_so * k, delta_abs)
    base = k * k + k_so * k_so
    return DispersionPoint(k=float(k), e_plus=base + root, e_minus=base - root)


def dispersion_curve(k_grid: Sequence[float], k_so: float, delta_abs: float) -> List[DispersionPoint]:
    return [dispersion(k, k_so, delta_abs) for k in k_grid]
