import logging

import numpy as np
import pytest

from spi import presets
from spi.config import settings
from spi.exceptions import InvalidParameterError
from spi.models import AllocationAudit, OperationCounter, SparseVector, SubGraph
from spi.schemas import BipartiteGraph, BlockModelParams, HiddenPartition, PlantedCspInstance, SolverConfig
from spi.seeding import TIES, stream_rng
from spi.services import FourierService, InstanceService, ReductionService, SolverService
from tests.shared.utils.checks import assert_mean_within, assert_within_binomial
from tests.shared.utils.oracles import dense_adjacency, dense_centered

T_CASES = [
    # (T_factor, T, n1, 期望的 T)
    (10.0, None, 1000, 70),
    (1.0, None, 2, 2),
    (0.1, None, 100, 2),
    (10.0, 7, 1000, 8),
    (10.0, 12, 1000, 12),
]


def _graph(n1, n2, edges):
    return BipartiteGraph(n1=n1, n2=n2, edges=np.asarray(edges, dtype=np.int64).reshape(-1, 2))


def _solve_trials(n1, n2, delta, multiplier, trials, solver=None):
    p = InstanceService.threshold_density(n1, n2, delta, multiplier)
    results = []
    for trial in range(trials):
        params = BlockModelParams(n1=n1, n2=n2, delta=delta, p=p, seed=1000 + trial)
        graph, truth = InstanceService.sample_bipartite_block(params)
        audit = AllocationAudit()
        config = solver or SolverConfig(seed=trial)
        results.append((SolverService.spi_solve(graph, config, truth, audit=audit), audit))
    return results


@pytest.mark.parametrize("T_factor,T,n1,expected", T_CASES)
def test_resolve_T(T_factor, T, n1, expected):
    assert SolverConfig(T_factor=T_factor, T=T).resolve_T(n1) == expected


def test_window_bounds():
    config = SolverConfig()
    assert config.window(10) == (5, 10)
    assert config.window(5) == (2, 5)
    assert SolverConfig(majority_window=(0.9, 1.0)).window(3) == (2, 3)
    with pytest.raises(ValueError):
        SolverConfig(majority_window=(0.6, 0.4))


def test_split_edges_partitions_the_graph():
    edges = [(0, 1), (0, 3), (1, 0), (1, 2), (2, 2), (2, 4), (3, 1), (3, 3), (4, 0), (4, 4)]
    graph = _graph(5, 5, edges)
    split = SolverService.split_edges(graph, 2, seed=1)
    pieces = [(int(l), int(r)) for sub in split for l, r in zip(sub.left, sub.right)]
    assert sorted(pieces) == sorted(edges)
    assert split.T == 2
    assert split.num_edges == 10
    assert split.q == pytest.approx(graph.density() / 2)


def test_split_edges_rejects_small_T():
    with pytest.raises(InvalidParameterError):
        SolverService.split_edges(_graph(2, 2, [(0, 0)]), 1)


def test_split_edges_bucket_sizes():
    k = np.arange(100_000)
    graph = _graph(100, 1000, np.column_stack([k // 1000, k % 1000]))
    split = SolverService.split_edges(graph, 20, seed=5)
    for sub in split:
        assert_within_binomial(sub.num_edges, 100_000, 0.05)


def test_split_edges_is_deterministic(square_sbm):
    graph, _ = square_sbm
    first = SolverService.split_edges(graph, 8, seed=2)
    second = SolverService.split_edges(graph, 8, seed=2)
    for a, b in zip(first, second):
        assert np.array_equal(a.left, b.left)
        assert np.array_equal(a.right, b.right)


def test_support_is_right_endpoints(square_sbm):
    graph, _ = square_sbm
    for sub in SolverService.split_edges(graph, 6, seed=0):
        assert set(sub.support.tolist()) == set(sub.right.tolist())
        assert sub.support_size == np.unique(sub.right).size


def test_apply_mt_empty_subgraph():
    empty = np.empty(0, dtype=np.int64)
    sub = SubGraph.from_edges(empty, empty, 3)
    y = SolverService.apply_mt(sub, np.array([0.5, 0.25, 0.25]))
    assert y.support.size == 0
    assert y.L == pytest.approx(1.0)
    assert np.allclose(y.dense(0.1, 4), -0.1)


def test_apply_mt_single_edge():
    sub = SubGraph.from_edges(np.array([0]), np.array([5]), 2)
    y = SolverService.apply_mt(sub, np.array([1.0, 0.0]))
    assert y.support.tolist() == [5]
    assert y.values.tolist() == [1.0]
    assert y.L == 1.0


def test_apply_m_special_cases():
    sub = SubGraph.from_edges(np.array([0, 0, 1]), np.array([2, 3, 3]), 2)
    # q = 0: 只剩 Aŷ
    y = SparseVector(support=np.array([2, 3]), values=np.array([1.0, 2.0]), L=0.7)
    assert np.allclose(SolverService.apply_m(sub, y, 0.0, 5), [3.0, 2.0])
    # ŷ = 0, L = 1: -q·A1 + q²·n2
    zero = SparseVector(support=np.empty(0, dtype=np.int64), values=np.empty(0), L=1.0)
    expected = -0.1 * np.array([2.0, 1.0]) + 0.01 * 5
    assert np.allclose(SolverService.apply_m(sub, zero, 0.1, 5), expected)


def test_implicit_products_match_dense():
    """随机小实例: 隐式 Mᵀx 与 My 与稠密 (A - qJ) 乘积一致"""
    rng = np.random.default_rng(17)
    for _ in range(1000):
        n1, n2 = int(rng.integers(1, 51)), int(rng.integers(1, 51))
        q = float(rng.uniform(0.0, 0.2))
        mask_a = rng.random((n1, n2)) < 0.2
        mask_b = rng.random((n1, n2)) < 0.2
        sub_a = SubGraph.from_edges(*np.nonzero(mask_a), n1)
        sub_b = SubGraph.from_edges(*np.nonzero(mask_b), n1)
        x = rng.normal(size=n1)

        y = SolverService.apply_mt(sub_a, x)
        expected_y = dense_centered(sub_a, n1, n2, q).T @ x
        assert np.allclose(y.dense(q, n2), expected_y, rtol=1e-10, atol=1e-10 * (1 + np.abs(expected_y).max()))
        assert y.norm(q, n2) == pytest.approx(np.linalg.norm(expected_y), rel=1e-10, abs=1e-12)

        x_next = SolverService.apply_m(sub_b, y, q, n2)
        expected_x = dense_centered(sub_b, n1, n2, q) @ expected_y
        assert np.allclose(x_next, expected_x, rtol=1e-10, atol=1e-10 * (1 + np.abs(expected_x).max()))


def test_sparse_vector_dot_and_scale():
    y = SparseVector(support=np.array([1, 3]), values=np.array([2.0, -1.0]), L=2.0)
    v = np.array([1.0, -1.0, 1.0, 1.0])
    dense = y.dense(0.5, 4)
    assert y.dot(v, 0.5) == pytest.approx(v @ dense)
    assert np.allclose(y.scaled(2.0).dense(0.5, 4), 2.0 * dense)
    # v 只给出覆盖支撑集的前缀, 其余分量由 total 计入
    head = SparseVector(support=np.array([0, 1]), values=np.array([2.0, -1.0]), L=2.0)
    assert head.dot(v[:2], 0.5, total=float(v.sum())) == pytest.approx(v @ head.dense(0.5, 4))


def test_first_moment_of_centered_product():
    """E[u·M y] = (δ-1)·n1·q·(v·y)"""
    n, q, delta = 100, 0.05, 1.8
    partition = HiddenPartition(u=[1, -1] * 50, v=[1] * 50 + [-1] * 50)
    rng = np.random.default_rng(3)
    y = partition.v + rng.normal(size=n)
    y /= np.linalg.norm(y)
    samples = []
    for seed in range(500):
        graph, _ = InstanceService.sample_bipartite_block(
            BlockModelParams(n1=n, n2=n, delta=delta, p=q, seed=seed), partition
        )
        sub = SubGraph.from_edges(graph.left, graph.right, n)
        samples.append(partition.u @ (dense_centered(sub, n, n, q) @ y))
    assert_mean_within(samples, (delta - 1) * n * q * (partition.v @ y))


def test_entrywise_mean_of_centered_matrix():
    """E[M_ij] = (δ-1)·p·u_i·v_j"""
    n, p, delta, draws = 10, 0.3, 1.6, 10_000
    partition = HiddenPartition(u=[1, -1] * 5, v=[1] * 5 + [-1] * 5)
    counts = np.zeros((n, n))
    for seed in range(draws):
        graph, _ = InstanceService.sample_bipartite_block(
            BlockModelParams(n1=n, n2=n, delta=delta, p=p, seed=seed), partition
        )
        counts += dense_adjacency(graph.left, graph.right, n, n)
    same = np.outer(partition.u, partition.v) > 0
    prob = np.where(same, delta * p, (2 - delta) * p)
    spread = 4.5 * np.sqrt(prob * (1 - prob) / draws)
    assert np.all(np.abs(counts / draws - prob) <= spread)
    expected = (delta - 1) * p * np.outer(partition.u, partition.v)
    assert np.allclose(prob - p, expected)


def test_norm_concentration():
    """E‖My‖² = Σ p_ij(1-p_ij)y_j² + n1·((δ-1)q(v·y))²"""
    n, q, delta = 2000, 0.01, 1.8
    partition = HiddenPartition(u=[1, -1] * 1000, v=[1] * 1000 + [-1] * 1000)
    rng = np.random.default_rng(8)
    y = rng.choice([-1.0, 1.0], size=n) / np.sqrt(n)
    y_hat = SparseVector(support=np.arange(n), values=y, L=0.0)
    norms = []
    for seed in range(20):
        graph, _ = InstanceService.sample_bipartite_block(
            BlockModelParams(n1=n, n2=n, delta=delta, p=q, seed=seed), partition
        )
        sub = SubGraph.from_edges(graph.left, graph.right, n)
        norms.append(np.sum(SolverService.apply_m(sub, y_hat, q, n) ** 2))
    same, cross = delta * q, (2 - delta) * q
    variance = n * 0.5 * (same * (1 - same) + cross * (1 - cross))
    signal = n * ((delta - 1) * q) ** 2 * (partition.v @ y) ** 2
    assert np.mean(norms) == pytest.approx(variance + signal, rel=0.1)


def test_spi_solve_empty_graph():
    result = SolverService.spi_solve(_graph(4, 4, []), SolverConfig(T=4))
    assert result.status == "empty"
    assert not result.ok


def test_spi_solve_degenerate_when_iterate_vanishes():
    """只有一条边且初始向量与之正交: Mᵀx 的范数只剩 q 项"""
    graph = _graph(2, 2, [(0, 0)])
    result = SolverService.spi_solve(graph, SolverConfig(T=2, p_override=1e-20), initial=[0.0, 1.0])
    assert result.status == "degenerate"
    assert result.iterations == 0
    assert result.signs.shape == (2,)


def test_spi_solve_is_deterministic(square_sbm, short_solver):
    graph, truth = square_sbm
    first = SolverService.spi_solve(graph, short_solver, truth)
    second = SolverService.spi_solve(graph, short_solver, truth)
    assert np.array_equal(first.signs, second.signs)
    assert first.U_trace == second.U_trace
    assert first.V_trace == second.V_trace


def test_spi_solve_sign_symmetry(square_sbm, short_solver):
    """初始向量取反, 结果整体取反 (窗口内票数为奇数, 无平局)"""
    graph, truth = square_sbm
    x0 = np.random.default_rng(1).normal(size=graph.n1)
    plus = SolverService.spi_solve(graph, short_solver, truth, initial=x0)
    minus = SolverService.spi_solve(graph, short_solver, truth, initial=-x0)
    assert np.array_equal(plus.signs, -minus.signs)
    assert np.allclose(plus.U_trace, -np.asarray(minus.U_trace))


VOTE_CASES = [
    # (各次迭代的符号, 表决结果)
    ([[1, -1, 1], [1, -1, -1]], [1, -1, 1]),
    ([[-1, 1, -1], [-1, 1, 1]], [-1, 1, 1]),
    ([[1], [-1], [-1]], [-1]),
    ([[-1, -1]], [-1, -1]),
]


@pytest.mark.parametrize("history,expected", VOTE_CASES)
def test_vote(history, expected):
    assert SolverService.vote(np.array(history, dtype=np.int8)).tolist() == expected


def test_default_window_ties_resolve_to_plus():
    """默认 T = 70 时窗口内有 18 票, 9 比 9 的平局取 +1, 取反后仍为 +1"""
    config = SolverConfig()
    lo, hi = config.window(config.resolve_T(1000) // 2)
    assert hi - lo == 18
    history = np.array([[1]] * 9 + [[-1]] * 9, dtype=np.int8)
    assert SolverService.vote(history).tolist() == [1]
    assert SolverService.vote(-history).tolist() == [1]


def test_spi_solve_sign_symmetry_with_even_window(square_sbm):
    """T = 8: 窗口内 2 票; 非平局的坐标整体取反, 平局的坐标两次都是 +1"""
    graph, truth = square_sbm
    config = SolverConfig(T=8, seed=3)
    assert config.window(4) == (2, 4)
    x0 = np.random.default_rng(1).normal(size=graph.n1)
    plus = SolverService.spi_solve(graph, config, truth, initial=x0)
    minus = SolverService.spi_solve(graph, config, truth, initial=-x0)
    tied = plus.signs == minus.signs
    assert np.all(plus.signs[tied] == 1)
    assert np.array_equal(plus.signs[~tied], -minus.signs[~tied])
    assert np.allclose(plus.U_trace, -np.asarray(minus.U_trace))


def test_spi_solve_traces(square_sbm, short_solver):
    graph, truth = square_sbm
    result = SolverService.spi_solve(graph, short_solver, truth)
    assert result.T == 10
    assert result.iterations == 5
    assert len(result.U_trace) == 5
    assert len(result.V_trace) == 5
    assert all(abs(value) <= np.sqrt(graph.n1) + 1e-9 for value in result.U_trace)
    assert all(abs(value) <= np.sqrt(graph.n2) + 1e-9 for value in result.V_trace)
    assert result.edges_used == graph.num_edges
    assert result.p_used == pytest.approx(graph.density())


def test_dense_reference_matches_implicit(square_sbm, short_solver):
    graph, truth = square_sbm
    implicit = SolverService.spi_solve(graph, short_solver, truth)
    dense = SolverService.spi_solve(graph, short_solver.model_copy(update={"mode": "dense_reference"}), truth)
    assert np.array_equal(implicit.signs, dense.signs)
    assert np.allclose(implicit.U_trace, dense.U_trace, rtol=1e-8)
    assert np.allclose(implicit.V_trace, dense.V_trace, rtol=1e-8)


def test_v_trace_on_reduced_instance():
    """约化图只编号出现过的元组, V 仍按全部 n2 个右顶点计算"""
    Q = presets.noisy_xor(3, 0.5)
    instance = InstanceService.sample_planted_csp(Q, n=20, m=400, seed=9)
    reduced = ReductionService.csp_to_bipartite(instance, FourierService.distribution_complexity(Q))
    assert len(reduced.indexer) < reduced.n2_nominal
    config = SolverConfig(T=6, seed=2)
    implicit = SolverService.spi_solve(reduced.graph, config, reduced.truth)
    dense = SolverService.spi_solve(
        reduced.graph, config.model_copy(update={"mode": "dense_reference"}), reduced.truth
    )
    assert len(implicit.V_trace) == 3
    assert np.allclose(implicit.V_trace, dense.V_trace, rtol=1e-8, atol=1e-12)
    assert all(abs(value) <= np.sqrt(reduced.n2_nominal) + 1e-9 for value in implicit.V_trace)


def test_partial_truth_without_total_is_not_tracked(caplog, square_sbm, short_solver):
    graph, truth = square_sbm
    partial = HiddenPartition(u=truth.u, v=truth.v[:10])
    with caplog.at_level(logging.WARNING):
        result = SolverService.spi_solve(graph, short_solver, partial)
    assert result.V_trace == []
    assert len(result.U_trace) == 5
    assert "V is not tracked" in caplog.text


def test_dense_reference_size_limit(mocker, square_sbm, short_solver):
    mocker.patch.object(settings, "DENSE_REFERENCE_MAX_N2", 100)
    graph, _ = square_sbm
    with pytest.raises(InvalidParameterError):
        SolverService.spi_solve(graph, short_solver.model_copy(update={"mode": "dense_reference"}))


def test_initial_vector_validation(square_sbm, short_solver):
    graph, _ = square_sbm
    with pytest.raises(InvalidParameterError):
        SolverService.spi_solve(graph, short_solver, initial=np.zeros(graph.n1))
    with pytest.raises(InvalidParameterError):
        SolverService.spi_solve(graph, short_solver, initial=np.ones(3))


def test_operation_count_is_linear_in_edges():
    """边数翻 4 倍, 边访问次数也约翻 4 倍"""
    n1, n2 = 200, 100_000
    partition_seed = 12
    touches = []
    for p in (1e-3, 4e-3, 1.6e-2):
        graph, truth = InstanceService.sample_bipartite_block(
            BlockModelParams(n1=n1, n2=n2, delta=1.8, p=p, seed=partition_seed)
        )
        counter, audit = OperationCounter(), AllocationAudit()
        result = SolverService.spi_solve(graph, SolverConfig(T=10, seed=1), truth, counter=counter, audit=audit)
        assert result.operations == counter.total
        assert not audit.allocated_dense("right", n2)
        touches.append(counter.edge_touches)
    ratios = np.array(touches[1:]) / np.array(touches[:-1])
    assert np.all((ratios >= 3.5) & (ratios <= 6.5))


@pytest.mark.slow
def test_square_block_model_exact_recovery():
    """n1 = n2 = 1000, δ = 1.8, C = 30: 20 次中至少 18 次精确恢复"""
    results = _solve_trials(1000, 1000, 1.8, 30.0, 20)
    exact = sum(result.overlap == 1.0 for result, _ in results)
    assert exact >= 18


@pytest.mark.slow
def test_disassortative_block_model_recovers():
    results = _solve_trials(1000, 1000, 0.2, 30.0, 5)
    assert np.mean([result.overlap for result, _ in results]) >= 0.95


@pytest.mark.slow
def test_lopsided_block_model_exact_recovery():
    """n1 = 100, n2 = 10^4: 精确恢复左侧, 且不分配长度为 n2 的数组"""
    results = _solve_trials(100, 10_000, 1.8, 30.0, 20)
    exact = sum(result.overlap == 1.0 for result, _ in results)
    assert exact >= 18
    for _, audit in results:
        assert audit.largest("right") < 10_000


@pytest.mark.slow
def test_lopsided_instances_under_baseline():
    """与上面相同的 20 个实例上运行不做子采样的幂迭代

    此规模下 (p ≈ 0.22) 信号特征值 ((δ-1)p)²·n1·n2 ≈ 3·10⁴, 噪声约 5·10², 基线同样能恢复;
    两者的差别在于内存: 基线每次迭代持有长度 n2 的右侧数组, spi 只持有子图支撑集。
    基线失效需要 (n2/n1)^(1/6) 超过 C·ln n1, 在桌面规模上无法达到, 见 test_baseline_fails_below_connectivity。
    """
    n1, n2 = 100, 10_000
    p = InstanceService.threshold_density(n1, n2, 1.8, 30.0)
    spi_overlaps, baseline_overlaps = [], []
    for trial in range(20):
        graph, truth = InstanceService.sample_bipartite_block(
            BlockModelParams(n1=n1, n2=n2, delta=1.8, p=p, seed=1000 + trial)
        )
        spi_audit, baseline_audit = AllocationAudit(), AllocationAudit()
        result = SolverService.spi_solve(graph, SolverConfig(seed=trial), truth, audit=spi_audit)
        baseline = SolverService.power_iteration_baseline(
            graph, iterations=30, seed=trial, truth=truth, audit=baseline_audit
        )
        spi_overlaps.append(result.overlap)
        baseline_overlaps.append(baseline.overlap)
        assert spi_audit.largest("right") < n2
        assert baseline_audit.largest("right") >= 0.99 * n2
    assert sum(o == 1.0 for o in spi_overlaps) >= 18
    assert np.mean(baseline_overlaps) > 0.9
    assert np.mean(spi_overlaps) >= np.mean(baseline_overlaps) - 0.05


@pytest.mark.slow
def test_baseline_fails_below_connectivity():
    """在远低于阈值的密度上, 不做子采样的幂迭代也无法恢复"""
    p = InstanceService.threshold_density(100, 10_000, 1.8, 0.2)
    overlaps = []
    for trial in range(20):
        graph, truth = InstanceService.sample_bipartite_block(
            BlockModelParams(n1=100, n2=10_000, delta=1.8, p=p, seed=2000 + trial)
        )
        result = SolverService.power_iteration_baseline(graph, iterations=30, seed=trial, truth=truth)
        overlaps.append(result.overlap)
    assert np.mean(overlaps) < 0.5


def test_baseline_recovers_dense_instance(square_sbm):
    graph, truth = square_sbm
    result = SolverService.power_iteration_baseline(graph, iterations=30, seed=1, truth=truth)
    assert result.ok
    assert result.overlap > 0.9
    assert len(result.U_trace) == 30


def test_baseline_rejects_zero_iterations(square_sbm):
    graph, _ = square_sbm
    with pytest.raises(InvalidParameterError):
        SolverService.power_iteration_baseline(graph, iterations=0)


def test_majority_vote_r1_exact():
    """植入 3-SAT, m = 150·n·ln n: 多数表决精确恢复 σ"""
    n = 500
    m = int(np.ceil(150 * n * np.log(n)))
    instance = InstanceService.sample_planted_csp(presets.satisfying_sat(3), n, m, seed=3)
    result = SolverService.majority_vote_r1(instance, (0,), seed=3)
    assert np.array_equal(result.assignment, instance.sigma)
    assert result.coin_flips == []


def test_majority_vote_r1_bias_sign():
    instance = InstanceService.sample_planted_csp(presets.satisfying_sat(3), 200, 60_000, seed=4)
    flipped = SolverService.majority_vote_r1(instance, (0,), seed=4, bias_sign=-1)
    assert InstanceService.overlap(flipped.assignment, instance.sigma) > 0.9
    assert np.mean(flipped.assignment == instance.sigma) < 0.1


def test_majority_vote_r1_all_positive_literal():
    """位置 0 上都是正文字 x0: x0 取 +1; x1, x2 不在位置 0 出现, 由掷硬币决定"""
    instance = PlantedCspInstance(
        n=3, k=2, sigma=[1, 1, 1],
        variables=[[0, 1], [0, 2], [0, 1]], signs=[[1, 1], [1, -1], [1, 1]],
    )
    result = SolverService.majority_vote_r1(instance, (0,), seed=5)
    assert result.assignment[0] == 1
    assert result.coin_flips == [1, 2]


def test_majority_vote_r1_coin_flips_are_recorded(caplog):
    """未出现的变量与正负票数相同的变量都按 TIES 流掷硬币, 并记录在 coin_flips 中"""
    instance = PlantedCspInstance(
        n=6, k=2, sigma=[1] * 6,
        variables=[[0, 1], [0, 2], [3, 4], [3, 5]], signs=[[1, 1], [1, 1], [1, 1], [-1, 1]],
    )
    with caplog.at_level(logging.WARNING):
        result = SolverService.majority_vote_r1(instance, (0,), seed=11)
    assert result.coin_flips == [1, 2, 3, 4, 5]
    coins = 2 * stream_rng(11, TIES).integers(0, 2, size=6) - 1
    assert result.assignment.tolist() == [1] + coins[1:].tolist()
    assert "5 variables tied" in caplog.text
    again = SolverService.majority_vote_r1(instance, (0,), seed=11)
    assert np.array_equal(result.assignment, again.assignment)


def test_majority_vote_r1_rejects_wide_subsets(two_literal_instance):
    with pytest.raises(InvalidParameterError):
        SolverService.majority_vote_r1(two_literal_instance, (0, 1))
    with pytest.raises(InvalidParameterError):
        SolverService.majority_vote_r1(two_literal_instance, (2,))
