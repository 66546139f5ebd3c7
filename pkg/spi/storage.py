"""JSON-lines 实例文件与扫描结果的读写

每行一个 JSON 对象: 第一行是头记录, 之后是可选的真值记录, 然后每条边/子句一行。
输出使用固定的键顺序与紧凑分隔符, 同样的输入总是写出相同的字节。
"""
import json
import logging
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Iterable, Iterator, List, NamedTuple, Optional, Union

import numpy as np
import pandas as pd

from .config import settings
from .exceptions import StorageError
from .schemas.csp import GoldreichInstance, PlantedCspInstance, PlantingDistribution
from .schemas.graph import BipartiteGraph, HiddenPartition
from .schemas.reduction import ReducedInstance
from .schemas.sweep import CSV_COLUMNS, SweepRow, SweepSpec

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class SbmFile(NamedTuple):
    graph: BipartiteGraph
    header: dict
    truth: Optional[HiddenPartition]
    sidecar: Optional[dict]


class CspFile(NamedTuple):
    instance: PlantedCspInstance
    distribution: PlantingDistribution
    header: dict


class GoldreichFile(NamedTuple):
    instance: GoldreichInstance
    header: dict


def _dumps(record: dict) -> str:
    return json.dumps(record, separators=(",", ":"), ensure_ascii=False)


def _ints(values) -> List[int]:
    return [int(v) for v in values]


def _write_lines(path: PathLike, records: Iterable[dict]) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            for record in records:
                handle.write(_dumps(record))
                handle.write("\n")
    except OSError as e:
        raise StorageError(path, f"cannot write file: {e.strerror or e}") from e
    logger.info(f"Wrote {path}")


def _read_lines(path: PathLike) -> Iterator[dict]:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError as e:
                    raise StorageError(path, f"line {number}: {e.msg}") from e
    except OSError as e:
        raise StorageError(path, f"cannot read file: {e.strerror or e}") from e


def _expect(path: PathLike, header: dict, kind: str) -> None:
    if header.get("type") != kind:
        raise StorageError(path, f"expected a '{kind}' file, found type {header.get('type')!r}")


def write_sbm(
    path: PathLike,
    graph: BipartiteGraph,
    header: dict,
    truth: Optional[HiddenPartition] = None,
    sidecar: Optional[dict] = None,
) -> None:
    """header 至少包含 delta, p, seed"""
    def records():
        yield {"type": "sbm", "n1": graph.n1, "n2": graph.n2, "delta": header.get("delta"),
               "p": header.get("p"), "seed": header.get("seed")}
        if sidecar is not None:
            yield sidecar
        if truth is not None:
            record = {"truth_u": _ints(truth.u), "truth_v": _ints(truth.v)}
            if truth.v_total is not None:
                record["truth_v_total"] = truth.v_total
            yield record
        for i, j in graph.edges:
            yield {"i": int(i), "j": int(j)}

    _write_lines(path, records())


def write_reduced(path: PathLike, reduced: ReducedInstance, seed: int = 0) -> None:
    header = {"delta": reduced.delta, "p": reduced.p_equiv, "seed": seed}
    write_sbm(path, reduced.graph, header, reduced.truth, reduced.sidecar())


def read_sbm(path: PathLike) -> SbmFile:
    records = _read_lines(path)
    try:
        header = next(records)
        _expect(path, header, "sbm")
        truth, sidecar, edges = None, None, []
        for record in records:
            if "i" in record:
                edges.append((record["i"], record["j"]))
            elif "truth_u" in record:
                truth = HiddenPartition(
                    u=record["truth_u"], v=record["truth_v"], v_total=record.get("truth_v_total")
                )
            elif record.get("type") == "reduction":
                sidecar = record
            else:
                raise StorageError(path, f"unexpected record {sorted(record)}")
        graph = BipartiteGraph(n1=header["n1"], n2=header["n2"], edges=np.asarray(edges, dtype=np.int64))
    except StopIteration:
        raise StorageError(path, "file is empty")
    except (KeyError, ValueError, TypeError) as e:
        raise StorageError(path, f"malformed block model file: {e}") from e
    return SbmFile(graph=graph, header=header, truth=truth, sidecar=sidecar)


def write_csp(path: PathLike, instance: PlantedCspInstance, Q: PlantingDistribution, seed: int = 0) -> None:
    def records():
        yield {"type": "csp", "n": instance.n, "k": instance.k, "m": instance.m, "seed": seed,
               "weights": [float(w) for w in Q.weights]}
        if instance.sigma is not None:
            yield {"sigma": _ints(instance.sigma)}
        for variables, signs in zip(instance.variables, instance.signs):
            yield {"vars": _ints(variables), "signs": _ints(signs)}

    _write_lines(path, records())


def read_csp(path: PathLike) -> CspFile:
    records = _read_lines(path)
    try:
        header = next(records)
        _expect(path, header, "csp")
        sigma, variables, signs = None, [], []
        for record in records:
            if "sigma" in record:
                sigma = record["sigma"]
            else:
                variables.append(record["vars"])
                signs.append(record["signs"])
        k = header["k"]
        instance = PlantedCspInstance(
            n=header["n"], k=k, sigma=sigma,
            variables=np.asarray(variables, dtype=np.int64).reshape(-1, k),
            signs=np.asarray(signs, dtype=np.int8).reshape(-1, k),
        )
        Q = PlantingDistribution(k=k, weights=tuple(header["weights"]))
    except StopIteration:
        raise StorageError(path, "file is empty")
    except (KeyError, ValueError, TypeError) as e:
        raise StorageError(path, f"malformed CSP file: {e}") from e
    return CspFile(instance=instance, distribution=Q, header=header)


def write_goldreich(path: PathLike, instance: GoldreichInstance, seed: int = 0) -> None:
    def records():
        yield {"type": "goldreich", "n": instance.n, "k": instance.k, "m": instance.m, "seed": seed,
               "predicate": _ints(instance.predicate)}
        if instance.sigma is not None:
            yield {"sigma": _ints(instance.sigma)}
        for variables, value in zip(instance.variables, instance.values):
            yield {"vars": _ints(variables), "value": int(value)}

    _write_lines(path, records())


def read_goldreich(path: PathLike) -> GoldreichFile:
    records = _read_lines(path)
    try:
        header = next(records)
        _expect(path, header, "goldreich")
        sigma, variables, values = None, [], []
        for record in records:
            if "sigma" in record:
                sigma = record["sigma"]
            else:
                variables.append(record["vars"])
                values.append(record["value"])
        k = header["k"]
        instance = GoldreichInstance(
            n=header["n"], k=k, predicate=tuple(header["predicate"]), sigma=sigma,
            variables=np.asarray(variables, dtype=np.int64).reshape(-1, k),
            values=np.asarray(values, dtype=np.int8),
        )
    except StopIteration:
        raise StorageError(path, "file is empty")
    except (KeyError, ValueError, TypeError) as e:
        raise StorageError(path, f"malformed Goldreich file: {e}") from e
    return GoldreichFile(instance=instance, header=header)


def write_json(path: Optional[PathLike], payload: dict) -> None:
    """写到文件, path 为 None 时写到标准输出"""
    text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise StorageError(path, f"cannot write file: {e.strerror or e}") from e


def rows_frame(rows: List[SweepRow]) -> pd.DataFrame:
    return pd.DataFrame([row.as_record() for row in rows], columns=CSV_COLUMNS)


def write_sweep_csv(path: Optional[PathLike], rows: List[SweepRow]) -> None:
    frame = rows_frame(rows)
    if path is None:
        frame.to_csv(sys.stdout, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")
        return
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise StorageError(path, f"cannot write file: {e.strerror or e}") from e
    logger.info(f"Wrote {len(rows)} sweep rows to {path}")


def read_sweep_spec(path: PathLike) -> SweepSpec:
    """.json 按 JSON 解析, 其余先按 TOML 再按 JSON"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise StorageError(path, f"cannot read file: {e.strerror or e}") from e
    try:
        if path.suffix == ".json":
            data = json.loads(text)
        else:
            try:
                data = tomllib.loads(text)
            except tomllib.TOMLDecodeError:
                data = json.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise StorageError(path, f"cannot parse sweep specification: {e}") from e
    data = data.get("sweep", data)
    try:
        return SweepSpec(**data)
    except ValueError as e:
        raise StorageError(path, f"invalid sweep specification: {e}") from e


def write_payload(path: Optional[PathLike], payload: dict, fmt: str = "json") -> None:
    """json 直接写出; csv 写成单行表格, 列表字段以 JSON 字符串保存"""
    if fmt == "json":
        write_json(path, payload)
        return
    flat = {key: _dumps(value) if isinstance(value, (list, dict)) else value for key, value in payload.items()}
    frame = pd.DataFrame([flat])
    if path is None:
        frame.to_csv(sys.stdout, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")
        return
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise StorageError(path, f"cannot write file: {e.strerror or e}") from e


def peek_type(path: PathLike) -> str:
    """实例文件头记录中的 type 字段"""
    for record in _read_lines(path):
        return str(record.get("type"))
    raise StorageError(path, "file is empty")
