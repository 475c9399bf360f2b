"""Reading and writing marginals, joints, responses and reports.

Rationals travel as canonical ``"p/q"`` strings (``"0"`` and ``"1"`` for
whole numbers). Scalar rationals in reports also get a ``*_float`` twin for
convenience. JSON is always emitted with sorted keys.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from .core import Joint, Marginal, check_k
from .errors import MTEError, ParseError
from .estimator import ResponseData

MAX_FLOAT_DENOMINATOR = 10**6


def parse_rational(value: Any, where: str = "value", allow_float: bool = False) -> Fraction:
    """Parse ``"p/q"``, an integer literal, or (if allowed) a float."""
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not allow_float:
            raise ParseError(f"{where}: floats are not accepted ({value!r}); write it as 'p/q'")
        return Fraction(value).limit_denominator(MAX_FLOAT_DENOMINATOR)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError):
            pass
        if allow_float:
            try:
                return Fraction(float(text)).limit_denominator(MAX_FLOAT_DENOMINATOR)
            except ValueError:
                pass
        raise ParseError(f"{where}: cannot parse {value!r} as a rational")
    raise ParseError(f"{where}: expected a rational, got {type(value).__name__}")


def rat(value: Fraction) -> str:
    return str(Fraction(value))


def load_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParseError(f"{path}: file not found") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(doc: Any, key: str, where: str) -> Any:
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"{where}: missing field {key!r}")
    return doc[key]


def _k(doc: Any, where: str) -> int:
    k = _field(doc, "k", where)
    if isinstance(k, bool) or not isinstance(k, int):
        raise ParseError(f"{where}: field 'k' must be an integer")
    try:
        return check_k(k)
    except MTEError as exc:
        raise ParseError(f"{where}: field 'k': {exc}") from None


def _vector(doc, key: str, k: int, where: str, allow_float: bool) -> tuple[Fraction, ...]:
    values = _field(doc, key, where)
    if not isinstance(values, list):
        raise ParseError(f"{where}: field {key!r} must be a list")
    if len(values) != k:
        raise ParseError(f"{where}: field {key!r} has {len(values)} entries, expected k={k}")
    return tuple(
        parse_rational(v, f"{where}: field {key}[{i}]", allow_float) for i, v in enumerate(values)
    )


def marginals_from_json(doc: Any, where: str = "marginals", allow_float: bool = False):
    k = _k(doc, where)
    a = _vector(doc, "a", k, where, allow_float)
    b = _vector(doc, "b", k, where, allow_float)
    try:
        return Marginal(k, a), Marginal(k, b)
    except MTEError as exc:
        raise ParseError(f"{where}: {exc}") from None


def joint_from_json(doc: Any, where: str = "joint", allow_float: bool = False) -> Joint:
    k = _k(doc, where)
    rows = _field(doc, "m", where)
    if not isinstance(rows, list) or len(rows) != k:
        raise ParseError(f"{where}: field 'm' must be a list of {k} rows")
    parsed = []
    for x, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != k:
            raise ParseError(f"{where}: field m[{x}] must be a list of {k} entries")
        parsed.append(
            tuple(parse_rational(v, f"{where}: field m[{x}][{y}]", allow_float) for y, v in enumerate(row))
        )
    try:
        return Joint(k, tuple(parsed))
    except MTEError as exc:
        raise ParseError(f"{where}: {exc}") from None


def read_marginals(path, allow_float: bool = False) -> tuple[Marginal, Marginal]:
    return marginals_from_json(load_json(path), str(path), allow_float)


def read_joint(path, allow_float: bool = False) -> Joint:
    return joint_from_json(load_json(path), str(path), allow_float)


def marginals_to_json(eta_a: Marginal, eta_b: Marginal) -> dict:
    return {"k": eta_a.k, "a": [rat(v) for v in eta_a], "b": [rat(v) for v in eta_b]}


def joint_to_json(j: Joint) -> dict:
    return {"k": j.k, "m": [[rat(v) for v in row] for row in j.m]}


def read_responses(path, k: int) -> ResponseData:
    """Parse a ``unit,group,outcome`` CSV. Errors name the offending line."""
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except FileNotFoundError:
        raise ParseError(f"{path}: file not found") from None
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["unit", "group", "outcome"]:
            raise ParseError(f"{path}: line 1: header must be 'unit,group,outcome'")
        records = []
        seen = set()
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError(f"{path}: line {line}: expected 3 fields, got {len(row)}")
            unit_s, group, outcome_s = (c.strip() for c in row)
            try:
                unit = int(unit_s)
            except ValueError:
                raise ParseError(f"{path}: line {line}: field 'unit': not an integer: {unit_s!r}") from None
            try:
                outcome = int(outcome_s)
            except ValueError:
                raise ParseError(
                    f"{path}: line {line}: field 'outcome': not an integer: {outcome_s!r}"
                ) from None
            if group not in ("a", "b"):
                raise ParseError(f"{path}: line {line}: field 'group': must be 'a' or 'b', got {group!r}")
            if not 0 <= outcome < k:
                raise ParseError(f"{path}: line {line}: field 'outcome': {outcome} outside 0..{k - 1}")
            if unit in seen:
                raise ParseError(f"{path}: line {line}: duplicate unit {unit}")
            seen.add(unit)
            records.append((unit, group, outcome))
    n = len(records)
    if seen != set(range(1, n + 1)):
        missing = sorted(set(range(1, n + 1)) - seen)[:5]
        raise ParseError(f"{path}: units must be numbered 1..{n}; missing {missing}")
    return ResponseData.from_records(k, records)


def responses_to_csv(data: ResponseData) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["unit", "group", "outcome"])
    writer.writerows(data.records())
    return buf.getvalue()


def variability_to_json(pair) -> dict:
    return {
        "r": pair.r,
        "nu_lower": rat(pair.nu_lower),
        "nu_lower_float": float(pair.nu_lower),
        "nu_upper": rat(pair.nu_upper),
        "nu_upper_float": float(pair.nu_upper),
    }


def width_rows(report) -> list[dict]:
    return [
        {"r": e.r, "nu_lower": rat(e.nu_lower), "nu_upper": rat(e.nu_upper), "width": rat(e.width)}
        for e in report.entries
    ]


def width_report_to_json(report) -> dict:
    return {
        "k": report.k,
        "argmin_r": report.argmin_r,
        "min_width": rat(report.min_width),
        "min_width_float": float(report.min_width),
        "widths": width_rows(report),
    }


def estimate_to_json(result) -> dict:
    n_a, n_b = result.group_sizes
    return {
        "m_hat": result.m_hat,
        "epsilon": rat(result.epsilon),
        "epsilon_float": float(result.epsilon),
        "beta": rat(result.beta),
        "delta": result.delta,
        "n_a": n_a,
        "n_b": n_b,
        "min_width": rat(result.width_report.min_width),
        "widths": width_rows(result.width_report),
    }


def trial_rows(report) -> list[dict]:
    return [
        {
            "trial": r.trial,
            "seed": r.seed,
            "m_hat": r.m_hat,
            "epsilon": rat(r.epsilon),
            "covered": r.covered,
            "n_a": r.n_a,
            "n_b": r.n_b,
        }
        for r in report.records
    ]


def _config_to_json(config: dict) -> dict:
    out = {}
    for key, value in config.items():
        if isinstance(value, Joint):
            out[key] = joint_to_json(value)
        elif isinstance(value, Fraction):
            out[key] = rat(value)
        else:
            out[key] = value
    return out


def experiment_to_json(report) -> dict:
    return {
        "trials": report.trials,
        "coverage_rate": report.coverage_rate,
        "mean_epsilon": report.mean_epsilon,
        "delta_bound": report.delta_bound,
        "epsilon_star": rat(report.epsilon_star),
        "epsilon_star_float": float(report.epsilon_star),
        "width_lower_bound": report.width_lower_bound,
        "width_lower_bound_plus_tail": report.width_lower_bound_plus_tail,
        "config": _config_to_json(report.config),
        "records": trial_rows(report),
    }


def indist_to_json(report) -> dict:
    return {
        "first": experiment_to_json(report.first),
        "second": experiment_to_json(report.second),
        "tv_distance": rat(report.tv_distance),
        "tv_distance_float": float(report.tv_distance),
        "tv_distance_m_hat": rat(report.tv_distance_m_hat),
        "tv_distance_m_hat_float": float(report.tv_distance_m_hat),
        "mean_epsilon_gap": report.mean_epsilon_gap,
    }


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def rows_to_csv(rows: Iterable[dict], columns: list[str] | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = sorted(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
