"""JSON and CSV encodings of the library's value types."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path
from typing import Any

from .dominance import DominanceReport
from .envelope import EnvelopeSolution
from .market import Market, PayoffEntry, RandomizedPayoff
from .quantile import PiecewiseLinearFn, StepQuantile, ValidationError


class FormatError(ValueError):
    """A file is unreadable or does not have the expected structure."""


def quantile_to_json(q: StepQuantile) -> dict[str, Any]:
    return {"breakpoints": list(q.breakpoints), "values": list(q.values)}


def quantile_from_json(obj: Any) -> StepQuantile:
    try:
        bps, vals = obj["breakpoints"], obj["values"]
    except (KeyError, TypeError) as exc:
        raise FormatError("quantile JSON needs 'breakpoints' and 'values'") from exc
    return StepQuantile(tuple(bps), tuple(vals))


def pl_to_json(p: PiecewiseLinearFn) -> dict[str, Any]:
    return {"knots": [[x, y] for x, y in p.knots]}


def pl_from_json(obj: Any) -> PiecewiseLinearFn:
    try:
        knots = obj["knots"]
        pairs = [(k[0], k[1]) for k in knots]
    except (KeyError, TypeError, IndexError) as exc:
        raise FormatError("piecewise-linear JSON needs 'knots': [[x, y], ...]") from exc
    return PiecewiseLinearFn.from_knots(pairs)


def envelope_to_json(sol: EnvelopeSolution) -> dict[str, Any]:
    out = {
        "phi": pl_to_json(sol.phi),
        "q_star": quantile_to_json(sol.q_star),
        "contact_set": [[a, b] for a, b in sol.contact_set],
    }
    if sol.case_mismatches:
        out["case_mismatches"] = list(sol.case_mismatches)
    return out


def envelope_from_json(obj: Any) -> EnvelopeSolution:
    try:
        return EnvelopeSolution(
            pl_from_json(obj["phi"]),
            quantile_from_json(obj["q_star"]),
            tuple((float(a), float(b)) for a, b in obj["contact_set"]),
            tuple(obj.get("case_mismatches", ())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise FormatError(f"malformed envelope JSON: {exc}") from exc


def market_to_json(m: Market) -> dict[str, Any]:
    return {"states": [{"p": s.p, "rho": s.rho} for s in m.states]}


def market_from_json(obj: Any) -> Market:
    try:
        pairs = [(s["p"], s["rho"]) for s in obj["states"]]
    except (KeyError, TypeError) as exc:
        raise FormatError('market JSON needs "states": [{"p": ..., "rho": ...}, ...]') from exc
    return Market.from_pairs(pairs)


def payoff_to_json(x: RandomizedPayoff) -> dict[str, Any]:
    return {"entries": [e._asdict() for e in x.entries]}


def payoff_from_json(obj: Any) -> RandomizedPayoff:
    try:
        entries = [PayoffEntry(e["state"], e["mass"], e["value"]) for e in obj["entries"]]
    except (KeyError, TypeError) as exc:
        raise FormatError('payoff JSON needs "entries": [{"state", "mass", "value"}, ...]') from exc
    return RandomizedPayoff(tuple(entries))


def report_to_json(r: DominanceReport) -> dict[str, Any]:
    return asdict(r)


def dumps(obj: Any) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def write_text(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc.strerror}") from exc


def read_samples_csv(path: str | Path) -> tuple[list[float], list[float] | None]:
    """One sample per row, optionally followed by its weight.

    Either every row carries a weight or none does. Blank lines and lines
    starting with ``#`` are skipped.
    """
    values: list[float] = []
    weights: list[float] = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                cells = [c.strip() for c in row]
                if not cells or not cells[0] or cells[0].startswith("#"):
                    continue
                if len(cells) > 2:
                    raise FormatError(f"{path}:{lineno}: expected 'value[,weight]'")
                try:
                    values.append(float(cells[0]))
                    if len(cells) == 2 and cells[1]:
                        weights.append(float(cells[1]))
                except ValueError as exc:
                    raise FormatError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    if weights and len(weights) != len(values):
        raise FormatError(f"{path}: weights given on some rows but not all")
    return values, (weights or None)
