"""Machine-readable identity catalog and the three-way verification harness.

Each record binds up to three independently computable sides of one
identity -- a series specification, an integral form, a closed-form
expression tree -- plus a weight/level space tag and a source anchor.
Verification evaluates every present side from scratch and reports all
pairwise absolute differences; a record passes when every pair agrees to
``target_digits - 5`` decimal digits (the final guard digits of quadrature
and sequence acceleration are heuristic, the margin keeps the check far
beyond coincidence yet stable).

Parametric families (trigonometric-logarithmic identities with a free
angle) are stored once with an ``angle_grid`` attribute; the harness
expands the grid at verification time.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import List, Optional

import mpmath as mp

from .closedform import ClosedForm, eval_closed_form
from .constants import registry
from .errors import CmzvError, SchemaError
from .precision import PrecisionContext, DEFAULT_CONTEXT, agreed_digits
from .quadrature import IntegralSpec, eval_integral
from .series import SeriesSpec, eval_series, eval_parametric_log_identity

_LEVELS = {2, 4, 5, 8, 9, 12, 16, 18, 24}
_PREFACTORS = {"1", "sqrt2", "sqrt3", "sqrt_1_plus_inv_sqrt2",
               "sqrt_1_minus_inv_sqrt2", "c_2_9", "c_4_9", "mixed"}

_PARAM_KERNELS = {
    # family -> integral kernel builder(angle) or None
    "3k_Hk": lambda a: IntegralSpec("halfline_3k", 1, 4 * mp.cos(3 * a / 2) ** 2),
    "3k_hbar": lambda a: IntegralSpec("halfline_3k", 0, 4 * mp.cos(3 * a / 2) ** 2,
                                      log_kind="map_log"),
    "3k_H2k": lambda a: IntegralSpec("halfline_3k_even", 1, 2 * mp.cos(3 * a / 2)),
    "3k_H3k_minus_H2k": None,
    "4k_Hk": lambda a: IntegralSpec("halfline_4k", 1, 4 * mp.cos(2 * a) ** 2),
    "boyadzhiev": None,
}


@dataclass(frozen=True)
class SpaceTag:
    weight: int
    level: int
    prefactor: str = "1"

    def __post_init__(self):
        if self.weight < 1:
            raise SchemaError("space weight must be positive")
        if self.level not in _LEVELS:
            raise SchemaError(f"space level must be one of {sorted(_LEVELS)}")
        if self.prefactor not in _PREFACTORS:
            raise SchemaError(f"unknown space prefactor {self.prefactor!r}")

    @staticmethod
    def from_json(obj) -> "SpaceTag":
        return SpaceTag(int(obj["weight"]), int(obj["level"]),
                        obj.get("prefactor", "1"))

    def to_json(self):
        return {"weight": self.weight, "level": self.level, "prefactor": self.prefactor}


@dataclass(frozen=True)
class IdentityRecord:
    id: str
    group: str
    space: SpaceTag
    source: dict
    series: Optional[SeriesSpec] = None
    integral: Optional[IntegralSpec] = None
    closed_form: Optional[ClosedForm] = None
    angle_grid: Optional[dict] = None     # {"family": ..., "count": n, "with_integral": bool}

    def sides_present(self) -> List[str]:
        out = []
        if self.series is not None:
            out.append("series")
        if self.integral is not None:
            out.append("integral")
        if self.closed_form is not None:
            out.append("closed_form")
        return out

    @staticmethod
    def from_json(obj: dict) -> "IdentityRecord":
        rid = obj.get("id")
        if not rid:
            raise SchemaError("record is missing an id")
        try:
            src = obj["source"]
            if not src.get("ref") or not src.get("quote"):
                raise SchemaError("source must carry nonempty 'ref' and 'quote'",
                                  record_id=rid, field="source")
            rec = IdentityRecord(
                id=rid,
                group=obj.get("group", "ungrouped"),
                space=SpaceTag.from_json(obj["space"]),
                source=src,
                series=SeriesSpec.from_json(obj["series"]) if "series" in obj else None,
                integral=IntegralSpec.from_json(obj["integral"]) if "integral" in obj else None,
                closed_form=ClosedForm.from_json(obj["closed_form"])
                if "closed_form" in obj else None,
                angle_grid=obj.get("angle_grid"),
            )
        except SchemaError:
            raise
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"malformed record: {exc}", record_id=rid) from exc
        if rec.angle_grid is not None:
            fam = rec.angle_grid.get("family")
            if fam not in _PARAM_KERNELS:
                raise SchemaError(f"unknown parametric family {fam!r}", record_id=rid,
                                  field="angle_grid")
            if int(rec.angle_grid.get("count", 0)) < 1:
                raise SchemaError("angle_grid.count must be >= 1", record_id=rid)
        elif len(rec.sides_present()) < 2:
            raise SchemaError("record needs at least two of series/integral/closed_form",
                              record_id=rid)
        if rec.closed_form is not None:
            known = set(registry().symbols())
            missing = rec.closed_form.constants_used() - known
            if missing:
                raise SchemaError(f"unresolvable constants {sorted(missing)}",
                                  record_id=rid, field="closed_form")
        return rec

    def to_json(self) -> dict:
        out = {"id": self.id, "group": self.group, "space": self.space.to_json(),
               "source": self.source}
        if self.series is not None:
            out["series"] = self.series.to_json()
        if self.integral is not None:
            out["integral"] = self.integral.to_json()
        if self.closed_form is not None:
            out["closed_form"] = self.closed_form.to_json()
        if self.angle_grid is not None:
            out["angle_grid"] = self.angle_grid
        return out


@dataclass
class VerificationReport:
    id: str
    group: str
    checked_pairs: List[dict] = field(default_factory=list)
    status: str = "pass"
    error: Optional[str] = None
    ctx: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_json(self) -> dict:
        return {"id": self.id, "group": self.group, "status": self.status,
                "error": self.error, "checked_pairs": self.checked_pairs,
                "ctx": self.ctx, "wall_time": round(self.wall_time, 3)}


def load_catalog(path=None) -> List[IdentityRecord]:
    """Parse and validate a catalog file (the bundled one when path is None)."""
    if path is None:
        text = resources.files("cmzv.data").joinpath("catalog.json").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"catalog is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "records" not in data:
        raise SchemaError("catalog must be an object with a 'records' array")
    records = [IdentityRecord.from_json(obj) for obj in data["records"]]
    seen = set()
    for rec in records:
        if rec.id in seen:
            raise SchemaError("duplicate record id", record_id=rec.id)
        seen.add(rec.id)
    if not records:
        raise SchemaError("catalog contains no records")
    return records


def _pair(name_a, val_a, name_b, val_b, threshold):
    diff = abs(mp.mpc(val_a) - mp.mpc(val_b))
    return {
        "a": name_a, "b": name_b,
        "difference": mp.nstr(diff, 3) if diff != 0 else "0",
        "digits": agreed_digits(val_a, val_b),
        "ok": bool(diff < threshold),
    }


def _angles_for(family: str, count: int):
    hi = mp.pi / 3 if family.startswith("3k") else mp.pi / 4
    return [hi * j / (count + 1) for j in range(1, count + 1)]


def verify(record: IdentityRecord, ctx: PrecisionContext = DEFAULT_CONTEXT,
           angle_count: Optional[int] = None) -> VerificationReport:
    """Evaluate every present side independently and compare pairwise."""
    t0 = time.time()
    report = VerificationReport(id=record.id, group=record.group,
                                ctx={"target_digits": ctx.target_digits,
                                     "working_digits": ctx.working_digits,
                                     "guard_digits": ctx.guard_digits})
    with ctx.workdps():
        threshold = mp.mpf(10) ** (-(ctx.target_digits - 5))
        try:
            if record.angle_grid is not None:
                fam = record.angle_grid["family"]
                count = angle_count or int(record.angle_grid.get("count", 9))
                with_integral = bool(record.angle_grid.get("with_integral", False))
                for angle in _angles_for(fam, count):
                    s_val, c_val = eval_parametric_log_identity(fam, angle, ctx)
                    tag = mp.nstr(angle, 6)
                    report.checked_pairs.append(
                        _pair(f"series@{tag}", s_val, f"closed@{tag}", c_val, threshold))
                    if with_integral and _PARAM_KERNELS[fam] is not None:
                        ispec = _PARAM_KERNELS[fam](angle)
                        i_val = eval_integral(ispec, ctx)
                        report.checked_pairs.append(
                            _pair(f"series@{tag}", s_val, f"integral@{tag}", i_val,
                                  threshold))
            else:
                values = {}
                if record.series is not None:
                    values["series"] = eval_series(record.series, ctx)
                if record.integral is not None:
                    values["integral"] = eval_integral(record.integral, ctx)
                if record.closed_form is not None:
                    values["closed_form"] = eval_closed_form(record.closed_form, ctx)
                names = list(values)
                for i in range(len(names)):
                    for j in range(i + 1, len(names)):
                        report.checked_pairs.append(
                            _pair(names[i], values[names[i]],
                                  names[j], values[names[j]], threshold))
        except CmzvError as exc:
            report.status = "fail"
            report.error = f"{type(exc).__name__}: {exc}"
            report.wall_time = time.time() - t0
            return report
    report.status = "pass" if all(p["ok"] for p in report.checked_pairs) else "fail"
    report.wall_time = time.time() - t0
    return report


def _verify_worker(payload):
    idx, rec_json, ctx_args, angle_count = payload
    record = IdentityRecord.from_json(rec_json)
    ctx = PrecisionContext(*ctx_args)
    return idx, verify(record, ctx, angle_count).to_json()


def summarize(reports: List[VerificationReport]) -> dict:
    groups = {}
    for rep in reports:
        g = groups.setdefault(rep.group, {"passed": 0, "failed": 0})
        g["passed" if rep.status == "pass" else "failed"] += 1
    passed = sum(1 for r in reports if r.status == "pass")
    return {"total": len(reports), "passed": passed,
            "failed": len(reports) - passed,
            "all_pass": passed == len(reports), "groups": groups}


def verify_all(records: List[IdentityRecord], ctx: PrecisionContext = DEFAULT_CONTEXT,
               parallelism: int = 1, angle_count: Optional[int] = None):
    """Verify records (in catalog order); returns (reports, summary).

    The aggregate is independent of the parallelism degree: workers are pure
    and reports are merged back in input order.
    """
    if parallelism <= 1 or len(records) <= 1:
        reports = [verify(r, ctx, angle_count) for r in records]
        return reports, summarize(reports)
    ctx_args = (ctx.working_digits, ctx.target_digits, ctx.guard_digits)
    payloads = [(i, r.to_json(), ctx_args, angle_count) for i, r in enumerate(records)]
    seen = {}
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        for idx, rep_json in pool.map(_verify_worker, payloads):
            seen[idx] = rep_json
    reports = []
    for i, rec in enumerate(records):
        d = seen[i]
        reports.append(VerificationReport(
            id=d["id"], group=d["group"], checked_pairs=d["checked_pairs"],
            status=d["status"], error=d["error"], ctx=d["ctx"],
            wall_time=d["wall_time"]))
    return reports, summarize(reports)


def perturb_closed_form(record: IdentityRecord, delta=Fraction(1, 10 ** 6),
                        flip_sign: bool = False) -> IdentityRecord:
    """Copy of a record with its first rational closed-form leaf perturbed.

    Used by soundness checks: the perturbed record must fail verification.
    """
    if record.closed_form is None:
        raise SchemaError("record has no closed form to perturb", record_id=record.id)
    done = {"flag": False}

    def walk(node: ClosedForm) -> ClosedForm:
        if not done["flag"]:
            if node.kind == "rational":
                done["flag"] = True
                q = node.payload[0]
                return ClosedForm.rational(-q if flip_sign else q + delta)
            if node.kind == "surd_scale":
                done["flag"] = True
                q, d = node.payload
                return ClosedForm.surd_scale(-q if flip_sign else q + delta, d)
        if node.kind in ("sum", "product"):
            return ClosedForm(node.kind, tuple(walk(t) for t in node.payload))
        if node.kind == "power":
            return ClosedForm("power", (walk(node.payload[0]), node.payload[1]))
        return node

    mutated = walk(record.closed_form)
    if not done["flag"]:
        raise SchemaError("closed form has no rational leaf to perturb",
                          record_id=record.id)
    return IdentityRecord(id=record.id, group=record.group, space=record.space,
                          source=record.source, series=record.series,
                          integral=record.integral, closed_form=mutated,
                          angle_grid=record.angle_grid)
