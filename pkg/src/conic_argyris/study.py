"""Convergence studies on independently generated meshes."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .conic import Conic
from .interpolator import interpolate
from .mesh import generate_disk_mesh, shape_regularity, inscribed_disk
from .norms import error_report
from .testfunctions import TestFunction
from .tolerances import ORDER_SLACK

CSV_COLUMNS = ["level", "n_boundary", "h", "e_L2", "e_H1", "e_H2", "order_L2", "order_H1", "order_H2"]
EXPECTED_ORDERS = {"L2": 6.0, "H1": 5.0, "H2": 4.0}


def observed_order(e1: float, e2: float, h1: float, h2: float) -> float:
    return math.log(e1 / e2) / math.log(h1 / h2)


@dataclass
class StudyResult:
    rows: list[dict]
    slack: float = ORDER_SLACK
    fn_id: str = ""
    extra: list[dict] = field(default_factory=list)

    def finest_orders(self) -> dict[str, float]:
        last = self.rows[-1]
        return {k: last[f"order_{k}"] for k in EXPECTED_ORDERS}

    def checks(self) -> dict[str, tuple[float, float, bool]]:
        """norm -> (observed order on finest pair, threshold, pass)."""
        out = {}
        for k, v in self.finest_orders().items():
            thr = EXPECTED_ORDERS[k] - self.slack
            out[k] = (v, thr, v is not None and v >= thr)
        return out

    @property
    def ok(self) -> bool:
        return all(p for _, _, p in self.checks().values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: ("" if r[k] is None else repr(r[k])) for k in CSV_COLUMNS})
        return buf.getvalue()

    def to_json(self) -> str:
        checks = {k: {"observed": o, "threshold": t, "pass": p} for k, (o, t, p) in self.checks().items()}
        payload = {"fn": self.fn_id, "levels": [dict(r, **e) for r, e in zip(self.rows, self.extra)], "checks": checks, "pass": self.ok}
        return json.dumps(payload, indent=1) + "\n"


def run_convergence(q: Conic, levels: list[int], fn: TestFunction, threads: int = 1, slack: float = ORDER_SLACK, corner_angle: float = 0.0) -> StudyResult:
    if len(levels) < 2 or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("need at least two strictly increasing resolution levels")
    rows, extra = [], []
    prev = None
    for i, n in enumerate(levels):
        mesh = generate_disk_mesh(q, n, corner_angle)
        s = interpolate(mesh, fn.data, threads=threads)
        rep = error_report(s, fn.data)
        errs = {"L2": rep.norm(0), "H1": rep.norm(1), "H2": rep.norm(2)}
        row = {"level": i, "n_boundary": n, "h": rep.h, "e_L2": errs["L2"], "e_H1": errs["H1"], "e_H2": errs["H2"]}
        for k in EXPECTED_ORDERS:
            row[f"order_{k}"] = None if prev is None else observed_order(prev[1][k], errs[k], prev[0], rep.h)
        rows.append(row)
        disks = [s.disks.get(t) or inscribed_disk(mesh, t) for t in range(len(mesh.triangles))]
        extra.append({"R": shape_regularity(mesh, disks), "n_triangles": len(mesh.triangles), "by_class": rep.by_class})
        prev = (rep.h, errs)
    return StudyResult(rows, slack, fn.id, extra)
