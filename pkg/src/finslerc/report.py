"""Run orchestration and report emission.

Assembles per-point tensor dumps, axiom residuals, classification verdicts
and theorem records into one report object, then serializes it with a fixed
key order and 17-significant-digit float formatting so identical runs emit
byte-identical JSON.

Exit-code contract: 0 when no invariant violation and no engine bug was
flagged (classification negatives are facts about the metric, not errors);
1 on invariant violations or engine bugs; 2 on configuration or metric
errors (handled by the CLI).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .cartan import connection_at, hv_and_v_curvature
from .classify import DEFAULT_TOL, classify_point
from .errors import ConfigError
from .fdcheck import FDConfig, fd_covariant_commutator, oracle_connection
from .special import special_tensors

__all__ = ["RunConfig", "run", "emit_report", "sample_points",
           "INVARIANT_THRESHOLDS", "CONVENTIONS"]

CONVENTIONS = {
    "ricci_trace": "Ric_jl = R^i_jil (equals (n-1)K g on constant curvature K)",
    "curvature_sign": "R_ijkl = K (g_ik g_jl - g_il g_jk) on constant curvature",
    "array_dictionary": "[B(X,Y)Z]^i = B^i_jkl Z^j Y^k X^l; scalar form "
                        "B(X,Y,Z,W) = B_ijkl W^i Z^j Y^k X^l",
    "recurrence_inner_product": "Frobenius in a g-orthonormal frame",
    "jet_truncation_order": "4 for tensors, 5 when one horizontal derivative "
                            "of curvature is required",
}

# residuals above these thresholds make the run exit non-zero
INVARIANT_THRESHOLDS = {
    "g_symmetry": 1e-10,
    "hh_torsion": 1e-12,
    "cartan_total_symmetry": 1e-10,
    "cartan_annihilates_eta": 1e-9,
    "deflection": 1e-10,
    "h_metricity": 1e-10,
    "v_metricity": 1e-10,
    "euler_g": 1e-9,
    "euler_N": 1e-9,
    "euler_spray": 1e-9,
    "y_contraction_Rhat": 1e-9,
    "R_antisym_kl": 1e-10,
    "scalar_recurrence": 1e-6,
    "oracle_g": 1e-5,
    "oracle_N": 1e-5,
    "oracle_gamma": 1e-5,
    "oracle_R": 1e-5,
}

ALL_CHECKS = ("tensors", "axioms", "classify", "theorems", "oracle")


@dataclass
class RunConfig:
    """Everything one reproducible run needs."""

    metric: dict                      # metric JSON object
    points: Optional[list] = None     # explicit [(x, y), ...]
    seed: int = 0
    count: int = 5
    box: float = 0.5
    checks: tuple = ALL_CHECKS
    tol: float = DEFAULT_TOL
    fmt: str = "json"

    def __post_init__(self):
        if self.points is None and self.count < 1:
            raise ConfigError("count must be >= 1")
        bad = [c for c in self.checks if c not in ALL_CHECKS]
        if bad:
            raise ConfigError(f"unknown checks: {bad}")
        if self.fmt not in ("json", "text"):
            raise ConfigError(f"unknown format {self.fmt!r}")


def sample_points(spec, seed, count, box=0.5):
    """Deterministic admissible sample: x uniform in a box, y uniform on the
    sphere scaled by uniform [0.5, 2], rejection-resampled against the
    domain guard."""
    rng = np.random.default_rng(seed)
    pts = []
    attempts = 0
    while len(pts) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise ConfigError("could not sample admissible points "
                              f"({spec.guard_description})")
        x = rng.uniform(-box, box, spec.dim)
        y = rng.standard_normal(spec.dim)
        norm = float(np.linalg.norm(y))
        if norm < 1e-9:
            continue
        y = y / norm * rng.uniform(0.5, 2.0)
        if spec.admissible(x, y):
            pts.append((x, y))
    return pts


def _tensor_dump(conn, st):
    hvv = hv_and_v_curvature(conn)
    return {
        "g": conn.g.value.tolist(),
        "g_inv": conn.g_inv.value.tolist(),
        "spray": conn.spray.value.tolist(),
        "N": conn.N.value.tolist(),
        "gamma": conn.gamma.value.tolist(),
        "cartan": conn.cartan.value.tolist(),
        "R": st.R.value.tolist(),
        "Rhat": st.Rhat.value.tolist(),
        "P": hvv.P.value.tolist(),
        "S": hvv.S.value.tolist(),
        "ric": st.ric.value.tolist(),
        "ric_o": st.ric_o.value.tolist(),
        "r": float(st.r.value),
        "concircular": st.C.value.tolist(),
        "projective": st.P_proj.value.tolist(),
        "m_projective": st.H_mproj.value.tolist(),
    }


def _oracle_residuals(spec, point, conn, st):
    cfg = FDConfig()
    oc = oracle_connection(spec, point, cfg)
    cm = fd_covariant_commutator(spec, point, cfg)

    def rel(a, b):
        return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))

    return {
        "oracle_g": rel(oc["g"], conn.g.value),
        "oracle_N": rel(oc["N"], conn.N.value),
        "oracle_gamma": rel(oc["gamma"], conn.gamma.value),
        "oracle_R": rel(cm["R"], st.R.value),
    }


def _class_record(v):
    rec = {"verdict": v.status, "residual": float(v.residual)}
    ex = v.extracted
    if "alpha" in ex:
        rec["alpha"] = float(ex["alpha"])
    if ex.get("A") is not None:
        rec["A"] = [float(a) for a in np.atleast_1d(ex["A"])]
    if "symmetric" in ex:
        rec["symmetric"] = bool(ex["symmetric"])
    if "reason" in ex:
        rec["reason"] = str(ex["reason"])
    return rec


def _theorem_record(t):
    return {"status": t.status, "detail": _plain(t.detail)}


def _plain(obj):
    """Recursively convert numpy containers to plain Python."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def run(cfg, spec=None):
    """Execute one run; returns (exit_code, report_dict).

    ``spec`` may be passed directly (the CLI builds it from cfg.metric).
    """
    from .dsl import metric_from_json

    if spec is None:
        spec = metric_from_json(cfg.metric)
    if cfg.points is not None:
        points = [(np.asarray(x, float), np.asarray(y, float))
                  for x, y in cfg.points]
        for x, y in points:
            if not spec.admissible(x, y):
                raise ConfigError(
                    f"point x={x.tolist()}, y={y.tolist()} violates the "
                    f"domain guard ({spec.guard_description})")
    else:
        points = sample_points(spec, cfg.seed, cfg.count, cfg.box)

    want = set(cfg.checks)
    need_classify = bool(want & {"classify", "theorems"})
    order = 5 if need_classify else 4

    point_records = []
    engine_bug = False
    invariant_violation = False
    for idx, (x, y) in enumerate(points):
        rec = {"x": [float(v) for v in x], "y": [float(v) for v in y]}
        rng = np.random.default_rng((cfg.seed, idx))
        if need_classify:
            pc = classify_point(spec, (x, y), tol=cfg.tol, order=order, rng=rng,
                                with_theorems="theorems" in want)
            conn = pc.special.conn
            st = pc.special
        else:
            conn = connection_at(spec, (x, y), order=order)
            st = special_tensors(conn) if want & {"tensors", "oracle"} else None
            pc = None
        if "tensors" in want:
            rec["tensors"] = _tensor_dump(conn, st)
        invariants = {}
        if "axioms" in want:
            invariants.update(pc.invariants if pc is not None
                              else conn.axiom_residuals())
        if "oracle" in want:
            invariants.update(_oracle_residuals(spec, conn.point, conn, st))
        rec["invariants"] = {k: float(v) for k, v in sorted(invariants.items())}
        for name, value in invariants.items():
            if value > INVARIANT_THRESHOLDS.get(name, math.inf):
                invariant_violation = True
        if pc is not None:
            rec["classes"] = {name: _class_record(v)
                              for name, v in pc.verdicts.items()}
            if "theorems" in want:
                rec["theorems"] = {name: _theorem_record(t)
                                   for name, t in pc.theorems.items()}
                for name in ("thm_3_4", "thm_3_5", "thm_3_6"):
                    if pc.theorems[name].status == "violated":
                        engine_bug = True
        point_records.append(rec)

    aggregate = _aggregate(point_records)
    aggregate["engine_bug"] = engine_bug
    aggregate["invariant_violation"] = invariant_violation
    exit_code = 1 if (engine_bug or invariant_violation) else 0
    aggregate["exit_code"] = exit_code

    report = {
        "metadata": {
            "metric": _plain(spec.describe()),
            "metric_name": spec.name,
            "conventions": CONVENTIONS,
            "tolerances": {"classification": float(cfg.tol),
                           "invariants": {k: float(v) for k, v in
                                          sorted(INVARIANT_THRESHOLDS.items())}},
            "versions": {"finslerc": __version__, "numpy": np.__version__},
            "seed": int(cfg.seed),
            "checks": sorted(want),
        },
        "points": point_records,
        "aggregate": aggregate,
    }
    return exit_code, report


def _aggregate(point_records):
    classes = {}
    theorems = {}
    inv_worst = {}
    for rec in point_records:
        for name, v in rec.get("classes", {}).items():
            slot = classes.setdefault(name, {"pass": 0, "fail": 0,
                                             "inapplicable": 0,
                                             "worst_residual": 0.0})
            slot[v["verdict"]] += 1
            slot["worst_residual"] = max(slot["worst_residual"], v["residual"])
        for name, t in rec.get("theorems", {}).items():
            slot = theorems.setdefault(name, {"holds": 0, "vacuous": 0,
                                              "violated": 0})
            slot[t["status"]] += 1
        for name, v in rec.get("invariants", {}).items():
            inv_worst[name] = max(inv_worst.get(name, 0.0), v)

    def overall(slot):
        if slot["fail"]:
            return "fail"
        if slot["pass"] and not slot["inapplicable"]:
            return "pass"
        if slot["pass"]:
            return "mixed"
        return "inapplicable"

    agg_classes = {name: {"verdict": overall(slot), **slot}
                   for name, slot in sorted(classes.items())}
    agg_theorems = {}
    for name, slot in sorted(theorems.items()):
        if slot["violated"]:
            status = "violated"
        elif slot["holds"]:
            status = "holds"
        else:
            status = "vacuous"
        agg_theorems[name] = {"status": status, **slot}
    return {"classes": agg_classes, "theorems": agg_theorems,
            "invariants_worst": {k: float(v) for k, v in sorted(inv_worst.items())}}


# ----------------------------------------------------------------------
# Serialization: fixed key order (insertion order of the dicts above) and
# %.17g floats, so identical runs are byte-identical.


def _emit(value, out):
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite float in report")
        out.append(format(value, ".17g"))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, v in enumerate(value):
            if i:
                out.append(",")
            _emit(v, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, (k, v) in enumerate(value.items()):
            if i:
                out.append(",")
            out.append(json.dumps(str(k)))
            out.append(":")
            _emit(v, out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialize {type(value)!r}")


def emit_report(report, fmt="json"):
    """Serialize a report to bytes (deterministic for identical inputs)."""
    if fmt == "json":
        out = []
        _emit(report, out)
        return ("".join(out) + "\n").encode()
    if fmt == "text":
        return _emit_text(report).encode()
    raise ConfigError(f"unknown format {fmt!r}")


def _emit_text(report):
    lines = []
    meta = report["metadata"]
    lines.append(f"metric: {meta['metric_name']}   points: {len(report['points'])}"
                 f"   seed: {meta['seed']}   tol: {meta['tolerances']['classification']:g}")
    agg = report["aggregate"]
    if agg["classes"]:
        lines.append("")
        lines.append(f"{'class':34s}{'verdict':14s}{'pass/fail/n.a.':16s}worst residual")
        for name, slot in agg["classes"].items():
            counts = f"{slot['pass']}/{slot['fail']}/{slot['inapplicable']}"
            lines.append(f"{name:34s}{slot['verdict']:14s}{counts:16s}"
                         f"{slot['worst_residual']:.3e}")
    if agg["theorems"]:
        lines.append("")
        lines.append(f"{'theorem':34s}{'status':14s}holds/vacuous/violated")
        for name, slot in agg["theorems"].items():
            counts = f"{slot['holds']}/{slot['vacuous']}/{slot['violated']}"
            lines.append(f"{name:34s}{slot['status']:14s}{counts}")
    if agg["invariants_worst"]:
        lines.append("")
        lines.append(f"{'invariant':34s}{'worst':14s}threshold")
        for name, v in agg["invariants_worst"].items():
            thr = INVARIANT_THRESHOLDS.get(name)
            mark = "" if thr is None or v <= thr else "   VIOLATION"
            lines.append(f"{name:34s}{v:<14.3e}"
                         f"{thr if thr is not None else float('nan'):.1e}{mark}")
    lines.append("")
    lines.append(f"engine_bug: {agg['engine_bug']}   "
                 f"invariant_violation: {agg['invariant_violation']}   "
                 f"exit: {agg['exit_code']}")
    return "\n".join(lines) + "\n"
