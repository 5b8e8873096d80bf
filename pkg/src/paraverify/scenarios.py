"""Scenario registry, document schema and the verification battery.

A scenario is one self-contained JSON document naming charts, metrics, an
optional structure, an optional immersion, distribution readings and warped
configuration, together with expected verdicts.  ``run_scenario`` executes the
applicable check battery deterministically for a fixed seed and assembles a
:class:`~.report.VerificationReport`.
"""

from __future__ import annotations

import json
import math
from functools import cache

import numpy as np
from jsonschema import Draft202012Validator

from . import expressions as ex
from . import manifold as mf
from . import paracontact as pc
from . import submanifold as sm
from . import warped as wp
from .errors import ParaverifyError, ScenarioError
from .report import CheckResult, VerificationReport, VerifyConfig

ALL_GROUPS = (
    "metric-properties",
    "christoffel-table",
    "structure",
    "classification",
    "frames",
    "xi",
    "identities",
    "submanifold-class",
    "distributions",
    "warped-shape",
    "splitting",
    "warped-connection",
    "leaves",
)

_box_entry = {
    "type": "array", "minItems": 2, "maxItems": 2,
    "items": {"type": ["number", "null"]},
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["name", "charts"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "charts": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "coords", "box"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "coords": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    "box": {"type": "array", "items": _box_entry, "minItems": 1},
                    "domain": {"type": "array", "items": _box_entry},
                },
            },
        },
        "metrics": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "chart", "entries", "signature"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "chart": {"type": "string"},
                    "entries": {"type": "array", "items": {"type": "string"}},
                    "signature": {
                        "type": "array", "items": {"type": "integer"},
                        "minItems": 2, "maxItems": 2,
                    },
                },
            },
        },
        "structure": {
            "type": "object",
            "required": ["chart", "metric", "phi", "xi", "eta"],
            "additionalProperties": False,
            "properties": {
                "chart": {"type": "string"},
                "metric": {"type": "string"},
                "phi": {"type": "array", "items": {"type": "string"}},
                "xi": {"type": "array", "items": {"type": "string"}},
                "eta": {"type": "array", "items": {"type": "string"}},
            },
        },
        "immersion": {
            "type": "object",
            "required": ["source", "ambient", "components"],
            "additionalProperties": False,
            "properties": {
                "source": {"type": "string"},
                "ambient": {"type": "string"},
                "components": {"type": "array", "items": {"type": "string"}},
            },
        },
        "distributions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "invariant", "anti_invariant"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "invariant": {"type": "array",
                                  "items": {"type": "array", "items": {"type": "string"}}},
                    "anti_invariant": {"type": "array",
                                       "items": {"type": "array", "items": {"type": "string"}}},
                    "xi": {"type": "array", "items": {"type": "string"}},
                    "assert": {"type": "boolean"},
                },
            },
        },
        "expected_induced_metric": {
            "type": "object",
            "required": ["entries", "signature"],
            "additionalProperties": False,
            "properties": {
                "entries": {"type": "array", "items": {"type": "string"}},
                "signature": {"type": "array", "items": {"type": "integer"},
                              "minItems": 2, "maxItems": 2},
            },
        },
        "expected_christoffel": {
            "type": "object",
            "required": ["metric", "nonzero"],
            "additionalProperties": False,
            "properties": {
                "metric": {"type": "string"},
                "nonzero": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["upper", "lower", "expr"],
                        "additionalProperties": False,
                        "properties": {
                            "upper": {"type": "integer"},
                            "lower": {"type": "array", "items": {"type": "integer"},
                                      "minItems": 2, "maxItems": 2},
                            "expr": {"type": "string"},
                        },
                    },
                },
            },
        },
        "warped_partition": {
            "type": "object",
            "required": ["base", "fiber"],
            "additionalProperties": False,
            "properties": {
                "base": {"type": "array", "items": {"type": "string"}},
                "fiber": {"type": "array", "items": {"type": "string"}},
                "candidates": {"type": "array", "items": {"type": "string"}},
                "declared_warp": {"type": "string"},
            },
        },
        "warped_product": {
            "type": "object",
            "required": ["base_chart", "base_metric", "fiber_chart", "fiber_metric"],
            "additionalProperties": False,
            "properties": {
                "base_chart": {"type": "string"},
                "base_metric": {"type": "string"},
                "fiber_chart": {"type": "string"},
                "fiber_metric": {"type": "string"},
                "warp_base": {"type": "string"},
                "warp_fiber": {"type": "string"},
                "xi_factor": {"type": ["string", "null"], "enum": ["base", "fiber", None]},
                "leaf_checks": {"type": "boolean"},
            },
        },
        "expected": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "structure": {"type": "string"},
                "submanifold": {"type": "string"},
                "xi_tangent": {"type": "boolean"},
                "invariant_rank": {"type": "integer"},
                "para_sasakian_residual_above": {"type": "number"},
                "base_leaf": {"type": "string"},
                "fiber_leaf": {"type": "string"},
            },
        },
        "checks": {"type": "array", "items": {"type": "string", "enum": list(ALL_GROUPS)}},
        "sampling": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
                "tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}

_validator = Draft202012Validator(SCHEMA)


def _interval(pair):
    lo = -math.inf if pair[0] is None else float(pair[0])
    hi = math.inf if pair[1] is None else float(pair[1])
    return lo, hi


class Scenario:
    """A validated scenario document with lazily built geometric objects."""

    def __init__(self, data: dict):
        errors = sorted(_validator.iter_errors(data), key=lambda e: list(e.absolute_path))
        if errors:
            err = errors[0]
            path = "/".join(str(p) for p in err.absolute_path) or "<root>"
            raise ScenarioError(f"scenario schema violation at {path}: {err.message}")
        self.data = data
        self._charts: dict[str, mf.Chart] = {}
        self._boxes: dict[str, list] = {}
        self._metrics: dict[str, mf.MetricField] = {}
        try:
            self._build()
        except ScenarioError:
            raise
        except Exception as err:
            raise ScenarioError(f"scenario {data.get('name')!r} failed to build: {err}") from err

    @property
    def name(self) -> str:
        return self.data["name"]

    @property
    def description(self) -> str:
        return self.data.get("description", "")

    def _build(self) -> None:
        for cd in self.data["charts"]:
            coords = tuple(cd["coords"])
            if len(cd["box"]) != len(coords):
                raise ScenarioError(f"chart {cd['name']!r}: box length != coords length")
            domain = cd.get("domain")
            if domain is None:
                domain = [[None, None]] * len(coords)
            bounds = [_interval(p) for p in domain]
            chart = mf.Chart(cd["name"], coords,
                             tuple(b[0] for b in bounds), tuple(b[1] for b in bounds))
            box = [_interval(p) for p in cd["box"]]
            for (lo, hi), (dlo, dhi) in zip(box, bounds):
                if not (math.isfinite(lo) and math.isfinite(hi)) or not (dlo <= lo < hi <= dhi):
                    raise ScenarioError(
                        f"chart {cd['name']!r}: sampling box must be finite and inside the domain")
            self._charts[cd["name"]] = chart
            self._boxes[cd["name"]] = box
        for md in self.data.get("metrics", []):
            chart = self.chart(md["chart"])
            dim = chart.dim
            if len(md["entries"]) != dim * dim:
                raise ScenarioError(
                    f"metric {md['name']!r}: needs {dim * dim} row-major entries")
            rows = [md["entries"][i * dim:(i + 1) * dim] for i in range(dim)]
            self._metrics[md["name"]] = mf.MetricField(chart, rows, tuple(md["signature"]))
        # eagerly build the rest so reference/parse errors surface at load time
        self.structure()
        self.immersion()
        self.distributions()

    def chart(self, name: str) -> mf.Chart:
        if name not in self._charts:
            raise ScenarioError(f"unknown chart {name!r}")
        return self._charts[name]

    def box(self, name: str) -> list:
        return self._boxes[name]

    def metric(self, name: str) -> mf.MetricField:
        if name not in self._metrics:
            raise ScenarioError(f"unknown metric {name!r}")
        return self._metrics[name]

    def structure(self) -> pc.ParacontactStructure | None:
        sd = self.data.get("structure")
        if sd is None:
            return None
        chart = self.chart(sd["chart"])
        dim = chart.dim
        if len(sd["phi"]) != dim * dim or len(sd["xi"]) != dim or len(sd["eta"]) != dim:
            raise ScenarioError("structure component counts do not match the chart dimension")
        phi_rows = [sd["phi"][i * dim:(i + 1) * dim] for i in range(dim)]
        return pc.ParacontactStructure(
            chart,
            mf.TensorField(chart, 1, 1, phi_rows),
            mf.vector_field(chart, sd["xi"]),
            mf.covector_field(chart, sd["eta"]),
            self.metric(sd["metric"]),
        )

    def immersion(self) -> sm.Immersion | None:
        idata = self.data.get("immersion")
        if idata is None:
            return None
        source = self.chart(idata["source"])
        structure = self.structure()
        if structure is None or structure.chart.name != idata["ambient"]:
            raise ScenarioError("immersion scenarios need a structure on the ambient chart")
        if len(idata["components"]) != structure.chart.dim:
            raise ScenarioError("immersion needs one component per ambient coordinate")
        return sm.immersion(source, structure.metric, idata["components"], structure)

    def distributions(self) -> list[tuple[sm.DistributionSpec, bool]]:
        imm = self.immersion()
        out = []
        for dd in self.data.get("distributions", []):
            src = imm.source
            spec = sm.DistributionSpec(
                dd["name"],
                invariant=[mf.vector_field(src, comps) for comps in dd["invariant"]],
                anti_invariant=[mf.vector_field(src, comps) for comps in dd["anti_invariant"]],
                xi=mf.vector_field(src, dd["xi"]) if "xi" in dd else None,
            )
            out.append((spec, dd.get("assert", True)))
        return out

    def groups(self) -> tuple[str, ...]:
        return tuple(self.data.get("checks", ALL_GROUPS))

    def config(self, override: VerifyConfig | None = None) -> VerifyConfig:
        sampling = self.data.get("sampling", {})
        base = VerifyConfig(
            samples=sampling.get("n", 100),
            tol=sampling.get("tol", 1e-8),
            seed=sampling.get("seed", 42),
        )
        return override if override is not None else base

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True)


def load_scenario_data(data: dict) -> Scenario:
    return Scenario(data)


def load_scenario_file(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as err:
        raise ScenarioError(f"{path}: not valid JSON ({err})") from err
    return Scenario(data)


# -- battery -------------------------------------------------------------------


def _points(scenario: Scenario, chart_name: str, cfg: VerifyConfig, salt: int) -> np.ndarray:
    rng = np.random.default_rng([cfg.seed, salt])
    return mf.sample_points(scenario.box(chart_name), cfg.samples, rng)


def _pseudo_fields(chart: mf.Chart, seed: int, count: int = 3) -> list[mf.TensorField]:
    """Deterministic smooth vector fields with affine+sine components."""
    rng = np.random.default_rng([seed, 31])
    fields = []
    for _ in range(count):
        comps = []
        for i in range(chart.dim):
            c0, c1, c2 = rng.uniform(-1, 1, 3)
            j = int(rng.integers(chart.dim))
            comps.append(
                ex.Sum(ex.Constant(round(c0, 6)),
                       ex.Sum(ex.Product(ex.Constant(round(c1, 6)), ex.Coordinate(j, chart.coords[j])),
                              ex.Product(ex.Constant(round(c2, 6)),
                                         ex.Call("sin", ex.Coordinate(i, chart.coords[i])))))
            )
        fields.append(mf.TensorField(chart, 1, 0, comps))
    return fields


def _metric_property_checks(
    label: str, metric: mf.MetricField, points: np.ndarray, cfg: VerifyConfig
) -> list[CheckResult]:
    X, Y, Z = _pseudo_fields(metric.chart, cfg.seed)
    sig_ok = 0.0
    compat = 0.0
    torsion = 0.0
    for p in points:
        metric.check_signature(p)
        compat = max(compat, mf.metric_compatibility_residual(metric, X, Y, Z, p))
        torsion = max(torsion, mf.torsion_residual(metric, X, Y, p))
    n = len(points)
    tol = cfg.scaled(1e-8)
    return [
        CheckResult(f"{label}:signature", "eigenvalue signs match the declared signature at all samples",
                    sig_ok, tol, n),
        CheckResult(f"{label}:metric-compatibility",
                    "X g(Y,Z) = g(nabla_X Y, Z) + g(Y, nabla_X Z)", compat, tol, n),
        CheckResult(f"{label}:torsion-free", "nabla_X Y - nabla_Y X = [X, Y]", torsion, tol, n),
    ]


def _christoffel_table_check(
    scenario: Scenario, cfg: VerifyConfig, report: VerificationReport
) -> None:
    spec = scenario.data.get("expected_christoffel")
    if spec is None:
        return
    metric = scenario.metric(spec["metric"])
    chart = metric.chart
    points = _points(scenario, chart.name, cfg, 11)
    exprs = {}
    for item in spec["nonzero"]:
        k = item["upper"]
        i, j = item["lower"]
        e = chart.parse(item["expr"])
        exprs[(k, i, j)] = e
        exprs[(k, j, i)] = e
    worst = 0.0
    for p in points:
        gamma = mf.christoffel(metric, p)
        expected = np.zeros_like(gamma)
        for (k, i, j), e in exprs.items():
            expected[k, i, j] = ex.eval_value(e, p)
        worst = max(worst, float(np.max(np.abs(gamma - expected))))
    report.add(CheckResult(
        "christoffel-table",
        "every connection coefficient matches the expected table (zeros included)",
        worst, cfg.scaled(1e-9), len(points)))


def run_scenario(scenario: Scenario | str, cfg: VerifyConfig | None = None) -> VerificationReport:
    """Execute the applicable battery: metric properties, structure axioms and
    classification, immersion frames and identities, distribution readings,
    warped criteria and splitting detection."""
    if isinstance(scenario, str):
        scenario = get_scenario(scenario)
    cfg = scenario.config(cfg)
    report = VerificationReport(
        scenario.name,
        config={"samples": cfg.samples, "tol": cfg.tol, "seed": cfg.seed},
    )
    try:
        _run_battery(scenario, cfg, report)
    except ParaverifyError as err:
        report.add(CheckResult(
            "scenario-error", f"battery aborted: {err}", math.inf, 0.0, 0))
        report.verdicts["error"] = str(err)
    return report


def _run_battery(scenario: Scenario, cfg: VerifyConfig, report: VerificationReport) -> None:
    groups = scenario.groups()
    expected = scenario.data.get("expected", {})

    if "metric-properties" in groups:
        for md in scenario.data.get("metrics", []):
            metric = scenario.metric(md["name"])
            pts = _points(scenario, metric.chart.name, cfg, 7)
            report.extend(_metric_property_checks(md["name"], metric, pts, cfg))

    if "christoffel-table" in groups:
        _christoffel_table_check(scenario, cfg, report)

    structure = scenario.structure()
    structure_verdict = None
    if structure is not None and "structure" in groups:
        pts = _points(scenario, structure.chart.name, cfg, 13)
        report.extend(pc.check_almost_paracontact_metric(structure, pts, cfg))
        if "classification" in groups:
            cls = pc.classify_structure(structure, pts, cfg)
            structure_verdict = cls.verdict
            report.extend(cls.checks)
            report.verdicts["structure"] = cls.verdict
            if "structure" in expected:
                report.add(CheckResult(
                    "expected-structure-verdict",
                    f"classification is {expected['structure']!r}",
                    0.0 if cls.verdict == expected["structure"] else 1.0,
                    0.5, len(pts),
                    note=f"got {cls.verdict!r}"))
            if "para_sasakian_residual_above" in expected:
                sas = [c for c in cls.checks if c.check == "para-sasakian-identity"][0]
                report.add(CheckResult(
                    "para-sasakian-discrimination",
                    "the para-Sasakian identity genuinely fails on this structure",
                    sas.residual, float(expected["para_sasakian_residual_above"]),
                    len(pts), mode="above"))

    imm = scenario.immersion()
    if imm is not None:
        _immersion_battery(scenario, imm, structure_verdict, cfg, report, groups, expected)

    if scenario.data.get("warped_product"):
        _warped_product_battery(scenario, cfg, report, groups, expected)


def _immersion_battery(scenario, imm, structure_verdict, cfg, report, groups, expected):
    src = imm.source.name
    pts = _points(scenario, src, cfg, 17)

    if "frames" in groups:
        report.extend(sm.gauss_weingarten_checks(imm, pts, cfg))
        exp_ind = scenario.data.get("expected_induced_metric")
        if exp_ind is not None:
            dim = imm.source.dim
            rows = [exp_ind["entries"][i * dim:(i + 1) * dim] for i in range(dim)]
            expected_metric = mf.MetricField(imm.source, rows, tuple(exp_ind["signature"]))
            worst = 0.0
            for p in pts:
                worst = max(worst, float(np.max(np.abs(
                    sm.induced_metric(imm, p) - expected_metric.matrix(p)))))
            report.add(CheckResult(
                "induced-metric",
                "frame Gram matrix matches the expected induced metric entrywise",
                worst, cfg.scaled(1e-9), len(pts)))

    cls = None
    if "submanifold-class" in groups:
        cls = sm.classify_submanifold(imm, pts, cfg)
        report.extend(cls.checks)
        report.verdicts["submanifold"] = cls.verdict
        report.verdicts["xi_tangent"] = cls.xi_tangent
        report.verdicts["invariant_rank"] = cls.invariant_rank
        if "submanifold" in expected:
            report.add(CheckResult(
                "expected-submanifold-verdict",
                f"classification is {expected['submanifold']!r}",
                0.0 if cls.verdict == expected["submanifold"] else 1.0, 0.5, len(pts),
                note=f"got {cls.verdict!r}"))
        if "xi_tangent" in expected:
            report.add(CheckResult(
                "expected-xi-tangency",
                f"xi tangency is {expected['xi_tangent']}",
                0.0 if cls.xi_tangent == expected["xi_tangent"] else 1.0, 0.5, len(pts),
                note=f"got {cls.xi_tangent}"))
            if not expected["xi_tangent"]:
                report.note(
                    "xi is not tangent along this immersion; tangency-dependent "
                    "checks are skipped and the mixed-class criteria are inapplicable")
        if "invariant_rank" in expected:
            report.add(CheckResult(
                "expected-invariant-rank",
                f"rank of the invariant projector is {expected['invariant_rank']}",
                0.0 if cls.invariant_rank == expected["invariant_rank"] else 1.0,
                0.5, len(pts), note=f"got {cls.invariant_rank}"))

    xi_tangent = cls.xi_tangent if cls is not None else True
    if "xi" in groups and xi_tangent:
        report.extend(sm.xi_tangency_checks(imm, pts, cfg))

    if "identities" in groups:
        if structure_verdict == pc.PARACOSYMPLECTIC and xi_tangent:
            n_id = min(cfg.samples, 50)
            report.extend(sm.check_fundamental_identities(imm, pts[:n_id], cfg))
        else:
            report.add(CheckResult(
                "fundamental-identities",
                "covariant-derivative identities for t and n", 0.0, 1.0, 0, mode="info",
                note="inapplicable: ambient structure tensors are not parallel "
                     "or xi is not tangent"))

    part = scenario.data.get("warped_partition")
    candidate = None
    declared = None
    if part is not None:
        declared = part.get("declared_warp")
        if declared is not None:
            candidate = imm.source.parse(declared)

    for dist, asserted in scenario.distributions():
        if "distributions" in groups:
            report.extend(sm.distribution_checks(imm, dist, pts, cfg, assert_checks=asserted))
            report.extend(sm.distribution_integrability(imm, dist, pts, cfg))
        if "warped-shape" in groups:
            n_ws = min(cfg.samples, 50)
            res = sm.warped_shape_criterion(
                imm, dist, pts[:n_ws], cfg, candidate_warp=candidate, assert_checks=asserted)
            report.extend(res.checks)
            if asserted:
                report.verdicts["warped_orientation"] = res.orientation
                if res.warp_ratio is not None and declared is not None:
                    fitted = f"({declared})^{res.warp_ratio:.3f}"
                    report.note(
                        f"shape-criterion gradient fit: mu matches "
                        f"{res.warp_ratio:.3f} * ln({declared}), i.e. warp = {fitted}"
                        + ("" if abs(res.warp_ratio - 1.0) < 1e-3 else
                           f" -- declared warp {declared!r} is flagged: the fitted "
                           f"warp is {fitted}"))

    if part is not None and "splitting" in groups:
        base_idx = [imm.source.index(c) for c in part["base"]]
        fiber_idx = [imm.source.index(c) for c in part["fiber"]]
        cands = [(text, imm.source.parse(text)) for text in part.get("candidates", [])]
        rep = wp.detect_warped_splitting(
            lambda p: sm.induced_metric(imm, p), base_idx, fiber_idx,
            scenario.box(src), cfg, cands or None)
        report.extend(rep.checks)
        if rep.best_candidate is not None:
            report.verdicts["splitting_warp"] = rep.best_candidate
            if declared is not None and rep.best_candidate != declared:
                report.note(
                    f"declared warping function {declared!r} flagged: the fiber-block "
                    f"scale fits {rep.best_candidate!r}^2, so the warp in the "
                    f"g_base + f^2 g_fiber convention is f = {rep.best_candidate}")
        # a tangent structure field must have no fiber components
        if xi_tangent and imm.structure is not None:
            worst = 0.0
            for p in pts:
                geo = sm.GeometrySample(imm, p)
                coeffs, _ = geo.xi_split
                worst = max(worst, float(np.max(np.abs(coeffs[fiber_idx]))))
            report.add(CheckResult(
                "xi-fiber-component",
                "tangential xi has no component along the fiber coordinates",
                worst, cfg.scaled(1e-8), len(pts)))

    exp_ind = scenario.data.get("expected_induced_metric")
    if exp_ind is not None and part is not None and "leaves" in groups:
        dim = imm.source.dim
        rows = [exp_ind["entries"][i * dim:(i + 1) * dim] for i in range(dim)]
        induced_field = mf.MetricField(imm.source, rows, tuple(exp_ind["signature"]))
        _leaf_checks(induced_field, part, scenario.box(src), cfg, report, expected)


def _leaf_checks(metric, part, box, cfg, report, expected):
    chart = metric.chart
    mid = np.array([(lo + hi) / 2.0 for lo, hi in box])
    for role, default_verdict in (("base", sm.TOTALLY_GEODESIC), ("fiber", sm.TOTALLY_UMBILICAL)):
        idx = [chart.index(c) for c in part[role]]
        leaf_chart = mf.chart(
            f"{chart.name}-{role}-leaf", [chart.coords[i] for i in idx],
            [box[i] for i in idx])
        leaf = sm.immersion(leaf_chart, metric, wp.factor_leaf_components(chart, idx, mid))
        pts = mf.sample_points([box[i] for i in idx], min(cfg.samples, 25),
                               np.random.default_rng([cfg.seed, 19]))
        cls = sm.classify_umbilic(leaf, pts, cfg)
        want = expected.get(f"{role}_leaf", default_verdict)
        report.add(CheckResult(
            f"{role}-leaf-geometry",
            f"the {role} leaf through the box midpoint is {want}",
            0.0 if cls.verdict == want else 1.0, 0.5, len(pts),
            note=f"got {cls.verdict}"))
        report.verdicts[f"{role}_leaf"] = cls.verdict


def _warped_product_battery(scenario, cfg, report, groups, expected):
    wdata = scenario.data["warped_product"]
    base = scenario.chart(wdata["base_chart"])
    fiber = scenario.chart(wdata["fiber_chart"])
    spec = wp.WarpedSpec(
        base=base,
        base_metric=scenario.metric(wdata["base_metric"]),
        fiber=fiber,
        fiber_metric=scenario.metric(wdata["fiber_metric"]),
        warp_base=base.parse(wdata["warp_base"]) if "warp_base" in wdata else None,
        warp_fiber=fiber.parse(wdata["warp_fiber"]) if "warp_fiber" in wdata else None,
        xi_factor=wdata.get("xi_factor"),
    )
    box = scenario.box(base.name) + scenario.box(fiber.name)
    pts = mf.sample_points(box, cfg.samples, np.random.default_rng([cfg.seed, 23]))
    doubly = spec.warp_fiber is not None
    metric = (wp.build_doubly_warped_metric(spec, pts)
              if doubly else wp.build_warped_metric(spec, pts))

    if "warped-connection" in groups:
        if doubly:
            report.extend(wp.doubly_connection_checks(spec, metric, pts, cfg))
        else:
            report.extend(wp.warped_connection_checks(spec, metric, pts, cfg))

    if "splitting" in groups and not doubly:
        base_idx = list(range(base.dim))
        fiber_idx = list(range(base.dim, base.dim + fiber.dim))
        product = spec.product_chart
        cands = [(wdata["warp_base"], product.parse(wdata["warp_base"]))]
        rep = wp.detect_warped_splitting(metric.matrix, base_idx, fiber_idx, box, cfg, cands)
        report.extend(rep.checks)

    if wdata.get("leaf_checks") and "leaves" in groups and not doubly:
        part = {"base": list(base.coords), "fiber": list(fiber.coords)}
        _leaf_checks(metric, part, box, cfg, report, expected)


# -- builtin scenarios -----------------------------------------------------------

_AMBIENT5_CHARTS = [
    {
        "name": "ambient5",
        "coords": ["x1", "x2", "y1", "y2", "t"],
        "box": [[0.5, 2.0], [0.5, 2.0], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
        "domain": [[0.0, None], [0.0, None], [None, None], [None, None], [None, None]],
    }
]

_SWAP_PHI = [
    "0", "0", "1", "0", "0",
    "0", "0", "0", "1", "0",
    "1", "0", "0", "0", "0",
    "0", "1", "0", "0", "0",
    "0", "0", "0", "0", "0",
]

_XI5 = ["0", "0", "0", "0", "1"]
_ETA5 = ["0", "0", "0", "0", "1"]

_DIAG5_ENTRIES = [
    "x1^2", "0", "0", "0", "0",
    "0", "x2^2", "0", "0", "0",
    "0", "0", "-(x1^2)", "0", "0",
    "0", "0", "0", "-(x2^2)", "0",
    "0", "0", "0", "0", "1",
]

_FLAT5_ENTRIES = [
    "1", "0", "0", "0", "0",
    "0", "1", "0", "0", "0",
    "0", "0", "-1", "0", "0",
    "0", "0", "0", "-1", "0",
    "0", "0", "0", "0", "1",
]


def _example21() -> dict:
    return {
        "name": "example21",
        "description": "5-dimensional diagonal-coefficient structure whose eta and "
                       "fundamental 2-form are parallel; includes the full "
                       "connection-coefficient table",
        "charts": _AMBIENT5_CHARTS,
        "metrics": [{"name": "g", "chart": "ambient5",
                     "entries": _DIAG5_ENTRIES, "signature": [3, 2]}],
        "structure": {"chart": "ambient5", "metric": "g",
                      "phi": _SWAP_PHI, "xi": _XI5, "eta": _ETA5},
        "expected_christoffel": {
            "metric": "g",
            "nonzero": [
                {"upper": 0, "lower": [0, 0], "expr": "1/x1"},
                {"upper": 2, "lower": [0, 2], "expr": "1/x1"},
                {"upper": 0, "lower": [2, 2], "expr": "1/x1"},
                {"upper": 1, "lower": [1, 1], "expr": "1/x2"},
                {"upper": 3, "lower": [1, 3], "expr": "1/x2"},
                {"upper": 1, "lower": [3, 3], "expr": "1/x2"},
            ],
        },
        "expected": {"structure": "paracosymplectic",
                     "para_sasakian_residual_above": 1e-2},
        "sampling": {"n": 100, "seed": 42, "tol": 1e-8},
    }


def _example21_flat() -> dict:
    return {
        "name": "example21_flat",
        "description": "flat split-signature metric with the coordinate-swap "
                       "structure; every connection coefficient vanishes",
        "charts": _AMBIENT5_CHARTS,
        "metrics": [{"name": "g", "chart": "ambient5",
                     "entries": _FLAT5_ENTRIES, "signature": [3, 2]}],
        "structure": {"chart": "ambient5", "metric": "g",
                      "phi": _SWAP_PHI, "xi": _XI5, "eta": _ETA5},
        "expected_christoffel": {"metric": "g", "nonzero": []},
        "expected": {"structure": "paracosymplectic",
                     "para_sasakian_residual_above": 1e-2},
        "sampling": {"n": 100, "seed": 42, "tol": 1e-8},
    }


def _example51() -> dict:
    return {
        "name": "example51",
        "description": "4-dimensional immersion (v tan(theta), v tan(beta), "
                       "v sec(theta), v sec(beta), u) into the flat structure; "
                       "mixed-class submanifold with a warped induced metric",
        "charts": _AMBIENT5_CHARTS + [{
            "name": "surface4",
            "coords": ["v", "theta", "beta", "u"],
            "box": [[0.5, 2.0], [0.2, 1.2], [0.2, 1.2], [-1.0, 1.0]],
            "domain": [[0.0, None], [0.0, 1.5707963267948966],
                       [0.0, 1.5707963267948966], [None, None]],
        }],
        "metrics": [{"name": "g", "chart": "ambient5",
                     "entries": _FLAT5_ENTRIES, "signature": [3, 2]}],
        "structure": {"chart": "ambient5", "metric": "g",
                      "phi": _SWAP_PHI, "xi": _XI5, "eta": _ETA5},
        "immersion": {"source": "surface4", "ambient": "ambient5",
                      "components": ["v*tan(theta)", "v*tan(beta)",
                                     "v*sec(theta)", "v*sec(beta)", "u"]},
        "expected_induced_metric": {
            "entries": ["-2", "0", "0", "0",
                        "0", "v^2*sec(theta)^2", "0", "0",
                        "0", "0", "v^2*sec(beta)^2", "0",
                        "0", "0", "0", "1"],
            "signature": [3, 1],
        },
        "distributions": [
            {
                "name": "derived",
                "invariant": [["1", "0", "0", "0"],
                              ["0", "cos(theta)", "cos(beta)", "0"]],
                "anti_invariant": [["0", "cos(theta)", "-cos(beta)", "0"]],
                "xi": ["0", "0", "0", "1"],
                "assert": True,
            },
            {
                "name": "frame-labels",
                "invariant": [["1", "0", "0", "0"], ["0", "1", "0", "0"],
                              ["0", "0", "1", "0"]],
                "anti_invariant": [["0", "0", "0", "1"]],
                "assert": False,
            },
            {
                "name": "v-complement",
                "invariant": [["0", "1", "0", "0"], ["0", "0", "1", "0"]],
                "anti_invariant": [["1", "0", "0", "0"]],
                "xi": ["0", "0", "0", "1"],
                "assert": False,
            },
        ],
        "warped_partition": {
            "base": ["v", "u"],
            "fiber": ["theta", "beta"],
            "candidates": ["v", "v^2"],
            "declared_warp": "v^2",
        },
        "expected": {"structure": "paracosymplectic",
                     "submanifold": "pr_semi_invariant",
                     "xi_tangent": True,
                     "invariant_rank": 2,
                     "base_leaf": "totally_geodesic",
                     "fiber_leaf": "totally_umbilical"},
        "sampling": {"n": 100, "seed": 42, "tol": 1e-8},
    }


def _synthetic_warped() -> dict:
    return {
        "name": "synthetic_warped",
        "description": "line times line with warp exp(x): the canonical "
                       "g = dx^2 + exp(2x) du^2 connection identities",
        "charts": [
            {"name": "B", "coords": ["x"], "box": [[-1.0, 1.0]]},
            {"name": "F", "coords": ["u"], "box": [[-1.0, 1.0]]},
        ],
        "metrics": [
            {"name": "g_B", "chart": "B", "entries": ["1"], "signature": [1, 0]},
            {"name": "g_F", "chart": "F", "entries": ["1"], "signature": [1, 0]},
        ],
        "warped_product": {
            "base_chart": "B", "base_metric": "g_B",
            "fiber_chart": "F", "fiber_metric": "g_F",
            "warp_base": "exp(x)",
            "leaf_checks": True,
        },
        "sampling": {"n": 100, "seed": 42, "tol": 1e-8},
    }


def _synthetic_doubly() -> dict:
    return {
        "name": "synthetic_doubly",
        "description": "doubly warped line times line with warps exp(x), exp(u); "
                       "includes the forced-constant-warp obstruction detector",
        "charts": [
            {"name": "B", "coords": ["x"], "box": [[-1.0, 1.0]]},
            {"name": "F", "coords": ["u"], "box": [[-1.0, 1.0]]},
        ],
        "metrics": [
            {"name": "g_B", "chart": "B", "entries": ["1"], "signature": [1, 0]},
            {"name": "g_F", "chart": "F", "entries": ["1"], "signature": [1, 0]},
        ],
        "warped_product": {
            "base_chart": "B", "base_metric": "g_B",
            "fiber_chart": "F", "fiber_metric": "g_F",
            "warp_base": "exp(x)", "warp_fiber": "exp(u)",
            "xi_factor": "fiber",
        },
        "sampling": {"n": 100, "seed": 42, "tol": 1e-8},
    }


def _synthetic_bxf() -> dict:
    return {
        "name": "synthetic_bxf",
        "description": "hyperbolic reparametrisation (v sinh(s+z), v sinh(s-z), "
                       "v cosh(s+z), v cosh(s-z), u) of the mixed-class surface: "
                       "the coordinate splitting aligns with the invariant/"
                       "anti-invariant blocks and xi sits in the base factor",
        "charts": _AMBIENT5_CHARTS + [{
            "name": "bxf4",
            "coords": ["v", "s", "z", "u"],
            "box": [[0.5, 2.0], [-0.8, 0.8], [-0.8, 0.8], [-1.0, 1.0]],
            "domain": [[0.0, None], [None, None], [None, None], [None, None]],
        }],
        "metrics": [{"name": "g", "chart": "ambient5",
                     "entries": _FLAT5_ENTRIES, "signature": [3, 2]}],
        "structure": {"chart": "ambient5", "metric": "g",
                      "phi": _SWAP_PHI, "xi": _XI5, "eta": _ETA5},
        "immersion": {"source": "bxf4", "ambient": "ambient5",
                      "components": ["v*sinh(s + z)", "v*sinh(s - z)",
                                     "v*cosh(s + z)", "v*cosh(s - z)", "u"]},
        "expected_induced_metric": {
            "entries": ["-2", "0", "0", "0",
                        "0", "2*v^2", "0", "0",
                        "0", "0", "2*v^2", "0",
                        "0", "0", "0", "1"],
            "signature": [3, 1],
        },
        "distributions": [
            {
                "name": "aligned",
                "invariant": [["1", "0", "0", "0"], ["0", "1", "0", "0"]],
                "anti_invariant": [["0", "0", "1", "0"]],
                "xi": ["0", "0", "0", "1"],
                "assert": True,
            },
        ],
        "warped_partition": {
            "base": ["v", "s", "u"],
            "fiber": ["z"],
            "candidates": ["v", "v^2"],
            "declared_warp": "v",
        },
        "expected": {"structure": "paracosymplectic",
                     "submanifold": "pr_semi_invariant",
                     "xi_tangent": True,
                     "invariant_rank": 2,
                     "base_leaf": "totally_geodesic",
                     "fiber_leaf": "totally_umbilical"},
        "sampling": {"n": 100, "seed": 42, "tol": 1e-8},
    }


def _synthetic_xi_normal() -> dict:
    return {
        "name": "synthetic_xi_normal",
        "description": "plane immersion whose image avoids the direction of xi: "
                       "the tangency detector reports the failure instead of "
                       "running the mixed-class criteria",
        "charts": _AMBIENT5_CHARTS + [{
            "name": "plane2",
            "coords": ["a", "b"],
            "box": [[-1.0, 1.0], [-1.0, 1.0]],
        }],
        "metrics": [{"name": "g", "chart": "ambient5",
                     "entries": _FLAT5_ENTRIES, "signature": [3, 2]}],
        "structure": {"chart": "ambient5", "metric": "g",
                      "phi": _SWAP_PHI, "xi": _XI5, "eta": _ETA5},
        "immersion": {"source": "plane2", "ambient": "ambient5",
                      "components": ["a", "b", "0", "0", "0"]},
        "expected": {"structure": "paracosymplectic",
                     "submanifold": "anti_invariant",
                     "xi_tangent": False},
        "checks": ["metric-properties", "structure", "classification",
                   "frames", "submanifold-class"],
        "sampling": {"n": 100, "seed": 42, "tol": 1e-8},
    }


_BUILTIN_FACTORIES = {
    "example21": _example21,
    "example21_flat": _example21_flat,
    "example51": _example51,
    "synthetic_warped": _synthetic_warped,
    "synthetic_doubly": _synthetic_doubly,
    "synthetic_bxf": _synthetic_bxf,
    "synthetic_xi_normal": _synthetic_xi_normal,
}


@cache
def get_scenario(name: str) -> Scenario:
    if name not in _BUILTIN_FACTORIES:
        known = ", ".join(sorted(_BUILTIN_FACTORIES))
        raise ScenarioError(f"unknown scenario {name!r}; builtins are {known}")
    return Scenario(_BUILTIN_FACTORIES[name]())


def list_scenarios() -> list[tuple[str, str]]:
    return [(name, get_scenario(name).description) for name in sorted(_BUILTIN_FACTORIES)]
