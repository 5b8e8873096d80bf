"""Almost paracontact metric structures and their classification.

A structure is the quadruple (phi, xi, eta, g) on one chart: a (1,1) tensor
field, a vector field, a 1-form and a pseudo-Riemannian metric.  The checks
here verify the defining algebraic identities at sample points and classify
the structure as paracosymplectic (eta and the fundamental 2-form are parallel)
or para-Sasakian ((nabla_X phi)Y = -g(X,Y) xi + eta(Y) X), reporting residuals
for both tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import expressions as ex
from .manifold import (
    Chart,
    MetricField,
    TensorField,
    christoffel,
    cov_deriv_covector_all,
    cov_deriv_mixed_all,
    cov_deriv_two_form_all,
)
from .report import CheckResult, VerifyConfig, map_samples


@dataclass
class ParacontactStructure:
    chart: Chart
    phi: TensorField
    xi: TensorField
    eta: TensorField
    metric: MetricField

    def __post_init__(self):
        if self.phi.valence != (1, 1) or self.xi.valence != (1, 0) or self.eta.valence != (0, 1):
            raise ValueError("structure fields must have valences (1,1), (1,0), (0,1)")
        if not (self.phi.chart is self.chart and self.xi.chart is self.chart
                and self.eta.chart is self.chart and self.metric.chart is self.chart):
            raise ValueError("structure fields must share one chart")


@dataclass
class StructureClassification:
    verdict: str
    checks: list[CheckResult] = field(default_factory=list)


def fundamental_two_form(s: ParacontactStructure) -> TensorField:
    """The 2-form F(X, Y) = g(X, phi Y), built at the expression level."""
    dim = s.chart.dim
    comps = np.empty((dim, dim), dtype=object)
    for i in range(dim):
        for j in range(dim):
            terms = []
            for k in range(dim):
                gik = s.metric.entries[i, k]
                pkj = s.phi.components[k, j]
                if _is_zero(gik) or _is_zero(pkj):
                    continue
                terms.append(ex.Product(gik, pkj))
            comps[i, j] = _sum(terms)
    return TensorField(s.chart, 0, 2, comps)


def _is_zero(e: ex.ScalarExpr) -> bool:
    return isinstance(e, ex.Constant) and e.value == 0.0


def _sum(terms: list) -> ex.ScalarExpr:
    if not terms:
        return ex.ZERO
    out = terms[0]
    for t in terms[1:]:
        out = ex.Sum(out, t)
    return out


def _maxabs(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0


def check_almost_paracontact_metric(
    s: ParacontactStructure, points: np.ndarray, cfg: VerifyConfig
) -> list[CheckResult]:
    """Residuals for the defining identities of an almost paracontact metric
    structure, evaluated at the given sample points with random vector pairs."""
    dim = s.chart.dim
    rng = np.random.default_rng([cfg.seed, 101])
    pairs = rng.uniform(-1.0, 1.0, size=(len(points), 2, dim))

    def at_point(args):
        p, (Xv, Yv) = args
        s.metric.check_signature(p)
        gm = s.metric.matrix(p)
        phim = s.phi.value(p)
        xiv = s.xi.value(p)
        etav = s.eta.value(p)
        sv = np.linalg.svd(phim, compute_uv=False)
        return {
            "phi-squared": _maxabs(phim @ phim - np.eye(dim) + np.outer(xiv, etav)),
            "eta-of-xi": abs(float(etav @ xiv) - 1.0),
            "phi-kills-xi": _maxabs(phim @ xiv),
            "eta-kills-phi": _maxabs(etav @ phim),
            "phi-rank-null": float(sv[-1]),
            "phi-rank-rest": float(sv[-2]),
            "metric-phi-compat": abs(
                float(Xv @ gm @ Yv + (phim @ Xv) @ gm @ (phim @ Yv)
                      - (etav @ Xv) * (etav @ Yv))
            ),
            "xi-metric-dual": _maxabs(gm @ xiv - etav),
            "phi-skew": abs(float((phim @ Xv) @ gm @ Yv + Xv @ gm @ (phim @ Yv))),
        }

    rows = map_samples(at_point, zip(points, pairs))
    worst = {k: max(r[k] for r in rows) for k in rows[0]}
    n = len(points)
    tol = cfg.scaled(1e-8)
    statements = {
        "phi-squared": "phi^2 = Id - eta (x) xi",
        "eta-of-xi": "eta(xi) = 1",
        "phi-kills-xi": "phi(xi) = 0",
        "eta-kills-phi": "eta o phi = 0",
        "metric-phi-compat": "g(X,Y) = -g(phi X, phi Y) + eta(X) eta(Y)",
        "xi-metric-dual": "g(X, xi) = eta(X)",
        "phi-skew": "g(phi X, Y) = -g(X, phi Y)",
    }
    out = [
        CheckResult(k, statements[k], worst[k], tol, n)
        for k in statements
    ]
    out.append(CheckResult(
        "phi-rank-null", "smallest singular value of phi vanishes",
        worst["phi-rank-null"], cfg.scaled(1e-8), n))
    out.append(CheckResult(
        "phi-rank-rest", "second-smallest singular value of phi stays away from 0",
        min(r["phi-rank-rest"] for r in rows), 1e-6, n, mode="above"))
    return out


PARACOSYMPLECTIC = "paracosymplectic"
PARA_SASAKIAN = "para_sasakian"
UNCLASSIFIED = "unclassified"


def classify_structure(
    s: ParacontactStructure, points: np.ndarray, cfg: VerifyConfig
) -> StructureClassification:
    """Classify by parallelism of eta and the fundamental 2-form versus the
    para-Sasakian derivative identity; report residuals for both, plus the
    consequent derivative of xi for whichever class holds."""
    dim = s.chart.dim
    form = fundamental_two_form(s)
    rng = np.random.default_rng([cfg.seed, 202])
    pairs = rng.uniform(-1.0, 1.0, size=(len(points), 2, dim))

    def at_point(args):
        p, (Xv, Yv) = args
        gm = s.metric.matrix(p)
        gamma = christoffel(s.metric, p)
        xiv = s.xi.value(p)
        etav = s.eta.value(p)
        phim = s.phi.value(p)

        nabla_eta = cov_deriv_covector_all(s.metric, s.eta, p)
        nabla_form = cov_deriv_two_form_all(s.metric, form, p)
        nabla_phi = cov_deriv_mixed_all(s.metric, s.phi, p)
        # (nabla_X phi) Y + g(X,Y) xi - eta(Y) X
        sas = (
            np.einsum("kij,k,j->i", nabla_phi, Xv, Yv)
            + float(Xv @ gm @ Yv) * xiv
            - float(etav @ Yv) * Xv
        )
        # nabla_k xi^i for the consequent checks
        nabla_xi = s.xi.partials(p) + np.einsum("ikl,l->ki", gamma, xiv)
        xi_deriv = np.einsum("k,ki->i", Xv, nabla_xi)
        xi_self = np.einsum("k,ki->i", xiv, nabla_xi)

        deta = s.eta.partials(p)
        dform = form.partials(p)
        closed_eta = deta - np.einsum("ij->ji", deta)
        closed_form = dform + np.einsum("kij->ijk", dform) + np.einsum("kij->jki", dform)
        return {
            "eta-parallel": _maxabs(nabla_eta),
            "form-parallel": _maxabs(nabla_form),
            "form-antisymmetric": _maxabs(form.value(p) + form.value(p).T),
            "para-sasakian-identity": _maxabs(sas),
            "xi-parallel": _maxabs(xi_deriv),
            "xi-parasasakian": _maxabs(xi_deriv + phim @ Xv),
            "xi-self-derivative": _maxabs(xi_self),
            "eta-closed": _maxabs(closed_eta),
            "form-closed": _maxabs(closed_form),
        }

    rows = map_samples(at_point, zip(points, pairs))
    worst = {k: max(r[k] for r in rows) for k in rows[0]}
    n = len(points)
    tol = cfg.scaled(1e-8)

    checks = [
        CheckResult("eta-parallel", "nabla eta = 0", worst["eta-parallel"], tol, n),
        CheckResult("form-parallel", "nabla of the fundamental 2-form = 0",
                    worst["form-parallel"], tol, n),
        CheckResult("form-antisymmetric", "fundamental 2-form is antisymmetric",
                    worst["form-antisymmetric"], tol, n),
        CheckResult("eta-closed", "d eta = 0", worst["eta-closed"], tol, n, mode="info"),
        CheckResult("form-closed", "d of the fundamental 2-form = 0",
                    worst["form-closed"], tol, n, mode="info"),
        CheckResult("para-sasakian-identity",
                    "(nabla_X phi)Y = -g(X,Y) xi + eta(Y) X",
                    worst["para-sasakian-identity"], tol, n, mode="info"),
    ]

    cosymplectic = worst["eta-parallel"] < tol and worst["form-parallel"] < tol
    sasakian = worst["para-sasakian-identity"] < tol
    if cosymplectic:
        verdict = PARACOSYMPLECTIC
        checks.append(CheckResult(
            "xi-parallel", "nabla_X xi = 0 (consequence of parallel eta)",
            worst["xi-parallel"], tol, n))
    elif sasakian:
        verdict = PARA_SASAKIAN
        checks.append(CheckResult(
            "xi-parasasakian", "nabla_X xi = -phi X", worst["xi-parasasakian"], tol, n))
        checks.append(CheckResult(
            "xi-self-derivative", "nabla_xi xi = 0", worst["xi-self-derivative"], tol, n))
    else:
        verdict = UNCLASSIFIED
    return StructureClassification(verdict, checks)
