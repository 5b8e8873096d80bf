import numpy as np
import pytest

from paraverify import manifold as mf
from paraverify import paracontact as pc
from paraverify.report import VerifyConfig

AMBIENT5 = mf.chart(
    "ambient5",
    ["x1", "x2", "y1", "y2", "t"],
    [(0.0, np.inf), (0.0, np.inf), (-np.inf, np.inf), (-np.inf, np.inf), (-np.inf, np.inf)],
)
BOX5 = [(0.5, 2.0), (0.5, 2.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)]

SWAP_PHI = [
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0],
    [1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0],
]


def diag_structure():
    g = mf.MetricField(
        AMBIENT5,
        [
            ["x1^2", 0, 0, 0, 0],
            [0, "x2^2", 0, 0, 0],
            [0, 0, "-(x1^2)", 0, 0],
            [0, 0, 0, "-(x2^2)", 0],
            [0, 0, 0, 0, 1],
        ],
        signature=(3, 2),
    )
    return pc.ParacontactStructure(
        AMBIENT5,
        mf.TensorField(AMBIENT5, 1, 1, SWAP_PHI),
        mf.vector_field(AMBIENT5, [0, 0, 0, 0, 1]),
        mf.covector_field(AMBIENT5, [0, 0, 0, 0, 1]),
        g,
    )


def flat_structure():
    g = mf.MetricField(AMBIENT5, np.diag([1.0, 1, -1, -1, 1]).tolist(), signature=(3, 2))
    return pc.ParacontactStructure(
        AMBIENT5,
        mf.TensorField(AMBIENT5, 1, 1, SWAP_PHI),
        mf.vector_field(AMBIENT5, [0, 0, 0, 0, 1]),
        mf.covector_field(AMBIENT5, [0, 0, 0, 0, 1]),
        g,
    )


def hyperbolic_heisenberg():
    """3-dim structure with eta = (dz - y dx)/2, xi = 2 d/dz and the
    quarter-scaled split metric; satisfies the para-Sasakian identity."""
    c3 = mf.chart("h3", ["x", "y", "z"])
    g = mf.MetricField(
        c3,
        [
            ["0.25 + 0.25*y^2", 0, "-(0.25)*y"],
            [0, "-(0.25)", 0],
            ["-(0.25)*y", 0, 0.25],
        ],
        signature=(2, 1),
    )
    phi = mf.TensorField(c3, 1, 1, [[0, 1, 0], [1, 0, 0], [0, "y", 0]])
    return pc.ParacontactStructure(
        c3, phi, mf.vector_field(c3, [0, 0, 2]),
        mf.covector_field(c3, ["-(0.5)*y", 0, 0.5]), g,
    )


CFG = VerifyConfig(samples=40)


def sample5():
    return mf.sample_points(BOX5, CFG.samples, np.random.default_rng(CFG.seed))


def test_diag_structure_satisfies_all_axioms():
    checks = pc.check_almost_paracontact_metric(diag_structure(), sample5(), CFG)
    for c in checks:
        assert c.passed, f"{c.check}: {c.residual}"
    worst = max(c.residual for c in checks if c.mode == "below")
    assert worst < 1e-10


def test_phi_squared_on_xi_is_forced():
    s = diag_structure()
    p = [1.3, 0.8, 0.1, -0.4, 0.6]
    phim = s.phi.value(p)
    xiv = s.xi.value(p)
    etav = s.eta.value(p)
    assert np.max(np.abs(phim @ (phim @ xiv))) == 0.0
    assert np.max(np.abs(xiv - float(etav @ xiv) * xiv)) == 0.0


def test_perturbed_phi_fails_and_both_compat_tests_blow_up():
    s = diag_structure()
    phi_bad = [row[:] for row in SWAP_PHI]
    phi_bad[2][0] = 1.01
    bad = pc.ParacontactStructure(
        s.chart, mf.TensorField(s.chart, 1, 1, phi_bad), s.xi, s.eta, s.metric
    )
    checks = {c.check: c for c in pc.check_almost_paracontact_metric(bad, sample5(), CFG)}
    assert not checks["phi-squared"].passed
    assert checks["phi-squared"].residual > 1e-3
    # the two metric compatibility formulations fail together
    assert checks["metric-phi-compat"].residual > 100 * CFG.tol
    assert checks["phi-skew"].residual > 100 * CFG.tol


def test_fundamental_two_form_entries():
    s = diag_structure()
    form = pc.fundamental_two_form(s)
    rng = np.random.default_rng(9)
    for _ in range(10):
        p = [rng.uniform(0.5, 2), rng.uniform(0.5, 2), 0.0, 0.3, -0.2]
        fm = form.value(p)
        assert fm[0, 2] == pytest.approx(p[0] ** 2)   # g(e1, phi e3) = g(e1, e1)
        assert fm[1, 3] == pytest.approx(p[1] ** 2)
        assert np.max(np.abs(fm + fm.T)) < 1e-12      # antisymmetry
        xiv = s.xi.value(p)
        assert np.max(np.abs(fm @ xiv)) == 0.0        # form against xi vanishes
        X = rng.uniform(-1, 1, 5)
        assert abs(X @ fm @ X) < 1e-12


def test_diag_structure_is_paracosymplectic():
    cls = pc.classify_structure(diag_structure(), sample5(), CFG)
    assert cls.verdict == pc.PARACOSYMPLECTIC
    by_name = {c.check: c for c in cls.checks}
    assert by_name["eta-parallel"].residual < 1e-8
    assert by_name["form-parallel"].residual < 1e-8
    assert by_name["xi-parallel"].residual < 1e-8
    # discrimination: the para-Sasakian identity is far from holding
    assert by_name["para-sasakian-identity"].residual > 1e-2


def test_flat_structure_is_paracosymplectic_with_zero_connection():
    cls = pc.classify_structure(flat_structure(), sample5(), CFG)
    assert cls.verdict == pc.PARACOSYMPLECTIC


def test_time_dependent_phi_is_unclassified():
    s = diag_structure()
    phi_bad = [[e if not (i == 2 and j == 0) else "1 + t" for j, e in enumerate(row)]
               for i, row in enumerate(SWAP_PHI)]
    bad = pc.ParacontactStructure(
        s.chart, mf.TensorField(s.chart, 1, 1, phi_bad), s.xi, s.eta, s.metric
    )
    cls = pc.classify_structure(bad, sample5(), CFG)
    assert cls.verdict == pc.UNCLASSIFIED
    assert {c.check: c for c in cls.checks}["form-parallel"].residual > 1e-3


def test_hyperbolic_heisenberg_is_para_sasakian():
    s = hyperbolic_heisenberg()
    pts = mf.sample_points([(-1, 1)] * 3, 40, np.random.default_rng(2))
    axioms = pc.check_almost_paracontact_metric(s, pts, CFG)
    assert all(c.passed for c in axioms)
    cls = pc.classify_structure(s, pts, CFG)
    assert cls.verdict == pc.PARA_SASAKIAN
    by_name = {c.check: c for c in cls.checks}
    assert by_name["para-sasakian-identity"].residual < 1e-12
    assert by_name["xi-parasasakian"].residual < 1e-10   # nabla_X xi = -phi X
    assert by_name["xi-self-derivative"].residual < 1e-10
