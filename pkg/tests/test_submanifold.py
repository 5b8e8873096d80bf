import numpy as np
import pytest

from paraverify import manifold as mf
from paraverify import submanifold as sm
from paraverify.errors import FrameDegeneracyError
from paraverify.paracontact import ParacontactStructure
from paraverify.report import VerifyConfig

from _oracles import central_diff

CFG = VerifyConfig(samples=20)

FLAT5 = mf.chart("flat5", ["x1", "x2", "y1", "y2", "t"])
SWAP_PHI = [
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0],
    [1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0],
]


def flat5_structure():
    g = mf.MetricField(FLAT5, np.diag([1.0, 1, -1, -1, 1]).tolist(), signature=(3, 2))
    return ParacontactStructure(
        FLAT5,
        mf.TensorField(FLAT5, 1, 1, SWAP_PHI),
        mf.vector_field(FLAT5, [0, 0, 0, 0, 1]),
        mf.covector_field(FLAT5, [0, 0, 0, 0, 1]),
        g,
    )


def surface_chart():
    return mf.chart(
        "srf",
        ["v", "theta", "beta", "u"],
        [(0.0, np.inf), (0.0, np.pi / 2), (0.0, np.pi / 2), (-np.inf, np.inf)],
    )


def tangent_sec_immersion():
    """(v tan(theta), v tan(beta), v sec(theta), v sec(beta), u) into the flat
    split-signature ambient with the coordinate-swap structure."""
    s = flat5_structure()
    return sm.immersion(
        surface_chart(),
        s.metric,
        ["v*tan(theta)", "v*tan(beta)", "v*sec(theta)", "v*sec(beta)", "u"],
        structure=s,
    )


SRF_BOX = [(0.5, 2.0), (0.2, 1.2), (0.2, 1.2), (-1.0, 1.0)]


def srf_points(n=15, seed=42):
    return mf.sample_points(SRF_BOX, n, np.random.default_rng(seed))


# -- frames --------------------------------------------------------------------


def test_identity_immersion_frame():
    s = flat5_structure()
    imm = sm.immersion(FLAT5, s.metric, ["x1", "x2", "y1", "y2", "t"], structure=s)
    fr = sm.build_point_frame(imm, [0.3, 1.2, -0.5, 0.8, 0.1])
    assert fr.k == 0
    assert np.allclose(fr.gram, np.diag([1, 1, -1, -1, 1]))
    sff = sm.second_fundamental_data(imm, fr.point, fr)
    assert np.max(np.abs(sff.h)) == 0.0


def test_circle_frame_and_induced_metric():
    c1 = mf.chart("circle", ["u"])
    plane = mf.chart("plane", ["x", "y"])
    g2 = mf.MetricField(plane, [[1, 0], [0, 1]], signature=(2, 0))
    r = 1.7
    imm = sm.immersion(c1, g2, [f"{r}*cos(u)", f"{r}*sin(u)"])
    u0 = 0.83
    fr = sm.build_point_frame(imm, [u0])
    assert fr.gram[0, 0] == pytest.approx(r * r, rel=1e-12)
    normal = fr.normals[:, 0]
    radial = np.array([np.cos(u0), np.sin(u0)])
    assert np.abs(normal @ radial) == pytest.approx(1.0, rel=1e-12)


def test_curve_slice_matches_speed_oracle():
    # one-parameter slice of the surface immersion: only theta varies
    s = flat5_structure()
    c1 = mf.chart("slice", ["theta"], [(0.0, np.pi / 2)])
    v0, b0, u0 = 1.3, 0.5, 0.2
    imm = sm.immersion(
        c1, s.metric,
        [f"{v0}*tan(theta)", f"{v0}*tan({b0})", f"{v0}*sec(theta)", f"{v0}*sec({b0})", f"{u0}"],
    )
    th = 0.7
    gram = sm.induced_metric(imm, [th])

    def omega(q):
        return imm.map_point(q)

    d = central_diff(omega, [th], 0)
    oracle = d @ np.diag([1, 1, -1, -1, 1]) @ d
    assert gram[0, 0] == pytest.approx(oracle, rel=1e-6)
    assert gram[0, 0] == pytest.approx(v0 * v0 / np.cos(th) ** 2, rel=1e-10)


def test_rank_deficient_jacobian_raises():
    c2 = mf.chart("c2", ["a", "b"])
    plane = mf.chart("plane", ["x", "y"])
    g2 = mf.MetricField(plane, [[1, 0], [0, 1]], signature=(2, 0))
    imm = sm.immersion(c2, g2, ["a + b", "a + b"])
    with pytest.raises(FrameDegeneracyError, match="rank-deficient"):
        sm.build_point_frame(imm, [0.1, 0.2])


def test_lightlike_tangent_raises():
    c1 = mf.chart("c1", ["s"])
    mink = mf.chart("mink", ["x", "y"])
    g2 = mf.MetricField(mink, [[1, 0], [0, -1]], signature=(1, 1))
    imm = sm.immersion(c1, g2, ["s", "s"])
    with pytest.raises(FrameDegeneracyError, match="lightlike"):
        sm.build_point_frame(imm, [0.5])


# -- second fundamental form and shape operator --------------------------------


def sphere_immersion(r):
    c2 = mf.chart("sph", ["th", "ph"], [(0.1, np.pi - 0.1), (-np.pi, np.pi)])
    amb = mf.chart("e3", ["x", "y", "z"])
    g3 = mf.MetricField(amb, np.eye(3).tolist(), signature=(3, 0))
    return sm.immersion(
        c2, g3,
        [f"{r}*sin(th)*cos(ph)", f"{r}*sin(th)*sin(ph)", f"{r}*cos(th)"],
    )


def test_sphere_shape_operator_and_umbilic():
    r = 2.0
    imm = sphere_immersion(r)
    pts = mf.sample_points([(0.4, 2.6), (-2.0, 2.0)], 12, np.random.default_rng(0))
    for p in pts:
        sff = sm.second_fundamental_data(imm, p)
        fr = sff.frame
        A = sff.shape_operator(fr.normals[:, 0])
        lam = np.trace(A) / 2.0
        assert abs(abs(lam) - 1.0 / r) < 1e-9
        assert np.max(np.abs(A - lam * np.eye(2))) < 1e-9
        # |g(h(U,U), n)| = g(U,U)/r for a random tangent direction
        U = np.random.default_rng(1).uniform(-1, 1, 2)
        hUU = sff.h_of(U, U)
        lhs = abs(hUU @ fr.normals[:, 0])
        assert lhs == pytest.approx(float(U @ fr.gram @ U) / r, rel=1e-9)
    cls = sm.classify_umbilic(imm, pts, CFG)
    assert cls.verdict == sm.TOTALLY_UMBILICAL
    assert np.max(np.abs(np.abs(cls.umbilic_factors) - 0.5)) < 1e-9


def test_identity_immersion_totally_geodesic():
    s = flat5_structure()
    imm = sm.immersion(FLAT5, s.metric, ["x1", "x2", "y1", "y2", "t"], structure=s)
    pts = mf.sample_points([(-1, 1)] * 5, 5, np.random.default_rng(3))
    cls = sm.classify_umbilic(imm, pts, CFG)
    assert cls.verdict == sm.TOTALLY_GEODESIC


def test_gauss_weingarten_checks_on_surface():
    imm = tangent_sec_immersion()
    checks = sm.gauss_weingarten_checks(imm, srf_points(), CFG)
    for c in checks:
        assert c.passed, f"{c.check}: {c.residual:.3e}"


def test_surface_induced_metric_matches_closed_form():
    imm = tangent_sec_immersion()
    for p in srf_points():
        v, th, be, _ = p
        gram = sm.induced_metric(imm, p)
        expected = np.diag([-2.0, v**2 / np.cos(th) ** 2, v**2 / np.cos(be) ** 2, 1.0])
        assert np.max(np.abs(gram - expected)) < 1e-9


def test_surface_frame_columns_are_expected_tangents():
    imm = tangent_sec_immersion()
    p = [1.0, np.pi / 4, np.pi / 6, 0.0]
    fr = sm.build_point_frame(imm, p)
    v, th, be = 1.0, np.pi / 4, np.pi / 6
    sec = lambda a: 1 / np.cos(a)
    X1 = [np.tan(th), np.tan(be), sec(th), sec(be), 0]
    X2 = [v * sec(th) ** 2, 0, v * sec(th) * np.tan(th), 0, 0]
    X3 = [0, v * sec(be) ** 2, 0, v * sec(be) * np.tan(be), 0]
    X4 = [0, 0, 0, 0, 1]
    assert np.allclose(fr.jacobian, np.column_stack([X1, X2, X3, X4]), atol=1e-12)


# -- structure decomposition on the surface ------------------------------------


def test_surface_phi_decomposition():
    imm = tangent_sec_immersion()
    for p in srf_points(6):
        geo = sm.GeometrySample(imm, p)
        sp = geo.split
        # phi kills the u-direction (it is xi)
        assert np.max(np.abs(sp.tan_of_tan[:, 3])) < 1e-12
        assert np.max(np.abs(sp.nor_of_tan[:, 3])) < 1e-12
        # the v-direction maps to a tangent vector: no normal part
        assert np.max(np.abs(sp.nor_of_tan[:, 0])) < 1e-10
        # theta/beta coordinate fields pick up genuinely normal parts
        assert np.max(np.abs(sp.nor_of_tan[:, 1])) > 1e-2
        assert np.max(np.abs(sp.nor_of_tan[:, 2])) > 1e-2
        assert sp.reconstruction_residual < 1e-10
        assert sp.skew_residual < 1e-10


def test_surface_classification_is_mixed_with_rank_two_invariant_block():
    imm = tangent_sec_immersion()
    cls = sm.classify_submanifold(imm, srf_points(), CFG)
    assert cls.verdict == sm.PR_SEMI_INVARIANT
    assert cls.xi_tangent
    assert cls.invariant_rank == 2
    for c in cls.checks:
        assert c.passed, f"{c.check}: {c.residual:.3e}"


def test_surface_xi_checks():
    imm = tangent_sec_immersion()
    checks = {c.check: c for c in sm.xi_tangency_checks(imm, srf_points(), CFG)}
    assert checks["xi-tangent"].residual < 1e-12
    assert checks["xi-induced-derivative"].residual < 1e-7
    assert checks["h-with-xi"].residual < 1e-7


def test_surface_fundamental_identities():
    imm = tangent_sec_immersion()
    checks = sm.check_fundamental_identities(imm, srf_points(8), CFG)
    for c in checks:
        assert c.passed, f"{c.check}: {c.residual:.3e}"
        assert c.residual < 1e-7


# -- distributions on the surface ----------------------------------------------


def derived_distribution(imm):
    src = imm.source
    return sm.DistributionSpec(
        "derived",
        invariant=[
            mf.vector_field(src, [1, 0, 0, 0]),
            mf.vector_field(src, [0, "cos(theta)", "cos(beta)", 0]),
        ],
        anti_invariant=[mf.vector_field(src, [0, "cos(theta)", "-cos(beta)", 0])],
        xi=mf.vector_field(src, [0, 0, 0, 1]),
    )


def paper_reading_distribution(imm):
    src = imm.source
    return sm.DistributionSpec(
        "frame-labels",
        invariant=[
            mf.vector_field(src, [1, 0, 0, 0]),
            mf.vector_field(src, [0, 1, 0, 0]),
            mf.vector_field(src, [0, 0, 1, 0]),
        ],
        anti_invariant=[mf.vector_field(src, [0, 0, 0, 1])],
    )


def test_derived_distribution_satisfies_definition():
    imm = tangent_sec_immersion()
    checks = sm.distribution_checks(imm, derived_distribution(imm), srf_points(), CFG)
    for c in checks:
        assert c.passed, f"{c.check}: {c.residual:.3e}"


def test_frame_label_distribution_fails_invariance():
    imm = tangent_sec_immersion()
    checks = {c.check: c for c in sm.distribution_checks(
        imm, paper_reading_distribution(imm), srf_points(), CFG, assert_checks=False)}
    # reported informationally: the naive frame labels do not satisfy invariance
    assert checks["frame-labels:invariant-block"].residual > 1e-2
    assert all(c.mode == "info" for c in checks.values())


def test_distribution_integrability():
    imm = tangent_sec_immersion()
    checks = sm.distribution_integrability(imm, derived_distribution(imm), srf_points(), CFG)
    for c in checks:
        assert c.passed and c.residual < 1e-8


def test_warped_shape_criterion_derived_reading():
    imm = tangent_sec_immersion()
    candidate = imm.source.parse("v^2")
    res = sm.warped_shape_criterion(
        imm, derived_distribution(imm), srf_points(), CFG, candidate_warp=candidate)
    assert res.orientation == "inv-to-anti"
    assert res.fit_residual < 1e-6
    # directional derivative of mu along phi of the second invariant generator is 1
    assert res.inv_to_anti_fit[0] == pytest.approx(0.0, abs=1e-9)
    assert res.inv_to_anti_fit[1] == pytest.approx(1.0, abs=1e-9)
    # the declared candidate v^2 over-warps: the fitted exponent ratio is 1/2
    assert res.warp_ratio == pytest.approx(0.5, abs=1e-9)
    assert res.umbilic_factor == pytest.approx(-1.0, abs=1e-9)
    by_name = {c.check: c for c in res.checks}
    assert by_name["derived:shape-fit"].passed
    assert by_name["derived:invariant-h-symmetry"].passed
    assert by_name["derived:base-shape-relation"].passed
    assert by_name["derived:leaf-umbilic-proportionality"].passed
    assert by_name["derived:warp-gradient-ratio"].passed


def test_warped_shape_criterion_frame_labels_vacuous():
    imm = tangent_sec_immersion()
    res = sm.warped_shape_criterion(
        imm, paper_reading_distribution(imm), srf_points(6), CFG, assert_checks=False)
    by_name = {c.check: c for c in res.checks}
    # xi spans the declared anti-invariant block, so both fits are vacuous
    assert by_name["frame-labels:shape-fit-anti-to-inv"].residual < 1e-12
    assert by_name["frame-labels:anti-pair-shape"].residual < 1e-12
    # and the h-symmetry of the over-large invariant block genuinely fails
    assert by_name["frame-labels:invariant-h-symmetry"].residual > 1e-2


def test_invariant_plane_classifies_invariant():
    # span of the first and third coordinate directions is preserved by phi
    s = flat5_structure()
    c2 = mf.chart("inv2", ["a", "b"])
    imm = sm.immersion(c2, s.metric, ["a", 0, "b", 0, 0], structure=s)
    pts = mf.sample_points([(0.2, 1.0)] * 2, 6, np.random.default_rng(4))
    cls = sm.classify_submanifold(imm, pts, CFG)
    assert cls.verdict == sm.INVARIANT


def test_identity_immersion_classifies_invariant_with_zero_shape():
    s = flat5_structure()
    imm = sm.immersion(FLAT5, s.metric, ["x1", "x2", "y1", "y2", "t"], structure=s)
    pts = mf.sample_points([(-1, 1)] * 5, 4, np.random.default_rng(6))
    cls = sm.classify_submanifold(imm, pts, CFG)
    assert cls.verdict == sm.INVARIANT
    A = sm.shape_operator(imm, np.zeros(5), pts[0])
    assert np.max(np.abs(A)) == 0.0


def test_circle_h_and_shape_operator_public_api():
    c1 = mf.chart("circle", ["u"])
    plane = mf.chart("plane", ["x", "y"])
    g2 = mf.MetricField(plane, [[1, 0], [0, 1]], signature=(2, 0))
    r = 2.0
    imm = sm.immersion(c1, g2, [f"{r}*cos(u)", f"{r}*sin(u)"])
    du = mf.coordinate_field(c1, 0)
    u0 = [0.4]
    h = sm.second_fundamental_form(imm, du, du, u0)
    # curvature vector points at the centre with length r
    assert np.linalg.norm(h) == pytest.approx(r, rel=1e-12)
    assert h @ imm.map_point(u0) == pytest.approx(-r * r, rel=1e-12)
    fr = sm.build_point_frame(imm, u0)
    A = sm.shape_operator(imm, fr.normals[:, 0], u0)
    assert abs(A[0, 0]) == pytest.approx(1.0 / r, rel=1e-12)


# -- xi-normal branch ------------------------------------------------------------


def test_xi_normal_immersion_reports_branch():
    s = flat5_structure()
    c2 = mf.chart("pl2", ["a", "b"])
    imm = sm.immersion(c2, s.metric, ["a", "b", 0, 0, 0], structure=s)
    pts = mf.sample_points([(-1, 1)] * 2, 6, np.random.default_rng(5))
    cls = sm.classify_submanifold(imm, pts, CFG)
    assert not cls.xi_tangent
    note = [c for c in cls.checks if c.check == "xi-tangency"][0]
    assert note.mode == "info"
    assert "not tangent" in note.note
    # phi swaps the (a, b)-plane into the normal bundle: anti-invariant
    assert cls.verdict == sm.ANTI_INVARIANT
