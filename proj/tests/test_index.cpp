#include "fillrad/error.hpp"
#include "fillrad/index.hpp"
#include "fillrad/ktheory.hpp"

#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

using namespace fillrad;

namespace {

using Mat = Eigen::MatrixXcd;
constexpr double kPi = 3.14159265358979323846;

Mat random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale)
{
    std::normal_distribution<double> g(0.0, scale);
    Mat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
    return m;
}

// Non-orthogonal idempotent S diag(1..1, 0..0) S^-1 of the given rank.
Mat random_idempotent(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank)
{
    const Mat s = Mat::Identity(n, n) + random_matrix(rng, n, 0.3 / std::sqrt(static_cast<double>(n)));
    Eigen::VectorXcd diag = Eigen::VectorXcd::Zero(n);
    diag.head(rank).setOnes();
    return s * diag.asDiagonal() * s.inverse();
}

double norm(const Mat& m) { return m.size() == 0 ? 0.0 : Eigen::JacobiSVD<Mat>(m).singularValues()(0); }

// Oracle for Theta: eigendecomposition, keeping eigenvalues with real part above 1/2.
Mat theta_by_eigen(const Mat& d)
{
    Eigen::ComplexEigenSolver<Mat> es(d);
    Eigen::VectorXcd keep(d.rows());
    for (Eigen::Index i = 0; i < d.rows(); ++i) keep(i) = es.eigenvalues()(i).real() > 0.5 ? 1.0 : 0.0;
    return es.eigenvectors() * keep.asDiagonal() * es.eigenvectors().inverse();
}

// Path graph of n sites with D+ = m0 + forward difference; site metric |i - j|.
GradedOperator path_operator(std::size_t n, double m0, bool diagonal)
{
    const auto h = static_cast<Eigen::Index>(n);
    Mat dplus = m0 * Mat::Identity(h, h);
    if (!diagonal)
        for (Eigen::Index i = 0; i + 1 < h; ++i) {
            dplus(i, i) -= 1.0;
            dplus(i, i + 1) = 1.0;
        }
    GradedOperator op = graded_from_plus(dplus);
    Eigen::MatrixXd pts(h, 1);
    for (Eigen::Index i = 0; i < h; ++i) pts(i, 0) = static_cast<double>(i);
    op.sites = euclidean_space(pts);
    op.site_of.resize(n);
    for (std::size_t i = 0; i < n; ++i) op.site_of[i] = i;
    return op;
}

mpq_class identity_control(const mpq_class& s) { return s; }

}  // namespace

TEST_CASE("chi_eval")
{
    CHECK(chi_eval(0.0) == 0.0);
    for (double x : {0.5, 1.0, 5.0, 45.0}) CHECK(std::abs(chi_eval(x) + chi_eval(-x)) <= 1e-12);
    CHECK(chi_eval(50.0) >= 0.97);
    CHECK(chi_eval(50.0) <= 1.0);
    CHECK_THROWS_AS(chi_eval(std::nan("")), Error);

    boost::math::quadrature::tanh_sinh<long double> oracle;
    double previous = 0.0;
    for (double x : {0.01, 0.7, 3.0, 12.5, 39.9, 40.1, 80.0, 500.0}) {
        const long double ref = 2.0L / 3.14159265358979323846264338327950288L *
                                oracle.integrate(
                                    [](long double y) {
                                        // (1 - cos y) / y^2 = 2 sin^2(y/2) / y^2 without cancellation.
                                        const long double s = y == 0.0L ? 0.5L : std::sin(y / 2) / y;
                                        return 2.0L * s * s;
                                    },
                                    0.0L, static_cast<long double>(x));
        CHECK(std::abs(chi_eval(x) - static_cast<double>(ref)) <= 1e-12);
        CHECK(chi_eval(x) >= previous);
        previous = chi_eval(x);
    }
}

TEST_CASE("chi_of_operator")
{
    const double sigma = 0.8;
    Mat dplus(1, 1);
    dplus(0, 0) = sigma;
    const GradedOperator op = graded_from_plus(dplus, true);
    CHECK(*op.gap == doctest::Approx(sigma));
    const ChiBlocks c = chi_of_operator(op, sigma);
    CHECK(std::abs(c.u(0, 0) - chi_eval(1.0)) <= 1e-14);
    // Eigenvectors (1, +-1)/sqrt 2 carry chi(+-1).
    const Mat full = c.full();
    Eigen::VectorXcd plus(2), minus(2);
    plus << 1.0, 1.0;
    minus << 1.0, -1.0;
    CHECK(std::abs(plus.dot(full * plus) / 2.0 - chi_eval(1.0)) <= 1e-14);
    CHECK(std::abs(minus.dot(full * minus) / 2.0 - chi_eval(-1.0)) <= 1e-14);

    const GradedOperator zero = graded_from_plus(Mat::Zero(3, 3));
    CHECK(chi_of_operator(zero, 1.0).full().cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(chi_of_operator(zero, 0.0), Error);

    std::mt19937_64 rng(11);
    const GradedOperator gapped = graded_from_plus(2.0 * Mat::Identity(6, 6) + random_matrix(rng, 6, 0.2), true);
    ChiCalculus calc(gapped);
    double previous = 2.0;
    for (double t : {1.0, 0.3, 0.1, 0.01}) {
        const ChiBlocks b = calc(t);
        const Mat f = b.full();
        CHECK(norm(f) <= 1.0 + 1e-12);
        CHECK((b.v - b.u.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        const Mat uv = b.u * b.v;
        CHECK((uv - uv.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        const double defect = norm(f * f - Mat::Identity(12, 12));
        CHECK(defect < previous);
        previous = defect;
    }
    CHECK(previous < 0.02);
}

TEST_CASE("make_graded_operator validation")
{
    Mat d = Mat::Zero(4, 4);
    d(0, 0) = 1.0;
    CHECK_THROWS_AS(make_graded_operator(d), Error);
    Mat nonhermitian = Mat::Zero(4, 4);
    nonhermitian(0, 2) = 1.0;
    CHECK_THROWS_AS(make_graded_operator(nonhermitian), Error);
    CHECK_THROWS_AS(make_graded_operator(Mat::Zero(3, 3)), Error);
    CHECK_THROWS_AS(graded_from_plus(Mat::Zero(2, 2), true), Error);
}

TEST_CASE("propagation width")
{
    const GradedOperator path = path_operator(256, 1.5, false);
    double previous = std::numeric_limits<double>::infinity();
    for (double t : {1.0, 4.0, 16.0}) {
        const double w = propagation_width(path, t);
        CHECK(w <= previous);
        previous = w;
    }
    const GradedOperator diagonal = path_operator(32, 1.5, true);
    for (double t : {1.0, 4.0, 16.0}) CHECK(propagation_width(diagonal, t) == 0.0);
    CHECK_THROWS_AS(propagation_width(graded_from_plus(Mat::Identity(3, 3)), 1.0), Error);

    // Commutator with a bump function shrinks as t grows.
    const GradedOperator small = path_operator(64, 1.5, false);
    Eigen::VectorXcd bump(128);
    for (Eigen::Index i = 0; i < 64; ++i) bump(i) = bump(64 + i) = std::max(0.0, 1.0 - std::abs(static_cast<double>(i) - 32.0) / 10.0);
    double last = std::numeric_limits<double>::infinity();
    for (double t : {1.0, 4.0, 16.0, 64.0}) {
        const Mat c = chi_of_operator(small, t).full();
        const Mat comm = c * bump.asDiagonal() - bump.asDiagonal() * c;
        const double n = norm(comm);
        CHECK(n < last);
        last = n;
    }
    CHECK(last < 0.01);
}

TEST_CASE("difference construction algebra")
{
    Mat beta = Mat::Zero(2, 2);
    beta(0, 0) = 1.0;
    CHECK((z_matrix(beta) * z_inverse(beta) - Mat::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((difference_d(beta, beta) - e13(2)).cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Mat a = random_idempotent(rng, 8, 1 + trial % 7);
        const Mat b = random_idempotent(rng, 8, 1 + (trial * 3) % 7);
        CAPTURE(trial);
        CHECK((z_matrix(b) * z_inverse(b) - Mat::Identity(32, 32)).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((z_inverse(b) * z_matrix(b) - Mat::Identity(32, 32)).cwiseAbs().maxCoeff() <= 1e-10);
        const Mat d = difference_d(a, b);
        CHECK(norm(d * d - d) <= 1e-10);
        CHECK(norm(d - difference_product(a, b)) <= 1e-10);
        CHECK((difference_d(b, b) - e13(8)).cwiseAbs().maxCoeff() == 0.0);
        // The class is rank(alpha) - rank(beta).
        CHECK(std::abs((d.trace() - e13(8).trace()).real() - ((a.trace() - b.trace()).real())) <= 1e-9);
    }
    CHECK_THROWS_AS(difference_d(Mat::Zero(2, 2), Mat::Zero(3, 3)), Error);
}

TEST_CASE("spectral_norm matches the SVD")
{
    std::mt19937_64 rng(3);
    for (Eigen::Index n : {1, 2, 7, 40, 150}) {
        const Mat m = random_matrix(rng, n, 1.0);
        const double lanczos = spectral_norm([&m](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(m * v); },
                                             [&m](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(m.adjoint() * v); }, n);
        CHECK(lanczos == doctest::Approx(norm(m)).epsilon(1e-8));
    }
    const Mat low = Mat::Zero(20, 20);
    CHECK(spectral_norm([&low](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(low * v); },
                        [&low](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(low * v); }, 20) == 0.0);
}

TEST_CASE("theta")
{
    std::mt19937_64 rng(17);
    const Mat p = random_idempotent(rng, 10, 4);
    for (auto method : {ThetaMethod::Spectral, ThetaMethod::Contour}) {
        const ThetaResult r = theta(p, method);
        CHECK(norm(r.theta - p) <= 1e-10);
        CHECK(r.idempotent_residual <= 1e-8);
    }
    Mat diag = Mat::Zero(2, 2);
    diag(0, 0) = 0.9;
    diag(1, 1) = 0.1;
    Mat expected = Mat::Zero(2, 2);
    expected(0, 0) = 1.0;
    CHECK(norm(theta(diag).theta - expected) <= 1e-12);
    CHECK(norm(theta(diag, ThetaMethod::Contour).theta - expected) <= 1e-10);

    for (int trial = 0; trial < 6; ++trial) {
        const Mat base = random_idempotent(rng, 12, 5);
        const Mat dir = random_matrix(rng, 12, 1.0);
        // Scale the perturbation until |d^2 - d| = 0.2.
        double lo = 0.0, hi = 1.0;
        auto defect = [&](double s) { const Mat d = base + s * dir; return norm(d * d - d); };
        while (defect(hi) < 0.2) hi *= 2.0;
        for (int i = 0; i < 60; ++i) (defect(0.5 * (lo + hi)) < 0.2 ? lo : hi) = 0.5 * (lo + hi);
        const Mat d = base + lo * dir;
        CAPTURE(trial);
        CHECK(defect(lo) == doctest::Approx(0.2).epsilon(1e-6));
        const ThetaResult spectral = theta(d);
        const ThetaResult contour = theta(d, ThetaMethod::Contour);
        CHECK(norm(spectral.theta - contour.theta) <= 1e-8);
        CHECK(norm(spectral.theta - theta_by_eigen(d)) <= 1e-8);
        CHECK(spectral.idempotent_residual <= 1e-8);
        CHECK(contour.idempotent_residual <= 1e-8);
        CHECK(contour.contour_nodes >= 128);
    }
    CHECK_THROWS_AS(theta(0.5 * Mat::Identity(3, 3)), Error);
    try {
        theta(0.5 * Mat::Identity(3, 3));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SpectralGapLost);
    }
}

TEST_CASE("compressed package agrees with the full four-block construction")
{
    std::mt19937_64 rng(23);
    Eigen::MatrixXd pts(3, 1);
    pts << 0.0, 1.0, 2.0;
    const auto space = euclidean_space(pts);
    const Mat south = bott_matrix({0.0, 0.0, -1.0});
    for (int trial = 0; trial < 4; ++trial) {
        GradedOperator op = graded_from_plus(1.5 * Mat::Identity(3, 3) + random_matrix(rng, 3, 0.3), true);
        std::vector<Mat> pv, qv(3, south);
        for (int i = 0; i < 3; ++i) {
            Eigen::Vector3d u = Eigen::Vector3d::Random();
            pv.push_back(i == 1 ? bott_matrix(u.normalized()) : south);
        }
        const MatrixField p = make_field(space, pv), q = make_field(space, qv);
        for (double t : {0.05, 0.4, 3.0}) {
            const DifferencePackage pkg = build_package(op, t, p, q, {1});
            const Eigen::Index m = pkg.alpha.rows();
            Mat pplus = Mat::Zero(m, m), qplus = Mat::Zero(m, m);
            for (Eigen::Index i = 0; i < 3; ++i) {
                pplus.block(2 * i, 2 * i, 2, 2) = pv[static_cast<std::size_t>(i)];
                qplus.block(2 * i, 2 * i, 2, 2) = qv[static_cast<std::size_t>(i)];
            }
            // Independent route: P_t (x) I_2 times block-diagonal p, then the uncompressed constructions.
            Mat ptk = Mat::Zero(m, m);
            for (Eigen::Index i = 0; i < pkg.pt.rows(); ++i)
                for (Eigen::Index j = 0; j < pkg.pt.cols(); ++j) ptk.block(2 * i, 2 * j, 2, 2) = pkg.pt(i, j) * Mat::Identity(2, 2);
            Mat pfull = Mat::Zero(m, m), qfull = Mat::Zero(m, m);
            pfull.topLeftCorner(m / 2, m / 2) = pplus.topLeftCorner(m / 2, m / 2);
            pfull.bottomRightCorner(m / 2, m / 2) = pplus.topLeftCorner(m / 2, m / 2);
            qfull.topLeftCorner(m / 2, m / 2) = qplus.topLeftCorner(m / 2, m / 2);
            qfull.bottomRightCorner(m / 2, m / 2) = qplus.topLeftCorner(m / 2, m / 2);
            Mat phalf = Mat::Zero(m, m), qhalf = Mat::Zero(m, m);
            phalf.topLeftCorner(m / 2, m / 2) = pplus.topLeftCorner(m / 2, m / 2);
            qhalf.topLeftCorner(m / 2, m / 2) = qplus.topLeftCorner(m / 2, m / 2);
            const Mat a = difference_product(ptk * pfull, ptk * qfull);
            const Mat b = difference_product(phalf, qhalf);
            const Mat d = difference_product(a, b);
            const Mat e = e13(4 * m);
            CAPTURE(trial);
            CAPTURE(t);
            CHECK(norm(d * d - d) == doctest::Approx(pkg.defect_idempotent).epsilon(1e-7));
            CHECK(norm(d - e) == doctest::Approx(pkg.defect_to_e).epsilon(1e-7));
            CHECK(norm(b * b - b) <= 1e-12);
            CHECK(pkg.b_idempotent_defect <= 1e-12);
            if (pkg.defect_idempotent < 0.25) {
                const PairingReport r = pairing(pkg, {});
                const Mat th = theta(d).theta;
                CHECK(std::abs((th.trace() - e.trace()).real() - r.raw_index) <= 1e-8);
                CHECK(norm(th - e) == doctest::Approx(r.theta_to_e).epsilon(1e-6));
                REQUIRE(r.method_agreement.has_value());
                CHECK(*r.method_agreement <= 1e-8);
                CHECK(r.rounding_residual < 0.1);
            }
        }
    }
}

TEST_CASE("build_package and pairing on equal projections")
{
    const LatticeModel model = lattice_dirac_torus(8, 1, 1.0);
    const DifferencePackage pkg = build_package(model.op, 0.5, model.fields.q, model.fields.q);
    CHECK(pkg.defect_to_e == 0.0);
    CHECK(pkg.defect_idempotent == 0.0);
    CHECK((pkg.d() - pkg.e()).cwiseAbs().maxCoeff() == 0.0);
    const PairingReport r = pairing(pkg, {});
    CHECK(r.index == 0);
    CHECK(r.theta_to_e <= 1e-10);
    CHECK(r.equivalence_certificate);

    try {
        build_package(model.op, 0.5, model.fields.p, model.fields.q, {0});
        FAIL("expected SupportViolation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SupportViolation);
    }
}

TEST_CASE("lattice Dirac model")
{
    for (int q : {0, 1, -2}) {
        const LatticeModel model = lattice_dirac_torus(8, q, 1.0);
        CAPTURE(q);
        const Mat& d = model.op.d;
        CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(d.topLeftCorner(64, 64).cwiseAbs().maxCoeff() == 0.0);
        // Spectral gap audit through a full eigenvalue sweep of D.
        Eigen::SelfAdjointEigenSolver<Mat> es(d, Eigen::EigenvaluesOnly);
        const double smallest = es.eigenvalues().cwiseAbs().minCoeff();
        CHECK(smallest >= model.gap_bound - 1e-12);
        CHECK(*model.op.gap == doctest::Approx(smallest).epsilon(1e-10));
        CHECK(model.fields.lip > 0.0);
        CHECK(audit_field(model.fields.p).is_projection);
    }
    // Square D+ always has equal kernel dimensions; the flux shows up in the overlap oracle.
    CHECK(overlap_kernel_count(8, 0).index() == 0);
    CHECK(overlap_kernel_count(16, 1).index() == 1);
    CHECK(overlap_kernel_count(8, -1).index() == -1);
    CHECK_THROWS_AS(lattice_dirac_torus(6, 0, 1.0), Error);
    try {
        lattice_dirac_torus(8, 3, 1.0);
        FAIL("expected FluxAliased");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FluxAliased);
    }
}

TEST_CASE("pairing on the lattice is stable across admissible t")
{
    const LatticeModel model = lattice_dirac_torus(8, 1, 1.0);
    std::optional<int> first;
    for (double t : {0.02, 0.05, 0.1}) {
        PairingOptions o;
        o.t = t;
        const PairingReport r = pairing(model.op, model.fields.p, model.fields.q, o, model.fields.region);
        CHECK(r.rounding_residual < 0.1);
        CHECK(r.theta_residual <= 1e-8);
        if (!first) first = r.index;
        CHECK(r.index == *first);
    }
}

TEST_CASE("fit_through_origin and estimate_constants")
{
    std::vector<double> x{0.1, 0.2, 0.4, 0.8, 1.6}, y;
    for (double v : x) y.push_back(2.75 * v);
    const LinearFit f = fit_through_origin(x, y);
    CHECK(std::abs(f.slope - 2.75) <= 1e-6);
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.max_ratio == doctest::Approx(2.75));
    CHECK_THROWS_AS(fit_through_origin({1, 2, 3, 4}, {1, 2, 3, 4}), Error);
    try {
        fit_through_origin({1, 2, 3, 4, 5}, {5, -1, 4, 0, 1});
        FAIL("expected FitUnreliable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FitUnreliable);
    }

    std::vector<DefectSample> large, small;
    for (double t : {2.0, 4.0, 8.0, 16.0, 32.0}) large.push_back({t, 0.5, 0.7, 1.3 * 0.5 / t, 0.0});
    for (double t : {0.01, 0.02, 0.04, 0.08, 0.16}) small.push_back({t, 0.5, 0.7, 0.0, 0.9 * t / 0.7});
    const ConstantEstimate c = estimate_constants(large, small);
    CHECK(std::abs(c.c1.slope - 1.3) <= 1e-6);
    CHECK(std::abs(c.c2.slope - 0.9) <= 1e-6);
}

TEST_CASE("defect is linear in the Lipschitz constant at fixed large t")
{
    const LatticeModel model = lattice_dirac_torus(8, 0, 1.0);
    const ProjectionPair one = twisted_projection_pair(8, 3.0, 0.3, 0);
    const ProjectionPair two = twisted_projection_pair(8, 3.0, 0.6, 0);
    CHECK(two.lip / one.lip == doctest::Approx(2.0).epsilon(0.05));
    const double d1 = build_package(model.op, 16.0, one.p, one.q, one.region).defect_idempotent;
    const double d2 = build_package(model.op, 16.0, two.p, two.q, two.region).defect_idempotent;
    CHECK(d2 / d1 == doctest::Approx(two.lip / one.lip).epsilon(0.1));
}

TEST_CASE("vanishing experiment below the threshold")
{
    const LatticeModel model = lattice_dirac_torus(8, 1, 1.0);
    const double sigma = *model.op.gap;
    const double c1 = 0.75, c2 = 1.0;
    const double threshold = sigma / (16.0 * c1 * c2);
    auto generator = [&](double lip) {
        // Lipschitz constant is proportional to the amplitude for amplitudes below pi.
        const double unit = twisted_projection_pair(8, 3.0, 1.0, 1).lip;
        return twisted_projection_pair(8, 3.0, std::min(kPi, lip / unit), 1);
    };
    const VanishingReport rep = vanishing_experiment(model.op, sigma, generator, {0.0, 0.25 * threshold, 0.5 * threshold}, c1, c2);
    CHECK(rep.threshold == doctest::Approx(threshold));
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].t0 == 1.0);
    for (const auto& row : rep.rows) {
        CHECK(row.below_threshold);
        CHECK(row.report.index == 0);
        CHECK(row.report.theta_to_e < 1.0);
    }
    CHECK(rep.violations == 0);
}

TEST_CASE("main_bound")
{
    const LmBudget unit = lm_budget(0, 1, 0, 1);
    CHECK(main_bound(1, 0, identity_control, 1, 1, unit, true).value == 16);
    const LmBudget seven = lm_budget(2, 2, 3, 0);
    REQUIRE(seven.sequence[2] == 9);
    const MainBound b = main_bound(1, 2, [](const mpq_class& s) { return mpq_class(2 * s); }, 1, 1, seven, true);
    CHECK(b.value == 7776);
    CHECK(b.even_argument == 3888);

    const MainBound half = main_bound(2, 2, identity_control, 1, 1, seven, true);
    CHECK(half.even_argument * 2 == b.even_argument);

    const LmBudget longer = lm_budget(3, 2, 3, 0);
    const MainBound odd = main_bound(1, 2, identity_control, 1, 1, longer, false);
    CHECK(odd.odd_argument == mpq_class(16 * 64 * 21));
    CHECK(odd.value == odd.odd_value);
    CHECK(odd.even_value == 3888);
    CHECK_THROWS_AS(main_bound(1, 2, identity_control, 1, 1, seven, false), Error);
    CHECK_THROWS_AS(main_bound(0, 0, identity_control, 1, 1, unit, true), Error);

    for (const ControlFunction& bad : std::vector<ControlFunction>{
             [](const mpq_class& s) { return mpq_class(s / 2); },
             [](const mpq_class& s) { return s < 8 ? mpq_class(100) : s; }}) {
        try {
            main_bound(1, 0, bad, 1, 1, unit, true);
            FAIL("expected BadControlFunction");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BadControlFunction);
        }
    }
}

TEST_CASE("operator file round trip")
{
    std::mt19937_64 rng(2);
    const GradedOperator op = graded_from_plus(random_matrix(rng, 5, 1.0));
    std::stringstream s;
    write_operator(s, op);
    const GradedOperator back = read_operator(s);
    CHECK(back.half == 5);
    CHECK((back.d - op.d).cwiseAbs().maxCoeff() == 0.0);
    std::stringstream bad("4\n1 0 2 0");
    CHECK_THROWS_AS(read_operator(bad), Error);
    std::stringstream odd("3\n");
    CHECK_THROWS_AS(read_operator(odd), Error);
}
