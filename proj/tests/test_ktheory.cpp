#include "fillrad/cover.hpp"
#include "fillrad/error.hpp"
#include "fillrad/ktheory.hpp"
#include "fillrad/models.hpp"
#include "fillrad/nerve.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

using namespace fillrad;

namespace {

std::shared_ptr<const FiniteMetricSpace> segment(std::size_t n, double length)
{
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), 1);
    for (std::size_t i = 0; i < n; ++i) pts(static_cast<Eigen::Index>(i), 0) = length * static_cast<double>(i) / static_cast<double>(n - 1);
    return euclidean_space(pts);
}

Eigen::MatrixXcd diag2(std::complex<double> a, std::complex<double> b)
{
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

// Oracle: pair scan through an independent Frobenius-free norm (largest singular value of the
// 2x2 difference from its characteristic polynomial).
double norm2x2(const Eigen::MatrixXcd& m)
{
    const Eigen::MatrixXcd h = m.adjoint() * m;
    const double tr = h.trace().real();
    const double det = std::abs(h.determinant());
    return std::sqrt(0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det))));
}

double oracle_lip(const FiniteMetricSpace& d, const std::vector<Eigen::MatrixXcd>& v)
{
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (d(i, j) > 0) best = std::max(best, norm2x2(v[i] - v[j]) / d(i, j));
    return best;
}

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, Eigen::Index k, double scale)
{
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXcd m(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) m(i, j) = {g(rng), g(rng)};
    return m;
}

}  // namespace

TEST_CASE("audit_field examples")
{
    const auto seg = segment(41, 4.0);
    std::vector<Eigen::MatrixXcd> constant(seg->size(), diag2(1, 0));
    const auto c = make_field(seg, constant);
    const auto a = audit_field(c);
    CHECK(a.lip == 0.0);
    CHECK(a.is_projection);
    CHECK_FALSE(a.rank_at_infinity);
    CHECK(as_projection(c));

    std::vector<Eigen::MatrixXcd> sine;
    for (std::size_t i = 0; i < seg->size(); ++i) sine.push_back(diag2(std::sin((*seg)(0, i)), 0));
    const auto s = audit_field(make_field(seg, sine));
    CHECK(s.lip <= 1.0);
    CHECK(s.lip > 0.9);
    CHECK_FALSE(s.is_projection);
    CHECK_FALSE(as_projection(make_field(seg, sine)));

    std::vector<Eigen::MatrixXcd> phases;
    for (std::size_t i = 0; i < seg->size(); ++i) phases.push_back(diag2(std::polar(1.0, (*seg)(0, i)), 1));
    CHECK(audit_field(make_field(seg, phases)).is_unitary);
    CHECK(as_unitary(make_field(seg, phases)));
    CHECK_FALSE(as_unitary(make_field(seg, sine)));

    // Values at infinity: declared outside points must agree with it.
    auto withinf = make_field(seg, constant, diag2(1, 0), {0, 40});
    CHECK(audit_field(withinf).rank_at_infinity == 1);
    CHECK(as_projection(withinf)->rank_at_infinity == 1);
    constant[40] = diag2(0, 0);
    CHECK_FALSE(audit_field(make_field(seg, constant, diag2(1, 0), {0, 40})).is_projection);

    CHECK_THROWS_AS(make_field(seg, std::vector<Eigen::MatrixXcd>(3, diag2(1, 0))), Error);
}

TEST_CASE("audit lip matches an independent pair scan")
{
    std::mt19937_64 rng(11);
    const auto seg = segment(30, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Eigen::MatrixXcd> v;
        for (std::size_t i = 0; i < seg->size(); ++i) v.push_back(random_matrix(rng, 2, 1.0));
        CHECK(make_field(seg, v).lip == doctest::Approx(oracle_lip(*seg, v)).epsilon(1e-9));
    }
    // Coincident points with different values.
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    auto twin = std::make_shared<const FiniteMetricSpace>(validate_metric(d));
    CHECK(std::isinf(make_field(twin, {diag2(1, 0), diag2(0, 1)}).lip));
}

TEST_CASE("bott_projection")
{
    CHECK((bott_matrix({0, 0, 1}) - diag2(1, 0)).norm() < 1e-15);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int i = 0; i < 50; ++i) {
        Eigen::Vector3d u(g(rng), g(rng), g(rng));
        u.normalize();
        CHECK(operator_norm(bott_matrix(u) - bott_matrix(-u)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((bott_matrix(u) + bott_matrix(-u) - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
    }

    const auto model = sample_model_space({Sphere2Model{1.0}, 400, 3, Placement::Regular});
    auto space = std::make_shared<const FiniteMetricSpace>(model.space);
    const auto p = bott_projection(space, model.params);
    const auto a = audit_field(p.field);
    CHECK(a.is_projection);
    CHECK(a.projection_defect <= kAlgebraTolerance);
    CHECK_FALSE(p.rank_at_infinity);
    CHECK(a.lip >= 0.45);
    CHECK(a.lip <= 0.65);
    // Differences of rank-one projections have a double singular value, where the 2x2 oracle is only
    // accurate to about sqrt(eps).
    CHECK(a.lip == doctest::Approx(oracle_lip(*space, p.field.values)).epsilon(1e-7));

    // Radius scales the constant as 1/R.
    const auto big = sample_model_space({Sphere2Model{3.0}, 100, 3, Placement::Regular});
    auto bspace = std::make_shared<const FiniteMetricSpace>(big.space);
    CHECK(bott_projection(bspace, big.params).field.lip <= 1.0 / 3.0 + 1e-12);

    Eigen::MatrixXd bad = model.params;
    bad(0, 0) += 0.1;
    CHECK_THROWS_AS(bott_projection(space, bad), Error);
}

TEST_CASE("ball models")
{
    const auto m = simplex_ball_model(3, 4, 5);
    // Boundary lattice points of a tetrahedron with 4 steps per edge: all compositions minus interior ones.
    CHECK(m.boundary.rows() == 35 - 1);
    for (Eigen::Index i = 0; i < m.boundary.rows(); ++i) CHECK(m.boundary.row(i).norm() == doctest::Approx(1.0));
    CHECK(m.ball.rows() == 34 * 5 + 1);
    CHECK(m.direction.front() == static_cast<std::size_t>(-1));
    const auto p = polar_ball_model(64, 16);
    CHECK(p.ball.rows() == 64 * 16 + 1);
    CHECK(p.boundary.rows() == 64);
    CHECK_THROWS_AS(polar_ball_model(2, 1), Error);
}

TEST_CASE("radial_extend examples")
{
    const auto model = polar_ball_model(64, 16);
    const std::vector<Eigen::MatrixXcd> zero(64, Eigen::MatrixXcd::Zero(1, 1));
    const auto z = radial_extend(model.boundary, zero, model.ball);
    CHECK(z.field.lip == 0.0);
    for (const auto& v : z.field.values) CHECK(v.norm() == 0.0);

    Eigen::MatrixXcd c(2, 2);
    c << 1.0, std::complex<double>(0, 2), 0.5, -1.0;
    const auto ce = radial_extend(model.boundary, std::vector<Eigen::MatrixXcd>(64, c), model.ball);
    CHECK(ce.boundary_lip == 0.0);
    CHECK(ce.field.lip <= 2.0 * operator_norm(c) + 1e-12);
    CHECK(ce.field.lip >= 1.9 * operator_norm(c));

    std::vector<Eigen::MatrixXcd> wind;
    for (Eigen::Index a = 0; a < 64; ++a) {
        Eigen::MatrixXcd w(1, 1);
        w(0, 0) = {model.boundary(a, 0), model.boundary(a, 1)};
        wind.push_back(w);
    }
    const auto we = radial_extend(model.boundary, wind, model.ball);
    CHECK(we.boundary_lip <= 1.0 + 1e-12);
    CHECK(we.boundary_sup == doctest::Approx(1.0));
    CHECK(we.field.lip <= 4.0);
    // Oracle: pair scan on the grid with scalar moduli.
    double scan = 0.0;
    for (Eigen::Index i = 0; i < model.ball.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = (model.ball.row(i) - model.ball.row(j)).norm();
            const auto fi = we.field.values[static_cast<std::size_t>(i)](0, 0);
            const auto fj = we.field.values[static_cast<std::size_t>(j)](0, 0);
            scan = std::max(scan, std::abs(fi - fj) / d);
        }
    CHECK(scan == doctest::Approx(we.field.lip).epsilon(1e-9));
    CHECK(scan <= 4.0);

    // Boundary agreement and vanishing core.
    for (Eigen::Index i = 1; i < model.ball.rows(); ++i) {
        const double r = model.ball.row(i).norm();
        const auto& v = we.field.values[static_cast<std::size_t>(i)];
        if (r <= 0.5) CHECK(v.norm() == 0.0);
        if (std::abs(r - 1.0) < 1e-12) CHECK((v - wind[model.direction[static_cast<std::size_t>(i)]]).norm() < 1e-12);
    }

    std::vector<Eigen::MatrixXcd> short_values(wind.begin(), wind.begin() + 63);
    CHECK_THROWS_AS(radial_extend(model.boundary, short_values, model.ball), Error);
    try {
        radial_extend(model.boundary.topRows(63), short_values, model.ball);
        FAIL("missing direction accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IncompleteBoundary);
    }
}

TEST_CASE("radial_extend bound over a randomized field suite")
{
    std::mt19937_64 rng(2024);
    int instances = 0;
    for (std::size_t n : {2U, 3U}) {
        const auto model = simplex_ball_model(n, n == 2 ? 6 : 3, 4);
        const auto sphere = euclidean_space(model.boundary);
        for (int trial = 0; trial < 50; ++trial, ++instances) {
            // Smooth field: a random matrix polynomial in the boundary coordinates, or white noise.
            const Eigen::Index k = 1 + static_cast<Eigen::Index>(trial % 3);
            std::vector<Eigen::MatrixXcd> coeff;
            for (std::size_t c = 0; c <= n; ++c) coeff.push_back(random_matrix(rng, k, 1.0));
            std::vector<Eigen::MatrixXcd> values;
            for (Eigen::Index b = 0; b < model.boundary.rows(); ++b) {
                Eigen::MatrixXcd v = coeff[0];
                if (trial % 5 == 4) v = random_matrix(rng, k, 1.0);
                else
                    for (std::size_t c = 0; c < n; ++c) v += model.boundary(b, static_cast<Eigen::Index>(c)) * coeff[c + 1];
                values.push_back(v);
            }
            const auto ext = radial_extend(model.boundary, values, model.ball);
            double sup = 0.0;
            for (const auto& v : values) sup = std::max(sup, operator_norm(v));
            CHECK(ext.boundary_lip == doctest::Approx(make_field(sphere, values).lip));
            CHECK(ext.field.lip <= 2.0 * ext.boundary_lip + 2.0 * sup + 1e-12);
        }
    }
    CHECK(instances == 100);
}

TEST_CASE("scale_lipschitz")
{
    const auto model = sample_model_space({Sphere2Model{1.0}, 120, 9, Placement::Regular});
    auto space = std::make_shared<const FiniteMetricSpace>(model.space);
    const auto bott = bott_projection(space, model.params);

    const auto id = scale_lipschitz(bott.field, space, [&](std::size_t x, std::size_t y) { return (*space)(x, y); }, 1.0, 0.0);
    CHECK(id.field.lip == doctest::Approx(bott.field.lip));
    CHECK(id.snap == 0.0);
    CHECK(id.slack == 0.0);

    const auto seg = segment(10, 2.0);
    const auto cst = scale_lipschitz(bott.field, seg, [&](std::size_t, std::size_t y) { return (*space)(7, y); }, 0.0, 0.0);
    CHECK(cst.field.lip == 0.0);
    CHECK(cst.bound == 0.0);

    // Snapping a segment onto a meridian sample of the sphere.
    const auto snapped = scale_lipschitz(
        bott.field, seg,
        [&](std::size_t x, std::size_t y) {
            const Eigen::Vector3d u(std::sin((*seg)(0, x)), 0.0, std::cos((*seg)(0, x)));
            return std::acos(std::clamp(u.dot(model.params.row(static_cast<Eigen::Index>(y)).transpose()), -1.0, 1.0));
        },
        1.0, 0.5);
    CHECK(snapped.snap > 0.0);
    CHECK(snapped.field.lip <= snapped.bound + 1e-12);
    CHECK_THROWS_AS(scale_lipschitz(bott.field, seg, [](std::size_t, std::size_t) { return 1.0; }, 1.0, 0.5), Error);
}

TEST_CASE("Bott projection pulled back along f_r")
{
    const auto model = sample_model_space({Sphere2Model{1.0}, 80, 4, Placement::Regular});
    auto space = std::make_shared<const FiniteMetricSpace>(model.space);
    const auto t = thicken_cover(build_ball_cover(space, 0.6, 1), 0.2);
    const auto nerve = build_nerve(t, NerveMetric::L1);
    const auto images = project_to_nerve(t);

    // Nerve sample: the images themselves, with the shortest-path closure of nerve distances.
    const auto n = static_cast<Eigen::Index>(images.size());
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            d(i, j) = i == j ? 0.0 : nerve.distance(images[static_cast<std::size_t>(i)], images[static_cast<std::size_t>(j)]);
    d = 0.5 * (d + d.transpose()).eval();
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    auto nerve_sample = std::make_shared<const FiniteMetricSpace>(validate_metric(d, "nerve images"));

    // Field on the nerve: Bott at the normalized weighted anchor direction.
    const auto& anchors = nerve.anchors();
    std::vector<Eigen::MatrixXcd> values;
    for (const auto& y : images) {
        Eigen::Vector3d u = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < y.vertices.size(); ++i)
            u += y.weights[i] * model.params.row(static_cast<Eigen::Index>(anchors[y.vertices[i]])).transpose();
        REQUIRE(u.norm() > 0.1);
        values.push_back(bott_matrix(u.normalized()));
    }
    const auto field = make_field(nerve_sample, values);
    REQUIRE(as_projection(field));

    const double lambda = lipschitz_audit(*space, [&](std::size_t x, std::size_t y) { return (*nerve_sample)(x, y); });
    const auto pb = scale_lipschitz(field, space, [&](std::size_t x, std::size_t y) { return (*nerve_sample)(x, y); },
                                    lambda, 1e-12);
    CHECK(pb.snap == 0.0);
    // Oracle: direct audit of the composed field x -> F(f_r(x)).
    const double direct = oracle_lip(*space, values);
    CHECK(direct == doctest::Approx(pb.field.lip).epsilon(1e-7));
    CHECK(direct <= lambda * field.lip * (1.0 + 1e-12));
    CHECK(pb.bound == doctest::Approx(lambda * field.lip));
}

TEST_CASE("projection_homotopy")
{
    const auto model = sample_model_space({Sphere2Model{1.0}, 60, 2, Placement::Regular});
    auto space = std::make_shared<const FiniteMetricSpace>(model.space);
    const auto p = bott_projection(space, model.params);
    // Rotate by a small angle about the z axis.
    Eigen::MatrixXd rotated = model.params;
    const double a = 0.3;
    for (Eigen::Index i = 0; i < rotated.rows(); ++i) {
        const double x = rotated(i, 0), y = rotated(i, 1);
        rotated(i, 0) = std::cos(a) * x - std::sin(a) * y;
        rotated(i, 1) = std::sin(a) * x + std::cos(a) * y;
    }
    const auto q = bott_projection(space, rotated);
    const auto path = projection_homotopy(p, q, 6);
    REQUIRE(path.size() == 7);
    CHECK((path.front().field.values[3] - p.field.values[3]).norm() < 1e-10);
    CHECK((path.back().field.values[3] - q.field.values[3]).norm() < 1e-10);
    for (const auto& step : path) {
        CHECK(audit_field(step.field).is_projection);
        CHECK(std::abs(step.field.values[5].trace().real() - 1.0) < 1e-9);
    }
    std::vector<Eigen::MatrixXd> flipped{-model.params};
    const auto far = bott_projection(space, flipped.front());
    CHECK_THROWS_AS(projection_homotopy(p, far, 4), Error);
}

TEST_CASE("lm_budget")
{
    const auto b = lm_budget(3, 2, 3, 0);
    REQUIRE(b.sequence.size() == 4);
    CHECK(b.sequence[1] == 3);
    CHECK(b.sequence[2] == 9);
    CHECK(b.sequence[3] == 21);
    CHECK(b.closed_form == 21);
    CHECK(b.closed_form_matches);
    CHECK_FALSE(b.exponential_bound_holds);

    const auto flat = lm_budget(7, 1, mpq_class(5, 2), 4);
    CHECK(flat.closed_form == mpq_class(4) + 7 * mpq_class(5, 2));
    CHECK(flat.closed_form_matches);

    const mpq_class huge = parse_rational("1e20");
    const auto big = lm_budget(3, huge, huge, 0, huge, mpq_class(50));
    CHECK(big.sequence[3] == huge * huge * huge + huge * huge + huge);
    CHECK(big.closed_form_matches);
    REQUIRE(big.exponential_bound_holds);
    CHECK(*big.exponential_bound_holds);
    CHECK(*big.worst_log_margin > 0.0);
    // Tightest at j = 1, where L_1 = C1.
    CHECK(*big.worst_log_margin == doctest::Approx(50.0).epsilon(1e-12));
    const auto tight = lm_budget(3, huge, huge, 0, huge, mpq_class(30));
    CHECK_FALSE(*tight.exponential_bound_holds);

    std::mt19937_64 rng(17);
    for (int m = 0; m <= 64; m += 3) {
        const mpq_class a1(static_cast<long>(1 + rng() % 9), static_cast<long>(1 + rng() % 3));
        if (a1 < 1) continue;
        const auto r = lm_budget(m, a1, mpq_class(static_cast<long>(rng() % 100), 7), mpq_class(static_cast<long>(rng() % 11)));
        CHECK(r.closed_form_matches);
    }
    CHECK(lm_budget(64, 1, 3, 2).closed_form_matches);

    CHECK_THROWS_AS(lm_budget(3, mpq_class(1, 2), 1, 0), Error);
    CHECK_THROWS_AS(lm_budget(3, 2, -1, 0), Error);
    CHECK_THROWS_AS(lm_budget(-1, 2, 1, 0), Error);
}

TEST_CASE("parse_rational and log_rational")
{
    CHECK(parse_rational("3") == 3);
    CHECK(parse_rational("-2.5") == mpq_class(-5, 2));
    CHECK(parse_rational("7/3") == mpq_class(7, 3));
    CHECK(parse_rational(".125") == mpq_class(1, 8));
    CHECK(parse_rational("1.5e-2") == mpq_class(3, 200));
    CHECK(parse_rational("+4E1") == 40);
    for (const char* bad : {"", "abc", "1/0", "1e", "--1", "."}) CHECK_THROWS_AS(parse_rational(bad), Error);
    CHECK(log_rational(parse_rational("1e300") * parse_rational("1e300")) == doctest::Approx(600.0 * std::log(10.0)));
    CHECK(log_rational(mpq_class(1, 3)) == doctest::Approx(-std::log(3.0)));
    CHECK_THROWS_AS(log_rational(0), Error);
}

TEST_CASE("matrix field round trip")
{
    const auto seg = segment(5, 1.0);
    std::mt19937_64 rng(3);
    std::vector<Eigen::MatrixXcd> v;
    for (int i = 0; i < 5; ++i) v.push_back(random_matrix(rng, 3, 1.0));
    const auto f = make_field(seg, v);
    std::stringstream s;
    write_matrix_field(s, f);
    const auto g = read_matrix_field(s, seg);
    REQUIRE(g.k == 3);
    for (int i = 0; i < 5; ++i) CHECK((g.values[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i)]).norm() == 0.0);
    std::stringstream truncated("5 3\n1 2 3");
    CHECK_THROWS_AS(read_matrix_field(truncated, seg), Error);
    std::stringstream wrong("4 1\n");
    CHECK_THROWS_AS(read_matrix_field(wrong, seg), Error);
}
