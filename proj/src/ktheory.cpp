#include "fillrad/ktheory.hpp"

#include "fillrad/error.hpp"
#include "fillrad/nerve.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace fillrad {
namespace {

using Wide = boost::multiprecision::cpp_bin_float_100;

std::complex<double> cx(double re, double im = 0.0) { return {re, im}; }

Eigen::MatrixXcd identity(std::size_t k)
{
    return Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
}

double pair_lip(const FiniteMetricSpace& space, const std::vector<Eigen::MatrixXcd>& values)
{
    double lip = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            const double gap = operator_norm(values[i] - values[j]);
            const double d = space(i, j);
            if (d > 0.0) lip = std::max(lip, gap / d);
            else if (gap > 0.0) return std::numeric_limits<double>::infinity();
        }
    return lip;
}

/// Spectral projection onto eigenvalues above 1/2 of the Hermitian part.
Eigen::MatrixXcd retract(const Eigen::MatrixXcd& m)
{
    const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    const auto& vecs = eig.eigenvectors();
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        if (eig.eigenvalues()(i) > 0.5) p += vecs.col(i) * vecs.col(i).adjoint();
    return p;
}

Wide wide(const mpq_class& q)
{
    return Wide(q.get_num().get_str()) / Wide(q.get_den().get_str());
}

mpq_class power(const mpq_class& base, int exponent)
{
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), static_cast<unsigned long>(exponent));
    mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), static_cast<unsigned long>(exponent));
    mpq_class out(num, den);
    out.canonicalize();
    return out;
}

}  // namespace

double operator_norm(const Eigen::MatrixXcd& m)
{
    if (m.size() == 0) return 0.0;
    if (m.size() == 1) return std::abs(m(0, 0));
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

MatrixField make_field(std::shared_ptr<const FiniteMetricSpace> domain, std::vector<Eigen::MatrixXcd> values,
                       std::optional<Eigen::MatrixXcd> at_infinity, std::vector<std::size_t> outside)
{
    if (!domain || values.size() != domain->size())
        throw Error(ErrorCode::InvalidArgument, "field needs one value per domain point");
    const auto k = values.empty() ? 0 : static_cast<std::size_t>(values.front().rows());
    auto square = [k](const Eigen::MatrixXcd& m) {
        return static_cast<std::size_t>(m.rows()) == k && static_cast<std::size_t>(m.cols()) == k;
    };
    for (const auto& v : values)
        if (!square(v)) throw Error(ErrorCode::InvalidArgument, "field values must be k x k");
    if (at_infinity && !square(*at_infinity))
        throw Error(ErrorCode::InvalidArgument, "value at infinity must be k x k");
    for (auto p : outside)
        if (p >= values.size()) throw Error(ErrorCode::InvalidArgument, "outside point out of range");
    MatrixField f{std::move(domain), k, std::move(values), 0.0, std::move(at_infinity), std::move(outside)};
    f.lip = pair_lip(*f.domain, f.values);
    return f;
}

FieldAudit audit_field(const MatrixField& field)
{
    FieldAudit a;
    a.lip = pair_lip(*field.domain, field.values);
    const Eigen::MatrixXcd id = identity(field.k);
    for (const auto& v : field.values) {
        a.sup_norm = std::max(a.sup_norm, operator_norm(v));
        a.projection_defect = std::max({a.projection_defect, operator_norm(v * v - v), operator_norm(v.adjoint() - v)});
        a.unitary_defect = std::max({a.unitary_defect, operator_norm(v * v.adjoint() - id), operator_norm(v.adjoint() * v - id)});
    }
    if (field.at_infinity) {
        for (auto p : field.outside)
            a.infinity_defect = std::max(a.infinity_defect, operator_norm(field.values[p] - *field.at_infinity));
        const auto& inf = *field.at_infinity;
        if (operator_norm(inf * inf - inf) <= kAlgebraTolerance && operator_norm(inf.adjoint() - inf) <= kAlgebraTolerance)
            a.rank_at_infinity = static_cast<int>(std::lround(inf.trace().real()));
    }
    a.is_projection = a.projection_defect <= kAlgebraTolerance && a.infinity_defect <= kAlgebraTolerance &&
                      (!field.at_infinity || a.rank_at_infinity);
    a.is_unitary = a.unitary_defect <= kAlgebraTolerance && a.infinity_defect <= kAlgebraTolerance;
    return a;
}

std::optional<LipschitzProjection> as_projection(const MatrixField& field)
{
    const auto a = audit_field(field);
    if (!a.is_projection) return std::nullopt;
    return LipschitzProjection{field, a.rank_at_infinity};
}

std::optional<LipschitzUnitary> as_unitary(const MatrixField& field)
{
    if (!audit_field(field).is_unitary) return std::nullopt;
    return LipschitzUnitary{field};
}

std::vector<LipschitzProjection> projection_homotopy(const LipschitzProjection& p, const LipschitzProjection& q,
                                                     std::size_t steps)
{
    const auto& fp = p.field;
    const auto& fq = q.field;
    if (fp.domain != fq.domain || fp.k != fq.k)
        throw Error(ErrorCode::InvalidArgument, "projections live on different domains");
    if (steps == 0)
        throw Error(ErrorCode::InvalidArgument, "homotopy needs at least one step");
    for (std::size_t i = 0; i < fp.values.size(); ++i)
        if (operator_norm(fp.values[i] - fq.values[i]) >= 1.0)
            throw Error(ErrorCode::InvalidArgument, "projections are not within distance 1");
    std::vector<LipschitzProjection> path;
    for (std::size_t s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / static_cast<double>(steps);
        std::vector<Eigen::MatrixXcd> values;
        values.reserve(fp.values.size());
        for (std::size_t i = 0; i < fp.values.size(); ++i) values.push_back(retract((1.0 - t) * fp.values[i] + t * fq.values[i]));
        std::optional<Eigen::MatrixXcd> inf;
        if (fp.at_infinity && fq.at_infinity) inf = retract((1.0 - t) * *fp.at_infinity + t * *fq.at_infinity);
        auto field = make_field(fp.domain, std::move(values), inf, fp.outside);
        auto proj = as_projection(field);
        if (!proj) throw std::logic_error("spectral retraction did not yield a projection");
        path.push_back(std::move(*proj));
    }
    return path;
}

Eigen::MatrixXcd bott_matrix(const Eigen::Vector3d& u)
{
    Eigen::MatrixXcd m(2, 2);
    m << cx(1.0 + u.z()), cx(u.x(), -u.y()), cx(u.x(), u.y()), cx(1.0 - u.z());
    return 0.5 * m;
}

LipschitzProjection bott_projection(std::shared_ptr<const FiniteMetricSpace> sphere, const Eigen::MatrixXd& unit_vectors)
{
    if (!sphere || unit_vectors.cols() != 3 || static_cast<std::size_t>(unit_vectors.rows()) != sphere->size())
        throw Error(ErrorCode::InvalidArgument, "Bott projection needs one unit 3-vector per point");
    std::vector<Eigen::MatrixXcd> values;
    for (Eigen::Index i = 0; i < unit_vectors.rows(); ++i) {
        const Eigen::Vector3d u = unit_vectors.row(i).transpose();
        if (std::abs(u.norm() - 1.0) > 1e-9)
            throw Error(ErrorCode::InvalidArgument, "Bott projection needs unit vectors");
        values.push_back(bott_matrix(u));
    }
    auto proj = as_projection(make_field(std::move(sphere), std::move(values)));
    if (!proj) throw std::logic_error("Bott field failed the projection audit");
    return *proj;
}

BallModel simplex_ball_model(std::size_t n, std::size_t subdivisions, std::size_t radial_steps)
{
    if (n == 0 || subdivisions == 0 || radial_steps == 0)
        throw Error(ErrorCode::InvalidArgument, "ball model needs n, subdivisions and radial steps >= 1");
    const Eigen::MatrixXd frame = regular_simplex_frame(n);
    std::vector<Eigen::VectorXd> dirs;
    std::vector<std::size_t> weights(n + 1);
    // Compositions of `subdivisions` into n + 1 parts with a zero part lie on the boundary.
    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t slot, std::size_t left) {
        if (slot == n) {
            weights[n] = left;
            if (std::find(weights.begin(), weights.end(), 0U) == weights.end()) return;
            Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
            for (std::size_t j = 0; j <= n; ++j)
                p += static_cast<double>(weights[j]) / static_cast<double>(subdivisions) * frame.col(static_cast<Eigen::Index>(j));
            dirs.push_back(p.normalized());
            return;
        }
        for (std::size_t w = 0; w <= left; ++w) {
            weights[slot] = w;
            walk(slot + 1, left - w);
        }
    };
    walk(0, subdivisions);
    BallModel model;
    model.boundary.resize(static_cast<Eigen::Index>(dirs.size()), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < dirs.size(); ++i) model.boundary.row(static_cast<Eigen::Index>(i)) = dirs[i].transpose();
    model.ball.resize(static_cast<Eigen::Index>(dirs.size() * radial_steps + 1), static_cast<Eigen::Index>(n));
    model.ball.row(0).setZero();
    model.direction.push_back(static_cast<std::size_t>(-1));
    Eigen::Index row = 1;
    for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t s = 1; s <= radial_steps; ++s) {
            model.ball.row(row++) = static_cast<double>(s) / static_cast<double>(radial_steps) * dirs[i].transpose();
            model.direction.push_back(i);
        }
    return model;
}

BallModel polar_ball_model(std::size_t angles, std::size_t radial_steps)
{
    if (angles < 3 || radial_steps == 0)
        throw Error(ErrorCode::InvalidArgument, "polar model needs >= 3 angles and >= 1 radial step");
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    BallModel model;
    model.boundary.resize(static_cast<Eigen::Index>(angles), 2);
    for (std::size_t a = 0; a < angles; ++a) {
        const double t = two_pi * static_cast<double>(a) / static_cast<double>(angles);
        model.boundary.row(static_cast<Eigen::Index>(a)) << std::cos(t), std::sin(t);
    }
    model.ball.resize(static_cast<Eigen::Index>(angles * radial_steps + 1), 2);
    model.ball.row(0).setZero();
    model.direction.push_back(static_cast<std::size_t>(-1));
    Eigen::Index row = 1;
    for (std::size_t a = 0; a < angles; ++a)
        for (std::size_t s = 1; s <= radial_steps; ++s) {
            model.ball.row(row++) = static_cast<double>(s) / static_cast<double>(radial_steps) *
                                    model.boundary.row(static_cast<Eigen::Index>(a));
            model.direction.push_back(a);
        }
    return model;
}

std::shared_ptr<const FiniteMetricSpace> euclidean_space(const Eigen::MatrixXd& points)
{
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (points.row(i) - points.row(j)).norm();
    return std::make_shared<const FiniteMetricSpace>(validate_metric(std::move(d), "euclidean"));
}

RadialExtension radial_extend(const Eigen::MatrixXd& boundary, const std::vector<Eigen::MatrixXcd>& values,
                              const Eigen::MatrixXd& ball, double tolerance)
{
    if (static_cast<std::size_t>(boundary.rows()) != values.size() || values.empty())
        throw Error(ErrorCode::IncompleteBoundary, "boundary field must have one value per boundary point");
    if (ball.cols() != boundary.cols())
        throw Error(ErrorCode::InvalidArgument, "ball and boundary dimensions differ");
    const auto k = values.front().rows();
    for (const auto& v : values)
        if (v.rows() != k || v.cols() != k) throw Error(ErrorCode::InvalidArgument, "boundary values must be k x k");

    RadialExtension out;
    const auto sphere = euclidean_space(boundary);
    out.boundary_lip = pair_lip(*sphere, values);
    for (const auto& v : values) out.boundary_sup = std::max(out.boundary_sup, operator_norm(v));
    out.bound = 2.0 * out.boundary_lip + 2.0 * out.boundary_sup;

    std::vector<Eigen::MatrixXcd> extended;
    extended.reserve(static_cast<std::size_t>(ball.rows()));
    for (Eigen::Index i = 0; i < ball.rows(); ++i) {
        const double r = ball.row(i).norm();
        if (r > 1.0 + tolerance)
            throw Error(ErrorCode::InvalidArgument, "ball point outside the unit ball");
        if (r <= 0.5) {
            extended.push_back(Eigen::MatrixXcd::Zero(k, k));
            continue;
        }
        const Eigen::RowVectorXd dir = ball.row(i) / r;
        Eigen::Index match = -1;
        for (Eigen::Index b = 0; b < boundary.rows() && match < 0; ++b)
            if ((boundary.row(b) - dir).norm() <= tolerance) match = b;
        if (match < 0)
            throw Error(ErrorCode::IncompleteBoundary, "ball point direction has no boundary value");
        extended.push_back(values[static_cast<std::size_t>(match)] * (2.0 * r - 1.0));
    }
    out.field = make_field(euclidean_space(ball), std::move(extended));
    if (out.field.lip > out.bound * (1.0 + 1e-12) + 1e-12)
        throw std::logic_error("radial extension exceeds 2L + 2|f|");
    return out;
}

Pullback scale_lipschitz(const MatrixField& field, std::shared_ptr<const FiniteMetricSpace> new_domain,
                         const std::function<double(std::size_t, std::size_t)>& image_distance, double lambda,
                         double tolerance)
{
    if (!new_domain || !(lambda >= 0.0) || !(tolerance >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "pullback needs a domain, lambda >= 0 and tolerance >= 0");
    Pullback out;
    out.lambda = lambda;
    std::vector<Eigen::MatrixXcd> values;
    for (std::size_t x = 0; x < new_domain->size(); ++x) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t y = 0; y < field.values.size(); ++y) {
            const double d = image_distance(x, y);
            if (d < best_d) {
                best_d = d;
                best = y;
            }
        }
        if (!(best_d <= tolerance))
            throw Error(ErrorCode::DomainMismatch, "image of point " + std::to_string(x) + " lies " +
                                                       std::to_string(best_d) + " from the field domain");
        out.snap = std::max(out.snap, best_d);
        values.push_back(field.values[best]);
    }
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < new_domain->size(); ++i)
        for (std::size_t j = i + 1; j < new_domain->size(); ++j)
            if ((*new_domain)(i, j) > 0.0) min_gap = std::min(min_gap, (*new_domain)(i, j));
    out.slack = out.snap > 0.0 && std::isfinite(min_gap) ? 2.0 * field.lip * out.snap / min_gap : 0.0;
    out.bound = lambda * field.lip + out.slack;
    out.field = make_field(std::move(new_domain), std::move(values), field.at_infinity);
    return out;
}

mpq_class parse_rational(const std::string& text)
{
    static const std::regex decimal(R"(\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*)");
    static const std::regex fraction(R"(\s*([+-]?\d+)\s*/\s*(\d+)\s*)");
    std::smatch m;
    if (std::regex_match(text, m, fraction)) {
        const mpz_class den(m[2].str());
        if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + text + "'");
        mpq_class q(mpz_class(m[1].str()), den);
        q.canonicalize();
        return q;
    }
    if (!std::regex_match(text, m, decimal) || (m[2].length() == 0 && m[3].length() == 0))
        throw Error(ErrorCode::ParseError, "not a decimal number: '" + text + "'");
    const std::string digits = m[2].str() + m[3].str();
    long exponent = m[4].matched ? std::stol(m[4].str()) : 0;
    exponent -= static_cast<long>(m[3].length());
    if (exponent > 100000 || exponent < -100000)
        throw Error(ErrorCode::ParseError, "exponent out of range in '" + text + "'");
    mpz_class num(digits.empty() ? "0" : digits), scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
    mpq_class q = exponent >= 0 ? mpq_class(num * scale) : mpq_class(num, scale);
    q.canonicalize();
    return m[1].str() == "-" ? mpq_class(-q) : q;
}

double log_rational(const mpq_class& x)
{
    if (x <= 0) throw Error(ErrorCode::InvalidArgument, "logarithm of a nonpositive number");
    auto log_z = [](const mpz_class& z) {
        long exp = 0;
        const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
        return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
    };
    return log_z(x.get_num()) - log_z(x.get_den());
}

LmBudget lm_budget(int m, mpq_class a1, mpq_class a2, mpq_class l0, std::optional<mpq_class> c1,
                   std::optional<mpq_class> c2)
{
    for (auto* q : {&a1, &a2, &l0}) q->canonicalize();
    if (c1) c1->canonicalize();
    if (c2) c2->canonicalize();
    if (m < 0 || a1 < 1 || a2 < 0)
        throw Error(ErrorCode::InvalidArgument, "lm_budget needs m >= 0, A1 >= 1, A2 >= 0");
    if (c1.has_value() != c2.has_value() || (c1 && *c1 <= 0))
        throw Error(ErrorCode::InvalidArgument, "C1 > 0 and C2 must be given together");
    LmBudget b;
    b.m = m;
    b.a1 = a1;
    b.a2 = a2;
    b.l0 = l0;
    b.sequence.push_back(l0);
    for (int j = 1; j <= m; ++j) b.sequence.push_back(a1 * b.sequence.back() + a2);
    if (a1 == 1) {
        b.closed_form = l0 + m * a2;
    } else {
        const mpq_class p = power(a1, m);
        b.closed_form = p * l0 + a2 * (p - 1) / (a1 - 1);
    }
    b.closed_form_matches = b.closed_form == b.sequence.back();
    if (c1) {
        b.c1 = c1;
        b.c2 = c2;
        Wide worst = std::numeric_limits<Wide>::infinity();
        const Wide log_c1 = boost::multiprecision::log(wide(*c1));
        for (int j = 0; j <= m; ++j) {
            if (b.sequence[static_cast<std::size_t>(j)] <= 0) continue;
            const Wide margin = log_c1 + wide(*c2) * j - boost::multiprecision::log(wide(b.sequence[static_cast<std::size_t>(j)]));
            worst = std::min(worst, margin);
        }
        b.exponential_bound_holds = worst >= 0;
        if (boost::multiprecision::isfinite(worst)) b.worst_log_margin = static_cast<double>(worst);
    }
    return b;
}

void write_matrix_field(std::ostream& out, const MatrixField& field)
{
    out << field.values.size() << ' ' << field.k << '\n';
    std::ostringstream row;
    row.precision(17);
    for (const auto& v : field.values) {
        row.str("");
        for (Eigen::Index i = 0; i < v.rows(); ++i)
            for (Eigen::Index j = 0; j < v.cols(); ++j)
                row << (i + j == 0 ? "" : " ") << v(i, j).real() << ' ' << v(i, j).imag();
        out << row.str() << '\n';
    }
}

MatrixField read_matrix_field(std::istream& in, std::shared_ptr<const FiniteMetricSpace> domain)
{
    std::size_t n = 0, k = 0;
    if (!(in >> n >> k))
        throw Error(ErrorCode::ParseError, "matrix field: missing header");
    if (!domain || n != domain->size())
        throw Error(ErrorCode::ParseError, "matrix field: point count does not match the domain");
    std::vector<Eigen::MatrixXcd> values(n, Eigen::MatrixXcd(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
    for (auto& v : values)
        for (Eigen::Index i = 0; i < v.rows(); ++i)
            for (Eigen::Index j = 0; j < v.cols(); ++j) {
                double re = 0.0, im = 0.0;
                if (!(in >> re >> im))
                    throw Error(ErrorCode::ParseError, "matrix field: truncated values");
                v(i, j) = {re, im};
            }
    return make_field(std::move(domain), std::move(values));
}

}  // namespace fillrad
