#include "fillrad/index.hpp"

#include "fillrad/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace fillrad {
namespace {

constexpr double kPi = 3.14159265358979323846;
using Cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

Mat eye(Eigen::Index n) { return Mat::Identity(n, n); }

// int_x^inf e^{iy} / y^2 dy by its asymptotic series; accurate to double precision for x >= 40.
Cx tail_integral(double x)
{
    const Cx i(0.0, 1.0);
    Cx sum = 0.0;
    Cx factor = 1.0;
    double previous = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 30; ++j) {
        const Cx term = factor * i * std::exp(i * x) / std::pow(x, 2 + j);
        if (std::abs(term) > previous) break;
        previous = std::abs(term);
        sum += term;
        if (previous < 1e-18) break;
        factor *= -i * static_cast<double>(2 + j);
    }
    return sum;
}

// Compressed difference form: e' + [beta; 1 - beta] (alpha - beta) [beta, 1 - beta] on blocks (1, 3).
Mat compressed_difference(const Mat& alpha, const Mat& beta)
{
    const Eigen::Index m = alpha.rows();
    const Mat delta = alpha - beta;
    const Mat bd = beta * delta;
    const Mat db = delta * beta;
    const Mat bdb = bd * beta;
    Mat out = Mat::Zero(2 * m, 2 * m);
    out.topLeftCorner(m, m) = eye(m) + bdb;
    out.topRightCorner(m, m) = bd - bdb;
    out.bottomLeftCorner(m, m) = db - bdb;
    out.bottomRightCorner(m, m) = delta - bd - db + bdb;
    return out;
}

// Vectors are laid out as (grading, basis, component); f acts blockwise on the component.
// m * (f on H+ and H-), one k-column block at a time.
Mat times_site_blocks(const Mat& m, const MatrixField& f, const std::vector<std::size_t>& site_of, std::size_t half)
{
    const auto k = static_cast<Eigen::Index>(f.k);
    Mat out(m.rows(), m.cols());
    for (std::size_t g = 0; g < 2; ++g)
        for (std::size_t i = 0; i < half; ++i) {
            const auto at = static_cast<Eigen::Index>(g * half + i) * k;
            out.middleCols(at, k) = m.middleCols(at, k) * f.values[site_of[i]];
        }
    return out;
}

// Compressed difference form of (p on H+, q on H+); block diagonal in each quadrant.
Mat site_difference(const MatrixField& p, const MatrixField& q, const std::vector<std::size_t>& site_of, std::size_t half)
{
    const auto k = static_cast<Eigen::Index>(p.k);
    const auto m = static_cast<Eigen::Index>(2 * half) * k;
    Mat out = Mat::Zero(2 * m, 2 * m);
    out.topLeftCorner(m, m).setIdentity();
    for (std::size_t i = 0; i < half; ++i) {
        const Mat c = compressed_difference(p.values[site_of[i]], q.values[site_of[i]]);
        const auto at = static_cast<Eigen::Index>(i) * k;
        out.block(at, at, k, k) = c.topLeftCorner(k, k);
        out.block(at, m + at, k, k) = c.topRightCorner(k, k);
        out.block(m + at, at, k, k) = c.bottomLeftCorner(k, k);
        out.block(m + at, m + at, k, k) = c.bottomRightCorner(k, k);
    }
    return out;
}

Mat kron_identity(const Mat& m, std::size_t k)
{
    const auto kk = static_cast<Eigen::Index>(k);
    Mat out = Mat::Zero(m.rows() * kk, m.cols() * kk);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (m(i, j) != Cx(0.0))
                for (Eigen::Index c = 0; c < kk; ++c) out(i * kk + c, j * kk + c) = m(i, j);
    return out;
}

// x -> [b; 1 - b] X [b, 1 - b] x for a matrix-free X.
struct Sandwich {
    const Mat& b;
    std::function<Vec(const Vec&)> inner;
    std::function<Vec(const Vec&)> inner_adjoint;

    Vec apply(const Vec& x) const
    {
        const Eigen::Index m = b.rows();
        const Vec top = x.head(m), bottom = x.tail(m);
        const Vec r = b * (top - bottom) + bottom;
        const Vec y = inner(r);
        Vec out(2 * m);
        out.head(m) = b * y;
        out.tail(m) = y - out.head(m);
        return out;
    }
    Vec apply_adjoint(const Vec& x) const
    {
        const Eigen::Index m = b.rows();
        const Vec top = x.head(m), bottom = x.tail(m);
        const Vec r = b.adjoint() * (top - bottom) + bottom;
        const Vec y = inner_adjoint(r);
        Vec out(2 * m);
        out.head(m) = b.adjoint() * y;
        out.tail(m) = y - out.head(m);
        return out;
    }
    double norm() const
    {
        return spectral_norm([this](const Vec& v) { return apply(v); }, [this](const Vec& v) { return apply_adjoint(v); },
                             2 * b.rows());
    }
};

double dense_norm(const Mat& m)
{
    return spectral_norm([&m](const Vec& v) { return Vec(m * v); }, [&m](const Vec& v) { return Vec(m.adjoint() * v); },
                         m.cols());
}

double idempotent_defect(const Mat& m)
{
    return spectral_norm([&m](const Vec& v) { const Vec w = m * v; return Vec(m * w - w); },
                         [&m](const Vec& v) { const Vec w = m.adjoint() * v; return Vec(m.adjoint() * w - w); }, m.cols());
}

Mat sign_newton(const Mat& s0)
{
    Mat s = s0;
    double last_change = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 100; ++iter) {
        Eigen::PartialPivLU<Mat> lu(s);
        const Mat inv = lu.inverse();
        if (!inv.allFinite()) throw Error(ErrorCode::SpectralFailure, "sign iteration hit a singular matrix");
        // Frobenius scaling speeds up the early iterations.
        const double mu = iter < 6 ? std::sqrt(inv.norm() / s.norm()) : 1.0;
        const Mat next = 0.5 * (mu * s + inv / mu);
        const double change = (next - s).norm();
        s = next;
        const double scale = std::max(1.0, s.norm());
        // Quadratic convergence ends in rounding noise; stop once the step stops shrinking.
        if (change <= 1e-14 * scale || (change <= 1e-9 * scale && change > 0.25 * last_change)) return s;
        last_change = change;
    }
    throw Error(ErrorCode::SpectralFailure, "sign iteration did not converge");
}

Mat theta_spectral(const Mat& d)
{
    const Eigen::Index n = d.rows();
    return 0.5 * (sign_newton(2.0 * d - eye(n)) + eye(n));
}

Mat theta_contour(const Mat& d, std::size_t& nodes_used)
{
    const Eigen::Index n = d.rows();
    // Theta = (1/N) sum_j (xi_j - 1) (xi_j - d)^-1 on xi_j = 1 + e^{i phi_j} / 2.
    auto node_sum = [&](std::size_t count, std::size_t stride, std::size_t offset) {
        Mat acc = Mat::Zero(n, n);
        for (std::size_t j = offset; j < count; j += stride) {
            const Cx w = 0.5 * std::exp(Cx(0.0, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(count)));
            const Mat shifted = (1.0 + w) * eye(n) - d;
            acc += w * Eigen::PartialPivLU<Mat>(shifted).inverse();
        }
        return acc;
    };
    std::size_t count = 64;
    Mat sum = node_sum(count, 1, 0);
    Mat current = sum / static_cast<double>(count);
    while (count < 16384) {
        sum += node_sum(2 * count, 2, 1);
        count *= 2;
        const Mat next = sum / static_cast<double>(count);
        const double change = (next - current).norm();
        current = next;
        if (change <= 1e-10) {
            nodes_used = count;
            return current;
        }
    }
    throw Error(ErrorCode::SpectralFailure, "contour quadrature did not converge");
}

std::vector<std::size_t> identity_sites(std::size_t n)
{
    std::vector<std::size_t> s(n);
    std::iota(s.begin(), s.end(), 0);
    return s;
}

// Link-weighted shifts on the N x N torus with total flux q; site index x + N y.
std::pair<Mat, Mat> torus_shifts(std::size_t n, int flux)
{
    const auto sites = static_cast<Eigen::Index>(n * n);
    const double theta = 2.0 * kPi * flux / static_cast<double>(n * n);
    Mat tx = Mat::Zero(sites, sites), ty = Mat::Zero(sites, sites);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
            const auto s = static_cast<Eigen::Index>(x + n * y);
            const auto sx = static_cast<Eigen::Index>((x + 1) % n + n * y);
            const auto sy = static_cast<Eigen::Index>(x + n * ((y + 1) % n));
            const double phase_x = x + 1 == n ? -theta * static_cast<double>(n * y) : 0.0;
            tx(s, sx) = std::polar(1.0, phase_x);
            ty(s, sy) = std::polar(1.0, theta * static_cast<double>(x));
        }
    return {tx, ty};
}

}  // namespace

double chi_eval(double x)
{
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "chi needs a finite argument");
    if (x < 0.0) return -chi_eval(-x);
    if (x == 0.0) return 0.0;
    if (x <= 40.0) {
        auto f = [](double y) {
            const double h = 0.5 * y;
            const double s = h == 0.0 ? 1.0 : std::sin(h) / h;
            return 0.5 * s * s;
        };
        // The integrand is entire; one 61-point rule per unit panel is exact to rounding.
        const int panels = static_cast<int>(std::ceil(x));
        double integral = 0.0;
        for (int j = 0; j < panels; ++j) {
            const double lo = x * j / panels, hi = x * (j + 1) / panels;
            integral += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 0);
        }
        return std::min(1.0, 2.0 / kPi * integral);
    }
    // int_x^inf (1 - cos y) / y^2 dy = 1/x - Re int_x^inf e^{iy} / y^2 dy.
    return std::min(1.0, 1.0 - 2.0 / kPi * (1.0 / x - tail_integral(x).real()));
}

GradedOperator make_graded_operator(Eigen::MatrixXcd d, bool claim_gap)
{
    if (d.rows() != d.cols() || d.rows() % 2 != 0 || d.rows() == 0)
        throw Error(ErrorCode::InvalidArgument, "graded operator needs an even square matrix");
    if (!d.allFinite()) throw Error(ErrorCode::InvalidArgument, "graded operator has non-finite entries");
    const Eigen::Index h = d.rows() / 2;
    const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
    if ((d - d.adjoint()).cwiseAbs().maxCoeff() > kGradingTolerance * scale)
        throw Error(ErrorCode::InvalidArgument, "graded operator is not Hermitian");
    if (d.topLeftCorner(h, h).cwiseAbs().maxCoeff() > kGradingTolerance * scale ||
        d.bottomRightCorner(h, h).cwiseAbs().maxCoeff() > kGradingTolerance * scale)
        throw Error(ErrorCode::InvalidArgument, "graded operator is not odd");
    GradedOperator op;
    op.half = static_cast<std::size_t>(h);
    op.d = std::move(d);
    if (claim_gap) {
        Eigen::BDCSVD<Mat> svd(op.d_plus());
        const double sigma = svd.singularValues().minCoeff();
        if (!(sigma > 1e-12)) throw Error(ErrorCode::InvalidArgument, "claimed spectral gap is not positive");
        op.gap = sigma;
    }
    return op;
}

GradedOperator graded_from_plus(const Eigen::MatrixXcd& d_plus, bool claim_gap)
{
    if (d_plus.rows() != d_plus.cols()) throw Error(ErrorCode::InvalidArgument, "D+ must be square");
    const Eigen::Index h = d_plus.rows();
    Mat d = Mat::Zero(2 * h, 2 * h);
    d.topRightCorner(h, h) = d_plus;
    d.bottomLeftCorner(h, h) = d_plus.adjoint();
    return make_graded_operator(std::move(d), claim_gap);
}

Eigen::MatrixXcd ChiBlocks::full() const
{
    const Eigen::Index h = u.rows();
    Mat m = Mat::Zero(2 * h, 2 * h);
    m.topRightCorner(h, h) = u;
    m.bottomLeftCorner(h, h) = v;
    return m;
}

ChiCalculus::ChiCalculus(const GradedOperator& op)
{
    Eigen::BDCSVD<Mat> svd(op.d_plus(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success || !svd.singularValues().allFinite())
        throw Error(ErrorCode::SpectralFailure, "singular value decomposition of D+ failed");
    x_ = svd.matrixU();
    y_ = svd.matrixV();
    sigma_ = svd.singularValues();
}

ChiBlocks ChiCalculus::operator()(double t) const
{
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "chi calculus needs t > 0");
    Eigen::VectorXd c(sigma_.size());
    for (Eigen::Index i = 0; i < sigma_.size(); ++i) c(i) = chi_eval(sigma_(i) / t);
    ChiBlocks out;
    out.u = x_ * c.asDiagonal() * y_.adjoint();
    out.v = out.u.adjoint();
    return out;
}

ChiBlocks chi_of_operator(const GradedOperator& op, double t) { return ChiCalculus(op)(t); }

double propagation_width(const GradedOperator& op, double t)
{
    if (!op.sites || op.site_of.size() != op.half)
        throw Error(ErrorCode::InvalidArgument, "propagation width needs locality metadata");
    const ChiBlocks chi = chi_of_operator(op, t);
    double width = 0.0;
    for (std::size_t i = 0; i < op.half; ++i)
        for (std::size_t j = 0; j < op.half; ++j)
            if (std::abs(chi.u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) >= 1e-10)
                width = std::max(width, (*op.sites)(op.site_of[i], op.site_of[j]));
    return width;
}

Eigen::MatrixXcd p_t(const ChiBlocks& chi)
{
    const Eigen::Index h = chi.u.rows();
    const Mat uv = chi.u * chi.v;
    const Mat vu = chi.v * chi.u;
    const Mat a = eye(h) - uv;
    const Mat b = eye(h) - vu;
    Mat p(2 * h, 2 * h);
    p.topLeftCorner(h, h) = eye(h) - a * a;
    p.topRightCorner(h, h) = (eye(h) + a) * chi.u * b;
    p.bottomLeftCorner(h, h) = chi.v * a;
    p.bottomRightCorner(h, h) = b * b;
    return p;
}

Eigen::MatrixXcd z_matrix(const Eigen::MatrixXcd& beta)
{
    const Eigen::Index n = beta.rows();
    const Mat one = eye(n), co = one - beta;
    Mat z = Mat::Zero(4 * n, 4 * n);
    z.block(0, 0, n, n) = beta;
    z.block(0, 2 * n, n, n) = co;
    z.block(n, 0, n, n) = co;
    z.block(n, 3 * n, n, n) = beta;
    z.block(2 * n, 2 * n, n, n) = beta;
    z.block(2 * n, 3 * n, n, n) = co;
    z.block(3 * n, n, n, n) = one;
    return z;
}

Eigen::MatrixXcd z_inverse(const Eigen::MatrixXcd& beta)
{
    const Eigen::Index n = beta.rows();
    const Mat one = eye(n), co = one - beta;
    Mat z = Mat::Zero(4 * n, 4 * n);
    z.block(0, 0, n, n) = beta;
    z.block(0, n, n, n) = co;
    z.block(n, 3 * n, n, n) = one;
    z.block(2 * n, 0, n, n) = co;
    z.block(2 * n, 2 * n, n, n) = beta;
    z.block(3 * n, n, n, n) = beta;
    z.block(3 * n, 2 * n, n, n) = co;
    return z;
}

Eigen::MatrixXcd difference_product(const Eigen::MatrixXcd& alpha, const Eigen::MatrixXcd& beta)
{
    if (alpha.rows() != beta.rows() || alpha.cols() != beta.cols() || alpha.rows() != alpha.cols())
        throw Error(ErrorCode::InvalidArgument, "difference construction needs square matrices of equal size");
    const Eigen::Index n = beta.rows();
    Mat mid = Mat::Zero(4 * n, 4 * n);
    mid.block(0, 0, n, n) = alpha;
    mid.block(n, n, n, n) = eye(n) - beta;
    return z_inverse(beta) * mid * z_matrix(beta);
}

Eigen::MatrixXcd difference_d(const Eigen::MatrixXcd& alpha, const Eigen::MatrixXcd& beta)
{
    if (alpha.rows() != beta.rows() || alpha.cols() != beta.cols() || alpha.rows() != alpha.cols())
        throw Error(ErrorCode::InvalidArgument, "difference construction needs square matrices of equal size");
    const Eigen::Index n = beta.rows();
    const Mat c = compressed_difference(alpha, beta);
    Mat out = Mat::Zero(4 * n, 4 * n);
    out.block(0, 0, n, n) = c.topLeftCorner(n, n);
    out.block(0, 2 * n, n, n) = c.topRightCorner(n, n);
    out.block(2 * n, 0, n, n) = c.bottomLeftCorner(n, n);
    out.block(2 * n, 2 * n, n, n) = c.bottomRightCorner(n, n);
    return out;
}

Eigen::MatrixXcd e13(Eigen::Index block)
{
    Mat e = Mat::Zero(4 * block, 4 * block);
    e.topLeftCorner(block, block) = eye(block);
    return e;
}

double spectral_norm(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                     const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply_adjoint, Eigen::Index dim,
                     double relative_tolerance)
{
    if (dim == 0) return 0.0;
    const Eigen::Index steps = std::min<Eigen::Index>(dim, 80);
    std::vector<Vec> basis;
    Eigen::VectorXd alpha_diag(steps), beta_off(steps);
    // Deterministic start with weight on every coordinate.
    Vec q(dim);
    for (Eigen::Index i = 0; i < dim; ++i) q(i) = Cx(1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i)), 0.11 * std::cos(0.7 * static_cast<double>(i)));
    q.normalize();
    double previous = -1.0;
    double estimate = 0.0;
    int settled = 0;
    for (Eigen::Index j = 0; j < steps; ++j) {
        basis.push_back(q);
        Vec w = apply_adjoint(apply(q));
        alpha_diag(j) = q.dot(w).real();
        for (const auto& b : basis) w -= b * b.dot(w);
        for (const auto& b : basis) w -= b * b.dot(w);
        const double beta = w.norm();
        beta_off(j) = beta;
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(j + 1, j + 1);
        for (Eigen::Index i = 0; i <= j; ++i) {
            tri(i, i) = alpha_diag(i);
            if (i < j) tri(i, i + 1) = tri(i + 1, i) = beta_off(i);
        }
        estimate = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(tri, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
        if (beta <= 1e-14 * std::max(1.0, estimate)) break;
        settled = std::abs(estimate - previous) <= relative_tolerance * std::max(estimate, 1e-300) ? settled + 1 : 0;
        if (j >= 4 && settled >= 2) break;
        previous = estimate;
        q = w / beta;
    }
    return std::sqrt(std::max(0.0, estimate));
}

Eigen::MatrixXcd DifferencePackage::d() const
{
    const Eigen::Index m = a.rows();
    Mat out = Mat::Zero(2 * m, 2 * m);
    const Mat delta = a - b;
    const Mat bd = b * delta, db = delta * b, bdb = bd * b;
    out.topLeftCorner(m, m) = eye(m) + bdb;
    out.topRightCorner(m, m) = bd - bdb;
    out.bottomLeftCorner(m, m) = db - bdb;
    out.bottomRightCorner(m, m) = delta - bd - db + bdb;
    return out;
}

Eigen::MatrixXcd DifferencePackage::e() const
{
    const Eigen::Index m = a.rows();
    Mat out = Mat::Zero(2 * m, 2 * m);
    out.topLeftCorner(m, m) = eye(m);
    return out;
}

DifferencePackage build_package(const GradedOperator& op, double t, const MatrixField& p, const MatrixField& q,
                                const std::vector<std::size_t>& region)
{
    const std::vector<std::size_t> sites = op.site_of.empty() ? identity_sites(op.half) : op.site_of;
    if (p.domain != q.domain || p.k != q.k || p.values.size() != q.values.size())
        throw Error(ErrorCode::InvalidArgument, "p and q must share a domain and matrix size");
    for (auto s : sites)
        if (s >= p.values.size()) throw Error(ErrorCode::InvalidArgument, "operator sites exceed the field domain");
    std::vector<char> inside(p.values.size(), region.empty() ? 1 : 0);
    for (auto s : region) {
        if (s >= inside.size()) throw Error(ErrorCode::InvalidArgument, "region point out of range");
        inside[s] = 1;
    }
    for (std::size_t s = 0; s < p.values.size(); ++s)
        if (!inside[s] && operator_norm(p.values[s] - q.values[s]) > 1e-12)
            throw Error(ErrorCode::SupportViolation, "p - q is nonzero at point " + std::to_string(s) + " outside the region");
    for (const auto* f : {&p, &q})
        if (!as_projection(*f)) throw Error(ErrorCode::InvalidArgument, "p and q must be projection fields");

    DifferencePackage pkg;
    pkg.t = t;
    pkg.k = p.k;
    pkg.chi = chi_of_operator(op, t);
    pkg.pt = p_t(pkg.chi);
    const Mat ptk = kron_identity(pkg.pt, p.k);
    pkg.alpha = times_site_blocks(ptk, p, sites, op.half);
    pkg.beta = times_site_blocks(ptk, q, sites, op.half);
    pkg.a = compressed_difference(pkg.alpha, pkg.beta);
    pkg.b = site_difference(p, q, sites, op.half);
    pkg.b_idempotent_defect = idempotent_defect(pkg.b);

    // d - e = [b; 1-b](a - b)[b, 1-b] and d^2 - d = [b; 1-b](a^2 - a)[b, 1-b] since b^2 = b.
    const Mat& a = pkg.a;
    const Mat delta = pkg.a - pkg.b;
    Sandwich to_e{pkg.b, [&delta](const Vec& v) { return Vec(delta * v); },
                  [&delta](const Vec& v) { return Vec(delta.adjoint() * v); }};
    Sandwich idem{pkg.b, [&a](const Vec& v) { const Vec w = a * v; return Vec(a * w - w); },
                  [&a](const Vec& v) { const Vec w = a.adjoint() * v; return Vec(a.adjoint() * w - w); }};
    pkg.defect_to_e = to_e.norm();
    pkg.defect_idempotent = idem.norm();
    return pkg;
}

ThetaResult theta(const Eigen::MatrixXcd& d, ThetaMethod method)
{
    if (d.rows() != d.cols()) throw Error(ErrorCode::InvalidArgument, "theta needs a square matrix");
    const double defect = idempotent_defect(d);
    if (!(defect < 0.25))
        throw Error(ErrorCode::SpectralGapLost, "|d^2 - d| = " + std::to_string(defect) + " is not below 1/4");
    ThetaResult r;
    r.theta = method == ThetaMethod::Spectral ? theta_spectral(d) : theta_contour(d, r.contour_nodes);
    r.idempotent_residual = idempotent_defect(r.theta);
    return r;
}

PairingReport pairing(const DifferencePackage& pkg, const PairingOptions& options)
{
    if (!(pkg.defect_idempotent < 0.25))
        throw Error(ErrorCode::SpectralGapLost, "|d^2 - d| = " + std::to_string(pkg.defect_idempotent) +
                                                    " is not below 1/4 at t = " + std::to_string(pkg.t));
    PairingReport r;
    r.t = pkg.t;
    r.defect_idempotent = pkg.defect_idempotent;
    r.defect_to_e = pkg.defect_to_e;
    // Spectrum of d is that of a, 1 - b and 0, so a keeps clear of the contour.
    const Mat theta_a = theta_spectral(pkg.a);
    r.raw_index = (theta_a.trace() - pkg.b.trace()).real();
    r.index = static_cast<int>(std::lround(r.raw_index));
    r.rounding_residual = std::abs(r.raw_index - r.index);
    if (!(r.rounding_residual < 0.1))
        throw Error(ErrorCode::IndeterminateIndex, "trace difference " + std::to_string(r.raw_index) + " is not near an integer");
    // Theta(d) = Z(b)^-1 diag(Theta(a), 1 - b, 0, 0) Z(b) = e + [b; 1-b](Theta(a) - b)[b, 1-b].
    const Mat gap = theta_a - pkg.b;
    Sandwich to_e{pkg.b, [&gap](const Vec& v) { return Vec(gap * v); }, [&gap](const Vec& v) { return Vec(gap.adjoint() * v); }};
    r.theta_to_e = to_e.norm();
    Sandwich idem{pkg.b, [&theta_a](const Vec& v) { const Vec w = theta_a * v; return Vec(theta_a * w - w); },
                  [&theta_a](const Vec& v) { const Vec w = theta_a.adjoint() * v; return Vec(theta_a.adjoint() * w - w); }};
    r.theta_residual = idem.norm();
    r.equivalence_certificate = r.theta_to_e < 1.0;
    if (pkg.a.rows() <= options.contour_cap) {
        std::size_t nodes = 0;
        const Mat contour = theta_contour(pkg.a, nodes);
        r.method_agreement = dense_norm(contour - theta_a);
        r.method = "spectral+contour";
    }
    return r;
}

PairingReport pairing(const GradedOperator& op, const MatrixField& p, const MatrixField& q, const PairingOptions& options,
                      const std::vector<std::size_t>& region)
{
    return pairing(build_package(op, options.t, p, q, region), options);
}

std::shared_ptr<const FiniteMetricSpace> torus_lattice(std::size_t n)
{
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "torus lattice needs n >= 1");
    const auto sites = static_cast<Eigen::Index>(n * n);
    Eigen::MatrixXd d(sites, sites);
    auto wrap = [n](std::size_t a, std::size_t b) {
        const std::size_t diff = a > b ? a - b : b - a;
        return static_cast<double>(std::min(diff, n - diff));
    };
    for (std::size_t s = 0; s < n * n; ++s)
        for (std::size_t r = 0; r < n * n; ++r)
            d(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r)) = std::hypot(wrap(s % n, r % n), wrap(s / n, r / n));
    return std::make_shared<const FiniteMetricSpace>(validate_metric(std::move(d), "torus lattice " + std::to_string(n)));
}

ProjectionPair twisted_projection_pair(std::size_t n, double radius, double amplitude, int degree)
{
    if (n < 2 || !(radius > 0.0) || !(amplitude >= 0.0) || amplitude > kPi)
        throw Error(ErrorCode::InvalidArgument, "projection pair needs n >= 2, radius > 0, amplitude in [0, pi]");
    const auto space = torus_lattice(n);
    const double c = static_cast<double>(n / 2);
    auto offset = [n](double v, double center) {
        double d = v - center;
        const double half = static_cast<double>(n) / 2.0;
        if (d > half) d -= static_cast<double>(n);
        if (d < -half) d += static_cast<double>(n);
        return d;
    };
    ProjectionPair out;
    std::vector<Eigen::MatrixXcd> pv, qv;
    const Eigen::MatrixXcd south = bott_matrix({0.0, 0.0, -1.0});
    for (std::size_t s = 0; s < n * n; ++s) {
        const double dx = offset(static_cast<double>(s % n), c), dy = offset(static_cast<double>(s / n), c);
        const double r = std::hypot(dx, dy);
        const double psi = amplitude * std::max(0.0, 1.0 - r / radius);
        const double phi = static_cast<double>(degree) * std::atan2(dy, dx);
        const Eigen::Vector3d u(std::sin(psi) * std::cos(phi), std::sin(psi) * std::sin(phi), -std::cos(psi));
        pv.push_back(bott_matrix(u));
        qv.push_back(south);
        if (r < radius) out.region.push_back(s);
    }
    out.p = make_field(space, std::move(pv));
    out.q = make_field(space, std::move(qv));
    out.lip = out.p.lip;
    return out;
}

LatticeModel lattice_dirac_torus(std::size_t n, int flux, double mass)
{
    if (n < 8) throw Error(ErrorCode::InvalidArgument, "lattice torus needs N >= 8");
    if (4 * static_cast<std::size_t>(std::abs(flux)) > n)
        throw Error(ErrorCode::FluxAliased, "flux " + std::to_string(flux) + " exceeds N/4 on an N = " + std::to_string(n) + " lattice");
    if (!std::isfinite(mass)) throw Error(ErrorCode::InvalidArgument, "mass must be finite");
    const auto [tx, ty] = torus_shifts(n, flux);
    const Eigen::Index sites = tx.rows();
    const Cx i(0.0, 1.0);
    const Mat dplus = 0.5 * (tx - tx.adjoint()) + 0.5 * i * (ty - ty.adjoint()) +
                      (2.0 + mass) * eye(sites) - 0.5 * (tx + tx.adjoint() + ty + ty.adjoint());
    LatticeModel model;
    model.n = n;
    model.flux = flux;
    model.mass = mass;
    model.gap_bound = mass - (std::sqrt(2.0) - 1.0);
    model.op = graded_from_plus(dplus, model.gap_bound > 0.0);
    model.op.sites = torus_lattice(n);
    model.op.site_of = identity_sites(n * n);
    model.fields = twisted_projection_pair(n, 0.375 * static_cast<double>(n), kPi, flux);
    return model;
}

KernelCount overlap_kernel_count(std::size_t n, int flux, double overlap_mass)
{
    if (!(overlap_mass > 0.0 && overlap_mass < 2.0))
        throw Error(ErrorCode::InvalidArgument, "overlap mass must lie in (0, 2)");
    const auto [tx, ty] = torus_shifts(n, flux);
    const Eigen::Index sites = tx.rows();
    Mat gx(2, 2), gy(2, 2), g5(2, 2);
    gx << 0, 1, 1, 0;
    gy << 0, Cx(0, -1), Cx(0, 1), 0;
    g5 << 1, 0, 0, -1;
    auto kron = [](const Mat& a, const Mat& b) {
        Mat out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    };
    const Mat wilson = 2.0 * eye(sites) - 0.5 * (tx + tx.adjoint() + ty + ty.adjoint());
    const Mat dw = kron(0.5 * (tx - tx.adjoint()), gx) + kron(0.5 * (ty - ty.adjoint()), gy) +
                   kron(wilson - overlap_mass * eye(sites), eye(2));
    const Mat gamma5 = kron(eye(sites), g5);
    const Mat h = gamma5 * dw;
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (h + h.adjoint()));
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::SpectralFailure, "Hermitian Wilson operator eigensolver failed");
    Eigen::VectorXd signs = eig.eigenvalues().unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    const Mat sign_h = eig.eigenvectors() * signs.asDiagonal() * eig.eigenvectors().adjoint();
    const Mat overlap = eye(2 * sites) + gamma5 * sign_h;
    Eigen::SelfAdjointEigenSolver<Mat> normal(overlap.adjoint() * overlap);
    std::vector<Eigen::Index> zero;
    for (Eigen::Index j = 0; j < normal.eigenvalues().size(); ++j)
        if (normal.eigenvalues()(j) < 1e-8) zero.push_back(j);
    KernelCount count;
    if (zero.empty()) return count;
    Mat kernel(2 * sites, static_cast<Eigen::Index>(zero.size()));
    for (std::size_t c = 0; c < zero.size(); ++c) kernel.col(static_cast<Eigen::Index>(c)) = normal.eigenvectors().col(zero[c]);
    const Mat chir = kernel.adjoint() * gamma5 * kernel;
    Eigen::SelfAdjointEigenSolver<Mat> ch(0.5 * (chir + chir.adjoint()));
    for (Eigen::Index j = 0; j < ch.eigenvalues().size(); ++j) {
        // Orientation: positive flux gives negative-chirality zero modes of this overlap operator.
        if (ch.eigenvalues()(j) < 0.0) ++count.positive;
        else ++count.negative;
    }
    return count;
}

LinearFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y, double min_r_squared)
{
    if (x.size() != y.size() || x.size() < 5)
        throw Error(ErrorCode::InvalidArgument, "fit needs at least 5 paired points");
    double sxy = 0.0, sxx = 0.0, mean = 0.0;
    LinearFit fit;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
        mean += y[i];
        if (x[i] > 0.0) fit.max_ratio = std::max(fit.max_ratio, y[i] / x[i]);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::InvalidArgument, "fit needs a nonzero abscissa");
    mean /= static_cast<double>(y.size());
    fit.slope = sxy / sxx;
    double res = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        res += std::pow(y[i] - fit.slope * x[i], 2);
        tot += std::pow(y[i] - mean, 2);
    }
    fit.r_squared = tot > 0.0 ? 1.0 - res / tot : (res == 0.0 ? 1.0 : 0.0);
    if (fit.r_squared < min_r_squared)
        throw Error(ErrorCode::FitUnreliable, "R^2 = " + std::to_string(fit.r_squared) + " below " + std::to_string(min_r_squared));
    return fit;
}

ConstantEstimate estimate_constants(const std::vector<DefectSample>& large_t, const std::vector<DefectSample>& small_t,
                                    double min_r_squared)
{
    std::vector<double> x1, y1, x2, y2;
    for (const auto& s : large_t) {
        x1.push_back(s.lip / s.t);
        y1.push_back(s.defect_idempotent);
    }
    for (const auto& s : small_t) {
        x2.push_back(s.t / s.sigma);
        y2.push_back(s.defect_to_e);
    }
    return {fit_through_origin(x1, y1, min_r_squared), fit_through_origin(x2, y2, min_r_squared)};
}

VanishingReport vanishing_experiment(const GradedOperator& op, double sigma,
                                     const std::function<ProjectionPair(double)>& generator, const std::vector<double>& lips,
                                     double c1, double c2)
{
    if (!(sigma > 0.0) || !(c1 > 0.0) || !(c2 > 0.0))
        throw Error(ErrorCode::InvalidArgument, "vanishing experiment needs sigma, c1, c2 > 0");
    VanishingReport rep;
    rep.sigma = sigma;
    rep.c1 = c1;
    rep.c2 = c2;
    rep.threshold = sigma / (16.0 * c1 * c2);
    for (double target : lips) {
        const ProjectionPair pair = generator(target);
        VanishingRow row;
        row.lip = pair.lip;
        row.below_threshold = pair.lip < rep.threshold;
        // With L = 0 every t is admissible.
        row.t0 = pair.lip > 0.0 ? 4.0 * c1 * pair.lip : 1.0;
        PairingOptions opt;
        opt.t = row.t0;
        row.report = pairing(op, pair.p, pair.q, opt, pair.region);
        if (row.below_threshold && (row.report.index != 0 || !(row.report.theta_to_e < 1.0))) ++rep.violations;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

MainBound main_bound(const mpq_class& sigma, int m, const ControlFunction& control, const mpq_class& c1,
                     const mpq_class& c2, const LmBudget& budget, bool even_dimension)
{
    if (sigma <= 0 || m < 0 || c1 <= 0 || c2 <= 0)
        throw Error(ErrorCode::InvalidArgument, "main bound needs sigma, c1, c2 > 0 and m >= 0");
    const auto needed = static_cast<std::size_t>(m) + (even_dimension ? 1U : 2U);
    if (budget.sequence.size() < needed)
        throw Error(ErrorCode::InvalidArgument, "L budget does not reach the required index");
    MainBound out;
    out.even_dimension = even_dimension;
    const mpq_class base = 16 * c1 * c2 / sigma;
    const mpq_class m1(m + 1), m2(m + 2);
    out.even_argument = base * m1 * m1 * m1 * budget.sequence[static_cast<std::size_t>(m)];
    const bool odd_available = budget.sequence.size() >= static_cast<std::size_t>(m) + 2;
    if (odd_available) out.odd_argument = base * m2 * m2 * m2 * budget.sequence[static_cast<std::size_t>(m) + 1];

    // Probe grid: powers of two around the arguments, plus the arguments themselves.
    std::vector<mpq_class> probes{0, out.even_argument};
    if (odd_available) probes.push_back(out.odd_argument);
    mpq_class top = std::max(out.even_argument, out.odd_argument);
    mpq_class s(1, 1024);
    while (s <= 4 * top + 4) {
        probes.push_back(s);
        s *= 2;
    }
    std::sort(probes.begin(), probes.end());
    mpq_class last;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const mpq_class v = control(probes[i]);
        if (v < probes[i])
            throw Error(ErrorCode::BadControlFunction, "control function falls below the identity at " + probes[i].get_str());
        if (i > 0 && v < last)
            throw Error(ErrorCode::BadControlFunction, "control function decreases at " + probes[i].get_str());
        last = v;
    }
    out.even_value = control(out.even_argument);
    if (odd_available) out.odd_value = control(out.odd_argument);
    out.value = even_dimension ? out.even_value : out.odd_value;
    return out;
}

void write_operator(std::ostream& out, const GradedOperator& op)
{
    std::ostringstream s;
    s.precision(17);
    s << op.d.rows() << '\n';
    for (Eigen::Index i = 0; i < op.d.rows(); ++i) {
        for (Eigen::Index j = 0; j < op.d.cols(); ++j) s << (j ? " " : "") << op.d(i, j).real() << ' ' << op.d(i, j).imag();
        s << '\n';
    }
    out << s.str();
}

GradedOperator read_operator(std::istream& in)
{
    long long n = 0;
    if (!(in >> n) || n <= 0 || n % 2 != 0) throw Error(ErrorCode::ParseError, "operator file: bad dimension header");
    Mat d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double re = 0.0, im = 0.0;
            if (!(in >> re >> im)) throw Error(ErrorCode::ParseError, "operator file: truncated matrix");
            d(i, j) = {re, im};
        }
    try {
        return make_graded_operator(std::move(d));
    } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, std::string("operator file: ") + e.what());
    }
}

}  // namespace fillrad
