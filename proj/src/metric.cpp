#include "fillrad/metric.hpp"

#include "fillrad/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace fillrad {

double FiniteMetricSpace::diameter() const
{
    return dist_.size() == 0 ? 0.0 : dist_.maxCoeff();
}

FiniteMetricSpace FiniteMetricSpace::subspace(const std::vector<std::size_t>& points) const
{
    const auto m = static_cast<Eigen::Index>(points.size());
    FiniteMetricSpace out;
    out.dist_.resize(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
            out.dist_(a, b) = (*this)(points[static_cast<std::size_t>(a)], points[static_cast<std::size_t>(b)]);
    if (!labels_.empty())
        for (auto p : points) out.labels_.push_back(labels_.at(p));
    out.provenance_ = provenance_ + "/subspace";
    return out;
}

FiniteMetricSpace validate_metric(Eigen::MatrixXd dist, std::string provenance, std::vector<std::string> labels)
{
    if (dist.rows() != dist.cols())
        throw Error(ErrorCode::InvalidArgument, "distance matrix must be square");
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(dist.rows()))
        throw Error(ErrorCode::InvalidArgument, "label count does not match point count");
    const Eigen::Index n = dist.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = dist(i, j);
            if (!std::isfinite(v))
                throw Error(ErrorCode::InvalidArgument, "non-finite distance");
            if (v < 0.0)
                throw Error(ErrorCode::NegativeDistance,
                            "d(" + std::to_string(i) + "," + std::to_string(j) + ") < 0");
        }
        if (std::abs(dist(i, i)) > kMetricTolerance)
            throw Error(ErrorCode::InvalidArgument, "nonzero diagonal at " + std::to_string(i));
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(dist(i, j) - dist(j, i)) > kMetricTolerance)
                throw Error(ErrorCode::MetricAsymmetric,
                            "d(" + std::to_string(i) + "," + std::to_string(j) + ") != d(" + std::to_string(j) + "," +
                                std::to_string(i) + ")");
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k < n; ++k)
                if (dist(i, k) > dist(i, j) + dist(j, k) + kMetricTolerance)
                    throw Error(ErrorCode::TriangleViolation, "d(" + std::to_string(i) + "," + std::to_string(k) +
                                                                  ") exceeds the path through " + std::to_string(j));
    dist.diagonal().setZero();
    FiniteMetricSpace out;
    out.dist_ = std::move(dist);
    out.labels_ = std::move(labels);
    out.provenance_ = std::move(provenance);
    return out;
}

FiniteMetricSpace read_distance_file(std::istream& in)
{
    long long n = -1;
    if (!(in >> n) || n < 0)
        throw Error(ErrorCode::ParseError, "distance file: missing point count");
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            double v = 0.0;
            if (!(in >> v))
                throw Error(ErrorCode::ParseError, "distance file: row " + std::to_string(i) + " is short");
            dist(i, j) = v;
            dist(j, i) = v;
        }
    return validate_metric(std::move(dist), "file");
}

FiniteMetricSpace read_distance_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ParseError, "cannot open " + path);
    return read_distance_file(in);
}

void write_distance_file(std::ostream& out, const FiniteMetricSpace& space)
{
    const auto n = space.size();
    out << n << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) out << (j ? " " : "") << space(i, j);
        out << '\n';
    }
}

double sup_norm(const Eigen::Ref<const Eigen::VectorXd>& v)
{
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

double sup_distance(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b)
{
    return sup_norm(a - b);
}

KuratowskiImage kuratowski_embed(const FiniteMetricSpace& space, std::size_t basepoint)
{
    if (basepoint >= space.size())
        throw Error(ErrorCode::InvalidArgument, "basepoint out of range");
    KuratowskiImage image;
    image.basepoint = basepoint;
    const auto& d = space.matrix();
    image.coords = d.rowwise() - d.row(static_cast<Eigen::Index>(basepoint));
    return image;
}

double isometry_defect(const FiniteMetricSpace& space, const KuratowskiImage& image)
{
    double worst = 0.0;
    const auto n = space.size();
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) {
            const double s = (image.coords.row(static_cast<Eigen::Index>(x)) -
                              image.coords.row(static_cast<Eigen::Index>(y)))
                                 .cwiseAbs()
                                 .maxCoeff();
            worst = std::max(worst, std::abs(s - space(x, y)));
        }
    return worst;
}

McShaneExtension::McShaneExtension(KuratowskiImage source, Eigen::MatrixXd values)
    : source_(std::move(source)), values_(std::move(values))
{
    if (values_.rows() != source_.coords.rows())
        throw Error(ErrorCode::InvalidArgument, "one value row per source point is required");
    constexpr double kSlack = 1e-12;
    const Eigen::Index n = values_.rows();
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const double in = (source_.coords.row(a) - source_.coords.row(b)).cwiseAbs().maxCoeff();
            const double out = (values_.row(a) - values_.row(b)).cwiseAbs().maxCoeff();
            if (out > in + kSlack)
                throw Error(ErrorCode::NotNonexpansive,
                            "pair (" + std::to_string(a) + "," + std::to_string(b) + ") is expanded");
        }
}

Eigen::VectorXd McShaneExtension::operator()(const Eigen::Ref<const Eigen::VectorXd>& query) const
{
    if (query.size() != source_.coords.cols())
        throw Error(ErrorCode::InvalidArgument, "query lives in the wrong sup-norm space");
    Eigen::VectorXd out = Eigen::VectorXd::Constant(values_.cols(), std::numeric_limits<double>::infinity());
    for (Eigen::Index m = 0; m < values_.rows(); ++m) {
        const double reach = (query.transpose() - source_.coords.row(m)).cwiseAbs().maxCoeff();
        out = out.cwiseMin((values_.row(m).array() + reach).matrix().transpose());
    }
    return out;
}

}  // namespace fillrad
