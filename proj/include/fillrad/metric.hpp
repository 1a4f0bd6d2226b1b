#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace fillrad {

/// Validation tolerance for symmetry and the triangle inequality.
inline constexpr double kMetricTolerance = 1e-9;

/// A finite metric space given by a validated distance matrix.
class FiniteMetricSpace {
public:
    FiniteMetricSpace() = default;

    std::size_t size() const noexcept { return static_cast<std::size_t>(dist_.rows()); }
    double operator()(std::size_t i, std::size_t j) const
    {
        return dist_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Eigen::MatrixXd& matrix() const noexcept { return dist_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& provenance() const noexcept { return provenance_; }
    double diameter() const;

    /// Metric restricted to the listed points, in the listed order.
    FiniteMetricSpace subspace(const std::vector<std::size_t>& points) const;

private:
    friend FiniteMetricSpace validate_metric(Eigen::MatrixXd, std::string, std::vector<std::string>);
    Eigen::MatrixXd dist_;
    std::vector<std::string> labels_;
    std::string provenance_;
};

/// Checks nonnegativity, symmetry and the triangle inequality; never repairs the input.
/// Throws NegativeDistance, MetricAsymmetric or TriangleViolation.
FiniteMetricSpace validate_metric(Eigen::MatrixXd dist, std::string provenance = "matrix",
                                  std::vector<std::string> labels = {});

/// Text format: first line n, then n lower-triangular rows (row i holds i+1 entries).
FiniteMetricSpace read_distance_file(std::istream& in);
FiniteMetricSpace read_distance_file(const std::string& path);
void write_distance_file(std::ostream& out, const FiniteMetricSpace& space);

/// Row x holds the sup-norm coordinates d(x, y) - d(x0, y) over all sample points y.
struct KuratowskiImage {
    std::size_t basepoint = 0;
    Eigen::MatrixXd coords;

    std::size_t size() const noexcept { return static_cast<std::size_t>(coords.rows()); }
    Eigen::VectorXd point(std::size_t x) const { return coords.row(static_cast<Eigen::Index>(x)).transpose(); }
};

double sup_norm(const Eigen::Ref<const Eigen::VectorXd>& v);
double sup_distance(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

KuratowskiImage kuratowski_embed(const FiniteMetricSpace& space, std::size_t basepoint = 0);

/// Largest |sup-distance(coords x, coords y) - d(x, y)| over all pairs.
double isometry_defect(const FiniteMetricSpace& space, const KuratowskiImage& image);

/// Inf-convolution extension of a nonexpansive map from the embedded first space
/// into a sup-norm space over a second sample.
class McShaneExtension {
public:
    /// Row m of `values` is h(m). Throws NotNonexpansive when some pair is expanded.
    McShaneExtension(KuratowskiImage source, Eigen::MatrixXd values);

    Eigen::VectorXd operator()(const Eigen::Ref<const Eigen::VectorXd>& query) const;
    Eigen::Index target_dimension() const noexcept { return values_.cols(); }

private:
    KuratowskiImage source_;
    Eigen::MatrixXd values_;
};

}  // namespace fillrad
