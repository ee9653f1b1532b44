#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hkrig/error.hpp"

namespace hkrig {

enum class Family { Gaussian, Exponential, Matern32, Matern52, Linear };
enum class Structure { Separable, Ellipsoidal };

/// Fully identifies the stationary correlation R(x - x' | theta).
struct CorrelationSpec {
    Family family = Family::Gaussian;
    Structure structure = Structure::Separable;
    bool isotropic = false;

    /// Number of length scales the spec expects for inputs of dimension d.
    Eigen::Index theta_size(Eigen::Index d) const { return isotropic ? 1 : d; }

    friend bool operator==(const CorrelationSpec&, const CorrelationSpec&) = default;
};

/// Correlation lengths in standardized input units. Isotropic specs hold a
/// single entry that is broadcast over all dimensions.
struct HyperParams {
    Eigen::VectorXd theta;

    HyperParams() = default;
    explicit HyperParams(Eigen::VectorXd t) : theta(std::move(t)) {}

    static HyperParams constant(Eigen::Index size, double value) {
        return HyperParams(Eigen::VectorXd::Constant(size, value));
    }

    double length(Eigen::Index q) const { return theta.size() == 1 ? theta[0] : theta[q]; }
};

/// Throws unless theta is strictly positive and sized for (spec, d).
void validate(const CorrelationSpec& spec, const HyperParams& hp, Eigen::Index d);

/// Single-coordinate correlation for the given family.
double corr1d(Family family, double h, double theta_q);

double corr(const CorrelationSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
            const Eigen::Ref<const Eigen::VectorXd>& x_prime, const HyperParams& hp);

/// R (+ noise diagonal + jitter) together with its Cholesky factor.
///
/// Factorization starts without jitter. On failure it adds
/// 1e-10 * mean(diag) to the diagonal and escalates by x10 up to
/// 1e-6 * mean(diag); past that a NotPositiveDefinite error is thrown.
class CorrelationMatrix {
public:
    CorrelationMatrix(Eigen::MatrixXd r, const Eigen::VectorXd& noise_diag, const HyperParams& hp);

    /// Correlation matrix without noise or jitter (unit diagonal).
    const Eigen::MatrixXd& r() const { return r_; }
    const Eigen::VectorXd& noise() const { return noise_; }
    double jitter() const { return jitter_; }
    Eigen::Index size() const { return r_.rows(); }

    Eigen::MatrixXd lower() const { return llt_.matrixL(); }
    /// The matrix that was actually factorized.
    Eigen::MatrixXd factorized() const;

    /// L^{-1} b
    Eigen::MatrixXd forward(const Eigen::Ref<const Eigen::MatrixXd>& b) const;
    /// (R + noise + jitter)^{-1} b via two triangular solves.
    Eigen::MatrixXd solve(const Eigen::Ref<const Eigen::MatrixXd>& b) const;
    double log_det() const;
    /// Estimated reciprocal 1-norm condition number of the factorized matrix.
    double rcond() const { return llt_.rcond(); }

private:
    Eigen::MatrixXd r_;
    Eigen::VectorXd noise_;
    double jitter_ = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Correlation matrix of the n x d design X, factorized with noise_diag on the diagonal.
CorrelationMatrix corr_matrix(const CorrelationSpec& spec, const Eigen::MatrixXd& X, const HyperParams& hp,
                              const Eigen::VectorXd& noise_diag);

/// r_i = corr(x_star, x_i). No noise term is added.
Eigen::VectorXd cross_corr_vector(const CorrelationSpec& spec, const Eigen::MatrixXd& X,
                                  const Eigen::Ref<const Eigen::VectorXd>& x_star, const HyperParams& hp);

}  // namespace hkrig
