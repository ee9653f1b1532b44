#include "hkrig/kernel.hpp"

#include <cmath>
#include <sstream>

namespace hkrig {

namespace {

std::string describe(const HyperParams& hp) {
    std::ostringstream os;
    os << "theta=(";
    for (Eigen::Index i = 0; i < hp.theta.size(); ++i) {
        if (i) os << ", ";
        os << hp.theta[i];
    }
    os << ")";
    return os.str();
}

double radial(Family family, double h) {
    // unit length scale; h >= 0
    switch (family) {
        case Family::Gaussian: return std::exp(-h * h);
        case Family::Exponential: return std::exp(-h);
        case Family::Matern32: {
            const double a = std::sqrt(3.0) * h;
            return (1.0 + a) * std::exp(-a);
        }
        case Family::Matern52: {
            const double a = std::sqrt(5.0) * h;
            return (1.0 + a + 5.0 * h * h / 3.0) * std::exp(-a);
        }
        case Family::Linear: return std::max(0.0, 1.0 - h);
    }
    return 0.0;
}

}  // namespace

void validate(const CorrelationSpec& spec, const HyperParams& hp, Eigen::Index d) {
    if (hp.theta.size() != spec.theta_size(d)) {
        throw Error(ErrorKind::Shape, "theta has " + std::to_string(hp.theta.size()) + " entries, expected " +
                                          std::to_string(spec.theta_size(d)));
    }
    for (Eigen::Index i = 0; i < hp.theta.size(); ++i) {
        if (!(hp.theta[i] > 0.0) || !std::isfinite(hp.theta[i])) {
            throw Error(ErrorKind::InvalidHyperparameter, "non-positive correlation length: " + describe(hp));
        }
    }
}

double corr1d(Family family, double h, double theta_q) {
    if (!(theta_q > 0.0) || !std::isfinite(theta_q)) {
        throw Error(ErrorKind::InvalidHyperparameter, "correlation length must be positive");
    }
    if (!std::isfinite(h)) throw Error(ErrorKind::InvalidInput, "non-finite distance");
    return radial(family, std::abs(h) / theta_q);
}

double corr(const CorrelationSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
            const Eigen::Ref<const Eigen::VectorXd>& x_prime, const HyperParams& hp) {
    if (x.size() != x_prime.size()) {
        throw Error(ErrorKind::Shape, "point dimensions differ: " + std::to_string(x.size()) + " vs " +
                                          std::to_string(x_prime.size()));
    }
    const Eigen::Index d = x.size();
    if (spec.structure == Structure::Separable) {
        double value = 1.0;
        for (Eigen::Index q = 0; q < d; ++q) value *= radial(spec.family, std::abs(x[q] - x_prime[q]) / hp.length(q));
        return value;
    }
    double sq = 0.0;
    for (Eigen::Index q = 0; q < d; ++q) {
        const double s = (x[q] - x_prime[q]) / hp.length(q);
        sq += s * s;
    }
    return radial(spec.family, std::sqrt(sq));
}

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd r, const Eigen::VectorXd& noise_diag, const HyperParams& hp)
    : r_(std::move(r)), noise_(noise_diag) {
    if (noise_.size() != r_.rows()) throw Error(ErrorKind::Shape, "noise diagonal length does not match design");
    Eigen::MatrixXd a = r_;
    a.diagonal() += noise_;
    llt_.compute(a);
    if (llt_.info() == Eigen::Success) return;

    const double mean_diag = a.diagonal().mean();
    for (double rel = 1e-10; rel <= 1e-6 * (1.0 + 1e-9); rel *= 10.0) {
        jitter_ = rel * mean_diag;
        Eigen::MatrixXd b = a;
        b.diagonal().array() += jitter_;
        llt_.compute(b);
        if (llt_.info() == Eigen::Success) return;
    }
    throw Error(ErrorKind::NotPositiveDefinite, "correlation matrix not positive definite at " + describe(hp));
}

Eigen::MatrixXd CorrelationMatrix::factorized() const {
    Eigen::MatrixXd a = r_;
    a.diagonal() += noise_;
    a.diagonal().array() += jitter_;
    return a;
}

Eigen::MatrixXd CorrelationMatrix::forward(const Eigen::Ref<const Eigen::MatrixXd>& b) const {
    return llt_.matrixL().solve(b);
}

Eigen::MatrixXd CorrelationMatrix::solve(const Eigen::Ref<const Eigen::MatrixXd>& b) const { return llt_.solve(b); }

double CorrelationMatrix::log_det() const {
    return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

CorrelationMatrix corr_matrix(const CorrelationSpec& spec, const Eigen::MatrixXd& X, const HyperParams& hp,
                              const Eigen::VectorXd& noise_diag) {
    const Eigen::Index n = X.rows();
    if (n < 1) throw Error(ErrorKind::InsufficientData, "design has no rows");
    validate(spec, hp, X.cols());
    if (noise_diag.size() != n) throw Error(ErrorKind::Shape, "noise diagonal length does not match design");
    Eigen::MatrixXd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = corr(spec, X.row(i).transpose(), X.row(j).transpose(), hp);
            r(i, j) = v;
            r(j, i) = v;
        }
    }
    return CorrelationMatrix(std::move(r), noise_diag, hp);
}

Eigen::VectorXd cross_corr_vector(const CorrelationSpec& spec, const Eigen::MatrixXd& X,
                                  const Eigen::Ref<const Eigen::VectorXd>& x_star, const HyperParams& hp) {
    if (x_star.size() != X.cols()) {
        throw Error(ErrorKind::Shape, "query has dimension " + std::to_string(x_star.size()) + ", design has " +
                                          std::to_string(X.cols()));
    }
    Eigen::VectorXd r(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) r[i] = corr(spec, x_star, X.row(i).transpose(), hp);
    return r;
}

}  // namespace hkrig
