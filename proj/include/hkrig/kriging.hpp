#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hkrig/data.hpp"
#include "hkrig/kernel.hpp"
#include "hkrig/optimize.hpp"
#include "hkrig/trend.hpp"

namespace hkrig {

enum class Estimation { MLE, CV };

/// A standardized regression problem: design, responses, per-point noise
/// variances (added to the correlation diagonal) and the trend matrix F.
struct TrainingSet {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd noise;
    Eigen::MatrixXd F;
};

/// Generalized least squares quantities at a fixed correlation matrix.
/// `whitened_F` is L^{-1} F and `info` the Cholesky factor of F^T R^{-1} F.
struct GlsEstimate {
    Eigen::VectorXd beta;
    double sigma2 = 0.0;
    Eigen::MatrixXd whitened_F;
    Eigen::LLT<Eigen::MatrixXd> info;
};

/// beta = (F^T R^-1 F)^-1 F^T R^-1 y and sigma2 = |y - F beta|^2_{R^-1} / n,
/// both through triangular solves with the stored factor.
GlsEstimate gls_estimates(const CorrelationMatrix& R, const Eigen::MatrixXd& F, const Eigen::VectorXd& y);

/// Floor applied to sigma2 inside logarithms (constant data gives sigma2 = 0).
inline constexpr double kSigma2Floor = 1e-300;

/// Full profiled negative log-likelihood
///   0.5 log det R + (n/2) log(2 pi sigma2) + n/2
/// with beta and sigma2 at their GLS values. Returns +inf when R cannot be
/// factorized or the trend is degenerate.
double neg_log_likelihood(const TrainingSet& data, const CorrelationSpec& spec, const HyperParams& hp);

/// neg_log_likelihood without the theta-independent constants; this is the
/// form the MLE fit minimizes.
double reduced_neg_log_likelihood(const TrainingSet& data, const CorrelationSpec& spec, const HyperParams& hp);

/// Leave-one-out residuals y_i - mu_{(-i)}(x_i) at fixed theta, with the
/// trend coefficients re-estimated for every held-out sample, via the
/// closed-form identity e_i = [Q y]_i / Q_ii,
///   Q = R^-1 - R^-1 F (F^T R^-1 F)^-1 F^T R^-1.
/// Throws InsufficientData for n < 2.
Eigen::VectorXd loo_residuals(const TrainingSet& data, const CorrelationSpec& spec, const HyperParams& hp);

/// Sum of squared leave-one-out residuals; +inf when not computable at hp.
double loo_cv_objective(const TrainingSet& data, const CorrelationSpec& spec, const HyperParams& hp);

struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
    /// Set when a negative variance larger than 1e-8 * sigma2 was clamped to zero.
    bool clamped = false;
};

struct FitDiagnostics {
    /// Objective at theta_hat: the full negative log-likelihood for MLE, the
    /// LOO sum of squares for CV (standardized units).
    double objective = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
    double global_best = 0.0;
    std::uint64_t seed = 0;
};

/// Lower/upper bound on log10(theta) in standardized input units.
inline constexpr double kLogThetaLo = -3.0;
inline constexpr double kLogThetaHi = 2.0;

/// Fitted Kriging surrogate. Fitting happens on standardized data (inputs on
/// [0,1], outputs centered and scaled); predictions are returned in original
/// units. Immutable once built and safe to share between threads.
class KrigingModel {
public:
    /// Builds the model at a fixed theta (standardized units) without optimization.
    static KrigingModel condition(const Dataset& data, const CorrelationSpec& spec, const TrendSpec& trend,
                                  const HyperParams& theta);

    Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    double predict_mean(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    std::vector<Prediction> predict_batch(const Eigen::MatrixXd& X) const;

    /// f(x) as seen by the standardized model.
    Eigen::VectorXd basis(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    const Dataset& data() const { return data_; }
    const CorrelationSpec& spec() const { return spec_; }
    const TrendSpec& trend() const { return trend_; }
    const HyperParams& theta() const { return theta_; }
    const Eigen::VectorXd& beta() const { return gls_.beta; }
    /// Process variance in standardized output units.
    double sigma2() const { return gls_.sigma2; }
    double sigma2_original() const { return gls_.sigma2 * output_.scale * output_.scale; }
    const TrainingSet& training() const { return train_; }
    const CorrelationMatrix& correlation() const { return corr_; }
    const InputTransform& input_transform() const { return input_; }
    const OutputTransform& output_transform() const { return output_; }
    Eigen::Index dim() const { return data_.d(); }

    Estimation estimation() const { return estimation_; }
    const FitDiagnostics& diagnostics() const { return diagnostics_; }
    void set_fit_info(Estimation estimation, const FitDiagnostics& diagnostics) {
        estimation_ = estimation;
        diagnostics_ = diagnostics;
    }

private:
    KrigingModel(Dataset data, CorrelationSpec spec, TrendSpec trend, HyperParams theta, TrainingSet train,
                 InputTransform input, OutputTransform output, CorrelationMatrix corr);

    Dataset data_;
    CorrelationSpec spec_;
    TrendSpec trend_;
    HyperParams theta_;
    TrainingSet train_;
    InputTransform input_;
    OutputTransform output_;
    CorrelationMatrix corr_;
    GlsEstimate gls_;
    Eigen::VectorXd alpha_;  // R^-1 (y - F beta)
    Estimation estimation_ = Estimation::MLE;
    FitDiagnostics diagnostics_;
};

/// Standardizes `data` and assembles F the way KrigingModel does.
struct PreparedData {
    TrainingSet train;
    InputTransform input;
    OutputTransform output;
};
PreparedData prepare(const Dataset& data, const TrendSpec& trend);

/// Minimizes the selected objective over log10(theta) in
/// [kLogThetaLo, kLogThetaHi]^k (the local method starts at the box center),
/// then conditions the model at the optimum. Deterministic in seed.
KrigingModel fit(const Dataset& data, const CorrelationSpec& spec, const TrendSpec& trend, Estimation estimation,
                 const OptimizerSpec& optimizer, std::uint64_t seed);

}  // namespace hkrig
