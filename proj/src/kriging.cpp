#include "hkrig/kriging.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <numbers>

namespace hkrig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this the solves lose too many digits for the model to interpolate,
// so the objectives treat such theta as infeasible.
constexpr double kMinRcond = 1e-10;

bool well_conditioned(const CorrelationMatrix& R) { return R.rcond() >= kMinRcond; }

}  // namespace

GlsEstimate gls_estimates(const CorrelationMatrix& R, const Eigen::MatrixXd& F, const Eigen::VectorXd& y) {
    if (F.rows() != R.size() || y.size() != R.size()) throw Error(ErrorKind::Shape, "GLS operands differ in size");
    GlsEstimate out;
    out.whitened_F = R.forward(F);
    const Eigen::VectorXd yt = R.forward(y);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(out.whitened_F);
    qr.setThreshold(1e-10);
    if (qr.rank() < F.cols()) {
        throw Error(ErrorKind::UnderdeterminedTrend, "F^T R^-1 F is rank deficient");
    }
    out.beta = qr.solve(yt);
    out.sigma2 = (yt - out.whitened_F * out.beta).squaredNorm() / static_cast<double>(y.size());
    out.info.compute(out.whitened_F.transpose() * out.whitened_F);
    if (out.info.info() != Eigen::Success) throw Error(ErrorKind::UnderdeterminedTrend, "F^T R^-1 F is not positive definite");
    return out;
}

double reduced_neg_log_likelihood(const TrainingSet& data, const CorrelationSpec& spec, const HyperParams& hp) {
    try {
        const CorrelationMatrix R = corr_matrix(spec, data.X, hp, data.noise);
        if (!well_conditioned(R)) return kInf;
        const GlsEstimate gls = gls_estimates(R, data.F, data.y);
        const double n = static_cast<double>(data.y.size());
        return 0.5 * R.log_det() + 0.5 * n * std::log(std::max(gls.sigma2, kSigma2Floor));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotPositiveDefinite || e.kind() == ErrorKind::UnderdeterminedTrend) return kInf;
        throw;
    }
}

double neg_log_likelihood(const TrainingSet& data, const CorrelationSpec& spec, const HyperParams& hp) {
    const double n = static_cast<double>(data.y.size());
    return reduced_neg_log_likelihood(data, spec, hp) + 0.5 * n * std::log(2.0 * std::numbers::pi) + 0.5 * n;
}

Eigen::VectorXd loo_residuals(const TrainingSet& data, const CorrelationSpec& spec, const HyperParams& hp) {
    const Eigen::Index n = data.y.size();
    if (n < 2) throw Error(ErrorKind::InsufficientData, "leave-one-out needs at least 2 samples");
    if (n - 1 < data.F.cols()) {
        throw Error(ErrorKind::UnderdeterminedTrend, "leave-one-out leaves fewer samples than trend terms");
    }
    const CorrelationMatrix R = corr_matrix(spec, data.X, hp, data.noise);
    if (!well_conditioned(R)) throw Error(ErrorKind::NotPositiveDefinite, "correlation matrix is numerically singular");
    const GlsEstimate gls = gls_estimates(R, data.F, data.y);

    // diag(R^-1) from the columns of L^-1
    const Eigen::MatrixXd l_inv = R.forward(Eigen::MatrixXd::Identity(n, n));
    const Eigen::VectorXd r_inv_diag = l_inv.colwise().squaredNorm().transpose();
    // rows of R^-1 F, then their G^-1 weighted norms, G = F^T R^-1 F
    const Eigen::MatrixXd r_inv_f = l_inv.transpose() * gls.whitened_F;
    const Eigen::MatrixXd w = gls.info.matrixL().solve(r_inv_f.transpose());
    const Eigen::VectorXd q_diag = r_inv_diag - w.colwise().squaredNorm().transpose();

    const Eigen::VectorXd alpha = R.solve(data.y - data.F * gls.beta);
    Eigen::VectorXd e(n);
    const double tiny = 1e-14 * r_inv_diag.maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(q_diag[i] > tiny)) {
            throw Error(ErrorKind::UnderdeterminedTrend, "held-out sample " + std::to_string(i) + " is not predictable");
        }
        e[i] = alpha[i] / q_diag[i];
    }
    return e;
}

double loo_cv_objective(const TrainingSet& data, const CorrelationSpec& spec, const HyperParams& hp) {
    try {
        const double v = loo_residuals(data, spec, hp).squaredNorm();
        return std::isfinite(v) ? v : kInf;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotPositiveDefinite || e.kind() == ErrorKind::UnderdeterminedTrend) return kInf;
        throw;
    }
}

PreparedData prepare(const Dataset& data, const TrendSpec& trend) {
    const bool external = trend.kind == TrendKind::External;
    if (external && trend.lower->dim() != data.d()) {
        throw Error(ErrorKind::Shape, "lower-fidelity model has dimension " + std::to_string(trend.lower->dim()) +
                                          ", data has dimension " + std::to_string(data.d()));
    }
    // The external trend is a pure scaling of the lower model, so the output
    // is scaled but not shifted; beta then keeps its meaning as that scale.
    Standardized s = standardize(data, !external);
    PreparedData out;
    out.input = s.input;
    out.output = s.output;
    out.train.X = std::move(s.X);
    out.train.y = std::move(s.y);
    out.train.noise = std::move(s.noise_var);
    if (external) {
        InformationMatrix info = build_information_matrix(trend, data.X);
        info.F.col(info.P - 1) /= out.output.scale;
        check_full_rank(info.F);
        out.train.F = std::move(info.F);
    } else {
        out.train.F = build_information_matrix(trend, out.train.X).F;
    }
    return out;
}

KrigingModel::KrigingModel(Dataset data, CorrelationSpec spec, TrendSpec trend, HyperParams theta, TrainingSet train,
                           InputTransform input, OutputTransform output, CorrelationMatrix corr)
    : data_(std::move(data)),
      spec_(spec),
      trend_(std::move(trend)),
      theta_(std::move(theta)),
      train_(std::move(train)),
      input_(std::move(input)),
      output_(output),
      corr_(std::move(corr)) {
    gls_ = gls_estimates(corr_, train_.F, train_.y);
    alpha_ = corr_.solve(train_.y - train_.F * gls_.beta);
}

KrigingModel KrigingModel::condition(const Dataset& data, const CorrelationSpec& spec, const TrendSpec& trend,
                                     const HyperParams& theta) {
    PreparedData prep = prepare(data, trend);
    validate(spec, theta, data.d());
    CorrelationMatrix corr = corr_matrix(spec, prep.train.X, theta, prep.train.noise);
    return KrigingModel(data, spec, trend, theta, std::move(prep.train), std::move(prep.input), prep.output,
                        std::move(corr));
}

Eigen::VectorXd KrigingModel::basis(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (trend_.kind == TrendKind::External) {
        Eigen::VectorXd f = eval_basis(trend_, x);
        f[f.size() - 1] /= output_.scale;
        return f;
    }
    return eval_basis(trend_, input_.apply(x));
}

Prediction KrigingModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Eigen::VectorXd u_star = input_.apply(x);
    const Eigen::VectorXd f = basis(x);
    const Eigen::VectorXd r = cross_corr_vector(spec_, train_.X, u_star, theta_);

    const double mean = f.dot(gls_.beta) + r.dot(alpha_);
    const Eigen::VectorXd rt = corr_.forward(r);
    const Eigen::VectorXd u = gls_.whitened_F.transpose() * rt - f;
    const Eigen::VectorXd w = gls_.info.matrixL().solve(u);
    double var = gls_.sigma2 * (1.0 - rt.squaredNorm() + w.squaredNorm());

    Prediction p;
    if (var < 0.0) {
        p.clamped = -var > 1e-8 * gls_.sigma2;
        var = 0.0;
    }
    p.mean = output_.invert(mean);
    p.variance = var * output_.scale * output_.scale;
    return p;
}

double KrigingModel::predict_mean(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Eigen::VectorXd r = cross_corr_vector(spec_, train_.X, input_.apply(x), theta_);
    return output_.invert(basis(x).dot(gls_.beta) + r.dot(alpha_));
}

std::vector<Prediction> KrigingModel::predict_batch(const Eigen::MatrixXd& X) const {
    std::vector<Prediction> out;
    out.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) out.push_back(predict(X.row(i).transpose()));
    return out;
}

KrigingModel fit(const Dataset& data, const CorrelationSpec& spec, const TrendSpec& trend, Estimation estimation,
                 const OptimizerSpec& optimizer, std::uint64_t seed) {
    if (data.n() < 1) throw Error(ErrorKind::EmptyDataset, "cannot fit an empty dataset");
    const PreparedData prep = prepare(data, trend);
    if (estimation == Estimation::CV && data.n() < 2) {
        throw Error(ErrorKind::InsufficientData, "cross-validation needs at least 2 samples");
    }

    const Eigen::Index k = spec.theta_size(data.d());
    const auto objective = [&](const Eigen::VectorXd& z) {
        const HyperParams hp(Eigen::pow(10.0, z.array()).matrix());
        return estimation == Estimation::MLE ? reduced_neg_log_likelihood(prep.train, spec, hp)
                                             : loo_cv_objective(prep.train, spec, hp);
    };
    Bounds bounds{Eigen::VectorXd::Constant(k, kLogThetaLo), Eigen::VectorXd::Constant(k, kLogThetaHi)};
    OptimizerSpec opt = optimizer;
    opt.seed = seed;

    OptimResult res;
    try {
        res = minimize(objective, bounds, opt);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::AllInfeasible) {
            throw Error(ErrorKind::FitFailure, std::string("no feasible hyperparameters: ") + e.what());
        }
        throw;
    }

    const HyperParams theta(Eigen::pow(10.0, res.x_best.array()).matrix());
    KrigingModel model = KrigingModel::condition(data, spec, trend, theta);
    FitDiagnostics diag;
    diag.objective = estimation == Estimation::MLE ? neg_log_likelihood(prep.train, spec, theta) : res.f_best;
    diag.evaluations = res.evaluations;
    diag.converged = res.converged;
    diag.global_best = res.global_best;
    diag.seed = seed;
    model.set_fit_info(estimation, diag);
    return model;
}

}  // namespace hkrig
