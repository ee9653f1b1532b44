#include "hkrig/trend.hpp"

#include <Eigen/QR>

#include "hkrig/kriging.hpp"

namespace hkrig {

namespace {

void exponents_of_degree(Eigen::Index d, int remaining, std::vector<int>& current, std::size_t q,
                         std::vector<std::vector<int>>& out) {
    if (q + 1 == static_cast<std::size_t>(d)) {
        current[q] = remaining;
        out.push_back(current);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        current[q] = e;
        exponents_of_degree(d, remaining - e, current, q + 1, out);
    }
}

}  // namespace

TrendSpec TrendSpec::polynomial(int degree) {
    if (degree < 1 || degree > 4) {
        throw Error(ErrorKind::InvalidInput, "polynomial trend degree must be in 1..4, got " + std::to_string(degree));
    }
    TrendSpec spec;
    spec.kind = TrendKind::Polynomial;
    spec.degree = degree;
    return spec;
}

TrendSpec TrendSpec::external(std::shared_ptr<const KrigingModel> lower, bool augment_constant) {
    if (!lower) throw Error(ErrorKind::InvalidInput, "external trend requires a fitted model");
    TrendSpec spec;
    spec.kind = TrendKind::External;
    spec.lower = std::move(lower);
    spec.augment_constant = augment_constant;
    return spec;
}

Eigen::Index TrendSpec::basis_count(Eigen::Index d) const {
    switch (kind) {
        case TrendKind::Ordinary: return 1;
        case TrendKind::External: return augment_constant ? 2 : 1;
        case TrendKind::Polynomial: {
            // C(d + k, k)
            Eigen::Index c = 1;
            for (int i = 1; i <= degree; ++i) c = c * (d + i) / i;
            return c;
        }
    }
    return 1;
}

std::vector<std::vector<int>> monomial_exponents(Eigen::Index d, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> current(static_cast<std::size_t>(d), 0);
    for (int total = 0; total <= degree; ++total) exponents_of_degree(d, total, current, 0, out);
    return out;
}

Eigen::VectorXd eval_basis(const TrendSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
    switch (spec.kind) {
        case TrendKind::Ordinary: return Eigen::VectorXd::Ones(1);
        case TrendKind::External: {
            const double mu = spec.lower->predict_mean(x);
            if (spec.augment_constant) return Eigen::Vector2d(1.0, mu);
            return Eigen::VectorXd::Constant(1, mu);
        }
        case TrendKind::Polynomial: {
            const auto exps = monomial_exponents(x.size(), spec.degree);
            Eigen::VectorXd f(static_cast<Eigen::Index>(exps.size()));
            for (std::size_t j = 0; j < exps.size(); ++j) {
                double v = 1.0;
                for (Eigen::Index q = 0; q < x.size(); ++q) {
                    for (int e = 0; e < exps[j][static_cast<std::size_t>(q)]; ++e) v *= x[q];
                }
                f[static_cast<Eigen::Index>(j)] = v;
            }
            return f;
        }
    }
    return Eigen::VectorXd::Ones(1);
}

void check_full_rank(const Eigen::MatrixXd& F) {
    if (F.rows() < F.cols()) {
        throw Error(ErrorKind::UnderdeterminedTrend, "trend needs " + std::to_string(F.cols()) +
                                                         " basis functions but only " + std::to_string(F.rows()) +
                                                         " design points are available");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(F);
    qr.setThreshold(1e-10);
    if (qr.rank() < F.cols()) {
        throw Error(ErrorKind::UnderdeterminedTrend, "information matrix is rank deficient (rank " +
                                                         std::to_string(qr.rank()) + " < " +
                                                         std::to_string(F.cols()) + ")");
    }
}

InformationMatrix build_information_matrix(const TrendSpec& spec, const Eigen::MatrixXd& X) {
    const Eigen::Index P = spec.basis_count(X.cols());
    if (X.rows() < P) {
        throw Error(ErrorKind::UnderdeterminedTrend, "trend needs " + std::to_string(P) +
                                                         " basis functions but only " + std::to_string(X.rows()) +
                                                         " design points are available");
    }
    InformationMatrix info;
    info.P = P;
    info.F.resize(X.rows(), P);
    for (Eigen::Index i = 0; i < X.rows(); ++i) info.F.row(i) = eval_basis(spec, X.row(i).transpose()).transpose();
    check_full_rank(info.F);
    return info;
}

}  // namespace hkrig
