#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "hkrig/error.hpp"

namespace hkrig {

class KrigingModel;

enum class TrendKind { Ordinary, Polynomial, External };

/// Trend basis of a Kriging model.
///
/// Polynomial(k) uses every monomial of total degree <= k, in graded
/// lexicographic order: by total degree, then by decreasing exponent of x1,
/// then x2, and so on. For d = 2, k = 2 that is 1, x1, x2, x1^2, x1 x2, x2^2.
///
/// External wraps a fitted lower-fidelity model; its single basis function is
/// that model's posterior mean (in the lower model's original output units).
/// With augment_constant a leading column of ones is added (P = 2).
struct TrendSpec {
    TrendKind kind = TrendKind::Ordinary;
    int degree = 0;
    std::shared_ptr<const KrigingModel> lower;
    bool augment_constant = false;

    static TrendSpec ordinary() { return {}; }
    static TrendSpec polynomial(int degree);
    static TrendSpec external(std::shared_ptr<const KrigingModel> lower, bool augment_constant = false);

    /// Basis count P for inputs of dimension d.
    Eigen::Index basis_count(Eigen::Index d) const;
};

/// Exponent tuples for all monomials of total degree <= degree in d variables.
std::vector<std::vector<int>> monomial_exponents(Eigen::Index d, int degree);

/// f(x). For External trends x is in the lower model's original input units.
Eigen::VectorXd eval_basis(const TrendSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

struct InformationMatrix {
    Eigen::MatrixXd F;
    Eigen::Index P = 0;
};

/// Rows are eval_basis at each design point. Throws UnderdeterminedTrend when
/// n < P or F is rank deficient (column-pivoted QR, relative threshold 1e-10).
InformationMatrix build_information_matrix(const TrendSpec& spec, const Eigen::MatrixXd& X);

/// Rank check used by build_information_matrix; exposed for models that rescale F.
void check_full_rank(const Eigen::MatrixXd& F);

}  // namespace hkrig
