#pragma once

#include <memory>
#include <vector>

#include "hkrig/kriging.hpp"

namespace hkrig {

/// Chain of Kriging models ordered from lowest to highest fidelity. Level 1
/// has an ordinary or polynomial trend; each higher level uses the posterior
/// mean of the level below as its (single) trend basis, so its prediction is
///
///   mu_l(x) = beta * mu_{l-1}(x) + r^T R^-1 (y_l - F beta),   F_i = mu_{l-1}(x_i)
///
/// with the universal-Kriging variance and f(x) replaced by mu_{l-1}(x).
/// Lower-level predictive variance is not propagated.
class HierarchicalModel {
public:
    HierarchicalModel() = default;
    explicit HierarchicalModel(std::shared_ptr<const KrigingModel> base);

    /// Appends a level whose trend must be External over the current top.
    void push_level(std::shared_ptr<const KrigingModel> level);

    std::size_t levels() const { return levels_.size(); }
    const KrigingModel& level(std::size_t l) const { return *levels_.at(l); }
    std::shared_ptr<const KrigingModel> top() const { return levels_.back(); }

    /// Trend scaling factor of level l >= 1 (0-based; level 0 has none).
    double beta_scale(std::size_t l) const;

private:
    std::vector<std::shared_ptr<const KrigingModel>> levels_;
};

/// Fits the next fidelity level on hf_data with the lower model's mean as trend.
KrigingModel fit_hierarchical(std::shared_ptr<const KrigingModel> lower, const Dataset& hf_data,
                              const CorrelationSpec& spec, Estimation estimation, const OptimizerSpec& optimizer,
                              std::uint64_t seed, bool augment_constant = false);

/// Fits one model per dataset, lowest fidelity first. `base_trend` applies to
/// level 1 only. Each level may use its own correlation spec.
HierarchicalModel fit_hierarchy(const std::vector<Dataset>& levels, const std::vector<CorrelationSpec>& specs,
                                const TrendSpec& base_trend, Estimation estimation, const OptimizerSpec& optimizer,
                                std::uint64_t seed);

Prediction predict_hierarchical(const HierarchicalModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace hkrig
