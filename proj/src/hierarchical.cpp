#include "hkrig/hierarchical.hpp"

namespace hkrig {

HierarchicalModel::HierarchicalModel(std::shared_ptr<const KrigingModel> base) {
    if (!base) throw Error(ErrorKind::InvalidInput, "hierarchical model needs a base level");
    levels_.push_back(std::move(base));
}

void HierarchicalModel::push_level(std::shared_ptr<const KrigingModel> level) {
    if (!level) throw Error(ErrorKind::InvalidInput, "null model level");
    if (levels_.empty()) {
        levels_.push_back(std::move(level));
        return;
    }
    const TrendSpec& t = level->trend();
    if (t.kind != TrendKind::External || t.lower != levels_.back()) {
        throw Error(ErrorKind::InvalidInput, "level trend must be the mean of the level below");
    }
    levels_.push_back(std::move(level));
}

double HierarchicalModel::beta_scale(std::size_t l) const {
    if (l == 0 || l >= levels_.size()) throw Error(ErrorKind::InvalidInput, "level has no trend scaling factor");
    const Eigen::VectorXd& b = levels_[l]->beta();
    return b[b.size() - 1];
}

KrigingModel fit_hierarchical(std::shared_ptr<const KrigingModel> lower, const Dataset& hf_data,
                              const CorrelationSpec& spec, Estimation estimation, const OptimizerSpec& optimizer,
                              std::uint64_t seed, bool augment_constant) {
    if (!lower) throw Error(ErrorKind::InvalidInput, "hierarchical fit needs a fitted lower level");
    if (hf_data.n() < 1) throw Error(ErrorKind::EmptyDataset, "high-fidelity dataset is empty");
    if (lower->dim() != hf_data.d()) {
        throw Error(ErrorKind::Shape, "low-fidelity dimension " + std::to_string(lower->dim()) +
                                          " differs from high-fidelity dimension " + std::to_string(hf_data.d()));
    }
    return fit(hf_data, spec, TrendSpec::external(std::move(lower), augment_constant), estimation, optimizer, seed);
}

HierarchicalModel fit_hierarchy(const std::vector<Dataset>& levels, const std::vector<CorrelationSpec>& specs,
                                const TrendSpec& base_trend, Estimation estimation, const OptimizerSpec& optimizer,
                                std::uint64_t seed) {
    if (levels.empty() || levels.size() != specs.size()) {
        throw Error(ErrorKind::InvalidInput, "need one correlation spec per fidelity level");
    }
    HierarchicalModel model(
        std::make_shared<const KrigingModel>(fit(levels[0], specs[0], base_trend, estimation, optimizer, seed)));
    for (std::size_t l = 1; l < levels.size(); ++l) {
        model.push_level(std::make_shared<const KrigingModel>(
            fit_hierarchical(model.top(), levels[l], specs[l], estimation, optimizer, seed + l)));
    }
    return model;
}

Prediction predict_hierarchical(const HierarchicalModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (model.levels() == 0) throw Error(ErrorKind::NoModel, "hierarchical model has no levels");
    return model.top()->predict(x);
}

}  // namespace hkrig
