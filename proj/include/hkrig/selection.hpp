#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hkrig/data.hpp"
#include "hkrig/kriging.hpp"

namespace hkrig {

/// One choice per Kriging option axis.
struct Combination {
    Structure structure = Structure::Separable;
    Family family = Family::Gaussian;
    bool isotropic = true;
    int trend_degree = 0;  // 0 = ordinary
    Estimation estimation = Estimation::MLE;
    Method optimizer = Method::HybridDE;

    CorrelationSpec correlation() const { return {family, structure, isotropic}; }
    TrendSpec trend() const { return trend_degree == 0 ? TrendSpec::ordinary() : TrendSpec::polynomial(trend_degree); }

    friend bool operator==(const Combination&, const Combination&) = default;
};

/// Option axes of the parametric sweep. Defaults give the full grid
/// (2 * 5 * 2 * 5 * 2 * 3 = 600 combinations).
struct CombinationGrid {
    std::vector<Structure> structures{Structure::Separable, Structure::Ellipsoidal};
    std::vector<Family> families{Family::Gaussian, Family::Exponential, Family::Matern32, Family::Matern52,
                                 Family::Linear};
    std::vector<bool> isotropy{true, false};
    std::vector<int> trend_degrees{0, 1, 2, 3, 4};
    std::vector<Estimation> estimations{Estimation::MLE, Estimation::CV};
    std::vector<Method> optimizers{Method::HybridDE, Method::HybridGA, Method::LocalGradient};

    std::size_t size() const {
        return structures.size() * families.size() * isotropy.size() * trend_degrees.size() * estimations.size() *
               optimizers.size();
    }
};

/// Nested-loop order: structure outermost, optimizer innermost, each axis in
/// the order stored in the grid. Element k has combination index k + 1.
std::vector<Combination> enumerate_combinations(const CombinationGrid& grid);

/// Predictive coefficient 1 - SSE / SST over the validation set; the mean in
/// SST is the validation mean (divisor n_v).
double q2(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

/// Largest absolute error divided by the validation output range.
double mae(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

enum class SweepMode { Hierarchical, Conventional };

struct SweepResult {
    int index = 0;
    Combination options;
    bool ok = false;
    std::string failure;
    double q2 = 0.0;
    double mae = 0.0;
    double fit_seconds = 0.0;
    double score_seconds = 0.0;
    std::uint64_t seed = 0;
    /// Top-level fitted model (the HK level in hierarchical mode); null on failure.
    std::shared_ptr<const KrigingModel> model;
};

struct SweepOptions {
    SweepMode mode = SweepMode::Hierarchical;
    std::uint64_t base_seed = 0;
    int workers = 1;
    /// Fit the low-fidelity model once with `shared_lf_options` instead of
    /// once per combination.
    bool shared_lf = false;
    Combination shared_lf_options;
    /// Population, generation and tolerance settings; the method comes from
    /// each combination.
    OptimizerSpec optimizer;
};

/// Seed of combination `index`: base_seed XOR index.
inline std::uint64_t combination_seed(std::uint64_t base_seed, int index) {
    return base_seed ^ static_cast<std::uint64_t>(index);
}

/// Fits and scores every combination. Failures are recorded per row and
/// never abort the sweep; rows come back in enumeration order whatever the
/// worker count. Hierarchical mode requires `train_lf`.
std::vector<SweepResult> run_sweep(const CombinationGrid& grid, const std::optional<Dataset>& train_lf,
                                   const Dataset& train_hf, const Dataset& validate, const SweepOptions& options);

/// Fits and scores a single combination (the unit of work of run_sweep).
SweepResult run_combination(const Combination& c, int index, const std::optional<Dataset>& train_lf,
                            const Dataset& train_hf, const Dataset& validate, const SweepOptions& options,
                            const std::shared_ptr<const KrigingModel>& shared_lf = nullptr);

enum class Criterion { Q2, MAE };

/// Best successful row: max q2 or min mae, ties broken by the other metric and
/// then by the lowest index. Throws NoModel when every row failed.
const SweepResult& select_best(const std::vector<SweepResult>& results, Criterion criterion);

}  // namespace hkrig
