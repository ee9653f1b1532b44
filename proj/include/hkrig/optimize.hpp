#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "hkrig/error.hpp"

namespace hkrig {

enum class Method { LocalGradient, HybridGA, HybridDE };

/// Settings shared by the three backends. population == 0 means
/// max(20, 10 * dim).
struct OptimizerSpec {
    Method method = Method::HybridDE;
    int population = 0;
    int max_generations = 100;
    int max_local_iters = 200;
    /// Global phases stop once the best value improved by less than this
    /// (relative) over `stall_generations` consecutive generations.
    double objective_tolerance = 1e-6;
    int stall_generations = 10;
    double fd_step = 1e-6;
    std::uint64_t seed = 0;
};

struct Bounds {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    Eigen::Index dim() const { return lo.size(); }
    Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
    Eigen::VectorXd clip(const Eigen::VectorXd& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

struct OptimResult {
    Eigen::VectorXd x_best;
    double f_best = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
    /// Best value after each generation (global phase) or iteration (local).
    std::vector<double> history;
    /// Best value reached by the global phase; equals f_best for LocalGradient.
    double global_best = 0.0;
};

/// Non-finite return values mark infeasible points.
using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Box-constrained minimization, deterministic for a given spec.seed.
/// LocalGradient starts from `start` (box center when absent); the hybrids
/// run their global phase and refine its best point with the local method.
/// Throws AllInfeasible if no probed point returned a finite value.
OptimResult minimize(const Objective& objective, const Bounds& bounds, const OptimizerSpec& spec,
                     const std::optional<Eigen::VectorXd>& start = std::nullopt);

/// Projected BFGS with central finite-difference gradients.
OptimResult minimize_local(const Objective& objective, const Bounds& bounds, const OptimizerSpec& spec,
                           const Eigen::VectorXd& start);

}  // namespace hkrig
