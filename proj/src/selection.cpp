#include "hkrig/selection.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "hkrig/hierarchical.hpp"

namespace hkrig {

namespace {

void check_validation(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw Error(ErrorKind::Shape, "validation vectors differ in length (" + std::to_string(y_true.size()) +
                                          " vs " + std::to_string(y_pred.size()) + ")");
    }
    if (y_true.size() < 2) throw Error(ErrorKind::DegenerateValidation, "validation set needs at least 2 points");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<Combination> enumerate_combinations(const CombinationGrid& grid) {
    std::vector<Combination> out;
    out.reserve(grid.size());
    for (Structure s : grid.structures)
        for (Family f : grid.families)
            for (bool iso : grid.isotropy)
                for (int t : grid.trend_degrees)
                    for (Estimation e : grid.estimations)
                        for (Method m : grid.optimizers) out.push_back({s, f, iso, t, e, m});
    return out;
}

double q2(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
    check_validation(y_true, y_pred);
    const double mean = y_true.mean();
    const double sst = (y_true.array() - mean).square().sum();
    if (!(sst > 0.0)) throw Error(ErrorKind::DegenerateValidation, "validation outputs are constant");
    return 1.0 - (y_true - y_pred).squaredNorm() / sst;
}

double mae(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
    check_validation(y_true, y_pred);
    const double range = y_true.maxCoeff() - y_true.minCoeff();
    if (!(range > 0.0)) throw Error(ErrorKind::DegenerateValidation, "validation outputs have zero range");
    return (y_true - y_pred).cwiseAbs().maxCoeff() / range;
}

SweepResult run_combination(const Combination& c, int index, const std::optional<Dataset>& train_lf,
                            const Dataset& train_hf, const Dataset& validate, const SweepOptions& options,
                            const std::shared_ptr<const KrigingModel>& shared_lf) {
    SweepResult row;
    row.index = index;
    row.options = c;
    row.seed = combination_seed(options.base_seed, index);
    OptimizerSpec opt = options.optimizer;
    opt.method = c.optimizer;
    try {
        const auto t0 = std::chrono::steady_clock::now();
        std::shared_ptr<const KrigingModel> model;
        if (options.mode == SweepMode::Hierarchical) {
            std::shared_ptr<const KrigingModel> lf = shared_lf;
            if (!lf) {
                if (!train_lf) throw Error(ErrorKind::InvalidInput, "hierarchical sweep needs low-fidelity data");
                lf = std::make_shared<const KrigingModel>(
                    fit(*train_lf, c.correlation(), c.trend(), c.estimation, opt, row.seed));
            }
            model = std::make_shared<const KrigingModel>(
                fit_hierarchical(lf, train_hf, c.correlation(), c.estimation, opt, row.seed + 1));
        } else {
            model = std::make_shared<const KrigingModel>(
                fit(train_hf, c.correlation(), c.trend(), c.estimation, opt, row.seed));
        }
        row.fit_seconds = seconds_since(t0);

        const auto t1 = std::chrono::steady_clock::now();
        Eigen::VectorXd pred(validate.n());
        for (Eigen::Index i = 0; i < validate.n(); ++i) pred[i] = model->predict_mean(validate.X.row(i).transpose());
        row.q2 = q2(validate.y, pred);
        row.mae = mae(validate.y, pred);
        if (!std::isfinite(row.q2) || !std::isfinite(row.mae)) throw Error(ErrorKind::FitFailure, "non-finite predictions");
        row.score_seconds = seconds_since(t1);
        row.model = std::move(model);
        row.ok = true;
    } catch (const Error& e) {
        row.ok = false;
        row.failure = std::string(to_string(e.kind())) + ": " + e.what();
    } catch (const std::exception& e) {
        row.ok = false;
        row.failure = std::string("internal: ") + e.what();
    }
    return row;
}

std::vector<SweepResult> run_sweep(const CombinationGrid& grid, const std::optional<Dataset>& train_lf,
                                   const Dataset& train_hf, const Dataset& validate, const SweepOptions& options) {
    if (options.mode == SweepMode::Hierarchical && !train_lf) {
        throw Error(ErrorKind::InvalidInput, "hierarchical sweep needs low-fidelity training data");
    }
    if (validate.d() != train_hf.d()) {
        throw Error(ErrorKind::Shape, "validation dimension " + std::to_string(validate.d()) +
                                          " differs from training dimension " + std::to_string(train_hf.d()));
    }
    // fail fast on a validation set no metric can score
    {
        Eigen::VectorXd probe = Eigen::VectorXd::Zero(validate.n());
        (void)q2(validate.y, probe);
        (void)mae(validate.y, probe);
    }

    std::shared_ptr<const KrigingModel> shared_lf;
    if (options.mode == SweepMode::Hierarchical && options.shared_lf) {
        const Combination& c = options.shared_lf_options;
        OptimizerSpec opt = options.optimizer;
        opt.method = c.optimizer;
        shared_lf = std::make_shared<const KrigingModel>(
            fit(*train_lf, c.correlation(), c.trend(), c.estimation, opt, options.base_seed));
    }

    const std::vector<Combination> combos = enumerate_combinations(grid);
    std::vector<SweepResult> results(combos.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t k = next++; k < combos.size(); k = next++) {
            results[k] = run_combination(combos[k], static_cast<int>(k + 1), train_lf, train_hf, validate, options,
                                         shared_lf);
        }
    };

    const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(combos.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return results;
}

const SweepResult& select_best(const std::vector<SweepResult>& results, Criterion criterion) {
    const SweepResult* best = nullptr;
    const auto better = [criterion](const SweepResult& a, const SweepResult& b) {
        if (criterion == Criterion::Q2) {
            if (a.q2 != b.q2) return a.q2 > b.q2;
            if (a.mae != b.mae) return a.mae < b.mae;
        } else {
            if (a.mae != b.mae) return a.mae < b.mae;
            if (a.q2 != b.q2) return a.q2 > b.q2;
        }
        return a.index < b.index;
    };
    for (const SweepResult& r : results) {
        if (!r.ok) continue;
        if (!best || better(r, *best)) best = &r;
    }
    if (!best) throw Error(ErrorKind::NoModel, "every combination failed; no model to select");
    return *best;
}

}  // namespace hkrig
