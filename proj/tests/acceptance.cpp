// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "commands.hpp"
#include "hkrig/hierarchical.hpp"
#include "hkrig/serialize.hpp"
#include "oracles.hpp"

using namespace hkrig;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int hardware_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

Dataset forrester_validation() {
    Eigen::MatrixXd X(101, 1);
    Eigen::VectorXd y(101);
    for (int i = 0; i <= 100; ++i) {
        X(i, 0) = i / 100.0;
        y[i] = forrester_hf(X(i, 0));
    }
    return make_dataset(X, y);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome forrester_gain() {
    const auto t0 = Clock::now();
    const cli::ForresterReport r = cli::run_forrester(Estimation::MLE, Method::HybridDE, 0);
    const double secs = since(t0);
    const double ratio = r.rmse_conventional / r.rmse_hk;
    return {ratio >= 3.0 && secs < 10.0, "rmse HK " + fmt(r.rmse_hk) + ", conventional " + fmt(r.rmse_conventional) +
                                             ", ratio " + fmt(ratio) + ", " + fmt(secs) + " s"};
}

Outcome forrester_beta() {
    const cli::ForresterReport r = cli::run_forrester(Estimation::MLE, Method::HybridDE, 0);
    return {r.beta >= 1.8 && r.beta <= 2.2, "beta " + fmt(r.beta)};
}

Outcome grid_cardinality() {
    const std::size_t n = enumerate_combinations(CombinationGrid{}).size();
    return {n == 600, std::to_string(n) + " combinations"};
}

Outcome interpolation() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto combos = enumerate_combinations(CombinationGrid{});
    std::uniform_int_distribution<std::size_t> pick(0, combos.size() - 1);
    double worst_mean = 0.0, worst_var = 0.0;
    int fits = 0;
    while (fits < 50) {
        const Combination c = combos[pick(rng)];
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 3);
        const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng() % 11);
        // trend terms must leave room for estimation; draw again otherwise
        if (c.trend().basis_count(d) >= n) continue;
        const Eigen::MatrixXd X = Eigen::MatrixXd::NullaryExpr(n, d, [&] { return u(rng); });
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = std::sin(4.0 * X.row(i).sum()) + X(i, 0) * X(i, d - 1);
        const KrigingModel m = fit(make_dataset(X, y), c.correlation(), c.trend(), c.estimation, {c.optimizer}, fits);
        const double range = y.maxCoeff() - y.minCoeff();
        for (Eigen::Index i = 0; i < n; ++i) {
            const Prediction p = m.predict(X.row(i).transpose());
            worst_mean = std::max(worst_mean, std::abs(p.mean - y[i]) / range);
            worst_var = std::max(worst_var, p.variance / m.sigma2_original());
        }
        ++fits;
    }
    const double secs = since(t0);
    return {worst_mean <= 1e-6 && worst_var <= 1e-8 && secs < 60.0,
            "max |err|/range " + fmt(worst_mean) + ", max var/sigma2 " + fmt(worst_var) + ", " + fmt(secs) + " s"};
}

Outcome likelihood_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(77);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Eigen::Index n = 3 + k % 8, d = 1 + k % 3;
        const int degree = k % 2 == 1 && n > d + 2 ? 1 : 0;
        const auto t = oracle::random_training(rng, n, d, degree, k % 3 == 0);
        const CorrelationSpec spec{static_cast<Family>(k % 5), static_cast<Structure>((k / 5) % 2), k % 4 == 3};
        const HyperParams hp(Eigen::VectorXd::Constant(spec.theta_size(d), 0.15 + 0.04 * k));
        const double a = neg_log_likelihood(t, spec, hp), b = oracle::mvn_nll(t, spec, hp);
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
    const double secs = since(t0);
    return {worst <= 1e-8 && secs < 10.0, "max rel diff " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome loo_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(31);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const Eigen::Index n = 3 + k % 6, d = 1 + k % 2;
        const int degree = k % 3 == 1 && n > d + 2 ? 1 : 0;
        const auto t = oracle::random_training(rng, n, d, degree, k % 2 == 0);
        const CorrelationSpec spec{static_cast<Family>(k % 5), static_cast<Structure>(k % 2), k % 3 == 0};
        const HyperParams hp(Eigen::VectorXd::Constant(spec.theta_size(d), 0.25));
        const double a = loo_cv_objective(t, spec, hp), b = oracle::literal_loo(t, spec, hp);
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
    const double secs = since(t0);
    return {worst <= 1e-6 && secs < 30.0, "max rel diff " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome constant_lf_consistency() {
    const auto t0 = Clock::now();
    const FidelityPair p = forrester_doe();
    Eigen::MatrixXd Xl(5, 1);
    Xl << -1, 0, 0.5, 1, 2;
    const HyperParams lf_theta(Eigen::VectorXd::Constant(1, 0.5));
    auto lf = std::make_shared<const KrigingModel>(
        KrigingModel::condition(make_dataset(Xl, Eigen::VectorXd::Ones(5)), {}, TrendSpec::ordinary(), lf_theta));
    // theta of the conventional fit, reused for the HK level
    const KrigingModel ok_fit = fit(p.hf, {}, TrendSpec::ordinary(), Estimation::MLE, {}, 1);
    const KrigingModel ok = KrigingModel::condition(p.hf, {}, TrendSpec::ordinary(), ok_fit.theta());
    const KrigingModel hk = KrigingModel::condition(p.hf, {}, TrendSpec::external(lf), ok_fit.theta());
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, (i + 0.5) / 50.0);
        const Prediction a = hk.predict(x), b = ok.predict(x);
        worst = std::max(worst, std::abs(a.mean - b.mean) / std::max(std::abs(a.mean), std::abs(b.mean)));
        worst = std::max(worst, std::abs(a.variance - b.variance) / std::max(a.variance, b.variance));
    }
    const double secs = since(t0);
    return {worst <= 1e-8 && secs < 5.0, "max rel diff " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome metric_examples() {
    const auto v = [](std::initializer_list<double> xs) {
        Eigen::VectorXd out(static_cast<Eigen::Index>(xs.size()));
        Eigen::Index i = 0;
        for (double x : xs) out[i++] = x;
        return out;
    };
    const Eigen::VectorXd y = v({1, 2, 3});
    int failed = 0;
    const auto expect = [&](double got, double want) {
        if (!(std::abs(got - want) <= 1e-12)) ++failed;
    };
    expect(q2(y, y), 1.0);
    expect(q2(y, Eigen::VectorXd::Constant(3, 2.0)), 0.0);
    expect(q2(y, v({1, 2, 4})), 0.5);
    expect(mae(y, y), 0.0);
    expect(mae(y, v({1.1, 2, 2.8})), 0.1);
    expect(mae(y, v({1, 4, 3})), 1.0);
    const auto throws = [&](const std::function<void()>& fn, ErrorKind kind) {
        try {
            fn();
            ++failed;
        } catch (const Error& e) {
            if (e.kind() != kind) ++failed;
        }
    };
    throws([&] { q2(Eigen::VectorXd::Constant(3, 1.0), y); }, ErrorKind::DegenerateValidation);
    throws([&] { mae(Eigen::VectorXd::Constant(3, 1.0), y); }, ErrorKind::DegenerateValidation);
    throws([&] { q2(y, v({1, 2})); }, ErrorKind::Shape);
    return {failed == 0, std::to_string(9 - failed) + "/9 examples"};
}

Outcome sweep_determinism(const fs::path& work) {
    const FidelityPair p = forrester_doe();
    fs::create_directories(work / "in");
    save_csv(work / "in" / "lf.csv", p.lf);
    save_csv(work / "in" / "hf.csv", p.hf);
    save_csv(work / "in" / "val.csv", forrester_validation());

    cli::RunConfig c;
    c.command = "sweep";
    c.lf_data = work / "in" / "lf.csv";
    c.hf_data = work / "in" / "hf.csv";
    c.validate = work / "in" / "val.csv";
    c.seed = 12345;
    std::ostringstream log, err;
    c.workers = 1;
    c.out = work / "w1";
    const auto t0 = Clock::now();
    const int rc1 = cli::run(c, log, err);
    c.workers = 8;
    c.out = work / "w8";
    const int rc8 = cli::run(c, log, err);
    const double secs = since(t0);

    bool same = rc1 == 0 && rc8 == 0;
    for (const char* f : {"sweep.json", "sweep.csv", "best_q2_model.json", "best_mae_model.json"}) {
        const std::string a = slurp(work / "w1" / f), b = slurp(work / "w8" / f);
        same = same && !a.empty() && a == b;
    }
    return {same, "exit codes " + std::to_string(rc1) + "/" + std::to_string(rc8) + ", reports " +
                      (same ? "identical" : "differ") + ", " + fmt(secs) + " s for both"};
}

Outcome desk_sweep() {
    const FidelityPair p = forrester_doe();
    SweepOptions o;
    o.base_seed = 1;
    o.workers = hardware_workers();
    const auto t0 = Clock::now();
    const auto rows = run_sweep(CombinationGrid{}, p.lf, p.hf, forrester_validation(), o);
    const double secs = since(t0);
    const auto ok = std::count_if(rows.begin(), rows.end(), [](const SweepResult& r) { return r.ok; });
    const double frac = static_cast<double>(ok) / static_cast<double>(rows.size());
    return {rows.size() == 600 && frac >= 0.95 && secs < 600.0,
            std::to_string(ok) + "/" + std::to_string(rows.size()) + " ok, " + fmt(secs) + " s on " +
                std::to_string(o.workers) + " worker(s)"};
}

Outcome synthetic_robustness() {
    const auto t0 = Clock::now();
    const cli::Synthetic3dReport r = cli::run_synthetic3d(1, hardware_workers());
    const double secs = since(t0);
    const bool a = r.win_fraction() >= 0.8;
    const bool b = r.hk_spread() < r.conv_spread();
    return {a && b && secs < 900.0 && r.compared == 60,
            "(a) HK wins " + std::to_string(r.hk_wins) + "/" + std::to_string(r.compared) + "; (b) Q2 spread HK " +
                fmt(r.hk_spread()) + " vs conventional " + fmt(r.conv_spread()) + "; " + fmt(secs) + " s"};
}

Outcome kernel_properties() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-2.0, 2.0), lt(-2.0, 1.5);
    int violations = 0;
    double worst_identity = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Eigen::Index d = 1 + k % 3;
        Eigen::VectorXd x(d), y(d), th(d);
        for (Eigen::Index q = 0; q < d; ++q) {
            x[q] = u(rng);
            y[q] = u(rng);
            th[q] = std::pow(10.0, lt(rng));
        }
        const HyperParams hp(th);
        const double a = corr({Family::Gaussian, Structure::Separable, false}, x, y, hp);
        const double b = corr({Family::Gaussian, Structure::Ellipsoidal, false}, x, y, hp);
        worst_identity = std::max(worst_identity, std::abs(a - b));
        for (Family f : {Family::Gaussian, Family::Exponential, Family::Matern32, Family::Matern52, Family::Linear})
            for (Structure s : {Structure::Separable, Structure::Ellipsoidal}) {
                const CorrelationSpec spec{f, s, false};
                if (std::abs(corr(spec, x, y, hp) - corr(spec, y, x, hp)) > 1e-15) ++violations;
                if (corr(spec, x, x, hp) != 1.0) ++violations;
                const HyperParams one(Eigen::VectorXd::Constant(1, th[0]));
                const HyperParams many(Eigen::VectorXd::Constant(d, th[0]));
                if (std::abs(corr({f, s, true}, x, y, one) - corr(spec, x, y, many)) > 1e-15) ++violations;
            }
    }
    for (Family f : {Family::Gaussian, Family::Exponential, Family::Matern32, Family::Matern52, Family::Linear})
        for (double th : {0.01, 0.3, 1.0, 20.0}) {
            double prev = corr1d(f, 0.0, th);
            if (prev != 1.0) ++violations;
            for (int i = 1; i < 1000; ++i) {
                const double c = corr1d(f, 4.0 * i / 999.0, th);
                if (c > prev) ++violations;
                prev = c;
            }
        }
    Eigen::MatrixXd X = Eigen::MatrixXd::NullaryExpr(8, 2, [&] { return 0.5 * u(rng); });
    const Eigen::VectorXd noise = Eigen::VectorXd::LinSpaced(8, 0.0, 0.7);
    const CorrelationMatrix R0 = corr_matrix({}, X, HyperParams(Eigen::VectorXd::Constant(2, 0.3)), Eigen::VectorXd::Zero(8));
    const CorrelationMatrix Rn = corr_matrix({}, X, HyperParams(Eigen::VectorXd::Constant(2, 0.3)), noise);
    if (R0.r().diagonal() != Eigen::VectorXd::Ones(8)) ++violations;
    if (Rn.factorized().diagonal() != (Eigen::VectorXd::Ones(8) + noise)) ++violations;
    return {violations == 0 && worst_identity <= 1e-12,
            std::to_string(violations) + " violations, Gaussian identity max diff " + fmt(worst_identity)};
}

}  // namespace

int main() {
    const fs::path work = fs::temp_directory_path() / "hkrig_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    struct Criterion {
        const char* id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"01", "forrester multi-fidelity gain", forrester_gain},
        {"02", "forrester scaling factor", forrester_beta},
        {"03", "grid cardinality", grid_cardinality},
        {"04", "interpolation at training points", interpolation},
        {"05", "likelihood vs dense normal density", likelihood_oracle},
        {"06", "fast LOO vs literal refits", loo_oracle},
        {"07", "constant-LF HK equals ordinary Kriging", constant_lf_consistency},
        {"08", "q2/mae examples", metric_examples},
        {"09", "sweep determinism across worker counts", [&] { return sweep_determinism(work); }},
        {"10", "full 600-combination sweep", desk_sweep},
        {"11", "synthetic 3-D robustness", synthetic_robustness},
        {"12", "kernel property suites", kernel_properties},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failures == 0 ? 0 : 1;
}
