#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hkrig/hierarchical.hpp"
#include "hkrig/names.hpp"
#include "hkrig/serialize.hpp"

namespace hkrig::cli {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage:
            return kUsageError;
        case ErrorKind::Io:
        case ErrorKind::Schema:
        case ErrorKind::Parse:
        case ErrorKind::EmptyDataset:
        case ErrorKind::ConstantInput:
        case ErrorKind::Shape:
        case ErrorKind::InvalidInput:
        case ErrorKind::DegenerateValidation:
            return kDataError;
        default:
            return kFitError;
    }
}

namespace {

Error usage(const std::string& msg) { return Error(ErrorKind::Usage, msg); }

const fs::path& require(const std::optional<fs::path>& p, const char* flag) {
    if (!p) throw usage(std::string("missing required flag ") + flag);
    return *p;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

CsvSchema schema_of(const RunConfig& c) {
    CsvSchema s;
    s.inputs = c.inputs;
    s.output = c.output_col;
    s.noise = c.noise_col;
    return s;
}

CorrelationSpec spec_of(const RunConfig& c) {
    return {parse_family(c.family), parse_structure(c.structure), c.isotropic};
}

TrendSpec trend_of(const RunConfig& c) {
    const int degree = parse_trend_degree(c.trend);
    return degree == 0 ? TrendSpec::ordinary() : TrendSpec::polynomial(degree);
}

OptimizerSpec optimizer_of(const RunConfig& c) {
    OptimizerSpec o;
    o.method = parse_method(c.optimizer);
    o.seed = c.seed;
    return o;
}

int resolve_workers(const RunConfig& c) {
    if (c.workers) return *c.workers;
    if (const char* env = std::getenv(kWorkersEnv)) {
        try {
            std::size_t used = 0;
            const int w = std::stoi(env, &used);
            if (used == std::string(env).size() && w >= 1) return w;
        } catch (const std::exception&) {
        }
        throw usage(std::string(kWorkersEnv) + " must be a positive integer, got '" + env + "'");
    }
    return 1;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << text;
}

void ensure_out(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + out.string() + ": " + ec.message());
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json fit_summary(const KrigingModel& m) {
    const FitDiagnostics& d = m.diagnostics();
    return {{"theta", vec_json(m.theta().theta)},
            {"beta", vec_json(m.beta())},
            {"sigma2", m.sigma2()},
            {"sigma2_original", m.sigma2_original()},
            {"jitter", m.correlation().jitter()},
            {"estimation", to_string(m.estimation())},
            {"objective", std::isfinite(d.objective) ? json(d.objective) : json(nullptr)},
            {"evaluations", d.evaluations},
            {"converged", d.converged},
            {"seed", d.seed},
            {"n", m.data().n()},
            {"d", m.data().d()}};
}

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

Eigen::VectorXd means(const KrigingModel& m, const Eigen::MatrixXd& X) {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = m.predict_mean(X.row(i).transpose());
    return out;
}

}  // namespace

void validate_config(const RunConfig& c) {
    static const std::vector<std::string> commands{"fit", "hfit", "predict", "sweep", "bench"};
    if (std::find(commands.begin(), commands.end(), c.command) == commands.end()) {
        throw usage("unknown command '" + c.command + "'");
    }
    parse_family(c.family);
    parse_structure(c.structure);
    parse_trend_degree(c.trend);
    parse_estimation(c.estimation);
    parse_method(c.optimizer);
    if (c.workers && *c.workers < 1) throw usage("--workers must be at least 1");
    if (c.repeat < 1) throw usage("--repeat must be at least 1");
    if (c.mode != "hierarchical" && c.mode != "conventional") {
        throw usage("--mode must be hierarchical or conventional, got '" + c.mode + "'");
    }
    parse_grid_restrictions(c.grid);
    if (c.grid_spec) parse_lattice(*c.grid_spec);
    if (c.command == "bench" && c.bench != "forrester" && c.bench != "synthetic3d") {
        throw usage("unknown benchmark '" + c.bench + "' (expected forrester or synthetic3d)");
    }
}

CombinationGrid parse_grid_restrictions(const std::vector<std::string>& restrictions) {
    CombinationGrid g;
    for (const std::string& r : restrictions) {
        const auto eq = r.find('=');
        if (eq == std::string::npos) throw usage("grid restriction '" + r + "' is not axis=value[,value...]");
        std::string axis = r.substr(0, eq);
        std::transform(axis.begin(), axis.end(), axis.begin(), [](unsigned char ch) { return std::tolower(ch); });
        const auto values = split(r.substr(eq + 1), ',');
        if (values.empty()) throw usage("grid restriction '" + r + "' has no values");
        if (axis == "structure") {
            g.structures.clear();
            for (const auto& v : values) g.structures.push_back(parse_structure(v));
        } else if (axis == "family") {
            g.families.clear();
            for (const auto& v : values) g.families.push_back(parse_family(v));
        } else if (axis == "isotropic" || axis == "isotropy") {
            g.isotropy.clear();
            for (const auto& v : values) g.isotropy.push_back(parse_bool(v));
        } else if (axis == "trend") {
            g.trend_degrees.clear();
            for (const auto& v : values) g.trend_degrees.push_back(parse_trend_degree(v));
        } else if (axis == "estimation") {
            g.estimations.clear();
            for (const auto& v : values) g.estimations.push_back(parse_estimation(v));
        } else if (axis == "optimizer") {
            g.optimizers.clear();
            for (const auto& v : values) g.optimizers.push_back(parse_method(v));
        } else {
            throw usage("unknown grid axis '" + axis + "'");
        }
    }
    return g;
}

Eigen::MatrixXd parse_lattice(const std::string& spec) {
    std::vector<std::vector<double>> axes;
    for (const std::string& part : split(spec, ',')) {
        const auto f = split(part, ':');
        if (f.size() != 3) throw usage("grid spec '" + part + "' is not lo:hi:count");
        double lo = 0, hi = 0;
        long count = 0;
        try {
            std::size_t a = 0, b = 0, k = 0;
            lo = std::stod(f[0], &a);
            hi = std::stod(f[1], &b);
            count = std::stol(f[2], &k);
            if (a != f[0].size() || b != f[1].size() || k != f[2].size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw usage("grid spec '" + part + "' is not lo:hi:count");
        }
        if (!std::isfinite(lo) || !std::isfinite(hi) || count < 1 || (count == 1 && lo != hi) || hi < lo) {
            throw usage("grid spec '" + part + "' needs finite lo <= hi and count >= 1");
        }
        std::vector<double> axis(static_cast<std::size_t>(count));
        for (long i = 0; i < count; ++i) {
            axis[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
        }
        axes.push_back(std::move(axis));
    }
    if (axes.empty()) throw usage("empty grid spec");
    Eigen::Index rows = 1;
    for (const auto& a : axes) rows *= static_cast<Eigen::Index>(a.size());
    if (rows > 10'000'000) throw usage("grid spec produces too many points");
    Eigen::MatrixXd X(rows, static_cast<Eigen::Index>(axes.size()));
    for (Eigen::Index r = 0; r < rows; ++r) {
        Eigen::Index rem = r;
        for (Eigen::Index q = X.cols() - 1; q >= 0; --q) {
            const auto& a = axes[static_cast<std::size_t>(q)];
            const auto n = static_cast<Eigen::Index>(a.size());
            X(r, q) = a[static_cast<std::size_t>(rem % n)];
            rem /= n;
        }
    }
    return X;
}

int cmd_fit(const RunConfig& c, std::ostream& log) {
    const Dataset data = load_csv(require(c.data, "--data"), schema_of(c));
    const KrigingModel model =
        fit(data, spec_of(c), trend_of(c), parse_estimation(c.estimation), optimizer_of(c), c.seed);
    ensure_out(c.out);
    write_document(c.out / "model.json", model_to_json(model));
    json report = fit_summary(model);
    report["schema"] = "hkrig.fit_report";
    report["schema_version"] = kSchemaVersion;
    write_document(c.out / "fit_report.json", report);
    log << "fit: n=" << data.n() << " d=" << data.d() << " theta=" << vec_json(model.theta().theta).dump()
        << " beta=" << vec_json(model.beta()).dump() << " sigma2=" << format_double(model.sigma2_original()) << '\n';
    return kOk;
}

int cmd_hfit(const RunConfig& c, std::ostream& log) {
    const fs::path& lf_path = require(c.lf_data, "--lf-data");
    const fs::path& hf_path = require(c.hf_data, "--hf-data");
    const Dataset lf = load_csv(lf_path, schema_of(c));
    const Dataset hf = load_csv(hf_path, schema_of(c));
    if (lf.d() != hf.d()) {
        throw Error(ErrorKind::Shape, "low-fidelity data has dimension " + std::to_string(lf.d()) +
                                          ", high-fidelity data has dimension " + std::to_string(hf.d()));
    }
    const CorrelationSpec spec = spec_of(c);
    const Estimation est = parse_estimation(c.estimation);
    const OptimizerSpec opt = optimizer_of(c);
    auto lower = std::make_shared<const KrigingModel>(fit(lf, spec, trend_of(c), est, opt, c.seed));
    const KrigingModel hk = fit_hierarchical(lower, hf, spec, est, opt, c.seed + 1);

    ensure_out(c.out);
    write_document(c.out / "hk_model.json", model_to_json(hk));
    json report = {{"schema", "hkrig.hfit_report"},
                   {"schema_version", kSchemaVersion},
                   {"beta_scale", hk.beta()[hk.beta().size() - 1]},
                   {"low_fidelity", fit_summary(*lower)},
                   {"high_fidelity", fit_summary(hk)}};
    write_document(c.out / "hfit_report.json", report);
    log << "hfit: beta=" << format_double(hk.beta()[hk.beta().size() - 1])
        << " theta=" << vec_json(hk.theta().theta).dump() << '\n';
    return kOk;
}

int cmd_predict(const RunConfig& c, std::ostream& log) {
    const auto model = model_from_json(read_document(require(c.model, "--model")));
    const Dataset& data = model->data();
    if (c.query.has_value() == c.grid_spec.has_value()) throw usage("predict needs exactly one of --query or --grid-spec");

    Eigen::MatrixXd X = c.query ? load_points_csv(*c.query, data.input_names) : parse_lattice(*c.grid_spec);
    if (X.cols() != model->dim()) {
        throw Error(ErrorKind::Shape, "query has dimension " + std::to_string(X.cols()) + ", model has dimension " +
                                          std::to_string(model->dim()));
    }
    std::ostringstream os;
    for (const auto& name : data.input_names) os << name << ',';
    os << "mean,variance\n";
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Prediction p = model->predict(X.row(i).transpose());
        for (Eigen::Index q = 0; q < X.cols(); ++q) os << format_double(X(i, q)) << ',';
        os << format_double(p.mean) << ',' << format_double(p.variance) << '\n';
    }
    ensure_out(c.out);
    write_text(c.out / "predictions.csv", os.str());
    log << "predict: " << X.rows() << " rows\n";
    return kOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& log) {
    const CombinationGrid grid = parse_grid_restrictions(c.grid);
    SweepOptions opts;
    opts.mode = c.mode == "hierarchical" ? SweepMode::Hierarchical : SweepMode::Conventional;
    opts.base_seed = c.seed;
    opts.workers = resolve_workers(c);
    opts.shared_lf = c.shared_lf;

    std::optional<Dataset> lf;
    if (opts.mode == SweepMode::Hierarchical) lf = load_csv(require(c.lf_data, "--lf-data"), schema_of(c));
    const fs::path& hf_path = c.hf_data ? *c.hf_data : require(c.data, "--hf-data");
    const Dataset hf = load_csv(hf_path, schema_of(c));
    const Dataset val = load_csv(require(c.validate, "--validate"), schema_of(c));

    const std::vector<SweepResult> results = run_sweep(grid, lf, hf, val, opts);
    ensure_out(c.out);
    write_document(c.out / "sweep.json", sweep_report_json(results, opts.mode, c.seed));
    write_text(c.out / "sweep.csv", sweep_report_csv(results));
    write_text(c.out / "sweep_timings.csv", sweep_timings_csv(results));

    const auto ok = std::count_if(results.begin(), results.end(), [](const SweepResult& r) { return r.ok; });
    log << "sweep: " << ok << "/" << results.size() << " combinations ok\n";
    if (ok == 0) throw Error(ErrorKind::AllInfeasible, "every combination failed; see sweep.json for reasons");

    const SweepResult& by_q2 = select_best(results, Criterion::Q2);
    const SweepResult& by_mae = select_best(results, Criterion::MAE);
    write_document(c.out / "best_q2_model.json", model_to_json(*by_q2.model));
    write_document(c.out / "best_mae_model.json", model_to_json(*by_mae.model));
    log << "best by Q2: #" << by_q2.index << " q2=" << format_double(by_q2.q2) << "; best by MAE: #" << by_mae.index
        << " mae=" << format_double(by_mae.mae) << '\n';
    return kOk;
}

ForresterReport run_forrester(Estimation estimation, Method optimizer, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const FidelityPair doe = forrester_doe();
    const CorrelationSpec spec{Family::Gaussian, Structure::Separable, false};
    OptimizerSpec opt;
    opt.method = optimizer;

    auto lf = std::make_shared<const KrigingModel>(fit(doe.lf, spec, TrendSpec::ordinary(), estimation, opt, seed));
    const KrigingModel hk = fit_hierarchical(lf, doe.hf, spec, estimation, opt, seed + 1);
    const KrigingModel conv = fit(doe.hf, spec, TrendSpec::ordinary(), estimation, opt, seed + 1);

    Eigen::MatrixXd grid(101, 1);
    Eigen::VectorXd truth(101);
    for (int i = 0; i <= 100; ++i) {
        grid(i, 0) = i / 100.0;
        truth[i] = forrester_hf(grid(i, 0));
    }
    const Eigen::VectorXd mu_hk = means(hk, grid);
    const Eigen::VectorXd mu_conv = means(conv, grid);

    ForresterReport r;
    r.rmse_hk = rmse(mu_hk, truth);
    r.rmse_conventional = rmse(mu_conv, truth);
    r.q2_hk = q2(truth, mu_hk);
    r.q2_conventional = q2(truth, mu_conv);
    r.mae_hk = mae(truth, mu_hk);
    r.mae_conventional = mae(truth, mu_conv);
    r.beta = hk.beta()[hk.beta().size() - 1];
    r.theta_hk = hk.theta().theta[0];
    r.sigma2_hk = hk.sigma2_original();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

json to_json(const ForresterReport& r) {
    return {{"hierarchical", {{"rmse", r.rmse_hk}, {"q2", r.q2_hk}, {"mae", r.mae_hk}}},
            {"conventional", {{"rmse", r.rmse_conventional}, {"q2", r.q2_conventional}, {"mae", r.mae_conventional}}},
            {"beta", r.beta},
            {"theta", r.theta_hk},
            {"sigma2", r.sigma2_hk}};
}

std::pair<Dataset, Dataset> split_by_slices(const Dataset& hf, const std::vector<double>& slices) {
    std::vector<Eigen::Index> train, val;
    for (Eigen::Index i = 0; i < hf.n(); ++i) {
        const double x1 = hf.X(i, 0);
        const bool in = std::any_of(slices.begin(), slices.end(), [&](double s) { return std::abs(x1 - s) < 1e-9; });
        (in ? train : val).push_back(i);
    }
    const auto take = [&](const std::vector<Eigen::Index>& idx) {
        Dataset d;
        d.X.resize(static_cast<Eigen::Index>(idx.size()), hf.d());
        d.y.resize(static_cast<Eigen::Index>(idx.size()));
        d.noise_var.resize(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const auto i = idx[k];
            const auto r = static_cast<Eigen::Index>(k);
            d.X.row(r) = hf.X.row(i);
            d.y[r] = hf.y[i];
            d.noise_var[r] = hf.noise_var.size() ? hf.noise_var[i] : 0.0;
            d.replication_counts.push_back(hf.replication_counts.empty() ? 1 : hf.replication_counts[static_cast<std::size_t>(i)]);
        }
        d.input_names = hf.input_names;
        d.output_name = hf.output_name;
        return d;
    };
    return {take(train), take(val)};
}

CombinationGrid synthetic_subgrid() {
    CombinationGrid g;
    g.trend_degrees = {0, 1, 2};
    g.estimations = {Estimation::MLE};
    g.optimizers = {Method::HybridDE};
    return g;
}

Synthetic3dReport run_synthetic3d(std::uint64_t seed, int workers) {
    Synthetic3dOptions so;
    so.seed = seed;
    const FidelityPair pair = synthetic_3d_pair(so);
    const auto [train, val] = split_by_slices(pair.hf, kSyntheticTrainSlices);
    const CombinationGrid grid = synthetic_subgrid();

    SweepOptions opts;
    opts.base_seed = seed;
    opts.workers = workers;
    Synthetic3dReport r;
    opts.mode = SweepMode::Hierarchical;
    r.hierarchical = run_sweep(grid, pair.lf, train, val, opts);
    opts.mode = SweepMode::Conventional;
    r.conventional = run_sweep(grid, std::nullopt, train, val, opts);

    const auto range = [](const std::vector<SweepResult>& rows, double& lo, double& hi) {
        lo = INFINITY;
        hi = -INFINITY;
        for (const auto& row : rows) {
            if (!row.ok) continue;
            lo = std::min(lo, row.q2);
            hi = std::max(hi, row.q2);
        }
    };
    range(r.hierarchical, r.hk_min, r.hk_max);
    range(r.conventional, r.conv_min, r.conv_max);

    // a failed conventional fit counts as a loss for it, a failed HK fit as a loss for HK
    for (std::size_t k = 0; k < r.hierarchical.size(); ++k) {
        const SweepResult& h = r.hierarchical[k];
        const SweepResult& c = r.conventional[k];
        ++r.compared;
        if (h.ok && (!c.ok || h.q2 > c.q2)) ++r.hk_wins;
    }
    return r;
}

int cmd_bench(const RunConfig& c, std::ostream& log) {
    const Estimation est = parse_estimation(c.estimation);
    const Method method = parse_method(c.optimizer);
    json report = {{"schema", "hkrig.bench"}, {"schema_version", kSchemaVersion}, {"benchmark", c.bench}};
    std::vector<std::string> violations;

    if (c.bench == "forrester") {
        json runs = json::array();
        double lo = INFINITY, hi = -INFINITY;
        for (int k = 0; k < c.repeat; ++k) {
            const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(k);
            const ForresterReport r = run_forrester(est, method, seed);
            json j = to_json(r);
            j["seed"] = seed;
            runs.push_back(j);
            lo = std::min(lo, r.rmse_hk);
            hi = std::max(hi, r.rmse_hk);
            const std::string tag = "seed " + std::to_string(seed) + ": ";
            if (!(r.rmse_hk * c.min_gain <= r.rmse_conventional)) {
                violations.push_back(tag + "HK RMSE " + format_double(r.rmse_hk) + " is not " +
                                     format_double(c.min_gain) + "x below conventional " +
                                     format_double(r.rmse_conventional));
            }
            if (!(r.beta >= c.beta_lo && r.beta <= c.beta_hi)) {
                violations.push_back(tag + "beta " + format_double(r.beta) + " outside [" + format_double(c.beta_lo) +
                                     ", " + format_double(c.beta_hi) + "]");
            }
            log << "forrester seed " << seed << ": rmse HK " << format_double(r.rmse_hk) << ", conventional "
                << format_double(r.rmse_conventional) << ", beta " << format_double(r.beta) << '\n';
        }
        report["runs"] = runs;
        report["rmse_hk_spread"] = {{"min", lo}, {"max", hi}, {"spread", hi - lo}};
        report["thresholds"] = {{"min_gain", c.min_gain}, {"beta_lo", c.beta_lo}, {"beta_hi", c.beta_hi}};
    } else {
        const Synthetic3dReport r = run_synthetic3d(c.seed, resolve_workers(c));
        const auto q2s = [](const std::vector<SweepResult>& rows) {
            json a = json::array();
            for (const auto& row : rows) a.push_back(row.ok ? json(row.q2) : json(nullptr));
            return a;
        };
        report["hierarchical"] = {{"q2", q2s(r.hierarchical)}, {"min", r.hk_min}, {"max", r.hk_max},
                                  {"spread", r.hk_spread()}};
        report["conventional"] = {{"q2", q2s(r.conventional)}, {"min", r.conv_min}, {"max", r.conv_max},
                                  {"spread", r.conv_spread()}};
        report["hk_wins"] = r.hk_wins;
        report["compared"] = r.compared;
        report["win_fraction"] = r.win_fraction();
        report["thresholds"] = {{"min_win_fraction", c.min_win_fraction}};
        if (!(r.win_fraction() >= c.min_win_fraction)) {
            violations.push_back("HK wins " + std::to_string(r.hk_wins) + "/" + std::to_string(r.compared) +
                                 " combinations, below " + format_double(c.min_win_fraction));
        }
        if (!(r.hk_spread() < r.conv_spread())) {
            violations.push_back("HK Q2 spread " + format_double(r.hk_spread()) + " is not below conventional " +
                                 format_double(r.conv_spread()));
        }
        log << "synthetic3d: HK wins " << r.hk_wins << "/" << r.compared << ", Q2 spread HK "
            << format_double(r.hk_spread()) << " vs conventional " << format_double(r.conv_spread()) << '\n';
    }

    report["violations"] = violations;
    report["passed"] = violations.empty();
    ensure_out(c.out);
    write_document(c.out / ("bench_" + c.bench + ".json"), report);
    for (const auto& v : violations) log << "threshold violated: " << v << '\n';
    return violations.empty() ? kOk : kAcceptanceError;
}

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
    try {
        validate_config(config);
        if (config.command == "fit") return cmd_fit(config, log);
        if (config.command == "hfit") return cmd_hfit(config, log);
        if (config.command == "predict") return cmd_predict(config, log);
        if (config.command == "sweep") return cmd_sweep(config, log);
        return cmd_bench(config, log);
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        const int code = exit_code_for(e.kind());
        if (code != kUsageError) {
            try {
                ensure_out(config.out);
                write_document(config.out / "error.json", {{"schema", "hkrig.error"},
                                                           {"schema_version", kSchemaVersion},
                                                           {"command", config.command},
                                                           {"kind", to_string(e.kind())},
                                                           {"message", e.what()},
                                                           {"exit_code", code}});
            } catch (const Error&) {
                // the error document is best effort; the exit code still reports the failure
            }
        }
        return code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFitError;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Kriging and hierarchical Kriging surrogates"};
    app.require_subcommand(1);
    RunConfig c;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--out", c.out, "output directory")->capture_default_str();
        sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
    };
    const auto columns = [&](CLI::App* sub) {
        sub->add_option("--inputs", c.inputs, "input column names (default x1..xd)")->delimiter(',');
        sub->add_option("--output-col", c.output_col, "output column")->capture_default_str();
        sub->add_option("--noise-col", c.noise_col, "per-row noise variance column");
    };
    const auto model_opts = [&](CLI::App* sub) {
        sub->add_option("--family", c.family)->capture_default_str();
        sub->add_option("--structure", c.structure)->capture_default_str();
        sub->add_option("--isotropic", c.isotropic)->capture_default_str();
        sub->add_option("--trend", c.trend)->capture_default_str();
        sub->add_option("--estimation", c.estimation)->capture_default_str();
        sub->add_option("--optimizer", c.optimizer)->capture_default_str();
    };

    auto* fit_cmd = app.add_subcommand("fit", "fit a Kriging model to one dataset");
    fit_cmd->add_option("--data", c.data, "training CSV");
    common(fit_cmd);
    columns(fit_cmd);
    model_opts(fit_cmd);

    auto* hfit_cmd = app.add_subcommand("hfit", "fit a hierarchical model on low- and high-fidelity data");
    hfit_cmd->add_option("--lf-data", c.lf_data, "low-fidelity CSV");
    hfit_cmd->add_option("--hf-data", c.hf_data, "high-fidelity CSV");
    common(hfit_cmd);
    columns(hfit_cmd);
    model_opts(hfit_cmd);

    auto* predict_cmd = app.add_subcommand("predict", "predict from a saved model");
    predict_cmd->add_option("--model", c.model, "model document");
    predict_cmd->add_option("--query", c.query, "CSV of query points");
    predict_cmd->add_option("--grid-spec", c.grid_spec, "lattice lo:hi:count per dimension, comma separated");
    common(predict_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "fit and score every option combination");
    sweep_cmd->add_option("--lf-data", c.lf_data, "low-fidelity CSV (hierarchical mode)");
    sweep_cmd->add_option("--hf-data,--data", c.hf_data, "high-fidelity training CSV");
    sweep_cmd->add_option("--validate", c.validate, "validation CSV");
    sweep_cmd->add_option("--mode", c.mode, "hierarchical or conventional")->capture_default_str();
    sweep_cmd->add_option("--grid", c.grid, "axis=value[,value] restriction, repeatable");
    sweep_cmd->add_option("--workers", c.workers, std::string("worker threads (default $") + kWorkersEnv + " or 1)");
    sweep_cmd->add_flag("--shared-lf", c.shared_lf, "fit the low-fidelity model once");
    common(sweep_cmd);
    columns(sweep_cmd);

    auto* bench_cmd = app.add_subcommand("bench", "run a built-in benchmark with acceptance thresholds");
    bench_cmd->add_option("name", c.bench, "forrester or synthetic3d")->required();
    bench_cmd->add_option("--repeat", c.repeat, "forrester: number of consecutive seeds")->capture_default_str();
    bench_cmd->add_option("--estimation", c.estimation)->capture_default_str();
    bench_cmd->add_option("--optimizer", c.optimizer)->capture_default_str();
    bench_cmd->add_option("--workers", c.workers);
    bench_cmd->add_option("--min-gain", c.min_gain, "required conventional/HK RMSE ratio")->capture_default_str();
    bench_cmd->add_option("--beta-lo", c.beta_lo)->capture_default_str();
    bench_cmd->add_option("--beta-hi", c.beta_hi)->capture_default_str();
    bench_cmd->add_option("--min-win-fraction", c.min_win_fraction)->capture_default_str();
    common(bench_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }
    c.command = app.get_subcommands().front()->get_name();
    return run(c, std::cout, std::cerr);
}

}  // namespace hkrig::cli
