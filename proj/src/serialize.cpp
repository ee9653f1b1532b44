#include "hkrig/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hkrig/names.hpp"

namespace hkrig {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index q = 0; q < m.cols(); ++q) row[static_cast<std::size_t>(q)] = m(i, q);
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd mat(const json& j, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto row = j[i].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorKind::Schema, "ragged design matrix");
        for (Eigen::Index q = 0; q < cols; ++q) m(static_cast<Eigen::Index>(i), q) = row[static_cast<std::size_t>(q)];
    }
    return m;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_double(double v) { return json(v).dump(); }

json model_to_json(const KrigingModel& model) {
    const Dataset& data = model.data();
    const TrendSpec& trend = model.trend();
    json t = {{"kind", trend_name(trend.kind, trend.degree)}};
    if (trend.kind == TrendKind::Polynomial) t["degree"] = trend.degree;
    if (trend.kind == TrendKind::External) {
        t["augment_constant"] = trend.augment_constant;
        t["lower"] = model_to_json(*trend.lower);
    }
    const FitDiagnostics& diag = model.diagnostics();
    return {
        {"schema", "hkrig.model"},
        {"schema_version", kSchemaVersion},
        {"kind", trend.kind == TrendKind::External ? "hierarchical" : "kriging"},
        {"correlation",
         {{"family", to_string(model.spec().family)},
          {"structure", to_string(model.spec().structure)},
          {"isotropic", model.spec().isotropic}}},
        {"trend", t},
        {"estimation", to_string(model.estimation())},
        {"theta", vec(model.theta().theta)},
        {"beta", vec(model.beta())},
        {"sigma2", model.sigma2()},
        {"sigma2_original", model.sigma2_original()},
        {"jitter", model.correlation().jitter()},
        {"input_transform", {{"offset", vec(model.input_transform().offset)}, {"scale", vec(model.input_transform().scale)}}},
        {"output_transform", {{"shift", model.output_transform().shift}, {"scale", model.output_transform().scale}}},
        {"diagnostics",
         {{"objective", nullable(diag.objective)},
          {"evaluations", diag.evaluations},
          {"converged", diag.converged},
          {"global_best", nullable(diag.global_best)},
          {"seed", diag.seed}}},
        {"data",
         {{"input_names", data.input_names},
          {"output_name", data.output_name},
          {"X", mat(data.X)},
          {"y", vec(data.y)},
          {"noise_var", vec(data.noise_var)},
          {"replication_counts", data.replication_counts}}},
    };
}

std::shared_ptr<const KrigingModel> model_from_json(const json& doc) {
    try {
        if (doc.at("schema").get<std::string>() != "hkrig.model") throw Error(ErrorKind::Schema, "not a model document");
        if (doc.at("schema_version").get<int>() != kSchemaVersion) {
            throw Error(ErrorKind::Schema, "unsupported model schema version");
        }
        const json& c = doc.at("correlation");
        const CorrelationSpec spec{parse_family(c.at("family").get<std::string>()),
                                   parse_structure(c.at("structure").get<std::string>()),
                                   c.at("isotropic").get<bool>()};

        const json& t = doc.at("trend");
        const std::string kind = t.at("kind").get<std::string>();
        TrendSpec trend;
        if (kind == "External") {
            trend = TrendSpec::external(model_from_json(t.at("lower")), t.value("augment_constant", false));
        } else {
            const int degree = parse_trend_degree(kind);
            trend = degree == 0 ? TrendSpec::ordinary() : TrendSpec::polynomial(degree);
        }

        const json& d = doc.at("data");
        const auto names = d.at("input_names").get<std::vector<std::string>>();
        Dataset data;
        data.X = mat(d.at("X"), static_cast<Eigen::Index>(names.size()));
        data.y = vec(d.at("y"));
        data.noise_var = vec(d.at("noise_var"));
        data.replication_counts = d.at("replication_counts").get<std::vector<int>>();
        data.input_names = names;
        data.output_name = d.at("output_name").get<std::string>();

        const HyperParams theta(vec(doc.at("theta")));
        auto model = KrigingModel::condition(data, spec, trend, theta);

        const json& g = doc.at("diagnostics");
        FitDiagnostics diag;
        diag.objective = g.at("objective").is_null() ? NAN : g.at("objective").get<double>();
        diag.evaluations = g.at("evaluations").get<std::size_t>();
        diag.converged = g.at("converged").get<bool>();
        diag.global_best = g.at("global_best").is_null() ? NAN : g.at("global_best").get<double>();
        diag.seed = g.at("seed").get<std::uint64_t>();
        model.set_fit_info(parse_estimation(doc.at("estimation").get<std::string>()), diag);
        return std::make_shared<const KrigingModel>(std::move(model));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Schema, std::string("malformed model document: ") + e.what());
    }
}

HierarchicalModel hierarchy_of(std::shared_ptr<const KrigingModel> top) {
    std::vector<std::shared_ptr<const KrigingModel>> chain;
    for (auto m = std::move(top); m; m = m->trend().kind == TrendKind::External ? m->trend().lower : nullptr) {
        chain.push_back(m);
    }
    HierarchicalModel h(chain.back());
    for (auto it = chain.rbegin() + 1; it != chain.rend(); ++it) h.push_level(*it);
    return h;
}

std::string dump_document(const json& doc) { return doc.dump(2) + "\n"; }

void write_document(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << dump_document(doc);
}

json read_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Schema, "cannot parse " + path.string() + ": " + e.what());
    }
}

json sweep_report_json(const std::vector<SweepResult>& results, SweepMode mode, std::uint64_t base_seed) {
    json rows = json::array();
    std::size_t ok = 0;
    for (const SweepResult& r : results) {
        json row = {
            {"index", r.index},
            {"structure", to_string(r.options.structure)},
            {"family", to_string(r.options.family)},
            {"isotropic", r.options.isotropic},
            {"trend", trend_name(r.options.trend_degree == 0 ? TrendKind::Ordinary : TrendKind::Polynomial,
                                 r.options.trend_degree)},
            {"estimation", to_string(r.options.estimation)},
            {"optimizer", to_string(r.options.optimizer)},
            {"seed", r.seed},
            {"status", r.ok ? "ok" : "failed"},
        };
        if (r.ok) {
            ++ok;
            row["q2"] = r.q2;
            row["mae"] = r.mae;
        } else {
            row["reason"] = r.failure;
        }
        rows.push_back(std::move(row));
    }
    return {{"schema", "hkrig.sweep"},
            {"schema_version", kSchemaVersion},
            {"mode", mode == SweepMode::Hierarchical ? "hierarchical" : "conventional"},
            {"base_seed", base_seed},
            {"combinations", results.size()},
            {"ok", ok},
            {"rows", rows}};
}

std::string sweep_report_csv(const std::vector<SweepResult>& results) {
    std::ostringstream os;
    os << "index,structure,family,isotropic,trend,estimation,optimizer,q2,mae,status\n";
    for (const SweepResult& r : results) {
        os << r.index << ',' << to_string(r.options.structure) << ',' << to_string(r.options.family) << ','
           << (r.options.isotropic ? "true" : "false") << ','
           << trend_name(r.options.trend_degree == 0 ? TrendKind::Ordinary : TrendKind::Polynomial,
                         r.options.trend_degree)
           << ',' << to_string(r.options.estimation) << ',' << to_string(r.options.optimizer) << ',';
        if (r.ok) {
            os << format_double(r.q2) << ',' << format_double(r.mae) << ",ok\n";
        } else {
            os << ",,failed\n";
        }
    }
    return os.str();
}

std::string sweep_timings_csv(const std::vector<SweepResult>& results) {
    std::ostringstream os;
    os << "index,fit_seconds,score_seconds\n";
    for (const SweepResult& r : results) {
        os << r.index << ',' << format_double(r.fit_seconds) << ',' << format_double(r.score_seconds) << '\n';
    }
    return os.str();
}

}  // namespace hkrig
