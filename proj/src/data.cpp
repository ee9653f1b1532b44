#include "hkrig/data.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace hkrig {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v)) {
        throw Error(ErrorKind::Parse,
                    "non-numeric value '" + cell + "' at row " + std::to_string(row) + ", column '" + column + "'");
    }
    return v;
}

bool is_default_input_name(const std::string& name) {
    return name.size() > 1 && name[0] == 'x' &&
           std::all_of(name.begin() + 1, name.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y) {
    if (X.rows() != y.size()) throw Error(ErrorKind::Shape, "design rows and responses differ in length");
    Dataset data;
    data.noise_var = Eigen::VectorXd::Zero(y.size());
    data.replication_counts.assign(static_cast<std::size_t>(y.size()), 1);
    for (Eigen::Index q = 0; q < X.cols(); ++q) data.input_names.push_back("x" + std::to_string(q + 1));
    data.X = std::move(X);
    data.y = std::move(y);
    return data;
}

Dataset aggregate_replicates(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const std::optional<Eigen::VectorXd>& explicit_noise) {
    if (X.rows() != y.size()) throw Error(ErrorKind::Shape, "design rows and responses differ in length");
    if (explicit_noise && explicit_noise->size() != y.size()) {
        throw Error(ErrorKind::Shape, "noise column length differs from responses");
    }
    if (X.rows() == 0) throw Error(ErrorKind::EmptyDataset, "dataset has no rows");

    // Exact equality on parsed doubles; std::map orders the keys lexicographically.
    std::map<std::vector<double>, std::vector<Eigen::Index>> groups;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        std::vector<double> key(static_cast<std::size_t>(X.cols()));
        for (Eigen::Index q = 0; q < X.cols(); ++q) key[static_cast<std::size_t>(q)] = X(i, q);
        groups[key].push_back(i);
    }

    const auto n = static_cast<Eigen::Index>(groups.size());
    Dataset data;
    data.X.resize(n, X.cols());
    data.y.resize(n);
    data.noise_var.resize(n);
    data.replication_counts.reserve(groups.size());
    for (Eigen::Index q = 0; q < X.cols(); ++q) data.input_names.push_back("x" + std::to_string(q + 1));

    Eigen::Index row = 0;
    for (const auto& [key, members] : groups) {
        // sorted so the floating-point sums do not depend on row order
        std::vector<double> values;
        std::vector<double> noises;
        for (Eigen::Index i : members) {
            values.push_back(y[i]);
            if (explicit_noise) noises.push_back((*explicit_noise)[i]);
        }
        std::sort(values.begin(), values.end());
        std::sort(noises.begin(), noises.end());

        const auto m = static_cast<double>(values.size());
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= m;

        double noise = 0.0;
        if (explicit_noise) {
            for (double v : noises) noise += v;
            noise /= m * m;
        } else if (values.size() > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - mean) * (v - mean);
            noise = ss / (m - 1.0) / m;
        }

        for (Eigen::Index q = 0; q < X.cols(); ++q) data.X(row, q) = key[static_cast<std::size_t>(q)];
        data.y[row] = mean;
        data.noise_var[row] = noise;
        data.replication_counts.push_back(static_cast<int>(values.size()));
        ++row;
    }
    return data;
}

namespace {

std::vector<std::string> read_header(std::istream& in, const std::filesystem::path& path) {
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) {
            header = split_row(line);
            break;
        }
    }
    if (header.empty()) throw Error(ErrorKind::EmptyDataset, "empty data file: " + path.string());
    if (header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0] = header[0].substr(3);
    return header;
}

}  // namespace

Eigen::MatrixXd load_points_csv(const std::filesystem::path& path, const std::vector<std::string>& columns) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open query file: " + path.string());
    const std::vector<std::string> header = read_header(in, path);
    std::vector<std::size_t> cols;
    for (const auto& name : columns) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorKind::Schema, "missing column '" + name + "' in " + path.string());
        cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    std::vector<double> values;
    std::string line;
    std::size_t row_number = 1;
    Eigen::Index rows = 0;
    while (std::getline(in, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cells = split_row(line);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (cols[k] >= cells.size()) {
                throw Error(ErrorKind::Parse, "row " + std::to_string(row_number) + " has too few fields");
            }
            values.push_back(parse_number(cells[cols[k]], row_number, columns[k]));
        }
        ++rows;
    }
    if (rows == 0) throw Error(ErrorKind::EmptyDataset, "no query rows in " + path.string());
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), rows, static_cast<Eigen::Index>(cols.size()));
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open data file: " + path.string());

    std::string line;
    const std::vector<std::string> header = read_header(in, path);

    const auto column_of = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorKind::Schema, "missing column '" + name + "' in " + path.string());
        return static_cast<std::size_t>(it - header.begin());
    };

    std::vector<std::string> inputs = schema.inputs;
    if (inputs.empty()) {
        for (const auto& h : header)
            if (is_default_input_name(h)) inputs.push_back(h);
        if (inputs.empty()) throw Error(ErrorKind::Schema, "no input columns (x1, x2, ...) in " + path.string());
    }
    std::vector<std::size_t> input_cols;
    for (const auto& name : inputs) input_cols.push_back(column_of(name));
    const std::size_t output_col = column_of(schema.output);
    std::optional<std::size_t> noise_col;
    if (schema.noise) noise_col = column_of(*schema.noise);

    std::vector<std::vector<double>> rows;
    std::vector<double> outputs;
    std::vector<double> noises;
    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cells = split_row(line);
        const auto cell = [&](std::size_t c) -> const std::string& {
            if (c >= cells.size()) {
                throw Error(ErrorKind::Parse, "row " + std::to_string(row_number) + " has too few fields");
            }
            return cells[c];
        };
        std::vector<double> x;
        for (std::size_t k = 0; k < input_cols.size(); ++k) {
            x.push_back(parse_number(cell(input_cols[k]), row_number, inputs[k]));
        }
        rows.push_back(std::move(x));
        outputs.push_back(parse_number(cell(output_col), row_number, schema.output));
        if (noise_col) {
            const double v = parse_number(cell(*noise_col), row_number, *schema.noise);
            if (v < 0.0) throw Error(ErrorKind::Parse, "negative noise variance at row " + std::to_string(row_number));
            noises.push_back(v);
        }
    }
    if (rows.empty()) throw Error(ErrorKind::EmptyDataset, "no data rows in " + path.string());

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(inputs.size());
    Eigen::MatrixXd X(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index q = 0; q < d; ++q) X(i, q) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)];
        y[i] = outputs[static_cast<std::size_t>(i)];
    }
    std::optional<Eigen::VectorXd> explicit_noise;
    if (noise_col) explicit_noise = Eigen::Map<const Eigen::VectorXd>(noises.data(), n);

    Dataset data = aggregate_replicates(X, y, explicit_noise);
    data.input_names = inputs;
    data.output_name = schema.output;
    return data;
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << std::setprecision(17);
    for (Eigen::Index q = 0; q < data.d(); ++q) {
        out << (static_cast<std::size_t>(q) < data.input_names.size() ? data.input_names[static_cast<std::size_t>(q)]
                                                                       : "x" + std::to_string(q + 1))
            << ',';
    }
    out << data.output_name << ",noise_var\n";
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        for (Eigen::Index q = 0; q < data.d(); ++q) out << data.X(i, q) << ',';
        out << data.y[i] << ',' << (data.noise_var.size() ? data.noise_var[i] : 0.0) << '\n';
    }
}

double forrester_hf(double x) {
    const double a = 6.0 * x - 2.0;
    return a * a * std::sin(12.0 * x - 4.0);
}

double forrester_lf(double x) {
    constexpr double A = 0.5, B = 10.0, C = -5.0;
    return A * forrester_hf(x) + B * (x - 0.5) - C;
}

FidelityPair forrester_doe() {
    Eigen::MatrixXd x_lf(11, 1);
    Eigen::VectorXd y_lf(11);
    for (int i = 0; i <= 10; ++i) {
        x_lf(i, 0) = i / 10.0;
        y_lf[i] = forrester_lf(x_lf(i, 0));
    }
    Eigen::MatrixXd x_hf(4, 1);
    x_hf << 0.0, 0.4, 0.6, 1.0;
    Eigen::VectorXd y_hf(4);
    for (int i = 0; i < 4; ++i) y_hf[i] = forrester_hf(x_hf(i, 0));
    return {make_dataset(std::move(x_lf), std::move(y_lf)), make_dataset(std::move(x_hf), std::move(y_hf))};
}

double synthetic_lf(const Eigen::Ref<const Eigen::VectorXd>& x) {
    constexpr double pi = std::numbers::pi;
    return 2.0 + std::sin(2.0 * pi * x[0]) + 1.5 * x[1] * x[1] + std::cos(pi * x[2]) + x[0] * x[2];
}

double synthetic_hf(const Eigen::Ref<const Eigen::VectorXd>& x) {
    return 1.5 * synthetic_lf(x) + 0.6 * x[0] + 0.4 * x[1] - 0.3;
}

FidelityPair synthetic_3d_pair(const Synthetic3dOptions& o) {
    if (o.n_lf < 4 || o.n_hf < 4) throw Error(ErrorKind::InvalidInput, "synthetic pair needs at least 4 points per level");
    if (o.noise_scale < 0.0) throw Error(ErrorKind::InvalidInput, "noise scale must be non-negative");
    if (o.lf_replications < 1 || o.hf_replications < 1) {
        throw Error(ErrorKind::InvalidInput, "replication count must be positive");
    }
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Latin hypercube over the unit cube for LF
    Eigen::MatrixXd lf_points(o.n_lf, 3);
    for (int q = 0; q < 3; ++q) {
        std::vector<int> perm(static_cast<std::size_t>(o.n_lf));
        for (int i = 0; i < o.n_lf; ++i) perm[static_cast<std::size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < o.n_lf; ++i) lf_points(i, q) = (perm[static_cast<std::size_t>(i)] + unit(rng)) / o.n_lf;
    }

    // HF on six x1 slices, (x2, x3) stratified per slice
    Eigen::MatrixXd hf_points(o.n_hf, 3);
    constexpr int slices = 6;
    for (int i = 0; i < o.n_hf; ++i) hf_points(i, 0) = static_cast<double>(i % slices) / (slices - 1);
    for (int q = 1; q < 3; ++q) {
        std::vector<int> perm(static_cast<std::size_t>(o.n_hf));
        for (int i = 0; i < o.n_hf; ++i) perm[static_cast<std::size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < o.n_hf; ++i) hf_points(i, q) = (perm[static_cast<std::size_t>(i)] + unit(rng)) / o.n_hf;
    }

    const auto replicate = [&](const Eigen::MatrixXd& pts, int reps, auto&& truth, int noise_axis) {
        const Eigen::Index total = pts.rows() * reps;
        Eigen::MatrixXd X(total, 3);
        Eigen::VectorXd y(total);
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            const Eigen::VectorXd x = pts.row(i).transpose();
            const double sd = o.noise_scale * (0.5 + x[noise_axis]);
            for (int r = 0; r < reps; ++r, ++k) {
                X.row(k) = pts.row(i);
                y[k] = truth(x) + sd * gauss(rng);
            }
        }
        return aggregate_replicates(X, y);
    };

    FidelityPair pair;
    pair.lf = replicate(lf_points, o.lf_replications, synthetic_lf, 0);
    pair.hf = replicate(hf_points, o.hf_replications, synthetic_hf, 1);
    if (o.noise_scale == 0.0) {
        pair.lf.noise_var.setZero();
        pair.hf.noise_var.setZero();
    }
    return pair;
}

FidelityPair synthetic_3d_pair(int n_lf, int n_hf, double noise_scale, std::uint64_t seed) {
    Synthetic3dOptions o;
    o.n_lf = n_lf;
    o.n_hf = n_hf;
    o.noise_scale = noise_scale;
    o.seed = seed;
    return synthetic_3d_pair(o);
}

Eigen::VectorXd InputTransform::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != offset.size()) {
        throw Error(ErrorKind::Shape, "point has dimension " + std::to_string(x.size()) + ", model expects " +
                                          std::to_string(offset.size()));
    }
    return ((x - offset).array() / scale.array()).matrix();
}

Eigen::MatrixXd InputTransform::apply(const Eigen::MatrixXd& X) const {
    if (X.cols() != offset.size()) {
        throw Error(ErrorKind::Shape, "design has dimension " + std::to_string(X.cols()) + ", model expects " +
                                          std::to_string(offset.size()));
    }
    return ((X.rowwise() - offset.transpose()).array().rowwise() / scale.transpose().array()).matrix();
}

Eigen::MatrixXd InputTransform::invert(const Eigen::MatrixXd& U) const {
    return ((U.array().rowwise() * scale.transpose().array()).rowwise() + offset.transpose().array()).matrix();
}

Standardized standardize(const Dataset& data, bool center_output) {
    if (data.n() < 1) throw Error(ErrorKind::EmptyDataset, "cannot standardize an empty dataset");
    Standardized s;
    s.input.offset = data.X.colwise().minCoeff().transpose();
    s.input.scale = data.X.colwise().maxCoeff().transpose() - s.input.offset;
    for (Eigen::Index q = 0; q < data.d(); ++q) {
        if (!(s.input.scale[q] > 0.0)) {
            throw Error(ErrorKind::ConstantInput, "input dimension " + std::to_string(q + 1) + " is constant");
        }
    }
    s.X = s.input.apply(data.X);

    const double mean = data.y.mean();
    const double var = (data.y.array() - mean).square().mean();
    s.output.shift = center_output ? mean : 0.0;
    s.output.scale = var > 0.0 ? std::sqrt(var) : 1.0;
    s.y = (data.y.array() - s.output.shift) / s.output.scale;
    s.noise_var = data.noise_var.size() ? Eigen::VectorXd(data.noise_var / (s.output.scale * s.output.scale))
                                        : Eigen::VectorXd::Zero(data.n());
    return s;
}

Dataset destandardize(const Standardized& s) {
    Dataset data = make_dataset(s.input.invert(s.X), (s.y.array() * s.output.scale + s.output.shift).matrix());
    data.noise_var = s.noise_var * (s.output.scale * s.output.scale);
    return data;
}

}  // namespace hkrig
