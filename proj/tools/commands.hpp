#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hkrig/data.hpp"
#include "hkrig/kriging.hpp"
#include "hkrig/selection.hpp"

namespace hkrig::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageError = 1,
    kDataError = 2,
    kFitError = 3,
    kAcceptanceError = 4,
};

int exit_code_for(ErrorKind kind);

/// Environment variable holding the default sweep worker count.
inline constexpr const char* kWorkersEnv = "HKRIG_WORKERS";

struct RunConfig {
    std::string command;

    std::optional<std::filesystem::path> data;
    std::optional<std::filesystem::path> lf_data;
    std::optional<std::filesystem::path> hf_data;
    std::optional<std::filesystem::path> validate;
    std::optional<std::filesystem::path> model;
    std::optional<std::filesystem::path> query;
    std::optional<std::string> grid_spec;  // predict lattice: "lo:hi:count[,lo:hi:count...]"

    std::vector<std::string> inputs;
    std::string output_col = "y";
    std::optional<std::string> noise_col;

    std::string family = "Gaussian";
    std::string structure = "Separable";
    bool isotropic = false;
    std::string trend = "Ordinary";
    std::string estimation = "MLE";
    std::string optimizer = "HybridDE";

    std::vector<std::string> grid;  // sweep restrictions "axis=v1,v2"
    std::string mode = "hierarchical";
    bool shared_lf = false;

    std::uint64_t seed = 0;
    std::optional<int> workers;
    std::filesystem::path out = ".";

    std::string bench;
    int repeat = 1;
    double min_gain = 3.0;
    double beta_lo = 1.8;
    double beta_hi = 2.2;
    double min_win_fraction = 0.8;
};

/// Every flag value checked against its closed set before any fitting.
void validate_config(const RunConfig& config);

/// Applies "axis=v1,v2" restrictions (axes: structure, family, isotropic,
/// trend, estimation, optimizer) to the full grid.
CombinationGrid parse_grid_restrictions(const std::vector<std::string>& restrictions);

/// Regular lattice from "lo:hi:count" per dimension, first dimension varying slowest.
Eigen::MatrixXd parse_lattice(const std::string& spec);

int cmd_fit(const RunConfig& config, std::ostream& log);
int cmd_hfit(const RunConfig& config, std::ostream& log);
int cmd_predict(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);
int cmd_bench(const RunConfig& config, std::ostream& log);

/// Dispatches on config.command, mapping errors to exit codes and writing a
/// machine-readable error document into the output directory.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Parses argv with CLI11 and runs. Usage errors exit with kUsageError.
int main_entry(int argc, char** argv);

// Benchmarks, shared by cmd_bench and the acceptance suite.

struct ForresterReport {
    double rmse_hk = 0.0;
    double rmse_conventional = 0.0;
    double q2_hk = 0.0, q2_conventional = 0.0;
    double mae_hk = 0.0, mae_conventional = 0.0;
    double beta = 0.0;
    double theta_hk = 0.0;
    double sigma2_hk = 0.0;
    double seconds = 0.0;
};

/// LF ordinary Kriging on D1, HK and conventional ordinary Kriging on D2,
/// Gaussian kernel, scored against y_hf on a 101-point grid.
ForresterReport run_forrester(Estimation estimation, Method optimizer, std::uint64_t seed);

struct Synthetic3dReport {
    std::vector<SweepResult> hierarchical;
    std::vector<SweepResult> conventional;
    int compared = 0;
    int hk_wins = 0;
    double hk_min = 0.0, hk_max = 0.0, conv_min = 0.0, conv_max = 0.0;
    double win_fraction() const { return compared ? static_cast<double>(hk_wins) / compared : 0.0; }
    double hk_spread() const { return hk_max - hk_min; }
    double conv_spread() const { return conv_max - conv_min; }
};

/// HF training rows on the x1 slices used by the synthetic benchmark.
inline const std::vector<double> kSyntheticTrainSlices{0.2, 0.6, 1.0};

/// Splits HF rows by x1 slice membership into (train, validate).
std::pair<Dataset, Dataset> split_by_slices(const Dataset& hf, const std::vector<double>& slices);

/// The 60-combination sub-grid: both structures, all families, both
/// isotropy options, ordinary/linear/quadratic trend, MLE, HybridDE.
CombinationGrid synthetic_subgrid();

Synthetic3dReport run_synthetic3d(std::uint64_t seed, int workers);

nlohmann::json to_json(const ForresterReport& r);

}  // namespace hkrig::cli
