#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hkrig/error.hpp"

namespace hkrig {

/// Design and responses in original units. After replication aggregation
/// every row of X is unique; y holds the replicate means and noise_var the
/// variance of those means (zero for single runs).
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd noise_var;
    std::vector<int> replication_counts;
    std::vector<std::string> input_names;
    std::string output_name = "y";

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index d() const { return X.cols(); }
    bool noisy() const { return noise_var.size() > 0 && (noise_var.array() > 0.0).any(); }
};

/// Builds a noise-free dataset with one run per point.
Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y);

struct FidelityPair {
    Dataset lf;
    Dataset hf;
};

/// Column mapping for CSV ingestion. Empty `inputs` selects every column
/// named x1, x2, ... in header order.
struct CsvSchema {
    std::vector<std::string> inputs;
    std::string output = "y";
    std::optional<std::string> noise;
};

/// Groups raw rows with identical inputs. Per unique point: y = mean of the
/// replicates, noise_var = unbiased sample variance / count. When an explicit
/// per-row noise variance is supplied it replaces the replicate estimate
/// (averaged over the group, then divided by the count). Output rows are
/// sorted lexicographically by input tuple.
Dataset aggregate_replicates(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const std::optional<Eigen::VectorXd>& explicit_noise = std::nullopt);

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Reads the named columns of a CSV file as query points (no aggregation).
Eigen::MatrixXd load_points_csv(const std::filesystem::path& path, const std::vector<std::string>& columns);

/// Writes X columns, output and noise_var (replicate means, not raw runs).
void save_csv(const std::filesystem::path& path, const Dataset& data);

// Forrester one-dimensional benchmark pair on [0, 1].
double forrester_hf(double x);
double forrester_lf(double x);

/// LF on {0, 0.1, ..., 1}, HF on {0, 0.4, 0.6, 1}, both noise-free.
FidelityPair forrester_doe();

/// Smooth three-input LF/HF pair on [0,1]^3:
///
///   lf(x) = 2 + sin(2 pi x1) + 1.5 x2^2 + cos(pi x3) + x1 x3
///   hf(x) = 1.5 lf(x) + 0.6 x1 + 0.4 x2 - 0.3
///
/// HF points sit on the six x1 slices {0, 0.2, ..., 1}. Each point carries
/// `replications` runs with additive Gaussian noise of standard deviation
/// noise_scale * (0.5 + x1) (LF) or noise_scale * (0.5 + x2) (HF).
struct Synthetic3dOptions {
    int n_lf = 60;
    int n_hf = 36;
    double noise_scale = 0.1;
    int lf_replications = 6;
    int hf_replications = 4;
    std::uint64_t seed = 1;
};

double synthetic_lf(const Eigen::Ref<const Eigen::VectorXd>& x);
double synthetic_hf(const Eigen::Ref<const Eigen::VectorXd>& x);
FidelityPair synthetic_3d_pair(const Synthetic3dOptions& options);
FidelityPair synthetic_3d_pair(int n_lf, int n_hf, double noise_scale, std::uint64_t seed);

/// Per-dimension affine map of the training inputs onto [0, 1].
struct InputTransform {
    Eigen::VectorXd offset;
    Eigen::VectorXd scale;

    Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
    Eigen::MatrixXd invert(const Eigen::MatrixXd& U) const;
};

/// y_std = (y - shift) / scale.
struct OutputTransform {
    double shift = 0.0;
    double scale = 1.0;

    double apply(double y) const { return (y - shift) / scale; }
    double invert(double y_std) const { return shift + scale * y_std; }
};

struct Standardized {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd noise_var;
    InputTransform input;
    OutputTransform output;
};

/// Inputs go to [0,1] per dimension over the training range. Outputs are
/// centered (unless center_output is false, which keeps shift = 0) and divided
/// by the population standard deviation, i.e. divisor n, taken about the mean;
/// zero spread gives scale 1. Noise variances are divided by scale^2.
Standardized standardize(const Dataset& data, bool center_output = true);

/// Inverse of standardize on the design/response part.
Dataset destandardize(const Standardized& s);

}  // namespace hkrig
