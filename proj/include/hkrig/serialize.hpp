#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "hkrig/hierarchical.hpp"
#include "hkrig/kriging.hpp"
#include "hkrig/selection.hpp"

namespace hkrig {

inline constexpr int kSchemaVersion = 1;

/// Self-describing model document. A model with an external trend embeds the
/// full document of its lower-fidelity model under trend.lower, so a
/// hierarchical document is self-contained.
nlohmann::json model_to_json(const KrigingModel& model);

/// Rebuilds the model from its stored data and theta; the factorization and
/// GLS estimates are recomputed through the same code path as fitting.
std::shared_ptr<const KrigingModel> model_from_json(const nlohmann::json& doc);

/// Recovers the level chain of a model built on external trends.
HierarchicalModel hierarchy_of(std::shared_ptr<const KrigingModel> top);

std::string dump_document(const nlohmann::json& doc);
void write_document(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_document(const std::filesystem::path& path);

/// Sweep report rows in enumeration order. Wall-clock timings are excluded
/// so reports are reproducible byte for byte; see sweep_timings_csv.
nlohmann::json sweep_report_json(const std::vector<SweepResult>& results, SweepMode mode, std::uint64_t base_seed);
/// index, structure, family, isotropic, trend, estimation, optimizer, q2, mae, status
std::string sweep_report_csv(const std::vector<SweepResult>& results);
/// index, fit_seconds, score_seconds
std::string sweep_timings_csv(const std::vector<SweepResult>& results);

/// Shortest round-trip decimal representation (as used in all documents).
std::string format_double(double v);

}  // namespace hkrig
