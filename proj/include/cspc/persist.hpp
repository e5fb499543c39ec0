#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "cspc/core.hpp"
#include "cspc/multivariate.hpp"
#include "cspc/scores.hpp"

namespace cspc {

struct provenance {
    std::string source_digest;
    std::string created;
    std::uint64_t seed = 0;

    bool operator==(const provenance&) const = default;
};

/// Everything phase-2 monitoring needs, as one self-describing archive:
/// the calibration model plus the scorer's frozen reference (or predictive
/// model, or detector). Numbers round-trip losslessly, so decisions computed
/// from a loaded archive match the in-memory original bit for bit.
struct model_archive {
    static constexpr int current_version = 1;

    int format_version = current_version;
    calibration_model model;
    std::shared_ptr<const predictive_model> predictive;  ///< model-based scorers
    std::shared_ptr<const anomaly_detector> detector;    ///< detector archives
    std::vector<labeled_point> calibration_points;       ///< spike-chart widths
    provenance prov;
};

std::string archive_to_json(const model_archive& archive);

/// Parses and validates: version gate, sorted scores, threshold consistent
/// with the quantile rank. Anything malformed is rejected as corrupt.
model_archive archive_from_json(const std::string& text);

void save_archive(const model_archive& archive, const std::filesystem::path& path);
model_archive load_archive(const std::filesystem::path& path);

/// Rebuild the scorer described by a loaded archive.
nonconformity_scorer scorer_from_archive(const model_archive& archive);

} // namespace cspc
