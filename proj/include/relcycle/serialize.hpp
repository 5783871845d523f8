#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "relcycle/cycles.hpp"
#include "relcycle/reduction.hpp"

namespace relcycle::serialize {

/// {theta, tx, ty, period, residual, group}. A translation phase puts its
/// first shift component in tx (theta = ty = 0) and the full shift in "shift".
nlohmann::json phase_to_json(const reduction::PhaseShift& phase);

/// {epsilon, anchor[], period, multipliers[{re,im}], contraction_rate,
///  residual, stability, phase?}
nlohmann::json certificate_to_json(const cycles::CycleCertificate& cert);

cycles::CycleCertificate certificate_from_json(const nlohmann::json& j);

/// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

} // namespace relcycle::serialize
