#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "mbqc/estimate.hpp"
#include "mbqc/omega.hpp"
#include "mbqc/resource.hpp"

namespace mbqc {

using json = nlohmann::json;

// Resource-state document:
//   { "n": int, "generators": [pauli-text], "outputs": [int], "order": [int],
//     "r_ops": {"<qubit>": pauli-text}, "sign_flips": [int] (optional) }
struct StateDocument {
    ResourceState state;
    std::vector<std::size_t> sign_flips;  // optional flipped generator indices
};

json state_to_json(const ResourceState& state, const std::vector<std::size_t>& sign_flips = {});
StateDocument state_from_json(const json& doc);

StateDocument load_state(const std::string& path);
void save_json(const json& doc, const std::string& path);
json read_json(const std::string& path);

// { "n": int, "terms": [{"word": pauli-text, "coeff": float,
//                        "coeff_exact": [num, log2den]}] }
json pauli_sum_to_json(const PauliSum& sum);
PauliSum pauli_sum_from_json(const json& doc);

json spectral_summary_to_json(const SpectralSummary& summary);

json estimation_report_to_json(const EstimationReport& report);

json bounds_verdict_to_json(const BoundsVerdict& verdict);

}  // namespace mbqc
