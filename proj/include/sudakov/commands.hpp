#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sudakov/distributions.hpp"
#include "sudakov/point_set.hpp"

namespace sudakov {

/// Model from a config entry: {"builtin": name, "n": n} or a full model spec.
VectorModel load_model(const nlohmann::json& j);

/// Family from a config entry. Accepted shapes:
///   {"n", "points": [[[i, v], ...], ...]}       sparse points
///   {"dense": [[...], ...]}                     dense points
///   {"generator": "scaled_basis", "n", "scale", "count", "origin"}
PointSet load_family(const nlohmann::json& j, double p);

struct CommandResult {
    nlohmann::json report;
    std::string csv;
    bool passed = true;
};

/// Runs one of moment, witness, reduce, extract, vcdim, minorate, concentration.
/// Throws ModelError / DomainError / nlohmann::json::exception on bad configs.
CommandResult run_command(const std::string& command, const nlohmann::json& config, const McOptions& mc);

const std::vector<std::string>& command_names();

}  // namespace sudakov
