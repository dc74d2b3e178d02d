#pragma once

#include "edw/warehouse.hpp"

#include <optional>
#include <string>
#include <vector>

namespace edw {

struct PlanStep {
    std::string class_name;
    std::string kind; // extraction, generalization, specialization, unmapped
    std::vector<std::string> supers;
    std::string pipeline; // printed mapping, empty when unmapped
    std::optional<std::string> environment;
    Filters filters; // effective
};

struct PlanEnvironment {
    std::string name;
    std::vector<std::string> classes;
    RetentionConfig config; // effective
    HistorizationLevel level;
};

struct ElaborationPlan {
    std::string warehouse;
    std::vector<PlanStep> steps; // creation order
    std::vector<PlanEnvironment> environments;
};

// Throws InheritanceCycle.
ElaborationPlan elaboration_plan(WarehouseSchema const &schema);
std::string render_plan(ElaborationPlan const &plan);

} // namespace edw
