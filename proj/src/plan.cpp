#include "edw/plan.hpp"

#include <sstream>

namespace edw {

ElaborationPlan elaboration_plan(WarehouseSchema const &schema)
{
    ElaborationPlan plan;
    plan.warehouse = schema.name;
    for (auto const &name : dependency_order(schema)) {
        WarehouseClass const &c = schema.get(name);
        PlanStep step;
        step.class_name = name;
        step.supers = c.supers;
        if (!c.mapping)
            step.kind = "unmapped";
        else if (is_specialized(c))
            step.kind = "specialization";
        else if (is_generalized(c))
            step.kind = "generalization";
        else
            step.kind = "extraction";
        if (c.mapping)
            step.pipeline = print_mapping(*c.mapping);
        step.environment = environment_of(schema, name);
        step.filters = effective_filters(schema, name);
        plan.steps.push_back(std::move(step));
    }
    for (auto const &[name, env] : schema.environments)
        plan.environments.push_back(
            PlanEnvironment{name, env.classes, effective_config(schema, name), historization_level(schema, name)});
    return plan;
}

namespace {

std::string join(std::vector<std::string> const &items)
{
    std::string out;
    for (auto const &s : items)
        out += (out.empty() ? "" : ", ") + s;
    return out;
}

} // namespace

std::string render_plan(ElaborationPlan const &plan)
{
    std::ostringstream out;
    out << "plan for warehouse " << plan.warehouse << "\n\n";
    out << "classes (" << plan.steps.size() << ", creation order)\n";
    int n = 0;
    for (auto const &s : plan.steps) {
        out << "  " << ++n << ". " << s.class_name << " [" << s.kind << "]";
        if (!s.supers.empty())
            out << " extends " << join(s.supers);
        out << "\n";
        if (!s.pipeline.empty())
            out << "     pipeline: " << s.pipeline << "\n";
        out << "     environment: " << (s.environment ? *s.environment : "none") << "\n";
        if (!s.filters.tempo.empty())
            out << "     temporal: "
                << join(std::vector<std::string>(s.filters.tempo.begin(), s.filters.tempo.end())) << "\n";
        if (!s.filters.archi.empty()) {
            std::vector<std::string> items;
            for (auto const &[p, fn] : s.filters.archi)
                items.push_back(std::string(to_string(fn)) + "(" + p + ")");
            out << "     archive: " << join(items) << "\n";
        }
    }
    out << "\nenvironments (" << plan.environments.size() << ")\n";
    for (auto const &e : plan.environments) {
        out << "  " << e.name << ": " << join(e.classes) << "\n";
        out << "     historization level: " << to_string(e.level) << "\n";
        out << "     retention: " << format_config(e.config) << "\n";
    }
    return out.str();
}

} // namespace edw
