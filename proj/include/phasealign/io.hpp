#ifndef PHASEALIGN_IO_HPP
#define PHASEALIGN_IO_HPP

#include <cstdio>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasealign/common.hpp"
#include "phasealign/harness.hpp"

namespace phasealign {

/// Render a double with 12 significant digits, enough for round-trip
/// fidelity at the precision the traces carry.
inline std::string format_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

inline const std::set<std::string>& spec_keys() {
    static const std::set<std::string> keys = {
        "n_transmitters", "symbol_amplitude", "noise_variance", "algorithm",
        "feedback_bits",  "exact_feedback",   "sweeps",         "delta_max",
        "max_slots",      "threshold",        "absolute_threshold", "trials",
        "master_seed",
    };
    return keys;
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw config_error(key + ": wrong type");
    }
}

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("config root must be a JSON object");
    ExperimentSpec spec;
    spec.n_transmitters = get_or<std::size_t>(j, "n_transmitters", spec.n_transmitters);
    spec.symbol_amplitude = get_or<double>(j, "symbol_amplitude", spec.symbol_amplitude);
    spec.noise_variance = get_or<double>(j, "noise_variance", spec.noise_variance);
    if (j.contains("algorithm")) {
        const std::string name = get_or<std::string>(j, "algorithm", "ddsa");
        if (name == "ddsa") spec.algorithm = Algorithm::ddsa;
        else if (name == "onebit") spec.algorithm = Algorithm::onebit;
        else throw config_error("algorithm: must be \"ddsa\" or \"onebit\"");
    }
    spec.feedback_bits = get_or<int>(j, "feedback_bits", spec.feedback_bits);
    spec.exact_feedback = get_or<bool>(j, "exact_feedback", spec.exact_feedback);
    spec.sweeps = get_or<int>(j, "sweeps", spec.sweeps);
    spec.delta_max = get_or<double>(j, "delta_max", spec.delta_max);
    spec.max_slots = get_or<int>(j, "max_slots", spec.max_slots);
    spec.threshold = get_or<double>(j, "threshold", spec.threshold);
    spec.absolute_threshold = get_or<bool>(j, "absolute_threshold", spec.absolute_threshold);
    spec.trials = get_or<int>(j, "trials", spec.trials);
    spec.master_seed = get_or<std::uint64_t>(j, "master_seed", spec.master_seed);
    spec.validate();
    return spec;
}

} // namespace detail

/// Parse an experiment config from JSON text. Unknown keys are rejected by
/// name; missing keys take the documented defaults; out-of-range values
/// raise config_error naming the field and bound.
inline ExperimentSpec parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config root must be a JSON object");
    for (const auto& item : j.items()) {
        if (!detail::spec_keys().count(item.key()))
            throw config_error("unknown config key: " + item.key());
    }
    return detail::spec_from_json(j);
}

inline nlohmann::json serialize_config(const ExperimentSpec& spec) {
    return nlohmann::json{
        {"n_transmitters", spec.n_transmitters},
        {"symbol_amplitude", spec.symbol_amplitude},
        {"noise_variance", spec.noise_variance},
        {"algorithm", algorithm_name(spec.algorithm)},
        {"feedback_bits", spec.feedback_bits},
        {"exact_feedback", spec.exact_feedback},
        {"sweeps", spec.sweeps},
        {"delta_max", spec.delta_max},
        {"max_slots", spec.max_slots},
        {"threshold", spec.threshold},
        {"absolute_threshold", spec.absolute_threshold},
        {"trials", spec.trials},
        {"master_seed", spec.master_seed},
    };
}

/// Grid description for the `sweep` subcommand.
struct SweepGrid {
    std::string parameter;
    std::vector<double> values;
};

/// Like parse_config, but additionally accepts "sweep_parameter" (one of the
/// numeric spec fields) and "sweep_values" (nonempty array of numbers).
inline std::pair<ExperimentSpec, SweepGrid> parse_sweep_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config root must be a JSON object");
    for (const auto& item : j.items()) {
        if (item.key() == "sweep_parameter" || item.key() == "sweep_values") continue;
        if (!detail::spec_keys().count(item.key()))
            throw config_error("unknown config key: " + item.key());
    }
    SweepGrid grid;
    grid.parameter = detail::get_or<std::string>(j, "sweep_parameter", "");
    if (grid.parameter.empty()) throw config_error("sweep_parameter: required for the sweep command");
    static const std::set<std::string> sweepable = {"feedback_bits", "n_transmitters", "delta_max",
                                                    "max_slots", "sweeps", "threshold", "trials"};
    if (!sweepable.count(grid.parameter))
        throw config_error("sweep_parameter: not a sweepable field: " + grid.parameter);
    if (!j.contains("sweep_values") || !j.at("sweep_values").is_array() || j.at("sweep_values").empty())
        throw config_error("sweep_values: must be a nonempty array of numbers");
    for (const auto& v : j.at("sweep_values")) {
        if (!v.is_number()) throw config_error("sweep_values: must be numbers");
        grid.values.push_back(v.get<double>());
    }
    nlohmann::json base = j;
    base.erase("sweep_parameter");
    base.erase("sweep_values");
    return {detail::spec_from_json(base), grid};
}

/// Apply one grid point to a spec.
inline ExperimentSpec apply_sweep_value(ExperimentSpec spec, const SweepGrid& grid, double value) {
    if (grid.parameter == "feedback_bits") spec.feedback_bits = static_cast<int>(value);
    else if (grid.parameter == "n_transmitters") spec.n_transmitters = static_cast<std::size_t>(value);
    else if (grid.parameter == "delta_max") spec.delta_max = value;
    else if (grid.parameter == "max_slots") spec.max_slots = static_cast<int>(value);
    else if (grid.parameter == "sweeps") spec.sweeps = static_cast<int>(value);
    else if (grid.parameter == "threshold") spec.threshold = value;
    else if (grid.parameter == "trials") spec.trials = static_cast<int>(value);
    else throw config_error("sweep_parameter: not a sweepable field: " + grid.parameter);
    spec.validate();
    return spec;
}

/// CSV trace dump: header `trial,algorithm,slot,rss,normalized_rss`, one row
/// per slot record, rows ordered by (trial, slot), LF line endings.
inline void write_trace_csv(const std::vector<ConvergenceTrace>& traces, std::ostream& out) {
    out << "trial,algorithm,slot,rss,normalized_rss\n";
    for (const auto& trace : traces) {
        for (const auto& rec : trace.slots) {
            out << trace.trial_index << ',' << trace.algorithm << ',' << rec.slot << ','
                << format_sig12(rec.rss) << ',' << format_sig12(rec.normalized_rss) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write_trace_csv: sink write failure");
}

inline nlohmann::json traces_json(const std::vector<ConvergenceTrace>& traces) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& trace : traces) {
        nlohmann::json slots = nlohmann::json::array();
        for (const auto& rec : trace.slots)
            slots.push_back({{"slot", rec.slot}, {"rss", rec.rss}, {"normalized_rss", rec.normalized_rss}});
        arr.push_back({{"trial", trace.trial_index},
                       {"algorithm", trace.algorithm},
                       {"seed", trace.seed},
                       {"slots", std::move(slots)}});
    }
    return nlohmann::json{{"traces", std::move(arr)}};
}

inline nlohmann::json aggregate_json(const Aggregate& agg) {
    nlohmann::json j{
        {"trials", agg.trials},
        {"fraction_reached", agg.fraction_reached},
        {"mean_final_normalized_rss", agg.mean_final},
        {"median_final_normalized_rss", agg.median_final},
        {"std_final_normalized_rss", agg.std_final},
    };
    if (std::isnan(agg.mean_slots)) {
        j["mean_slots_to_threshold"] = nullptr;
        j["median_slots_to_threshold"] = nullptr;
        j["std_slots_to_threshold"] = nullptr;
    } else {
        j["mean_slots_to_threshold"] = agg.mean_slots;
        j["median_slots_to_threshold"] = agg.median_slots;
        j["std_slots_to_threshold"] = agg.std_slots;
    }
    return j;
}

inline nlohmann::json summary_json(const ExperimentSpec& spec, const ExperimentResult& result) {
    nlohmann::json trials = nlohmann::json::array();
    for (std::size_t t = 0; t < result.summaries.size(); ++t) {
        const auto& s = result.summaries[t];
        nlohmann::json row{{"trial", t},
                           {"final_normalized_rss", s.final_normalized_rss},
                           {"total_slots", s.total_slots}};
        if (s.slots_to_threshold) row["slots_to_threshold"] = *s.slots_to_threshold;
        else row["slots_to_threshold"] = nullptr;
        trials.push_back(std::move(row));
    }
    return nlohmann::json{{"config", serialize_config(spec)},
                          {"aggregate", aggregate_json(result.aggregate)},
                          {"trials", std::move(trials)},
                          {"errors", result.errors}};
}

} // namespace phasealign

#endif
