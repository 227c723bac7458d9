// phasealign: CLI benchmark harness for adaptive distributed beamforming.
//
// Subcommands:
//   run      one experiment -> trace file + summary JSON
//   compare  paired-seed DDSA vs one-bit -> both summaries + comparison table
//   sweep    grid over one config field -> one summary row per point
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 numeric error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "phasealign/phasealign.hpp"

namespace fs = std::filesystem;
using namespace phasealign;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_io = 2;
constexpr int exit_numeric = 3;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open output file: " + path.string());
    out << contents;
    if (!out) throw std::ios_base::failure("write failure: " + path.string());
}

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::string out_path;
    std::string format = "csv";
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_format) {
    cmd->add_option("--config", opt.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opt.seed_override, "override master_seed from the config");
    cmd->add_option("--out", opt.out_path, "output path")->required();
    if (with_format)
        cmd->add_option("--format", opt.format, "trace format")
            ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--quiet", opt.quiet, "suppress progress output");
}

int cmd_run(const CommonOptions& opt) {
    ExperimentSpec spec = parse_config(read_file(opt.config_path));
    if (opt.seed_override) spec.master_seed = *opt.seed_override;
    spec.validate();

    const ExperimentResult result = run_experiment(spec, /*keep_traces=*/true);

    std::string trace_text;
    if (opt.format == "csv") {
        std::ostringstream ss;
        write_trace_csv(result.traces, ss);
        trace_text = ss.str();
    } else {
        trace_text = traces_json(result.traces).dump(2) + "\n";
    }
    write_file(opt.out_path, trace_text);
    write_file(opt.out_path + ".summary.json", summary_json(spec, result).dump(2) + "\n");

    if (!opt.quiet) {
        std::cout << "trials: " << result.aggregate.trials
                  << "  fraction_reached: " << result.aggregate.fraction_reached
                  << "  mean_final_normalized_rss: " << result.aggregate.mean_final << "\n";
        for (const auto& err : result.errors) std::cerr << "warning: " << err << "\n";
    }
    return result.errors.empty() ? exit_ok : exit_numeric;
}

int cmd_compare(const CommonOptions& opt) {
    ExperimentSpec base = parse_config(read_file(opt.config_path));
    if (opt.seed_override) base.master_seed = *opt.seed_override;

    ExperimentSpec ddsa_spec = base;
    ddsa_spec.algorithm = Algorithm::ddsa;
    ExperimentSpec onebit_spec = base;
    onebit_spec.algorithm = Algorithm::onebit;
    ddsa_spec.validate();
    onebit_spec.validate();

    const ExperimentResult ddsa_result = run_experiment(ddsa_spec, /*keep_traces=*/false);
    const ExperimentResult onebit_result = run_experiment(onebit_spec, /*keep_traces=*/false);

    fs::create_directories(opt.out_path);
    const fs::path dir(opt.out_path);
    write_file(dir / "ddsa_summary.json", summary_json(ddsa_spec, ddsa_result).dump(2) + "\n");
    write_file(dir / "onebit_summary.json", summary_json(onebit_spec, onebit_result).dump(2) + "\n");

    // paired comparison: a trial is a DDSA win when DDSA reached the
    // threshold and one-bit either did not or needed more slots
    std::ostringstream table;
    table << "trial,ddsa_slots,onebit_slots,ddsa_final,onebit_final,ddsa_win\n";
    const std::size_t pairs = std::min(ddsa_result.summaries.size(), onebit_result.summaries.size());
    int wins = 0;
    for (std::size_t t = 0; t < pairs; ++t) {
        const auto& d = ddsa_result.summaries[t];
        const auto& o = onebit_result.summaries[t];
        const bool win = d.slots_to_threshold &&
                         (!o.slots_to_threshold || *d.slots_to_threshold < *o.slots_to_threshold);
        wins += win ? 1 : 0;
        table << t << ',';
        if (d.slots_to_threshold) table << *d.slots_to_threshold;
        table << ',';
        if (o.slots_to_threshold) table << *o.slots_to_threshold;
        table << ',' << format_sig12(d.final_normalized_rss) << ','
              << format_sig12(o.final_normalized_rss) << ',' << (win ? 1 : 0) << '\n';
    }
    write_file(dir / "comparison.csv", table.str());

    const double win_fraction = pairs ? static_cast<double>(wins) / static_cast<double>(pairs) : 0.0;
    nlohmann::json comp{{"pairs", pairs},
                        {"ddsa_wins", wins},
                        {"ddsa_win_fraction", win_fraction},
                        {"threshold", base.threshold}};
    write_file(dir / "compare_summary.json", comp.dump(2) + "\n");

    if (!opt.quiet)
        std::cout << "pairs: " << pairs << "  ddsa_win_fraction: " << win_fraction << "\n";
    const bool had_errors = !ddsa_result.errors.empty() || !onebit_result.errors.empty();
    return had_errors ? exit_numeric : exit_ok;
}

int cmd_sweep(const CommonOptions& opt) {
    auto [base, grid] = parse_sweep_config(read_file(opt.config_path));
    if (opt.seed_override) base.master_seed = *opt.seed_override;

    std::ostringstream csv;
    csv << "parameter,value,trials,fraction_reached,mean_slots_to_threshold,"
           "mean_final_normalized_rss,std_final_normalized_rss\n";
    nlohmann::json points = nlohmann::json::array();
    for (double value : grid.values) {
        const ExperimentSpec spec = apply_sweep_value(base, grid, value);
        const ExperimentResult result = run_experiment(spec, /*keep_traces=*/false);
        const Aggregate& agg = result.aggregate;
        csv << grid.parameter << ',' << format_sig12(value) << ',' << agg.trials << ','
            << format_sig12(agg.fraction_reached) << ',';
        if (!std::isnan(agg.mean_slots)) csv << format_sig12(agg.mean_slots);
        csv << ',' << format_sig12(agg.mean_final) << ',' << format_sig12(agg.std_final) << '\n';
        nlohmann::json point{{"parameter", grid.parameter}, {"value", value}};
        point["aggregate"] = aggregate_json(agg);
        point["errors"] = result.errors;
        points.push_back(std::move(point));
        if (!opt.quiet)
            std::cout << grid.parameter << "=" << value
                      << "  mean_final_normalized_rss: " << agg.mean_final << "\n";
    }

    if (opt.format == "csv")
        write_file(opt.out_path, csv.str());
    else
        write_file(opt.out_path, nlohmann::json{{"points", std::move(points)}}.dump(2) + "\n");
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phasealign: adaptive distributed beamforming benchmark harness"};
    app.require_subcommand(1);

    CommonOptions run_opt, compare_opt, sweep_opt;
    CLI::App* run = app.add_subcommand("run", "run one experiment");
    add_common(run, run_opt, /*with_format=*/true);
    CLI::App* compare = app.add_subcommand("compare", "paired DDSA vs one-bit comparison");
    add_common(compare, compare_opt, /*with_format=*/false);
    CLI::App* sweep = app.add_subcommand("sweep", "grid sweep over one config field");
    add_common(sweep, sweep_opt, /*with_format=*/true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_validation;
    }

    try {
        if (run->parsed()) return cmd_run(run_opt);
        if (compare->parsed()) return cmd_compare(compare_opt);
        return cmd_sweep(sweep_opt);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
}
