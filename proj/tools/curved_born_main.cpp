// Command line front end: runs detection experiments from a JSON config and
// writes byte-stable JSON/CSV results.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvedborn/experiment.hpp"

namespace {

void write_or_print(const std::string &content, const std::string &out_dir,
                    const std::string &filename) {
    if (out_dir.empty()) {
        std::cout << content;
        return;
    }
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path path = std::filesystem::path(out_dir) / filename;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
    std::cout << "wrote " << path.string() << "\n";
}

std::vector<int> parse_m_list(const std::string &arg) {
    std::vector<int> ms;
    std::string token;
    for (char c : arg + ",") {
        if (c == ',') {
            if (!token.empty())
                ms.push_back(std::stoi(token));
            token.clear();
        } else {
            token += c;
        }
    }
    return ms;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"lattice detection experiments for the curved Born rule"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string suite_name = "all";
    std::string m_arg;
    bool retain = false;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--config", config_path, "experiment config file")->required();
        cmd->add_option("--out", out_dir, "output directory (default: stdout)");
    };

    CLI::App *geometry = app.add_subcommand("geometry", "dump the round decomposition");
    add_common(geometry);
    CLI::App *run = app.add_subcommand("run", "sequential detection run");
    add_common(run);
    run->add_flag("--retain-detected", retain,
                  "exploratory: keep detected particles instead of replacing them "
                  "with the vacuum");
    CLI::App *closed = app.add_subcommand("closed", "closed-form record probabilities");
    add_common(closed);
    CLI::App *born = app.add_subcommand("born", "curved Born pattern probabilities");
    add_common(born);
    CLI::App *bounds = app.add_subcommand("bounds", "bracketing bounds per pattern");
    add_common(bounds);
    CLI::App *sweep = app.add_subcommand("sweep", "bracket sweep over the m list");
    add_common(sweep);
    sweep->add_option("--m", m_arg, "comma separated m list (overrides the config)");
    CLI::App *trail = app.add_subcommand("trail", "undetected-region state checks");
    add_common(trail);
    CLI::App *verify = app.add_subcommand("verify", "axiom / theorem verification suite");
    add_common(verify);
    verify->add_option("--suite", suite_name, "axioms | theorem | all")
        ->check(CLI::IsMember({"axioms", "theorem", "all"}));

    CLI11_PARSE(app, argc, argv);

    try {
        cborn::ExperimentConfig config = cborn::load_config(config_path);
        if (retain)
            config.retain_detected = true;

        // with --out the files carry the machine JSON and the console gets
        // an aligned-column summary
        const bool to_files = !out_dir.empty();
        if (geometry->parsed()) {
            write_or_print(cborn::geometry_json(config), out_dir, "geometry.json");
        } else if (run->parsed()) {
            write_or_print(cborn::run_json(config), out_dir, "result.json");
            if (to_files)
                std::cout << cborn::pattern_table_text(config, config.ms);
        } else if (closed->parsed()) {
            write_or_print(cborn::closed_json(config), out_dir, "result.json");
        } else if (born->parsed()) {
            write_or_print(cborn::born_json(config), out_dir, "result.json");
        } else if (bounds->parsed()) {
            write_or_print(cborn::bounds_json(config), out_dir, "result.json");
            if (to_files)
                std::cout << cborn::pattern_table_text(config, config.ms);
        } else if (sweep->parsed()) {
            const std::vector<int> ms = m_arg.empty() ? config.ms : parse_m_list(m_arg);
            write_or_print(cborn::sweep_json(config, ms), out_dir, "result.json");
            write_or_print(cborn::sweep_csv(config, ms), out_dir, "sweep.csv");
            if (to_files)
                std::cout << cborn::pattern_table_text(config, ms);
        } else if (trail->parsed()) {
            write_or_print(cborn::trail_json(config), out_dir, "result.json");
        } else if (verify->parsed()) {
            cborn::SuiteKind kind = cborn::SuiteKind::all;
            if (suite_name == "axioms")
                kind = cborn::SuiteKind::axioms;
            else if (suite_name == "theorem")
                kind = cborn::SuiteKind::theorem;
            const cborn::SuiteOutcome outcome = cborn::run_suite(config, kind);
            write_or_print(outcome.report_json, out_dir, "report.json");
            return outcome.pass ? 0 : 1;
        }
    } catch (const std::exception &e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 0;
}
