// Command-line front end: gen, measure, run, sweep, report.

#include "amdl/amdl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string readAll(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw amdl::schema_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw amdl::schema_error("cannot write '" + path + "'");
    out << text;
}

// `--param k=4 --param eps=0.05`: numbers stay numbers, anything else is a string.
nlohmann::json parseParams(const std::vector<std::string>& assignments) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw amdl::contract_error("--param expects key=value, got '" + a + "'");
        const auto key = a.substr(0, eq);
        const auto value = a.substr(eq + 1);
        try {
            params[key] = nlohmann::json::parse(value);
        } catch (const nlohmann::json::parse_error&) {
            params[key] = value;
        }
    }
    return params;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active multi-distribution learning laboratory"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Write a canonical instance file for a constructed family");
    std::string family;
    std::vector<std::string> params;
    std::string genOut;
    gen->add_option("--family", family, "prop1 | star-lb | agnostic-lb | example1 | random")->required();
    gen->add_option("--param", params, "Family parameter key=value (repeatable)");
    gen->add_option("--out", genOut, "Output path (default stdout)");

    // measure
    auto* measure = app.add_subcommand("measure", "Exact nu, VC dimension, star number and disagreement coefficients");
    std::string measureInstance;
    double r0 = 0.05;
    std::string measureOut;
    measure->add_option("--instance", measureInstance, "Instance file")->required();
    measure->add_option("--r0", r0, "Radius for the disagreement coefficient");
    measure->add_option("--out", measureOut, "Output path (default stdout)");

    // run
    auto* run = app.add_subcommand("run", "Run trials of one algorithm on one instance");
    std::string runInstance;
    amdl::RunConfig cfg;
    std::string profile = "desk";
    std::vector<std::string> knobs;
    std::string runOut;
    run->add_option("--instance", runInstance, "Instance file")->required();
    run->add_option("--alg", cfg.alg, "Algorithm tag")->check(CLI::IsMember(amdl::algorithmTags()));
    run->add_option("--eps", cfg.eps, "Target excess error");
    run->add_option("--delta", cfg.delta, "Failure probability");
    run->add_option("--trials", cfg.trials, "Number of trials");
    run->add_option("--seed", cfg.seed, "Base seed; trial t uses seed + t");
    run->add_option("--profile", profile, "Knob profile: desk | fidelity");
    run->add_option("--knob", knobs, "Knob override key=value (repeatable)");
    run->add_option("--workers", cfg.workers, "Concurrent trial workers");
    run->add_option("--trace", cfg.traceDir, "Directory for epoch, transcript and hedge traces");
    run->add_flag("--timing", cfg.timing, "Record wall time (makes output non-deterministic)");
    run->add_option("--out", runOut, "Output CSV path (default stdout)");

    // sweep
    auto* sweepCmd = app.add_subcommand("sweep", "Run a grid of cells from a JSON config");
    std::string grid;
    std::string sweepOut;
    std::string recordsOut;
    sweepCmd->add_option("--config", grid, "Sweep config (JSON)")->required();
    sweepCmd->add_option("--out", sweepOut, "Aggregated CSV path (default stdout)");
    sweepCmd->add_option("--records", recordsOut, "Optional per-trial CSV path");

    // report
    auto* reportCmd = app.add_subcommand("report", "Pivot a sweep CSV into plot-ready series");
    std::string reportInput;
    std::string reportDir = ".";
    reportCmd->add_option("--input", reportInput, "Sweep CSV")->required();
    reportCmd->add_option("--out", reportDir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const auto file = amdl::makeFamilyInstance(family, parseParams(params));
            emit(genOut, amdl::toJson(file.instance, file.id, file.family, file.params).dump(2) + "\n");
        } else if (*measure) {
            const auto file = amdl::readInstanceFile(measureInstance);
            std::string text;
            for (const auto& [key, value] : amdl::measureReport(file, r0)) text += key + "=" + value + "\n";
            emit(measureOut, text);
        } else if (*run) {
            cfg.knobs = amdl::profileByName(profile);
            for (const auto& k : knobs) amdl::applyKnob(cfg.knobs, k);
            const auto file = amdl::readInstanceFile(runInstance);
            const auto out = amdl::runTrials(file, cfg);
            emit(runOut, amdl::recordsCsv(out.trials));
        } else if (*sweepCmd) {
            const auto config = nlohmann::json::parse(readAll(grid));
            const auto result = amdl::sweep(config);
            emit(sweepOut, result.csv);
            if (!recordsOut.empty()) {
                std::string text = std::string(amdl::kRecordHeader) + "\n";
                for (const auto& r : result.records) text += amdl::toCsvRow(r) + "\n";
                emit(recordsOut, text);
            }
        } else if (*reportCmd) {
            const auto files = amdl::report(readAll(reportInput));
            std::filesystem::create_directories(reportDir);
            const std::filesystem::path dir(reportDir);
            emit((dir / "labels_vs_eps.csv").string(), files.labelsVsEps);
            emit((dir / "labels_vs_k.csv").string(), files.labelsVsK);
            emit((dir / "success_vs_eps.csv").string(), files.successVsEps);
        }
    } catch (const std::exception& e) {
        std::cerr << "amdl: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
