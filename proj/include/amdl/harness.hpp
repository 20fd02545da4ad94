#pragma once
//
// Experiment plumbing: family-based instance construction, algorithm
// dispatch, multi-trial runs with per-trial seeds, CSV records, grid sweeps
// and pivoted plot data.
//

#include "amdl/active_dd.hpp"
#include "amdl/complexity.hpp"
#include "amdl/config.hpp"
#include "amdl/hedge.hpp"
#include "amdl/instance_io.hpp"
#include "amdl/instances.hpp"
#include "amdl/rpu.hpp"
#include "amdl/stats.hpp"

#include <json.hpp>

#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace amdl {

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal form; identical bytes for identical doubles.
inline std::string formatReal(double v) {
    if (std::isnan(v)) return "nan";
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    require(ec == std::errc(), "number formatting failed");
    return std::string(buf.data(), ptr);
}

inline std::vector<std::string> splitLine(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

/// Parameters flattened as `key=value;key=value` in key order. Used as the
/// cell label in sweep output, which therefore never contains a comma.
inline std::string paramsLabel(const nlohmann::json& params) {
    std::string out;
    for (auto it = params.begin(); it != params.end(); ++it) {
        if (!out.empty()) out += ';';
        out += it.key() + '=';
        const auto& v = it.value();
        if (v.is_string()) out += v.get<std::string>();
        else if (v.is_number_float()) out += formatReal(v.get<double>());
        else out += v.dump();
    }
    return out;
}

inline InstanceFile makeFamilyInstance(const std::string& family, const nlohmann::json& params) {
    auto num = [&](const char* key) {
        if (!params.contains(key) || !params.at(key).is_number()) throw contract_error(family + " needs numeric parameter '" + key + "'");
        return params.at(key).get<double>();
    };
    auto count = [&](const char* key) {
        const double v = num(key);
        if (v < 0.0 || v != std::floor(v)) throw contract_error(family + " parameter '" + key + "' must be a non-negative integer");
        return static_cast<std::size_t>(v);
    };

    InstanceFile file{genProp1<double>(1, 0.5), {}, family, params};
    if (family == "prop1") {
        file.instance = genProp1<double>(count("k"), num("eps"));
    } else if (family == "star-lb") {
        file.instance = genStarLb<double>(count("k"), count("theta"), count("i"), count("j"));
    } else if (family == "agnostic-lb") {
        std::optional<std::size_t> flipped;
        if (params.contains("flipped") && !params.at("flipped").is_null()) flipped = count("flipped");
        file.instance = genAgnosticLb<double>(count("k"), num("nu"), num("eps"), flipped);
    } else if (family == "example1") {
        const std::string which = params.contains("case") ? params.at("case").get<std::string>() : "a";
        if (which != "a" && which != "b") throw contract_error("example1 case must be 'a' or 'b'");
        file.instance = genExample1<double>(num("nu_prime"), num("eps"), which == "a" ? Example1Case::a : Example1Case::b);
    } else if (family == "random") {
        file.instance = genRandom(count("m"), count("hypotheses"), count("k"), count("seed"));
    } else {
        throw contract_error("unknown family '" + family + "'");
    }
    file.id = family + ":" + paramsLabel(params);
    return file;
}

// ---------------------------------------------------------------------------
// Complexity summary
// ---------------------------------------------------------------------------

struct InstanceSummary {
    double nu = 0.0;
    std::size_t best = 0;
    VcResult vc;
    StarResult star;
};

inline InstanceSummary summarize(const Instance& inst) {
    InstanceSummary s;
    const auto best = bestNu(inst);
    s.nu = best.nu;
    s.best = best.index;
    s.vc = vcDimension(inst.hypotheses());
    s.star = starNumber(inst.hypotheses());
    return s;
}

/// Flat key/value report of the exact complexity parameters. The
/// disagreement coefficients are taken around the best hypothesis.
inline std::vector<std::pair<std::string, std::string>> measureReport(const InstanceFile& file, double r0) {
    const auto& inst = file.instance;
    const auto s = summarize(inst);
    const auto& ref = inst.hypotheses()[s.best];
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("instance_id", file.id);
    out.emplace_back("m", std::to_string(inst.domainSize()));
    out.emplace_back("hypotheses", std::to_string(inst.hypotheses().size()));
    out.emplace_back("k", std::to_string(inst.k()));
    out.emplace_back("nu", formatReal(s.nu));
    out.emplace_back("best_hypothesis", std::to_string(s.best));
    out.emplace_back("vc_dimension", (s.vc.atLeast ? ">=" : "") + std::to_string(s.vc.value));
    out.emplace_back("star_number", (s.star.lowerBoundOnly ? ">=" : "") + std::to_string(s.star.value));
    out.emplace_back("star_number_best", std::to_string(starNumber(inst.hypotheses(), ref).value));
    out.emplace_back("r0", formatReal(r0));
    for (std::size_t i = 0; i < inst.k(); ++i)
        out.emplace_back("theta_" + std::to_string(i), formatReal(disagreementCoefficient(inst.distribution(i), inst.hypotheses(), ref, r0)));
    out.emplace_back("theta_max", formatReal(thetaMax(inst, ref, r0)));
    out.emplace_back("theta_average", formatReal(disagreementCoefficient(averageDistribution(inst), inst.hypotheses(), ref, r0)));
    return out;
}

// ---------------------------------------------------------------------------
// Single trial
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& algorithmTags() {
    static const std::vector<std::string> tags{"active-dd-large", "active-dd-small", "active-dd-auto",
                                               "active-df",       "passive-hedge",   "passive-naive"};
    return tags;
}

inline bool knownAlgorithm(const std::string& tag) {
    const auto& tags = algorithmTags();
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

/// Runs one algorithm once on a fresh OracleSet. The result always carries
/// the ledger, even on failure.
inline ActiveRunResult runAlgorithm(const std::string& alg, OracleSet& oracles, double eps, double delta, double nu,
                                    const LearnerContext& ctx) {
    const auto& inst = oracles.instance();
    if (alg == "active-dd-large") return activeLargeEps(oracles, eps, delta, ctx);
    if (alg == "active-dd-small") return activeSmallEps(oracles, eps, delta, nu, ctx);
    if (alg == "active-dd-auto") return regimeDispatch(oracles, eps, delta, ctx);
    if (alg == "active-df") return activeDistFree(oracles, eps, delta, ctx);
    ActiveRunResult result;
    if (alg == "passive-hedge") {
        result.branch = "passive";
        SolverConfig cfg{eps, delta, nu, ctx.knobs};
        auto hedge = mdlHedgeVc(inst.hypotheses(), fullVersionSpace(inst.hypotheses()), inst.k(), plainSampler(oracles),
                                cfg, ctx.vcDim, ctx.keepHedgeTrace);
        result.hedgeTrace = std::move(hedge.trace);
        result.output = std::move(hedge.output);
        result.randomized = true;
    } else if (alg == "passive-naive") {
        result.branch = "passive";
        SolverConfig cfg{eps, delta, nu, ctx.knobs};
        auto naive = naiveErmBaseline(inst.hypotheses(), inst.k(), plainSampler(oracles), cfg, ctx.vcDim);
        result.output = RandomizedHypothesis::pure(naive.output);
    } else {
        throw contract_error("unknown algorithm '" + alg + "'");
    }
    result.ledger = oracles.ledger();
    return result;
}

struct TrialRecord {
    std::string instanceId;
    std::string family;
    std::string alg;
    double eps = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t labelsTotal = 0;
    std::vector<std::uint64_t> labelsPerDist;
    std::uint64_t unlabeled = 0;
    double achievedErr = std::numeric_limits<double>::quiet_NaN();
    double nu = 0.0;
    bool success = false;
    FailureMode failure = FailureMode::none;
    double wallMs = 0.0;
};

inline constexpr const char* kRecordHeader =
    "instance_id,family,alg,eps,delta,seed,labels_total,labels_per_dist,unlabeled,achieved_err,nu,success,failure_mode,wall_ms";

inline std::string toCsvRow(const TrialRecord& r) {
    std::string perDist;
    for (std::size_t i = 0; i < r.labelsPerDist.size(); ++i) {
        if (i) perDist += ';';
        perDist += std::to_string(r.labelsPerDist[i]);
    }
    std::ostringstream os;
    os << r.instanceId << ',' << r.family << ',' << r.alg << ',' << formatReal(r.eps) << ',' << formatReal(r.delta) << ','
       << r.seed << ',' << r.labelsTotal << ',' << perDist << ',' << r.unlabeled << ',' << formatReal(r.achievedErr) << ','
       << formatReal(r.nu) << ',' << (r.success ? 1 : 0) << ',' << to_string(r.failure) << ',' << formatReal(r.wallMs);
    return os.str();
}

inline bool successful(double achieved, double nu, double eps) { return achieved <= nu + eps + 1e-12; }

// ---------------------------------------------------------------------------
// Multi-trial runs
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string alg = "active-dd-auto";
    double eps = 0.1;
    double delta = 0.1;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    Knobs knobs = deskProfile();
    std::size_t workers = 1;
    std::string traceDir; // empty: no traces
    bool timing = false;
};

struct TrialOutcome {
    TrialRecord record;
    ActiveRunResult result;
};

struct RunOutput {
    std::vector<TrialOutcome> trials;
    InstanceSummary summary;
};

namespace detail {

inline void writeTraces(const std::string& dir, const RunConfig& cfg, const std::vector<TrialOutcome>& trials) {
    std::filesystem::create_directories(dir);
    const bool df = cfg.alg == "active-df";
    std::ofstream epochs(std::filesystem::path(dir) / "epochs.csv");
    epochs << (df ? "trial,epoch,eps_n,abstain_mass_max,rounds_used,labels_this_epoch\n"
                  : "trial,epoch,eps_n,v_size,max_dis_mass,passive_samples,labels_this_epoch\n");
    std::ofstream transcript(std::filesystem::path(dir) / "transcript.csv");
    transcript << "trial,i,x,y,cumulative_label_count\n";
    std::ofstream hedge(std::filesystem::path(dir) / "hedge.csv");
    hedge << "trial,round,played,wbar_norm,store_size,reward_draws\n";
    for (std::size_t t = 0; t < trials.size(); ++t) {
        const auto& r = trials[t].result;
        for (const auto& e : r.epochs)
            epochs << t << ',' << e.epoch << ',' << formatReal(e.epsN) << ',' << e.vSize << ',' << formatReal(e.maxDisMass)
                   << ',' << e.passiveSamples << ',' << e.labels << '\n';
        for (const auto& e : r.dfEpochs)
            epochs << t << ',' << e.epoch << ',' << formatReal(e.epsN) << ',' << formatReal(e.abstainMassMax) << ','
                   << e.roundsUsed << ',' << e.labels << '\n';
        for (const auto& q : r.ledger.transcript())
            transcript << t << ',' << q.distribution << ',' << q.x << ',' << static_cast<int>(q.y) << ','
                       << q.cumulativeLabels << '\n';
        for (const auto& h : r.hedgeTrace)
            hedge << t << ',' << h.round << ',' << h.played << ',' << formatReal(h.wBarNorm) << ',' << h.storeSize << ','
                  << h.rewardDraws << '\n';
    }
}

} // namespace detail

/// Runs cfg.trials independent trials with seeds cfg.seed + t. Trials may run
/// on several worker threads; the output order is always by trial index.
inline RunOutput runTrials(const InstanceFile& file, const RunConfig& cfg,
                           std::optional<InstanceSummary> precomputed = std::nullopt) {
    require(cfg.trials >= 1, "need at least one trial");
    require(knownAlgorithm(cfg.alg), "unknown algorithm '" + cfg.alg + "'");
    cfg.knobs.validate();
    const Instance& inst = file.instance;

    RunOutput out;
    out.summary = precomputed ? *precomputed : summarize(inst);
    const double nu = out.summary.nu;
    LearnerContext ctx;
    ctx.knobs = cfg.knobs;
    ctx.vcDim = out.summary.vc.value;
    ctx.starNumber = out.summary.star.value;
    ctx.keepHedgeTrace = !cfg.traceDir.empty();

    out.trials.resize(cfg.trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < cfg.trials; t = next++) {
            const std::uint64_t seed = cfg.seed + t;
            const auto start = std::chrono::steady_clock::now();
            OracleSet oracles(inst, seed, !cfg.traceDir.empty());
            TrialOutcome outcome;
            try {
                outcome.result = runAlgorithm(cfg.alg, oracles, cfg.eps, cfg.delta, nu, ctx);
            } catch (const degenerate_agreement&) {
                outcome.result.failure = FailureMode::degenerate_agreement;
                outcome.result.ledger = oracles.ledger();
            }
            const auto stop = std::chrono::steady_clock::now();

            auto& r = outcome.record;
            r.instanceId = file.id;
            r.family = file.family.empty() ? "file" : file.family;
            r.alg = cfg.alg;
            r.eps = cfg.eps;
            r.delta = cfg.delta;
            r.seed = seed;
            r.labelsPerDist = outcome.result.ledger.labelsPerDistribution();
            r.labelsTotal = outcome.result.ledger.totalLabels();
            r.unlabeled = outcome.result.ledger.totalUnlabeled();
            r.nu = nu;
            r.failure = outcome.result.failure;
            if (outcome.result.ok()) {
                r.achievedErr = worstLoss(*outcome.result.output, inst);
                r.success = successful(r.achievedErr, nu, cfg.eps);
            }
            if (cfg.timing) r.wallMs = std::chrono::duration<double, std::milli>(stop - start).count();

            std::uint64_t sum = 0;
            for (auto v : r.labelsPerDist) sum += v;
            require(sum == r.labelsTotal, "ledger totals disagree with per-distribution counts");
            out.trials[t] = std::move(outcome);
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.workers, cfg.trials));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (!cfg.traceDir.empty()) detail::writeTraces(cfg.traceDir, cfg, out.trials);
    return out;
}

inline std::string recordsCsv(const std::vector<TrialOutcome>& trials) {
    std::string out = std::string(kRecordHeader) + '\n';
    for (const auto& t : trials) out += toCsvRow(t.record) + '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------
//
// Grid config (JSON):
//   { "profile": "desk", "knobs": {"cT": 1e-5}, "trials": 50, "delta": 0.1,
//     "seed": 1, "workers": 1,
//     "cells": [ { "family": "star-lb", "params": {"k": 2, "theta": [4, 8], "i": 1, "j": 1},
//                  "algs": ["active-dd-large"], "eps": [0.2, 0.1] } ] }
// Array-valued params expand into a cartesian product.

inline constexpr const char* kSweepHeader =
    "family,params,alg,eps,delta,trials,status,mean_labels,median_labels,ci_low,ci_high,success_rate,mean_achieved_err,nu,failures";

struct SweepCell {
    std::string family;
    nlohmann::json params;
    std::string alg;
    double eps = 0.0;
};

inline std::vector<nlohmann::json> expandParams(const nlohmann::json& params) {
    std::vector<nlohmann::json> out{nlohmann::json::object()};
    for (auto it = params.begin(); it != params.end(); ++it) {
        std::vector<nlohmann::json> next;
        const auto values = it.value().is_array() ? it.value() : nlohmann::json::array({it.value()});
        for (const auto& base : out) {
            for (const auto& v : values) {
                auto p = base;
                p[it.key()] = v;
                next.push_back(std::move(p));
            }
        }
        out = std::move(next);
    }
    return out;
}

inline std::vector<SweepCell> expandGrid(const nlohmann::json& config) {
    std::vector<SweepCell> cells;
    if (!config.contains("cells")) return cells;
    for (const auto& c : config.at("cells")) {
        if (!c.contains("family") || !c.contains("algs") || !c.contains("eps"))
            throw schema_error("every sweep cell needs 'family', 'algs' and 'eps'");
        const auto params = c.contains("params") ? c.at("params") : nlohmann::json::object();
        for (const auto& p : expandParams(params))
            for (const auto& alg : c.at("algs"))
                for (const auto& eps : c.at("eps")) cells.push_back({c.at("family").get<std::string>(), p, alg.get<std::string>(), eps.get<double>()});
    }
    return cells;
}

struct SweepResult {
    std::string csv;                      // aggregated long format
    std::vector<TrialRecord> records;     // every trial, cell order then seed
};

inline SweepResult sweep(const nlohmann::json& config) {
    RunConfig base;
    base.knobs = profileByName(config.value("profile", std::string("desk")));
    if (config.contains("knobs"))
        for (auto it = config.at("knobs").begin(); it != config.at("knobs").end(); ++it)
            applyKnob(base.knobs, it.key() + "=" + (it.value().is_string() ? it.value().get<std::string>() : it.value().dump()));
    base.trials = config.value("trials", std::size_t{50});
    base.delta = config.value("delta", 0.1);
    base.seed = config.value("seed", std::uint64_t{1});
    base.workers = config.value("workers", std::size_t{1});

    SweepResult result;
    result.csv = std::string(kSweepHeader) + '\n';
    std::map<std::string, std::pair<InstanceFile, InstanceSummary>> cache;
    for (const auto& cell : expandGrid(config)) {
        const std::string label = paramsLabel(cell.params);
        std::ostringstream row;
        row << cell.family << ',' << label << ',' << cell.alg << ',' << formatReal(cell.eps) << ',' << formatReal(base.delta)
            << ',' << base.trials << ',';
        try {
            require(knownAlgorithm(cell.alg), "unknown algorithm '" + cell.alg + "'");
            require(cell.eps > 0.0 && cell.eps < 1.0, "eps must lie in (0,1)");
            const std::string key = cell.family + "|" + label;
            if (!cache.count(key)) {
                auto file = makeFamilyInstance(cell.family, cell.params);
                auto summary = summarize(file.instance);
                cache.emplace(key, std::make_pair(std::move(file), std::move(summary)));
            }
            const auto& [file, summary] = cache.at(key);
            RunConfig cfg = base;
            cfg.alg = cell.alg;
            cfg.eps = cell.eps;
            const auto out = runTrials(file, cfg, summary);
            std::vector<double> labels, errs;
            std::size_t successes = 0, failures = 0;
            for (const auto& t : out.trials) {
                labels.push_back(static_cast<double>(t.record.labelsTotal));
                if (t.record.success) ++successes;
                if (t.record.failure != FailureMode::none) ++failures;
                else errs.push_back(t.record.achievedErr);
                result.records.push_back(t.record);
            }
            const auto ci = bootstrapMeanCi(labels, base.seed);
            row << "ok," << formatReal(mean(labels)) << ',' << formatReal(median(labels)) << ',' << formatReal(ci.first) << ','
                << formatReal(ci.second) << ',' << formatReal(static_cast<double>(successes) / static_cast<double>(labels.size()))
                << ',' << formatReal(errs.empty() ? std::numeric_limits<double>::quiet_NaN() : mean(errs)) << ','
                << formatReal(summary.nu) << ',' << failures;
        } catch (const contract_error& e) {
            std::string reason = e.what();
            std::replace(reason.begin(), reason.end(), ',', ';');
            row << "skipped: " << reason << ",,,,,,,,";
        }
        result.csv += row.str() + '\n';
    }
    return result;
}

// ---------------------------------------------------------------------------
// Report: pivot a sweep CSV into per-figure series
// ---------------------------------------------------------------------------

struct ReportFiles {
    std::string labelsVsEps;
    std::string labelsVsK;
    std::string successVsEps;
};

inline ReportFiles report(const std::string& sweepCsv) {
    std::istringstream in(sweepCsv);
    std::string line;
    if (!std::getline(in, line)) throw schema_error("sweep CSV is empty");
    const auto header = splitLine(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* needed : {"family", "params", "alg", "eps", "status", "mean_labels", "success_rate"})
        if (!col.count(needed)) throw schema_error(std::string("sweep CSV is missing column '") + needed + "'");

    ReportFiles files;
    files.labelsVsEps = "family,params,alg,eps,mean_labels\n";
    files.labelsVsK = "family,params,alg,eps,k,mean_labels\n";
    files.successVsEps = "family,params,alg,eps,success_rate\n";
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = splitLine(line);
        if (f.size() != header.size()) throw schema_error("sweep CSV row has " + std::to_string(f.size()) + " fields, expected " + std::to_string(header.size()));
        if (f[col["status"]] != "ok") continue;
        const std::string cell = f[col["family"]] + ',' + f[col["params"]] + ',' + f[col["alg"]] + ',' + f[col["eps"]];
        files.labelsVsEps += cell + ',' + f[col["mean_labels"]] + '\n';
        files.successVsEps += cell + ',' + f[col["success_rate"]] + '\n';
        for (const auto& kv : splitLine(f[col["params"]], ';'))
            if (kv.rfind("k=", 0) == 0) files.labelsVsK += cell + ',' + kv.substr(2) + ',' + f[col["mean_labels"]] + '\n';
    }
    return files;
}

} // namespace amdl
