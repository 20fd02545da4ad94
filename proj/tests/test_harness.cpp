#include "amdl/harness.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace amdl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int countLines(const std::string& text) { return static_cast<int>(std::count(text.begin(), text.end(), '\n')); }

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("amdl-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
                                             ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

int runCli(const std::string& args) {
    const std::string cmd = std::string("\"") + AMDL_CLI_PATH + "\" " + args + " 2>/dev/null";
    return std::system(cmd.c_str());
}

RunConfig quick(const std::string& alg, double eps, std::size_t trials) {
    RunConfig cfg;
    cfg.alg = alg;
    cfg.eps = eps;
    cfg.trials = trials;
    cfg.seed = 7;
    return cfg;
}

} // namespace

TEST(Format, ShortestRoundTrip) {
    EXPECT_EQ(formatReal(0.1), "0.1");
    EXPECT_EQ(formatReal(3.0), "3");
    EXPECT_EQ(formatReal(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(splitLine("a,,b"), (std::vector<std::string>{"a", "", "b"}));
}

TEST(Families, IdsAreStableLabels) {
    const auto file = makeFamilyInstance("star-lb", nlohmann::json{{"k", 2}, {"theta", 4}, {"i", 1}, {"j", 2}});
    EXPECT_EQ(file.id, "star-lb:i=1;j=2;k=2;theta=4");
    EXPECT_EQ(file.instance.k(), 2u);
    EXPECT_THROW(makeFamilyInstance("nope", nlohmann::json::object()), contract_error);
    EXPECT_THROW(makeFamilyInstance("prop1", nlohmann::json{{"k", 2}}), contract_error);
    EXPECT_THROW(makeFamilyInstance("prop1", nlohmann::json{{"k", 2.5}, {"eps", 0.1}}), contract_error);
}

TEST(Measure, ReportsExactParameters) {
    const auto file = makeFamilyInstance("prop1", nlohmann::json{{"k", 4}, {"eps", 0.05}});
    std::map<std::string, std::string> kv;
    for (const auto& [k, v] : measureReport(file, 0.05)) kv[k] = v;
    EXPECT_EQ(kv["nu"], "0.05");
    EXPECT_EQ(kv["vc_dimension"], "1");
    EXPECT_EQ(kv["star_number"], "4");
    EXPECT_EQ(kv["theta_0"], "1");
    EXPECT_EQ(kv["theta_max"], "1");
}

TEST(Records, HeaderIsFixed) {
    EXPECT_STREQ(kRecordHeader,
                 "instance_id,family,alg,eps,delta,seed,labels_total,labels_per_dist,unlabeled,achieved_err,nu,success,"
                 "failure_mode,wall_ms");
    EXPECT_STREQ(kSweepHeader,
                 "family,params,alg,eps,delta,trials,status,mean_labels,median_labels,ci_low,ci_high,success_rate,"
                 "mean_achieved_err,nu,failures");
}

TEST(RunTrials, SeedsAndLedgerTotals) {
    const auto file = makeFamilyInstance("star-lb", nlohmann::json{{"k", 2}, {"theta", 4}, {"i", 1}, {"j", 2}});
    const auto out = runTrials(file, quick("active-dd-large", 0.2, 4));
    ASSERT_EQ(out.trials.size(), 4u);
    for (std::size_t t = 0; t < 4; ++t) {
        const auto& r = out.trials[t].record;
        EXPECT_EQ(r.seed, 7u + t);
        EXPECT_EQ(r.labelsPerDist.size(), 2u);
        EXPECT_EQ(r.labelsPerDist[0] + r.labelsPerDist[1], r.labelsTotal);
        EXPECT_EQ(r.wallMs, 0.0);
    }
    const auto csv = recordsCsv(out.trials);
    EXPECT_EQ(countLines(csv), 5);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kRecordHeader);
}

TEST(RunTrials, WorkerCountDoesNotChangeOutput) {
    const auto file = makeFamilyInstance("agnostic-lb", nlohmann::json{{"k", 2}, {"nu", 0.4}, {"eps", 0.05}});
    auto cfg = quick("active-dd-auto", 0.2, 6);
    const auto serial = recordsCsv(runTrials(file, cfg).trials);
    cfg.workers = 3;
    const auto parallel = recordsCsv(runTrials(file, cfg).trials);
    EXPECT_EQ(serial, parallel);
}

TEST(RunTrials, UnknownAlgorithmIsAContractError) {
    const auto file = makeFamilyInstance("prop1", nlohmann::json{{"k", 2}, {"eps", 0.05}});
    EXPECT_THROW(runTrials(file, quick("nope", 0.2, 1)), contract_error);
}

TEST(RunTrials, TracesCarryATrialColumn) {
    TempDir dir;
    const auto file = makeFamilyInstance("star-lb", nlohmann::json{{"k", 2}, {"theta", 4}, {"i", 1}, {"j", 2}});
    auto cfg = quick("active-dd-large", 0.2, 2);
    cfg.traceDir = dir.path().string();
    const auto out = runTrials(file, cfg);
    const auto epochs = slurp(dir.path() / "epochs.csv");
    EXPECT_EQ(epochs.substr(0, epochs.find('\n')), "trial,epoch,eps_n,v_size,max_dis_mass,passive_samples,labels_this_epoch");
    EXPECT_EQ(countLines(epochs), 1 + static_cast<int>(out.trials[0].result.epochs.size() + out.trials[1].result.epochs.size()));
    const auto transcript = slurp(dir.path() / "transcript.csv");
    EXPECT_EQ(countLines(transcript), 1 + static_cast<int>(out.trials[0].record.labelsTotal + out.trials[1].record.labelsTotal));
    EXPECT_TRUE(fs::exists(dir.path() / "hedge.csv"));
}

TEST(Sweep, EmptyGridGivesHeaderOnly) {
    const auto result = sweep(nlohmann::json{{"cells", nlohmann::json::array()}});
    EXPECT_EQ(result.csv, std::string(kSweepHeader) + "\n");
    EXPECT_TRUE(result.records.empty());
    EXPECT_EQ(sweep(nlohmann::json::object()).csv, std::string(kSweepHeader) + "\n");
}

TEST(Sweep, CartesianCellsAndSkippedRows) {
    const auto config = nlohmann::json::parse(R"({
        "trials": 2, "seed": 3,
        "cells": [
            {"family": "star-lb", "params": {"k": 2, "theta": [2, 4], "i": 1, "j": 1},
             "algs": ["active-dd-large"], "eps": [0.25]},
            {"family": "prop1", "params": {"k": 2, "eps": 0.05}, "algs": ["bogus"], "eps": [0.2]},
            {"family": "prop1", "params": {"k": 2, "eps": 0.05}, "algs": ["passive-naive"], "eps": [1.5]}
        ]})");
    const auto result = sweep(config);
    std::istringstream in(result.csv);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    std::getline(in, line);
    while (std::getline(in, line)) rows.push_back(splitLine(line));
    ASSERT_EQ(rows.size(), 4u);
    const std::size_t columns = splitLine(kSweepHeader).size();
    for (const auto& r : rows) EXPECT_EQ(r.size(), columns);
    EXPECT_EQ(rows[0][1], "i=1;j=1;k=2;theta=2");
    EXPECT_EQ(rows[1][1], "i=1;j=1;k=2;theta=4");
    EXPECT_EQ(rows[0][6], "ok");
    EXPECT_EQ(rows[2][6].rfind("skipped: ", 0), 0u);
    EXPECT_EQ(rows[3][6].rfind("skipped: ", 0), 0u);
    EXPECT_EQ(result.records.size(), 4u);
}

TEST(Sweep, MalformedCellIsASchemaError) {
    EXPECT_THROW(sweep(nlohmann::json::parse(R"({"cells": [{"family": "prop1"}]})")), schema_error);
}

TEST(Report, PivotsAFixture) {
    const std::string csv = std::string(kSweepHeader) + "\n" +
                            "star-lb,i=1;j=1;k=2;theta=8,active-dd-large,0.2,0.1,5,ok,100,90,80,120,1,0,0,0\n"
                            "star-lb,i=1;j=1;k=2;theta=8,active-dd-large,0.1,0.1,5,ok,200,190,180,220,0.8,0.01,0,0\n"
                            "prop1,eps=0.05;k=2,bogus,0.2,0.1,5,skipped: unknown,,,,,,,,\n";
    const auto files = report(csv);
    EXPECT_EQ(files.labelsVsEps,
              "family,params,alg,eps,mean_labels\n"
              "star-lb,i=1;j=1;k=2;theta=8,active-dd-large,0.2,100\n"
              "star-lb,i=1;j=1;k=2;theta=8,active-dd-large,0.1,200\n");
    EXPECT_EQ(files.successVsEps,
              "family,params,alg,eps,success_rate\n"
              "star-lb,i=1;j=1;k=2;theta=8,active-dd-large,0.2,1\n"
              "star-lb,i=1;j=1;k=2;theta=8,active-dd-large,0.1,0.8\n");
    EXPECT_EQ(countLines(files.labelsVsK), 3);
    EXPECT_NE(files.labelsVsK.find(",0.1,2,200\n"), std::string::npos);
}

TEST(Report, SchemaErrors) {
    EXPECT_THROW(report(""), schema_error);
    EXPECT_THROW(report("family,params,alg,eps\nx,y,z,0.1\n"), schema_error);
    EXPECT_THROW(report(std::string(kSweepHeader) + "\nstar-lb,k=2,alg,0.1\n"), schema_error);
}

TEST(Cli, RunIsByteIdenticalAcrossInvocations) {
    TempDir dir;
    const auto inst = (dir.path() / "inst.json").string();
    ASSERT_EQ(runCli("gen --family star-lb --param k=2 --param theta=4 --param i=2 --param j=3 --out " + inst), 0);
    const std::string common = " run --instance " + inst + " --alg active-dd-auto --eps 0.2 --trials 3 --seed 11 --out ";
    ASSERT_EQ(runCli(common + (dir.path() / "a.csv").string()), 0);
    ASSERT_EQ(runCli(common + (dir.path() / "b.csv").string() + " --workers 2"), 0);
    const auto a = slurp(dir.path() / "a.csv");
    EXPECT_EQ(countLines(a), 4);
    EXPECT_EQ(a, slurp(dir.path() / "b.csv"));
}

TEST(Cli, ErrorsExitNonZero) {
    TempDir dir;
    EXPECT_NE(runCli("run --instance " + (dir.path() / "missing.json").string()), 0);
    EXPECT_NE(runCli("gen --family nope"), 0);
    const auto bad = dir.path() / "bad.json";
    std::ofstream(bad) << R"({"m": 1, "hypotheses": [[1]]})";
    EXPECT_NE(runCli("measure --instance " + bad.string()), 0);
}

TEST(Cli, SweepAndReportRoundTrip) {
    TempDir dir;
    const auto cfg = dir.path() / "grid.json";
    std::ofstream(cfg) << R"({"trials": 2, "cells": [{"family": "prop1", "params": {"k": [2, 4], "eps": 0.05},
                             "algs": ["passive-naive"], "eps": [0.2]}]})";
    const auto out = dir.path() / "sweep.csv";
    ASSERT_EQ(runCli("sweep --config " + cfg.string() + " --out " + out.string()), 0);
    EXPECT_EQ(countLines(slurp(out)), 3);
    ASSERT_EQ(runCli("report --input " + out.string() + " --out " + (dir.path() / "rep").string()), 0);
    EXPECT_EQ(countLines(slurp(dir.path() / "rep" / "labels_vs_k.csv")), 3);
}
