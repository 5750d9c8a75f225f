// Copyright 2026 The qfi-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qfilab/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using qfilab::cli::run;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("qfilab_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> lines;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    }
    return lines;
}

}  // namespace

TEST(Cli, QfiPrintsClosedForm) {
    const auto r = invoke({"qfi", "--protocol", "optimal", "--A", "3.7699", "--omega", "6.2832", "--T", "1.0"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("1.44"), std::string::npos) << r.out;
}

TEST(Cli, QfiTableOnRequest) {
    const auto dir = fresh_dir("qfi");
    const auto r = invoke({"qfi", "--protocol", "uncontrolled", "--T", "2", "--out", dir.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(data_lines(slurp(dir / "qfi.csv")).size(), 2u);
}

TEST(Cli, LandscapeShape) {
    const auto dir = fresh_dir("landscape");
    const auto r = invoke({"sweep-landscape", "--T", "1.25", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = data_lines(slurp(dir / "landscape.csv"));
    ASSERT_EQ(lines.size(), 1u + 41u * 41u);
    EXPECT_EQ(lines[0], "omega_c,delta_theta,qfi");
}

TEST(Cli, SchemasMatchContract) {
    const auto dir = fresh_dir("schemas");
    ASSERT_EQ(invoke({"sweep-sensitivity", "--noiseless", "--T-count", "4", "--out", dir.string()}).code, 0);
    ASSERT_EQ(invoke({"phase-noise", "--N-min", "100", "--N-max", "1000", "--N-count", "3", "--repetitions", "50",
                      "--out", dir.string()})
                  .code,
              0);
    ASSERT_EQ(invoke({"adapt", "--ideal", "--rounds", "3", "--N", "100", "--out", dir.string()}).code, 0);
    ASSERT_EQ(invoke({"compare-rabi", "--out", dir.string()}).code, 0);
    ASSERT_EQ(invoke({"amplitude", "--out", dir.string()}).code, 0);
    EXPECT_EQ(data_lines(slurp(dir / "sensitivity.csv"))[0], "T,slope,slope_stderr,sensitivity,qfi,protocol");
    EXPECT_EQ(data_lines(slurp(dir / "phase_noise.csv"))[0], "N,stddev_phase");
    EXPECT_EQ(data_lines(slurp(dir / "adaptive.csv"))[0], "n,T_n,I_n,omega_est,delta_omega");
    EXPECT_EQ(data_lines(slurp(dir / "adaptive.csv")).size(), 5u);
    EXPECT_EQ(data_lines(slurp(dir / "rabi.csv"))[0], "T,rabi_qfi,controlled_qfi,uncontrolled_qfi");
    EXPECT_EQ(data_lines(slurp(dir / "amplitude.csv"))[0],
              "T,slope_uncontrolled,slope_node,sensitivity_uncontrolled,sensitivity_node");
    const std::string head = slurp(dir / "sensitivity.csv").substr(0, 40);
    EXPECT_EQ(head.rfind("# table: sensitivity\n# config_hash: ", 0), 0u);
}

TEST(Cli, CsvRoundTripsValues) {
    const auto dir = fresh_dir("roundtrip");
    ASSERT_EQ(invoke({"compare-rabi", "--T-min", "1", "--T-max", "3", "--T-count", "3", "--out", dir.string()}).code, 0);
    const auto lines = data_lines(slurp(dir / "rabi.csv"));
    ASSERT_EQ(lines.size(), 4u);
    const double A = qfilab::kTwoPi * 0.6;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const double T = qfilab::parse_double(lines[i].substr(0, lines[i].find(',')));
        const auto c1 = lines[i].find(',') + 1;
        const double rabi = qfilab::parse_double(lines[i].substr(c1, lines[i].find(',', c1) - c1));
        EXPECT_EQ(T, static_cast<double>(i));
        EXPECT_EQ(rabi, qfilab::rabi_qfi(A, T));
    }
}

TEST(Cli, JsonFormat) {
    const auto dir = fresh_dir("json");
    ASSERT_EQ(invoke({"amplitude", "--format", "json", "--T-count", "5", "--out", dir.string()}).code, 0);
    const auto j = nlohmann::json::parse(slurp(dir / "amplitude.json"));
    EXPECT_EQ(j["table"], "amplitude");
    EXPECT_EQ(j["rows"].size(), 5u);
    EXPECT_EQ(j["columns"][2], "slope_node");
}

TEST(Cli, MalformedConfigNamesKey) {
    const auto dir = fresh_dir("badconfig");
    const fs::path cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"({"A": 3.0, "bogus": 1})";
    const auto r = invoke({"qfi", "--config", cfg.string()});
    EXPECT_EQ(r.code, 2);
    const auto j = nlohmann::json::parse(r.err);
    EXPECT_EQ(j["error"], "config");
    EXPECT_EQ(j["key"], "bogus");

    std::ofstream(cfg, std::ios::trunc) << R"({"T": "long"})";
    const auto r2 = invoke({"qfi", "--config", cfg.string()});
    EXPECT_EQ(r2.code, 2);
    EXPECT_EQ(nlohmann::json::parse(r2.err)["key"], "T");

    const auto r3 = invoke({"qfi", "--T", "-1"});
    EXPECT_EQ(r3.code, 2);
    EXPECT_EQ(nlohmann::json::parse(r3.err)["key"], "T");

    const auto r4 = invoke({"qfi", "--nope", "1"});
    EXPECT_EQ(r4.code, 2);
}

TEST(Cli, FlagsOverrideConfigFile) {
    const auto dir = fresh_dir("override");
    const fs::path cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"({"protocol": "optimal", "A": 3.7699, "omega": 6.2832, "T": 5.0})";
    const auto r = invoke({"qfi", "--config", cfg.string(), "--T", "1.0"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("T=1 us: 1.44"), std::string::npos) << r.out;
}

TEST(Cli, RuntimeErrorExitsOne) {
    // Rabi drive at ω − optimal detuning is negative for this slow signal.
    const auto r = invoke({"qfi", "--protocol", "rabi", "--omega", "0.5", "--T", "10"});
    EXPECT_EQ(r.code, 1) << r.err;
    EXPECT_TRUE(nlohmann::json::parse(r.err).contains("error"));
}

TEST(Cli, HelpCoversEveryFlag) {
    for (const auto& cmd : qfilab::cli::commands()) {
        const auto r = invoke({cmd.name, "--help"});
        EXPECT_EQ(r.code, 0);
        for (const auto& key : cmd.keys) EXPECT_NE(r.out.find("--" + key), std::string::npos) << cmd.name << " " << key;
    }
}

TEST(Cli, ByteIdenticalAcrossThreadCounts) {
    std::string reference;
    for (const char* threads : {"1", "3", "1"}) {
        const auto dir = fresh_dir(std::string("threads") + threads);
        ASSERT_EQ(invoke({"sweep-landscape", "--N", "200", "--freq-points", "7", "--phase-points", "5", "--seed", "9",
                          "--threads", threads, "--out", dir.string()})
                      .code,
                  0);
        const auto text = slurp(dir / "landscape.csv");
        if (reference.empty()) reference = text;
        EXPECT_EQ(text, reference) << threads;
    }
}

TEST(Cli, SeedChangesSampledOutput) {
    const auto a = fresh_dir("seed_a"), b = fresh_dir("seed_b");
    ASSERT_EQ(invoke({"phase-noise", "--N-count", "3", "--repetitions", "30", "--seed", "1", "--out", a.string()}).code,
              0);
    ASSERT_EQ(invoke({"phase-noise", "--N-count", "3", "--repetitions", "30", "--seed", "2", "--out", b.string()}).code,
              0);
    EXPECT_NE(slurp(a / "phase_noise.csv"), slurp(b / "phase_noise.csv"));
}

#ifdef QFI_LAB_EXE
TEST(Cli, ExecutableExitCodes) {
    const auto dir = fresh_dir("exe");
    const std::string exe = QFI_LAB_EXE;
    const std::string quiet = " > " + (dir / "o.txt").string() + " 2> " + (dir / "e.txt").string();
    int status = std::system((exe + " qfi --T 1" + quiet).c_str());
    EXPECT_EQ(WEXITSTATUS(status), 0);
    status = std::system((exe + " qfi --T abc" + quiet).c_str());
    EXPECT_EQ(WEXITSTATUS(status), 2);
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "e.txt"))["key"], "T");
}
#endif
