// Copyright 2026 The awdl Authors
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

// awdl_tool: dissect captures, calibrate sniffer pairs, estimate sync error,
// and run simulator scenarios.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "awdl/analysis.hpp"
#include "awdl/dissect.hpp"
#include "awdl/pcap.hpp"
#include "awdl/sim.hpp"

namespace {

using namespace awdl;
using Json = dissect::Json;

constexpr int kExitOk = 0;
constexpr int kExitEmpty = 1;
constexpr int kExitUsage = 2;

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

Level logLevel() {
    const char* env = std::getenv("AWDL_LOG_LEVEL");
    if (!env) return Level::warn;
    const std::string v(env);
    if (v == "error") return Level::error;
    if (v == "info") return Level::info;
    if (v == "debug") return Level::debug;
    return Level::warn;
}

void log(Level level, const std::string& msg) {
    static const Level threshold = logLevel();
    if (level > threshold) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::cerr << "awdl_tool: " << names[static_cast<int>(level)] << ": " << msg << "\n";
}

int exitFor(const Error& e) {
    switch (e.code) {
        case Errc::no_common_frames:
        case Errc::no_master_frames:
        case Errc::no_pairs:
        case Errc::insufficient_pairs: return kExitEmpty;
        default: return kExitUsage;
    }
}

int fail(const Error& e) {
    log(Level::error, e.message());
    return exitFor(e);
}

int runDissect(const std::string& path, bool verbose, bool jsonLines) {
    auto records = pcap::loadRecords(path, path);
    if (!records) return fail(records.error());
    const auto objects = dissect::dissectRecords(*records, {verbose});
    log(Level::info, std::to_string(records->size()) + " packets, " + std::to_string(objects.size()) + " objects");
    if (jsonLines) {
        for (const auto& o : objects) std::cout << o.dump() << "\n";
    } else {
        Json arr = Json::array();
        for (const auto& o : objects) arr.push_back(o);
        std::cout << arr.dump(2) << "\n";
    }
    return kExitOk;
}

int runCalibrate(const std::string& a, const std::string& b) {
    auto ra = pcap::loadRecords(a, "a");
    if (!ra) return fail(ra.error());
    auto rb = pcap::loadRecords(b, "b");
    if (!rb) return fail(rb.error());
    auto cal = analysis::calibrate(*ra, *rb);
    if (!cal) return fail(cal.error());
    std::cout << Json{{"offset_us", cal->offset_us}, {"sample_count", cal->sample_count}}.dump(2) << "\n";
    return kExitOk;
}

int runAnalyzeSync(const std::string& a, const std::string& b, const std::string& masterText, bool samples) {
    auto master = MacAddress::parse(masterText);
    if (!master) return fail(makeError(Errc::invalid_scenario, "--master: not a MAC address: " + masterText));
    auto ra = pcap::loadRecords(a, "a");
    if (!ra) return fail(ra.error());
    auto rb = pcap::loadRecords(b, "b");
    if (!rb) return fail(rb.error());
    auto res = analysis::analyzeSync(*ra, *rb, *master);
    if (!res) return fail(res.error());

    Json out{
        {"master", master->toString()},
        {"calibration", {{"offset_us", res->calibration.offset_us}, {"sample_count", res->calibration.sample_count}}},
        {"count", res->samples.size()},
        {"mean_us", res->mean_us},
        {"stddev_us", res->stddev_us},
        {"fraction_within_3tu", res->fraction_within},
        {"histogram",
         {{"lower_us", res->histogram.lower_us},
          {"bin_width_us", res->histogram.bin_width_us},
          {"counts", res->histogram.counts},
          {"underflow", res->histogram.underflow},
          {"overflow", res->histogram.overflow}}},
    };
    if (samples) {
        Json arr = Json::array();
        for (const auto& s : res->samples)
            arr.push_back({{"time_us", s.time_us}, {"slave", s.slave.toString()}, {"xi_us", s.xi_us}});
        out["samples"] = arr;
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int runSimulate(const std::string& path, std::optional<std::uint64_t> seed, const std::string& outDir) {
    auto sc = sim::loadScenario(path);
    if (!sc) return fail(sc.error());
    if (seed) sc->seed = *seed;
    log(Level::info, "running " + sc->name + " seed " + std::to_string(sc->seed));
    auto res = sim::run(*sc);
    if (!res) return fail(res.error());
    if (auto st = sim::writeOutputs(*sc, *res, outDir); !st) return fail(st.error());
    log(Level::info, std::to_string(res->emissions.size()) + " frames emitted; outputs in " + outDir);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AWDL frame dissector, trace analyzer and simulator"};
    app.require_subcommand(1);

    std::string dissectFile;
    bool verbose = false;
    bool jsonLines = false;
    auto* dis = app.add_subcommand("dissect", "Decode the AWDL frames of a pcap file to JSON");
    dis->add_option("file", dissectFile, "pcap file (802.11 or radiotap)")->required();
    dis->add_flag("--verbose", verbose, "Also report skipped non-AWDL frames");
    dis->add_flag("--json-lines", jsonLines, "One JSON object per line instead of an array");

    std::string calA, calB;
    auto* cal = app.add_subcommand("calibrate", "Clock offset between two sniffer captures");
    cal->add_option("a", calA, "reference capture")->required();
    cal->add_option("b", calB, "capture to align")->required();

    std::string syncA, syncB, master;
    bool samples = false;
    auto* syn = app.add_subcommand("analyze-sync", "Synchronization error between a master and its slaves");
    syn->add_option("a", syncA, "reference capture")->required();
    syn->add_option("b", syncB, "second capture")->required();
    syn->add_option("--master", master, "MAC address of the master")->required();
    syn->add_flag("--samples", samples, "Include every sample in the output");

    std::string scenario, outDir;
    std::optional<std::uint64_t> seed;
    auto* simc = app.add_subcommand("simulate", "Run a scenario and write collector files");
    simc->add_option("scenario", scenario, "scenario JSON file")->required();
    simc->add_option("--seed", seed, "override the scenario seed");
    simc->add_option("--out", outDir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (dis->parsed()) return runDissect(dissectFile, verbose, jsonLines);
    if (cal->parsed()) return runCalibrate(calA, calB);
    if (syn->parsed()) return runAnalyzeSync(syncA, syncB, master, samples);
    if (simc->parsed()) return runSimulate(scenario, seed, outDir);
    return kExitUsage;
}
