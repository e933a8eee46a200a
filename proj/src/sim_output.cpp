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

#include <filesystem>
#include <fstream>

#include "awdl/sim.hpp"
#include "json.hpp"

namespace awdl::sim {

namespace {

using Json = nlohmann::ordered_json;

Status writeText(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return makeError(Errc::io_error, "cannot write " + path.string());
    out << text;
    if (!out) return makeError(Errc::io_error, "write failed for " + path.string());
    return Ok{};
}

std::string masterCsv(const RunResult& r) {
    std::string s = "time_us,node,master,master_name,role\n";
    for (const auto& m : r.master_timeline)
        s += std::to_string(m.time_us) + "," + m.node + "," + m.master.toString() + "," + m.master_name + "," +
             election::roleName(m.role) + "\n";
    return s;
}

std::string metricCsv(const RunResult& r) {
    std::string s = "time_us,node,self_metric,top_metric\n";
    for (const auto& m : r.metric_timeline)
        s += std::to_string(m.time_us) + "," + m.node + "," + std::to_string(m.self_metric) + "," +
             std::to_string(m.top_metric) + "\n";
    return s;
}

std::string syncCsv(const RunResult& r) {
    std::string s = "time_us,slave,master,xi_us\n";
    for (const auto& x : r.sync_samples)
        s += std::to_string(x.time_us) + "," + x.slave.toString() + "," + x.master.toString() + "," +
             std::to_string(x.xi_us) + "\n";
    return s;
}

std::string activityCsv(const RunResult& r) {
    std::string s = "bin,psf_aw,mif_aw,psf_tu,mif_tu\n";
    const auto& a = r.activity;
    for (std::size_t b = 0; b < a.psf_aw.size(); ++b)
        s += std::to_string(b) + "," + std::to_string(a.psf_aw[b]) + "," + std::to_string(a.mif_aw[b]) + "," +
             std::to_string(a.psf_tu[b]) + "," + std::to_string(a.mif_tu[b]) + "\n";
    return s;
}

Json summaryJson(const Scenario& sc, const RunResult& r) {
    Json nodes = Json::array();
    for (const auto& n : r.nodes) {
        Json j{{"name", n.name}, {"address", n.address.toString()}, {"alive", n.alive}};
        if (n.alive) {
            j["role"] = election::roleName(n.election.role);
            j["top_master"] = n.election.top_master.toString();
            j["self_metric"] = n.election.self_metric;
            j["top_metric"] = n.election.top_metric;
            j["load_state"] = chanseq::loadKindName(n.load);
            j["counters"] = {
                {"psf_sent", n.counters.psf_sent},         {"mif_sent", n.counters.mif_sent},
                {"data_sent", n.counters.data_sent},       {"data_received", n.counters.data_received},
                {"decode_errors", n.counters.decode_errors}, {"rssi_drops", n.counters.rssi_drops},
                {"misalign", n.counters.misalign},         {"resync_events", n.counters.resync_events},
                {"master_timeouts", n.counters.master_timeouts},
            };
        }
        nodes.push_back(std::move(j));
    }
    Json sync{{"count", r.sync_samples.size()}};
    if (auto st = measureSyncError(r)) {
        sync["mean_us"] = st->mean_us;
        sync["stddev_us"] = st->stddev_us;
        sync["fraction_within_3tu"] = st->fraction_within;
    }
    Json sniffers = Json::array();
    for (const auto& sn : sc.sniffers) sniffers.push_back(sn.name + ".pcap");
    return {
        {"scenario", sc.name},
        {"seed", sc.seed},
        {"duration_us", sc.duration_us},
        {"emissions", r.emissions.size()},
        {"delivery",
         {{"attempts", r.delivery.attempts},
          {"delivered", r.delivery.delivered},
          {"lost_probability", r.delivery.lost_probability},
          {"lost_channel", r.delivery.lost_channel}}},
        {"cycle_violations", r.cycle_violations},
        {"master_timeouts", r.timeouts.size()},
        {"resync_events", r.resyncs.size()},
        {"sync_error", sync},
        {"nodes", nodes},
        {"pcaps", sniffers},
    };
}

}  // namespace

pcap::File snifferCapture(const RunResult& result, std::size_t index, const SnifferSpec& spec) {
    pcap::File file;
    file.linktype = pcap::kLinkTypeRadiotap;
    for (const auto& c : result.captures) {
        if (c.sniffer != index) continue;
        pcap::Packet p;
        p.timestamp_us = c.local_time;
        p.data = pcap::buildRadiotap(static_cast<std::uint64_t>(c.local_time), 0, pcap::channelToFrequency(c.channel),
                                     spec.rssi);
        p.data.insert(p.data.end(), c.bytes.begin(), c.bytes.end());
        p.original_length = static_cast<std::uint32_t>(p.data.size());
        file.packets.push_back(std::move(p));
    }
    return file;
}

Status writeOutputs(const Scenario& scenario, const RunResult& result, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) return makeError(Errc::io_error, "cannot create " + dir + ": " + ec.message());
    const std::filesystem::path base(dir);
    for (auto st : {writeText(base / "master_timeline.csv", masterCsv(result)),
                    writeText(base / "metric_timeline.csv", metricCsv(result)),
                    writeText(base / "sync_error.csv", syncCsv(result)),
                    writeText(base / "activity.csv", activityCsv(result)),
                    writeText(base / "summary.json", summaryJson(scenario, result).dump(2) + "\n")}) {
        if (!st) return st;
    }
    for (std::size_t i = 0; i < scenario.sniffers.size(); ++i) {
        const auto& sn = scenario.sniffers[i];
        if (auto st = pcap::writeFile((base / (sn.name + ".pcap")).string(), snifferCapture(result, i, sn)); !st)
            return st;
    }
    return Ok{};
}

}  // namespace awdl::sim
