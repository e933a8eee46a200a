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

#pragma once

// Deterministic discrete-event simulator. Nodes run on drifting local clocks,
// frames travel over explicit links and are delivered only to receivers whose
// radio sits on the emission channel. Virtual sniffers record what a monitor
// interface would capture.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "awdl/analysis.hpp"
#include "awdl/node.hpp"
#include "awdl/result.hpp"

namespace awdl::sim {

struct ClockModel {
    std::int64_t offset_us = 0;
    double drift_ppm = 0.0;
    std::int64_t jitter_sigma_us = 0;  // medium-access delay the timestamps miss

    std::int64_t local(std::int64_t global) const noexcept;
    /// Earliest global time whose local reading is >= `local`.
    std::int64_t globalAtOrAfter(std::int64_t local) const noexcept;
};

struct Link {
    int rssi = -50;
    double loss = 0.0;
};

struct NodeSpec {
    std::string name;
    node::NodeConfig config;
    ClockModel clock;
};

enum class ActionKind { join, leave, set_load, set_link, remove_link, send };
const char* actionKindName(ActionKind k) noexcept;

struct ScriptAction {
    std::int64_t time_us = 0;
    ActionKind kind = ActionKind::join;
    std::string node;
    std::string peer;  // set_link, remove_link, send
    double rate = 0.0;  // set_load, bytes/s
    Link link;          // set_link
    std::size_t bytes = 0;  // send
    int count = 1;          // send
};

struct SnifferSpec {
    std::string name;
    std::uint8_t channel = 44;
    std::uint8_t calibration_channel = 44;
    std::int64_t calibration_us = 0;  // listens on the calibration channel until then
    ClockModel clock;
    int rssi = -40;
};

struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 0;
    std::int64_t duration_us = 10'000'000;
    std::vector<NodeSpec> nodes;
    std::vector<ScriptAction> script;
    bool full_mesh = true;
    Link default_link;
    std::map<std::pair<std::string, std::string>, Link> links;  // keys ordered (a < b)
    std::vector<SnifferSpec> sniffers;
    std::int64_t airtime_us = 0;
    std::optional<std::string> sync_master;  // restricts sync samples to this master
    bool record_events = true;
};

// --- collectors -------------------------------------------------------------

struct MasterSample {
    std::int64_t time_us = 0;
    std::string node;
    MacAddress master;
    std::string master_name;
    election::Role role = election::Role::master;
};

struct MetricSample {
    std::int64_t time_us = 0;
    std::string node;
    std::uint32_t self_metric = 0;
    std::uint32_t top_metric = 0;
};

struct EmissionRecord {
    std::uint64_t id = 0;
    std::int64_t global_time = 0;  // on air
    std::string node;
    node::EmissionKind kind = node::EmissionKind::psf;
    std::uint8_t channel = 0;
    std::uint16_t aw_seq = 0;
    int tu_into_eaw = 0;
    bool tx_allowed = true;
};

struct Capture {
    std::size_t sniffer = 0;
    std::uint64_t emission = 0;
    std::int64_t global_time = 0;
    std::int64_t local_time = 0;  // sniffer clock, written as TSFT
    std::uint8_t channel = 0;
    int rssi = 0;
    wire::Bytes bytes;
};

struct ActivityHistogram {
    std::array<std::uint64_t, 64> psf_aw{};  // AW index within the 64-AW period
    std::array<std::uint64_t, 64> mif_aw{};
    std::array<std::uint64_t, 64> psf_tu{};  // TU offset within the EAW
    std::array<std::uint64_t, 64> mif_tu{};
};

enum class Outcome { delivered, lost_probability, lost_channel };
const char* outcomeName(Outcome o) noexcept;

struct DeliveryStats {
    std::uint64_t attempts = 0;  // (frame, linked live receiver) pairs
    std::uint64_t delivered = 0;
    std::uint64_t lost_probability = 0;
    std::uint64_t lost_channel = 0;
};

struct Event {
    std::int64_t time_us = 0;
    std::string what;
    std::string node;
    std::string detail;
    bool operator==(const Event&) const = default;
};

struct NodeSummary {
    std::string name;
    MacAddress address;
    bool alive = false;
    election::ElectionState election;
    node::Counters counters;
    chanseq::LoadKind load = chanseq::LoadKind::idle;
};

struct NodeMark {
    std::int64_t time_us = 0;
    std::string node;
};

struct RunResult {
    std::vector<Event> events;
    std::vector<MasterSample> master_timeline;
    std::vector<MetricSample> metric_timeline;
    std::vector<analysis::SyncSample> sync_samples;
    ActivityHistogram activity;
    std::vector<EmissionRecord> emissions;
    std::vector<Capture> captures;
    std::vector<NodeMark> timeouts;  // master timeouts
    std::vector<NodeMark> resyncs;   // anchor jumps on a parent change
    DeliveryStats delivery;
    std::vector<NodeSummary> nodes;
    std::uint64_t cycle_violations = 0;  // sync-parent cycles seen after any event
};

/// Called after every processed event; used by tests that watch live state.
struct Observer {
    virtual ~Observer() = default;
    virtual void afterEvent(std::int64_t global_time, const std::vector<const node::Node*>& live,
                            const std::vector<std::string>& names) = 0;
};

Status validateScenario(const Scenario& scenario);
Result<RunResult> run(const Scenario& scenario, Observer* observer = nullptr);

struct SyncStats {
    std::size_t count = 0;
    double mean_us = 0.0;
    double stddev_us = 0.0;
    double fraction_within = 0.0;  // |xi| <= 3 TU
};

Result<SyncStats> measureSyncError(const RunResult& result, std::int64_t bound_us = 3 * 1024);

struct ChurnReport {
    double detection_delay_aw = 0.0;
    std::uint64_t resync_events = 0;
    std::optional<MacAddress> new_master;
    std::int64_t last_master_frame_us = 0;
    std::int64_t detected_us = 0;
};

/// Runs a script in which `departing` leaves, measuring when the survivors
/// notice and whether any of them had to resynchronize.
Result<ChurnReport> masterChurnProbe(const Scenario& scenario, const std::string& departing);

/// Runs every scenario; with `parallel` the runs are spread across threads.
std::vector<Result<RunResult>> runBatch(const std::vector<Scenario>& scenarios, bool parallel);

// --- outputs ----------------------------------------------------------------

/// Radiotap capture of everything sniffer `index` recorded, stamped with the
/// sniffer's own clock.
pcap::File snifferCapture(const RunResult& result, std::size_t index, const SnifferSpec& spec);

/// Writes master_timeline.csv, metric_timeline.csv, sync_error.csv,
/// activity.csv, summary.json and one pcap per sniffer into `dir`.
Status writeOutputs(const Scenario& scenario, const RunResult& result, const std::string& dir);

// --- scenario files ---------------------------------------------------------

Result<Scenario> parseScenario(const std::string& json_text);
Result<Scenario> loadScenario(const std::string& path);

}  // namespace awdl::sim
