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

// Per-node AWDL state machine. The node is driven entirely from outside:
// step(now) emits whatever is due, onReceive() consumes frames, and
// nextEventTime() tells the driver when to call step() again. All times are
// the node's local clock in microseconds.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "awdl/chanseq.hpp"
#include "awdl/election.hpp"
#include "awdl/mac.hpp"
#include "awdl/result.hpp"
#include "awdl/sync.hpp"
#include "awdl/wire.hpp"

namespace awdl::node {

struct NodeConfig {
    MacAddress address;
    election::Version version = election::Version::v3;
    std::uint8_t device_class = 1;  // 1 macOS, 2 iOS
    std::uint16_t af_period_tu = 110;
    bool airplay_mode = false;
    chanseq::SocialChannels social{};
    std::uint64_t rng_seed = 0;
    std::optional<std::uint8_t> ap_channel;  // associated infrastructure network
    std::int64_t sync_bias_micros = 0;       // test hook: shifts the adopted AW schedule
    election::MetricPolicy metric_policy{};
    election::RssiPolicy rssi_policy{};
};

bool validAfPeriod(std::uint16_t tu) noexcept;

enum class EmissionKind { psf, mif, data };
const char* emissionKindName(EmissionKind k) noexcept;

struct Emission {
    wire::Bytes bytes;
    std::uint8_t channel = 0;
    EmissionKind kind = EmissionKind::psf;
    std::int64_t local_time = 0;
    std::uint16_t aw_seq = 0;
    int tu_into_eaw = 0;
    bool tx_allowed = true;  // data frames: canTransmit() held at emission
};

struct PeerEntry {
    MacAddress address;
    int last_rssi = 0;
    std::uint64_t last_seen_aw = 0;
    chanseq::ChannelSlotMap advertised_map;
    std::optional<wire::SyncParamsTlv> advertised_sync;
    Ipv6Address ipv6;
    std::optional<wire::VersionTlv> version;
};

enum class TxReason { common_slot, no_overlap, peer_unknown, guard_interval };
const char* txReasonName(TxReason r) noexcept;

struct TxDecision {
    bool allowed = false;
    std::uint8_t channel = 0;
    TxReason reason = TxReason::peer_unknown;
};

struct ReceiveEffects {
    bool decoded = false;
    bool accepted = false;
    bool adopted_new_master = false;
    bool anchor_updated = false;
    bool misaligned = false;
    bool resync = false;
    bool new_peer = false;
};

struct Counters {
    std::uint64_t decode_errors = 0;
    std::uint64_t rssi_drops = 0;
    std::uint64_t misalign = 0;
    std::uint64_t resync_events = 0;
    std::uint64_t master_timeouts = 0;
    std::uint64_t psf_sent = 0;
    std::uint64_t mif_sent = 0;
    std::uint64_t data_sent = 0;
    std::uint64_t data_received = 0;
};

/// Traffic-driven channel sequence state with hysteresis.
class LoadController {
public:
    static constexpr double kAscend[4] = {1e3, 1e5, 1e6, 5e6};  // bytes/s
    static constexpr std::int64_t kAscendHold = 1'000'000;
    static constexpr std::int64_t kDescendHold = 3'000'000;
    static constexpr std::int64_t kInactivityTimeout = 10'000'000;

    LoadController(std::optional<std::uint8_t> ap_channel, std::int64_t now);

    chanseq::LoadState update(std::int64_t now, double tx_bytes_per_sec);
    chanseq::LoadState state() const;

private:
    int targetRank(double rate) const noexcept;
    int lowerRank(int rank) const noexcept;
    double entryThreshold(int rank) const noexcept;

    std::optional<std::uint8_t> ap_;
    int rank_ = 1;  // 0 low_power, 1 idle, 2 infra50, 3 infra75, 4 data
    std::optional<std::int64_t> ascend_since_;
    std::optional<std::int64_t> descend_since_;
    std::int64_t last_activity_;
};

class Node {
public:
    static constexpr int kAnchorWindow = 4;
    static constexpr std::int64_t kPsfJitterMax = 2 * 1024;
    static constexpr int kMifJitterTu = 4;

    Node(NodeConfig config, std::int64_t now);

    std::vector<Emission> step(std::int64_t now);
    std::int64_t nextEventTime() const noexcept;

    ReceiveEffects onReceive(std::span<const std::uint8_t> bytes, const sync::RxMeta& rx);

    TxDecision canTransmit(const MacAddress& peer, std::int64_t now) const;
    Status sendData(const MacAddress& peer, wire::Bytes ipv6_payload);
    chanseq::LoadState updateLoadState(std::int64_t now, double tx_bytes_per_sec);
    /// Rate fed to the load controller on every AW tick.
    void setOfferedLoad(double bytes_per_sec) noexcept { offered_rate_ = bytes_per_sec; }

    /// Channel the radio is tuned to at `now`.
    std::uint8_t radioChannel(std::int64_t now) const noexcept;
    sync::LocalAwState awState(std::int64_t now) const noexcept;

    /// Action frame reflecting the current state, as it would be sent at `now`.
    wire::ActionFrame buildActionFrame(wire::Subtype subtype, std::int64_t now, std::uint8_t channel) const;

    const NodeConfig& config() const noexcept { return config_; }
    const MacAddress& address() const noexcept { return config_.address; }
    const election::ElectionState& electionState() const noexcept { return election_.state(); }
    const sync::AwPrediction& anchor() const noexcept { return anchor_; }
    const chanseq::ChannelSlotMap& slotMap() const noexcept { return map_; }
    chanseq::LoadState loadState() const { return load_.state(); }
    const std::map<MacAddress, PeerEntry>& peers() const noexcept { return peers_; }
    const Counters& counters() const noexcept { return counters_; }
    std::size_t queuedData() const noexcept { return tx_queue_.size(); }
    std::uint16_t nextDataSequence() const noexcept { return data_seq_; }
    void setNextDataSequence(std::uint16_t seq) noexcept { data_seq_ = seq; }

private:
    struct QueuedData {
        MacAddress peer;
        wire::Bytes payload;
    };

    void scheduleMif(std::int64_t after);
    void scheduleTick(std::int64_t after);
    void rebaseAnchor(std::int64_t now);
    void onAnchorChanged(std::int64_t now, bool jumped);
    std::int64_t mifTime() const noexcept;
    void applyLoad(const chanseq::LoadState& state);
    Emission emitAction(wire::Subtype subtype, std::int64_t now, std::uint8_t channel);
    void drainData(std::int64_t now, std::vector<Emission>& out);
    void handleAction(const wire::ActionFrame& frame, const sync::RxMeta& rx, ReceiveEffects& fx);
    bool isMifSlot(int slot) const noexcept;

    NodeConfig config_;
    std::mt19937_64 rng_;
    election::Election election_;
    sync::AwPrediction anchor_;
    std::optional<sync::AwPrediction> last_raw_;
    std::deque<sync::AwPrediction> window_;
    std::optional<MacAddress> anchor_source_;
    chanseq::ChannelSlotMap map_;
    LoadController load_;
    double offered_rate_ = 0.0;

    std::map<MacAddress, PeerEntry> peers_;
    std::deque<QueuedData> tx_queue_;
    std::uint16_t data_seq_ = 0;
    std::uint16_t dot11_seq_ = 0;

    std::int64_t next_psf_;
    std::uint16_t mif_seq_ = 0;  // EAW holding the pending MIF
    std::int64_t mif_offset_ = 0;
    bool mif_pending_ = false;
    std::int64_t next_tick_ = 0;
    std::int64_t last_tick_ = 0;
    std::int64_t next_data_ = 0;
    std::optional<std::uint16_t> last_mif_eaw_;
    Counters counters_;
};

}  // namespace awdl::node
