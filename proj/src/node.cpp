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

#include "awdl/node.hpp"

#include <algorithm>
#include <limits>

namespace awdl::node {

namespace {

using sync::kDefaultTimeModel;

constexpr std::int64_t kTu = 1024;
constexpr std::int64_t kAw = kDefaultTimeModel.awMicros();
constexpr std::int64_t kEaw = kDefaultTimeModel.eawMicros();
constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

chanseq::LoadState stateForRank(int rank, std::optional<std::uint8_t> ap) {
    using chanseq::LoadKind;
    switch (rank) {
        case 0: return {LoadKind::low_power, ap};
        case 1: return {LoadKind::idle, ap};
        case 2: return {LoadKind::data_infra_50, ap};
        case 3: return {LoadKind::data_infra_75, ap};
        default: return {LoadKind::data, ap};
    }
}

std::int64_t ceilTo(std::int64_t t, std::int64_t origin, std::int64_t unit) {
    std::int64_t d = t - origin;
    std::int64_t q = d / unit;
    if (d % unit != 0 && d > 0) ++q;
    if (d < 0) q = -((-d) / unit);
    return origin + q * unit;
}

wire::Bytes hostnameBytes(const MacAddress& mac) {
    // Arpa TLV payload: flags byte, then a DNS-style label.
    std::string host = "awdl-" + mac.toString().substr(9);
    std::replace(host.begin(), host.end(), ':', '-');
    wire::Bytes out{0x03, static_cast<std::uint8_t>(host.size())};
    out.insert(out.end(), host.begin(), host.end());
    return out;
}

}  // namespace

bool validAfPeriod(std::uint16_t tu) noexcept { return tu == 110 || tu == 440; }

const char* emissionKindName(EmissionKind k) noexcept {
    switch (k) {
        case EmissionKind::psf: return "psf";
        case EmissionKind::mif: return "mif";
        case EmissionKind::data: return "data";
    }
    return "unknown";
}

const char* txReasonName(TxReason r) noexcept {
    switch (r) {
        case TxReason::common_slot: return "common_slot";
        case TxReason::no_overlap: return "no_overlap";
        case TxReason::peer_unknown: return "peer_unknown";
        case TxReason::guard_interval: return "guard_interval";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

LoadController::LoadController(std::optional<std::uint8_t> ap_channel, std::int64_t now)
    : ap_(ap_channel), last_activity_(now) {}

int LoadController::targetRank(double rate) const noexcept {
    int level = 0;
    for (double t : kAscend)
        if (rate > t) ++level;
    switch (level) {
        case 0: return 0;
        case 1: return 1;
        case 2: return ap_ ? 2 : 4;
        default: return ap_ ? 3 : 4;
    }
}

int LoadController::lowerRank(int rank) const noexcept {
    switch (rank) {
        case 4: return 1;
        case 3: return 2;
        case 2: return 1;
        default: return 0;
    }
}

double LoadController::entryThreshold(int rank) const noexcept {
    switch (rank) {
        case 1: return kAscend[0];
        case 2: return kAscend[1];
        case 3: return kAscend[2];
        default: return kAscend[1];
    }
}

chanseq::LoadState LoadController::update(std::int64_t now, double rate) {
    if (rate > kAscend[0] / 2) last_activity_ = now;

    const int target = targetRank(rate);
    if (target > rank_) {
        if (!ascend_since_) ascend_since_ = now;
        if (now - *ascend_since_ >= kAscendHold) {
            rank_ = target;
            ascend_since_.reset();
            descend_since_.reset();
        }
    } else {
        ascend_since_.reset();
    }

    if (rank_ >= 2) {
        if (rate < entryThreshold(rank_) / 2) {
            if (!descend_since_) descend_since_ = now;
            if (now - *descend_since_ >= kDescendHold) {
                rank_ = lowerRank(rank_);
                descend_since_ = now;
            }
        } else {
            descend_since_.reset();
        }
    } else if (rank_ == 1 && now - last_activity_ >= kInactivityTimeout) {
        rank_ = 0;
    }
    return state();
}

chanseq::LoadState LoadController::state() const { return stateForRank(rank_, ap_); }

// ---------------------------------------------------------------------------

Node::Node(NodeConfig config, std::int64_t now)
    : config_(std::move(config)),
      rng_(config_.rng_seed),
      election_(election::Election::start(config_.address, config_.version, now, config_.metric_policy)),
      load_(config_.ap_channel, now),
      next_psf_(now) {
    anchor_.next_eaw_start = now;
    anchor_.aw_seq_at_start = 0;
    anchor_.source_master = config_.address;
    applyLoad(load_.state());
    scheduleMif(now);
    last_tick_ = now;
    next_tick_ = now + kAw;
    std::uniform_int_distribution<std::int64_t> jitter(0, kPsfJitterMax - 1);
    next_psf_ = now + jitter(rng_);
}

sync::LocalAwState Node::awState(std::int64_t now) const noexcept { return sync::localAwState(now, anchor_); }

std::uint8_t Node::radioChannel(std::int64_t now) const noexcept {
    const auto& slot = chanseq::slotAt(map_, awState(now).aw_seq);
    return slot.radioChannel() != 0 ? slot.radioChannel() : config_.social.primary;
}

bool Node::isMifSlot(int slot) const noexcept {
    const int begin = slot < chanseq::kSlots / 2 ? 0 : chanseq::kSlots / 2;
    for (int k = begin; k < begin + chanseq::kSlots / 2; ++k) {
        if (map_.slots[static_cast<std::size_t>(k)].available()) return k == slot;
    }
    return false;
}

void Node::applyLoad(const chanseq::LoadState& state) {
    auto built = chanseq::buildSequence(state, config_.social);
    if (built) map_ = *built;
}

void Node::scheduleMif(std::int64_t after) {
    const auto st = awState(after);
    std::uniform_int_distribution<std::int64_t> jitter(-kMifJitterTu * kTu, kMifJitterTu * kTu);
    for (int k = 0; k <= chanseq::kSlots * 2; ++k) {
        const std::int64_t eawStart = st.eaw_start + k * kEaw;
        const std::uint16_t seq = awState(eawStart).aw_seq;
        if (last_mif_eaw_ && *last_mif_eaw_ == seq) continue;
        if (!isMifSlot(chanseq::slotIndex(seq).slot)) continue;
        const std::int64_t offset = kEaw / 2 + jitter(rng_);
        if (eawStart + offset > after) {
            mif_seq_ = seq;
            mif_offset_ = offset;
            mif_pending_ = true;
            return;
        }
    }
    mif_pending_ = false;
}

std::int64_t Node::mifTime() const noexcept {
    return mif_pending_ ? sync::projectStart(anchor_, mif_seq_) + mif_offset_ : kNever;
}

void Node::rebaseAnchor(std::int64_t now) {
    // Keep the anchor near `now` so sequence arithmetic stays within half the
    // 16-bit range.
    const auto st = awState(now);
    anchor_.aw_seq_at_start = awState(st.eaw_start).aw_seq;
    anchor_.next_eaw_start = st.eaw_start;
}

void Node::scheduleTick(std::int64_t after) {
    // Next AW boundary on the current anchor grid, at least half an AW out.
    next_tick_ = ceilTo(after + kAw / 2, anchor_.next_eaw_start, kAw);
}

void Node::onAnchorChanged(std::int64_t now, bool jumped) {
    // Small corrections keep the pending MIF target; a jump invalidates it.
    if (jumped) scheduleMif(now);
    scheduleTick(std::max(last_tick_, now - kAw / 2));
}

std::int64_t Node::nextEventTime() const noexcept {
    std::int64_t t = std::min({next_psf_, mifTime(), next_tick_});
    if (!election_.state().bumped) t = std::min(t, election_.state().listen_deadline);
    if (!tx_queue_.empty()) t = std::min(t, next_data_);
    return t;
}

std::vector<Emission> Node::step(std::int64_t now) {
    std::vector<Emission> out;
    for (int guard = 0; guard < 10000; ++guard) {
        const std::int64_t t = nextEventTime();
        if (t > now) break;

        if (!election_.state().bumped && election_.state().listen_deadline == t) {
            election_.bumpSelfMetric(t, rng_);
            if (election_.state().role == election::Role::master) anchor_source_.reset();
            continue;
        }
        if (next_tick_ == t) {
            last_tick_ = t;
            rebaseAnchor(t);
            if (election_.onAwTick().master_timeout) ++counters_.master_timeouts;
            if (election_.state().role == election::Role::master) anchor_source_.reset();
            updateLoadState(t, offered_rate_);
            scheduleTick(t);
            continue;
        }
        if (mifTime() == t) {
            const auto st = awState(now);
            const int slot = chanseq::slotIndex(st.aw_seq).slot;
            const std::uint16_t eawSeq = awState(st.eaw_start).aw_seq;
            if (eawSeq == mif_seq_ && isMifSlot(slot) && last_mif_eaw_ != eawSeq) {
                const auto& s = map_.slots[static_cast<std::size_t>(slot)];
                out.push_back(emitAction(wire::Subtype::mif, now, s.channel));
                last_mif_eaw_ = eawSeq;
            }
            scheduleMif(now);
            continue;
        }
        if (next_psf_ == t) {
            out.push_back(emitAction(wire::Subtype::psf, t, radioChannel(t)));
            std::uniform_int_distribution<std::int64_t> jitter(0, kPsfJitterMax - 1);
            next_psf_ = t + std::int64_t{config_.af_period_tu} * kTu + jitter(rng_);
            continue;
        }
        // only the data wakeup remains
        drainData(now, out);
        next_data_ = tx_queue_.empty() ? kNever : ceilTo(now + 1, anchor_.next_eaw_start, kTu);
    }
    return out;
}

wire::ActionFrame Node::buildActionFrame(wire::Subtype subtype, std::int64_t now, std::uint8_t channel) const {
    const auto& es = election_.state();
    const auto st = awState(now);
    // Sync information is taken at the preceding TU boundary; the target time
    // records that instant so receivers can undo the offset.
    const std::int64_t snap = now - st.micros_into_eaw % kTu;
    const auto snapState = awState(snap);

    wire::ActionFrame f;
    f.envelope.kind = wire::FrameKind::action;
    f.envelope.destination = kBroadcast;
    f.envelope.source = config_.address;
    f.envelope.bssid = kAwdlBssid;
    f.header.subtype = static_cast<std::uint8_t>(subtype);
    f.header.phy_tx_time = static_cast<std::uint32_t>(now);
    f.header.target_tx_time = static_cast<std::uint32_t>(snap);

    const auto wireSeq = chanseq::toWire(map_);

    wire::SyncParamsTlv sp;
    sp.tx_channel = channel;
    sp.tx_counter = static_cast<std::uint16_t>(snapState.tu_to_next_eaw);
    sp.master_channel = config_.social.primary;
    sp.af_period = config_.af_period_tu;
    sp.remaining_aw = static_cast<std::uint16_t>(16 - snapState.tu_into_eaw % 16);
    sp.master_address = es.top_master;
    sp.aw_seq_number = snapState.aw_seq;
    sp.channel_sequence = wireSeq;
    f.tlvs.emplace_back(std::move(sp));

    f.tlvs.emplace_back(wire::ChannelSequenceTlv{wireSeq, {}});

    const auto path = election_.announcedPath();
    wire::ElectionParamsTlv ep;
    ep.distance_to_master = static_cast<std::uint8_t>(es.tree_path.size());
    ep.master_address = es.top_master;
    ep.master_metric = es.top_metric;
    ep.self_metric = es.self_metric;
    f.tlvs.emplace_back(std::move(ep));

    wire::ElectionParamsV2Tlv ep2;
    ep2.master_address = es.top_master;
    ep2.sync_address = es.sync_parent;
    ep2.distance_to_master = static_cast<std::uint32_t>(es.tree_path.size());
    ep2.master_metric = es.top_metric;
    ep2.self_metric = es.self_metric;
    f.tlvs.emplace_back(std::move(ep2));

    f.tlvs.emplace_back(wire::SyncTreeTlv{path});
    f.tlvs.emplace_back(wire::OpaqueTlv{static_cast<std::uint8_t>(wire::TlvType::service_params), {0, 0, 0}});
    if (subtype == wire::Subtype::mif)
        f.tlvs.emplace_back(wire::OpaqueTlv{static_cast<std::uint8_t>(wire::TlvType::arpa), hostnameBytes(address())});

    wire::DataPathStateTlv dps;
    dps.awdl_address = config_.address;
    f.tlvs.emplace_back(std::move(dps));

    if (subtype == wire::Subtype::mif) {
        f.tlvs.emplace_back(wire::OpaqueTlv{static_cast<std::uint8_t>(wire::TlvType::ht_caps),
                                            {0x6f, 0x01, 0x17, 0xff, 0xff, 0x00, 0x00, 0x00}});
        f.tlvs.emplace_back(wire::OpaqueTlv{static_cast<std::uint8_t>(wire::TlvType::vht_caps),
                                            {0xb2, 0x01, 0x80, 0x33, 0xea, 0xff, 0x00, 0x00}});
    }

    f.tlvs.emplace_back(wire::VersionTlv{static_cast<std::uint8_t>(config_.version == election::Version::v3 ? 3 : 2),
                                         0, config_.device_class});
    return f;
}

Emission Node::emitAction(wire::Subtype subtype, std::int64_t now, std::uint8_t channel) {
    auto frame = buildActionFrame(subtype, now, channel);
    frame.envelope.sequence_number = dot11_seq_;
    dot11_seq_ = static_cast<std::uint16_t>((dot11_seq_ + 1) & 0x0fff);

    Emission e;
    e.bytes = wire::encodeActionFrame(frame).value();
    e.channel = channel;
    e.kind = subtype == wire::Subtype::mif ? EmissionKind::mif : EmissionKind::psf;
    e.local_time = now;
    const auto st = awState(now);
    e.aw_seq = st.aw_seq;
    e.tu_into_eaw = st.tu_into_eaw;
    if (e.kind == EmissionKind::mif) {
        ++counters_.mif_sent;
    } else {
        ++counters_.psf_sent;
    }
    return e;
}

void Node::drainData(std::int64_t now, std::vector<Emission>& out) {
    for (auto it = tx_queue_.begin(); it != tx_queue_.end();) {
        const auto decision = canTransmit(it->peer, now);
        if (!decision.allowed) {
            ++it;
            continue;
        }
        wire::DataFrame df;
        df.envelope.destination = it->peer;
        df.envelope.source = config_.address;
        df.envelope.sequence_number = dot11_seq_;
        dot11_seq_ = static_cast<std::uint16_t>((dot11_seq_ + 1) & 0x0fff);
        df.sequence_number = data_seq_++;
        df.payload = std::move(it->payload);

        Emission e;
        e.bytes = wire::encodeDataFrame(df).value();
        e.channel = decision.channel;
        e.kind = EmissionKind::data;
        e.local_time = now;
        const auto st = awState(now);
        e.aw_seq = st.aw_seq;
        e.tu_into_eaw = st.tu_into_eaw;
        e.tx_allowed = decision.allowed;
        out.push_back(std::move(e));
        ++counters_.data_sent;
        it = tx_queue_.erase(it);
    }
}

TxDecision Node::canTransmit(const MacAddress& peer, std::int64_t now) const {
    TxDecision d;
    auto it = peers_.find(peer);
    if (it == peers_.end()) {
        d.reason = TxReason::peer_unknown;
        return d;
    }
    const auto st = awState(now);
    const auto& mine = chanseq::slotAt(map_, st.aw_seq);
    const auto& theirs = chanseq::slotAt(it->second.advertised_map, st.aw_seq);
    if (!mine.available() || !theirs.available() || mine.channel != theirs.channel) {
        d.reason = TxReason::no_overlap;
        return d;
    }
    const int guard = kDefaultTimeModel.guard_tu;
    if (st.tu_into_eaw < guard || st.tu_into_eaw >= kDefaultTimeModel.eawLengthTu() - guard) {
        d.reason = TxReason::guard_interval;
        return d;
    }
    d.allowed = true;
    d.channel = mine.channel;
    d.reason = TxReason::common_slot;
    return d;
}

Status Node::sendData(const MacAddress& peer, wire::Bytes ipv6_payload) {
    if (!peers_.contains(peer)) return makeError(Errc::peer_unknown, peer.toString());
    if (tx_queue_.empty()) next_data_ = std::numeric_limits<std::int64_t>::min();
    tx_queue_.push_back({peer, std::move(ipv6_payload)});
    return Ok{};
}

chanseq::LoadState Node::updateLoadState(std::int64_t now, double tx_bytes_per_sec) {
    const auto before = load_.state();
    const auto after = load_.update(now, tx_bytes_per_sec);
    if (after != before) {
        applyLoad(after);
        scheduleMif(now);
    }
    return after;
}

ReceiveEffects Node::onReceive(std::span<const std::uint8_t> bytes, const sync::RxMeta& rx) {
    ReceiveEffects fx;
    switch (wire::classifyFrame(bytes)) {
        case wire::FrameClass::awdl_action: {
            auto frame = wire::decodeActionFrame(bytes);
            if (!frame) break;
            fx.decoded = true;
            handleAction(*frame, rx, fx);
            return fx;
        }
        case wire::FrameClass::awdl_data: {
            auto frame = wire::decodeDataFrame(bytes);
            if (!frame) break;
            fx.decoded = true;
            if (frame->envelope.destination == config_.address) {
                fx.accepted = true;
                ++counters_.data_received;
            }
            return fx;
        }
        case wire::FrameClass::other:
            break;
    }
    ++counters_.decode_errors;
    return fx;
}

void Node::handleAction(const wire::ActionFrame& frame, const sync::RxMeta& rx, ReceiveEffects& fx) {
    const MacAddress& sender = frame.envelope.source;
    if (sender == config_.address) return;
    if (election_.filterFrame(rx.rssi, sender, config_.rssi_policy, config_.airplay_mode) ==
        election::FilterResult::drop) {
        ++counters_.rssi_drops;
        return;
    }
    fx.accepted = true;

    const auto* sp = frame.find<wire::SyncParamsTlv>();
    const auto* v1 = frame.find<wire::ElectionParamsTlv>();
    const auto* v2 = frame.find<wire::ElectionParamsV2Tlv>();
    const auto* tree = frame.find<wire::SyncTreeTlv>();

    if (v1 || v2) {
        election::Advert a;
        a.sender = sender;
        if (v2) {
            a.top_master = v2->master_address;
            a.top_metric = v2->master_metric;
            a.self_metric = v2->self_metric;
            a.sync_parent = v2->sync_address;
        } else {
            a.top_master = v1->master_address;
            a.top_metric = v1->master_metric;
            a.self_metric = v1->self_metric;
            a.sync_parent = tree && !tree->path.empty() ? tree->path.front() : v1->master_address;
        }
        if (tree) a.path = tree->path;
        const auto efx = election_.onActionFrame(a);
        fx.adopted_new_master = efx.adopted_new_master;
        if (efx.became_master) {
            anchor_source_.reset();
            anchor_.source_master = config_.address;
        }
    }

    auto [it, inserted] = peers_.try_emplace(sender);
    PeerEntry& peer = it->second;
    fx.new_peer = inserted;
    peer.address = sender;
    peer.ipv6 = linkLocalAddress(sender);
    peer.last_rssi = rx.rssi;
    peer.last_seen_aw = election_.ticks();
    if (const auto* cs = frame.find<wire::ChannelSequenceTlv>()) {
        peer.advertised_map = chanseq::fromWire(cs->sequence);
    } else if (sp) {
        peer.advertised_map = chanseq::fromWire(sp->channel_sequence);
    }
    if (sp) peer.advertised_sync = *sp;
    if (const auto* ver = frame.find<wire::VersionTlv>()) peer.version = *ver;

    const auto& es = election_.state();
    if (!sp || es.role == election::Role::master || sender != es.sync_parent) return;

    auto pred = sync::predictAwStart(*sp, frame.header, rx);
    pred.next_eaw_start += config_.sync_bias_micros;

    if (!anchor_source_ || *anchor_source_ != sender) {
        if (sync::misalignment(anchor_, pred).exceeds_threshold) {
            ++counters_.resync_events;
            fx.resync = true;
        }
        window_.clear();
        window_.push_back(pred);
        anchor_ = pred;
        anchor_source_ = sender;
    } else {
        if (last_raw_ && sync::misalignment(*last_raw_, pred).exceeds_threshold) {
            ++counters_.misalign;
            fx.misaligned = true;
            window_.clear();
        }
        window_.push_back(pred);
        while (window_.size() > static_cast<std::size_t>(kAnchorWindow)) window_.pop_front();
        // Medium access only ever delays a frame, so the earliest projected
        // boundary in the window is the least biased estimate.
        anchor_ = pred;
        for (const auto& w : window_)
            anchor_.next_eaw_start = std::min(anchor_.next_eaw_start, sync::projectStart(w, pred.aw_seq_at_start));
    }
    last_raw_ = pred;
    fx.anchor_updated = true;
    onAnchorChanged(rx.rx_time, fx.resync || fx.misaligned);
}

}  // namespace awdl::node
