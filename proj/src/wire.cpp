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

#include "awdl/wire.hpp"

#include <algorithm>
#include <string>

#include "byte_io.hpp"

namespace awdl::wire {

using detail::Reader;
using detail::Writer;

namespace {

constexpr std::uint8_t kFcAction = 0xd0;  // management, subtype 13
constexpr std::uint8_t kFcData = 0x08;    // data, subtype 0
constexpr std::array<std::uint8_t, 8> kLlcSnap{0xaa, 0xaa, 0x03, 0x00, 0x17, 0xf2, 0x08, 0x00};

constexpr std::size_t kSyncParamsFixed = 33;
constexpr std::size_t kChannelSeqHeader = 6;
constexpr std::size_t kElectionFixed = 18;
constexpr std::size_t kElectionV2Fixed = 32;
constexpr std::size_t kDataPathFixed = 20;

Error truncated(std::string what) { return makeError(Errc::truncated_frame, std::move(what)); }
Error malformed(std::uint8_t type, std::string what) {
    return makeError(Errc::malformed_tlv, std::string(tlvName(type)) + ": " + what);
}

std::span<const std::uint8_t> stripFcs(std::span<const std::uint8_t> bytes, DecodeOptions options) {
    if (options.has_fcs && bytes.size() >= 4) return bytes.first(bytes.size() - 4);
    return bytes;
}

Dot11Envelope readEnvelope(Reader& r, FrameKind kind) {
    Dot11Envelope env;
    env.kind = kind;
    r.u8();  // frame control, checked by the caller
    env.flags = r.u8();
    env.duration = r.le16();
    env.destination = r.mac();
    env.source = r.mac();
    env.bssid = r.mac();
    const std::uint16_t seqCtl = r.le16();
    env.fragment_number = static_cast<std::uint8_t>(seqCtl & 0x0f);
    env.sequence_number = static_cast<std::uint16_t>(seqCtl >> 4);
    return env;
}

void writeEnvelope(Writer& w, const Dot11Envelope& env) {
    w.u8(env.kind == FrameKind::action ? kFcAction : kFcData);
    w.u8(env.flags);
    w.le16(env.duration);
    w.mac(env.destination);
    w.mac(env.source);
    w.mac(env.bssid);
    w.le16(static_cast<std::uint16_t>((env.sequence_number & 0x0fff) << 4 | (env.fragment_number & 0x0f)));
}

bool readChannelSequence(Reader& r, ChannelSequence& seq) {
    const std::size_t count = std::size_t{r.u8()} + 1;
    seq.encoding = r.u8();
    seq.duplicate_count = r.u8();
    seq.step = r.u8();
    seq.fill_channel = r.le16();
    if (!r.ok() || r.remaining() < count * 2) return false;
    seq.entries.resize(count);
    for (auto& e : seq.entries) {
        e.channel = r.u8();
        e.flags = r.u8();
    }
    return r.ok();
}

Status writeChannelSequence(Writer& w, const ChannelSequence& seq) {
    if (seq.entries.empty() || seq.entries.size() > 256)
        return malformed(static_cast<std::uint8_t>(TlvType::channel_sequence), "entry count must be 1..256");
    w.u8(static_cast<std::uint8_t>(seq.entries.size() - 1));
    w.u8(seq.encoding);
    w.u8(seq.duplicate_count);
    w.u8(seq.step);
    w.le16(seq.fill_channel);
    for (const auto& e : seq.entries) {
        w.u8(e.channel);
        w.u8(e.flags);
    }
    return Ok{};
}

Bytes copyRest(Reader& r) {
    auto rest = r.rest();
    return Bytes(rest.begin(), rest.end());
}

Result<Tlv> decodeSyncParams(std::span<const std::uint8_t> value) {
    constexpr auto type = static_cast<std::uint8_t>(TlvType::sync_params);
    if (value.size() < kSyncParamsFixed + kChannelSeqHeader) return malformed(type, "value too short");
    Reader r(value);
    SyncParamsTlv t;
    t.tx_channel = r.u8();
    t.tx_counter = r.le16();
    t.master_channel = r.u8();
    t.guard_time = r.u8();
    t.aw_period = r.le16();
    t.af_period = r.le16();
    t.flags = r.le16();
    t.aw_ext_length = r.le16();
    t.aw_common_length = r.le16();
    t.remaining_aw = r.le16();
    t.ext_min = r.u8();
    t.ext_max_multicast = r.u8();
    t.ext_max_unicast = r.u8();
    t.ext_max_af = r.u8();
    t.master_address = r.mac();
    t.presence_mode = r.u8();
    t.reserved = r.u8();
    t.aw_seq_number = r.le16();
    t.ap_beacon_alignment = r.le16();
    if (!readChannelSequence(r, t.channel_sequence)) return malformed(type, "channel list exceeds value");
    t.trailing = copyRest(r);
    return Tlv{std::move(t)};
}

Status encodeSyncParams(Writer& w, const SyncParamsTlv& t) {
    w.u8(t.tx_channel);
    w.le16(t.tx_counter);
    w.u8(t.master_channel);
    w.u8(t.guard_time);
    w.le16(t.aw_period);
    w.le16(t.af_period);
    w.le16(t.flags);
    w.le16(t.aw_ext_length);
    w.le16(t.aw_common_length);
    w.le16(t.remaining_aw);
    w.u8(t.ext_min);
    w.u8(t.ext_max_multicast);
    w.u8(t.ext_max_unicast);
    w.u8(t.ext_max_af);
    w.mac(t.master_address);
    w.u8(t.presence_mode);
    w.u8(t.reserved);
    w.le16(t.aw_seq_number);
    w.le16(t.ap_beacon_alignment);
    if (auto st = writeChannelSequence(w, t.channel_sequence); !st) return st;
    w.bytes(t.trailing);
    return Ok{};
}

struct ValueEncoder {
    Writer& w;

    Status operator()(const SyncParamsTlv& t) const { return encodeSyncParams(w, t); }
    Status operator()(const ElectionParamsTlv& t) const {
        w.u8(t.flags);
        w.le16(t.id);
        w.u8(t.distance_to_master);
        w.mac(t.master_address);
        w.le32(t.master_metric);
        w.le32(t.self_metric);
        w.bytes(t.trailing);
        return Ok{};
    }
    Status operator()(const ChannelSequenceTlv& t) const {
        if (auto st = writeChannelSequence(w, t.sequence); !st) return st;
        w.bytes(t.trailing);
        return Ok{};
    }
    Status operator()(const ElectionParamsV2Tlv& t) const {
        w.mac(t.master_address);
        w.mac(t.sync_address);
        w.le32(t.master_counter);
        w.le32(t.distance_to_master);
        w.le32(t.master_metric);
        w.le32(t.self_metric);
        w.le32(t.self_counter);
        w.bytes(t.trailing);
        return Ok{};
    }
    Status operator()(const SyncTreeTlv& t) const {
        for (const auto& m : t.path) w.mac(m);
        return Ok{};
    }
    Status operator()(const VersionTlv& t) const {
        w.u8(static_cast<std::uint8_t>((t.major & 0x0f) << 4 | (t.minor & 0x0f)));
        w.u8(t.device_class);
        return Ok{};
    }
    Status operator()(const DataPathStateTlv& t) const {
        w.le16(t.flags);
        w.mac(t.infra_bssid);
        w.mac(t.infra_address);
        w.mac(t.awdl_address);
        w.bytes(t.trailing);
        return Ok{};
    }
    Status operator()(const OpaqueTlv& t) const {
        w.bytes(t.value);
        return Ok{};
    }
};

}  // namespace

std::uint8_t tlvType(const Tlv& tlv) noexcept {
    struct Visitor {
        std::uint8_t operator()(const SyncParamsTlv&) const { return 4; }
        std::uint8_t operator()(const ElectionParamsTlv&) const { return 5; }
        std::uint8_t operator()(const ChannelSequenceTlv&) const { return 18; }
        std::uint8_t operator()(const ElectionParamsV2Tlv&) const { return 24; }
        std::uint8_t operator()(const SyncTreeTlv&) const { return 20; }
        std::uint8_t operator()(const VersionTlv&) const { return 21; }
        std::uint8_t operator()(const DataPathStateTlv&) const { return 12; }
        std::uint8_t operator()(const OpaqueTlv& t) const { return t.type; }
    };
    return std::visit(Visitor{}, tlv);
}

const char* tlvName(std::uint8_t type) noexcept {
    switch (static_cast<TlvType>(type)) {
        case TlvType::service_response: return "service_response";
        case TlvType::sync_params: return "sync_params";
        case TlvType::election_params: return "election_params";
        case TlvType::service_params: return "service_params";
        case TlvType::ht_caps: return "ht_capabilities";
        case TlvType::data_path_state: return "data_path_state";
        case TlvType::arpa: return "arpa";
        case TlvType::vht_caps: return "vht_capabilities";
        case TlvType::channel_sequence: return "channel_sequence";
        case TlvType::sync_tree: return "sync_tree";
        case TlvType::version: return "version";
        case TlvType::election_params_v2: return "election_params_v2";
    }
    return "unknown";
}

Result<Tlv> decodeTlvValue(std::uint8_t type, std::span<const std::uint8_t> value) {
    Reader r(value);
    switch (static_cast<TlvType>(type)) {
        case TlvType::sync_params:
            return decodeSyncParams(value);

        case TlvType::election_params: {
            if (value.size() < kElectionFixed) return malformed(type, "value too short");
            ElectionParamsTlv t;
            t.flags = r.u8();
            t.id = r.le16();
            t.distance_to_master = r.u8();
            t.master_address = r.mac();
            t.master_metric = r.le32();
            t.self_metric = r.le32();
            t.trailing = copyRest(r);
            return Tlv{std::move(t)};
        }

        case TlvType::channel_sequence: {
            ChannelSequenceTlv t;
            if (value.size() < kChannelSeqHeader || !readChannelSequence(r, t.sequence))
                return malformed(type, "channel list exceeds value");
            t.trailing = copyRest(r);
            return Tlv{std::move(t)};
        }

        case TlvType::election_params_v2: {
            if (value.size() < kElectionV2Fixed) return malformed(type, "value too short");
            ElectionParamsV2Tlv t;
            t.master_address = r.mac();
            t.sync_address = r.mac();
            t.master_counter = r.le32();
            t.distance_to_master = r.le32();
            t.master_metric = r.le32();
            t.self_metric = r.le32();
            t.self_counter = r.le32();
            t.trailing = copyRest(r);
            return Tlv{std::move(t)};
        }

        case TlvType::sync_tree: {
            if (value.size() % 6 != 0) return malformed(type, "length not a multiple of 6");
            SyncTreeTlv t;
            while (r.remaining() > 0) t.path.push_back(r.mac());
            return Tlv{std::move(t)};
        }

        case TlvType::version: {
            if (value.size() != 2) return malformed(type, "length must be 2");
            VersionTlv t;
            const std::uint8_t v = r.u8();
            t.major = static_cast<std::uint8_t>(v >> 4);
            t.minor = static_cast<std::uint8_t>(v & 0x0f);
            t.device_class = r.u8();
            return Tlv{t};
        }

        case TlvType::data_path_state: {
            if (value.size() < kDataPathFixed) return malformed(type, "value too short");
            DataPathStateTlv t;
            t.flags = r.le16();
            t.infra_bssid = r.mac();
            t.infra_address = r.mac();
            t.awdl_address = r.mac();
            t.trailing = copyRest(r);
            return Tlv{std::move(t)};
        }

        case TlvType::service_response:
        case TlvType::service_params:
        case TlvType::ht_caps:
        case TlvType::arpa:
        case TlvType::vht_caps:
            break;
    }
    return Tlv{OpaqueTlv{type, Bytes(value.begin(), value.end())}};
}

Status appendTlv(Bytes& out, const Tlv& tlv) {
    const std::size_t start = out.size();
    Writer w(out);
    w.u8(tlvType(tlv));
    w.le16(0);  // patched below
    if (auto st = std::visit(ValueEncoder{w}, tlv); !st) {
        out.resize(start);
        return st;
    }
    const std::size_t len = out.size() - start - 3;
    if (len > kMaxTlvValue) {
        out.resize(start);
        return makeError(Errc::oversize_tlv, std::string(tlvName(tlvType(tlv))) + " value is " +
                                                 std::to_string(len) + " bytes");
    }
    out[start + 1] = static_cast<std::uint8_t>(len);
    out[start + 2] = static_cast<std::uint8_t>(len >> 8);
    return Ok{};
}

Result<ActionFrame> decodeActionFrame(std::span<const std::uint8_t> bytes, DecodeOptions options) {
    bytes = stripFcs(bytes, options);
    if (bytes.size() < kDot11HeaderLen) return truncated("802.11 header");
    if (bytes[0] != kFcAction) return makeError(Errc::not_awdl, "not an action frame");

    Reader r(bytes);
    ActionFrame frame;
    frame.envelope = readEnvelope(r, FrameKind::action);
    if (frame.envelope.bssid != kAwdlBssid) return makeError(Errc::not_awdl, "foreign BSSID");

    if (r.remaining() < 4) return truncated("vendor action header");
    if (r.u8() != kVendorCategory) return makeError(Errc::not_awdl, "category is not vendor-specific");
    const auto oui = r.take(3);
    if (!std::equal(oui.begin(), oui.end(), kAppleOui.begin())) return makeError(Errc::not_awdl, "foreign OUI");

    if (r.remaining() < kActionFixedLen - 4) return truncated("AWDL fixed header");
    if (r.u8() != kAwdlType) return makeError(Errc::bad_fixed_header, "AWDL type is not 8");
    frame.header.version = r.u8();
    frame.header.subtype = r.u8();
    frame.header.reserved = r.u8();
    frame.header.phy_tx_time = r.le32();
    frame.header.target_tx_time = r.le32();

    while (r.remaining() > 0) {
        const std::size_t at = r.position();
        if (r.remaining() < 3) return truncated("TLV header at offset " + std::to_string(at));
        const std::uint8_t type = r.u8();
        const std::uint16_t len = r.le16();
        if (len > r.remaining())
            return truncated(std::string(tlvName(type)) + " length " + std::to_string(len) + " exceeds " +
                             std::to_string(r.remaining()) + " remaining bytes");
        auto tlv = decodeTlvValue(type, r.take(len));
        if (!tlv) return tlv.error();
        frame.tlvs.push_back(std::move(tlv).value());
    }
    return frame;
}

Result<Bytes> encodeActionFrame(const ActionFrame& frame) {
    Bytes out;
    out.reserve(kDot11HeaderLen + kActionFixedLen + 256);
    Writer w(out);
    Dot11Envelope env = frame.envelope;
    env.kind = FrameKind::action;
    writeEnvelope(w, env);
    w.u8(kVendorCategory);
    w.bytes(kAppleOui);
    w.u8(kAwdlType);
    w.u8(frame.header.version);
    w.u8(frame.header.subtype);
    w.u8(frame.header.reserved);
    w.le32(frame.header.phy_tx_time);
    w.le32(frame.header.target_tx_time);
    for (const auto& tlv : frame.tlvs)
        if (auto st = appendTlv(out, tlv); !st) return st.error();
    return out;
}

Result<DataFrame> decodeDataFrame(std::span<const std::uint8_t> bytes, DecodeOptions options) {
    bytes = stripFcs(bytes, options);
    if (bytes.size() < kDot11HeaderLen) return truncated("802.11 header");
    if (bytes[0] != kFcData) return makeError(Errc::not_awdl, "not a plain data frame");
    if ((bytes[1] & 0x03) != 0) return makeError(Errc::not_awdl, "To-DS/From-DS set");

    Reader r(bytes);
    DataFrame frame;
    frame.envelope = readEnvelope(r, FrameKind::data);
    if (frame.envelope.bssid != kAwdlBssid) return makeError(Errc::not_awdl, "foreign BSSID");

    if (r.remaining() < kLlcSnap.size()) return truncated("LLC/SNAP header");
    const auto llc = r.take(kLlcSnap.size());
    if (!std::equal(llc.begin(), llc.end(), kLlcSnap.begin())) return makeError(Errc::bad_llc, "SNAP mismatch");

    if (r.remaining() < 8) return truncated("AWDL data header");
    const std::uint16_t magic = r.be16();
    if (magic != kDataMagic) return makeError(Errc::bad_magic, "magic bytes are not 03 04");
    frame.sequence_number = r.le16();
    frame.reserved = r.le16();
    frame.ethertype = r.be16();
    frame.payload = copyRest(r);
    return frame;
}

Result<Bytes> encodeDataFrame(const DataFrame& frame) {
    Bytes out;
    out.reserve(kDot11HeaderLen + 16 + frame.payload.size());
    Writer w(out);
    Dot11Envelope env = frame.envelope;
    env.kind = FrameKind::data;
    env.flags &= 0xfc;
    writeEnvelope(w, env);
    w.bytes(kLlcSnap);
    w.be16(kDataMagic);
    w.le16(frame.sequence_number);
    w.le16(frame.reserved);
    w.be16(frame.ethertype);
    w.bytes(frame.payload);
    return out;
}

FrameClass classifyFrame(std::span<const std::uint8_t> bytes) noexcept {
    if (bytes.size() < kDot11HeaderLen) return FrameClass::other;
    const MacAddress bssid{{bytes[16], bytes[17], bytes[18], bytes[19], bytes[20], bytes[21]}};
    if (bytes[0] == kFcAction) {
        if (bytes.size() < kDot11HeaderLen + 4) return FrameClass::other;
        const auto* body = bytes.data() + kDot11HeaderLen;
        if (body[0] == kVendorCategory && std::equal(kAppleOui.begin(), kAppleOui.end(), body + 1))
            return FrameClass::awdl_action;
        return FrameClass::other;
    }
    if (bytes[0] == kFcData && bssid == kAwdlBssid && bytes.size() >= kDot11HeaderLen + kLlcSnap.size() &&
        std::equal(kLlcSnap.begin(), kLlcSnap.begin() + 6, bytes.begin() + kDot11HeaderLen))
        return FrameClass::awdl_data;
    return FrameClass::other;
}

}  // namespace awdl::wire
