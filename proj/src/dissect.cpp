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

#include "awdl/dissect.hpp"

#include <cstdio>
#include <string>

namespace awdl::dissect {

namespace {

std::string hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

std::string hex16(std::uint16_t v) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%04x", v);
    return buf;
}

Json channelSequenceJson(const wire::ChannelSequence& seq) {
    Json channels = Json::array();
    for (const auto& e : seq.entries) channels.push_back({{"channel", e.channel}, {"flags", e.flags}});
    return {
        {"channel_count", seq.entries.size()},
        {"encoding", seq.encoding},
        {"duplicate_count", seq.duplicate_count},
        {"step_count", seq.step},
        {"fill_channel", hex16(seq.fill_channel)},
        {"channels", channels},
    };
}

Json macList(const std::vector<MacAddress>& macs) {
    Json out = Json::array();
    for (const auto& m : macs) out.push_back(m.toString());
    return out;
}

struct ValueVisitor {
    Json operator()(const wire::SyncParamsTlv& t) const {
        Json j{
            {"tx_channel", t.tx_channel},
            {"tx_counter", t.tx_counter},
            {"master_channel", t.master_channel},
            {"guard_time", t.guard_time},
            {"aw_period", t.aw_period},
            {"af_period", t.af_period},
            {"flags", hex16(t.flags)},
            {"aw_ext_length", t.aw_ext_length},
            {"aw_common_length", t.aw_common_length},
            {"remaining_aw", t.remaining_aw},
            {"ext_min", t.ext_min},
            {"ext_max_multicast", t.ext_max_multicast},
            {"ext_max_unicast", t.ext_max_unicast},
            {"ext_max_af", t.ext_max_af},
            {"master_address", t.master_address.toString()},
            {"presence_mode", t.presence_mode},
            {"reserved", t.reserved},
            {"aw_seq_number", t.aw_seq_number},
            {"ap_beacon_alignment", t.ap_beacon_alignment},
            {"channel_sequence", channelSequenceJson(t.channel_sequence)},
        };
        if (!t.trailing.empty()) j["trailing_hex"] = hex(t.trailing);
        return j;
    }
    Json operator()(const wire::ChannelSequenceTlv& t) const {
        Json j = channelSequenceJson(t.sequence);
        if (!t.trailing.empty()) j["trailing_hex"] = hex(t.trailing);
        return j;
    }
    Json operator()(const wire::ElectionParamsTlv& t) const {
        Json j{
            {"flags", t.flags},
            {"id", t.id},
            {"distance_to_master", t.distance_to_master},
            {"master_address", t.master_address.toString()},
            {"master_metric", t.master_metric},
            {"self_metric", t.self_metric},
        };
        if (!t.trailing.empty()) j["trailing_hex"] = hex(t.trailing);
        return j;
    }
    Json operator()(const wire::ElectionParamsV2Tlv& t) const {
        Json j{
            {"master_address", t.master_address.toString()},
            {"sync_address", t.sync_address.toString()},
            {"master_counter", t.master_counter},
            {"distance_to_master", t.distance_to_master},
            {"master_metric", t.master_metric},
            {"self_metric", t.self_metric},
            {"self_counter", t.self_counter},
        };
        if (!t.trailing.empty()) j["trailing_hex"] = hex(t.trailing);
        return j;
    }
    Json operator()(const wire::SyncTreeTlv& t) const { return {{"path", macList(t.path)}}; }
    Json operator()(const wire::VersionTlv& t) const {
        return {{"major", t.major}, {"minor", t.minor}, {"device_class", t.device_class}};
    }
    Json operator()(const wire::DataPathStateTlv& t) const {
        Json j{
            {"flags", hex16(t.flags)},
            {"infra_bssid", t.infra_bssid.toString()},
            {"infra_address", t.infra_address.toString()},
            {"awdl_address", t.awdl_address.toString()},
        };
        if (!t.trailing.empty()) j["trailing_hex"] = hex(t.trailing);
        return j;
    }
    Json operator()(const wire::OpaqueTlv& t) const { return {{"hex", hex(t.value)}}; }
};

Json errorJson(const Error& e) { return {{"code", std::string(errcName(e.code))}, {"detail", e.detail}}; }

Json recordHeader(const pcap::CaptureRecord& r) {
    Json j{{"index", r.index}, {"timestamp_us", r.timestamp_us}};
    j["rssi"] = r.rssi ? Json(*r.rssi) : Json(nullptr);
    j["channel"] = r.channel ? Json(*r.channel) : Json(nullptr);
    j["fcs"] = r.has_fcs;
    return j;
}

}  // namespace

Json envelopeJson(const wire::Dot11Envelope& env) {
    return {
        {"frame_control", env.kind == wire::FrameKind::action ? "0xd0" : "0x08"},
        {"flags", env.flags},
        {"duration", env.duration},
        {"destination", env.destination.toString()},
        {"source", env.source.toString()},
        {"bssid", env.bssid.toString()},
        {"sequence_number", env.sequence_number},
        {"fragment_number", env.fragment_number},
    };
}

Json tlvJson(const wire::Tlv& tlv) {
    const std::uint8_t type = wire::tlvType(tlv);
    wire::Bytes encoded;
    const auto st = wire::appendTlv(encoded, tlv);
    Json j{
        {"type", type},
        {"name", wire::tlvName(type)},
        {"length", st ? encoded.size() - 3 : 0},
    };
    j["value"] = std::visit(ValueVisitor{}, tlv);
    return j;
}

Json actionFrameJson(const wire::ActionFrame& frame) {
    Json tlvs = Json::array();
    for (const auto& t : frame.tlvs) tlvs.push_back(tlvJson(t));
    const auto& h = frame.header;
    return {
        {"kind", "action"},
        {"dot11", envelopeJson(frame.envelope)},
        {"header",
         {
             {"category", wire::kVendorCategory},
             {"oui", "00:17:f2"},
             {"type", wire::kAwdlType},
             {"version", {{"major", h.version >> 4}, {"minor", h.version & 0x0f}}},
             {"subtype", h.subtype},
             {"subtype_name", h.isPsf() ? "psf" : h.isMif() ? "mif" : "other"},
             {"reserved", h.reserved},
             {"phy_tx_time", h.phy_tx_time},
             {"target_tx_time", h.target_tx_time},
         }},
        {"tlvs", tlvs},
    };
}

Json dataFrameJson(const wire::DataFrame& frame) {
    return {
        {"kind", "data"},
        {"dot11", envelopeJson(frame.envelope)},
        {"llc", "aa:aa:03:00:17:f2:08:00"},
        {"magic", "0x0304"},
        {"sequence_number", frame.sequence_number},
        {"reserved", hex16(frame.reserved)},
        {"ethertype", hex16(frame.ethertype)},
        {"payload_length", frame.payload.size()},
        {"payload_hex", hex(frame.payload)},
    };
}

std::vector<Json> dissectRecords(const std::vector<pcap::CaptureRecord>& records, const Options& options) {
    std::vector<Json> out;
    for (const auto& r : records) {
        Json j = recordHeader(r);
        if (r.error) {
            j["error"] = errorJson(*r.error);
            out.push_back(std::move(j));
            continue;
        }
        const auto body = r.body();
        switch (wire::classifyFrame(body)) {
            case wire::FrameClass::awdl_action: {
                auto f = wire::decodeActionFrame(body);
                if (f) {
                    j["frame"] = actionFrameJson(*f);
                } else {
                    j["error"] = errorJson(f.error());
                }
                out.push_back(std::move(j));
                break;
            }
            case wire::FrameClass::awdl_data: {
                auto f = wire::decodeDataFrame(body);
                if (f) {
                    j["frame"] = dataFrameJson(*f);
                } else {
                    j["error"] = errorJson(f.error());
                }
                out.push_back(std::move(j));
                break;
            }
            case wire::FrameClass::other:
                if (options.verbose) {
                    j["skipped"] = "not_awdl";
                    out.push_back(std::move(j));
                }
                break;
        }
    }
    return out;
}

}  // namespace awdl::dissect
