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

// AWDL frame codec: vendor-specific action frames (PSF/MIF) with their TLVs,
// and the LLC/SNAP-encapsulated data frames. All multi-byte TLV fields are
// little-endian. Frames are handled without the trailing FCS.

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "awdl/mac.hpp"
#include "awdl/result.hpp"

namespace awdl::wire {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kVendorCategory = 127;
inline constexpr std::array<std::uint8_t, 3> kAppleOui{0x00, 0x17, 0xf2};
inline constexpr std::uint8_t kAwdlType = 8;
inline constexpr std::uint16_t kDataMagic = 0x0304;
inline constexpr std::uint16_t kSnapProtocolId = 0x0800;
inline constexpr std::uint16_t kEthertypeIpv6 = 0x86dd;
inline constexpr std::size_t kDot11HeaderLen = 24;
inline constexpr std::size_t kActionFixedLen = 16;  // category .. target tx time
inline constexpr std::size_t kMaxTlvValue = 0xffff;

enum class FrameKind : std::uint8_t { action, data };

struct Dot11Envelope {
    FrameKind kind = FrameKind::action;
    std::uint8_t flags = 0;  // second frame-control octet, preserved verbatim
    std::uint16_t duration = 0;
    MacAddress destination = kBroadcast;
    MacAddress source{};
    MacAddress bssid = kAwdlBssid;
    std::uint16_t sequence_number = 0;  // 12 bits
    std::uint8_t fragment_number = 0;   // 4 bits

    bool operator==(const Dot11Envelope&) const = default;
};

enum class Subtype : std::uint8_t { psf = 0, mif = 3 };

struct ActionFrameHeader {
    std::uint8_t version = 0x10;  // "1.0": major in the high nibble
    std::uint8_t subtype = static_cast<std::uint8_t>(Subtype::psf);
    std::uint8_t reserved = 0;
    std::uint32_t phy_tx_time = 0;     // microseconds
    std::uint32_t target_tx_time = 0;  // microseconds

    bool isPsf() const noexcept { return subtype == static_cast<std::uint8_t>(Subtype::psf); }
    bool isMif() const noexcept { return subtype == static_cast<std::uint8_t>(Subtype::mif); }
    bool operator==(const ActionFrameHeader&) const = default;
};

enum class TlvType : std::uint8_t {
    service_response = 2,
    sync_params = 4,
    election_params = 5,
    service_params = 6,
    ht_caps = 7,
    data_path_state = 12,
    arpa = 16,
    vht_caps = 17,
    channel_sequence = 18,
    sync_tree = 20,
    version = 21,
    election_params_v2 = 24,
};

/// One entry of the announced channel list. The low byte is the channel
/// number (0 = not available); the high byte depends on the encoding and is
/// carried unchanged.
struct ChannelEntry {
    std::uint8_t channel = 0;
    std::uint8_t flags = 0;
    bool operator==(const ChannelEntry&) const = default;
};

/// The count byte on the wire is entries.size() - 1 (15 for a 16-entry list).
struct ChannelSequence {
    std::uint8_t encoding = 0;
    std::uint8_t duplicate_count = 0;
    std::uint8_t step = 3;
    std::uint16_t fill_channel = 0xffff;
    std::vector<ChannelEntry> entries;

    bool operator==(const ChannelSequence&) const = default;
};

struct SyncParamsTlv {
    std::uint8_t tx_channel = 0;
    std::uint16_t tx_counter = 0;  // TUs until the next EAW
    std::uint8_t master_channel = 0;
    std::uint8_t guard_time = 0;
    std::uint16_t aw_period = 16;
    std::uint16_t af_period = 110;
    std::uint16_t flags = 0;
    std::uint16_t aw_ext_length = 16;
    std::uint16_t aw_common_length = 16;
    std::uint16_t remaining_aw = 0;
    std::uint8_t ext_min = 3;
    std::uint8_t ext_max_multicast = 3;
    std::uint8_t ext_max_unicast = 3;
    std::uint8_t ext_max_af = 3;
    MacAddress master_address;
    std::uint8_t presence_mode = 4;
    std::uint8_t reserved = 0;
    std::uint16_t aw_seq_number = 0;
    std::uint16_t ap_beacon_alignment = 0;
    ChannelSequence channel_sequence;
    Bytes trailing;

    bool operator==(const SyncParamsTlv&) const = default;
};

struct ChannelSequenceTlv {
    ChannelSequence sequence;
    Bytes trailing;
    bool operator==(const ChannelSequenceTlv&) const = default;
};

struct ElectionParamsTlv {
    std::uint8_t flags = 0;
    std::uint16_t id = 0;
    std::uint8_t distance_to_master = 0;
    MacAddress master_address;
    std::uint32_t master_metric = 0;
    std::uint32_t self_metric = 0;
    Bytes trailing;

    bool operator==(const ElectionParamsTlv&) const = default;
};

struct ElectionParamsV2Tlv {
    MacAddress master_address;
    MacAddress sync_address;
    std::uint32_t master_counter = 0;
    std::uint32_t distance_to_master = 0;
    std::uint32_t master_metric = 0;
    std::uint32_t self_metric = 0;
    std::uint32_t self_counter = 0;
    Bytes trailing;

    bool operator==(const ElectionParamsV2Tlv&) const = default;
};

/// Path from the announcing node's parent up to the top master. A top master
/// announces a single-element path naming itself.
struct SyncTreeTlv {
    std::vector<MacAddress> path;
    bool operator==(const SyncTreeTlv&) const = default;
};

struct VersionTlv {
    std::uint8_t major = 3;  // 4 bits
    std::uint8_t minor = 0;  // 4 bits
    std::uint8_t device_class = 1;  // 1 = macOS, 2 = iOS

    bool operator==(const VersionTlv&) const = default;
};

struct DataPathStateTlv {
    std::uint16_t flags = 0;
    MacAddress infra_bssid;
    MacAddress infra_address;
    MacAddress awdl_address;
    Bytes trailing;

    bool operator==(const DataPathStateTlv&) const = default;
};

/// Service discovery, HT/VHT capabilities and any unrecognized type: the
/// value is kept as raw bytes.
struct OpaqueTlv {
    std::uint8_t type = 0;
    Bytes value;
    bool operator==(const OpaqueTlv&) const = default;
};

using Tlv = std::variant<SyncParamsTlv, ElectionParamsTlv, ChannelSequenceTlv, ElectionParamsV2Tlv, SyncTreeTlv,
                         VersionTlv, DataPathStateTlv, OpaqueTlv>;

std::uint8_t tlvType(const Tlv& tlv) noexcept;
const char* tlvName(std::uint8_t type) noexcept;

struct ActionFrame {
    Dot11Envelope envelope;
    ActionFrameHeader header;
    std::vector<Tlv> tlvs;

    template <class T>
    const T* find() const {
        for (const auto& tlv : tlvs)
            if (const auto* p = std::get_if<T>(&tlv)) return p;
        return nullptr;
    }

    bool operator==(const ActionFrame&) const = default;
};

struct DataFrame {
    Dot11Envelope envelope{.kind = FrameKind::data};
    std::uint16_t sequence_number = 0;
    std::uint16_t reserved = 0;
    std::uint16_t ethertype = kEthertypeIpv6;
    Bytes payload;

    bool operator==(const DataFrame&) const = default;
};

struct DecodeOptions {
    bool has_fcs = false;  // strip a trailing 4-byte FCS before decoding
};

Result<ActionFrame> decodeActionFrame(std::span<const std::uint8_t> bytes, DecodeOptions options = {});
Result<Bytes> encodeActionFrame(const ActionFrame& frame);

Result<DataFrame> decodeDataFrame(std::span<const std::uint8_t> bytes, DecodeOptions options = {});
Result<Bytes> encodeDataFrame(const DataFrame& frame);

/// Decode a single TLV value (without its 3-byte type/length prefix).
Result<Tlv> decodeTlvValue(std::uint8_t type, std::span<const std::uint8_t> value);
/// Encode a single TLV including type and length.
Status appendTlv(Bytes& out, const Tlv& tlv);

enum class FrameClass { awdl_action, awdl_data, other };

/// Cheap header inspection used by the dissector to skip foreign traffic.
FrameClass classifyFrame(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace awdl::wire
