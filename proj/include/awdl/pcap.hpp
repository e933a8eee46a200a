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

// Classic libpcap files and the radiotap pseudo-header.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "awdl/result.hpp"
#include "awdl/wire.hpp"

namespace awdl::pcap {

inline constexpr std::uint32_t kLinkTypeIeee80211 = 105;
inline constexpr std::uint32_t kLinkTypeRadiotap = 127;

inline constexpr std::uint8_t kRadiotapFlagFcs = 0x10;

struct Packet {
    std::int64_t timestamp_us = 0;
    std::uint32_t original_length = 0;
    wire::Bytes data;
};

struct File {
    std::uint32_t linktype = kLinkTypeRadiotap;
    std::uint32_t snaplen = 65535;
    std::vector<Packet> packets;
};

Result<File> parse(std::span<const std::uint8_t> bytes);
Result<File> readFile(const std::string& path);
/// Little-endian, microsecond resolution.
wire::Bytes serialize(const File& file);
Status writeFile(const std::string& path, const File& file);

struct Radiotap {
    std::size_t length = 0;
    std::optional<std::uint64_t> tsft;
    std::uint8_t flags = 0;
    std::optional<std::uint16_t> frequency;
    std::optional<int> dbm_signal;

    bool hasFcs() const noexcept { return (flags & kRadiotapFlagFcs) != 0; }
};

Result<Radiotap> parseRadiotap(std::span<const std::uint8_t> bytes);
/// TSFT, Flags, Channel and antenna signal, 23 bytes.
wire::Bytes buildRadiotap(std::uint64_t tsft, std::uint8_t flags, std::uint16_t frequency, int dbm_signal);

std::uint16_t channelToFrequency(std::uint8_t channel) noexcept;
std::uint8_t frequencyToChannel(std::uint16_t mhz) noexcept;

/// One captured 802.11 frame with the metadata the analyzers use.
struct CaptureRecord {
    std::string source_id;
    std::size_t index = 0;
    std::int64_t timestamp_us = 0;  // TSFT when present, else the pcap timestamp
    std::optional<int> rssi;
    std::optional<std::uint8_t> channel;
    bool has_fcs = false;
    wire::Bytes frame;  // 802.11 frame, FCS still attached when has_fcs
    std::optional<Error> error;  // radiotap could not be parsed

    std::span<const std::uint8_t> body() const noexcept;  // frame without FCS
};

std::vector<CaptureRecord> toRecords(const File& file, const std::string& source_id);
Result<std::vector<CaptureRecord>> loadRecords(const std::string& path, const std::string& source_id);

}  // namespace awdl::pcap
