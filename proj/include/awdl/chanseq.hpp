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

// Channel sequence semantics. A sequence lists c+1 = 16 slots; with step = 3
// each slot spans four AWs (one EAW), so a full sequence covers 64 AWs:
//
//   expanded = i mod ((c + 1) * (step + 1)),   slot = expanded / (step + 1)

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "awdl/result.hpp"
#include "awdl/wire.hpp"

namespace awdl::chanseq {

inline constexpr int kSlots = 16;
inline constexpr int kStep = 3;
inline constexpr int kPeriodAw = kSlots * (kStep + 1);
inline constexpr std::int64_t kPeriodMicros = std::int64_t{kPeriodAw} * 16 * 1024;
inline constexpr int kSecondarySlot = 8;  // 0-indexed; the ninth slot is always channel 6

struct SocialChannels {
    std::uint8_t primary = 44;
    std::uint8_t secondary = 6;
    std::uint8_t alt_primary = 149;

    /// Region variant using 149 as the primary channel.
    static SocialChannels alternate() { return {149, 6, 44}; }
    bool operator==(const SocialChannels&) const = default;
};

/// A slot either names a channel on which the node is available for AWDL,
/// parks the radio on the infrastructure channel, or is empty.
struct ChannelSlot {
    std::uint8_t channel = 0;  // 0 = unavailable
    bool infra = false;

    bool available() const noexcept { return channel != 0 && !infra; }
    /// Channel the radio is tuned to, if any.
    std::uint8_t radioChannel() const noexcept { return channel; }
    bool operator==(const ChannelSlot&) const = default;
};

struct ChannelSlotMap {
    std::array<ChannelSlot, kSlots> slots{};
    int step = kStep;

    int periodAw() const noexcept { return kSlots * (step + 1); }
    bool operator==(const ChannelSlotMap&) const = default;
};

enum class LoadKind { low_power, idle, data_infra_50, data_infra_75, data };

struct LoadState {
    LoadKind kind = LoadKind::idle;
    std::optional<std::uint8_t> ap_channel;

    bool operator==(const LoadState&) const = default;
};

const char* loadKindName(LoadKind kind) noexcept;

struct SlotIndex {
    int expanded = 0;  // 0 .. (c+1)(step+1)-1
    int slot = 0;      // 0 .. c
};

SlotIndex slotIndex(std::uint16_t aw_seq, int c = kSlots - 1, int step = kStep) noexcept;

/// Channel for AW `aw_seq`, or nullopt when the slot is not available.
std::optional<std::uint8_t> channelAt(const ChannelSlotMap& map, std::uint16_t aw_seq) noexcept;
const ChannelSlot& slotAt(const ChannelSlotMap& map, std::uint16_t aw_seq) noexcept;

Result<ChannelSlotMap> buildSequence(const LoadState& state, const SocialChannels& social = {});

double airtimeFraction(const ChannelSlotMap& map) noexcept;

struct CommonSlot {
    int slot = 0;
    std::uint8_t channel = 0;
    bool operator==(const CommonSlot&) const = default;
};

/// Slots in which both maps are available on the same channel.
std::vector<CommonSlot> commonSlots(const ChannelSlotMap& a, const ChannelSlotMap& b);

/// Usable share of a window once a channel switch and a guard interval at
/// both ends are subtracted. Windows are a single AW (16 TU) or an EAW (64 TU).
Result<double> ewEfficiency(int switch_time_tu = 8, int guard_tu = 3, int window_tu = 64);

/// Wire form: infra and empty slots are advertised as channel 0.
wire::ChannelSequence toWire(const ChannelSlotMap& map);
ChannelSlotMap fromWire(const wire::ChannelSequence& seq);

}  // namespace awdl::chanseq
