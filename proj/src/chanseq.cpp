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

#include "awdl/chanseq.hpp"

#include <algorithm>
#include <string>

namespace awdl::chanseq {

const char* loadKindName(LoadKind kind) noexcept {
    switch (kind) {
        case LoadKind::low_power: return "low_power";
        case LoadKind::idle: return "idle";
        case LoadKind::data_infra_50: return "data_infra_50";
        case LoadKind::data_infra_75: return "data_infra_75";
        case LoadKind::data: return "data";
    }
    return "unknown";
}

SlotIndex slotIndex(std::uint16_t aw_seq, int c, int step) noexcept {
    const int period = (c + 1) * (step + 1);
    SlotIndex idx;
    idx.expanded = static_cast<int>(aw_seq % period);
    idx.slot = idx.expanded / (step + 1);
    return idx;
}

const ChannelSlot& slotAt(const ChannelSlotMap& map, std::uint16_t aw_seq) noexcept {
    return map.slots[static_cast<std::size_t>(slotIndex(aw_seq, kSlots - 1, map.step).slot)];
}

std::optional<std::uint8_t> channelAt(const ChannelSlotMap& map, std::uint16_t aw_seq) noexcept {
    const auto& s = slotAt(map, aw_seq);
    if (!s.available()) return std::nullopt;
    return s.channel;
}

Result<ChannelSlotMap> buildSequence(const LoadState& state, const SocialChannels& social) {
    // One character per slot: p primary, s secondary, i AP channel, '.' empty.
    const char* pattern = nullptr;
    switch (state.kind) {
        case LoadKind::low_power: pattern = "p.......spp....."; break;
        case LoadKind::idle: pattern = "ppp.....spp....."; break;
        case LoadKind::data_infra_50: pattern = "ppppiiiispppiiii"; break;
        case LoadKind::data_infra_75: pattern = "ppppppiispppppii"; break;
        case LoadKind::data: pattern = "ppppppppsppppppp"; break;
    }
    const bool needsAp = state.kind == LoadKind::data_infra_50 || state.kind == LoadKind::data_infra_75;
    if (needsAp && !state.ap_channel)
        return makeError(Errc::missing_ap_channel, loadKindName(state.kind));

    ChannelSlotMap map;
    for (std::size_t k = 0; k < kSlots; ++k) {
        auto& slot = map.slots[k];
        switch (pattern[k]) {
            case 'p': slot.channel = social.primary; break;
            case 's': slot.channel = social.secondary; break;
            case 'i':
                slot.channel = *state.ap_channel;
                slot.infra = true;
                break;
            default: break;
        }
    }
    return map;
}

double airtimeFraction(const ChannelSlotMap& map) noexcept {
    const auto n = std::count_if(map.slots.begin(), map.slots.end(), [](const ChannelSlot& s) { return s.available(); });
    return static_cast<double>(n) / kSlots;
}

std::vector<CommonSlot> commonSlots(const ChannelSlotMap& a, const ChannelSlotMap& b) {
    std::vector<CommonSlot> out;
    for (std::size_t k = 0; k < kSlots; ++k) {
        const auto& sa = a.slots[k];
        const auto& sb = b.slots[k];
        if (sa.available() && sb.available() && sa.channel == sb.channel)
            out.push_back({static_cast<int>(k), sa.channel});
    }
    return out;
}

Result<double> ewEfficiency(int switch_time_tu, int guard_tu, int window_tu) {
    if (window_tu != 16 && window_tu != 64)
        return makeError(Errc::bad_window, "window must be 16 or 64 TU, got " + std::to_string(window_tu));
    const int usable = std::max(0, window_tu - switch_time_tu - 2 * guard_tu);
    return static_cast<double>(usable) / window_tu;
}

wire::ChannelSequence toWire(const ChannelSlotMap& map) {
    wire::ChannelSequence seq;
    seq.step = static_cast<std::uint8_t>(map.step);
    seq.entries.reserve(kSlots);
    for (const auto& s : map.slots) seq.entries.push_back({s.available() ? s.channel : std::uint8_t{0}, 0});
    return seq;
}

ChannelSlotMap fromWire(const wire::ChannelSequence& seq) {
    ChannelSlotMap map;
    map.step = seq.step;
    for (std::size_t k = 0; k < kSlots && k < seq.entries.size(); ++k) map.slots[k].channel = seq.entries[k].channel;
    return map;
}

}  // namespace awdl::chanseq
