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

// AWDL time model. One TU is 1024 us, an AW lasts 16 TU, and with presence
// mode 4 the effective slot (EAW) is 64 TU. Receivers predict the start of
// the next EAW from the counter a sender puts into its Sync Parameters TLV:
//
//   T_AW = tx_counter * 1024 - (T_Tx,PHY - T_Tx,Target) + t_air + T_Rx
//
// All times are integer microseconds.

#include <cstdint>

#include "awdl/mac.hpp"
#include "awdl/result.hpp"
#include "awdl/wire.hpp"

namespace awdl::sync {

struct TimeModel {
    std::int64_t tu_micros = 1024;
    int aw_length_tu = 16;
    int presence_mode = 4;
    int guard_tu = 3;

    constexpr int eawLengthTu() const noexcept { return aw_length_tu * presence_mode; }
    constexpr std::int64_t awMicros() const noexcept { return aw_length_tu * tu_micros; }
    constexpr std::int64_t eawMicros() const noexcept { return eawLengthTu() * tu_micros; }
};

inline constexpr TimeModel kDefaultTimeModel{};

struct SyncConfig {
    std::int64_t airtime_micros = 0;  // ignored by AWDL; injectable for tests
    std::int64_t misalign_threshold_micros = 3000;
};

struct RxMeta {
    std::int64_t rx_time = 0;  // receiver clock, microseconds
    int rssi = 0;              // dBm
};

struct AwPrediction {
    std::int64_t next_eaw_start = 0;
    std::uint16_t aw_seq_at_start = 0;
    MacAddress source_master;
    bool clock_regression = false;  // received PHY time was before target time

    bool operator==(const AwPrediction&) const = default;
};

/// Signed distance a - b on the 16-bit AW sequence circle, in [-2^15, 2^15).
constexpr std::int32_t seqDiff(std::uint16_t a, std::uint16_t b) noexcept {
    return static_cast<std::int16_t>(static_cast<std::uint16_t>(a - b));
}

/// Sender transmit delay (PHY minus target) from the fixed header. Negative
/// values are clamped to zero and reported through `regression`.
std::int64_t transmitDelay(const wire::ActionFrameHeader& header, bool* regression = nullptr) noexcept;

AwPrediction predictAwStart(const wire::SyncParamsTlv& params, const wire::ActionFrameHeader& header,
                            const RxMeta& rx, const SyncConfig& config = {},
                            const TimeModel& model = kDefaultTimeModel) noexcept;

struct LocalAwState {
    std::uint16_t aw_seq = 0;
    int tu_into_eaw = 0;      // 0..63
    int tu_to_next_eaw = 64;  // 1..64
    std::int64_t micros_into_eaw = 0;
    std::int64_t eaw_start = 0;  // local time the current EAW began
};

LocalAwState localAwState(std::int64_t now, const AwPrediction& anchor,
                          const TimeModel& model = kDefaultTimeModel) noexcept;

/// Re-express `p` relative to the EAW boundary numbered `target_seq`.
std::int64_t projectStart(const AwPrediction& p, std::uint16_t target_seq,
                          const TimeModel& model = kDefaultTimeModel) noexcept;

struct Misalignment {
    std::int64_t delta_micros = 0;
    bool exceeds_threshold = false;
};

Misalignment misalignment(const AwPrediction& prev, const AwPrediction& next, const SyncConfig& config = {},
                          const TimeModel& model = kDefaultTimeModel) noexcept;

/// The per-frame inputs of the sync-error estimator.
struct AfTiming {
    std::uint16_t tx_counter = 0;
    std::uint16_t aw_seq_number = 0;
    std::uint32_t phy_tx_time = 0;
    std::uint32_t target_tx_time = 0;
    std::int64_t rx_time = 0;

    static AfTiming of(const wire::SyncParamsTlv& params, const wire::ActionFrameHeader& header,
                       std::int64_t rx_time) noexcept {
        return {params.tx_counter, params.aw_seq_number, header.phy_tx_time, header.target_tx_time, rx_time};
    }
};

/// Synchronization error between a master and a slave frame whose AW sequence
/// numbers fall in the same EAW. Positive when the slave's EAW starts before
/// the master's.
Result<std::int64_t> syncError(const AfTiming& master, const AfTiming& slave,
                               const TimeModel& model = kDefaultTimeModel);

/// Share of an EAW left after a guard interval at both ends: 1 - 2g/eaw.
double usableEawFraction(int guard_tu = 3, int eaw_tu = 64) noexcept;

}  // namespace awdl::sync
