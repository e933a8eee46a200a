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

// Passive trace analysis: dual-sniffer clock calibration and the
// synchronization error between a master and the slaves following it.
//
//   xi = (tx_counter_M - tx_counter_S) * 1024 - (delay_M - delay_S) + rx_M - rx_S
//
// for a master and a slave frame whose AW sequence numbers fall in the same EAW.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "awdl/mac.hpp"
#include "awdl/pcap.hpp"
#include "awdl/result.hpp"
#include "awdl/sync.hpp"

namespace awdl::analysis {

/// The fields of one action frame that the estimator needs.
struct SyncObservation {
    std::int64_t rx_time = 0;
    MacAddress source;
    MacAddress advertised_master;
    sync::AfTiming timing;
    std::uint64_t key = 0;  // stable tie-breaker, e.g. capture index
};

std::optional<SyncObservation> observe(std::span<const std::uint8_t> frame, std::int64_t rx_time,
                                       std::uint64_t key = 0);

struct SyncSample {
    std::int64_t time_us = 0;  // slave frame receive time
    MacAddress slave;
    MacAddress master;
    std::int64_t xi_us = 0;
    bool operator==(const SyncSample&) const = default;
};

inline constexpr std::int64_t kPairWindowUs = 64 * 1024;

/// Pairs every frame that follows `master` with the nearest frame from the
/// master in the same EAW and no further than `window_us` away.
std::vector<SyncSample> pairSyncFrames(std::vector<SyncObservation> frames, const MacAddress& master,
                                       std::int64_t window_us = kPairWindowUs);

struct CalibrationResult {
    std::int64_t offset_us = 0;  // add to the second trace to express it on the first clock
    std::size_t sample_count = 0;
};

Result<CalibrationResult> calibrate(const std::vector<pcap::CaptureRecord>& a,
                                    const std::vector<pcap::CaptureRecord>& b);

struct Histogram {
    std::int64_t lower_us = -8192;
    std::int64_t bin_width_us = 512;
    std::vector<std::uint64_t> counts = std::vector<std::uint64_t>(32, 0);
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;
};

Histogram histogram(const std::vector<SyncSample>& samples);

struct SyncAnalysis {
    CalibrationResult calibration;
    std::vector<SyncSample> samples;
    double mean_us = 0.0;
    double stddev_us = 0.0;
    double fraction_within = 0.0;  // |xi| <= 3 TU
    Histogram histogram;
};

/// Calibrates `b` onto `a`'s clock, merges both traces and estimates the
/// sync error of every slave following `master`.
Result<SyncAnalysis> analyzeSync(const std::vector<pcap::CaptureRecord>& a, const std::vector<pcap::CaptureRecord>& b,
                                 const MacAddress& master);

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
    double fraction_within = 0.0;
};

Moments moments(const std::vector<SyncSample>& samples, std::int64_t bound_us = 3 * 1024);

}  // namespace awdl::analysis
