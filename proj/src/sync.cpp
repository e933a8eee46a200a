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

#include "awdl/sync.hpp"

#include <cstdlib>
#include <string>

namespace awdl::sync {

namespace {

std::int64_t floorDiv(std::int64_t a, std::int64_t b) noexcept {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t delayOf(std::uint32_t phy, std::uint32_t target, bool* regression) noexcept {
    // 32-bit microsecond stamps wrap every ~71 minutes
    const auto delay = static_cast<std::int32_t>(phy - target);
    if (regression) *regression = delay < 0;
    return delay < 0 ? 0 : delay;
}

std::uint16_t nextEawSeq(std::uint16_t seq, int presence) noexcept {
    const int p = presence > 0 ? presence : 1;
    return static_cast<std::uint16_t>((seq / p) * p + p);
}

}  // namespace

std::int64_t transmitDelay(const wire::ActionFrameHeader& header, bool* regression) noexcept {
    return delayOf(header.phy_tx_time, header.target_tx_time, regression);
}

AwPrediction predictAwStart(const wire::SyncParamsTlv& params, const wire::ActionFrameHeader& header,
                            const RxMeta& rx, const SyncConfig& config, const TimeModel& model) noexcept {
    AwPrediction p;
    const std::int64_t delay = transmitDelay(header, &p.clock_regression);
    p.next_eaw_start = std::int64_t{params.tx_counter} * model.tu_micros - delay + config.airtime_micros + rx.rx_time;
    p.aw_seq_at_start = nextEawSeq(params.aw_seq_number, model.presence_mode);
    p.source_master = params.master_address;
    return p;
}

LocalAwState localAwState(std::int64_t now, const AwPrediction& anchor, const TimeModel& model) noexcept {
    const std::int64_t delta = now - anchor.next_eaw_start;
    const std::int64_t awIndex = floorDiv(delta, model.awMicros());
    const std::int64_t eawIndex = floorDiv(delta, model.eawMicros());

    LocalAwState s;
    s.aw_seq = static_cast<std::uint16_t>(anchor.aw_seq_at_start + static_cast<std::uint64_t>(awIndex));
    s.eaw_start = anchor.next_eaw_start + eawIndex * model.eawMicros();
    s.micros_into_eaw = now - s.eaw_start;
    s.tu_into_eaw = static_cast<int>(s.micros_into_eaw / model.tu_micros);
    s.tu_to_next_eaw = model.eawLengthTu() - s.tu_into_eaw;
    return s;
}

std::int64_t projectStart(const AwPrediction& p, std::uint16_t target_seq, const TimeModel& model) noexcept {
    return p.next_eaw_start + std::int64_t{seqDiff(target_seq, p.aw_seq_at_start)} * model.awMicros();
}

Misalignment misalignment(const AwPrediction& prev, const AwPrediction& next, const SyncConfig& config,
                          const TimeModel& model) noexcept {
    Misalignment m;
    m.delta_micros = next.next_eaw_start - projectStart(prev, next.aw_seq_at_start, model);
    m.exceeds_threshold = std::llabs(m.delta_micros) > config.misalign_threshold_micros;
    return m;
}

Result<std::int64_t> syncError(const AfTiming& master, const AfTiming& slave, const TimeModel& model) {
    const int p = model.presence_mode;
    if (master.aw_seq_number / p != slave.aw_seq_number / p)
        return makeError(Errc::not_same_eaw, "master seq " + std::to_string(master.aw_seq_number) + ", slave seq " +
                                                 std::to_string(slave.aw_seq_number));
    const std::int64_t txMaster = delayOf(master.phy_tx_time, master.target_tx_time, nullptr);
    const std::int64_t txSlave = delayOf(slave.phy_tx_time, slave.target_tx_time, nullptr);
    return (std::int64_t{master.tx_counter} - std::int64_t{slave.tx_counter}) * model.tu_micros -
           (txMaster - txSlave) + master.rx_time - slave.rx_time;
}

double usableEawFraction(int guard_tu, int eaw_tu) noexcept {
    return 1.0 - (2.0 * guard_tu) / static_cast<double>(eaw_tu);
}

}  // namespace awdl::sync
