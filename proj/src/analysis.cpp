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

#include "awdl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>

namespace awdl::analysis {

namespace {

std::string keyOf(std::span<const std::uint8_t> body) { return {body.begin(), body.end()}; }

std::int64_t median(std::vector<std::int64_t> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    const std::int64_t sum = v[n / 2 - 1] + v[n / 2];
    return sum >= 0 ? sum / 2 : -((-sum + 1) / 2);
}

}  // namespace

std::optional<SyncObservation> observe(std::span<const std::uint8_t> frame, std::int64_t rx_time, std::uint64_t key) {
    if (wire::classifyFrame(frame) != wire::FrameClass::awdl_action) return std::nullopt;
    auto decoded = wire::decodeActionFrame(frame);
    if (!decoded) return std::nullopt;
    const auto* sp = decoded->find<wire::SyncParamsTlv>();
    if (!sp) return std::nullopt;
    SyncObservation o;
    o.rx_time = rx_time;
    o.source = decoded->envelope.source;
    o.advertised_master = sp->master_address;
    o.timing = sync::AfTiming::of(*sp, decoded->header, rx_time);
    o.key = key;
    return o;
}

std::vector<SyncSample> pairSyncFrames(std::vector<SyncObservation> frames, const MacAddress& master,
                                       std::int64_t window_us) {
    std::sort(frames.begin(), frames.end(), [](const SyncObservation& x, const SyncObservation& y) {
        return std::tie(x.rx_time, x.key) < std::tie(y.rx_time, y.key);
    });
    std::vector<const SyncObservation*> masters;
    for (const auto& f : frames)
        if (f.source == master) masters.push_back(&f);

    std::vector<SyncSample> out;
    for (const auto& s : frames) {
        if (s.source == master || s.advertised_master != master) continue;
        const int eaw = s.timing.aw_seq_number / 4;
        auto lo = std::lower_bound(masters.begin(), masters.end(), s.rx_time - window_us,
                                   [](const SyncObservation* m, std::int64_t t) { return m->rx_time < t; });
        const SyncObservation* best = nullptr;
        std::int64_t bestGap = 0;
        for (auto it = lo; it != masters.end() && (*it)->rx_time <= s.rx_time + window_us; ++it) {
            if ((*it)->timing.aw_seq_number / 4 != eaw) continue;
            const std::int64_t gap = std::llabs((*it)->rx_time - s.rx_time);
            if (!best || gap < bestGap) {
                best = *it;
                bestGap = gap;
            }
        }
        if (!best) continue;
        auto xi = sync::syncError(best->timing, s.timing);
        if (!xi) continue;
        out.push_back({s.rx_time, s.source, master, *xi});
    }
    return out;
}

Result<CalibrationResult> calibrate(const std::vector<pcap::CaptureRecord>& a,
                                    const std::vector<pcap::CaptureRecord>& b) {
    std::map<std::string, std::vector<std::int64_t>> seen;
    for (const auto& r : b)
        if (!r.error) seen[keyOf(r.body())].push_back(r.timestamp_us);

    std::vector<std::int64_t> diffs;
    for (const auto& r : a) {
        if (r.error) continue;
        auto it = seen.find(keyOf(r.body()));
        if (it == seen.end()) continue;
        // repeated bodies: pair with the nearest timestamp
        std::int64_t best = it->second.front();
        for (std::int64_t t : it->second)
            if (std::llabs(r.timestamp_us - t) < std::llabs(r.timestamp_us - best)) best = t;
        diffs.push_back(r.timestamp_us - best);
    }
    if (diffs.empty()) return makeError(Errc::no_common_frames, "no frame appears in both captures");
    return CalibrationResult{median(diffs), diffs.size()};
}

Histogram histogram(const std::vector<SyncSample>& samples) {
    Histogram h;
    const std::int64_t upper = h.lower_us + h.bin_width_us * static_cast<std::int64_t>(h.counts.size());
    for (const auto& s : samples) {
        if (s.xi_us < h.lower_us) {
            ++h.underflow;
        } else if (s.xi_us >= upper) {
            ++h.overflow;
        } else {
            ++h.counts[static_cast<std::size_t>((s.xi_us - h.lower_us) / h.bin_width_us)];
        }
    }
    return h;
}

Moments moments(const std::vector<SyncSample>& samples, std::int64_t bound_us) {
    Moments m;
    if (samples.empty()) return m;
    double sum = 0.0;
    std::size_t within = 0;
    for (const auto& s : samples) {
        sum += static_cast<double>(s.xi_us);
        if (std::llabs(s.xi_us) <= bound_us) ++within;
    }
    const double n = static_cast<double>(samples.size());
    m.mean = sum / n;
    double sq = 0.0;
    for (const auto& s : samples) sq += (static_cast<double>(s.xi_us) - m.mean) * (static_cast<double>(s.xi_us) - m.mean);
    m.stddev = std::sqrt(sq / n);
    m.fraction_within = static_cast<double>(within) / n;
    return m;
}

Result<SyncAnalysis> analyzeSync(const std::vector<pcap::CaptureRecord>& a, const std::vector<pcap::CaptureRecord>& b,
                                 const MacAddress& master) {
    SyncAnalysis out;
    auto cal = calibrate(a, b);
    if (!cal) return cal.error();
    out.calibration = *cal;

    std::set<std::string> inA;
    std::vector<SyncObservation> frames;
    for (const auto& r : a) {
        if (r.error) continue;
        inA.insert(keyOf(r.body()));
        if (auto o = observe(r.body(), r.timestamp_us, r.index)) frames.push_back(*o);
    }
    for (const auto& r : b) {
        if (r.error || inA.contains(keyOf(r.body()))) continue;
        if (auto o = observe(r.body(), r.timestamp_us + cal->offset_us, (std::uint64_t{1} << 32) + r.index))
            frames.push_back(*o);
    }

    const bool anyMaster =
        std::any_of(frames.begin(), frames.end(), [&](const SyncObservation& o) { return o.source == master; });
    if (!anyMaster) return makeError(Errc::no_master_frames, master.toString());

    out.samples = pairSyncFrames(std::move(frames), master);
    if (out.samples.empty()) return makeError(Errc::no_pairs, "no slave frame shares an EAW with the master");
    const auto m = moments(out.samples);
    out.mean_us = m.mean;
    out.stddev_us = m.stddev;
    out.fraction_within = m.fraction_within;
    out.histogram = histogram(out.samples);
    return out;
}

}  // namespace awdl::analysis
