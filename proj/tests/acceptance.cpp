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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
//
//   acceptance <awdl_tool> <source dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "awdl/analysis.hpp"
#include "awdl/chanseq.hpp"
#include "awdl/dissect.hpp"
#include "awdl/pcap.hpp"
#include "awdl/sim.hpp"
#include "awdl/sync.hpp"
#include "awdl/wire.hpp"
#include "support/generators.hpp"
#include "support/golden.hpp"
#include "support/scenarios.hpp"
#include "support/schema_check.hpp"

namespace awdl {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using wire::Bytes;

std::string g_tool;
fs::path g_source;

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// --- 1 ----------------------------------------------------------------------

Outcome codecRoundTrip() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    gen::Rng rng(20260101);
    for (int k = 0; k < 10'000 && o.ok; ++k) {
        const auto f = gen::actionFrame(rng);
        auto bytes = wire::encodeActionFrame(f);
        o.require(bool(bytes), "action encode failed at " + std::to_string(k));
        if (!bytes) break;
        auto back = wire::decodeActionFrame(*bytes);
        o.require(back && *back == f, "action decode(encode(f)) != f at " + std::to_string(k));
        if (!back) break;
        auto again = wire::encodeActionFrame(*back);
        o.require(again && *again == *bytes, "action encode(decode(b)) != b at " + std::to_string(k));
    }
    for (int k = 0; k < 10'000 && o.ok; ++k) {
        const auto f = gen::dataFrame(rng);
        auto bytes = wire::encodeDataFrame(f);
        o.require(bool(bytes), "data encode failed at " + std::to_string(k));
        if (!bytes) break;
        auto back = wire::decodeDataFrame(*bytes);
        o.require(back && *back == f, "data decode(encode(f)) != f at " + std::to_string(k));
        if (!back) break;
        auto again = wire::encodeDataFrame(*back);
        o.require(again && *again == *bytes, "data encode(decode(b)) != b at " + std::to_string(k));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < 30.0, "took " + fmt("%.1f s", secs));
    if (o.ok) o.detail = "10000 action + 10000 data frames, " + fmt("%.2f s", secs);
    return o;
}

// --- 2 ----------------------------------------------------------------------

Outcome goldenVectors() {
    Outcome o;
    const MacAddress sender{{0x02, 0x11, 0x22, 0x33, 0x44, 0x55}};
    const std::string bssid = "00:25:00:ff:94:73";

    auto psf = wire::decodeActionFrame(golden::psf());
    o.require(bool(psf), "psf does not decode");
    if (!o.ok) return o;
    o.require(psf->header.isPsf() && psf->envelope.bssid.toString() == bssid && psf->envelope.source == sender,
              "psf envelope");
    const Bytes raw = golden::psf();
    o.require(raw[24] == 0x7f && raw[25] == 0x00 && raw[26] == 0x17 && raw[27] == 0xf2, "category/OUI bytes");
    o.require(psf->header.phy_tx_time == 0x12345 && psf->header.target_tx_time == 0x12300, "psf timestamps");
    o.require(psf->tlvs.size() == 8, "psf tlv count");

    const auto* sp = psf->find<wire::SyncParamsTlv>();
    o.require(sp && sp->tx_channel == 44 && sp->tx_counter == 48 && sp->master_channel == 44 && sp->aw_period == 16 &&
                  sp->af_period == 110 && sp->flags == 0x18 && sp->aw_ext_length == 16 && sp->aw_common_length == 16 &&
                  sp->remaining_aw == 12 && sp->ext_min == 3 && sp->ext_max_af == 3 && sp->master_address == sender &&
                  sp->presence_mode == 4 && sp->aw_seq_number == 0x1234 && sp->ap_beacon_alignment == 0,
              "sync parameters fields");

    auto cseq = wire::decodeActionFrame(golden::concat({golden::kActionEnvelope, golden::fixedHeader(3),
                                                        golden::channelSequenceTlv()}));
    const std::uint8_t expected[16] = {44, 44, 44, 0, 0, 0, 0, 0, 6, 44, 44, 0, 0, 0, 0, 0};
    const auto* cs = cseq ? cseq->find<wire::ChannelSequenceTlv>() : nullptr;
    bool csOk = cs && cs->sequence.entries.size() == 16 && cs->sequence.encoding == 3 && cs->sequence.step == 3 &&
                cs->sequence.duplicate_count == 0 && cs->sequence.fill_channel == 0xffff;
    for (std::size_t k = 0; csOk && k < 16; ++k) csOk = cs->sequence.entries[k].channel == expected[k];
    o.require(csOk, "channel sequence fields");

    auto mif = wire::decodeActionFrame(golden::mif());
    o.require(mif && mif->header.isMif() && mif->tlvs.size() == 9 && std::holds_alternative<wire::OpaqueTlv>(mif->tlvs[6]),
              "mif layout");

    auto ver = wire::decodeActionFrame(golden::versionOnlyMif());
    o.require(ver && ver->tlvs.size() == 1 && std::get<wire::VersionTlv>(ver->tlvs[0]) == (wire::VersionTlv{3, 1, 1}),
              "version tlv");

    auto data = wire::decodeDataFrame(golden::kDataFrame);
    o.require(data && data->envelope.bssid.toString() == bssid && data->sequence_number == 0x0102 &&
                  data->ethertype == 0x86dd && data->payload == Bytes({0x60, 0, 0, 0}),
              "data frame fields");
    const Bytes& d = golden::kDataFrame;
    o.require(d[28] == 0x17 && d[29] == 0xf2 && d[32] == 0x03 && d[33] == 0x04 && d[38] == 0x86 && d[39] == 0xdd,
              "data frame OUI/magic/ethertype bytes");

    for (const Bytes& g : {golden::psf(), golden::mif(), golden::versionOnlyMif()}) {
        auto f = wire::decodeActionFrame(g);
        o.require(f && wire::encodeActionFrame(*f).value() == g, "golden action frame does not re-encode");
    }
    o.require(data && wire::encodeDataFrame(*data).value() == golden::kDataFrame, "golden data frame does not re-encode");
    if (o.ok) o.detail = "PSF, MIF, data, Version, SyncParams, ChannelSequence";
    return o;
}

// --- 3 ----------------------------------------------------------------------

const chanseq::LoadState kStates[] = {
    {chanseq::LoadKind::low_power, std::nullopt},        {chanseq::LoadKind::idle, std::nullopt},
    {chanseq::LoadKind::data_infra_50, std::uint8_t{36}}, {chanseq::LoadKind::data_infra_75, std::uint8_t{36}},
    {chanseq::LoadKind::data, std::nullopt},
};

Outcome channelMapping() {
    Outcome o;
    const double airtime[] = {0.25, 0.375, 0.5, 0.75, 1.0};
    for (std::size_t s = 0; s < 5; ++s) {
        const auto m = *chanseq::buildSequence(kStates[s]);
        std::optional<std::uint8_t> table[64];
        for (int e = 0; e < 64; ++e) {
            const auto& slot = m.slots[static_cast<std::size_t>(e / 4)];
            table[e] = slot.available() ? std::optional(slot.channel) : std::nullopt;
        }
        for (std::uint32_t i = 0; i <= 0xffff && o.ok; ++i)
            o.require(chanseq::channelAt(m, static_cast<std::uint16_t>(i)) == table[i % 64],
                      std::string(chanseq::loadKindName(kStates[s].kind)) + " differs at i=" + std::to_string(i));
        o.require(m.slots[8].channel == 6, "ninth slot not channel 6");
        o.require(chanseq::airtimeFraction(m) == airtime[s], "airtime fraction");
    }
    if (o.ok) o.detail = "5 maps x 65536 indices; airtime 25/37.5/50/75/100%";
    return o;
}

// --- 4 ----------------------------------------------------------------------

Outcome periodAndEfficiency() {
    Outcome o;
    o.require(chanseq::kPeriodMicros == 1'048'576, "period");
    o.require(sync::usableEawFraction(3) == 0.90625, "usable EAW fraction " + fmt("%g", sync::usableEawFraction(3)));
    o.require(*chanseq::ewEfficiency(8, 3, 16) == 0.125, "16-TU efficiency");
    o.require(*chanseq::ewEfficiency(8, 3, 64) >= 0.78, "64-TU efficiency");
    if (o.ok)
        o.detail = "period 1048576 us; EAW usable 90.625%; EW 12.5% vs " +
                   fmt("%.2f%%", 100 * *chanseq::ewEfficiency(8, 3, 64));
    return o;
}

// --- helpers for timelines ----------------------------------------------------

// Master of `node` at time `t`, per the master timeline.
std::optional<MacAddress> masterAt(const sim::RunResult& r, const std::string& node, std::int64_t t) {
    std::optional<MacAddress> m;
    for (const auto& s : r.master_timeline) {
        if (s.time_us > t) break;
        if (s.node == node) m = s.master;
    }
    return m;
}

// Time at which `node` last switched masters.
std::int64_t lastMasterChange(const sim::RunResult& r, const std::string& node) {
    std::int64_t t = 0;
    std::optional<MacAddress> prev;
    for (const auto& s : r.master_timeline) {
        if (s.node != node) continue;
        if (!prev || *prev != s.master) t = s.time_us;
        prev = s.master;
    }
    return t;
}

std::map<std::string, std::uint32_t> finalMetrics(const sim::RunResult& r) {
    std::map<std::string, std::uint32_t> m;
    for (const auto& s : r.metric_timeline) m[s.node] = s.self_metric;
    return m;
}

// --- 5 ----------------------------------------------------------------------

sim::Scenario randomTopology(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    sim::Scenario sc;
    sc.name = "topology" + std::to_string(seed);
    sc.seed = seed;
    sc.duration_us = 8'000'000;
    sc.full_mesh = false;
    sc.record_events = false;
    const int n = 3 + static_cast<int>(rng() % 8);
    for (int k = 0; k < n; ++k) {
        sim::NodeSpec spec;
        spec.name = "n" + std::to_string(k);
        spec.config.address = randomAwdlMac(rng);
        spec.config.version = rng() % 2 ? election::Version::v3 : election::Version::v2;
        spec.config.device_class = spec.config.version == election::Version::v3 ? 2 : 1;
        spec.clock.drift_ppm = std::uniform_real_distribution<double>(-50, 50)(rng);
        sc.nodes.push_back(spec);
        sc.script.push_back(testing::join(spec.name, static_cast<std::int64_t>(rng() % 1'000'000)));
    }
    auto link = [&](int a, int b) {
        std::string x = sc.nodes[static_cast<std::size_t>(a)].name, y = sc.nodes[static_cast<std::size_t>(b)].name;
        if (y < x) std::swap(x, y);
        sc.links[{x, y}] = sim::Link{};
    };
    for (int k = 1; k < n; ++k) link(k, static_cast<int>(rng() % static_cast<std::uint64_t>(k)));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (rng() % 5 == 0) link(a, b);
    return sc;
}

Outcome electionConvergence() {
    Outcome o;
    std::vector<sim::Scenario> batch;
    for (std::uint64_t seed = 0; seed < 100; ++seed) batch.push_back(randomTopology(seed));
    const auto results = sim::runBatch(batch, true);
    double worst = 0.0;
    for (std::size_t i = 0; i < batch.size() && o.ok; ++i) {
        const auto& sc = batch[i];
        const std::string tag = "seed " + std::to_string(i) + ": ";
        o.require(bool(results[i]), tag + "run failed");
        if (!results[i]) break;
        const auto& r = *results[i];
        o.require(r.cycle_violations == 0, tag + "sync-tree cycle");

        std::int64_t lastBump = 0;
        for (const auto& s : r.metric_timeline)
            if (s.self_metric != 60) {
                bool first = true;
                for (const auto& p : r.metric_timeline)
                    if (p.node == s.node && p.time_us < s.time_us && p.self_metric != 60) first = false;
                if (first) lastBump = std::max(lastBump, s.time_us);
            }

        const auto metrics = finalMetrics(r);
        const sim::NodeSpec* best = nullptr;
        bool anyV3 = false;
        for (const auto& n : sc.nodes) {
            anyV3 = anyV3 || n.config.version == election::Version::v3;
            if (!best || election::outranks(metrics.at(n.name), n.config.address, metrics.at(best->name),
                                            best->config.address))
                best = &n;
        }
        o.require(!anyV3 || best->config.version == election::Version::v3, tag + "v2 node outranks every v3 node");
        for (const auto& n : sc.nodes) {
            o.require(masterAt(r, n.name, sc.duration_us) == best->config.address,
                      tag + n.name + " did not adopt the highest metric");
            const std::int64_t t = lastMasterChange(r, n.name);
            const double lag = static_cast<double>(t - lastBump) / 1e6;
            worst = std::max(worst, lag);
            o.require(t <= lastBump + 2'000'000, tag + n.name + " adopted " + fmt("%.3f s", lag) + " after last bump");
        }
    }
    if (o.ok) o.detail = "100 topologies, worst adoption " + fmt("%.3f s", worst) + " after last bump, 0 cycles";
    return o;
}

// --- 6 ----------------------------------------------------------------------

Outcome masterChurn() {
    Outcome o;
    auto base = sim::loadScenario((g_source / "scenarios" / "churn.json").string());
    o.require(bool(base), "churn.json does not load");
    if (!o.ok) return o;
    const double upper = 96.0 + std::ceil(440.0 / 16.0);
    double lo = 1e9, hi = 0;
    for (std::uint64_t seed = 0; seed < 20 && o.ok; ++seed) {
        auto sc = *base;
        sc.seed = seed;
        auto rep = sim::masterChurnProbe(sc, "m");
        o.require(bool(rep), "seed " + std::to_string(seed) + ": " + (rep ? "" : rep.error().message()));
        if (!rep) break;
        lo = std::min(lo, rep->detection_delay_aw);
        hi = std::max(hi, rep->detection_delay_aw);
        o.require(rep->detection_delay_aw > 96.0 && rep->detection_delay_aw <= upper,
                  "seed " + std::to_string(seed) + ": detected after " + fmt("%.2f AW", rep->detection_delay_aw));
        o.require(rep->resync_events == 0, "seed " + std::to_string(seed) + ": " +
                                               std::to_string(rep->resync_events) + " resync events");
        o.require(rep->new_master.has_value(), "seed " + std::to_string(seed) + ": survivors disagree");
    }
    if (o.ok) o.detail = "20 seeds, detection " + fmt("%.2f", lo) + ".." + fmt("%.2f AW", hi) + ", 0 resyncs";
    return o;
}

// --- 7 ----------------------------------------------------------------------

Outcome clusterMerge() {
    Outcome o;
    auto base = sim::loadScenario((g_source / "scenarios" / "merge.json").string());
    o.require(bool(base), "merge.json does not load");
    if (!o.ok) return o;
    const std::int64_t linkTime = 8'000'000;
    const std::int64_t afPeriod = 110 * 1024;
    const std::int64_t slack = 96 * 16 * 1024;

    // The bundled scenario plus variants that move the bridge and the metrics.
    std::vector<sim::Scenario> cases;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto sc = *base;
        sc.seed = seed;
        if (seed % 2) {
            sc.script.back().node = "a1";
            sc.script.back().peer = "b2";
        }
        if (seed >= 4) {
            sc.links.erase({"b0", "b1"});
            sc.links[{"b0", "b2"}] = sim::Link{};
        }
        cases.push_back(sc);
    }
    double worstMs = 0;
    for (std::size_t c = 0; c < cases.size() && o.ok; ++c) {
        const auto& sc = cases[c];
        const std::string tag = "case " + std::to_string(c) + ": ";
        auto r = sim::run(sc);
        o.require(bool(r), tag + "run failed");
        if (!r) break;

        // Separate clusters have converged before the link appears.
        std::set<MacAddress> before;
        for (const auto& n : sc.nodes) before.insert(*masterAt(*r, n.name, linkTime - 1));
        o.require(before.size() == 2, tag + "clusters not converged before the merge");

        const auto metrics = finalMetrics(*r);
        const sim::NodeSpec* best = nullptr;
        for (const auto& n : sc.nodes)
            if (!best || election::outranks(metrics.at(n.name), n.config.address, metrics.at(best->name),
                                            best->config.address))
                best = &n;

        std::int64_t done = linkTime;
        std::size_t depth = 0;
        for (const auto& n : sc.nodes) {
            o.require(masterAt(*r, n.name, sc.duration_us) == best->config.address,
                      tag + n.name + " did not follow the higher master");
            done = std::max(done, lastMasterChange(*r, n.name));
        }
        for (const auto& n : r->nodes) depth = std::max(depth, n.election.tree_path.size());
        const std::int64_t bound = static_cast<std::int64_t>(depth) * afPeriod + slack;
        worstMs = std::max(worstMs, static_cast<double>(done - linkTime) / 1000.0);
        o.require(done - linkTime <= bound, tag + "merge took " + fmt("%.1f ms", (done - linkTime) / 1000.0) +
                                                ", bound " + fmt("%.1f ms", bound / 1000.0));
        o.require(r->cycle_violations == 0, tag + "sync-tree cycle");
    }
    if (o.ok) o.detail = "6 merges, slowest " + fmt("%.1f ms", worstMs) + " (bound depth x 112.64 ms + 1572.9 ms)";
    return o;
}

// --- 8 ----------------------------------------------------------------------

sim::Scenario biasedPair(std::int64_t bias, std::uint64_t seed) {
    sim::Scenario sc;
    sc.seed = seed;
    sc.duration_us = 15'000'000;
    sc.record_events = false;
    sc.nodes = {testing::nodeSpec("m", 1), testing::nodeSpec("s", 2, election::Version::v2)};
    sc.nodes[1].config.sync_bias_micros = bias;
    sc.nodes[1].clock.offset_us = 31'337;
    sc.script = {testing::join("m", 0), testing::join("s", 0)};
    sim::SnifferSpec a;
    a.name = "a";
    a.clock.offset_us = 2'500'000;
    sim::SnifferSpec b = a;
    b.name = "b";
    b.clock.offset_us = 7'654'321;
    sc.sniffers = {a, b};
    return sc;
}

std::vector<pcap::CaptureRecord> exported(const sim::RunResult& r, std::size_t i, const sim::SnifferSpec& sn) {
    auto file = pcap::parse(pcap::serialize(sim::snifferCapture(r, i, sn)));
    return file ? pcap::toRecords(*file, sn.name) : std::vector<pcap::CaptureRecord>{};
}

Outcome syncEstimator() {
    Outcome o;
    double worst = 0.0;
    int runs = 0;
    for (std::int64_t bias = -5000; bias <= 5000 && o.ok; bias += 500) {
        const auto sc = biasedPair(bias, static_cast<std::uint64_t>(bias + 5000));
        auto r = sim::run(sc);
        o.require(bool(r), "run failed for offset " + std::to_string(bias));
        if (!r) break;
        const auto a = exported(*r, 0, sc.sniffers[0]);
        const auto b = exported(*r, 1, sc.sniffers[1]);
        auto res = analysis::analyzeSync(a, b, sc.nodes[0].config.address);
        o.require(bool(res), "analyze-sync failed for offset " + std::to_string(bias) + ": " +
                                 (res ? "" : res.error().message()));
        if (!res) break;
        o.require(res->calibration.offset_us == sc.sniffers[0].clock.offset_us - sc.sniffers[1].clock.offset_us,
                  "calibration not exact");
        const double err = std::abs(res->mean_us + static_cast<double>(bias));
        worst = std::max(worst, err);
        o.require(err <= 1.0, "offset " + std::to_string(bias) + " recovered as " + fmt("%.2f", -res->mean_us));
        ++runs;

        // Jittered sniffer timestamps: calibration stays within the jitter.
        if (bias == 0) {
            std::mt19937_64 rng(77);
            const std::int64_t maxJitter = 50;
            std::uniform_int_distribution<std::int64_t> j(-maxJitter, maxJitter);
            auto ja = a, jb = b;
            for (auto& rec : ja) rec.timestamp_us += j(rng);
            for (auto& rec : jb) rec.timestamp_us += j(rng);
            auto cal = analysis::calibrate(ja, jb);
            const std::int64_t truth = sc.sniffers[0].clock.offset_us - sc.sniffers[1].clock.offset_us;
            o.require(cal && std::llabs(cal->offset_us - truth) <= maxJitter, "jittered calibration off");
        }
    }
    if (o.ok)
        o.detail = std::to_string(runs) + " offsets in [-5000, 5000] us, worst error " + fmt("%.3f us", worst) +
                   "; calibration exact, jittered within 50 us";
    return o;
}

// --- 9, 10 ------------------------------------------------------------------

Result<sim::RunResult>& twentyMinutes() {
    static Result<sim::RunResult> r = [] {
        auto sc = sim::loadScenario((g_source / "scenarios" / "sync_20min.json").string());
        if (!sc) return Result<sim::RunResult>(sc.error());
        return sim::run(*sc);
    }();
    return r;
}

Outcome syncBound() {
    Outcome o;
    auto& r = twentyMinutes();
    o.require(bool(r), "run failed");
    if (!o.ok) return o;
    auto st = sim::measureSyncError(*r);
    o.require(bool(st), "no sync samples");
    if (!o.ok) return o;
    o.require(st->fraction_within >= 0.99, fmt("%.4f", st->fraction_within) + " within 3 TU");
    if (o.ok)
        o.detail = std::to_string(st->count) + " samples, " + fmt("%.2f%%", 100 * st->fraction_within) +
                   " within 3 TU, mean " + fmt("%.1f us", st->mean_us) + ", sd " + fmt("%.1f us", st->stddev_us);
    return o;
}

Outcome awWrap() {
    Outcome o;
    auto& r = twentyMinutes();
    o.require(bool(r), "run failed");
    if (!o.ok) return o;
    std::map<std::string, std::vector<const sim::EmissionRecord*>> byNode;
    for (const auto& e : r->emissions)
        if (e.kind != node::EmissionKind::data) byNode[e.node].push_back(&e);
    o.require(byNode.size() == 3, "expected three transmitting nodes");
    constexpr double kAwUs = 16 * 1024.0;
    for (auto& [name, list] : byNode) {
        std::sort(list.begin(), list.end(),
                  [](const auto* a, const auto* b) { return a->global_time < b->global_time; });
        int wraps = 0;
        for (std::size_t k = 1; k < list.size(); ++k) {
            const auto* p = list[k - 1];
            const auto* c = list[k];
            if (p->aw_seq > 0xc000 && c->aw_seq < 0x4000) ++wraps;
            if (c->global_time < 10'000'000) continue;
            const int diff = sync::seqDiff(c->aw_seq, p->aw_seq);
            const double expected = static_cast<double>(c->global_time - p->global_time) / kAwUs;
            o.require(std::abs(diff - expected) <= 5.0, name + ": AW sequence jumps by " + std::to_string(diff) +
                                                            " over " + fmt("%.1f AW", expected));
            const int slotP = chanseq::slotIndex(p->aw_seq).expanded;
            const int slotC = chanseq::slotIndex(c->aw_seq).expanded;
            o.require(((slotP + diff) % 64 + 64) % 64 == slotC, name + ": slot mapping discontinuity");
        }
        o.require(wraps == 1, name + ": " + std::to_string(wraps) + " wraps");
    }
    if (o.ok) o.detail = "3 nodes, exactly one wrap each in 20 min, slot index continuous";
    return o;
}

// --- 11 ---------------------------------------------------------------------

Outcome fig10Replay() {
    Outcome o;
    auto sc = sim::loadScenario((g_source / "scenarios" / "staggered_join.json").string());
    o.require(bool(sc), "staggered_join.json does not load");
    if (!o.ok) return o;
    auto r = sim::run(*sc);
    o.require(bool(r), "run failed");
    if (!o.ok) return o;

    const election::MetricPolicy policy;
    std::map<std::string, std::int64_t> joined, left;
    for (const auto& a : sc->script) (a.kind == sim::ActionKind::join ? joined : left)[a.node] = a.time_us;
    const auto metrics = finalMetrics(*r);

    for (const auto& n : sc->nodes) {
        std::vector<const sim::MetricSample*> own;
        for (const auto& s : r->metric_timeline)
            if (s.node == n.name) own.push_back(&s);
        o.require(!own.empty() && own.front()->self_metric == 60, n.name + ": initial metric is not 60");
        const auto& band = n.config.version == election::Version::v3 ? policy.range_v3 : policy.range_v2;
        const sim::MetricSample* bumped = nullptr;
        for (const auto* s : own)
            if (s->self_metric != 60 && !bumped) bumped = s;
        o.require(bumped && band.contains(bumped->self_metric), n.name + ": metric outside its version band");
        o.require(bumped && bumped->time_us >= joined[n.name] + 2'000'000, n.name + ": bumped before listening");
    }

    // Who should lead each phase, checked just before the next script event.
    const std::int64_t checkpoints[] = {29'900'000, 59'900'000, 89'900'000, 119'900'000, 149'900'000, 179'900'000,
                                        sc->duration_us};
    std::vector<std::string> story;
    for (std::int64_t t : checkpoints) {
        const sim::NodeSpec* best = nullptr;
        for (const auto& n : sc->nodes) {
            const bool live = joined[n.name] <= t && (!left.contains(n.name) || left[n.name] > t);
            if (!live) continue;
            if (!best || election::outranks(metrics.at(n.name), n.config.address, metrics.at(best->name),
                                            best->config.address))
                best = &n;
        }
        story.push_back(best->name);
        for (const auto& n : sc->nodes) {
            const bool live = joined[n.name] <= t && (!left.contains(n.name) || left[n.name] > t);
            if (live)
                o.require(masterAt(*r, n.name, t) == best->config.address,
                          n.name + " does not follow " + best->name + " at " + fmt("%.1f s", t / 1e6));
        }
    }
    // The v3 iPhone takes over from the v2 iMac after its bump and before the next join.
    const auto* imac = &sc->nodes[0];
    const auto* iphone = &sc->nodes[1];
    o.require(masterAt(*r, "imac", joined["iphone"] + 1'000'000) == imac->config.address,
              "iphone leads while still at metric 60");
    o.require(masterAt(*r, "imac", joined["iphone"] + 5'000'000) == iphone->config.address,
              "v3 iphone did not overtake v2 imac");

    if (o.ok) {
        o.detail = "leaders";
        for (const auto& s : story) o.detail += " " + s;
    }
    return o;
}

// --- 12 ---------------------------------------------------------------------

Outcome commonSlotSubstitute() {
    Outcome o;
    // Table patterns: p = primary 44, s = secondary 6, i = infrastructure, '.' = off.
    const std::string data = "ppppppppsppppppp";
    const std::string infra50 = "ppppiiiispppiiii";
    std::size_t analytic = 0;
    for (std::size_t k = 0; k < 16; ++k)
        if ((data[k] == 'p' || data[k] == 's') && data[k] == infra50[k]) ++analytic;

    const auto a = *chanseq::buildSequence({chanseq::LoadKind::data, std::nullopt});
    const auto b = *chanseq::buildSequence({chanseq::LoadKind::data_infra_50, std::uint8_t{36}});
    const auto c = *chanseq::buildSequence({chanseq::LoadKind::data_infra_50, std::uint8_t{44}});
    const auto common = chanseq::commonSlots(a, b).size();
    o.require(common == analytic, "data vs infra50: " + std::to_string(common) + " common slots, analytic " +
                                      std::to_string(analytic));
    o.require(chanseq::commonSlots(c, b).size() == analytic, "infra50 with mismatched AP channels");

    std::size_t prev = 0;
    for (const auto& s : kStates) {
        const auto m = *chanseq::buildSequence(s);
        const auto avail = static_cast<std::size_t>(std::count_if(m.slots.begin(), m.slots.end(),
                                                                  [](const auto& x) { return x.available(); }));
        o.require(avail > prev, "availability not monotonic at " + std::string(chanseq::loadKindName(s.kind)));
        o.require(avail == static_cast<std::size_t>(chanseq::airtimeFraction(m) * 16), "availability vs airtime");
        prev = avail;
    }
    if (o.ok)
        o.detail = "common slots " + std::to_string(common) + "/16 = analytic; available 4 < 6 < 8 < 12 < 16";
    return o;
}

// --- 13 ---------------------------------------------------------------------

int runTool(const std::string& args, const fs::path& out) {
    const std::string cmd = g_tool + " " + args + " > " + out.string() + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Json readJson(const fs::path& p) {
    std::ifstream in(p);
    return Json::parse(in, nullptr, false);
}

Outcome cliEndToEnd() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / ("awdl_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path scenario = g_source / "scenarios" / "e2e.json";
    const fs::path out = dir / "sim";

    o.require(runTool("simulate " + scenario.string() + " --out " + out.string(), dir / "sim.log") == 0,
              "simulate failed");
    o.require(fs::exists(out / "left.pcap") && fs::exists(out / "right.pcap"), "pcaps missing");
    if (!o.ok) return o;

    o.require(runTool("dissect " + (out / "left.pcap").string(), dir / "left.json") == 0, "dissect failed");
    const Json doc = readJson(dir / "left.json");
    const Json schema = readJson(g_source / "schema" / "dissect.schema.json");
    o.require(doc.is_array() && !doc.empty(), "dissect output is not a non-empty array");
    std::size_t dataFrames = 0;
    if (o.ok) {
        const auto errors = testing::SchemaCheck(schema).validate(doc);
        o.require(errors.empty(), "schema: " + (errors.empty() ? "" : errors.front()));
        for (const auto& rec : doc)
            if (rec.contains("frame") && rec["frame"]["kind"] == "data") ++dataFrames;
        o.require(dataFrames > 0, "no data frames dissected");
    }

    auto sc = sim::loadScenario(scenario.string());
    o.require(bool(sc), "e2e.json does not load");
    if (!o.ok) return o;
    const std::string master = sc->nodes[0].config.address.toString();
    o.require(runTool("analyze-sync " + (out / "left.pcap").string() + " " + (out / "right.pcap").string() +
                          " --master " + master + " --samples",
                      dir / "sync.json") == 0,
              "analyze-sync failed");
    const Json sync = readJson(dir / "sync.json");
    o.require(sync.is_object() && sync.contains("samples"), "analyze-sync output lacks samples");
    if (!o.ok) return o;

    auto r = sim::run(*sc);
    o.require(bool(r), "in-process run failed");
    if (!o.ok) return o;
    const std::int64_t leftOffset = sc->sniffers[0].clock.offset_us;
    std::map<std::pair<std::int64_t, std::string>, std::int64_t> internal;
    for (const auto& s : r->sync_samples)
        if (s.master == sc->nodes[0].config.address) internal[{s.time_us + leftOffset, s.slave.toString()}] = s.xi_us;

    std::size_t matched = 0;
    std::int64_t worst = 0;
    for (const auto& s : sync["samples"]) {
        auto it = internal.find({s["time_us"].get<std::int64_t>(), s["slave"].get<std::string>()});
        o.require(it != internal.end(), "sample without an internal counterpart");
        if (it == internal.end()) break;
        const std::int64_t d = std::llabs(it->second - s["xi_us"].get<std::int64_t>());
        worst = std::max(worst, d);
        o.require(d <= 1, "sample differs by " + std::to_string(d) + " us");
        ++matched;
    }
    o.require(matched == internal.size() && matched > 0,
              "analyzer found " + std::to_string(matched) + " samples, collector " + std::to_string(internal.size()));
    fs::remove_all(dir);
    if (o.ok)
        o.detail = std::to_string(doc.size()) + " records schema-valid (" + std::to_string(dataFrames) + " data); " +
                   std::to_string(matched) + " samples match, worst " + std::to_string(worst) + " us";
    return o;
}

}  // namespace
}  // namespace awdl

int main(int argc, char** argv) {
    using namespace awdl;
    if (argc != 3) {
        std::fprintf(stderr, "usage: %s <awdl_tool> <source dir>\n", argv[0]);
        return 2;
    }
    g_tool = argv[1];
    g_source = argv[2];

    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"codec round-trip", codecRoundTrip},
        {"golden vectors", goldenVectors},
        {"slot mapping oracle", channelMapping},
        {"period and airtime helpers", periodAndEfficiency},
        {"election convergence", electionConvergence},
        {"master churn", masterChurn},
        {"cluster merge", clusterMerge},
        {"sync estimator", syncEstimator},
        {"sync bound", syncBound},
        {"AW sequence wrap", awWrap},
        {"staggered-join replay", fig10Replay},
        {"common-slot substitute", commonSlotSubstitute},
        {"CLI end-to-end", cliEndToEnd},
    };
    const auto start = std::chrono::steady_clock::now();
    int failures = 0;
    int index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome o = fn();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2d %s: %s [%.1fs]\n", o.ok ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.ok ? 0 : 1;
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d/%d criteria passed in %.1f s\n", index - failures, index, total);
    return failures == 0 ? 0 : 1;
}
