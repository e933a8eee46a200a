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

#include "awdl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <tuple>

namespace awdl::sim {

namespace {

constexpr std::int64_t kAwMicros = sync::kDefaultTimeModel.awMicros();
constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

std::uint64_t splitmix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class EventType { script, wake, transmit };

struct QueueItem {
    std::int64_t time;
    std::uint64_t seq;
    EventType type;
    std::size_t index;
    std::uint64_t generation;

    bool operator>(const QueueItem& o) const noexcept { return std::tie(time, seq) > std::tie(o.time, o.seq); }
};

struct PendingTx {
    std::size_t node;
    std::uint64_t generation;  // sender incarnation
    node::Emission emission;
};

struct Slot {
    const NodeSpec* spec = nullptr;
    std::optional<node::Node> node;
    std::uint64_t generation = 0;
    std::uint64_t joins = 0;
    bool recorded = false;
    MacAddress last_master;
    MacAddress last_parent;
    election::Role last_role = election::Role::master;
    std::uint32_t last_self = 0;
    std::uint32_t last_top = 0;
    std::uint64_t last_timeouts = 0;
    std::uint64_t last_resyncs = 0;
};

class World {
public:
    World(const Scenario& scenario, Observer* observer) : sc_(scenario), observer_(observer), rng_(scenario.seed) {
        slots_.resize(sc_.nodes.size());
        for (std::size_t i = 0; i < sc_.nodes.size(); ++i) {
            slots_[i].spec = &sc_.nodes[i];
            index_[sc_.nodes[i].name] = i;
            byAddress_[sc_.nodes[i].config.address] = i;
        }
        if (sc_.full_mesh) {
            for (std::size_t i = 0; i < slots_.size(); ++i)
                for (std::size_t j = i + 1; j < slots_.size(); ++j) links_[{i, j}] = sc_.default_link;
        }
        for (const auto& [key, link] : sc_.links) links_[ordered(index_.at(key.first), index_.at(key.second))] = link;

        script_ = sc_.script;
        std::stable_sort(script_.begin(), script_.end(),
                         [](const ScriptAction& a, const ScriptAction& b) { return a.time_us < b.time_us; });
        for (std::size_t k = 0; k < script_.size(); ++k) push(script_[k].time_us, EventType::script, k, 0);
    }

    RunResult run() {
        while (!queue_.empty()) {
            const QueueItem item = queue_.top();
            if (item.time > sc_.duration_us) break;
            queue_.pop();
            now_ = item.time;
            switch (item.type) {
                case EventType::script: applyAction(script_[item.index]); break;
                case EventType::wake:
                    if (slots_[item.index].node && slots_[item.index].generation == item.generation) wake(item.index);
                    break;
                case EventType::transmit: transmit(item.index); break;
            }
            if (observer_) notify();
        }
        finish();
        return std::move(out_);
    }

private:
    static std::pair<std::size_t, std::size_t> ordered(std::size_t a, std::size_t b) {
        return a < b ? std::pair{a, b} : std::pair{b, a};
    }

    void push(std::int64_t t, EventType type, std::size_t index, std::uint64_t generation) {
        queue_.push({t, seq_++, type, index, generation});
    }

    void log(std::string what, const std::string& node, std::string detail = {}) {
        if (sc_.record_events) out_.events.push_back({now_, std::move(what), node, std::move(detail)});
    }

    std::int64_t jitter(const ClockModel& clock) {
        if (clock.jitter_sigma_us <= 0) return 0;
        std::normal_distribution<double> n(0.0, static_cast<double>(clock.jitter_sigma_us));
        return std::llround(std::fabs(n(rng_)));
    }

    void reschedule(std::size_t i, bool just_stepped) {
        Slot& s = slots_[i];
        if (!s.node) return;
        const auto& clock = s.spec->clock;
        const std::int64_t localNow = clock.local(now_);
        const std::int64_t next = s.node->nextEventTime();
        ++s.generation;
        if (next == kNever) return;
        std::int64_t t;
        if (next <= localNow) {
            t = just_stepped ? now_ + 1 : now_;
        } else {
            t = std::max(now_, clock.globalAtOrAfter(next));
        }
        push(t, EventType::wake, i, s.generation);
    }

    void wake(std::size_t i) {
        Slot& s = slots_[i];
        const auto& clock = s.spec->clock;
        auto emissions = s.node->step(clock.local(now_));
        for (auto& e : emissions) {
            pending_.push_back({i, s.joins, std::move(e)});
            push(now_ + jitter(clock), EventType::transmit, pending_.size() - 1, 0);
        }
        collect(i);
        reschedule(i, true);
    }

    void transmit(std::size_t k) {
        PendingTx tx = std::move(pending_[k]);
        pending_[k] = {};
        Slot& sender = slots_[tx.node];
        if (!sender.node || sender.joins != tx.generation) return;  // left before the frame went out

        const auto& e = tx.emission;
        const std::uint64_t id = nextEmission_++;
        const std::string& name = sender.spec->name;
        out_.emissions.push_back({id, now_, name, e.kind, e.channel, e.aw_seq, e.tu_into_eaw, e.tx_allowed});
        log("emit", name,
            std::string(node::emissionKindName(e.kind)) + " ch=" + std::to_string(e.channel) + " id=" + std::to_string(id));

        const int awBin = chanseq::slotIndex(e.aw_seq).expanded;
        if (e.kind == node::EmissionKind::psf) {
            ++out_.activity.psf_aw[static_cast<std::size_t>(awBin)];
            ++out_.activity.psf_tu[static_cast<std::size_t>(e.tu_into_eaw)];
        } else if (e.kind == node::EmissionKind::mif) {
            ++out_.activity.mif_aw[static_cast<std::size_t>(awBin)];
            ++out_.activity.mif_tu[static_cast<std::size_t>(e.tu_into_eaw)];
        }

        const std::int64_t rxGlobal = now_ + sc_.airtime_us;
        for (std::size_t n = 0; n < sc_.sniffers.size(); ++n) {
            const auto& sn = sc_.sniffers[n];
            const std::uint8_t ch = rxGlobal < sn.calibration_us ? sn.calibration_channel : sn.channel;
            if (ch != e.channel) continue;
            out_.captures.push_back({n, id, rxGlobal, sn.clock.local(rxGlobal), ch, sn.rssi, e.bytes});
        }
        if (sc_.sniffers.empty() && e.kind != node::EmissionKind::data) {
            if (auto o = analysis::observe(e.bytes, rxGlobal, id)) omniscient_.push_back(*o);
        }

        for (std::size_t j = 0; j < slots_.size(); ++j) {
            if (j == tx.node || !slots_[j].node) continue;
            auto link = links_.find(ordered(tx.node, j));
            if (link == links_.end()) continue;
            ++out_.delivery.attempts;
            const std::string& rname = slots_[j].spec->name;
            if (link->second.loss > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < link->second.loss) {
                ++out_.delivery.lost_probability;
                log("lost_probability", rname, "id=" + std::to_string(id));
                continue;
            }
            const std::int64_t localRx = slots_[j].spec->clock.local(rxGlobal);
            if (slots_[j].node->radioChannel(localRx) != e.channel) {
                ++out_.delivery.lost_channel;
                log("lost_channel", rname, "id=" + std::to_string(id));
                continue;
            }
            ++out_.delivery.delivered;
            log("delivered", rname, "id=" + std::to_string(id));
            slots_[j].node->onReceive(e.bytes, {localRx, link->second.rssi});
            collect(j);
            reschedule(j, false);
        }
    }

    void applyAction(const ScriptAction& a) {
        const std::size_t i = index_.at(a.node);
        Slot& s = slots_[i];
        switch (a.kind) {
            case ActionKind::join: {
                node::NodeConfig cfg = s.spec->config;
                cfg.rng_seed = splitmix(sc_.seed ^ splitmix(i * 1000 + s.joins + 1));
                ++s.joins;
                s.node.emplace(cfg, s.spec->clock.local(now_));
                s.recorded = false;
                s.last_timeouts = 0;
                s.last_resyncs = 0;
                log("join", a.node);
                collect(i);
                reschedule(i, false);
                break;
            }
            case ActionKind::leave:
                s.node.reset();
                ++s.generation;
                log("leave", a.node);
                break;
            case ActionKind::set_load:
                if (s.node) s.node->setOfferedLoad(a.rate);
                log("set_load", a.node, std::to_string(a.rate));
                break;
            case ActionKind::set_link:
                links_[ordered(i, index_.at(a.peer))] = a.link;
                log("set_link", a.node, a.peer);
                break;
            case ActionKind::remove_link:
                links_.erase(ordered(i, index_.at(a.peer)));
                log("remove_link", a.node, a.peer);
                break;
            case ActionKind::send: {
                if (!s.node) break;
                const auto& peer = slots_[index_.at(a.peer)].spec->config.address;
                for (int c = 0; c < a.count; ++c) {
                    wire::Bytes payload(a.bytes);
                    for (std::size_t b = 0; b < payload.size(); ++b) payload[b] = static_cast<std::uint8_t>(b + c);
                    auto st = s.node->sendData(peer, std::move(payload));
                    if (!st) log("send_failed", a.node, st.error().message());
                }
                reschedule(i, false);
                break;
            }
        }
    }

    void collect(std::size_t i) {
        Slot& s = slots_[i];
        const auto& es = s.node->electionState();
        const std::string& name = s.spec->name;
        if (!s.recorded || es.top_master != s.last_master || es.role != s.last_role) {
            auto it = byAddress_.find(es.top_master);
            const std::string masterName = it != byAddress_.end() ? sc_.nodes[it->second].name : es.top_master.toString();
            out_.master_timeline.push_back({now_, name, es.top_master, masterName, es.role});
            log("master", name, masterName);
        }
        if (!s.recorded || es.self_metric != s.last_self || es.top_metric != s.last_top)
            out_.metric_timeline.push_back({now_, name, es.self_metric, es.top_metric});
        const bool parentChanged = !s.recorded || es.sync_parent != s.last_parent;

        const auto& c = s.node->counters();
        for (; s.last_timeouts < c.master_timeouts; ++s.last_timeouts) {
            out_.timeouts.push_back({now_, name});
            log("master_timeout", name);
        }
        for (; s.last_resyncs < c.resync_events; ++s.last_resyncs) {
            out_.resyncs.push_back({now_, name});
            log("resync", name);
        }

        s.recorded = true;
        s.last_master = es.top_master;
        s.last_parent = es.sync_parent;
        s.last_role = es.role;
        s.last_self = es.self_metric;
        s.last_top = es.top_metric;
        if (parentChanged && hasCycle()) ++out_.cycle_violations;
    }

    bool hasCycle() const {
        for (std::size_t start = 0; start < slots_.size(); ++start) {
            if (!slots_[start].node) continue;
            std::size_t cur = start;
            for (std::size_t hops = 0;; ++hops) {
                const auto& es = slots_[cur].node->electionState();
                if (es.sync_parent == es.self_address) break;
                auto it = byAddress_.find(es.sync_parent);
                if (it == byAddress_.end() || !slots_[it->second].node) break;
                if (hops > slots_.size()) return true;
                cur = it->second;
            }
        }
        return false;
    }

    void notify() {
        std::vector<const node::Node*> live;
        std::vector<std::string> names;
        for (const auto& s : slots_) {
            if (!s.node) continue;
            live.push_back(&*s.node);
            names.push_back(s.spec->name);
        }
        observer_->afterEvent(now_, live, names);
    }

    void finish() {
        for (const auto& s : slots_) {
            NodeSummary sum;
            sum.name = s.spec->name;
            sum.address = s.spec->config.address;
            sum.alive = s.node.has_value();
            if (s.node) {
                sum.election = s.node->electionState();
                sum.counters = s.node->counters();
                sum.load = s.node->loadState().kind;
            }
            out_.nodes.push_back(std::move(sum));
        }

        std::vector<analysis::SyncObservation> frames;
        if (sc_.sniffers.empty()) {
            frames = std::move(omniscient_);
        } else {
            std::set<std::uint64_t> seen;
            for (const auto& c : out_.captures) {
                if (!seen.insert(c.emission).second) continue;
                if (auto o = analysis::observe(c.bytes, c.global_time, c.emission)) frames.push_back(*o);
            }
        }
        std::set<MacAddress> masters;
        if (sc_.sync_master) {
            masters.insert(sc_.nodes[index_.at(*sc_.sync_master)].config.address);
        } else {
            for (const auto& f : frames) masters.insert(f.advertised_master);
        }
        for (const auto& m : masters) {
            auto samples = analysis::pairSyncFrames(frames, m);
            out_.sync_samples.insert(out_.sync_samples.end(), samples.begin(), samples.end());
        }
        std::stable_sort(out_.sync_samples.begin(), out_.sync_samples.end(),
                         [](const analysis::SyncSample& a, const analysis::SyncSample& b) {
                             return std::tie(a.time_us, a.slave) < std::tie(b.time_us, b.slave);
                         });
    }

    const Scenario& sc_;
    Observer* observer_;
    std::mt19937_64 rng_;
    std::vector<Slot> slots_;
    std::map<std::string, std::size_t> index_;
    std::map<MacAddress, std::size_t> byAddress_;
    std::map<std::pair<std::size_t, std::size_t>, Link> links_;
    std::vector<ScriptAction> script_;
    std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue_;
    std::vector<PendingTx> pending_;
    std::vector<analysis::SyncObservation> omniscient_;
    std::uint64_t seq_ = 0;
    std::uint64_t nextEmission_ = 0;
    std::int64_t now_ = 0;
    RunResult out_;
};

}  // namespace

std::int64_t ClockModel::local(std::int64_t global) const noexcept {
    return global + std::llround(static_cast<double>(global) * drift_ppm * 1e-6) + offset_us;
}

std::int64_t ClockModel::globalAtOrAfter(std::int64_t target) const noexcept {
    std::int64_t g = std::llround(static_cast<double>(target - offset_us) / (1.0 + drift_ppm * 1e-6));
    while (local(g) < target) ++g;
    while (local(g - 1) >= target) --g;
    return g;
}

const char* actionKindName(ActionKind k) noexcept {
    switch (k) {
        case ActionKind::join: return "join";
        case ActionKind::leave: return "leave";
        case ActionKind::set_load: return "set_load";
        case ActionKind::set_link: return "set_link";
        case ActionKind::remove_link: return "remove_link";
        case ActionKind::send: return "send";
    }
    return "unknown";
}

const char* outcomeName(Outcome o) noexcept {
    switch (o) {
        case Outcome::delivered: return "delivered";
        case Outcome::lost_probability: return "lost_probability";
        case Outcome::lost_channel: return "lost_channel";
    }
    return "unknown";
}

Status validateScenario(const Scenario& sc) {
    std::map<std::string, std::size_t> names;
    std::set<MacAddress> addresses;
    for (std::size_t i = 0; i < sc.nodes.size(); ++i) {
        const auto& n = sc.nodes[i];
        const std::string where = "nodes[" + std::to_string(i) + "]";
        if (n.name.empty()) return makeError(Errc::invalid_scenario, where + ".name: empty");
        if (!names.emplace(n.name, i).second)
            return makeError(Errc::invalid_scenario, where + ".name: duplicate \"" + n.name + "\"");
        if (!addresses.insert(n.config.address).second)
            return makeError(Errc::invalid_scenario, where + ".address: duplicate " + n.config.address.toString());
        if (!node::validAfPeriod(n.config.af_period_tu))
            return makeError(Errc::invalid_scenario, where + ".af_period_tu: must be 110 or 440");
    }
    for (const auto& [key, link] : sc.links) {
        if (!names.contains(key.first) || !names.contains(key.second))
            return makeError(Errc::invalid_scenario, "links: unknown node in " + key.first + "/" + key.second);
    }
    for (std::size_t i = 0; i < sc.sniffers.size(); ++i) {
        if (sc.sniffers[i].clock.offset_us < 0)
            return makeError(Errc::invalid_scenario,
                             "sniffers[" + std::to_string(i) + "].clock.offset_us: pcap timestamps cannot be negative");
    }
    if (sc.sync_master && !names.contains(*sc.sync_master))
        return makeError(Errc::invalid_scenario, "sync_master: unknown node \"" + *sc.sync_master + "\"");

    std::map<std::string, bool> joined;
    std::map<std::string, std::int64_t> lastTime;
    for (std::size_t k = 0; k < sc.script.size(); ++k) {
        const auto& a = sc.script[k];
        const std::string where = "script[" + std::to_string(k) + "]";
        if (!names.contains(a.node)) return makeError(Errc::invalid_scenario, where + ".node: unknown \"" + a.node + "\"");
        const bool needsPeer =
            a.kind == ActionKind::set_link || a.kind == ActionKind::remove_link || a.kind == ActionKind::send;
        if (needsPeer && !names.contains(a.peer))
            return makeError(Errc::invalid_scenario, where + ".peer: unknown \"" + a.peer + "\"");
        if (a.time_us < 0) return makeError(Errc::invalid_scenario, where + ".time: negative");
        auto lt = lastTime.find(a.node);
        if (lt != lastTime.end() && a.time_us < lt->second)
            return makeError(Errc::script_conflict, where + ": time goes backwards for \"" + a.node + "\"");
        lastTime[a.node] = a.time_us;
        if (a.kind == ActionKind::join) {
            if (joined[a.node]) return makeError(Errc::script_conflict, where + ": \"" + a.node + "\" joins twice");
            joined[a.node] = true;
        } else if (a.kind == ActionKind::leave) {
            if (!joined[a.node])
                return makeError(Errc::script_conflict, where + ": \"" + a.node + "\" leaves before joining");
            joined[a.node] = false;
        }
    }
    return Ok{};
}

Result<RunResult> run(const Scenario& scenario, Observer* observer) {
    if (auto st = validateScenario(scenario); !st) return st.error();
    World world(scenario, observer);
    return world.run();
}

Result<SyncStats> measureSyncError(const RunResult& result, std::int64_t bound_us) {
    if (result.sync_samples.empty()) return makeError(Errc::insufficient_pairs, "no master/slave frame pairs");
    const auto m = analysis::moments(result.sync_samples, bound_us);
    return SyncStats{result.sync_samples.size(), m.mean, m.stddev, m.fraction_within};
}

Result<ChurnReport> masterChurnProbe(const Scenario& scenario, const std::string& departing) {
    auto leave = std::find_if(scenario.script.begin(), scenario.script.end(), [&](const ScriptAction& a) {
        return a.kind == ActionKind::leave && a.node == departing;
    });
    if (leave == scenario.script.end())
        return makeError(Errc::invalid_scenario, "script has no leave action for \"" + departing + "\"");
    const std::int64_t leaveTime = leave->time_us;

    auto res = run(scenario);
    if (!res) return res.error();

    ChurnReport rep;
    for (const auto& e : res->emissions)
        if (e.node == departing && e.global_time <= leaveTime) rep.last_master_frame_us = e.global_time;

    auto timeout = std::find_if(res->timeouts.begin(), res->timeouts.end(), [&](const NodeMark& m) {
        return m.time_us > leaveTime && m.node != departing;
    });
    if (timeout == res->timeouts.end()) return makeError(Errc::insufficient_pairs, "no survivor noticed the departure");
    rep.detected_us = timeout->time_us;
    rep.detection_delay_aw = static_cast<double>(rep.detected_us - rep.last_master_frame_us) / kAwMicros;
    rep.resync_events = static_cast<std::uint64_t>(std::count_if(
        res->resyncs.begin(), res->resyncs.end(),
        [&](const NodeMark& m) { return m.time_us > leaveTime && m.node != departing; }));

    std::set<MacAddress> masters;
    for (const auto& n : res->nodes)
        if (n.alive) masters.insert(n.election.top_master);
    if (masters.size() == 1) rep.new_master = *masters.begin();
    return rep;
}

std::vector<Result<RunResult>> runBatch(const std::vector<Scenario>& scenarios, bool parallel) {
    std::vector<std::optional<Result<RunResult>>> slots(scenarios.size());
    const auto n = static_cast<std::int64_t>(scenarios.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::int64_t i = 0; i < n; ++i) slots[static_cast<std::size_t>(i)].emplace(run(scenarios[static_cast<std::size_t>(i)]));
    (void)parallel;

    std::vector<Result<RunResult>> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace awdl::sim
