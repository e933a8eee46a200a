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

#include "awdl/election.hpp"

#include <algorithm>

namespace awdl::election {

namespace {

bool contains(const std::vector<MacAddress>& path, const MacAddress& m) {
    return std::find(path.begin(), path.end(), m) != path.end();
}

std::vector<MacAddress> pathThrough(const Advert& a) {
    if (a.sender == a.top_master) return {a.sender};
    std::vector<MacAddress> path{a.sender};
    if (a.path.empty()) {
        path.push_back(a.top_master);
    } else {
        path.insert(path.end(), a.path.begin(), a.path.end());
    }
    return path;
}

}  // namespace

const char* versionName(Version v) noexcept { return v == Version::v3 ? "v3" : "v2"; }

const char* roleName(Role r) noexcept {
    switch (r) {
        case Role::master: return "master";
        case Role::nonelection_master: return "nonelection_master";
        case Role::slave: return "slave";
    }
    return "unknown";
}

Election Election::start(const MacAddress& self, Version version, std::int64_t now, MetricPolicy policy) {
    Election e;
    e.policy_ = policy;
    auto& s = e.state_;
    s.self_address = self;
    s.version = version;
    s.self_metric = policy.initial_metric;
    s.top_master = self;
    s.top_metric = policy.initial_metric;
    s.sync_parent = self;
    s.role = Role::master;
    s.listen_deadline = now + policy.listen_period_micros;
    return e;
}

Effects Election::bumpSelfMetric(std::int64_t, std::mt19937_64& rng) {
    Effects fx;
    if (state_.bumped) return fx;
    state_.bumped = true;
    const auto& range = policy_.range(state_.version);
    std::uniform_int_distribution<std::uint32_t> draw(range.min, range.max);
    state_.self_metric = draw(rng);
    fx.metric_changed = true;
    if (state_.role == Role::master) {
        state_.top_metric = state_.self_metric;
    } else if (outranks(state_.self_metric, state_.self_address, state_.top_metric, state_.top_master)) {
        becomeMaster(fx);
    }
    return fx;
}

FilterResult Election::filterFrame(int rssi_dbm, const MacAddress& sender, const RssiPolicy& policy,
                                   bool airplay_mode) const noexcept {
    int threshold = airplay_mode ? policy.edge_sync_airplay_dbm : policy.edge_sync_dbm;
    if (state_.role != Role::master && sender == state_.sync_parent) threshold -= policy.slave_sync_bonus_db;
    return rssi_dbm >= threshold ? FilterResult::accept : FilterResult::drop;
}

Effects Election::onActionFrame(const Advert& advert) {
    Effects fx;
    const MacAddress& self = state_.self_address;
    if (advert.sender == self) return fx;
    neighbors_[advert.sender] = Neighbor{advert, ticks_};
    updateRole();

    if (isDead(advert.top_master)) return fx;
    const bool loop = advert.top_master == self || contains(advert.path, self) || advert.sync_parent == self;

    if (state_.role != Role::master && advert.sender == state_.sync_parent) {
        if (loop) {
            becomeMaster(fx);
            return fx;
        }
        state_.aws_since_master_frame = 0;
        if (outranks(state_.self_metric, self, advert.top_metric, advert.top_master)) {
            becomeMaster(fx);
            return fx;
        }
        if (advert.top_master != state_.top_master) fx.adopted_new_master = true;
        state_.top_master = advert.top_master;
        state_.top_metric = advert.top_metric;
        state_.tree_path = pathThrough(advert);
        return fx;
    }

    if (state_.role != Role::master && advert.top_master == state_.top_master &&
        (advert.sender == state_.top_master || contains(state_.tree_path, advert.sender)))
        state_.aws_since_master_frame = 0;

    if (!loop && outranks(advert.top_metric, advert.top_master, state_.top_metric, state_.top_master))
        adopt(advert, fx);
    return fx;
}

Effects Election::onAwTick() {
    Effects fx;
    ++ticks_;
    for (auto it = dead_until_.begin(); it != dead_until_.end();) {
        if (it->second <= ticks_) {
            it = dead_until_.erase(it);
        } else {
            ++it;
        }
    }
    updateRole();
    if (state_.role == Role::master) {
        state_.aws_since_master_frame = 0;
        return fx;
    }
    if (++state_.aws_since_master_frame <= kNoMasterTimeoutAw) return fx;

    fx.master_timeout = true;
    const MacAddress lost = state_.top_master;
    const MacAddress lostParent = state_.sync_parent;
    dead_until_[lost] = ticks_ + kNoMasterTimeoutAw;

    // Best live neighbor not still advertising the lost master.
    const Neighbor* best = nullptr;
    for (const auto& [addr, n] : neighbors_) {
        const Advert& a = n.advert;
        if (ticks_ - n.last_heard > static_cast<std::uint64_t>(kNoMasterTimeoutAw)) continue;
        if (addr == lostParent || isDead(a.top_master)) continue;
        if (a.top_master == state_.self_address || contains(a.path, state_.self_address) ||
            contains(a.path, lost) || a.sync_parent == state_.self_address)
            continue;
        if (!best || outranks(a.top_metric, a.top_master, best->advert.top_metric, best->advert.top_master))
            best = &n;
    }
    if (best && outranks(best->advert.top_metric, best->advert.top_master, state_.self_metric, state_.self_address)) {
        adopt(best->advert, fx);
    } else {
        becomeMaster(fx);
    }
    state_.aws_since_master_frame = 0;
    return fx;
}

std::vector<MacAddress> Election::announcedPath() const {
    if (state_.role == Role::master) return {state_.self_address};
    return state_.tree_path;
}

void Election::becomeMaster(Effects& fx) {
    if (state_.top_master != state_.self_address) fx.adopted_new_master = true;
    if (state_.sync_parent != state_.self_address) fx.parent_changed = true;
    fx.became_master = true;
    state_.top_master = state_.self_address;
    state_.top_metric = state_.self_metric;
    state_.sync_parent = state_.self_address;
    state_.tree_path.clear();
    state_.role = Role::master;
    state_.aws_since_master_frame = 0;
}

void Election::adopt(const Advert& advert, Effects& fx) {
    if (advert.top_master != state_.top_master) fx.adopted_new_master = true;
    if (advert.sender != state_.sync_parent) fx.parent_changed = true;
    state_.sync_parent = advert.sender;
    state_.top_master = advert.top_master;
    state_.top_metric = advert.top_metric;
    state_.tree_path = pathThrough(advert);
    state_.aws_since_master_frame = 0;
    state_.role = Role::slave;
    updateRole();
}

bool Election::isDead(const MacAddress& master) const {
    auto it = dead_until_.find(master);
    return it != dead_until_.end() && it->second > ticks_;
}

void Election::updateRole() {
    if (state_.role == Role::master) return;
    bool hasChild = false;
    for (const auto& [addr, n] : neighbors_) {
        if (n.advert.sync_parent == state_.self_address &&
            ticks_ - n.last_heard <= static_cast<std::uint64_t>(kNoMasterTimeoutAw)) {
            hasChild = true;
            break;
        }
    }
    state_.role = hasChild ? Role::nonelection_master : Role::slave;
}

}  // namespace awdl::election
