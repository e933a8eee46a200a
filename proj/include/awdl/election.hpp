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

// Master election. Every node advertises its self metric and the metric of
// the top master it follows; the highest (metric, address) pair wins. A node
// starts at metric 60, listens for two seconds, then draws a metric from the
// version-dependent range. Masters are never announced as leaving: a node that
// has not heard from its master path for 96 AWs re-elects locally.

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "awdl/mac.hpp"

namespace awdl::election {

enum class Version { v2, v3 };

const char* versionName(Version v) noexcept;

struct MetricRange {
    std::uint32_t min = 0;
    std::uint32_t max = 0;
    bool contains(std::uint32_t m) const noexcept { return m >= min && m <= max; }
};

struct MetricPolicy {
    std::uint32_t initial_metric = 60;
    std::int64_t listen_period_micros = 2'000'000;
    MetricRange range_v2{405, 436};
    MetricRange range_v3{505, 536};

    const MetricRange& range(Version v) const noexcept { return v == Version::v3 ? range_v3 : range_v2; }
};

struct RssiPolicy {
    int edge_sync_dbm = -65;
    int edge_sync_airplay_dbm = -78;
    int slave_sync_bonus_db = 5;
};

inline constexpr int kNoMasterTimeoutAw = 96;

enum class Role { master, nonelection_master, slave };
const char* roleName(Role r) noexcept;

enum class FilterResult { accept, drop };

/// What a received action frame says about its sender's election view.
struct Advert {
    MacAddress sender;
    MacAddress top_master;
    std::uint32_t top_metric = 0;
    std::uint32_t self_metric = 0;
    MacAddress sync_parent;          // sender's own parent (itself when master)
    std::vector<MacAddress> path;    // sender's path up to the top master
};

struct ElectionState {
    MacAddress self_address;
    Version version = Version::v3;
    std::uint32_t self_metric = 60;
    MacAddress top_master;
    std::uint32_t top_metric = 60;
    MacAddress sync_parent;             // equals self_address while master
    std::vector<MacAddress> tree_path;  // parent .. top master; empty while master
    int aws_since_master_frame = 0;
    Role role = Role::master;
    std::int64_t listen_deadline = 0;
    bool bumped = false;
};

struct Effects {
    bool adopted_new_master = false;  // top master changed
    bool parent_changed = false;
    bool became_master = false;
    bool master_timeout = false;
    bool metric_changed = false;
};

/// (metric, address) ordering; equal metrics go to the larger address.
constexpr bool outranks(std::uint32_t metric_a, const MacAddress& addr_a, std::uint32_t metric_b,
                        const MacAddress& addr_b) noexcept {
    return metric_a > metric_b || (metric_a == metric_b && addr_a > addr_b);
}

class Election {
public:
    static Election start(const MacAddress& self, Version version, std::int64_t now, MetricPolicy policy = {});

    const ElectionState& state() const noexcept { return state_; }
    const MetricPolicy& policy() const noexcept { return policy_; }

    bool bumpDue(std::int64_t now) const noexcept { return !state_.bumped && now >= state_.listen_deadline; }
    /// Draw the post-listen metric. Applied once per activation.
    Effects bumpSelfMetric(std::int64_t now, std::mt19937_64& rng);

    FilterResult filterFrame(int rssi_dbm, const MacAddress& sender, const RssiPolicy& policy = {},
                             bool airplay_mode = false) const noexcept;

    Effects onActionFrame(const Advert& advert);

    /// Called once per AW.
    Effects onAwTick();

    /// Emitted sync tree: own path, or just self while master.
    std::vector<MacAddress> announcedPath() const;

    std::uint64_t ticks() const noexcept { return ticks_; }

private:
    struct Neighbor {
        Advert advert;
        std::uint64_t last_heard = 0;
    };

    void becomeMaster(Effects& fx);
    void adopt(const Advert& advert, Effects& fx);
    bool isDead(const MacAddress& master) const;
    void updateRole();

    ElectionState state_;
    MetricPolicy policy_;
    std::map<MacAddress, Neighbor> neighbors_;
    std::map<MacAddress, std::uint64_t> dead_until_;
    std::uint64_t ticks_ = 0;
};

}  // namespace awdl::election
