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

#include <gtest/gtest.h>

#include "awdl/election.hpp"

namespace awdl::election {
namespace {

MacAddress mac(std::uint8_t last) { return MacAddress{{0x02, 0, 0, 0, 0, last}}; }

Advert masterAdvert(const MacAddress& who, std::uint32_t metric) {
    return {who, who, metric, metric, who, {who}};
}

Advert slaveAdvert(const MacAddress& who, std::uint32_t self, const MacAddress& parent, const MacAddress& top,
                   std::uint32_t top_metric, std::vector<MacAddress> path) {
    return {who, top, top_metric, self, parent, std::move(path)};
}

TEST(Start, FreshNodeIsItsOwnMaster) {
    auto e = Election::start(mac(1), Version::v3, 1000);
    EXPECT_EQ(e.state().self_metric, 60u);
    EXPECT_EQ(e.state().top_master, mac(1));
    EXPECT_EQ(e.state().role, Role::master);
    EXPECT_EQ(e.state().listen_deadline, 2'001'000);
    EXPECT_EQ(e.announcedPath(), std::vector<MacAddress>{mac(1)});
    auto f = Election::start(mac(2), Version::v2, 1000);
    EXPECT_EQ(f.state().top_master, mac(2));
}

TEST(Bump, DrawsFromVersionRange) {
    const MetricPolicy policy;
    EXPECT_LT(policy.range_v2.max, policy.range_v3.min);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        std::mt19937_64 rng(seed);
        auto v2 = Election::start(mac(1), Version::v2, 0);
        auto v3 = Election::start(mac(2), Version::v3, 0);
        EXPECT_FALSE(v3.bumpDue(1'999'999));
        EXPECT_TRUE(v3.bumpDue(2'000'000));
        v2.bumpSelfMetric(2'000'000, rng);
        v3.bumpSelfMetric(2'000'000, rng);
        EXPECT_TRUE(policy.range_v2.contains(v2.state().self_metric));
        EXPECT_TRUE(policy.range_v3.contains(v3.state().self_metric));
        EXPECT_EQ(v3.state().top_metric, v3.state().self_metric);
    }
}

TEST(Bump, AppliedOnceAndReproducible) {
    std::mt19937_64 a(5), b(5);
    auto x = Election::start(mac(1), Version::v3, 0);
    auto y = Election::start(mac(1), Version::v3, 0);
    x.bumpSelfMetric(2'000'000, a);
    y.bumpSelfMetric(2'000'000, b);
    EXPECT_EQ(x.state().self_metric, y.state().self_metric);
    const auto first = x.state().self_metric;
    EXPECT_FALSE(x.bumpSelfMetric(3'000'000, a).metric_changed);
    EXPECT_EQ(x.state().self_metric, first);
    EXPECT_FALSE(x.bumpDue(5'000'000));
}

TEST(Filter, Thresholds) {
    auto e = Election::start(mac(1), Version::v3, 0);
    EXPECT_EQ(e.filterFrame(-64, mac(9)), FilterResult::accept);
    EXPECT_EQ(e.filterFrame(-65, mac(9)), FilterResult::accept);
    EXPECT_EQ(e.filterFrame(-66, mac(9)), FilterResult::drop);
    EXPECT_EQ(e.filterFrame(-70, mac(9), {}, true), FilterResult::accept);
    EXPECT_EQ(e.filterFrame(-79, mac(9), {}, true), FilterResult::drop);

    e.onActionFrame(masterAdvert(mac(9), 510));
    ASSERT_EQ(e.state().sync_parent, mac(9));
    EXPECT_EQ(e.filterFrame(-68, mac(9)), FilterResult::accept);
    EXPECT_EQ(e.filterFrame(-70, mac(9)), FilterResult::accept);
    EXPECT_EQ(e.filterFrame(-71, mac(9)), FilterResult::drop);
    EXPECT_EQ(e.filterFrame(-68, mac(8)), FilterResult::drop);
}

TEST(Adopt, HigherMetricWins) {
    auto e = Election::start(mac(1), Version::v2, 0);
    const auto fx = e.onActionFrame(masterAdvert(mac(9), 510));
    EXPECT_TRUE(fx.adopted_new_master);
    EXPECT_TRUE(fx.parent_changed);
    EXPECT_EQ(e.state().top_master, mac(9));
    EXPECT_EQ(e.state().top_metric, 510u);
    EXPECT_EQ(e.state().role, Role::slave);
    EXPECT_EQ(e.state().tree_path, std::vector<MacAddress>{mac(9)});
}

TEST(Adopt, EstablishedMasterCanBeOvertaken) {
    std::mt19937_64 rng(1);
    MetricPolicy fixed;
    fixed.range_v3 = {512, 512};
    auto e = Election::start(mac(1), Version::v3, 0, fixed);
    e.bumpSelfMetric(2'000'000, rng);
    ASSERT_EQ(e.state().self_metric, 512u);
    e.onActionFrame(masterAdvert(mac(7), 530));
    EXPECT_EQ(e.state().top_master, mac(7));
    EXPECT_EQ(e.state().role, Role::slave);
}

TEST(Adopt, LowerOrEqualMetricIgnored) {
    std::mt19937_64 rng(1);
    MetricPolicy fixed;
    fixed.range_v3 = {520, 520};
    auto e = Election::start(mac(5), Version::v3, 0, fixed);
    e.bumpSelfMetric(2'000'000, rng);
    e.onActionFrame(masterAdvert(mac(9), 510));
    EXPECT_EQ(e.state().top_master, mac(5));
    // Equal metric: larger address wins.
    e.onActionFrame(masterAdvert(mac(4), 520));
    EXPECT_EQ(e.state().top_master, mac(5));
    e.onActionFrame(masterAdvert(mac(6), 520));
    EXPECT_EQ(e.state().top_master, mac(6));
}

TEST(Adopt, TreePathExtendsSendersPath) {
    auto e = Election::start(mac(1), Version::v2, 0);
    e.onActionFrame(slaveAdvert(mac(3), 410, mac(9), mac(9), 530, {mac(9)}));
    EXPECT_EQ(e.state().sync_parent, mac(3));
    EXPECT_EQ(e.state().tree_path, (std::vector<MacAddress>{mac(3), mac(9)}));
    EXPECT_EQ(e.announcedPath(), e.state().tree_path);
}

TEST(Loop, PathContainingSelfIsNotAdopted) {
    auto e = Election::start(mac(1), Version::v2, 0);
    e.onActionFrame(slaveAdvert(mac(3), 410, mac(1), mac(9), 530, {mac(1), mac(9)}));
    EXPECT_EQ(e.state().sync_parent, mac(1));
    EXPECT_EQ(e.state().top_master, mac(1));
}

TEST(Loop, TreePathNeverContainsSelf) {
    auto e = Election::start(mac(1), Version::v2, 0);
    e.onActionFrame(slaveAdvert(mac(3), 410, mac(4), mac(9), 530, {mac(4), mac(9)}));
    e.onActionFrame(slaveAdvert(mac(4), 410, mac(1), mac(9), 530, {mac(1), mac(3), mac(4), mac(9)}));
    for (const auto& m : e.state().tree_path) EXPECT_NE(m, mac(1));
}

TEST(Role, ParentOfAnotherNodeIsNonElectionMaster) {
    auto e = Election::start(mac(1), Version::v2, 0);
    e.onActionFrame(masterAdvert(mac(9), 530));
    EXPECT_EQ(e.state().role, Role::slave);
    e.onActionFrame(slaveAdvert(mac(2), 60, mac(1), mac(9), 530, {mac(1), mac(9)}));
    EXPECT_EQ(e.state().role, Role::nonelection_master);
}

TEST(Timeout, SilentMasterReplacedByLiveNeighbor) {
    auto e = Election::start(mac(1), Version::v2, 0);
    e.onActionFrame(masterAdvert(mac(9), 530));
    for (int aw = 1; aw <= 96; ++aw) {
        if (aw % 10 == 0) e.onActionFrame(masterAdvert(mac(5), 520));
        EXPECT_FALSE(e.onAwTick().master_timeout) << "aw " << aw;
    }
    EXPECT_EQ(e.state().top_master, mac(9));
    const auto fx = e.onAwTick();
    EXPECT_TRUE(fx.master_timeout);
    EXPECT_EQ(e.state().top_master, mac(5));
    EXPECT_EQ(e.state().top_metric, 520u);
}

TEST(Timeout, BelowLimitNoChange) {
    auto e = Election::start(mac(1), Version::v2, 0);
    e.onActionFrame(masterAdvert(mac(9), 530));
    for (int aw = 0; aw < 95; ++aw) EXPECT_FALSE(e.onAwTick().master_timeout);
    EXPECT_EQ(e.state().top_master, mac(9));
}

TEST(Timeout, IsolatedNodePromotesItself) {
    auto e = Election::start(mac(1), Version::v2, 0);
    e.onActionFrame(masterAdvert(mac(9), 530));
    Effects fx;
    for (int aw = 0; aw < 97; ++aw) fx = e.onAwTick();
    EXPECT_TRUE(fx.master_timeout);
    EXPECT_TRUE(fx.became_master);
    EXPECT_EQ(e.state().role, Role::master);
    EXPECT_EQ(e.state().top_master, mac(1));
}

TEST(Timeout, FramesFromParentKeepMasterAlive) {
    auto e = Election::start(mac(1), Version::v2, 0);
    e.onActionFrame(slaveAdvert(mac(3), 410, mac(9), mac(9), 530, {mac(9)}));
    for (int aw = 1; aw <= 300; ++aw) {
        if (aw % 7 == 0) e.onActionFrame(slaveAdvert(mac(3), 410, mac(9), mac(9), 530, {mac(9)}));
        EXPECT_FALSE(e.onAwTick().master_timeout);
    }
}

TEST(Timeout, DeadMasterNotReadoptedFromStaleAdverts) {
    auto e = Election::start(mac(1), Version::v2, 0);
    e.onActionFrame(masterAdvert(mac(9), 530));
    for (int aw = 0; aw < 97; ++aw) e.onAwTick();
    ASSERT_EQ(e.state().top_master, mac(1));
    // A neighbor still repeating the departed master must not pull it back.
    e.onActionFrame(slaveAdvert(mac(3), 410, mac(9), mac(9), 530, {mac(9)}));
    EXPECT_EQ(e.state().top_master, mac(1));
}

}  // namespace
}  // namespace awdl::election
