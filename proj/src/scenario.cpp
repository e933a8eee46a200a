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

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "awdl/sim.hpp"
#include "json.hpp"

namespace awdl::sim {

namespace {

using nlohmann::json;

struct FieldError {
    std::string message;
};

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw FieldError{path + ": " + what}; }

void onlyKeys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) fail(path + "." + key, "unknown field");
    }
}

template <class T>
T number(const json& obj, const std::string& path, const char* key, T fallback, T lo, T hi) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    double d = v.get<double>();
    if (d < static_cast<double>(lo) || d > static_cast<double>(hi))
        fail(path + "." + key, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
        return static_cast<T>(v.get<std::int64_t>());
    } else {
        return static_cast<T>(d);
    }
}

std::string text(const json& obj, const std::string& path, const char* key, const std::string& fallback,
                 bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail(path + "." + key, "required");
        return fallback;
    }
    if (!obj.at(key).is_string()) fail(path + "." + key, "expected a string");
    return obj.at(key).get<std::string>();
}

bool flag(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) fail(path + "." + key, "expected true or false");
    return obj.at(key).get<bool>();
}

std::int64_t seconds(const json& obj, const std::string& path, const char* s_key, const char* us_key,
                     std::int64_t fallback) {
    if (obj.contains(us_key)) return number<std::int64_t>(obj, path, us_key, 0, 0, std::int64_t{1} << 50);
    if (obj.contains(s_key)) return std::llround(number<double>(obj, path, s_key, 0.0, 0.0, 1e9) * 1e6);
    return fallback;
}

ClockModel clockOf(const json& obj, const std::string& path) {
    ClockModel c;
    if (!obj.contains("clock")) return c;
    const json& j = obj.at("clock");
    const std::string p = path + ".clock";
    onlyKeys(j, p, {"offset_us", "drift_ppm", "jitter_sigma_us"});
    c.offset_us = number<std::int64_t>(j, p, "offset_us", 0, -(std::int64_t{1} << 40), std::int64_t{1} << 40);
    c.drift_ppm = number<double>(j, p, "drift_ppm", 0.0, -1000.0, 1000.0);
    c.jitter_sigma_us = number<std::int64_t>(j, p, "jitter_sigma_us", 0, 0, 1'000'000);
    return c;
}

Link linkOf(const json& obj, const std::string& path, Link fallback) {
    fallback.rssi = number<int>(obj, path, "rssi", fallback.rssi, -120, 0);
    fallback.loss = number<double>(obj, path, "loss", fallback.loss, 0.0, 1.0);
    return fallback;
}

NodeSpec nodeOf(const json& j, std::size_t index) {
    const std::string p = "nodes[" + std::to_string(index) + "]";
    onlyKeys(j, p,
             {"name", "address", "version", "device_class", "af_period_tu", "airplay", "primary_channel",
              "ap_channel", "sync_bias_us", "clock"});
    NodeSpec n;
    n.name = text(j, p, "name", "", true);
    if (j.contains("address")) {
        auto mac = MacAddress::parse(text(j, p, "address", ""));
        if (!mac) fail(p + ".address", "not a MAC address");
        n.config.address = *mac;
    } else {
        std::mt19937_64 rng(0x5eed0000 + index);
        n.config.address = randomAwdlMac(rng);
    }
    const std::string version = text(j, p, "version", "v3");
    if (version == "v3") {
        n.config.version = election::Version::v3;
    } else if (version == "v2") {
        n.config.version = election::Version::v2;
    } else {
        fail(p + ".version", "expected \"v2\" or \"v3\"");
    }
    n.config.device_class = number<std::uint8_t>(j, p, "device_class", 1, 1, 2);
    n.config.af_period_tu = number<std::uint16_t>(j, p, "af_period_tu", 110, 1, 0xffff);
    if (!node::validAfPeriod(n.config.af_period_tu)) fail(p + ".af_period_tu", "must be 110 or 440");
    n.config.airplay_mode = flag(j, p, "airplay", false);
    const auto primary = number<std::uint8_t>(j, p, "primary_channel", 44, 1, 200);
    if (primary == 149) {
        n.config.social = chanseq::SocialChannels::alternate();
    } else if (primary != 44) {
        fail(p + ".primary_channel", "expected 44 or 149");
    }
    if (j.contains("ap_channel")) n.config.ap_channel = number<std::uint8_t>(j, p, "ap_channel", 0, 1, 200);
    n.config.sync_bias_micros = number<std::int64_t>(j, p, "sync_bias_us", 0, -1'000'000, 1'000'000);
    n.clock = clockOf(j, p);
    return n;
}

ScriptAction actionOf(const json& j, std::size_t index) {
    const std::string p = "script[" + std::to_string(index) + "]";
    onlyKeys(j, p, {"t_s", "t_us", "action", "node", "peer", "rate_bps", "rssi", "loss", "bytes", "count"});
    ScriptAction a;
    if (!j.contains("t_s") && !j.contains("t_us")) fail(p + ".t_s", "required");
    a.time_us = seconds(j, p, "t_s", "t_us", 0);
    const std::string kind = text(j, p, "action", "", true);
    static const std::pair<const char*, ActionKind> kinds[] = {
        {"join", ActionKind::join},         {"leave", ActionKind::leave},
        {"set_load", ActionKind::set_load}, {"set_link", ActionKind::set_link},
        {"remove_link", ActionKind::remove_link}, {"send", ActionKind::send},
    };
    bool found = false;
    for (const auto& [name, k] : kinds) {
        if (kind == name) {
            a.kind = k;
            found = true;
        }
    }
    if (!found) fail(p + ".action", "unknown action \"" + kind + "\"");
    a.node = text(j, p, "node", "", true);
    const bool needsPeer = a.kind == ActionKind::set_link || a.kind == ActionKind::remove_link || a.kind == ActionKind::send;
    a.peer = text(j, p, "peer", "", needsPeer);
    if (a.kind == ActionKind::set_load) {
        if (!j.contains("rate_bps")) fail(p + ".rate_bps", "required");
        a.rate = number<double>(j, p, "rate_bps", 0.0, 0.0, 1e12);
    }
    a.link = linkOf(j, p, Link{});
    a.bytes = number<std::size_t>(j, p, "bytes", 100, 0, 65000);
    a.count = number<int>(j, p, "count", 1, 1, 1'000'000);
    return a;
}

Scenario scenarioOf(const json& root) {
    onlyKeys(root, "$",
             {"name", "seed", "duration_s", "duration_us", "topology", "default_link", "links", "nodes", "script",
              "sniffers", "airtime_us", "sync_master", "record_events", "description"});
    Scenario sc;
    sc.name = text(root, "$", "name", "scenario");
    sc.seed = number<std::uint64_t>(root, "$", "seed", 0, 0, std::numeric_limits<std::uint32_t>::max());
    sc.duration_us = seconds(root, "$", "duration_s", "duration_us", sc.duration_us);
    const std::string topology = text(root, "$", "topology", "full_mesh");
    if (topology == "full_mesh") {
        sc.full_mesh = true;
    } else if (topology == "explicit") {
        sc.full_mesh = false;
    } else {
        fail("$.topology", "expected \"full_mesh\" or \"explicit\"");
    }
    if (root.contains("default_link")) {
        onlyKeys(root.at("default_link"), "$.default_link", {"rssi", "loss"});
        sc.default_link = linkOf(root.at("default_link"), "$.default_link", Link{});
    }
    sc.airtime_us = number<std::int64_t>(root, "$", "airtime_us", 0, 0, 100'000);
    sc.record_events = flag(root, "$", "record_events", true);

    if (!root.contains("nodes") || !root.at("nodes").is_array()) fail("$.nodes", "required array");
    for (std::size_t i = 0; i < root.at("nodes").size(); ++i) sc.nodes.push_back(nodeOf(root.at("nodes")[i], i));

    if (root.contains("links")) {
        if (!root.at("links").is_array()) fail("$.links", "expected an array");
        for (std::size_t i = 0; i < root.at("links").size(); ++i) {
            const json& l = root.at("links")[i];
            const std::string p = "links[" + std::to_string(i) + "]";
            onlyKeys(l, p, {"a", "b", "rssi", "loss"});
            std::string a = text(l, p, "a", "", true);
            std::string b = text(l, p, "b", "", true);
            if (a == b) fail(p, "a link needs two different nodes");
            if (b < a) std::swap(a, b);
            sc.links[{a, b}] = linkOf(l, p, sc.default_link);
        }
    }

    if (root.contains("script")) {
        if (!root.at("script").is_array()) fail("$.script", "expected an array");
        for (std::size_t i = 0; i < root.at("script").size(); ++i)
            sc.script.push_back(actionOf(root.at("script")[i], i));
    }

    if (root.contains("sniffers")) {
        if (!root.at("sniffers").is_array()) fail("$.sniffers", "expected an array");
        for (std::size_t i = 0; i < root.at("sniffers").size(); ++i) {
            const json& s = root.at("sniffers")[i];
            const std::string p = "sniffers[" + std::to_string(i) + "]";
            onlyKeys(s, p, {"name", "channel", "calibration_channel", "calibration_s", "clock", "rssi"});
            SnifferSpec sn;
            sn.name = text(s, p, "name", "sniffer" + std::to_string(i));
            sn.channel = number<std::uint8_t>(s, p, "channel", 44, 1, 200);
            sn.calibration_channel = number<std::uint8_t>(s, p, "calibration_channel", sn.channel, 1, 200);
            sn.calibration_us = seconds(s, p, "calibration_s", "calibration_us", 0);
            sn.clock = clockOf(s, p);
            sn.rssi = number<int>(s, p, "rssi", -40, -120, 0);
            sc.sniffers.push_back(std::move(sn));
        }
    }
    if (root.contains("sync_master")) sc.sync_master = text(root, "$", "sync_master", "");
    return sc;
}

std::string lineColumn(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

Result<Scenario> parseScenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        return makeError(Errc::invalid_scenario, lineColumn(json_text, e.byte) + ": malformed JSON");
    }
    try {
        Scenario sc = scenarioOf(root);
        if (auto st = validateScenario(sc); !st) return st.error();
        return sc;
    } catch (const FieldError& e) {
        return makeError(Errc::invalid_scenario, e.message);
    }
}

Result<Scenario> loadScenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) return makeError(Errc::io_error, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto sc = parseScenario(ss.str());
    if (!sc) return makeError(sc.error().code, path + ": " + sc.error().detail);
    return sc;
}

}  // namespace awdl::sim
