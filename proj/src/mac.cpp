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

#include "awdl/mac.hpp"

#include <cstdio>

namespace awdl {

namespace {

int hexValue(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
    // xx:xx:xx:xx:xx:xx, '-' also accepted as separator
    if (text.size() != 17) return std::nullopt;
    MacAddress mac;
    for (std::size_t i = 0; i < 6; ++i) {
        const std::size_t pos = i * 3;
        const int hi = hexValue(text[pos]);
        const int lo = hexValue(text[pos + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        if (i < 5 && text[pos + 2] != ':' && text[pos + 2] != '-') return std::nullopt;
        mac.octets[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return mac;
}

std::string MacAddress::toString() const {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", octets[0], octets[1], octets[2],
                  octets[3], octets[4], octets[5]);
    return buf;
}

std::uint64_t MacAddress::toU64() const noexcept {
    std::uint64_t v = 0;
    for (auto o : octets) v = v << 8 | o;
    return v;
}

MacAddress MacAddress::fromU64(std::uint64_t v) noexcept {
    MacAddress mac;
    for (int i = 5; i >= 0; --i) {
        mac.octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
    return mac;
}

std::string Ipv6Address::toString() const {
    std::array<unsigned, 8> groups{};
    for (std::size_t i = 0; i < 8; ++i) groups[i] = unsigned(bytes[2 * i]) << 8 | bytes[2 * i + 1];

    // Longest run of zero groups (length >= 2) collapses to "::"; first run wins ties.
    int bestStart = -1, bestLen = 0;
    for (int i = 0; i < 8;) {
        if (groups[static_cast<std::size_t>(i)] != 0) {
            ++i;
            continue;
        }
        int j = i;
        while (j < 8 && groups[static_cast<std::size_t>(j)] == 0) ++j;
        if (j - i > bestLen) {
            bestStart = i;
            bestLen = j - i;
        }
        i = j;
    }
    if (bestLen < 2) bestStart = -1;

    std::string out;
    char buf[8];
    for (int i = 0; i < 8; ++i) {
        if (i == bestStart) {
            out += "::";
            i += bestLen - 1;
            continue;
        }
        if (!out.empty() && out.back() != ':') out += ':';
        std::snprintf(buf, sizeof(buf), "%x", groups[static_cast<std::size_t>(i)]);
        out += buf;
    }
    return out;
}

Ipv6Address linkLocalAddress(const MacAddress& mac) noexcept {
    Ipv6Address addr;
    addr.bytes[0] = 0xfe;
    addr.bytes[1] = 0x80;
    const auto& o = mac.octets;
    addr.bytes[8] = static_cast<std::uint8_t>(o[0] ^ 0x02);
    addr.bytes[9] = o[1];
    addr.bytes[10] = o[2];
    addr.bytes[11] = 0xff;
    addr.bytes[12] = 0xfe;
    addr.bytes[13] = o[3];
    addr.bytes[14] = o[4];
    addr.bytes[15] = o[5];
    return addr;
}

std::optional<MacAddress> macFromLinkLocal(const Ipv6Address& addr) noexcept {
    const auto& b = addr.bytes;
    if (b[0] != 0xfe || b[1] != 0x80 || b[11] != 0xff || b[12] != 0xfe) return std::nullopt;
    for (std::size_t i = 2; i < 8; ++i)
        if (b[i] != 0) return std::nullopt;
    return MacAddress{{static_cast<std::uint8_t>(b[8] ^ 0x02), b[9], b[10], b[13], b[14], b[15]}};
}

MacAddress randomAwdlMac(std::mt19937_64& rng) {
    const std::uint64_t bits = rng();
    MacAddress mac = MacAddress::fromU64(bits & 0xffff'ffff'ffffULL);
    mac.octets[0] = static_cast<std::uint8_t>((mac.octets[0] & 0xfc) | 0x02);
    return mac;
}

}  // namespace awdl
