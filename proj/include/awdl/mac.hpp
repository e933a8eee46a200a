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

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace awdl {

/// 48-bit IEEE 802 MAC address. Ordering is numerical (big-endian octet order),
/// which the election uses to break metric ties.
struct MacAddress {
    std::array<std::uint8_t, 6> octets{};

    constexpr MacAddress() = default;
    constexpr explicit MacAddress(std::array<std::uint8_t, 6> o) : octets(o) {}

    static std::optional<MacAddress> parse(std::string_view text);

    /// Lowercase, colon separated: "00:25:00:ff:94:73".
    std::string toString() const;
    std::uint64_t toU64() const noexcept;
    static MacAddress fromU64(std::uint64_t v) noexcept;

    bool isMulticast() const noexcept { return (octets[0] & 0x01) != 0; }
    bool isLocallyAdministered() const noexcept { return (octets[0] & 0x02) != 0; }

    auto operator<=>(const MacAddress&) const = default;
};

/// BSSID carried by every AWDL frame.
inline constexpr MacAddress kAwdlBssid{{0x00, 0x25, 0x00, 0xff, 0x94, 0x73}};
inline constexpr MacAddress kBroadcast{{0xff, 0xff, 0xff, 0xff, 0xff, 0xff}};

struct Ipv6Address {
    std::array<std::uint8_t, 16> bytes{};

    /// RFC 5952 canonical text form.
    std::string toString() const;
    auto operator<=>(const Ipv6Address&) const = default;
};

/// fe80::/64 address whose interface identifier is the modified EUI-64 of `mac`.
Ipv6Address linkLocalAddress(const MacAddress& mac) noexcept;

/// Inverse of linkLocalAddress for addresses that carry an ff:fe EUI-64 marker.
std::optional<MacAddress> macFromLinkLocal(const Ipv6Address& addr) noexcept;

/// Locally administered, unicast random address (fresh per interface activation).
MacAddress randomAwdlMac(std::mt19937_64& rng);

}  // namespace awdl
