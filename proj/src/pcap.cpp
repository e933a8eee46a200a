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

#include "awdl/pcap.hpp"

#include <fstream>
#include <iterator>

#include "byte_io.hpp"

namespace awdl::pcap {

namespace {

constexpr std::uint32_t kMagicMicros = 0xa1b2c3d4;
constexpr std::uint32_t kMagicNanos = 0xa1b23c4d;
constexpr std::uint32_t kRadiotapExt = 1u << 31;

std::uint32_t swap32(std::uint32_t v) noexcept {
    return (v >> 24) | ((v >> 8) & 0xff00) | ((v << 8) & 0xff0000) | (v << 24);
}

struct FieldLayout {
    std::size_t align;
    std::size_t size;
};

// Radiotap fields 0..22 in present-bit order.
constexpr FieldLayout kFields[] = {
    {8, 8},   // 0 TSFT
    {1, 1},   // 1 Flags
    {1, 1},   // 2 Rate
    {2, 4},   // 3 Channel
    {2, 2},   // 4 FHSS
    {1, 1},   // 5 dBm antenna signal
    {1, 1},   // 6 dBm antenna noise
    {2, 2},   // 7 lock quality
    {2, 2},   // 8 TX attenuation
    {2, 2},   // 9 dB TX attenuation
    {1, 1},   // 10 dBm TX power
    {1, 1},   // 11 antenna
    {1, 1},   // 12 dB antenna signal
    {1, 1},   // 13 dB antenna noise
    {2, 2},   // 14 RX flags
    {2, 2},   // 15 TX flags
    {1, 1},   // 16 RTS retries
    {1, 1},   // 17 data retries
    {4, 8},   // 18 XChannel
    {1, 3},   // 19 MCS
    {4, 8},   // 20 A-MPDU status
    {2, 12},  // 21 VHT
    {8, 12},  // 22 timestamp
};

}  // namespace

Result<File> parse(std::span<const std::uint8_t> bytes) {
    detail::Reader r(bytes);
    const std::uint32_t raw = r.le32();
    if (!r.ok()) return makeError(Errc::bad_pcap, "file shorter than the global header");

    bool swapped = false;
    bool nanos = false;
    if (raw == kMagicMicros || raw == kMagicNanos) {
        nanos = raw == kMagicNanos;
    } else if (swap32(raw) == kMagicMicros || swap32(raw) == kMagicNanos) {
        swapped = true;
        nanos = swap32(raw) == kMagicNanos;
    } else {
        return makeError(Errc::bad_pcap, "unrecognized magic");
    }
    auto u32 = [&] { return swapped ? r.be32() : r.le32(); };
    auto u16 = [&] { return swapped ? r.be16() : r.le16(); };

    File file;
    u16();  // version major
    u16();  // version minor
    u32();  // thiszone
    u32();  // sigfigs
    file.snaplen = u32();
    file.linktype = u32();
    if (!r.ok()) return makeError(Errc::bad_pcap, "truncated global header");
    if (file.linktype != kLinkTypeIeee80211 && file.linktype != kLinkTypeRadiotap)
        return makeError(Errc::bad_pcap, "unsupported link type " + std::to_string(file.linktype));

    while (r.remaining() > 0) {
        const std::uint32_t sec = u32();
        const std::uint32_t frac = u32();
        const std::uint32_t incl = u32();
        const std::uint32_t orig = u32();
        if (!r.ok()) return makeError(Errc::bad_pcap, "truncated record header");
        auto data = r.take(incl);
        if (!r.ok()) return makeError(Errc::bad_pcap, "truncated record body");
        Packet p;
        p.timestamp_us = std::int64_t{sec} * 1'000'000 + (nanos ? frac / 1000 : frac);
        p.original_length = orig;
        p.data.assign(data.begin(), data.end());
        file.packets.push_back(std::move(p));
    }
    return file;
}

Result<File> readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return makeError(Errc::io_error, "cannot open " + path);
    wire::Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(bytes);
}

wire::Bytes serialize(const File& file) {
    wire::Bytes out;
    detail::Writer w(out);
    w.le32(kMagicMicros);
    w.le16(2);
    w.le16(4);
    w.le32(0);
    w.le32(0);
    w.le32(file.snaplen);
    w.le32(file.linktype);
    for (const auto& p : file.packets) {
        w.le32(static_cast<std::uint32_t>(p.timestamp_us / 1'000'000));
        w.le32(static_cast<std::uint32_t>(p.timestamp_us % 1'000'000));
        w.le32(static_cast<std::uint32_t>(p.data.size()));
        w.le32(p.original_length ? p.original_length : static_cast<std::uint32_t>(p.data.size()));
        w.bytes(p.data);
    }
    return out;
}

Status writeFile(const std::string& path, const File& file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return makeError(Errc::io_error, "cannot write " + path);
    const auto bytes = serialize(file);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) return makeError(Errc::io_error, "write failed for " + path);
    return Ok{};
}

Result<Radiotap> parseRadiotap(std::span<const std::uint8_t> bytes) {
    detail::Reader r(bytes);
    const std::uint8_t version = r.u8();
    r.u8();
    const std::uint16_t len = r.le16();
    if (!r.ok()) return makeError(Errc::truncated_frame, "radiotap header");
    if (version != 0) return makeError(Errc::bad_pcap, "radiotap version " + std::to_string(version));
    if (len < 8 || len > bytes.size()) return makeError(Errc::truncated_frame, "radiotap length");

    std::vector<std::uint32_t> present;
    do {
        present.push_back(r.le32());
        if (!r.ok() || r.position() > len) return makeError(Errc::truncated_frame, "radiotap present words");
    } while (present.back() & kRadiotapExt);

    Radiotap rt;
    rt.length = len;
    std::size_t pos = r.position();
    const std::uint32_t bits = present.front();
    for (int bit = 0; bit < 23; ++bit) {
        if (!(bits & (1u << bit))) continue;
        const auto f = kFields[bit];
        pos = (pos + f.align - 1) / f.align * f.align;
        if (pos + f.size > len) return makeError(Errc::truncated_frame, "radiotap field " + std::to_string(bit));
        detail::Reader fr(bytes.subspan(pos, f.size));
        switch (bit) {
            case 0: rt.tsft = fr.le64(); break;
            case 1: rt.flags = fr.u8(); break;
            case 3: rt.frequency = fr.le16(); break;
            case 5: rt.dbm_signal = static_cast<std::int8_t>(fr.u8()); break;
            default: break;
        }
        pos += f.size;
    }
    return rt;
}

wire::Bytes buildRadiotap(std::uint64_t tsft, std::uint8_t flags, std::uint16_t frequency, int dbm_signal) {
    wire::Bytes out;
    detail::Writer w(out);
    w.u8(0);
    w.u8(0);
    w.le16(23);
    w.le32((1u << 0) | (1u << 1) | (1u << 3) | (1u << 5));
    w.le64(tsft);
    w.u8(flags);
    w.u8(0);  // pad to the channel field
    w.le16(frequency);
    w.le16(frequency > 3000 ? 0x0140 : 0x00c0);  // 5 GHz OFDM / 2.4 GHz OFDM
    w.u8(static_cast<std::uint8_t>(static_cast<std::int8_t>(dbm_signal)));
    return out;
}

std::uint16_t channelToFrequency(std::uint8_t channel) noexcept {
    if (channel == 14) return 2484;
    if (channel >= 1 && channel <= 13) return static_cast<std::uint16_t>(2407 + 5 * channel);
    return static_cast<std::uint16_t>(5000 + 5 * channel);
}

std::uint8_t frequencyToChannel(std::uint16_t mhz) noexcept {
    if (mhz == 2484) return 14;
    if (mhz >= 2412 && mhz <= 2472) return static_cast<std::uint8_t>((mhz - 2407) / 5);
    if (mhz >= 5000 && mhz < 6000) return static_cast<std::uint8_t>((mhz - 5000) / 5);
    return 0;
}

std::span<const std::uint8_t> CaptureRecord::body() const noexcept {
    std::span<const std::uint8_t> s(frame);
    if (has_fcs && s.size() >= 4) s = s.first(s.size() - 4);
    return s;
}

std::vector<CaptureRecord> toRecords(const File& file, const std::string& source_id) {
    std::vector<CaptureRecord> out;
    out.reserve(file.packets.size());
    for (std::size_t i = 0; i < file.packets.size(); ++i) {
        const auto& p = file.packets[i];
        CaptureRecord rec;
        rec.source_id = source_id;
        rec.index = i;
        rec.timestamp_us = p.timestamp_us;
        if (file.linktype == kLinkTypeRadiotap) {
            auto rt = parseRadiotap(p.data);
            if (!rt) {
                rec.error = rt.error();
                out.push_back(std::move(rec));
                continue;
            }
            if (rt->tsft) rec.timestamp_us = static_cast<std::int64_t>(*rt->tsft);
            rec.rssi = rt->dbm_signal;
            if (rt->frequency) rec.channel = frequencyToChannel(*rt->frequency);
            rec.has_fcs = rt->hasFcs();
            rec.frame.assign(p.data.begin() + static_cast<std::ptrdiff_t>(rt->length), p.data.end());
        } else {
            rec.frame = p.data;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

Result<std::vector<CaptureRecord>> loadRecords(const std::string& path, const std::string& source_id) {
    auto file = readFile(path);
    if (!file) return file.error();
    return toRecords(*file, source_id);
}

}  // namespace awdl::pcap
