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

// Bounds-checked cursor over a byte span plus an appending writer. Internal to
// the codec and pcap code.

#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "awdl/mac.hpp"

namespace awdl::detail {

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    std::size_t position() const noexcept { return pos_; }
    bool ok() const noexcept { return !failed_; }
    bool need(std::size_t n) noexcept {
        if (failed_ || remaining() < n) {
            failed_ = true;
            return false;
        }
        return true;
    }

    std::uint8_t u8() noexcept {
        if (!need(1)) return 0;
        return data_[pos_++];
    }
    std::uint16_t le16() noexcept {
        if (!need(2)) return 0;
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | data_[pos_ + 1] << 8);
        pos_ += 2;
        return v;
    }
    std::uint16_t be16() noexcept {
        if (!need(2)) return 0;
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t le32() noexcept {
        if (!need(4)) return 0;
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = v << 8 | data_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }
    std::uint32_t be32() noexcept {
        if (!need(4)) return 0;
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }
    std::uint64_t le64() noexcept {
        if (!need(8)) return 0;
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = v << 8 | data_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 8;
        return v;
    }
    MacAddress mac() noexcept {
        MacAddress m;
        if (!need(6)) return m;
        std::memcpy(m.octets.data(), data_.data() + pos_, 6);
        pos_ += 6;
        return m;
    }
    std::span<const std::uint8_t> take(std::size_t n) noexcept {
        if (!need(n)) return {};
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::span<const std::uint8_t> rest() noexcept { return take(remaining()); }
    void skip(std::size_t n) noexcept { (void)take(n); }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
    bool failed_ = false;
};

class Writer {
public:
    explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void le16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v));
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void be16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void le32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void be32(std::uint32_t v) {
        for (int i = 3; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void le64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void mac(const MacAddress& m) { out_.insert(out_.end(), m.octets.begin(), m.octets.end()); }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    std::size_t size() const noexcept { return out_.size(); }

private:
    std::vector<std::uint8_t>& out_;
};

}  // namespace awdl::detail
