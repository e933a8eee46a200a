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

#include <cassert>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace awdl {

/// Error codes shared by every module. Decoders and analyzers return these
/// as values; nothing in the library throws on malformed input.
enum class Errc {
    truncated_frame,
    not_awdl,
    bad_fixed_header,
    malformed_tlv,
    oversize_tlv,
    bad_llc,
    bad_magic,
    not_same_eaw,
    missing_ap_channel,
    bad_window,
    peer_unknown,
    script_conflict,
    insufficient_pairs,
    no_common_frames,
    no_master_frames,
    no_pairs,
    io_error,
    bad_pcap,
    invalid_scenario,
};

std::string_view errcName(Errc code) noexcept;

struct Error {
    Errc code;
    std::string detail;

    std::string message() const;
};

/// Value-or-error. Modeled loosely on std::expected, which is not available
/// in C++20.
template <class T>
class [[nodiscard]] Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(Error error) : v_(std::move(error)) {}

    bool ok() const noexcept { return v_.index() == 0; }
    explicit operator bool() const noexcept { return ok(); }

    T& value() & {
        assert(ok());
        return std::get<0>(v_);
    }
    const T& value() const& {
        assert(ok());
        return std::get<0>(v_);
    }
    T&& value() && {
        assert(ok());
        return std::get<0>(std::move(v_));
    }
    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }
    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }

    const Error& error() const {
        assert(!ok());
        return std::get<1>(v_);
    }

private:
    std::variant<T, Error> v_;
};

struct Ok {
    bool operator==(const Ok&) const = default;
};
using Status = Result<Ok>;

inline Error makeError(Errc code, std::string detail = {}) { return Error{code, std::move(detail)}; }

}  // namespace awdl
