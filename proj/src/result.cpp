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

#include "awdl/result.hpp"

namespace awdl {

std::string_view errcName(Errc code) noexcept {
    switch (code) {
        case Errc::truncated_frame: return "TruncatedFrame";
        case Errc::not_awdl: return "NotAwdl";
        case Errc::bad_fixed_header: return "BadFixedHeader";
        case Errc::malformed_tlv: return "MalformedTlv";
        case Errc::oversize_tlv: return "OversizeTlv";
        case Errc::bad_llc: return "BadLlc";
        case Errc::bad_magic: return "BadMagic";
        case Errc::not_same_eaw: return "NotSameEaw";
        case Errc::missing_ap_channel: return "MissingApChannel";
        case Errc::bad_window: return "BadWindow";
        case Errc::peer_unknown: return "PeerUnknown";
        case Errc::script_conflict: return "ScriptConflict";
        case Errc::insufficient_pairs: return "InsufficientPairs";
        case Errc::no_common_frames: return "NoCommonFrames";
        case Errc::no_master_frames: return "NoMasterFrames";
        case Errc::no_pairs: return "NoPairs";
        case Errc::io_error: return "IoError";
        case Errc::bad_pcap: return "BadPcap";
        case Errc::invalid_scenario: return "InvalidScenario";
    }
    return "Unknown";
}

std::string Error::message() const {
    std::string out(errcName(code));
    if (!detail.empty()) {
        out += ": ";
        out += detail;
    }
    return out;
}

}  // namespace awdl
