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

// JSON rendering of decoded frames. Field names follow the on-air layout in
// snake case; schema/dissect.schema.json documents the output.

#include <vector>

#include "awdl/pcap.hpp"
#include "awdl/wire.hpp"
#include "json.hpp"

namespace awdl::dissect {

using Json = nlohmann::ordered_json;

Json envelopeJson(const wire::Dot11Envelope& env);
Json tlvJson(const wire::Tlv& tlv);
Json actionFrameJson(const wire::ActionFrame& frame);
Json dataFrameJson(const wire::DataFrame& frame);

struct Options {
    bool verbose = false;  // also report skipped frames
};

/// One object per AWDL frame, in capture order. Decode failures become
/// error objects; other traffic is skipped.
std::vector<Json> dissectRecords(const std::vector<pcap::CaptureRecord>& records, const Options& options = {});

}  // namespace awdl::dissect
