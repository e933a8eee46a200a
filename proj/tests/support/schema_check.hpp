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

// Validator for the JSON Schema keywords used by schema/dissect.schema.json:
// type, const, enum, minimum, maximum, pattern, properties, required,
// additionalProperties, items, anyOf, oneOf and local $ref.

#include <regex>
#include <string>
#include <vector>

#include "json.hpp"

namespace awdl::testing {

class SchemaCheck {
public:
    using Json = nlohmann::ordered_json;

    explicit SchemaCheck(Json root) : root_(std::move(root)) {}

    /// Empty when `doc` conforms; otherwise one message per violation.
    std::vector<std::string> validate(const Json& doc) const {
        std::vector<std::string> errors;
        check(root_, doc, "$", errors);
        return errors;
    }

private:
    const Json& resolve(const std::string& ref) const {
        const Json* node = &root_;
        std::size_t pos = 2;  // skip "#/"
        while (pos <= ref.size()) {
            const auto next = ref.find('/', pos);
            const auto key = ref.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            node = &node->at(key);
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        return *node;
    }

    static bool hasType(const Json& v, const std::string& t) {
        if (t == "object") return v.is_object();
        if (t == "array") return v.is_array();
        if (t == "string") return v.is_string();
        if (t == "boolean") return v.is_boolean();
        if (t == "null") return v.is_null();
        if (t == "integer") return v.is_number_integer();
        if (t == "number") return v.is_number();
        return false;
    }

    bool matches(const Json& schema, const Json& v, const std::string& path) const {
        std::vector<std::string> scratch;
        check(schema, v, path, scratch);
        return scratch.empty();
    }

    void check(const Json& schema, const Json& v, const std::string& path, std::vector<std::string>& errors) const {
        auto fail = [&](const std::string& what) { errors.push_back(path + ": " + what); };

        if (schema.contains("$ref")) check(resolve(schema.at("$ref").get<std::string>()), v, path, errors);

        if (schema.contains("type")) {
            const auto& t = schema.at("type");
            bool ok = false;
            if (t.is_string()) {
                ok = hasType(v, t.get<std::string>());
            } else {
                for (const auto& x : t) ok = ok || hasType(v, x.get<std::string>());
            }
            if (!ok) {
                fail("expected type " + t.dump() + ", got " + v.dump());
                return;
            }
        }
        if (schema.contains("const") && v != schema.at("const")) fail("expected " + schema.at("const").dump());
        if (schema.contains("enum")) {
            bool ok = false;
            for (const auto& x : schema.at("enum")) ok = ok || v == x;
            if (!ok) fail("not in enum: " + v.dump());
        }
        if (v.is_number()) {
            if (schema.contains("minimum") && v.get<double>() < schema.at("minimum").get<double>())
                fail("below minimum: " + v.dump());
            if (schema.contains("maximum") && v.get<double>() > schema.at("maximum").get<double>())
                fail("above maximum: " + v.dump());
        }
        if (v.is_string() && schema.contains("pattern")) {
            const std::regex re(schema.at("pattern").get<std::string>());
            if (!std::regex_search(v.get<std::string>(), re)) fail("does not match pattern: " + v.dump());
        }
        if (v.is_object()) {
            if (schema.contains("required"))
                for (const auto& k : schema.at("required"))
                    if (!v.contains(k.get<std::string>())) fail("missing " + k.get<std::string>());
            const bool closed = schema.contains("additionalProperties") && schema.at("additionalProperties") == false;
            for (const auto& [key, value] : v.items()) {
                if (schema.contains("properties") && schema.at("properties").contains(key)) {
                    check(schema.at("properties").at(key), value, path + "." + key, errors);
                } else if (closed) {
                    fail("unexpected property " + key);
                }
            }
        }
        if (v.is_array() && schema.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i)
                check(schema.at("items"), v[i], path + "[" + std::to_string(i) + "]", errors);
        if (schema.contains("anyOf")) {
            bool ok = false;
            for (const auto& s : schema.at("anyOf")) ok = ok || matches(s, v, path);
            if (!ok) fail("matches no anyOf branch");
        }
        if (schema.contains("oneOf")) {
            int n = 0;
            for (const auto& s : schema.at("oneOf")) n += matches(s, v, path) ? 1 : 0;
            if (n != 1) fail("matches " + std::to_string(n) + " oneOf branches");
        }
    }

    Json root_;
};

}  // namespace awdl::testing
