// Copyright 2026 The hybc Authors
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

/// JSON forms of run results, resource counts and gate-set files.

#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hybc/fock_sim.hpp"
#include "hybc/rewrite.hpp"

#ifndef HYBC_VERSION
#define HYBC_VERSION "0.0.0"
#endif

namespace hybc {

using ojson = nlohmann::ordered_json;

struct RunMetadata {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> shots;
    std::map<WireLabel, std::size_t> cutoffs;
    std::string gateset;
};

inline ojson metadata_json(const RunMetadata &m) {
    ojson j;
    j["tool"] = "hybc";
    j["version"] = HYBC_VERSION;
    j["seed"] = m.seed ? ojson(*m.seed) : ojson(nullptr);
    j["shots"] = m.shots ? ojson(*m.shots) : ojson(nullptr);
    ojson cut = ojson::object();
    for (const auto &[w, d] : m.cutoffs) {
        cut[w.str()] = d;
    }
    j["cutoffs"] = cut;
    j["gateset"] = m.gateset;
    return j;
}

inline ojson outcome_json(const Outcome &o) {
    if (const auto *u = std::get_if<std::uint64_t>(&o)) {
        return *u;
    }
    return std::get<double>(o);
}

inline std::string measurement_kind_name(MeasurementSpec::Kind k) {
    switch (k) {
        case MeasurementSpec::Kind::Expval:
            return "expval";
        case MeasurementSpec::Kind::Var:
            return "var";
        case MeasurementSpec::Kind::Sample:
            return "sample";
    }
    return "?";
}

/// Discrete outcome tuple as a space-separated key, e.g. "0 1 4".
inline std::string outcome_key(const OutcomeTuple &t) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        s += (i ? " " : "") + outcome_str(t[i]);
    }
    return s;
}

inline ojson measurement_result_json(const MeasurementResult &r) {
    ojson j;
    j["kind"] = measurement_kind_name(r.spec.kind);
    j["measurement"] = r.spec.str();
    if (r.spec.obs) {
        j["observable"] = r.spec.obs->str();
    }
    ojson wires = ojson::array();
    for (const auto &w : r.spec.wires()) {
        wires.push_back(w.str());
    }
    j["wires"] = wires;
    if (r.value) {
        j["value"] = *r.value;
    }
    if (!r.samples.empty()) {
        ojson samples = ojson::array();
        bool discrete = true;
        for (const auto &s : r.samples) {
            ojson row = ojson::array();
            for (const auto &o : s) {
                discrete = discrete && std::holds_alternative<std::uint64_t>(o);
                row.push_back(outcome_json(o));
            }
            samples.push_back(row);
        }
        if (discrete) {
            std::map<std::string, std::size_t> counts;
            for (const auto &s : r.samples) {
                counts[outcome_key(s)] += 1;
            }
            ojson c = ojson::object();
            for (const auto &[k, v] : counts) {
                c[k] = v;
            }
            j["counts"] = c;
        }
        j["samples"] = samples;
    }
    return j;
}

inline ojson run_result_json(const RunResult &r, const std::string &gateset) {
    ojson j;
    j["metadata"] = metadata_json({r.seed, r.shots, r.cutoffs, gateset});
    ojson results = ojson::array();
    for (const auto &m : r.results) {
        results.push_back(measurement_result_json(m));
    }
    j["results"] = results;
    ojson warnings = ojson::array();
    for (const auto &w : r.warnings) {
        warnings.push_back(w);
    }
    j["warnings"] = warnings;
    return j;
}

inline ojson resource_count_json(const ResourceCount &rc) {
    ojson j;
    ojson g = ojson::object();
    for (const auto &[k, v] : rc.gates) {
        g[k] = v;
    }
    ojson a = ojson::object();
    for (const auto &[k, v] : rc.ancillas) {
        a[k] = v;
    }
    j["gates"] = g;
    j["ancillas"] = a;
    return j;
}

/// `{"name": ..., "gates": [...]}`; entries are IR names (`CD`) or QASM
/// tokens (`cv_cd`).
inline GateSet gateset_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("gates") || !j["gates"].is_array()) {
        throw Error("gate set JSON needs a \"gates\" array");
    }
    GateSet s;
    s.name = j.value("name", std::string("custom"));
    for (const auto &tok : j["gates"]) {
        if (!tok.is_string()) {
            throw Error("gate set entries must be strings");
        }
        const auto name = tok.get<std::string>();
        if (gate_registry().count(name)) {
            s.gates.insert(name);
        } else {
            s.gates.insert(lookup_qasm(name)->name);
        }
    }
    return s;
}

inline std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json read_json_file(const std::string &path) {
    try {
        return nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception &e) {
        throw Error(path + ": " + e.what());
    }
}

/// A built-in set name or a path to a gate-set JSON file.
inline GateSet resolve_gateset(const std::string &spec) {
    if (spec == "full" || spec == "sim-native" || spec == "qscout-native") {
        return enumerate_gateset(spec);
    }
    return gateset_from_json(read_json_file(spec));
}

}  // namespace hybc
