// Copyright 2026 The leakstack Authors
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


#include "leakstack/io.hpp"

#include <cstdlib>
#include <ctime>
#include <ostream>

#include "leakstack/errors.hpp"
#include "leakstack/ini.hpp"

#ifndef LEAKSTACK_VERSION
#define LEAKSTACK_VERSION "0.0.0"
#endif

namespace leakstack {

std::string tool_version() { return LEAKSTACK_VERSION; }

std::string format_utc(int64_t seconds) {
    const auto t = static_cast<std::time_t>(seconds);
    std::tm tm{};
    if (!gmtime_r(&t, &tm)) throw InvariantError("timestamp out of range");
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string manifest_timestamp(const std::optional<std::string> &explicit_value) {
    if (explicit_value) return *explicit_value;
    if (const char *env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
        char *end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (*end != '\0') throw ConfigError(std::string("SOURCE_DATE_EPOCH is not an integer: ") + env);
        return format_utc(v);
    }
    return format_utc(0);
}

Json to_json(const RunManifest &m) {
    Json j;
    j["command"] = m.command;
    j["arguments"] = Json::object();
    for (const auto &[k, v] : m.arguments) j["arguments"][k] = v;
    j["config"] = m.config_path;
    j["seed"] = m.seed;
    j["out"] = m.out_dir;
    j["version"] = m.version;
    j["timestamp"] = m.timestamp;
    return j;
}

Json make_document(const RunManifest &manifest, const std::string &kind) {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = kind;
    doc["manifest"] = to_json(manifest);
    return doc;
}

std::string dump(const Json &doc) { return doc.dump(2) + "\n"; }

Json to_json(const RbFit &fit) {
    return Json{{"A", fit.A}, {"B", fit.B}, {"p", fit.p}, {"r", fit.r}, {"rss", fit.rss}, {"converged", fit.converged}};
}

Json to_json(const RbResult &result) {
    Json j;
    j["m_values"] = result.config.m_values;
    j["sequences"] = result.config.sequences;
    j["interleaved"] = to_string(result.config.interleaved);
    j["seed"] = result.config.seed;
    Json qs = Json::array();
    for (const auto &q : result.qubits) {
        Json e;
        e["qubit"] = q.qubit;
        e["F_ref"] = q.F_ref;
        e["reference"] = to_json(q.ref);
        if (q.interleaved) {
            e["F_int"] = q.F_int;
            e["interleaved"] = to_json(*q.interleaved);
        }
        if (q.r_op) e["r_op"] = *q.r_op;
        qs.push_back(std::move(e));
    }
    j["qubits"] = std::move(qs);
    return j;
}

void write_rb_curves_csv(const RbResult &result, std::ostream &out) {
    out << "qubit,arm,m,F\n";
    for (const auto &q : result.qubits) {
        auto rows = [&](const std::vector<double> &F, const char *arm) {
            for (size_t i = 0; i < F.size(); ++i) {
                out << q.qubit << ',' << arm << ',' << result.config.m_values[i] << ',' << ini::format_double(F[i])
                    << '\n';
            }
        };
        rows(q.F_ref, "reference");
        rows(q.F_int, "interleaved");
    }
}

Json to_json(const CycleTrace &trace, bool include_syndromes) {
    Json j;
    j["qubits"] = trace.qubits;
    j["shots"] = trace.shots;
    j["P_f"] = Json::object();
    j["leaked"] = Json::object();
    for (size_t q = 0; q < trace.qubits.size(); ++q) {
        j["P_f"][trace.qubits[q]] = trace.P_f[q];
        j["leaked"][trace.qubits[q]] = trace.leaked[q];
    }
    j["detection_fraction"] = trace.detection;
    Json fits = Json::array();
    if (trace.P_f.front().size() >= 2) {
        for (const auto &f : leakage_trace(trace)) {
            fits.push_back(Json{{"qubit", f.qubit}, {"slope", f.slope}, {"intercept", f.intercept}, {"growth", f.growth}});
        }
    }
    j["leakage_fit"] = std::move(fits);
    if (include_syndromes) {
        j["expected"] = trace.expected;
        j["syndromes"] = trace.syndromes;
        j["initial_parity"] = trace.initial_parity;
    }
    return j;
}

void write_cycle_trace_csv(const CycleTrace &trace, std::ostream &out) {
    out << "cycle,qubit,P_f,detection_fraction\n";
    const size_t n = trace.P_f.front().size();
    for (size_t k = 0; k < n; ++k) {
        // P_f has a cycle-0 entry; detection starts at cycle 1.
        const std::string det = k >= 1 && k - 1 < trace.detection.size() ? ini::format_double(trace.detection[k - 1]) : "";
        for (size_t q = 0; q < trace.qubits.size(); ++q) {
            out << k << ',' << trace.qubits[q] << ',' << ini::format_double(trace.P_f[q][k]) << ',' << det << '\n';
        }
    }
}

Json to_json(const PropagationResult &result) {
    Json j;
    j["couplers"] = result.couplers;
    j["c_lru"] = result.c_lru;
    j["waits_ns"] = result.waits;
    j["occupancy"] = result.occupancy;
    return j;
}

Json to_json(const EfficiencyReport &r) {
    Json j{{"eta", r.eta},
           {"P_target_prepared", r.P_target_prepared},
           {"P_lower_prepared", r.P_lower_prepared},
           {"P_target_after_lru", r.P_target_after_lru}};
    j["warnings"] = r.warnings;
    return j;
}

Json to_json(const AssignmentReport &r) {
    Json j;
    j["P"] = r.P;
    j["shots"] = r.shots;
    j["outliers"] = r.outliers;
    j["outlier_fraction"] = r.outlier_fraction;
    if (r.epsilon_n) j["epsilon_n"] = *r.epsilon_n;
    return j;
}

Json to_json(const std::vector<RepRatePoint> &curve) {
    Json a = Json::array();
    for (const auto &p : curve) {
        a.push_back(Json{{"rate_khz", p.rate_khz},
                         {"residual", p.residual},
                         {"error_g", p.error_g},
                         {"error_e", p.error_e},
                         {"fidelity", p.fidelity}});
    }
    return a;
}

}  // namespace leakstack
