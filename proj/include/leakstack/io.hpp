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


#ifndef LEAKSTACK_IO_HPP
#define LEAKSTACK_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "leakstack/experiments.hpp"
#include "leakstack/rb.hpp"
#include "leakstack/readout.hpp"
#include "leakstack/stabilizer.hpp"

namespace leakstack {

using Json = nlohmann::ordered_json;

/// Bumped whenever a documented column or key changes.
constexpr int kSchemaVersion = 1;

std::string tool_version();

/// Provenance block embedded in every output document. The worker count is
/// deliberately absent: it never changes a result.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> arguments;  // subcommand options, verbatim
    std::string config_path;
    uint64_t seed = 0;
    std::string out_dir;
    std::string version = tool_version();
    std::string timestamp;
};

/// An explicit value wins; otherwise SOURCE_DATE_EPOCH; otherwise the epoch.
/// Never the wall clock, so reruns stay byte-identical.
std::string manifest_timestamp(const std::optional<std::string> &explicit_value = std::nullopt);
std::string format_utc(int64_t seconds_since_epoch);

Json to_json(const RunManifest &manifest);
/// {schema_version, kind, manifest}; callers add a "result" entry.
Json make_document(const RunManifest &manifest, const std::string &kind);
/// Two-space indent and a trailing newline.
std::string dump(const Json &doc);

Json to_json(const RbFit &fit);
Json to_json(const RbResult &result);
/// Columns: qubit,arm,m,F
void write_rb_curves_csv(const RbResult &result, std::ostream &out);

Json to_json(const CycleTrace &trace, bool include_syndromes = false);
/// Columns: cycle,qubit,P_f,detection_fraction
void write_cycle_trace_csv(const CycleTrace &trace, std::ostream &out);

Json to_json(const PropagationResult &result);
Json to_json(const EfficiencyReport &report);
Json to_json(const AssignmentReport &report);
Json to_json(const std::vector<RepRatePoint> &curve);

}  // namespace leakstack

#endif  // LEAKSTACK_IO_HPP
