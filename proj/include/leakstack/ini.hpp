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


// Small helpers shared by the INI-backed config loaders. Not part of the
// public API.

#ifndef LEAKSTACK_INI_HPP
#define LEAKSTACK_INI_HPP

#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace leakstack::ini {

/// Parses INI text; ConfigError carries "<source>:<line>".
boost::property_tree::ptree parse(const std::string &text, const std::string &source_name);

/// Reads a whole file, resolving it with resolve_config_path.
std::string read_config_text(const std::string &config_path, std::string *resolved = nullptr);

/// Shortest round-trip formatting.
std::string format_double(double v);

bool starts_with(const std::string &s, const std::string &prefix);

class Section {
   public:
    Section(std::string name, const boost::property_tree::ptree &tree) : name_(std::move(name)), tree_(tree) {}

    const std::string &name() const { return name_; }
    bool has(const std::string &key) const { return tree_.find(key) != tree_.not_found(); }
    std::string str(const std::string &key) const;
    std::string str_or(const std::string &key, const std::string &fallback) const {
        return has(key) ? str(key) : fallback;
    }
    double num(const std::string &key) const { return parse_number(key, str(key)); }
    double num_or(const std::string &key, double fallback) const { return has(key) ? num(key) : fallback; }
    /// Whitespace-separated numbers.
    std::vector<double> list(const std::string &key) const;
    /// Two numbers 'lo hi'.
    std::pair<double, double> band(const std::string &key) const;
    bool flag_or(const std::string &key, bool fallback) const;

   private:
    double parse_number(const std::string &key, const std::string &text) const;

    std::string name_;
    const boost::property_tree::ptree &tree_;
};

}  // namespace leakstack::ini

#endif  // LEAKSTACK_INI_HPP
