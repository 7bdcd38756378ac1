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


#include "leakstack/ini.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "leakstack/device.hpp"
#include "leakstack/errors.hpp"

namespace leakstack::ini {

namespace pt = boost::property_tree;

pt::ptree parse(const std::string &text, const std::string &source_name) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error &e) {
        throw ConfigError(source_name + ":" + std::to_string(e.line()) + ": parse error: " + e.message());
    }
    return tree;
}

std::string read_config_text(const std::string &config_path, std::string *resolved) {
    const std::string path = resolve_config_path(config_path);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (resolved) *resolved = path;
    return buf.str();
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool starts_with(const std::string &s, const std::string &prefix) {
    return s.rfind(prefix, 0) == 0;
}

std::string Section::str(const std::string &key) const {
    auto it = tree_.find(key);
    if (it == tree_.not_found()) {
        throw ConfigError("section [" + name_ + "]: missing required field '" + key + "'");
    }
    return it->second.data();
}

std::vector<double> Section::list(const std::string &key) const {
    std::istringstream in(str(key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_number(key, tok));
    return out;
}

std::pair<double, double> Section::band(const std::string &key) const {
    std::istringstream in(str(key));
    std::string lo, hi, extra;
    if (!(in >> lo >> hi) || (in >> extra)) {
        throw ConfigError("section [" + name_ + "]: field '" + key + "' must be two numbers 'lo hi'");
    }
    return {parse_number(key, lo), parse_number(key, hi)};
}

bool Section::flag_or(const std::string &key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = str(key);
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("section [" + name_ + "]: field '" + key + "' must be on/off");
}

double Section::parse_number(const std::string &key, const std::string &text) const {
    double v = 0.0;
    const char *begin = text.data();
    const char *end = begin + text.size();
    while (begin < end && *begin == ' ') ++begin;
    while (end > begin && end[-1] == ' ') --end;
    if (begin < end && *begin == '+') ++begin;
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ConfigError("section [" + name_ + "]: field '" + key + "' is not a number: '" + text + "'");
    }
    return v;
}

}  // namespace leakstack::ini
