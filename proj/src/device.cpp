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

#include "leakstack/device.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "leakstack/errors.hpp"
#include "leakstack/ini.hpp"

namespace leakstack {

namespace pt = boost::property_tree;
using ini::format_double;
using ini::Section;
using ini::starts_with;

namespace {
Band to_band(const std::pair<double, double> &p) { return {p.first, p.second}; }
}  // namespace

const char *to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::QubitCoupler: return "qubit_coupler";
        case EdgeKind::CouplerCoupler: return "coupler_coupler";
        case EdgeKind::CouplerResonator: return "coupler_resonator";
        case EdgeKind::QubitResonator: return "qubit_resonator";
    }
    return "?";
}

EdgeKind edge_kind_from_string(const std::string &s) {
    for (auto k : {EdgeKind::QubitCoupler, EdgeKind::CouplerCoupler, EdgeKind::CouplerResonator,
                   EdgeKind::QubitResonator}) {
        if (s == to_string(k)) return k;
    }
    throw ConfigError("unknown edge kind '" + s + "'");
}

const char *to_string(LruTarget t) {
    switch (t) {
        case LruTarget::EReset: return "e_reset";
        case LruTarget::FLru: return "f_lru";
        case LruTarget::HLru: return "h_lru";
    }
    return "?";
}

LruTarget lru_target_from_string(const std::string &s) {
    if (s == "e_reset" || s == "e-reset" || s == "eReset") return LruTarget::EReset;
    if (s == "f_lru" || s == "f-lru" || s == "fLRU") return LruTarget::FLru;
    if (s == "h_lru" || s == "h-lru" || s == "hLRU") return LruTarget::HLru;
    throw InvariantError("unknown LRU target '" + s + "'");
}

int target_level(LruTarget t) {
    switch (t) {
        case LruTarget::EReset: return 1;
        case LruTarget::FLru: return 2;
        case LruTarget::HLru: return 3;
    }
    return 0;
}

void FrequencyRegimes::validate() const {
    const std::pair<const char *, const Band *> bands[] = {{"qubit_band", &qubit_band},
                                                           {"coupler_active_band", &coupler_active_band},
                                                           {"coupler_idle_band", &coupler_idle_band},
                                                           {"dissipative_band", &dissipative_band}};
    for (size_t i = 0; i < 4; ++i) {
        if (!(bands[i].second->lo < bands[i].second->hi)) {
            throw InvariantError(std::string("regimes: ") + bands[i].first + " is empty");
        }
        for (size_t j = i + 1; j < 4; ++j) {
            const Band &a = *bands[i].second;
            const Band &b = *bands[j].second;
            if (a.hi > b.lo && b.hi > a.lo) {
                throw InvariantError(std::string("regimes: ") + bands[i].first + " overlaps " + bands[j].first);
            }
            if (!(a.center() < b.center())) {
                throw InvariantError(std::string("regimes: ") + bands[i].first + " must lie below " +
                                     bands[j].first);
            }
        }
    }
}

namespace {

template <typename T>
const T &find_by_label(const std::vector<T> &items, const std::string &label, const char *kind) {
    auto it = std::find_if(items.begin(), items.end(), [&](const T &x) { return x.label == label; });
    if (it == items.end()) {
        throw InvariantError(std::string("unknown ") + kind + " '" + label + "'");
    }
    return *it;
}

}  // namespace

const TransmonParams &DeviceGraph::qubit(const std::string &label) const {
    return find_by_label(qubits, label, "qubit");
}
const CouplerParams &DeviceGraph::coupler(const std::string &label) const {
    return find_by_label(couplers, label, "coupler");
}
const ResonatorParams &DeviceGraph::resonator(const std::string &label) const {
    return find_by_label(resonators, label, "resonator");
}

const LruAssignment &DeviceGraph::lru_for_qubit(const std::string &q) const {
    for (const auto &a : lru) {
        if (a.qubit == q) return a;
    }
    throw InvariantError("no LRU assignment for qubit '" + q + "'");
}

const LruAssignment &DeviceGraph::lru_for_coupler(const std::string &c) const {
    for (const auto &a : lru) {
        if (a.coupler == c) return a;
    }
    throw InvariantError("no LRU assignment for coupler '" + c + "'");
}

bool DeviceGraph::has_element(const std::string &label) const {
    auto match = [&](const auto &v) {
        return std::any_of(v.begin(), v.end(), [&](const auto &x) { return x.label == label; });
    };
    return match(qubits) || match(couplers) || match(resonators);
}

const Edge *DeviceGraph::find_edge(const std::string &a, const std::string &b) const {
    for (const auto &e : edges) {
        if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return &e;
    }
    return nullptr;
}

const Edge &DeviceGraph::resonator_edge(const std::string &c) const {
    for (const auto &e : edges) {
        if (e.kind == EdgeKind::CouplerResonator && (e.a == c || e.b == c)) return e;
    }
    throw InvariantError("coupler '" + c + "' has no resonator edge");
}

void DeviceGraph::validate() const {
    std::set<std::string> labels;
    auto unique = [&](const std::string &l) {
        if (l.empty()) throw InvariantError("element with empty label");
        if (!labels.insert(l).second) throw InvariantError("duplicate element label '" + l + "'");
    };
    for (const auto &q : qubits) {
        unique(q.label);
        const std::string who = "qubit '" + q.label + "': ";
        if (!(q.alpha < 0)) throw InvariantError(who + "anharmonicity must be negative");
        if (!(q.omega_idle > 0)) throw InvariantError(who + "idle_frequency must be > 0");
        if (!(q.omega_idle <= q.omega_max)) throw InvariantError(who + "idle_frequency exceeds maximum_frequency");
        if (!(q.T1 > 0)) throw InvariantError(who + "t1 must be > 0");
        if (!(q.T2_star > 0)) throw InvariantError(who + "t2_star must be > 0");
        if (q.T2_star > 2 * q.T1 * 1.1) throw InvariantError(who + "t2_star exceeds 2*t1");
        if (q.T2_echo < 0) throw InvariantError(who + "t2_echo must be >= 0");
    }
    for (const auto &c : couplers) {
        unique(c.label);
        const std::string who = "coupler '" + c.label + "': ";
        if (!(c.alpha < 0)) throw InvariantError(who + "anharmonicity must be negative");
        if (!(c.omega_idle > 0)) throw InvariantError(who + "idle_frequency must be > 0");
        if (!(c.omega_idle <= c.omega_max)) throw InvariantError(who + "idle_frequency exceeds maximum_frequency");
        if (!(c.T1 > 0)) throw InvariantError(who + "t1 must be > 0");
    }
    for (const auto &r : resonators) {
        unique(r.label);
        const std::string who = "resonator '" + r.label + "': ";
        if (!(r.kappa_r > 0)) throw InvariantError(who + "resonator_linewidth must be > 0");
        if (!(r.omega_r > 0)) throw InvariantError(who + "readout_frequency must be > 0");
        if (!r.qubit.empty()) qubit(r.qubit);
    }

    auto kind_of = [&](const std::string &l) -> char {
        for (const auto &q : qubits) if (q.label == l) return 'q';
        for (const auto &c : couplers) if (c.label == l) return 'c';
        for (const auto &r : resonators) if (r.label == l) return 'r';
        return '?';
    };
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto &e : edges) {
        const std::string who = "edge " + e.a + "-" + e.b + ": ";
        const char ka = kind_of(e.a), kb = kind_of(e.b);
        if (ka == '?' || kb == '?') {
            throw InvariantError(who + "references unknown element");
        }
        std::string expected;
        switch (e.kind) {
            case EdgeKind::QubitCoupler: expected = "qc"; break;
            case EdgeKind::CouplerCoupler: expected = "cc"; break;
            case EdgeKind::CouplerResonator: expected = "cr"; break;
            case EdgeKind::QubitResonator: expected = "qr"; break;
        }
        const std::string got{ka, kb}, got_rev{kb, ka};
        if (got != expected && got_rev != expected) {
            throw InvariantError(who + "element kinds do not match edge kind " + to_string(e.kind));
        }
        if (e.a == e.b) throw InvariantError(who + "self edge");
        auto key = std::minmax(e.a, e.b);
        if (!seen.insert({key.first, key.second}).second) throw InvariantError(who + "duplicate edge");
        if (!std::isfinite(e.coupling)) throw InvariantError(who + "coupling must be finite");
        if (e.kind == EdgeKind::QubitCoupler && !(e.coupling > 0)) {
            throw InvariantError(who + "qubit-coupler coupling must be > 0");
        }
    }

    // Connectivity over all elements.
    if (!labels.empty()) {
        std::map<std::string, std::vector<std::string>> adj;
        for (const auto &e : edges) {
            adj[e.a].push_back(e.b);
            adj[e.b].push_back(e.a);
        }
        std::set<std::string> reached;
        std::vector<std::string> stack{*labels.begin()};
        while (!stack.empty()) {
            auto cur = stack.back();
            stack.pop_back();
            if (!reached.insert(cur).second) continue;
            for (const auto &n : adj[cur]) stack.push_back(n);
        }
        for (const auto &l : labels) {
            if (!reached.count(l)) throw InvariantError("element '" + l + "' is not connected to the device graph");
        }
    }

    for (const auto &a : lru) {
        const std::string who = "lru for qubit '" + a.qubit + "': ";
        qubit(a.qubit);
        coupler(a.coupler);
        resonator(a.resonator);
        if (!find_edge(a.qubit, a.coupler)) throw InvariantError(who + "no qubit-coupler edge");
        if (!find_edge(a.coupler, a.resonator)) throw InvariantError(who + "no coupler-resonator edge");
        for (const auto &[t, op] : a.operations) {
            const std::string w = who + to_string(t) + ": ";
            if (op.harmonic < 1) throw InvariantError(w + "harmonic must be >= 1");
            if (!(op.omega_p > 0)) throw InvariantError(w + "modulation frequency must be > 0");
            if (!(op.omega_bar_c > 0)) throw InvariantError(w + "omega_bar_c must be > 0");
            if (op.amplitude < 0) throw InvariantError(w + "amplitude must be >= 0");
            if (!(op.plateau_ns > 0) || op.edge_ns < 0) throw InvariantError(w + "invalid durations");
        }
    }
    regimes.validate();
    if (capacitance) capacitance->validate();
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

// Sections owned by other modules in the same config file.
bool is_foreign_section(const std::string &name) {
    return starts_with(name, "channel") || starts_with(name, "rb") || starts_with(name, "stabilizer") ||
           starts_with(name, "readout") || starts_with(name, "reset");
}

constexpr LruTarget kTargets[] = {LruTarget::EReset, LruTarget::FLru, LruTarget::HLru};

}  // namespace

DeviceGraph parse_device(const std::string &text, const std::string &source_name) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error &e) {
        throw ConfigError(source_name + ":" + std::to_string(e.line()) + ": parse error: " + e.message());
    }
    if (tree.find("device") == tree.not_found()) {
        throw ConfigError(source_name + ": parse error: missing [device] section");
    }

    DeviceGraph g;
    bool have_regimes = false;
    for (const auto &[name, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(source_name + ": parse error: key '" + name + "' outside any section");
        }
        Section s(name, body);
        if (name == "device") {
            g.name = s.str("name");
        } else if (starts_with(name, "qubit.")) {
            TransmonParams q;
            q.label = name.substr(6);
            q.omega_max = s.num("maximum_frequency");
            q.omega_idle = s.num("idle_frequency");
            q.alpha = s.num("anharmonicity");
            q.T1 = s.num("t1");
            q.T2_star = s.num("t2_star");
            q.T2_echo = s.num_or("t2_echo", 0.0);
            q.single_qubit_gate_error = s.num_or("single_qubit_gate_error", 0.0);
            g.qubits.push_back(q);
        } else if (starts_with(name, "coupler.")) {
            CouplerParams c;
            c.label = name.substr(8);
            c.omega_max = s.num("maximum_frequency");
            c.omega_idle = s.num("idle_frequency");
            c.alpha = s.num("anharmonicity");
            c.T1 = s.num("t1");
            c.two_qubit_gate_error = s.num_or("two_qubit_gate_error", 0.0);
            g.couplers.push_back(c);
        } else if (starts_with(name, "resonator.")) {
            ResonatorParams r;
            r.label = name.substr(10);
            r.qubit = s.str_or("qubit", "");
            r.omega_r = s.num("readout_frequency");
            r.kappa_r = s.num("resonator_linewidth");
            r.chi = s.num("dispersive_shift");
            g.resonators.push_back(r);
        } else if (starts_with(name, "edge.")) {
            Edge e;
            e.kind = edge_kind_from_string(s.str("kind"));
            e.a = s.str("a");
            e.b = s.str("b");
            e.topology = topology_from_string(s.str_or("topology", "asymmetric"));
            if (s.has("coupling")) {
                e.coupling = s.num("coupling");
            } else if (e.kind == EdgeKind::QubitResonator) {
                e.coupling = std::nan("");  // back-solved from chi below
            } else {
                s.str("coupling");
            }
            g.edges.push_back(e);
        } else if (starts_with(name, "lru.")) {
            LruAssignment a;
            a.qubit = name.substr(4);
            a.coupler = s.str("coupler");
            a.resonator = s.str("resonator");
            for (LruTarget t : kTargets) {
                const std::string suffix = std::string("_") + to_string(t);
                if (!s.has("modulation_frequency" + suffix)) continue;
                LruOperatingPoint op;
                op.harmonic = static_cast<int>(s.num_or("harmonic" + suffix, 1.0));
                op.omega_p = s.num("modulation_frequency" + suffix);
                op.omega_bar_c = s.num("omega_bar_c" + suffix);
                op.amplitude = s.num("amplitude" + suffix);
                op.plateau_ns = s.num_or("plateau" + suffix, 60.0);
                const double duration = s.num("duration" + suffix);
                op.edge_ns = 0.5 * (duration - op.plateau_ns);
                op.efficiency = s.num_or("efficiency" + suffix, 0.0);
                a.operations[t] = op;
            }
            g.lru.push_back(a);
        } else if (name == "regimes") {
            g.regimes.qubit_band = to_band(s.band("qubit_band"));
            g.regimes.coupler_active_band = to_band(s.band("coupler_active_band"));
            g.regimes.coupler_idle_band = to_band(s.band("coupler_idle_band"));
            g.regimes.dissipative_band = to_band(s.band("dissipative_band"));
            have_regimes = true;
        } else if (name == "capacitance") {
            CapacitanceNetwork n;
            n.C_pc = s.num("c_pc");
            n.C_pp = s.num("c_pp");
            n.C_gp = s.num("c_gp");
            n.C_gc = s.num("c_gc");
            n.C_cc = s.num("c_cc");
            g.capacitance = n;
        } else if (!is_foreign_section(name)) {
            throw ConfigError(source_name + ": unknown section [" + name + "]");
        }
    }
    if (!have_regimes) {
        throw ConfigError(source_name + ": missing [regimes] section");
    }
    for (auto &e : g.edges) {
        if (e.kind == EdgeKind::QubitResonator && std::isnan(e.coupling)) {
            const bool a_is_qubit = std::any_of(g.qubits.begin(), g.qubits.end(),
                                                [&](const TransmonParams &q) { return q.label == e.a; });
            const auto &q = g.qubit(a_is_qubit ? e.a : e.b);
            const auto &r = g.resonator(a_is_qubit ? e.b : e.a);
            e.coupling = backsolve_qubit_resonator_coupling(q, r);
        }
    }
    g.validate();
    return g;
}

std::string resolve_config_path(const std::string &config_path) {
    namespace fs = std::filesystem;
    if (fs::exists(config_path)) return config_path;
    std::vector<fs::path> candidates;
    if (const char *dir = std::getenv("LEAKSTACK_CONFIG_DIR")) {
        candidates.emplace_back(fs::path(dir) / (config_path + ".ini"));
    }
    candidates.emplace_back(fs::path("configs") / (config_path + ".ini"));
    candidates.emplace_back(fs::path(LEAKSTACK_SOURCE_DIR) / "configs" / (config_path + ".ini"));
    for (const auto &c : candidates) {
        if (fs::exists(c)) return c.string();
    }
    throw ConfigError("config '" + config_path + "' not found");
}

DeviceGraph load_device(const std::string &config_path) {
    const std::string path = resolve_config_path(config_path);
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_device(buf.str(), path);
}

std::string serialize_device(const DeviceGraph &g) {
    std::ostringstream out;
    auto kv = [&](const std::string &k, double v) { out << k << " = " << format_double(v) << "\n"; };
    auto band = [&](const std::string &k, const Band &b) {
        out << k << " = " << format_double(b.lo) << " " << format_double(b.hi) << "\n";
    };
    out << "[device]\nname = " << g.name << "\n\n";
    for (const auto &q : g.qubits) {
        out << "[qubit." << q.label << "]\n";
        kv("maximum_frequency", q.omega_max);
        kv("idle_frequency", q.omega_idle);
        kv("anharmonicity", q.alpha);
        kv("t1", q.T1);
        kv("t2_star", q.T2_star);
        kv("t2_echo", q.T2_echo);
        kv("single_qubit_gate_error", q.single_qubit_gate_error);
        out << "\n";
    }
    for (const auto &c : g.couplers) {
        out << "[coupler." << c.label << "]\n";
        kv("maximum_frequency", c.omega_max);
        kv("idle_frequency", c.omega_idle);
        kv("anharmonicity", c.alpha);
        kv("t1", c.T1);
        kv("two_qubit_gate_error", c.two_qubit_gate_error);
        out << "\n";
    }
    for (const auto &r : g.resonators) {
        out << "[resonator." << r.label << "]\n";
        if (!r.qubit.empty()) out << "qubit = " << r.qubit << "\n";
        kv("readout_frequency", r.omega_r);
        kv("resonator_linewidth", r.kappa_r);
        kv("dispersive_shift", r.chi);
        out << "\n";
    }
    for (const auto &e : g.edges) {
        out << "[edge." << e.a << "-" << e.b << "]\n";
        out << "kind = " << to_string(e.kind) << "\na = " << e.a << "\nb = " << e.b << "\n";
        kv("coupling", e.coupling);
        out << "topology = " << to_string(e.topology) << "\n\n";
    }
    for (const auto &a : g.lru) {
        out << "[lru." << a.qubit << "]\ncoupler = " << a.coupler << "\nresonator = " << a.resonator << "\n";
        for (const auto &[t, op] : a.operations) {
            const std::string suffix = std::string("_") + to_string(t);
            kv("harmonic" + suffix, op.harmonic);
            kv("modulation_frequency" + suffix, op.omega_p);
            kv("omega_bar_c" + suffix, op.omega_bar_c);
            kv("amplitude" + suffix, op.amplitude);
            kv("plateau" + suffix, op.plateau_ns);
            kv("duration" + suffix, op.total_ns());
            kv("efficiency" + suffix, op.efficiency);
        }
        out << "\n";
    }
    out << "[regimes]\n";
    band("qubit_band", g.regimes.qubit_band);
    band("coupler_active_band", g.regimes.coupler_active_band);
    band("coupler_idle_band", g.regimes.coupler_idle_band);
    band("dissipative_band", g.regimes.dissipative_band);
    if (g.capacitance) {
        out << "\n[capacitance]\n";
        kv("c_pc", g.capacitance->C_pc);
        kv("c_pp", g.capacitance->C_pp);
        kv("c_gp", g.capacitance->C_gp);
        kv("c_gc", g.capacitance->C_gc);
        kv("c_cc", g.capacitance->C_cc);
    }
    return out.str();
}

// ---------------------------------------------------------------------------

double transition_frequency(const TransmonParams &q, int i, int j, int truncation) {
    if (j != i + 1) {
        throw InvariantError("transition_frequency: levels " + std::to_string(i) + " and " + std::to_string(j) +
                             " are not adjacent");
    }
    if (i < 0 || j >= truncation) {
        throw InvariantError("transition_frequency: level outside truncation");
    }
    return q.omega_idle + i * q.alpha;
}

double parametric_resonance_frequency(LruTarget target, int m, const TransmonParams &q, double omega_bar_c) {
    if (m < 1) {
        throw InvariantError("parametric_resonance_frequency: harmonic order must be >= 1");
    }
    const int lower = target_level(target) - 1;
    const double omega_target = q.omega_idle + lower * q.alpha;
    return std::abs(omega_target - omega_bar_c) / m;
}

double pure_dephasing_rate(double T1, double T2_star) {
    if (!(T2_star > 0) || !std::isfinite(T2_star)) return 0.0;
    const double relax = (T1 > 0 && std::isfinite(T1)) ? 1.0 / (2 * T1) : 0.0;
    return std::max(0.0, 1.0 / T2_star - relax);
}

double backsolve_qubit_resonator_coupling(const TransmonParams &q, const ResonatorParams &r) {
    const double chi = 0.5 * r.chi * 1e-3;
    const double delta = q.omega_idle - r.omega_r;
    const double g2 = chi * delta * (delta + q.alpha) / q.alpha;
    if (!(g2 > 0)) {
        throw InvariantError("cannot back-solve g_qr for '" + q.label + "'/'" + r.label +
                             "': dispersive shift has the wrong sign");
    }
    return std::sqrt(g2);
}

RegimeReport validate_regimes(const DeviceGraph &device, const FrequencyRegimes &regimes) {
    RegimeReport report;
    const std::pair<const char *, const Band *> bands[] = {{"qubit_band", &regimes.qubit_band},
                                                           {"coupler_active_band", &regimes.coupler_active_band},
                                                           {"coupler_idle_band", &regimes.coupler_idle_band},
                                                           {"dissipative_band", &regimes.dissipative_band}};
    auto classify = [&](const std::string &label, const char *kind, double f, const char *expected) {
        RegimeEntry e{label, kind, f, "none", false};
        for (const auto &[n, b] : bands) {
            if (b->contains(f)) {
                e.band = n;
                break;
            }
        }
        e.ok = e.band == expected;
        if (!e.ok) {
            std::ostringstream msg;
            msg << kind << " '" << label << "' at " << f << " GHz lies in " << e.band << ", expected " << expected;
            report.violations.push_back(msg.str());
        }
        report.entries.push_back(e);
    };
    for (const auto &q : device.qubits) classify(q.label, "qubit", q.omega_idle, "qubit_band");
    for (const auto &c : device.couplers) classify(c.label, "coupler", c.omega_idle, "coupler_idle_band");
    for (const auto &r : device.resonators) classify(r.label, "resonator", r.omega_r, "dissipative_band");
    return report;
}

}  // namespace leakstack
