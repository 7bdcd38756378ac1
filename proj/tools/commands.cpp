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


#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "leakstack/capnet.hpp"
#include "leakstack/channel.hpp"
#include "leakstack/errors.hpp"
#include "leakstack/experiments.hpp"
#include "leakstack/ini.hpp"
#include "leakstack/io.hpp"
#include "leakstack/parallel.hpp"
#include "leakstack/protocols.hpp"
#include "leakstack/rb.hpp"
#include "leakstack/readout.hpp"
#include "leakstack/stabilizer.hpp"

namespace leakstack::cli {

namespace {

using CsvWriter = std::function<void(std::ostream &)>;

struct Global {
    std::string config = "paper_device";
    uint64_t seed = 0;
    std::string out;
    int workers = 1;
    std::string format = "json";
    std::string timestamp;
};

// Writes the result document and its table. Without --out the document
// selected by --format goes to stdout.
class Emitter {
   public:
    Emitter(const Global &g, const CLI::App &sub) : g_(g), sub_(sub) {}

    RunManifest manifest() const {
        RunManifest m;
        m.command = sub_.get_name();
        for (const CLI::Option *opt : sub_.get_options()) {
            const std::string name = opt->get_single_name();
            if (name == "help" || name.empty()) continue;
            std::string value;
            if (opt->count() > 0) {
                for (const auto &r : opt->results()) value += (value.empty() ? "" : " ") + r;
            } else {
                value = opt->get_default_str();
            }
            m.arguments[name] = value;
        }
        m.config_path = g_.config;
        m.seed = g_.seed;
        m.out_dir = g_.out;
        m.timestamp = g_.timestamp.empty() ? manifest_timestamp() : manifest_timestamp(g_.timestamp);
        return m;
    }

    Json document(const std::string &kind) const { return make_document(manifest(), kind); }

    void emit(const Json &doc, const CsvWriter &csv = {}) const {
        if (g_.out.empty()) {
            if (g_.format == "csv" && csv) {
                csv(std::cout);
            } else {
                std::cout << dump(doc);
            }
            return;
        }
        std::filesystem::create_directories(g_.out);
        const std::filesystem::path base = std::filesystem::path(g_.out) / sub_.get_name();
        write_file(base.string() + ".json", [&](std::ostream &o) { o << dump(doc); });
        if (csv) write_file(base.string() + ".csv", csv);
    }

   private:
    static void write_file(const std::string &path, const CsvWriter &body) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + path + "'");
        body(f);
        std::cerr << "wrote " << path << "\n";
    }

    const Global &g_;
    const CLI::App &sub_;
};

std::string config_text(const Global &g) { return ini::read_config_text(g.config); }

bool on_off(const std::string &s, const std::string &what) {
    if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
    if (s == "off" || s == "false" || s == "0" || s == "no") return false;
    throw InvariantError(what + " must be on or off, got '" + s + "'");
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw InvariantError("grid needs at least one point");
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

// --- capnet ----------------------------------------------------------------

void cmd_capnet(const Global &g, const CLI::App &sub) {
    const DeviceGraph device = load_device(g.config);
    if (!device.capacitance) throw ConfigError("device has no [capacitance] section");
    const CapacitanceNetwork &net = *device.capacitance;
    Json edges = Json::array();
    std::vector<std::array<std::string, 5>> rows;
    for (const Edge &e : device.edges) {
        Json j{{"a", e.a}, {"b", e.b}, {"kind", to_string(e.kind)}, {"configured_ghz", e.coupling}};
        if (e.kind == EdgeKind::QubitCoupler) {
            const bool q_first = device.has_element(e.a) &&
                                 std::any_of(device.qubits.begin(), device.qubits.end(),
                                             [&](const TransmonParams &q) { return q.label == e.a; });
            const auto &q = device.qubit(q_first ? e.a : e.b);
            const auto &c = device.coupler(q_first ? e.b : e.a);
            j["closed_form_ghz"] = qubit_coupler_coupling(net, q.omega_idle, c.omega_idle);
        } else if (e.kind == EdgeKind::CouplerCoupler) {
            const auto &c = device.coupler(e.a);
            const auto &assignment = device.lru_for_coupler(e.a);
            const auto &q = device.qubit(assignment.qubit);
            const auto set = closed_form_couplings(net, e.topology, q.omega_idle, c.omega_idle);
            const auto sym = closed_form_couplings(net, CouplingTopology::Symmetric, q.omega_idle, c.omega_idle);
            const auto asym = closed_form_couplings(net, CouplingTopology::Asymmetric, q.omega_idle, c.omega_idle);
            j["topology"] = to_string(e.topology);
            j["direct_ghz"] = set.g_cc_direct;
            j["closed_form_ghz"] = set.g_cc_net;
            j["symmetric_minus_asymmetric_ghz"] = sym.g_cc_net - asym.g_cc_net;
            j["expected_difference_ghz"] = 2 * set.g_qc * set.g_qc / (c.omega_idle - q.omega_idle);
        } else if (e.kind == EdgeKind::CouplerResonator) {
            const std::string coupler = device.has_element(e.a) && std::any_of(device.couplers.begin(), device.couplers.end(),
                                            [&](const CouplerParams &c) { return c.label == e.a; })
                                            ? e.a
                                            : e.b;
            const std::string resonator = coupler == e.a ? e.b : e.a;
            const auto &c = device.coupler(coupler);
            const auto &r = device.resonator(resonator);
            const auto &q = device.qubit(r.qubit);
            const double g_qc = qubit_coupler_coupling(net, q.omega_idle, c.omega_idle);
            const double g_qr = backsolve_qubit_resonator_coupling(q, r);
            j["closed_form_ghz"] =
                net_coupler_resonator_coupling(e.coupling, g_qc, g_qr, c.omega_idle, q.omega_idle, r.omega_r);
        }
        rows.push_back({e.a, e.b, to_string(e.kind),
                        j.contains("closed_form_ghz") ? ini::format_double(j["closed_form_ghz"].get<double>()) : "",
                        ini::format_double(e.coupling)});
        edges.push_back(std::move(j));
    }
    Json doc = Emitter(g, sub).document("capnet");
    doc["result"] = Json{{"capacitance_ff",
                          {{"C_pc", net.C_pc}, {"C_pp", net.C_pp}, {"C_gp", net.C_gp}, {"C_gc", net.C_gc}, {"C_cc", net.C_cc}}},
                         {"edges", edges}};
    Emitter(g, sub).emit(doc, [&](std::ostream &o) {
        o << "a,b,kind,closed_form_ghz,configured_ghz\n";
        for (const auto &r : rows) o << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << ',' << r[4] << '\n';
    });
}

// --- chevron ---------------------------------------------------------------

struct ChevronArgs {
    std::string qubit = "A";
    std::string op = "f-lru";
    std::string coupler;  // selects a coupler-resonator scan
    bool amplitude = false;
    double center = 0.0;  // GHz; 0 selects the configured omega_p or the resonator detuning
    double span = 0.06;
    int x_steps = 31;
    double dur_max = 120.0;
    int dur_steps = 31;
};

void cmd_chevron(const Global &g, const CLI::App &sub, const ChevronArgs &a) {
    const DeviceGraph device = load_device(g.config);
    Emitter em(g, sub);
    Json doc = em.document("chevron");
    if (a.amplitude) {
        if (!a.coupler.empty()) throw InvariantError("--amplitude applies to qubit-coupler swaps only");
        const auto t = lru_target_from_string(a.op);
        const auto cal = calibrate_amplitude(device, a.qubit, t);
        doc["result"] = Json{{"qubit", a.qubit}, {"op", to_string(t)}, {"A_p", cal.A_p}, {"omega_p", cal.omega_p},
                             {"g_eff", cal.g_eff}};
        em.emit(doc);
        return;
    }
    CalibrationResult cal;
    if (!a.coupler.empty()) {
        const Edge &e = device.resonator_edge(a.coupler);
        const auto &r = device.resonator(e.a == a.coupler ? e.b : e.a);
        const double center = a.center > 0 ? a.center : r.omega_r - device.coupler(a.coupler).omega_idle;
        const double dur = a.dur_max > 0 && sub.count("--dur-max") ? a.dur_max : 20.0;
        cal = calibrate_cr_swap(device, a.coupler, linspace(center - a.span / 2, center + a.span / 2, a.x_steps),
                                linspace(0.0, dur, a.dur_steps), ChevronOptions{g.workers, {}});
    } else {
        const auto t = lru_target_from_string(a.op);
        const auto &ops = device.lru_for_qubit(a.qubit).operations;
        auto it = ops.find(t);
        if (it == ops.end()) throw InvariantError("qubit '" + a.qubit + "' has no " + to_string(t) + " operating point");
        const double center = a.center > 0 ? a.center : it->second.omega_p;
        cal = calibrate_qc_swap(device, a.qubit, device.lru_for_qubit(a.qubit).coupler, t,
                                linspace(center - a.span / 2, center + a.span / 2, a.x_steps),
                                linspace(0.0, a.dur_max, a.dur_steps), ChevronOptions{g.workers, {}});
    }
    doc["result"] = Json::parse(calibration_to_json(cal));
    em.emit(doc, [&](std::ostream &o) { write_surface_csv(cal, o); });
}

// --- lru-eff ---------------------------------------------------------------

struct LruEffArgs {
    std::string qubit = "A";
    std::string op = "f-lru";
    std::string noise = "on";
    std::string readout = "ideal";
};

void cmd_lru_eff(const Global &g, const CLI::App &sub, const LruEffArgs &a) {
    const DeviceGraph device = load_device(g.config);
    const auto t = lru_target_from_string(a.op);
    ConfusionMatrix readout = ConfusionMatrix::identity(4);
    if (a.readout == "channel") {
        const auto &m = load_channel_model(g.config).qubit(a.qubit).readout.m;
        for (size_t i = 0; i < m.size(); ++i) {
            for (size_t j = 0; j < m[i].size(); ++j) readout.m[i][j] = m[i][j];
        }
    } else if (a.readout != "ideal") {
        throw InvariantError("--readout must be ideal or channel");
    }
    const auto meas = measure_lru_efficiency(device, a.qubit, t, on_off(a.noise, "--noise"), readout);
    Emitter em(g, sub);
    Json doc = em.document("lru_efficiency");
    Json r = to_json(meas.report);
    r["qubit"] = a.qubit;
    r["op"] = to_string(t);
    r["duration_ns"] = meas.duration_ns;
    r["populations_after"] = meas.populations_after;
    doc["result"] = std::move(r);
    em.emit(doc);
}

// --- rb --------------------------------------------------------------------

struct RbArgs {
    std::string interleaved;
    int sequences = 0;
};

void cmd_rb(const Global &g, const CLI::App &sub, const RbArgs &a) {
    const std::string text = config_text(g);
    const auto channel = parse_channel_model(text, g.config);
    RbConfig cfg = parse_rb_config(text, g.config);
    if (!a.interleaved.empty()) cfg.interleaved = interleaved_op_from_string(a.interleaved);
    if (a.sequences > 0) cfg.sequences = a.sequences;
    cfg.seed = g.seed;
    const auto result = run_rb(channel, cfg, g.workers);
    Emitter em(g, sub);
    Json doc = em.document("rb");
    doc["result"] = to_json(result);
    em.emit(doc, [&](std::ostream &o) { write_rb_curves_csv(result, o); });
}

// --- stabilizer ------------------------------------------------------------

struct StabArgs {
    std::string lru;
    std::string inject;  // QUBIT:CYCLE
    std::string init;
    int cycles = 0;
    int shots = 0;
    bool syndromes = false;
};

void cmd_stabilizer(const Global &g, const CLI::App &sub, const StabArgs &a) {
    const std::string text = config_text(g);
    StabilizerConfig cfg = parse_stabilizer_config(text, parse_channel_model(text, g.config), g.config);
    if (!a.lru.empty()) cfg.lru_enabled = on_off(a.lru, "--lru");
    if (!a.init.empty()) cfg.data_init = data_init_from_string(a.init);
    if (a.cycles > 0) cfg.n_cycles = a.cycles;
    if (a.shots > 0) cfg.shots = a.shots;
    if (!a.inject.empty()) {
        const auto colon = a.inject.find(':');
        if (colon == std::string::npos) throw InvariantError("--inject expects QUBIT:CYCLE");
        try {
            cfg.injection = Injection{a.inject.substr(0, colon), std::stoi(a.inject.substr(colon + 1))};
        } catch (const std::logic_error &) {
            throw InvariantError("--inject expects QUBIT:CYCLE");
        }
    }
    cfg.seed = g.seed;
    cfg.validate();
    const auto trace = run_stabilizer(cfg, g.workers);
    Emitter em(g, sub);
    Json doc = em.document("stabilizer");
    Json r;
    r["cycles"] = cfg.n_cycles;
    r["lru"] = cfg.lru_enabled;
    r["data_init"] = to_string(cfg.data_init);
    if (cfg.injection) r["injection"] = Json{{"qubit", cfg.injection->qubit}, {"cycle", cfg.injection->cycle}};
    r["trace"] = to_json(trace, a.syndromes);
    doc["result"] = std::move(r);
    em.emit(doc, [&](std::ostream &o) { write_cycle_trace_csv(trace, o); });
}

// --- propagation -----------------------------------------------------------

struct PropArgs {
    std::string c_lru = "off";
    std::vector<double> waits{0.0};
    std::string noise = "on";
};

void cmd_propagation(const Global &g, const CLI::App &sub, const PropArgs &a) {
    const DeviceGraph device = load_device(g.config);
    PropagationOptions opt;
    opt.c_lru = on_off(a.c_lru, "--c-lru");
    opt.waits = a.waits;
    opt.noise = on_off(a.noise, "--noise");
    opt.workers = g.workers;
    const auto result = run_propagation(device, opt);
    Emitter em(g, sub);
    Json doc = em.document("propagation");
    doc["result"] = to_json(result);
    em.emit(doc, [&](std::ostream &o) { write_propagation_csv(result, o); });
}

// --- classify --------------------------------------------------------------

struct ClassifyArgs {
    std::string input;
    std::string model;
    int components = 3;
    double k = 0.0;  // 0 disables the outlier threshold
};

void cmd_classify(const Global &g, const CLI::App &sub, const ClassifyArgs &a) {
    std::ifstream in(a.input);
    if (!in) throw ConfigError("cannot read shots file '" + a.input + "'");
    const ShotBatch shots = read_shots_csv(in);
    GmmModel model;
    if (!a.model.empty()) {
        std::ifstream mf(a.model);
        if (!mf) throw ConfigError("cannot read model file '" + a.model + "'");
        std::stringstream ss;
        ss << mf.rdbuf();
        model = gmm_from_json(ss.str());
    } else {
        model = fit_gmm(shots, a.components, g.seed).model;
    }
    const double k = a.k > 0 ? a.k : kNoThreshold;
    const auto report = state_probabilities(model, shots, k);
    Emitter em(g, sub);
    Json doc = em.document("classify");
    doc["result"] = Json{{"report", to_json(report)}, {"model", Json::parse(gmm_to_json(model))}};
    em.emit(doc, [&](std::ostream &o) {
        o << "shot_index,label\n";
        for (size_t i = 0; i < shots.points.size(); ++i) o << i << ',' << assign(model, shots.points[i], k) << '\n';
    });
}

// --- reprate ---------------------------------------------------------------

struct RepRateArgs {
    std::vector<double> rates{1, 2, 5, 10, 20, 50, 100};
};

void cmd_reprate(const Global &g, const CLI::App &sub, const RepRateArgs &a) {
    const DeviceGraph device = load_device(g.config);
    const ResetModel model = load_reset_model(g.config, device);
    const auto off = repetition_rate_study(model, a.rates, false);
    const auto on = repetition_rate_study(model, a.rates, true);
    Emitter em(g, sub);
    Json doc = em.document("reprate");
    doc["result"] = Json{{"qubit", model.qubit}, {"t1_us", model.t1_us}, {"without_reset", to_json(off)},
                         {"with_reset", to_json(on)}};
    em.emit(doc, [&](std::ostream &o) { write_reprate_csv(off, on, o); });
}

}  // namespace

int run(int argc, char **argv) {
    CLI::App app{"Leakage reduction simulator for coupler-based superconducting processors", "leakstack"};
    app.fallthrough();
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    Global g;
    g.workers = default_workers();
    app.add_option("--config", g.config, "Device config path or shipped name");
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--out", g.out, "Output directory; stdout when empty");
    app.add_option("--workers", g.workers, "Worker threads (default LEAKSTACK_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "Format printed to stdout without --out")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--timestamp", g.timestamp, "Manifest timestamp (default SOURCE_DATE_EPOCH or the epoch)");

    auto *capnet = app.add_subcommand("capnet", "Closed-form coupling report from the capacitance network");

    ChevronArgs ch;
    auto *chevron = app.add_subcommand("chevron", "QC or CR swap calibration scan");
    chevron->add_option("--qubit", ch.qubit, "Qubit for a QC scan");
    chevron->add_option("--op", ch.op, "e-reset, f-lru or h-lru");
    chevron->add_option("--coupler", ch.coupler, "Coupler for a coupler-resonator scan");
    chevron->add_flag("--amplitude", ch.amplitude, "Calibrate the drive amplitude for the configured plateau");
    chevron->add_option("--center", ch.center, "Scan center in GHz (default from config)");
    chevron->add_option("--span", ch.span, "Scan span in GHz");
    chevron->add_option("--steps", ch.x_steps, "Points along the frequency or amplitude axis");
    chevron->add_option("--dur-max", ch.dur_max, "Longest plateau in ns");
    chevron->add_option("--dur-steps", ch.dur_steps, "Points along the duration axis");

    LruEffArgs le;
    auto *lru = app.add_subcommand("lru-eff", "Prepare, apply an LRU and read out");
    lru->add_option("--qubit", le.qubit, "Qubit");
    lru->add_option("--op", le.op, "e-reset, f-lru or h-lru");
    lru->add_option("--noise", le.noise, "on or off");
    lru->add_option("--readout", le.readout, "ideal or channel");

    RbArgs rb;
    auto *rbc = app.add_subcommand("rb", "Reference and interleaved randomized benchmarking");
    rbc->add_option("--interleaved", rb.interleaved, "none, data_lru, ancilla_lru, idle or echo (default from config)");
    rbc->add_option("--sequences", rb.sequences, "Sequences per length (default from config)");

    StabArgs st;
    auto *stab = app.add_subcommand("stabilizer", "Repeated weight-two Z-stabilizer cycles");
    stab->add_option("--lru", st.lru, "on or off (default from config)");
    stab->add_option("--inject", st.inject, "X_ef injection as QUBIT:CYCLE");
    stab->add_option("--init", st.init, "y2 or ground (default from config)");
    stab->add_option("--cycles", st.cycles, "Number of cycles (default from config)");
    stab->add_option("--shots", st.shots, "Number of shots (default from config)");
    stab->add_flag("--syndromes", st.syndromes, "Include raw syndrome records in the JSON");

    PropArgs pr;
    auto *prop = app.add_subcommand("propagation", "Coupler excitation propagation matrix");
    prop->add_option("--c-lru", pr.c_lru, "on or off");
    prop->add_option("--wait", pr.waits, "Idle wait times in ns");
    prop->add_option("--noise", pr.noise, "on or off");

    ClassifyArgs cl;
    auto *cls = app.add_subcommand("classify", "GMM classification of IQ shots");
    cls->add_option("--input", cl.input, "Shots CSV (shot_index,i,q[,true_label])")->required();
    cls->add_option("--model", cl.model, "GMM JSON; fitted from the shots when absent");
    cls->add_option("--components", cl.components, "Components to fit");
    cls->add_option("--k", cl.k, "Outlier threshold in sigma (0 disables)");

    RepRateArgs rr;
    auto *rep = app.add_subcommand("reprate", "Readout error versus repetition rate");
    rep->add_option("--rates", rr.rates, "Repetition rates in kHz");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (capnet->parsed()) cmd_capnet(g, *capnet);
        if (chevron->parsed()) cmd_chevron(g, *chevron, ch);
        if (lru->parsed()) cmd_lru_eff(g, *lru, le);
        if (rbc->parsed()) cmd_rb(g, *rbc, rb);
        if (stab->parsed()) cmd_stabilizer(g, *stab, st);
        if (prop->parsed()) cmd_propagation(g, *prop, pr);
        if (cls->parsed()) cmd_classify(g, *cls, cl);
        if (rep->parsed()) cmd_reprate(g, *rep, rr);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const InvariantError &e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

}  // namespace leakstack::cli
