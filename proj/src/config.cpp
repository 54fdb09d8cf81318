#include "crawl/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include "crawl/errors.hpp"

namespace crawl {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

double require_number(const json& j, const std::string& where) {
    if (!j.is_number()) bad(where, "expected a number");
    return j.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    return require_number(obj.at(key), where + "/" + key);
}

std::map<std::string, double> bindings_from_json(const json& j, const std::string& where) {
    std::map<std::string, double> out;
    if (!j.is_object()) bad(where, "bindings must be an object of numbers");
    for (const auto& [k, v] : j.items()) out[k] = require_number(v, where + "/" + k);
    return out;
}

} // namespace

PeriodicSignal signal_from_json(const json& spec, double period, const std::string& where) {
    try {
        if (spec.is_number()) return PeriodicSignal::constant(spec.get<double>(), period);
        if (spec.is_string()) return PeriodicSignal::parse(spec.get<std::string>(), period);
        if (spec.is_object()) {
            if (spec.contains("table")) {
                const json& tab = spec.at("table");
                if (!tab.contains("t") || !tab.contains("v"))
                    bad(where + "/table", "needs \"t\" and \"v\" arrays");
                return PeriodicSignal::table(period, tab.at("t").get<std::vector<double>>(),
                                             tab.at("v").get<std::vector<double>>());
            }
            if (spec.contains("expr")) {
                std::map<std::string, double> bindings;
                if (spec.contains("bindings"))
                    bindings = bindings_from_json(spec.at("bindings"), where + "/bindings");
                PeriodicSignal s =
                    PeriodicSignal::parse(spec.at("expr").get<std::string>(), period, bindings);
                if (spec.contains("lipschitz"))
                    s.declare_lipschitz(require_number(spec.at("lipschitz"), where + "/lipschitz"));
                return s;
            }
        }
    } catch (const ConfigError& e) {
        bad(where, e.what());
    }
    bad(where, "expected a number, an expression string, {\"expr\":...} or {\"table\":...}");
}

namespace {

Perturbation psi_from_json(const json& spec, const std::string& where) {
    if (!spec.is_object() || spec.value("type", "") != "sin")
        bad(where, "only the builtin {\"type\":\"sin\",...} perturbation is supported");
    const double amplitude = require_number(spec.at("amplitude"), where + "/amplitude");
    const double half_width = require_number(spec.at("half_width"), where + "/half_width");
    if (!(half_width > 0.0)) bad(where + "/half_width", "must be positive");
    Perturbation psi;
    psi.fn = [amplitude, half_width](double, double u) {
        return std::abs(u) < half_width
                   ? amplitude * std::sin(std::numbers::pi * u / half_width)
                   : 0.0;
    };
    psi.lipschitz = std::abs(amplitude) * std::numbers::pi / half_width;
    psi.bound = std::abs(amplitude);
    psi.descriptor = spec.dump();
    return psi;
}

PeriodicSignal mu_signal(const json& spec, const char* key, double period,
                         const std::string& where) {
    if (spec.contains(key)) return signal_from_json(spec.at(key), period, where + "/" + key);
    if (spec.contains("mu")) return signal_from_json(spec.at("mu"), period, where + "/mu");
    return PeriodicSignal::constant(0.0, period);
}

} // namespace

FrictionLaw law_from_json(const json& spec, double period, const std::string& where) {
    if (!spec.is_object()) bad(where, "law must be an object");
    const std::string type = spec.value("type", "");
    auto mu_plus = [&] { return mu_signal(spec, "mu_plus", period, where); };
    auto mu_minus = [&] { return mu_signal(spec, "mu_minus", period, where); };
    auto mu_v = [&] {
        if (!spec.contains("mu_v")) bad(where, "viscous law needs \"mu_v\"");
        return signal_from_json(spec.at("mu_v"), period, where + "/mu_v");
    };

    FrictionLaw law = [&] {
        if (type == "dry") return FrictionLaw::dry(mu_plus(), mu_minus());
        if (type == "viscous") return FrictionLaw::viscous(mu_v());
        if (type == "bingham") return FrictionLaw::bingham(mu_v(), mu_plus(), mu_minus());
        if (type == "stribeck") {
            const json& psi = spec.contains("psi") ? spec.at("psi") : json::object();
            const double amplitude = psi.is_object() && psi.contains("amplitude")
                                         ? require_number(psi.at("amplitude"), where)
                                         : 0.5;
            const double half_width = psi.is_object() && psi.contains("half_width")
                                          ? require_number(psi.at("half_width"), where)
                                          : 1.0;
            return FrictionLaw::stribeck(mu_plus(), mu_minus(), amplitude, half_width);
        }
        if (type == "custom") {
            FrictionLaw l = spec.contains("mu_v")
                                ? FrictionLaw::bingham(mu_v(), mu_plus(), mu_minus())
                                : FrictionLaw::dry(mu_plus(), mu_minus());
            if (spec.contains("psi")) l.with_perturbation(psi_from_json(spec.at("psi"), where + "/psi"));
            return l;
        }
        bad(where, "unknown law type \"" + type + "\"");
    }();

    if (spec.contains("extra")) {
        const json& e = spec.at("extra");
        if (!e.is_object() || !e.contains("u") || !e.contains("y"))
            bad(where + "/extra", "needs \"u\" and \"y\" arrays");
        law.with_extra(PiecewiseLinearMonotone(e.at("u").get<std::vector<double>>(),
                                               e.at("y").get<std::vector<double>>()));
    }
    if (spec.contains("tail_bounds")) {
        const json& tb = spec.at("tail_bounds");
        TailBounds tails{signal_from_json(tb.at("ell_minus"), period, where + "/tail_bounds/ell_minus"),
                         signal_from_json(tb.at("ell_plus"), period, where + "/tail_bounds/ell_plus"),
                         require_number(tb.at("R"), where + "/tail_bounds/R")};
        law.with_tail_bounds(std::move(tails));
    }
    return law;
}

DiscreteCrawler discrete_from_json(const json& spec) {
    const std::string where = "/model";
    const double T = require_number(spec.at("T"), where + "/T");
    if (!(T > 0.0)) bad(where + "/T", "period must be positive");
    DiscreteCrawler c;
    c.period = T;
    if (!spec.contains("masses") || !spec.at("masses").is_array())
        bad(where, "needs a \"masses\" array");
    c.masses = spec.at("masses").get<std::vector<double>>();
    const json& w = spec.at("w");
    const json& laws = spec.at("laws");
    if (!w.is_array() || !laws.is_array() || w.size() != c.masses.size() ||
        laws.size() != c.masses.size())
        bad(where, "\"masses\", \"w\" and \"laws\" must be arrays of equal length");
    for (size_t i = 0; i < w.size(); ++i) {
        c.shape_velocities.push_back(
            signal_from_json(w.at(i), T, where + "/w/" + std::to_string(i)));
        c.laws.push_back(law_from_json(laws.at(i), T, where + "/laws/" + std::to_string(i)));
    }
    c.load = spec.contains("B") ? signal_from_json(spec.at("B"), T, where + "/B")
                                : PeriodicSignal::constant(0.0, T);
    c.r_margin = number_or(spec, "r_margin", 1e-6, where);
    return c;
}

ContinuousCrawler continuous_from_json(const json& spec) {
    const std::string where = "/model";
    const double T = require_number(spec.at("T"), where + "/T");
    if (!(T > 0.0)) bad(where + "/T", "period must be positive");
    ContinuousCrawler c;
    c.period = T;
    if (!spec.contains("omega") || !spec.at("omega").is_array() || spec.at("omega").size() != 2)
        bad(where, "needs \"omega\": [a, b]");
    const double a = require_number(spec.at("omega").at(0), where + "/omega/0");
    const double b = require_number(spec.at("omega").at(1), where + "/omega/1");
    if (!(b > a)) bad(where + "/omega", "needs a < b");

    const json& rho = spec.at("rho");
    if (!rho.is_array() || rho.empty()) bad(where + "/rho", "needs one density per cell");
    const size_t K = rho.size();
    if (spec.contains("partition")) {
        c.partition = spec.at("partition").get<std::vector<double>>();
        if (c.partition.size() != K + 1 || c.partition.front() != a || c.partition.back() != b)
            bad(where + "/partition", "must run from omega[0] to omega[1] with one cell per entry of rho");
    } else {
        for (size_t k = 0; k <= K; ++k)
            c.partition.push_back(a + (b - a) * static_cast<double>(k) / K);
    }
    c.density = rho.get<std::vector<double>>();

    const json& phidot = spec.at("phidot");
    const json& laws = spec.at("law_field");
    if (!phidot.is_array() || phidot.size() != K || !laws.is_array() || laws.size() != K)
        bad(where, "\"phidot\" and \"law_field\" need one entry per cell");
    for (size_t k = 0; k < K; ++k) {
        c.deformation_rate.push_back(
            signal_from_json(phidot.at(k), T, where + "/phidot/" + std::to_string(k)));
        c.law_field.push_back(
            law_from_json(laws.at(k), T, where + "/law_field/" + std::to_string(k)));
    }
    c.load = spec.contains("B") ? signal_from_json(spec.at("B"), T, where + "/B")
                                : PeriodicSignal::constant(0.0, T);
    if (spec.contains("phi0")) c.phi0 = spec.at("phi0").get<std::vector<double>>();
    c.nodes_per_cell = static_cast<int>(number_or(spec, "nodes_per_cell", 8, where));
    if (spec.contains("phi_bounds")) {
        const json& pb = spec.at("phi_bounds");
        if (!pb.is_array() || pb.size() != 2) bad(where + "/phi_bounds", "needs [min, max]");
        c.phi_bounds = {pb.at(0).get<double>(), pb.at(1).get<double>()};
    }
    c.r_margin = number_or(spec, "r_margin", 1e-6, where);
    return c;
}

// --- scenario registry -----------------------------------------------------------

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

json dry_law(double mu) { return json{{"type", "dry"}, {"mu", mu}}; }

json square_pair(double T, double alpha) {
    // w1 = -alpha on (0, T/2), +alpha on (T/2, T); w2 = -w1
    json bindings{{"P", T}, {"a", alpha}};
    return json::array({json{{"expr", "-1*square(t;P,a)"}, {"bindings", bindings}},
                        json{{"expr", "square(t;P,a)"}, {"bindings", bindings}}});
}

json scenario_ex_dry(double alpha, double T, double load) {
    return json{{"type", "discrete"}, {"T", T},    {"masses", {0.5, 0.5}},
                {"w", square_pair(T, alpha)},      {"laws", {dry_law(1), dry_law(1)}},
                {"B", load}};
}

json scenario_ex_drystar(double alpha, double T, double load) {
    json model = scenario_ex_dry(alpha, T, load);
    model["laws"] = {dry_law(2), dry_law(1)};
    return model;
}

json scenario_ex_strib(double alpha, double T, double load) {
    json model = scenario_ex_dry(alpha, T, load);
    const json law{{"type", "stribeck"},
                   {"mu", 1},
                   {"psi", {{"type", "sin"}, {"amplitude", 0.5}, {"half_width", alpha}}}};
    model["laws"] = {law, law};
    return model;
}

json scenario_ex_incomp(double T, double load) {
    return json{{"type", "discrete"},
                {"T", T},
                {"masses", {1, 1}},
                {"w", {"cos(t)", "-1*cos(t)"}},
                {"laws",
                 {json{{"type", "viscous"}, {"mu_v", 1}}, json{{"type", "viscous"}, {"mu_v", 2}}}},
                {"B", load}};
}

json scenario_ex_comp(double T, double load) {
    return json{{"type", "discrete"},
                {"T", T},
                {"masses", {1, 1}},
                {"w", {"-1*sin(t)", "sin(t)"}},
                {"laws",
                 {json{{"type", "viscous"}, {"mu_v", "2+sin(t)"}},
                  json{{"type", "viscous"}, {"mu_v", "2-sin(t)"}}}},
                {"B", load}};
}

json scenario_cont_dry(double alpha, double T, double load) {
    json bindings{{"P", T}, {"a", alpha}};
    return json{{"type", "continuous"},
                {"T", T},
                {"omega", {0, 3}},
                {"partition", {0, 1, 2, 3}},
                {"rho", {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}},
                {"phidot", {0.0, json{{"expr", "2*square(t;P,a)"}, {"bindings", bindings}}, 0.0}},
                {"law_field", {dry_law(1), dry_law(0), dry_law(1)}},
                {"phi0", {1, 1, 1}},
                {"nodes_per_cell", 8},
                {"B", load}};
}

json scenario_smooth_dry(double T, double load) {
    return json{{"type", "discrete"}, {"T", T},
                {"masses", {0.5, 0.5}},
                {"w", {"cos(t)", "-1*cos(t)"}},
                {"laws", {dry_law(1), dry_law(1)}},
                {"B", load}};
}

} // namespace

std::vector<std::string> scenario_names() {
    return {"ex-dry",  "ex-drystar", "ex-strib",   "ex-incomp",
            "ex-comp", "cont-dry",   "smooth-dry", "slope-dry"};
}

json scenario_model(const std::string& name, const json& overrides) {
    for (const auto& [k, v] : overrides.items()) {
        if (k != "alpha" && k != "T" && k != "load")
            bad("/overrides/" + k, "unknown scenario parameter");
        require_number(v, "/overrides/" + k);
    }
    auto num = [&](const char* key, double fallback) {
        return overrides.contains(key) ? overrides.at(key).get<double>() : fallback;
    };
    const double alpha = num("alpha", 1.0);

    if (name == "ex-dry") return scenario_ex_dry(alpha, num("T", 1.0), num("load", 0.0));
    if (name == "ex-drystar") {
        const double T = num("T", 2.0);
        if (!(T < 4.0 * alpha)) bad("/overrides/T", "ex-drystar needs T < 4*alpha");
        return scenario_ex_drystar(alpha, T, num("load", 0.0));
    }
    if (name == "ex-strib") return scenario_ex_strib(alpha, num("T", 1.0), num("load", 0.0));
    if (name == "ex-incomp") return scenario_ex_incomp(num("T", kTwoPi), num("load", 0.0));
    if (name == "ex-comp") return scenario_ex_comp(num("T", kTwoPi), num("load", 0.0));
    if (name == "cont-dry") return scenario_cont_dry(alpha, num("T", 1.0), num("load", 0.0));
    if (name == "smooth-dry") return scenario_smooth_dry(num("T", kTwoPi), num("load", 0.0));
    if (name == "slope-dry") return scenario_ex_dry(alpha, num("T", 1.0), num("load", -1.0));
    bad("/scenario", "unknown scenario \"" + name + "\"");
}

// --- RunConfig ---------------------------------------------------------------------

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) bad("/", "configuration must be a JSON object");
    RunConfig cfg;
    const bool has_scenario = j.contains("scenario");
    const bool has_model = j.contains("model");
    if (has_scenario == has_model)
        bad("/", "exactly one of \"scenario\" or \"model\" must be present");

    if (has_scenario) {
        cfg.scenario = j.at("scenario").get<std::string>();
        for (const char* key : {"alpha", "T", "load"})
            if (j.contains(key)) cfg.overrides[key] = j.at(key);
        if (j.contains("overrides"))
            for (const auto& [k, v] : j.at("overrides").items()) cfg.overrides[k] = v;
        cfg.model_spec = scenario_model(*cfg.scenario, cfg.overrides);
    } else {
        cfg.model_spec = j.at("model");
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        cfg.solver.steps_per_period =
            static_cast<int>(number_or(s, "steps_per_period", cfg.solver.steps_per_period, "/solver"));
        cfg.solver.resolvent_tol = number_or(s, "resolvent_tol", cfg.solver.resolvent_tol, "/solver");
        cfg.solver.event_align = s.value("event_align", cfg.solver.event_align);
        cfg.solver.oracle_mode = s.value("oracle_mode", cfg.solver.oracle_mode);
        cfg.solver.oracle_refine =
            static_cast<int>(number_or(s, "oracle_refine", cfg.solver.oracle_refine, "/solver"));
    }
    cfg.solver.validate();
    cfg.v0 = number_or(j, "v0", 0.0, "");
    cfg.periods = number_or(j, "periods", 1.0, "");
    cfg.tol = number_or(j, "tol", 1e-6, "");
    cfg.kmax = static_cast<int>(number_or(j, "kmax", 10000, ""));
    cfg.grid_n = static_cast<int>(number_or(j, "grid_n", 512, ""));
    if (!(cfg.tol > 0.0)) bad("/tol", "must be positive");
    if (!(cfg.periods > 0.0)) bad("/periods", "must be positive");
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();

    // validate the model immediately so load errors carry a config path
    build_dynamics(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

json RunConfig::to_json() const {
    json j;
    if (scenario) {
        j["scenario"] = *scenario;
        for (const auto& [k, v] : overrides.items()) j[k] = v;
    } else {
        j["model"] = model_spec;
    }
    j["solver"] = {{"steps_per_period", solver.steps_per_period},
                   {"resolvent_tol", solver.resolvent_tol},
                   {"event_align", solver.event_align},
                   {"oracle_mode", solver.oracle_mode},
                   {"oracle_refine", solver.oracle_refine}};
    j["v0"] = v0;
    j["periods"] = periods;
    j["tol"] = tol;
    j["kmax"] = kmax;
    j["grid_n"] = grid_n;
    j["out"] = out_dir.string();
    return j;
}

ReducedDynamics build_dynamics(const RunConfig& cfg) {
    const std::string type = cfg.model_spec.value("type", "");
    if (type == "discrete") return reduce_discrete(discrete_from_json(cfg.model_spec));
    if (type == "continuous") return reduce_continuous(continuous_from_json(cfg.model_spec));
    bad("/model/type", "must be \"discrete\" or \"continuous\"");
}

std::vector<PeriodicSignal> shape_velocities(const RunConfig& cfg) {
    const std::string type = cfg.model_spec.value("type", "");
    if (type == "discrete") return discrete_from_json(cfg.model_spec).shape_velocities;
    std::vector<PeriodicSignal> out;
    for (const Contribution& c : build_dynamics(cfg).parts()) out.push_back(c.shape_velocity);
    return out;
}

// --- artifacts ------------------------------------------------------------------------

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << "t,v,x,stick\n";
    char buf[96];
    for (size_t k = 0; k < traj.times.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", traj.times[k], traj.velocities[k],
                      traj.displacement[k]);
        out << buf;
        for (size_t i = 0; i < traj.stick[k].size(); ++i) {
            if (i) out << ';';
            out << traj.stick[k][i];
        }
        out << '\n';
    }
}

namespace {

void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json bounds_json(const ReducedDynamics& dyn) {
    const Bounds& b = dyn.bounds();
    return json{{"R", b.R}, {"v_minus", b.v_minus}, {"v_plus", b.v_plus}};
}

json dissipativity_json(const ReducedDynamics& dyn) {
    const DissipativityReport rep = dissipativity_check(dyn);
    return json{{"pass", rep.pass}, {"I_plus", rep.integral_plus}, {"I_minus", rep.integral_minus}};
}

void write_plot_manifest(const std::filesystem::path& dir, const std::string& title) {
    const json manifest{
        {"files", json::array({json{{"path", "trajectory.csv"},
                                    {"x", "t"},
                                    {"y", json::array({"v", "x"})},
                                    {"xlabel", "t"},
                                    {"ylabel", "velocity / displacement"},
                                    {"title", title}}})}};
    write_json(manifest, dir / "plot.manifest.json");
}

int dispatch_command(const RunConfig& cfg, const std::string& command) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const ReducedDynamics dyn = build_dynamics(cfg);
    const std::string title = cfg.scenario ? *cfg.scenario : "model";
    json report;
    report["command"] = command;
    report["bounds"] = bounds_json(dyn);
    report["dissipativity"] = dissipativity_json(dyn);
    report["flag"] = to_string(dyn.flag());
    for (const std::string& w : dyn.warnings()) std::cerr << "warning: " << w << '\n';

    if (command == "simulate") {
        const Trajectory traj =
            integrate(dyn, cfg.v0, 0.0, cfg.periods * dyn.period(), cfg.solver);
        write_trajectory_csv(traj, cfg.out_dir / "trajectory.csv");
        write_plot_manifest(cfg.out_dir, title);
        report["v0"] = cfg.v0;
        report["final_v"] = traj.final_velocity();
        report["displacement"] = traj.final_displacement();
        write_json(report, cfg.out_dir / "report.json");
        std::cout << "simulate " << title << ": v(" << cfg.periods * dyn.period()
                  << ") = " << traj.final_velocity() << ", displacement "
                  << traj.final_displacement() << '\n';
        return 0;
    }
    if (command == "poincare") {
        const int k = std::max(1, static_cast<int>(std::llround(cfg.periods)));
        const std::vector<double> iterates = poincare_iterates(dyn, cfg.v0, k, cfg.solver);
        report["v0"] = cfg.v0;
        report["poincare_iterates"] = iterates;
        write_json(report, cfg.out_dir / "report.json");
        std::cout << "poincare " << title << ": Phi_T(" << cfg.v0 << ") = " << iterates.front();
        if (k > 1) std::cout << ", Phi_T^" << k << " = " << iterates.back();
        std::cout << '\n';
        return 0;
    }
    if (command == "attractor" || command == "fixed-points") {
        const AttractorReport att = attractor_bracket(dyn, cfg.solver, cfg.tol, cfg.kmax);
        report["alpha"] = att.alpha;
        report["beta"] = att.beta;
        report["bracket_width"] = att.bracket_width;
        report["iterations"] = att.iterations;
        report["converged"] = att.converged;
        const Classification cls = classify_dynamics(dyn);
        report["theorem"] = cls.theorem;
        report["uniqueness_predicted"] = cls.uniqueness_predicted;
        if (command == "fixed-points") {
            const FixedPointReport fp = fixed_points(dyn, att, cfg.grid_n, cfg.tol, cfg.solver);
            json points = json::array();
            for (const FixedPoint& p : fp.points)
                points.push_back(json{{"v", p.v}, {"class", to_string(p.stability)}});
            json plateaus = json::array();
            for (const ValueInterval& p : fp.plateaus)
                plateaus.push_back(json::array({p.lo, p.hi}));
            report["fixed_points"] = points;
            report["plateaus"] = plateaus;
            report["grid_resolution"] = fp.grid_resolution;
        }
        write_json(report, cfg.out_dir / "report.json");
        std::cout << command << ' ' << title << ": K = [" << att.alpha << ", " << att.beta
                  << "]\n";
        return 0;
    }
    if (command == "limit-cycle") {
        const LimitCycle cycle = limit_cycle(dyn, cfg.v0, cfg.solver, cfg.tol);
        write_trajectory_csv(cycle.orbit, cfg.out_dir / "trajectory.csv");
        write_plot_manifest(cfg.out_dir, title);
        report["v0"] = cfg.v0;
        report["gamma"] = cycle.gamma;
        report["avg_velocity"] = cycle.average_velocity;
        write_json(report, cfg.out_dir / "report.json");
        std::cout << "limit-cycle " << title << ": gamma = " << cycle.gamma
                  << ", average velocity " << cycle.average_velocity << '\n';
        return 0;
    }
    if (command == "gamma-stats") {
        const GammaDiagnostics diag = gamma_order_stats(shape_velocities(cfg), cfg.grid_n);
        for (const std::string& w : diag.warnings) std::cerr << "warning: " << w << '\n';
        report["min_gaps"] = diag.min_gap;
        report["continuous_input"] = diag.continuous_input;
        write_json(report, cfg.out_dir / "report.json");
        std::ofstream csv(cfg.out_dir / "gamma_stats.csv");
        csv << "t";
        for (size_t j = 0; j < diag.gamma.size(); ++j) csv << ",gamma" << j + 1;
        csv << '\n';
        char buf[64];
        for (size_t k = 0; k < diag.grid.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", diag.grid[k]);
            csv << buf;
            for (size_t j = 0; j < diag.gamma.size(); ++j) {
                std::snprintf(buf, sizeof buf, ",%.17g", diag.gamma[j][k]);
                csv << buf;
            }
            csv << '\n';
        }
        std::cout << "gamma-stats " << title << ": min gaps";
        for (double gap : diag.min_gap) std::cout << ' ' << gap;
        std::cout << '\n';
        return 0;
    }
    if (command == "check") {
        const Classification cls = classify_dynamics(dyn);
        report["theorem"] = cls.theorem;
        report["uniqueness_predicted"] = cls.uniqueness_predicted;
        report["reasons"] = cls.reasons;
        report["warnings"] = dyn.warnings();
        write_json(report, cfg.out_dir / "report.json");
        const DissipativityReport d = dissipativity_check(dyn);
        std::cout << "check " << title << ": " << (d.pass ? "dissipative" : "NOT dissipative")
                  << ", theorem " << cls.theorem << ", uniqueness "
                  << (cls.uniqueness_predicted ? "predicted" : "not predicted") << '\n';
        return d.pass ? 0 : 2;
    }
    if (command == "sweep") {
        // fan independent simulations over the invariant initial-velocity box
        const int count = 8;
        const double lo = dyn.bounds().v_minus, hi = dyn.bounds().v_plus;
        std::vector<std::future<double>> futures;
        for (int i = 0; i < count; ++i) {
            const double v0 = lo + (hi - lo) * i / (count - 1);
            futures.push_back(std::async(std::launch::async, [&dyn, &cfg, v0, i, title] {
                const Trajectory traj =
                    integrate(dyn, v0, 0.0, cfg.periods * dyn.period(), cfg.solver);
                const auto dir = cfg.out_dir / ("sweep_" + std::to_string(i));
                std::filesystem::create_directories(dir);
                write_trajectory_csv(traj, dir / "trajectory.csv");
                return traj.final_velocity();
            }));
        }
        std::ofstream summary(cfg.out_dir / "sweep_summary.csv");
        summary << "index,v0,final_v\n";
        for (int i = 0; i < count; ++i) {
            const double v0 = lo + (hi - lo) * i / (count - 1);
            char buf[96];
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", i, v0, futures[i].get());
            summary << buf;
        }
        std::cout << "sweep " << title << ": " << count << " runs in " << cfg.out_dir << '\n';
        return 0;
    }
    bad("/command", "unknown command \"" + command + "\"");
}

} // namespace

int run_command(const RunConfig& cfg, const std::string& command) {
    try {
        return dispatch_command(cfg, command);
    } catch (const DissipativityError& e) {
        std::cerr << "dissipativity failure: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace crawl
