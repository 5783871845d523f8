#include "cli/experiment.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "relcycle/errors.hpp"
#include "relcycle/serialize.hpp"

namespace relcycle::cli {

using nlohmann::json;
using dynamics::State;

namespace {

const std::map<std::string, double models::SwimmerParams::*> kSwimmerKeys = {
    {"params.M1", &models::SwimmerParams::M1},
    {"params.M2", &models::SwimmerParams::M2},
    {"params.I1", &models::SwimmerParams::I1},
    {"params.I2", &models::SwimmerParams::I2},
    {"params.k", &models::SwimmerParams::k},
    {"params.theta_bar", &models::SwimmerParams::theta_bar},
    {"params.c_B", &models::SwimmerParams::c_B},
    {"params.c_t", &models::SwimmerParams::c_t},
    {"params.c_n", &models::SwimmerParams::c_n},
    {"params.L1", &models::SwimmerParams::L1},
    {"params.L2", &models::SwimmerParams::L2},
    {"params.T_f", &models::SwimmerParams::T_f},
};

const std::set<std::string> kCommonKeys = {
    "model", "run", "eps", "eps_grid", "continuation", "integrator.method", "integrator.h",
    "integrator.tol", "t0", "duration", "initial_state", "guess", "newton.tol",
    "newton.max_iter", "newton.steps_per_period", "output.trajectory", "output.certificate",
    "output.phase", "output.report"};

double number(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("'" + key + "' must be finite");
    return d;
}

std::string text(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
    return v.get<std::string>();
}

State vector(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_array()) throw ConfigError("'" + key + "' must be an array of numbers");
    State out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError("'" + key + "' must be an array of numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

std::string filename(const json& j, const std::string& key) {
    const std::string f = text(j, key);
    if (f.empty() || std::filesystem::path(f).is_absolute())
        throw ConfigError("'" + key + "' must be a relative file name");
    return f;
}

int full_dimension(Model m) {
    switch (m) {
    case Model::spring: return 2;
    case Model::three_d: return 3;
    case Model::swimmer: return models::kSwimmerDim;
    }
    return 0;
}

int reduced_dimension(Model m) {
    switch (m) {
    case Model::spring: return 2;
    case Model::three_d: return 2;
    case Model::swimmer: return models::kSwimmerReducedDim;
    }
    return 0;
}

dynamics::SystemField make_field(const ExperimentConfig& c, double eps) {
    switch (c.model) {
    case Model::spring: return models::spring_field(eps);
    case Model::three_d: return models::three_d_field(eps);
    case Model::swimmer: {
        models::SwimmerParams p = c.params;
        p.eps = eps;
        return models::swimmer_field(p);
    }
    }
    throw std::logic_error("unknown model");
}

std::optional<reduction::QuotientChart> make_chart(Model m) {
    if (m == Model::three_d) return models::three_d_chart();
    if (m == Model::swimmer) return models::swimmer_chart();
    return std::nullopt;
}

State default_guess(const ExperimentConfig& c) {
    if (c.model == Model::swimmer) return models::swimmer_rest(c.params);
    return State::Zero(2);
}

std::string trajectory_csv(const ExperimentConfig& c, const dynamics::Trajectory& traj) {
    std::ostringstream os;
    if (c.model == Model::swimmer) {
        models::SwimmerParams p = c.params;
        p.eps = c.eps;
        dynamics::write_csv(os, traj, {"phi1", "phi2", "x", "y", "dphi1", "dphi2", "dx", "dy"},
                            {"E", "dE"}, [p](double t, const State& x) {
                                const auto e = models::energy(x, t, p);
                                return std::vector<double>{e.total, e.dissipation_rate};
                            });
    } else {
        dynamics::write_csv(os, traj);
    }
    return os.str();
}

void check_certificate(const dynamics::SystemField& field, const cycles::CycleCertificate& cert,
                       const cycles::ShootingOptions& opts) {
    const double r = cycles::reintegration_residual(field, cert, opts);
    if (!(r < 10.0 * opts.tol)) {
        throw NumericalError("certificate fails re-integration check (residual " +
                             dynamics::format_double(r) + ")");
    }
}

int run_simulate(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
    const auto field = make_field(c, c.eps);
    const auto traj = dynamics::integrate(field, *c.initial_state, c.t0, c.t0 + c.duration,
                                          c.integrator);
    serialize::write_atomic(o.out_dir / c.trajectory_file, trajectory_csv(c, traj));
    log << "simulate: " << traj.size() << " samples -> " << (o.out_dir / c.trajectory_file).string()
        << '\n';
    return kExitOk;
}

int run_cycle(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
    const auto field = make_field(c, c.eps);
    auto cert = cycles::find_stroboscopic_cycle(field, c.guess ? *c.guess : default_guess(c),
                                                c.newton);
    cert.epsilon = c.eps;
    check_certificate(field, cert, c.newton);
    serialize::write_atomic(o.out_dir / c.certificate_file,
                            serialize::certificate_to_json(cert).dump(2) + "\n");
    log << "cycle: " << cycles::to_string(cert.stability) << ", residual "
        << dynamics::format_double(cert.newton_residual) << '\n';
    return kExitOk;
}

int run_relative_cycle(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
    const auto field = make_field(c, c.eps);
    const auto chart = *make_chart(c.model);
    auto cert = cycles::find_relative_cycle(field, chart, c.guess ? *c.guess : default_guess(c),
                                            c.newton);
    cert.epsilon = c.eps;
    check_certificate(reduction::reduced_field(field, chart), cert, c.newton);
    serialize::write_atomic(o.out_dir / c.certificate_file,
                            serialize::certificate_to_json(cert).dump(2) + "\n");
    serialize::write_atomic(o.out_dir / c.phase_file,
                            serialize::phase_to_json(*cert.phase).dump(2) + "\n");
    log << "relative_cycle: " << cycles::to_string(cert.stability) << ", phase written to "
        << (o.out_dir / c.phase_file).string() << '\n';
    return kExitOk;
}

int run_sweep(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
    const auto chart = make_chart(c.model);
    const auto family = [&c](double eps) { return make_field(c, eps); };
    const auto result =
        cycles::persistence_sweep(family, chart ? &*chart : nullptr, c.eps_grid,
                                  c.guess ? *c.guess : default_guess(c), c.continuation, c.newton,
                                  o.jobs);
    json out;
    out["certificates"] = json::array();
    for (const auto& cert : result.certificates) {
        const auto field = make_field(c, cert.epsilon);
        check_certificate(chart ? reduction::reduced_field(field, *chart) : field, cert, c.newton);
        out["certificates"].push_back(serialize::certificate_to_json(cert));
    }
    if (result.failed_epsilon) {
        out["failed_epsilon"] = *result.failed_epsilon;
        out["failure"] = result.failure;
    }
    serialize::write_atomic(o.out_dir / c.certificate_file, out.dump(2) + "\n");
    log << "sweep: " << result.certificates.size() << " of " << c.eps_grid.size()
        << " certificates\n";
    if (result.failed_epsilon) {
        log << "sweep stopped at eps = " << dynamics::format_double(*result.failed_epsilon) << ": "
            << result.failure << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

int run_energy_audit(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
    models::SwimmerParams p = c.params;
    p.eps = c.eps;
    const auto field = models::swimmer_field(p);
    const auto traj = dynamics::integrate(field, *c.initial_state, c.t0, c.t0 + c.duration,
                                          c.integrator);
    double max_increase = 0.0;
    double previous = models::energy(traj.states.front(), traj.times.front(), p).total;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double e = models::energy(traj.states[k], traj.times[k], p).total;
        max_increase = std::max(max_increase, e - previous);
        previous = e;
    }
    const State& last = traj.final_state();
    const double shape_error = std::abs(models::shape_deviation({last[0], last[1], last[2], last[3]}, p));
    json report;
    report["residual"] = models::energy_rate_residual(traj, p);
    report["max_energy_increase"] = max_increase;
    report["monotone"] = max_increase <= 1e-12;
    report["initial_energy"] = models::energy(traj.states.front(), traj.times.front(), p).total;
    report["final_energy"] = previous;
    report["final_shape_error"] = shape_error;
    report["final_velocity_norm"] = last.tail<4>().norm();
    report["samples"] = traj.size();
    serialize::write_atomic(o.out_dir / c.trajectory_file, trajectory_csv(c, traj));
    serialize::write_atomic(o.out_dir / c.report_file, report.dump(2) + "\n");
    log << "energy_audit: residual " << dynamics::format_double(report["residual"].get<double>())
        << ", max increase " << dynamics::format_double(max_increase) << '\n';
    return kExitOk;
}

} // namespace

const char* to_string(Model m) {
    switch (m) {
    case Model::spring: return "spring";
    case Model::three_d: return "three_d";
    case Model::swimmer: return "swimmer";
    }
    return "?";
}

const char* to_string(RunType r) {
    switch (r) {
    case RunType::simulate: return "simulate";
    case RunType::cycle: return "cycle";
    case RunType::relative_cycle: return "relative_cycle";
    case RunType::sweep: return "sweep";
    case RunType::energy_audit: return "energy_audit";
    }
    return "?";
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!kCommonKeys.contains(key) && !kSwimmerKeys.contains(key))
            throw ConfigError("unknown key '" + key + "'");
    }
    if (!j.contains("model")) throw ConfigError("missing key 'model'");
    if (!j.contains("run")) throw ConfigError("missing key 'run'");

    ExperimentConfig c;
    const std::string model = text(j, "model");
    if (model == "spring") c.model = Model::spring;
    else if (model == "three_d") c.model = Model::three_d;
    else if (model == "swimmer") c.model = Model::swimmer;
    else throw ConfigError("unknown model '" + model + "'");

    const std::string run = text(j, "run");
    if (run == "simulate") c.run = RunType::simulate;
    else if (run == "cycle") c.run = RunType::cycle;
    else if (run == "relative_cycle") c.run = RunType::relative_cycle;
    else if (run == "sweep") c.run = RunType::sweep;
    else if (run == "energy_audit") c.run = RunType::energy_audit;
    else throw ConfigError("unknown run type '" + run + "'");

    if (c.run == RunType::cycle && c.model != Model::spring)
        throw ConfigError("run 'cycle' needs the spring model; use 'relative_cycle' for symmetric models");
    if (c.run == RunType::relative_cycle && c.model == Model::spring)
        throw ConfigError("run 'relative_cycle' needs a symmetric model (three_d or swimmer)");
    if (c.run == RunType::energy_audit && c.model != Model::swimmer)
        throw ConfigError("run 'energy_audit' needs the swimmer model");

    for (const auto& [key, member] : kSwimmerKeys) {
        if (!j.contains(key)) continue;
        if (c.model != Model::swimmer) throw ConfigError("'" + key + "' only applies to the swimmer");
        c.params.*member = number(j, key);
    }
    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const bool is_sweep = c.run == RunType::sweep;
    const bool is_sim = c.run == RunType::simulate || c.run == RunType::energy_audit;
    const bool is_search = !is_sim;

    if (j.contains("eps")) {
        if (is_sweep) throw ConfigError("sweeps take 'eps_grid', not 'eps'");
        c.eps = number(j, "eps");
        if (c.eps < 0.0) throw ConfigError("'eps' must be >= 0");
    }
    if (j.contains("eps_grid")) {
        if (!is_sweep) throw ConfigError("'eps_grid' only applies to sweeps");
        const State g = vector(j, "eps_grid");
        c.eps_grid.assign(g.data(), g.data() + g.size());
    }
    if (is_sweep) {
        if (c.eps_grid.empty()) throw ConfigError("sweep needs a non-empty 'eps_grid'");
        for (double e : c.eps_grid)
            if (e < 0.0) throw ConfigError("'eps_grid' entries must be >= 0");
    }
    if (j.contains("continuation")) {
        if (!is_sweep) throw ConfigError("'continuation' only applies to sweeps");
        if (!j["continuation"].is_boolean()) throw ConfigError("'continuation' must be a boolean");
        c.continuation = j["continuation"].get<bool>();
    }

    if (j.contains("integrator.method") || j.contains("integrator.h") || j.contains("integrator.tol")) {
        if (!is_sim) throw ConfigError("'integrator.*' only applies to simulate and energy_audit");
        const std::string method = j.contains("integrator.method") ? text(j, "integrator.method") : "fixed";
        if (method == "fixed") {
            if (j.contains("integrator.tol")) throw ConfigError("'integrator.tol' needs method 'adaptive'");
            const double h = j.contains("integrator.h") ? number(j, "integrator.h") : 1e-2;
            if (!(h > 0.0)) throw ConfigError("'integrator.h' must be positive");
            c.integrator = dynamics::FixedStep{h};
        } else if (method == "adaptive") {
            if (j.contains("integrator.h")) throw ConfigError("'integrator.h' needs method 'fixed'");
            const double tol = j.contains("integrator.tol") ? number(j, "integrator.tol") : 1e-10;
            if (!(tol > 0.0)) throw ConfigError("'integrator.tol' must be positive");
            c.integrator = dynamics::Adaptive{tol};
        } else {
            throw ConfigError("'integrator.method' must be 'fixed' or 'adaptive'");
        }
    }

    if (j.contains("t0")) {
        if (!is_sim) throw ConfigError("'t0' only applies to simulate and energy_audit");
        c.t0 = number(j, "t0");
    }
    if (is_sim) {
        if (!j.contains("duration")) throw ConfigError("missing key 'duration'");
        c.duration = number(j, "duration");
        if (!(c.duration > 0.0)) throw ConfigError("'duration' must be positive");
        if (!j.contains("initial_state")) throw ConfigError("missing key 'initial_state'");
        c.initial_state = vector(j, "initial_state");
        if (c.initial_state->size() != full_dimension(c.model))
            throw ConfigError("'initial_state' needs " + std::to_string(full_dimension(c.model)) +
                              " entries for model " + model);
    } else {
        if (j.contains("duration")) throw ConfigError("'duration' only applies to simulate and energy_audit");
        if (j.contains("initial_state"))
            throw ConfigError("'initial_state' only applies to simulate and energy_audit");
    }

    if (j.contains("guess")) {
        if (!is_search) throw ConfigError("'guess' only applies to cycle searches");
        c.guess = vector(j, "guess");
        if (c.guess->size() != reduced_dimension(c.model))
            throw ConfigError("'guess' needs " + std::to_string(reduced_dimension(c.model)) +
                              " entries for model " + model);
    }
    for (const char* key : {"newton.tol", "newton.max_iter", "newton.steps_per_period"}) {
        if (j.contains(key) && !is_search)
            throw ConfigError(std::string("'") + key + "' only applies to cycle searches");
    }
    if (j.contains("newton.tol")) {
        c.newton.tol = number(j, "newton.tol");
        if (!(c.newton.tol > 0.0)) throw ConfigError("'newton.tol' must be positive");
    }
    if (j.contains("newton.max_iter")) {
        if (!j["newton.max_iter"].is_number_integer() || j["newton.max_iter"].get<int>() < 1)
            throw ConfigError("'newton.max_iter' must be a positive integer");
        c.newton.max_iter = j["newton.max_iter"].get<int>();
    }
    if (j.contains("newton.steps_per_period")) {
        if (!j["newton.steps_per_period"].is_number_integer() ||
            j["newton.steps_per_period"].get<int>() < 16)
            throw ConfigError("'newton.steps_per_period' must be an integer >= 16");
        c.newton.steps_per_period = j["newton.steps_per_period"].get<int>();
    }

    if (j.contains("output.trajectory")) c.trajectory_file = filename(j, "output.trajectory");
    if (j.contains("output.certificate")) c.certificate_file = filename(j, "output.certificate");
    if (j.contains("output.phase")) c.phase_file = filename(j, "output.phase");
    if (j.contains("output.report")) c.report_file = filename(j, "output.report");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

int run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
    if (options.jobs < 1) throw ConfigError("--jobs must be at least 1");
    switch (config.run) {
    case RunType::simulate: return run_simulate(config, options, log);
    case RunType::cycle: return run_cycle(config, options, log);
    case RunType::relative_cycle: return run_relative_cycle(config, options, log);
    case RunType::sweep: return run_sweep(config, options, log);
    case RunType::energy_audit: return run_energy_audit(config, options, log);
    }
    return kExitConfig;
}

int run_config_file(const std::filesystem::path& path, const RunOptions& options,
                    std::optional<RunType> expected, std::ostream& log) {
    try {
        const ExperimentConfig config = load_config(path);
        if (expected && config.run != *expected) {
            throw ConfigError(std::string("config declares run '") + to_string(config.run) +
                              "' but subcommand '" + to_string(*expected) + "' was used");
        }
        return run_experiment(config, options, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        log << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace relcycle::cli
