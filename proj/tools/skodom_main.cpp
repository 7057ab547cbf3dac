#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "skodom/conformal.hpp"
#include "skodom/distributions.hpp"
#include "skodom/fourier.hpp"
#include "skodom/geometry.hpp"
#include "skodom/montecarlo.hpp"
#include "skodom/svg.hpp"

using nlohmann::json;
using namespace skodom;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CommonOpts {
    std::string dist_path;
    int n = 4096;
    int grid = 2001;
    long paths = 10000;
    double dt = 1e-4;
    std::optional<uint64_t> seed;
    std::string mode = "disc";
    std::optional<double> ymax;
    std::string out;
    std::string svg;
    int threads = 0;
    double gap_tol = 1e-3;
};

uint64_t resolve_seed(const std::optional<uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SKODOM_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

json make_manifest(const std::string& command, const CommonOpts& o, bool with_timestamp) {
    json m;
    m["command"] = command;
    m["dist"] = o.dist_path;
    m["version"] = kVersion;
    json p;
    p["n"] = o.n;
    p["grid"] = o.grid;
    p["paths"] = o.paths;
    p["dt"] = o.dt;
    p["seed"] = resolve_seed(o.seed);
    p["mode"] = o.mode;
    if (o.ymax) p["ymax"] = *o.ymax;
    p["threads"] = o.threads;
    m["params"] = p;
    if (with_timestamp) {
        const auto now = std::chrono::system_clock::now();
        m["timestamp"] =
            std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    }
    return m;
}

void write_manifest_sidecar(const std::string& out_path, const json& manifest) {
    std::ofstream out(out_path + ".manifest.json");
    if (!out) throw std::runtime_error("cannot write " + out_path + ".manifest.json");
    out << manifest.dump(2) << "\n";
}

void write_trace_csv(const BoundaryCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "theta,x,y,diverged\n";
    for (const auto& s : curve.samples)
        out << fmt17(s.theta) << "," << fmt17(s.x) << "," << fmt17(s.y) << ","
            << (s.diverged ? 1 : 0) << "\n";
}

int default_order(const Distribution& dist, int flag_n, bool flag_given) {
    if (flag_given) return flag_n;
    return dist.kind() == DistKind::Cantor ? 65536 : 4096;  // Cantor converges slowly
}

RegionPolygon build_region(const Distribution& dist, const FourierSeries& series,
                           const CommonOpts& o) {
    const Point start{series.a(0), 0.0};
    if (dist.is_atomic()) {
        const StepProfile profile = step_profile(dist);
        const auto tips = ray_tips(profile);
        const double y_max = o.ymax.value_or(default_y_max(dist, tips));
        return polygonize_steps(profile, tips, y_max, start);
    }
    const BoundaryCurve curve = trace(series, dist, o.grid);
    const double y_max = o.ymax.value_or(default_y_max(dist));
    return polygonize(curve, y_max, start);
}

json report_to_json(const SimulationReport& rep) {
    json r;
    r["mean_exit_time"] = rep.mean_exit_time;
    r["exit_time_se"] = rep.exit_time_se;
    r["mean_exit_x"] = rep.mean_exit_x;
    r["cap_exit_fraction"] = rep.cap_exit_fraction;
    if (rep.atomic) {
        r["chi2_statistic"] = rep.chi2_statistic;
        r["chi2_p_value"] = rep.chi2_p_value;
        r["max_snap_distance"] = rep.max_snap_distance;
        auto arr = json::array();
        for (const auto& c : rep.atom_counts)
            arr.push_back({{"atom_x", c.atom_x}, {"expected", c.expected}, {"observed", c.observed}});
        r["atom_counts"] = arr;
    } else {
        r["ks_statistic"] = rep.ks_statistic;
        r["ks_p_value"] = rep.ks_p_value;
    }
    json cfg;
    cfg["n_paths"] = rep.config.n_paths;
    cfg["dt"] = rep.config.dt;
    cfg["seed"] = rep.config.seed;
    cfg["mode"] = rep.config.mode == SimMode::DiscTimeChange ? "disc" : "domain";
    cfg["eps_stop"] = rep.config.eps_stop;
    cfg["sim_truncation"] = rep.config.sim_truncation;
    r["config"] = cfg;
    return r;
}

int cmd_coeffs(const CommonOpts& o, bool n_given) {
    const Distribution dist = Distribution::load(o.dist_path);
    const FourierSeries series = cosine_coefficients(dist, default_order(dist, o.n, n_given));
    if (o.out.empty()) {
        for (int n = 0; n <= series.order(); ++n)
            std::cout << n << "," << fmt17(series.a(n)) << "\n";
    } else {
        write_coeffs_csv(series, o.out);
        write_manifest_sidecar(o.out, make_manifest("coeffs", o, true));
    }
    return 0;
}

int cmd_trace(const CommonOpts& o, bool n_given) {
    const Distribution dist = Distribution::load(o.dist_path);
    const FourierSeries series = cosine_coefficients(dist, default_order(dist, o.n, n_given));
    const BoundaryCurve curve = trace(series, dist, o.grid);
    if (!o.out.empty()) {
        write_trace_csv(curve, o.out);
        write_manifest_sidecar(o.out, make_manifest("trace", o, true));
    }
    if (!o.svg.empty()) write_boundary_svg(curve, start_point(series), o.svg);
    return 0;
}

int cmd_tips(const CommonOpts& o) {
    const Distribution dist = Distribution::load(o.dist_path);
    if (!dist.is_atomic()) {
        std::cerr << "error: tips require atomic distribution\n";
        return 2;
    }
    const auto tips = ray_tips(step_profile(dist));
    auto arr = json::array();
    for (const auto& t : tips) {
        json jt;
        jt["atom_x"] = t.atom_x;
        if (t.critical_angle) jt["critical_angle"] = *t.critical_angle;
        else jt["critical_angle"] = nullptr;
        if (std::isfinite(t.tip_y)) jt["tip_y"] = t.tip_y;
        else jt["tip_y"] = "inf";
        arr.push_back(jt);
    }
    if (o.out.empty()) {
        std::cout << arr.dump(2) << "\n";
    } else {
        std::ofstream out(o.out);
        if (!out) throw std::runtime_error("cannot write " + o.out);
        out << arr.dump(2) << "\n";
        write_manifest_sidecar(o.out, make_manifest("tips", o, true));
    }
    return 0;
}

SimConfig make_sim_config(const CommonOpts& o, SimMode mode) {
    SimConfig cfg;
    cfg.n_paths = o.paths;
    cfg.dt = o.dt;
    cfg.seed = resolve_seed(o.seed);
    cfg.mode = mode;
    cfg.threads = o.threads;
    return cfg;
}

int cmd_simulate(const CommonOpts& o, bool n_given) {
    const Distribution dist = Distribution::load(o.dist_path);
    const FourierSeries series = cosine_coefficients(dist, default_order(dist, o.n, n_given));
    SimulationReport rep;
    if (o.mode == "disc") {
        rep = simulate_disc(series, dist, make_sim_config(o, SimMode::DiscTimeChange));
    } else if (o.mode == "domain") {
        const RegionPolygon region = build_region(dist, series, o);
        rep = simulate_domain(region, dist, {series.a(0), 0.0},
                              make_sim_config(o, SimMode::DirectDomain));
    } else {
        std::cerr << "error: --mode must be disc or domain\n";
        return 2;
    }
    json out_json = report_to_json(rep);
    out_json["manifest"] = make_manifest("simulate", o, true);
    if (o.out.empty()) {
        std::cout << out_json.dump(2) << "\n";
    } else {
        std::ofstream out(o.out);
        if (!out) throw std::runtime_error("cannot write " + o.out);
        out << out_json.dump(2) << "\n";
        std::string samples_path = o.out;
        const auto dot = samples_path.rfind(".json");
        if (dot != std::string::npos) samples_path = samples_path.substr(0, dot);
        write_samples_csv(rep, samples_path + "_samples.csv");
    }
    return 0;
}

int cmd_verify(const CommonOpts& o, bool n_given) {
    const Distribution dist = Distribution::load(o.dist_path);
    const int N = default_order(dist, o.n, n_given);

    json checks = json::array();
    bool all_pass = true;
    auto add_check = [&](const std::string& name, bool pass, double value, double threshold,
                         const std::string& note = "") {
        json c;
        c["name"] = name;
        c["pass"] = pass;
        c["value"] = value;
        c["threshold"] = threshold;
        if (!note.empty()) c["note"] = note;
        checks.push_back(c);
        all_pass = all_pass && pass;
    };

    const FourierSeries series = cosine_coefficients(dist, N);

    const double a0_err = std::abs(series.a(0) - dist.mean());
    add_check("a0_matches_mean", a0_err < 1e-4, a0_err, 1e-4);

    const double gap = parseval_gap(dist, series);
    add_check("parseval_gap", gap > -1e-9 && gap < o.gap_tol, gap, o.gap_tol,
              gap >= o.gap_tol ? "truncation too coarse: raise --n" : "");

    const BoundaryCurve curve = trace(series, dist, o.grid);
    bool symmetric = true, sign_ok = true;
    const int m = o.grid / 2;
    for (int k = 0; k < m; ++k) {
        const auto& neg = curve.samples[static_cast<size_t>(k)];
        const auto& pos = curve.samples[static_cast<size_t>(2 * m - k)];
        if (neg.y != -pos.y || neg.x != pos.x) symmetric = false;
    }
    for (const auto& s : curve.samples)
        if (!s.diverged && s.theta > 0 && s.theta < M_PI && s.y > 1e-6) sign_ok = false;
    add_check("trace_symmetry", symmetric, symmetric ? 0.0 : 1.0, 0.5);
    add_check("trace_sign", sign_ok, sign_ok ? 0.0 : 1.0, 0.5);

    if (!dist.is_atomic()) {
        const auto simple = simplicity_check(curve);
        add_check("boundary_simple", simple.simple, simple.simple ? 0.0 : 1.0, 0.5);
    } else {
        add_check("boundary_simple", true, 0.0, 0.5,
                  "skipped: atomic boundaries retrace their slits");
    }

    const SimulationReport rep = simulate_disc(series, dist, make_sim_config(o, SimMode::DiscTimeChange));
    if (dist.is_atomic()) {
        add_check("embedding_law_chi2_p", rep.chi2_p_value > 0.01, rep.chi2_p_value, 0.01);
    } else {
        add_check("embedding_law_ks_p", rep.ks_p_value > 0.01, rep.ks_p_value, 0.01);
    }
    const double var = dist.variance();
    const double lo_band = 0.95 * var - 3.0 * rep.exit_time_se;
    const double hi_band = 1.05 * var + 3.0 * rep.exit_time_se;
    const bool band_ok = rep.mean_exit_time >= lo_band && rep.mean_exit_time <= hi_band;
    add_check("exit_time_identity", band_ok, rep.mean_exit_time, var);

    json verdict;
    verdict["pass"] = all_pass;
    verdict["checks"] = checks;
    verdict["manifest"] = make_manifest("verify", o, false);  // no timestamp: byte-stable
    if (o.out.empty()) {
        std::cout << verdict.dump(2) << "\n";
    } else {
        std::ofstream out(o.out);
        if (!out) throw std::runtime_error("cannot write " + o.out);
        out << verdict.dump(2) << "\n";
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planar domains whose Brownian exit x-coordinate follows a prescribed law"};
    app.require_subcommand(1);

    CommonOpts o;
    uint64_t seed_flag = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* sub, bool* n_given) {
        sub->add_option("--dist", o.dist_path, "distribution spec JSON")->required();
        auto* n_opt = sub->add_option("--n", o.n, "truncation order");
        if (n_given)
            n_opt->each([n_given](const std::string&) { *n_given = true; });
        sub->add_option("--grid", o.grid, "trace grid size (odd)");
        sub->add_option("--paths", o.paths, "number of Brownian paths");
        sub->add_option("--dt", o.dt, "time step");
        sub->add_option("--seed", seed_flag, "RNG seed")
            ->each([&](const std::string&) { seed_given = true; });
        sub->add_option("--mode", o.mode, "disc|domain");
        sub->add_option("--ymax", o.ymax, "ray truncation height");
        sub->add_option("--out", o.out, "output path");
        sub->add_option("--svg", o.svg, "SVG output path");
        sub->add_option("--threads", o.threads, "worker cap (0 = all cores)");
        sub->add_option("--gap-tol", o.gap_tol, "parseval gap threshold for verify");
    };

    bool n_given_coeffs = false, n_given_trace = false, n_given_sim = false, n_given_verify = false;
    auto* c_coeffs = app.add_subcommand("coeffs", "cosine coefficients CSV");
    add_common(c_coeffs, &n_given_coeffs);
    auto* c_trace = app.add_subcommand("trace", "boundary curve CSV (+SVG)");
    add_common(c_trace, &n_given_trace);
    auto* c_tips = app.add_subcommand("tips", "vertical-ray tips for atomic mu");
    add_common(c_tips, nullptr);
    auto* c_sim = app.add_subcommand("simulate", "Brownian exit simulation");
    add_common(c_sim, &n_given_sim);
    auto* c_verify = app.add_subcommand("verify", "consolidated checks");
    add_common(c_verify, &n_given_verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (seed_given) o.seed = seed_flag;

    try {
        if (c_coeffs->parsed()) return cmd_coeffs(o, n_given_coeffs);
        if (c_trace->parsed()) return cmd_trace(o, n_given_trace);
        if (c_tips->parsed()) return cmd_tips(o);
        if (c_sim->parsed()) return cmd_simulate(o, n_given_sim);
        if (c_verify->parsed()) return cmd_verify(o, n_given_verify);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
