// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. argv[1] = CLI binary path, argv[2] = golden SVG directory.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "skodom/conformal.hpp"
#include "skodom/distributions.hpp"
#include "skodom/fourier.hpp"
#include "skodom/geometry.hpp"
#include "skodom/montecarlo.hpp"
#include "skodom/svg.hpp"

using namespace skodom;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("%-34s %s%s%s\n", name.c_str(), pass ? "PASS" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    if (!pass) ++failures;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

Distribution uniform_d() { return Distribution::uniform(-1.0, 1.0); }
Distribution bernoulli_d() { return Distribution::atoms({{-1.0, 0.5}, {1.0, 0.5}}); }
Distribution three_atom_d() {
    return Distribution::atoms({{-1.0, 0.4}, {0.0, 0.4}, {2.0, 0.2}});
}

std::string fmt(double v) {
    char b[64];
    std::snprintf(b, sizeof(b), "%.3g", v);
    return b;
}

// ---- criterion 1: quadrature recovers the uniform closed form --------------
void criterion_1() {
    const double t0 = now_seconds();
    auto s = cosine_coefficients_quadrature(uniform_d(), 10);
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
        const double want = n % 2 ? -8.0 / (M_PI * M_PI * n * n) : 0.0;
        worst = std::max(worst, std::abs(s.a(n) - want));
    }
    const double dt = now_seconds() - t0;
    report("1 uniform quadrature coeffs", worst < 1e-9 && dt < 1.0,
           "max err " + fmt(worst) + ", " + fmt(dt) + "s");
}

// ---- criterion 2: Parseval / exit-time identity ----------------------------
void criterion_2() {
    bool pass = true;
    std::string detail;

    auto su = cosine_coefficients(uniform_d(), 4096);
    const double gap_u = std::abs(1.0 / 3.0 - expected_exit_time(su));
    pass = pass && gap_u < 1e-6;

    auto sb = cosine_coefficients(bernoulli_d(), 4096);
    const double gap_b = std::abs(1.0 - expected_exit_time(sb));
    pass = pass && gap_b < 1e-3;

    double prev = -1.0;
    for (int N : {64, 256, 1024, 4096}) {
        const double e = expected_exit_time(cosine_coefficients(uniform_d(), N));
        if (e < prev - 1e-15) pass = false;
        prev = e;
    }
    report("2 parseval identity", pass, "uniform gap " + fmt(gap_u) + ", bernoulli gap " + fmt(gap_b));
}

// ---- criterion 3: Abel-summed conjugate vs closed-form Hilbert -------------
void criterion_3() {
    const double t0 = now_seconds();
    const double r = 1.0 - 1e-6;
    double worst = 0.0;
    for (auto d : {bernoulli_d(), three_atom_d()}) {
        auto profile = step_profile(d);
        auto series = cosine_coefficients(d, 1 << 20);
        for (int k = 1; k < 40; ++k) {
            const double x = k * (M_PI / 40.0);
            bool near_step = false;
            for (double t : profile.theta)
                if (std::abs(x - t) < 0.05) near_step = true;
            if (near_step || x > M_PI - 0.05) continue;
            const auto b = boundary_point(series, d, x, r, 1e18);
            worst = std::max(worst, std::abs(b.y - hilbert_profile(profile, x)));
        }
    }
    const double dt = now_seconds() - t0;
    report("3 abel vs closed-form hilbert", worst < 5e-3 && dt < 5.0,
           "max err " + fmt(worst) + ", " + fmt(dt) + "s");
}

// ---- criterion 4: ray-tip solver vs grid-scan oracle -----------------------
void criterion_4() {
    bool pass = true;
    std::string detail;

    auto tips_b = ray_tips(step_profile(bernoulli_d()));
    for (const auto& t : tips_b)
        if (t.critical_angle || std::isfinite(t.tip_y)) pass = false;

    // independent oracle for the 3-atom fixture: maximize the closed-form
    // conjugate H(x) = sum_j alpha_j/pi * log|sin((tj-x)/2)/sin((tj+x)/2)|
    // over the middle interval by 1e6-point scan plus ternary refinement
    const std::array<double, 2> th{0.4 * M_PI, 0.8 * M_PI};
    const std::array<double, 2> al{1.0, 2.0};
    auto H = [&](double x) {
        double s = 0.0;
        for (int j = 0; j < 2; ++j)
            s += al[j] / M_PI *
                 std::log(std::abs(std::sin(0.5 * (th[j] - x)) / std::sin(0.5 * (th[j] + x))));
        return s;
    };
    const int M = 1000000;
    double best_x = th[0];
    double best_v = -1e300;
    for (int k = 1; k < M; ++k) {
        const double x = th[0] + (th[1] - th[0]) * k / M;
        const double v = H(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    double lo = best_x - (th[1] - th[0]) / M, hi = best_x + (th[1] - th[0]) / M;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        (H(m1) < H(m2) ? lo : hi) = (H(m1) < H(m2) ? m1 : m2);
    }
    const double oracle_x = 0.5 * (lo + hi), oracle_tip = std::abs(H(oracle_x));

    auto tips3 = ray_tips(step_profile(three_atom_d()));
    pass = pass && tips3.size() == 3 && tips3[1].critical_angle.has_value();
    double ex = 1.0, et = 1.0;
    if (tips3.size() == 3 && tips3[1].critical_angle) {
        ex = std::abs(*tips3[1].critical_angle - oracle_x);
        et = std::abs(tips3[1].tip_y - oracle_tip);
        pass = pass && ex < 1e-6 && et < 1e-6;
    }
    report("4 ray-tip solver", pass, "angle err " + fmt(ex) + ", tip err " + fmt(et));
}

// ---- criterion 5: uniform boundary slope = inverse Gudermannian ------------
void criterion_5() {
    auto d = uniform_d();
    auto s = cosine_coefficients(d, 1 << 16);
    const int grid = 4001;
    auto c = trace(s, d, grid);
    const double h = 2.0 * M_PI / (grid - 1);
    double worst = 0.0;
    for (int k = 1; k + 1 < grid; ++k) {
        const double t = c.samples[static_cast<size_t>(k)].theta;
        if (std::abs(t) <= 0.1 || std::abs(t) >= M_PI - 0.1) continue;
        const double fd = (c.samples[static_cast<size_t>(k + 1)].y -
                           c.samples[static_cast<size_t>(k - 1)].y) /
                          (2.0 * h);
        const double want = -(8.0 / (M_PI * M_PI)) * std::atanh(std::tan(M_PI / 4 - std::abs(t) / 2));
        worst = std::max(worst, std::abs(fd - want));
    }
    report("5 uniform slope (inverse gd)", worst < 1e-3, "max err " + fmt(worst));
}

// ---- criterion 6: embedding law, disc mode ---------------------------------
void criterion_6() {
    const double t0 = now_seconds();
    bool pass = true;
    std::string detail;

    SimConfig cfg;
    cfg.n_paths = 10000;
    cfg.dt = 1e-4;
    cfg.seed = 20260824;
    cfg.mode = SimMode::DiscTimeChange;

    {
        auto d = uniform_d();
        cfg.sim_truncation = 128;
        auto rep = simulate_disc(cosine_coefficients(d, 4096), d, cfg);
        const double var = d.variance();
        pass = pass && rep.ks_p_value > 0.01;
        pass = pass && rep.mean_exit_time >= 0.95 * var - 3.0 * rep.exit_time_se &&
               rep.mean_exit_time <= 1.05 * var + 3.0 * rep.exit_time_se;
        detail += "uniform ks p " + fmt(rep.ks_p_value) + " Ezeta " + fmt(rep.mean_exit_time);
    }
    {
        auto d = bernoulli_d();
        cfg.sim_truncation = 64;
        auto rep = simulate_disc(cosine_coefficients(d, 4096), d, cfg);
        long plus = 0;
        for (double x : rep.exit_x) plus += x > 0.0;
        const double freq = static_cast<double>(plus) / static_cast<double>(cfg.n_paths);
        const double sigma = 0.5 / std::sqrt(static_cast<double>(cfg.n_paths));
        pass = pass && std::abs(freq - 0.5) <= 3.0 * sigma;
        const double var = d.variance();
        pass = pass && rep.mean_exit_time >= 0.95 * var - 3.0 * rep.exit_time_se &&
               rep.mean_exit_time <= 1.05 * var + 3.0 * rep.exit_time_se;
        detail += "; bern freq " + fmt(freq) + " Ezeta " + fmt(rep.mean_exit_time);
    }
    const double dt = now_seconds() - t0;
    pass = pass && dt < 60.0;
    report("6 embedding law (disc)", pass, detail + ", " + fmt(dt) + "s");
}

// ---- criterion 7: embedding law, direct-domain mode ------------------------
void criterion_7() {
    const double t0 = now_seconds();
    bool pass = true;
    std::string detail;

    {
        auto d = uniform_d();
        auto s = cosine_coefficients(d, 4096);
        auto curve = trace(s, d, 2001);
        auto region = polygonize(curve, default_y_max(d), {s.a(0), 0.0});
        SimConfig cfg;
        cfg.n_paths = 10000;
        cfg.dt = 1e-5;
        cfg.seed = 31;
        cfg.mode = SimMode::DirectDomain;
        auto rep = simulate_domain(region, d, {s.a(0), 0.0}, cfg);
        const double var = d.variance();
        pass = pass && rep.ks_p_value > 0.01;
        pass = pass && rep.mean_exit_time >= 0.95 * var - 3.0 * rep.exit_time_se &&
               rep.mean_exit_time <= 1.05 * var + 3.0 * rep.exit_time_se;
        detail += "lens ks p " + fmt(rep.ks_p_value) + " ET " + fmt(rep.mean_exit_time);
    }
    {
        auto d = bernoulli_d();
        auto profile = step_profile(d);
        auto region = polygonize_steps(profile, ray_tips(profile), 10.0, {0.0, 0.0});
        SimConfig cfg;
        cfg.n_paths = 10000;
        cfg.dt = 1e-4;
        cfg.seed = 32;
        cfg.mode = SimMode::DirectDomain;
        auto rep = simulate_domain(region, d, {0.0, 0.0}, cfg);
        pass = pass && rep.cap_exit_fraction < 1e-3;
        long plus = 0;
        for (size_t i = 0; i < rep.exit_x.size(); ++i)
            if (!rep.cap_exit[i]) plus += rep.exit_x[i] > 0.0;
        const double n_law = static_cast<double>(cfg.n_paths) * (1.0 - rep.cap_exit_fraction);
        const double freq = static_cast<double>(plus) / n_law;
        const double sigma = 0.5 / std::sqrt(n_law);
        pass = pass && std::abs(freq - 0.5) <= 3.0 * sigma;
        pass = pass && rep.chi2_p_value > 0.01;
        detail += "; rect cap " + fmt(rep.cap_exit_fraction) + " freq " + fmt(freq);
    }
    const double dt = now_seconds() - t0;
    pass = pass && dt < 300.0;
    report("7 embedding law (domain)", pass, detail + ", " + fmt(dt) + "s");
}

// ---- criterion 8: structural properties of atomic boundaries ---------------
void criterion_8() {
    bool pass = true;
    {
        auto d = three_atom_d();
        auto c = trace(cosine_coefficients(d, 4096), d, 2001);
        for (const auto& smp : c.samples) {
            if (smp.diverged) continue;
            const double near = std::min({std::abs(smp.x + 1.0), std::abs(smp.x - 0.0),
                                          std::abs(smp.x - 2.0)});
            if (near > 1e-9) pass = false;
        }
    }
    {
        auto d = bernoulli_d();
        auto c = trace(cosine_coefficients(d, 4096), d, 2001);
        const double delta = 1e-9;
        for (const auto& smp : c.samples)
            if (smp.x > -1.0 + delta && smp.x < 1.0 - delta) pass = false;
    }
    report("8 structural properties", pass);
}

// ---- criterion 9: symmetry and sign for all shipped fixtures ---------------
void criterion_9(const fs::path& fixture_dir) {
    bool pass = true;
    std::string detail;
    for (const auto& name :
         {"uniform.json", "bernoulli.json", "three_atom.json", "gaussian.json", "cantor.json"}) {
        auto d = Distribution::load((fixture_dir / name).string());
        const int N = d.kind() == DistKind::Cantor ? 65536
                      : d.kind() == DistKind::Gaussian ? 512
                                                       : 4096;
        auto c = trace(cosine_coefficients(d, N), d, 2001);
        double worst_pos = 0.0;
        const int m = 1000;
        for (int k = 0; k < m; ++k) {
            const auto& neg = c.samples[static_cast<size_t>(k)];
            const auto& pos = c.samples[static_cast<size_t>(2 * m - k)];
            if (neg.y != -pos.y || neg.x != pos.x) pass = false;
        }
        for (const auto& smp : c.samples)
            if (!smp.diverged && smp.theta > 0.0 && smp.theta < M_PI)
                worst_pos = std::max(worst_pos, smp.y);
        if (worst_pos > 1e-6) pass = false;
        detail += std::string(name).substr(0, 4) + " " + fmt(worst_pos) + " ";
    }
    report("9 symmetry and sign", pass, detail);
}

// ---- criterion 10: byte-identical verify reports ---------------------------
void criterion_10(const std::string& cli, const fs::path& fixture_dir) {
    const fs::path tmp = fs::temp_directory_path();
    const std::string r1 = (tmp / "accept_verify_1.json").string();
    const std::string r2 = (tmp / "accept_verify_2.json").string();
    const std::string base = "\"" + cli + "\" verify --dist \"" +
                             (fixture_dir / "uniform.json").string() +
                             "\" --n 512 --grid 801 --paths 500 --dt 5e-4 --seed 5 --out ";
    const int c1 = std::system((base + "\"" + r1 + "\"").c_str());
    const int c2 = std::system((base + "\"" + r2 + "\"").c_str());
    bool pass = c1 == 0 && c2 == 0;
    std::string detail = "exit " + std::to_string(c1) + "/" + std::to_string(c2);
    if (pass) {
        std::ifstream f1(r1, std::ios::binary), f2(r2, std::ios::binary);
        std::stringstream s1, s2;
        s1 << f1.rdbuf();
        s2 << f2.rdbuf();
        pass = !s1.str().empty() && s1.str() == s2.str();
        detail += pass ? ", byte-identical" : ", reports differ";
    }
    report("10 verify determinism", pass, detail);
}

// ---- golden SVG comparison -------------------------------------------------
std::vector<std::array<double, 2>> svg_polyline_points(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    std::vector<std::array<double, 2>> pts;
    size_t pos = 0;
    while ((pos = text.find("points=\"", pos)) != std::string::npos) {
        pos += 8;
        const size_t end = text.find('"', pos);
        std::istringstream items(text.substr(pos, end - pos));
        std::string pair;
        while (items >> pair) {
            const size_t comma = pair.find(',');
            pts.push_back({std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))});
        }
        pos = end;
    }
    return pts;
}

void normalize_unit_box(std::vector<std::array<double, 2>>& pts) {
    if (pts.empty()) return;
    double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
    for (auto& p : pts) {
        minx = std::min(minx, p[0]);
        maxx = std::max(maxx, p[0]);
        miny = std::min(miny, p[1]);
        maxy = std::max(maxy, p[1]);
    }
    const double span = std::max(std::max(maxx - minx, maxy - miny), 1e-12);
    for (auto& p : pts) p = {(p[0] - minx) / span, (p[1] - miny) / span};
}

void golden_svg(const fs::path& golden_dir) {
    bool pass = true;
    std::string detail;
    fs::create_directories(golden_dir);
    struct Case {
        const char* name;
        Distribution dist;
        int order;
    };
    const std::vector<Case> cases{{"uniform", uniform_d(), 4096},
                                  {"three_atom", three_atom_d(), 4096}};
    for (const auto& cs : cases) {
        auto series = cosine_coefficients(cs.dist, cs.order);
        auto curve = trace(series, cs.dist, 2001);
        const std::string fresh =
            (fs::temp_directory_path() / (std::string("accept_") + cs.name + ".svg")).string();
        write_boundary_svg(curve, start_point(series), fresh);
        const fs::path gold = golden_dir / (std::string(cs.name) + ".svg");
        if (!fs::exists(gold)) {
            fs::copy_file(fresh, gold);
            detail += std::string(cs.name) + " bootstrapped ";
            continue;
        }
        auto a = svg_polyline_points(fresh);
        auto b = svg_polyline_points(gold.string());
        if (a.size() != b.size() || a.empty()) {
            pass = false;
            detail += std::string(cs.name) + " size mismatch ";
            continue;
        }
        normalize_unit_box(a);
        normalize_unit_box(b);
        double worst = 0.0;
        for (size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::hypot(a[i][0] - b[i][0], a[i][1] - b[i][1]));
        if (worst > 1e-3) pass = false;
        detail += std::string(cs.name) + " d " + fmt(worst) + " ";
    }
    report("golden svg comparison", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance CLI_PATH GOLDEN_DIR\n");
        return 64;
    }
    const std::string cli = argv[1];
    const fs::path golden_dir = argv[2];
    const fs::path fixture_dir = golden_dir.parent_path().parent_path() / "fixtures";

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9(fixture_dir);
    criterion_10(cli, fixture_dir);
    golden_svg(golden_dir);

    std::printf("%s (%d failure%s)\n", failures == 0 ? "ALL CRITERIA PASS" : "CRITERIA FAILED",
                failures, failures == 1 ? "" : "s");
    return failures;
}
