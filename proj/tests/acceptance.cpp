// Acceptance runner: one PASS/FAIL line per criterion; exit 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mmsgeo/tasks.hpp"

using namespace mmsgeo;
using namespace mmsgeo::app;

namespace {

constexpr double kPi = std::numbers::pi;

struct Timed {
    Report report;
    double seconds = 0.0;
};

Timed timed_suite(const std::string& name) {
    const auto t0 = std::chrono::steady_clock::now();
    const Report rep = run_suite(name, 1);
    Timed out;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Same "<suite>." names as the repro artifacts.
    out.report.merge(rep, name + ".");
    return out;
}

bool within(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

double measured(const Report& r, const std::string& verdict) {
    const Verdict* v = r.find(verdict);
    return v ? v->measured : std::nan("");
}

bool verdict_passes(const Report& r, const std::string& verdict) {
    const Verdict* v = r.find(verdict);
    return v && v->pass;
}

int failures = 0;

void line(int id, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void crit1() {
    auto t = timed_suite("sandwich");
    const auto& r = t.report;
    const double up = r.value("sandwich.perimeter_upper");
    const double rel = r.value("sandwich.relaxed");
    const double lo = r.value("sandwich.lower");
    const bool near = within(up, 2 * kPi, 0.03) && within(rel, 2 * kPi, 0.03) && within(lo, 2 * kPi, 0.03);
    const bool bands = verdict_passes(r, "sandwich.upper_vs_relaxed") && verdict_passes(r, "sandwich.upper_vs_lower") &&
                       verdict_passes(r, "sandwich.relaxed_vs_lower");
    line(1, near && bands && t.seconds <= 60.0,
         fmt("disk 512^2: upper %.4f relaxed %.4f lower %.4f vs 2pi %.4f; bands %s; %.1f s", up, rel, lo, 2 * kPi,
             bands ? "agree" : "disagree", t.seconds));
}

void crit2() {
    auto t = timed_suite("mean-value");
    const auto& r = t.report;
    double total = 0.0;
    for (const char* s : {"disk", "interval", "arc"}) total += r.value(std::string("mean-value.") + s + ".violations");
    line(2, total == 0.0 && r.passed(),
         fmt("violations disk %g interval %g arc %g", r.value("mean-value.disk.violations"),
             r.value("mean-value.interval.violations"), r.value("mean-value.arc.violations")));
}

void crit3() {
    bool ok = true;
    double worst = 0.0;
    std::string bad;
    for (const auto& name : invariant_spaces()) {
        const auto space = build_invariant_space(name);
        const auto t0 = std::chrono::steady_clock::now();
        const Report r = run_verify(space, "quick", 1);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        worst = std::max(worst, s);
        if (!r.passed() || s > 5.0) {
            ok = false;
            bad += " " + name;
        }
    }
    line(3, ok,
         fmt("%zu spaces, slowest %.2f s%s%s", invariant_spaces().size(), worst, bad.empty() ? "" : "; failing:",
             bad.c_str()));
}

void crit4() {
    auto t = timed_suite("strict-semigroup");
    const double t4 = measured(t.report, "strict-semigroup.t4_at_3");
    const double t22 = measured(t.report, "strict-semigroup.t2t2_at_3");
    line(4, t4 == 1.0 && t22 == 0.0, fmt("T4 chi(3) = %g, T2 T2 chi(3) = %g", t4, t22));
}

void crit5() {
    auto t = timed_suite("coarea");
    const auto& r = t.report;
    const double var = r.value("coarea.lhs_var");
    const double per = r.value("coarea.rhs_perimeter");
    const double mink = r.value("coarea.rhs_minkowski_lower");
    const double unit = r.value("coarea.unit_slope_fraction");
    line(5, within(var, kPi, 0.03) && within(per, kPi, 0.03) && within(mink, kPi, 0.03) && unit >= 0.9,
         fmt("Var %.4f, int Per %.4f, int M- %.4f vs pi; unit-slope fraction %.3f; %.1f s", var, per, mink, unit,
             t.seconds));
}

void crit6() {
    auto t = timed_suite("distance-levels");
    bool ok = true;
    double worst = 0.0;
    int count = 0;
    for (double level : {0.5, 1.0, 1.5}) {
        std::ostringstream prefix;
        prefix << "distance-levels.t=" << level << ".";
        for (const char* q : {"lower_in", "upper_in", "lower_out", "upper_out", "perimeter", "two_sided"}) {
            const double v = measured(t.report, prefix.str() + q);
            const double err = std::abs(v / (2 * kPi * level) - 1.0);
            if (!(err <= 0.04)) ok = false;
            worst = std::max(worst, std::isfinite(err) ? err : 1.0);
            ++count;
        }
    }
    line(6, ok && count == 18, fmt("18 quantities at t = 0.5, 1, 1.5; worst relative error %.2f%%", 100 * worst));
}

void crit7() {
    auto t = timed_suite("eq13");
    const auto& r = t.report;
    const double stair = r.value("eq13.staircase_cost");
    const double l1 = r.value("eq13.staircase_l1");
    const double id = r.value("eq13.integral_sl_identity");
    line(7, stair <= 0.52 && l1 <= 0.02 && std::abs(id - 0.75) <= 0.01 && t.seconds <= 10.0,
         fmt("staircase %.4f, L1 %.4f, int sl(id) %.4f; %.2f s", stair, l1, id, t.seconds));
}

void crit8() {
    auto t = timed_suite("dust");
    const auto& r = t.report;
    const double growth = r.value("dust.quotient_growth");
    const bool monotone = verdict_passes(r, "dust.quotients_monotone");
    const bool flag = verdict_passes(r, "dust.divergence_flag");
    line(8, growth >= 4.0 && monotone && flag,
         fmt("growth %.2fx, monotone %s, divergence flag %s (exponent %.3f)", growth, monotone ? "yes" : "no",
             flag ? "raised" : "missing", r.value("dust.growth_exponent")));
}

void crit9() {
    auto t = timed_suite("gauge");
    const auto& r = t.report;
    const double seg = r.value("gauge.segment_h");
    const double pt = r.value("gauge.point_h");
    const bool ineq = verdict_passes(r, "gauge.inequalities.gauge_vs_lip_a") &&
                      verdict_passes(r, "gauge.inequalities.gauge_vs_slope") &&
                      verdict_passes(r, "gauge.inequalities.gauge_vs_lipschitz");
    line(9, within(seg, kPi / 4, 0.05) && within(pt, 1.0, 0.05) && ineq,
         fmt("segment %.4f vs pi/4 %.4f, point %.4f, inequalities %s", seg, kPi / 4, pt, ineq ? "hold" : "fail"));
}

void crit10() {
    auto t = timed_suite("cheeger");
    const auto& r = t.report;
    bool ok = r.passed();
    std::string detail;
    for (auto [space, target] : {std::pair<const char*, double>{"interval", 2.0}, {"circle", 2.0 / kPi}}) {
        const std::string p = std::string("cheeger.") + space + ".";
        const double per = r.value(p + "gamma_per");
        const double minl = r.value(p + "gamma_minl");
        const double minu = r.value(p + "gamma_minu");
        ok = ok && within(per, target, 0.03) && within(minl, target, 0.03) && within(minu, target, 0.03);
        ok = ok && verdict_passes(r, p + "gamma_per_le_minl") && verdict_passes(r, p + "gamma_minl_le_minu") &&
             verdict_passes(r, p + "gamma_equality");
        detail += fmt("%s per %.4f minl %.4f minu %.4f (target %.4f); ", space, per, minl, minu, target);
    }
    line(10, ok, detail);
}

void crit11() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "mmsgeo_acceptance_workers";
    fs::remove_all(base);
    const std::string suites = "sandwich,dust,gauge,cheeger,strict-semigroup";
    bool ok = true;
    std::string detail;
    for (int w : {1, 4}) {
        const std::string cmd = std::string(MMSGEO_CLI_PATH) + " repro --suite " + suites + " --workers " +
                                std::to_string(w) + " --out " + (base / ("w" + std::to_string(w))).string() +
                                " > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        if (rc != 0) {
            ok = false;
            detail += fmt("workers %d exit %d; ", w, rc);
        }
    }
    std::size_t compared = 0;
    if (ok) {
        for (const auto& e : fs::directory_iterator(base / "w1")) {
            if (e.path().extension() != ".csv") continue;
            const fs::path other = base / "w4" / e.path().filename();
            if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
                ok = false;
                detail += "differs: " + e.path().filename().string() + "; ";
            }
            ++compared;
        }
        std::size_t other_count = 0;
        for (const auto& e : fs::directory_iterator(base / "w4"))
            if (e.path().extension() == ".csv") ++other_count;
        ok = ok && compared > 0 && other_count == compared;
    }
    fs::remove_all(base);
    line(11, ok, fmt("%zu CSV files compared between --workers 1 and --workers 4; %s", compared,
                     detail.empty() ? "identical" : detail.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::function<void()>> criteria{crit1, crit2, crit3, crit4,  crit5, crit6,
                                                crit7, crit8, crit9, crit10, crit11};
    // Optional argument: a single criterion number.
    if (argc > 1) {
        const int id = std::atoi(argv[1]);
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
            return 3;
        }
        criteria[static_cast<std::size_t>(id - 1)]();
    } else {
        for (auto& c : criteria) {
            try {
                c();
            } catch (const std::exception& e) {
                ++failures;
                std::printf("criterion error: %s\n", e.what());
            }
        }
    }
    std::printf("acceptance: %d failing\n", failures);
    return failures == 0 ? 0 : 2;
}
