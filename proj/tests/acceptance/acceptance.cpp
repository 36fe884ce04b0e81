// Runs the eleven acceptance criteria and prints one PASS/FAIL line per criterion.
// Every gate below is pinned here, independently of the checks inside the suites.

#include "minkray/parallel.hpp"
#include "minkray/validate.hpp"

#include <chrono>
#include <cstdio>
#include <algorithm>
#include <cstring>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

using namespace minkray;

namespace {

enum class Op { LE, GE, LT, GT, TRUE_ };

struct Gate {
    std::string suite;
    std::string key;
    Op op;
    double bound;
};

struct Criterion {
    int id;
    const char* name;
    std::vector<std::string> suites;
    std::vector<Gate> gates;
    double budgetSeconds;  // <= 0: no runtime gate
};

struct SuiteRun {
    Report report;
    double seconds = 0;
};

const char* op_text(Op op) {
    switch (op) {
        case Op::LE: return "<=";
        case Op::GE: return ">=";
        case Op::LT: return "<";
        case Op::GT: return ">";
        default: return "";
    }
}

bool evaluate(const Gate& g, const Report& r, std::string& detail) {
    const std::string* v = r.find(g.key);
    if (!v) {
        detail = g.key + " missing";
        return false;
    }
    if (g.op == Op::TRUE_) {
        detail = g.key + "=" + *v;
        return *v == "true";
    }
    double x = std::stod(*v);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s=%.3e %s %.1e", g.key.c_str(), x, op_text(g.op), g.bound);
    detail = buf;
    switch (g.op) {
        case Op::LE: return x <= g.bound;
        case Op::GE: return x >= g.bound;
        case Op::LT: return x < g.bound;
        case Op::GT: return x > g.bound;
        default: return false;
    }
}

std::vector<Criterion> criteria() {
    return {
        {1, "adjoint identity", {"adjoint"},
         {{"adjoint", "lightray.n2.max_deviation.value", Op::LE, 1e-3},
          {"adjoint", "lightray.n3.max_deviation.value", Op::LE, 1e-3},
          {"adjoint", "trials", Op::GE, 20}},
         120.0},
        {2, "Fourier slice", {"slice"},
         {{"slice", "n2.refined.max_deviation.value", Op::LE, 1e-2},
          {"slice", "n3.refined.max_deviation.value", Op::LE, 1e-2},
          {"slice", "n2.refinement_ratio.value", Op::LE, 0.5},
          {"slice", "n3.refinement_ratio.value", Op::LE, 0.5}},
         0},
        {3, "normal operator triple agreement", {"normal"},
         {{"normal", "n2.refined.ray_vs_multiplier.value", Op::LE, 2e-2},
          {"normal", "n3.refined.ray_vs_multiplier.value", Op::LE, 2e-2},
          {"normal", "n3.refined.kernel_vs_multiplier.value", Op::LE, 5e-2},
          {"normal", "n2.ray_vs_multiplier_decreases.pass", Op::TRUE_, 0},
          {"normal", "n3.ray_vs_multiplier_decreases.pass", Op::TRUE_, 0},
          {"normal", "n3.kernel_vs_multiplier_decreases.pass", Op::TRUE_, 0}},
         0},
        {4, "symbol calculus", {"symbols"},
         {{"symbols", "A.n3.closed_vs_quadrature.value", Op::LE, 1e-8},
          {"symbols", "A.n5.closed_vs_quadrature.value", Op::LE, 1e-8},
          {"symbols", "A.n3.zero_at_pi.value", Op::LE, 1e-10},
          {"symbols", "c0.n3.rule_agreement.value", Op::LE, 1e-8},
          {"symbols", "c0.n5.rule_agreement.value", Op::LE, 1e-8},
          {"symbols", "c0.n3.nonzero.pass", Op::TRUE_, 0},
          {"symbols", "c0.n5.nonzero.pass", Op::TRUE_, 0}},
         0},
        {5, "wave solvers", {"wave"},
         {{"wave", "plane_wave.half_wave.value", Op::LE, 1e-12},
          {"wave", "plane_wave.flat.value", Op::LE, 1e-12},
          {"wave", "energy.drift.value", Op::LE, 1e-10},
          {"wave", "const.residual.value", Op::LE, 1e-8},
          {"wave", "source.vs_ode.value", Op::LE, 1e-8}},
         0},
        {6, "ellipticity and sign structure", {"ellipticity", "transport"},
         {{"ellipticity", "n2.band.min_over_mmin.value", Op::GE, 1.0},
          {"ellipticity", "n3.band.min_over_mmin.value", Op::GE, 1.0},
          {"ellipticity", "n3.orientation.min.value", Op::GT, 0.0},
          {"ellipticity", "n2.sign.plus_min.value", Op::GT, 0.0},
          {"ellipticity", "n2.sign.minus_max.value", Op::LT, 0.0},
          {"ellipticity", "n3.sign.plus_min.value", Op::GT, 0.0},
          {"ellipticity", "n3.sign.minus_max.value", Op::LT, 0.0},
          {"transport", "samples", Op::GE, 50},
          {"transport", "sign_pattern.pass", Op::TRUE_, 0}},
         0},
        {7, "cross-term smoothing", {"crossterm"},
         {{"crossterm", "octave_factor.kappa_8.value", Op::GE, 2.0},
          {"crossterm", "octave_factor.kappa_16.value", Op::GE, 2.0}},
         0},
        {8, "Cauchy reconstruction", {"cauchy"},
         {{"cauchy", "n2.model.f1.rel_error.value", Op::LE, 0.05},
          {"cauchy", "n2.model.f2.rel_error.value", Op::LE, 0.05},
          {"cauchy", "n3.model.f1.rel_error.value", Op::LE, 0.05},
          {"cauchy", "n3.model.f2.rel_error.value", Op::LE, 0.05},
          {"cauchy", "n2.const.f1.rel_error.value", Op::LE, 0.10},
          {"cauchy", "n2.const.f2.rel_error.value", Op::LE, 0.10},
          {"cauchy", "n3.const.f1.rel_error.value", Op::LE, 0.10},
          {"cauchy", "n3.const.f2.rel_error.value", Op::LE, 0.10},
          {"cauchy", "n2.model.refinement_decreases.pass", Op::TRUE_, 0},
          {"cauchy", "n3.model.refinement_decreases.pass", Op::TRUE_, 0},
          {"cauchy", "n2.crosstalk.f1_over_f2.value", Op::LE, 0.02},
          {"cauchy", "n3.crosstalk.f1_over_f2.value", Op::LE, 0.02}},
         2 * 300.0},
        {9, "source reconstruction", {"source"},
         {{"source", "spacelike.kappa_16.rel_error.value", Op::LE, 0.10},
          {"source", "spacelike.error_decreases.pass", Op::TRUE_, 0},
          {"source", "timelike.energy_ratio.value", Op::LE, 0.10}},
         0},
        {10, "stability estimate probe", {"stability"},
         {{"stability", "n2.max_over_min.value", Op::LE, 2.0},
          {"stability", "n3.max_over_min.value", Op::LE, 2.0}},
         0},
    };
}

SuiteRun run(const std::string& name, const ValidateConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteRun r;
    r.report = run_suite(name, cfg);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    std::string outDir;
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--out") && i + 1 < argc) outDir = argv[++i];
        else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only.push_back(std::atoi(argv[++i]));
        else {
            std::fprintf(stderr, "usage: %s [--out DIR] [--only N]...\n", argv[0]);
            return 2;
        }
    }
    if (!outDir.empty()) std::filesystem::create_directories(outDir);
    auto selected = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

    ValidateConfig cfg;
    std::map<std::string, SuiteRun> runs;
    int failed = 0;
    for (const Criterion& c : criteria()) {
        if (!selected(c.id)) continue;
        bool ok = true;
        double seconds = 0;
        std::string details;
        for (const auto& s : c.suites) {
            if (!runs.count(s)) {
                runs[s] = run(s, cfg);
                if (!outDir.empty()) runs[s].report.write(outDir + "/validate_" + s + ".txt");
            }
            seconds += runs[s].seconds;
            if (!runs[s].report.passed()) {
                ok = false;
                details += s + ": " + std::to_string(runs[s].report.failures()) + " internal check(s) failed; ";
            }
        }
        for (const Gate& g : c.gates) {
            std::string d;
            bool pass = evaluate(g, runs[g.suite].report, d);
            ok = ok && pass;
            details += d + (pass ? "; " : " [FAIL]; ");
        }
        char tbuf[64];
        std::snprintf(tbuf, sizeof tbuf, "%.1f s", seconds);
        details += tbuf;
        if (c.budgetSeconds > 0) {
            bool inBudget = seconds <= c.budgetSeconds;
            ok = ok && inBudget;
            std::snprintf(tbuf, sizeof tbuf, " (budget %.0f s%s)", c.budgetSeconds, inBudget ? "" : " [FAIL]");
            details += tbuf;
        }
        std::printf("criterion %2d %-34s %s  %s\n", c.id, c.name, ok ? "PASS" : "FAIL", details.c_str());
        std::fflush(stdout);
        failed += !ok;
    }

    if (selected(11)) {
        // same config and seed at 1 and 4 workers must render byte-identical reports
        bool ok = true;
        std::string details;
        ValidateConfig quick = cfg;
        quick.quick = true;
        const std::vector<std::pair<std::string, ValidateConfig>> probes = {
            {"normal", cfg}, {"wave", cfg}, {"crossterm", cfg}, {"cauchy", quick}};
        for (const auto& [name, pc] : probes) {
            set_threads(1);
            std::string a = run_suite(name, pc).str();
            set_threads(4);
            std::string b = run_suite(name, pc).str();
            set_threads(0);
            bool same = a == b;
            ok = ok && same;
            details += name + (same ? " identical; " : " DIFFERS; ");
        }
        std::printf("criterion %2d %-34s %s  %sthreads {1, 4}\n", 11, "determinism", ok ? "PASS" : "FAIL",
                    details.c_str());
        failed += !ok;
    }
    std::printf("%d criterion/criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
