#include "run_config.hpp"

#include "minkray/microlocal.hpp"
#include "minkray/parallel.hpp"
#include "minkray/reconstruct.hpp"
#include "minkray/validate.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace minkray;
using minkray::cli::ConfigError;
using minkray::cli::RunConfig;

namespace {

struct Common {
    std::string config;
    std::string out = ".";
    std::string seed;
    int threadsFlag = -1;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "key = value config file");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--seed", c.seed, "random seed (u64)");
    sub->add_option("--threads", c.threadsFlag, "worker threads, 0 = automatic");
}

RunConfig load(const Common& c) {
    RunConfig cfg = c.config.empty() ? RunConfig{} : RunConfig::load(c.config);
    if (!c.seed.empty()) cfg.set("seed", c.seed);
    cfg.seed();  // reject malformed seeds early
    return cfg;
}

void apply_threads(const Common& c) {
    int k = c.threadsFlag;
    if (k < 0) {
        if (const char* env = std::getenv("MINKRAY_THREADS")) {
            try {
                k = std::stoi(env);
            } catch (const std::exception&) {
                throw ConfigError("MINKRAY_THREADS must be an integer");
            }
        } else {
            k = 0;
        }
    }
    if (k < 0) throw ConfigError("thread count must be >= 0");
    set_threads(k);
}

fs::path out_dir(const Common& c) {
    fs::path p(c.out);
    fs::create_directories(p);
    return p;
}

// f(t, x) = w(t) psi(x) cos(kappa x1) (space-like) or w(t) cos(kappa (t - tc)) psi(x) (time-like)
ScalarField make_source(const GridSpec& g, const RunConfig& cfg) {
    std::string kind = cfg.str("data", "spacelike");
    if (kind != "spacelike" && kind != "timelike") throw ConfigError("data must be spacelike or timelike");
    const double kappa = cfg.num("kappa", 16.0), sigma = cfg.num("sigma", 0.5);
    const double tc = 0.5 * g.t1_grid(), st = g.t1_grid() / 6.0;
    ScalarField f(g);
    for (int k = 0; k < g.Nt; ++k) {
        double t = g.t(k);
        double w = std::exp(-0.5 * (t - tc) * (t - tc) / (st * st));
        for (std::size_t i = 0; i < f.slice_size(); ++i) {
            auto x = position(g, i);
            double r2 = 0;
            for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
            double psi = std::exp(-0.5 * r2 / (sigma * sigma));
            f.slice(k)[i] = kind == "timelike" ? w * std::cos(kappa * (t - tc)) * psi : w * psi * std::cos(kappa * x[0]);
        }
    }
    return f;
}

int cmd_simulate_cauchy(const Common& c) {
    RunConfig cfg = load(c);
    GridSpec g = cfg.grid();
    RayChart chart = cfg.chart(g);
    const double sigma = cfg.num("sigma", 0.35), kappa = cfg.num("kappa", 6.0);
    std::string data = cfg.str("data", "carrier");
    CauchyData d(g);
    if (data == "carrier" || data == "f1") d.f1 = gaussian_carrier(g, sigma, kappa, {}, 0.5 * kPi);
    if (data == "carrier" || data == "f2") {
        SpatialField h = gaussian_carrier(g, sigma, kappa, {0.1, -0.1, 0.05}, 0.5 * kPi);
        for (std::size_t i = 0; i < h.size(); ++i) d.f2[i] = 0.5 * kappa * h[i];
    }
    if (data != "carrier" && data != "f1" && data != "f2") throw ConfigError("data must be carrier, f1 or f2");
    std::string mode = cfg.str("mode", "flat");
    WaveCoefficients w = cfg.wave(g.n);
    ScalarField u;
    if (mode == "flat") u = solve_cauchy_flat(d, g);
    else if (mode == "const") u = solve_cauchy_const(d, w, g).u;
    else if (mode == "variable") {
        // A_j(t, x) = waveAj exp(-|x|^2), forward modeling only
        std::vector<ScalarField> A;
        for (int j = 0; j <= g.n; ++j) {
            ScalarField F(g);
            for (int k = 0; k < g.Nt; ++k)
                for (std::size_t i = 0; i < F.slice_size(); ++i) {
                    auto x = position(g, i);
                    double r2 = 0;
                    for (int dd = 0; dd < g.n; ++dd) r2 += x[dd] * x[dd];
                    F.slice(k)[i] = w.a(j) * std::exp(-r2);
                }
            A.push_back(std::move(F));
        }
        w.variableA = std::move(A);
        u = solve_cauchy_fd(d, w, g);
    } else
        throw ConfigError("mode must be flat, const or variable");
    fs::path dir = out_dir(c);
    write_field((dir / "f1.fld").string(), d.f1);
    write_field((dir / "f2.fld").string(), d.f2);
    write_field((dir / "u.fld").string(), u);
    write_sinogram((dir / "data.sin").string(), ray_transform(u, chart));
    std::cout << "wrote " << (dir / "data.sin").string() << "\n";
    return 0;
}

int cmd_simulate_source(const Common& c) {
    RunConfig cfg = load(c);
    GridSpec g = cfg.grid();
    RayChart chart = cfg.chart(g);
    ScalarField f = make_source(g, cfg);
    ScalarField u = solve_source_flat(f);
    fs::path dir = out_dir(c);
    write_field((dir / "f.fld").string(), f);
    write_field((dir / "u.fld").string(), u);
    write_sinogram((dir / "data.sin").string(), ray_transform(u, chart));
    std::cout << "wrote " << (dir / "data.sin").string() << "\n";
    return 0;
}

int cmd_reconstruct(const Common& c, const std::string& pipelineFlag, const std::string& inputFlag) {
    RunConfig cfg = load(c);
    GridSpec g = cfg.grid();
    std::string pipeline = pipelineFlag.empty() ? cfg.str("pipeline", "model") : pipelineFlag;
    std::string input = inputFlag.empty() ? cfg.str("input", "") : inputFlag;
    if (input.empty()) throw ConfigError("reconstruct needs an input sinogram (--input or key 'input')");
    Sinogram S = read_sinogram(input);
    fs::path dir = out_dir(c);
    std::string truth = cfg.str("truth", "");
    Report rep;
    if (pipeline == "source") {
        SourceOptions opt;
        opt.delta = cfg.num("delta", opt.delta);
        opt.padFactor = static_cast<int>(cfg.integer("pad", opt.padFactor));
        ScalarField tf;
        if (!truth.empty()) tf = read_field((fs::path(truth) / "f.fld").string());
        auto rec = reconstruct_source(S, g, opt, truth.empty() ? nullptr : &tf);
        write_field((dir / "f.fld").string(), rec.f);
        rep = rec.report;
    } else {
        ReconOptions opt;
        opt.mMinFactor = cfg.num("m_min", opt.mMinFactor);
        opt.bandLimit = cfg.num("band_limit", opt.bandLimit);
        CauchyData td;
        const CauchyData* tp = nullptr;
        if (!truth.empty()) {
            td.f1 = read_spatial_field((fs::path(truth) / "f1.fld").string());
            td.f2 = read_spatial_field((fs::path(truth) / "f2.fld").string());
            tp = &td;
        }
        CauchyReconstruction rec;
        if (pipeline == "model") rec = reconstruct_cauchy_model(S, g, opt, tp);
        else if (pipeline == "const") rec = reconstruct_cauchy_const(S, g, cfg.wave(g.n), opt, tp);
        else if (pipeline == "restriction")
            rec = reconstruct_cauchy_restriction(S, g, cfg.num("Ttilde", 0.5 * (g.t1_grid() + g.T)), opt, tp);
        else
            throw ConfigError("pipeline must be model, const, restriction or source");
        write_field((dir / "f1.fld").string(), rec.data.f1);
        write_field((dir / "f2.fld").string(), rec.data.f2);
        rep = rec.report;
    }
    for (const auto& [k, v] : cfg.values) rep.set("config." + k, v);
    rep.write((dir / "report.txt").string());
    std::cout << rep.str();
    return 0;
}

int cmd_validate(const Common& c, const std::string& suiteFlag) {
    RunConfig cfg = load(c);
    std::string suite = suiteFlag.empty() ? cfg.str("suite", "all") : suiteFlag;
    if (!is_suite(suite)) throw ConfigError("unknown suite '" + suite + "'");
    cfg.grid();  // suites pin their own grids; grid keys in the config must still be valid
    ValidateConfig vc;
    vc.seed = cfg.seed();
    vc.trials = static_cast<int>(cfg.integer("trials", vc.trials));
    vc.quick = cfg.flag("quick", false);
    if (vc.trials < 1) throw ConfigError("trials must be positive");
    Report rep = run_suite(suite, vc);
    fs::path dir = out_dir(c);
    std::string path = (dir / ("validate_" + suite + ".txt")).string();
    rep.write(path);
    std::cout << suite << ": " << (rep.passed() ? "PASS" : "FAIL") << " (" << rep.failures() << " failed checks), report "
              << path << "\n";
    return rep.passed() ? 0 : 1;
}

int cmd_probe(const Common& c, const std::string& pipelineFlag) {
    RunConfig cfg = load(c);
    GridSpec g = cfg.grid();
    std::string label = pipelineFlag.empty() ? cfg.str("pipeline", "E+*.chi.N.1.E+") : pipelineFlag;
    Pipeline p = Pipeline::parse(label);
    p.sliceTime = cfg.num("Ttilde", 0.5 * (g.t1_grid() + g.T));
    MeasuredMultiplier m = measure_multiplier(p, g, cfg.wave(g.n));
    std::vector<double> overlay;
    bool withOverlay = g.n % 2 == 1 && label == "E+*.chi.N.1.E+";
    if (withOverlay) {
        // leading symbol per frequency slot, in the normalization of the measured m: |c0(|xi|)| / 2 pi
        TimeCutoff chi = TimeCutoff::for_grid(g);
        overlay.resize(g.spatial_size());
        for (std::size_t i = 0; i < overlay.size(); ++i) {
            double r = std::sqrt(frequency_norm2(g, i));
            overlay[i] = r > 0 ? std::abs(leading_symbol_c0(r, chi, g.n)) / (2.0 * kPi) : 0.0;
        }
    }
    fs::path dir = out_dir(c);
    std::string path = (dir / "multiplier.csv").string();
    write_multiplier_csv(path, m, withOverlay ? &overlay : nullptr);
    std::cout << "wrote " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minkray: light ray transform, wave solvers and reconstruction pipelines"};
    app.require_subcommand(1);
    Common common;
    std::string pipeline, input, suite;

    auto* sc = app.add_subcommand("simulate-cauchy", "simulate Cauchy data, solution and sinogram");
    add_common(sc, common);
    auto* ss = app.add_subcommand("simulate-source", "simulate a source, solution and sinogram");
    add_common(ss, common);
    auto* rc = app.add_subcommand("reconstruct", "run a reconstruction pipeline");
    add_common(rc, common);
    rc->add_option("--pipeline", pipeline, "model | const | restriction | source");
    rc->add_option("--input", input, "sinogram file");
    auto* va = app.add_subcommand("validate", "run a check suite");
    add_common(va, common);
    va->add_option("--suite", suite, "suite name or 'all'");
    auto* pm = app.add_subcommand("probe-multiplier", "tabulate a measured multiplier as CSV");
    add_common(pm, common);
    pm->add_option("--pipeline", pipeline, "operator chain, e.g. E+*.chi.N.1.E+");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc2 = app.exit(e);
        return rc2 == 0 ? 0 : 2;
    }
    try {
        apply_threads(common);
        if (sc->parsed()) return cmd_simulate_cauchy(common);
        if (ss->parsed()) return cmd_simulate_source(common);
        if (rc->parsed()) return cmd_reconstruct(common, pipeline, input);
        if (va->parsed()) return cmd_validate(common, suite);
        if (pm->parsed()) return cmd_probe(common, pipeline);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
