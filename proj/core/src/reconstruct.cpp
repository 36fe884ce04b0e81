#include "minkray/reconstruct.hpp"

#include "minkray/parallel.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

namespace minkray {

namespace {

constexpr cplx I(0.0, 1.0);

// Time-axis data shared by every per-mode chain evaluation.
struct TimeAxis {
    const GridSpec* g = nullptr;
    std::vector<double> t, w, chi, mask;
    int sliceIndex = -1;

    explicit TimeAxis(const GridSpec& spec) : g(&spec) {
        const int Nt = spec.Nt;
        const double dt = spec.dt();
        t.resize(Nt);
        w.assign(Nt, dt);
        w.front() *= 0.5;
        w.back() *= 0.5;
        for (int k = 0; k < Nt; ++k) t[k] = spec.t(k);
        chi = TimeCutoff::for_grid(spec).samples;
        mask.assign(Nt, 0.0);
        int k1 = spec.t1_index();
        for (int k = 0; k < k1; ++k) mask[k] = 1.0;
        mask[k1] = 0.5;
    }
};

int snap_slice(const GridSpec& g, double T) {
    int k = static_cast<int>(std::lround(T / g.dt()));
    if (k <= g.t1_index() || k >= g.Nt - 1) throw ContractError("slice time must lie strictly inside (t1, T)");
    return k;
}

// Part index into const_mode_parts output.
int part_slot(int part, int sign) { return (part == 1 ? 0 : 2) + (sign > 0 ? 0 : 1); }

cplx eval_mode(const Pipeline& p, const TimeAxis& ax, double r, const ConstCauchySolver::Mode* mode) {
    const GridSpec& g = *ax.g;
    const int Nt = g.Nt;
    bool timeValued = false;
    cplx s = 1.0;
    std::vector<cplx> v;
    for (const Stage& st : p.stages) {
        switch (st.kind) {
        case StageKind::Identity:
            break;
        case StageKind::HalfWave:
        case StageKind::ConstPart:
            if (timeValued) throw ContractError("pipeline: propagator applied to a spacetime field");
            v.resize(Nt);
            for (int k = 0; k < Nt; ++k) {
                if (st.kind == StageKind::HalfWave) {
                    v[k] = s * std::exp(I * (st.sign * ax.t[k] * r));
                } else {
                    cplx parts[4];
                    const_mode_parts(*mode, st.part == 1 ? 1.0 : 0.0, st.part == 2 ? 1.0 : 0.0, ax.t[k], 0, parts);
                    v[k] = s * parts[part_slot(st.part, st.sign)];
                }
            }
            timeValued = true;
            break;
        case StageKind::Cutoff:
        case StageKind::DataMask: {
            if (!timeValued) throw ContractError("pipeline: time cutoff applied to a spatial field");
            const auto& c = st.kind == StageKind::Cutoff ? ax.chi : ax.mask;
            for (int k = 0; k < Nt; ++k) v[k] *= c[k];
            break;
        }
        case StageKind::Normal:
            if (!timeValued) throw ContractError("pipeline: N applied to a spatial field");
            v = apply_normal_mode(v, r, g.n, g.dt(), Nt);
            break;
        case StageKind::HalfWaveAdjoint: {
            if (!timeValued) throw ContractError("pipeline: E* applied to a spatial field");
            cplx acc = 0;
            for (int k = 0; k < Nt; ++k) acc += ax.w[k] * std::exp(I * (-st.sign * ax.t[k] * r)) * v[k];
            s = acc;
            timeValued = false;
            break;
        }
        case StageKind::ConstPartAdjoint: {
            if (!timeValued) throw ContractError("pipeline: E* applied to a spatial field");
            cplx acc = 0;
            for (int k = 0; k < Nt; ++k) {
                cplx parts[4];
                const_mode_parts(*mode, st.part == 1 ? 1.0 : 0.0, st.part == 2 ? 1.0 : 0.0, ax.t[k], 0, parts);
                acc += ax.w[k] * std::conj(parts[part_slot(st.part, st.sign)]) * v[k];
            }
            s = acc;
            timeValued = false;
            break;
        }
        case StageKind::Slice:
            if (!timeValued) throw ContractError("pipeline: restriction applied to a spatial field");
            s = v[ax.sliceIndex];
            timeValued = false;
            break;
        case StageKind::SliceRate:
            if (!timeValued) throw ContractError("pipeline: restriction applied to a spatial field");
            s = (v[ax.sliceIndex + 1] - v[ax.sliceIndex - 1]) / (2.0 * g.dt());
            timeValued = false;
            break;
        }
    }
    if (timeValued) throw ContractError("pipeline: chain must end with E*, rho or drho");
    return s;
}

bool uses_const(const Pipeline& p) {
    for (const auto& s : p.stages)
        if (s.kind == StageKind::ConstPart || s.kind == StageKind::ConstPartAdjoint) return true;
    return false;
}

bool needs_direction(const Pipeline& p, const WaveCoefficients& c) {
    bool spatialA = false;
    for (int j = 1; j < static_cast<int>(c.A.size()); ++j) spatialA = spatialA || c.A[j] != 0.0;
    return spatialA && uses_const(p);
}

// Evaluate f(i) once per distinct |xi|^2 and broadcast; deterministic regardless of threads.
template <class F>
std::vector<cplx> per_radius(const GridSpec& g, F&& f) {
    const std::size_t M = g.spatial_size();
    std::map<long, std::size_t> first;
    std::vector<long> keys(M);
    for (std::size_t i = 0; i < M; ++i) {
        keys[i] = frequency_key(g, i);
        first.emplace(keys[i], i);
    }
    std::vector<std::pair<long, std::size_t>> reps(first.begin(), first.end());
    std::vector<cplx> vals(reps.size());
    parallel_for(reps.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) vals[q] = f(reps[q].second);
    });
    std::unordered_map<long, std::size_t> slot;
    for (std::size_t q = 0; q < reps.size(); ++q) slot[reps[q].first] = q;
    std::vector<cplx> out(M);
    for (std::size_t i = 0; i < M; ++i) out[i] = vals[slot[keys[i]]];
    return out;
}

template <class F>
std::vector<cplx> per_mode(const GridSpec& g, F&& f) {
    std::vector<cplx> out(g.spatial_size());
    parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = f(i);
    });
    return out;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

bool in_band(const GridSpec& g, double r) { return r >= g.nyquist() / 16.0 && r <= g.nyquist() / 4.0; }

void validate_pipeline_coeffs(const Pipeline& p, const WaveCoefficients& c) {
    if (!c.constant()) throw ContractError("measure_multiplier: variable coefficients break translation invariance");
    if (uses_const(p))
        for (double a : c.A)
            if (!std::isfinite(a)) throw ContractError("measure_multiplier: non-finite coefficient");
}

}  // namespace

Pipeline Pipeline::parse(const std::string& label) {
    Pipeline p;
    p.label = label;
    std::vector<std::string> tokens;
    std::string tok;
    std::istringstream is(label);
    while (std::getline(is, tok, '.'))
        if (!tok.empty()) tokens.push_back(tok);
    if (tokens.empty()) throw ContractError("pipeline: empty chain");
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        const std::string& t = *it;
        Stage s;
        if (t == "id") s.kind = StageKind::Identity;
        else if (t == "E+" || t == "E-") {
            s.kind = StageKind::HalfWave;
            s.sign = t[1] == '+' ? 1 : -1;
        } else if (t.size() == 3 && t[0] == 'E' && (t[1] == '1' || t[1] == '2') && (t[2] == '+' || t[2] == '-')) {
            s.kind = StageKind::ConstPart;
            s.part = t[1] - '0';
            s.sign = t[2] == '+' ? 1 : -1;
        } else if (t == "chi") s.kind = StageKind::Cutoff;
        else if (t == "1") s.kind = StageKind::DataMask;
        else if (t == "N") s.kind = StageKind::Normal;
        else if (t == "E+*" || t == "E-*") {
            s.kind = StageKind::HalfWaveAdjoint;
            s.sign = t[1] == '+' ? 1 : -1;
        } else if (t.size() == 4 && t[0] == 'E' && (t[1] == '1' || t[1] == '2') && (t[2] == '+' || t[2] == '-') &&
                   t[3] == '*') {
            s.kind = StageKind::ConstPartAdjoint;
            s.part = t[1] - '0';
            s.sign = t[2] == '+' ? 1 : -1;
        } else if (t == "rho") s.kind = StageKind::Slice;
        else if (t == "drho") s.kind = StageKind::SliceRate;
        else throw ContractError("pipeline: unknown factor '" + t + "'");
        p.stages.push_back(s);
    }
    return p;
}

double band_median_abs(const GridSpec& g, const std::vector<cplx>& m) {
    std::vector<double> a;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (in_band(g, std::sqrt(frequency_norm2(g, i)))) a.push_back(std::abs(m[i]));
    return median(std::move(a));
}

MeasuredMultiplier measure_multiplier(const Pipeline& p, const GridSpec& spec, const WaveCoefficients& c) {
    spec.validate();
    validate_pipeline_coeffs(p, c);
    TimeAxis ax(spec);
    for (const auto& s : p.stages)
        if (s.kind == StageKind::Slice || s.kind == StageKind::SliceRate) ax.sliceIndex = snap_slice(spec, p.sliceTime);
    const bool constChain = uses_const(p);
    auto f = [&](std::size_t i) {
        double r = std::sqrt(frequency_norm2(spec, i));
        if (constChain) {
            auto mode = ConstCauchySolver::mode(frequency(spec, i), c);
            return eval_mode(p, ax, r, &mode);
        }
        return eval_mode(p, ax, r, nullptr);
    };
    MeasuredMultiplier out;
    out.label = p.label;
    out.spec = spec;
    out.m = needs_direction(p, c) ? per_mode(spec, f) : per_radius(spec, f);
    out.mMin = 1e-3 * band_median_abs(spec, out.m);
    out.invertible.resize(out.m.size());
    for (std::size_t i = 0; i < out.m.size(); ++i) out.invertible[i] = std::abs(out.m[i]) >= out.mMin;
    return out;
}

SpatialField apply_pipeline(const Pipeline& p, const SpatialField& h, const WaveCoefficients& c) {
    const GridSpec& g = h.spec;
    validate_pipeline_coeffs(p, c);
    TimeAxis ax(g);
    bool timeValued = false;
    SpatialField s = h;
    ScalarField v;
    for (const Stage& st : p.stages) {
        switch (st.kind) {
        case StageKind::Identity:
            break;
        case StageKind::HalfWave:
            if (timeValued) throw ContractError("pipeline: propagator applied to a spacetime field");
            v = half_wave(s, st.sign, g);
            timeValued = true;
            break;
        case StageKind::ConstPart: {
            if (timeValued) throw ContractError("pipeline: propagator applied to a spacetime field");
            CauchyData d(g);
            (st.part == 1 ? d.f1 : d.f2) = s;
            ConstCauchySolver solver(d, c);
            auto sol = solver.sample(g);
            v = st.part == 1 ? (st.sign > 0 ? sol.u1p : sol.u1m) : (st.sign > 0 ? sol.u2p : sol.u2m);
            timeValued = true;
            break;
        }
        case StageKind::Cutoff:
        case StageKind::DataMask: {
            if (!timeValued) throw ContractError("pipeline: time cutoff applied to a spatial field");
            const auto& cut = st.kind == StageKind::Cutoff ? ax.chi : ax.mask;
            for (int k = 0; k < g.Nt; ++k) {
                cplx* sl = v.slice(k);
                for (std::size_t i = 0; i < v.slice_size(); ++i) sl[i] *= cut[k];
            }
            break;
        }
        case StageKind::Normal:
            if (!timeValued) throw ContractError("pipeline: N applied to a spatial field");
            v = apply_normal_multiplier(v);
            break;
        case StageKind::HalfWaveAdjoint:
            if (!timeValued) throw ContractError("pipeline: E* applied to a spatial field");
            s = half_wave_adjoint(v, st.sign, std::vector<double>(g.Nt, 1.0));
            timeValued = false;
            break;
        case StageKind::ConstPartAdjoint: {
            if (!timeValued) throw ContractError("pipeline: E* applied to a spatial field");
            ScalarField V = v;
            fft_slices(V);
            Spectrum out(g);
            for (std::size_t i = 0; i < out.size(); ++i) {
                auto mode = ConstCauchySolver::mode(frequency(g, i), c);
                cplx acc = 0;
                for (int k = 0; k < g.Nt; ++k) {
                    cplx parts[4];
                    const_mode_parts(mode, st.part == 1 ? 1.0 : 0.0, st.part == 2 ? 1.0 : 0.0, ax.t[k], 0, parts);
                    acc += ax.w[k] * std::conj(parts[part_slot(st.part, st.sign)]) * V.slice(k)[i];
                }
                out[i] = acc;
            }
            s = ifft_spatial(out);
            timeValued = false;
            break;
        }
        case StageKind::Slice:
        case StageKind::SliceRate: {
            if (!timeValued) throw ContractError("pipeline: restriction applied to a spatial field");
            int k = snap_slice(g, p.sliceTime);
            if (st.kind == StageKind::Slice) {
                s = v.slice_field(k);
            } else {
                SpatialField a = v.slice_field(k + 1), b = v.slice_field(k - 1);
                for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = (a.v[i] - b.v[i]) / (2.0 * g.dt());
            }
            timeValued = false;
            break;
        }
        }
    }
    if (timeValued) throw ContractError("pipeline: chain must end with E*, rho or drho");
    return s;
}

namespace {

// Accumulate sum_k weight(family, k, |xi|) * bhat(t_k, xi) for several weight families,
// streaming the backprojection in blocks of time slices.

std::vector<Spectrum> project_backprojection(const Sinogram& S, const GridSpec& g,
                                             const std::vector<int>& ks, int families,
                                             const std::function<cplx(int family, int k, double r)>& weight) {
    std::vector<Spectrum> acc(families, Spectrum(g));
    const std::size_t M = g.spatial_size();
    std::vector<double> r(M);
    for (std::size_t i = 0; i < M; ++i) r[i] = std::sqrt(frequency_norm2(g, i));
    const std::size_t block = 8;
    for (std::size_t b0 = 0; b0 < ks.size(); b0 += block) {
        std::vector<int> sub(ks.begin() + b0, ks.begin() + std::min(ks.size(), b0 + block));
        auto slices = backproject_at(S, g, sub);
        std::vector<Spectrum> B;
        B.reserve(slices.size());
        for (auto& s : slices) B.push_back(fft_spatial(s));
        for (int fam = 0; fam < families; ++fam) {
            Spectrum& A = acc[fam];
            parallel_for(M, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i)
                    for (std::size_t q = 0; q < sub.size(); ++q) A[i] += weight(fam, sub[q], r[i]) * B[q][i];
            });
        }
    }
    return acc;
}

double cond2(cplx a, cplx b, cplx c, cplx d) {
    double fro = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    double det = std::abs(a * d - b * c);
    if (det == 0.0) return INFINITY;
    double disc = std::sqrt(std::max(0.0, fro * fro - 4.0 * det * det));
    double s1 = std::sqrt(0.5 * (fro + disc)), s2 = det / s1;
    return s1 / s2;
}

double band_limit(const GridSpec& g, const ReconOptions& opt) {
    return opt.bandLimit > 0 ? opt.bandLimit : 0.5 * g.nyquist();
}

void record_truth(Report& rep, const CauchyData& rec, const CauchyData* truth) {
    if (!truth) return;
    double n1 = l2_norm(truth->f1), n2 = l2_norm(truth->f2);
    rep.set("truth.f1.l2", n1);
    rep.set("truth.f2.l2", n2);
    if (n1 > 0) rep.set("error.f1.rel", relative_error(rec.f1, truth->f1));
    if (n2 > 0) rep.set("error.f2.rel", relative_error(rec.f2, truth->f2));
    if (n1 == 0.0 && n2 > 0) {
        // f1 amplitude carried by the f2 data: |f2^| / |xi|
        Spectrum F2 = fft_spatial(truth->f2);
        Spectrum R1 = fft_spatial(rec.f1);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < F2.size(); ++i) {
            double r2 = frequency_norm2(truth->f2.spec, i);
            if (r2 == 0.0) continue;
            num += std::norm(R1[i]);
            den += std::norm(F2[i]) / r2;
        }
        rep.set("crosstalk.f1_over_f2", den > 0 ? std::sqrt(num / den) : 0.0);
    }
}

// Solve H h = g per frequency (H in the (h1, h2) basis) with a determinant threshold, then
// map back to (f1, f2) = (h1 + h2, i|xi|(h1 - h2)).
CauchyReconstruction solve_branches(const GridSpec& g, const std::vector<cplx> H[4], const Spectrum& gp,
                                    const Spectrum& gm, const ReconOptions& opt, bool diagonal,
                                    const std::string& pipelineName) {
    const std::size_t M = g.spatial_size();
    const double rmax = band_limit(g, opt);
    std::vector<cplx> det(M);
    for (std::size_t i = 0; i < M; ++i) det[i] = H[0][i] * H[3][i] - H[1][i] * H[2][i];
    double detMed = band_median_abs(g, det);
    double m11Med = band_median_abs(g, H[0]), m22Med = band_median_abs(g, H[3]);
    double detMin = opt.mMinFactor * detMed;
    Spectrum F1(g), F2(g);
    CauchyReconstruction out;
    out.admitted.assign(M, 0);
    std::size_t bandTotal = 0, bandAdmitted = 0, admitted = 0;
    std::vector<double> conds;
    for (std::size_t i = 0; i < M; ++i) {
        double r = std::sqrt(frequency_norm2(g, i));
        bool ok;
        cplx h1 = 0, h2 = 0;
        if (diagonal) {
            ok = r > 0 && r <= rmax && std::abs(H[0][i]) >= opt.mMinFactor * m11Med &&
                 std::abs(H[3][i]) >= opt.mMinFactor * m22Med;
            if (ok) {
                h1 = gp[i] / H[0][i];
                h2 = gm[i] / H[3][i];
            }
        } else {
            ok = r > 0 && r <= rmax && std::abs(det[i]) >= detMin && detMin > 0;
            if (ok) {
                h1 = (H[3][i] * gp[i] - H[1][i] * gm[i]) / det[i];
                h2 = (-H[2][i] * gp[i] + H[0][i] * gm[i]) / det[i];
                conds.push_back(cond2(H[0][i], H[1][i], H[2][i], H[3][i]));
            }
        }
        if (in_band(g, r)) {
            ++bandTotal;
            bandAdmitted += ok;
        }
        if (ok) {
            ++admitted;
            out.admitted[i] = 1;
            F1[i] = h1 + h2;
            F2[i] = I * r * (h1 - h2);
        }
    }
    out.data = CauchyData(g);
    out.data.f1 = ifft_spatial(F1);
    out.data.f2 = ifft_spatial(F2);
    Report& rep = out.report;
    rep.set("pipeline", pipelineName);
    rep.set("solve", diagonal ? "diagonal" : "2x2");
    rep.set("grid.n", g.n);
    rep.set("grid.Nx", g.Nx);
    rep.set("grid.Nt", g.Nt);
    rep.set("grid.Lx", g.Lx);
    rep.set("grid.T", g.T);
    rep.set("grid.t1", g.t1_grid());
    rep.set("band.limit", rmax);
    rep.set("band.det_median", detMed);
    rep.set("band.det_min", detMin);
    double frac = bandTotal ? static_cast<double>(bandAdmitted) / bandTotal : 0.0;
    rep.set("band.admitted_fraction", frac);
    rep.set("band.unthresholded_fraction", frac);
    rep.set("band.warn_ill_posed", frac < 0.8);
    rep.set("modes.admitted", admitted);
    rep.set("modes.total", M);
    if (!conds.empty()) {
        rep.set("cond.median", median(conds));
        rep.set("cond.max", *std::max_element(conds.begin(), conds.end()));
    }
    return out;
}

std::vector<int> chi_support(const GridSpec& g) {
    auto chi = TimeCutoff::for_grid(g).samples;
    std::vector<int> ks;
    for (int k = 0; k < g.Nt; ++k)
        if (chi[k] > 0.0) ks.push_back(k);
    return ks;
}

void check_inputs(const Sinogram& S, const GridSpec& spec) {
    spec.validate();
    S.chart.validate();
    if (S.chart.ySpec.n != spec.n || S.chart.ySpec.Nx != spec.Nx || S.chart.ySpec.Lx != spec.Lx)
        throw ContractError("reconstruct: sinogram chart does not match the grid");
    check_finite(S.v, "reconstruct");
}

// g+- = sum_k w_k chi_k e^{-+i t_k r} bhat(t_k)
std::pair<Spectrum, Spectrum> adjoint_projections(const Sinogram& S, const GridSpec& spec) {
    TimeAxis ax(spec);
    auto ks = chi_support(spec);
    auto acc = project_backprojection(S, spec, ks, 2, [&](int fam, int k, double r) {
        double sg = fam == 0 ? 1.0 : -1.0;
        return ax.w[k] * ax.chi[k] * std::exp(I * (-sg * ax.t[k] * r));
    });
    return {acc[0], acc[1]};
}

}  // namespace

CauchyReconstruction reconstruct_cauchy_model(const Sinogram& S, const GridSpec& spec, const ReconOptions& opt,
                                              const CauchyData* truth) {
    check_inputs(S, spec);
    auto [gp, gm] = adjoint_projections(S, spec);
    // columns: source branch b; rows: projection a
    std::vector<cplx> H[4];
    const char* labels[4] = {"E+*.chi.N.1.E+", "E+*.chi.N.1.E-", "E-*.chi.N.1.E+", "E-*.chi.N.1.E-"};
    for (int q = 0; q < 4; ++q) H[q] = measure_multiplier(Pipeline::parse(labels[q]), spec).m;
    auto out = solve_branches(spec, H, gp, gm, opt, opt.diagonal, "model");
    record_truth(out.report, out.data, truth);
    return out;
}

CauchyReconstruction reconstruct_cauchy_const(const Sinogram& S, const GridSpec& spec, const WaveCoefficients& c,
                                              const ReconOptions& opt, const CauchyData* truth) {
    check_inputs(S, spec);
    if (!c.constant()) throw ContractError("reconstruct_cauchy_const: coefficients must be constant");
    for (double a : c.A)
        if (!std::isfinite(a)) throw ContractError("reconstruct_cauchy_const: non-finite coefficient");
    const std::size_t M = spec.spatial_size();
    // g_a = sum_k w_k conj(E1a factor(t_k)) chi_k bhat(t_k)
    std::vector<ConstCauchySolver::Mode> modes(M);
    for (std::size_t i = 0; i < M; ++i) modes[i] = ConstCauchySolver::mode(frequency(spec, i), c);
    TimeAxis ax(spec);
    auto ks = chi_support(spec);
    Spectrum gp(spec), gm(spec);
    {
        const std::size_t block = 8;
        for (std::size_t b0 = 0; b0 < ks.size(); b0 += block) {
            std::vector<int> sub(ks.begin() + b0, ks.begin() + std::min(ks.size(), b0 + block));
            auto slices = backproject_at(S, spec, sub);
            std::vector<Spectrum> B;
            for (auto& sl : slices) B.push_back(fft_spatial(sl));
            parallel_for(M, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i)
                    for (std::size_t q = 0; q < sub.size(); ++q) {
                        int k = sub[q];
                        cplx parts[4];
                        const_mode_parts(modes[i], 1.0, 0.0, ax.t[k], 0, parts);
                        double wk = ax.w[k] * ax.chi[k];
                        gp[i] += wk * std::conj(parts[0]) * B[q][i];
                        gm[i] += wk * std::conj(parts[1]) * B[q][i];
                    }
            });
        }
    }
    // m[a][k][s] = E1a* chi N 1 Eks
    std::vector<cplx> m[2][2][2];
    for (int a = 0; a < 2; ++a)
        for (int k = 0; k < 2; ++k)
            for (int sgn = 0; sgn < 2; ++sgn) {
                std::string label = std::string(a == 0 ? "E1+*" : "E1-*") + ".chi.N.1.E" + std::to_string(k + 1) +
                                    (sgn == 0 ? "+" : "-");
                m[a][k][sgn] = measure_multiplier(Pipeline::parse(label), spec, c).m;
            }
    // M[a][k] = sum_s m[a][k][s]; H = M J with J = [[1, 1], [i r, -i r]]
    std::vector<cplx> H[4];
    for (auto& h : H) h.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
        double r = std::sqrt(frequency_norm2(spec, i));
        for (int a = 0; a < 2; ++a) {
            cplx M1 = m[a][0][0][i] + m[a][0][1][i], M2 = m[a][1][0][i] + m[a][1][1][i];
            H[2 * a + 0][i] = M1 + I * r * M2;
            H[2 * a + 1][i] = M1 - I * r * M2;
        }
    }
    auto out = solve_branches(spec, H, gp, gm, opt, false, "const");
    out.report.set("coeff.A0", c.a(0));
    for (int j = 1; j <= spec.n; ++j) out.report.set("coeff.A" + std::to_string(j), c.a(j));
    out.report.set("coeff.B.re", c.B.real());
    out.report.set("coeff.B.im", c.B.imag());
    // same-branch chains: Re(i|xi| m12 / m11) carries the sign of the E2 symbol on each branch
    std::vector<double> sp, sm;
    for (std::size_t i = 0; i < M; ++i) {
        double r = std::sqrt(frequency_norm2(spec, i));
        if (!in_band(spec, r)) continue;
        sp.push_back((I * r * m[0][1][0][i] / m[0][0][0][i]).real());
        sm.push_back((I * r * m[1][1][1][i] / m[1][0][1][i]).real());
    }
    out.report.set("sign.plus", median(sp));
    out.report.set("sign.minus", median(sm));
    out.report.set("sign.plus_min", sp.empty() ? 0.0 : *std::min_element(sp.begin(), sp.end()));
    out.report.set("sign.minus_max", sm.empty() ? 0.0 : *std::max_element(sm.begin(), sm.end()));
    record_truth(out.report, out.data, truth);
    return out;
}

CauchyReconstruction reconstruct_cauchy_restriction(const Sinogram& S, const GridSpec& spec, double Ttilde,
                                                    const ReconOptions& opt, const CauchyData* truth) {
    check_inputs(S, spec);
    const int kT = snap_slice(spec, Ttilde);
    const double Tg = spec.t(kT), dt = spec.dt();
    auto rows = project_backprojection(S, spec, {kT - 1, kT, kT + 1}, 2, [&](int fam, int k, double) -> cplx {
        if (fam == 0) return k == kT ? 1.0 : 0.0;
        if (k == kT) return 0.0;
        return (k == kT + 1 ? 1.0 : -1.0) / (2.0 * dt);
    });
    std::vector<cplx> R[2][2];  // [row: slice, rate][branch]
    for (int b = 0; b < 2; ++b) {
        std::string src = b == 0 ? "E+" : "E-";
        Pipeline p0 = Pipeline::parse("rho.N.1." + src), p1 = Pipeline::parse("drho.N.1." + src);
        p0.sliceTime = p1.sliceTime = Tg;
        R[0][b] = measure_multiplier(p0, spec).m;
        R[1][b] = measure_multiplier(p1, spec).m;
    }
    // beta+- = (1/2)(row0 +- row1/(i r)) e^{-+i T r}
    const std::size_t M = spec.spatial_size();
    std::vector<cplx> H[4];
    for (auto& h : H) h.resize(M);
    Spectrum gp(spec), gm(spec);
    for (std::size_t i = 0; i < M; ++i) {
        double r = std::sqrt(frequency_norm2(spec, i));
        if (r == 0.0) continue;
        cplx ep = 0.5 * std::exp(I * (-Tg * r)), em = 0.5 * std::exp(I * (Tg * r));
        cplx ir = I * r;
        gp[i] = ep * (rows[0][i] + rows[1][i] / ir);
        gm[i] = em * (rows[0][i] - rows[1][i] / ir);
        for (int b = 0; b < 2; ++b) {
            H[0 + b][i] = ep * (R[0][b][i] + R[1][b][i] / ir);
            H[2 + b][i] = em * (R[0][b][i] - R[1][b][i] / ir);
        }
    }
    auto out = solve_branches(spec, H, gp, gm, opt, opt.diagonal, "restriction");
    out.report.set("slice.time", Tg);
    record_truth(out.report, out.data, truth);
    return out;
}

namespace {

// Temporal spectrum energy split by the conic sector; f given on its own grid.
template <class F>
void for_each_spacetime_mode(const ScalarField& f, int padFactor, F&& visit) {
    const GridSpec& g = f.spec;
    ScalarField Fs = f;
    fft_slices(Fs);
    const std::size_t P = static_cast<std::size_t>(padFactor) * g.Nt;
    const double dt = g.dt();
    std::vector<cplx> a(P);
    for (std::size_t i = 0; i < g.spatial_size(); ++i) {
        double r = std::sqrt(frequency_norm2(g, i));
        std::fill(a.begin(), a.end(), 0.0);
        for (int k = 0; k < g.Nt; ++k) a[k] = Fs.slice(k)[i];
        dft1d(a, true);
        for (std::size_t m = 0; m < P; ++m) {
            long ms = m < P / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(P);
            visit(2.0 * kPi * ms / (P * dt), r, a[m]);
        }
    }
}

}  // namespace

double outside_spacelike_fraction(const ScalarField& f, double delta, int padFactor) {
    double in = 0, out = 0;
    SpacelikeCutoff cut{delta};
    for_each_spacetime_mode(f, padFactor, [&](double tau, double r, cplx v) {
        double e = std::norm(v);
        if (tau == 0.0 && r == 0.0) {
            out += e;
            return;
        }
        (cut(tau, r) > 0.0 ? in : out) += e;
    });
    return in + out > 0 ? out / (in + out) : 0.0;
}

SourceReconstruction reconstruct_source(const Sinogram& S, const GridSpec& spec, const SourceOptions& opt,
                                        const ScalarField* truth) {
    check_inputs(S, spec);
    if (opt.padFactor < 1) throw ContractError("reconstruct_source: padding factor must be >= 1");
    if (!(opt.delta > 0.0 && opt.delta < 1.0)) throw ContractError("reconstruct_source: delta must lie in (0, 1)");
    ScalarField b = backproject(S, spec);
    fft_slices(b);
    const std::size_t P = static_cast<std::size_t>(opt.padFactor) * spec.Nt;
    const double dt = spec.dt();
    const int n = spec.n;
    SpacelikeCutoff cut{opt.delta};
    ScalarField fr(spec);
    std::vector<double> outsideE(spec.spatial_size(), 0.0), totalE(spec.spatial_size(), 0.0);
    parallel_for(spec.spatial_size(), [&](std::size_t lo, std::size_t hi) {
        std::vector<cplx> a(P);
        for (std::size_t i = lo; i < hi; ++i) {
            double r = std::sqrt(frequency_norm2(spec, i));
            std::fill(a.begin(), a.end(), 0.0);
            for (int k = 0; k < spec.Nt; ++k) a[k] = b.slice(k)[i];
            dft1d(a, true);
            for (std::size_t m = 0; m < P; ++m) {
                long ms = m < P / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(P);
                double tau = 2.0 * kPi * ms / (P * dt);
                double c = (tau == 0.0 && r == 0.0) ? 0.0 : cut(tau, r);
                double e = std::norm(a[m]);
                totalE[i] += e;
                if (c == 0.0) outsideE[i] += e;
                if (c > 0.0) a[m] *= (tau * tau - r * r) / k_symbol(tau, r, n) * c;
                else a[m] = 0.0;
            }
            dft1d(a, false);
            for (int k = 0; k < spec.Nt; ++k) fr.slice(k)[i] = a[k] / static_cast<double>(P);
        }
    });
    ifft_slices(fr);
    SourceReconstruction out;
    out.f = std::move(fr);
    out.f.supportRadius = spec.R0;
    Report& rep = out.report;
    rep.set("pipeline", "source");
    rep.set("grid.n", spec.n);
    rep.set("grid.Nx", spec.Nx);
    rep.set("grid.Nt", spec.Nt);
    rep.set("grid.Lx", spec.Lx);
    rep.set("grid.T", spec.T);
    rep.set("grid.t1", spec.t1_grid());
    rep.set("delta", opt.delta);
    double oe = 0, te = 0;
    for (std::size_t i = 0; i < outsideE.size(); ++i) {
        oe += outsideE[i];
        te += totalE[i];
    }
    double frac = te > 0 ? oe / te : 0.0;
    rep.set("data.outside_sector_fraction", frac);
    rep.set("data.warn_outside_sector", frac > 0.1);
    if (truth) {
        rep.set("truth.outside_sector_fraction", outside_spacelike_fraction(*truth, opt.delta, opt.padFactor));
        double tn = l2_norm(*truth);
        rep.set("truth.l2", tn);
        rep.set("recon.l2", l2_norm(out.f));
        if (tn > 0) rep.set("error.rel", relative_error(out.f, *truth));
        // dyadic shells in |xi|
        ScalarField E = out.f, Tt = *truth;
        for (std::size_t j = 0; j < E.v.size(); ++j) E.v[j] -= Tt.v[j];
        fft_slices(E);
        fft_slices(Tt);
        std::map<int, std::pair<double, double>> shells;
        for (int k = 0; k < spec.Nt; ++k)
            for (std::size_t i = 0; i < spec.spatial_size(); ++i) {
                double r = std::sqrt(frequency_norm2(spec, i));
                int sh = r < 1.0 ? 0 : 1 + static_cast<int>(std::floor(std::log2(r)));
                shells[sh].first += std::norm(E.slice(k)[i]);
                shells[sh].second += std::norm(Tt.slice(k)[i]);
            }
        for (const auto& [sh, v] : shells) {
            if (v.second <= 0) continue;
            std::string key = "shell." + std::to_string(sh);
            rep.set(key + ".lo", sh == 0 ? 0.0 : std::ldexp(1.0, sh - 1));
            rep.set(key + ".rel_error", std::sqrt(v.first / v.second));
        }
    }
    return out;
}

SpatialField gaussian_carrier(const GridSpec& g, double sigma, double kappa, const std::array<double, 3>& center,
                              double phase) {
    SpatialField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto x = position(g, i);
        double r2 = 0;
        for (int d = 0; d < g.n; ++d) r2 += (x[d] - center[d]) * (x[d] - center[d]);
        f[i] = std::exp(-r2 / (2.0 * sigma * sigma)) * std::cos(kappa * (x[0] - center[0]) - phase);
    }
    return f;
}

double cross_term_probe(double kappa, const GridSpec& spec, double window) {
    spec.validate();
    SpatialField h(spec);
    for (std::size_t i = 0; i < h.size(); ++i) {
        auto x = position(spec, i);
        double r2 = 0;
        for (int d = 0; d < spec.n; ++d) r2 += x[d] * x[d];
        h[i] = std::exp(-r2 / (2.0 * window * window)) * std::exp(I * (kappa * x[0]));
    }
    Spectrum H = fft_spatial(h);
    auto mpp = measure_multiplier(Pipeline::parse("E+*.chi.N.1.E+"), spec).m;
    auto mmp = measure_multiplier(Pipeline::parse("E-*.chi.N.1.E+"), spec).m;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < H.size(); ++i) {
        num += std::norm(mmp[i] * H[i]);
        den += std::norm(mpp[i] * H[i]);
    }
    return den > 0 ? std::sqrt(num / den) : 0.0;
}

Report stability_ratio(const GridSpec& spec, const StabilityOptions& opt) {
    spec.validate();
    if (opt.samplesPerBand < 1) throw ContractError("stability_ratio: need samples");
    const int n = spec.n;
    const double delta = n == 2 ? -0.25 : 0.0;
    const double sigmaC = n / 2.0 + delta + opt.s;
    RayChart chart;
    if (n == 2) chart = make_chart_uniform(spec, opt.nTheta > 0 ? opt.nTheta : 128);
    else {
        int p = opt.nTheta > 0 ? opt.nTheta : 12;
        chart = make_chart_gl(spec, p, 2 * p);
    }
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Report rep;
    rep.set("n", n);
    rep.set("s", opt.s);
    rep.set("delta", delta);
    rep.set("chart.directions", chart.size());
    const double envelope = 0.2 * spec.R0;
    double gmax = 0, gmin = INFINITY;
    std::vector<double> bandMax;
    for (std::size_t bi = 0; bi < opt.bands.size(); ++bi) {
        double kappa = opt.bands[bi];
        if (kappa + 4.0 / envelope > spec.nyquist()) throw ContractError("stability_ratio: band exceeds the grid");
        double bmax = 0, bmin = INFINITY;
        for (int q = 0; q < opt.samplesPerBand; ++q) {
            CauchyData d(spec);
            for (int comp = 0; comp < 2; ++comp) {
                SpatialField& f = comp == 0 ? d.f1 : d.f2;
                double scale = comp == 0 ? 1.0 : kappa;
                for (int j = 0; j < 3; ++j) {
                    std::array<double, 3> dir{}, c{};
                    double nn = 0;
                    for (int dd = 0; dd < n; ++dd) {
                        dir[dd] = U(rng) - 0.5;
                        c[dd] = 0.3 * spec.R0 * (U(rng) - 0.5);
                        nn += dir[dd] * dir[dd];
                    }
                    nn = std::sqrt(std::max(nn, 1e-12));
                    double amp = 0.5 + U(rng), phase = 2.0 * kPi * U(rng);
                    for (std::size_t i = 0; i < f.size(); ++i) {
                        auto x = position(spec, i);
                        double r2 = 0, ph = 0;
                        for (int dd = 0; dd < n; ++dd) {
                            r2 += (x[dd] - c[dd]) * (x[dd] - c[dd]);
                            ph += dir[dd] / nn * x[dd];
                        }
                        f[i] += scale * amp * std::exp(-r2 / (2.0 * envelope * envelope)) *
                                std::cos(kappa * ph + phase);
                    }
                }
            }
            ScalarField u = solve_cauchy_flat(d, spec);
            Sinogram S = ray_transform(u, chart);
            double num = std::sqrt(std::pow(sobolev_norm(d.f1, opt.s + 1.0), 2) + std::pow(sobolev_norm(d.f2, opt.s), 2));
            double den = sobolev_norm_sinogram(S, sigmaC);
            double ratio = num / den;
            std::string key = "band." + std::to_string(bi) + ".sample." + std::to_string(q);
            rep.set(key + ".ratio", ratio);
            bmax = std::max(bmax, ratio);
            bmin = std::min(bmin, ratio);
        }
        std::string key = "band." + std::to_string(bi);
        rep.set(key + ".kappa", kappa);
        rep.set(key + ".max", bmax);
        rep.set(key + ".min", bmin);
        bandMax.push_back(bmax);
        gmax = std::max(gmax, bmax);
        gmin = std::min(gmin, bmin);
    }
    rep.set("ratio.max", gmax);
    rep.set("ratio.min", gmin);
    rep.set("ratio.max_over_min", gmax / gmin);
    double bm = *std::max_element(bandMax.begin(), bandMax.end()), bn = *std::min_element(bandMax.begin(), bandMax.end());
    rep.set("band_max.growth", bm / bn);
    return rep;
}

double relative_error(const SpatialField& a, const SpatialField& truth) {
    if (a.v.size() != truth.v.size()) throw ContractError("relative_error: shape mismatch");
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        num += std::norm(a.v[i] - truth.v[i]);
        den += std::norm(truth.v[i]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

double relative_error(const ScalarField& a, const ScalarField& truth) {
    if (a.v.size() != truth.v.size()) throw ContractError("relative_error: shape mismatch");
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        num += std::norm(a.v[i] - truth.v[i]);
        den += std::norm(truth.v[i]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

void write_multiplier_csv(const std::string& path, const MeasuredMultiplier& m, const std::vector<double>* overlay) {
    const GridSpec& g = m.spec;
    std::map<long, std::size_t> first;
    for (std::size_t i = 0; i < m.m.size(); ++i) first.emplace(frequency_key(g, i), i);
    std::vector<std::string> header = {"xi_norm", "re", "im", "abs", "invertible"};
    if (overlay) header.push_back("overlay");
    std::vector<std::vector<double>> rows;
    for (const auto& [key, i] : first) {
        std::vector<double> row = {std::sqrt(frequency_norm2(g, i)), m.m[i].real(), m.m[i].imag(), std::abs(m.m[i]),
                                   static_cast<double>(m.invertible[i])};
        if (overlay) row.push_back((*overlay)[i]);
        rows.push_back(row);
    }
    write_csv(path, header, rows);
}

}  // namespace minkray
