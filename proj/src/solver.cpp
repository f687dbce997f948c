#include "plaque/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

namespace plaque {

namespace {

constexpr int n_fields = 3;

struct LevelValues {
    std::array<std::vector<double>, n_fields> u; // nodal transformed values
    std::array<double, n_fields> uc{};           // closure-point values
};

LevelValues eval_level(const BasisSpec& spec, const SimState& s) {
    LevelValues lv;
    for (int fi = 0; fi < n_fields; ++fi) {
        const auto& c = s.coeffs(static_cast<Field>(fi));
        lv.u[static_cast<size_t>(fi)] = values_at_nodes(spec, c);
        lv.uc[static_cast<size_t>(fi)] = closure_eval(spec, c).v;
    }
    return lv;
}

struct SourceLevel {
    std::array<std::vector<double>, n_fields> f;
    std::array<double, n_fields> fc{};
};

// Reaction + forcing values of all three fields at one time level.  The
// interface velocity Rdot and the bulk velocity profile are the step's
// extrapolated values for both history levels (uniform linearization).
SourceLevel eval_sources(const Parameters& p, const BasisSpec& spec, const LevelValues& lv,
                         double R, double Rdot_ext, std::span<const double> v_ext,
                         double v_ext_closure, double t, const SolveOptions& opt) {
    SourceLevel out;
    for (int fi = 0; fi < n_fields; ++fi) {
        const Field f = static_cast<Field>(fi);
        auto& arr = out.f[static_cast<size_t>(fi)];
        arr.resize(static_cast<size_t>(spec.n_nodes));
        const auto ctx = make_context(f, p, R, Rdot_ext, opt.variants);
        for (int j = 0; j < spec.n_nodes; ++j) {
            const double rho = spec.rho_nodes[static_cast<size_t>(j)];
            double val = 0.0;
            if (!opt.zero_dynamics)
                val = transformed_reaction(ctx, p, rho, lv.u[0][static_cast<size_t>(j)],
                                           lv.u[1][static_cast<size_t>(j)],
                                           lv.u[2][static_cast<size_t>(j)],
                                           v_ext[static_cast<size_t>(j)], opt.variants);
            val += opt.forcing.at(f, rho, t);
            arr[static_cast<size_t>(j)] = val;
        }
        double valc = 0.0;
        if (!opt.zero_dynamics)
            valc = transformed_reaction(ctx, p, 0.0, lv.uc[0], lv.uc[1], lv.uc[2],
                                        v_ext_closure, opt.variants);
        valc += opt.forcing.at(f, 0.0, t);
        out.fc[static_cast<size_t>(fi)] = valc;
    }
    return out;
}

VelocityProfile level_velocity(const Parameters& p, const BasisSpec& spec, double R,
                               const LevelValues& lv, double t, const SolveOptions& opt) {
    if (opt.zero_dynamics || opt.freeze_velocity) {
        VelocityProfile prof;
        prof.node_values.assign(static_cast<size_t>(spec.n_nodes), 0.0);
        return prof;
    }
    std::vector<double> fv(static_cast<size_t>(spec.n_nodes));
    for (int j = 0; j < spec.n_nodes; ++j) {
        const double rho = spec.rho_nodes[static_cast<size_t>(j)];
        const HatPoint hats = hats_at(p, R, rho, lv.u[0][static_cast<size_t>(j)],
                                      lv.u[1][static_cast<size_t>(j)],
                                      lv.u[2][static_cast<size_t>(j)], opt.variants);
        double val = velocity_rhs(p, hats);
        if (opt.forcing.fv) val += opt.forcing.fv(rho, t);
        fv[static_cast<size_t>(j)] = val;
    }
    return compute_velocity(spec, fv, R);
}

Monitors level_monitors(const Parameters& p, const BasisSpec& spec, double R,
                        const LevelValues& lv, const SchemeVariants& variants) {
    Monitors m;
    for (int fi = 0; fi < n_fields; ++fi) {
        double lo = 0.0, hi = 0.0;
        for (int j = 0; j < spec.n_nodes; ++j) {
            const double rho = spec.rho_nodes[static_cast<size_t>(j)];
            const HatPoint hats = hats_at(p, R, rho, lv.u[0][static_cast<size_t>(j)],
                                          lv.u[1][static_cast<size_t>(j)],
                                          lv.u[2][static_cast<size_t>(j)], variants);
            const double v = fi == 0 ? hats.Lhat : (fi == 1 ? hats.Hhat : hats.Fhat);
            if (j == 0) {
                lo = hi = v;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        m.hat_min[static_cast<size_t>(fi)] = lo;
        m.hat_max[static_cast<size_t>(fi)] = hi;
    }
    if (m.hat_min[2] < 0.0 || m.hat_max[2] > p.M0) m.foam_range_violation = true;
    return m;
}

void check_new_radius(double R_new, long index) {
    if (!(R_new > 0.0 && R_new < 1.0)) {
        std::ostringstream os;
        os << "interface radius left (0,1): R = " << R_new;
        throw DegenerateGeometry(os.str(), index);
    }
}

// One field's implicit system; step_weight is h for the startup step and
// hstar for two-history steps.  rhs arrays were built by the caller.
FieldSystem build_field_system(Field field, const Parameters& p, const BasisSpec& spec,
                               long index, double step_weight, double R_new, double Rdot_ext,
                               std::span<const double> v_ext, double v_ext_closure,
                               std::span<const double> rhs, double rhs_closure,
                               const SolveOptions& opt) {
    const auto ctx = make_context(field, p, R_new, Rdot_ext, opt.variants);
    const double a = diffusion_coeff(ctx, opt.variants);
    std::vector<double> hdrift(static_cast<size_t>(spec.n_nodes));
    for (int j = 0; j < spec.n_nodes; ++j)
        hdrift[static_cast<size_t>(j)] =
            step_weight * drift_G(ctx, spec.rho_nodes[static_cast<size_t>(j)],
                                  v_ext[static_cast<size_t>(j)], opt.variants);
    const double hdrift_c = step_weight * drift_G(ctx, 0.0, v_ext_closure, opt.variants);
    return assemble_collocation_system(spec, field, index, step_weight * a, hdrift, hdrift_c,
                                       rhs, rhs_closure);
}

struct StepRhs {
    std::array<std::vector<double>, n_fields> rhs;
    std::array<double, n_fields> rhs_c{};
};

// g* = hstar (2 f_n - f_{n-1}) + u_n + (u_n - u_{n-1})/3 per field.
StepRhs bdf2_rhs(const BasisSpec& spec, const StepScheme& scheme, const LevelValues& lv_n,
                 const LevelValues& lv_nm1, const SourceLevel& src_n,
                 const SourceLevel& src_nm1) {
    StepRhs out;
    for (int fi = 0; fi < n_fields; ++fi) {
        auto& r = out.rhs[static_cast<size_t>(fi)];
        r.resize(static_cast<size_t>(spec.n_nodes));
        for (int j = 0; j < spec.n_nodes; ++j) {
            const size_t sj = static_cast<size_t>(j);
            const double un = lv_n.u[static_cast<size_t>(fi)][sj];
            const double um = lv_nm1.u[static_cast<size_t>(fi)][sj];
            r[sj] = scheme.hstar * (2.0 * src_n.f[static_cast<size_t>(fi)][sj] -
                                    src_nm1.f[static_cast<size_t>(fi)][sj]) +
                    un + (un - um) / 3.0;
        }
        const double unc = lv_n.uc[static_cast<size_t>(fi)];
        const double umc = lv_nm1.uc[static_cast<size_t>(fi)];
        out.rhs_c[static_cast<size_t>(fi)] =
            scheme.hstar * (2.0 * src_n.fc[static_cast<size_t>(fi)] -
                            src_nm1.fc[static_cast<size_t>(fi)]) +
            unc + (unc - umc) / 3.0;
    }
    return out;
}

std::vector<double> extrapolate_profile(const VelocityProfile& vn, const VelocityProfile& vm) {
    std::vector<double> out(vn.node_values.size());
    for (size_t j = 0; j < out.size(); ++j)
        out[j] = extrapolate(vn.node_values[j], vm.node_values[j]);
    return out;
}

SimState finish_state(const Parameters& p, const BasisSpec& spec, long index, double t,
                      double R_new, std::vector<double> cL, std::vector<double> cH,
                      std::vector<double> cF, const SolveOptions& opt) {
    SimState out;
    out.index = index;
    out.t = t;
    out.R = R_new;
    out.coeff_L = std::move(cL);
    out.coeff_H = std::move(cH);
    out.coeff_F = std::move(cF);
    const LevelValues lv = eval_level(spec, out);
    out.v = level_velocity(p, spec, R_new, lv, t, opt);
    out.monitors = level_monitors(p, spec, R_new, lv, opt.variants);
    return out;
}

// Active only from a catch handler: re-throws the in-flight exception with the
// step index attached when the thrower did not know it.
[[noreturn]] void rethrow_with_index(const NumericalError& e, long index) {
    if (e.time_index() >= 0) throw;
    const std::string what = e.what();
    if (dynamic_cast<const SingularDenominator*>(&e)) throw SingularDenominator(what, index);
    if (dynamic_cast<const DegenerateGeometry*>(&e)) throw DegenerateGeometry(what, index);
    if (dynamic_cast<const NumericallySingular*>(&e)) throw NumericallySingular(what, index);
    throw NumericalError(what, index);
}

} // namespace

const SimState& Trajectory::at_index(long index) const {
    auto it = std::lower_bound(states.begin(), states.end(), index,
                               [](const SimState& s, long i) { return s.index < i; });
    if (it == states.end() || it->index != index)
        throw std::out_of_range("trajectory has no state at step " + std::to_string(index));
    return *it;
}

std::vector<double> interpolate_coeffs(const BasisSpec& spec,
                                       const std::function<double(double)>& values) {
    std::vector<double> nodal(static_cast<size_t>(spec.n_nodes));
    for (int j = 0; j < spec.n_nodes; ++j)
        nodal[static_cast<size_t>(j)] = values(spec.rho_nodes[static_cast<size_t>(j)]);
    const std::vector<double> drift(static_cast<size_t>(spec.n_nodes), 0.0);
    const FieldSystem sys =
        assemble_collocation_system(spec, Field::L, -1, 0.0, drift, 0.0, nodal, values(0.0));
    return solve_dense(sys);
}

SimState initial_state(const Parameters& p, const BasisSpec& spec, const SolveOptions& options) {
    SimState s;
    s.index = 0;
    s.t = 0.0;
    s.R = p.epsilon;

    const size_t n = static_cast<size_t>(spec.order) + 1;
    if (options.initial_transformed) {
        for (int fi = 0; fi < n_fields; ++fi) {
            const Field f = static_cast<Field>(fi);
            auto coeffs = interpolate_coeffs(
                spec, [&](double rho) { return options.initial_transformed(f, rho); });
            (fi == 0 ? s.coeff_L : fi == 1 ? s.coeff_H : s.coeff_F) = std::move(coeffs);
        }
    } else {
        s.coeff_L.assign(n, 0.0);
        s.coeff_H.assign(n, 0.0);
        if (p.F0 == 0.0) {
            s.coeff_F.assign(n, 0.0);
        } else {
            const auto ctx = make_context(Field::F, p, s.R, 0.0, options.variants);
            s.coeff_F = interpolate_coeffs(
                spec, [&](double rho) { return from_hat(ctx, rho, p.F0); });
        }
    }

    const LevelValues lv = eval_level(spec, s);
    s.v = level_velocity(p, spec, s.R, lv, 0.0, options);
    s.monitors = level_monitors(p, spec, s.R, lv, options.variants);
    return s;
}

FieldSystem assemble_startup_system(Field field, const Parameters& p, const BasisSpec& spec,
                                    const StepScheme& scheme, const SimState& s0,
                                    const SolveOptions& options) {
    const double R_new = s0.R + scheme.h * s0.v.v0;
    check_new_radius(R_new, 1);
    const LevelValues lv0 = eval_level(spec, s0);
    const SourceLevel src0 = eval_sources(p, spec, lv0, s0.R, s0.v.v0, s0.v.node_values,
                                          s0.v.v0, s0.t, options);
    const int fi = static_cast<int>(field);
    std::vector<double> rhs(static_cast<size_t>(spec.n_nodes));
    for (int j = 0; j < spec.n_nodes; ++j) {
        const size_t sj = static_cast<size_t>(j);
        rhs[sj] = scheme.h * src0.f[static_cast<size_t>(fi)][sj] +
                  lv0.u[static_cast<size_t>(fi)][sj];
    }
    const double rhs_c =
        scheme.h * src0.fc[static_cast<size_t>(fi)] + lv0.uc[static_cast<size_t>(fi)];
    return build_field_system(field, p, spec, 1, scheme.h, R_new, s0.v.v0, s0.v.node_values,
                              s0.v.v0, rhs, rhs_c, options);
}

SimState startup_step(const Parameters& p, const BasisSpec& spec, const StepScheme& scheme,
                      const SimState& s0, const SolveOptions& options) {
    try {
        const double R_new = s0.R + scheme.h * s0.v.v0;
        check_new_radius(R_new, 1);
        std::array<std::vector<double>, n_fields> solved;
        auto run = [&](Field f) {
            return solve_dense(assemble_startup_system(f, p, spec, scheme, s0, options));
        };
        auto futH = std::async(std::launch::async, run, Field::H);
        auto futF = std::async(std::launch::async, run, Field::F);
        solved[0] = run(Field::L);
        solved[1] = futH.get();
        solved[2] = futF.get();
        return finish_state(p, spec, 1, scheme.h, R_new, std::move(solved[0]),
                            std::move(solved[1]), std::move(solved[2]), options);
    } catch (const NumericalError& e) {
        rethrow_with_index(e, 1);
    }
}

FieldSystem assemble_field_system(Field field, const Parameters& p, const BasisSpec& spec,
                                  const StepScheme& scheme, const SimState& s_n,
                                  const SimState& s_nm1, double R_new,
                                  const SolveOptions& options) {
    const long idx = s_n.index + 1;
    check_new_radius(R_new, idx);
    const std::vector<double> v_ext = extrapolate_profile(s_n.v, s_nm1.v);
    const double v0_ext = extrapolate(s_n.v.v0, s_nm1.v.v0);
    const LevelValues lv_n = eval_level(spec, s_n);
    const LevelValues lv_nm1 = eval_level(spec, s_nm1);
    const SourceLevel src_n =
        eval_sources(p, spec, lv_n, s_n.R, v0_ext, v_ext, v0_ext, s_n.t, options);
    const SourceLevel src_nm1 =
        eval_sources(p, spec, lv_nm1, s_nm1.R, v0_ext, v_ext, v0_ext, s_nm1.t, options);
    const StepRhs rhs = bdf2_rhs(spec, scheme, lv_n, lv_nm1, src_n, src_nm1);
    const int fi = static_cast<int>(field);
    return build_field_system(field, p, spec, idx, scheme.hstar, R_new, v0_ext, v_ext, v0_ext,
                              rhs.rhs[static_cast<size_t>(fi)],
                              rhs.rhs_c[static_cast<size_t>(fi)], options);
}

SimState advance_step(const Parameters& p, const BasisSpec& spec, const StepScheme& scheme,
                      const SimState& s_n, const SimState& s_nm1, const SolveOptions& options) {
    const long idx = s_n.index + 1;
    try {
        const double R_new = update_radius(s_n.R, s_nm1.R, s_n.v.v0, scheme);
        check_new_radius(R_new, idx);

        const std::vector<double> v_ext = extrapolate_profile(s_n.v, s_nm1.v);
        const double v0_ext = extrapolate(s_n.v.v0, s_nm1.v.v0);
        const LevelValues lv_n = eval_level(spec, s_n);
        const LevelValues lv_nm1 = eval_level(spec, s_nm1);
        const SourceLevel src_n =
            eval_sources(p, spec, lv_n, s_n.R, v0_ext, v_ext, v0_ext, s_n.t, options);
        const SourceLevel src_nm1 =
            eval_sources(p, spec, lv_nm1, s_nm1.R, v0_ext, v_ext, v0_ext, s_nm1.t, options);
        const StepRhs rhs = bdf2_rhs(spec, scheme, lv_n, lv_nm1, src_n, src_nm1);

        auto run = [&](Field f) {
            const int fi = static_cast<int>(f);
            return solve_dense(build_field_system(
                f, p, spec, idx, scheme.hstar, R_new, v0_ext, v_ext, v0_ext,
                rhs.rhs[static_cast<size_t>(fi)], rhs.rhs_c[static_cast<size_t>(fi)], options));
        };
        auto futH = std::async(std::launch::async, run, Field::H);
        auto futF = std::async(std::launch::async, run, Field::F);
        std::vector<double> cL = run(Field::L);
        std::vector<double> cH = futH.get();
        std::vector<double> cF = futF.get();
        return finish_state(p, spec, idx, static_cast<double>(idx) * scheme.h, R_new,
                            std::move(cL), std::move(cH), std::move(cF), options);
    } catch (const NumericalError& e) {
        rethrow_with_index(e, idx);
    }
}

Trajectory simulate(const Parameters& p, const BasisSpec& spec, const StepScheme& scheme,
                    const SolveOptions& options) {
    const ValidationReport rep = validate_params(p);
    if (!rep.ok()) {
        std::string msg = "invalid parameters:";
        for (const auto& v : rep.violations) msg += " " + v + ";";
        throw std::invalid_argument(msg);
    }

    Trajectory traj;
    traj.params = p;
    traj.scheme = scheme;
    traj.basis = spec;
    traj.options = options;

    const int stride = std::max(1, options.stride);
    auto keep = [&](const SimState& s) {
        if (s.index % stride == 0 || s.index == scheme.steps) traj.states.push_back(s);
    };

    SimState prev = initial_state(p, spec, options);
    traj.states.push_back(prev);
    try {
        SimState cur = startup_step(p, spec, scheme, prev, options);
        keep(cur);
        for (long n = 1; n < scheme.steps; ++n) {
            SimState next = advance_step(p, spec, scheme, cur, prev, options);
            prev = std::move(cur);
            cur = std::move(next);
            keep(cur);
        }
    } catch (const NumericalError& e) {
        traj.aborted = true;
        traj.abort_index = e.time_index();
        traj.abort_reason = e.what();
    }
    return traj;
}

Trajectory perturbed_simulate(const Parameters& p, const BasisSpec& spec,
                              const StepScheme& scheme, const Perturbations& pert, double eps1,
                              const SolveOptions& options) {
    if (eps1 < 0.0) throw std::invalid_argument("perturbed_simulate: eps1 must be >= 0");

    const auto check = [&](const std::function<double(double, double)>& f, const char* name) {
        if (!f) return;
        for (int i = 0; i <= 40; ++i) {
            for (int k = 0; k <= 40; ++k) {
                const double rho = i / 40.0;
                const double t = p.T * k / 40.0;
                if (std::abs(f(rho, t)) > eps1)
                    throw std::invalid_argument(std::string("perturbation ") + name +
                                                " exceeds eps1 at sampled point");
            }
        }
    };
    check(pert.p1, "p1");
    check(pert.p2, "p2");
    check(pert.p3, "p3");
    check(pert.p4, "p4");

    SolveOptions opt = options;
    if (eps1 > 0.0) {
        auto combine = [](std::function<double(double, double)> base,
                          std::function<double(double, double)> extra) {
            if (!extra) return base;
            if (!base) return extra;
            return std::function<double(double, double)>(
                [base, extra](double rho, double t) { return base(rho, t) + extra(rho, t); });
        };
        opt.forcing.fL = combine(opt.forcing.fL, pert.p1);
        opt.forcing.fH = combine(opt.forcing.fH, pert.p2);
        opt.forcing.fF = combine(opt.forcing.fF, pert.p3);
        opt.forcing.fv = combine(opt.forcing.fv, pert.p4);
    }
    return simulate(p, spec, scheme, opt);
}

} // namespace plaque
