#include "plaque/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>

namespace plaque {

namespace {

std::vector<double> native_points(const BasisSpec& spec, std::span<const double> rhos) {
    std::vector<double> out(rhos.size());
    for (size_t i = 0; i < rhos.size(); ++i) out[i] = spec.native_of_rho(rhos[i]);
    return out;
}

void require_completed(const Trajectory& tr, const char* what) {
    if (tr.aborted)
        throw std::runtime_error(std::string(what) + " aborted at step " +
                                 std::to_string(tr.abort_index) + ": " + tr.abort_reason);
}

std::array<double, 3> pairwise_rates(const ErrorReport& prev, const ErrorReport& cur,
                                     int n_prev, int n_cur) {
    std::array<double, 3> r{};
    for (int f = 0; f < 3; ++f) {
        const size_t fi = static_cast<size_t>(f);
        // Exact runs (zero error) leave the observed order undefined.
        r[fi] = (prev.max_err[fi] > 0.0 && cur.max_err[fi] > 0.0)
                    ? convergence_rate(prev.max_err[fi], cur.max_err[fi], n_prev, n_cur)
                    : std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

constexpr std::array<double, 3> no_rate{std::numeric_limits<double>::quiet_NaN(),
                                        std::numeric_limits<double>::quiet_NaN(),
                                        std::numeric_limits<double>::quiet_NaN()};

} // namespace

ErrorReport error_norms(const Trajectory& traj, const Trajectory& ref,
                        const BasisSpec& eval_basis) {
    const long Mc = traj.scheme.steps;
    const long Mr = ref.scheme.steps;
    if (Mc <= 0 || Mr <= 0 || Mr % Mc != 0)
        throw std::invalid_argument(
            "error_norms: reference step count must be a multiple of the coarse one");
    const double Tc = traj.scheme.h * static_cast<double>(Mc);
    const double Tr = ref.scheme.h * static_cast<double>(Mr);
    if (std::abs(Tc - Tr) > 1e-9 * std::max(1.0, Tc))
        throw std::invalid_argument("error_norms: trajectories span different horizons");
    const long ratio = Mr / Mc;

    // Sampling set for the max-errors; enlarged Gauss rule for the
    // derivative integrals (exact for both squared derivatives).
    const std::vector<double>& rho_nodes = eval_basis.rho_nodes;
    const GaussRule quad = gauss_legendre_nodes(eval_basis.order + 2);
    std::vector<double> rho_quad(quad.x.size());
    for (size_t i = 0; i < quad.x.size(); ++i) rho_quad[i] = map_from_reference(quad.x[i]);

    const std::vector<double> nodes_c = native_points(traj.basis, rho_nodes);
    const std::vector<double> nodes_r = native_points(ref.basis, rho_nodes);
    const std::vector<double> quad_c = native_points(traj.basis, rho_quad);
    const std::vector<double> quad_r = native_points(ref.basis, rho_quad);

    ErrorReport rep;
    rep.M = static_cast<int>(Mc);
    rep.N = traj.basis.order;
    for (const SimState& s : traj.states) {
        const SimState& r = ref.at_index(s.index * ratio);
        const double dR = std::abs(s.R - r.R);
        rep.radius_gap = std::max(rep.radius_gap, dR);
        double xi_k = dR;
        for (int f = 0; f < 3; ++f) {
            const Field fld = static_cast<Field>(f);
            const FieldSamples vc = expansion_eval(traj.basis, s.coeffs(fld), nodes_c);
            const FieldSamples vr = expansion_eval(ref.basis, r.coeffs(fld), nodes_r);
            for (size_t j = 0; j < vc.v.size(); ++j)
                rep.max_err[static_cast<size_t>(f)] =
                    std::max(rep.max_err[static_cast<size_t>(f)], std::abs(vc.v[j] - vr.v[j]));

            const FieldSamples dc = expansion_eval(traj.basis, s.coeffs(fld), quad_c);
            const FieldSamples dr = expansion_eval(ref.basis, r.coeffs(fld), quad_r);
            double acc = 0.0;
            for (size_t j = 0; j < quad_c.size(); ++j) {
                const double diff =
                    traj.basis.chain_d1 * dc.d1[j] - ref.basis.chain_d1 * dr.d1[j];
                acc += 0.5 * quad.w[j] * diff * diff; // weight mapped onto [0,1]
            }
            const double nrm = std::sqrt(acc);
            rep.deriv_l2[static_cast<size_t>(f)] =
                std::max(rep.deriv_l2[static_cast<size_t>(f)], nrm);
            xi_k += nrm;
        }
        rep.xi = std::max(rep.xi, xi_k);
    }
    return rep;
}

double convergence_rate(double e1, double e2, long n1, long n2) {
    if (!(e1 > 0.0) || !(e2 > 0.0))
        throw std::domain_error("convergence_rate: errors must be positive");
    if (n1 == n2) throw std::domain_error("convergence_rate: ladder sizes must differ");
    return std::log(e2 / e1) / std::log(static_cast<double>(n1) / static_cast<double>(n2));
}

std::vector<ConvergenceRow> self_convergence_study(const Parameters& p, const BasisSpec& basis,
                                                   std::span<const int> M_list, int M_ref,
                                                   const SolveOptions& options) {
    if (M_list.empty()) throw std::invalid_argument("self_convergence_study: empty ladder");
    if (!std::is_sorted(M_list.begin(), M_list.end()))
        throw std::invalid_argument("self_convergence_study: ladder must ascend");
    for (int M : M_list)
        if (M <= 0 || M >= M_ref || M_ref % M != 0)
            throw std::invalid_argument(
                "self_convergence_study: reference steps must be a strict multiple of every "
                "ladder entry");

    std::vector<std::future<Trajectory>> runs;
    runs.reserve(M_list.size());
    for (int M : M_list)
        runs.push_back(std::async(std::launch::async, [&p, &basis, &options, M] {
            return simulate(p, basis, make_scheme(p.T, M), options);
        }));
    const Trajectory ref = simulate(p, basis, make_scheme(p.T, M_ref), options);
    require_completed(ref, "self_convergence_study: reference run");

    std::vector<ConvergenceRow> rows;
    rows.reserve(M_list.size());
    for (size_t i = 0; i < M_list.size(); ++i) {
        const Trajectory tr = runs[i].get();
        require_completed(tr, "self_convergence_study: ladder run");
        ConvergenceRow row{M_list[i], error_norms(tr, ref, basis), no_rate};
        if (i > 0) row.rate = pairwise_rates(rows[i - 1].report, row.report, M_list[i - 1], M_list[i]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ConvergenceRow> space_convergence_study(const Parameters& p, BasisKind kind,
                                                    std::span<const int> N_list, int N_ref,
                                                    int M, const SolveOptions& options) {
    if (N_list.empty()) throw std::invalid_argument("space_convergence_study: empty ladder");
    if (!std::is_sorted(N_list.begin(), N_list.end()))
        throw std::invalid_argument("space_convergence_study: ladder must ascend");
    if (N_list.back() >= N_ref)
        throw std::invalid_argument("space_convergence_study: reference order must exceed the ladder");

    const BasisSpec ref_basis = make_basis(kind, N_ref);
    std::vector<std::future<Trajectory>> runs;
    runs.reserve(N_list.size());
    for (int N : N_list)
        runs.push_back(std::async(std::launch::async, [&p, &options, kind, N, M] {
            return simulate(p, make_basis(kind, N), make_scheme(p.T, M), options);
        }));
    const Trajectory ref = simulate(p, ref_basis, make_scheme(p.T, M), options);
    require_completed(ref, "space_convergence_study: reference run");

    std::vector<ConvergenceRow> rows;
    rows.reserve(N_list.size());
    for (size_t i = 0; i < N_list.size(); ++i) {
        const Trajectory tr = runs[i].get();
        require_completed(tr, "space_convergence_study: ladder run");
        ConvergenceRow row{N_list[i], error_norms(tr, ref, ref_basis), no_rate};
        if (i > 0) row.rate = pairwise_rates(rows[i - 1].report, row.report, N_list[i - 1], N_list[i]);
        rows.push_back(std::move(row));
    }
    return rows;
}

ManufacturedCase cosine_case(double ampL, double ampH, double ampF) {
    auto field = [](double amp) {
        constexpr double pi = 3.14159265358979323846;
        ManufacturedField f;
        f.u = [amp](double rho, double t) { return amp * std::cos(pi * rho) * std::exp(-t); };
        f.u_t = [amp](double rho, double t) { return -amp * std::cos(pi * rho) * std::exp(-t); };
        f.u_rho = [amp](double rho, double t) {
            return -amp * pi * std::sin(pi * rho) * std::exp(-t);
        };
        f.u_rhorho = [amp](double rho, double t) {
            return -amp * pi * pi * std::cos(pi * rho) * std::exp(-t);
        };
        return f;
    };
    return ManufacturedCase{field(ampL), field(ampH), field(ampF)};
}

ManufacturedCase additive_linear_case(double amp, double slope) {
    ManufacturedField f;
    f.u = [amp, slope](double, double t) { return amp + slope * t; };
    f.u_t = [slope](double, double) { return slope; };
    f.u_rho = [](double, double) { return 0.0; };
    f.u_rhorho = [](double, double) { return 0.0; };
    return ManufacturedCase{f, f, f};
}

MmsReport mms_residual(const ManufacturedCase& mc, const Parameters& p, const BasisSpec& basis,
                       const StepScheme& scheme, const SchemeVariants& variants,
                       bool zero_dynamics) {
    SolveOptions opt;
    opt.variants = variants;
    opt.freeze_velocity = true; // static geometry: R stays at epsilon
    opt.zero_dynamics = zero_dynamics;
    const double R = p.epsilon;

    auto make_forcing = [&](Field f) {
        const TransformContext ctx = make_context(f, p, R, 0.0, variants);
        const double a = diffusion_coeff(ctx, variants);
        const ManufacturedField& mf = mc.at(f);
        // Copies keep the forcing self-contained; the residual is
        //   s = u_t + G u_rho - a u_rhorho - f^u(manufactured values)
        // so adding s makes the manufactured case an exact solution.
        return [mc, mf, ctx, a, &p, variants, zero_dynamics](double rho, double t) {
            const double G = drift_G(ctx, rho, 0.0, variants);
            double fu = 0.0;
            if (!zero_dynamics)
                fu = transformed_reaction(ctx, p, rho, mc.L.u(rho, t), mc.H.u(rho, t),
                                          mc.F.u(rho, t), 0.0, variants);
            return mf.u_t(rho, t) + G * mf.u_rho(rho, t) - a * mf.u_rhorho(rho, t) - fu;
        };
    };
    opt.forcing.fL = make_forcing(Field::L);
    opt.forcing.fH = make_forcing(Field::H);
    opt.forcing.fF = make_forcing(Field::F);
    opt.initial_transformed = [mc](Field f, double rho) { return mc.at(f).u(rho, 0.0); };

    const Trajectory tr = simulate(p, basis, scheme, opt);
    require_completed(tr, "mms_residual: manufactured run");

    MmsReport rep;
    for (const SimState& s : tr.states) {
        const bool settled = 2 * s.index >= scheme.steps;
        for (int f = 0; f < 3; ++f) {
            const size_t fi = static_cast<size_t>(f);
            const Field fld = static_cast<Field>(f);
            const ManufacturedField& mf = mc.at(fld);
            const std::vector<double> vals = values_at_nodes(basis, s.coeffs(fld));
            double level = 0.0;
            for (size_t j = 0; j < vals.size(); ++j)
                level = std::max(level, std::abs(vals[j] - mf.u(basis.rho_nodes[j], s.t)));
            const double at0 = closure_eval(basis, s.coeffs(fld)).v;
            level = std::max(level, std::abs(at0 - mf.u(0.0, s.t)));
            rep.dev[fi] = std::max(rep.dev[fi], level);
            if (settled) rep.settled[fi] = std::max(rep.settled[fi], level);
        }
    }
    rep.max_dev = std::max({rep.dev[0], rep.dev[1], rep.dev[2]});
    rep.max_settled = std::max({rep.settled[0], rep.settled[1], rep.settled[2]});
    return rep;
}

std::vector<ConditionEntry> condition_sweep(BasisKind kind, std::span<const int> N_list,
                                            const Parameters& p, const StepScheme& scheme) {
    std::vector<ConditionEntry> out;
    out.reserve(N_list.size() * 3);
    for (int N : N_list) {
        const BasisSpec basis = make_basis(kind, N);
        const SimState s0 = initial_state(p, basis, {});
        for (Field f : {Field::L, Field::H, Field::F}) {
            const FieldSystem sys = assemble_startup_system(f, p, basis, scheme, s0, {});
            ConditionEntry e;
            e.kind = kind;
            e.N = N;
            e.field = f;
            try {
                e.cond = condition_number(sys.matrix, sys.n);
                e.singular =
                    e.cond >= 1.0 / (static_cast<double>(sys.n) *
                                     std::numeric_limits<double>::epsilon());
            } catch (const NumericalError&) {
                e.singular = true;
            }
            out.push_back(e);
        }
    }
    return out;
}

} // namespace plaque
