#include "grashof/force.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "grashof/steady.hpp"

namespace grashof {

namespace {

// real basis of the divergence-free space: Leray projections of the
// per-mode, per-component unit coefficients (real and imaginary)
std::vector<SpectralField> solenoidal_basis(const ModeSetPtr& space) {
    std::vector<SpectralField> basis;
    const int d = space->dim();
    for (int i = 0; i < space->size(); ++i)
        for (int c = 0; c < d; ++c)
            for (int reim = 0; reim < 2; ++reim) {
                SpectralField e(space);
                e.at(i, c) = reim ? Complex{0, 1} : Complex{1, 0};
                e = leray_project(e);
                const double n = norm_z(e);
                if (n < 1e-14) continue;
                e *= 1.0 / n;
                basis.push_back(std::move(e));
            }
    return basis;
}

}  // namespace

OperatorNorms operator_norms(const ModeSetPtr& space, std::uint64_t seed, int restarts, int power_iters) {
    OperatorNorms norms;
    double s2 = 0;  // sum of |k|^2 over the full lattice
    for (const auto& k : space->canonical()) {
        norms.m_a = std::max(norms.m_a, static_cast<double>(k.norm2()));
        s2 += 2.0 * k.norm2();
    }
    const double twopi_d = std::pow(2.0 * std::numbers::pi, space->dim());
    norms.m_b_upper = std::sqrt(s2 / twopi_d);

    // alternating maximization of |B(u,v)| over unit H-spheres
    std::mt19937_64 rng(seed);
    for (int r = 0; r < restarts; ++r) {
        SpectralField u = random_field(space, rng);
        SpectralField v = random_field(space, rng);
        if (norm_z(bilinear_b(u, v)) == 0) continue;
        for (int it = 0; it < power_iters; ++it) {
            // u-sweep: top singular pair of w -> B(w, v)
            Eigen::MatrixXd mat = assemble_operator(space, &v, 0.0, 0.0, 1.0);
            Eigen::VectorXd x = flatten(u);
            for (int p = 0; p < 8; ++p) {
                x = (mat.transpose() * (mat * x)).eval();
                const double n = x.norm();
                if (n == 0) break;
                x /= n;
            }
            u = unflatten(space, x);
            // v-sweep: w -> B(u, w)
            mat = assemble_operator(space, &u, 0.0, 1.0, 0.0);
            x = flatten(v);
            for (int p = 0; p < 8; ++p) {
                x = (mat.transpose() * (mat * x)).eval();
                const double n = x.norm();
                if (n == 0) break;
                x /= n;
            }
            v = unflatten(space, x);
        }
        const double nu = norm_h(u), nv = norm_h(v);
        if (nu == 0 || nv == 0) continue;
        const double ratio = norm_h(bilinear_b(u, v)) / (nu * nv);
        norms.m_b_lower = std::max(norms.m_b_lower, ratio);
    }
    return norms;
}

double contraction_radius(const OperatorNorms& norms) { return 1.0 / (4.0 * (norms.m_b_upper + 1.0)); }

SpectralField l_u_solve(const SpectralField& u, const SpectralField& f, double c0) {
    require_same_modes(u, f);
    if (norm_h(u) > c0)
        throw std::invalid_argument("contraction bound requires |u| <= c0 = " + format_double(c0));
    Eigen::MatrixXd mat = assemble_operator(u.modes_ptr(), &u, 1.0, 1.0, 1.0);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(mat);
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    if (diag.minCoeff() <= 1e-14 * diag.maxCoeff()) throw SolverError("contraction operator is singular");
    SpectralField w = unflatten(u.modes_ptr(), lu.solve(flatten(f)));
    SpectralField check = stokes_apply(w) + bilinear_bs(u, w) - f;
    if (norm_z(check) > 1e-12 * (1.0 + norm_z(f))) throw SolverError("contraction solve lost accuracy");
    if (norm_h(w) > 2.0 * norm_h(f) * (1.0 + 1e-10)) throw SolverError("contraction bound |w| <= 2|f| violated");
    return w;
}

std::string to_string(ForceExpansionPlan::Case c) {
    return c == ForceExpansionPlan::Case::bs_coupled ? "bs-coupled" : "bs-decoupled";
}

double ForceExpansionPlan::balance_residual() const {
    double worst = 0;
    for (int m = 0; m <= depth(); ++m) {
        SpectralField lhs = stokes_apply(w[static_cast<std::size_t>(m)]);
        double scale = norm_h(lhs);
        for (int k = 0; k <= m + 1; ++k) {
            SpectralField t = bilinear_b(w[static_cast<std::size_t>(k)], w[static_cast<std::size_t>(m + 1 - k)]);
            scale += norm_h(t);
            lhs += t;
        }
        lhs -= h[static_cast<std::size_t>(m)];
        scale += norm_h(h[static_cast<std::size_t>(m)]) + 1e-300;
        worst = std::max(worst, norm_h(lhs) / scale);
    }
    return worst;
}

ForceExpansionPlan build_force_expansion(const SpectralField& w0, double m, double d0, int depth,
                                         std::uint64_t seed) {
    if (m < 1.0 || d0 <= 1.0) throw std::invalid_argument("need M >= 1 and D0 > 1");
    if (depth < 1) throw std::invalid_argument("depth must be at least 1");
    const double w0scale = norm_h(w0);
    if (norm_h(bilinear_b(w0, w0)) > 1e-10 * std::max(1.0, w0scale * w0scale))
        throw std::invalid_argument("seed field violates B(w0,w0) = 0");

    ForceExpansionPlan plan;
    plan.space = w0.modes_ptr();
    plan.m = m;
    plan.d0 = d0;
    plan.seed = seed;
    plan.norms = operator_norms(plan.space, seed ^ 0x9e3779b97f4a7c15ull);
    plan.c0 = contraction_radius(plan.norms);

    // detect whether Bs(w0, .) vanishes on the whole space
    bool coupled = false;
    for (const auto& e : solenoidal_basis(plan.space))
        if (norm_z(bilinear_bs(w0, e)) > 1e-12 * std::max(1.0, norm_z(w0))) {
            coupled = true;
            break;
        }
    plan.tag = coupled ? ForceExpansionPlan::Case::bs_coupled : ForceExpansionPlan::Case::bs_decoupled;

    std::mt19937_64 rng(seed);
    plan.w.push_back(w0);

    if (coupled) {
        SpectralField w1 = random_field(plan.space, rng);
        w1 *= 0.5 * m * d0 / norm_h(w1);
        plan.w.push_back(w1);
        plan.h.push_back(stokes_apply(w0) + bilinear_bs(w0, w1));
        for (int lev = 1; lev <= depth; ++lev) {
            SpectralField acc = stokes_apply(plan.w[static_cast<std::size_t>(lev)]);
            for (int k = 1; k <= lev; ++k)
                acc += bilinear_b(plan.w[static_cast<std::size_t>(k)], plan.w[static_cast<std::size_t>(lev + 1 - k)]);
            const double acc_norm = norm_h(acc);
            const double budget = m * std::pow(d0, lev + 1);
            SpectralField wnext;
            bool ok = false;
            for (int draw = 0; draw < 100 && !ok; ++draw) {
                SpectralField cand = random_field(plan.space, rng);
                cand *= 1.0 / norm_h(cand);
                const double bs = norm_h(bilinear_bs(w0, cand));
                if (acc_norm <= 1e-13 * budget) {
                    // vanished accumulation: the next level must couple
                    if (bs * budget * 0.5 > 1e-8) {
                        cand *= 0.5 * budget;
                        wnext = cand;
                        ok = true;
                    }
                } else {
                    // keep the coupling strictly below the accumulation
                    double scale = 0.5 * budget;
                    if (bs > 0) scale = std::min(scale, 0.45 * acc_norm / bs);
                    cand *= scale;
                    wnext = cand;
                    ok = true;
                }
            }
            if (!ok) throw SolverError("could not draw a coupled direction within 100 attempts");
            plan.w.push_back(wnext);
            SpectralField hm = acc + bilinear_bs(w0, wnext);
            if (norm_h(hm) <= 1e-8) throw SolverError("force level degenerated to zero");
            plan.h.push_back(hm);
        }
    } else {
        // decoupled: the first level solves the small-force steady problem
        SpectralField h1 = random_field(plan.space, rng);
        h1 *= 0.5 * plan.c0 / norm_h(h1);
        SteadyState s1 = newton_solve(1.0, h1, stokes_invert(h1), NewtonOptions{1e-13, 30});
        if (s1.status != SolveStatus::converged) throw SolverError("small-force solve failed in the decoupled case");
        if (norm_h(s1.v) > norm_h(h1) * (1.0 + 1e-10)) throw SolverError("bound |w1| <= |h1| violated");
        plan.w.push_back(s1.v);
        plan.h.push_back(stokes_apply(w0) + bilinear_bs(w0, s1.v));  // the coupling term vanishes here
        if (depth >= 1) plan.h.push_back(h1);
        for (int lev = 2; lev <= depth + 1; ++lev) {
            SpectralField fm;
            double fnorm = 0;
            for (int draw = 0; draw < 100 && fnorm == 0; ++draw) {
                fm = random_field(plan.space, rng);
                fm *= 0.45 * m * std::pow(d0, lev) / norm_h(fm);
                fnorm = norm_h(fm);
            }
            SpectralField wm = l_u_solve(plan.w[1], fm, plan.c0);
            plan.w.push_back(wm);
            if (lev <= depth) {
                SpectralField hm = fm;
                for (int k = 2; k <= lev - 1; ++k)
                    hm += bilinear_b(plan.w[static_cast<std::size_t>(k)], plan.w[static_cast<std::size_t>(lev + 1 - k)]);
                if (norm_h(hm) <= 1e-8) throw SolverError("force level degenerated to zero");
                plan.h.push_back(hm);
            }
        }
    }

    for (int k = 1; k < static_cast<int>(plan.w.size()); ++k)
        if (norm_h(plan.w[static_cast<std::size_t>(k)]) > m * std::pow(d0, k) * (1.0 + 1e-12))
            throw SolverError("norm budget |w_k| <= M D0^k violated");
    const double bal = plan.balance_residual();
    if (bal > 1e-10) throw SolverError("coefficient balance residual too large: " + format_double(bal));
    return plan;
}

PlanEvaluation evaluate_plan(const ForceExpansionPlan& plan, const std::vector<double>& alphas, int m_trunc) {
    if (m_trunc < 0 || m_trunc > plan.depth())
        throw std::invalid_argument("truncation order outside the constructed range");
    PlanEvaluation ev;
    const int kw = static_cast<int>(plan.w.size());
    for (int i = 0; i < static_cast<int>(alphas.size()); ++i) {
        const double a = alphas[static_cast<std::size_t>(i)];
        if (!(a > plan.d0)) {
            ev.excluded.push_back(i + 1);
            continue;
        }
        const double theta = 1.0 / a;
        if (ev.n0 < 0 && plan.d0 * theta <= 0.5) ev.n0 = i + 1;
        SpectralField v(plan.space), g(plan.space);
        double tp = 1.0;
        for (int k = 0; k <= m_trunc; ++k) {
            SpectralField t = plan.w[static_cast<std::size_t>(k)];
            t *= tp;
            v += t;
            t = plan.h[static_cast<std::size_t>(k)];
            t *= tp;
            g += t;
            tp *= theta;
        }
        // measured tail of the direction remainder at order m_trunc
        SpectralField tail(plan.space);
        tp = theta;
        for (int k = m_trunc + 1; k < kw; ++k) {
            SpectralField t = plan.w[static_cast<std::size_t>(k)];
            t *= tp;
            tail += t;
            tp *= theta;
        }
        SpectralField r = stokes_apply(v) - g;
        SpectralField b = bilinear_b(v, v);
        b *= a;
        r += b;
        ev.n.push_back(i + 1);
        ev.alphas.push_back(a);
        ev.residual.push_back(norm_h(r));
        ev.tail_bound.push_back(plan.m * std::pow(plan.d0, m_trunc + 1) * theta / (1.0 - plan.d0 * theta));
        ev.measured_tail.push_back(norm_h(tail));
        ev.v.push_back(std::move(v));
        ev.g.push_back(std::move(g));
    }
    return ev;
}

VanishingPair vanishing_limit_pair(const SpectralField& u, double m_target, const std::vector<double>& alphas) {
    if (m_target <= 0) throw std::invalid_argument("target norm must be positive");
    SpectralField buu = bilinear_b(u, u);
    const double bn = norm_h(buu);
    if (bn <= 1e-12 * std::max(1.0, norm_h(u) * norm_h(u)))
        throw std::invalid_argument("B(u,u) = 0: the seed admits no vanishing-limit family");
    VanishingPair out;
    out.w1 = u;
    out.w1 *= std::sqrt(m_target) / std::sqrt(bn);
    out.g = bilinear_b(out.w1, out.w1);
    out.h1 = stokes_apply(out.w1);
    out.alphas = alphas;
    for (double a : alphas) {
        if (!(a > 0)) throw std::invalid_argument("alpha values must be positive");
        const double s = 1.0 / std::sqrt(a);
        SpectralField v = out.w1;
        v *= s;
        SpectralField gn = out.h1;
        gn *= s;
        gn += out.g;
        out.v.push_back(std::move(v));
        out.gn.push_back(std::move(gn));
    }
    return out;
}

BsWitness find_bs_witness(const SpectralField& v) {
    const ModeSet& ms = v.modes();
    if (!ms.ball_shaped() || ms.lambda_cut() < 5.0)
        throw std::invalid_argument("witness construction needs a ball space with lambda >= 5");
    const double limit = std::sqrt(ms.lambda_cut()) - 1.0;
    WaveVector kmax;
    bool found = false;
    for (int i = 0; i < v.n_modes(); ++i) {
        double mag = 0;
        for (int c = 0; c < v.dim(); ++c) mag += std::norm(v.at(i, c));
        if (mag == 0) continue;
        const WaveVector& k = ms.canonical()[static_cast<std::size_t>(i)];
        if (std::sqrt(static_cast<double>(k.norm2())) > limit + 1e-12)
            throw std::invalid_argument("field support extends beyond |k| <= sqrt(lambda) - 1");
        if (!found || kmax < k) {
            kmax = k;
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("zero field has no witness");

    BsWitness out;
    out.kmax = kmax;
    SpectralField w(v.modes_ptr());
    if (v.dim() == 2) {
        const int k1 = kmax[0], k2 = kmax[1];
        WaveVector kp(0, 1);
        if (k1 >= 2) kp = WaveVector(0, 1);
        else if (k1 == 1 && std::abs(k2) >= 1) kp = WaveVector(0, 1);
        else if (k1 == 1 && k2 == 0) kp = WaveVector(0, 2);
        else if (k1 == 0 && std::abs(k2) >= 2) kp = WaveVector(1, 0);
        else kp = WaveVector(2, 0);  // k1 == 0, |k2| == 1
        out.kprime = kp;
        // rotated mode direction keeps the pair divergence-free
        w.set_coefficient(kp, {Complex{static_cast<double>(-kp[1]), 0}, Complex{static_cast<double>(kp[0]), 0},
                               Complex{0, 0}});
    } else {
        auto hit = ms.find(kmax);
        const Complex* a = v.mode(hit->index);
        double amax = 0;
        for (int c = 0; c < 3; ++c) amax = std::max(amax, std::abs(a[c]));
        auto nonzero = [&](int c) { return std::abs(a[c]) > 1e-14 * amax; };
        const bool par1 = (kmax[1] == 0 && kmax[2] == 0);
        const bool par2 = (kmax[0] == 0 && kmax[2] == 0);
        const bool par3 = (kmax[0] == 0 && kmax[1] == 0);
        int axis;
        if (par1) axis = nonzero(1) ? 1 : 2;
        else if (par2) axis = nonzero(0) ? 0 : 2;
        else if (par3) axis = nonzero(0) ? 0 : 1;
        else axis = nonzero(0) ? 0 : (nonzero(1) ? 1 : 2);
        WaveVector kp(axis == 0 ? 1 : 0, axis == 1 ? 1 : 0, axis == 2 ? 1 : 0);
        out.kprime = kp;
        // coefficient k x k'
        const double cx = static_cast<double>(kmax[1] * kp[2] - kmax[2] * kp[1]);
        const double cy = static_cast<double>(kmax[2] * kp[0] - kmax[0] * kp[2]);
        const double cz = static_cast<double>(kmax[0] * kp[1] - kmax[1] * kp[0]);
        w.set_coefficient(kp, {Complex{cx, 0}, Complex{cy, 0}, Complex{cz, 0}});
    }
    out.w = w;
    out.margin = norm_z(bilinear_bs(v, w));
    if (!(out.margin > 0)) throw SolverError("witness construction produced a vanishing pairing");
    return out;
}

ZeroBsSpace zero_bs_subspace(const WaveVector& k, double m_bound, const std::vector<WaveVector>& k3) {
    if (m_bound < 1.0) throw std::invalid_argument("the inner ball needs m_bound >= 1");
    const double klen = std::sqrt(static_cast<double>(k.norm2()));
    if (!(klen > 2.0 * m_bound)) throw std::invalid_argument("separation |k| > 2 m_bound violated");
    std::vector<WaveVector> modes;
    modes.push_back(k.canonicalized());
    // inner ball
    const int mb = static_cast<int>(std::floor(m_bound));
    const int lo3 = (k.dim == 3) ? -mb : 0, hi3 = (k.dim == 3) ? mb : 0;
    for (int a = -mb; a <= mb; ++a)
        for (int b = -mb; b <= mb; ++b)
            for (int c = lo3; c <= hi3; ++c) {
                WaveVector j = (k.dim == 3) ? WaveVector(a, b, c) : WaveVector(a, b);
                if (j.zero() || static_cast<double>(j.norm2()) > m_bound * m_bound) continue;
                if (j.canonical()) modes.push_back(j);
            }
    // orthogonal companions; ones inside the inner ball are redundant
    // and simply absorbed
    for (const auto& p : k3) {
        if (p.zero()) throw std::invalid_argument("orthogonal companion must be nonzero");
        int dot = 0;
        for (int i = 0; i < 3; ++i) dot += p[i] * k[i];
        if (dot != 0) throw std::invalid_argument("companion " + p.str() + " is not orthogonal to " + k.str());
        bool mirrored = false;
        for (const auto& q : k3)
            if (q == p.negated()) mirrored = true;
        if (!mirrored) throw std::invalid_argument("companion set is not symmetric about the origin");
        modes.push_back(p.canonicalized());
    }
    ZeroBsSpace out;
    out.k = k.canonicalized();
    out.space = ModeSet::custom(k.dim, modes);

    // exhaustive check of Bs(v,e) over the whole basis
    std::mt19937_64 rng(7);
    SpectralField vtest(out.space);
    {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::array<Complex, 3> a{};
        for (int c = 0; c < k.dim; ++c) a[static_cast<std::size_t>(c)] = Complex{gauss(rng), gauss(rng)};
        vtest.set_coefficient(out.k, a);
        vtest = leray_project(vtest);
        const double n = norm_z(vtest);
        if (n > 0) vtest *= 1.0 / n;
    }
    for (const auto& e : solenoidal_basis(out.space)) {
        out.max_bs = std::max(out.max_bs, norm_z(bilinear_bs(vtest, e)));
        ++out.checks;
    }
    return out;
}

void write_plan(const std::string& dir, const ForceExpansionPlan& plan) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (std::size_t k = 0; k < plan.w.size(); ++k) write_field(dir + "/w_" + std::to_string(k) + ".sf", plan.w[k]);
    for (std::size_t k = 0; k < plan.h.size(); ++k) write_field(dir + "/h_" + std::to_string(k) + ".sf", plan.h[k]);
    std::ofstream os(dir + "/plan.txt");
    if (!os) throw std::runtime_error("cannot write " + dir + "/plan.txt");
    os << "m = " << format_double(plan.m) << "\n";
    os << "d0 = " << format_double(plan.d0) << "\n";
    os << "c0 = " << format_double(plan.c0) << "\n";
    os << "m_a = " << format_double(plan.norms.m_a) << "\n";
    os << "m_b_lower = " << format_double(plan.norms.m_b_lower) << "\n";
    os << "m_b_upper = " << format_double(plan.norms.m_b_upper) << "\n";
    os << "case = " << to_string(plan.tag) << "\n";
    os << "seed = " << plan.seed << "\n";
    os << "depth = " << plan.depth() << "\n";
}

ForceExpansionPlan read_plan(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream is(dir + "/plan.txt");
    if (!is) throw std::runtime_error("cannot read " + dir + "/plan.txt");
    ForceExpansionPlan plan;
    std::string line;
    int depth = -1;
    while (std::getline(is, line)) {
        std::istringstream ss(line);
        std::string key, eq;
        if (!(ss >> key >> eq)) continue;
        if (key == "m") ss >> plan.m;
        else if (key == "d0") ss >> plan.d0;
        else if (key == "c0") ss >> plan.c0;
        else if (key == "m_a") ss >> plan.norms.m_a;
        else if (key == "m_b_lower") ss >> plan.norms.m_b_lower;
        else if (key == "m_b_upper") ss >> plan.norms.m_b_upper;
        else if (key == "seed") ss >> plan.seed;
        else if (key == "depth") ss >> depth;
        else if (key == "case") {
            std::string tag;
            ss >> tag;
            plan.tag = (tag == "bs-decoupled") ? ForceExpansionPlan::Case::bs_decoupled
                                               : ForceExpansionPlan::Case::bs_coupled;
        }
    }
    if (depth < 0) throw std::runtime_error("plan.txt lacks a depth entry");
    for (int k = 0; k <= depth + 1; ++k) plan.w.push_back(read_field(dir + "/w_" + std::to_string(k) + ".sf"));
    for (int k = 0; k <= depth; ++k) plan.h.push_back(read_field(dir + "/h_" + std::to_string(k) + ".sf"));
    plan.space = plan.w.front().modes_ptr();
    return plan;
}

void write_evaluation_csv(const std::string& path, const PlanEvaluation& ev) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "n,alpha,residual,tail_bound\n";
    for (std::size_t i = 0; i < ev.n.size(); ++i)
        os << ev.n[i] << "," << format_double(ev.alphas[i]) << "," << format_double(ev.residual[i]) << ","
           << format_double(ev.tail_bound[i]) << "\n";
}

}  // namespace grashof
