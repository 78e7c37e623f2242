#include "grashof/steady.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace grashof {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::no_convergence: return "no convergence";
        case SolveStatus::singular_jacobian: return "fold/bifurcation suspected";
    }
    return "?";
}

SpectralField residual(const SpectralField& v, double alpha, const SpectralField& g) {
    require_same_modes(v, g);
    SpectralField r = stokes_apply(v);
    if (alpha != 0.0) {
        SpectralField b = bilinear_b(v, v);
        b *= alpha;
        r += b;
    }
    r -= g;
    return r;
}

Eigen::VectorXd flatten(const SpectralField& f) {
    const auto& raw = f.raw();
    Eigen::VectorXd x(2 * static_cast<int>(raw.size()));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        x[2 * static_cast<int>(i)] = raw[i].real();
        x[2 * static_cast<int>(i) + 1] = raw[i].imag();
    }
    return x;
}

SpectralField unflatten(const ModeSetPtr& modes, const Eigen::VectorXd& x) {
    SpectralField f(modes);
    auto& raw = f.raw();
    if (x.size() != 2 * static_cast<int>(raw.size())) throw std::invalid_argument("flattened size mismatch");
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = Complex{x[2 * static_cast<int>(i)], x[2 * static_cast<int>(i) + 1]};
    return f;
}

Eigen::MatrixXd assemble_operator(const ModeSetPtr& modes, const SpectralField* vf, double c_stokes, double c_bv,
                                  double c_vb) {
    const ModeSet& ms = *modes;
    const int m = ms.size();
    const int d = ms.dim();
    const int n = 2 * d * m;
    Eigen::MatrixXd jac(n, n);
    jac.setZero();
    const bool bilinear = (c_bv != 0.0 || c_vb != 0.0);
    if (bilinear && (vf == nullptr || !vf->modes().same(ms))) throw std::invalid_argument("operator field mismatch");

#pragma omp parallel for schedule(static)
    for (int ci = 0; ci < m; ++ci) {
        const WaveVector& k = ms.canonical()[static_cast<std::size_t>(ci)];
        // complex blocks per column mode: C acts on w, D on conj(w)
        std::vector<Complex> cblk(static_cast<std::size_t>(m) * 9, Complex{0, 0});
        std::vector<Complex> dblk(static_cast<std::size_t>(m) * 9, Complex{0, 0});
        auto cb = [&](int col, int r, int c) -> Complex& { return cblk[(static_cast<std::size_t>(col) * 9) + static_cast<std::size_t>(r * 3 + c)]; };
        auto db = [&](int col, int r, int c) -> Complex& { return dblk[(static_cast<std::size_t>(col) * 9) + static_cast<std::size_t>(r * 3 + c)]; };

        if (bilinear) {
            for (const auto& fm : ms.full()) {
                const auto hit = ms.find(k - fm.k);
                if (!hit) continue;
                // vf at j = fm and at m = k - j
                Complex vj[3], vm[3];
                for (int c = 0; c < d; ++c) {
                    const Complex a = vf->mode(fm.index)[c];
                    vj[c] = fm.conj ? std::conj(a) : a;
                    const Complex b = vf->mode(hit->index)[c];
                    vm[c] = hit->conj ? std::conj(b) : b;
                }
                if (c_bv != 0.0) {
                    // B(vf, w): i (k . vf_j) w_m, a scalar times the identity
                    Complex kdotv{0, 0};
                    for (int c = 0; c < d; ++c) kdotv += static_cast<double>(k[c]) * vj[c];
                    const Complex s = c_bv * Complex{0, 1} * kdotv;
                    for (int c = 0; c < d; ++c) {
                        if (!hit->conj)
                            cb(hit->index, c, c) += s;
                        else
                            db(hit->index, c, c) += s;
                    }
                }
                if (c_vb != 0.0) {
                    // B(w, vf): i (k . w_j) vf_m, rank-one block vf_m k^T
                    for (int r = 0; r < d; ++r)
                        for (int c = 0; c < d; ++c) {
                            const Complex val = c_vb * Complex{0, 1} * vm[r] * static_cast<double>(k[c]);
                            if (!fm.conj)
                                cb(fm.index, r, c) += val;
                            else
                                db(fm.index, r, c) += val;
                        }
                }
            }
            // Leray projection of the row: blocks become P_k * block
            const double n2 = k.norm2();
            for (int col = 0; col < m; ++col) {
                for (int c = 0; c < d; ++c) {
                    Complex kc_c{0, 0}, kd_c{0, 0};
                    for (int q = 0; q < d; ++q) {
                        kc_c += static_cast<double>(k[q]) * cb(col, q, c);
                        kd_c += static_cast<double>(k[q]) * db(col, q, c);
                    }
                    kc_c /= n2;
                    kd_c /= n2;
                    for (int r = 0; r < d; ++r) {
                        cb(col, r, c) -= static_cast<double>(k[r]) * kc_c;
                        db(col, r, c) -= static_cast<double>(k[r]) * kd_c;
                    }
                }
            }
        }
        if (c_stokes != 0.0) {
            const double n2 = k.norm2();
            for (int c = 0; c < d; ++c) cb(ci, c, c) += c_stokes * n2;
        }
        // expand to real 2x2 blocks
        for (int col = 0; col < m; ++col)
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    const Complex C = cb(col, r, c);
                    const Complex D = db(col, r, c);
                    if (C == Complex{0, 0} && D == Complex{0, 0}) continue;
                    const int row0 = (ci * d + r) * 2;
                    const int col0 = (col * d + c) * 2;
                    jac(row0, col0) += C.real() + D.real();
                    jac(row0, col0 + 1) += D.imag() - C.imag();
                    jac(row0 + 1, col0) += C.imag() + D.imag();
                    jac(row0 + 1, col0 + 1) += C.real() - D.real();
                }
    }
    return jac;
}

Eigen::MatrixXd steady_jacobian(const SpectralField& v, double alpha) {
    return assemble_operator(v.modes_ptr(), &v, 1.0, alpha, alpha);
}

SteadyState newton_solve(double alpha, const SpectralField& g, const SpectralField& v_init,
                         const NewtonOptions& opt) {
    if (opt.tol <= 0) throw std::invalid_argument("newton tolerance must be positive");
    require_same_modes(v_init, g);
    SteadyState st;
    st.alpha = alpha;
    st.v = v_init;
    for (int it = 0; it <= opt.max_iter; ++it) {
        SpectralField r = residual(st.v, alpha, g);
        st.residual_znorm = norm_z(r);
        st.newton_iters = it;
        if (!std::isfinite(st.residual_znorm)) {
            st.status = SolveStatus::no_convergence;
            return st;
        }
        if (st.residual_znorm <= opt.tol) {
            st.status = SolveStatus::converged;
            return st;
        }
        if (it == opt.max_iter) break;
        Eigen::MatrixXd jac = steady_jacobian(st.v, alpha);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        const auto diag = lu.matrixLU().diagonal().cwiseAbs();
        if (diag.minCoeff() <= 1e-14 * diag.maxCoeff()) {
            st.status = SolveStatus::singular_jacobian;
            return st;
        }
        Eigen::VectorXd dx = lu.solve(-flatten(r));
        SpectralField delta = unflatten(st.v.modes_ptr(), dx);
        st.v += delta;
    }
    st.status = SolveStatus::no_convergence;
    return st;
}

std::vector<double> ContinuationRun::alphas() const {
    std::vector<double> a;
    a.reserve(states.size());
    for (const auto& s : states) a.push_back(s.alpha);
    return a;
}

std::vector<SpectralField> ContinuationRun::fields() const {
    std::vector<SpectralField> f;
    f.reserve(states.size());
    for (const auto& s : states) f.push_back(s.v);
    return f;
}

namespace {

SpectralField picard_seed(const SpectralField& g, double alpha) {
    SpectralField v = stokes_invert(g);
    for (int it = 0; it < 60; ++it) {
        SpectralField b = bilinear_b(v, v);
        b *= alpha;
        SpectralField vn = stokes_invert(g - b);
        const double delta = norm_z(vn - v);
        v = vn;
        if (!std::isfinite(delta) || norm_z(v) > 1e8) break;
        if (delta < 1e-12) break;
    }
    return v;
}

}  // namespace

ContinuationRun continue_branch(const SpectralField& g, double alpha_start, double alpha_end,
                                const StepPolicy& policy, const NewtonOptions& nopt, const SpectralField* seed) {
    if (!(alpha_start < alpha_end)) throw std::invalid_argument("alpha_start must be below alpha_end");
    if (alpha_start <= 0) throw std::invalid_argument("alpha must be positive");
    ContinuationRun run;
    run.g = g;
    run.policy = policy;
    run.newton = nopt;

    SpectralField v0 = seed ? *seed : picard_seed(g, alpha_start);
    SteadyState first = newton_solve(alpha_start, g, v0, nopt);
    if (first.status != SolveStatus::converged)
        throw SolverError("no steady state at the start of the branch (" + to_string(first.status) + ")");
    run.states.push_back(first);

    const double gh = norm_h(g);
    auto check_bound = [&](const SteadyState& s) {
        if (norm_h(s.v) > gh * (1.0 + 1e-8) && run.diagnostic.empty())
            run.diagnostic = "state norm exceeds force norm at alpha=" + format_double(s.alpha);
    };
    check_bound(first);

    // emission grid for geometric spacing
    std::vector<double> targets;
    if (policy.spacing == StepPolicy::Spacing::geometric) {
        const int n = std::max(policy.geometric_count, 2);
        const double r = std::pow(alpha_end / alpha_start, 1.0 / (n - 1));
        for (int i = 1; i < n - 1; ++i) targets.push_back(alpha_start * std::pow(r, i));
        targets.push_back(alpha_end);
    } else {
        targets.push_back(alpha_end);
    }

    double logstep = std::log(policy.first_factor);
    const double logcap = std::log(policy.max_factor);
    const double logfloor = std::log(policy.min_factor);
    double alpha = alpha_start;
    SpectralField v = first.v;

    for (double target : targets) {
        bool reached = false;
        while (!reached) {
            double anext = alpha * std::exp(logstep);
            if (anext >= target * (1.0 - 1e-13)) {
                anext = target;
                reached = true;
            }
            SteadyState st = newton_solve(anext, g, v, nopt);
            if (st.status == SolveStatus::converged) {
                alpha = anext;
                v = st.v;
                check_bound(st);
                if (policy.spacing == StepPolicy::Spacing::adaptive || reached) run.states.push_back(st);
                if (st.newton_iters <= policy.easy_iters) logstep = std::min(logstep * policy.grow, logcap);
            } else {
                reached = false;
                logstep *= policy.cut;
                if (logstep < logfloor) {
                    run.truncated = true;
                    run.diagnostic = "possible fold: step underflow at alpha=" + format_double(alpha) + " (" +
                                     to_string(st.status) + ")";
                    return run;
                }
            }
        }
    }
    return run;
}

void write_branch_csv(std::ostream& os, const ContinuationRun& run) {
    os << "alpha,znorm,hnorm,residual,newton_iters\n";
    for (const auto& s : run.states) {
        os << format_double(s.alpha) << "," << format_double(norm_z(s.v)) << "," << format_double(norm_h(s.v)) << ","
           << format_double(s.residual_znorm) << "," << s.newton_iters << "\n";
    }
}

void write_branch_csv(const std::string& path, const ContinuationRun& run) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_branch_csv(os, run);
}

std::vector<BranchRow> read_branch_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty branch csv");
    std::vector<BranchRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        BranchRow r{};
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        if (!(ss >> r.alpha >> r.znorm >> r.hnorm >> r.residual >> r.newton_iters))
            throw std::runtime_error("bad branch row: " + line);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace grashof
