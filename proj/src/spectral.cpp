#include "grashof/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace grashof {

std::string WaveVector::str() const {
    std::string s = "(";
    for (int i = 0; i < dim; ++i) {
        if (i) s += ",";
        s += std::to_string(c[static_cast<std::size_t>(i)]);
    }
    return s + ")";
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::shared_ptr<const ModeSet> ModeSet::ball(int dim, double lambda_cut) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
    if (lambda_cut < 1.0) throw std::invalid_argument("empty Galerkin space: lambda_cut < 1");
    auto ms = std::shared_ptr<ModeSet>(new ModeSet());
    ms->dim_ = dim;
    ms->lambda_ = lambda_cut;
    ms->ball_ = true;
    const int kmax = static_cast<int>(std::floor(std::sqrt(lambda_cut)));
    const int k3lo = (dim == 3) ? -kmax : 0;
    const int k3hi = (dim == 3) ? kmax : 0;
    for (int k1 = -kmax; k1 <= kmax; ++k1)
        for (int k2 = -kmax; k2 <= kmax; ++k2)
            for (int k3 = k3lo; k3 <= k3hi; ++k3) {
                WaveVector k = (dim == 3) ? WaveVector(k1, k2, k3) : WaveVector(k1, k2);
                const int n2 = k.norm2();
                if (n2 == 0 || static_cast<double>(n2) > lambda_cut) continue;
                if (k.canonical()) ms->canonical_.push_back(k);
            }
    ms->finalize();
    return ms;
}

std::shared_ptr<const ModeSet> ModeSet::custom(int dim, const std::vector<WaveVector>& modes) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
    auto ms = std::shared_ptr<ModeSet>(new ModeSet());
    ms->dim_ = dim;
    ms->ball_ = false;
    for (const auto& k : modes) {
        if (k.zero()) throw std::invalid_argument("zero mode is not admissible");
        WaveVector kc = k.canonicalized();
        kc.dim = dim;
        ms->canonical_.push_back(kc);
    }
    std::sort(ms->canonical_.begin(), ms->canonical_.end());
    ms->canonical_.erase(std::unique(ms->canonical_.begin(), ms->canonical_.end()), ms->canonical_.end());
    if (ms->canonical_.empty()) throw std::invalid_argument("empty mode set");
    ms->lambda_ = 0;
    for (const auto& k : ms->canonical_) ms->lambda_ = std::max(ms->lambda_, static_cast<double>(k.norm2()));
    ms->finalize();
    return ms;
}

void ModeSet::finalize() {
    kmax_ = 0;
    for (const auto& k : canonical_)
        for (int i = 0; i < 3; ++i) kmax_ = std::max(kmax_, std::abs(k[i]));
    const int side = 2 * kmax_ + 1;
    lut_.assign(static_cast<std::size_t>(side) * side * side, -1);
    auto slot = [&](const WaveVector& k) -> std::int32_t& {
        const std::size_t i1 = static_cast<std::size_t>(k[0] + kmax_);
        const std::size_t i2 = static_cast<std::size_t>(k[1] + kmax_);
        const std::size_t i3 = static_cast<std::size_t>(k[2] + kmax_);
        return lut_[(i1 * static_cast<std::size_t>(side) + i2) * static_cast<std::size_t>(side) + i3];
    };
    full_.reserve(2 * canonical_.size());
    for (int i = 0; i < static_cast<int>(canonical_.size()); ++i) {
        const WaveVector& k = canonical_[static_cast<std::size_t>(i)];
        full_.push_back({k, i, false});
        full_.push_back({k.negated(), i, true});
        slot(k) = static_cast<std::int32_t>(i << 1);
        slot(k.negated()) = static_cast<std::int32_t>((i << 1) | 1);
    }
}

std::optional<ModeSet::Hit> ModeSet::find(const WaveVector& k) const {
    for (int i = 0; i < 3; ++i)
        if (std::abs(k[i]) > kmax_) return std::nullopt;
    const int side = 2 * kmax_ + 1;
    const std::size_t i1 = static_cast<std::size_t>(k[0] + kmax_);
    const std::size_t i2 = static_cast<std::size_t>(k[1] + kmax_);
    const std::size_t i3 = static_cast<std::size_t>(k[2] + kmax_);
    const std::int32_t v = lut_[(i1 * static_cast<std::size_t>(side) + i2) * static_cast<std::size_t>(side) + i3];
    if (v < 0) return std::nullopt;
    return Hit{v >> 1, (v & 1) != 0};
}

SpectralField::SpectralField(ModeSetPtr modes) : modes_(std::move(modes)) {
    data_.assign(static_cast<std::size_t>(modes_->size()) * static_cast<std::size_t>(modes_->dim()), Complex{0, 0});
}

Complex SpectralField::coefficient(const WaveVector& k, int comp) const {
    auto hit = modes_->find(k);
    if (!hit) return {0, 0};
    const Complex v = at(hit->index, comp);
    return hit->conj ? std::conj(v) : v;
}

void SpectralField::set_coefficient(const WaveVector& k, const std::array<Complex, 3>& value) {
    auto hit = modes_->find(k);
    if (!hit) throw std::invalid_argument("mode " + k.str() + " not in the set");
    for (int c = 0; c < dim(); ++c) at(hit->index, c) = hit->conj ? std::conj(value[static_cast<std::size_t>(c)]) : value[static_cast<std::size_t>(c)];
}

std::array<Complex, 3> SpectralField::evaluate(const std::array<double, 3>& x) const {
    std::array<Complex, 3> out{Complex{0, 0}, Complex{0, 0}, Complex{0, 0}};
    for (const auto& fm : modes_->full()) {
        double phase = 0;
        for (int i = 0; i < dim(); ++i) phase += fm.k[i] * x[static_cast<std::size_t>(i)];
        const Complex e = std::polar(1.0, phase);
        const Complex* a = mode(fm.index);
        for (int c = 0; c < dim(); ++c) {
            const Complex coef = fm.conj ? std::conj(a[c]) : a[c];
            out[static_cast<std::size_t>(c)] += coef * e;
        }
    }
    return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_modes(*this, o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}
SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_modes(*this, o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}
SpectralField& SpectralField::operator*=(double s) {
    for (auto& z : data_) z *= s;
    return *this;
}
SpectralField SpectralField::operator-() const {
    SpectralField r = *this;
    for (auto& z : r.data_) z = -z;
    return r;
}

void require_same_modes(const SpectralField& a, const SpectralField& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty field");
    if (a.modes_ptr() == b.modes_ptr()) return;
    if (!a.modes().same(b.modes())) throw std::invalid_argument("mode sets differ");
}

double h_scale(int dim) {
    const double twopi = 2.0 * std::numbers::pi;
    return std::sqrt(2.0 * std::pow(twopi, dim));
}

double inner_z(const SpectralField& u, const SpectralField& v) {
    require_same_modes(u, v);
    double s = 0;
    const auto& a = u.raw();
    const auto& b = v.raw();
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return s;
}

double inner_h(const SpectralField& u, const SpectralField& v) {
    const double c = h_scale(u.dim());
    return c * c * inner_z(u, v);
}

double norm_z(const SpectralField& u) {
    double s = 0;
    for (const auto& z : u.raw()) s += std::norm(z);
    return std::sqrt(s);
}

double norm_h(const SpectralField& u) { return h_scale(u.dim()) * norm_z(u); }

double norm_v(const SpectralField& u) {
    double s = 0;
    for (int i = 0; i < u.n_modes(); ++i) {
        const double n2 = u.modes().canonical()[static_cast<std::size_t>(i)].norm2();
        for (int c = 0; c < u.dim(); ++c) s += n2 * std::norm(u.at(i, c));
    }
    const double hs = h_scale(u.dim());
    return hs * std::sqrt(s);
}

namespace {

// Removes the component of a parallel to k, iterating until the result is
// a floating-point fixed point of the projection. Remainders below the
// rounding dead zone are left alone, so reprojecting is a bitwise no-op.
void project_mode(Complex* a, const WaveVector& k, int dim) {
    const double n2 = k.norm2();
    for (int pass = 0; pass < 4; ++pass) {
        Complex s{0, 0};
        double scale = 0;
        for (int c = 0; c < dim; ++c) {
            s += static_cast<double>(k[c]) * a[c];
            scale += std::norm(a[c]);
        }
        if (std::norm(s) <= 1e-28 * n2 * scale) return;
        s /= n2;
        bool changed = false;
        for (int c = 0; c < dim; ++c) {
            const Complex t = a[c] - s * static_cast<double>(k[c]);
            if (t != a[c]) changed = true;
            a[c] = t;
        }
        if (!changed) return;
    }
}

void convolve_row(const SpectralField& u, const SpectralField& v, int ci, Complex* acc) {
    const ModeSet& ms = u.modes();
    const int d = ms.dim();
    const WaveVector& k = ms.canonical()[static_cast<std::size_t>(ci)];
    for (int c = 0; c < d; ++c) acc[c] = Complex{0, 0};
    for (const auto& fm : ms.full()) {
        const auto hit = ms.find(k - fm.k);
        if (!hit) continue;
        const Complex* uj = u.mode(fm.index);
        Complex kdotu{0, 0};
        for (int c = 0; c < d; ++c) {
            const Complex z = fm.conj ? std::conj(uj[c]) : uj[c];
            kdotu += static_cast<double>(k[c]) * z;
        }
        const Complex s = Complex{0, 1} * kdotu;
        const Complex* vm = v.mode(hit->index);
        for (int c = 0; c < d; ++c) {
            const Complex z = hit->conj ? std::conj(vm[c]) : vm[c];
            acc[c] += s * z;
        }
    }
    project_mode(acc, k, d);
}

}  // namespace

SpectralField leray_project(const SpectralField& f) {
    SpectralField out = f;
    for (int i = 0; i < f.n_modes(); ++i)
        project_mode(out.mode(i), f.modes().canonical()[static_cast<std::size_t>(i)], f.dim());
    return out;
}

bool divergence_free(const SpectralField& f, double rel_tol) {
    for (int i = 0; i < f.n_modes(); ++i) {
        const WaveVector& k = f.modes().canonical()[static_cast<std::size_t>(i)];
        Complex s{0, 0};
        double mag = 0;
        for (int c = 0; c < f.dim(); ++c) {
            s += static_cast<double>(k[c]) * f.at(i, c);
            mag += std::norm(f.at(i, c));
        }
        if (std::abs(s) > rel_tol * std::sqrt(mag)) return false;
    }
    return true;
}

SpectralField stokes_apply(const SpectralField& u) {
    SpectralField out = u;
    for (int i = 0; i < u.n_modes(); ++i) {
        const double n2 = u.modes().canonical()[static_cast<std::size_t>(i)].norm2();
        for (int c = 0; c < u.dim(); ++c) out.at(i, c) *= n2;
    }
    return out;
}

SpectralField stokes_invert(const SpectralField& u) {
    SpectralField out = u;
    for (int i = 0; i < u.n_modes(); ++i) {
        const double n2 = u.modes().canonical()[static_cast<std::size_t>(i)].norm2();
        for (int c = 0; c < u.dim(); ++c) out.at(i, c) /= n2;
    }
    return out;
}

SpectralField bilinear_b(const SpectralField& u, const SpectralField& v) {
    require_same_modes(u, v);
    SpectralField out(u.modes_ptr());
    const int m = u.n_modes();
#pragma omp parallel for schedule(static)
    for (int ci = 0; ci < m; ++ci) convolve_row(u, v, ci, out.mode(ci));
    return out;
}

SpectralField bilinear_b_serial(const SpectralField& u, const SpectralField& v) {
    require_same_modes(u, v);
    SpectralField out(u.modes_ptr());
    for (int ci = 0; ci < u.n_modes(); ++ci) convolve_row(u, v, ci, out.mode(ci));
    return out;
}

SpectralField bilinear_bs(const SpectralField& u, const SpectralField& v) {
    return bilinear_b(u, v) + bilinear_b(v, u);
}

SpectralField random_field(const ModeSetPtr& modes, std::mt19937_64& rng, const RandomFieldOptions& opt) {
    SpectralField f(modes);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < f.n_modes(); ++i)
        for (int c = 0; c < f.dim(); ++c) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            f.at(i, c) = Complex{re, im};
        }
    if (opt.solenoidal) f = leray_project(f);
    if (opt.znorm > 0) {
        const double n = norm_z(f);
        if (n == 0) throw std::runtime_error("random draw projected to zero");
        f *= opt.znorm / n;
    }
    return f;
}

void write_field(std::ostream& os, const SpectralField& f) {
    os << "# d=" << f.dim() << " lambda=" << format_double(f.modes().lambda_cut()) << "\n";
    for (int i = 0; i < f.n_modes(); ++i) {
        const WaveVector& k = f.modes().canonical()[static_cast<std::size_t>(i)];
        for (int c = 0; c < f.dim(); ++c) os << (c ? " " : "") << k[c];
        for (int c = 0; c < f.dim(); ++c)
            os << " " << format_double(f.at(i, c).real()) << " " << format_double(f.at(i, c).imag());
        os << "\n";
    }
}

void write_field(const std::string& path, const SpectralField& f) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_field(os, f);
}

SpectralField read_field(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("empty field file");
    int d = 0;
    double lambda = 0;
    if (std::sscanf(header.c_str(), "# d=%d lambda=%lf", &d, &lambda) != 2)
        throw std::runtime_error("bad field header: " + header);
    std::vector<WaveVector> modes;
    std::vector<std::array<Complex, 3>> coeffs;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        WaveVector k;
        k.dim = d;
        for (int i = 0; i < d; ++i)
            if (!(ss >> k.c[static_cast<std::size_t>(i)])) throw std::runtime_error("bad field line: " + line);
        std::array<Complex, 3> a{};
        for (int c = 0; c < d; ++c) {
            double re, im;
            if (!(ss >> re >> im)) throw std::runtime_error("bad field line: " + line);
            a[static_cast<std::size_t>(c)] = Complex{re, im};
        }
        modes.push_back(k);
        coeffs.push_back(a);
    }
    if (modes.empty()) throw std::runtime_error("field file lists no modes");

    ModeSetPtr ms;
    if (lambda >= 1.0) {
        auto ballms = ModeSet::ball(d, lambda);
        if (ballms->canonical() == modes) ms = ballms;
    }
    if (!ms) ms = ModeSet::custom(d, modes);
    SpectralField f(ms);
    for (std::size_t i = 0; i < modes.size(); ++i) f.set_coefficient(modes[i], coeffs[i]);
    return f;
}

SpectralField read_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_field(is);
}

}  // namespace grashof
