#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace grashof {

using Complex = std::complex<double>;

/// Integer wave vector on the lattice of the d-torus, d = 2 or 3.
/// The third component is zero in 2D. The canonical representative of a
/// conjugate pair {k, -k} is the one whose first nonzero component is
/// positive; only canonical modes are stored, the coefficient at -k being
/// implied by conjugation.
struct WaveVector {
    std::array<int, 3> c{0, 0, 0};
    int dim{3};

    WaveVector() = default;
    WaveVector(int k1, int k2) : c{k1, k2, 0}, dim(2) {}
    WaveVector(int k1, int k2, int k3) : c{k1, k2, k3}, dim(3) {}

    int operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    int norm2() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]; }
    bool zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0; }

    bool canonical() const {
        for (int i = 0; i < dim; ++i) {
            if (c[static_cast<std::size_t>(i)] != 0) return c[static_cast<std::size_t>(i)] > 0;
        }
        return false;  // zero vector is not canonical
    }
    WaveVector negated() const {
        WaveVector r = *this;
        for (auto& x : r.c) x = -x;
        return r;
    }
    WaveVector canonicalized() const { return canonical() ? *this : negated(); }

    friend WaveVector operator+(const WaveVector& a, const WaveVector& b) {
        WaveVector r = a;
        for (int i = 0; i < 3; ++i) r.c[static_cast<std::size_t>(i)] += b.c[static_cast<std::size_t>(i)];
        return r;
    }
    friend WaveVector operator-(const WaveVector& a, const WaveVector& b) {
        WaveVector r = a;
        for (int i = 0; i < 3; ++i) r.c[static_cast<std::size_t>(i)] -= b.c[static_cast<std::size_t>(i)];
        return r;
    }
    friend bool operator==(const WaveVector& a, const WaveVector& b) { return a.dim == b.dim && a.c == b.c; }
    friend bool operator<(const WaveVector& a, const WaveVector& b) { return a.c < b.c; }

    std::string str() const;
};

/// The set of retained Fourier modes. Either the spectral ball
/// 0 < |k|^2 <= lambda (the usual Galerkin space) or an arbitrary
/// symmetric finite set. Canonical modes are kept lexicographically
/// sorted, so enumeration order is deterministic.
class ModeSet {
  public:
    struct FullMode {
        WaveVector k;
        int index;  // canonical index
        bool conj;  // true when k is the negated canonical mode
    };
    struct Hit {
        int index;
        bool conj;
    };

    /// All modes with 0 < |k|^2 <= lambda_cut. Throws if lambda_cut < 1
    /// (no nonzero lattice vector qualifies).
    static std::shared_ptr<const ModeSet> ball(int dim, double lambda_cut);

    /// Arbitrary symmetric set; the given modes are canonicalized,
    /// de-duplicated and sorted.
    static std::shared_ptr<const ModeSet> custom(int dim, const std::vector<WaveVector>& modes);

    int dim() const { return dim_; }
    double lambda_cut() const { return lambda_; }
    bool ball_shaped() const { return ball_; }

    const std::vector<WaveVector>& canonical() const { return canonical_; }
    int size() const { return static_cast<int>(canonical_.size()); }
    /// Both signs of every canonical mode, canonical first in each pair.
    const std::vector<FullMode>& full() const { return full_; }

    /// Locate an arbitrary lattice vector in the set.
    std::optional<Hit> find(const WaveVector& k) const;

    bool same(const ModeSet& other) const { return dim_ == other.dim_ && canonical_ == other.canonical_; }

  private:
    ModeSet() = default;
    void finalize();

    int dim_ = 3;
    double lambda_ = 0;
    bool ball_ = false;
    std::vector<WaveVector> canonical_;
    std::vector<FullMode> full_;
    std::vector<std::int32_t> lut_;  // cube lookup, -1 absent, else (index<<1)|conj
    int kmax_ = 0;
};

using ModeSetPtr = std::shared_ptr<const ModeSet>;

/// Divergence-free periodic vector field stored as the complex Fourier
/// coefficients of its canonical half lattice.
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(ModeSetPtr modes);

    bool empty() const { return !modes_; }
    const ModeSet& modes() const { return *modes_; }
    const ModeSetPtr& modes_ptr() const { return modes_; }
    int dim() const { return modes_ ? modes_->dim() : 0; }
    int n_modes() const { return modes_ ? modes_->size() : 0; }

    Complex* mode(int i) { return data_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim()); }
    const Complex* mode(int i) const {
        return data_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim());
    }
    Complex& at(int i, int comp) { return mode(i)[comp]; }
    const Complex& at(int i, int comp) const { return mode(i)[comp]; }

    /// Coefficient at an arbitrary lattice vector, conjugating when k is
    /// not the stored representative; zero outside the set.
    Complex coefficient(const WaveVector& k, int comp) const;
    /// Assign the coefficient vector at an arbitrary lattice vector.
    void set_coefficient(const WaveVector& k, const std::array<Complex, 3>& value);

    /// Physical-space value at x (complex sum over the full lattice; the
    /// imaginary part vanishes by the reality condition).
    std::array<Complex, 3> evaluate(const std::array<double, 3>& x) const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
    friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
    SpectralField operator-() const;

    const std::vector<Complex>& raw() const { return data_; }
    std::vector<Complex>& raw() { return data_; }

  private:
    ModeSetPtr modes_;
    std::vector<Complex> data_;
};

void require_same_modes(const SpectralField& a, const SpectralField& b);

/// sqrt(2 (2pi)^d): the constant relating |u| = h_scale(d) * ||u||_Z.
double h_scale(int dim);

/// L2 scalar product over the torus, (2pi)^d sum over the full lattice.
double inner_h(const SpectralField& u, const SpectralField& v);
/// Coefficient ("Z") scalar product, half the full-lattice sum.
double inner_z(const SpectralField& u, const SpectralField& v);
double norm_h(const SpectralField& u);
double norm_z(const SpectralField& u);
/// Dirichlet norm |A^{1/2} u|.
double norm_v(const SpectralField& u);

/// Per-mode removal of the component parallel to k. Repeated application
/// is a fixed point: project(project(f)) == project(f) bit for bit.
SpectralField leray_project(const SpectralField& f);
bool divergence_free(const SpectralField& f, double rel_tol = 1e-12);

/// Stokes operator, diagonal multiplication by |k|^2.
SpectralField stokes_apply(const SpectralField& u);
SpectralField stokes_invert(const SpectralField& u);

/// Galerkin bilinear term: Leray projection and ball truncation of the
/// advection (u . grad) v, computed by direct convolution over mode pairs.
SpectralField bilinear_b(const SpectralField& u, const SpectralField& v);
/// Reference implementation without threading; identical results.
SpectralField bilinear_b_serial(const SpectralField& u, const SpectralField& v);
/// Symmetrized term B(u,v) + B(v,u).
SpectralField bilinear_bs(const SpectralField& u, const SpectralField& v);

struct RandomFieldOptions {
    bool solenoidal = true;
    double znorm = 1.0;  // 0 keeps the raw Gaussian draw
};
SpectralField random_field(const ModeSetPtr& modes, std::mt19937_64& rng, const RandomFieldOptions& opt = {});

/// Text format, one line per canonical mode:
///   k1 k2 [k3] reX imX reY imY [reZ imZ]
/// after a header line `# d=<d> lambda=<lambda>`.
void write_field(std::ostream& os, const SpectralField& f);
void write_field(const std::string& path, const SpectralField& f);
SpectralField read_field(std::istream& is);
SpectralField read_field(const std::string& path);

/// Deterministic full-precision formatting used by every text output.
std::string format_double(double x);

}  // namespace grashof
