#include <doctest.h>

#include <cmath>
#include <random>

#include "grashof/expansion.hpp"

using namespace grashof;

namespace {

// scalar sequences are embedded on one mode: z -> z * a with a a real
// unit coefficient orthogonal to the carrier wave vector
struct ScalarEmbedding {
    ModeSetPtr space = ModeSet::ball(3, 4.0);
    WaveVector carrier{1, 1, 0};
    SpectralField operator()(Complex z) const {
        SpectralField f(space);
        const double r = 1.0 / std::sqrt(2.0);
        f.set_coefficient(carrier, {z * r, -z * r, Complex{0, 0}});
        return f;
    }
};

}  // namespace

TEST_CASE("constant sequence is trivial") {
    ScalarEmbedding embed;
    std::vector<SpectralField> seq(20, embed(Complex{0.7, 0.0}));
    UnitaryExpansion exp = extract_expansion(seq, 2);
    CHECK(exp.kind == ExpansionKind::trivial);
    CHECK(exp.depth == 0);
    CHECK(verify_expansion(exp, seq).ok);
}

TEST_CASE("scalar-like decay has a one-level finite expansion") {
    ScalarEmbedding embed;
    std::vector<SpectralField> seq;
    for (int n = 1; n <= 40; ++n) seq.push_back(embed(Complex{1.0 + 1.0 / n, 0}));
    UnitaryExpansion exp = extract_expansion(seq, 3);
    CHECK(exp.kind == ExpansionKind::finite);
    CHECK(exp.depth == 1);
    // direction is the embedded +1
    SpectralField w = embed(Complex{1, 0});
    CHECK(norm_z(exp.directions[0] - w) < 1e-12);
    // coefficients are 1/n - 1/N against the tail proxy
    const int N = 40;
    for (std::size_t p = 0; p < exp.retained.size(); ++p) {
        const int n = exp.retained[p] + 1;
        CHECK(exp.gamma(1, static_cast<int>(p)) == doctest::Approx(1.0 / n - 1.0 / N).epsilon(1e-12));
    }
    CHECK(verify_expansion(exp, seq).ok);
}

TEST_CASE("unit-circle sequence reproduces the closed-form coefficients") {
    // cancellation costs a factor of n in precision per level, so the
    // strict relative comparison stays on a short index range
    ScalarEmbedding embed;
    const int N = 20;
    std::vector<SpectralField> seq;
    for (int n = 1; n <= N; ++n) seq.push_back(embed(std::polar(1.0, 1.0 / n)));

    LimitPolicy policy;
    const Complex I{0, 1};
    policy.explicit_limits = {embed(Complex{1, 0}), embed(I), embed(I * I), embed(I * I * I)};
    UnitaryExpansion exp = extract_expansion(seq, 3, policy);
    REQUIRE(exp.depth == 3);
    CHECK(exp.retained.size() == seq.size());

    for (std::size_t p = 0; p < exp.retained.size(); ++p) {
        const int n = exp.retained[p] + 1;
        double expected = 1.0;
        for (int k = 1; k <= 3; ++k) {
            expected *= 2.0 * std::sin(1.0 / (std::pow(2.0, k) * n));
            CHECK(std::abs(exp.gamma(k, static_cast<int>(p)) - expected) <= 1e-12 * expected);
        }
    }
    ExpansionReport rep = verify_expansion(exp, seq);
    CHECK(rep.ok);
    for (const auto& l : rep.levels) CHECK(l.max_reconstruction_error <= 1e-12);
}

TEST_CASE("synthetic two-level sequence round-trips") {
    ScalarEmbedding embed;
    SpectralField v = embed(Complex{0.3, 0});
    std::mt19937_64 rng(5);
    SpectralField w1 = random_field(embed.space, rng);
    SpectralField w2 = random_field(embed.space, rng);
    // orthogonalize the second direction for a clean comparison
    SpectralField w2p = w2 - inner_z(w2, w1) * w1;
    w2p *= 1.0 / norm_z(w2p);

    SyntheticSpec spec;
    spec.limit = v;
    spec.terms.push_back({[](int n) { return 1.0 / n; }, w1});
    spec.terms.push_back({[](int n) { return 1.0 / (static_cast<double>(n) * n); }, w2p});
    spec.n_begin = 10;
    spec.n_end = 1000;
    std::vector<SpectralField> seq = synthesize_sequence(spec);

    UnitaryExpansion exp = extract_expansion(seq, 2);
    REQUIRE(exp.depth == 2);
    // the limit proxy injects an error of the order of the scale ratio
    // Gamma_2/Gamma_1 = 1/n at the proxy end
    CHECK(norm_z(exp.directions[0] - w1) <= 10.0 * (1.0 / 1000.0));
    CHECK(norm_z(exp.directions[1] - w2p) < 1e-2);
    CHECK(verify_expansion(exp, seq).ok);

    SUBCASE("wider scale separation with the exact limit sharpens the recovery") {
        SyntheticSpec spec3 = spec;
        spec3.terms[1].gamma = [](int n) { return std::pow(static_cast<double>(n), -3.0); };
        std::vector<SpectralField> seq3 = synthesize_sequence(spec3);
        LimitPolicy known_limit;
        known_limit.explicit_limits = {v};
        UnitaryExpansion exp3 = extract_expansion(seq3, 2, known_limit);
        REQUIRE(exp3.depth == 2);
        CHECK(norm_z(exp3.directions[0] - w1) <= 1e-4);
        CHECK(norm_z(exp3.directions[1] - w2p) <= 1e-4);
        CHECK(verify_expansion(exp3, seq3).ok);
    }
    SUBCASE("subsequence stability") {
        LimitPolicy strided;
        strided.stride = 2;
        UnitaryExpansion exp2 = extract_expansion(seq, 2, strided);
        REQUIRE(exp2.depth == 2);
        CHECK(norm_z(exp2.directions[0] - exp.directions[0]) < 1e-4);
        CHECK(norm_z(exp2.directions[1] - exp.directions[1]) < 2e-2);
    }
}

TEST_CASE("alternating sequence is rejected at the first level") {
    ScalarEmbedding embed;
    SyntheticSpec spec;
    spec.limit = embed(Complex{0, 0});
    std::mt19937_64 rng(9);
    spec.terms.push_back({[](int n) { return (n % 2 ? -1.0 : 1.0) / n; }, random_field(embed.space, rng)});
    spec.n_begin = 1;
    spec.n_end = 200;
    std::vector<SpectralField> seq = synthesize_sequence(spec);
    UnitaryExpansion exp = extract_expansion(seq, 2);
    CHECK(exp.kind == ExpansionKind::truncated);
    CHECK(exp.depth == 0);
    REQUIRE(!exp.notes.empty());
    CHECK(exp.notes.front().find("subsequence") != std::string::npos);

    SUBCASE("the even-index subsequence is fine") {
        LimitPolicy pol;
        for (int i = 1; i < 200; i += 2) pol.subset.push_back(i);  // odd positions carry +1/n
        UnitaryExpansion even = extract_expansion(seq, 1, pol);
        CHECK(even.depth == 1);
        CHECK(even.kind == ExpansionKind::finite);
    }
}

TEST_CASE("exactly represented tails take the fallback coefficients") {
    ScalarEmbedding embed;
    SpectralField v = embed(Complex{0.5, 0});
    SpectralField w = embed(Complex{1, 0});
    std::vector<SpectralField> seq;
    for (int n = 1; n <= 30; ++n) {
        if (n < 15) {
            SpectralField t = w;
            t *= 1.0 / n;
            seq.push_back(v + t);
        } else {
            seq.push_back(v);
        }
    }
    LimitPolicy pol;
    pol.explicit_limits = {v};
    UnitaryExpansion exp = extract_expansion(seq, 1, pol);
    REQUIRE(exp.depth == 1);
    CHECK(exp.kind == ExpansionKind::finite);
    for (std::size_t p = 0; p < exp.retained.size(); ++p) {
        const int n = exp.retained[p] + 1;
        if (n < 15) CHECK(exp.gamma(1, static_cast<int>(p)) == doctest::Approx(1.0 / n).epsilon(1e-12));
        else {
            CHECK(exp.gamma(1, static_cast<int>(p)) > 0);
            CHECK(exp.gamma(1, static_cast<int>(p)) == std::ldexp(1.0, -std::min(n, 900)));
        }
    }
    CHECK(verify_expansion(exp, seq).ok);
}

TEST_CASE("verification flags tampered directions") {
    ScalarEmbedding embed;
    SyntheticSpec spec;
    spec.limit = embed(Complex{0.2, 0});
    std::mt19937_64 rng(13);
    SpectralField w1 = random_field(embed.space, rng);
    SpectralField w2 = random_field(embed.space, rng);
    spec.terms.push_back({[](int n) { return std::pow(n, -1.0); }, w1});
    spec.terms.push_back({[](int n) { return std::pow(n, -3.0); }, w2});
    spec.n_begin = 5;
    spec.n_end = 400;
    std::vector<SpectralField> seq = synthesize_sequence(spec);
    UnitaryExpansion exp = extract_expansion(seq, 2);
    REQUIRE(exp.depth == 2);
    REQUIRE(verify_expansion(exp, seq).ok);

    exp.directions[1] *= 1.01;
    ExpansionReport rep = verify_expansion(exp, seq);
    CHECK(!rep.ok);
    CHECK(rep.levels[0].ok);
    CHECK(!rep.levels[1].ok);
}

TEST_CASE("pre-unitary conversion") {
    ScalarEmbedding embed;
    SpectralField v = embed(Complex{0.1, 0});

    SUBCASE("single scaled term") {
        SpectralField w = embed(Complex{3, 0});  // norm 3 in the coefficient norm
        std::vector<double> gam;
        for (int n = 1; n <= 20; ++n) gam.push_back(1.0 / n);
        UnitaryExpansion exp = convert_pre_unitary(v, {{gam, w}});
        REQUIRE(exp.depth == 1);
        CHECK(norm_z(exp.directions[0]) == doctest::Approx(1.0).epsilon(1e-14));
        for (int p = 0; p < 20; ++p) CHECK(exp.gamma(1, p) == doctest::Approx(3.0 / (p + 1)).epsilon(1e-14));
    }
    SUBCASE("plan-style geometric coefficients in the integral norm") {
        std::mt19937_64 rng(17);
        SpectralField w1 = random_field(embed.space, rng, {true, 0.0});
        SpectralField w2 = random_field(embed.space, rng, {true, 0.0});
        std::vector<double> g1, g2, alphas;
        for (int n = 1; n <= 15; ++n) {
            const double a = 10.0 * std::pow(2.0, n);
            alphas.push_back(a);
            g1.push_back(1.0 / a);
            g2.push_back(1.0 / (a * a));
        }
        UnitaryExpansion exp = convert_pre_unitary(v, {{g1, w1}, {g2, w2}}, NormKind::h);
        REQUIRE(exp.depth == 2);
        CHECK(norm_h(exp.directions[0]) == doctest::Approx(1.0).epsilon(1e-14));
        for (int p = 0; p < 15; ++p) {
            CHECK(exp.gamma(1, p) == doctest::Approx(norm_h(w1) / alphas[static_cast<std::size_t>(p)]).epsilon(1e-13));
            CHECK(exp.gamma(2, p) ==
                  doctest::Approx(norm_h(w2) / (alphas[static_cast<std::size_t>(p)] * alphas[static_cast<std::size_t>(p)])).epsilon(1e-13));
        }
        // reconstruction values unchanged by the rescaling
        for (int p = 0; p < 15; ++p) {
            SpectralField a = exp.directions[0];
            a *= exp.gamma(1, p);
            SpectralField b = w1;
            b *= g1[static_cast<std::size_t>(p)];
            CHECK(norm_z(a - b) < 1e-14 * norm_z(b));
        }
    }
    SUBCASE("empty expansion is trivial") {
        UnitaryExpansion exp = convert_pre_unitary(v, {});
        CHECK(exp.kind == ExpansionKind::trivial);
        CHECK(exp.depth == 0);
    }
    SUBCASE("zero directions are rejected") {
        SpectralField zero(embed.space);
        CHECK_THROWS_AS(convert_pre_unitary(v, {{{1.0, 0.5}, zero}}), std::invalid_argument);
    }
}

TEST_CASE("synthesis rejects non-decaying coefficient ladders") {
    ScalarEmbedding embed;
    std::mt19937_64 rng(19);
    SyntheticSpec spec;
    spec.limit = embed(Complex{0, 0});
    spec.terms.push_back({[](int n) { return 1.0 / (static_cast<double>(n) * n); }, random_field(embed.space, rng)});
    spec.terms.push_back({[](int n) { return 1.0 / n; }, random_field(embed.space, rng)});
    spec.n_begin = 2;
    spec.n_end = 50;
    CHECK_THROWS_AS(synthesize_sequence(spec), std::invalid_argument);

    SUBCASE("constant generators fail the first-level decay") {
        SyntheticSpec flat;
        flat.limit = embed(Complex{0, 0});
        flat.terms.push_back({[](int) { return 0.5; }, random_field(embed.space, rng)});
        flat.n_begin = 1;
        flat.n_end = 50;
        CHECK_THROWS_AS(synthesize_sequence(flat), std::invalid_argument);
    }
}

TEST_CASE("unit norms of every stored direction") {
    ScalarEmbedding embed;
    SyntheticSpec spec;
    std::mt19937_64 rng(23);
    spec.limit = embed(Complex{0.4, 0});
    spec.terms.push_back({[](int n) { return std::pow(n, -1.5); }, random_field(embed.space, rng)});
    spec.terms.push_back({[](int n) { return std::pow(n, -3.5); }, random_field(embed.space, rng)});
    spec.n_begin = 4;
    spec.n_end = 300;
    std::vector<SpectralField> seq = synthesize_sequence(spec);
    UnitaryExpansion exp = extract_expansion(seq, 2);
    REQUIRE(exp.depth == 2);
    for (const auto& w : exp.directions) CHECK(std::abs(norm_z(w) - 1.0) <= 1e-12);
    for (const auto& lvl : exp.level_remainders)
        for (const auto& r : lvl)
            if (norm_z(r) != 0.0) CHECK(std::abs(norm_z(r) - 1.0) <= 1e-12);
}
