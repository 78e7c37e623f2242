#include <doctest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <random>

#include "grashof/classify.hpp"
#include "grashof/force.hpp"

using namespace grashof;

namespace {

std::vector<double> geometric_alphas(int count, double base = 10.0, double ratio = 2.0) {
    std::vector<double> a;
    double x = base;
    for (int i = 0; i < count; ++i) {
        x *= ratio;
        a.push_back(x);
    }
    return a;
}

SigmaSequence make_seq(const std::string& name, const std::vector<double>& alphas,
                       const std::function<double(double, int)>& f) {
    SigmaSequence s;
    s.label = SigmaLabel::custom_named(name);
    for (int i = 0; i < static_cast<int>(alphas.size()); ++i) {
        s.values.push_back(f(alphas[static_cast<std::size_t>(i)], i));
        s.alphas.push_back(alphas[static_cast<std::size_t>(i)]);
        s.indices.push_back(i);
    }
    return s;
}

}  // namespace

TEST_CASE("pairwise comparison verdicts") {
    auto alphas = geometric_alphas(30);
    auto one = make_seq("one", alphas, [](double, int) { return 1.0; });
    auto decay1 = make_seq("d1", alphas, [](double a, int) { return 1.0 / a; });
    auto decay2 = make_seq("d2", alphas, [](double a, int) { return 1.0 / (a * a); });

    SUBCASE("identical sequences are comparable with unit limit") {
        Verdict v = compare(one, one);
        CHECK(v.order == Order::similar);
        CHECK(v.lambda == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("clean separation in both directions") {
        CHECK(compare(decay1, decay2).order == Order::succeeds);
        CHECK(compare(decay2, decay1).order == Order::precedes);
        CHECK(compare(one, decay1).order == Order::succeeds);
    }
    SUBCASE("scaling never flips a verdict and only moves the limit") {
        auto scaled = make_seq("s", alphas, [](double a, int) { return 7.3 / a; });
        Verdict v1 = compare(decay1, decay2);
        Verdict v2 = compare(scaled, decay2);
        CHECK(v1.order == v2.order);
        Verdict s1 = compare(decay1, decay1);
        Verdict s2 = compare(scaled, decay1);
        CHECK(s2.order == Order::similar);
        CHECK(s2.lambda == doctest::Approx(7.3 * s1.lambda).epsilon(1e-12));
    }
    SUBCASE("oscillating ratios stay undecided") {
        auto osc = make_seq("osc", alphas, [](double a, int i) { return (i % 2 ? 5.0 : 1.0) / a; });
        CHECK(compare(osc, decay1).order == Order::undecided);
    }
    SUBCASE("too few points") {
        auto a5 = geometric_alphas(4);
        auto x = make_seq("x", a5, [](double a, int) { return a; });
        CHECK(compare(x, x).order == Order::undecided);
    }
}

TEST_CASE("sigma table from synthetic expansions") {
    auto space = ModeSet::ball(3, 4.0);
    std::mt19937_64 rng(3);
    SpectralField w1 = random_field(space, rng);
    SpectralField w2b = random_field(space, rng);
    SpectralField v(space);
    v.set_coefficient(WaveVector(1, 0, 0), {0, Complex{0.4, 0}, 0});
    auto alphas = geometric_alphas(24);

    SUBCASE("inverse-alpha coefficients make alpha*Gamma_1 constant") {
        std::vector<double> g1;
        for (double a : alphas) g1.push_back(1.0 / a);
        UnitaryExpansion exp = convert_pre_unitary(v, {{g1, w1}});
        SigmaTable t = build_sigma_table(exp, alphas, 1);
        auto vd = t.verdict(SigmaLabel::sigma(0), SigmaLabel::sigma(0, 1));
        REQUIRE(vd.has_value());
        CHECK(vd->order == Order::similar);
        CHECK(vd->lambda == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("square-root decay makes the quadratic weight constant") {
        std::vector<double> g1;
        for (double a : alphas) g1.push_back(1.0 / std::sqrt(a));
        UnitaryExpansion exp = convert_pre_unitary(v, {{g1, w1}});
        SigmaTable t = build_sigma_table(exp, alphas, 1);
        auto vd = t.verdict(SigmaLabel::sigma(1, 1), SigmaLabel::sigma(0));
        REQUIRE(vd.has_value());
        CHECK(vd->order == Order::similar);
        CHECK(vd->lambda == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("structural relations of the array hold on a generic table") {
        std::vector<double> g1, g2;
        for (double a : alphas) {
            g1.push_back(3.0 * std::pow(a, -0.8));
            g2.push_back(0.5 * std::pow(a, -1.9));
        }
        UnitaryExpansion exp = convert_pre_unitary(v, {{g1, w1}, {g2, w2b}});
        SigmaTable t = build_sigma_table(exp, alphas, 2);
        // every ordering forced by the array shape
        auto succeeds = [&](SigmaLabel a, SigmaLabel b) {
            auto vd = t.verdict(a, b);
            REQUIRE(vd.has_value());
            CHECK(vd->order == Order::succeeds);
        };
        succeeds(SigmaLabel::sigma(0), SigmaLabel::sigma(1));
        succeeds(SigmaLabel::sigma(1), SigmaLabel::sigma(2));
        succeeds(SigmaLabel::sigma(0, 0), SigmaLabel::sigma(0, 1));
        succeeds(SigmaLabel::sigma(0, 1), SigmaLabel::sigma(0, 2));
        succeeds(SigmaLabel::sigma(1, 1), SigmaLabel::sigma(1, 2));
        succeeds(SigmaLabel::sigma(0, 0), SigmaLabel::sigma(2, 2));
        // antisymmetry across the matrix
        for (int i = 0; i < t.size(); ++i)
            for (int j = 0; j < t.size(); ++j) {
                const Order a = t.verdicts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].order;
                const Order b = t.verdicts[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].order;
                if (a == Order::succeeds) CHECK(b == Order::precedes);
                if (a == Order::similar) CHECK(b == Order::similar);
            }
    }
    SUBCASE("depth overflow is flagged") {
        std::vector<double> g1;
        for (double a : alphas) g1.push_back(1.0 / a);
        UnitaryExpansion exp = convert_pre_unitary(v, {{g1, w1}});
        SigmaTable t = build_sigma_table(exp, alphas, 3);
        CHECK(!t.notes.empty());
        CHECK(t.find(SigmaLabel::sigma(0, 1)) != nullptr);
        CHECK(t.find(SigmaLabel::sigma(0, 2)) == nullptr);
    }
}

TEST_CASE("totalizing subsequences") {
    auto alphas = geometric_alphas(40);
    auto decay1 = make_seq("d1", alphas, [](double a, int) { return 1.0 / a; });
    auto decay2 = make_seq("d2", alphas, [](double a, int) { return 1.0 / (a * a); });

    SUBCASE("already comparable pairs need no drops") {
        TotalizeResult r = totalize({decay1, decay2});
        CHECK(r.complete);
        CHECK(r.kept_positions.size() == alphas.size());
        CHECK(r.table.verdict(decay1.label, decay2.label)->order == Order::succeeds);
    }
    SUBCASE("alternating signs split into a majority class") {
        std::vector<double> chi;
        for (int i = 0; i < static_cast<int>(alphas.size()); ++i)
            chi.push_back((i % 2 ? 1.0 : -1.0) / alphas[static_cast<std::size_t>(i)]);
        TotalizeResult r = totalize({decay1, decay2}, {}, &chi);
        CHECK((r.sign_class == 2 || r.sign_class == 3));
        CHECK(r.complete);
        const SigmaSequence* c = r.table.find(SigmaLabel::chi());
        REQUIRE(c != nullptr);
        for (double x : c->values) CHECK(x > 0);
        CHECK(r.table.verdict(SigmaLabel::chi(), decay1.label)->order == Order::similar);
    }
    SUBCASE("ratio hopping between two constants stays undecided") {
        auto hop = make_seq("hop", alphas, [](double a, int i) { return (i % 2 ? 4.0 : 1.0) / a; });
        TotalizeResult r = totalize({hop, decay1});
        CHECK(!r.complete);
        CHECK(r.diagnostic.find("undecided") != std::string::npos);
    }
}

TEST_CASE("ordinal assignment") {
    auto space = ModeSet::ball(3, 4.0);
    std::mt19937_64 rng(5);
    SpectralField w1 = random_field(space, rng);
    SpectralField w2 = random_field(space, rng);
    SpectralField v(space);
    v.set_coefficient(WaveVector(1, 0, 0), {0, Complex{0.4, 0}, 0});
    auto alphas = geometric_alphas(24);

    SUBCASE("geometric family has the hand-computed classes") {
        std::vector<double> g1, g2;
        for (double a : alphas) {
            g1.push_back(1.0 / a);
            g2.push_back(1.0 / (a * a));
        }
        UnitaryExpansion exp = convert_pre_unitary(v, {{g1, w1}, {g2, w2}});
        SigmaTable t = build_sigma_table(exp, alphas, 2);
        REQUIRE(t.fully_decided());
        OrderReport rep = ordinal_assign(t);
        CHECK(rep.ordinal_of(SigmaLabel::sigma(0, 0)) == 1);
        CHECK(rep.ordinal_of(SigmaLabel::sigma(0)) == 2);
        CHECK(rep.ordinal_of(SigmaLabel::sigma(0, 1)) == 2);
        CHECK(rep.ordinal_of(SigmaLabel::sigma(1)) == 3);
        CHECK(rep.ordinal_of(SigmaLabel::sigma(0, 2)) == 3);
        CHECK(rep.ordinal_of(SigmaLabel::sigma(1, 1)) == 3);
        CHECK(rep.ordinal_of(SigmaLabel::sigma(2)) == 4);
        CHECK(rep.ordinal_of(SigmaLabel::sigma(1, 2)) == 4);
        CHECK(rep.ordinal_of(SigmaLabel::sigma(2, 2)) == 5);
        CHECK(rep.all_bounds_hold);
        CHECK(rep.chain.find("sigma_{0,0}") == 0);
    }
    SUBCASE("single sequence gets ordinal one") {
        SigmaTable t;
        t.sequences.push_back(make_seq("only", alphas, [](double a, int) { return a; }));
        t.recompare();
        OrderReport rep = ordinal_assign(t);
        CHECK(rep.classes.size() == 1);
        CHECK(rep.classes[0].ordinal == 1);
    }
    SUBCASE("undecided tables are rejected") {
        SigmaTable t;
        t.sequences.push_back(make_seq("hop", alphas, [](double a, int i) { return (i % 2 ? 4.0 : 1.0) / a; }));
        t.sequences.push_back(make_seq("d1", alphas, [](double a, int) { return 1.0 / a; }));
        t.recompare();
        CHECK(!t.fully_decided());
        CHECK_THROWS_WITH_AS(ordinal_assign(t), doctest::Contains("totalize first"), std::logic_error);
    }
}

TEST_CASE("fixed-force case detection") {
    auto space = ModeSet::ball(3, 9.0);
    std::mt19937_64 rng(7);
    auto alphas = geometric_alphas(24);

    SUBCASE("constant branch lands in the trivial scenario") {
        SpectralField g(space);
        g.set_coefficient(WaveVector(1, 1, 0), {Complex{0.4, 0.2}, Complex{-0.4, -0.2}, Complex{0.1, 0}});
        g = leray_project(g);
        SpectralField v = stokes_invert(g);
        std::vector<SpectralField> seq(20, v);
        UnitaryExpansion exp = extract_expansion(seq, 2);
        REQUIRE(exp.kind == ExpansionKind::trivial);
        SigmaTable t = build_sigma_table(exp, geometric_alphas(20), 2);
        CaseReport rep = classify_case(g, exp, t);
        CHECK(rep.scenario == "fixed-force(ii)");
        CHECK(rep.residuals.at("Av-g") <= 1e-12);
        CHECK(rep.residuals.at("B(v,v)") <= 1e-12);
    }
    SUBCASE("bounded alpha*Gamma_1 selects the first-order balance") {
        SpectralField v = random_field(space, rng);
        SpectralField w1 = random_field(space, rng);
        std::vector<double> g1;
        for (double a : alphas) g1.push_back(0.78 / a);
        UnitaryExpansion exp = convert_pre_unitary(v, {{g1, w1}});
        SigmaTable t = build_sigma_table(exp, alphas, 2);
        SpectralField g = random_field(space, rng);
        CaseReport rep = classify_case(g, exp, t);
        CHECK(rep.scenario == "fixed-force(iii-c)");
        CHECK(rep.lambdas.at("lambda") == doctest::Approx(0.78).epsilon(1e-10));
        CHECK(rep.residuals.count("Av+lambda*Bs(v,w1)-g") == 1);
    }
    SUBCASE("decaying alpha*Gamma_1 asserts the linear balance") {
        SpectralField v = random_field(space, rng);
        SpectralField w1 = random_field(space, rng);
        std::vector<double> g1;
        for (double a : alphas) g1.push_back(std::pow(a, -1.5));
        UnitaryExpansion exp = convert_pre_unitary(v, {{g1, w1}});
        SigmaTable t = build_sigma_table(exp, alphas, 1);
        SpectralField g = stokes_apply(v);  // make Av = g genuinely
        CaseReport rep = classify_case(g, exp, t);
        // Av = g holds here, so the more specific family fires
        CHECK(rep.scenario.rfind("stokes-limit", 0) == 0);
        SpectralField g2 = random_field(space, rng);
        CaseReport rep2 = classify_case(g2, exp, t);
        CHECK(rep2.scenario == "fixed-force(iii-a)");
        CHECK(!rep2.notes.empty());
    }
    SUBCASE("growing alpha*Gamma_1 asserts first-order orthogonality") {
        SpectralField v = random_field(space, rng);
        SpectralField w1 = random_field(space, rng);
        std::vector<double> g1;
        for (double a : alphas) g1.push_back(std::pow(a, -0.5));
        UnitaryExpansion exp = convert_pre_unitary(v, {{g1, w1}});
        SigmaTable t = build_sigma_table(exp, alphas, 1);
        SpectralField g = random_field(space, rng);
        CaseReport rep = classify_case(g, exp, t);
        CHECK(rep.scenario == "fixed-force(iii-b)");
        CHECK(rep.residuals.count("Bs(v,w1)") == 1);
    }
}

TEST_CASE("zero-limit case detection on a vanishing family") {
    auto space = ModeSet::ball(3, 9.0);
    SpectralField u(space);
    u.set_coefficient(WaveVector(1, 0, 0), {0, Complex{1, 0}, 0});
    u.set_coefficient(WaveVector(0, 1, 0), {0, 0, Complex{1, 0}});
    auto alphas = geometric_alphas(20);
    VanishingPair vp = vanishing_limit_pair(u, 4.0, alphas);

    LimitPolicy pol;
    pol.explicit_limits = {SpectralField(space)};  // the family limit vanishes
    UnitaryExpansion exp = extract_expansion(vp.v, 2, pol);
    REQUIRE(exp.depth == 1);
    CHECK(exp.kind == ExpansionKind::finite);

    SigmaTable t = build_sigma_table(exp, alphas, 2);
    CaseReport rep = classify_case(vp.g, exp, t);
    CHECK(rep.scenario == "zero-limit(ii)");
    CHECK(rep.lambdas.at("lambda_star") == doctest::Approx(norm_z(vp.w1) * norm_z(vp.w1)).epsilon(1e-10));
    CHECK(rep.residuals.at("lambda_star*B(w1,w1)-g") <= 1e-8);
}

TEST_CASE("stokes-limit branch selection") {
    auto space = ModeSet::ball(3, 9.0);
    std::mt19937_64 rng(11);
    SpectralField g = random_field(space, rng);
    SpectralField v = stokes_invert(g);
    SpectralField w1 = random_field(space, rng);
    SpectralField w2 = random_field(space, rng);
    auto alphas = geometric_alphas(24);

    auto classify_with = [&](double p1, double p2) {
        std::vector<double> g1, g2;
        for (double a : alphas) {
            g1.push_back(std::pow(a, p1));
            g2.push_back(std::pow(a, p2));
        }
        UnitaryExpansion exp = convert_pre_unitary(v, {{g1, w1}, {g2, w2}});
        SigmaTable t = build_sigma_table(exp, alphas, 2);
        return classify_case(g, exp, t);
    };
    // sigma_1 = a^p1, sigma_{0,2} = a^{1+p2}, sigma_{1,1} = a^{1+2 p1}
    CHECK(classify_with(-2.0, -2.5).scenario == "stokes-limit(ii)");     // -2, -1.5, -3
    CHECK(classify_with(-0.8, -2.5).scenario == "stokes-limit(iii)");    // -0.8, -1.5, -0.6
    CHECK(classify_with(-1.5, -2.5).scenario == "stokes-limit(iv)");     // -1.5, -1.5, -2
    CHECK(classify_with(-0.75, -1.5).scenario == "stokes-limit(v)");     // -0.75, -0.5, -0.5
    CHECK(classify_with(-1.0, -2.0).scenario == "stokes-limit(vi)");     // -1, -1, -1
}

TEST_CASE("perturbed-force classification") {
    auto space = ModeSet::ball(3, 9.0);
    std::mt19937_64 rng(13);
    auto alphas = geometric_alphas(24);

    SUBCASE("trivial force expansions are rejected") {
        SpectralField g = random_field(space, rng);
        UnitaryExpansion exp_g = convert_pre_unitary(g, {});
        UnitaryExpansion exp_v = convert_pre_unitary(stokes_invert(g), {});
        SigmaTable t = build_sigma_table(exp_v, alphas, 1);
        CHECK_THROWS_AS(classify_perturbed_case(exp_v, exp_g, t), std::invalid_argument);
    }
    SUBCASE("balanced scales reproduce the constructed identity") {
        // single-mode-pair limit keeps B(v,v) = 0
        SpectralField v(space);
        v.set_coefficient(WaveVector(1, 1, 0), {Complex{0.2, 0.1}, Complex{-0.2, -0.1}, Complex{0.05, 0}});
        v = leray_project(v);
        SpectralField w1 = random_field(space, rng);
        const double lambda2 = 0.7;
        SpectralField num = stokes_apply(w1) + lambda2 * bilinear_b(w1, w1);
        const double lambda7 = norm_z(num);
        SpectralField h1 = num;
        h1 *= 1.0 / lambda7;
        SpectralField g = stokes_apply(v) + lambda2 * bilinear_bs(v, w1);

        std::vector<double> g1, hh1;
        for (double a : alphas) {
            g1.push_back(lambda2 / a);
            hh1.push_back(lambda7 * lambda2 / a);
        }
        UnitaryExpansion exp_v = convert_pre_unitary(v, {{g1, w1}});
        UnitaryExpansion exp_g = convert_pre_unitary(g, {{hh1, h1}});
        SigmaTable t = build_sigma_table(exp_v, alphas, 2, {}, &exp_g);
        CaseReport rep = classify_perturbed_case(exp_v, exp_g, t);
        CHECK(rep.scenario == "perturbed-force(v-5)");
        CHECK(rep.chi_class == 1);
        CHECK(rep.lambdas.at("lambda2") == doctest::Approx(lambda2).epsilon(1e-10));
        CHECK(rep.lambdas.at("lambda7") == doctest::Approx(lambda7).epsilon(1e-10));
        CHECK(rep.residuals.at("Av-g+lambda2*Bs(v,w1)") <= 1e-10);
        CHECK(rep.residuals.at("Aw1+lambda6*Bs(v,w1)+lambda2*B(w1,w1)-lambda7*h1") <= 1e-10);
        bool centering_note = false;
        for (const auto& n : rep.notes)
            if (n.find("centered") != std::string::npos) centering_note = true;
        CHECK(centering_note);
    }
    SUBCASE("dominating alpha*Gamma_1 gives first-order orthogonality") {
        SpectralField v(space);
        v.set_coefficient(WaveVector(1, 1, 0), {Complex{0.2, 0.1}, Complex{-0.2, -0.1}, Complex{0.05, 0}});
        v = leray_project(v);
        SpectralField w1 = random_field(space, rng);
        SpectralField g = random_field(space, rng);
        SpectralField h1 = random_field(space, rng);
        std::vector<double> g1, hh1;
        for (double a : alphas) {
            g1.push_back(std::pow(a, -0.5));
            hh1.push_back(std::pow(a, -0.5));
        }
        UnitaryExpansion exp_v = convert_pre_unitary(v, {{g1, w1}});
        UnitaryExpansion exp_g = convert_pre_unitary(g, {{hh1, h1}});
        SigmaTable t = build_sigma_table(exp_v, alphas, 2, {}, &exp_g);
        CaseReport rep = classify_perturbed_case(exp_v, exp_g, t);
        CHECK(rep.scenario == "perturbed-force(iii)");
        CHECK(rep.residuals.count("Bs(v,w1)") == 1);
    }
}

TEST_CASE("case report text and csv writers") {
    auto space = ModeSet::ball(3, 4.0);
    std::mt19937_64 rng(17);
    SpectralField v(space);
    v.set_coefficient(WaveVector(1, 0, 0), {0, Complex{0.4, 0}, 0});
    auto alphas = geometric_alphas(20);
    std::vector<double> g1;
    for (double a : alphas) g1.push_back(1.0 / a);
    UnitaryExpansion exp = convert_pre_unitary(v, {{g1, random_field(space, rng)}});
    SigmaTable t = build_sigma_table(exp, alphas, 1);
    CaseReport rep = classify_case(random_field(space, rng), exp, t);
    CHECK(rep.text().find("scenario:") != std::string::npos);

    write_sigma_csv("/tmp/grashof_test_sigma.csv", t);
    std::ifstream is("/tmp/grashof_test_sigma.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "n,alpha,sigma_0,sigma_0_0,sigma_1,sigma_0_1,sigma_1_1");
    int rows = 0;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == static_cast<int>(alphas.size()));
}

TEST_CASE("order balances of a constructed plan are matched term by term") {
    auto space = ModeSet::ball(3, 9.0);
    std::mt19937_64 rng(19);
    SpectralField w0(space);
    w0.set_coefficient(WaveVector(1, 0, 0), {0, Complex{0.7, 0.1}, Complex{-0.2, 0.3}});
    w0 = leray_project(w0);
    w0 *= 1.0 / norm_h(w0);
    ForceExpansionPlan plan = build_force_expansion(w0, 1.0, 2.0, 3, 555);

    std::vector<double> alphas;
    double a = 10;
    for (int i = 0; i < 16; ++i) alphas.push_back(a *= 2.0);
    std::vector<std::pair<std::vector<double>, SpectralField>> vterms, gterms;
    for (int k = 1; k <= plan.depth(); ++k) {
        std::vector<double> gam;
        for (double al : alphas) gam.push_back(std::pow(al, -k));
        vterms.emplace_back(gam, plan.w[static_cast<std::size_t>(k)]);
        gterms.emplace_back(gam, plan.h[static_cast<std::size_t>(k)]);
    }
    UnitaryExpansion exp_v = convert_pre_unitary(plan.w[0], vterms, NormKind::h);
    UnitaryExpansion exp_g = convert_pre_unitary(plan.h[0], gterms, NormKind::h);
    std::vector<double> res = order_balance_residuals(exp_v, exp_g, alphas, plan.depth() - 1);
    REQUIRE(res.size() == static_cast<std::size_t>(plan.depth()));
    for (double r : res) CHECK(r <= 1e-12);
}

TEST_CASE("perturbed classifier on a vanishing-limit family") {
    auto space = ModeSet::ball(3, 9.0);
    SpectralField u(space);
    u.set_coefficient(WaveVector(1, 0, 0), {0, Complex{1, 0}, 0});
    u.set_coefficient(WaveVector(0, 1, 0), {0, 0, Complex{1, 0}});
    std::vector<double> alphas;
    double a = 10;
    for (int i = 0; i < 20; ++i) alphas.push_back(a *= 2.0);
    VanishingPair vp = vanishing_limit_pair(u, 4.0, alphas);

    LimitPolicy vzero;
    vzero.explicit_limits = {SpectralField(space)};
    UnitaryExpansion exp_v = extract_expansion(vp.v, 2, vzero);
    LimitPolicy glim;
    glim.explicit_limits = {vp.g};
    UnitaryExpansion exp_g = extract_expansion(vp.gn, 2, glim);
    REQUIRE(exp_v.kind == ExpansionKind::finite);
    REQUIRE(exp_g.depth == 1);

    SigmaTable t = build_sigma_table(exp_v, alphas, 2, {}, &exp_g);
    CaseReport rep = classify_perturbed_case(exp_v, exp_g, t);
    CHECK(rep.scenario == "perturbed-force(iii)");
    CHECK(rep.residuals.at("Bs(v,w1)") <= 1e-12);
    // the force level trails alpha*Gamma_1, so its coefficient limit vanishes
    const SigmaSequence* s01 = t.find(SigmaLabel::sigma(0, 1));
    const SigmaSequence* b1 = t.find(SigmaLabel::beta(1));
    REQUIRE(s01 != nullptr);
    REQUIRE(b1 != nullptr);
    CHECK(compare(*b1, *s01).order == Order::precedes);
}

TEST_CASE("plan-generated families satisfy the detected balanced-branch identity") {
    auto space = ModeSet::ball(3, 9.0);
    SpectralField w0(space);
    w0.set_coefficient(WaveVector(1, 0, 0), {0, Complex{0.8, 0.0}, Complex{0.1, -0.3}});
    w0 = leray_project(w0);
    w0 *= 1.0 / norm_h(w0);
    ForceExpansionPlan plan = build_force_expansion(w0, 1.0, 2.0, 4, 321);

    std::vector<double> alphas;
    double a = 10;
    for (int i = 0; i < 18; ++i) alphas.push_back(a *= 2.0);
    std::vector<std::pair<std::vector<double>, SpectralField>> vterms, gterms;
    for (int k = 1; k <= plan.depth(); ++k) {
        std::vector<double> gam;
        for (double al : alphas) gam.push_back(std::pow(al, -k));
        vterms.emplace_back(gam, plan.w[static_cast<std::size_t>(k)]);
        gterms.emplace_back(gam, plan.h[static_cast<std::size_t>(k)]);
    }
    UnitaryExpansion exp_v = convert_pre_unitary(plan.w[0], vterms, NormKind::h);
    UnitaryExpansion exp_g = convert_pre_unitary(plan.h[0], gterms, NormKind::h);
    SigmaTable t = build_sigma_table(exp_v, alphas, 2, {}, &exp_g);
    CaseReport rep = classify_perturbed_case(exp_v, exp_g, t);
    CHECK(rep.scenario == "perturbed-force(v-5)");
    CHECK(rep.chi_class == 1);
    CHECK(rep.lambdas.at("lambda2") == doctest::Approx(norm_h(plan.w[1])).epsilon(1e-10));
    const double scale = norm_z(exp_g.limit);
    CHECK(rep.residuals.at("Aw1+lambda6*Bs(v,w1)+lambda2*B(w1,w1)+lambda8*Bs(v,w2)-lambda7*h1") <= 1e-8 * scale);
    CHECK(rep.residuals.at("Av-g+lambda2*Bs(v,w1)") <= 1e-8 * scale);
}
