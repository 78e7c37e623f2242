#include "grashof/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace grashof {

std::string SigmaLabel::str() const {
    switch (kind) {
        case Kind::sigma_k: return "sigma_" + std::to_string(k);
        case Kind::sigma_jk: return "sigma_{" + std::to_string(j) + "," + std::to_string(k) + "}";
        case Kind::beta_k: return "beta_" + std::to_string(k);
        case Kind::chi: return "chi";
        case Kind::custom: return name;
    }
    return "?";
}

namespace {

std::string csv_label(const SigmaLabel& l) {
    if (l.kind == SigmaLabel::Kind::sigma_jk)
        return "sigma_" + std::to_string(l.j) + "_" + std::to_string(l.k);
    std::string s = l.str();
    for (char& c : s)
        if (c == ',' || c == '{' || c == '}') c = '_';
    return s;
}

}  // namespace

std::string to_string(Order o) {
    switch (o) {
        case Order::precedes: return "<";
        case Order::similar: return "~";
        case Order::succeeds: return ">";
        case Order::undecided: return "?";
    }
    return "?";
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

Verdict compare(const SigmaSequence& xi, const SigmaSequence& eta, const ComparePolicy& policy) {
    if (xi.values.size() != eta.values.size() || xi.alphas.size() != xi.values.size())
        throw std::invalid_argument("sequences are not index-aligned");
    Verdict v;
    const std::size_t n = xi.values.size();
    if (static_cast<int>(n) < policy.min_points) return v;

    const double la0 = std::log(xi.alphas.front());
    const double la1 = std::log(xi.alphas.back());
    const double span = la1 - la0;
    const double wlo = la0 + policy.window_lo * span;
    const double whi = la0 + policy.window_hi * span;

    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) {
        const double la = std::log(xi.alphas[i]);
        if (la < wlo || la > whi) continue;
        if (!(xi.values[i] > 0) || !(eta.values[i] > 0)) throw std::invalid_argument("sequences must be positive");
        x.push_back(la);
        y.push_back(std::log(xi.values[i] / eta.values[i]));
    }
    v.points = static_cast<int>(x.size());
    if (v.points < policy.min_points) return v;

    const double mx = mean_of(x), my = mean_of(y);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    v.slope = (sxx > 0) ? sxy / sxx : 0.0;
    v.dispersion = std::expm1(std::sqrt(syy / static_cast<double>(y.size())));
    v.lambda = std::exp(my);

    if (v.slope > policy.slope_threshold)
        v.order = Order::succeeds;
    else if (v.slope < -policy.slope_threshold)
        v.order = Order::precedes;
    else if (v.dispersion <= policy.plateau_dispersion)
        v.order = Order::similar;
    else
        v.order = Order::undecided;
    return v;
}

const SigmaSequence* SigmaTable::find(const SigmaLabel& l) const {
    for (const auto& s : sequences)
        if (s.label == l) return &s;
    return nullptr;
}

std::optional<Verdict> SigmaTable::verdict(const SigmaLabel& a, const SigmaLabel& b) const {
    int ia = -1, ib = -1;
    for (int i = 0; i < size(); ++i) {
        if (sequences[static_cast<std::size_t>(i)].label == a) ia = i;
        if (sequences[static_cast<std::size_t>(i)].label == b) ib = i;
    }
    if (ia < 0 || ib < 0) return std::nullopt;
    return verdicts[static_cast<std::size_t>(ia)][static_cast<std::size_t>(ib)];
}

bool SigmaTable::fully_decided() const {
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j)
            if (verdicts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].order == Order::undecided) return false;
    return true;
}

void SigmaTable::recompare() {
    const int n = size();
    verdicts.assign(static_cast<std::size_t>(n), std::vector<Verdict>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) {
        verdicts[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = Verdict{Order::similar, 1.0, 0.0, 0.0, 0};
        for (int j = i + 1; j < n; ++j) {
            Verdict v = compare(sequences[static_cast<std::size_t>(i)], sequences[static_cast<std::size_t>(j)], policy);
            verdicts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            Verdict r = v;
            if (v.order == Order::succeeds) r.order = Order::precedes;
            else if (v.order == Order::precedes) r.order = Order::succeeds;
            if (v.order == Order::similar && v.lambda != 0) r.lambda = 1.0 / v.lambda;
            r.slope = -v.slope;
            verdicts[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = r;
        }
    }
}

SigmaTable build_sigma_table(const UnitaryExpansion& exp, const std::vector<double>& alphas, int k_max,
                             const ComparePolicy& policy, const UnitaryExpansion* force_exp) {
    SigmaTable t;
    t.policy = policy;
    const int k_eff = std::min(k_max, exp.depth);
    if (k_eff < k_max)
        t.notes.push_back("k_max " + std::to_string(k_max) + " exceeds the expansion depth; truncated at " +
                          std::to_string(k_eff));

    std::vector<double> al, ones;
    std::vector<int> idx;
    for (int n : exp.retained) {
        if (n < 0 || n >= static_cast<int>(alphas.size())) throw std::invalid_argument("retained index without alpha");
        al.push_back(alphas[static_cast<std::size_t>(n)]);
        ones.push_back(1.0);
        idx.push_back(n);
    }

    auto push = [&](SigmaLabel l, std::vector<double> v) {
        t.sequences.push_back({std::move(l), std::move(v), al, idx});
    };

    push(SigmaLabel::sigma(0), ones);
    push(SigmaLabel::sigma(0, 0), al);
    for (int k = 1; k <= k_eff; ++k) {
        const auto& gk = exp.gammas[static_cast<std::size_t>(k - 1)];
        push(SigmaLabel::sigma(k), gk);
        std::vector<double> w(gk.size());
        for (std::size_t p = 0; p < gk.size(); ++p) w[p] = al[p] * gk[p];
        push(SigmaLabel::sigma(0, k), w);
    }
    for (int j = 1; j <= k_eff; ++j)
        for (int k = j; k <= k_eff; ++k) {
            const auto& gj = exp.gammas[static_cast<std::size_t>(j - 1)];
            const auto& gk = exp.gammas[static_cast<std::size_t>(k - 1)];
            std::vector<double> w(gj.size());
            for (std::size_t p = 0; p < gj.size(); ++p) w[p] = al[p] * gj[p] * gk[p];
            push(SigmaLabel::sigma(j, k), w);
        }
    if (force_exp) {
        if (force_exp->retained != exp.retained)
            throw std::invalid_argument("force expansion is not aligned with the state expansion");
        for (int k = 1; k <= std::min(k_max, force_exp->depth); ++k)
            push(SigmaLabel::beta(k), force_exp->gammas[static_cast<std::size_t>(k - 1)]);
    }
    t.recompare();
    return t;
}

namespace {

SigmaSequence restrict_to(const SigmaSequence& s, const std::vector<int>& pos) {
    SigmaSequence r;
    r.label = s.label;
    for (int p : pos) {
        r.values.push_back(s.values[static_cast<std::size_t>(p)]);
        r.alphas.push_back(s.alphas[static_cast<std::size_t>(p)]);
        r.indices.push_back(s.indices[static_cast<std::size_t>(p)]);
    }
    return r;
}

}  // namespace

TotalizeResult totalize(const std::vector<SigmaSequence>& sequences, const ComparePolicy& policy,
                        const std::vector<double>* signed_array, int floor_len) {
    if (sequences.size() < 1) throw std::invalid_argument("nothing to totalize");
    const std::size_t len = sequences.front().values.size();
    for (const auto& s : sequences)
        if (s.values.size() != len) throw std::invalid_argument("sequences are not index-aligned");

    TotalizeResult res;
    std::vector<int> pos(len);
    std::iota(pos.begin(), pos.end(), 0);

    std::vector<double> chi_abs;
    if (signed_array) {
        if (signed_array->size() != len) throw std::invalid_argument("signed array is not index-aligned");
        double amax = 0;
        for (double y : *signed_array) amax = std::max(amax, std::abs(y));
        const double ztol = 1e-12 * (1.0 + amax);
        std::vector<int> zero, plus, minus;
        for (std::size_t i = 0; i < len; ++i) {
            const double y = (*signed_array)[i];
            if (std::abs(y) <= ztol) zero.push_back(static_cast<int>(i));
            else if (y > 0) plus.push_back(static_cast<int>(i));
            else minus.push_back(static_cast<int>(i));
        }
        if (zero.size() == len) {
            res.sign_class = 1;  // identically zero; chi never enters the table
        } else if (plus.size() >= minus.size()) {
            res.sign_class = 2;
            pos = plus;
        } else {
            res.sign_class = 3;
            pos = minus;
        }
        if (res.sign_class != 1)
            for (int p : pos) chi_abs.push_back(std::abs((*signed_array)[static_cast<std::size_t>(p)]));
    }

    SigmaTable t;
    t.policy = policy;
    for (const auto& s : sequences) t.sequences.push_back(restrict_to(s, pos));
    if (!chi_abs.empty()) {
        SigmaSequence chi;
        chi.label = SigmaLabel::chi();
        chi.values = chi_abs;
        chi.alphas = t.sequences.front().alphas;
        chi.indices = t.sequences.front().indices;
        t.sequences.push_back(std::move(chi));
    }
    t.recompare();

    while (!t.fully_decided() && static_cast<int>(pos.size()) > floor_len) {
        const std::size_t drop = std::max<std::size_t>(1, pos.size() / 10);
        pos.erase(pos.begin(), pos.begin() + static_cast<long>(drop));
        for (auto& s : t.sequences) {
            s.values.erase(s.values.begin(), s.values.begin() + static_cast<long>(drop));
            s.alphas.erase(s.alphas.begin(), s.alphas.begin() + static_cast<long>(drop));
            s.indices.erase(s.indices.begin(), s.indices.begin() + static_cast<long>(drop));
        }
        t.recompare();
    }
    res.complete = t.fully_decided();
    if (!res.complete) {
        for (int i = 0; i < t.size() && res.diagnostic.empty(); ++i)
            for (int j = i + 1; j < t.size(); ++j)
                if (t.verdicts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].order == Order::undecided) {
                    res.diagnostic = "undecided pair after reaching the retained-length floor: " +
                                     t.sequences[static_cast<std::size_t>(i)].label.str() + " vs " +
                                     t.sequences[static_cast<std::size_t>(j)].label.str();
                    break;
                }
    }
    res.table = std::move(t);
    res.kept_positions = std::move(pos);
    return res;
}

int OrderReport::ordinal_of(const SigmaLabel& l) const {
    for (const auto& c : classes)
        for (const auto& m : c.members)
            if (m == l) return c.ordinal;
    return 0;
}

OrderReport ordinal_assign(const SigmaTable& table) {
    if (!table.fully_decided()) throw std::logic_error("totalize first: table has undecided pairs");
    const int n = table.size();
    auto ord = [&](int i, int j) { return table.verdicts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].order; };

    // equivalence classes under ~
    std::vector<int> cls(static_cast<std::size_t>(n), -1);
    int nc = 0;
    for (int i = 0; i < n; ++i) {
        if (cls[static_cast<std::size_t>(i)] >= 0) continue;
        cls[static_cast<std::size_t>(i)] = nc;
        for (int j = i + 1; j < n; ++j)
            if (ord(i, j) == Order::similar) {
                if (cls[static_cast<std::size_t>(j)] >= 0 && cls[static_cast<std::size_t>(j)] != nc)
                    throw std::logic_error("verdicts are not transitive");
                cls[static_cast<std::size_t>(j)] = nc;
            }
        ++nc;
    }
    // class order: count dominating classes; verdicts between members must agree
    std::vector<std::vector<int>> members(static_cast<std::size_t>(nc));
    for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(cls[static_cast<std::size_t>(i)])].push_back(i);
    std::vector<int> above(static_cast<std::size_t>(nc), 0);
    for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) {
            if (a == b) continue;
            Order first = Order::undecided;
            for (int i : members[static_cast<std::size_t>(a)])
                for (int j : members[static_cast<std::size_t>(b)]) {
                    const Order o = ord(i, j);
                    if (o == Order::similar) throw std::logic_error("verdicts are not transitive");
                    if (first == Order::undecided) first = o;
                    else if (o != first) throw std::logic_error("verdicts are not transitive");
                }
            if (first == Order::precedes) ++above[static_cast<std::size_t>(a)];
        }
    OrderReport rep;
    std::vector<int> order_of_class(static_cast<std::size_t>(nc));
    std::iota(order_of_class.begin(), order_of_class.end(), 0);
    std::sort(order_of_class.begin(), order_of_class.end(),
              [&](int a, int b) { return above[static_cast<std::size_t>(a)] < above[static_cast<std::size_t>(b)]; });
    for (int r = 0; r < nc; ++r) {
        if (above[static_cast<std::size_t>(order_of_class[static_cast<std::size_t>(r)])] != r)
            throw std::logic_error("verdicts are not transitive");
        OrdinalClass oc;
        oc.ordinal = r + 1;
        for (int i : members[static_cast<std::size_t>(order_of_class[static_cast<std::size_t>(r)])])
            oc.members.push_back(table.sequences[static_cast<std::size_t>(i)].label);
        rep.classes.push_back(std::move(oc));
    }

    std::ostringstream chain;
    for (std::size_t c = 0; c < rep.classes.size(); ++c) {
        if (c) chain << " > ";
        for (std::size_t m = 0; m < rep.classes[c].members.size(); ++m) {
            if (m) chain << " ~ ";
            chain << rep.classes[c].members[m].str();
        }
    }
    rep.chain = chain.str();

    auto add_check = [&](std::string name, int o, bool holds, std::string detail) {
        rep.checks.push_back({std::move(name), o, holds, std::move(detail)});
        rep.all_bounds_hold = rep.all_bounds_hold && rep.checks.back().holds;
    };
    for (const auto& s : table.sequences) {
        const SigmaLabel& l = s.label;
        const int o = rep.ordinal_of(l);
        if (l.kind == SigmaLabel::Kind::sigma_jk && l.j == 0 && l.k == 0) {
            add_check("ord(" + l.str() + ") = 1", o, o == 1, "");
        } else if (l.kind == SigmaLabel::Kind::sigma_jk && l.j == 0) {
            const int ub = l.k * (l.k + 3) / 2 + 1;
            add_check(std::to_string(l.k) + " < ord(" + l.str() + ") <= " + std::to_string(ub), o,
                      l.k < o && o <= ub, "");
        } else if (l.kind == SigmaLabel::Kind::sigma_jk) {
            add_check(std::to_string(l.j + l.k) + " < ord(" + l.str() + ")", o, l.j + l.k < o,
                      "upper bound omega*" + std::to_string(2 * l.j) + " + " +
                          std::to_string((l.k - l.j) * (l.k - l.j + 1) / 2) + " is transfinite (symbolic only)");
        } else if (l.kind == SigmaLabel::Kind::sigma_k) {
            add_check(std::to_string(l.k + 1) + " < ord(" + l.str() + ")", o, l.k + 1 < o,
                      "upper bound omega^2 + " + std::to_string(l.k) + " is transfinite (symbolic only)");
        }
    }
    add_check("every equivalence class is finite", 0, true, "finite table");
    return rep;
}

namespace {

double mean_log(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += std::log(x);
    return s / static_cast<double>(v.size());
}

// geometric-mean ratio limit over the trend window
double ratio_limit(const SigmaSequence& num, const SigmaSequence& den, const ComparePolicy& pol) {
    const double la0 = std::log(num.alphas.front());
    const double span = std::log(num.alphas.back()) - la0;
    std::vector<double> r;
    for (std::size_t i = 0; i < num.values.size(); ++i) {
        const double la = std::log(num.alphas[i]);
        if (la < la0 + pol.window_lo * span || la > la0 + pol.window_hi * span) continue;
        r.push_back(num.values[i] / den.values[i]);
    }
    if (r.empty()) return 0;
    return std::exp(mean_log(r));
}

}  // namespace

std::string CaseReport::text() const {
    std::ostringstream os;
    os << "scenario: " << scenario << "\n";
    os << "identity: " << description << "\n";
    for (const auto& [k, v] : lambdas) os << "lambda " << k << " = " << format_double(v) << "\n";
    for (const auto& [k, v] : residuals) os << "residual |" << k << "| = " << format_double(v) << "\n";
    if (chi) os << "chi sign class: S" << chi_class << "\n";
    for (const auto& n : notes) os << "note: " << n << "\n";
    return os.str();
}

namespace {

struct CaseContext {
    const SpectralField* g;
    const UnitaryExpansion* exp;
    const SigmaTable* table;
    ComparePolicy pol;
    CaseReport* rep;

    const SpectralField& v() const { return exp->limit; }
    const SpectralField* w(int k) const {
        if (k > exp->depth) return nullptr;
        return &exp->directions[static_cast<std::size_t>(k - 1)];
    }
    std::optional<Verdict> verdict(const SigmaLabel& a, const SigmaLabel& b) const { return table->verdict(a, b); }
    void residual(const std::string& name, double zval) const { rep->residuals[name] = zval; }
    void lambda(const std::string& name, double val) const { rep->lambdas[name] = val; }
    void note(const std::string& n) const { rep->notes.push_back(n); }
};

std::string policy_echo(const ComparePolicy& p) {
    std::ostringstream os;
    os << "policy: window=[" << format_double(p.window_lo) << "," << format_double(p.window_hi)
       << "] slope_threshold=" << format_double(p.slope_threshold)
       << " plateau_dispersion=" << format_double(p.plateau_dispersion) << " min_points=" << p.min_points;
    return os.str();
}

// chi_n = 1 - alpha_n Gamma_{1,n}^2 / lambda_star, sign-classified by the
// subsequence split; returns verdict helpers on the kept subsequence.
struct ChiSplit {
    int sign_class = 0;
    SigmaSequence chi;
    SigmaTable table;
    bool complete = false;
};

ChiSplit chi_split(const CaseContext& cx, double lambda_star) {
    const SigmaSequence* s11 = cx.table->find(SigmaLabel::sigma(1, 1));
    std::vector<double> chi(s11->values.size());
    for (std::size_t i = 0; i < chi.size(); ++i) chi[i] = 1.0 - s11->values[i] / lambda_star;
    TotalizeResult tr = totalize(cx.table->sequences, cx.pol, &chi);
    ChiSplit out;
    out.sign_class = tr.sign_class;
    out.complete = tr.complete;
    if (const SigmaSequence* c = tr.table.find(SigmaLabel::chi())) out.chi = *c;
    out.table = std::move(tr.table);
    return out;
}

void classify_zero_limit(CaseContext& cx) {
    CaseReport& rep = *cx.rep;
    const SpectralField* w1 = cx.w(1);
    if (!w1) {
        rep.scenario = "zero-limit(indeterminate)";
        rep.description = "zero limit but no usable first direction";
        return;
    }
    auto v11 = cx.verdict(SigmaLabel::sigma(1, 1), SigmaLabel::sigma(0));
    if (!v11 || v11->order == Order::undecided) {
        rep.scenario = "indeterminate";
        rep.description = "blocking pair sigma_{1,1} vs sigma_0";
        return;
    }
    if (v11->order == Order::precedes) {
        rep.scenario = "zero-limit(contradiction)";
        rep.description = "sigma_0 dominates sigma_{1,1}, which forces g = 0";
        return;
    }
    const SpectralField* w2 = cx.w(2);
    if (v11->order == Order::succeeds) {
        cx.residual("B(w1,w1)", norm_z(bilinear_b(*w1, *w1)));
        auto v12 = cx.verdict(SigmaLabel::sigma(1, 2), SigmaLabel::sigma(0));
        if (!w2 || !v12 || v12->order == Order::undecided) {
            rep.scenario = "zero-limit(i)";
            rep.description = "B(w1,w1) = 0; second-level comparison unavailable";
            if (!w2) cx.note("direction w2 unavailable at this depth");
            return;
        }
        if (v12->order == Order::succeeds) {
            rep.scenario = "zero-limit(i-1)";
            rep.description = "B(w1,w1) = 0 and Bs(w1,w2) = 0";
            cx.residual("Bs(w1,w2)", norm_z(bilinear_bs(*w1, *w2)));
        } else if (v12->order == Order::similar) {
            rep.scenario = "zero-limit(i-2)";
            rep.description = "B(w1,w1) = 0 and lambda*Bs(w1,w2) = g with <g,w1> = 0";
            cx.lambda("lambda", v12->lambda);
            SpectralField lhs = bilinear_bs(*w1, *w2);
            lhs *= v12->lambda;
            cx.residual("lambda*Bs(w1,w2)-g", norm_z(lhs - *cx.g));
            cx.residual("<g,w1>", std::abs(inner_z(*cx.g, *w1)));
        } else {
            rep.scenario = "zero-limit(contradiction)";
            rep.description = "sigma_0 dominates sigma_{1,2}, which forces g = 0";
        }
        return;
    }
    // sigma_{1,1} ~ sigma_0
    const double lambda_star = v11->lambda;
    cx.lambda("lambda_star", lambda_star);
    SpectralField b11 = bilinear_b(*w1, *w1);
    {
        SpectralField lhs = b11;
        lhs *= lambda_star;
        cx.residual("lambda_star*B(w1,w1)-g", norm_z(lhs - *cx.g));
    }
    rep.scenario = "zero-limit(ii)";
    rep.description = "lambda_star*B(w1,w1) = g";
    ChiSplit cs = chi_split(cx, lambda_star);
    rep.chi_class = cs.sign_class;
    if (cs.sign_class >= 2) rep.chi = cs.chi;
    if (!cs.complete) cx.note("sign-split subsequence could not be fully ordered");

    if (!w2) {
        cx.note("direction w2 unavailable at this depth; sub-branch not classified");
        return;
    }
    auto v02 = cs.table.verdict(SigmaLabel::sigma(0, 2), SigmaLabel::sigma(0));
    if (!v02 || v02->order == Order::undecided) {
        cx.note("blocking pair sigma_{0,2} vs sigma_0");
        return;
    }
    const bool chi_zero = (cs.sign_class == 1);
    auto chi_vs = [&](const SigmaLabel& other) -> std::optional<Verdict> {
        if (chi_zero) return std::nullopt;
        return cs.table.verdict(SigmaLabel::chi(), other);
    };
    const double chi_sign = (cs.sign_class == 3) ? -1.0 : 1.0;

    if (v02->order == Order::similar) {
        const double lambda02 = v02->lambda;  // lim alpha Gamma_2
        auto vx = chi_vs(SigmaLabel::sigma(1));
        const bool dominated = chi_zero || (vx && vx->order == Order::precedes);
        if (!chi_zero && vx && vx->order == Order::succeeds) {
            rep.scenario = "zero-limit(contradiction)";
            rep.description = "|chi| dominates Gamma_1, which forces g = 0";
            return;
        }
        if (dominated) {
            rep.scenario = "zero-limit(ii-1b)";
            rep.description = "Aw1 + lambda2*Bs(w1,w2) = 0 and lambda_star*||w1||^2 = lambda2*<g,w2>";
            cx.lambda("lambda2", lambda02);
            SpectralField lhs = stokes_apply(*w1);
            SpectralField t = bilinear_bs(*w1, *w2);
            t *= lambda02;
            lhs += t;
            cx.residual("Aw1+lambda2*Bs(w1,w2)", norm_z(lhs));
            const double scalar = lambda_star * norm_v(*w1) * norm_v(*w1) - lambda02 * inner_h(*cx.g, *w2);
            cx.residual("lambda_star*||w1||^2-lambda2*<g,w2>", std::abs(scalar));
        } else if (vx && vx->order == Order::similar) {
            rep.scenario = "zero-limit(ii-1a)";
            rep.description = "lambda1*Aw1 + lambda2*Bs(w1,w2) = g with lambda1*lambda2 > 0";
            const double lchi = chi_sign * vx->lambda;  // lim chi / Gamma_1
            const double l1 = 1.0 / lchi;
            const double l2 = lambda02 / lchi;
            cx.lambda("lambda1", l1);
            cx.lambda("lambda2", l2);
            SpectralField lhs = stokes_apply(*w1);
            lhs *= l1;
            SpectralField t = bilinear_bs(*w1, *w2);
            t *= l2;
            lhs += t;
            cx.residual("lambda1*Aw1+lambda2*Bs(w1,w2)-g", norm_z(lhs - *cx.g));
            const double scalar = lambda_star * l1 * norm_v(*w1) * norm_v(*w1) - l2 * inner_h(*cx.g, *w2);
            cx.residual("lambda_star*lambda1*||w1||^2-lambda2*<g,w2>", std::abs(scalar));
        } else {
            cx.note("blocking pair chi vs sigma_1 in the sign-split table");
        }
        return;
    }
    // sigma_{0,2} > sigma_0
    auto vx = chi_vs(SigmaLabel::sigma(1, 2));
    const bool dominated = chi_zero || (vx && vx->order == Order::precedes);
    if (!chi_zero && vx && vx->order == Order::succeeds) {
        rep.scenario = "zero-limit(contradiction)";
        rep.description = "|chi| dominates alpha*Gamma_1*Gamma_2, which forces g = 0";
        return;
    }
    if (dominated) {
        rep.scenario = "zero-limit(ii-2b)";
        rep.description = "Bs(w1,w2) = 0 with <g,w2> = <B(w2,w2),w1> = 0";
        cx.residual("Bs(w1,w2)", norm_z(bilinear_bs(*w1, *w2)));
    } else if (vx && vx->order == Order::similar) {
        rep.scenario = "zero-limit(ii-2a)";
        rep.description = "lambda2*Bs(w1,w2) = g with <g,w2> = <B(w2,w2),w1> = 0";
        const SigmaSequence* s12 = cs.table.find(SigmaLabel::sigma(1, 2));
        const SigmaSequence* schi = cs.table.find(SigmaLabel::chi());
        const double l2 = chi_sign * ratio_limit(*s12, *schi, cx.pol);
        cx.lambda("lambda2", l2);
        SpectralField lhs = bilinear_bs(*w1, *w2);
        lhs *= l2;
        cx.residual("lambda2*Bs(w1,w2)-g", norm_z(lhs - *cx.g));
    } else {
        cx.note("blocking pair chi vs sigma_{1,2} in the sign-split table");
        return;
    }
    cx.residual("<g,w2>", std::abs(inner_z(*cx.g, *w2)));
    cx.residual("<B(w2,w2),w1>", std::abs(inner_z(bilinear_b(*w2, *w2), *w1)));
}

void classify_stokes_limit(CaseContext& cx) {
    CaseReport& rep = *cx.rep;
    const SpectralField* w1 = cx.w(1);
    const SpectralField* w2 = cx.w(2);
    cx.residual("Bs(v,w1)", norm_z(bilinear_bs(cx.v(), *w1)));
    if (!w2) {
        rep.scenario = "stokes-limit(indeterminate)";
        rep.description = "Bs(v,w1) = 0; second direction unavailable";
        cx.note("direction w2 unavailable at this depth");
        return;
    }
    auto v1_02 = cx.verdict(SigmaLabel::sigma(1), SigmaLabel::sigma(0, 2));
    auto v1_11 = cx.verdict(SigmaLabel::sigma(1), SigmaLabel::sigma(1, 1));
    auto v02_11 = cx.verdict(SigmaLabel::sigma(0, 2), SigmaLabel::sigma(1, 1));
    if (!v1_02 || !v1_11 || !v02_11 || v1_02->order == Order::undecided || v1_11->order == Order::undecided ||
        v02_11->order == Order::undecided) {
        rep.scenario = "indeterminate";
        rep.description = "blocking pairs among sigma_1, sigma_{0,2}, sigma_{1,1}";
        return;
    }
    const Order a = v1_02->order, b = v1_11->order, c = v02_11->order;
    if ((a == Order::succeeds && b == Order::succeeds) ||
        (b == Order::similar && a == Order::succeeds)) {
        rep.scenario = "stokes-limit(i)";
        rep.description = "impossible ordering detected: sigma_1 dominates the bilinear scales";
        cx.note("data contradicts the steady-state structure");
        return;
    }
    if (a == Order::precedes && c == Order::succeeds) {
        rep.scenario = "stokes-limit(ii)";
        rep.description = "Bs(v,w2) = 0";
        cx.residual("Bs(v,w2)", norm_z(bilinear_bs(cx.v(), *w2)));
    } else if (b == Order::precedes && c == Order::precedes) {
        rep.scenario = "stokes-limit(iii)";
        rep.description = "B(w1,w1) = 0";
        cx.residual("B(w1,w1)", norm_z(bilinear_b(*w1, *w1)));
    } else if (a == Order::similar && c == Order::succeeds) {
        rep.scenario = "stokes-limit(iv)";
        rep.description = "Aw1 + lambda*Bs(v,w2) = 0";
        const double l = 1.0 / v1_02->lambda;  // lim alpha Gamma_2 / Gamma_1
        cx.lambda("lambda", l);
        SpectralField lhs = stokes_apply(*w1);
        SpectralField t = bilinear_bs(cx.v(), *w2);
        t *= l;
        lhs += t;
        cx.residual("Aw1+lambda*Bs(v,w2)", norm_z(lhs));
    } else if (c == Order::similar && b == Order::precedes) {
        rep.scenario = "stokes-limit(v)";
        rep.description = "Bs(v,w2) + lambda*B(w1,w1) = 0";
        const double l = 1.0 / v02_11->lambda;  // lim sigma_{1,1} / sigma_{0,2}
        cx.lambda("lambda", l);
        SpectralField lhs = bilinear_bs(cx.v(), *w2);
        SpectralField t = bilinear_b(*w1, *w1);
        t *= l;
        lhs += t;
        cx.residual("Bs(v,w2)+lambda*B(w1,w1)", norm_z(lhs));
    } else if (a == Order::similar && b == Order::similar && c == Order::similar) {
        rep.scenario = "stokes-limit(vi)";
        rep.description = "Aw1 + lambda1*Bs(v,w2) + lambda2*B(w1,w1) = 0";
        const double l1 = 1.0 / v1_02->lambda;
        const double l2 = 1.0 / v1_11->lambda;
        cx.lambda("lambda1", l1);
        cx.lambda("lambda2", l2);
        SpectralField lhs = stokes_apply(*w1);
        SpectralField t1 = bilinear_bs(cx.v(), *w2);
        t1 *= l1;
        SpectralField t2 = bilinear_b(*w1, *w1);
        t2 *= l2;
        lhs += t1;
        lhs += t2;
        cx.residual("Aw1+lambda1*Bs(v,w2)+lambda2*B(w1,w1)", norm_z(lhs));
    } else {
        rep.scenario = "stokes-limit(indeterminate)";
        rep.description = "ordering pattern not covered";
    }
}

}  // namespace

CaseReport classify_case(const SpectralField& g, const UnitaryExpansion& exp, const SigmaTable& table,
                         const ComparePolicy& policy) {
    CaseReport rep;
    rep.notes.push_back(policy_echo(policy));
    CaseContext cx{&g, &exp, &table, policy, &rep};

    const SpectralField& v = exp.limit;
    SpectralField av_minus_g = stokes_apply(v) - g;
    rep.residuals["B(v,v)"] = norm_z(bilinear_b(v, v));
    rep.residuals["Av-g"] = norm_z(av_minus_g);
    const double gz = norm_z(g);

    if (exp.kind == ExpansionKind::trivial) {
        rep.scenario = "fixed-force(ii)";
        rep.description = "trivial expansion: Av = g";
        return rep;
    }

    // the more specific zero-limit and stokes-limit families win over the
    // generic first-order comparison
    double gamma1_max = 0;
    if (exp.depth >= 1)
        for (double x : exp.gammas[0]) gamma1_max = std::max(gamma1_max, x);
    const double vscale = norm_z(stokes_invert(g)) + gamma1_max + norm_z(v);
    if (norm_z(v) <= 1e-6 * vscale) {
        classify_zero_limit(cx);
        return rep;
    }
    if (norm_z(av_minus_g) <= 1e-6 * gz) {
        classify_stokes_limit(cx);
        return rep;
    }

    auto v0 = cx.verdict(SigmaLabel::sigma(0), SigmaLabel::sigma(0, 1));
    if (!v0 || v0->order == Order::undecided) {
        rep.scenario = "indeterminate";
        rep.description = "blocking pair sigma_0 vs sigma_{0,1}";
        return rep;
    }
    const SpectralField* w1 = cx.w(1);
    if (v0->order == Order::succeeds) {
        rep.scenario = "fixed-force(iii-a)";
        rep.description = "alpha*Gamma_1 decays: Av = g";
        if (rep.residuals["Av-g"] > 1e-6 * gz)
            rep.notes.push_back("measured |Av-g| is inconsistent with this branch; see the residual entry");
    } else if (v0->order == Order::precedes) {
        rep.scenario = "fixed-force(iii-b)";
        rep.description = "alpha*Gamma_1 grows: Bs(v,w1) = 0";
        if (w1) rep.residuals["Bs(v,w1)"] = norm_z(bilinear_bs(v, *w1));
    } else {
        rep.scenario = "fixed-force(iii-c)";
        rep.description = "alpha*Gamma_1 bounded: Av + lambda*Bs(v,w1) = g";
        const double l = 1.0 / v0->lambda;  // lim alpha Gamma_1
        rep.lambdas["lambda"] = l;
        if (w1) {
            SpectralField lhs = stokes_apply(v);
            SpectralField t = bilinear_bs(v, *w1);
            t *= l;
            lhs += t;
            rep.residuals["Av+lambda*Bs(v,w1)-g"] = norm_z(lhs - g);
        }
    }
    return rep;
}

CaseReport classify_perturbed_case(const UnitaryExpansion& exp_v, const UnitaryExpansion& exp_g,
                                   const SigmaTable& table, const ComparePolicy& policy) {
    if (exp_g.kind == ExpansionKind::trivial)
        throw std::invalid_argument("force expansion is trivial; use the fixed-force classifier");
    CaseReport rep;
    rep.notes.push_back(policy_echo(policy));
    const SpectralField& g = exp_g.limit;
    if (norm_z(g) == 0) throw std::invalid_argument("force limit vanishes");
    CaseContext cx{&g, &exp_v, &table, policy, &rep};
    const SpectralField& v = exp_v.limit;

    rep.residuals["B(v,v)"] = norm_z(bilinear_b(v, v));
    if (exp_v.kind == ExpansionKind::trivial) {
        rep.scenario = "perturbed-force(contradiction)";
        rep.description = "state expansion is trivial although the force expansion is not";
        return rep;
    }
    const SpectralField* w1 = cx.w(1);
    const SpectralField* h1 = exp_g.depth >= 1 ? &exp_g.directions[0] : nullptr;
    auto v01 = cx.verdict(SigmaLabel::sigma(0, 1), SigmaLabel::sigma(0));
    if (!v01 || v01->order == Order::undecided || !w1 || !h1) {
        rep.scenario = "indeterminate";
        rep.description = "blocking pair sigma_{0,1} vs sigma_0";
        return rep;
    }
    if (v01->order == Order::succeeds) {
        rep.scenario = "perturbed-force(iii)";
        rep.description = "alpha*Gamma_1 grows: Bs(v,w1) = 0";
        rep.residuals["Bs(v,w1)"] = norm_z(bilinear_bs(v, *w1));
        return rep;
    }
    if (v01->order == Order::precedes) {
        rep.scenario = "perturbed-force(iv)";
        rep.description = "alpha*Gamma_1 decays: Av = g and Bs(v,w1) = lambda1*h1";
        rep.residuals["Av-g"] = norm_z(stokes_apply(v) - g);
        auto vb = cx.verdict(SigmaLabel::sigma(0, 1), SigmaLabel::beta(1));
        double l1 = 0;
        if (vb && vb->order == Order::similar) l1 = 1.0 / vb->lambda;  // lim H_1/(alpha Gamma_1)
        else if (vb && vb->order == Order::precedes) cx.note("force level dominates alpha*Gamma_1, contradicting this branch");
        rep.lambdas["lambda1"] = l1;
        SpectralField lhs = bilinear_bs(v, *w1);
        SpectralField t = *h1;
        t *= l1;
        rep.residuals["Bs(v,w1)-lambda1*h1"] = norm_z(lhs - t);
        return rep;
    }

    // alpha Gamma_1 ~ 1
    const double l2 = v01->lambda;
    rep.lambdas["lambda2"] = l2;
    rep.scenario = "perturbed-force(v)";
    rep.description = "alpha*Gamma_1 bounded: Av - g + lambda2*Bs(v,w1) = 0";
    {
        SpectralField lhs = stokes_apply(v) - g;
        SpectralField t = bilinear_bs(v, *w1);
        t *= l2;
        lhs += t;
        rep.residuals["Av-g+lambda2*Bs(v,w1)"] = norm_z(lhs);
    }
    cx.note("chi is centered on the bounded-ratio limit lambda2; the source text names lambda1 here");

    const SigmaSequence* s01 = table.find(SigmaLabel::sigma(0, 1));
    std::vector<double> chi(s01->values.size());
    for (std::size_t i = 0; i < chi.size(); ++i) chi[i] = s01->values[i] - l2;
    TotalizeResult tr = totalize(table.sequences, policy, &chi);
    rep.chi_class = tr.sign_class;
    if (tr.sign_class >= 2)
        if (const SigmaSequence* c = tr.table.find(SigmaLabel::chi())) rep.chi = *c;
    if (!tr.complete) cx.note("sign-split subsequence could not be fully ordered");
    const SigmaTable& st = tr.table;
    const double chi_sign = (tr.sign_class == 3) ? -1.0 : 1.0;
    const bool chi_zero = (tr.sign_class == 1);
    const SpectralField* w2 = cx.w(2);
    const bool w2_absent = (exp_v.kind == ExpansionKind::finite && exp_v.depth == 1);

    auto ord_of = [&](const SigmaLabel& a, const SigmaLabel& b) -> Order {
        auto vv = st.verdict(a, b);
        return vv ? vv->order : Order::undecided;
    };
    const Order g1_h1 = ord_of(SigmaLabel::sigma(1), SigmaLabel::beta(1));
    const Order chi_g1 = chi_zero ? Order::precedes : ord_of(SigmaLabel::chi(), SigmaLabel::sigma(1));
    const Order chi_h1 = chi_zero ? Order::precedes : ord_of(SigmaLabel::chi(), SigmaLabel::beta(1));

    auto limit_ratio = [&](const SigmaLabel& num, const SigmaLabel& den) -> double {
        const SigmaSequence* a = st.find(num);
        const SigmaSequence* b = st.find(den);
        if (!a || !b) return 0;
        return ratio_limit(*a, *b, policy);
    };

    if (g1_h1 == Order::succeeds && chi_g1 == Order::precedes) {
        rep.scenario = "perturbed-force(v-1)";
        rep.description = "lambda3*(Aw1 + lambda2*B(w1,w1)) + Bs(v,w2) = 0";
        if (!w2) {
            cx.note("direction w2 unavailable at this depth");
            return rep;
        }
        const Order o = ord_of(SigmaLabel::sigma(0, 2), SigmaLabel::sigma(1));
        const double l3 = (o == Order::similar) ? limit_ratio(SigmaLabel::sigma(1), SigmaLabel::sigma(0, 2)) : 0.0;
        rep.lambdas["lambda3"] = l3;
        SpectralField lhs = stokes_apply(*w1);
        SpectralField t = bilinear_b(*w1, *w1);
        t *= l2;
        lhs += t;
        lhs *= l3;
        lhs += bilinear_bs(v, *w2);
        rep.residuals["lambda3*(Aw1+lambda2*B(w1,w1))+Bs(v,w2)"] = norm_z(lhs);
    } else if (g1_h1 == Order::precedes && chi_h1 == Order::precedes) {
        rep.scenario = "perturbed-force(v-2)";
        rep.description = "Bs(v,w2) = lambda4*h1";
        if (!w2) {
            cx.note("direction w2 unavailable at this depth");
            return rep;
        }
        const Order o = ord_of(SigmaLabel::sigma(0, 2), SigmaLabel::beta(1));
        const double l4 = (o == Order::similar) ? limit_ratio(SigmaLabel::beta(1), SigmaLabel::sigma(0, 2)) : 0.0;
        rep.lambdas["lambda4"] = l4;
        SpectralField lhs = bilinear_bs(v, *w2);
        SpectralField t = *h1;
        t *= l4;
        rep.residuals["Bs(v,w2)-lambda4*h1"] = norm_z(lhs - t);
    } else if (w2 && ord_of(SigmaLabel::sigma(0, 2), SigmaLabel::sigma(1)) == Order::succeeds &&
               ord_of(SigmaLabel::sigma(0, 2), SigmaLabel::beta(1)) == Order::succeeds &&
               (chi_zero || ord_of(SigmaLabel::chi(), SigmaLabel::sigma(0, 2)) == Order::precedes)) {
        rep.scenario = "perturbed-force(v-3)";
        rep.description = "Bs(v,w2) = 0";
        rep.residuals["Bs(v,w2)"] = norm_z(bilinear_bs(v, *w2));
    } else if (!chi_zero && chi_g1 == Order::succeeds && chi_h1 == Order::succeeds) {
        rep.scenario = "perturbed-force(v-4)";
        if (w2_absent) {
            rep.description = "Bs(v,w1) = 0 and Av = g";
            rep.residuals["Bs(v,w1)"] = norm_z(bilinear_bs(v, *w1));
            rep.residuals["Av-g"] = norm_z(stokes_apply(v) - g);
        } else if (w2) {
            rep.description = "Bs(v,w1) + lambda5*Bs(v,w2) = 0";
            const double l5 = chi_sign * limit_ratio(SigmaLabel::sigma(0, 2), SigmaLabel::chi());
            rep.lambdas["lambda5"] = l5;
            SpectralField lhs = bilinear_bs(v, *w1);
            SpectralField t = bilinear_bs(v, *w2);
            t *= l5;
            lhs += t;
            rep.residuals["Bs(v,w1)+lambda5*Bs(v,w2)"] = norm_z(lhs);
        } else {
            rep.description = "chi dominates but the second direction is unresolved";
            cx.note("direction w2 unavailable at this depth");
        }
    } else if (g1_h1 == Order::similar && (chi_zero || chi_g1 == Order::similar)) {
        rep.scenario = "perturbed-force(v-5)";
        const double l6 = chi_zero ? 0.0 : chi_sign * limit_ratio(SigmaLabel::chi(), SigmaLabel::sigma(1));
        const double l7 = limit_ratio(SigmaLabel::beta(1), SigmaLabel::sigma(1));
        rep.lambdas["lambda6"] = l6;
        rep.lambdas["lambda7"] = l7;
        SpectralField lhs = stokes_apply(*w1);
        SpectralField t = bilinear_bs(v, *w1);
        t *= l6;
        lhs += t;
        t = bilinear_b(*w1, *w1);
        t *= l2;
        lhs += t;
        SpectralField rhs = *h1;
        rhs *= l7;
        const Order s1_02 = ord_of(SigmaLabel::sigma(1), SigmaLabel::sigma(0, 2));
        if (w2_absent) {
            rep.description = "Aw1 + lambda6*Bs(v,w1) + lambda2*B(w1,w1) = lambda7*h1";
            rep.residuals["Aw1+lambda6*Bs(v,w1)+lambda2*B(w1,w1)-lambda7*h1"] = norm_z(lhs - rhs);
        } else if (w2 && (s1_02 == Order::succeeds || s1_02 == Order::similar)) {
            rep.description = "Aw1 + lambda6*Bs(v,w1) + lambda2*B(w1,w1) + lambda8*Bs(v,w2) = lambda7*h1";
            const double l8 = limit_ratio(SigmaLabel::sigma(0, 2), SigmaLabel::sigma(1));
            rep.lambdas["lambda8"] = l8;
            t = bilinear_bs(v, *w2);
            t *= l8;
            lhs += t;
            rep.residuals["Aw1+lambda6*Bs(v,w1)+lambda2*B(w1,w1)+lambda8*Bs(v,w2)-lambda7*h1"] = norm_z(lhs - rhs);
        } else {
            rep.description = "balanced scales but the second direction is unresolved";
            cx.note("direction w2 unavailable at this depth");
        }
    } else {
        rep.scenario = "perturbed-force(v-indeterminate)";
        rep.description = "no sub-branch condition matched on the sign-split table";
    }
    return rep;
}

std::vector<double> order_balance_residuals(const UnitaryExpansion& exp_v, const UnitaryExpansion& exp_g,
                                            const std::vector<double>& alphas, int m_max) {
    if (exp_v.retained != exp_g.retained) throw std::invalid_argument("expansions are not index-aligned");
    const int mm = std::min({m_max, exp_v.depth - 1, exp_g.depth});
    std::vector<double> out;
    if (mm < 0) return out;

    auto wfield = [&](int k) -> const SpectralField& { return k == 0 ? exp_v.limit : exp_v.directions[static_cast<std::size_t>(k - 1)]; };
    auto hfield = [&](int m) -> const SpectralField& { return m == 0 ? exp_g.limit : exp_g.directions[static_cast<std::size_t>(m - 1)]; };
    auto gam = [&](int k, std::size_t p) { return k == 0 ? 1.0 : exp_v.gammas[static_cast<std::size_t>(k - 1)][p]; };
    auto hh = [&](int m, std::size_t p) { return m == 0 ? 1.0 : exp_g.gammas[static_cast<std::size_t>(m - 1)][p]; };

    for (int m = 0; m <= mm; ++m) {
        // precompute the bilinear pairs of this order
        std::vector<SpectralField> pairs;
        for (int k = 0; k <= m + 1; ++k) pairs.push_back(bilinear_b(wfield(k), wfield(m + 1 - k)));
        SpectralField aw = stokes_apply(wfield(m));
        double worst = 0;
        for (std::size_t p = 0; p < exp_v.retained.size(); ++p) {
            const double a = alphas[static_cast<std::size_t>(exp_v.retained[p])];
            SpectralField lhs = aw;
            lhs *= gam(m, p);
            double scale = norm_z(lhs);
            for (int k = 0; k <= m + 1; ++k) {
                SpectralField t = pairs[static_cast<std::size_t>(k)];
                t *= a * gam(k, p) * gam(m + 1 - k, p);
                scale += norm_z(t);
                lhs += t;
            }
            SpectralField rhs = hfield(m);
            rhs *= hh(m, p);
            scale += norm_z(rhs) + 1e-300;
            worst = std::max(worst, norm_z(lhs - rhs) / scale);
        }
        out.push_back(worst);
    }
    return out;
}

void write_sigma_csv(const std::string& path, const SigmaTable& table) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "n,alpha";
    for (const auto& s : table.sequences) os << "," << csv_label(s.label);
    os << "\n";
    if (table.sequences.empty()) return;
    const std::size_t n = table.sequences.front().values.size();
    for (std::size_t i = 0; i < n; ++i) {
        os << table.sequences.front().indices[i] << "," << format_double(table.sequences.front().alphas[i]);
        for (const auto& s : table.sequences) os << "," << format_double(s.values[i]);
        os << "\n";
    }
}

void write_ratio_csv(const std::string& path, const SigmaTable& table,
                     const std::vector<std::pair<SigmaLabel, SigmaLabel>>& pairs) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "n,alpha";
    std::vector<std::pair<const SigmaSequence*, const SigmaSequence*>> cols;
    for (const auto& [a, b] : pairs) {
        const SigmaSequence* sa = table.find(a);
        const SigmaSequence* sb = table.find(b);
        if (!sa || !sb) continue;
        cols.emplace_back(sa, sb);
        os << "," << csv_label(a) << "/" << csv_label(b);
    }
    os << "\n";
    if (cols.empty() || table.sequences.empty()) return;
    const std::size_t n = table.sequences.front().values.size();
    for (std::size_t i = 0; i < n; ++i) {
        os << table.sequences.front().indices[i] << "," << format_double(table.sequences.front().alphas[i]);
        for (const auto& [sa, sb] : cols) os << "," << format_double(sa->values[i] / sb->values[i]);
        os << "\n";
    }
}

void write_case_report(const std::string& path, const CaseReport& report, const OrderReport* order) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << report.text();
    if (order) {
        os << "ordering chain: " << order->chain << "\n";
        for (const auto& c : order->checks)
            os << "bound " << c.name << ": " << (c.holds ? "holds" : "VIOLATED")
               << (c.detail.empty() ? "" : " [" + c.detail + "]") << "\n";
    }
}

}  // namespace grashof
