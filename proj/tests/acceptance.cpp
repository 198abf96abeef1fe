// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "residue/dataset.hpp"
#include "residue/encoders.hpp"
#include "residue/fourier.hpp"
#include "residue/harness.hpp"
#include "residue/mlp.hpp"
#include "residue/rng.hpp"

using namespace residue;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [FAILED]");
    }
};

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

bool within(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Protocol fit for p, returning the report and the parsed model.
std::pair<ExperimentReport, FourierModel> protocol_fit(std::uint64_t p, BasisTerms terms = BasisTerms::sine_cosine,
                                                       bool extended = false, std::uint64_t seed = 1) {
    auto cfg = fourier_protocol(p, seed);
    cfg.terms = terms;
    cfg.extended_basis = extended;
    auto report = run(cfg);
    auto model = parse_fourier_model(report.replicates.front().model_text);
    return {std::move(report), std::move(model)};
}

void check_coefficients(Outcome& o, const FourierModel& m, double gamma, const std::vector<double>& alpha,
                        const std::vector<double>& beta) {
    bool ok = within(m.intercept, gamma, 1e-3) && m.sine_coeffs.size() == alpha.size();
    double worst = std::abs(m.intercept - gamma);
    for (std::size_t j = 0; ok && j < alpha.size(); ++j) {
        worst = std::max({worst, std::abs(m.sine_coeffs[j] - alpha[j]), std::abs(m.cosine_coeffs[j] - beta[j])});
        ok = ok && within(m.sine_coeffs[j], alpha[j], 1e-3) && within(m.cosine_coeffs[j], beta[j], 1e-3);
    }
    o.require(ok, "coefficients max |delta|=" + fmt(worst, 3));
}

Outcome ac1() {
    Outcome o;
    const auto start = Clock::now();
    const auto [report, m] = protocol_fit(3);
    const double secs = seconds_since(start);
    const auto& rep = report.replicates.front();
    o.require(rep.train_count == 25000 && rep.test_count == 5000, "split 25000/5000");
    o.require(report.mean_accuracy == 1.0, "accuracy=" + fmt(report.mean_accuracy));
    check_coefficients(o, m, 1.0, {-0.57735}, {-1.0});
    o.require(secs < 5.0, "runtime " + fmt(secs, 3) + "s < 5s");
    return o;
}

Outcome ac2() {
    Outcome o;
    const auto [report, m] = protocol_fit(7);
    o.require(report.mean_accuracy == 1.0, "accuracy=" + fmt(report.mean_accuracy));
    check_coefficients(o, m, 3.0, {-2.076521, -0.797473, -0.228243}, {-1.0, -1.0, -1.0});
    const double table6[] = {
        2.749488192677063e-9,  1.000000897764708,  1.9999998497560223, 3.0000003332714678, 3.9999996722275086,
        5.000000155742953,     5.9999991077342685, 2.7494893029000878e-9, 1.0000008977647075, 1.9999998497560227,
        3.0000003332714673,    3.999999672227508,  5.000000155742954,  5.99999910773427,   2.7494904131231124e-9,
        1.0000008977647064,    1.999999849756023,
    };
    double worst = 0.0;
    for (std::uint64_t x = 0; x <= 16; ++x) worst = std::max(worst, std::abs(m.evaluate(x) - table6[x]));
    o.require(worst <= 1e-3, "predicted x=0..16 max |delta|=" + fmt(worst, 3));
    return o;
}

Outcome ac3() {
    Outcome o;
    double worst = 0.0;
    std::size_t wrong = 0;
    for (std::uint64_t p = 2; p <= 50; ++p) {
        const Modulus mod(p);
        const auto m = closed_form_coefficients(mod);
        for (std::uint64_t x = 0; x <= 1000; ++x) {
            const auto pred = predict_residue(m, x);
            const auto truth = residue_oracle(x, mod);
            if (pred.label != truth) ++wrong;
            worst = std::max(worst, std::abs(pred.raw_value - static_cast<double>(truth)));
        }
    }
    o.require(wrong == 0, "misclassified=" + std::to_string(wrong) + " of " + std::to_string(49 * 1001));
    o.require(worst <= 1e-8, "max |raw-label|=" + fmt(worst, 3));
    return o;
}

Outcome ac4() {
    Outcome o;
    const auto [report, m] = protocol_fit(3, BasisTerms::sine_only);
    const double r2 = report.replicates.front().diagnostics->r_squared;
    o.require(within(r2, 0.2546, 0.03), "r_squared=" + fmt(r2) + " (target 0.2546+-0.03)");
    o.require(within(report.mean_accuracy, 0.3406, 0.03),
              "accuracy=" + fmt(report.mean_accuracy) + " (target 0.3406+-0.03)");
    std::string spread;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto [r, fit] = protocol_fit(3, BasisTerms::sine_only, false, seed);
        spread += (spread.empty() ? "" : " ") + std::to_string(seed) + ":" + fmt(r.mean_accuracy, 3);
    }
    o.detail += "; accuracy by dataset seed {" + spread + "}";
    return o;
}

Outcome ac5() {
    Outcome o;
    const auto [report, m] = protocol_fit(7, BasisTerms::sine_cosine, true);
    const auto& d = *report.replicates.front().diagnostics;
    o.require(m.basis.pair_count == 6, "pairs j=1..6");
    o.require(report.mean_accuracy == 1.0, "accuracy=" + fmt(report.mean_accuracy));
    o.require(d.rank_warning, "rank_warning (condition=" + fmt(d.condition_estimate, 3) + ")");
    return o;
}

struct NetworkCheck {
    EncoderKind encoder;
    OutputActivation activation;
    std::function<bool(double)> ok;
    std::string criterion;
};

Outcome network_suite(std::uint64_t p, const std::vector<NetworkCheck>& checks) {
    Outcome o;
    for (const auto& c : checks) {
        auto cfg = mlp_protocol(p, c.encoder);
        cfg.output_activation = c.activation;
        const auto start = Clock::now();
        const auto report = run(cfg);
        const double secs = seconds_since(start);
        std::string name(to_string(c.encoder));
        if (c.activation != OutputActivation::sigmoid) name += "/" + std::string(to_string(c.activation));
        o.require(c.ok(report.mean_accuracy), name + " mean=" + fmt(report.mean_accuracy, 4) + " std=" +
                                                  fmt(report.std_accuracy, 3) + " " + c.criterion);
        o.require(secs < 600.0, name + " runtime " + fmt(secs, 3) + "s < 600s");
    }
    return o;
}

Outcome ac6() {
    return network_suite(2, {
        {EncoderKind::raw, OutputActivation::sigmoid, [](double a) { return a >= 0.45 && a <= 0.55; }, "in [0.45,0.55]"},
        {EncoderKind::binary, OutputActivation::sigmoid, [](double a) { return a >= 0.99; }, ">= 0.99"},
        {EncoderKind::one_gram, OutputActivation::sigmoid, [](double a) { return a >= 0.70; }, ">= 0.70"},
        {EncoderKind::base3, OutputActivation::sigmoid, [](double a) { return a <= 0.60; }, "<= 0.60"},
    });
}

Outcome ac7() {
    return network_suite(3, {
        {EncoderKind::one_gram, OutputActivation::sigmoid, [](double a) { return a <= 0.40; }, "<= 0.40"},
        {EncoderKind::one_gram_sum, OutputActivation::sigmoid, [](double a) { return a <= 0.40; }, "<= 0.40"},
        {EncoderKind::one_gram_sum_mod3, OutputActivation::sigmoid, [](double a) { return a >= 0.95; }, ">= 0.95"},
        {EncoderKind::base3, OutputActivation::sigmoid, [](double a) { return a >= 0.99; }, ">= 0.99"},
    });
}

Outcome ac8() {
    return network_suite(3, {
        {EncoderKind::raw, OutputActivation::sine_shift, [](double a) { return a <= 0.40; }, "<= 0.40"},
    });
}

Outcome ac9() {
    Outcome o;

    SplitMix64 g(2024);
    std::size_t round_trip_failures = 0;
    std::size_t kinds = 0;
    for (auto kind : all_encoder_kinds()) {
        if (!is_positional(kind)) continue;
        ++kinds;
        const auto spec = make_encoder(kind);
        for (int i = 0; i < 100000; ++i) {
            const std::uint64_t x = g.below(kMaxInput + 1);
            if (decode(encode(x, spec), spec) != x) ++round_trip_failures;
        }
    }
    o.require(round_trip_failures == 0, "encoder round trips: " + std::to_string(round_trip_failures) +
                                            " failures over " + std::to_string(kinds) + " kinds x 1e5");

    double worst_grad = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        MlpConfig c;
        c.input_dim = 1 + static_cast<int>(g.below(33));
        c.hidden.clear();
        for (std::uint64_t h = 1 + g.below(2); h > 0; --h) c.hidden.push_back(2 + static_cast<int>(g.below(64)));
        c.output_dim = 2 + static_cast<int>(g.below(6));
        c.output_activation = trial % 2 == 0 ? OutputActivation::sigmoid : OutputActivation::sine_shift;
        c.seed = g.next();
        const auto m = init(c);
        std::vector<double> x(static_cast<std::size_t>(c.input_dim));
        for (auto& v : x) v = g.unit();
        worst_grad = std::max(worst_grad, grad_check(m, x, g.below(static_cast<std::uint64_t>(c.output_dim))));
    }
    o.require(worst_grad <= 1e-4, "gradient check max rel error=" + fmt(worst_grad, 3));

    double worst_period = 0.0;
    for (std::uint64_t p : {3u, 7u, 12u}) {
        const auto train = split(generate(1, 30000, Modulus(p)), 25000.0 / 30000.0).train;
        const auto m = fit_fourier(train);
        for (int i = 0; i < 10000; ++i) {
            const std::uint64_t x = g.below(kMaxInput + 1);
            worst_period = std::max(worst_period, std::abs(m.evaluate(x) - m.evaluate(x % p)));
        }
    }
    o.require(worst_period <= 1e-12, "periodicity max |delta|=" + fmt(worst_period, 3));

    auto fourier_cfg = fourier_protocol(7);
    fourier_cfg.replicate_seeds = {1, 2, 3};
    auto mlp_cfg = mlp_protocol(3, EncoderKind::one_gram_sum_mod3);
    mlp_cfg.count = 5000;
    mlp_cfg.epochs = 3;
    bool identical = true;
    for (const auto& cfg : {fourier_cfg, mlp_cfg}) {
        const auto a = run(cfg);
        const auto b = run(cfg);
        identical = identical && report_csv(a) == report_csv(b);
        for (std::size_t i = 0; i < a.replicates.size(); ++i)
            identical = identical && a.replicates[i].model_text == b.replicates[i].model_text;
    }
    o.require(identical, "byte-identical reruns (reports and models)");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 fourier mod-3 exactness", ac1},
        {"AC2 fourier mod-7 exactness", ac2},
        {"AC3 closed-form oracle p=2..50", ac3},
        {"AC4 sine-only ablation", ac4},
        {"AC5 multicollinearity detection", ac5},
        {"AC6 network feature dependence mod 2", ac6},
        {"AC7 network feature dependence mod 3", ac7},
        {"AC8 sine output activation ablation", ac8},
        {"AC9 property suites", ac9},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("%s %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), seconds_since(start),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
