#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "residue/encoders.hpp"
#include "residue/error.hpp"
#include "residue/rng.hpp"

using namespace residue;

namespace {

std::vector<double> padded(std::vector<double> tail, std::size_t width) {
    std::vector<double> v(width - tail.size(), 0.0);
    v.insert(v.end(), tail.begin(), tail.end());
    return v;
}

std::vector<double> as_reals(const std::vector<int>& v) { return {v.begin(), v.end()}; }

std::uint64_t random_input(SplitMix64& g) {
    // Mix of uniform draws and small values so short numbers get exercised.
    switch (g.below(4)) {
        case 0: return g.below(1000);
        case 1: return kMaxInput - g.below(1000);
        default: return g.below(kMaxInput + 1);
    }
}

}  // namespace

TEST_CASE("widths follow from the 2^32 bound") {
    CHECK(make_encoder(EncoderKind::raw).width == 1);
    CHECK(make_encoder(EncoderKind::binary).width == 33);
    CHECK(make_encoder(EncoderKind::base3).width == 21);
    CHECK(make_encoder(EncoderKind::one_gram).width == 10);
    CHECK(make_encoder(EncoderKind::two_gram).width == 18);
    CHECK(make_encoder(EncoderKind::three_gram).width == 24);
    CHECK(make_encoder(EncoderKind::one_two_gram).width == 28);
    CHECK(make_encoder(EncoderKind::one_two_three_gram).width == 52);
    CHECK(make_encoder(EncoderKind::one_gram_sum).width == 11);
    CHECK(make_encoder(EncoderKind::one_gram_sum_mod3).width == 11);

    // 3^20 < 2^32 <= 3^21 and 2^32 has ten decimal digits.
    std::uint64_t p3 = 1;
    for (int i = 0; i < 20; ++i) p3 *= 3;
    CHECK(p3 < kMaxInput);
    CHECK(p3 * 3 >= kMaxInput);
    CHECK(std::to_string(kMaxInput).size() == 10);
}

TEST_CASE("worked examples") {
    const auto binary = make_encoder(EncoderKind::binary);
    CHECK(encode(4, binary) == padded({1, 0, 0}, 33));
    CHECK(encode(2, binary) == padded({1, 0}, 33));
    CHECK(encode(5, binary) == padded({1, 0, 1}, 33));

    const auto base3 = make_encoder(EncoderKind::base3);
    CHECK(encode(3, base3) == padded({1, 0}, 21));
    CHECK(encode(6, base3) == padded({2, 0}, 21));

    CHECK(encode(123, make_encoder(EncoderKind::one_gram)) == padded({1, 2, 3}, 10));
    CHECK(encode(1234, make_encoder(EncoderKind::one_gram_sum)) == padded({1, 2, 3, 4, 10}, 11));
    CHECK(encode(1234, make_encoder(EncoderKind::one_gram_sum_mod3)) == padded({1, 2, 3, 4, 1}, 11));

    CHECK(encode(1234, make_encoder(EncoderKind::two_gram)) == padded({0, 1, 1, 2, 2, 3, 3, 4}, 18));
    CHECK(encode(1234, make_encoder(EncoderKind::three_gram)) == padded({0, 0, 1, 0, 1, 2, 1, 2, 3, 2, 3, 4}, 24));

    CHECK(encode(kMaxInput, make_encoder(EncoderKind::raw)) == std::vector<double>{4294967296.0});
}

TEST_CASE("zero encodes to zeros for positional kinds") {
    for (auto kind : all_encoder_kinds()) {
        const auto v = encode(0, make_encoder(kind));
        CHECK(v.size() == static_cast<std::size_t>(make_encoder(kind).width));
        for (double d : v) CHECK(d == 0.0);
    }
}

TEST_CASE("encode against textbook digit expansions") {
    SplitMix64 g(3);
    for (int i = 0; i < 20000; ++i) {
        const auto x = random_input(g);
        const auto dec = oracle::decimal_digits(x, 10);
        REQUIRE(encode(x, make_encoder(EncoderKind::binary)) == as_reals(oracle::base_digits(x, 2, 33)));
        REQUIRE(encode(x, make_encoder(EncoderKind::base3)) == as_reals(oracle::base_digits(x, 3, 21)));
        REQUIRE(encode(x, make_encoder(EncoderKind::one_gram)) == as_reals(dec));

        std::vector<double> grams2, grams3;
        for (std::size_t s = 0; s + 2 <= 10; ++s) grams2.insert(grams2.end(), {double(dec[s]), double(dec[s + 1])});
        for (std::size_t s = 0; s + 3 <= 10; ++s)
            grams3.insert(grams3.end(), {double(dec[s]), double(dec[s + 1]), double(dec[s + 2])});
        REQUIRE(encode(x, make_encoder(EncoderKind::two_gram)) == grams2);
        REQUIRE(encode(x, make_encoder(EncoderKind::three_gram)) == grams3);

        auto combined = as_reals(dec);
        combined.insert(combined.end(), grams2.begin(), grams2.end());
        REQUIRE(encode(x, make_encoder(EncoderKind::one_two_gram)) == combined);
        combined.insert(combined.end(), grams3.begin(), grams3.end());
        REQUIRE(encode(x, make_encoder(EncoderKind::one_two_three_gram)) == combined);
    }
}

TEST_CASE("digit-sum features") {
    SplitMix64 g(8);
    for (int i = 0; i < 20000; ++i) {
        const auto x = random_input(g);
        const auto s = encode(x, make_encoder(EncoderKind::one_gram_sum));
        REQUIRE(s.back() == std::accumulate(s.begin(), s.end() - 1, 0.0));
        const auto m = encode(x, make_encoder(EncoderKind::one_gram_sum_mod3));
        const auto digit_sum = static_cast<std::uint64_t>(std::accumulate(m.begin(), m.end() - 1, 0.0));
        REQUIRE(m.back() == static_cast<double>(digit_sum % 3));
        // The classical divisibility-by-3 rule.
        REQUIRE(m.back() == static_cast<double>(oracle::residue(x, 3)));
    }
}

TEST_CASE("two-gram vector is recomputable from the one-gram vector") {
    SplitMix64 g(21);
    for (int i = 0; i < 5000; ++i) {
        const auto x = random_input(g);
        const auto one = encode(x, make_encoder(EncoderKind::one_gram));
        std::vector<double> rebuilt;
        for (std::size_t s = 0; s + 1 < one.size(); ++s) rebuilt.insert(rebuilt.end(), {one[s], one[s + 1]});
        REQUIRE(encode(x, make_encoder(EncoderKind::two_gram)) == rebuilt);
    }
}

TEST_CASE("round trip for positional kinds over 10^5 random inputs") {
    for (auto kind : {EncoderKind::raw, EncoderKind::binary, EncoderKind::base3, EncoderKind::one_gram}) {
        const auto spec = make_encoder(kind);
        SplitMix64 g(100 + static_cast<std::uint64_t>(kind));
        std::size_t failures = 0;
        for (int i = 0; i < 100000; ++i) {
            const auto x = random_input(g);
            if (decode(encode(x, spec), spec) != x) ++failures;
        }
        CAPTURE(to_string(kind));
        CHECK(failures == 0);
    }
    CHECK(decode(padded({1, 0, 1}, 33), make_encoder(EncoderKind::binary)) == 5);
    CHECK(decode(std::vector<double>(10, 0.0), make_encoder(EncoderKind::one_gram)) == 0);
    const auto base3 = make_encoder(EncoderKind::base3);
    CHECK(decode(encode(987654321, base3), base3) == 987654321);
}

TEST_CASE("decode errors") {
    auto code_of = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return std::string("none");
    };
    CHECK(code_of([] { decode(std::vector<double>(18, 0.0), make_encoder(EncoderKind::two_gram)); }) ==
          errc::kUnsupported);
    CHECK(code_of([] { decode(padded({2}, 33), make_encoder(EncoderKind::binary)); }) == errc::kMalformed);
    CHECK(code_of([] { decode(padded({0.5}, 10), make_encoder(EncoderKind::one_gram)); }) == errc::kMalformed);
    CHECK(code_of([] { decode(std::vector<double>(9, 0.0), make_encoder(EncoderKind::one_gram)); }) ==
          errc::kMalformed);
    // 9999999999 has ten digits but exceeds 2^32.
    CHECK(code_of([] { decode(std::vector<double>(10, 9.0), make_encoder(EncoderKind::one_gram)); }) ==
          errc::kMalformed);
    CHECK(code_of([] { encode(kMaxInput + 1, make_encoder(EncoderKind::binary)); }) == errc::kDomain);
}

TEST_CASE("encode_dataset") {
    const auto d = from_integers(std::vector<std::uint64_t>{4, 2, 5}, Modulus(3));
    const auto m = encode_dataset(d, make_encoder(EncoderKind::binary));
    REQUIRE(m.rows() == 3);
    REQUIRE(m.cols() == 33);
    for (int r = 0; r < 3; ++r) {
        const auto expect = encode(d.samples[r].x, m.spec);
        for (int c = 0; c < 33; ++c) CHECK(m.values(r, c) == expect[c]);
    }
    CHECK(m.labels == std::vector<std::uint64_t>{1, 2, 2});

    const auto big = encode_dataset(generate(1, 30000, Modulus(3)), make_encoder(EncoderKind::one_gram));
    CHECK(big.rows() == 30000);
    CHECK(big.cols() == 10);

    CHECK(encode_dataset(d, make_encoder(EncoderKind::one_two_three_gram)).cols() == 52);
}

TEST_CASE("feature csv") {
    const auto d = from_integers(std::vector<std::uint64_t>{1234}, Modulus(3));
    const auto csv = to_csv(encode_dataset(d, make_encoder(EncoderKind::one_gram_sum)));
    CHECK(csv == "f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,y\n0,0,0,0,0,0,1,2,3,4,10,1\n");
}

TEST_CASE("network input scaling lands in [0,1]") {
    SplitMix64 g(2);
    std::vector<std::uint64_t> xs{0, kMaxInput, 999999999, 4000000000};
    for (int i = 0; i < 200; ++i) xs.push_back(g.below(kMaxInput + 1));
    const auto d = from_integers(xs, Modulus(3));
    for (auto kind : all_encoder_kinds()) {
        const auto scaled = scaled_for_network(encode_dataset(d, make_encoder(kind)));
        CAPTURE(to_string(kind));
        CHECK(scaled.minCoeff() >= 0.0);
        CHECK(scaled.maxCoeff() <= 1.0);
    }
}

TEST_CASE("encoder names") {
    for (auto kind : all_encoder_kinds()) CHECK(parse_encoder_kind(to_string(kind)) == kind);
    CHECK_THROWS_AS(parse_encoder_kind("bert"), Error);
}
