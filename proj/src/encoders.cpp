#include "residue/encoders.hpp"

#include <array>
#include <cmath>

#include "residue/error.hpp"
#include "residue/keyvalue.hpp"

namespace residue {

namespace {

struct KindInfo {
    EncoderKind kind;
    std::string_view name;
    int width;
};

constexpr int kTwoGramWidth = 2 * (kDecimalDigits - 1);
constexpr int kThreeGramWidth = 3 * (kDecimalDigits - 2);

constexpr std::array<KindInfo, 10> kKinds{{
    {EncoderKind::raw, "raw", 1},
    {EncoderKind::binary, "binary", kBinaryDigits},
    {EncoderKind::base3, "base3", kBase3Digits},
    {EncoderKind::one_gram, "one_gram", kDecimalDigits},
    {EncoderKind::two_gram, "two_gram", kTwoGramWidth},
    {EncoderKind::three_gram, "three_gram", kThreeGramWidth},
    {EncoderKind::one_two_gram, "one_two_gram", kDecimalDigits + kTwoGramWidth},
    {EncoderKind::one_two_three_gram, "one_two_three_gram", kDecimalDigits + kTwoGramWidth + kThreeGramWidth},
    {EncoderKind::one_gram_sum, "one_gram_sum", kDecimalDigits + 1},
    {EncoderKind::one_gram_sum_mod3, "one_gram_sum_mod3", kDecimalDigits + 1},
}};

const KindInfo& info(EncoderKind k) {
    for (const auto& i : kKinds)
        if (i.kind == k) return i;
    throw Error(errc::kInvalidConfig, "unknown encoder kind");
}

/// Most-significant-first digits of x in `base`, left-padded to `n`.
template <std::size_t N>
std::array<int, N> digits(std::uint64_t x, unsigned base) {
    std::array<int, N> d{};
    for (std::size_t i = N; i-- > 0;) {
        d[i] = static_cast<int>(x % base);
        x /= base;
    }
    return d;
}

std::size_t write_digits(std::span<const int> ds, std::span<double> out, std::size_t at) {
    for (int d : ds) out[at++] = d;
    return at;
}

std::size_t write_grams(const std::array<int, kDecimalDigits>& ds, std::size_t n, std::span<double> out,
                        std::size_t at) {
    for (std::size_t start = 0; start + n <= ds.size(); ++start)
        for (std::size_t k = 0; k < n; ++k) out[at++] = ds[start + k];
    return at;
}

}  // namespace

EncoderSpec make_encoder(EncoderKind kind) { return {kind, info(kind).width}; }

std::string_view to_string(EncoderKind kind) { return info(kind).name; }

EncoderKind parse_encoder_kind(std::string_view name) {
    for (const auto& i : kKinds)
        if (i.name == name) return i.kind;
    std::string valid;
    for (const auto& i : kKinds) {
        if (!valid.empty()) valid += ", ";
        valid += i.name;
    }
    throw Error(errc::kInvalidConfig, "unknown encoder '" + std::string(name) + "' (valid: " + valid + ")");
}

const std::vector<EncoderKind>& all_encoder_kinds() {
    static const std::vector<EncoderKind> kinds = [] {
        std::vector<EncoderKind> v;
        for (const auto& i : kKinds) v.push_back(i.kind);
        return v;
    }();
    return kinds;
}

bool is_positional(EncoderKind kind) {
    return kind == EncoderKind::raw || kind == EncoderKind::binary || kind == EncoderKind::base3 ||
           kind == EncoderKind::one_gram;
}

void encode_into(std::uint64_t x, const EncoderSpec& spec, std::span<double> out) {
    if (x > kMaxInput) throw Error(errc::kDomain, std::to_string(x) + " exceeds 2^32");
    if (out.size() != static_cast<std::size_t>(spec.width) || spec.width != info(spec.kind).width)
        throw Error(errc::kDimensionMismatch, "output width does not match encoder");

    switch (spec.kind) {
        case EncoderKind::raw:
            out[0] = static_cast<double>(x);
            return;
        case EncoderKind::binary:
            write_digits(digits<kBinaryDigits>(x, 2), out, 0);
            return;
        case EncoderKind::base3:
            write_digits(digits<kBase3Digits>(x, 3), out, 0);
            return;
        default:
            break;
    }

    const auto dec = digits<kDecimalDigits>(x, 10);
    std::size_t at = 0;
    switch (spec.kind) {
        case EncoderKind::one_gram:
            write_digits(dec, out, 0);
            break;
        case EncoderKind::two_gram:
            write_grams(dec, 2, out, 0);
            break;
        case EncoderKind::three_gram:
            write_grams(dec, 3, out, 0);
            break;
        case EncoderKind::one_two_gram:
            at = write_digits(dec, out, 0);
            write_grams(dec, 2, out, at);
            break;
        case EncoderKind::one_two_three_gram:
            at = write_digits(dec, out, 0);
            at = write_grams(dec, 2, out, at);
            write_grams(dec, 3, out, at);
            break;
        case EncoderKind::one_gram_sum:
        case EncoderKind::one_gram_sum_mod3: {
            at = write_digits(dec, out, 0);
            int sum = 0;
            for (int d : dec) sum += d;
            out[at] = spec.kind == EncoderKind::one_gram_sum ? sum : sum % 3;
            break;
        }
        default:
            break;
    }
}

std::vector<double> encode(std::uint64_t x, const EncoderSpec& spec) {
    std::vector<double> v(static_cast<std::size_t>(spec.width));
    encode_into(x, spec, v);
    return v;
}

std::uint64_t decode(std::span<const double> v, const EncoderSpec& spec) {
    if (!is_positional(spec.kind))
        throw Error(errc::kUnsupported, "encoder '" + std::string(to_string(spec.kind)) + "' has no decoder");
    if (v.size() != static_cast<std::size_t>(spec.width))
        throw Error(errc::kMalformed, "expected " + std::to_string(spec.width) + " entries, got " +
                                          std::to_string(v.size()));

    const auto check_integral = [](double d, double upper) {
        if (!(d >= 0.0 && d <= upper) || d != std::floor(d))
            throw Error(errc::kMalformed, "invalid digit " + format_real(d));
        return static_cast<std::uint64_t>(d);
    };

    std::uint64_t x = 0;
    if (spec.kind == EncoderKind::raw) {
        x = check_integral(v[0], static_cast<double>(kMaxInput));
    } else {
        const unsigned base = spec.kind == EncoderKind::binary ? 2 : spec.kind == EncoderKind::base3 ? 3 : 10;
        for (double d : v) {
            const auto digit = check_integral(d, base - 1);
            // Every width here stays far below 2^64 before the range check.
            x = x * base + digit;
            if (x > kMaxInput) throw Error(errc::kMalformed, "decoded value exceeds 2^32");
        }
    }
    return x;
}

FeatureMatrix encode_dataset(const LabeledDataset& d, const EncoderSpec& spec) {
    FeatureMatrix m{spec, FeatureRowMatrix(static_cast<Eigen::Index>(d.size()), spec.width), {}, d.modulus, d.seed};
    m.labels.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        try {
            encode_into(d.samples[i].x, spec,
                        std::span<double>(m.values.row(static_cast<Eigen::Index>(i)).data(),
                                          static_cast<std::size_t>(spec.width)));
        } catch (const Error& e) {
            throw Error(e.code(), "row " + std::to_string(i) + ": " + e.what());
        }
        m.labels.push_back(d.samples[i].y);
    }
    return m;
}

std::vector<double> input_scale(const EncoderSpec& spec) {
    std::vector<double> s;
    s.reserve(static_cast<std::size_t>(spec.width));
    switch (spec.kind) {
        case EncoderKind::raw:
            s.push_back(static_cast<double>(kMaxInput));
            break;
        case EncoderKind::binary:
            s.assign(kBinaryDigits, 1.0);
            break;
        case EncoderKind::base3:
            s.assign(kBase3Digits, 2.0);
            break;
        case EncoderKind::one_gram_sum:
            s.assign(kDecimalDigits, 9.0);
            s.push_back(9.0 * kDecimalDigits);
            break;
        case EncoderKind::one_gram_sum_mod3:
            s.assign(kDecimalDigits, 9.0);
            s.push_back(2.0);
            break;
        default:
            s.assign(static_cast<std::size_t>(spec.width), 9.0);
            break;
    }
    return s;
}

FeatureRowMatrix scaled_for_network(const FeatureMatrix& m) {
    const auto s = input_scale(m.spec);
    FeatureRowMatrix out = m.values;
    for (Eigen::Index c = 0; c < out.cols(); ++c) out.col(c) /= s[static_cast<std::size_t>(c)];
    return out;
}

std::string to_csv(const FeatureMatrix& m) {
    std::string out;
    for (int c = 0; c < m.spec.width; ++c) {
        out += 'f';
        out += std::to_string(c);
        out += ',';
    }
    out += "y\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out += format_real(m.values(r, c));
            out += ',';
        }
        out += std::to_string(m.labels[static_cast<std::size_t>(r)]);
        out += '\n';
    }
    return out;
}

}  // namespace residue
