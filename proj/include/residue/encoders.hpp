#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "residue/dataset.hpp"

namespace residue {

enum class EncoderKind {
    raw,
    binary,
    base3,
    one_gram,
    two_gram,
    three_gram,
    one_two_gram,
    one_two_three_gram,
    one_gram_sum,
    one_gram_sum_mod3,
};

/// Fixed widths implied by the 2^32 input bound.
inline constexpr int kBinaryDigits = 33;   // 2^32 needs 33 bits
inline constexpr int kBase3Digits = 21;    // 3^20 < 2^32 <= 3^21
inline constexpr int kDecimalDigits = 10;  // 4294967296

struct EncoderSpec {
    EncoderKind kind = EncoderKind::raw;
    int width = 1;

    friend bool operator==(const EncoderSpec&, const EncoderSpec&) = default;
};

EncoderSpec make_encoder(EncoderKind kind);

std::string_view to_string(EncoderKind kind);
/// Throws Error(invalid-config) listing the valid names.
EncoderKind parse_encoder_kind(std::string_view name);
const std::vector<EncoderKind>& all_encoder_kinds();

/// raw, binary, base3 and one_gram admit a decoder.
bool is_positional(EncoderKind kind);

using FeatureRowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FeatureMatrix {
    EncoderSpec spec;
    FeatureRowMatrix values;
    /// Labels of the source dataset, row-aligned.
    std::vector<std::uint64_t> labels;
    Modulus modulus{2};
    std::uint64_t source_seed = 0;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

/// Encodes x into spec.width reals, left-zero-padded, most significant first.
/// Combined kinds concatenate one-gram, then two-gram, then three-gram.
/// Throws Error(domain) for x > 2^32.
std::vector<double> encode(std::uint64_t x, const EncoderSpec& spec);
void encode_into(std::uint64_t x, const EncoderSpec& spec, std::span<double> out);

/// Inverse of encode for positional kinds. Throws Error(unsupported) for
/// other kinds and Error(malformed) for a bad length, non-digit entry or a
/// value beyond 2^32.
std::uint64_t decode(std::span<const double> v, const EncoderSpec& spec);

/// Row i is encode(x_i). Errors are rethrown with the row index.
FeatureMatrix encode_dataset(const LabeledDataset& d, const EncoderSpec& spec);

/// Per-column divisors that bring features into [0,1] for network input:
/// raw by 2^32, binary digits by 1, base-3 digits by 2, decimal digits by 9,
/// digit sum by 90 and digit sum mod 3 by 2.
std::vector<double> input_scale(const EncoderSpec& spec);
FeatureRowMatrix scaled_for_network(const FeatureMatrix& m);

/// Header `f0,...,f{w-1},y`.
std::string to_csv(const FeatureMatrix& m);

}  // namespace residue
