#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace residue {

/// Largest sampled integer: 2^32 (the sampling range is closed).
inline constexpr std::uint64_t kMaxInput = std::uint64_t{1} << 32;

/// Divisor p of the classification problem, 2 <= p <= 2^32.
class Modulus {
public:
    /// Throws Error(invalid-modulus) outside [2, 2^32].
    explicit Modulus(std::uint64_t p);

    std::uint64_t value() const noexcept { return p_; }
    friend bool operator==(Modulus, Modulus) = default;

private:
    std::uint64_t p_;
};

/// Ground-truth label: x mod p by exact integer arithmetic.
inline std::uint64_t residue_oracle(std::uint64_t x, Modulus p) noexcept { return x % p.value(); }

struct Sample {
    std::uint64_t x;
    std::uint64_t y;
    friend bool operator==(const Sample&, const Sample&) = default;
};

struct SplitInfo {
    std::size_t train_count = 0;
    std::size_t test_count = 0;
};

struct LabeledDataset {
    Modulus modulus{2};
    std::vector<Sample> samples;
    std::uint64_t seed = 0;
    /// Metadata describing how this set is (to be) partitioned. Defaults to
    /// everything-train.
    SplitInfo split;

    std::size_t size() const noexcept { return samples.size(); }
};

/// `count` integers uniform on [0, 2^32] drawn with SplitMix64(seed), labelled
/// by residue_oracle. Sampling is with replacement.
LabeledDataset generate(std::uint64_t seed, std::size_t count, Modulus p);

/// Builds a dataset from explicit integers (labels from the oracle). Throws
/// Error(domain) for x > 2^32.
LabeledDataset from_integers(std::span<const std::uint64_t> xs, Modulus p, std::uint64_t seed = 0);

/// Number of leading samples assigned to training: floor(fraction * n).
std::size_t train_count_for(std::size_t n, double train_fraction);

struct TrainTest {
    LabeledDataset train;
    LabeledDataset test;
};

/// Prefix/suffix split in sample order. Throws Error(invalid-split) when the
/// fraction is outside (0,1) or either side would be empty.
TrainTest split(const LabeledDataset& d, double train_fraction);

/// Splits according to d.split (train_count leading samples).
TrainTest split(const LabeledDataset& d);

/// Sets d.split from a fraction without partitioning.
void set_split(LabeledDataset& d, double train_fraction);

/// `x,y` header, one decimal row per sample.
std::string to_csv(const LabeledDataset& d);
/// key=value sidecar: seed, count, p, train_count, test_count.
std::string to_meta(const LabeledDataset& d);

/// Writes `<path>` (CSV) and `<path stem>.meta` next to it.
void save_dataset(const LabeledDataset& d, const std::filesystem::path& csv_path);
/// Reads the CSV and its `.meta` sidecar; labels are re-checked against the
/// oracle (Error(malformed) on mismatch).
LabeledDataset load_dataset(const std::filesystem::path& csv_path);

std::filesystem::path meta_path_for(const std::filesystem::path& csv_path);

}  // namespace residue
