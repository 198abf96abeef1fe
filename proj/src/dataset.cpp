#include "residue/dataset.hpp"

#include <cmath>
#include <sstream>

#include "residue/error.hpp"
#include "residue/keyvalue.hpp"
#include "residue/rng.hpp"

namespace residue {

Modulus::Modulus(std::uint64_t p) : p_(p) {
    if (p < 2 || p > kMaxInput)
        throw Error(errc::kInvalidModulus, "modulus must be in [2, 2^32], got " + std::to_string(p));
}

LabeledDataset generate(std::uint64_t seed, std::size_t count, Modulus p) {
    if (count == 0) throw Error(errc::kInvalidConfig, "dataset count must be positive");
    LabeledDataset d{p, {}, seed, {count, 0}};
    d.samples.reserve(count);
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t x = rng.below(kMaxInput + 1);
        d.samples.push_back({x, residue_oracle(x, p)});
    }
    return d;
}

LabeledDataset from_integers(std::span<const std::uint64_t> xs, Modulus p, std::uint64_t seed) {
    LabeledDataset d{p, {}, seed, {xs.size(), 0}};
    d.samples.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] > kMaxInput)
            throw Error(errc::kDomain, "sample " + std::to_string(i) + ": " + std::to_string(xs[i]) +
                                           " exceeds 2^32");
        d.samples.push_back({xs[i], residue_oracle(xs[i], p)});
    }
    return d;
}

std::size_t train_count_for(std::size_t n, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(errc::kInvalidSplit, "train fraction must lie in (0,1)");
    // A tiny nudge keeps fractions like 25000/30000 from flooring one short.
    const auto k = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));
    if (k == 0 || k >= n)
        throw Error(errc::kInvalidSplit, "fraction " + format_real(train_fraction) + " of " +
                                             std::to_string(n) + " samples leaves an empty side");
    return k;
}

namespace {

TrainTest split_at(const LabeledDataset& d, std::size_t k) {
    if (k == 0 || k >= d.size())
        throw Error(errc::kInvalidSplit, "split point " + std::to_string(k) + " leaves an empty side");
    TrainTest out{{d.modulus, {d.samples.begin(), d.samples.begin() + static_cast<std::ptrdiff_t>(k)}, d.seed, {k, 0}},
                  {d.modulus, {d.samples.begin() + static_cast<std::ptrdiff_t>(k), d.samples.end()}, d.seed,
                   {0, d.size() - k}}};
    return out;
}

}  // namespace

TrainTest split(const LabeledDataset& d, double train_fraction) {
    return split_at(d, train_count_for(d.size(), train_fraction));
}

TrainTest split(const LabeledDataset& d) {
    if (d.split.train_count + d.split.test_count != d.size())
        throw Error(errc::kInvalidSplit, "split metadata does not add up to the sample count");
    return split_at(d, d.split.train_count);
}

void set_split(LabeledDataset& d, double train_fraction) {
    const auto k = train_count_for(d.size(), train_fraction);
    d.split = {k, d.size() - k};
}

std::string to_csv(const LabeledDataset& d) {
    std::string out = "x,y\n";
    out.reserve(d.size() * 14);
    for (const auto& s : d.samples) {
        out += std::to_string(s.x);
        out += ',';
        out += std::to_string(s.y);
        out += '\n';
    }
    return out;
}

std::string to_meta(const LabeledDataset& d) {
    KeyValues kv;
    kv.set("seed", std::to_string(d.seed));
    kv.set("count", std::to_string(d.size()));
    kv.set("p", std::to_string(d.modulus.value()));
    kv.set("train_count", std::to_string(d.split.train_count));
    kv.set("test_count", std::to_string(d.split.test_count));
    return kv.str();
}

std::filesystem::path meta_path_for(const std::filesystem::path& csv_path) {
    auto meta = csv_path;
    meta.replace_extension(".meta");
    return meta;
}

void save_dataset(const LabeledDataset& d, const std::filesystem::path& csv_path) {
    write_file_atomic(csv_path, to_csv(d));
    write_file_atomic(meta_path_for(csv_path), to_meta(d));
}

LabeledDataset load_dataset(const std::filesystem::path& csv_path) {
    const auto meta = KeyValues::parse(read_file(meta_path_for(csv_path)));
    LabeledDataset d{Modulus(parse_uint(meta.at("p"))), {}, parse_uint(meta.at("seed")), {}};
    d.split = {static_cast<std::size_t>(parse_uint(meta.at("train_count"))),
               static_cast<std::size_t>(parse_uint(meta.at("test_count")))};

    std::istringstream in(read_file(csv_path));
    std::string line;
    if (!std::getline(in, line) || line != "x,y")
        throw Error(errc::kMalformed, csv_path.string() + ": expected header 'x,y'");
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error(errc::kMalformed, csv_path.string() + ": row " + std::to_string(row) + " lacks a comma");
        const std::uint64_t x = parse_uint(std::string_view(line).substr(0, comma));
        const std::uint64_t y = parse_uint(std::string_view(line).substr(comma + 1));
        if (x > kMaxInput)
            throw Error(errc::kDomain, csv_path.string() + ": row " + std::to_string(row) + " exceeds 2^32");
        if (y != residue_oracle(x, d.modulus))
            throw Error(errc::kMalformed, csv_path.string() + ": row " + std::to_string(row) +
                                              " label is not x mod p");
        d.samples.push_back({x, y});
    }
    if (d.size() != parse_uint(meta.at("count")))
        throw Error(errc::kMalformed, csv_path.string() + ": row count disagrees with metadata");
    if (d.split.train_count + d.split.test_count != d.size())
        throw Error(errc::kMalformed, csv_path.string() + ": split metadata does not add up");
    return d;
}

}  // namespace residue
