#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "eusboost/core.hpp"
#include "eusboost/ensembles.hpp"

namespace eusboost {

/// Reads a headered, comma-separated file. Every column except `label_column`
/// must hold finite decimals. Errors name the offending line and column.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column = "label");
Dataset parse_csv(std::istream& in, const std::string& label_column = "label",
                  const std::string& source = "<stream>");

/// Rows with their raw label strings, without choosing a positive class.
/// `labels` is empty when the file has no label column.
struct RawTable {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
};

RawTable load_raw_csv(const std::filesystem::path& path, const std::string& label_column = "label");

/// Writes features as f1..fd plus a "label" column, 17 significant digits.
void write_csv(std::ostream& out, const Dataset& ds);

struct SyntheticSpec {
    std::size_t n = 200;
    std::size_t d = 2;
    double ir = 9.0;
    double delta = 2.0;  // distance between class means, in standard deviations
    std::uint64_t seed = 1;

    void validate() const;
};

inline constexpr const char* kSyntheticPositiveLabel = "pos";
inline constexpr const char* kSyntheticNegativeLabel = "neg";

/// Two unit-variance spherical Gaussians, means `delta` apart along the first
/// axis, with n_neg = round(n * ir / (ir + 1)).
Dataset generate_synthetic(const SyntheticSpec& spec);

struct ModelFile {
    static constexpr int kFormatVersion = 1;

    Method method = Method::EUB;
    MethodParams params;
    Model model;
    std::string dataset_fingerprint;
    std::uint64_t seed = 0;
    LabelNames labels;
    std::size_t dim = 0;
};

std::string serialize_model(const ModelFile& file);
/// Throws ModelFormatError on malformed input, UnsupportedVersionError on an
/// unknown format version.
ModelFile deserialize_model(const std::string& text);

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace eusboost
