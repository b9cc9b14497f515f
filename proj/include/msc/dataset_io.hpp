#pragma once

// CSV formats:
//   datasets  feature_0,...,feature_{d-1},budget,label   (LF endings)
//   profiles  units,budget

#include <filesystem>
#include <iosfwd>

#include "msc/market_core.hpp"

namespace msc {

struct LoadOptions {
  // Synthetic constructions center features at 0; real exports must not.
  bool allow_negative_features = false;
};

/// Throws SchemaError (bad header), ParseError (bad field), or
/// InvariantViolation (negative feature, budget <= 0, label outside {0,1});
/// each carries the 1-based data row.
Dataset read_dataset(std::istream& in, const LoadOptions& opts = {});
Dataset load_dataset(const std::filesystem::path& path,
                     const LoadOptions& opts = {});

/// Shortest round-trip formatting; reloading gives back identical values.
void write_dataset(std::ostream& out, const Dataset& data);
void save_dataset(const std::filesystem::path& path, const Dataset& data);

DemandProfile read_profile(std::istream& in);
DemandProfile load_profile(const std::filesystem::path& path);
void write_profile(std::ostream& out, const DemandProfile& profile);

/// Affine budgets with min -> 1 and max -> 2^alpha exactly; all-equal
/// budgets map to 1. Throws InputError for alpha < 0.
Dataset rescale_budgets(const Dataset& data, double alpha);

}  // namespace msc
