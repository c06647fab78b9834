#pragma once

// State files: {"dims": [d1, ..., dn], "amplitudes": [[re, im], ...]} with
// amplitudes row-major, factor 1 most significant.

#include <filesystem>
#include <string>

#include "entgap/tensor.hpp"

namespace entgap {

/// Norm tolerance applied when loading; accepted states are renormalized.
inline constexpr double kLoadNormTolerance = 1e-9;

PureState parse_state(const std::string& text);
PureState load_state(const std::filesystem::path& path);

std::string dump_state(const PureState& psi);
void save_state(const PureState& psi, const std::filesystem::path& path);

}  // namespace entgap
