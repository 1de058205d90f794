#pragma once

#include <string>

#include "eas/approximator.hpp"

namespace eas {

// Numeric payload encoding inside a model file. Decimal writes every value
// with 17 significant digits (exact double round-trip); binary writes raw
// little-endian IEEE-754 bytes.
enum class Encoding { decimal, binary };

// Versioned, checksummed single-file model format; see README for the field
// list. Loading a saved model reproduces bit-identical predictions.
void save_model(const Approximator& m, const std::string& path,
                Encoding encoding = Encoding::decimal);

Approximator load_model(const std::string& path);

// One-line human summary (dimensions, distribution, sparsity, dead units).
std::string describe_model(const Approximator& m);

}  // namespace eas
