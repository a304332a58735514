#pragma once

#include <optional>
#include <string>

#include "srl/canonical.hpp"
#include "srl/net.hpp"

namespace srl {

// Model document: {"format_version", "dim_input", "atoms": [[a, [w...]], ...]}.
// Doubles survive save/load bit-exactly (shortest round-trip decimals).
void save_model(const Parameterization& net, const std::string& path);
Parameterization load_model(const std::string& path);

// Same document with an extra "canonical" block
// {"ridge": [[c, [v...]], ...], "linear": [w...]} plus the kappa interval
// and zero-function verdict.
void save_model_with_canonical(const Parameterization& net, const CanonicalForm& cf,
                               const KappaBounds& kb, bool zero_function,
                               const std::string& path);
std::string model_with_canonical_json_string(const Parameterization& net, const CanonicalForm& cf,
                                             const KappaBounds& kb, bool zero_function);

std::string model_to_json_string(const Parameterization& net);
Parameterization model_from_json_string(const std::string& text);

} // namespace srl
