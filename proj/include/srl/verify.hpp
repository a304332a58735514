#pragma once

#include <string>
#include <vector>

#include "srl/canonical.hpp"
#include "srl/net.hpp"
#include "srl/rng.hpp"

namespace srl::verify {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;
    bool all_pass() const;
};

// Suites: "canonical", "rescale", "complexity", "rates"; "all" runs each.
// Unknown names throw ConfigError. Seeds are fixed inside each suite so a
// fresh checkout is reproducible.
std::vector<SuiteResult> run(const std::string& which);

std::string to_json(const std::vector<SuiteResult>& results);

// Shared builders for the property suites and the acceptance harness.
Parameterization random_network(RngStream& rng, int dim, int width);

// A measure satisfying both zero-function conditions: antipodal Zero
// pairs with interior bias components plus Plus atoms chosen to cancel
// the moment vector.
DiscreteMeasure make_zero_measure(RngStream& rng, int dim, int pairs);

} // namespace srl::verify
