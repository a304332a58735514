#pragma once

#include <span>
#include <string>
#include <vector>

#include "srl/net.hpp"

namespace srl {

// Sphere regions deciding how a ridge atom behaves on the unit ball:
//   Minus: (x^T,1) v <= 0 everywhere, the ridge vanishes;
//   Plus:  (x^T,1) v >= 0 everywhere, the ridge is linear;
//   Zero:  the ridge is genuinely nonlinear.
enum class SphereRegion { Minus, Plus, Zero };

struct SphereDirection {
    std::vector<double> unit; // length d+1, norm 1
    SphereRegion region = SphereRegion::Zero;
};

// Normalizes v and tags its region. The boundary |last| = sqrt(2)/2 is
// inclusive into Minus/Plus, tested with a 1e-12 slack so boundary
// directions classify deterministically despite normalization rounding.
SphereDirection classify(std::span<const double> v);

bool same_direction(const SphereDirection& a, const SphereDirection& b);
bool antipodal_direction(const SphereDirection& a, const SphereDirection& b);

struct MeasureAtom {
    double coefficient = 0.0;
    SphereDirection direction;
};

// Signed atomic measure on S^d with pairwise distinct directions.
// Construction merges coincident directions (angular tolerance 1e-12)
// and drops coefficients below 1e-14.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    explicit DiscreteMeasure(std::vector<MeasureAtom> raw_atoms);

    const std::vector<MeasureAtom>& atoms() const noexcept { return atoms_; }
    bool empty() const noexcept { return atoms_.empty(); }

    // ||mu|| = sum |c_i|.
    double total_variation() const;

    // f_mu(x) = sum c_i relu((x^T,1) v_i).
    double evaluate(std::span<const double> x) const;

private:
    std::vector<MeasureAtom> atoms_;
};

// mu = sum a_i ||w_i|| delta_{w_i/||w_i||}; zero atoms dropped,
// coincident directions merged. Always ||mu|| <= kappa(theta).
DiscreteMeasure to_measure(const Parameterization& net);

// Reduced representation: nonlinear ridge atoms on pairwise
// non-antipodal Zero-region directions plus one linear term (x^T,1) w.
struct CanonicalForm {
    std::vector<MeasureAtom> ridge;
    std::vector<double> linear; // length d+1
};

// Rewrites the measure in canonical form without changing the function
// on B^d: antipodal Zero pairs merge first (relu(-t) = relu(t) - t),
// then Plus atoms fold into the linear part and Minus atoms drop.
CanonicalForm reduce(const DiscreteMeasure& m);

double canonical_evaluate(const CanonicalForm& cf, std::span<const double> x);

// Converts a canonical form back into a parameterization; the linear
// part becomes the ridge pair relu(t) - relu(-t) = t.
Parameterization render(const CanonicalForm& cf, int dim_input);

// Witness for the zero-function test: which condition failed and the
// residual moment vector (1/2) sum_{Zero} c_i v_i + sum_{Plus} c_i v_i.
struct ZeroFunctionCertificate {
    bool is_zero = false;
    bool pairing_ok = false;  // condition (1): antipodal partners with negated coefficients
    bool moment_ok = false;   // condition (2): moment vector vanishes
    int failing_atom = -1;    // first Zero atom without a partner, -1 if none
    std::vector<double> moment_residual;
    double moment_residual_norm = 0.0;
    std::string detail;
};

// f_mu == 0 on B^d iff every Zero atom has an antipodal partner with
// negated coefficient and the combined moment vector vanishes; Minus
// atoms contribute nothing and are ignored. Tolerance 1e-10.
ZeroFunctionCertificate is_zero_function(const DiscreteMeasure& m);

// Two-sided estimate of the variation norm kappa(f).
struct KappaBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// lower = max(||w||, sum |c_k|); upper = total variation of the measure
// constructed case-by-case from the linear part. Always
// lower <= upper <= 3 * lower, with equality (lower == upper) when w = 0.
KappaBounds kappa_bounds(const CanonicalForm& cf);

// min(path_norm(net), canonical upper bound) — a parameterization-level
// upper estimate of kappa(f), never above 3x the reported lower bound.
double kappa_upper_via_theorem(const Parameterization& net);

} // namespace srl
