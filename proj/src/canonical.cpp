#include "srl/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "srl/common.hpp"

namespace srl {

namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double antidist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] + b[i];
        s += d * d;
    }
    return s;
}

} // namespace

SphereDirection classify(std::span<const double> v) {
    const double norm = euclidean_norm(v);
    if (!(norm > 0.0)) throw ConfigError("classify: degenerate zero direction");
    SphereDirection dir;
    dir.unit.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dir.unit[i] = v[i] / norm;
    const double last = dir.unit.back();
    // Inclusive boundary with rounding slack: a direction meant to sit at
    // |last| == sqrt(2)/2 lands in Minus/Plus, not Zero.
    if (last <= -kSqrtHalf + kAngularTol) {
        dir.region = SphereRegion::Minus;
    } else if (last >= kSqrtHalf - kAngularTol) {
        dir.region = SphereRegion::Plus;
    } else {
        dir.region = SphereRegion::Zero;
    }
    return dir;
}

bool same_direction(const SphereDirection& a, const SphereDirection& b) {
    return dist2(a.unit, b.unit) <= kAngularTol * kAngularTol;
}

bool antipodal_direction(const SphereDirection& a, const SphereDirection& b) {
    return antidist2(a.unit, b.unit) <= kAngularTol * kAngularTol;
}

DiscreteMeasure::DiscreteMeasure(std::vector<MeasureAtom> raw_atoms) {
    for (MeasureAtom& candidate : raw_atoms) {
        if (candidate.coefficient == 0.0) continue;
        bool merged = false;
        for (MeasureAtom& existing : atoms_) {
            if (same_direction(existing.direction, candidate.direction)) {
                existing.coefficient += candidate.coefficient;
                merged = true;
                break;
            }
        }
        if (!merged) atoms_.push_back(std::move(candidate));
    }
    std::erase_if(atoms_, [](const MeasureAtom& a) {
        return std::abs(a.coefficient) <= kCoefficientDropTol;
    });
}

double DiscreteMeasure::total_variation() const {
    double s = 0.0;
    for (const MeasureAtom& a : atoms_) s += std::abs(a.coefficient);
    return s;
}

double DiscreteMeasure::evaluate(std::span<const double> x) const {
    double out = 0.0;
    for (const MeasureAtom& a : atoms_) {
        double z = a.direction.unit.back();
        for (std::size_t i = 0; i < x.size(); ++i) z += a.direction.unit[i] * x[i];
        if (z > 0.0) out += a.coefficient * z;
    }
    return out;
}

DiscreteMeasure to_measure(const Parameterization& net) {
    std::vector<MeasureAtom> raw;
    raw.reserve(net.width());
    for (const Atom& a : net.atoms()) {
        const double wn = euclidean_norm(a.inner);
        if (wn == 0.0 || a.outer == 0.0) continue;
        MeasureAtom m;
        m.coefficient = a.outer * wn;
        m.direction = classify(a.inner);
        raw.push_back(std::move(m));
    }
    return DiscreteMeasure(std::move(raw));
}

CanonicalForm reduce(const DiscreteMeasure& m) {
    CanonicalForm cf;
    std::size_t lifted = 0;
    for (const MeasureAtom& a : m.atoms()) lifted = a.direction.unit.size();
    cf.linear.assign(lifted, 0.0);
    if (m.empty()) return cf;

    std::vector<MeasureAtom> zero_atoms;
    std::vector<const MeasureAtom*> plus_atoms;
    for (const MeasureAtom& a : m.atoms()) {
        switch (a.direction.region) {
            case SphereRegion::Minus: break; // relu((x,1)v) == 0 on B^d
            case SphereRegion::Plus: plus_atoms.push_back(&a); break;
            case SphereRegion::Zero: zero_atoms.push_back(a); break;
        }
    }

    // Antipodal merging first, matching the proof's order: the pair
    // c_i relu(u) + c_j relu(-u) becomes (c_i + c_j) relu(u) - c_j u.
    std::vector<bool> consumed(zero_atoms.size(), false);
    for (std::size_t i = 0; i < zero_atoms.size(); ++i) {
        if (consumed[i]) continue;
        for (std::size_t j = i + 1; j < zero_atoms.size(); ++j) {
            if (consumed[j]) continue;
            if (antipodal_direction(zero_atoms[i].direction, zero_atoms[j].direction)) {
                const double cj = zero_atoms[j].coefficient;
                zero_atoms[i].coefficient += cj;
                for (std::size_t k = 0; k < lifted; ++k)
                    cf.linear[k] -= cj * zero_atoms[i].direction.unit[k];
                consumed[j] = true;
                break; // directions are pairwise distinct, at most one partner
            }
        }
        if (std::abs(zero_atoms[i].coefficient) > kCoefficientDropTol)
            cf.ridge.push_back(zero_atoms[i]);
    }

    for (const MeasureAtom* a : plus_atoms)
        for (std::size_t k = 0; k < lifted; ++k)
            cf.linear[k] += a->coefficient * a->direction.unit[k];

    return cf;
}

double canonical_evaluate(const CanonicalForm& cf, std::span<const double> x) {
    double out = 0.0;
    for (const MeasureAtom& a : cf.ridge) {
        double z = a.direction.unit.back();
        for (std::size_t i = 0; i < x.size(); ++i) z += a.direction.unit[i] * x[i];
        if (z > 0.0) out += a.coefficient * z;
    }
    if (!cf.linear.empty()) {
        double z = cf.linear.back();
        for (std::size_t i = 0; i < x.size(); ++i) z += cf.linear[i] * x[i];
        out += z;
    }
    return out;
}

Parameterization render(const CanonicalForm& cf, int dim_input) {
    std::vector<Atom> atoms;
    atoms.reserve(cf.ridge.size() + 2);
    for (const MeasureAtom& a : cf.ridge)
        atoms.push_back(Atom{a.coefficient, a.direction.unit});
    const double wn = cf.linear.empty() ? 0.0 : euclidean_norm(cf.linear);
    if (wn > 0.0) {
        std::vector<double> neg(cf.linear.size());
        for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -cf.linear[i];
        atoms.push_back(Atom{1.0, cf.linear});
        atoms.push_back(Atom{-1.0, std::move(neg)});
    }
    return {dim_input, std::move(atoms)};
}

ZeroFunctionCertificate is_zero_function(const DiscreteMeasure& m) {
    ZeroFunctionCertificate cert;
    cert.pairing_ok = true;

    std::size_t lifted = 0;
    for (const MeasureAtom& a : m.atoms()) lifted = a.direction.unit.size();
    cert.moment_residual.assign(lifted, 0.0);

    const auto& atoms = m.atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const MeasureAtom& a = atoms[i];
        switch (a.direction.region) {
            case SphereRegion::Minus:
                break;
            case SphereRegion::Plus:
                for (std::size_t k = 0; k < lifted; ++k)
                    cert.moment_residual[k] += a.coefficient * a.direction.unit[k];
                break;
            case SphereRegion::Zero: {
                for (std::size_t k = 0; k < lifted; ++k)
                    cert.moment_residual[k] += 0.5 * a.coefficient * a.direction.unit[k];
                bool paired = false;
                for (std::size_t j = 0; j < atoms.size(); ++j) {
                    if (j == i) continue;
                    if (atoms[j].direction.region != SphereRegion::Zero) continue;
                    if (antipodal_direction(a.direction, atoms[j].direction) &&
                        std::abs(a.coefficient + atoms[j].coefficient) <= kZeroCertTol) {
                        paired = true;
                        break;
                    }
                }
                if (!paired && cert.pairing_ok) {
                    cert.pairing_ok = false;
                    cert.failing_atom = static_cast<int>(i);
                }
                break;
            }
        }
    }

    cert.moment_residual_norm = euclidean_norm(cert.moment_residual);
    cert.moment_ok = cert.moment_residual_norm <= kZeroCertTol;
    cert.is_zero = cert.pairing_ok && cert.moment_ok;

    std::ostringstream oss;
    if (cert.is_zero) {
        oss << "zero function: both conditions hold";
    } else if (!cert.pairing_ok) {
        oss << "condition (1) fails: atom " << cert.failing_atom
            << " has no antipodal partner with negated coefficient";
    } else {
        oss << "condition (2) fails: moment residual norm " << cert.moment_residual_norm;
    }
    cert.detail = oss.str();
    return cert;
}

KappaBounds kappa_bounds(const CanonicalForm& cf) {
    double ridge_mass = 0.0;
    for (const MeasureAtom& a : cf.ridge) ridge_mass += std::abs(a.coefficient);
    double wn = cf.linear.empty() ? 0.0 : euclidean_norm(cf.linear);
    // Residual linear parts at the noise floor count as exactly zero, so
    // the Case-1 equality applies (see the module's frozen tolerance).
    if (wn <= 1e-12) wn = 0.0;

    KappaBounds kb;
    kb.lower = std::max(wn, ridge_mass);

    if (wn == 0.0) {
        // Case 1: no linear part; the construction is exact.
        kb.upper = ridge_mass;
        kb.lower = ridge_mass;
        return kb;
    }

    const SphereDirection what = classify(cf.linear);
    if (what.region != SphereRegion::Zero) {
        // Case 2: the linear direction is itself linear on B^d.
        kb.upper = ridge_mass + wn;
        return kb;
    }
    for (const MeasureAtom& a : cf.ridge) {
        double c = 0.0;
        if (same_direction(what, a.direction)) c = wn;
        else if (antipodal_direction(what, a.direction)) c = -wn;
        if (c != 0.0) {
            // Case 3: w = c v_i for an existing ridge direction.
            kb.upper = ridge_mass - std::abs(a.coefficient) + std::abs(a.coefficient + c) +
                       std::abs(c);
            return kb;
        }
    }
    // Case 4: a fresh nonlinear direction costs an antipodal pair.
    kb.upper = ridge_mass + 2.0 * wn;
    return kb;
}

double kappa_upper_via_theorem(const Parameterization& net) {
    const KappaBounds kb = kappa_bounds(reduce(to_measure(net)));
    return std::min(path_norm(net), kb.upper);
}

} // namespace srl
