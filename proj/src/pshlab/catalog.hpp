#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pshlab/expr.hpp"
#include "pshlab/types.hpp"

namespace pshlab {

// Named psh test functions with their known ground truths. The values are
// closed forms: nu from the defining slope, iota from the integrability
// threshold of |.|^{-2 nu / r} in the ambient real dimension, centered_mo from
// the explicit antiderivatives of the radial profiles.
struct CatalogEntry {
    std::string name;
    PshExpr expr;
    int dim = 1;
    Point distinguished = Point::zero(1);
    std::optional<double> expected_nu;
    std::optional<double> expected_iota;
    // MO over balls centered at the distinguished point (radius-independent
    // for the homogeneous entries), where a closed form exists.
    std::optional<double> expected_centered_mo;
    // Whether the squared gradient is locally integrable near the singularity.
    std::optional<bool> expected_sobolev_finite;
    BallSpec working_ball{Point::zero(1), 1.0};
    std::string note;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);
bool catalog_has(const std::string& name);

}  // namespace pshlab
