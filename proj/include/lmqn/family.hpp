#pragma once

#include <cstddef>
#include <string>

#include "lmqn/errors.hpp"

namespace lmqn {

enum class UpdateKind { Bfgs, Dfp, Sr1, Broyden };

/// One of the four supported update families.  Broyden carries the convex
/// combination weight phi in [0,1]; phi=0 coincides with BFGS and phi=1 with
/// DFP, but the tags stay distinct so callers can pick the build path.
class UpdateFamily {
public:
    static UpdateFamily bfgs() { return UpdateFamily(UpdateKind::Bfgs, 0.0); }
    static UpdateFamily dfp() { return UpdateFamily(UpdateKind::Dfp, 1.0); }
    static UpdateFamily sr1() { return UpdateFamily(UpdateKind::Sr1, 0.0); }
    static UpdateFamily broyden(double phi) {
        if (!(phi >= 0.0 && phi <= 1.0))
            throw Error("broyden: phi must lie in [0,1]");
        return UpdateFamily(UpdateKind::Broyden, phi);
    }

    UpdateKind kind() const { return kind_; }
    double phi() const { return phi_; }

    /// BFGS, DFP and Broyden share the two-column-per-pair layout and the
    /// positive-curvature requirement; SR1 uses one column and permits
    /// indefiniteness.
    bool convex_class() const { return kind_ != UpdateKind::Sr1; }
    std::size_t columns_per_pair() const { return convex_class() ? 2 : 1; }

    std::string name() const {
        switch (kind_) {
            case UpdateKind::Bfgs: return "bfgs";
            case UpdateKind::Dfp: return "dfp";
            case UpdateKind::Sr1: return "sr1";
            case UpdateKind::Broyden: return "broyden";
        }
        return "?";
    }

private:
    UpdateFamily(UpdateKind kind, double phi) : kind_(kind), phi_(phi) {}

    UpdateKind kind_;
    double phi_;
};

} // namespace lmqn
