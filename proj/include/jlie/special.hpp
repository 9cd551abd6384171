#pragma once

namespace jlie {

/// E1(u) for u > 0; for u < 0 the real principal value -Ei(-u).
/// Undefined (returns -inf/+inf pole behaviour) at u == 0.
double expint1(double u);

}  // namespace jlie
