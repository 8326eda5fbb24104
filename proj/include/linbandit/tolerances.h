#pragma once

namespace linbandit {

// Fixed tolerance hierarchy for double precision at d <= 32.
inline constexpr double kEqualityTol = 1e-10;
inline constexpr double kInverseTol = 1e-8;
inline constexpr double kPreconditionSlack = 1e-9;

}  // namespace linbandit
