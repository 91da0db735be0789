#pragma once

/// Reference values from an independent collocation solver (tests/oracles/ground_state_bvp.py),
/// stable to all printed digits between truncation radii 30 and 36.
namespace kpeaks::golden {

/// Ground state with lambda = 1, p = 3.
constexpr double q3_peak = 4.33738767997699;
constexpr double q3_grad_sq = 56.6917539076379;
constexpr double q3_l2_sq = 18.8972513025453;
constexpr double q3_l4_pow = 75.5890052101838;
constexpr double q3_at_2 = 0.183119734855721;

/// Ground state with lambda = 1, p = 2.
constexpr double q2_peak = 4.19168295444244;
constexpr double q2_grad_sq = 130.980710148738;
constexpr double q2_l2_sq = 130.980710148737;
constexpr double q2_l3_pow = 261.961420297475;
constexpr double q2_at_2 = 0.869598949684452;

} // namespace kpeaks::golden
