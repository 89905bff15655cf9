// Numeric tolerances and iteration caps pinned for the whole toolkit.
#pragma once

namespace vanum::tol {

inline constexpr double kFeasibility = 1e-10;    // allowed constraint violation on outputs
inline constexpr double kKktSlot = 1e-8;         // per-slot allocation KKT residual bound
inline constexpr double kKktStationary = 1e-6;   // stationary solve default KKT target
inline constexpr double kKktOffline = 1e-6;      // offline solve default KKT target
inline constexpr double kInnerRoot = 1e-12;      // scalar stationarity root tolerance
inline constexpr double kFixedPointGbar = 1e-8;  // fixed-point drift-norm target
inline constexpr int kBisectionCap = 200;        // dual bisection iteration cap
inline constexpr int kSlotIterCap = 10000;       // per-slot projected-gradient cap
inline constexpr int kStationaryIterCap = 100000;
inline constexpr int kOfflineIterCap = 100000;
inline constexpr long kOfflineVarCap = 200000;   // max T*N for the offline solve

}  // namespace vanum::tol
