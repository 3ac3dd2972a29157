#pragma once

#include <filesystem>

#include "pbsim/pack.hpp"

namespace testing {

inline const std::filesystem::path kSourceDir{PBSIM_SOURCE_DIR};

inline std::filesystem::path nmc_table_path() { return kSourceDir / "data/ocv/nmc_graphite.csv"; }

inline pbsim::OcvModel standard_affine() { return pbsim::AffineOcv(3.0, 1.2); }

inline pbsim::PackParams affine_pack(double qa, double ra, double qb, double rb,
                                     const pbsim::OcvModel& ocv = standard_affine()) {
    return pbsim::PackParams(pbsim::CellParams(qa, ra, ocv), pbsim::CellParams(qb, rb, ocv));
}

// (5 Ah, 50 mOhm) and (5.6 Ah, 33 mOhm).
inline pbsim::PackParams reference_pack() { return affine_pack(5.0, 0.050, 5.6, 0.033); }

}  // namespace testing
