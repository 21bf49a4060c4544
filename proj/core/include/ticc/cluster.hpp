#pragma once

#include "ticc/toeplitz.hpp"

namespace ticc {

/// One cluster's Gaussian window model.
struct ClusterModel {
  BlockToeplitzMatrix theta;
  Vector mu;
  Index count = 0;
};

}  // namespace ticc
