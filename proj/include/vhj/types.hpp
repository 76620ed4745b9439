#pragma once

#include <Eigen/Core>

namespace vhj {

using Index = Eigen::Index;
using Real = double;

// All field samples and tabulated profiles live in dense arrays.
using VecX = Eigen::ArrayXd;
using VecXRef = Eigen::Ref<const Eigen::ArrayXd>;

}  // namespace vhj
