#pragma once

// Umbrella header.

#include "lrqmc/adjoint.hpp"
#include "lrqmc/errors.hpp"
#include "lrqmc/factor_updates.hpp"
#include "lrqmc/fsim.hpp"
#include "lrqmc/image.hpp"
#include "lrqmc/mask.hpp"
#include "lrqmc/metrics.hpp"
#include "lrqmc/png_io.hpp"
#include "lrqmc/qsvd.hpp"
#include "lrqmc/quaternion.hpp"
#include "lrqmc/quaternion_matrix.hpp"
#include "lrqmc/rank_estimation.hpp"
#include "lrqmc/recovery.hpp"
#include "lrqmc/solver.hpp"
#include "lrqmc/synthetic.hpp"
