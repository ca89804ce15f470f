#pragma once

#include "nlwr/bounds.hpp"
#include "nlwr/config.hpp"
#include "nlwr/congestion.hpp"
#include "nlwr/convolution.hpp"
#include "nlwr/csv.hpp"
#include "nlwr/errors.hpp"
#include "nlwr/functionals.hpp"
#include "nlwr/grid.hpp"
#include "nlwr/kernel.hpp"
#include "nlwr/parallel.hpp"
#include "nlwr/solver.hpp"
#include "nlwr/speed_limit.hpp"
#include "nlwr/sweep.hpp"
#include "nlwr/velocity.hpp"
