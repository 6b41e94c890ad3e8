#pragma once

#include "ldg/parameters.hpp"
#include "ldg/grid.hpp"
#include "ldg/state.hpp"
#include "ldg/energy.hpp"
#include "ldg/residual.hpp"
#include "ldg/linear.hpp"
#include "ldg/newton.hpp"
#include "ldg/stability.hpp"
#include "ldg/asymptotics.hpp"
#include "ldg/limits.hpp"
#include "ldg/continuation.hpp"
#include "ldg/io.hpp"
