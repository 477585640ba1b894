#pragma once

#include "pwl/error.hpp"
#include "pwl/system.hpp"
#include "pwl/geometry.hpp"
#include "pwl/quadrature.hpp"
#include "pwl/melnikov.hpp"
#include "pwl/expansion.hpp"
#include "pwl/zeros.hpp"
#include "pwl/simulator.hpp"
#include "pwl/io.hpp"
