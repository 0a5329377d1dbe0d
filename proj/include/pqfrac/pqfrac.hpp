/// @file pqfrac.hpp
/// @brief Umbrella header.
#pragma once

#include "pqfrac/error.hpp"
#include "pqfrac/numeric.hpp"
#include "pqfrac/exponents.hpp"
#include "pqfrac/grid.hpp"
#include "pqfrac/field.hpp"
#include "pqfrac/expr.hpp"
#include "pqfrac/operator.hpp"
#include "pqfrac/discrete_energy.hpp"
#include "pqfrac/solver.hpp"
#include "pqfrac/oracle.hpp"
#include "pqfrac/norms.hpp"
#include "pqfrac/functionals.hpp"
#include "pqfrac/catalog.hpp"
#include "pqfrac/verify.hpp"
#include "pqfrac/constants.hpp"
#include "pqfrac/config.hpp"
#include "pqfrac/report.hpp"
#include "pqfrac/cli.hpp"
