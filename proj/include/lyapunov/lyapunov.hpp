#pragma once

#include "beta.hpp"
#include "ensembles.hpp"
#include "field_matrix.hpp"
#include "montecarlo.hpp"
#include "quadrature.hpp"
#include "sigma.hpp"
#include "specfun.hpp"
#include "stats.hpp"
#include "theory.hpp"
