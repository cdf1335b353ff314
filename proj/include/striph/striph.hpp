#pragma once

#include "striph/errors.hpp"
#include "striph/parallel.hpp"
#include "striph/quadrature.hpp"
#include "striph/field.hpp"
#include "striph/weights.hpp"
#include "striph/basis.hpp"
#include "striph/solver.hpp"
#include "striph/verification.hpp"
#include "striph/io.hpp"
