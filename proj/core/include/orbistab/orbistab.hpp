#pragma once

#include "orbistab/certify.hpp"
#include "orbistab/closed_loop.hpp"
#include "orbistab/expr.hpp"
#include "orbistab/integrate.hpp"
#include "orbistab/mech_model.hpp"
#include "orbistab/prefeedback.hpp"
#include "orbistab/quadrature.hpp"
#include "orbistab/synthesis.hpp"
#include "orbistab/target.hpp"
#include "orbistab/types.hpp"
